use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Process exit codes. Bounded searches never claim a negative answer, so
/// "nothing found within the bound" has its own code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exit {
    Ok = 0,
    Error = 2,
    Exhausted = 10,
    Collision = 11,
    OracleMismatch = 12,
}

#[derive(Serialize)]
pub struct InputFile {
    pub path: String,
    pub sha256: String,
}

/// Reads a file and records its content hash.
pub fn read_input(path: &Path, inputs: &mut BTreeMap<String, InputFile>, role: &str) -> Result<String, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    let hash = Sha256::digest(&bytes);
    inputs.insert(
        role.to_owned(),
        InputFile {
            path: path.display().to_string(),
            sha256: hash.iter().map(|b| format!("{b:02x}")).collect(),
        },
    );
    String::from_utf8(bytes).map_err(|_| CliError::Input(format!("{} is not UTF-8", path.display())))
}

/// Everything a run emits. Field order is fixed; `wall_time_ms` comes last
/// and is the only field that varies between identical runs.
#[derive(Serialize)]
pub struct Report<C: Serialize, O: Serialize> {
    pub command: &'static str,
    pub config: C,
    pub inputs: BTreeMap<String, InputFile>,
    pub exit: Exit,
    pub outcome: O,
    pub wall_time_ms: u128,
}

pub struct Timer(Instant);

impl Timer {
    pub fn start() -> Self {
        Timer(Instant::now())
    }

    pub fn ms(&self) -> u128 {
        self.0.elapsed().as_millis()
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e))
}

/// Pretty JSON to `out`, or stdout when no path is given.
pub fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    match out {
        Some(p) => write_text(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
