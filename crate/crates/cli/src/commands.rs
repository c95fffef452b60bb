use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chanmem::exact::{format_rational, parse_rational, ratio, ExactDensityMatrix, ExactMatrix, GaussianRational, Rational};
use chanmem::freerot::{freeness_scan, make_free_pair, make_pair_unverified, FreePair, RotationParams};
use chanmem::pcp::{parse_instance, solve_bounded, PcpInstance, SearchOutcome, SearchStatus};
use chanmem::reduction::{
    apply, compile, make_target, membership_search, theory_diff, DiffStatus, GeneratorSet, MembershipOutcome,
    SearchMode, Theory,
};
use chanmem::resourcegraph::{
    channels_from_set, check_compatible, check_complete, explore, monotone_family, quotient, reach, Digraph,
    ReachOutcome,
};
use serde::Serialize;

use crate::report::{emit, read_input, write_text, Exit, InputFile, Report, Timer};
use crate::{CliError, ModeArg, OutArgs, PairArgs};

type Inputs = BTreeMap<String, InputFile>;

#[derive(Serialize)]
struct PairConfig {
    #[serde(flatten)]
    params: RotationParams,
    unchecked: bool,
}

fn resolve_pair(args: &PairArgs, inputs: &mut Inputs) -> Result<(FreePair, PairConfig), CliError> {
    let mut params = match &args.params {
        Some(path) => {
            let text = read_input(path, inputs, "params")?;
            serde_json::from_str::<RotationParams>(&text)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        }
        None => RotationParams::default(),
    };
    match (&args.cos, &args.sin) {
        (Some(c), Some(s)) => {
            params.cos = parse_rational(c)?;
            params.sin = parse_rational(s)?;
        }
        (None, None) => {}
        _ => return Err(CliError::Input("--cos and --sin must be given together".into())),
    }
    let pair = if args.unchecked {
        make_pair_unverified(params.clone())?
    } else {
        make_free_pair(params.clone())?
    };
    Ok((pair, PairConfig { params, unchecked: args.unchecked }))
}

fn load_instance(path: &Path, inputs: &mut Inputs, role: &str) -> Result<PcpInstance, CliError> {
    Ok(parse_instance(&read_input(path, inputs, role)?)?)
}

fn parse_damping(s: &str) -> Result<Rational, CliError> {
    let d = parse_rational(s)?;
    if d <= ratio(0, 1) || d >= ratio(1, 1) {
        return Err(CliError::Input(format!("--damping must lie strictly between 0 and 1, got {s}")));
    }
    Ok(d)
}

fn positive(name: &str, v: usize) -> Result<usize, CliError> {
    if v == 0 {
        return Err(CliError::Input(format!("--{name} must be at least 1")));
    }
    Ok(v)
}

/// Full-rank state with no symmetry under the diagonal index rotation.
fn generic_seed() -> ExactDensityMatrix {
    let rows = [[10, 1, 2, 3], [1, 8, 1, 2], [2, 1, 6, 1], [3, 2, 1, 7]];
    let m = ExactMatrix::from_fn(4, 4, |r, c| GaussianRational::real(ratio(rows[r][c], 31)));
    ExactDensityMatrix::new(m).expect("generic seed is a density matrix")
}

fn resolve_seed(selector: &str, inputs: &mut Inputs) -> Result<ExactDensityMatrix, CliError> {
    const DIM: usize = 4;
    if selector == "generic" {
        return Ok(generic_seed());
    }
    if selector == "mixed" {
        return Ok(ExactDensityMatrix::maximally_mixed(DIM));
    }
    if let Some(k) = selector.strip_prefix("basis:") {
        let k: usize = k.parse().map_err(|_| CliError::Input(format!("bad basis index `{k}`")))?;
        if k >= DIM {
            return Err(CliError::Input(format!("basis index {k} out of range for dimension {DIM}")));
        }
        return Ok(ExactDensityMatrix::basis(DIM, k));
    }
    let text = read_input(Path::new(selector), inputs, "seed")?;
    let m: ExactMatrix = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{selector}: {e}")))?;
    if m.rows() != DIM {
        return Err(CliError::Input(format!("seed must be {DIM}x{DIM}")));
    }
    Ok(ExactDensityMatrix::new(m)?)
}

fn finish<C: Serialize, O: Serialize>(
    command: &'static str,
    config: C,
    inputs: Inputs,
    exit: Exit,
    outcome: O,
    timer: Timer,
    out: &OutArgs,
) -> Result<Exit, CliError> {
    let report = Report { command, config, inputs, exit, outcome, wall_time_ms: timer.ms() };
    emit(&report, out.out.as_deref())?;
    Ok(exit)
}

pub fn run_verify_free(pair: &PairArgs, depth: usize, budget: Option<usize>, out: &OutArgs) -> Result<Exit, CliError> {
    #[derive(Serialize)]
    struct Config {
        pair: PairConfig,
        max_len: usize,
        budget: Option<usize>,
    }
    let timer = Timer::start();
    let mut inputs = Inputs::new();
    let (fp, pc) = resolve_pair(pair, &mut inputs)?;
    let report = freeness_scan(&fp, positive("depth", depth)?, budget);
    let exit = if !report.is_clean() {
        Exit::Collision
    } else if report.truncated {
        Exit::Exhausted
    } else {
        Exit::Ok
    };
    let config = Config { pair: pc, max_len: depth, budget };
    finish("verify-free", config, inputs, exit, report, timer, out)
}

pub fn run_solve_pcp(instance: &Path, depth: usize, budget: Option<usize>, out: &OutArgs) -> Result<Exit, CliError> {
    #[derive(Serialize)]
    struct Config {
        max_depth: usize,
        budget: Option<usize>,
    }
    let timer = Timer::start();
    let mut inputs = Inputs::new();
    let inst = load_instance(instance, &mut inputs, "instance")?;
    let outcome = solve_bounded(&inst, positive("depth", depth)?, budget)?;
    let exit = status_exit(outcome.status);
    finish("solve-pcp", Config { max_depth: depth, budget }, inputs, exit, outcome, timer, out)
}

fn status_exit(status: SearchStatus) -> Exit {
    match status {
        SearchStatus::Found => Exit::Ok,
        SearchStatus::ExhaustedToDepth => Exit::Exhausted,
    }
}

#[derive(Serialize)]
struct CompileConfig {
    pair: PairConfig,
    damping: String,
}

fn compile_from(
    instance: &Path,
    pair: &PairArgs,
    damping: &str,
    inputs: &mut Inputs,
) -> Result<(GeneratorSet, CompileConfig), CliError> {
    let inst = load_instance(instance, inputs, "instance")?;
    let (fp, pc) = resolve_pair(pair, inputs)?;
    let d = parse_damping(damping)?;
    let set = compile(&inst, &fp, &d)?;
    Ok((set, CompileConfig { pair: pc, damping: format_rational(&d) }))
}

pub fn run_compile(instance: &Path, pair: &PairArgs, damping: &str, out: &OutArgs) -> Result<Exit, CliError> {
    let timer = Timer::start();
    let mut inputs = Inputs::new();
    let (set, config) = compile_from(instance, pair, damping, &mut inputs)?;
    finish("compile", config, inputs, Exit::Ok, set.to_bundle(), timer, out)
}

pub fn run_membership(
    instance: &Path,
    pair: &PairArgs,
    damping: &str,
    depth: usize,
    mode: ModeArg,
    budget: Option<usize>,
    out: &OutArgs,
) -> Result<Exit, CliError> {
    #[derive(Serialize)]
    struct Config {
        #[serde(flatten)]
        compile: CompileConfig,
        mode: SearchMode,
        max_depth: usize,
        budget: Option<usize>,
    }
    #[derive(Serialize)]
    struct Outcome {
        membership: MembershipOutcome,
        /// Tile depth the PCP search was run to: half the word depth covered.
        oracle_depth: usize,
        oracle: SearchOutcome,
        agreement: bool,
    }
    let timer = Timer::start();
    let mut inputs = Inputs::new();
    let (set, compile_config) = compile_from(instance, pair, damping, &mut inputs)?;
    let mode = match mode {
        ModeArg::Generic => SearchMode::Generic,
        ModeArg::Structured => SearchMode::Structured,
    };
    let result = membership_search(&set, positive("depth", depth)?, mode, budget);
    let covered = if result.status == SearchStatus::Found { depth } else { result.depth_reached };
    let oracle_depth = (covered / 2).max(1);
    let oracle = solve_bounded(&set.instance, oracle_depth, None)?;
    let agreement = match (result.status, &oracle.witness) {
        (SearchStatus::Found, Some(w)) => result.witness_depth == Some(2 * w.len()),
        (s, _) => s == oracle.status,
    };
    let exit = if !agreement {
        Exit::OracleMismatch
    } else if result.truncated && result.status != SearchStatus::Found {
        Exit::Exhausted
    } else {
        status_exit(result.status)
    };
    let config = Config { compile: compile_config, mode, max_depth: depth, budget };
    let outcome = Outcome { membership: result, oracle_depth, oracle, agreement };
    finish("membership", config, inputs, exit, outcome, timer, out)
}

#[allow(clippy::too_many_arguments)]
pub fn run_reach(
    instance: &Path,
    pair: &PairArgs,
    damping: &str,
    depth: usize,
    seed: &str,
    budget: Option<usize>,
    out: &OutArgs,
    dot: Option<&Path>,
) -> Result<Exit, CliError> {
    #[derive(Serialize)]
    struct Config<'a> {
        #[serde(flatten)]
        compile: CompileConfig,
        max_depth: usize,
        seed: &'a str,
        budget: Option<usize>,
    }
    #[derive(Serialize)]
    struct Query {
        /// Number of steps whose depolarising factor the target carries.
        steps: usize,
        damping: String,
        #[serde(flatten)]
        outcome: ReachOutcome,
    }
    #[derive(Serialize)]
    struct Outcome {
        states: usize,
        edges: usize,
        truncated: bool,
        queries: Vec<Query>,
        graph: serde_json::Value,
    }
    let timer = Timer::start();
    let mut inputs = Inputs::new();
    let (set, compile_config) = compile_from(instance, pair, damping, &mut inputs)?;
    let rho = resolve_seed(seed, &mut inputs)?;
    let g = explore(&channels_from_set(&set), std::slice::from_ref(&rho), positive("depth", depth)?, budget)?;
    // A witness of n generators applies the product of their dampings; with
    // a uniform damping λ that is λ^n, so query each power up to the bound.
    let lambda = parse_damping(damping)?;
    let mut power = Rational::from_integer(1.into());
    let mut queries = Vec::new();
    for steps in 1..=depth {
        power *= &lambda;
        let target = apply(&make_target(power.clone())?, &rho)?;
        let outcome = reach(&g, &rho, &target)?;
        queries.push(Query { steps, damping: format_rational(&power), outcome });
    }
    let found = queries.iter().any(|q| matches!(q.outcome, ReachOutcome::Reachable { .. }));
    let exit = if found { Exit::Ok } else { Exit::Exhausted };
    if let Some(path) = dot {
        write_text(path, &g.graph.to_dot(Some(&quotient(&g.graph).classes), 12))?;
    }
    let config = Config { compile: compile_config, max_depth: depth, seed, budget };
    let outcome = Outcome {
        states: g.graph.node_count(),
        edges: g.graph.edges().len(),
        truncated: g.truncated,
        queries,
        graph: g.to_json(),
    };
    finish("reach", config, inputs, exit, outcome, timer, out)
}

pub enum GraphSource {
    File(PathBuf),
    Explore {
        instance: PathBuf,
        pair: PairArgs,
        damping: String,
        depth: usize,
        seed: String,
        budget: Option<usize>,
    },
}

pub fn run_monotones(source: GraphSource, base: Option<&str>, out: &OutArgs, dot: Option<&Path>) -> Result<Exit, CliError> {
    #[derive(Serialize)]
    struct ExploreConfig {
        #[serde(flatten)]
        compile: CompileConfig,
        max_depth: usize,
        seed: String,
        budget: Option<usize>,
    }
    #[derive(Serialize)]
    struct Config {
        explore: Option<ExploreConfig>,
        base: String,
    }
    #[derive(Serialize)]
    struct BaseTable {
        node: String,
        class: usize,
        values: BTreeMap<String, String>,
    }
    #[derive(Serialize)]
    struct Outcome {
        nodes: usize,
        quotient: serde_json::Value,
        base: BaseTable,
        family: chanmem::resourcegraph::MonotoneFamily,
        compatible: Result<(), chanmem::resourcegraph::CompatibilityViolation>,
        complete: Result<(), chanmem::resourcegraph::CompletenessViolation>,
    }
    let timer = Timer::start();
    let mut inputs = Inputs::new();
    let (g, explore_config): (Digraph, _) = match source {
        GraphSource::File(path) => {
            let text = read_input(&path, &mut inputs, "graph")?;
            let g = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            (g, None)
        }
        GraphSource::Explore { instance, pair, damping, depth, seed, budget } => {
            let (set, compile) = compile_from(&instance, &pair, &damping, &mut inputs)?;
            let rho = resolve_seed(&seed, &mut inputs)?;
            let rg = explore(&channels_from_set(&set), &[rho], positive("depth", depth)?, budget)?;
            (rg.graph, Some(ExploreConfig { compile, max_depth: depth, seed, budget }))
        }
    };
    if g.node_count() == 0 {
        return Err(CliError::Input("graph has no nodes".into()));
    }
    let base_name = base.unwrap_or(g.name(0)).to_owned();
    let base_node = g.node(&base_name).ok_or_else(|| CliError::Input(format!("unknown base node `{base_name}`")))?;
    let q = quotient(&g);
    let family = monotone_family(&q)?;
    let compatible = check_compatible(&g, &q, &family);
    let complete = check_complete(&q, &family);
    let base_class = q.class_of[base_node];
    let table = &family.tables[base_class];
    let values = g
        .names()
        .iter()
        .enumerate()
        .map(|(i, name)| (name.clone(), format_rational(table.value(q.class_of[i]))))
        .collect();
    let exit = if compatible.is_ok() && complete.is_ok() { Exit::Ok } else { Exit::OracleMismatch };
    if let Some(path) = dot {
        write_text(path, &g.to_dot(Some(&q.classes), 12))?;
    }
    let outcome = Outcome {
        nodes: g.node_count(),
        quotient: q.to_json(&g),
        base: BaseTable { node: base_name.clone(), class: base_class, values },
        family,
        compatible,
        complete,
    };
    let config = Config { explore: explore_config, base: base_name };
    finish("monotones", config, inputs, exit, outcome, timer, out)
}

pub fn run_diff(
    instance: &Path,
    against: Option<&Path>,
    pair: &PairArgs,
    damping: &str,
    depth: usize,
    budget: Option<usize>,
    out: &OutArgs,
) -> Result<Exit, CliError> {
    #[derive(Serialize)]
    struct Config {
        #[serde(flatten)]
        compile: CompileConfig,
        second: &'static str,
        max_depth: usize,
        budget: Option<usize>,
    }
    let timer = Timer::start();
    let mut inputs = Inputs::new();
    let (set, compile_config) = compile_from(instance, pair, damping, &mut inputs)?;
    let f1 = Theory::from_set(&set);
    let (f2, second) = match against {
        Some(path) => {
            let other = load_instance(path, &mut inputs, "against")?;
            let (fp, _) = resolve_pair(pair, &mut BTreeMap::new())?;
            (Theory::from_set(&compile(&other, &fp, &parse_damping(damping)?)?), "against")
        }
        None => (f1.augmented_with_target(parse_damping(damping)?)?, "with_target"),
    };
    let outcome = theory_diff(&f1, &f2, positive("depth", depth)?, budget)?;
    let exit = match outcome.status {
        DiffStatus::Distinct => Exit::Ok,
        DiffStatus::IndistinguishableUpToDepth => Exit::Exhausted,
    };
    let config = Config { compile: compile_config, second, max_depth: depth, budget };
    finish("diff", config, inputs, exit, outcome, timer, out)
}
