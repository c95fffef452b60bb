use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::channel::{check_damping, ChannelElement, GenLabel};
use super::ReductionError;
use crate::exact::{dagger, format_rational, parse_rational, ExactMatrix, Rational};
use crate::freerot::{gamma, make_free_pair, power, FreePair, RotationParams};
use crate::pcp::{parse_instance, PcpInstance};

/// The generators `H_i`, `G_i` compiled from a PCP instance.
///
/// `H_i` conjugates by `blockdiag(γ(h(a_i)), A^i·B)` and `G_i` by
/// `blockdiag(γ(g(a_i))†, B†·(A^i)†)`: the first block carries the tile
/// words, the second carries the tile index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    pub instance: PcpInstance,
    pub pair: FreePair,
    pub h_gens: Vec<ChannelElement>,
    pub g_gens: Vec<ChannelElement>,
}

impl GeneratorSet {
    /// All generators in search order: `H_1..H_k`, then `G_1..G_k`.
    pub fn generators(&self) -> Vec<ChannelElement> {
        self.h_gens.iter().chain(&self.g_gens).cloned().collect()
    }

    pub fn tile_count(&self) -> usize {
        self.instance.len()
    }

    pub fn damping_assignment(&self) -> BTreeMap<String, Rational> {
        self.h_gens
            .iter()
            .chain(&self.g_gens)
            .map(|g| (g.word[0].to_string(), g.damping.clone()))
            .collect()
    }

    pub fn generator(&self, label: GenLabel) -> Option<&ChannelElement> {
        match label {
            GenLabel::H(i) => self.h_gens.get(i.checked_sub(1)?),
            GenLabel::G(i) => self.g_gens.get(i.checked_sub(1)?),
            GenLabel::Target => None,
        }
    }

    /// Rebuilds the set with individual dampings per generator.
    pub fn with_dampings(mut self, h: &[Rational], g: &[Rational]) -> Result<Self, ReductionError> {
        if h.len() != self.h_gens.len() || g.len() != self.g_gens.len() {
            return Err(ReductionError::Domain("one damping per generator required".into()));
        }
        for (gen, d) in self.h_gens.iter_mut().chain(self.g_gens.iter_mut()).zip(h.iter().chain(g)) {
            check_damping(d)?;
            gen.damping = d.clone();
        }
        Ok(self)
    }

    pub fn to_bundle(&self) -> GeneratorBundle {
        GeneratorBundle {
            instance: self.instance.to_text(),
            params: self.pair.params.clone(),
            damping_assignment: self
                .damping_assignment()
                .into_iter()
                .map(|(k, v)| (k, format_rational(&v)))
                .collect(),
            generators: self
                .h_gens
                .iter()
                .chain(&self.g_gens)
                .map(|g| BundleGenerator {
                    label: g.word[0],
                    damping: format_rational(&g.damping),
                    unitary: g.unitary.clone(),
                })
                .collect(),
        }
    }

    /// Recompiles from the bundle and checks every stored unitary against
    /// the recompiled one.
    pub fn from_bundle(bundle: &GeneratorBundle) -> Result<Self, ReductionError> {
        let instance = parse_instance(&bundle.instance)?;
        let pair = make_free_pair(bundle.params.clone())?;
        let base = compile(&instance, &pair, &super::default_damping())?;
        let damping_of = |label: GenLabel| -> Result<Rational, ReductionError> {
            let s = bundle
                .damping_assignment
                .get(&label.to_string())
                .ok_or_else(|| ReductionError::Bundle(format!("no damping for {label}")))?;
            Ok(parse_rational(s)?)
        };
        let k = instance.len();
        let h: Vec<Rational> = (1..=k).map(|i| damping_of(GenLabel::H(i))).collect::<Result<_, _>>()?;
        let g: Vec<Rational> = (1..=k).map(|i| damping_of(GenLabel::G(i))).collect::<Result<_, _>>()?;
        let set = base.with_dampings(&h, &g)?;
        if bundle.generators.len() != 2 * k {
            return Err(ReductionError::Bundle(format!(
                "expected {} generators, found {}",
                2 * k,
                bundle.generators.len()
            )));
        }
        for stored in &bundle.generators {
            let ours = set
                .generator(stored.label)
                .ok_or_else(|| ReductionError::Bundle(format!("unknown generator {}", stored.label)))?;
            if ours.unitary != stored.unitary || format_rational(&ours.damping) != stored.damping {
                return Err(ReductionError::Bundle(format!("generator {} does not match its instance", stored.label)));
            }
        }
        Ok(set)
    }
}

/// Self-contained JSON form of a [`GeneratorSet`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorBundle {
    pub instance: String,
    pub params: RotationParams,
    pub damping_assignment: BTreeMap<String, String>,
    pub generators: Vec<BundleGenerator>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleGenerator {
    pub label: GenLabel,
    pub damping: String,
    pub unitary: ExactMatrix,
}

/// `h_{a_i}` for the 1-based tile index `i`.
pub fn h_unitary(inst: &PcpInstance, pair: &FreePair, i: usize) -> Result<ExactMatrix, ReductionError> {
    let tile = inst.tile(i)?;
    let index_block = &power(&pair.a, i) * &pair.b;
    Ok(ExactMatrix::block_diag(&[&gamma(&tile.top, pair), &index_block]))
}

/// `g_{a_i}` for the 1-based tile index `i`.
pub fn g_unitary(inst: &PcpInstance, pair: &FreePair, i: usize) -> Result<ExactMatrix, ReductionError> {
    let tile = inst.tile(i)?;
    let index_block = &dagger(&pair.b) * &dagger(&power(&pair.a, i));
    Ok(ExactMatrix::block_diag(&[&dagger(&gamma(&tile.bottom, pair)), &index_block]))
}

/// Builds all `2k` generators at a uniform damping `λ ∈ (0, 1)`.
pub fn compile(inst: &PcpInstance, pair: &FreePair, damping: &Rational) -> Result<GeneratorSet, ReductionError> {
    check_damping(damping)?;
    let k = inst.len();
    let mut h_gens = Vec::with_capacity(k);
    let mut g_gens = Vec::with_capacity(k);
    for i in 1..=k {
        let h = h_unitary(inst, pair, i)?;
        let g = g_unitary(inst, pair, i)?;
        for (label, u) in [(GenLabel::H(i), &h), (GenLabel::G(i), &g)] {
            if !u.is_unitary() {
                return Err(ReductionError::NotUnitary(label.to_string()));
            }
        }
        h_gens.push(ChannelElement::generator(GenLabel::H(i), h, damping.clone()));
        g_gens.push(ChannelElement::generator(GenLabel::G(i), g, damping.clone()));
    }
    Ok(GeneratorSet {
        instance: inst.clone(),
        pair: pair.clone(),
        h_gens,
        g_gens,
    })
}
