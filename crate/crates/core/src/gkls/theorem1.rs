use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::EntropySpec;
use crate::sampling::{derive_seed, random_density_matrix, rng_from_seed};
use crate::states::{majorizes, DensityOperator};
use crate::superop::Superoperator;

use super::{
    apply_to_state, identity_image_norm, is_unital_generator, jointly_normal,
    kossakowski_diagonalize, GklsError, GklsGenerator,
};

/// Consecutive entropy values may drop by at most 1e-9·(1 + |value|).
pub const MONOTONICITY_TOL: f64 = 1e-9;

/// A step along the time grid where an entropy went down.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyWitness {
    pub entropy: String,
    /// `maximally_mixed` or `random:<index>`.
    pub state: String,
    pub t_from: f64,
    pub t_to: f64,
    pub value_from: f64,
    pub value_to: f64,
}

/// The four properties that are equivalent for a quantum dynamical
/// semigroup: unitality of the generator, Φ_tρ ≺ ρ, monotone entropies, and
/// joint normality of the Kraus operators of the diagonal form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theorem1Report {
    pub unital: bool,
    pub majorization_ok: bool,
    pub entropies_monotone: BTreeMap<String, bool>,
    pub kraus_jointly_normal: bool,
    /// Every flag above, including each entry of `entropies_monotone`,
    /// has the same value.
    pub all_agree: bool,
    pub identity_image_norm: f64,
    /// First entropy decrease found, searching ρ* before random states.
    pub witness: Option<EntropyWitness>,
}

#[derive(Debug, Clone)]
pub struct Theorem1Options {
    pub entropies: Vec<EntropySpec>,
    /// Sorted ascending, starting at 0.
    pub t_grid: Vec<f64>,
    /// Random full-rank states evaluated in addition to ρ*.
    pub rho_samples: usize,
    pub seed: u64,
}

impl Default for Theorem1Options {
    fn default() -> Self {
        Self {
            entropies: EntropySpec::standard_set(),
            t_grid: default_t_grid(),
            rho_samples: 8,
            seed: 0,
        }
    }
}

/// 50 evenly spaced points on [0, 5].
pub fn default_t_grid() -> Vec<f64> {
    linspace(5.0, 50)
}

pub(crate) fn linspace(t_max: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect()
}

pub fn classify_theorem1(
    gen: &GklsGenerator,
    entropies: &[EntropySpec],
    t_grid: &[f64],
    rho_samples: usize,
    seed: u64,
) -> Result<Theorem1Report, GklsError> {
    let options = Theorem1Options {
        entropies: entropies.to_vec(),
        t_grid: t_grid.to_vec(),
        rho_samples,
        seed,
    };
    classify_superoperator(&gen.compile(), &options)
}

struct SampleOutcome {
    majorized: bool,
    monotone: Vec<bool>,
    witness: Option<EntropyWitness>,
}

/// Evaluates the four properties for the semigroup generated by `l`.
///
/// Samples are ρ* followed by `rho_samples` seeded random states; each is
/// evolved through exp(t𝓛) on the whole grid. Samples run in parallel and
/// are reduced in index order, so the report does not depend on scheduling.
pub fn classify_superoperator(
    l: &Superoperator,
    options: &Theorem1Options,
) -> Result<Theorem1Report, GklsError> {
    let grid = &options.t_grid;
    if grid.is_empty() || grid[0] != 0.0 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(GklsError::BadTimeGrid);
    }
    for spec in &options.entropies {
        spec.validate()?;
    }
    let d = l.dim();
    let unital = is_unital_generator(l);
    let form = kossakowski_diagonalize(l, 1e-9)?;
    let kraus_jointly_normal = if form.not_cp {
        // signed sum Σ γ (F F† − F† F)
        let mut acc = crate::linalg::CMatrix::zeros(d);
        for (g, f) in &form.terms {
            acc += &(&f.matmul(&f.adjoint()) - &f.adjoint().matmul(f)).scale_real(*g);
        }
        acc.frobenius_norm() <= 1e-10
    } else {
        jointly_normal(&form.kraus_list())
    };

    let maps: Vec<Superoperator> = grid.iter().map(|&t| l.exp(t)).collect();
    let outcomes: Vec<Result<SampleOutcome, GklsError>> = (0..=options.rho_samples)
        .into_par_iter()
        .map(|index| {
            let (label, rho) = if index == 0 {
                (
                    "maximally_mixed".to_string(),
                    DensityOperator::maximally_mixed(d),
                )
            } else {
                let mut rng = rng_from_seed(derive_seed(options.seed, index as u64));
                let rho = DensityOperator::new(&random_density_matrix(&mut rng, d))
                    .expect("random density matrix is valid");
                (format!("random:{}", index - 1), rho)
            };
            evaluate_sample(&label, &rho, &maps, grid, &options.entropies)
        })
        .collect();

    let mut majorization_ok = true;
    let mut monotone = vec![true; options.entropies.len()];
    let mut witness = None;
    for outcome in outcomes {
        let outcome = outcome?;
        majorization_ok &= outcome.majorized;
        for (acc, ok) in monotone.iter_mut().zip(&outcome.monotone) {
            *acc &= ok;
        }
        if witness.is_none() {
            witness = outcome.witness;
        }
    }
    let entropies_monotone: BTreeMap<String, bool> = options
        .entropies
        .iter()
        .map(EntropySpec::label)
        .zip(monotone.iter().copied())
        .collect();
    let all_agree = majorization_ok == unital
        && kraus_jointly_normal == unital
        && monotone.iter().all(|&m| m == unital);
    Ok(Theorem1Report {
        unital,
        majorization_ok,
        entropies_monotone,
        kraus_jointly_normal,
        all_agree,
        identity_image_norm: identity_image_norm(l),
        witness,
    })
}

fn evaluate_sample(
    label: &str,
    rho: &DensityOperator,
    maps: &[Superoperator],
    grid: &[f64],
    entropies: &[EntropySpec],
) -> Result<SampleOutcome, GklsError> {
    let mut majorized = true;
    let mut traces: Vec<Vec<f64>> = vec![Vec::with_capacity(grid.len()); entropies.len()];
    for phi in maps {
        let out = apply_to_state(phi, rho)?;
        majorized &= majorizes(rho.spectrum(), out.spectrum()).expect("equal dimensions");
        for (trace, spec) in traces.iter_mut().zip(entropies) {
            trace.push(spec.evaluate(&out)?);
        }
    }
    let mut monotone = Vec::with_capacity(entropies.len());
    let mut witness = None;
    for (trace, spec) in traces.iter().zip(entropies) {
        let drop = first_decrease(trace);
        if let (Some(k), None) = (drop, &witness) {
            witness = Some(EntropyWitness {
                entropy: spec.label(),
                state: label.to_string(),
                t_from: grid[k],
                t_to: grid[k + 1],
                value_from: trace[k],
                value_to: trace[k + 1],
            });
        }
        monotone.push(drop.is_none());
    }
    Ok(SampleOutcome {
        majorized,
        monotone,
        witness,
    })
}

/// Index k of the first step with values[k+1] < values[k] beyond tolerance.
pub fn first_decrease(values: &[f64]) -> Option<usize> {
    values
        .windows(2)
        .position(|w| w[1] - w[0] < -MONOTONICITY_TOL * (1.0 + w[0].abs()))
}
