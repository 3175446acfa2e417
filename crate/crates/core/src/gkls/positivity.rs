use crate::linalg::{vec_inner, CMatrix, C64};
use crate::qubit::{bloch_generator_margin, matrix_rep};
use crate::sampling::{haar_unitary, rng_from_seed};
use crate::superop::Superoperator;

use super::is_unital_generator;

pub const DEFAULT_BASIS_SAMPLES: usize = 200;
const DEFAULT_BASIS_SEED: u64 = 0x7E02_2B45;
/// Off-diagonal entries ⟨ψ_j|𝓛(P_k)|ψ_j⟩ below this count as violations.
const BASIS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorPositivityMethod {
    /// d = 2: exact maximization over the Bloch sphere.
    QubitExact,
    /// d > 2: the computational basis plus Haar-random orthonormal bases.
    SampledBases,
}

impl GeneratorPositivityMethod {
    pub fn label(self) -> &'static str {
        match self {
            GeneratorPositivityMethod::QubitExact => "exact",
            GeneratorPositivityMethod::SampledBases => "sampled",
        }
    }
}

#[derive(Debug, Clone)]
pub struct PositiveGeneratorCheck {
    /// 𝓛 generates a semigroup of positive trace-preserving maps (verdict
    /// of the chosen method).
    pub positive: bool,
    pub method: GeneratorPositivityMethod,
    pub hermiticity_preserving: bool,
    pub trace_annihilating: bool,
    /// Reported separately: the cone of unital positive generators needs
    /// `positive && unital`.
    pub unital: bool,
    /// Smallest off-diagonal entry ⟨ψ_j|𝓛(P_k)|ψ_j⟩ found (d > 2), or
    /// −max_n ½ n·(v + F n) on the Bloch sphere (d = 2).
    pub worst_entry: f64,
    /// An orthonormal basis (as column vectors) on which the off-diagonal
    /// condition fails.
    pub basis_witness: Option<Vec<Vec<C64>>>,
    pub bases_checked: usize,
}

/// Tests whether 𝓛 generates positive trace-preserving maps, i.e. whether
/// for every orthonormal basis {ψ_j} the entries tr(P_j 𝓛(P_k)), j ≠ k, are
/// non-negative (P_k = |ψ_k⟩⟨ψ_k|) while 𝓛 annihilates the trace.
///
/// For d = 2 the condition is decided exactly on the Bloch sphere. For d > 2
/// it is checked on the computational basis and `samples` Haar-random bases,
/// so a `true` verdict is probabilistic.
pub fn check_positive_generator(l: &Superoperator, samples: usize) -> PositiveGeneratorCheck {
    check_positive_generator_seeded(l, samples, DEFAULT_BASIS_SEED)
}

pub fn check_positive_generator_seeded(
    l: &Superoperator,
    samples: usize,
    seed: u64,
) -> PositiveGeneratorCheck {
    let d = l.dim();
    let scale = l.matrix().frobenius_norm().max(1.0);
    let hermiticity_preserving = l.is_hermiticity_preserving(1e-10);
    let trace_annihilating = l.is_trace_annihilating(1e-10 * scale);
    let unital = is_unital_generator(l);
    let structural = hermiticity_preserving && trace_annihilating;

    if d == 2 {
        let (worst_entry, witness) = match matrix_rep(l) {
            Ok(m) => {
                let v = [m[1][0], m[2][0], m[3][0]];
                let f = [
                    [m[1][1], m[1][2], m[1][3]],
                    [m[2][1], m[2][2], m[2][3]],
                    [m[3][1], m[3][2], m[3][3]],
                ];
                let (margin, n) = bloch_generator_margin(v, &f);
                (-0.5 * margin, Some(bloch_basis(n)))
            }
            Err(_) => (f64::NEG_INFINITY, None),
        };
        // 2·max(½ n·(v+Fn)) ≤ 1e-10 matches λ_max(F + Fᵀ) ≤ 1e-10 when v = 0
        let ok = structural && -4.0 * worst_entry <= 1e-10;
        return PositiveGeneratorCheck {
            positive: ok,
            method: GeneratorPositivityMethod::QubitExact,
            hermiticity_preserving,
            trace_annihilating,
            unital,
            worst_entry,
            basis_witness: if ok { None } else { witness },
            bases_checked: 0,
        };
    }

    let mut rng = rng_from_seed(seed);
    let mut worst_entry = f64::INFINITY;
    let mut basis_witness = None;
    let mut bases_checked = 0;
    for index in 0..=samples {
        let u = if index == 0 {
            CMatrix::identity(d)
        } else {
            haar_unitary(&mut rng, d)
        };
        bases_checked += 1;
        let basis: Vec<Vec<C64>> = (0..d).map(|k| u.column(k)).collect();
        let worst = basis_min_off_diagonal(l, &basis);
        if worst < worst_entry {
            worst_entry = worst;
        }
        if worst < -BASIS_TOL {
            basis_witness = Some(basis);
            break;
        }
    }
    PositiveGeneratorCheck {
        positive: structural && basis_witness.is_none(),
        method: GeneratorPositivityMethod::SampledBases,
        hermiticity_preserving,
        trace_annihilating,
        unital,
        worst_entry,
        basis_witness,
        bases_checked,
    }
}

/// min over j ≠ k of Re⟨ψ_j|𝓛(|ψ_k⟩⟨ψ_k|)|ψ_j⟩.
pub(crate) fn basis_min_off_diagonal(l: &Superoperator, basis: &[Vec<C64>]) -> f64 {
    let mut worst = f64::INFINITY;
    for (k, psi_k) in basis.iter().enumerate() {
        let image = l.apply(&CMatrix::outer(psi_k, psi_k));
        for (j, psi_j) in basis.iter().enumerate() {
            if j != k {
                worst = worst.min(vec_inner(psi_j, &image.matvec(psi_j)).re);
            }
        }
    }
    worst
}

/// The orthonormal pair {ψ, ψ⊥} whose projectors have Bloch vectors ±n.
fn bloch_basis(n: [f64; 3]) -> Vec<Vec<C64>> {
    let theta = n[2].clamp(-1.0, 1.0).acos();
    let phi = n[1].atan2(n[0]);
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = C64::from_polar(1.0, phi);
    vec![
        vec![C64::new(c, 0.0), e * s],
        vec![C64::new(-s, 0.0), e * c],
    ]
}
