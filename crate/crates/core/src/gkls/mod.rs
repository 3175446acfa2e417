//! Generators of quantum dynamical semigroups in GKLS form
//!
//! 𝓛A = −i[H, A] + Σ_k γ_k (V_k A V_k† − ½{V_k†V_k, A}),
//!
//! their compilation to superoperators, time evolution, and the structural
//! tests (unitality, conditional complete positivity, positivity) that the
//! classifiers in this module build on.

mod diagonal;
mod positivity;
mod theorem1;

use thiserror::Error;

use crate::linalg::{herm_eig, CMatrix, C64};
use crate::states::{validate_density, DensityOperator, StateError};
use crate::superop::Superoperator;

pub use diagonal::{diagonal_form, hs_traceless_basis, kossakowski_diagonalize, DiagonalForm};
pub use positivity::{
    check_positive_generator, check_positive_generator_seeded, GeneratorPositivityMethod,
    PositiveGeneratorCheck, DEFAULT_BASIS_SAMPLES,
};
pub use theorem1::{
    classify_superoperator, classify_theorem1, default_t_grid, first_decrease, EntropyWitness,
    Theorem1Options, Theorem1Report, MONOTONICITY_TOL,
};

/// Tolerance at which an evolved state must still validate.
pub const EVOLUTION_STATE_TOL: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GklsError {
    #[error("Hamiltonian is not Hermitian (residual {0:.3e})")]
    HamiltonianNotHermitian(f64),
    #[error("Hamiltonian is not traceless (trace {0})")]
    HamiltonianNotTraceless(C64),
    #[error("noise rate {index} is {rate}; rates must be finite and non-negative")]
    NegativeRate { index: usize, rate: f64 },
    #[error("operator dimension {got} does not match generator dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("time must be finite and non-negative (got {0})")]
    NegativeTime(f64),
    #[error("evolved operator left the state space: {0}")]
    EvolutionLeftStateSpace(StateError),
    #[error("superoperator is not a Hermiticity-preserving, trace-annihilating generator")]
    NotGenerator,
    #[error("t grid must be sorted ascending and start at 0")]
    BadTimeGrid,
    #[error("entropy specification: {0}")]
    Entropy(#[from] crate::entropy::EntropyError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseTerm {
    pub rate: f64,
    pub op: CMatrix,
}

impl NoiseTerm {
    pub fn new(rate: f64, op: CMatrix) -> Self {
        Self { rate, op }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GklsGenerator {
    hamiltonian: CMatrix,
    noise: Vec<NoiseTerm>,
}

impl GklsGenerator {
    /// `hamiltonian` must be Hermitian (1e-12) and traceless (1e-10); every
    /// rate must be non-negative.
    pub fn new(hamiltonian: CMatrix, noise: Vec<NoiseTerm>) -> Result<Self, GklsError> {
        let d = hamiltonian.dim();
        let residual = hamiltonian.hermiticity_residual();
        if residual > 1e-12 || !hamiltonian.is_finite() {
            return Err(GklsError::HamiltonianNotHermitian(residual));
        }
        let tr = hamiltonian.trace();
        if tr.norm() > 1e-10 {
            return Err(GklsError::HamiltonianNotTraceless(tr));
        }
        for (index, term) in noise.iter().enumerate() {
            if !(term.rate.is_finite() && term.rate >= 0.0) {
                return Err(GklsError::NegativeRate {
                    index,
                    rate: term.rate,
                });
            }
            if term.op.dim() != d {
                return Err(GklsError::DimensionMismatch {
                    expected: d,
                    got: term.op.dim(),
                });
            }
        }
        Ok(Self {
            hamiltonian: hamiltonian.hermitian_part(),
            noise,
        })
    }

    /// Dissipator only, H = 0.
    pub fn dissipative(dim: usize, noise: Vec<NoiseTerm>) -> Result<Self, GklsError> {
        Self::new(CMatrix::zeros(dim), noise)
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn hamiltonian(&self) -> &CMatrix {
        &self.hamiltonian
    }

    pub fn noise(&self) -> &[NoiseTerm] {
        &self.noise
    }

    /// Kraus list {√γ_k V_k} of the CP part.
    pub fn kraus_list(&self) -> Vec<CMatrix> {
        self.noise
            .iter()
            .map(|t| t.op.scale_real(t.rate.sqrt()))
            .collect()
    }

    pub fn compile(&self) -> Superoperator {
        compile(self)
    }
}

/// Removes the trace of a Hermitian matrix, `H − tr(H)/d`.
pub fn traceless_part(h: &CMatrix) -> CMatrix {
    let shift = h.trace() / h.dim() as f64;
    h - &CMatrix::identity(h.dim()).scale(shift)
}

pub fn compile(gen: &GklsGenerator) -> Superoperator {
    let d = gen.dim();
    let h = &gen.hamiltonian;
    // −i[H, ·]
    let mut l = (&Superoperator::left_mul(h) - &Superoperator::right_mul(h))
        .into_matrix()
        .scale(C64::new(0.0, -1.0));
    for term in &gen.noise {
        if term.rate == 0.0 {
            continue;
        }
        let v = &term.op;
        let vdv = v.adjoint().matmul(v);
        let jump = Superoperator::conjugation(v);
        let anti = &Superoperator::left_mul(&vdv) + &Superoperator::right_mul(&vdv);
        let dissipator = &jump - &anti.scale(0.5);
        l += &dissipator.into_matrix().scale_real(term.rate);
    }
    Superoperator::new(d, l).expect("generator matrix has shape d²×d²")
}

/// ρ(t) = exp(t𝓛)ρ, revalidated as a state at tolerance 1e-7.
pub fn evolve(
    l: &Superoperator,
    rho: &DensityOperator,
    t: f64,
) -> Result<DensityOperator, GklsError> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(GklsError::NegativeTime(t));
    }
    if l.dim() != rho.dim() {
        return Err(GklsError::DimensionMismatch {
            expected: l.dim(),
            got: rho.dim(),
        });
    }
    apply_to_state(&l.exp(t), rho)
}

/// Applies a map to a state and revalidates the image.
pub fn apply_to_state(
    phi: &Superoperator,
    rho: &DensityOperator,
) -> Result<DensityOperator, GklsError> {
    validate_density(&phi.apply(rho.matrix()), EVOLUTION_STATE_TOL)
        .map_err(GklsError::EvolutionLeftStateSpace)
}

/// ‖𝓛(1)‖_F
pub fn identity_image_norm(l: &Superoperator) -> f64 {
    l.image_of_identity().frobenius_norm()
}

/// 𝓛 kills the identity: ‖𝓛(1)‖_F ≤ 1e-10·d.
pub fn is_unital_generator(l: &Superoperator) -> bool {
    identity_image_norm(l) <= 1e-10 * l.dim() as f64
}

/// ‖Σ V V† − Σ V† V‖_F ≤ 1e-10. An empty list is trivially jointly normal.
pub fn jointly_normal(kraus: &[CMatrix]) -> bool {
    let Some(first) = kraus.first() else {
        return true;
    };
    let mut acc = CMatrix::zeros(first.dim());
    for v in kraus {
        acc += &v.matmul(&v.adjoint());
        acc -= &v.adjoint().matmul(v);
    }
    acc.frobenius_norm() <= 1e-10
}

/// Smallest eigenvalue of the Choi matrix of 𝓛 compressed to the orthogonal
/// complement of the maximally entangled vector ω = Σ_k |k⟩|k⟩.
pub fn conditional_choi_min_eigenvalue(l: &Superoperator) -> f64 {
    let d = l.dim();
    let n = d * d;
    // ω⊥ is spanned by |i⟩|j⟩ for i ≠ j together with the traceless
    // diagonal combinations Σ_k u_k |k⟩|k⟩, Σ_k u_k = 0.
    let mut basis: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n - 1);
    for i in 0..d {
        for j in 0..d {
            if i != j {
                basis.push(vec![(i * d + j, 1.0)]);
            }
        }
    }
    for m in 1..d {
        let norm = ((m * (m + 1)) as f64).sqrt();
        let mut v: Vec<(usize, f64)> = (0..m).map(|k| (k * d + k, 1.0 / norm)).collect();
        v.push((m * d + m, -(m as f64) / norm));
        basis.push(v);
    }
    let c = l.choi();
    let compressed = CMatrix::from_fn(n - 1, |a, b| {
        let mut acc = C64::new(0.0, 0.0);
        for &(r, x) in &basis[a] {
            for &(s, y) in &basis[b] {
                acc += c[(r, s)] * (x * y);
            }
        }
        acc
    });
    let eig = herm_eig(&compressed.hermitian_part()).expect("Hermitian part");
    *eig.values.last().expect("d ≥ 2")
}

/// Hermiticity-preserving, trace-annihilating and conditionally completely
/// positive (Π C_𝓛 Π ⪰ −1e-9).
pub fn is_gkls_generator(l: &Superoperator) -> bool {
    let scale = l.matrix().frobenius_norm().max(1.0);
    l.is_hermiticity_preserving(1e-10)
        && l.is_trace_annihilating(1e-10 * scale)
        && conditional_choi_min_eigenvalue(l) >= -1e-9 * scale
}
