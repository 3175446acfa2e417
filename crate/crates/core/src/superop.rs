//! Linear maps on d×d matrices, stored as d²×d² matrices acting on
//! column-stacked operators.
//!
//! With `vec(A)[i + j·d] = A[i, j]`, the map A ↦ V·A·W† is the matrix
//! `conj(W) ⊗ V`. The Choi matrix is `C = Σ_kl Φ(|k⟩⟨l|) ⊗ |k⟩⟨l|`, i.e.
//! `C[(i·d+k), (j·d+l)] = Φ(|k⟩⟨l|)[i, j]`.

use std::ops::{Add, Sub};

use thiserror::Error;

use crate::linalg::{expm, herm_eig, singular_values, CMatrix, C64, ONE, ZERO};
use crate::sampling::{random_pure_state, rng_from_seed};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SuperopError {
    #[error("superoperator matrix has dimension {got}, expected {expected}")]
    BadShape { expected: usize, got: usize },
    #[error("operand has dimension {got}, map acts on dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    mat: CMatrix,
}

impl std::fmt::Debug for Superoperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Superoperator(d={}) {:?}", self.dim, self.mat)
    }
}

impl Superoperator {
    pub fn new(dim: usize, mat: CMatrix) -> Result<Self, SuperopError> {
        if mat.dim() != dim * dim {
            return Err(SuperopError::BadShape {
                expected: dim * dim,
                got: mat.dim(),
            });
        }
        Ok(Self { dim, mat })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            mat: CMatrix::zeros(dim * dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            mat: CMatrix::identity(dim * dim),
        }
    }

    /// A ↦ V·A·W†
    pub fn sandwich(v: &CMatrix, w: &CMatrix) -> Self {
        assert_eq!(v.dim(), w.dim());
        Self {
            dim: v.dim(),
            mat: w.conj().kron(v),
        }
    }

    /// A ↦ U·A·U†
    pub fn conjugation(u: &CMatrix) -> Self {
        Self::sandwich(u, u)
    }

    /// A ↦ X·A
    pub fn left_mul(x: &CMatrix) -> Self {
        Self {
            dim: x.dim(),
            mat: CMatrix::identity(x.dim()).kron(x),
        }
    }

    /// A ↦ A·Y
    pub fn right_mul(y: &CMatrix) -> Self {
        Self {
            dim: y.dim(),
            mat: y.transpose().kron(&CMatrix::identity(y.dim())),
        }
    }

    /// Transposition in the computational basis.
    pub fn transposition(dim: usize) -> Self {
        Self::from_map(dim, |a| a.transpose())
    }

    /// Tabulates a linear map from its action on matrix units.
    pub fn from_map(dim: usize, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        let n = dim * dim;
        let mut mat = CMatrix::zeros(n);
        for col in 0..n {
            let mut unit = vec![ZERO; n];
            unit[col] = ONE;
            let image = f(&CMatrix::unvec(&unit)).vec();
            for (row, z) in image.into_iter().enumerate() {
                mat[(row, col)] = z;
            }
        }
        Self { dim, mat }
    }

    pub fn from_kraus(kraus: &[CMatrix]) -> Self {
        assert!(!kraus.is_empty(), "empty Kraus list");
        let mut acc = Self::zero(kraus[0].dim());
        for k in kraus {
            acc = &acc + &Self::conjugation(k);
        }
        acc
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn apply(&self, a: &CMatrix) -> CMatrix {
        assert_eq!(a.dim(), self.dim, "operand dimension mismatch");
        CMatrix::unvec(&self.mat.matvec(&a.vec()))
    }

    pub fn try_apply(&self, a: &CMatrix) -> Result<CMatrix, SuperopError> {
        if a.dim() != self.dim {
            return Err(SuperopError::DimensionMismatch {
                expected: self.dim,
                got: a.dim(),
            });
        }
        Ok(self.apply(a))
    }

    /// `self ∘ other`, i.e. other is applied first.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            mat: self.mat.matmul(&other.mat),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            mat: self.mat.scale_real(s),
        }
    }

    /// Hilbert–Schmidt adjoint: tr(B†·Φ(A)) = tr(Φ*(B)†·A).
    pub fn adjoint(&self) -> Self {
        Self {
            dim: self.dim,
            mat: self.mat.adjoint(),
        }
    }

    /// exp(t·self), the semigroup member at time t when self is a generator.
    pub fn exp(&self, t: f64) -> Self {
        Self {
            dim: self.dim,
            mat: expm(&self.mat.scale_real(t)),
        }
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (&self.mat - &other.mat).frobenius_norm()
    }

    pub fn is_finite(&self) -> bool {
        self.mat.is_finite()
    }

    pub fn image_of_identity(&self) -> CMatrix {
        self.apply(&CMatrix::identity(self.dim))
    }

    pub fn choi(&self) -> CMatrix {
        let d = self.dim;
        CMatrix::from_fn(d * d, |r, c| {
            let (i, k) = (r / d, r % d);
            let (j, l) = (c / d, c % d);
            self.mat[(i + j * d, k + l * d)]
        })
    }

    pub fn from_choi(choi: &CMatrix) -> Self {
        let n = choi.dim();
        let d = (n as f64).sqrt().round() as usize;
        assert_eq!(d * d, n, "Choi matrix dimension is not a square");
        let mut mat = CMatrix::zeros(n);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        mat[(i + j * d, k + l * d)] = choi[(i * d + k, j * d + l)];
                    }
                }
            }
        }
        Self { dim: d, mat }
    }

    /// Realignment with `R[a + k·d, b + l·d] = mat[a + b·d, k + l·d]`.
    /// For the map A ↦ X·A·Y† this gives `vec(X)·vec(Y)†`, so the Kraus-like
    /// content of any map sits in the matrix R.
    pub fn realign(&self) -> CMatrix {
        let d = self.dim;
        let mut r = CMatrix::zeros(d * d);
        for a in 0..d {
            for b in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        r[(a + k * d, b + l * d)] = self.mat[(a + b * d, k + l * d)];
                    }
                }
            }
        }
        r
    }

    /// Φ(A†) = Φ(A)† for all A, tested through Hermiticity of the Choi matrix.
    pub fn is_hermiticity_preserving(&self, tol: f64) -> bool {
        self.choi().hermiticity_residual() <= tol
    }

    /// tr(Φ(A)) = tr(A) for all A.
    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.trace_functional_residual(true) <= tol
    }

    /// tr(Φ(A)) = 0 for all A.
    pub fn is_trace_annihilating(&self, tol: f64) -> bool {
        self.trace_functional_residual(false) <= tol
    }

    fn trace_functional_residual(&self, preserving: bool) -> f64 {
        let d = self.dim;
        let n = d * d;
        let mut acc = 0.0;
        for col in 0..n {
            let mut s: C64 = (0..d).map(|i| self.mat[(i + i * d, col)]).sum();
            if preserving && col % (d + 1) == 0 {
                s -= ONE;
            }
            acc += s.norm_sqr();
        }
        acc.sqrt()
    }

    pub fn is_unital(&self, tol: f64) -> bool {
        (&self.image_of_identity() - &CMatrix::identity(self.dim)).frobenius_norm() <= tol
    }

    /// Smallest eigenvalue of the Hermitian part of the Choi matrix.
    pub fn choi_min_eigenvalue(&self) -> f64 {
        let eig = herm_eig(&self.choi().hermitian_part()).expect("Hermitian part");
        *eig.values.last().expect("non-empty spectrum")
    }

    pub fn is_completely_positive(&self, tol: f64) -> bool {
        self.is_hermiticity_preserving(1e-11) && self.choi_min_eigenvalue() >= -tol
    }

    /// Kraus operators from the eigendecomposition of the Choi matrix,
    /// dropping eigenvalues at or below `tol`. `None` if the map is not CP.
    pub fn kraus_operators(&self, tol: f64) -> Option<Vec<CMatrix>> {
        if !self.is_hermiticity_preserving(1e-11) {
            return None;
        }
        let d = self.dim;
        let eig = herm_eig(&self.choi().hermitian_part()).expect("Hermitian part");
        if *eig.values.last()? < -tol {
            return None;
        }
        Some(
            eig.values
                .iter()
                .enumerate()
                .filter(|(_, &lam)| lam > tol)
                .map(|(k, &lam)| {
                    let s = lam.sqrt();
                    CMatrix::from_fn(d, |i, j| eig.vectors[(i * d + j, k)] * s)
                })
                .collect(),
        )
    }
}

impl Add for &Superoperator {
    type Output = Superoperator;
    fn add(self, rhs: &Superoperator) -> Superoperator {
        assert_eq!(self.dim, rhs.dim);
        Superoperator {
            dim: self.dim,
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl Sub for &Superoperator {
    type Output = Superoperator;
    fn sub(self, rhs: &Superoperator) -> Superoperator {
        assert_eq!(self.dim, rhs.dim);
        Superoperator {
            dim: self.dim,
            mat: &self.mat - &rhs.mat,
        }
    }
}

/// How a positivity verdict on a map was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositivityMethod {
    /// Choi matrix is positive semidefinite.
    CompletelyPositive,
    /// Qubit unital trace-preserving map: largest singular value of the
    /// Bloch block is at most one.
    BlochExact,
    /// Images of sampled pure states were checked for negative eigenvalues.
    Sampled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositivityCheck {
    pub positive: bool,
    pub method: PositivityMethod,
}

const PSD_TOL: f64 = 1e-9;
pub(crate) const POSITIVITY_SAMPLES: usize = 500;
const POSITIVITY_SEED: u64 = 0x5EED_0F_9051;

/// Positivity of a Hermiticity-preserving map.
///
/// CP maps are accepted outright. A unital trace-preserving qubit map is
/// positive iff its Bloch block is a contraction; anything else is tested on
/// `samples` seeded Haar-random pure states plus the computational basis.
pub fn check_positive_map(phi: &Superoperator, samples: usize) -> PositivityCheck {
    if phi.is_completely_positive(PSD_TOL) {
        return PositivityCheck {
            positive: true,
            method: PositivityMethod::CompletelyPositive,
        };
    }
    let d = phi.dim();
    if d == 2 && phi.is_unital(1e-9) && phi.is_trace_preserving(1e-9) {
        let block = bloch_block(phi);
        let s = singular_values(&block);
        return PositivityCheck {
            positive: s[0] <= 1.0 + PSD_TOL,
            method: PositivityMethod::BlochExact,
        };
    }
    let mut rng = rng_from_seed(POSITIVITY_SEED);
    let basis = (0..d).map(|k| {
        let mut p = CMatrix::zeros(d);
        p[(k, k)] = ONE;
        p
    });
    let random = (0..samples).map(|_| random_pure_state(&mut rng, d));
    let positive = basis.chain(random).all(|psi| {
        let image = phi.apply(&psi).hermitian_part();
        let eig = herm_eig(&image).expect("Hermitian part");
        *eig.values.last().unwrap() >= -PSD_TOL
    });
    PositivityCheck {
        positive,
        method: PositivityMethod::Sampled,
    }
}

/// 3×3 block `tr(σ_j Φ(σ_k))/2` of a qubit map, embedded in a complex matrix
/// so the generic singular-value routine applies.
fn bloch_block(phi: &Superoperator) -> CMatrix {
    use crate::linalg::pauli;
    CMatrix::from_fn(3, |j, k| {
        let img = phi.apply(&pauli(k + 1));
        C64::new((pauli(j + 1).matmul(&img).trace() * 0.5).re, 0.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli, I};

    fn sample_matrix() -> CMatrix {
        CMatrix::from_row_major(vec![
            C64::new(0.3, 0.1),
            C64::new(-1.0, 2.0),
            C64::new(0.5, 0.0),
            C64::new(0.0, -0.7),
        ])
    }

    #[test]
    fn sandwich_matches_direct_product() {
        let v = pauli(1).scale(C64::new(0.5, 0.5));
        let w = &pauli(3) + &pauli(2);
        let a = sample_matrix();
        let direct = v.matmul(&a).matmul(&w.adjoint());
        let via = Superoperator::sandwich(&v, &w).apply(&a);
        assert!((&direct - &via).max_abs() < 1e-14);
    }

    #[test]
    fn left_right_multiplication() {
        let x = sample_matrix();
        let a = pauli(2).scale(I);
        assert!((&Superoperator::left_mul(&x).apply(&a) - &x.matmul(&a)).max_abs() < 1e-14);
        assert!((&Superoperator::right_mul(&x).apply(&a) - &a.matmul(&x)).max_abs() < 1e-14);
    }

    #[test]
    fn choi_round_trip_and_kraus() {
        let u = (&pauli(1) + &pauli(3)).scale_real(std::f64::consts::FRAC_1_SQRT_2);
        let phi = &Superoperator::conjugation(&u).scale(0.3)
            + &Superoperator::conjugation(&pauli(2)).scale(0.7);
        assert_eq!(Superoperator::from_choi(&phi.choi()), phi);
        let kraus = phi.kraus_operators(1e-12).unwrap();
        assert_eq!(kraus.len(), 2);
        assert!(Superoperator::from_kraus(&kraus).distance(&phi) < 1e-12);
        assert!(phi.is_trace_preserving(1e-12) && phi.is_unital(1e-12));
    }

    #[test]
    fn identity_choi_is_maximally_entangled_projector() {
        let c = Superoperator::identity(2).choi();
        // |ω⟩⟨ω| with ω = e₀ + e₃
        for (r, c_) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert_eq!(c[(r, c_)], ONE);
        }
        assert_eq!(c.trace(), C64::new(2.0, 0.0));
    }

    #[test]
    fn realign_of_sandwich_is_rank_one() {
        let x = sample_matrix();
        let y = pauli(2);
        let r = Superoperator::sandwich(&x, &y).realign();
        let expected = CMatrix::outer(&x.vec(), &y.vec());
        assert!((&r - &expected).max_abs() < 1e-14);
    }

    #[test]
    fn transposition_is_positive_but_not_cp() {
        let t = Superoperator::transposition(2);
        assert!(!t.is_completely_positive(1e-9));
        let check = check_positive_map(&t, 10);
        assert!(check.positive);
        assert_eq!(check.method, PositivityMethod::BlochExact);
        assert!(!check_positive_map(&t.scale(-1.0), 10).positive);
    }

    #[test]
    fn trace_annihilation() {
        let gen = &Superoperator::conjugation(&pauli(1)) - &Superoperator::identity(2);
        assert!(gen.is_trace_annihilating(1e-14));
        assert!(!gen.is_trace_preserving(1e-3));
    }
}
