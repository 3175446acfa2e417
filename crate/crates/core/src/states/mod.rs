//! Density operators, ordered spectra, majorization, and the bistochastic
//! matrix that links the spectrum of a state to that of its image under a
//! unital channel.

mod birkhoff;

use thiserror::Error;

use crate::linalg::{herm_eig, vec_inner, CMatrix, HermEigen, C64};
use crate::superop::{check_positive_map, Superoperator, POSITIVITY_SAMPLES};

pub use birkhoff::{birkhoff_decompose, BirkhoffDecomposition, BirkhoffTerm};

pub const DEFAULT_STATE_TOL: f64 = 1e-9;

/// Tolerance used for partial-sum comparisons in [`majorizes`].
pub const MAJORIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("operator is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("operator is not positive semidefinite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("trace is {trace:.12}, expected 1")]
    TraceNotOne { trace: f64 },
    #[error("operator contains non-finite entries")]
    NonFinite,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("not a probability vector: {0}")]
    NotProbability(String),
    #[error("map is not unital")]
    NotUnital,
    #[error("map is not trace-preserving")]
    NotTracePreserving,
    #[error("map is not positive")]
    NotPositiveMap,
    #[error("not bistochastic: {0}")]
    NotBistochastic(String),
}

/// A validated density operator together with its ordered spectrum.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    mat: CMatrix,
    tol: f64,
    spectrum: EigenvalueVector,
}

/// Checks Hermiticity, positivity and unit trace at tolerance `tol` and
/// caches the clamped, sorted spectrum.
pub fn validate_density(a: &CMatrix, tol: f64) -> Result<DensityOperator, StateError> {
    if !a.is_finite() {
        return Err(StateError::NonFinite);
    }
    let residual = a.hermiticity_residual();
    if residual > tol {
        return Err(StateError::NotHermitian { residual });
    }
    let mat = a.hermitian_part();
    let eig = herm_eig(&mat).map_err(|_| StateError::NotHermitian { residual })?;
    let min_eigenvalue = *eig.values.last().expect("non-empty spectrum");
    if min_eigenvalue < -tol {
        return Err(StateError::NotPositive { min_eigenvalue });
    }
    let trace = mat.trace().re;
    if (trace - 1.0).abs() > tol {
        return Err(StateError::TraceNotOne { trace });
    }
    Ok(DensityOperator {
        spectrum: EigenvalueVector::from_spectrum(&eig.values),
        mat,
        tol,
    })
}

impl DensityOperator {
    pub fn new(a: &CMatrix) -> Result<Self, StateError> {
        validate_density(a, DEFAULT_STATE_TOL)
    }

    /// ρ* = 1/d
    pub fn maximally_mixed(dim: usize) -> Self {
        Self::new(&CMatrix::identity(dim).scale_real(1.0 / dim as f64))
            .expect("maximally mixed state is valid")
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalized) non-zero vector.
    pub fn pure(psi: &[C64]) -> Result<Self, StateError> {
        let norm2 = vec_inner(psi, psi).re;
        if !(norm2 > 0.0) {
            return Err(StateError::TraceNotOne { trace: norm2 });
        }
        Self::new(&CMatrix::outer(psi, psi).scale_real(1.0 / norm2))
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn spectrum(&self) -> &EigenvalueVector {
        &self.spectrum
    }

    /// tr ρ²
    pub fn purity(&self) -> f64 {
        self.mat.hs_inner(&self.mat).re
    }

    /// ‖ρ − σ‖₁
    pub fn trace_distance(&self, other: &Self) -> f64 {
        let diff = &self.mat - &other.mat;
        let eig = herm_eig(&diff.hermitian_part()).expect("difference of Hermitian matrices");
        eig.values.iter().map(|x| x.abs()).sum()
    }
}

/// Ordered eigenvalue vector: non-negative, non-increasing, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueVector {
    probs: Vec<f64>,
}

impl EigenvalueVector {
    /// Accepts any probability vector (entries ≥ −1e-9, sum 1 within 1e-9)
    /// and returns its decreasing rearrangement.
    pub fn new(values: &[f64]) -> Result<Self, StateError> {
        if values.is_empty() || values.iter().any(|x| !x.is_finite()) {
            return Err(StateError::NotProbability("empty or non-finite".into()));
        }
        if let Some(x) = values.iter().find(|&&x| x < -1e-9) {
            return Err(StateError::NotProbability(format!("negative entry {x:e}")));
        }
        let total: f64 = values.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(StateError::NotProbability(format!("sum {total}")));
        }
        Ok(Self::from_spectrum(values))
    }

    /// Clamps into [0, 1], renormalizes, sorts non-increasing.
    pub(crate) fn from_spectrum(values: &[f64]) -> Self {
        let mut probs: Vec<f64> = values.iter().map(|x| x.clamp(0.0, 1.0)).collect();
        let total: f64 = probs.iter().sum();
        if total > 0.0 {
            probs.iter_mut().for_each(|x| *x /= total);
        }
        probs.sort_by(|a, b| b.total_cmp(a));
        Self { probs }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

pub fn eigenvalue_vector(rho: &DensityOperator) -> EigenvalueVector {
    rho.spectrum.clone()
}

/// `true` iff `y ≺ x`: every partial sum of `y` is bounded by the matching
/// partial sum of `x`, and the totals agree.
pub fn majorizes(x: &EigenvalueVector, y: &EigenvalueVector) -> Result<bool, StateError> {
    if x.len() != y.len() {
        return Err(StateError::LengthMismatch(x.len(), y.len()));
    }
    let (mut sx, mut sy) = (0.0, 0.0);
    for (a, b) in x.probs.iter().zip(&y.probs) {
        sx += a;
        sy += b;
        if sy > sx + MAJORIZATION_TOL {
            return Ok(false);
        }
    }
    Ok((sx - sy).abs() <= MAJORIZATION_TOL)
}

/// Real d×d matrix with non-negative entries and unit row and column sums.
#[derive(Debug, Clone, PartialEq)]
pub struct BistochasticMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl BistochasticMatrix {
    /// Row-major entries. Values in (−1e-10, 0) are clamped to zero.
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self, StateError> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(StateError::NotBistochastic(format!(
                "{} entries for dimension {dim}",
                entries.len()
            )));
        }
        if let Some(x) = entries.iter().find(|x| !x.is_finite() || **x < -1e-10) {
            return Err(StateError::NotBistochastic(format!("entry {x}")));
        }
        let entries: Vec<f64> = entries.into_iter().map(|x| x.max(0.0)).collect();
        for k in 0..dim {
            let row: f64 = (0..dim).map(|j| entries[k * dim + j]).sum();
            let col: f64 = (0..dim).map(|i| entries[i * dim + k]).sum();
            if (row - 1.0).abs() > 1e-9 || (col - 1.0).abs() > 1e-9 {
                return Err(StateError::NotBistochastic(format!(
                    "row/column {k} sums to {row}/{col}"
                )));
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, StateError> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(StateError::NotBistochastic("matrix is not square".into()));
        }
        Self::new(dim, rows.concat())
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0.0; dim * dim];
        (0..dim).for_each(|k| entries[k * dim + k] = 1.0);
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }
}

/// Threshold below which neighbouring eigenvalues are treated as one
/// degenerate block when ordering eigenvectors.
const DEGENERACY_TOL: f64 = 1e-9;

/// Eigenvectors of a Hermitian matrix in non-increasing eigenvalue order,
/// with each degenerate block phase-fixed and sorted lexicographically.
fn ordered_eigenvectors(a: &CMatrix) -> (Vec<f64>, Vec<Vec<C64>>) {
    let HermEigen { values, vectors } = herm_eig(&a.hermitian_part()).expect("Hermitian part");
    let n = values.len();
    let mut vecs: Vec<Vec<C64>> = (0..n).map(|k| phase_fixed(vectors.column(k))).collect();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (values[end - 1] - values[end]).abs() <= DEGENERACY_TOL {
            end += 1;
        }
        vecs[start..end].sort_by(|u, v| lexicographic(u, v));
        start = end;
    }
    (values, vecs)
}

/// Rotates the global phase so the first non-negligible component is real
/// and positive.
fn phase_fixed(mut v: Vec<C64>) -> Vec<C64> {
    if let Some(lead) = v.iter().find(|z| z.norm() > 1e-8).copied() {
        let phase = lead.conj() / lead.norm();
        v.iter_mut().for_each(|z| *z *= phase);
    }
    v
}

fn lexicographic(u: &[C64], v: &[C64]) -> std::cmp::Ordering {
    for (a, b) in u.iter().zip(v) {
        for (x, y) in [(a.re, b.re), (a.im, b.im)] {
            if (x - y).abs() > 1e-12 {
                return y.total_cmp(&x);
            }
        }
    }
    std::cmp::Ordering::Equal
}

/// The bistochastic matrix `B_jk = tr(Q_j Φ(P_k))` where `P_k` and `Q_j`
/// are the rank-one eigenprojectors of ρ and Φ(ρ), both in non-increasing
/// eigenvalue order. It satisfies `vep(Φρ) = B·vep(ρ)`.
pub fn extract_bistochastic(
    phi: &Superoperator,
    rho: &DensityOperator,
) -> Result<BistochasticMatrix, StateError> {
    let d = rho.dim();
    if phi.dim() != d {
        return Err(StateError::LengthMismatch(phi.dim(), d));
    }
    if !phi.is_trace_preserving(1e-9) {
        return Err(StateError::NotTracePreserving);
    }
    if !phi.is_unital(1e-9) {
        return Err(StateError::NotUnital);
    }
    if !check_positive_map(phi, POSITIVITY_SAMPLES).positive {
        return Err(StateError::NotPositiveMap);
    }
    let (_, p) = ordered_eigenvectors(rho.matrix());
    let (_, q) = ordered_eigenvectors(&phi.apply(rho.matrix()));
    let images: Vec<CMatrix> = p
        .iter()
        .map(|pk| phi.apply(&CMatrix::outer(pk, pk)))
        .collect();
    let mut entries = Vec::with_capacity(d * d);
    for qj in &q {
        for img in &images {
            entries.push(vec_inner(qj, &img.matvec(qj)).re);
        }
    }
    BistochasticMatrix::new(d, entries)
}
