//! Qubit semigroups in the Bloch picture.
//!
//! A state is ρ = (1 + r·σ)/2 and a Hermiticity-preserving map S acts through
//! the real 4×4 matrix M_jk = tr(σ_j S(σ_k))/2. Unital trace-preserving maps
//! have M = diag(1, Λ); their generators have M = diag(0, F).

pub mod real3;
mod stormer;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{null_space, pauli, CMatrix, C64};
use crate::states::{validate_density, DensityOperator, StateError};
use crate::superop::Superoperator;

pub use real3::M3;
pub use stormer::{stormer_decompose, su2_lift, StormerDecomposition};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QubitError {
    #[error("expected a qubit superoperator, got dimension {0}")]
    WrongDimension(usize),
    #[error("map is not adjoint-preserving (imaginary residue {0:.3e})")]
    NotAdjointPreserving(f64),
    #[error("K is not symmetric (asymmetry {0:.3e})")]
    NotSymmetric(f64),
    #[error("parameters must be finite")]
    NonFinite,
    #[error("map is not unital")]
    NotUnital,
    #[error("map is not trace-preserving")]
    NotTracePreserving,
    #[error("map is not positive (largest Bloch singular value {0})")]
    NotPositive(f64),
    #[error("stationary state is not unique ({0}-dimensional null space)")]
    NonUniqueStationaryState(usize),
    #[error("generator has no stationary state")]
    NoStationaryState,
    #[error("stationary state: {0}")]
    State(#[from] StateError),
}

/// Bloch vector of a qubit state; valid when ‖r‖ ≤ 1 + 1e-10.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub r: [f64; 3],
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        self.r.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_state(&self) -> bool {
        self.norm() <= 1.0 + 1e-10
    }

    /// (1 + r·σ)/2.
    pub fn to_matrix(&self) -> CMatrix {
        let mut m = CMatrix::identity(2);
        for k in 0..3 {
            m += &pauli(k + 1).scale_real(self.r[k]);
        }
        m.scale_real(0.5)
    }

    /// r_k = tr(σ_k A) for a Hermitian 2×2 `a`.
    pub fn from_matrix(a: &CMatrix) -> Self {
        Self {
            r: [1, 2, 3].map(|k| pauli(k).matmul(a).trace().re),
        }
    }
}

/// 𝓛A = −i Σ h_j [s_j, A] + Σ k_jk (s_j A s_k − ½{s_j s_k, A}) with s_j = σ_j/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitGeneratorParams {
    pub h: [f64; 3],
    pub k: M3,
}

impl QubitGeneratorParams {
    /// `k` must be symmetric to 1e-12; it is stored exactly symmetrized.
    pub fn new(h: [f64; 3], k: M3) -> Result<Self, QubitError> {
        if h.iter().chain(k.iter().flatten()).any(|x| !x.is_finite()) {
            return Err(QubitError::NonFinite);
        }
        let mut asym: f64 = 0.0;
        let mut sym = k;
        for i in 0..3 {
            for j in 0..3 {
                asym = asym.max((k[i][j] - k[j][i]).abs());
                sym[i][j] = 0.5 * (k[i][j] + k[j][i]);
            }
        }
        if asym > 1e-12 {
            return Err(QubitError::NotSymmetric(asym));
        }
        Ok(Self { h, k: sym })
    }

    /// The diagonal family K = diag(γ₁, γ₂, γ₃), h = 0.
    pub fn diagonal(gamma: [f64; 3]) -> Result<Self, QubitError> {
        Self::new([0.0; 3], real3::diag(gamma))
    }

    /// 𝒫 = tr(K)·1 − K, which equals −(F + Fᵀ).
    pub fn p_matrix(&self) -> M3 {
        let tr = self.k[0][0] + self.k[1][1] + self.k[2][2];
        let mut p = self.k.map(|row| row.map(|x| -x));
        for (i, row) in p.iter_mut().enumerate() {
            row[i] += tr;
        }
        p
    }

    /// Bloch block of the generator.
    pub fn f_matrix(&self) -> M3 {
        let [h1, h2, h3] = self.h;
        let k = &self.k;
        [
            [
                -(k[1][1] + k[2][2]) / 2.0,
                k[0][1] / 2.0 - h3,
                k[0][2] / 2.0 + h2,
            ],
            [
                k[0][1] / 2.0 + h3,
                -(k[0][0] + k[2][2]) / 2.0,
                k[1][2] / 2.0 - h1,
            ],
            [
                k[0][2] / 2.0 - h2,
                k[1][2] / 2.0 + h1,
                -(k[0][0] + k[1][1]) / 2.0,
            ],
        ]
    }
}

#[derive(Debug, Clone)]
pub struct QubitGenerator {
    pub l: Superoperator,
    pub f: M3,
    pub p: M3,
}

pub fn build_qubit_generator(params: &QubitGeneratorParams) -> QubitGenerator {
    let s: Vec<CMatrix> = (1..=3).map(|k| pauli(k).scale_real(0.5)).collect();
    let mut l = CMatrix::zeros(4);
    for j in 0..3 {
        let comm = &Superoperator::left_mul(&s[j]) - &Superoperator::right_mul(&s[j]);
        l += &comm.into_matrix().scale(C64::new(0.0, -params.h[j]));
        for k in 0..3 {
            let kjk = params.k[j][k];
            if kjk == 0.0 {
                continue;
            }
            let sjsk = s[j].matmul(&s[k]);
            let anti = &Superoperator::left_mul(&sjsk) + &Superoperator::right_mul(&sjsk);
            let term = &Superoperator::sandwich(&s[j], &s[k]) - &anti.scale(0.5);
            l += &term.into_matrix().scale_real(kjk);
        }
    }
    QubitGenerator {
        l: Superoperator::new(2, l).expect("4×4"),
        f: params.f_matrix(),
        p: params.p_matrix(),
    }
}

/// M_jk = tr(σ_j S(σ_k))/2 with σ_0 = 1.
pub fn matrix_rep(s: &Superoperator) -> Result<[[f64; 4]; 4], QubitError> {
    if s.dim() != 2 {
        return Err(QubitError::WrongDimension(s.dim()));
    }
    let basis: Vec<CMatrix> = (0..4).map(pauli).collect();
    let images: Vec<CMatrix> = basis.iter().map(|b| s.apply(b)).collect();
    let tol = 1e-11 * s.matrix().frobenius_norm().max(1.0);
    let mut m = [[0.0; 4]; 4];
    let mut residue: f64 = 0.0;
    for j in 0..4 {
        for k in 0..4 {
            let z = basis[j].matmul(&images[k]).trace() * 0.5;
            residue = residue.max(z.im.abs());
            m[j][k] = z.re;
        }
    }
    if residue > tol {
        return Err(QubitError::NotAdjointPreserving(residue));
    }
    Ok(m)
}

/// The lower-right 3×3 block of a 4×4 Bloch matrix.
pub fn bloch_block(m: &[[f64; 4]; 4]) -> M3 {
    [1, 2, 3].map(|j| [1, 2, 3].map(|k| m[j][k]))
}

/// A unital qubit generator with Bloch block F generates positive
/// maps iff F + Fᵀ ≤ 0, decided here at 1e-10.
pub fn is_positive_qubit_generator(f: &M3) -> bool {
    real3::max_eigenvalue(&symmetric_sum(f)) <= 1e-10
}

fn symmetric_sum(f: &M3) -> M3 {
    let mut s = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            s[i][j] = f[i][j] + f[j][i];
        }
    }
    s
}

/// max over unit n of n·(v + F n), with a maximizer.
///
/// For a generator with Bloch column v and block F this is the largest rate at
/// which a pure state can leave the Bloch sphere, so positivity of the
/// semigroup is equivalent to a non-positive margin. Solved through the dual
/// of the trust-region problem: min over μ ≥ s_max of μ + Σ w_i²/(4(μ − s_i)),
/// where s_i are the eigenvalues of (F + Fᵀ)/2 and w the coordinates of v in
/// its eigenbasis. The function is convex and its minimum lies within |v|/2 of
/// s_max.
pub fn bloch_generator_margin(v: [f64; 3], f: &M3) -> (f64, [f64; 3]) {
    let half = symmetric_sum(f).map(|row| row.map(|x| 0.5 * x));
    let (s, q) = real3::sym_eig(&half);
    let w: [f64; 3] = [0, 1, 2].map(|i| (0..3).map(|r| q[r][i] * v[r]).sum());
    let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let dual = |mu: f64| -> f64 {
        mu + (0..3)
            .filter(|&i| w[i] != 0.0)
            .map(|i| w[i] * w[i] / (4.0 * (mu - s[i])))
            .sum::<f64>()
    };
    let (mut lo, mut hi) = (s[0], s[0] + 0.5 * vnorm);
    for _ in 0..200 {
        if hi - lo <= 1e-15 * (1.0 + hi.abs()) {
            break;
        }
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if dual(m1) > dual(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let mu = 0.5 * (lo + hi);
    let mut value = if vnorm == 0.0 { s[0] } else { dual(mu) };

    // maximizer in the eigenbasis; the top direction absorbs any deficit
    let mut y = [0.0; 3];
    for i in 0..3 {
        let gap = mu - s[i];
        if w[i] != 0.0 && gap > 0.0 {
            y[i] = w[i] / (2.0 * gap);
        }
    }
    let len2: f64 = y.iter().map(|x| x * x).sum();
    if len2 < 1.0 {
        let sign = if y[0] < 0.0 { -1.0 } else { 1.0 };
        y[0] = sign * (1.0 - len2 + y[0] * y[0]).sqrt();
    }
    let len = y.iter().map(|x| x * x).sum::<f64>().sqrt();
    let y = y.map(|x| x / len);
    let n: [f64; 3] = [0, 1, 2].map(|r| (0..3).map(|i| q[r][i] * y[i]).sum());
    let direct: f64 = (0..3)
        .map(|i| n[i] * (v[i] + (0..3).map(|j| f[i][j] * n[j]).sum::<f64>()))
        .sum();
    value = value.max(direct);
    (value, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cone {
    /// Completely positive, trace-preserving, unital.
    #[serde(rename = "CPTU")]
    Cptu,
    /// Positive but not completely positive.
    #[serde(rename = "PTU_only")]
    PtuOnly,
    #[serde(rename = "Outside")]
    Outside,
}

impl Cone {
    pub fn label(self) -> &'static str {
        match self {
            Cone::Cptu => "CPTU",
            Cone::PtuOnly => "PTU_only",
            Cone::Outside => "Outside",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeVerdict {
    pub cone: Cone,
    /// Descending.
    pub k_eigenvalues: [f64; 3],
    pub p_eigenvalues: [f64; 3],
    /// The principal-minor tests on K and 𝒫 reach the same conclusions as the
    /// spectra.
    pub minors_consistent: bool,
}

const CONE_TOL: f64 = 1e-10;

pub fn classify_cone(params: &QubitGeneratorParams) -> ConeVerdict {
    let p = params.p_matrix();
    let k_eigenvalues = real3::sym_eig(&params.k).0;
    let p_eigenvalues = real3::sym_eig(&p).0;
    let k_psd = k_eigenvalues[2] >= -CONE_TOL;
    let p_psd = p_eigenvalues[2] >= -CONE_TOL;
    let cone = if k_psd {
        Cone::Cptu
    } else if p_psd {
        Cone::PtuOnly
    } else {
        Cone::Outside
    };
    let minors_consistent =
        minors_nonnegative(&params.k) == k_psd && minors_nonnegative(&p) == p_psd;
    ConeVerdict {
        cone,
        k_eigenvalues,
        p_eigenvalues,
        minors_consistent,
    }
}

/// All seven principal minors of a symmetric 3×3 matrix are ≥ −tol·scaleᵐ.
fn minors_nonnegative(a: &M3) -> bool {
    let scale = a.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
    let ones = (0..3).all(|i| a[i][i] >= -CONE_TOL * scale);
    let twos = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .all(|&(i, j)| a[i][i] * a[j][j] - a[i][j] * a[j][i] >= -CONE_TOL * scale * scale);
    ones && twos && real3::det(a) >= -CONE_TOL * scale.powi(3)
}

/// The unique stationary state of `l`, from the null space of its matrix
/// (singular values below 1e-10·‖𝓛‖).
pub fn asymptotic_state(l: &Superoperator) -> Result<DensityOperator, QubitError> {
    let tol = 1e-10 * l.matrix().frobenius_norm().max(f64::MIN_POSITIVE);
    let kernel = null_space(l.matrix(), tol);
    match kernel.len() {
        0 => Err(QubitError::NoStationaryState),
        1 => {
            let x = CMatrix::unvec(&kernel[0]);
            let tr = x.trace();
            if tr.norm() < 1e-12 {
                return Err(QubitError::NoStationaryState);
            }
            let rho = x.scale(tr.inv()).hermitian_part();
            Ok(validate_density(&rho, 1e-9)?)
        }
        n => Err(QubitError::NonUniqueStationaryState(n)),
    }
}
