use crate::linalg::{pauli, CMatrix, C64};
use crate::superop::Superoperator;

use super::real3::{self, M3};
use super::{bloch_block, matrix_rep, QubitError};

/// A unital positive trace-preserving qubit map written as
/// Σ_μ w U(·)U† + Σ_ν w U τ(·) U†, τ the transposition.
#[derive(Debug, Clone)]
pub struct StormerDecomposition {
    pub mu: Vec<(f64, CMatrix)>,
    pub nu: Vec<(f64, CMatrix)>,
}

impl StormerDecomposition {
    pub fn reconstruct(&self) -> Superoperator {
        let tau = Superoperator::transposition(2);
        let mut acc = Superoperator::zero(2);
        for (w, u) in &self.mu {
            acc = &acc + &Superoperator::conjugation(u).scale(*w);
        }
        for (w, u) in &self.nu {
            acc = &acc + &Superoperator::conjugation(u).compose(&tau).scale(*w);
        }
        acc
    }

    pub fn total_weight(&self) -> f64 {
        self.mu.iter().chain(&self.nu).map(|(w, _)| w).sum()
    }
}

/// The SU(2) element U with U(r·σ)U† = (R r)·σ, chosen with Re U₁₁ ≥ 0.
pub fn su2_lift(r: &M3) -> CMatrix {
    // quaternion (q0, q) with U = q0 − i q·σ
    let tr = r[0][0] + r[1][1] + r[2][2];
    let candidates = [tr, r[0][0], r[1][1], r[2][2]];
    let best = (0..4)
        .max_by(|&a, &b| candidates[a].total_cmp(&candidates[b]))
        .unwrap();
    let mut q = match best {
        0 => {
            let s = 2.0 * (1.0 + tr).sqrt();
            [
                s / 4.0,
                (r[2][1] - r[1][2]) / s,
                (r[0][2] - r[2][0]) / s,
                (r[1][0] - r[0][1]) / s,
            ]
        }
        1 => {
            let s = 2.0 * (1.0 + r[0][0] - r[1][1] - r[2][2]).sqrt();
            [
                (r[2][1] - r[1][2]) / s,
                s / 4.0,
                (r[0][1] + r[1][0]) / s,
                (r[0][2] + r[2][0]) / s,
            ]
        }
        2 => {
            let s = 2.0 * (1.0 - r[0][0] + r[1][1] - r[2][2]).sqrt();
            [
                (r[0][2] - r[2][0]) / s,
                (r[0][1] + r[1][0]) / s,
                s / 4.0,
                (r[1][2] + r[2][1]) / s,
            ]
        }
        _ => {
            let s = 2.0 * (1.0 - r[0][0] - r[1][1] + r[2][2]).sqrt();
            [
                (r[1][0] - r[0][1]) / s,
                (r[0][2] + r[2][0]) / s,
                (r[1][2] + r[2][1]) / s,
                s / 4.0,
            ]
        }
    };
    let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    q = q.map(|x| x / norm);
    if q[0] < 0.0 {
        q = q.map(|x| -x);
    }
    let mut u = CMatrix::identity(2).scale_real(q[0]);
    for k in 0..3 {
        u -= &pauli(k + 1).scale(C64::new(0.0, q[k + 1]));
    }
    u
}

/// Weights of the even vertices (1,1,1), (1,−1,−1), (−1,1,−1), (−1,−1,1) of
/// the cube whose convex hull (a tetrahedron) contains λ, indexed like the
/// Paulis 1, σ₁, σ₂, σ₃.
fn even_barycentric(l: [f64; 3]) -> [f64; 4] {
    [
        (1.0 + l[0] + l[1] + l[2]) / 4.0,
        (1.0 + l[0] - l[1] - l[2]) / 4.0,
        (1.0 - l[0] + l[1] - l[2]) / 4.0,
        (1.0 - l[0] - l[1] + l[2]) / 4.0,
    ]
}

/// Bloch action of σ_k ∘ τ for the odd vertex paired with index k: the odd
/// vertex −e_k equals diag(σ_m τ) with m = ODD_PAULI[k].
const ODD_PAULI: [usize; 4] = [2, 3, 0, 1];

/// Barycentric weights above −this count as inside a tetrahedron.
const WEIGHT_TOL: f64 = 1e-12;
/// Round-off sized weights are dropped before renormalizing.
const DROP_WEIGHT: f64 = 1e-15;

/// Splits a unital positive trace-preserving qubit map into unitary and
/// transposed-unitary conjugations.
///
/// The Bloch block is factored as Λ = R₁ D R₂ with R₁, R₂ rotations and D
/// diagonal. Positivity is |D_ii| ≤ 1, so D lies in the cube whose vertices
/// are the sign matrices; even-parity vertices are Pauli conjugations and
/// odd-parity vertices are Pauli conjugations after τ. D is written over the
/// even tetrahedron when possible (these are exactly the CP maps), else over
/// the odd one, else with product weights Π(1 + s_iλ_i)/2 over all eight.
pub fn stormer_decompose(s: &Superoperator) -> Result<StormerDecomposition, QubitError> {
    if s.dim() != 2 {
        return Err(QubitError::WrongDimension(s.dim()));
    }
    let m = matrix_rep(s)?;
    if (0..4).any(|k| (m[0][k] - if k == 0 { 1.0 } else { 0.0 }).abs() > 1e-9) {
        return Err(QubitError::NotTracePreserving);
    }
    if (1..4).any(|j| m[j][0].abs() > 1e-9) {
        return Err(QubitError::NotUnital);
    }
    let block = bloch_block(&m);
    let (mut u, sigma, mut v) = real3::svd(&block);
    if sigma[0] > 1.0 + 1e-9 {
        return Err(QubitError::NotPositive(sigma[0]));
    }
    let mut lambda = sigma;
    for rot in [&mut u, &mut v] {
        if real3::det(rot) < 0.0 {
            for row in rot.iter_mut() {
                row[2] = -row[2];
            }
            lambda[2] = -lambda[2];
        }
    }
    let lambda = lambda.map(|x| x.clamp(-1.0, 1.0));
    let u1 = su2_lift(&u);
    let u2 = su2_lift(&real3::transpose(&v));
    let paulis: Vec<CMatrix> = (0..4).map(pauli).collect();
    let even_unitary = |k: usize| u1.matmul(&paulis[k]).matmul(&u2);
    let odd_unitary = |k: usize| u1.matmul(&paulis[ODD_PAULI[k]]).matmul(&u2.conj());

    let even = even_barycentric(lambda);
    let odd = even_barycentric(lambda.map(|x| -x));
    let mut mu = Vec::new();
    let mut nu = Vec::new();
    if even.iter().all(|&p| p >= -WEIGHT_TOL) {
        for (k, &p) in even.iter().enumerate() {
            mu.push((p, even_unitary(k)));
        }
    } else if odd.iter().all(|&p| p >= -WEIGHT_TOL) {
        for (k, &p) in odd.iter().enumerate() {
            nu.push((p, odd_unitary(k)));
        }
    } else {
        for k in 0..4 {
            let sign = vertex(k);
            let w_even: f64 = (0..3).map(|i| (1.0 + sign[i] * lambda[i]) / 2.0).product();
            let w_odd: f64 = (0..3).map(|i| (1.0 - sign[i] * lambda[i]) / 2.0).product();
            mu.push((w_even, even_unitary(k)));
            nu.push((w_odd, odd_unitary(k)));
        }
    }
    let keep = |list: Vec<(f64, CMatrix)>| -> Vec<(f64, CMatrix)> {
        list.into_iter().filter(|(w, _)| *w > DROP_WEIGHT).collect()
    };
    let mut out = StormerDecomposition {
        mu: keep(mu),
        nu: keep(nu),
    };
    let total = out.total_weight();
    for (w, _) in out.mu.iter_mut().chain(out.nu.iter_mut()) {
        *w /= total;
    }
    Ok(out)
}

/// Sign vector of the even vertex matching Pauli k.
fn vertex(k: usize) -> [f64; 3] {
    match k {
        0 => [1.0, 1.0, 1.0],
        1 => [1.0, -1.0, -1.0],
        2 => [-1.0, 1.0, -1.0],
        _ => [-1.0, -1.0, 1.0],
    }
}
