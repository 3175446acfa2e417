use super::{CMatrix, LinalgError, C64, ZERO};

const HERMITIAN_TOL: f64 = 1e-12;
const OFF_DIAGONAL_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermEigen {
    /// Eigenvalues, sorted non-increasing.
    pub values: Vec<f64>,
    /// Unitary matrix whose k-th column is the eigenvector of `values[k]`.
    pub vectors: CMatrix,
}

impl HermEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// V·diag(λ)·V†
    pub fn reconstruct(&self) -> CMatrix {
        self.map_values(|x| x)
    }

    /// V·diag(f(λ))·V†, the spectral calculus.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        CMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| self.vectors[(i, k)] * self.vectors[(j, k)].conj() * fv[k])
                .sum()
        })
    }
}

/// Hermitian eigendecomposition by cyclic two-sided Jacobi rotations.
///
/// Sweeps are repeated until the off-diagonal Frobenius norm drops below
/// `1e-13·‖A‖_F`. Within a degenerate eigenspace the returned basis is
/// whatever the rotations produce.
pub fn herm_eig(a: &CMatrix) -> Result<HermEigen, LinalgError> {
    let residual = a.hermiticity_residual();
    if residual > HERMITIAN_TOL {
        return Err(LinalgError::NotHermitian { residual });
    }
    let n = a.dim();
    let mut m = a.hermitian_part();
    let mut v = CMatrix::identity(n);
    let total = m.frobenius_norm();

    if total > 0.0 && n > 1 {
        let threshold = OFF_DIAGONAL_TOL * total;
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_norm(&m) <= threshold {
                converged = true;
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    rotate(&mut m, &mut v, p, q);
                }
            }
        }
        if !converged && off_diagonal_norm(&m) > threshold {
            return Err(LinalgError::NoConvergence(MAX_SWEEPS));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].re.total_cmp(&m[(i, i)].re));
    let values = order.iter().map(|&k| m[(k, k)].re).collect();
    let vectors = CMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(HermEigen { values, vectors })
}

fn off_diagonal_norm(m: &CMatrix) -> f64 {
    let n = m.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Annihilates the (p, q) entry with the unitary
/// G = diag(1, e^{-iφ}) · [[c, s], [-s, c]] acting on coordinates p, q,
/// where φ = arg(a_pq): the phase makes a_pq real, the rotation zeroes it.
fn rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let abs = apq.norm();
    if abs == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    if abs <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        m[(p, q)] = ZERO;
        m[(q, p)] = ZERO;
        return;
    }
    let phase = apq / abs;
    let tau = (aqq - app) / (2.0 * abs);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let ph = phase.conj();
    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = ph * (-s);
    let g_qq = ph * c;

    let n = m.dim();
    // M ← M·G (columns p, q)
    for i in 0..n {
        let mp = m[(i, p)];
        let mq = m[(i, q)];
        m[(i, p)] = mp * g_pp + mq * g_qp;
        m[(i, q)] = mp * g_pq + mq * g_qq;
        let vp = v[(i, p)];
        let vq = v[(i, q)];
        v[(i, p)] = vp * g_pp + vq * g_qp;
        v[(i, q)] = vp * g_pq + vq * g_qq;
    }
    // M ← G†·M (rows p, q)
    for j in 0..n {
        let mp = m[(p, j)];
        let mq = m[(q, j)];
        m[(p, j)] = g_pp.conj() * mp + g_qp.conj() * mq;
        m[(q, j)] = g_pq.conj() * mp + g_qq.conj() * mq;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
}

/// Singular values of a square matrix, non-increasing.
///
/// Computed as the top half of the spectrum of the Hermitian dilation
/// [[0, A], [A†, 0]], whose eigenvalues are ±σ_k. This keeps small singular
/// values accurate to roughly machine precision relative to ‖A‖.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    let n = a.dim();
    let dilation = hermitian_dilation(a);
    let eig = herm_eig(&dilation).expect("dilation is Hermitian by construction");
    eig.values[..n].iter().map(|&s| s.max(0.0)).collect()
}

pub(crate) fn hermitian_dilation(a: &CMatrix) -> CMatrix {
    let n = a.dim();
    CMatrix::from_fn(2 * n, |i, j| match (i < n, j < n) {
        (true, false) => a[(i, j - n)],
        (false, true) => a[(j, i - n)].conj(),
        _ => ZERO,
    })
}

/// Orthonormal basis of the null space of `a`: right singular vectors whose
/// singular value is at most `tol`.
pub(crate) fn null_space(a: &CMatrix, tol: f64) -> Vec<Vec<C64>> {
    let n = a.dim();
    let eig = herm_eig(&hermitian_dilation(a)).expect("dilation is Hermitian by construction");
    // The near-zero eigenspace of the dilation is ker A† ⊕ ker A. Summing the
    // outer products of the lower halves gives the projector onto ker A.
    let mut projector = CMatrix::zeros(n);
    for k in 0..2 * n {
        if eig.values[k].abs() > tol {
            continue;
        }
        let w: Vec<C64> = (0..n).map(|i| eig.vectors[(n + i, k)]).collect();
        projector += &CMatrix::outer(&w, &w);
    }
    let proj_eig = herm_eig(&projector.hermitian_part()).expect("projector is Hermitian");
    (0..n)
        .filter(|&k| proj_eig.values[k] > 0.5)
        .map(|k| proj_eig.vector(k))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual_ok(a: &CMatrix, eig: &HermEigen) {
        let n = a.dim();
        let op_norm = singular_values(a)[0];
        for k in 0..n {
            let vk = eig.vector(k);
            let av = a.matvec(&vk);
            let r: f64 = av
                .iter()
                .zip(&vk)
                .map(|(x, y)| (x - y * eig.values[k]).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(r <= 1e-11 * (1.0 + op_norm), "residual {r}");
        }
        let gram = eig.vectors.adjoint().matmul(&eig.vectors);
        assert!((&gram - &CMatrix::identity(n)).max_abs() < 1e-12);
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let eig = herm_eig(&CMatrix::identity(3)).unwrap();
        assert_eq!(eig.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_is_sorted() {
        let a = CMatrix::real_diag(&[1.0, 4.0, 2.0]);
        let eig = herm_eig(&a).unwrap();
        assert_eq!(eig.values, vec![4.0, 2.0, 1.0]);
        residual_ok(&a, &eig);
    }

    #[test]
    fn pauli_x_closed_form() {
        let a = super::super::pauli(1);
        let eig = herm_eig(&a).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-15);
        assert!((eig.values[1] + 1.0).abs() < 1e-15);
        // columns proportional to (1,1)/√2 and (1,−1)/√2
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = eig.vector(0);
        let v1 = eig.vector(1);
        let overlap0 = (v0[0] * r + v0[1] * r).norm();
        let overlap1 = (v1[0] * r - v1[1] * r).norm();
        assert!((overlap0 - 1.0).abs() < 1e-14);
        assert!((overlap1 - 1.0).abs() < 1e-14);
        residual_ok(&a, &eig);
    }

    #[test]
    fn complex_hermitian_reconstructs() {
        let a = CMatrix::from_row_major(vec![
            C64::new(2.0, 0.0),
            C64::new(1.0, -1.0),
            C64::new(0.0, 0.5),
            C64::new(1.0, 1.0),
            C64::new(-1.0, 0.0),
            C64::new(0.25, 0.0),
            C64::new(0.0, -0.5),
            C64::new(0.25, 0.0),
            C64::new(0.5, 0.0),
        ]);
        let eig = herm_eig(&a).unwrap();
        assert!((&eig.reconstruct() - &a).frobenius_norm() < 1e-13);
        residual_ok(&a, &eig);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = CMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            herm_eig(&a),
            Err(LinalgError::NotHermitian { .. })
        ));
    }

    #[test]
    fn singular_values_of_nilpotent() {
        let n = CMatrix::from_real(2, &[0.0, 3.0, 0.0, 0.0]);
        let s = singular_values(&n);
        assert!((s[0] - 3.0).abs() < 1e-14 && s[1].abs() < 1e-14);
        let ker = null_space(&n, 1e-12);
        assert_eq!(ker.len(), 1);
        assert!(ker[0][1].norm() < 1e-14);
    }

    #[test]
    fn zero_matrix() {
        let eig = herm_eig(&CMatrix::zeros(2)).unwrap();
        assert_eq!(eig.values, vec![0.0, 0.0]);
        assert_eq!(eig.vectors, CMatrix::identity(2));
    }
}
