use crate::linalg::{herm_eig, vec_inner, CMatrix, C64};
use crate::superop::Superoperator;

use super::{traceless_part, GklsError, GklsGenerator, NoiseTerm};

/// Rates with magnitude at or below this are dropped from the diagonal form.
const RATE_CUTOFF: f64 = 1e-12;

/// A generator written with traceless, HS-orthonormal noise operators.
/// Rates carry their sign; a negative rate means the dissipative part is not
/// completely positive.
#[derive(Debug, Clone)]
pub struct DiagonalForm {
    pub hamiltonian: CMatrix,
    pub terms: Vec<(f64, CMatrix)>,
    /// Some rate is below −`tol`.
    pub not_cp: bool,
    pub min_rate: f64,
}

impl DiagonalForm {
    /// {√γ F} over the non-negative part of the spectrum.
    pub fn kraus_list(&self) -> Vec<CMatrix> {
        self.terms
            .iter()
            .filter(|(g, _)| *g > 0.0)
            .map(|(g, f)| f.scale_real(g.sqrt()))
            .collect()
    }

    /// Rebuilds the superoperator from the signed terms.
    pub fn compile(&self) -> Superoperator {
        let d = self.hamiltonian.dim();
        let h = &self.hamiltonian;
        let mut l = (&Superoperator::left_mul(h) - &Superoperator::right_mul(h))
            .into_matrix()
            .scale(C64::new(0.0, -1.0));
        for (g, f) in &self.terms {
            let fdf = f.adjoint().matmul(f);
            let anti = &Superoperator::left_mul(&fdf) + &Superoperator::right_mul(&fdf);
            let part = &Superoperator::conjugation(f) - &anti.scale(0.5);
            l += &part.into_matrix().scale_real(*g);
        }
        Superoperator::new(d, l).expect("shape")
    }
}

/// HS-orthonormal traceless basis of d×d matrices (generalized Gell-Mann
/// matrices scaled to unit HS norm): symmetric and antisymmetric
/// off-diagonal pairs followed by the diagonal ones.
pub fn hs_traceless_basis(d: usize) -> Vec<CMatrix> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in j + 1..d {
            let mut s = CMatrix::zeros(d);
            s[(j, k)] = C64::new(r, 0.0);
            s[(k, j)] = C64::new(r, 0.0);
            basis.push(s);
            let mut a = CMatrix::zeros(d);
            a[(j, k)] = C64::new(0.0, -r);
            a[(k, j)] = C64::new(0.0, r);
            basis.push(a);
        }
    }
    for m in 1..d {
        let norm = ((m * (m + 1)) as f64).sqrt();
        let mut diag = vec![0.0; d];
        diag[..m].iter_mut().for_each(|x| *x = 1.0 / norm);
        diag[m] = -(m as f64) / norm;
        basis.push(CMatrix::real_diag(&diag));
    }
    basis
}

/// Writes a Hermiticity-preserving, trace-annihilating 𝓛 as
/// −i[H, ·] + Σ γ_k (F_k · F_k† − ½{F_k†F_k, ·}) with traceless orthonormal F_k.
///
/// The coefficient matrix c_ij = ⟨F_i| R |F_j⟩ of the realigned superoperator
/// in the basis F_0 = 1/√d, F_1, …, F_{d²−1} splits into the block a = c_{ij≥1}
/// (the Kossakowski matrix) and the column c_{i0}, which defines
/// F = (1/√d) Σ c_{i0} F_i + c_00/(2d) and hence H = i(F − F†)/2. Diagonalizing
/// a gives the rates and the new operators.
pub fn kossakowski_diagonalize(l: &Superoperator, tol: f64) -> Result<DiagonalForm, GklsError> {
    let d = l.dim();
    let scale = l.matrix().frobenius_norm().max(1.0);
    if !l.is_hermiticity_preserving(1e-10) || !l.is_trace_annihilating(1e-10 * scale) {
        return Err(GklsError::NotGenerator);
    }
    let mut basis = vec![CMatrix::identity(d).scale_real(1.0 / (d as f64).sqrt())];
    basis.extend(hs_traceless_basis(d));
    let vecs: Vec<Vec<C64>> = basis.iter().map(CMatrix::vec).collect();
    let r = l.realign();
    let n = d * d;
    let c = CMatrix::from_fn(n, |i, j| vec_inner(&vecs[i], &r.matvec(&vecs[j])));

    let inv_sqrt_d = 1.0 / (d as f64).sqrt();
    let mut f = CMatrix::identity(d).scale(c[(0, 0)] / (2.0 * d as f64));
    for i in 1..n {
        f += &basis[i].scale(c[(i, 0)] * inv_sqrt_d);
    }
    let h = (&f - &f.adjoint()).scale(C64::new(0.0, 0.5));
    let hamiltonian = traceless_part(&h.hermitian_part());

    let a = CMatrix::from_fn(n - 1, |i, j| c[(i + 1, j + 1)]);
    let eig = herm_eig(&a.hermitian_part()).expect("Hermitian part");
    let mut terms = Vec::new();
    for (k, &gamma) in eig.values.iter().enumerate() {
        if gamma.abs() <= RATE_CUTOFF {
            continue;
        }
        let mut op = CMatrix::zeros(d);
        for i in 0..n - 1 {
            op += &basis[i + 1].scale(eig.vectors[(i, k)]);
        }
        terms.push((gamma, phase_normalized(op)));
    }
    let min_rate = eig.values.last().copied().unwrap_or(0.0);
    Ok(DiagonalForm {
        hamiltonian,
        terms,
        not_cp: min_rate < -tol,
        min_rate,
    })
}

/// Fixes the free phase of a noise operator so its largest entry is real and
/// positive; F·A·F† does not depend on that phase.
fn phase_normalized(op: CMatrix) -> CMatrix {
    let lead = op
        .as_slice()
        .iter()
        .copied()
        .fold(C64::new(0.0, 0.0), |best, z| {
            if z.norm() > best.norm() + 1e-12 {
                z
            } else {
                best
            }
        });
    if lead.norm() == 0.0 {
        return op;
    }
    op.scale(lead.conj() / lead.norm())
}

/// Equivalent generator with traceless, HS-orthonormal noise operators and
/// non-negative rates. Rates are eigenvalues of a PSD matrix for any valid
/// input; round-off negatives are dropped.
pub fn diagonal_form(gen: &GklsGenerator) -> GklsGenerator {
    let form = kossakowski_diagonalize(&gen.compile(), 1e-9)
        .expect("compiled generators are trace-annihilating and Hermiticity-preserving");
    let noise = form
        .terms
        .into_iter()
        .filter(|(g, _)| *g > 0.0)
        .map(|(g, f)| NoiseTerm::new(g, f))
        .collect();
    GklsGenerator::new(form.hamiltonian, noise).expect("diagonal form is a valid generator")
}
