//! Seeded random matrices: Haar unitaries, Ginibre states, Hermitian
//! operators and the like. Every sampler takes an explicit RNG so suites are
//! reproducible from a root seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{vec_inner, vec_norm, CMatrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Per-index child seed, so that item `index` of a suite is reproducible on
/// its own regardless of evaluation order.
pub fn derive_seed(root: u64, index: u64) -> u64 {
    // splitmix64 of root mixed with index
    let mut z = root
        ^ index
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, |_, _| complex_normal(rng))
}

/// Haar-distributed unitary: Gram–Schmidt on the columns of a Ginibre matrix
/// (the implied R factor has positive diagonal, which is what makes the
/// result Haar).
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    loop {
        let g = ginibre(rng, dim);
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
        let mut degenerate = false;
        for j in 0..dim {
            let mut v = g.column(j);
            for _ in 0..2 {
                for q in &cols {
                    let proj = vec_inner(q, &v);
                    for (vi, qi) in v.iter_mut().zip(q) {
                        *vi -= proj * qi;
                    }
                }
            }
            let norm = vec_norm(&v);
            if norm < 1e-10 {
                degenerate = true;
                break;
            }
            cols.push(v.iter().map(|z| z / norm).collect());
        }
        if !degenerate {
            return CMatrix::from_fn(dim, |i, j| cols[j][i]);
        }
    }
}

/// Uniformly distributed unit vector in ℂ^d.
pub fn random_pure_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| complex_normal(rng)).collect();
        let n = vec_norm(&v);
        if n > 1e-12 {
            return v.iter().map(|z| z / n).collect();
        }
    }
}

pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let v = random_pure_vector(rng, dim);
    CMatrix::outer(&v, &v)
}

/// Hilbert–Schmidt random mixed state G·G†/tr(G·G†).
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let g = ginibre(rng, dim);
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    m.scale_real(1.0 / tr).hermitian_part()
}

/// Hermitian matrix with i.i.d. Gaussian entries (GUE-like), scaled by `scale`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: f64) -> CMatrix {
    ginibre(rng, dim).hermitian_part().scale_real(scale)
}

pub fn random_traceless_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: f64) -> CMatrix {
    let h = random_hermitian(rng, dim, scale);
    let shift = h.trace() / dim as f64;
    &h - &CMatrix::identity(dim).scale(shift)
}

/// Random normal operator U·diag(z)·U† with complex Gaussian eigenvalues.
pub fn random_normal<R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: f64) -> CMatrix {
    let u = haar_unitary(rng, dim);
    let z: Vec<C64> = (0..dim).map(|_| complex_normal(rng) * scale).collect();
    u.matmul(&CMatrix::diag(&z)).matmul(&u.adjoint())
}

/// Random point of the probability simplex (flat Dirichlet).
pub fn random_probability<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n)
        .map(|_| -rng.random::<f64>().max(1e-300).ln())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}

/// Random point of the unit sphere in ℝ³.
pub fn random_unit_vector3<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-12 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = rng_from_seed(3);
        for d in [2, 3, 5] {
            assert!(haar_unitary(&mut rng, d).unitarity_residual() < 1e-13);
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = random_density_matrix(&mut rng_from_seed(11), 3);
        let b = random_density_matrix(&mut rng_from_seed(11), 3);
        assert_eq!(a, b);
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
    }

    #[test]
    fn random_state_has_unit_trace() {
        let rho = random_density_matrix(&mut rng_from_seed(5), 4);
        assert!((rho.trace().re - 1.0).abs() < 1e-14);
        assert!(rho.is_hermitian(1e-15));
    }
}
