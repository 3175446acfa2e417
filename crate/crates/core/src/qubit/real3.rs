//! Small dense helpers for real 3×3 matrices.

pub type M3 = [[f64; 3]; 3];

pub const IDENTITY3: M3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

pub fn mul(a: &M3, b: &M3) -> M3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

pub fn transpose(a: &M3) -> M3 {
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = a[j][i];
        }
    }
    t
}

pub fn det(a: &M3) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

pub fn max_abs_diff(a: &M3, b: &M3) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            m = m.max((a[i][j] - b[i][j]).abs());
        }
    }
    m
}

pub fn diag(d: [f64; 3]) -> M3 {
    [[d[0], 0.0, 0.0], [0.0, d[1], 0.0], [0.0, 0.0, d[2]]]
}

fn column(a: &M3, j: usize) -> [f64; 3] {
    [a[0][j], a[1][j], a[2][j]]
}

fn dot(u: &[f64; 3], v: &[f64; 3]) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

/// Symmetric eigendecomposition by cyclic Jacobi. Values descending;
/// eigenvectors are the columns of the returned matrix.
pub fn sym_eig(a: &M3) -> ([f64; 3], M3) {
    let mut s = *a;
    let mut v = IDENTITY3;
    for _sweep in 0..64 {
        let off = s[0][1].powi(2) + s[0][2].powi(2) + s[1][2].powi(2);
        let scale = s.iter().flatten().map(|x| x * x).sum::<f64>();
        if off <= 1e-32 * scale || off == 0.0 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if s[p][q] == 0.0 {
                continue;
            }
            let theta = (s[q][q] - s[p][p]) / (2.0 * s[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let sn = t * c;
            for k in 0..3 {
                let (skp, skq) = (s[k][p], s[k][q]);
                s[k][p] = c * skp - sn * skq;
                s[k][q] = sn * skp + c * skq;
            }
            for k in 0..3 {
                let (spk, sqk) = (s[p][k], s[q][k]);
                s[p][k] = c * spk - sn * sqk;
                s[q][k] = sn * spk + c * sqk;
            }
            for row in v.iter_mut() {
                let (vp, vq) = (row[p], row[q]);
                row[p] = c * vp - sn * vq;
                row[q] = sn * vp + c * vq;
            }
        }
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| s[j][j].total_cmp(&s[i][i]));
    let values = order.map(|i| s[i][i]);
    let mut vectors = [[0.0; 3]; 3];
    for (new, &old) in order.iter().enumerate() {
        for r in 0..3 {
            vectors[r][new] = v[r][old];
        }
    }
    (values, vectors)
}

pub fn max_eigenvalue(a: &M3) -> f64 {
    sym_eig(a).0[0]
}

/// A = U diag(s) Vᵀ by one-sided Jacobi, s descending and non-negative.
pub fn svd(a: &M3) -> (M3, [f64; 3], M3) {
    let mut w = *a;
    let mut v = IDENTITY3;
    for _sweep in 0..64 {
        let mut rotated = false;
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let (cp, cq) = (column(&w, p), column(&w, q));
            let alpha = dot(&cp, &cp);
            let beta = dot(&cq, &cq);
            let gamma = dot(&cp, &cq);
            if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                continue;
            }
            rotated = true;
            let zeta = (beta - alpha) / (2.0 * gamma);
            let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
            let t = if zeta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (1.0 + t * t).sqrt();
            let s = c * t;
            for m in [&mut w, &mut v] {
                for row in m.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = c * x - s * y;
                    row[q] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms = [0, 1, 2].map(|j| dot(&column(&w, j), &column(&w, j)).sqrt());
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let sigma = order.map(|j| norms[j]);
    let cutoff = 1e-14 * sigma[0].max(f64::MIN_POSITIVE);

    let mut u_cols: Vec<[f64; 3]> = Vec::with_capacity(3);
    let mut v_sorted = [[0.0; 3]; 3];
    for (new, &old) in order.iter().enumerate() {
        for r in 0..3 {
            v_sorted[r][new] = v[r][old];
        }
        if sigma[new] > cutoff {
            let c = column(&w, old);
            u_cols.push(c.map(|x| x / sigma[new]));
        }
    }
    // complete U with Gram-Schmidt against the standard basis
    for e in 0..3 {
        if u_cols.len() == 3 {
            break;
        }
        let mut x = [0.0; 3];
        x[e] = 1.0;
        for u in &u_cols {
            let p = dot(&x, u);
            for k in 0..3 {
                x[k] -= p * u[k];
            }
        }
        let n = dot(&x, &x).sqrt();
        if n > 1e-6 {
            u_cols.push(x.map(|y| y / n));
        }
    }
    let mut u = [[0.0; 3]; 3];
    for (j, col) in u_cols.iter().enumerate() {
        for r in 0..3 {
            u[r][j] = col[r];
        }
    }
    (u, sigma, v_sorted)
}
