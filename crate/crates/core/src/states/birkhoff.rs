use serde::{Deserialize, Serialize};

use super::{BistochasticMatrix, StateError};

/// Entries at or below this are outside the support.
const SUPPORT_TOL: f64 = 1e-12;

/// One permutation matrix in a Birkhoff expansion. `perm[i]` is the column
/// holding the 1 in row `i` (0-based).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BirkhoffTerm {
    pub weight: f64,
    pub perm: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BirkhoffDecomposition {
    pub dim: usize,
    pub terms: Vec<BirkhoffTerm>,
}

impl BirkhoffDecomposition {
    /// Σ w·P(perm), row-major.
    pub fn reconstruct(&self) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d * d];
        for term in &self.terms {
            for (i, &j) in term.perm.iter().enumerate() {
                out[i * d + j] += term.weight;
            }
        }
        out
    }

    pub fn total_weight(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum()
    }
}

/// Greedy Birkhoff–von Neumann expansion.
///
/// Each round picks the perfect matching inside the current support with the
/// largest bottleneck entry, removes that multiple of the permutation, and
/// drops entries that fall below 1e-12. Every round leaves the residual on a strictly smaller face of
/// the Birkhoff polytope, which bounds the number of terms by d² − 2d + 2.
pub fn birkhoff_decompose(b: &BistochasticMatrix) -> Result<BirkhoffDecomposition, StateError> {
    let d = b.dim();
    let mut residual = b.entries().to_vec();
    let mut terms = Vec::new();
    loop {
        residual.iter_mut().for_each(|x| {
            if *x <= SUPPORT_TOL {
                *x = 0.0;
            }
        });
        if residual.iter().all(|&x| x == 0.0) {
            break;
        }
        let Some(perm) = bottleneck_matching(d, &residual) else {
            break;
        };
        let weight = perm
            .iter()
            .enumerate()
            .map(|(i, &j)| residual[i * d + j])
            .fold(f64::INFINITY, f64::min);
        for (i, &j) in perm.iter().enumerate() {
            let cell = &mut residual[i * d + j];
            *cell = if *cell == weight { 0.0 } else { *cell - weight };
        }
        terms.push(BirkhoffTerm { weight, perm });
        if terms.len() > d * d {
            return Err(StateError::NotBistochastic(
                "Birkhoff expansion did not terminate".into(),
            ));
        }
    }
    let total: f64 = terms.iter().map(|t| t.weight).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(StateError::NotBistochastic(format!(
            "support admits no perfect matching; expanded weight {total}"
        )));
    }
    terms.iter_mut().for_each(|t| t.weight /= total);
    Ok(BirkhoffDecomposition { dim: d, terms })
}

/// Perfect matching on the positive entries whose smallest matched entry is
/// as large as possible, found by bisection over the distinct entry values.
fn bottleneck_matching(d: usize, m: &[f64]) -> Option<Vec<usize>> {
    let mut levels: Vec<f64> = m.iter().copied().filter(|&x| x > 0.0).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let at = |k: usize| perfect_matching(d, |i, j| m[i * d + j] >= levels[k]);
    // at(0) uses the whole support; find the largest feasible level
    let mut best = at(0)?;
    let (mut lo, mut hi) = (0, levels.len());
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        match at(mid) {
            Some(p) => {
                best = p;
                lo = mid;
            }
            None => hi = mid,
        }
    }
    Some(best)
}

/// Kuhn's augmenting-path algorithm on the bipartite graph rows → columns.
/// Returns the column matched to each row, or `None` if no perfect matching
/// exists.
fn perfect_matching(n: usize, edge: impl Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    let mut col_owner: Vec<Option<usize>> = vec![None; n];

    fn augment(
        row: usize,
        n: usize,
        edge: &dyn Fn(usize, usize) -> bool,
        seen: &mut [bool],
        col_owner: &mut [Option<usize>],
    ) -> bool {
        for col in 0..n {
            if !edge(row, col) || seen[col] {
                continue;
            }
            seen[col] = true;
            let free = match col_owner[col] {
                None => true,
                Some(other) => augment(other, n, edge, seen, col_owner),
            };
            if free {
                col_owner[col] = Some(row);
                return true;
            }
        }
        false
    }

    for row in 0..n {
        let mut seen = vec![false; n];
        if !augment(row, n, &edge, &mut seen, &mut col_owner) {
            return None;
        }
    }
    let mut perm = vec![0; n];
    for (col, owner) in col_owner.iter().enumerate() {
        perm[owner.expect("perfect matching covers every column")] = col;
    }
    Some(perm)
}
