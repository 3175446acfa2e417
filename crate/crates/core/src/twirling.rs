//! Semigroups built from unitary conjugations: Poisson twirling, random
//! unitary maps and their generators, projection semigroups, and maps of
//! signed atomic measures over unitaries.

use thiserror::Error;

use crate::gkls::{GklsError, GklsGenerator, NoiseTerm};
use crate::linalg::CMatrix;
use crate::states::DensityOperator;
use crate::superop::{check_positive_map, PositivityMethod, Superoperator, POSITIVITY_SAMPLES};

const UNITARY_TOL: f64 = 1e-11;
const WEIGHT_SUM_TOL: f64 = 1e-10;
/// Truncate the Poisson series once the remaining mass is below this.
const POISSON_TAIL: f64 = 1e-14;
const POISSON_MAX_TERMS: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TwirlError {
    #[error("operator is not unitary (residual {0:.3e})")]
    NotUnitary(f64),
    #[error("weights are not a probability vector: {0}")]
    WeightsNotProbability(String),
    #[error("weights sum to {0}, expected 1")]
    WeightsNotNormalized(f64),
    #[error("noise operators are not Hilbert-Schmidt orthonormal")]
    NotOrthonormal,
    #[error("noise operator {0} is not selfadjoint")]
    NotSelfadjoint(usize),
    #[error("noise operator {0} is not traceless")]
    NotTraceless(usize),
    #[error("map is not idempotent (‖P² − P‖ = {0:.3e})")]
    NotIdempotent(f64),
    #[error("map is not completely positive and trace-preserving")]
    NotCptp,
    #[error("projectors must be orthogonal and sum to the identity")]
    NotProjectorFamily,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error(transparent)]
    Generator(#[from] GklsError),
}

fn check_unitary(u: &CMatrix) -> Result<(), TwirlError> {
    let residual = u.unitarity_residual();
    if residual > UNITARY_TOL || !u.is_finite() {
        return Err(TwirlError::NotUnitary(residual));
    }
    Ok(())
}

fn check_same_dim(atoms: &[(f64, CMatrix)]) -> Result<usize, TwirlError> {
    let d = atoms
        .first()
        .map(|(_, u)| u.dim())
        .ok_or_else(|| TwirlError::InvalidParameter("no atoms".into()))?;
    for (_, u) in atoms {
        if u.dim() != d {
            return Err(TwirlError::DimensionMismatch(d, u.dim()));
        }
        check_unitary(u)?;
    }
    Ok(d)
}

/// Σ p_j U_j (·) U_j† with p a probability vector.
#[derive(Debug, Clone)]
pub struct RandomUnitarySpec {
    terms: Vec<(f64, CMatrix)>,
}

impl RandomUnitarySpec {
    pub fn new(terms: Vec<(f64, CMatrix)>) -> Result<Self, TwirlError> {
        check_same_dim(&terms)?;
        if let Some((p, _)) = terms.iter().find(|(p, _)| !(*p > 0.0) || !p.is_finite()) {
            return Err(TwirlError::WeightsNotProbability(format!(
                "weight {p} is not positive"
            )));
        }
        let total: f64 = terms.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(TwirlError::WeightsNotProbability(format!(
                "weights sum to {total}"
            )));
        }
        Ok(Self { terms })
    }

    pub fn dim(&self) -> usize {
        self.terms[0].1.dim()
    }

    pub fn terms(&self) -> &[(f64, CMatrix)] {
        &self.terms
    }
}

pub fn random_unitary_map(spec: &RandomUnitarySpec) -> Superoperator {
    conjugation_mixture(spec.dim(), &spec.terms)
}

fn conjugation_mixture(d: usize, atoms: &[(f64, CMatrix)]) -> Superoperator {
    atoms.iter().fold(Superoperator::zero(d), |acc, (w, u)| {
        &acc + &Superoperator::conjugation(u).scale(*w)
    })
}

/// Generator λ(U·U† − id).
pub fn poisson_generator(lambda: f64, u: &CMatrix) -> Result<Superoperator, TwirlError> {
    check_unitary(u)?;
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(TwirlError::InvalidParameter(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let d = u.dim();
    Ok((&Superoperator::conjugation(u) - &Superoperator::identity(d)).scale(lambda))
}

/// e^{−λt} Σ_n (λt)ⁿ/n! Uⁿ(·)U†ⁿ, summed until the Poisson tail is below
/// 1e-14 (at most 10⁴ terms).
pub fn poisson_twirl(lambda: f64, u: &CMatrix, t: f64) -> Result<Superoperator, TwirlError> {
    poisson_generator(lambda, u)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(TwirlError::InvalidParameter(format!(
            "t must be non-negative, got {t}"
        )));
    }
    let d = u.dim();
    let mean = lambda * t;
    if mean == 0.0 {
        return Ok(Superoperator::identity(d));
    }
    let step = Superoperator::conjugation(u);
    let mut power = Superoperator::identity(d);
    let mut acc = Superoperator::zero(d);
    let ln_mean = mean.ln();
    let mut ln_p = -mean;
    for n in 0..=POISSON_MAX_TERMS {
        if n > 0 {
            ln_p += ln_mean - (n as f64).ln();
            power = step.compose(&power);
        }
        let p = ln_p.exp();
        acc = &acc + &power.scale(p);
        // for n + 1 > mean the ratios p_{k+1}/p_k ≤ mean/(n+2) bound the tail geometrically
        let next = p * mean / (n + 1) as f64;
        let ratio = mean / (n + 2) as f64;
        if ratio < 1.0 && next / (1.0 - ratio) < POISSON_TAIL {
            break;
        }
    }
    Ok(acc)
}

/// −i[H,·] + Σ γ_k (L_k·L_k − ½{L_k², ·}) + γ₀(𝓡 − id) with selfadjoint,
/// traceless, orthonormal L_k.
pub fn twirl_generator(
    gamma0: f64,
    r: &RandomUnitarySpec,
    diag: &[(f64, CMatrix)],
    h: &CMatrix,
) -> Result<Superoperator, TwirlError> {
    let d = r.dim();
    if !(gamma0 >= 0.0) || !gamma0.is_finite() {
        return Err(TwirlError::InvalidParameter(format!(
            "gamma0 must be non-negative, got {gamma0}"
        )));
    }
    if h.dim() != d {
        return Err(TwirlError::DimensionMismatch(d, h.dim()));
    }
    for (k, (_, op)) in diag.iter().enumerate() {
        if op.dim() != d {
            return Err(TwirlError::DimensionMismatch(d, op.dim()));
        }
        if !op.is_hermitian(1e-10) {
            return Err(TwirlError::NotSelfadjoint(k));
        }
        if op.trace().norm() > 1e-10 {
            return Err(TwirlError::NotTraceless(k));
        }
    }
    for (j, (_, a)) in diag.iter().enumerate() {
        for (k, (_, b)) in diag.iter().enumerate() {
            let expected = if j == k { 1.0 } else { 0.0 };
            if (a.hs_inner(b).re - expected).abs() > 1e-10 || a.hs_inner(b).im.abs() > 1e-10 {
                return Err(TwirlError::NotOrthonormal);
            }
        }
    }
    let noise = diag
        .iter()
        .map(|(g, op)| NoiseTerm::new(*g, op.clone()))
        .collect();
    let gen = GklsGenerator::new(h.clone(), noise)?;
    let jump = (&random_unitary_map(r) - &Superoperator::identity(d)).scale(gamma0);
    Ok(&gen.compile() + &jump)
}

/// A ↦ Σ π_k A π_k for orthogonal projectors summing to 1.
pub fn luders_projection(projectors: &[CMatrix]) -> Result<Superoperator, TwirlError> {
    let d = projectors
        .first()
        .map(CMatrix::dim)
        .ok_or(TwirlError::NotProjectorFamily)?;
    let mut sum = CMatrix::zeros(d);
    for p in projectors {
        if p.dim() != d {
            return Err(TwirlError::DimensionMismatch(d, p.dim()));
        }
        if !p.is_hermitian(1e-10) || (&p.matmul(p) - p).max_abs() > 1e-10 {
            return Err(TwirlError::NotProjectorFamily);
        }
        sum += p;
    }
    if (&sum - &CMatrix::identity(d)).max_abs() > 1e-10 {
        return Err(TwirlError::NotProjectorFamily);
    }
    Ok(Superoperator::from_kraus(projectors))
}

/// A ↦ tr(A) ρ₀.
pub fn replacement_projection(rho0: &DensityOperator) -> Superoperator {
    let rho = rho0.matrix().clone();
    Superoperator::from_map(rho0.dim(), move |a| rho.scale(a.trace()))
}

fn check_cptp_projection(p: &Superoperator) -> Result<(), TwirlError> {
    let defect = p.compose(p).distance(p);
    if defect > 1e-10 {
        return Err(TwirlError::NotIdempotent(defect));
    }
    if !p.is_trace_preserving(1e-10) || !p.is_completely_positive(1e-10) {
        return Err(TwirlError::NotCptp);
    }
    Ok(())
}

/// Generator −γ(id − 𝓟).
pub fn projection_generator(p: &Superoperator, gamma: f64) -> Result<Superoperator, TwirlError> {
    check_cptp_projection(p)?;
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(TwirlError::InvalidParameter(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    Ok((&Superoperator::identity(p.dim()) - p).scale(-gamma))
}

/// 𝓟 + e^{−γt}(id − 𝓟).
pub fn projection_semigroup(
    p: &Superoperator,
    gamma: f64,
    t: f64,
) -> Result<Superoperator, TwirlError> {
    projection_generator(p, gamma)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(TwirlError::InvalidParameter(format!(
            "t must be non-negative, got {t}"
        )));
    }
    let complement = &Superoperator::identity(p.dim()) - p;
    Ok(p + &complement.scale((-gamma * t).exp()))
}

/// Finitely many unitaries with real weights summing to one. Negative
/// weights are allowed.
#[derive(Debug, Clone)]
pub struct AtomicMeasure {
    atoms: Vec<(f64, CMatrix)>,
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<(f64, CMatrix)>) -> Result<Self, TwirlError> {
        check_same_dim(&atoms)?;
        let total: f64 = atoms.iter().map(|(w, _)| w).sum();
        if !total.is_finite() || (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(TwirlError::WeightsNotNormalized(total));
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[(f64, CMatrix)] {
        &self.atoms
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].1.dim()
    }

    pub fn is_probability(&self) -> bool {
        self.atoms.iter().all(|(w, _)| *w >= 0.0)
    }
}

#[derive(Debug, Clone)]
pub struct TwirlMap {
    /// Σ w U(·)U†; always unital and trace-preserving.
    pub map: Superoperator,
    pub positive: bool,
    pub positivity_method: PositivityMethod,
}

/// Positivity is exact when the map is CP or d = 2; otherwise it is checked
/// on 500 sampled pure states.
pub fn generalized_twirl_map(sigma: &AtomicMeasure) -> TwirlMap {
    let map = conjugation_mixture(sigma.dim(), &sigma.atoms);
    let check = check_positive_map(&map, POSITIVITY_SAMPLES);
    TwirlMap {
        map,
        positive: check.positive,
        positivity_method: check.method,
    }
}
