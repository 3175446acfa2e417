//! Spectral entropies of density operators: von Neumann, Tsallis, Rényi,
//! the Schatten defect `N_p = 1 − ‖ρ‖_p`, and the generic family
//! `h(tr g₁(ρ), …, tr gₙ(ρ))` built from a monotone outer function and
//! strictly convex or concave inner functions.
//!
//! Every function here reads the clamped, renormalized ordered spectrum
//! cached on [`DensityOperator`], so floating-point negatives never reach a
//! logarithm.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::linalg::power_mean_norm;
use crate::states::DensityOperator;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntropyError {
    #[error("entropy index q must be positive (got {0})")]
    InvalidQ(f64),
    #[error("Schatten exponent p must satisfy p > 1 or p = inf (got {0})")]
    InvalidP(f64),
    #[error("inconsistent generic entropy: {0}")]
    InconsistentSpec(String),
    #[error("cannot parse entropy '{0}': expected vn, tsallis:q, renyi:q or np:p")]
    Parse(String),
}

/// −Σ p ln p with 0·ln 0 = 0.
pub fn von_neumann(rho: &DensityOperator) -> f64 {
    shannon(rho.spectrum().as_slice())
}

pub fn tsallis(rho: &DensityOperator, q: f64) -> Result<f64, EntropyError> {
    tsallis_of(rho.spectrum().as_slice(), q)
}

pub fn renyi(rho: &DensityOperator, q: f64) -> Result<f64, EntropyError> {
    renyi_of(rho.spectrum().as_slice(), q)
}

/// 1 − ‖ρ‖_p; `p = ∞` gives 1 − λ_max.
pub fn schatten_defect(rho: &DensityOperator, p: f64) -> Result<f64, EntropyError> {
    schatten_defect_of(rho.spectrum().as_slice(), p)
}

pub fn generic_entropy(rho: &DensityOperator, spec: &GenericEntropy) -> f64 {
    spec.evaluate(rho.spectrum().as_slice())
}

fn shannon(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.ln())
        .sum::<f64>()
}

fn power_sum(p: &[f64], q: f64) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| x.powf(q)).sum()
}

fn check_q(q: f64) -> Result<(), EntropyError> {
    if q.is_finite() && q > 0.0 {
        Ok(())
    } else {
        Err(EntropyError::InvalidQ(q))
    }
}

fn tsallis_of(p: &[f64], q: f64) -> Result<f64, EntropyError> {
    check_q(q)?;
    if q == 1.0 {
        return Ok(shannon(p));
    }
    Ok((power_sum(p, q) - 1.0) / (1.0 - q))
}

fn renyi_of(p: &[f64], q: f64) -> Result<f64, EntropyError> {
    check_q(q)?;
    if q == 1.0 {
        return Ok(shannon(p));
    }
    Ok(power_sum(p, q).ln() / (1.0 - q))
}

fn schatten_defect_of(p: &[f64], exponent: f64) -> Result<f64, EntropyError> {
    if exponent.is_nan() || exponent <= 1.0 {
        return Err(EntropyError::InvalidP(exponent));
    }
    Ok(1.0 - power_mean_norm(p, exponent))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    StrictlyIncreasing,
    StrictlyDecreasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curvature {
    StrictlyConvex,
    StrictlyConcave,
}

type Outer = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type Inner = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One scalar function g on [0, 1] with its declared curvature.
#[derive(Clone)]
pub struct InnerFunction {
    pub curvature: Curvature,
    f: Inner,
}

impl InnerFunction {
    pub fn new(curvature: Curvature, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            curvature,
            f: Arc::new(f),
        }
    }

    /// tr g(ρ) = Σ_k g(p_k)
    pub fn trace(&self, p: &[f64]) -> f64 {
        p.iter().map(|&x| (self.f)(x)).sum()
    }
}

const GRID_POINTS: usize = 201;

/// h(tr g₁(ρ), …, tr gₙ(ρ)).
///
/// A decreasing outer function must be paired with convex inner functions
/// and an increasing one with concave inner functions; either combination
/// is Schur concave.
#[derive(Clone)]
pub struct GenericEntropy {
    pub name: String,
    pub direction: Monotonicity,
    outer: Outer,
    inner: Vec<InnerFunction>,
}

impl fmt::Debug for GenericEntropy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GenericEntropy")
            .field("name", &self.name)
            .field("direction", &self.direction)
            .field(
                "inner",
                &self.inner.iter().map(|g| g.curvature).collect::<Vec<_>>(),
            )
            .finish()
    }
}

impl GenericEntropy {
    /// Validates the declared directions against each other, checks that
    /// every inner function is finite on a grid of [0, 1], and spot-checks
    /// the declared curvature with midpoint inequalities on that grid.
    pub fn new(
        name: impl Into<String>,
        direction: Monotonicity,
        outer: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        inner: Vec<InnerFunction>,
    ) -> Result<Self, EntropyError> {
        let name = name.into();
        if inner.is_empty() {
            return Err(EntropyError::InconsistentSpec(format!(
                "{name}: no inner functions"
            )));
        }
        let wanted = match direction {
            Monotonicity::StrictlyDecreasing => Curvature::StrictlyConvex,
            Monotonicity::StrictlyIncreasing => Curvature::StrictlyConcave,
        };
        for (k, g) in inner.iter().enumerate() {
            if g.curvature != wanted {
                return Err(EntropyError::InconsistentSpec(format!(
                    "{name}: {direction:?} outer function needs {wanted:?} inner functions, g{k} is {:?}",
                    g.curvature
                )));
            }
            check_inner(&name, k, g)?;
        }
        Ok(Self {
            name,
            direction,
            outer: Arc::new(outer),
            inner,
        })
    }

    pub fn evaluate(&self, p: &[f64]) -> f64 {
        let args: Vec<f64> = self.inner.iter().map(|g| g.trace(p)).collect();
        (self.outer)(&args)
    }
}

fn check_inner(name: &str, k: usize, g: &InnerFunction) -> Result<(), EntropyError> {
    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|i| i as f64 / (GRID_POINTS - 1) as f64)
        .collect();
    let values: Vec<f64> = grid.iter().map(|&x| (g.f)(x)).collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(EntropyError::InconsistentSpec(format!(
            "{name}: g{k} is not finite at {}",
            grid[i]
        )));
    }
    let sign = match g.curvature {
        Curvature::StrictlyConvex => 1.0,
        Curvature::StrictlyConcave => -1.0,
    };
    for i in 0..GRID_POINTS - 2 {
        let (a, m, b) = (values[i], values[i + 1], values[i + 2]);
        let gap = sign * ((a + b) / 2.0 - m);
        let scale = 1e-12 * (1.0 + a.abs() + b.abs());
        if gap < -scale {
            return Err(EntropyError::InconsistentSpec(format!(
                "{name}: g{k} violates declared {:?} near {}",
                g.curvature,
                grid[i + 1]
            )));
        }
    }
    Ok(())
}

/// The entropies that can be requested by name.
#[derive(Debug, Clone)]
pub enum EntropySpec {
    VonNeumann,
    Tsallis(f64),
    Renyi(f64),
    SchattenDefect(f64),
    Generic(GenericEntropy),
}

impl EntropySpec {
    pub fn validate(&self) -> Result<(), EntropyError> {
        match *self {
            EntropySpec::Tsallis(q) | EntropySpec::Renyi(q) => check_q(q),
            EntropySpec::SchattenDefect(p) if p.is_nan() || p <= 1.0 => {
                Err(EntropyError::InvalidP(p))
            }
            _ => Ok(()),
        }
    }

    pub fn evaluate(&self, rho: &DensityOperator) -> Result<f64, EntropyError> {
        self.evaluate_spectrum(rho.spectrum().as_slice())
    }

    /// Evaluates on an ordered probability vector.
    pub fn evaluate_spectrum(&self, p: &[f64]) -> Result<f64, EntropyError> {
        match self {
            EntropySpec::VonNeumann => Ok(shannon(p)),
            EntropySpec::Tsallis(q) => tsallis_of(p, *q),
            EntropySpec::Renyi(q) => renyi_of(p, *q),
            EntropySpec::SchattenDefect(exp) => schatten_defect_of(p, *exp),
            EntropySpec::Generic(g) => Ok(g.evaluate(p)),
        }
    }

    /// The label used in CSV headers and reports: `vn`, `tsallis:2`,
    /// `renyi:0.5`, `np:inf`, or the generic entropy's name.
    pub fn label(&self) -> String {
        match self {
            EntropySpec::VonNeumann => "vn".into(),
            EntropySpec::Tsallis(q) => format!("tsallis:{q}"),
            EntropySpec::Renyi(q) => format!("renyi:{q}"),
            EntropySpec::SchattenDefect(p) if p.is_infinite() => "np:inf".into(),
            EntropySpec::SchattenDefect(p) => format!("np:{p}"),
            EntropySpec::Generic(g) => g.name.clone(),
        }
    }

    /// vn, tsallis q ∈ {0.5, 1, 2, 3}, renyi q ∈ {0.5, 1, 2, 3},
    /// np p ∈ {1.5, 2, 4, ∞}.
    pub fn standard_set() -> Vec<EntropySpec> {
        let mut set = vec![EntropySpec::VonNeumann];
        for q in [0.5, 1.0, 2.0, 3.0] {
            set.push(EntropySpec::Tsallis(q));
        }
        for q in [0.5, 1.0, 2.0, 3.0] {
            set.push(EntropySpec::Renyi(q));
        }
        for p in [1.5, 2.0, 4.0, f64::INFINITY] {
            set.push(EntropySpec::SchattenDefect(p));
        }
        set
    }

    /// Parses a comma-separated list such as `vn,tsallis:2,np:inf`.
    pub fn parse_list(s: &str) -> Result<Vec<EntropySpec>, EntropyError> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl fmt::Display for EntropySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for EntropySpec {
    type Err = EntropyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || EntropyError::Parse(s.to_string());
        let lower = s.trim().to_ascii_lowercase();
        if lower == "vn" {
            return Ok(EntropySpec::VonNeumann);
        }
        let (kind, arg) = lower.split_once(':').ok_or_else(bad)?;
        let value: f64 = match arg {
            "inf" | "infinity" => f64::INFINITY,
            _ => arg.parse().map_err(|_| bad())?,
        };
        let spec = match kind {
            "tsallis" => EntropySpec::Tsallis(value),
            "renyi" => EntropySpec::Renyi(value),
            "np" => EntropySpec::SchattenDefect(value),
            _ => return Err(bad()),
        };
        spec.validate()?;
        Ok(spec)
    }
}
