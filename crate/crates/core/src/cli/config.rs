//! Generator configuration files.
//!
//! Exactly one of three sources must be present:
//!
//! ```json
//! {"dimension": 2,
//!  "hamiltonian": [[{"re": 0.5, "im": 0}, 0], [0, -0.5]],
//!  "noise": [{"rate": 1.0, "matrix": [[0, 0], [1, 0]]}]}
//!
//! {"qubit_params": {"h": [0, 0, 0], "K": [[1, 0, 0], [0, 1, 0], [0, 0, -0.5]]}}
//!
//! {"named_example": "example4", "params": {"gamma1": 2, "gamma2": 1}}
//! ```
//!
//! Matrix entries are `{"re", "im"}` objects or bare reals.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::gkls::{GklsGenerator, NoiseTerm};
use crate::linalg::{pauli, CMatrix, C64};
use crate::qubit::{build_qubit_generator, QubitGeneratorParams};
use crate::states::DensityOperator;
use crate::superop::Superoperator;
use crate::twirling::{
    luders_projection, poisson_generator, projection_generator, replacement_projection,
};

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex { re: f64, im: f64 },
}

impl Entry {
    fn value(self) -> C64 {
        match self {
            Entry::Real(x) => C64::new(x, 0.0),
            Entry::Complex { re, im } => C64::new(re, im),
        }
    }
}

pub type MatrixJson = Vec<Vec<Entry>>;

pub fn matrix_from_json(rows: &MatrixJson, what: &str) -> Result<CMatrix, CliError> {
    let rows: Vec<Vec<C64>> = rows
        .iter()
        .map(|r| r.iter().map(|e| e.value()).collect())
        .collect();
    let m = CMatrix::from_rows(&rows).map_err(|e| CliError::Config(format!("{what}: {e}")))?;
    if !m.is_finite() {
        return Err(CliError::Config(format!("{what}: non-finite entry")));
    }
    Ok(m)
}

pub fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    m.rows()
        .iter()
        .map(|r| {
            r.iter()
                .map(|z| Entry::Complex { re: z.re, im: z.im })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseJson {
    pub rate: f64,
    pub matrix: MatrixJson,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitParamsJson {
    pub h: [f64; 3],
    #[serde(rename = "K")]
    pub k: [[f64; 3]; 3],
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub dimension: Option<usize>,
    pub hamiltonian: Option<MatrixJson>,
    pub noise: Option<Vec<NoiseJson>>,
    pub qubit_params: Option<QubitParamsJson>,
    pub named_example: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
}

/// A generator ready for the commands: always a superoperator, plus its GKLS
/// form when the source provides one, plus qubit parameters when given.
#[derive(Debug, Clone)]
pub struct LoadedGenerator {
    pub l: Superoperator,
    pub gkls: Option<GklsGenerator>,
    pub qubit_params: Option<QubitGeneratorParams>,
}

impl LoadedGenerator {
    fn from_gkls(gen: GklsGenerator) -> Self {
        Self {
            l: gen.compile(),
            gkls: Some(gen),
            qubit_params: None,
        }
    }

    fn from_superop(l: Superoperator) -> Self {
        Self {
            l,
            gkls: None,
            qubit_params: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.l.dim()
    }
}

pub fn parse_config(text: &str) -> Result<GeneratorConfig, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
}

impl GeneratorConfig {
    pub fn load(&self) -> Result<LoadedGenerator, CliError> {
        let explicit = self.hamiltonian.is_some() || self.noise.is_some();
        let sources = [
            explicit,
            self.qubit_params.is_some(),
            self.named_example.is_some(),
        ];
        if sources.iter().filter(|&&s| s).count() != 1 {
            return Err(CliError::Config(
                "exactly one of hamiltonian/noise, qubit_params, named_example must be given"
                    .into(),
            ));
        }
        if self.named_example.is_none() && !self.params.is_empty() {
            return Err(CliError::Config(
                "params is only valid with named_example".into(),
            ));
        }
        let loaded = if explicit {
            self.load_explicit()?
        } else if let Some(q) = &self.qubit_params {
            let params =
                QubitGeneratorParams::new(q.h, q.k).map_err(|e| CliError::Config(e.to_string()))?;
            LoadedGenerator {
                l: build_qubit_generator(&params).l,
                gkls: None,
                qubit_params: Some(params),
            }
        } else {
            let name = self.named_example.as_deref().unwrap_or_default();
            named_example(name, &Params::new(&self.params), self.dimension)?
        };
        if let Some(d) = self.dimension {
            if d != loaded.dim() {
                return Err(CliError::Config(format!(
                    "dimension {d} does not match the generator dimension {}",
                    loaded.dim()
                )));
            }
        }
        Ok(loaded)
    }

    fn load_explicit(&self) -> Result<LoadedGenerator, CliError> {
        let h = self
            .hamiltonian
            .as_ref()
            .map(|m| matrix_from_json(m, "hamiltonian"))
            .transpose()?;
        let noise_json = self.noise.as_deref().unwrap_or_default();
        let mut noise = Vec::with_capacity(noise_json.len());
        for (k, n) in noise_json.iter().enumerate() {
            noise.push(NoiseTerm::new(
                n.rate,
                matrix_from_json(&n.matrix, &format!("noise[{k}]"))?,
            ));
        }
        let d = h
            .as_ref()
            .map(CMatrix::dim)
            .or_else(|| noise.first().map(|n| n.op.dim()))
            .or(self.dimension)
            .ok_or_else(|| CliError::Config("cannot infer the dimension".into()))?;
        let h = h.unwrap_or_else(|| CMatrix::zeros(d));
        let gen = GklsGenerator::new(h, noise).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(LoadedGenerator::from_gkls(gen))
    }
}

struct Params<'a> {
    map: &'a BTreeMap<String, serde_json::Value>,
}

impl<'a> Params<'a> {
    fn new(map: &'a BTreeMap<String, serde_json::Value>) -> Self {
        Self { map }
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        match self.map.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(CliError::Config(format!("unknown parameter `{k}`"))),
            None => Ok(()),
        }
    }

    fn f64(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_f64()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::Config(format!("parameter `{key}` must be a number"))),
        }
    }

    fn vec(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        match self.map.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => serde_json::from_value::<Vec<f64>>(v.clone()).map_err(|_| {
                CliError::Config(format!("parameter `{key}` must be a list of numbers"))
            }),
        }
    }

    fn string(&self, key: &str, default: &str) -> Result<String, CliError> {
        match self.map.get(key) {
            None => Ok(default.to_string()),
            Some(v) => v
                .as_str()
                .map(str::to_string)
                .ok_or_else(|| CliError::Config(format!("parameter `{key}` must be a string"))),
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

/// example1: λ(U·U† − id), U = diag(e^{ikθ}), params `lambda`, `theta`.
/// example2: Σ γ_k (L_k·L_k − ½{L_k², ·}) with L_k = σ_k/√2, params `gammas`.
/// example4: raising/lowering qubit noise, params `gamma1` (on σ₋), `gamma2` (on σ₊).
/// example5: −γ(id − 𝓟), params `gamma`, `projection` = `luders` | `replacement`,
///           `rho0` (diagonal of ρ₀ for `replacement`).
/// example6: K = diag(γ₁, γ₂, γ₃), h = 0, params `gammas`.
fn named_example(
    name: &str,
    p: &Params,
    dimension: Option<usize>,
) -> Result<LoadedGenerator, CliError> {
    match name {
        "example1" => {
            p.check_keys(&["lambda", "theta"])?;
            let lambda = p.f64("lambda", 1.0)?;
            let theta = p.f64("theta", std::f64::consts::FRAC_PI_3)?;
            let d = dimension.unwrap_or(2);
            let phases: Vec<C64> = (0..d)
                .map(|k| C64::from_polar(1.0, k as f64 * theta))
                .collect();
            let l = poisson_generator(lambda, &CMatrix::diag(&phases)).map_err(config_err)?;
            Ok(LoadedGenerator::from_superop(l))
        }
        "example2" => {
            p.check_keys(&["gammas"])?;
            let gammas = p.vec("gammas", &[1.0, 0.5, 0.0])?;
            if gammas.len() != 3 {
                return Err(CliError::Config("example2 needs three gammas".into()));
            }
            let noise = gammas
                .iter()
                .enumerate()
                .map(|(k, &g)| NoiseTerm::new(g, pauli(k + 1).scale_real(FRAC_1_SQRT_2)))
                .collect();
            let gen = GklsGenerator::dissipative(2, noise).map_err(config_err)?;
            Ok(LoadedGenerator::from_gkls(gen))
        }
        "example4" => {
            p.check_keys(&["gamma1", "gamma2"])?;
            let g1 = p.f64("gamma1", 2.0)?;
            let g2 = p.f64("gamma2", 1.0)?;
            let lower = CMatrix::from_real(2, &[0.0, 0.0, 1.0, 0.0]);
            let raise = CMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]);
            let gen = GklsGenerator::dissipative(
                2,
                vec![NoiseTerm::new(g1, lower), NoiseTerm::new(g2, raise)],
            )
            .map_err(config_err)?;
            Ok(LoadedGenerator::from_gkls(gen))
        }
        "example5" => {
            p.check_keys(&["gamma", "projection", "rho0"])?;
            let gamma = p.f64("gamma", 1.0)?;
            let kind = p.string("projection", "luders")?;
            let projection = match kind.as_str() {
                "luders" => {
                    let d = dimension.unwrap_or(2);
                    let projectors: Vec<CMatrix> = (0..d)
                        .map(|k| {
                            let mut diag = vec![0.0; d];
                            diag[k] = 1.0;
                            CMatrix::real_diag(&diag)
                        })
                        .collect();
                    luders_projection(&projectors).map_err(config_err)?
                }
                "replacement" => {
                    let diag = p.vec("rho0", &[0.8, 0.2])?;
                    let rho =
                        DensityOperator::new(&CMatrix::real_diag(&diag)).map_err(config_err)?;
                    replacement_projection(&rho)
                }
                other => return Err(CliError::Config(format!("unknown projection `{other}`"))),
            };
            let l = projection_generator(&projection, gamma).map_err(config_err)?;
            Ok(LoadedGenerator::from_superop(l))
        }
        "example6" => {
            p.check_keys(&["gammas"])?;
            let g = p.vec("gammas", &[1.0, 1.0, -0.5])?;
            let g: [f64; 3] = g
                .try_into()
                .map_err(|_| CliError::Config("example6 needs three gammas".into()))?;
            let params = QubitGeneratorParams::diagonal(g).map_err(config_err)?;
            Ok(LoadedGenerator {
                l: build_qubit_generator(&params).l,
                gkls: None,
                qubit_params: Some(params),
            })
        }
        other => Err(CliError::Config(format!("unknown named example `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_matches_named_example4() {
        let text = r#"{"dimension": 2,
            "noise": [{"rate": 2, "matrix": [[0, 0], [1, 0]]},
                      {"rate": 1, "matrix": [[0, {"re": 1, "im": 0}], [0, 0]]}]}"#;
        let explicit = parse_config(text).unwrap().load().unwrap();
        let named =
            parse_config(r#"{"named_example": "example4", "params": {"gamma1": 2, "gamma2": 1}}"#)
                .unwrap()
                .load()
                .unwrap();
        assert!(explicit.l.distance(&named.l) < 1e-15);
    }

    #[test]
    fn exactly_one_source() {
        let both = r#"{"named_example": "example4", "qubit_params": {"h": [0,0,0], "K": [[0,0,0],[0,0,0],[0,0,0]]}}"#;
        assert!(matches!(
            parse_config(both).unwrap().load(),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            parse_config("{}").unwrap().load(),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn unknown_fields_and_params_rejected() {
        assert!(parse_config(r#"{"named_example": "example4", "extra": 1}"#).is_err());
        let bad =
            parse_config(r#"{"named_example": "example4", "params": {"gamma3": 1}}"#).unwrap();
        assert!(matches!(bad.load(), Err(CliError::Config(_))));
    }

    #[test]
    fn dimension_mismatch() {
        let cfg = parse_config(r#"{"dimension": 3, "named_example": "example4"}"#).unwrap();
        assert!(matches!(cfg.load(), Err(CliError::Config(_))));
    }

    #[test]
    fn all_named_examples_load() {
        for name in ["example1", "example2", "example4", "example5", "example6"] {
            let cfg = parse_config(&format!(r#"{{"named_example": "{name}"}}"#)).unwrap();
            assert_eq!(cfg.load().unwrap().dim(), 2);
        }
        let cfg = parse_config(
            r#"{"named_example": "example5", "params": {"projection": "replacement", "rho0": [0.6, 0.3, 0.1]}}"#,
        )
        .unwrap();
        assert_eq!(cfg.load().unwrap().dim(), 3);
    }

    #[test]
    fn matrix_json_roundtrip() {
        let m = CMatrix::from_rows(&[
            vec![C64::new(1.0, 2.0), C64::new(0.0, -1.0)],
            vec![C64::new(0.5, 0.0), C64::new(-3.0, 0.25)],
        ])
        .unwrap();
        let back = matrix_from_json(&matrix_to_json(&m), "m").unwrap();
        assert_eq!(back, m);
    }
}
