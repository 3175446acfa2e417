use serde::{Deserialize, Serialize};

use crate::gkls::Theorem1Report;
use crate::qubit::Cone;

/// Output of `qds classify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyReport {
    pub dimension: usize,
    pub unital: bool,
    /// Conditionally completely positive: generates a quantum dynamical semigroup.
    pub gkls: bool,
    pub positive_sampled: bool,
    /// `exact` for qubits, `sampled` otherwise.
    pub positivity_method: String,
    /// Null when the generator does not yield positive maps, since the
    /// evolution would leave the state space.
    pub theorem1_all_agree: Option<bool>,
    pub theorem1: Option<Theorem1Report>,
    pub qubit_cone: Option<Cone>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Diagnostics {
    /// ‖𝓛(1)‖_F.
    pub identity_image_norm: f64,
    pub conditional_choi_min_eigenvalue: f64,
    pub positivity_worst_entry: f64,
    pub bases_checked: usize,
    pub samples: usize,
    pub rho_samples: usize,
    pub seed: u64,
    pub k_eigenvalues: Option<[f64; 3]>,
    pub p_eigenvalues: Option<[f64; 3]>,
}

/// Output of `qds qubit-cone`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeReport {
    pub qubit_cone: Cone,
    pub positive_generator: bool,
    pub k_eigenvalues: [f64; 3],
    pub p_eigenvalues: [f64; 3],
    pub minors_consistent: bool,
    pub f: [[f64; 3]; 3],
}
