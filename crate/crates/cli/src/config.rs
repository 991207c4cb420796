//! Experiment configuration: a TOML file with `key = value` sections,
//! overridden field by field from the command line.
//!
//! ```toml
//! [system]
//! model = "ring:N=6"
//! partition = "parity"
//!
//! [measurement]
//! scheme = "quantum"
//! n = 2
//!
//! [time]
//! tau = "pi/3"
//! tau_grid = "linspace(0, pi, 101)"
//! tau_max = "2*pi"
//!
//! [preparation]
//! state = "witness:theta=0.3"
//! theta_grid = "linspace(0, 2*pi, 48)"
//!
//! [run]
//! seed = 7
//! trajectories = 1000
//! convention = "consistent"
//!
//! [tolerances]
//! root = 1e-10
//! lumpability = 1e-10
//! verify = 1e-10
//! ```

use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use qlump_core::models::{ring_hamiltonian, two_qubit_model, PhaseConvention};
use qlump_core::witness::witness_state;
use qlump_core::{ComplexMatrix64, DensityMatrix64, MesostatePartition, Scheme};
use serde::{Deserialize, Serialize};

use crate::error::{config, CliResult};
use crate::expr;

/// A number written either literally or as an expression string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Num(f64),
    Expr(String),
}

impl Scalar {
    fn value(&self, field: &str) -> CliResult<f64> {
        match self {
            Scalar::Num(v) => Ok(*v),
            Scalar::Expr(s) => expr::eval(s).map_err(|e| config(format!("{field}: {e}"))),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Num(v) => write!(f, "{v}"),
            Scalar::Expr(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct System {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Measurement {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Time {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<Scalar>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_max: Option<Scalar>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Preparation {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_grid: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Run {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectories: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lumpability: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub system: System,
    #[serde(default)]
    pub measurement: Measurement,
    #[serde(default)]
    pub time: Time,
    #[serde(default)]
    pub preparation: Preparation,
    #[serde(default)]
    pub run: Run,
    #[serde(default)]
    pub tolerances: ToleranceOverrides,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// The effective configuration as TOML, for output headers. Sections
    /// without any field set are left out.
    pub fn to_toml(&self) -> String {
        let full = toml::to_string(self).expect("config serializes");
        let mut out = String::new();
        let mut pending: Option<&str> = None;
        for line in full.lines() {
            if line.starts_with('[') {
                pending = Some(line);
            } else if !line.is_empty() {
                if let Some(h) = pending.take() {
                    if !out.is_empty() {
                        out.push('\n');
                    }
                    out.push_str(h);
                    out.push('\n');
                }
                out.push_str(line);
                out.push('\n');
            }
        }
        out
    }

    pub fn model(&self) -> CliResult<Model> {
        let spec = self.system.model.as_deref().unwrap_or("ring:N=6");
        Model::parse(spec)
    }

    pub fn partition(&self, model: &Model) -> CliResult<MesostatePartition> {
        match self.system.partition.as_deref() {
            None => model.default_partition(),
            Some("parity") => Ok(MesostatePartition::parity(model.dim())?),
            Some("singletons") => Ok(MesostatePartition::singletons(model.dim())),
            Some("probe") => match model {
                Model::TwoQubit { .. } => model.default_partition(),
                _ => Err(config("partition: `probe` needs the two-qubit model")),
            },
            Some(literal) => {
                let part: MesostatePartition = literal.parse().map_err(|e| config(format!("partition: {e}")))?;
                if part.dim() != model.dim() {
                    return Err(config(format!(
                        "partition: covers {} levels but the model has {}",
                        part.dim(),
                        model.dim()
                    )));
                }
                Ok(part)
            }
        }
    }

    pub fn scheme(&self) -> CliResult<Scheme> {
        match self.measurement.scheme.as_deref() {
            None => Ok(Scheme::Quantum),
            Some(s) => s.parse().map_err(|e| config(format!("scheme: {e}"))),
        }
    }

    pub fn n(&self, default: usize) -> usize {
        self.measurement.n.unwrap_or(default)
    }

    pub fn tau(&self) -> CliResult<f64> {
        let tau = self
            .time
            .tau
            .as_ref()
            .ok_or_else(|| config("tau: missing (set [time] tau or pass --tau)"))?
            .value("tau")?;
        if tau < 0.0 {
            return Err(config("tau: must be non-negative"));
        }
        Ok(tau)
    }

    pub fn tau_grid(&self) -> CliResult<Vec<f64>> {
        let src = self
            .time
            .tau_grid
            .as_deref()
            .ok_or_else(|| config("tau_grid: missing (set [time] tau_grid or pass --tau-grid)"))?;
        expr::grid(src).map_err(|e| config(format!("tau_grid: {e}")))
    }

    pub fn tau_max(&self, default: f64) -> CliResult<f64> {
        let v = match &self.time.tau_max {
            None => default,
            Some(s) => s.value("tau_max")?,
        };
        if v <= 0.0 {
            return Err(config("tau_max: must be positive"));
        }
        Ok(v)
    }

    pub fn theta_grid(&self) -> CliResult<Vec<f64>> {
        let src = self
            .preparation
            .theta_grid
            .as_deref()
            .ok_or_else(|| config("theta_grid: missing (set [preparation] theta_grid or pass --theta-grid)"))?;
        expr::grid(src).map_err(|e| config(format!("theta_grid: {e}")))
    }

    pub fn state(&self, dim: usize) -> CliResult<DensityMatrix64> {
        StateSpec::parse(self.preparation.state.as_deref().unwrap_or("basis:0"))?.build(dim)
    }

    pub fn seed(&self) -> u64 {
        self.run.seed.unwrap_or(0)
    }

    pub fn trajectories(&self) -> CliResult<usize> {
        match self.run.trajectories.unwrap_or(1000) {
            0 => Err(config("trajectories: must be positive")),
            m => Ok(m),
        }
    }

    pub fn convention(&self) -> CliResult<PhaseConvention> {
        match self.run.convention.as_deref() {
            None | Some("consistent") => Ok(PhaseConvention::Consistent),
            Some("doubled") => Ok(PhaseConvention::Doubled),
            Some(other) => Err(config(format!("convention: expected `consistent` or `doubled`, got `{other}`"))),
        }
    }

    fn tolerance(value: Option<f64>, default: f64, field: &str) -> CliResult<f64> {
        match value {
            None => Ok(default),
            Some(v) if v >= 0.0 && v.is_finite() => Ok(v),
            Some(v) => Err(config(format!("tolerances.{field}: {v} is not a non-negative number"))),
        }
    }

    pub fn root_tol(&self) -> CliResult<f64> {
        Self::tolerance(self.tolerances.root, 1e-10, "root")
    }

    pub fn lumpability_tol(&self) -> CliResult<f64> {
        Self::tolerance(self.tolerances.lumpability, 1e-10, "lumpability")
    }

    pub fn verify_tol(&self) -> CliResult<f64> {
        Self::tolerance(self.tolerances.verify, 1e-10, "verify")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Ring { sites: usize },
    TwoQubit { lambda1: f64, lambda2: f64 },
    /// A Hermitian matrix read from a TOML file with `re = [[…]]` and an
    /// optional `im = [[…]]` of the same shape.
    Matrix { path: String, hamiltonian: ComplexMatrix64 },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    re: Vec<Vec<f64>>,
    #[serde(default)]
    im: Option<Vec<Vec<f64>>>,
}

fn load_matrix(path: &str) -> CliResult<ComplexMatrix64> {
    let err = |msg: String| config(format!("model: {path}: {msg}"));
    let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
    let file: MatrixFile = toml::from_str(&text).map_err(|e| err(e.to_string()))?;
    let dim = file.re.len();
    let im = file.im.unwrap_or_else(|| vec![vec![0.0; dim]; dim]);
    if dim == 0 || im.len() != dim || file.re.iter().chain(&im).any(|row| row.len() != dim) {
        return Err(err(format!("`re` and `im` must both be square {dim}×{dim}")));
    }
    let h = ComplexMatrix64::from_fn(dim, |i, j| Complex64::new(file.re[i][j], im[i][j]));
    let defect = h.hermiticity_defect();
    if !(defect <= 1e-12) {
        return Err(err(format!("not Hermitian (max |H - H†| = {defect:.1e})")));
    }
    Ok(h)
}

fn key_values(args: &str) -> CliResult<Vec<(&str, &str)>> {
    args.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| config(format!("model: expected key=value, got `{kv}`")))
        })
        .collect()
}

impl Model {
    /// `ring:N=6` (or `ring:6`), `twoqubit:l1=1,l2=0.5`, `matrix:PATH`.
    pub fn parse(spec: &str) -> CliResult<Self> {
        let (kind, args) = spec.split_once(':').unwrap_or((spec, ""));
        match kind.trim() {
            "ring" => {
                let raw = args.trim().strip_prefix("N=").unwrap_or(args.trim());
                let sites: usize = raw
                    .parse()
                    .map_err(|_| config(format!("model: ring needs N=<sites>, got `{spec}`")))?;
                ring_hamiltonian::<f64>(sites)?;
                Ok(Model::Ring { sites })
            }
            "twoqubit" | "two-qubit" => {
                let (mut lambda1, mut lambda2) = (1.0, 1.0);
                for (k, v) in key_values(args)? {
                    let x = expr::eval(v).map_err(|e| config(format!("model: {e}")))?;
                    match k {
                        "l1" | "lambda1" => lambda1 = x,
                        "l2" | "lambda2" => lambda2 = x,
                        _ => return Err(config(format!("model: unknown two-qubit parameter `{k}`"))),
                    }
                }
                Ok(Model::TwoQubit { lambda1, lambda2 })
            }
            "matrix" => {
                let path = args.trim().to_owned();
                let hamiltonian = load_matrix(&path)?;
                Ok(Model::Matrix { path, hamiltonian })
            }
            other => Err(config(format!("model: unknown model `{other}` (expected ring, twoqubit or matrix)"))),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Model::Ring { sites } => *sites,
            Model::TwoQubit { .. } => 4,
            Model::Matrix { hamiltonian, .. } => hamiltonian.dim(),
        }
    }

    pub fn hamiltonian(&self) -> CliResult<ComplexMatrix64> {
        Ok(match self {
            Model::Ring { sites } => ring_hamiltonian::<f64>(*sites)?.hamiltonian().clone(),
            Model::TwoQubit { lambda1, lambda2 } => two_qubit_model(*lambda1, *lambda2).hamiltonian().clone(),
            Model::Matrix { hamiltonian, .. } => hamiltonian.clone(),
        })
    }

    pub fn default_partition(&self) -> CliResult<MesostatePartition> {
        Ok(match self {
            Model::Ring { sites } => MesostatePartition::parity(*sites)?,
            Model::TwoQubit { lambda1, lambda2 } => two_qubit_model(*lambda1, *lambda2).probe_partition().clone(),
            Model::Matrix { .. } => MesostatePartition::parity(self.dim())
                .map_err(|e| config(format!("partition: none given and no default for this matrix ({e})")))?,
        })
    }

    pub fn ring_sites(&self) -> CliResult<usize> {
        match self {
            Model::Ring { sites } => Ok(*sites),
            _ => Err(config("model: this subcommand needs the ring model")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StateSpec {
    Basis(usize),
    Mixed,
    Pure(Vec<f64>),
    Diagonal(Vec<f64>),
    Witness(f64),
}

impl StateSpec {
    /// `basis:i`, `mixed`, `pure:a0,a1,…` (real amplitudes, normalized on
    /// use), `diag:w0,w1,…` (weights, normalized on use), `witness:theta=x`.
    pub fn parse(spec: &str) -> CliResult<Self> {
        let (kind, args) = spec.split_once(':').unwrap_or((spec, ""));
        let values = || expr::list(args).map_err(|e| config(format!("state: {e}")));
        match kind.trim() {
            "basis" => args
                .trim()
                .parse()
                .map(StateSpec::Basis)
                .map_err(|_| config(format!("state: basis needs an index, got `{args}`"))),
            "mixed" => Ok(StateSpec::Mixed),
            "pure" => Ok(StateSpec::Pure(values()?)),
            "diag" => Ok(StateSpec::Diagonal(values()?)),
            "witness" => {
                let raw = args.trim().strip_prefix("theta=").unwrap_or(args.trim());
                expr::eval(raw)
                    .map(StateSpec::Witness)
                    .map_err(|e| config(format!("state: {e}")))
            }
            other => Err(config(format!(
                "state: unknown preparation `{other}` (expected basis, mixed, pure, diag or witness)"
            ))),
        }
    }

    pub fn build(&self, dim: usize) -> CliResult<DensityMatrix64> {
        let check_len = |v: &[f64]| {
            if v.len() == dim {
                Ok(())
            } else {
                Err(config(format!("state: {} entries for a {dim}-level model", v.len())))
            }
        };
        Ok(match self {
            StateSpec::Basis(i) => DensityMatrix64::basis(dim, *i)?,
            StateSpec::Mixed => DensityMatrix64::maximally_mixed(dim),
            StateSpec::Pure(a) => {
                check_len(a)?;
                let amps: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                DensityMatrix64::pure(&amps)?
            }
            StateSpec::Diagonal(w) => {
                check_len(w)?;
                DensityMatrix64::diagonal(w)?
            }
            StateSpec::Witness(theta) => witness_state(dim, *theta)?,
        })
    }
}
