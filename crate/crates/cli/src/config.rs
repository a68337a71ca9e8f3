//! Experiment configuration: one JSON envelope per run, strictly validated
//! (unknown fields and unknown enum variants are schema errors). The
//! machine-readable schema ships in `docs/config-schema.json`.

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use wsemb::potential::{
    make_annular_step, make_constant, make_exponential, make_oscillating, make_power, DecayFn,
    Potential,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Must match the invoked subcommand.
    pub command: String,
    #[serde(default)]
    pub seed: u64,
    /// Default output directory; the `--out` flag overrides it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialSpec>,
    /// Second weight `W`; defaults to the potential where a pair is needed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<PotentialSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Exponents>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sequence: Option<SequenceSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checks: Option<ChecksSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub battery: Option<BatterySpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radial: Option<RadialSpec>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dimension: usize,
    pub radius: f64,
    pub nodes_per_axis: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    /// `1 + |x|^alpha`
    Power { alpha: f64 },
    /// `exp(|x|^alpha)`
    Exponential { alpha: f64 },
    /// `|x|^2 (sin(e^|x|) + 2) + 1`
    Oscillating,
    /// `n^2` on the n-th annulus, linear across gaps
    AnnularStep,
    /// constant positive weight
    Constant { value: f64 },
}

impl PotentialSpec {
    pub fn build(&self) -> anyhow::Result<Potential<f64>> {
        Ok(match self {
            PotentialSpec::Power { alpha } => make_power(*alpha)?,
            PotentialSpec::Exponential { alpha } => make_exponential(*alpha)?,
            PotentialSpec::Oscillating => make_oscillating(),
            PotentialSpec::AnnularStep => make_annular_step(),
            PotentialSpec::Constant { value } => make_constant(*value)?,
        })
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhiSpec {
    /// `(1 + r)^{-beta}`
    InversePower { beta: f64 },
}

impl PhiSpec {
    pub fn build(&self) -> anyhow::Result<DecayFn<f64>> {
        Ok(match self {
            PhiSpec::InversePower { beta } => DecayFn::inverse_power(*beta)?,
        })
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Exponents {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_bar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceSpec {
    pub kind: SequenceKindSpec,
    #[serde(default = "default_scale")]
    pub m: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centers: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_range: Option<[usize; 2]>,
    #[serde(default = "default_local_nodes")]
    pub local_nodes: usize,
}

fn default_scale() -> f64 {
    1.0
}

fn default_local_nodes() -> usize {
    wsemb::bumps::DEFAULT_LOCAL_NODES
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SequenceKindSpec {
    Vnon,
    General,
    Annular,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_cg_tol")]
    pub cg_tol: f64,
    #[serde(default = "default_snapshot_every")]
    pub snapshot_every: usize,
    /// Starting field: a Gaussian bump.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_center: Option<Vec<f64>>,
    #[serde(default = "default_width")]
    pub initial_width: f64,
    /// Skip the gradient-domination precondition check on `V`.
    #[serde(default)]
    pub skip_potential_check: bool,
    /// Rerun once at 1.5x the box radius if solution mass leaks past R/2.
    #[serde(default = "default_true")]
    pub rerun_on_escape: bool,
}

fn default_tol() -> f64 {
    1e-6
}
fn default_max_iter() -> usize {
    5000
}
fn default_cg_tol() -> f64 {
    1e-8
}
fn default_snapshot_every() -> usize {
    25
}
fn default_width() -> f64 {
    1.0
}
fn default_true() -> bool {
    true
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec {
            tol: default_tol(),
            max_iter: default_max_iter(),
            cg_tol: default_cg_tol(),
            snapshot_every: default_snapshot_every(),
            initial_center: None,
            initial_width: default_width(),
            skip_potential_check: false,
            rerun_on_escape: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksSpec {
    /// Which condition checks to run.
    pub run: Vec<CheckName>,
    #[serde(default = "default_scale")]
    pub m: f64,
    #[serde(default = "default_scale")]
    pub eps: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centers: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_tilde: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiSpec>,
    #[serde(default = "default_ball_samples")]
    pub samples_per_axis: usize,
}

fn default_ball_samples() -> usize {
    17
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum CheckName {
    Cstar,
    Gradv,
    VwAlpha,
    V0,
    V1,
    V2,
    VwRad,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatterySpec {
    #[serde(default = "default_trials")]
    pub trials: usize,
}

fn default_trials() -> usize {
    100
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialSpec {
    #[serde(default = "default_r_cut")]
    pub r_cut: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiSpec>,
    #[serde(default = "default_trials_radial")]
    pub trials: usize,
}

fn default_r_cut() -> f64 {
    2.0
}
fn default_trials_radial() -> usize {
    40
}

impl ExperimentConfig {
    pub fn parse(bytes: &[u8], expected_command: &str) -> anyhow::Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_slice(bytes).context("config does not match the schema")?;
        if cfg.command != expected_command {
            bail!(
                "config command `{}` does not match subcommand `{}`",
                cfg.command,
                expected_command
            );
        }
        cfg.validate()?;
        Ok(cfg)
    }

    // negated comparisons reject NaN where `x <= 0` would not
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> anyhow::Result<()> {
        if let Some(g) = &self.grid {
            if !(1..=3).contains(&g.dimension) {
                bail!("grid.dimension must be 1, 2, or 3");
            }
            if g.nodes_per_axis < 3 || g.nodes_per_axis % 2 == 0 {
                bail!("grid.nodes_per_axis must be odd and at least 3");
            }
            if !(g.radius > 0.0) || !g.radius.is_finite() {
                bail!("grid.radius must be positive");
            }
        }
        if let Some(e) = &self.exponents {
            for (name, v) in [
                ("tau", e.tau),
                ("tau_bar", e.tau_bar),
                ("alpha", e.alpha),
                ("p", e.p),
            ] {
                if let Some(v) = v {
                    if !v.is_finite() || v <= 0.0 {
                        bail!("exponents.{name} must be positive and finite");
                    }
                }
            }
            if let Some(a) = e.alpha {
                if !(0.0 < a && a < 1.0) {
                    bail!("exponents.alpha must lie in (0, 1)");
                }
            }
            if let Some(p) = e.p {
                if p <= 1.0 {
                    bail!("exponents.p must exceed 1");
                }
            }
        }
        if let Some(s) = &self.sequence {
            if !(s.m > 0.0) {
                bail!("sequence.m must be positive");
            }
            if s.local_nodes < 3 || s.local_nodes % 2 == 0 {
                bail!("sequence.local_nodes must be odd and at least 3");
            }
            match s.kind {
                SequenceKindSpec::Vnon if s.n_max.is_none() => {
                    bail!("sequence.n_max required for kind = vnon")
                }
                SequenceKindSpec::General if s.centers.is_none() => {
                    bail!("sequence.centers required for kind = general")
                }
                SequenceKindSpec::Annular if s.n_range.is_none() => {
                    bail!("sequence.n_range required for kind = annular")
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn grid_spec(&self) -> anyhow::Result<GridSpec> {
        self.grid
            .ok_or_else(|| anyhow::anyhow!("config is missing the `grid` section"))
    }

    pub fn potential(&self) -> anyhow::Result<Potential<f64>> {
        self.potential
            .as_ref()
            .ok_or_else(|| anyhow::anyhow!("config is missing the `potential` section"))?
            .build()
    }
}
