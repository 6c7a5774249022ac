//! Run configuration, read from a sectioned TOML file.
//!
//! ```toml
//! mode = "riemann"          # optional; must agree with the command line
//! seed = 7                  # validate only
//!
//! [params]
//! g = 9.81
//! G = 1.0
//! zeta = 0.25
//! # lambda = 0.5            # omitted: elastic limit
//!
//! [left]
//! h = 2.0
//! u = 0.0
//! sxx = 1.0
//! szz = 1.0
//!
//! [right]
//! h = 1.0
//! u = 0.0
//! sxx = 1.0
//! szz = 1.0
//!
//! [sample]
//! xi_min = -8.0
//! xi_max = 8.0
//! points = 801
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use gsv_core::fv::{Boundary, Grid};
use gsv_core::validation::SweepConfig;
use gsv_core::{Params, PrimitiveState};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Eigen,
    Riemann,
    Simulate,
    Validate,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Eigen => "eigen",
            Mode::Riemann => "riemann",
            Mode::Simulate => "simulate",
            Mode::Validate => "validate",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    pub g: f64,
    #[serde(rename = "G")]
    pub elastic_modulus: f64,
    pub zeta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

impl ParamsSpec {
    pub fn build(&self) -> Result<Params, ConfigError> {
        let p = Params::new(self.g, self.elastic_modulus, self.zeta)?;
        match self.lambda {
            Some(l) => Ok(p.with_relaxation_time(l)?),
            None => Ok(p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub h: f64,
    pub u: f64,
    pub sxx: f64,
    pub szz: f64,
}

impl StateSpec {
    pub fn build(&self) -> Result<PrimitiveState, ConfigError> {
        Ok(PrimitiveState::new(self.h, self.u, self.sxx, self.szz)?)
    }
}

impl From<PrimitiveState> for StateSpec {
    fn from(s: PrimitiveState) -> Self {
        Self {
            h: s.h,
            u: s.u,
            sxx: s.sxx,
            szz: s.szz,
        }
    }
}

/// Uniform grid in `xi = x/t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    pub xi_min: f64,
    pub xi_max: f64,
    pub points: usize,
}

impl SampleSpec {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.xi_min.is_finite() && self.xi_max.is_finite() && self.xi_max > self.xi_min) {
            return Err(ConfigError::Invalid(format!(
                "sample: need finite xi_min < xi_max, got [{}, {}]",
                self.xi_min, self.xi_max
            )));
        }
        if self.points < 2 {
            return Err(ConfigError::Invalid(format!(
                "sample: points = {} must be at least 2",
                self.points
            )));
        }
        Ok(())
    }

    pub fn xis(&self) -> Vec<f64> {
        let n = self.points - 1;
        (0..=n)
            .map(|i| self.xi_min + (self.xi_max - self.xi_min) * i as f64 / n as f64)
            .collect()
    }
}

/// Initial condition of a simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Initial {
    /// `[left]` for `x < x0`, `[right]` otherwise.
    Riemann {
        #[serde(default)]
        x0: f64,
    },
    /// Still water at rest with unit stretches.
    DamBreak {
        h_left: f64,
        h_right: f64,
        #[serde(default)]
        x0: f64,
    },
    /// `[state]` with depth raised by `amplitude exp(-((x - center)/width)^2)`.
    SmoothBump {
        amplitude: f64,
        center: f64,
        width: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub cells: usize,
}

fn default_cfl() -> f64 {
    0.9
}

fn default_boundary() -> String {
    "transmissive".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub t_end: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default = "default_boundary")]
    pub boundary: String,
    #[serde(default)]
    pub snapshots: Vec<f64>,
}

/// Sample sizes of the validation sweeps; unset fields keep the acceptance sizes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigen_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub riemann_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sv_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weak_problems: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weak_tests: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convexity_pairs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence_cells: Option<Vec<usize>>,
    /// Slip parameter of the convexity negative control.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic_zeta: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub skip_diagnostic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<SampleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Initial>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validate: Option<ValidateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot parse configuration: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("missing [{block}] block, required in {mode} mode")]
    Missing { block: &'static str, mode: Mode },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] gsv_core::Error),
}

fn require<'a, T>(v: &'a Option<T>, block: &'static str, mode: Mode) -> Result<&'a T, ConfigError> {
    v.as_ref().ok_or(ConfigError::Missing { block, mode })
}

/// Parse without mode-specific checks.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = toml::from_str(text)?;
    if let Some(p) = &cfg.params {
        p.build()?;
    }
    Ok(cfg)
}

/// Serialize back to TOML; parsing the result gives an equal config.
pub fn to_toml(cfg: &RunConfig) -> String {
    toml::to_string(cfg).expect("configuration serializes")
}

impl RunConfig {
    /// Resolve the mode against the command line and fill in defaults.
    pub fn resolve(mut self, mode: Mode) -> Result<Self, ConfigError> {
        if let Some(m) = self.mode {
            if m != mode {
                return Err(ConfigError::Invalid(format!(
                    "configuration is for {m} mode but {mode} was requested"
                )));
            }
        }
        self.mode = Some(mode);
        if mode != Mode::Validate {
            require(&self.params, "params", mode)?.build()?;
        }
        match mode {
            Mode::Eigen => {
                require(&self.state, "state", mode)?.build()?;
            }
            Mode::Riemann => {
                require(&self.left, "left", mode)?.build()?;
                require(&self.right, "right", mode)?.build()?;
                require(&self.sample, "sample", mode)?.validate()?;
            }
            Mode::Simulate => {
                match require(&self.initial, "initial", mode)? {
                    Initial::Riemann { .. } => {
                        require(&self.left, "left", mode)?.build()?;
                        require(&self.right, "right", mode)?.build()?;
                    }
                    Initial::DamBreak {
                        h_left, h_right, ..
                    } => {
                        PrimitiveState::new(*h_left, 0.0, 1.0, 1.0)?;
                        PrimitiveState::new(*h_right, 0.0, 1.0, 1.0)?;
                    }
                    Initial::SmoothBump { width, .. } => {
                        require(&self.state, "state", mode)?.build()?;
                        if !(*width > 0.0) {
                            return Err(ConfigError::Invalid(format!(
                                "initial: width = {width} must be positive"
                            )));
                        }
                    }
                }
                let g = require(&self.grid, "grid", mode)?;
                Grid::new(g.x_min, g.x_max, g.cells)?;
                let t = require(&self.time, "time", mode)?;
                t.boundary.parse::<Boundary>()?;
            }
            Mode::Validate => {
                let v = self.validate.get_or_insert_with(ValidateSpec::default);
                if let Some(z) = v.diagnostic_zeta {
                    if !(z > 0.5 && z.is_finite()) {
                        return Err(ConfigError::Invalid(format!(
                            "validate: diagnostic_zeta = {z} must exceed 1/2 to probe the non-hyperbolic side"
                        )));
                    }
                }
            }
        }
        Ok(self)
    }

    pub fn params(&self) -> Result<Params, ConfigError> {
        self.params
            .as_ref()
            .ok_or(ConfigError::Missing {
                block: "params",
                mode: self.mode.unwrap_or(Mode::Riemann),
            })?
            .build()
    }

    pub fn sweep_config(&self, seed_override: Option<u64>) -> SweepConfig {
        let mut s = SweepConfig::default();
        if let Some(seed) = seed_override.or(self.seed) {
            s.seed = seed;
        }
        if let Some(v) = &self.validate {
            let set = |dst: &mut usize, src: Option<usize>| {
                if let Some(n) = src {
                    *dst = n;
                }
            };
            set(&mut s.eigen_samples, v.eigen_samples);
            set(&mut s.riemann_samples, v.riemann_samples);
            set(&mut s.sv_samples, v.sv_samples);
            set(&mut s.profile_points, v.profile_points);
            set(&mut s.weak_problems, v.weak_problems);
            set(&mut s.weak_tests, v.weak_tests);
            set(&mut s.convexity_pairs, v.convexity_pairs);
            if let Some(c) = &v.convergence_cells {
                s.convergence_cells = c.clone();
            }
            if v.diagnostic_zeta.is_some() {
                s.diagnostic_zeta = v.diagnostic_zeta;
            }
            if v.skip_diagnostic {
                s.diagnostic_zeta = None;
            }
        }
        s
    }

    pub fn boundary(&self) -> Result<Boundary, ConfigError> {
        match &self.time {
            Some(t) => Ok(t.boundary.parse()?),
            None => Ok(Boundary::Transmissive),
        }
    }
}

impl FromStr for RunConfig {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_config(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL_RIEMANN: &str = r#"
[params]
g = 9.81
G = 1.0
zeta = 0.25

[left]
h = 2.0
u = 0.0
sxx = 1.0
szz = 1.0

[right]
h = 1.0
u = 0.0
sxx = 1.0
szz = 1.0

[sample]
xi_min = -8.0
xi_max = 8.0
points = 17
"#;

    #[test]
    fn minimal_riemann_config_gets_defaults() {
        let cfg = parse_config(MINIMAL_RIEMANN)
            .unwrap()
            .resolve(Mode::Riemann)
            .unwrap();
        assert_eq!(cfg.mode, Some(Mode::Riemann));
        assert!(cfg.params().unwrap().is_elastic_limit());
        assert_eq!(cfg.boundary().unwrap(), Boundary::Transmissive);
    }

    #[test]
    fn time_block_defaults() {
        let t: TimeSpec = toml::from_str("t_end = 1.0").unwrap();
        assert_eq!(t.cfl, 0.9);
        assert_eq!(t.boundary, "transmissive");
        assert!(t.snapshots.is_empty());
    }

    #[test]
    fn zeta_above_half_names_the_constraint() {
        let text = MINIMAL_RIEMANN.replace("zeta = 0.25", "zeta = 0.7");
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("zeta <= 1/2"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = MINIMAL_RIEMANN.replace("g = 9.81", "g = 9.81\ngravity = 1.0");
        assert!(matches!(parse_config(&text), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn missing_block_is_reported() {
        let text =
            MINIMAL_RIEMANN.replace("[sample]\nxi_min = -8.0\nxi_max = 8.0\npoints = 17\n", "");
        let err = parse_config(&text)
            .unwrap()
            .resolve(Mode::Riemann)
            .unwrap_err();
        assert!(matches!(
            err,
            ConfigError::Missing {
                block: "sample",
                ..
            }
        ));
    }

    #[test]
    fn malformed_sample_grid_is_rejected() {
        let text = MINIMAL_RIEMANN.replace("xi_max = 8.0", "xi_max = -9.0");
        assert!(parse_config(&text).unwrap().resolve(Mode::Riemann).is_err());
    }

    #[test]
    fn mode_mismatch_is_rejected() {
        let text = format!("mode = \"eigen\"\n{MINIMAL_RIEMANN}");
        assert!(parse_config(&text).unwrap().resolve(Mode::Riemann).is_err());
    }

    #[test]
    fn round_trip_preserves_the_config() {
        let text = format!(
            "{MINIMAL_RIEMANN}\n[initial]\nkind = \"smooth-bump\"\namplitude = 0.1\ncenter = 0.0\nwidth = 0.2\n\n[time]\nt_end = 0.5\nsnapshots = [0.1]\n"
        );
        let cfg = parse_config(&text).unwrap();
        let again = parse_config(&to_toml(&cfg)).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn infinite_lambda_is_the_elastic_limit() {
        let text = MINIMAL_RIEMANN.replace("zeta = 0.25", "zeta = 0.25\nlambda = inf");
        let cfg = parse_config(&text).unwrap();
        assert!(cfg.params().unwrap().is_elastic_limit());
    }

    #[test]
    fn seed_flag_overrides_the_file() {
        let cfg = parse_config("seed = 3")
            .unwrap()
            .resolve(Mode::Validate)
            .unwrap();
        assert_eq!(cfg.sweep_config(None).seed, 3);
        assert_eq!(cfg.sweep_config(Some(9)).seed, 9);
    }
}
