//! Run configuration: a flat JSON document whose fields mirror the command-line
//! flags, plus validation into errors and advisory warnings.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::analysis::{default_t_max, log_grid, Problem, SearchSpec};
use crate::bath::{de_beta, infinite, ser_beta, BathSpec};
use crate::dephasing::TwoLevelSpec;
use crate::error::{Error, Result};
use crate::exact3::{step_limit, AmplitudeState, ConvolutionScheme, ExactOptions, VSystemSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Vsystem,
    Twolevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Exact,
    Cg,
    Rwa,
    Compare,
    Optimize,
    RatesScan,
    Dephasing,
    Sweep,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Exact => "exact",
            Task::Cg => "cg",
            Task::Rwa => "rwa",
            Task::Compare => "compare",
            Task::Optimize => "optimize",
            Task::RatesScan => "rates-scan",
            Task::Dephasing => "dephasing",
            Task::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::config("format", format!("expected csv or json, got {other:?}"))),
        }
    }
}

/// Everything a run needs. Optional fields fall back to derived defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: Model,
    pub task: Task,
    pub omega1: f64,
    pub omega2: f64,
    /// Two-level splitting.
    pub omega0: f64,
    /// Spectral-density prefactor; `ω_c⁻²` when absent.
    pub eta: Option<f64>,
    pub omega_c: f64,
    pub g: f64,
    #[serde(serialize_with = "ser_beta", deserialize_with = "de_beta")]
    pub beta: f64,
    /// Horizon; three relaxation times of the mean transition when absent
    /// (`1/g` for the two-level model).
    pub t_max: Option<f64>,
    pub step: f64,
    pub scheme: ConvolutionScheme,
    pub subsample: usize,
    /// Initially occupied level of the V system.
    pub initial_level: usize,
    pub dt: Option<f64>,
    /// Coarse-graining times for `rates-scan` and extra robustness points for `optimize`.
    pub dt_values: Option<Vec<f64>>,
    pub search_lo: Option<f64>,
    pub search_hi: Option<f64>,
    pub n_grid: usize,
    pub xatol: f64,
    /// Output path stem; extensions and suffixes are appended.
    pub out: String,
    pub format: Format,
    pub cache_dir: Option<String>,
    /// Overrides merged over this config, one run each (`sweep` task).
    pub sweep: Vec<serde_json::Value>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: Model::Vsystem,
            task: Task::Compare,
            omega1: 0.095,
            omega2: 0.105,
            omega0: 0.1,
            eta: None,
            omega_c: 1.0,
            g: 0.001,
            beta: infinite(),
            t_max: None,
            step: 0.05,
            scheme: ConvolutionScheme::Trapezoid,
            subsample: 100,
            initial_level: 1,
            dt: None,
            dt_values: None,
            search_lo: None,
            search_hi: None,
            n_grid: 40,
            xatol: 1e-2,
            out: "out".into(),
            format: Format::Csv,
            cache_dir: None,
            sweep: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// One finding of [`validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Issue {
    pub severity: Severity,
    pub field: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}: {}", self.field, self.message)
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Merge the keys of a JSON object over this config.
    pub fn merged(&self, overrides: &serde_json::Value) -> Result<Self> {
        let Some(obj) = overrides.as_object() else {
            return Err(Error::config("sweep", "each entry must be a JSON object"));
        };
        let mut base = serde_json::to_value(self)?;
        let map = base.as_object_mut().expect("config is an object");
        for (k, v) in obj {
            map.insert(k.clone(), v.clone());
        }
        serde_json::from_value(base).map_err(|e| Error::config("sweep", e.to_string()))
    }

    pub fn bath(&self) -> BathSpec {
        let b = BathSpec::new(self.omega_c, self.g).with_beta(self.beta);
        match self.eta {
            Some(eta) => b.with_eta(eta),
            None => b,
        }
    }

    pub fn system(&self) -> VSystemSpec {
        VSystemSpec::new(self.omega1, self.omega2)
    }

    pub fn two_level(&self) -> TwoLevelSpec {
        TwoLevelSpec { omega0: self.omega0, bath: self.bath() }
    }

    pub fn initial_state(&self) -> AmplitudeState {
        AmplitudeState::basis(self.initial_level)
    }

    pub fn horizon(&self) -> f64 {
        match (self.t_max, self.model) {
            (Some(t), _) => t,
            (None, Model::Vsystem) => default_t_max(&self.system(), &self.bath()),
            (None, Model::Twolevel) => 1.0 / self.g,
        }
    }

    pub fn exact_options(&self) -> ExactOptions {
        ExactOptions::new(self.horizon(), self.step).with_scheme(self.scheme).with_subsample(self.subsample)
    }

    pub fn problem(&self) -> Problem {
        Problem { sys: self.system(), bath: self.bath(), psi0: self.initial_state(), exact: self.exact_options() }
    }

    pub fn search(&self) -> SearchSpec {
        let d = SearchSpec::default_for(&self.bath());
        SearchSpec {
            lo: self.search_lo.unwrap_or(d.lo),
            hi: self.search_hi.unwrap_or(d.hi),
            n_grid: self.n_grid,
            xatol: self.xatol,
        }
    }

    /// Coarse-graining times of a rate scan: `dt_values`, or 20 log-spaced
    /// points in `[1/ω_c, 10⁴/ω_c]`.
    pub fn scan_dts(&self) -> Vec<f64> {
        self.dt_values.clone().unwrap_or_else(|| log_grid(1.0 / self.omega_c, 1e4 / self.omega_c, 20))
    }

    pub fn cache_path(&self) -> Option<PathBuf> {
        self.cache_dir.as_ref().map(PathBuf::from)
    }

    /// First error of [`validate`] as an [`Error::Config`].
    pub fn check(&self) -> Result<()> {
        match validate(self).into_iter().find(|i| i.severity == Severity::Error) {
            Some(i) => Err(Error::Config { field: i.field, message: i.message }),
            None => Ok(()),
        }
    }
}

/// Every problem with `cfg`. Errors block a run; warnings flag timescale
/// violations and degenerate optimizations.
pub fn validate(cfg: &RunConfig) -> Vec<Issue> {
    let mut out = Vec::new();
    let mut err = |field: &str, message: String| {
        out.push(Issue { severity: Severity::Error, field: field.into(), message });
    };
    let positive = |v: f64| v > 0.0 && v.is_finite();

    for (field, v) in [("omega_c", cfg.omega_c), ("g", cfg.g), ("step", cfg.step), ("xatol", cfg.xatol)] {
        if !positive(v) {
            err(field, format!("must be positive and finite, got {v}"));
        }
    }
    if let Some(eta) = cfg.eta {
        if !positive(eta) {
            err("eta", format!("must be positive and finite, got {eta}"));
        }
    }
    if !(cfg.beta > 0.0) {
        err("beta", format!("must be positive or inf, got {}", cfg.beta));
    }
    if let Some(t) = cfg.t_max {
        if !positive(t) {
            err("t_max", format!("must be positive and finite, got {t}"));
        }
    }
    if cfg.subsample == 0 {
        err("subsample", "must be at least 1".into());
    }
    if let Some(dt) = cfg.dt {
        if !positive(dt) {
            err("dt", format!("must be positive and finite, got {dt}"));
        }
    }
    if let Some(v) = &cfg.dt_values {
        if v.is_empty() || v.iter().any(|&d| !positive(d)) {
            err("dt_values", "must be a nonempty list of positive times".into());
        }
    }
    if cfg.n_grid < 3 {
        err("n_grid", format!("need at least 3 scan points, got {}", cfg.n_grid));
    }

    let two_level = cfg.task == Task::Dephasing;
    match (two_level, cfg.model) {
        (true, Model::Vsystem) => err("model", "the dephasing task needs model twolevel".into()),
        (false, Model::Twolevel) if cfg.task != Task::Sweep => {
            err("model", format!("task {} needs model vsystem", cfg.task.name()))
        }
        _ => {}
    }
    if two_level {
        if !(cfg.omega0 >= 0.0 && cfg.omega0.is_finite()) {
            err("omega0", format!("must be nonnegative and finite, got {}", cfg.omega0));
        }
        if cfg.dt.is_none() {
            err("dt", "the dephasing task needs a coarse-graining time".into());
        }
    } else if cfg.task != Task::Sweep {
        for (field, v) in [("omega1", cfg.omega1), ("omega2", cfg.omega2)] {
            if !positive(v) {
                err(field, format!("must be positive and finite, got {v}"));
            }
        }
        if cfg.beta.is_finite() {
            err("beta", format!("the three-level model is zero-temperature only; got beta = {}", cfg.beta));
        }
        if cfg.initial_level > 2 {
            err("initial_level", format!("must be 0, 1 or 2, got {}", cfg.initial_level));
        }
        if cfg.task == Task::Cg && cfg.dt.is_none() {
            err("dt", "the cg task needs a coarse-graining time".into());
        }
        let needs_exact = matches!(cfg.task, Task::Exact | Task::Compare | Task::Optimize);
        if needs_exact && positive(cfg.step) && positive(cfg.omega1) && positive(cfg.omega2) && positive(cfg.omega_c) {
            let limit = step_limit(&cfg.system(), &cfg.bath());
            if cfg.step > limit * (1.0 + 1e-12) {
                err("step", format!("{} exceeds the stability limit {limit}", cfg.step));
            }
        }
        if matches!(cfg.task, Task::Compare | Task::Optimize) && (cfg.search_lo.is_some() || cfg.search_hi.is_some()) {
            let s = cfg.search();
            if !(s.lo > 0.0 && s.hi > s.lo && s.hi.is_finite()) {
                err("search_lo", format!("need 0 < search_lo < search_hi, got [{}, {}]", s.lo, s.hi));
            }
        }
    }
    if cfg.task == Task::Sweep {
        if cfg.sweep.is_empty() {
            err("sweep", "the sweep task needs at least one override".into());
        }
        for (i, o) in cfg.sweep.iter().enumerate() {
            match cfg.merged(o) {
                Err(e) => err(&format!("sweep[{i}]"), e.to_string()),
                Ok(c) if c.task == Task::Sweep => {
                    err(&format!("sweep[{i}].task"), "must name a task other than sweep".into())
                }
                Ok(c) => {
                    for issue in validate(&c).into_iter().filter(|x| x.severity == Severity::Error) {
                        err(&format!("sweep[{i}].{}", issue.field), issue.message);
                    }
                }
            }
        }
    }

    if let Some(dt) = cfg.dt {
        if positive(dt) && positive(cfg.omega_c) && positive(cfg.g) && (dt * cfg.omega_c <= 1.0 || dt * cfg.g >= 1.0) {
            out.push(Issue {
                severity: Severity::Warning,
                field: "dt".into(),
                message: format!(
                    "coarse-graining time {dt} is outside the window 1/omega_c = {} < dt < 1/g = {}",
                    1.0 / cfg.omega_c,
                    1.0 / cfg.g
                ),
            });
        }
    }
    let optimizing = cfg.task == Task::Optimize || (cfg.task == Task::Compare && cfg.dt.is_none());
    if optimizing && cfg.omega1 == cfg.omega2 {
        out.push(Issue {
            severity: Severity::Warning,
            field: "omega2".into(),
            message: "equal transition frequencies leave a dark state; the objective is degenerate".into(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_clean() {
        assert!(validate(&RunConfig::default()).is_empty());
    }

    #[test]
    fn short_dt_warns() {
        let cfg = RunConfig { dt: Some(0.1), g: 0.001, ..RunConfig::default() };
        let issues = validate(&cfg);
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].severity, Severity::Warning);
        assert_eq!(issues[0].field, "dt");
        assert!(cfg.check().is_ok());
        let long = RunConfig { dt: Some(2000.0), ..RunConfig::default() };
        assert_eq!(validate(&long)[0].severity, Severity::Warning);
        let fine = RunConfig { dt: Some(60.0), ..RunConfig::default() };
        assert!(validate(&fine).is_empty());
    }

    #[test]
    fn dark_state_warns_when_optimizing() {
        let cfg = RunConfig { task: Task::Optimize, omega1: 0.1, omega2: 0.1, ..RunConfig::default() };
        let issues = validate(&cfg);
        assert!(issues.iter().any(|i| i.severity == Severity::Warning && i.message.contains("dark state")));
        let exact = RunConfig { task: Task::Exact, ..cfg };
        assert!(validate(&exact).is_empty());
    }

    #[test]
    fn negative_coupling_is_an_error_naming_the_field() {
        let cfg = RunConfig { g: -0.001, ..RunConfig::default() };
        match cfg.check() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "g"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn task_requirements() {
        assert!(RunConfig { task: Task::Cg, ..RunConfig::default() }.check().is_err());
        assert!(RunConfig { task: Task::Dephasing, ..RunConfig::default() }.check().is_err());
        let deph = RunConfig { task: Task::Dephasing, model: Model::Twolevel, dt: Some(50.0), ..RunConfig::default() };
        assert!(deph.check().is_ok());
        assert!(RunConfig { step: 0.5, task: Task::Exact, ..RunConfig::default() }.check().is_err());
        assert!(RunConfig { task: Task::Sweep, ..RunConfig::default() }.check().is_err());
        let warm = RunConfig { beta: 1.0, ..RunConfig::default() };
        assert!(matches!(warm.check(), Err(Error::Config { field, .. }) if field == "beta"));
    }

    #[test]
    fn json_round_trip_including_infinite_beta() {
        let cfg = RunConfig { dt: Some(63.7), eta: Some(0.9), dt_values: Some(vec![1.0, 0.1]), ..RunConfig::default() };
        let text = cfg.to_json();
        assert!(text.contains("\"beta\":\"inf\""));
        assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);
        let warm = RunConfig { beta: 2.5, task: Task::Dephasing, model: Model::Twolevel, ..RunConfig::default() };
        assert_eq!(RunConfig::from_json(&warm.to_json()).unwrap(), warm);
    }

    #[test]
    fn partial_documents_fill_defaults() {
        let cfg = RunConfig::from_json(r#"{"task": "rates-scan", "g": 0.002}"#).unwrap();
        assert_eq!(cfg.task, Task::RatesScan);
        assert_eq!(cfg.g, 0.002);
        assert_eq!(cfg.omega1, 0.095);
        assert!(RunConfig::from_json(r#"{"gg": 1}"#).is_err());
        assert!(RunConfig::from_json(r#"{"task": "fly"}"#).is_err());
    }

    #[test]
    fn sweep_entries_merge_and_validate() {
        let cfg = RunConfig {
            task: Task::Sweep,
            sweep: vec![
                serde_json::json!({"task": "rwa", "omega1": 0.2}),
                serde_json::json!({"task": "cg", "dt": 30.0}),
            ],
            ..RunConfig::default()
        };
        assert!(cfg.check().is_ok());
        let first = cfg.merged(&cfg.sweep[0]).unwrap();
        assert_eq!((first.task, first.omega1, first.omega2), (Task::Rwa, 0.2, 0.105));
        let bad = RunConfig { sweep: vec![serde_json::json!({"task": "cg"})], ..cfg };
        assert!(matches!(bad.check(), Err(Error::Config { field, .. }) if field == "sweep[0].dt"));
    }

    #[test]
    fn derived_defaults() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.bath().eta, 1.0);
        let s = cfg.search();
        assert_eq!((s.lo, s.hi, s.n_grid), (1.0, 500.0, 40));
        let rate = crate::bath::gamma_rwa(&cfg.bath(), 0.1);
        assert!((cfg.horizon() - 3.0 / rate).abs() < 1e-9 * cfg.horizon());
        assert_eq!(cfg.scan_dts().len(), 20);
    }
}
