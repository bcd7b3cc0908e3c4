//! Flat `key = value` run configuration.
//!
//! One assignment per line; `#` starts a comment; sections are dotted
//! prefixes. Unknown and repeated keys are errors. See the README for
//! the full key table and defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use mhd1d_core::diagnostics::Thresholds;
use mhd1d_core::{
    make_initial_state, BoundaryCondition, GasState, GaussianBump, Grid, InitialProfile, PhysicalParams, RandomBumps,
    StepControl,
};

use crate::snapshot;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: String,
    pub message: String,
}

impl ConfigError {
    fn new(line: Option<usize>, key: &str, message: impl Into<String>) -> Self {
        Self {
            line,
            key: key.to_string(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}: {}", self.key, self.message),
            None if self.key.is_empty() => write!(f, "{}", self.message),
            None => write!(f, "{}: {}", self.key, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSpec {
    Constant,
    Gaussian(Vec<GaussianBump>),
    Random { count: usize, scale: f64 },
    /// Snapshot base path (`<base>.cells.csv`, `<base>.nodes.csv`).
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub cells: usize,
    pub length: f64,
    /// `None`: the regime's default (centred domain, or wall at 0).
    pub left_edge: Option<f64>,
    pub bc: BoundaryCondition,
    pub normalized: bool,
    pub params: PhysicalParams,
    pub profile: ProfileSpec,
    /// Factor applied to every bump amplitude.
    pub amplitude: f64,
    pub seed: u64,
    pub t_end: f64,
    pub control: StepControl,
    pub out_dir: PathBuf,
    /// Snapshot spacing in time; 0 writes only the first and last state.
    pub snapshot_interval: f64,
    /// Write a diagnostics record every this many steps (the last step is
    /// always recorded).
    pub diagnostics_every: u64,
    pub anchor: Option<f64>,
    pub thresholds: Thresholds,
    pub sweep_max_runs: usize,
    pub sweep_workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            cells: 512,
            length: 32.0,
            left_edge: None,
            bc: BoundaryCondition::CauchyFarField,
            normalized: true,
            params: PhysicalParams::default(),
            profile: ProfileSpec::Constant,
            amplitude: 1.0,
            seed: 0,
            t_end: 1.0,
            control: StepControl::default(),
            out_dir: PathBuf::from("out"),
            snapshot_interval: 0.0,
            diagnostics_every: 1,
            anchor: None,
            thresholds: Thresholds::default(),
            sweep_max_runs: 64,
            sweep_workers: 1,
        }
    }
}

struct Entry {
    value: String,
    line: usize,
}

struct Table {
    entries: BTreeMap<String, Entry>,
}

impl Table {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::new(Some(line), content, "expected `key = value`"));
            };
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(ConfigError::new(Some(line), key, "malformed key"));
            }
            if value.is_empty() {
                return Err(ConfigError::new(Some(line), key, "missing value"));
            }
            if let Some(prev) = entries.insert(
                key.to_string(),
                Entry {
                    value: value.to_string(),
                    line,
                },
            ) {
                return Err(ConfigError::new(
                    Some(line),
                    key,
                    format!("repeated key (first set on line {})", prev.line),
                ));
            }
        }
        Ok(Self { entries })
    }

    fn take(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    fn parsed<T: std::str::FromStr>(&mut self, key: &str, what: &str) -> Result<Option<(T, usize)>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse::<T>()
                .map(|v| Some((v, e.line)))
                .map_err(|_| ConfigError::new(Some(e.line), key, format!("expected {what}, got `{}`", e.value))),
        }
    }

    fn float(&mut self, key: &str) -> Result<Option<(f64, usize)>, ConfigError> {
        let v = self.parsed::<f64>(key, "a number")?;
        if let Some((x, line)) = v {
            if !x.is_finite() {
                return Err(ConfigError::new(Some(line), key, "must be finite"));
            }
        }
        Ok(v)
    }
}

fn require(cond: bool, line: usize, key: &str, message: &str) -> Result<(), ConfigError> {
    if cond {
        Ok(())
    } else {
        Err(ConfigError::new(Some(line), key, message))
    }
}

const PARAM_KEYS: [&str; 9] = ["mu1", "mu2", "alpha", "kappa", "beta", "lambda", "nu", "r", "cv"];
const GENERAL_ONLY: [&str; 7] = ["mu1", "mu2", "kappa", "lambda", "nu", "r", "cv"];

fn bump_field<'a>(bump: &'a mut GaussianBump, field: &str) -> Option<&'a mut f64> {
    Some(match field {
        "v" => &mut bump.v,
        "u" => &mut bump.u,
        "theta" => &mut bump.theta,
        "b1" => &mut bump.b[0],
        "b2" => &mut bump.b[1],
        "w1" => &mut bump.w[0],
        "w2" => &mut bump.w[1],
        "center" => &mut bump.center,
        "width" => &mut bump.width,
        _ => return None,
    })
}

/// Parse and validate a configuration text.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut t = Table::parse(text)?;
    let mut c = RunConfig::default();

    if let Some((n, line)) = t.parsed::<usize>("grid.cells", "a whole number")? {
        require(n >= 4, line, "grid.cells", "must be >= 4")?;
        c.cells = n;
    }
    if let Some((x, line)) = t.float("grid.length")? {
        require(x > 0.0, line, "grid.length", "must be > 0")?;
        c.length = x;
    }
    c.left_edge = t.float("grid.left_edge")?.map(|(x, _)| x);
    if let Some(e) = t.take("bc") {
        c.bc = e
            .value
            .parse()
            .map_err(|_| ConfigError::new(Some(e.line), "bc", "expected cauchy, isothermal_wall or insulated_wall"))?;
    }

    // physical constants
    let preset = t.take("params.preset");
    c.normalized = match preset.as_ref().map(|e| e.value.as_str()) {
        None | Some("normalized") => true,
        Some("general") => false,
        Some(other) => {
            return Err(ConfigError::new(
                preset.as_ref().map(|e| e.line),
                "params.preset",
                format!("expected normalized or general, got `{other}`"),
            ))
        }
    };
    let mut values = BTreeMap::new();
    let mut first_line = None;
    for name in PARAM_KEYS {
        let key = format!("params.{name}");
        if let Some((x, line)) = t.float(&key)? {
            if c.normalized && GENERAL_ONLY.contains(&name) {
                return Err(ConfigError::new(
                    Some(line),
                    &key,
                    "only alpha and beta may be set with the normalized preset (use params.preset = general)",
                ));
            }
            first_line.get_or_insert(line);
            values.insert(name, x);
        }
    }
    let get = |name: &str, default: f64| values.get(name).copied().unwrap_or(default);
    let params = if c.normalized {
        PhysicalParams::normalized(get("alpha", 0.0), get("beta", 1.0))
    } else {
        let d = PhysicalParams::default();
        PhysicalParams::new(
            get("mu1", d.mu1),
            get("mu2", d.mu2),
            get("alpha", d.alpha),
            get("kappa", d.kappa),
            get("beta", d.beta),
            get("lambda", d.lambda),
            get("nu", d.nu),
            get("r", d.r),
            get("cv", d.cv),
        )
    };
    c.params = params.map_err(|e| ConfigError::new(first_line, "params", e.to_string()))?;

    // initial data
    let profile = t.take("initial.profile");
    let kind = profile.as_ref().map(|e| e.value.clone()).unwrap_or_else(|| "constant".into());
    let profile_line = profile.as_ref().map(|e| e.line);
    let bump_keys: Vec<String> = t
        .entries
        .keys()
        .filter(|k| k.starts_with("initial.bump."))
        .cloned()
        .collect();
    if kind != "gaussian" {
        if let Some(k) = bump_keys.first() {
            let line = t.entries[k].line;
            return Err(ConfigError::new(Some(line), k, "bump keys need initial.profile = gaussian"));
        }
    }
    c.profile = match kind.as_str() {
        "constant" => ProfileSpec::Constant,
        "gaussian" => {
            let mut bumps: BTreeMap<usize, GaussianBump> = BTreeMap::new();
            for key in bump_keys {
                let e = t.take(&key).expect("listed key");
                let rest = &key["initial.bump.".len()..];
                let parsed = rest
                    .split_once('.')
                    .and_then(|(i, field)| i.parse::<usize>().ok().map(|i| (i, field)));
                let Some((i, field)) = parsed else {
                    return Err(ConfigError::new(Some(e.line), &key, "expected initial.bump.<index>.<field>"));
                };
                let bump = bumps.entry(i).or_insert_with(|| GaussianBump::at(0.0, 1.0));
                let Some(slot) = bump_field(bump, field) else {
                    return Err(ConfigError::new(
                        Some(e.line),
                        &key,
                        "unknown bump field (v, u, theta, b1, b2, w1, w2, center, width)",
                    ));
                };
                let x: f64 = e
                    .value
                    .parse()
                    .ok()
                    .filter(|x: &f64| x.is_finite())
                    .ok_or_else(|| ConfigError::new(Some(e.line), &key, format!("expected a number, got `{}`", e.value)))?;
                if field == "width" {
                    require(x > 0.0, e.line, &key, "must be > 0")?;
                }
                *slot = x;
            }
            if bumps.is_empty() {
                return Err(ConfigError::new(profile_line, "initial.profile", "gaussian profile needs at least one initial.bump.<index>.* key"));
            }
            ProfileSpec::Gaussian(bumps.into_values().collect())
        }
        "random" => {
            let count = match t.parsed::<usize>("initial.random.count", "a whole number")? {
                Some((n, line)) => {
                    require(n >= 1, line, "initial.random.count", "must be >= 1")?;
                    n
                }
                None => 3,
            };
            let scale = match t.float("initial.random.scale")? {
                Some((x, line)) => {
                    require(x > 0.0 && x < 1.0, line, "initial.random.scale", "must lie in (0, 1)")?;
                    x
                }
                None => 0.5,
            };
            ProfileSpec::Random { count, scale }
        }
        "file" => match t.take("initial.file") {
            Some(e) => ProfileSpec::File(PathBuf::from(e.value)),
            None => return Err(ConfigError::new(profile_line, "initial.file", "file profile needs initial.file")),
        },
        other => {
            return Err(ConfigError::new(
                profile_line,
                "initial.profile",
                format!("expected constant, gaussian, random or file, got `{other}`"),
            ))
        }
    };
    for key in ["initial.random.count", "initial.random.scale", "initial.file"] {
        if let Some(e) = t.take(key) {
            return Err(ConfigError::new(Some(e.line), key, format!("not used by initial.profile = {kind}")));
        }
    }
    if let Some((x, _)) = t.float("initial.amplitude")? {
        c.amplitude = x;
    }
    if let Some((s, _)) = t.parsed::<u64>("seed", "a whole number")? {
        c.seed = s;
    }

    // time stepping
    if let Some((x, line)) = t.float("time.t_end")? {
        require(x > 0.0, line, "time.t_end", "must be > 0")?;
        c.t_end = x;
    }
    let mut ctl_line = None;
    for (key, slot) in [
        ("time.cfl", &mut c.control.cfl),
        ("time.dt_min", &mut c.control.dt_min),
        ("time.dt_max", &mut c.control.dt_max),
        ("time.newton_tol", &mut c.control.newton_tol),
    ] {
        if let Some((x, line)) = t.float(key)? {
            *slot = x;
            ctl_line.get_or_insert(line);
        }
    }
    for (key, slot) in [
        ("time.newton_max_iter", &mut c.control.newton_max_iter),
        ("time.retry_max", &mut c.control.retry_max),
    ] {
        if let Some((x, line)) = t.parsed::<usize>(key, "a whole number")? {
            *slot = x;
            ctl_line.get_or_insert(line);
        }
    }
    c.control
        .validate()
        .map_err(|e| ConfigError::new(ctl_line, "time", e.to_string()))?;

    // output
    if let Some(e) = t.take("output.dir") {
        c.out_dir = PathBuf::from(e.value);
    }
    if let Some((x, line)) = t.float("output.snapshot_interval")? {
        require(x >= 0.0, line, "output.snapshot_interval", "must be >= 0")?;
        c.snapshot_interval = x;
    }
    if let Some((n, line)) = t.parsed::<u64>("output.diagnostics_every", "a whole number")? {
        require(n >= 1, line, "output.diagnostics_every", "must be >= 1")?;
        c.diagnostics_every = n;
    }

    // diagnostics
    c.anchor = t.float("diagnostics.anchor")?.map(|(x, _)| x);
    let lo = t.float("diagnostics.theta_lo")?;
    let hi = t.float("diagnostics.theta_hi")?;
    if let Some((x, _)) = lo {
        c.thresholds.theta_lo = x;
    }
    if let Some((x, _)) = hi {
        c.thresholds.theta_hi = x;
    }
    let th_line = lo.or(hi).map(|(_, l)| l);
    if !(c.thresholds.theta_lo > 0.0 && c.thresholds.theta_lo < c.thresholds.theta_hi) {
        return Err(ConfigError::new(th_line, "diagnostics", "need 0 < theta_lo < theta_hi"));
    }

    // sweep
    if let Some((n, line)) = t.parsed::<usize>("sweep.max_runs", "a whole number")? {
        require(n >= 1, line, "sweep.max_runs", "must be >= 1")?;
        c.sweep_max_runs = n;
    }
    if let Some((n, line)) = t.parsed::<usize>("sweep.workers", "a whole number")? {
        require(n >= 1, line, "sweep.workers", "must be >= 1")?;
        c.sweep_workers = n;
    }

    if let Some((key, e)) = t.entries.iter().next() {
        return Err(ConfigError::new(Some(e.line), key, "unknown key"));
    }

    let grid = c.grid().map_err(|e| ConfigError::new(None, "grid", e.to_string()))?;
    if let Some(x) = c.anchor {
        if !(x >= grid.left_edge && x <= grid.right_edge()) {
            return Err(ConfigError::new(None, "diagnostics.anchor", "lies outside the mesh"));
        }
    }
    Ok(c)
}

impl RunConfig {
    pub fn grid(&self) -> mhd1d_core::Result<Grid> {
        let left = self.left_edge.unwrap_or_else(|| self.bc.default_left_edge(self.length));
        Grid::new(self.cells, self.length, left)
    }

    /// Set a sweep axis (`alpha`, `beta` or `amplitude`).
    pub fn set_axis(&mut self, name: &str, value: f64) -> Result<(), ConfigError> {
        match name {
            "alpha" => {
                self.params.alpha = value;
                if self.normalized {
                    self.params.mu2 = value;
                }
            }
            "beta" => self.params.beta = value,
            "amplitude" => self.amplitude = value,
            _ => {
                return Err(ConfigError::new(None, name, "unknown sweep axis (alpha, beta, amplitude)"));
            }
        }
        self.params
            .validate()
            .map_err(|e| ConfigError::new(None, name, e.to_string()))
    }

    /// Core profile for the mesh of this configuration (file profiles are
    /// loaded by [`RunConfig::initial_state`]).
    fn core_profile(&self) -> InitialProfile {
        match &self.profile {
            ProfileSpec::Constant => InitialProfile::Constant,
            ProfileSpec::Gaussian(bumps) => {
                InitialProfile::Gaussian(bumps.iter().map(|b| b.scaled(self.amplitude)).collect())
            }
            ProfileSpec::Random { scale, .. } if scale * self.amplitude == 0.0 => InitialProfile::Constant,
            ProfileSpec::Random { count, scale } => InitialProfile::Random(RandomBumps {
                count: *count,
                seed: self.seed,
                scale: scale * self.amplitude,
            }),
            ProfileSpec::File(_) => InitialProfile::Constant,
        }
    }

    /// Build and check the `t = 0` state. Snapshot files carry their own
    /// mesh, which then replaces the configured one.
    pub fn initial_state(&self) -> Result<GasState, ConfigError> {
        let state = match &self.profile {
            ProfileSpec::File(base) => {
                let loaded = snapshot::load_snapshot(base).map_err(|e| ConfigError::new(None, "initial.file", e.to_string()))?;
                make_initial_state(
                    loaded.grid,
                    &InitialProfile::Fields(loaded.into()),
                    self.bc,
                )
            }
            _ => {
                let grid = self.grid().map_err(|e| ConfigError::new(None, "grid", e.to_string()))?;
                make_initial_state(grid, &self.core_profile(), self.bc)
            }
        };
        state.map_err(|e| ConfigError::new(None, "initial", e.to_string()))
    }
}
