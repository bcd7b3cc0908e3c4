//! Cartesian-product parameter sweeps over `alpha`, `beta` and the bump
//! `amplitude`, each run isolated in its own subdirectory.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::config::{ConfigError, RunConfig};
use crate::run::run;
use crate::{CliError, EXIT_CONFIG};

pub const AXES: [&str; 3] = ["alpha", "beta", "amplitude"];
pub const SUMMARY_FILE: &str = "sweep_summary.csv";
pub const SUMMARY_HEADER: &str =
    "run,alpha,beta,amplitude,exit_status,min_v,min_theta,final_E_entropy,max_repr_residual";

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

/// Parse `name=v1,v2,...`.
pub fn parse_axis(text: &str) -> Result<Axis, ConfigError> {
    let bad = |msg: &str| ConfigError {
        line: None,
        key: format!("--axis {text}"),
        message: msg.to_string(),
    };
    let (name, list) = text.split_once('=').ok_or_else(|| bad("expected name=v1,v2,..."))?;
    let name = name.trim();
    if !AXES.contains(&name) {
        return Err(bad("unknown axis (alpha, beta, amplitude)"));
    }
    let values = list
        .split(',')
        .map(|v| v.trim().parse::<f64>().ok().filter(|x| x.is_finite()))
        .collect::<Option<Vec<f64>>>()
        .filter(|v| !v.is_empty())
        .ok_or_else(|| bad("values must be a comma-separated list of numbers"))?;
    Ok(Axis {
        name: name.to_string(),
        values,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub run: String,
    pub alpha: f64,
    pub beta: f64,
    pub amplitude: f64,
    pub exit_status: i32,
    pub min_v: f64,
    pub min_theta: f64,
    pub final_e_entropy: f64,
    pub max_repr_residual: Option<f64>,
    pub message: Option<String>,
}

impl SweepRow {
    fn csv(&self) -> String {
        let num = |x: f64| if x.is_finite() { format!("{x:e}") } else { String::new() };
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.run,
            self.alpha,
            self.beta,
            self.amplitude,
            self.exit_status,
            num(self.min_v),
            num(self.min_theta),
            num(self.final_e_entropy),
            self.max_repr_residual.map_or(String::new(), num),
        )
    }
}

/// All `(alpha, beta, amplitude)` combinations, axes varying slowest to
/// fastest in that order. Axes not given keep the template's value.
pub fn combinations(template: &RunConfig, axes: &[Axis]) -> Result<Vec<[f64; 3]>, ConfigError> {
    let mut lists: Vec<Vec<f64>> = vec![
        vec![template.params.alpha],
        vec![template.params.beta],
        vec![template.amplitude],
    ];
    let mut seen = [false; 3];
    for axis in axes {
        let i = AXES.iter().position(|a| *a == axis.name).ok_or_else(|| ConfigError {
            line: None,
            key: axis.name.clone(),
            message: "unknown axis".into(),
        })?;
        if seen[i] {
            return Err(ConfigError {
                line: None,
                key: axis.name.clone(),
                message: "axis given twice".into(),
            });
        }
        seen[i] = true;
        lists[i] = axis.values.clone();
    }
    let mut out = Vec::new();
    for &a in &lists[0] {
        for &b in &lists[1] {
            for &x in &lists[2] {
                out.push([a, b, x]);
            }
        }
    }
    Ok(out)
}

fn one(template: &RunConfig, combo: [f64; 3], name: String, dir: &Path) -> SweepRow {
    let mut row = SweepRow {
        run: name,
        alpha: combo[0],
        beta: combo[1],
        amplitude: combo[2],
        exit_status: 0,
        min_v: f64::NAN,
        min_theta: f64::NAN,
        final_e_entropy: f64::NAN,
        max_repr_residual: None,
        message: None,
    };
    let mut cfg = template.clone();
    let set = AXES
        .iter()
        .zip(combo)
        .try_for_each(|(axis, value)| cfg.set_axis(axis, value));
    if let Err(e) = set {
        row.exit_status = EXIT_CONFIG;
        row.message = Some(e.to_string());
        return row;
    }
    match run(&cfg, dir) {
        Ok(s) => {
            row.exit_status = s.exit_code();
            row.min_v = s.min_v;
            row.min_theta = s.min_theta;
            row.final_e_entropy = s.final_e_entropy;
            row.max_repr_residual = s.max_repr_residual;
            row.message = s.failure;
        }
        Err(e) => {
            row.exit_status = e.code();
            row.message = Some(e.to_string());
        }
    }
    row
}

/// Run every combination (in `template.sweep_workers` threads) and write
/// the summary CSV. Refuses before running anything when the product
/// exceeds `template.sweep_max_runs`.
pub fn sweep(template: &RunConfig, axes: &[Axis], out_dir: &Path) -> Result<Vec<SweepRow>, CliError> {
    let combos = combinations(template, axes).map_err(CliError::Config)?;
    if combos.len() > template.sweep_max_runs {
        return Err(CliError::Config(ConfigError {
            line: None,
            key: "sweep.max_runs".into(),
            message: format!(
                "{} combinations exceed the cap of {}",
                combos.len(),
                template.sweep_max_runs
            ),
        }));
    }
    fs::create_dir_all(out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;

    let width = combos.len().to_string().len().max(3);
    let names: Vec<String> = (0..combos.len()).map(|i| format!("run_{i:0width$}")).collect();
    let rows: Mutex<Vec<Option<SweepRow>>> = Mutex::new(vec![None; combos.len()]);
    let next = AtomicUsize::new(0);
    let workers = template.sweep_workers.clamp(1, combos.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= combos.len() {
                    break;
                }
                let dir: PathBuf = out_dir.join(&names[i]);
                let row = one(template, combos[i], names[i].clone(), &dir);
                rows.lock().expect("sweep rows")[i] = Some(row);
            });
        }
    });
    let rows: Vec<SweepRow> = rows
        .into_inner()
        .expect("sweep rows")
        .into_iter()
        .map(|r| r.expect("every combination ran"))
        .collect();

    let mut text = String::from(SUMMARY_HEADER);
    text.push('\n');
    for r in &rows {
        text.push_str(&r.csv());
        text.push('\n');
    }
    let path = out_dir.join(SUMMARY_FILE);
    fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(rows)
}
