use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use mhd1d_core::diagnostics::Monitor;
use mhd1d_core::{run_until, GasState};
use serde_json::json;

use crate::config::RunConfig;
use crate::records::emit_diagnostics;
use crate::snapshot::emit_snapshot;
use crate::CliError;

pub const DIAGNOSTICS_FILE: &str = "diagnostics.jsonl";
pub const SUMMARY_FILE: &str = "summary.json";
pub const SNAPSHOT_DIR: &str = "snapshots";

/// Extremes and end values of one run, including runs that stopped on a
/// step failure.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub t_final: f64,
    pub steps: u64,
    pub min_v: f64,
    pub max_v: f64,
    pub min_theta: f64,
    pub max_theta: f64,
    pub min_dt: f64,
    pub final_e_entropy: f64,
    pub cumulative_w: f64,
    pub max_repr_residual: Option<f64>,
    /// Step failure that ended the run early.
    pub failure: Option<String>,
}

impl RunSummary {
    fn start(state: &GasState) -> Self {
        let (min_v, max_v) = state.v_range();
        let (min_theta, max_theta) = state.theta_range();
        Self {
            t_final: state.t,
            steps: 0,
            min_v,
            max_v,
            min_theta,
            max_theta,
            min_dt: f64::INFINITY,
            final_e_entropy: f64::NAN,
            cumulative_w: 0.0,
            max_repr_residual: None,
            failure: None,
        }
    }

    fn observe(&mut self, state: &GasState, dt: f64) {
        let (lo, hi) = state.v_range();
        self.min_v = self.min_v.min(lo);
        self.max_v = self.max_v.max(hi);
        let (lo, hi) = state.theta_range();
        self.min_theta = self.min_theta.min(lo);
        self.max_theta = self.max_theta.max(hi);
        self.min_dt = self.min_dt.min(dt);
        self.t_final = state.t;
        self.steps = state.step;
    }

    pub fn exit_code(&self) -> i32 {
        if self.failure.is_some() {
            crate::EXIT_STEP_FAILURE
        } else {
            0
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "t_final": self.t_final,
            "steps": self.steps,
            "min_v": self.min_v,
            "max_v": self.max_v,
            "min_theta": self.min_theta,
            "max_theta": self.max_theta,
            "min_dt": if self.min_dt.is_finite() { Some(self.min_dt) } else { None },
            "final_E_entropy": self.final_e_entropy,
            "W_cumulative": self.cumulative_w,
            "max_repr_residual": self.max_repr_residual,
            "failure": self.failure,
        })
    }

    pub fn describe(&self) -> String {
        let repr = self
            .max_repr_residual
            .map_or_else(|| "n/a (general constants)".to_string(), |r| format!("{r:.6e}"));
        let mut s = format!(
            "t = {} after {} steps\nv in [{:.6e}, {:.6e}], theta in [{:.6e}, {:.6e}]\nfinal E_entropy = {:.6e}, integral of W dt = {:.6e}\nmax representation residual = {repr}",
            self.t_final,
            self.steps,
            self.min_v,
            self.max_v,
            self.min_theta,
            self.max_theta,
            self.final_e_entropy,
            self.cumulative_w,
        );
        if let Some(f) = &self.failure {
            s.push_str(&format!("\nstopped: {f}"));
        }
        s
    }
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn snapshot_base(dir: &Path, name: &str) -> PathBuf {
    dir.join(SNAPSHOT_DIR).join(name)
}

/// Run one configuration, writing the diagnostics stream, snapshots and
/// summary under `out_dir`. Step failures end the run early and are
/// reported in the summary, not as an `Err`.
pub fn run(config: &RunConfig, out_dir: &Path) -> Result<RunSummary, CliError> {
    let state0 = config.initial_state().map_err(CliError::Config)?;
    fs::create_dir_all(out_dir.join(SNAPSHOT_DIR)).map_err(|e| io_error(out_dir, e))?;
    let diag_path = out_dir.join(DIAGNOSTICS_FILE);
    let mut stream = BufWriter::new(fs::File::create(&diag_path).map_err(|e| io_error(&diag_path, e))?);

    let p = config.params;
    let bc = config.bc;
    let mut monitor = Monitor::new(&state0, &p, bc.values(), config.thresholds, config.anchor)
        .map_err(|e| CliError::Config(crate::config::ConfigError {
            line: None,
            key: "diagnostics".into(),
            message: e.to_string(),
        }))?;
    let mut summary = RunSummary::start(&state0);

    let first = monitor.initial_record(&state0).map_err(|e| CliError::Step(e.to_string()))?;
    summary.final_e_entropy = first.e_entropy;
    summary.max_repr_residual = first.repr_residual_max;
    emit_diagnostics(&first, &mut stream).map_err(|e| io_error(&diag_path, e))?;
    emit_snapshot(&state0, &snapshot_base(out_dir, "snap_000000")).map_err(|e| CliError::Io(e.to_string()))?;

    let mut snap_index = 0u64;
    let interval = config.snapshot_interval;
    let mut next_snap = interval;
    let mut sink_error: Option<CliError> = None;
    let mut last_state: Option<GasState> = None;
    let t_end = config.t_end;

    let result = run_until(state0, t_end, &p, bc, &config.control, |s, r| {
        if sink_error.is_some() {
            return;
        }
        let outcome = (|| -> Result<(), CliError> {
            let w = monitor.advance(s, r).map_err(|e| CliError::Step(e.to_string()))?;
            summary.observe(s, r.dt_used);
            summary.cumulative_w += w * r.dt_used;
            let last = s.t == t_end;
            if last || s.step % config.diagnostics_every == 0 {
                let rec = monitor.record(s, r.dt_used, w).map_err(|e| CliError::Step(e.to_string()))?;
                summary.final_e_entropy = rec.e_entropy;
                if let Some(x) = rec.repr_residual_max {
                    summary.max_repr_residual = Some(summary.max_repr_residual.map_or(x, |m| m.max(x)));
                }
                emit_diagnostics(&rec, &mut stream).map_err(|e| io_error(&diag_path, e))?;
            }
            if interval > 0.0 && s.t >= next_snap {
                snap_index += 1;
                emit_snapshot(s, &snapshot_base(out_dir, &format!("snap_{snap_index:06}")))
                    .map_err(|e| CliError::Io(e.to_string()))?;
                while next_snap <= s.t {
                    next_snap += interval;
                }
            }
            Ok(())
        })();
        match outcome {
            Ok(()) => last_state = Some(s.clone()),
            Err(e) => sink_error = Some(e),
        }
    });
    stream.flush().map_err(|e| io_error(&diag_path, e))?;
    if let Some(e) = sink_error {
        return Err(e);
    }
    match result {
        Ok(end) => {
            emit_snapshot(&end, &snapshot_base(out_dir, "final")).map_err(|e| CliError::Io(e.to_string()))?;
            summary.final_e_entropy = mhd1d_core::diagnostics::energy_entropy(&end, &p).unwrap_or(summary.final_e_entropy);
        }
        Err(e) => {
            if let Some(s) = &last_state {
                emit_snapshot(s, &snapshot_base(out_dir, "last_good")).map_err(|e| CliError::Io(e.to_string()))?;
            }
            summary.failure = Some(e.to_string());
        }
    }
    let summary_path = out_dir.join(SUMMARY_FILE);
    let text = serde_json::to_string_pretty(&summary.to_json()).expect("summary serializes");
    fs::write(&summary_path, text + "\n").map_err(|e| io_error(&summary_path, e))?;
    Ok(summary)
}
