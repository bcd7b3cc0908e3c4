//! JSON-lines diagnostics stream: one object per record, keys sorted,
//! numbers in shortest round-trip form.

use std::io::Write;

use mhd1d_core::diagnostics::DiagnosticsRecord;
use serde_json::{json, Value};

pub fn record_json(r: &DiagnosticsRecord) -> Value {
    json!({
        "t": r.t,
        "step": r.step,
        "dt": r.dt,
        "E_entropy": r.e_entropy,
        "W": r.w,
        "W_cumulative": r.cumulative_w,
        "min_v": r.min_v,
        "max_v": r.max_v,
        "min_theta": r.min_theta,
        "max_theta": r.max_theta,
        "mass": r.mass,
        "momentum": r.momentum,
        "energy": r.energy,
        "mass_flux_total": r.mass_flux_total,
        "momentum_flux_total": r.momentum_flux_total,
        "energy_flux_total": r.energy_flux_total,
        "entropy_flux_total": r.entropy_flux_total,
        "measure_theta_low": r.measure_theta_low,
        "measure_theta_high": r.measure_theta_high,
        "slab_min": r.slab_min,
        "slab_max": r.slab_max,
        "slab_theta_min": r.slab_theta_min,
        "slab_theta_max": r.slab_theta_max,
        "repr_residual_max": r.repr_residual_max,
    })
}

/// Append one record as a line.
pub fn emit_diagnostics<W: Write>(record: &DiagnosticsRecord, stream: &mut W) -> std::io::Result<()> {
    serde_json::to_writer(&mut *stream, &record_json(record))?;
    stream.write_all(b"\n")
}
