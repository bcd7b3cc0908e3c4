//! CSV field snapshots: `<base>.cells.csv` holds `x_center,v,theta,b1,b2`
//! and `<base>.nodes.csv` holds `x_node,u,w1,w2`. Both start with `#`
//! header lines carrying the time, step and mesh, and every number is
//! written with 17 significant digits so loading is exact.

use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use mhd1d_core::{GasState, Grid};

pub const CELL_HEADER: &str = "x_center,v,theta,b1,b2";
pub const NODE_HEADER: &str = "x_node,u,w1,w2";

#[derive(Debug)]
pub struct SnapshotError {
    pub path: PathBuf,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for SnapshotError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "{}:{l}: {}", self.path.display(), self.message),
            None => write!(f, "{}: {}", self.path.display(), self.message),
        }
    }
}

impl std::error::Error for SnapshotError {}

fn err(path: &Path, line: Option<usize>, message: impl Into<String>) -> SnapshotError {
    SnapshotError {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// `<base>.cells.csv` and `<base>.nodes.csv`.
pub fn snapshot_paths(base: &Path) -> (PathBuf, PathBuf) {
    let with = |suffix: &str| {
        let mut s = base.as_os_str().to_owned();
        s.push(suffix);
        PathBuf::from(s)
    };
    (with(".cells.csv"), with(".nodes.csv"))
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn header(state: &GasState) -> String {
    let g = &state.grid;
    format!(
        "# t={}\n# step={}\n# cells={}\n# dx={}\n# left_edge={}\n",
        num(state.t),
        state.step,
        g.cells,
        num(g.dx),
        num(g.left_edge)
    )
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>) -> Result<(), SnapshotError> {
    let file = fs::File::create(path).map_err(|e| err(path, None, e.to_string()))?;
    let mut w = BufWriter::new(file);
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| err(path, None, e.to_string()))
}

pub fn emit_snapshot(state: &GasState, base: &Path) -> Result<(), SnapshotError> {
    let (cells, nodes) = snapshot_paths(base);
    let head = header(state);
    write_file(&cells, |w| {
        write!(w, "{head}{CELL_HEADER}\n")?;
        for c in 0..state.grid.cells {
            writeln!(
                w,
                "{},{},{},{},{}",
                num(state.grid.center(c)),
                num(state.v[c]),
                num(state.theta[c]),
                num(state.b[c][0]),
                num(state.b[c][1])
            )?;
        }
        Ok(())
    })?;
    write_file(&nodes, |w| {
        write!(w, "{head}{NODE_HEADER}\n")?;
        for j in 0..state.grid.nodes() {
            writeln!(
                w,
                "{},{},{},{}",
                num(state.grid.node(j)),
                num(state.u[j]),
                num(state.w[j][0]),
                num(state.w[j][1])
            )?;
        }
        Ok(())
    })
}

#[derive(Debug, Default, PartialEq)]
struct Meta {
    t: Option<f64>,
    step: Option<u64>,
    cells: Option<usize>,
    dx: Option<f64>,
    left_edge: Option<f64>,
}

struct Table {
    meta: Meta,
    rows: Vec<Vec<f64>>,
}

fn read_table(path: &Path, columns: &str) -> Result<Table, SnapshotError> {
    let text = fs::read_to_string(path).map_err(|e| err(path, None, e.to_string()))?;
    let width = columns.split(',').count();
    let mut meta = Meta::default();
    let mut rows = Vec::new();
    let mut seen_header = false;
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let Some((k, v)) = rest.trim().split_once('=') else {
                continue;
            };
            let bad = || err(path, Some(n), format!("malformed header value `{v}`"));
            match k.trim() {
                "t" => meta.t = Some(v.trim().parse().map_err(|_| bad())?),
                "step" => meta.step = Some(v.trim().parse().map_err(|_| bad())?),
                "cells" => meta.cells = Some(v.trim().parse().map_err(|_| bad())?),
                "dx" => meta.dx = Some(v.trim().parse().map_err(|_| bad())?),
                "left_edge" => meta.left_edge = Some(v.trim().parse().map_err(|_| bad())?),
                _ => {}
            }
            continue;
        }
        if !seen_header {
            if line != columns {
                return Err(err(path, Some(n), format!("expected column header `{columns}`, found `{line}`")));
            }
            seen_header = true;
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| err(path, Some(n), format!("malformed row `{line}`")))?;
        if row.len() != width {
            return Err(err(path, Some(n), format!("expected {width} columns, found {}", row.len())));
        }
        rows.push(row);
    }
    if !seen_header {
        return Err(err(path, None, format!("missing column header `{columns}`")));
    }
    Ok(Table { meta, rows })
}

/// Exact inverse of [`emit_snapshot`].
pub fn load_snapshot(base: &Path) -> Result<GasState, SnapshotError> {
    let (cells_path, nodes_path) = snapshot_paths(base);
    let cells = read_table(&cells_path, CELL_HEADER)?;
    let nodes = read_table(&nodes_path, NODE_HEADER)?;
    if cells.meta != nodes.meta {
        return Err(err(&nodes_path, None, "header does not match the cell file"));
    }
    let m = cells.rows.len();
    let grid = match (cells.meta.cells, cells.meta.dx, cells.meta.left_edge) {
        (Some(n), Some(dx), Some(left)) => {
            if n != m {
                return Err(err(&cells_path, None, format!("header says {n} cells, file has {m} rows")));
            }
            Grid::new(n, dx * n as f64, left).map_err(|e| err(&cells_path, None, e.to_string()))?;
            Grid {
                cells: n,
                dx,
                left_edge: left,
            }
        }
        _ => {
            // no mesh header: rebuild from the coordinates
            if m < Grid::MIN_CELLS || nodes.rows.len() != m + 1 {
                return Err(err(&cells_path, None, "cannot infer the mesh from the coordinates"));
            }
            let left = nodes.rows[0][0];
            let length = nodes.rows[m][0] - left;
            Grid::new(m, length, left).map_err(|e| err(&cells_path, None, e.to_string()))?
        }
    };
    if nodes.rows.len() != m + 1 {
        return Err(err(
            &nodes_path,
            None,
            format!("{m} cells need {} node rows, found {}", m + 1, nodes.rows.len()),
        ));
    }
    let tol = 1e-9 * grid.dx;
    for (c, row) in cells.rows.iter().enumerate() {
        if (row[0] - grid.center(c)).abs() > tol {
            return Err(err(&cells_path, None, format!("row {} is not at cell centre {}", c + 1, grid.center(c))));
        }
    }
    for (j, row) in nodes.rows.iter().enumerate() {
        if (row[0] - grid.node(j)).abs() > tol {
            return Err(err(&nodes_path, None, format!("row {} is not at node {}", j + 1, grid.node(j))));
        }
    }
    Ok(GasState {
        grid,
        v: cells.rows.iter().map(|r| r[1]).collect(),
        theta: cells.rows.iter().map(|r| r[2]).collect(),
        b: cells.rows.iter().map(|r| [r[3], r[4]]).collect(),
        u: nodes.rows.iter().map(|r| r[1]).collect(),
        w: nodes.rows.iter().map(|r| [r[2], r[3]]).collect(),
        t: cells.meta.t.unwrap_or(0.0),
        step: cells.meta.step.unwrap_or(0),
    })
}
