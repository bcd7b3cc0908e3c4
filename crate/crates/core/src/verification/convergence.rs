use crate::solver::{run_fixed, StepControl};
use crate::{Error, GasState, Grid, PhysicalParams, Result};

use super::mms::{MmsDrive, MmsSolution};

/// Solution fields whose errors are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    V,
    U,
    Theta,
    W,
    B,
}

impl Field {
    pub const ALL: [Field; 5] = [Field::V, Field::U, Field::Theta, Field::W, Field::B];

    pub fn as_str(&self) -> &'static str {
        match self {
            Field::V => "v",
            Field::U => "u",
            Field::Theta => "theta",
            Field::W => "w",
            Field::B => "b",
        }
    }

    /// Discrete L² norm of `a − b` in this field (both transverse
    /// components together for `w` and `b`).
    pub fn l2_difference(&self, a: &GasState, b: &GasState) -> f64 {
        let dx = a.grid.dx;
        let sq = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum::<f64>();
        let sq2 = |x: &[[f64; 2]], y: &[[f64; 2]]| {
            x.iter()
                .zip(y)
                .map(|(p, q)| (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2))
                .sum::<f64>()
        };
        let s = match self {
            Field::V => sq(&a.v, &b.v),
            Field::U => sq(&a.u, &b.u),
            Field::Theta => sq(&a.theta, &b.theta),
            Field::W => sq2(&a.w, &b.w),
            Field::B => sq2(&a.b, &b.b),
        };
        (s * dx).sqrt()
    }
}

/// Largest pointwise difference over all fields.
pub fn max_field_difference(a: &GasState, b: &GasState) -> f64 {
    let d = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    let d2 = |x: &[[f64; 2]], y: &[[f64; 2]]| {
        x.iter()
            .zip(y)
            .map(|(p, q)| (p[0] - q[0]).abs().max((p[1] - q[1]).abs()))
            .fold(0.0, f64::max)
    };
    d(&a.v, &b.v)
        .max(d(&a.u, &b.u))
        .max(d(&a.theta, &b.theta))
        .max(d2(&a.w, &b.w))
        .max(d2(&a.b, &b.b))
}

/// How the step size follows the mesh width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeCoupling {
    /// `dt = c dx`
    Linear(f64),
    /// `dt = c dx²`
    Quadratic(f64),
}

impl TimeCoupling {
    fn dt(&self, dx: f64) -> f64 {
        match *self {
            TimeCoupling::Linear(c) => c * dx,
            TimeCoupling::Quadratic(c) => c * dx * dx,
        }
    }
}

/// A manufactured-solution run on `[left_edge, left_edge + length]` from
/// `t = 0` to `t_end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceProblem {
    pub solution: MmsSolution,
    pub params: PhysicalParams,
    pub length: f64,
    pub left_edge: f64,
    pub t_end: f64,
    pub coarse_cells: usize,
    pub coupling: TimeCoupling,
}

impl ConvergenceProblem {
    /// One wavelength of the generic solution on the unit interval.
    pub fn standard(params: PhysicalParams) -> Self {
        Self {
            solution: MmsSolution::generic(std::f64::consts::TAU),
            params,
            length: 1.0,
            left_edge: 0.0,
            t_end: 0.1,
            coarse_cells: 64,
            coupling: TimeCoupling::Quadratic(1.0),
        }
    }

    /// Run `cells` cells with `dt` shortened to land on `t_end`.
    fn run(&self, cells: usize, dt: f64) -> Result<(GasState, f64, usize)> {
        let grid = Grid::new(cells, self.length, self.left_edge)?;
        let drive = MmsDrive::new(self.solution, self.params, grid)?;
        let steps = (self.t_end / dt).ceil().max(1.0) as usize;
        let dt = self.t_end / steps as f64;
        let ctl = StepControl {
            dt_min: dt.min(StepControl::default().dt_min),
            dt_max: dt,
            ..StepControl::default()
        };
        let state0 = self.solution.sample(grid, 0.0);
        let out = run_fixed(state0, steps, dt, &self.params, &drive, &ctl, |_, _| {})?;
        Ok((out, dt, steps))
    }
}

/// Errors of one refinement level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelResult {
    pub cells: usize,
    pub dt: f64,
    pub steps: usize,
    /// Per field, in [`Field::ALL`] order.
    pub errors: [f64; 5],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub levels: Vec<LevelResult>,
    /// Least-squares order per field; `None` when every error is zero
    /// (the discretization is exact for that field).
    pub orders: [Option<f64>; 5],
}

impl ConvergenceReport {
    pub fn order(&self, f: Field) -> Option<f64> {
        self.orders[Field::ALL.iter().position(|&g| g == f).unwrap()]
    }

    /// Smallest order over fields that are not exact.
    pub fn min_order(&self) -> Option<f64> {
        self.orders.iter().flatten().copied().reduce(f64::min)
    }
}

/// Slope of `ln e` against `ln h` by least squares.
fn fitted_order(h: &[f64], e: &[f64]) -> Option<f64> {
    if e.iter().all(|&x| x == 0.0) {
        return None;
    }
    let xs: Vec<f64> = h.iter().map(|x| x.ln()).collect();
    let ys: Vec<f64> = e.iter().map(|x| x.max(f64::MIN_POSITIVE).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Some(sxy / sxx)
}

fn orders(h: &[f64], levels: &[LevelResult]) -> [Option<f64>; 5] {
    std::array::from_fn(|i| {
        let e: Vec<f64> = levels.iter().map(|l| l.errors[i]).collect();
        fitted_order(h, &e)
    })
}

fn check_levels(levels: usize) -> Result<()> {
    if levels < 3 {
        return Err(Error::Study(format!("a study needs at least 3 levels (got {levels})")));
    }
    Ok(())
}

/// Spatial study: meshes `M, 2M, 4M, …` with `dt` tied to `dx` by the
/// problem's coupling; errors against the exact solution at `t_end`.
/// Levels run concurrently.
pub fn convergence_study(problem: &ConvergenceProblem, levels: usize) -> Result<ConvergenceReport> {
    check_levels(levels)?;
    let results: Vec<Result<LevelResult>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..levels)
            .map(|i| {
                scope.spawn(move || {
                    let cells = problem.coarse_cells << i;
                    let dx = problem.length / cells as f64;
                    let (out, dt, steps) = problem
                        .run(cells, problem.coupling.dt(dx))
                        .map_err(|e| Error::Study(format!("level {i} (M = {cells}): {e}")))?;
                    let exact = problem.solution.sample(out.grid, problem.t_end);
                    Ok(LevelResult {
                        cells,
                        dt,
                        steps,
                        errors: Field::ALL.map(|f| f.l2_difference(&out, &exact)),
                    })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("study level panicked")).collect()
    });
    let levels = results.into_iter().collect::<Result<Vec<_>>>()?;
    let h: Vec<f64> = levels.iter().map(|l| problem.length / l.cells as f64).collect();
    Ok(ConvergenceReport {
        orders: orders(&h, &levels),
        levels,
    })
}

/// Temporal study at fixed `cells`: steps `dt0, dt0/2, …`. The spatial
/// error is common to every level, so the order is fitted to differences
/// of successive solutions; `errors` of level `i` hold `|U_i − U_{i+1}|`
/// and the finest level is only used as a comparison.
pub fn temporal_study(problem: &ConvergenceProblem, cells: usize, dt0: f64, levels: usize) -> Result<ConvergenceReport> {
    check_levels(levels)?;
    let runs: Vec<Result<(GasState, f64, usize)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..levels)
            .map(|i| {
                scope.spawn(move || {
                    problem
                        .run(cells, dt0 / (1u64 << i) as f64)
                        .map_err(|e| Error::Study(format!("level {i} (dt = {:e}): {e}", dt0 / (1u64 << i) as f64)))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("study level panicked")).collect()
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let levels: Vec<LevelResult> = runs
        .windows(2)
        .map(|pair| LevelResult {
            cells,
            dt: pair[0].1,
            steps: pair[0].2,
            errors: Field::ALL.map(|f| f.l2_difference(&pair[0].0, &pair[1].0)),
        })
        .collect();
    let h: Vec<f64> = levels.iter().map(|l| l.dt).collect();
    Ok(ConvergenceReport {
        orders: orders(&h, &levels),
        levels,
    })
}
