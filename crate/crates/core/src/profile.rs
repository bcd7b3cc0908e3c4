//! Initial data: constant equilibrium, sums of Gaussian bumps (explicit or
//! seeded-random) and externally supplied fields.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{BoundaryCondition, Error, GasState, Grid, Result};

/// Wall and far-field compatibility tolerance on the initial data.
pub const COMPATIBILITY_TOL: f64 = 1e-12;

/// One Gaussian perturbation `amp * exp(-((x - center) / width)^2)` added
/// to every field's far-field value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBump {
    pub center: f64,
    pub width: f64,
    pub v: f64,
    pub u: f64,
    pub theta: f64,
    pub b: [f64; 2],
    pub w: [f64; 2],
}

impl GaussianBump {
    pub fn at(center: f64, width: f64) -> Self {
        Self {
            center,
            width,
            v: 0.0,
            u: 0.0,
            theta: 0.0,
            b: [0.0; 2],
            w: [0.0; 2],
        }
    }

    #[inline]
    pub fn shape(&self, x: f64) -> f64 {
        let z = (x - self.center) / self.width;
        (-z * z).exp()
    }

    /// Multiply every amplitude by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            v: self.v * factor,
            u: self.u * factor,
            theta: self.theta * factor,
            b: [self.b[0] * factor, self.b[1] * factor],
            w: [self.w[0] * factor, self.w[1] * factor],
            ..*self
        }
    }
}

/// Seeded random sum of Gaussian bumps. The generated bumps keep `v` and
/// `theta` bounded below by `1 - 0.6 * scale` and stay at least six widths
/// away from both ends of the mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomBumps {
    pub count: usize,
    pub seed: u64,
    pub scale: f64,
}

impl RandomBumps {
    const MIN_WIDTH: f64 = 0.5;
    const MAX_WIDTH: f64 = 1.5;
    const MARGIN_WIDTHS: f64 = 6.0;

    pub fn generate(&self, grid: &Grid) -> Result<Vec<GaussianBump>> {
        if self.count == 0 {
            return Ok(Vec::new());
        }
        if !(self.scale > 0.0 && self.scale < 1.0 / 0.6) {
            return Err(Error::InvalidProfile(format!(
                "random bump scale must lie in (0, 1/0.6) (got {})",
                self.scale
            )));
        }
        let margin = Self::MARGIN_WIDTHS * Self::MAX_WIDTH;
        let lo = grid.left_edge + margin;
        let hi = grid.right_edge() - margin;
        if hi <= lo {
            return Err(Error::InvalidProfile(format!(
                "domain of length {} is too short for random bumps (need > {})",
                grid.length(),
                2.0 * margin
            )));
        }
        let n = self.count as f64;
        let s = self.scale;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let bumps = (0..self.count)
            .map(|_| {
                let mut bump = GaussianBump::at(
                    rng.gen_range(lo..hi),
                    rng.gen_range(Self::MIN_WIDTH..Self::MAX_WIDTH),
                );
                bump.v = s * rng.gen_range(-0.6 / n..1.0);
                bump.theta = s * rng.gen_range(-0.6 / n..1.0);
                bump.u = s * rng.gen_range(-0.5..0.5);
                bump.b = [s * rng.gen_range(-0.5..0.5), s * rng.gen_range(-0.5..0.5)];
                bump.w = [s * rng.gen_range(-0.5..0.5), s * rng.gen_range(-0.5..0.5)];
                bump
            })
            .collect();
        Ok(bumps)
    }
}

/// Explicit field values on the staggered mesh (e.g. loaded from a snapshot).
#[derive(Debug, Clone, PartialEq)]
pub struct FieldData {
    pub v: Vec<f64>,
    pub theta: Vec<f64>,
    pub b: Vec<[f64; 2]>,
    pub u: Vec<f64>,
    pub w: Vec<[f64; 2]>,
}

impl From<GasState> for FieldData {
    fn from(s: GasState) -> Self {
        Self {
            v: s.v,
            theta: s.theta,
            b: s.b,
            u: s.u,
            w: s.w,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialProfile {
    Constant,
    Gaussian(Vec<GaussianBump>),
    Random(RandomBumps),
    Fields(FieldData),
}

/// Build the `t = 0` state for `profile` on `grid`, checked against the
/// positivity requirement and the compatibility conditions of `bc`.
pub fn make_initial_state(
    grid: Grid,
    profile: &InitialProfile,
    bc: BoundaryCondition,
) -> Result<GasState> {
    let mut state = match profile {
        InitialProfile::Constant => GasState::reference(grid),
        InitialProfile::Gaussian(bumps) => from_bumps(grid, bumps),
        InitialProfile::Random(spec) => from_bumps(grid, &spec.generate(&grid)?),
        InitialProfile::Fields(data) => {
            let s = GasState {
                grid,
                v: data.v.clone(),
                theta: data.theta.clone(),
                b: data.b.clone(),
                u: data.u.clone(),
                w: data.w.clone(),
                t: 0.0,
                step: 0,
            };
            s.check_shape()
                .map_err(|e| Error::InvalidProfile(e.to_string()))?;
            s
        }
    };

    check_positive("v", &state.v)?;
    check_positive("theta", &state.theta)?;
    check_finite(&state)?;
    enforce_compatibility(&mut state, bc)?;
    Ok(state)
}

fn from_bumps(grid: Grid, bumps: &[GaussianBump]) -> GasState {
    let mut s = GasState::reference(grid);
    for bump in bumps {
        for c in 0..grid.cells {
            let g = bump.shape(grid.center(c));
            s.v[c] += bump.v * g;
            s.theta[c] += bump.theta * g;
            s.b[c][0] += bump.b[0] * g;
            s.b[c][1] += bump.b[1] * g;
        }
        for j in 0..grid.nodes() {
            let g = bump.shape(grid.node(j));
            s.u[j] += bump.u * g;
            s.w[j][0] += bump.w[0] * g;
            s.w[j][1] += bump.w[1] * g;
        }
    }
    s
}

fn check_positive(name: &str, values: &[f64]) -> Result<()> {
    if let Some((i, &x)) = values.iter().enumerate().find(|(_, &x)| !(x > 0.0)) {
        return Err(Error::InvalidProfile(format!(
            "{name} must be strictly positive; cell {i} has {name} = {x}"
        )));
    }
    Ok(())
}

fn check_finite(s: &GasState) -> Result<()> {
    let all_finite = s.b.iter().chain(&s.w).all(|x| x[0].is_finite() && x[1].is_finite())
        && s.u.iter().all(|x| x.is_finite())
        && s.v.iter().chain(&s.theta).all(|x| x.is_finite());
    if all_finite {
        Ok(())
    } else {
        Err(Error::InvalidProfile("non-finite field value".into()))
    }
}

/// End nodes carry Dirichlet velocities (zero at walls and in the far
/// field); a wall additionally needs `b = 0` in the adjacent cell.
fn enforce_compatibility(s: &mut GasState, bc: BoundaryCondition) -> Result<()> {
    let last = s.grid.cells;
    for (j, side) in [(0usize, "left"), (last, "right")] {
        let wall = j == 0 && bc.has_left_wall();
        let what = if wall { "wall" } else { "far-field end" };
        let vals = [s.u[j], s.w[j][0], s.w[j][1]];
        if let Some(x) = vals.iter().find(|x| x.abs() > COMPATIBILITY_TOL) {
            return Err(Error::InvalidProfile(format!(
                "{side} {what}: node velocity {x:e} is incompatible with u = w = 0 (tolerance {COMPATIBILITY_TOL:e})"
            )));
        }
        if wall {
            let b = s.b[0];
            if b[0].abs() > COMPATIBILITY_TOL || b[1].abs() > COMPATIBILITY_TOL {
                return Err(Error::InvalidProfile(format!(
                    "left wall: adjacent cell has b = ({:e}, {:e}), incompatible with b = 0",
                    b[0], b[1]
                )));
            }
        }
        // -0.0 == 0.0 leaves signed zeros untouched, so ingested files stay bit-equal.
        let [w0, w1] = &mut s.w[j];
        for x in [&mut s.u[j], w0, w1] {
            if *x != 0.0 {
                *x = 0.0;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(64, 32.0, -16.0).unwrap()
    }

    #[test]
    fn constant_profile_is_the_far_field_state() {
        for bc in BoundaryCondition::ALL {
            let g = Grid::new(16, 16.0, bc.default_left_edge(16.0)).unwrap();
            let s = make_initial_state(g, &InitialProfile::Constant, bc).unwrap();
            assert!(s.v.iter().chain(&s.theta).all(|&x| x == 1.0));
            assert!(s.u.iter().all(|&x| x == 0.0));
            assert!(s.b.iter().chain(&s.w).all(|x| *x == [0.0, 0.0]));
            assert_eq!((s.t, s.step), (0.0, 0));
        }
    }

    #[test]
    fn theta_dip_to_five_percent_is_accepted_but_full_dip_is_not() {
        let mut bump = GaussianBump::at(0.0, 2.0);
        bump.theta = -0.95;
        let g = Grid::new(65, 32.5, -16.25).unwrap(); // cell centre at x = 0
        let s = make_initial_state(
            g,
            &InitialProfile::Gaussian(vec![bump]),
            BoundaryCondition::CauchyFarField,
        )
        .unwrap();
        let (lo, _) = s.theta_range();
        assert!((lo - 0.05).abs() < 1e-12);

        bump.theta = -1.0;
        let err = make_initial_state(
            g,
            &InitialProfile::Gaussian(vec![bump]),
            BoundaryCondition::CauchyFarField,
        )
        .unwrap_err();
        assert!(err.to_string().contains("theta"), "{err}");
    }

    #[test]
    fn file_fields_are_ingested_bit_exactly() {
        let g = Grid::new(16, 16.0, -8.0).unwrap();
        let mut data = FieldData::from(GasState::reference(g));
        for c in 0..16 {
            data.v[c] = 1.0 + 0.1 * (c as f64).sin();
            data.theta[c] = 1.0 + 0.01 * c as f64;
            data.b[c] = [0.3 * (c as f64).cos(), -1e-3 * c as f64];
        }
        for j in 1..16 {
            data.u[j] = 0.1 / j as f64;
            data.w[j] = [-0.2 / j as f64, 0.0];
        }
        data.u[0] = -0.0;
        let s = make_initial_state(
            g,
            &InitialProfile::Fields(data.clone()),
            BoundaryCondition::CauchyFarField,
        )
        .unwrap();
        assert_eq!(FieldData::from(s.clone()), data);
        assert!(s.u[0].is_sign_negative());
    }

    #[test]
    fn file_fields_with_wrong_length_are_rejected() {
        let g = Grid::new(16, 16.0, -8.0).unwrap();
        let mut data = FieldData::from(GasState::reference(g));
        data.theta.push(1.0);
        assert!(make_initial_state(g, &InitialProfile::Fields(data), BoundaryCondition::CauchyFarField).is_err());
    }

    #[test]
    fn wall_rejects_velocity_or_field_at_the_wall() {
        let g = Grid::new(32, 16.0, 0.0).unwrap();
        for bc in [BoundaryCondition::IsothermalWallLeft, BoundaryCondition::InsulatedWallLeft] {
            let mut bump = GaussianBump::at(1.0, 1.0);
            bump.u = 0.5;
            let err = make_initial_state(g, &InitialProfile::Gaussian(vec![bump]), bc).unwrap_err();
            assert!(err.to_string().contains("wall"), "{err}");

            let mut bump = GaussianBump::at(1.0, 1.0);
            bump.b = [0.0, 0.2];
            assert!(make_initial_state(g, &InitialProfile::Gaussian(vec![bump]), bc).is_err());

            // temperature and volume perturbations at the wall are admissible
            let mut bump = GaussianBump::at(0.0, 1.0);
            bump.theta = 0.5;
            bump.v = -0.3;
            assert!(make_initial_state(g, &InitialProfile::Gaussian(vec![bump]), bc).is_ok());
        }
    }

    #[test]
    fn random_bumps_are_reproducible_and_positive() {
        let spec = RandomBumps {
            count: 4,
            seed: 7,
            scale: 1.0,
        };
        let a = make_initial_state(grid(), &InitialProfile::Random(spec), BoundaryCondition::CauchyFarField).unwrap();
        let b = make_initial_state(grid(), &InitialProfile::Random(spec), BoundaryCondition::CauchyFarField).unwrap();
        assert_eq!(a, b);
        assert!(a.v_range().0 >= 0.4 && a.theta_range().0 >= 0.4);
        let other = RandomBumps { seed: 8, ..spec };
        let c = make_initial_state(grid(), &InitialProfile::Random(other), BoundaryCondition::CauchyFarField).unwrap();
        assert_ne!(a, c);
        let wall = Grid::new(64, 32.0, 0.0).unwrap();
        assert!(make_initial_state(wall, &InitialProfile::Random(spec), BoundaryCondition::InsulatedWallLeft).is_ok());
    }
}
