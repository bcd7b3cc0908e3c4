//! Boundary regimes at the two ends of the truncated mass interval.

use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Far-field state `(v, u, theta, b, w) = (1, 0, 1, 0, 0)`.
pub const FAR_FIELD_V: f64 = 1.0;
pub const FAR_FIELD_THETA: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryCondition {
    /// Far-field values imposed at both truncated ends.
    CauchyFarField,
    /// Left wall with `u = 0`, `theta = 1`, `b = w = 0`; far field on the right.
    IsothermalWallLeft,
    /// Left wall with `u = 0`, `theta_x = 0`, `b = w = 0`; far field on the right.
    InsulatedWallLeft,
}

impl BoundaryCondition {
    pub const ALL: [BoundaryCondition; 3] = [
        BoundaryCondition::CauchyFarField,
        BoundaryCondition::IsothermalWallLeft,
        BoundaryCondition::InsulatedWallLeft,
    ];

    pub fn has_left_wall(&self) -> bool {
        !matches!(self, BoundaryCondition::CauchyFarField)
    }

    pub fn values(&self) -> BoundaryValues {
        let left = match self {
            BoundaryCondition::CauchyFarField | BoundaryCondition::IsothermalWallLeft => {
                EndValues::far_field()
            }
            BoundaryCondition::InsulatedWallLeft => EndValues {
                theta: ThetaEnd::Insulated,
                ..EndValues::far_field()
            },
        };
        BoundaryValues {
            left,
            right: EndValues::far_field(),
        }
    }

    /// Default left edge of a domain of the given mass length: centred for
    /// the Cauchy problem, starting at the wall otherwise.
    pub fn default_left_edge(&self, length: f64) -> f64 {
        if self.has_left_wall() {
            0.0
        } else {
            -0.5 * length
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            BoundaryCondition::CauchyFarField => "cauchy",
            BoundaryCondition::IsothermalWallLeft => "isothermal_wall",
            BoundaryCondition::InsulatedWallLeft => "insulated_wall",
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cauchy" | "far_field" => Ok(BoundaryCondition::CauchyFarField),
            "isothermal_wall" => Ok(BoundaryCondition::IsothermalWallLeft),
            "insulated_wall" => Ok(BoundaryCondition::InsulatedWallLeft),
            other => Err(Error::InvalidParams(format!(
                "unknown boundary regime '{other}' (expected cauchy, isothermal_wall or insulated_wall)"
            ))),
        }
    }
}

/// Temperature condition at one end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaEnd {
    /// Face value of the temperature.
    Dirichlet(f64),
    /// Zero heat flux (mirror ghost cell).
    Insulated,
}

/// Values imposed at one end of the mesh: node values for the velocities,
/// face values for the cell-centred temperature and magnetic field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndValues {
    pub u: f64,
    pub w: [f64; 2],
    pub theta: ThetaEnd,
    pub b: [f64; 2],
}

impl EndValues {
    pub fn far_field() -> Self {
        Self {
            u: 0.0,
            w: [0.0; 2],
            theta: ThetaEnd::Dirichlet(FAR_FIELD_THETA),
            b: [0.0; 2],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryValues {
    pub left: EndValues,
    pub right: EndValues,
}
