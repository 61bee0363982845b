//! Closed-form test fields.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::Vec2;
use crate::{Error, Result};

/// A planar vector field `f = (f₁, f₂)`.
pub trait VectorField: Sync {
    fn eval(&self, p: Vec2) -> Vec2;
}

impl<F> VectorField for F
where
    F: Fn(Vec2) -> Vec2 + Sync,
{
    fn eval(&self, p: Vec2) -> Vec2 {
        self(p)
    }
}

/// The built-in phantoms. Experiments 1 and 2 share the divergence-free part
/// and differ in their gradient part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phantom {
    /// `∇ sin π(x²+y²) + fˢ`.
    Experiment1,
    /// `∇ arctan(y/(2+x)) + fˢ`.
    Experiment2,
    /// `fˢ` alone.
    Solenoidal,
    /// `∇ sin π(x²+y²)` alone.
    Gradient,
}

impl Phantom {
    pub fn field(self, p: Vec2) -> Vec2 {
        match self {
            Phantom::Experiment1 => ex1_gradient(p) + solenoidal(p),
            Phantom::Experiment2 => ex2_gradient(p) + solenoidal(p),
            Phantom::Solenoidal => solenoidal(p),
            Phantom::Gradient => ex1_gradient(p),
        }
    }

    /// Potential of the gradient part.
    pub fn potential(self, p: Vec2) -> Result<f64> {
        match self {
            Phantom::Experiment1 | Phantom::Gradient => Ok((PI * p.norm_sq()).sin()),
            Phantom::Experiment2 => Ok((p.y / (2.0 + p.x)).atan()),
            Phantom::Solenoidal => Err(Error::invalid("the solenoidal phantom has no potential")),
        }
    }

    /// The gradient part of the field, zero for [`Phantom::Solenoidal`].
    pub fn gradient_part(self, p: Vec2) -> Vec2 {
        match self {
            Phantom::Experiment1 | Phantom::Gradient => ex1_gradient(p),
            Phantom::Experiment2 => ex2_gradient(p),
            Phantom::Solenoidal => Vec2::ZERO,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Phantom::Experiment1 => "ex1",
            Phantom::Experiment2 => "ex2",
            Phantom::Solenoidal => "solenoidal",
            Phantom::Gradient => "gradient",
        }
    }
}

impl VectorField for Phantom {
    fn eval(&self, p: Vec2) -> Vec2 {
        self.field(p)
    }
}

impl fmt::Display for Phantom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Phantom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ex1" | "experiment1" => Ok(Phantom::Experiment1),
            "ex2" | "experiment2" => Ok(Phantom::Experiment2),
            "solenoidal" | "solenoidal-only" => Ok(Phantom::Solenoidal),
            "gradient" | "custom-gradient" => Ok(Phantom::Gradient),
            other => Err(Error::invalid(format!("unknown phantom `{other}`"))),
        }
    }
}

fn ex1_gradient(p: Vec2) -> Vec2 {
    let g = 2.0 * PI * (PI * p.norm_sq()).cos();
    g * p
}

fn ex2_gradient(p: Vec2) -> Vec2 {
    let u = 2.0 + p.x;
    let d = u * u + p.y * p.y;
    Vec2::new(-p.y / d, u / d)
}

fn solenoidal(p: Vec2) -> Vec2 {
    let (x, y) = (p.x, p.y);
    let r2 = x * x + y * y;
    let (s, c) = r2.sin_cos();
    let (s6, c6) = (6.0 * x * y).sin_cos();
    Vec2::new(
        2.0 * x * y * c + c6 - 6.0 * x * y * s6,
        -s - 2.0 * x * x * c + 6.0 * y * y * s6,
    )
}
