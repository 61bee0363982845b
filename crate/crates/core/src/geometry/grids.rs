use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Vec2;
use crate::{Error, Result};

/// Which part of the unit circle carries measurement nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArcKind {
    /// The upper half-circle, traversed from `+1` to `-1`.
    UpperHalf,
    /// The whole circle, counterclockwise from angle 0.
    FullCircle,
}

impl ArcKind {
    fn parameter_range(self) -> (f64, f64) {
        match self {
            ArcKind::UpperHalf => (0.0, PI),
            ArcKind::FullCircle => (0.0, 2.0 * PI),
        }
    }
}

/// Midpoint nodes of a partition of an arc of the unit circle, parametrized
/// by angle so that `ζ(ω) = e^{iω}`, `ζ' = iζ` and `Δω` is arc length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcGrid {
    kind: ArcKind,
    params: Vec<f64>,
    weights: Vec<f64>,
    nodes: Vec<Vec2>,
}

impl ArcGrid {
    /// Uniform partition with `k` sub-arcs.
    pub fn uniform(kind: ArcKind, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::invalid(format!("arc grid needs K >= 2, got {k}")));
        }
        let (a, b) = kind.parameter_range();
        let breaks: Vec<f64> = (0..=k).map(|i| a + (b - a) * i as f64 / k as f64).collect();
        Self::from_partition(kind, &breaks)
    }

    /// Arbitrary increasing partition `α₀ < α₁ < … < α_K` of the parameter
    /// range of `kind`.
    pub fn from_partition(kind: ArcKind, breaks: &[f64]) -> Result<Self> {
        if breaks.len() < 3 {
            return Err(Error::invalid("arc partition needs at least two intervals"));
        }
        if breaks.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("arc partition must be strictly increasing"));
        }
        let (a, b) = kind.parameter_range();
        let (first, last) = (breaks[0], breaks[breaks.len() - 1]);
        if (first - a).abs() > 1e-12 || (last - b).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "arc partition must span [{a}, {b}], got [{first}, {last}]"
            )));
        }
        let params: Vec<f64> = breaks.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let weights = breaks.windows(2).map(|w| w[1] - w[0]).collect();
        let nodes = params.iter().map(|&w| Vec2::from_angle(w)).collect();
        Ok(ArcGrid {
            kind,
            params,
            weights,
            nodes,
        })
    }

    pub fn kind(&self) -> ArcKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, k: usize) -> Vec2 {
        self.nodes[k]
    }

    pub fn nodes(&self) -> &[Vec2] {
        &self.nodes
    }

    /// `ζ_k` as a complex number.
    pub fn zeta(&self, k: usize) -> Complex64 {
        self.nodes[k].to_complex()
    }

    /// `ζ'_k = iζ_k`.
    pub fn tangent(&self, k: usize) -> Complex64 {
        Complex64::i() * self.zeta(k)
    }

    /// Outward unit normal, `ν(ζ) = ζ` on the unit circle.
    pub fn normal(&self, k: usize) -> Vec2 {
        self.nodes[k]
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.weights[k]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn param(&self, k: usize) -> f64 {
        self.params[k]
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }
}

/// Arc grid of `k` uniform sub-arcs on the upper half-circle.
pub fn build_arc_grid(k: usize) -> Result<ArcGrid> {
    ArcGrid::uniform(ArcKind::UpperHalf, k)
}

/// Midpoint angles `φ_n = (n - 1/2)Δφ`, `Δφ = 2π/N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionGrid {
    step: f64,
    angles: Vec<f64>,
    dirs: Vec<Vec2>,
}

impl DirectionGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(Error::invalid(format!(
                "direction grid needs an even N >= 4, got {n}"
            )));
        }
        let step = 2.0 * PI / n as f64;
        let angles: Vec<f64> = (1..=n).map(|i| (i as f64 - 0.5) * step).collect();
        let dirs = angles.iter().map(|&p| Vec2::from_angle(p)).collect();
        Ok(DirectionGrid { step, angles, dirs })
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn angle(&self, n: usize) -> f64 {
        self.angles[n]
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn dir(&self, n: usize) -> Vec2 {
        self.dirs[n]
    }

    pub fn dirs(&self) -> &[Vec2] {
        &self.dirs
    }
}

pub fn build_direction_grid(n: usize) -> Result<DirectionGrid> {
    DirectionGrid::new(n)
}

/// Equispaced midpoints `x_j = -s + (j - 1/2)Δx` on the chord `(-s, s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChordGrid {
    half_length: f64,
    step: f64,
    nodes: Vec<f64>,
}

impl ChordGrid {
    pub fn new(j: usize, s: f64) -> Result<Self> {
        if j < 2 {
            return Err(Error::invalid(format!("chord grid needs J >= 2, got {j}")));
        }
        if !(s > 0.0) {
            return Err(Error::invalid(format!("chord half-length must be > 0, got {s}")));
        }
        let step = 2.0 * s / j as f64;
        let nodes = (1..=j).map(|i| -s + (i as f64 - 0.5) * step).collect();
        Ok(ChordGrid {
            half_length: s,
            step,
            nodes,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn node(&self, j: usize) -> f64 {
        self.nodes[j]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
}

pub fn build_chord_grid(j: usize, s: f64) -> Result<ChordGrid> {
    ChordGrid::new(j, s)
}
