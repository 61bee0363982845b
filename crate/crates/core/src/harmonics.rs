//! Negative angular Fourier modes of boundary data and the mode tables used
//! on the arc, on the chord and at centroids.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::DirectionGrid;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    /// Modes `-2, -4, …, -2M`.
    Even,
    /// Modes `-1, -3, …, -2M+1`.
    Odd,
}

impl Parity {
    /// Mode number of slot `p`.
    pub fn mode(self, p: usize) -> i32 {
        match self {
            Parity::Even => -2 - 2 * p as i32,
            Parity::Odd => -1 - 2 * p as i32,
        }
    }

    /// Slot of mode `m`, if `m` has this parity and is negative.
    pub fn slot(self, m: i32) -> Option<usize> {
        let (base, ok) = match self {
            Parity::Even => (-2, m <= -2 && m % 2 == 0),
            Parity::Odd => (-1, m <= -1 && m % 2 != 0),
        };
        ok.then(|| ((base - m) / 2) as usize)
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// Complex mode values `V_m(p)` at a list of points, for the `M` negative
/// modes of one parity. Row-major in the point index; slot `p` holds mode
/// `parity.mode(p)`. Positive modes are never stored: they are the complex
/// conjugates of the negative ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeTable {
    parity: Parity,
    order: usize,
    points: usize,
    values: Vec<Complex64>,
}

impl ModeTable {
    pub fn zeros(parity: Parity, order: usize, points: usize) -> Self {
        ModeTable {
            parity,
            order,
            points,
            values: vec![Complex64::new(0.0, 0.0); order * points],
        }
    }

    pub fn from_values(parity: Parity, order: usize, points: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != order * points {
            return Err(Error::GridMismatch(format!(
                "mode table {points}x{order} needs {} values, got {}",
                order * points,
                values.len()
            )));
        }
        Ok(ModeTable {
            parity,
            order,
            points,
            values,
        })
    }

    /// Builds a table from per-point rows of length `order`.
    pub fn from_rows(parity: Parity, order: usize, rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let points = rows.len();
        if rows.iter().any(|r| r.len() != order) {
            return Err(Error::GridMismatch(format!("every row must hold {order} modes")));
        }
        Self::from_values(parity, order, points, rows.concat())
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn modes(&self) -> impl Iterator<Item = i32> + '_ {
        (0..self.order).map(|p| self.parity.mode(p))
    }

    /// All modes at point `i`, slot-ordered.
    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.values[i * self.order..(i + 1) * self.order]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.values[i * self.order..(i + 1) * self.order]
    }

    pub fn get(&self, i: usize, p: usize) -> Complex64 {
        self.values[i * self.order + p]
    }

    pub fn set(&mut self, i: usize, p: usize, v: Complex64) {
        self.values[i * self.order + p] = v;
    }

    /// Value of mode `m` at point `i`.
    pub fn mode_value(&self, i: usize, m: i32) -> Result<Complex64> {
        match self.parity.slot(m) {
            Some(p) if p < self.order => Ok(self.get(i, p)),
            _ => Err(Error::ParityMismatch(format!(
                "mode {m} is not in the {} list of order {}",
                self.parity, self.order
            ))),
        }
    }

    /// Values of slot `p` across all points.
    pub fn column(&self, p: usize) -> Vec<Complex64> {
        (0..self.points).map(|i| self.get(i, p)).collect()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub(crate) fn require(&self, parity: Parity, order: usize, points: usize, what: &str) -> Result<()> {
        if self.parity != parity {
            return Err(Error::ParityMismatch(format!(
                "{what} must hold {parity} modes, got {}",
                self.parity
            )));
        }
        if self.order != order || self.points != points {
            return Err(Error::GridMismatch(format!(
                "{what} is {}x{}, expected {points}x{order}",
                self.points, self.order
            )));
        }
        Ok(())
    }
}

/// Table `e^{-i m φ_n}` for the `order` modes of `parity`, row-major in `n`.
pub fn mode_exponentials(parity: Parity, order: usize, dirs: &DirectionGrid) -> Vec<Complex64> {
    let mut table = Vec::with_capacity(dirs.len() * order);
    for &phi in dirs.angles() {
        table.extend((0..order).map(|p| Complex64::cis(-(parity.mode(p) as f64) * phi)));
    }
    table
}

/// `G_m(ζ_k) = (1/2π) Σ_n g(ζ_k, θ_n) e^{-imφ_n} Δφ` for the `order` modes of
/// `parity`. `g` is row-major with one row of `N` directions per point.
pub fn fourier_modes(g: &[f64], dirs: &DirectionGrid, parity: Parity, order: usize) -> Result<ModeTable> {
    let n = dirs.len();
    if order == 0 {
        return Err(Error::invalid("mode order M must be >= 1"));
    }
    if g.len() % n != 0 {
        return Err(Error::GridMismatch(format!(
            "data length {} is not a multiple of N = {n}",
            g.len()
        )));
    }
    if n < 4 * order {
        log::warn!("N = {n} directions undersample mode {} (aliasing)", parity.mode(order - 1));
    }
    let exps = mode_exponentials(parity, order, dirs);
    let scale = dirs.step() / (2.0 * std::f64::consts::PI);
    let rows: Vec<Vec<Complex64>> = g
        .par_chunks(n)
        .map(|row| {
            let mut acc = vec![Complex64::new(0.0, 0.0); order];
            for (i, &v) in row.iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                let e = &exps[i * order..(i + 1) * order];
                for (a, &z) in acc.iter_mut().zip(e) {
                    *a += v * z;
                }
            }
            acc.iter_mut().for_each(|a| *a *= scale);
            acc
        })
        .collect();
    ModeTable::from_rows(parity, order, rows)
}
