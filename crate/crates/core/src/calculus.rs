//! Least-squares differentiation over triangle neighborhoods and assembly of
//! the reconstructed field.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{Neighborhoods, Triangulation, Vec2};
use crate::{Error, Result};

/// Row weighting of the local least-squares fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Weighting {
    /// Every neighbor counts equally.
    #[default]
    Uniform,
    /// Rows scaled by `1/|c_t − c_s|`.
    InverseDistance,
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Weighting::Uniform => "uniform",
            Weighting::InverseDistance => "inverse-distance",
        })
    }
}

impl FromStr for Weighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Weighting::Uniform),
            "inverse-distance" => Ok(Weighting::InverseDistance),
            other => Err(Error::InvalidParameter(format!("unknown weighting `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gradient {
    pub dx: Vec<Complex64>,
    pub dy: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hessian {
    pub dx: Vec<Complex64>,
    pub dy: Vec<Complex64>,
    pub dxx: Vec<Complex64>,
    pub dxy: Vec<Complex64>,
    pub dyy: Vec<Complex64>,
}

/// First derivatives of `V⁰₋₂` and first and second derivatives of `V¹₋₁`
/// at every centroid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeBundle {
    pub v0: Gradient,
    pub v1: Hessian,
}

/// Smallest accepted ratio of eigenvalues of the scaled normal matrix.
const RANK_TOLERANCE: f64 = 1e-10;

/// Solves the normal equations `(AᵀA) u = Aᵀb` of a real design matrix with
/// `D` columns and complex data. Columns are scaled by the neighborhood
/// extent so the conditioning test is scale free.
fn fit<const D: usize>(
    s: usize,
    tri: &Triangulation,
    nb: &Neighborhoods,
    values: &[Complex64],
    weighting: Weighting,
    row: impl Fn(f64, f64) -> [f64; D],
) -> Result<[Complex64; D]> {
    let cs = tri.centroid(s);
    let extent = nb
        .others(s)
        .map(|t| (tri.centroid(t) - cs).norm())
        .fold(0.0, f64::max);
    if !(extent > 0.0) {
        return Err(Error::RankDeficient { triangle: s });
    }
    let scale = row(extent, extent);
    let mut ata = DMatrix::<f64>::zeros(D, D);
    let mut atb_re = DVector::<f64>::zeros(D);
    let mut atb_im = DVector::<f64>::zeros(D);
    for t in nb.others(s) {
        let d = tri.centroid(t) - cs;
        let w = match weighting {
            Weighting::Uniform => 1.0,
            Weighting::InverseDistance => extent / d.norm(),
        };
        let raw = row(d.x, d.y);
        let a = DVector::<f64>::from_fn(D, |i, _| w * raw[i] / scale[i]);
        let b = w * (values[t] - values[s]);
        ata += &a * a.transpose();
        atb_re += &a * b.re;
        atb_im += &a * b.im;
    }
    let eig = ata.clone().symmetric_eigenvalues();
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &l| (lo.min(l), hi.max(l)));
    if !(lo > RANK_TOLERANCE * hi) {
        return Err(Error::RankDeficient { triangle: s });
    }
    let chol = ata.cholesky().ok_or(Error::RankDeficient { triangle: s })?;
    let re = chol.solve(&atb_re);
    let im = chol.solve(&atb_im);
    Ok(std::array::from_fn(|i| Complex64::new(re[i], im[i]) / scale[i]))
}

fn check(tri: &Triangulation, nb: &Neighborhoods, values: &[Complex64]) -> Result<()> {
    if values.len() != tri.len() || nb.len() != tri.len() {
        return Err(Error::GridMismatch(format!(
            "{} values and {} neighborhoods for {} triangles",
            values.len(),
            nb.len(),
            tri.len()
        )));
    }
    Ok(())
}

/// Fits `(ξ_t−ξ_s)∂x + (η_t−η_s)∂y = V(c_t) − V(c_s)` over `t ∈ N_s, t ≠ s`.
pub fn lsq_gradient(
    tri: &Triangulation,
    nb: &Neighborhoods,
    values: &[Complex64],
    weighting: Weighting,
) -> Result<Gradient> {
    check(tri, nb, values)?;
    let fits = (0..tri.len())
        .into_par_iter()
        .map(|s| fit(s, tri, nb, values, weighting, |x, y| [x, y]))
        .collect::<Result<Vec<_>>>()?;
    Ok(Gradient {
        dx: fits.iter().map(|f| f[0]).collect(),
        dy: fits.iter().map(|f| f[1]).collect(),
    })
}

/// Fits the second-order Taylor model
/// `ξ∂x + η∂y + ½(ξ²∂xx + 2ξη∂xy + η²∂yy) = V(c_t) − V(c_s)`.
pub fn lsq_hessian(
    tri: &Triangulation,
    nb: &Neighborhoods,
    values: &[Complex64],
    weighting: Weighting,
) -> Result<Hessian> {
    check(tri, nb, values)?;
    let fits = (0..tri.len())
        .into_par_iter()
        .map(|s| {
            fit(s, tri, nb, values, weighting, |x, y| {
                [x, y, 0.5 * x * x, x * y, 0.5 * y * y]
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let col = |i: usize| fits.iter().map(|f| f[i]).collect();
    Ok(Hessian {
        dx: col(0),
        dy: col(1),
        dxx: col(2),
        dxy: col(3),
        dyy: col(4),
    })
}

/// `F₁ = ¼(∂xx + ∂yy)V¹₋₁ + ¼ conj((∂xx − ∂yy − 2i∂xy)V¹₋₁) + ½(∂x − i∂y)V⁰₋₂`.
pub fn assemble_f1(d: &DerivativeBundle) -> Vec<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    let h = &d.v1;
    (0..h.dxx.len())
        .map(|s| {
            0.25 * (h.dxx[s] + h.dyy[s])
                + 0.25 * (h.dxx[s] - h.dyy[s] - 2.0 * i * h.dxy[s]).conj()
                + 0.5 * (d.v0.dx[s] - i * d.v0.dy[s])
        })
        .collect()
}

/// `f = (2 Re F₁, 2 Im F₁)`.
pub fn assemble_field(f1: &[Complex64]) -> Vec<Vec2> {
    f1.iter().map(|z| Vec2::new(2.0 * z.re, 2.0 * z.im)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{neighborhoods, triangulate_half_disc};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn zero_bundle(n: usize) -> DerivativeBundle {
        let z = vec![Complex64::new(0.0, 0.0); n];
        DerivativeBundle {
            v0: Gradient {
                dx: z.clone(),
                dy: z.clone(),
            },
            v1: Hessian {
                dx: z.clone(),
                dy: z.clone(),
                dxx: z.clone(),
                dxy: z.clone(),
                dyy: z,
            },
        }
    }

    #[test]
    fn f1_formula() {
        let mut d = zero_bundle(1);
        d.v1.dxx[0] = c(2.0);
        assert!((assemble_f1(&d)[0] - c(1.0)).norm() < 1e-15);

        let mut d = zero_bundle(1);
        d.v0.dx[0] = c(1.0);
        assert!((assemble_f1(&d)[0] - c(0.5)).norm() < 1e-15);

        let mut d = zero_bundle(1);
        d.v1.dxy[0] = c(1.0);
        assert!((assemble_f1(&d)[0] - Complex64::new(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn field_formula() {
        let f = assemble_field(&[c(1.0), Complex64::new(0.0, 0.5), c(0.0)]);
        assert_eq!(f, vec![Vec2::new(2.0, 0.0), Vec2::new(0.0, 1.0), Vec2::ZERO]);
    }

    #[test]
    fn exact_on_polynomials() {
        let mesh = triangulate_half_disc(0.2).unwrap();
        let nb = neighborhoods(&mesh, 0.45).unwrap();
        let vals = |f: &dyn Fn(Vec2) -> f64| -> Vec<Complex64> {
            mesh.centroids().iter().map(|&p| c(f(p))).collect()
        };
        let g = lsq_gradient(&mesh, &nb, &vals(&|p| 3.0 + 2.0 * p.x - p.y), Weighting::Uniform).unwrap();
        for s in 0..mesh.len() {
            assert!((g.dx[s] - c(2.0)).norm() < 1e-12 && (g.dy[s] - c(-1.0)).norm() < 1e-12);
        }
        let h = lsq_hessian(&mesh, &nb, &vals(&|p| p.x * p.y), Weighting::InverseDistance).unwrap();
        for s in 0..mesh.len() {
            let p = mesh.centroid(s);
            assert!((h.dxy[s] - c(1.0)).norm() < 1e-10);
            assert!((h.dx[s] - c(p.y)).norm() < 1e-10 && (h.dy[s] - c(p.x)).norm() < 1e-10);
            assert!(h.dxx[s].norm() < 1e-10 && h.dyy[s].norm() < 1e-10);
        }
    }

    #[test]
    fn collinear_neighborhood_is_rank_deficient() {
        // a strip of triangles whose centroids lie on one line
        let mut vertices = Vec::new();
        for i in 0..8 {
            vertices.push(Vec2::new(i as f64, 0.0));
            vertices.push(Vec2::new(i as f64 + 0.5, 1.0));
        }
        let triangles = (0..7)
            .map(|i| [2 * i, 2 * i + 2, 2 * i + 1])
            .collect();
        let mesh = Triangulation::new(vertices, triangles).unwrap();
        let nb = Neighborhoods::with_min_members(&mesh, 10.0, 1).unwrap();
        let vals = vec![c(1.0); mesh.len()];
        assert!(matches!(
            lsq_gradient(&mesh, &nb, &vals, Weighting::Uniform),
            Err(Error::RankDeficient { .. })
        ));
    }
}
