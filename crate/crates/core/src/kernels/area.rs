use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::psi::{PsiRule, PsiTable};
use crate::geometry::{Triangulation, Vec2};
use crate::harmonics::{ModeTable, Parity};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn check_interior(v: &ModeTable, tri: &Triangulation) -> Result<()> {
    v.require(Parity::Even, v.order(), tri.len(), "interior mode table")
}

/// `T_m[V](c)` for every odd mode `m = −1−2p`, slot-ordered:
/// `T_p(c) = −(1/π) Σ_s Σ_{j=0}^{M−1−p} V_{−2−2(p+j)}(c_s) Ψ_j(c;τ_s)`.
/// `v` holds the even modes at the centroids of `tri`.
pub fn t_modes_at(c: Vec2, tri: &Triangulation, v: &ModeTable, rule: &PsiRule) -> Result<Vec<Complex64>> {
    check_interior(v, tri)?;
    let order = v.order();
    let mut psi = vec![ZERO; order];
    let mut acc = vec![ZERO; order];
    for s in 0..tri.len() {
        rule.psi_into(c, &tri.triangle(s), &mut psi);
        let row = v.row(s);
        for (p, a) in acc.iter_mut().enumerate() {
            *a += dot(&row[p..], &psi[..order - p]);
        }
    }
    Ok(acc.into_iter().map(|a| -a / PI).collect())
}

/// `T_{−1}[V](c)`, the only mode needed at interior points.
pub fn t_first_at(c: Vec2, tri: &Triangulation, v: &ModeTable, rule: &PsiRule) -> Result<Complex64> {
    check_interior(v, tri)?;
    let mut psi = vec![ZERO; v.order()];
    let mut acc = ZERO;
    for s in 0..tri.len() {
        rule.psi_into(c, &tri.triangle(s), &mut psi);
        acc += dot(v.row(s), &psi);
    }
    Ok(-acc / PI)
}

/// Split real/imaginary accumulation so the loop vectorizes.
fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re - x.im * y.im;
        im += x.re * y.im + x.im * y.re;
    }
    Complex64::new(re, im)
}

/// [`t_modes_at`] at every point, as an odd mode table.
pub fn area_modes(points: &[Vec2], tri: &Triangulation, v: &ModeTable, rule: &PsiRule) -> Result<ModeTable> {
    let rows = points
        .par_iter()
        .map(|&c| t_modes_at(c, tri, v, rule))
        .collect::<Result<Vec<_>>>()?;
    ModeTable::from_rows(Parity::Odd, v.order(), rows)
}

/// [`t_first_at`] at every point.
pub fn area_first(points: &[Vec2], tri: &Triangulation, v: &ModeTable, rule: &PsiRule) -> Result<Vec<Complex64>> {
    points
        .par_iter()
        .map(|&c| t_first_at(c, tri, v, rule))
        .collect()
}

/// `T_m[V](c)` from a materialized Ψ table, `c` being the table's point
/// `point`. `m` must be odd.
pub fn eval_t(m: i32, v: &ModeTable, psi: &PsiTable, point: usize) -> Result<Complex64> {
    let p = Parity::Odd
        .slot(m)
        .ok_or_else(|| Error::ParityMismatch(format!("the area operator needs an odd mode, got {m}")))?;
    if v.parity() != Parity::Even {
        return Err(Error::ParityMismatch("the area operator acts on even modes".into()));
    }
    let order = v.order();
    if p >= order || psi.harmonics() < order - p || v.points() != psi.triangles() {
        return Err(Error::GridMismatch(format!(
            "mode {m} with order {order} does not fit a Ψ table of {} harmonics over {} triangles",
            psi.harmonics(),
            psi.triangles()
        )));
    }
    let mut acc = ZERO;
    for s in 0..v.points() {
        acc += dot(&v.row(s)[p..], &psi.row(point, s)[..order - p]);
    }
    Ok(-acc / PI)
}
