use std::f64::consts::PI;

use num_complex::Complex64;

use crate::geometry::{ArcGrid, ArcKind, ChordGrid};
use crate::harmonics::ModeTable;
use crate::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Chord grid with mode values `V_m(x_ℓ)` on it.
#[derive(Debug, Clone, Copy)]
pub struct ChordData<'a> {
    pub chord: &'a ChordGrid,
    pub modes: &'a ModeTable,
}

fn check_arc_table(arc: &ArcGrid, g: &ModeTable) -> Result<()> {
    if g.points() != arc.len() {
        return Err(Error::GridMismatch(format!(
            "arc mode table has {} rows for {} arc nodes",
            g.points(),
            arc.len()
        )));
    }
    Ok(())
}

/// `F_m[G](x)` for every mode of `g`, slot-ordered:
///
/// `−(1/πi) Σ_k G_m(ζ_k) ζ'_k Δω_k /(x−ζ_k)
///  + (2/π) Σ_k [Σ_{j≥1} G_{m−2j}(ζ_k) r_k^j] Im(ζ'_k/(ζ_k−x)) Δω_k`
/// with `r_k = (conj ζ_k − x)/(ζ_k − x)`.
pub fn eval_f_modes(arc: &ArcGrid, g: &ModeTable, x: f64) -> Result<Vec<Complex64>> {
    check_arc_table(arc, g)?;
    if arc.kind() != ArcKind::UpperHalf || !(x.abs() < 1.0) {
        return Err(Error::PointOutOfDomain {
            x,
            y: 0.0,
            reason: "F is defined on the open chord of the upper half-circle".into(),
        });
    }
    let order = g.order();
    let mut first = vec![ZERO; order];
    let mut tails = vec![ZERO; order];
    for k in 0..arc.len() {
        let zeta = arc.zeta(k);
        let dw = arc.weight(k);
        let d = zeta - x;
        let cauchy = arc.tangent(k) * dw / (x - zeta);
        let ratio = (zeta.conj() - x) / d;
        let im = (arc.tangent(k) / d).im * dw;
        let row = g.row(k);
        let mut tail = ZERO;
        for p in (0..order).rev() {
            first[p] += row[p] * cauchy;
            tails[p] += tail * im;
            tail = ratio * (row[p] + tail);
        }
    }
    let a = I / PI;
    let b = 2.0 / PI;
    Ok(first.iter().zip(&tails).map(|(f, t)| a * f + b * t).collect())
}

/// `F_m[G](x)` for a single mode `m` of `g`'s parity.
pub fn eval_f(m: i32, arc: &ArcGrid, g: &ModeTable, x: f64) -> Result<Complex64> {
    let p = slot(g, m)?;
    Ok(eval_f_modes(arc, g, x)?[p])
}

fn slot(table: &ModeTable, m: i32) -> Result<usize> {
    match table.parity().slot(m) {
        Some(p) if p < table.order() => Ok(p),
        _ => Err(Error::ParityMismatch(format!(
            "mode {m} is not in the {} list of order {}",
            table.parity(),
            table.order()
        ))),
    }
}

fn check_point(arc: &ArcGrid, chord: Option<&ChordData<'_>>, c: Complex64) -> Result<()> {
    let out = |reason: String| Error::PointOutOfDomain {
        x: c.re,
        y: c.im,
        reason,
    };
    let inside = match arc.kind() {
        ArcKind::UpperHalf => c.norm() < 1.0 && c.im > 0.0,
        ArcKind::FullCircle => c.norm() < 1.0,
    };
    if !inside {
        return Err(out("the point must be interior".into()));
    }
    let dw = arc.max_weight();
    if 1.0 - c.norm() < dw && (0..arc.len()).any(|k| (arc.zeta(k) - c).norm() < dw) {
        return Err(out(format!("closer than Δω = {dw:.3e} to an arc node")));
    }
    if let Some(data) = chord {
        let dx = data.chord.step();
        if c.im < dx && data.chord.nodes().iter().any(|&x| (c - x).norm() < dx) {
            return Err(out(format!("closer than Δx = {dx:.3e} to a chord node")));
        }
    }
    Ok(())
}

/// `B_m[V_L, G](c)` for every mode, slot-ordered. With `chord = None` the
/// two chord sums are dropped, which is the operator of the full-boundary
/// problem when `arc` covers the whole circle.
pub fn eval_b_modes(
    arc: &ArcGrid,
    g: &ModeTable,
    chord: Option<ChordData<'_>>,
    c: Complex64,
) -> Result<Vec<Complex64>> {
    check_arc_table(arc, g)?;
    let order = g.order();
    if let Some(data) = &chord {
        data.modes
            .require(g.parity(), order, data.chord.len(), "chord mode table")?;
    }
    check_point(arc, chord.as_ref(), c)?;

    // terms carrying 1/(2πi) and 1/π respectively
    let mut cauchy = vec![ZERO; order];
    let mut tails = vec![ZERO; order];

    if let Some(data) = chord {
        let dx = data.chord.step();
        for (l, &x) in data.chord.nodes().iter().enumerate() {
            let d = x - c;
            let db = x - c.conj();
            let a = dx / d;
            let ratio = db / d;
            let diff = (1.0 / d - 1.0 / db) * dx;
            let row = data.modes.row(l);
            let mut tail = ZERO;
            for p in (0..order).rev() {
                cauchy[p] += row[p] * a + tail * diff;
                tail = ratio * (row[p] + tail);
            }
        }
    }
    for k in 0..arc.len() {
        let zeta = arc.zeta(k);
        let dw = arc.weight(k);
        let d = zeta - c;
        let a = arc.tangent(k) * dw / d;
        let ratio = (zeta - c).conj() / d;
        let im = (arc.tangent(k) / d).im * dw;
        let row = g.row(k);
        let mut tail = ZERO;
        for p in (0..order).rev() {
            cauchy[p] += row[p] * a;
            tails[p] += tail * im;
            tail = ratio * (row[p] + tail);
        }
    }
    let a = 1.0 / (2.0 * PI * I);
    Ok(cauchy
        .iter()
        .zip(&tails)
        .map(|(s, t)| a * s + t / PI)
        .collect())
}

/// `B_m[V_L, G](c)` for a single mode.
pub fn eval_b(
    m: i32,
    arc: &ArcGrid,
    g: &ModeTable,
    chord: Option<ChordData<'_>>,
    c: Complex64,
) -> Result<Complex64> {
    let p = slot(g, m)?;
    Ok(eval_b_modes(arc, g, chord, c)?[p])
}
