use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::geometry::{ray_span, Triangulation, Vec2};
use crate::quadrature::GaussFamily;
use crate::{Error, Result};

pub const DEFAULT_Q_PSI: usize = 512;

/// Angular quadrature for `Ψ_j(c;τ) = ∫_{-π}^{π} ρ_τ(c;φ) e^{-i(2j+1)φ} dφ`.
///
/// `ρ_τ` is piecewise smooth with kinks (or jumps, for `c` on an edge) only
/// in the directions of the vertices of `τ`, so the circle is split there and
/// each piece of width `w` gets a Gauss–Legendre rule with
/// `8 + ⌈w·Q_ψ/2π⌉` nodes. Pieces outside the cone of `τ` seen from `c`
/// contribute nothing and are skipped. Near an edge line through (or almost
/// through) `c`, `ρ_τ` behaves like `d/sin(φ−α)` with a pole just outside the
/// piece; such ends are refined geometrically toward the pole.
#[derive(Debug, Clone)]
pub struct PsiRule {
    q_psi: usize,
    family: GaussFamily,
}

impl PsiRule {
    pub fn new(q_psi: usize) -> Result<Self> {
        if q_psi < 64 {
            return Err(Error::invalid(format!("Q_psi must be >= 64, got {q_psi}")));
        }
        Ok(PsiRule {
            q_psi,
            family: GaussFamily::up_to(q_psi + 9),
        })
    }

    pub fn q_psi(&self) -> usize {
        self.q_psi
    }

    /// Writes `Ψ_j(c;τ)` for `j = 0..out.len()` into `out`.
    pub fn psi_into(&self, c: Vec2, tri: &[Vec2; 3], out: &mut [Complex64]) {
        out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        let mut breaks = [-PI, PI, PI, PI, PI];
        let mut nb = 1;
        for v in tri {
            let d = *v - c;
            if d.norm() > 1e-14 {
                let mut a = d.angle();
                if a >= PI {
                    a -= 2.0 * PI;
                }
                breaks[nb] = a;
                nb += 1;
            }
        }
        breaks[nb] = PI;
        nb += 1;
        let breaks = &mut breaks[..nb];
        breaks.sort_by(f64::total_cmp);

        let poles = [0, 1, 2].map(|i| (tri[(i + 1) % 3] - tri[i]).angle());
        // outward angular distance from `at` to the nearest pole, modulo π
        let gap = |at: f64, sign: f64| {
            poles
                .iter()
                .map(|&p| (sign * (at - p)).rem_euclid(PI))
                .fold(PI, f64::min)
        };
        let mut panels = Vec::with_capacity(16);
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let width = b - a;
            if width < 1e-15 {
                continue;
            }
            let mid = 0.5 * (a + b);
            if ray_span(c, Vec2::from_angle(mid), tri) == 0.0 {
                continue;
            }
            panels.clear();
            graded(a, mid, gap(a, 1.0), &mut panels);
            let start = panels.len();
            graded(b, mid, gap(b, -1.0), &mut panels);
            panels[start..].reverse();
            for &(lo, hi) in &panels {
                let n = 8 + ((hi - lo).abs() * self.q_psi as f64 / (2.0 * PI)).ceil() as usize;
                for (phi, wt) in self.family.rule(n).mapped(lo.min(hi), lo.max(hi)) {
                    let dir = Vec2::from_angle(phi);
                    let rho = ray_span(c, dir, tri);
                    if rho == 0.0 {
                        continue;
                    }
                    let e1 = Complex64::new(dir.x, -dir.y);
                    let e2 = e1 * e1;
                    let mut z = (wt * rho) * e1;
                    for v in out.iter_mut() {
                        *v += z;
                        z *= e2;
                    }
                }
            }
        }
    }

    pub fn psi(&self, c: Vec2, tri: &[Vec2; 3], harmonics: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); harmonics];
        self.psi_into(c, tri, &mut out);
        out
    }
}

/// Splits `[end, mid]` (either orientation) into panels growing by a factor
/// of 4 away from `end`, where the nearest pole lies `delta` beyond `end`.
fn graded(end: f64, mid: f64, delta: f64, out: &mut Vec<(f64, f64)>) {
    let half = (mid - end).abs();
    let sign = (mid - end).signum();
    let mut at = 0.0;
    // an edge line exactly through `c` is seen edge-on and leaves no pole
    let mut step = 2.0 * delta.max(1e-9 * half);
    while at + step < 0.5 * half {
        out.push((end + sign * at, end + sign * (at + step)));
        at += step;
        step *= 4.0;
    }
    out.push((end + sign * at, mid));
}

/// Materialized `Ψ_j(c;τ_s)` for a list of evaluation points, indexed
/// `[point][triangle][j]`. The streaming operators in this module compute
/// the same numbers without storing them.
#[derive(Debug, Clone)]
pub struct PsiTable {
    points: Vec<Vec2>,
    triangles: usize,
    harmonics: usize,
    q_psi: usize,
    values: Vec<Complex64>,
}

impl PsiTable {
    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub fn triangles(&self) -> usize {
        self.triangles
    }

    pub fn harmonics(&self) -> usize {
        self.harmonics
    }

    pub fn q_psi(&self) -> usize {
        self.q_psi
    }

    /// `Ψ_j(c_point; τ_s)` for all `j`.
    pub fn row(&self, point: usize, s: usize) -> &[Complex64] {
        let start = (point * self.triangles + s) * self.harmonics;
        &self.values[start..start + self.harmonics]
    }
}

pub fn build_psi_table(points: &[Vec2], tri: &Triangulation, harmonics: usize, q_psi: usize) -> Result<PsiTable> {
    let rule = PsiRule::new(q_psi)?;
    let s_count = tri.len();
    let values: Vec<Complex64> = points
        .par_iter()
        .flat_map_iter(|&c| {
            let mut row = vec![Complex64::new(0.0, 0.0); s_count * harmonics];
            for (s, chunk) in row.chunks_mut(harmonics.max(1)).enumerate().take(s_count) {
                rule.psi_into(c, &tri.triangle(s), chunk);
            }
            row
        })
        .collect();
    Ok(PsiTable {
        points: points.to_vec(),
        triangles: s_count,
        harmonics,
        q_psi,
        values,
    })
}
