#![allow(dead_code)]

use momenta_vt::quadrature::GaussRule;
use momenta_vt::{Complex64, Vec2};

/// `∫∫_τ (1/(ζ−c)) ((conj ζ − conj c)/(ζ−c))^j dA`, computed in Cartesian
/// form: `τ` is split into signed triangles with apex `c`, and the Duffy map
/// `ζ = c + u(a + t(b−a))` removes the `1/|ζ−c|` singularity, leaving the
/// exact factor `(a×b)·∫₀¹ h(a + t(b−a)) dt`. The `t` integral is adaptive,
/// since `h` oscillates fast near the foot of a nearby edge when `j` is large.
pub fn psi_area_oracle(c: Vec2, tri: &[Vec2; 3], j: usize) -> Complex64 {
    let rule = GaussRule::new(20);
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..3 {
        let a = tri[i] - c;
        let b = tri[(i + 1) % 3] - c;
        let cross = a.cross(b);
        if cross.abs() < 1e-300 {
            continue;
        }
        let (a, b) = (a.to_complex(), b.to_complex());
        let h = |t: f64| {
            let q = a + t * (b - a);
            let r = q.conj() / q;
            r.powu(j as u32) / q
        };
        let panel = |lo: f64, hi: f64| rule.mapped(lo, hi).map(|(t, w)| w * h(t)).sum::<Complex64>();
        let mut s = Complex64::new(0.0, 0.0);
        let mut stack: Vec<(f64, f64, Complex64, u32)> = (0..32)
            .map(|k| {
                let (lo, hi) = (k as f64 / 32.0, (k + 1) as f64 / 32.0);
                (lo, hi, panel(lo, hi), 0)
            })
            .collect();
        while let Some((lo, hi, whole, depth)) = stack.pop() {
            let mid = 0.5 * (lo + hi);
            let (left, right) = (panel(lo, mid), panel(mid, hi));
            if (left + right - whole).norm() < 1e-14 * (hi - lo).max(1e-3) || depth > 30 {
                s += left + right;
            } else {
                stack.push((lo, mid, left, depth + 1));
                stack.push((mid, hi, right, depth + 1));
            }
        }
        total += cross * s;
    }
    total
}

/// Midpoint rule over the `n²` congruent sub-triangles of `tri`.
pub fn midpoint_area<F: Fn(Vec2) -> Complex64>(tri: &[Vec2; 3], n: usize, f: F) -> Complex64 {
    let [p0, p1, p2] = *tri;
    let e1 = (1.0 / n as f64) * (p1 - p0);
    let e2 = (1.0 / n as f64) * (p2 - p0);
    let area = 0.5 * e1.cross(e2).abs();
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n - i {
            let base = p0 + (i as f64) * e1 + (k as f64) * e2;
            sum += f(base + (1.0 / 3.0) * (e1 + e2));
            if i + k + 1 < n {
                sum += f(base + (2.0 / 3.0) * (e1 + e2));
            }
        }
    }
    sum * area
}

pub struct Lcg(pub u64);

impl Lcg {
    pub fn uniform(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }
}
