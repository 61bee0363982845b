use super::Vec2;
use crate::{Error, Result};

/// Rays with `ν·θ` at or below this value are treated as tangent.
pub const TANGENT_TOLERANCE: f64 = 1e-12;

/// Length of the intersection of the semi-line `{c + t·dir : t > 0}` with the
/// closed triangle `tri`; for `c` inside the triangle this is the distance
/// from `c` to the boundary along `dir`. `dir` need not be normalized, the
/// result is measured in units of `|dir|`.
///
/// Computed by clipping the parameter interval `[0, ∞)` against the three
/// edge half-planes. Grazing rays (through a vertex or along an edge) clip
/// to a degenerate interval and contribute zero length.
pub fn ray_span(c: Vec2, dir: Vec2, tri: &[Vec2; 3]) -> f64 {
    let orientation = (tri[1] - tri[0]).cross(tri[2] - tri[0]);
    if orientation == 0.0 {
        return 0.0;
    }
    let sign = orientation.signum();
    let mut lo = 0.0f64;
    let mut hi = f64::INFINITY;
    for i in 0..3 {
        let p = tri[i];
        let edge = tri[(i + 1) % 3] - p;
        let offset = sign * edge.cross(c - p);
        let rate = sign * edge.cross(dir);
        if rate > 0.0 {
            lo = lo.max(-offset / rate);
        } else if rate < 0.0 {
            hi = hi.min(-offset / rate);
        } else if offset < 0.0 {
            return 0.0;
        }
    }
    (hi - lo).max(0.0)
}

/// [`ray_span`] for the unit direction at angle `phi`.
pub fn ray_triangle_span(c: Vec2, phi: f64, tri: &[Vec2; 3]) -> f64 {
    ray_span(c, Vec2::from_angle(phi), tri)
}

/// Entry of the line `p + tθ` into the closed unit disc: returns
/// `(z_in, t₀)` with `t₀ = inf{t : |p + tθ| ≤ 1}`. `θ` must be a unit vector.
pub fn entry_point(p: Vec2, theta: Vec2) -> Result<(Vec2, f64)> {
    let b = p.dot(theta);
    let disc = b * b - p.norm_sq() + 1.0;
    if disc <= 0.0 {
        return Err(Error::TangentLine { x: p.x, y: p.y });
    }
    let t0 = -b - disc.sqrt();
    Ok((p + t0 * theta, t0))
}

/// Entry point of the line through the boundary point `zeta` with outgoing
/// direction `theta`. Rejects points off the unit circle and directions with
/// `ν(ζ)·θ ≤` [`TANGENT_TOLERANCE`].
pub fn line_entry_point(zeta: Vec2, theta: Vec2) -> Result<(Vec2, f64)> {
    let r = zeta.norm();
    if (r - 1.0).abs() > 1e-9 {
        return Err(Error::PointOutOfDomain {
            x: zeta.x,
            y: zeta.y,
            reason: "boundary point must lie on the unit circle".into(),
        });
    }
    if zeta.dot(theta) / r <= TANGENT_TOLERANCE {
        return Err(Error::TangentLine {
            x: zeta.x,
            y: zeta.y,
        });
    }
    entry_point(zeta, theta)
}
