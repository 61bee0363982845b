use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::Vec2;
use crate::{Error, Result};

/// A conforming triangulation with cached centroids and areas.
///
/// Triangles are stored counterclockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Triangulation {
    vertices: Vec<Vec2>,
    triangles: Vec<[usize; 3]>,
    centroids: Vec<Vec2>,
    areas: Vec<f64>,
}

impl Triangulation {
    pub fn new(vertices: Vec<Vec2>, mut triangles: Vec<[usize; 3]>) -> Result<Self> {
        let mut centroids = Vec::with_capacity(triangles.len());
        let mut areas = Vec::with_capacity(triangles.len());
        for (s, t) in triangles.iter_mut().enumerate() {
            if t.iter().any(|&i| i >= vertices.len()) {
                return Err(Error::invalid(format!("triangle {s} references a missing vertex")));
            }
            let [a, b, c] = t.map(|i| vertices[i]);
            let twice = (b - a).cross(c - a);
            if !(twice.abs() > 0.0) {
                return Err(Error::invalid(format!("triangle {s} has zero area")));
            }
            if twice < 0.0 {
                t.swap(1, 2);
            }
            let [a, b, c] = t.map(|i| vertices[i]);
            areas.push(0.5 * (b - a).cross(c - a));
            centroids.push((1.0 / 3.0) * (a + b + c));
        }
        Ok(Triangulation {
            vertices,
            triangles,
            centroids,
            areas,
        })
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, s: usize) -> [Vec2; 3] {
        self.triangles[s].map(|i| self.vertices[i])
    }

    pub fn centroid(&self, s: usize) -> Vec2 {
        self.centroids[s]
    }

    pub fn centroids(&self) -> &[Vec2] {
        &self.centroids
    }

    pub fn area(&self, s: usize) -> f64 {
        self.areas[s]
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    /// Longest edge of triangle `s`.
    pub fn diameter(&self, s: usize) -> f64 {
        let [a, b, c] = self.triangle(s);
        (b - a).norm().max((c - b).norm()).max((a - c).norm())
    }

    pub fn mean_diameter(&self) -> f64 {
        (0..self.len()).map(|s| self.diameter(s)).sum::<f64>() / self.len() as f64
    }

    /// True when no edge is shared by more than two triangles.
    pub fn is_edge_conforming(&self) -> bool {
        let mut count: HashMap<(usize, usize), u8> = HashMap::new();
        for t in &self.triangles {
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        count.values().all(|&c| c <= 2)
    }

    /// Mirror image across the real axis appended to the mesh. The first
    /// `len()` triangles of the result are the original ones, in order;
    /// vertices with `y == 0` are shared.
    pub fn reflected(&self) -> Result<Triangulation> {
        let mut vertices = self.vertices.clone();
        let mirror: Vec<usize> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if v.y == 0.0 {
                    i
                } else {
                    vertices.push(Vec2::new(v.x, -v.y));
                    vertices.len() - 1
                }
            })
            .collect();
        let mut triangles = self.triangles.clone();
        triangles.extend(self.triangles.iter().map(|t| t.map(|i| mirror[i])));
        Triangulation::new(vertices, triangles)
    }
}

/// Per-triangle neighbor lists `N_s(R) = {τ_t : |c_t - c_s| < R}`, each
/// including `s` itself.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighborhoods {
    radius: f64,
    lists: Vec<Vec<usize>>,
}

impl Neighborhoods {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    pub fn members(&self, s: usize) -> &[usize] {
        &self.lists[s]
    }

    /// Members of `N_s` other than `s`.
    pub fn others(&self, s: usize) -> impl Iterator<Item = usize> + '_ {
        self.lists[s].iter().copied().filter(move |&t| t != s)
    }

    /// Builds the lists and requires at least `min_members` entries (counting
    /// `s` itself) in every list.
    pub fn with_min_members(tri: &Triangulation, radius: f64, min_members: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::invalid(format!("neighborhood radius must be > 0, got {radius}")));
        }
        let c = tri.centroids();
        let lists: Vec<Vec<usize>> = (0..tri.len())
            .map(|s| {
                (0..tri.len())
                    .filter(|&t| (c[t] - c[s]).norm() < radius)
                    .collect()
            })
            .collect();
        let small: Vec<usize> = lists
            .iter()
            .enumerate()
            .filter(|(_, l)| l.len() < min_members)
            .map(|(s, _)| s)
            .collect();
        if !small.is_empty() {
            return Err(Error::NeighborhoodTooSmall { triangles: small });
        }
        Ok(Neighborhoods { radius, lists })
    }
}

/// Neighborhoods of radius `radius`; fails unless every `N_s` has at least
/// five members besides `τ_s`, as the quadratic fit requires.
pub fn neighborhoods(tri: &Triangulation, radius: f64) -> Result<Neighborhoods> {
    Neighborhoods::with_min_members(tri, radius, 6)
}

/// Concentric half-rings with tangential spacing `h` and ring spacing
/// `h·√3/2`, zipped into triangles. Ring vertices at angles 0 and π lie
/// exactly on the real axis.
fn structured_half_disc(h: f64) -> Result<Triangulation> {
    let rings = ((1.0 / (h * 3f64.sqrt() / 2.0)).round() as usize).max(1);
    let mut vertices = vec![Vec2::ZERO];
    let mut ring_ids: Vec<Vec<usize>> = vec![vec![0]];
    for i in 1..=rings {
        let r = i as f64 / rings as f64;
        let segs = ((PI * r / h).round() as usize).max(2);
        let ids = (0..=segs)
            .map(|l| {
                let v = match l {
                    0 => Vec2::new(r, 0.0),
                    _ if l == segs => Vec2::new(-r, 0.0),
                    _ => r * Vec2::from_angle(PI * l as f64 / segs as f64),
                };
                vertices.push(v);
                vertices.len() - 1
            })
            .collect();
        ring_ids.push(ids);
    }

    let mut triangles = Vec::new();
    for w in ring_ids.windows(2) {
        let (inner, outer) = (&w[0], &w[1]);
        if inner.len() == 1 {
            for q in 0..outer.len() - 1 {
                triangles.push([inner[0], outer[q], outer[q + 1]]);
            }
            continue;
        }
        let (mut p, mut q) = (0, 0);
        let (ni, no) = (inner.len() - 1, outer.len() - 1);
        while p < ni || q < no {
            let advance_inner = if p == ni {
                false
            } else if q == no {
                true
            } else {
                // pick the shorter new diagonal
                let d_inner = (vertices[inner[p + 1]] - vertices[outer[q]]).norm();
                let d_outer = (vertices[inner[p]] - vertices[outer[q + 1]]).norm();
                d_inner <= d_outer
            };
            if advance_inner {
                triangles.push([inner[p], inner[p + 1], outer[q]]);
                p += 1;
            } else {
                triangles.push([inner[p], outer[q + 1], outer[q]]);
                q += 1;
            }
        }
    }
    Triangulation::new(vertices, triangles)
}

/// Triangulates the closed upper unit half-disc with its straight edge on
/// `[-1, 1]` and all other boundary vertices on the unit circle, tuning the
/// ring spacing until the mean triangle diameter matches `target`.
pub fn triangulate_half_disc(target: f64) -> Result<Triangulation> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::invalid(format!(
            "target mean diameter must lie in (0, 1), got {target}"
        )));
    }
    let mut h = target;
    let mut best: Option<(f64, Triangulation)> = None;
    for _ in 0..40 {
        let mesh = structured_half_disc(h)?;
        let d = mesh.mean_diameter();
        let miss = (d - target).abs() / target;
        if best.as_ref().is_none_or(|(m, _)| miss < *m) {
            best = Some((miss, mesh));
        }
        if miss < 0.005 {
            break;
        }
        h *= target / d;
    }
    match best {
        Some((miss, mesh)) if miss <= 0.25 => Ok(mesh),
        Some((miss, _)) => Err(Error::MeshGeneration(format!(
            "mean diameter misses target {target} by {:.1}%",
            100.0 * miss
        ))),
        None => Err(Error::MeshGeneration("no mesh produced".into())),
    }
}
