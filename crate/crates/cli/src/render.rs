//! Plain-text PPM rasterization of sinograms and fields.

use std::fmt::Write as _;

use momenta_vt::geometry::{Triangulation, Vec2};
use momenta_vt::{FieldOnMesh, Sinogram};

pub type Rgb = [u8; 3];

pub const WHITE: Rgb = [255, 255, 255];
const BLACK: Rgb = [0, 0, 0];
const LOW: Rgb = [59, 76, 192];
const MID: Rgb = [128, 128, 128];
const HIGH: Rgb = [180, 4, 38];

#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<Rgb>,
}

impl Image {
    pub fn filled(width: usize, height: usize, color: Rgb) -> Self {
        Image {
            width,
            height,
            pixels: vec![color; width * height],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> Rgb {
        self.pixels[y * self.width + x]
    }

    fn put(&mut self, x: i64, y: i64, color: Rgb) {
        if x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height {
            self.pixels[y as usize * self.width + x as usize] = color;
        }
    }

    /// Text PPM (`P3`), one pixel row per line.
    pub fn to_ppm(&self) -> String {
        let mut out = format!("P3\n{} {}\n255\n", self.width, self.height);
        for row in self.pixels.chunks(self.width) {
            let line: Vec<String> = row
                .iter()
                .map(|p| format!("{} {} {}", p[0], p[1], p[2]))
                .collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    fn line(&mut self, a: (i64, i64), b: (i64, i64), color: Rgb) {
        let (mut x, mut y) = a;
        let dx = (b.0 - x).abs();
        let dy = -(b.1 - y).abs();
        let sx = if x < b.0 { 1 } else { -1 };
        let sy = if y < b.1 { 1 } else { -1 };
        let mut err = dx + dy;
        loop {
            self.put(x, y, color);
            if (x, y) == b {
                break;
            }
            let e2 = 2 * err;
            if e2 >= dy {
                err += dy;
                x += sx;
            }
            if e2 <= dx {
                err += dx;
                y += sy;
            }
        }
    }
}

/// Diverging map on `[lo, hi]`: the midpoint renders gray, never white.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColorScale {
    pub lo: f64,
    pub hi: f64,
}

impl ColorScale {
    /// Symmetric about zero, from the largest magnitude (1 when all vanish).
    pub fn symmetric(values: impl IntoIterator<Item = f64>) -> Self {
        let max = values.into_iter().map(f64::abs).fold(0.0, f64::max);
        let max = if max > 0.0 { max } else { 1.0 };
        ColorScale { lo: -max, hi: max }
    }

    pub fn color(&self, v: f64) -> Rgb {
        let t = ((v - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0);
        let (a, b, s) = if t < 0.5 { (LOW, MID, 2.0 * t) } else { (MID, HIGH, 2.0 * t - 1.0) };
        let mix = |i: usize| (a[i] as f64 + s * (b[i] as f64 - a[i] as f64)).round() as u8;
        [mix(0), mix(1), mix(2)]
    }
}

/// `K × N` heatmap, arc nodes down and directions across, `px` pixels per
/// cell. Unobserved cells are white.
pub fn render_sinogram(sin: &Sinogram, values: &[f64], scale: Option<ColorScale>, px: usize) -> Image {
    let (k, n) = sin.shape();
    let scale = scale.unwrap_or_else(|| {
        ColorScale::symmetric(values.iter().zip(sin.mask()).filter(|(_, &m)| m).map(|(v, _)| *v))
    });
    let mut img = Image::filled(n * px, k * px, WHITE);
    for row in 0..k {
        for col in 0..n {
            let idx = sin.index(row, col);
            if !sin.mask()[idx] {
                continue;
            }
            let c = scale.color(values[idx]);
            for dy in 0..px {
                for dx in 0..px {
                    img.pixels[(row * px + dy) * img.width + col * px + dx] = c;
                }
            }
        }
    }
    img
}

/// Which triangle covers each pixel center of a `size`-wide raster of
/// `[-1, 1] × [ymin, 1]`, row 0 at the top.
fn coverage(mesh: &Triangulation, size: usize) -> (usize, Vec<Option<usize>>) {
    let ymin = mesh.vertices().iter().map(|v| v.y).fold(0.0, f64::min);
    let height = ((size as f64) * (1.0 - ymin) / 2.0).round().max(1.0) as usize;
    let h = 2.0 / size as f64;
    let mut cover = vec![None; size * height];
    for s in 0..mesh.len() {
        let t = mesh.triangle(s);
        let (x0, x1) = (t.iter().map(|p| p.x).fold(f64::MAX, f64::min), t.iter().map(|p| p.x).fold(f64::MIN, f64::max));
        let (y0, y1) = (t.iter().map(|p| p.y).fold(f64::MAX, f64::min), t.iter().map(|p| p.y).fold(f64::MIN, f64::max));
        let cols = ((x0 + 1.0) / h).floor().max(0.0) as usize..(((x1 + 1.0) / h).ceil() as usize).min(size);
        let rows = ((1.0 - y1) / h).floor().max(0.0) as usize..(((1.0 - y0) / h).ceil() as usize).min(height);
        for r in rows {
            for c in cols.clone() {
                let p = Vec2::new(-1.0 + (c as f64 + 0.5) * h, 1.0 - (r as f64 + 0.5) * h);
                if cover[r * size + c].is_none() && inside(p, &t) {
                    cover[r * size + c] = Some(s);
                }
            }
        }
    }
    (height, cover)
}

fn inside(p: Vec2, t: &[Vec2; 3]) -> bool {
    (0..3).all(|i| (t[(i + 1) % 3] - t[i]).cross(p - t[i]) >= 0.0)
}

/// Mesh-rasterized heatmap of one scalar per triangle; pixels off the mesh
/// are white.
pub fn render_scalar(mesh: &Triangulation, values: &[f64], scale: Option<ColorScale>, size: usize) -> Image {
    let scale = scale.unwrap_or_else(|| ColorScale::symmetric(values.iter().copied()));
    let (height, cover) = coverage(mesh, size);
    let mut img = Image::filled(size, height, WHITE);
    for (px, s) in img.pixels.iter_mut().zip(cover) {
        if let Some(s) = s {
            *px = scale.color(values[s]);
        }
    }
    img
}

/// Arrow map: a segment from every `stride`-th centroid, scaled so the
/// longest arrow spans `2·stride` pixels.
pub fn render_arrows(mesh: &Triangulation, field: &FieldOnMesh, size: usize, stride: usize) -> Image {
    let (height, cover) = coverage(mesh, size);
    let mut img = Image::filled(size, height, WHITE);
    for (px, s) in img.pixels.iter_mut().zip(cover) {
        if s.is_some() {
            *px = [235, 235, 235];
        }
    }
    let max = field.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if !(max > 0.0) {
        return img;
    }
    let h = 2.0 / size as f64;
    let len = (2 * stride.max(1)) as f64 / max;
    for (c, v) in field.centroids.iter().zip(&field.values).step_by(stride.max(1)) {
        let a = (((c.x + 1.0) / h) as i64, ((1.0 - c.y) / h) as i64);
        let b = (a.0 + (v.x * len).round() as i64, a.1 - (v.y * len).round() as i64);
        img.line(a, b, BLACK);
        img.put(b.0, b.1, HIGH);
    }
    img
}
