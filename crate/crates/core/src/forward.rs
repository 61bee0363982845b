//! Synthetic measurements: boundary traces by ray quadrature, moment
//! transforms, masked boundary data and additive noise.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{line_entry_point, ArcGrid, DirectionGrid, Vec2, TANGENT_TOLERANCE};
use crate::phantom::VectorField;
use crate::quadrature::GaussRule;
use crate::{Error, Result};

/// Traces `v⁰`, `v¹` on the `K × N` (node × direction) grid, row-major in the
/// node index. Entries off `Σ₊` are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceTable {
    k: usize,
    n: usize,
    v0: Vec<f64>,
    v1: Vec<f64>,
    mask: Vec<bool>,
}

impl TraceTable {
    pub fn new(k: usize, n: usize, v0: Vec<f64>, v1: Vec<f64>, mask: Vec<bool>) -> Result<Self> {
        let len = k * n;
        if v0.len() != len || v1.len() != len || mask.len() != len {
            return Err(Error::GridMismatch(format!(
                "trace table of {k}x{n} needs {len} entries per channel"
            )));
        }
        Ok(TraceTable { k, n, v0, v1, mask })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.k, self.n)
    }

    pub fn v0(&self) -> &[f64] {
        &self.v0
    }

    pub fn v1(&self) -> &[f64] {
        &self.v1
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn index(&self, k: usize, n: usize) -> usize {
        k * self.n + n
    }
}

/// Seed, requested level and realized relative `L²` levels of the noise in
/// `I⁰` and `I¹`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseDescriptor {
    pub seed: u64,
    pub target: f64,
    pub realized: [f64; 2],
}

/// Moment transforms `I⁰f`, `I¹f` sampled at `(ζ_k, θ_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sinogram {
    arc: ArcGrid,
    dirs: DirectionGrid,
    mask: Vec<bool>,
    i0: Vec<f64>,
    i1: Vec<f64>,
    noise: Option<NoiseDescriptor>,
}

impl Sinogram {
    /// Assembles a sinogram from raw channels; masked-out entries are zeroed.
    pub fn new(
        arc: ArcGrid,
        dirs: DirectionGrid,
        mask: Vec<bool>,
        mut i0: Vec<f64>,
        mut i1: Vec<f64>,
    ) -> Result<Self> {
        let len = arc.len() * dirs.len();
        if mask.len() != len || i0.len() != len || i1.len() != len {
            return Err(Error::GridMismatch(format!(
                "sinogram on {}x{} needs {len} entries per channel",
                arc.len(),
                dirs.len()
            )));
        }
        if i0.iter().chain(&i1).any(|v| !v.is_finite()) {
            return Err(Error::invalid("sinogram contains non-finite values"));
        }
        for (idx, &m) in mask.iter().enumerate() {
            if !m {
                i0[idx] = 0.0;
                i1[idx] = 0.0;
            }
        }
        Ok(Sinogram {
            arc,
            dirs,
            mask,
            i0,
            i1,
            noise: None,
        })
    }

    /// A sinogram of zeros with the visibility mask of the grid.
    pub fn zeros(arc: ArcGrid, dirs: DirectionGrid) -> Self {
        let mask = visibility_mask(&arc, &dirs);
        let len = mask.len();
        Sinogram {
            arc,
            dirs,
            mask,
            i0: vec![0.0; len],
            i1: vec![0.0; len],
            noise: None,
        }
    }

    pub fn arc(&self) -> &ArcGrid {
        &self.arc
    }

    pub fn dirs(&self) -> &DirectionGrid {
        &self.dirs
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.arc.len(), self.dirs.len())
    }

    pub fn index(&self, k: usize, n: usize) -> usize {
        k * self.dirs.len() + n
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn i0(&self) -> &[f64] {
        &self.i0
    }

    pub fn i1(&self) -> &[f64] {
        &self.i1
    }

    pub fn noise(&self) -> Option<&NoiseDescriptor> {
        self.noise.as_ref()
    }

    pub fn observed(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// `Σ a·s + b·t` cellwise, for linear-combination checks.
    pub fn combine(&self, a: f64, other: &Sinogram, b: f64) -> Result<Sinogram> {
        if self.arc != other.arc || self.dirs != other.dirs {
            return Err(Error::GridMismatch("sinograms live on different grids".into()));
        }
        let mix = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| a * p + b * q).collect();
        Sinogram::new(
            self.arc.clone(),
            self.dirs.clone(),
            self.mask.clone(),
            mix(&self.i0, &other.i0),
            mix(&self.i1, &other.i1),
        )
    }
}

/// Masked boundary data `g⁰`, `g¹`, row-major `K × N`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub k: usize,
    pub n: usize,
    pub g0: Vec<f64>,
    pub g1: Vec<f64>,
}

/// `Σ₊ = {ν(ζ)·θ > 0}`, with near-tangent pairs excluded.
pub fn visibility_mask(arc: &ArcGrid, dirs: &DirectionGrid) -> Vec<bool> {
    let mut mask = Vec::with_capacity(arc.len() * dirs.len());
    for k in 0..arc.len() {
        let nu = arc.normal(k);
        mask.extend(dirs.dirs().iter().map(|&t| nu.dot(t) > TANGENT_TOLERANCE));
    }
    mask
}

/// `v⁰` and `v¹` at `start + ℓθ` for a ray entering the disc at `start`,
/// with `v¹` evaluated as a nested quadrature of `v⁰` over the sub-segments.
pub fn ray_traces<F>(field: &F, start: Vec2, theta: Vec2, length: f64, rule: &GaussRule) -> (f64, f64)
where
    F: VectorField + ?Sized,
{
    let g = |t: f64| theta.dot(field.eval(start + t * theta));
    let v0 = rule.integrate(0.0, length, g);
    let v1 = rule.integrate(0.0, length, |t| rule.integrate(0.0, t, g));
    (v0, v1)
}

/// Simulates `v⁰`, `v¹` on `Σ₊` with `q`-point Gauss–Legendre quadrature.
pub fn simulate_traces<F>(field: &F, arc: &ArcGrid, dirs: &DirectionGrid, q: usize) -> Result<TraceTable>
where
    F: VectorField + ?Sized,
{
    if q < 2 {
        return Err(Error::invalid(format!("quadrature order must be >= 2, got {q}")));
    }
    let rule = GaussRule::new(q);
    let mask = visibility_mask(arc, dirs);
    let n = dirs.len();
    let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..arc.len())
        .into_par_iter()
        .map(|k| {
            let zeta = arc.node(k);
            let mut v0 = vec![0.0; n];
            let mut v1 = vec![0.0; n];
            for (i, &theta) in dirs.dirs().iter().enumerate() {
                if !mask[k * n + i] {
                    continue;
                }
                if let Ok((z_in, t0)) = line_entry_point(zeta, theta) {
                    let (a, b) = ray_traces(field, z_in, theta, -t0, &rule);
                    v0[i] = a;
                    v1[i] = b;
                }
            }
            (v0, v1)
        })
        .collect();
    let (v0, v1): (Vec<Vec<f64>>, Vec<Vec<f64>>) = rows.into_iter().unzip();
    TraceTable::new(arc.len(), n, v0.concat(), v1.concat(), mask)
}

/// `I⁰ = v⁰`, `I¹ = (ζ·θ)v⁰ − v¹` on `Σ₊`.
pub fn traces_to_sinograms(tr: &TraceTable, arc: &ArcGrid, dirs: &DirectionGrid) -> Result<Sinogram> {
    if tr.shape() != (arc.len(), dirs.len()) {
        return Err(Error::GridMismatch(format!(
            "trace table is {:?}, grids are {}x{}",
            tr.shape(),
            arc.len(),
            dirs.len()
        )));
    }
    let n = dirs.len();
    let mut i0 = vec![0.0; tr.v0.len()];
    let mut i1 = vec![0.0; tr.v0.len()];
    for k in 0..arc.len() {
        let zeta = arc.node(k);
        for (i, &theta) in dirs.dirs().iter().enumerate() {
            let idx = k * n + i;
            if tr.mask[idx] {
                i0[idx] = tr.v0[idx];
                i1[idx] = zeta.dot(theta) * tr.v0[idx] - tr.v1[idx];
            }
        }
    }
    Sinogram::new(arc.clone(), dirs.clone(), tr.mask.clone(), i0, i1)
}

/// `g⁰ = I⁰` and `g¹ = (ζ·θ)I⁰ − I¹` on `Σ₊`, zero elsewhere.
pub fn build_boundary_data(sin: &Sinogram) -> BoundaryData {
    let (kk, n) = sin.shape();
    let mut g0 = vec![0.0; kk * n];
    let mut g1 = vec![0.0; kk * n];
    for k in 0..kk {
        let zeta = sin.arc.node(k);
        for (i, &theta) in sin.dirs.dirs().iter().enumerate() {
            let idx = k * n + i;
            if sin.mask[idx] {
                g0[idx] = sin.i0[idx];
                g1[idx] = zeta.dot(theta) * sin.i0[idx] - sin.i1[idx];
            }
        }
    }
    BoundaryData { k: kk, n, g0, g1 }
}

/// Relative `L²` size of `noisy − clean` over the observed cells.
pub fn relative_perturbation(clean: &[f64], noisy: &[f64], mask: &[bool]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for ((c, y), &m) in clean.iter().zip(noisy).zip(mask) {
        if m {
            num += (y - c) * (y - c);
            den += c * c;
        }
    }
    if den > 0.0 {
        (num / den).sqrt()
    } else {
        0.0
    }
}

/// Uniform sample in `[-1, 1)` for cell `cell` of channel `channel`. Each
/// cell owns a fixed position in a per-channel ChaCha stream, so values do
/// not depend on evaluation order.
fn cell_uniform(seed: u64, channel: u64, cell: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(channel);
    rng.set_word_pos(2 * cell as u128);
    let bits = rng.next_u64() >> 11;
    2.0 * (bits as f64 / (1u64 << 53) as f64) - 1.0
}

/// Adds i.i.d. uniform noise on `[-a, a]` to each channel over `Σ₊`, with
/// `a = level·‖clean‖₂·√(3/n_obs)` so that the expected relative `L²`
/// perturbation equals `level`. The realized levels are stored.
pub fn add_noise(sin: &Sinogram, level: f64, seed: u64) -> Result<Sinogram> {
    if !(level >= 0.0) || !level.is_finite() {
        return Err(Error::invalid(format!("noise level must be >= 0, got {level}")));
    }
    let observed = sin.observed();
    let mut out = sin.clone();
    let mut realized = [0.0; 2];
    if level > 0.0 && observed > 0 {
        for (channel, (clean, noisy)) in [(&sin.i0, &mut out.i0), (&sin.i1, &mut out.i1)]
            .into_iter()
            .enumerate()
        {
            let norm = clean.iter().map(|v| v * v).sum::<f64>().sqrt();
            let amp = level * norm * (3.0 / observed as f64).sqrt();
            noisy
                .par_iter_mut()
                .enumerate()
                .zip(clean.par_iter())
                .for_each(|((cell, y), &c)| {
                    if sin.mask[cell] {
                        *y = c + amp * cell_uniform(seed, channel as u64, cell);
                    }
                });
            realized[channel] = relative_perturbation(clean, noisy, &sin.mask);
        }
    }
    out.noise = Some(NoiseDescriptor {
        seed,
        target: level,
        realized,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_arc_grid, ArcKind};
    use crate::phantom::Phantom;
    use proptest::prelude::*;

    fn grids(k: usize, n: usize) -> (ArcGrid, DirectionGrid) {
        (build_arc_grid(k).unwrap(), DirectionGrid::new(n).unwrap())
    }

    #[test]
    fn zero_field_gives_zero_traces() {
        let (arc, dirs) = grids(8, 16);
        let zero = |_: Vec2| Vec2::ZERO;
        let tr = simulate_traces(&zero, &arc, &dirs, 8).unwrap();
        assert!(tr.v0().iter().chain(tr.v1()).all(|&v| v == 0.0));
    }

    #[test]
    fn gradient_field_has_vanishing_v0() {
        let (arc, dirs) = grids(16, 32);
        let tr = simulate_traces(&Phantom::Gradient, &arc, &dirs, 32).unwrap();
        let max = tr.v0().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(max < 1e-8, "max |v0| = {max}");
    }

    #[test]
    fn constant_field_matches_line_integral() {
        let e1 = |_: Vec2| Vec2::new(1.0, 0.0);
        let rule = GaussRule::new(8);
        // vertical diameter: θ·f = 0
        let (v0, _) = ray_traces(&e1, Vec2::new(0.0, -1.0), Vec2::new(0.0, 1.0), 2.0, &rule);
        assert!(v0.abs() < 1e-15);
        // tilted ray: θ₁ times the chord length
        let zeta = Vec2::new(1.0, 0.0);
        let theta = Vec2::from_angle(std::f64::consts::FRAC_PI_4);
        let (z_in, t0) = line_entry_point(zeta, theta).unwrap();
        let (v0, v1) = ray_traces(&e1, z_in, theta, -t0, &rule);
        let len = 2f64.sqrt();
        assert!((v0 - theta.x * len).abs() < 1e-14);
        assert!((v1 - theta.x * len * len / 2.0).abs() < 1e-14);
    }

    #[test]
    fn nested_v1_matches_single_integral() {
        let rule = GaussRule::new(32);
        for (k, phi) in [(0.3, 0.1), (1.2, 2.0), (2.5, 4.0)] {
            let zeta = Vec2::from_angle(k);
            let theta = Vec2::from_angle(phi);
            let Ok((z_in, t0)) = line_entry_point(zeta, theta) else { continue };
            let len = -t0;
            let (_, v1) = ray_traces(&Phantom::Experiment1, z_in, theta, len, &rule);
            let single = rule.integrate(0.0, len, |u| {
                (len - u) * theta.dot(Phantom::Experiment1.field(z_in + u * theta))
            });
            assert!((v1 - single).abs() < 1e-10, "{v1} vs {single}");
        }
    }

    #[test]
    fn sinogram_formulas() {
        let (arc, dirs) = grids(4, 8);
        let n = dirs.len();
        let mask = visibility_mask(&arc, &dirs);
        let mut v0 = vec![0.0; 32];
        let v1 = vec![0.0; 32];
        let idx = (0..32).find(|&i| mask[i]).unwrap();
        v0[idx] = 1.0;
        let tr = TraceTable::new(4, n, v0, v1, mask).unwrap();
        let sin = traces_to_sinograms(&tr, &arc, &dirs).unwrap();
        let dot = arc.node(idx / n).dot(dirs.dir(idx % n));
        assert_eq!(sin.i0()[idx], 1.0);
        assert_eq!(sin.i1()[idx], dot);
        let g = build_boundary_data(&sin);
        assert_eq!(g.g0[idx], 1.0);
        assert!(g.g1[idx].abs() < 1e-16);
    }

    #[test]
    fn boundary_data_hand_values() {
        // a node/direction pair with ζ·θ = 1/2
        let arc = ArcGrid::uniform(ArcKind::UpperHalf, 2).unwrap();
        let dirs = DirectionGrid::new(4).unwrap();
        let (mask, mut i0, mut i1) = (visibility_mask(&arc, &dirs), vec![0.0; 8], vec![0.0; 8]);
        let idx = (0..8)
            .find(|&i| mask[i])
            .expect("some observed cell");
        let dot = arc.node(idx / 4).dot(dirs.dir(idx % 4));
        i0[idx] = 2.0;
        i1[idx] = 2.0 * dot;
        let sin = Sinogram::new(arc, dirs, mask, i0, i1).unwrap();
        let g = build_boundary_data(&sin);
        assert!(g.g1[idx].abs() < 1e-15);
        assert_eq!(g.g0[idx], 2.0);
    }

    #[test]
    fn round_trip_recovers_traces() {
        let (arc, dirs) = grids(12, 24);
        let tr = simulate_traces(&Phantom::Experiment2, &arc, &dirs, 16).unwrap();
        let sin = traces_to_sinograms(&tr, &arc, &dirs).unwrap();
        let g = build_boundary_data(&sin);
        for i in 0..g.g0.len() {
            assert_eq!(g.g0[i], tr.v0()[i]);
            assert!((g.g1[i] - tr.v1()[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn masked_cells_are_zero() {
        let (arc, dirs) = grids(10, 20);
        let tr = simulate_traces(&Phantom::Experiment1, &arc, &dirs, 8).unwrap();
        for (i, &m) in tr.mask().iter().enumerate() {
            if !m {
                assert_eq!(tr.v0()[i], 0.0);
                assert_eq!(tr.v1()[i], 0.0);
            }
        }
        let g = build_boundary_data(&Sinogram::zeros(arc, dirs));
        assert!(g.g0.iter().chain(&g.g1).all(|&v| v == 0.0));
    }

    #[test]
    fn quadrature_converges() {
        let (arc, dirs) = grids(12, 24);
        for phantom in [Phantom::Experiment1, Phantom::Experiment2] {
            let a = traces_to_sinograms(&simulate_traces(&phantom, &arc, &dirs, 16).unwrap(), &arc, &dirs)
                .unwrap();
            let b = traces_to_sinograms(&simulate_traces(&phantom, &arc, &dirs, 32).unwrap(), &arc, &dirs)
                .unwrap();
            let diff = a
                .i0()
                .iter()
                .zip(b.i0())
                .chain(a.i1().iter().zip(b.i1()))
                .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
            assert!(diff < 1e-9, "{phantom}: {diff}");
        }
    }

    #[test]
    fn flip_symmetry() {
        let rule = GaussRule::new(32);
        for (a, phi) in [(0.4, 3.5), (1.0, 4.2), (2.6, 5.5)] {
            let zeta = Vec2::from_angle(a);
            let theta = Vec2::from_angle(phi);
            let Ok((z_in, t0)) = line_entry_point(zeta, theta) else { continue };
            let (fwd, _) = ray_traces(&Phantom::Experiment1, z_in, theta, -t0, &rule);
            let (bwd, _) = ray_traces(&Phantom::Experiment1, zeta, -1.0 * theta, -t0, &rule);
            assert!((fwd + bwd).abs() < 1e-12);
        }
    }

    #[test]
    fn noise_levels() {
        let (arc, dirs) = grids(24, 48);
        let sin = traces_to_sinograms(
            &simulate_traces(&Phantom::Experiment1, &arc, &dirs, 16).unwrap(),
            &arc,
            &dirs,
        )
        .unwrap();
        let same = add_noise(&sin, 0.0, 3).unwrap();
        assert_eq!(same.i0(), sin.i0());
        assert_eq!(same.noise().unwrap().realized, [0.0, 0.0]);

        let noisy = add_noise(&sin, 0.06, 7).unwrap();
        let desc = noisy.noise().unwrap();
        for (ch, (c, y)) in [(sin.i0(), noisy.i0()), (sin.i1(), noisy.i1())].iter().enumerate() {
            let r = relative_perturbation(c, y, sin.mask());
            assert!((r - desc.realized[ch]).abs() < 1e-12);
            assert!((0.04..=0.08).contains(&r), "channel {ch}: {r}");
        }
        for (i, &m) in sin.mask().iter().enumerate() {
            if !m {
                assert_eq!(noisy.i0()[i], 0.0);
            }
        }
        let again = add_noise(&sin, 0.06, 7).unwrap();
        assert_eq!(again, noisy);
        let other = add_noise(&sin, 0.06, 8).unwrap();
        assert_ne!(other.i0(), noisy.i0());
    }

    proptest! {
        #[test]
        fn noise_draws_are_bounded(seed in any::<u64>(), channel in 0u64..2, cell in 0usize..1_000_000) {
            let u = cell_uniform(seed, channel, cell);
            prop_assert!((-1.0..1.0).contains(&u));
            prop_assert_eq!(u, cell_uniform(seed, channel, cell));
        }
    }
}
