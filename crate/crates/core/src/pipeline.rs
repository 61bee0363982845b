//! End-to-end reconstruction from partial (upper half-circle) or full
//! boundary data, and the error metrics used to assess it.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::calculus::{assemble_f1, assemble_field, lsq_gradient, lsq_hessian, DerivativeBundle, Weighting};
use crate::forward::{build_boundary_data, ray_traces, Sinogram};
use crate::geometry::{
    entry_point, neighborhoods, triangulate_half_disc, ArcGrid, ArcKind, ChordGrid, DirectionGrid,
    Triangulation, Vec2,
};
use crate::harmonics::{fourier_modes, ModeTable, Parity};
use crate::kernels::{area_first, area_modes, eval_b_modes, eval_f_modes, ChordData, PsiRule};
use crate::phantom::{Phantom, VectorField};
use crate::quadrature::GaussRule;
use crate::sie::HilbertSystem;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReconMode {
    /// Data on the upper half-circle only; chord traces are recovered.
    Partial,
    /// Data on the whole circle.
    Full,
}

impl ReconMode {
    pub fn arc_kind(self) -> ArcKind {
        match self {
            ReconMode::Partial => ArcKind::UpperHalf,
            ReconMode::Full => ArcKind::FullCircle,
        }
    }
}

impl fmt::Display for ReconMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReconMode::Partial => "partial",
            ReconMode::Full => "full",
        })
    }
}

impl FromStr for ReconMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "partial" => Ok(ReconMode::Partial),
            "full" => Ok(ReconMode::Full),
            other => Err(Error::invalid(format!("unknown mode `{other}`"))),
        }
    }
}

/// Discretization and run parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconConfig {
    /// Boundary nodes per half-circle, so `Δω = π/K` in both modes; full
    /// data has `2K` nodes.
    pub k: usize,
    /// Directions.
    pub n: usize,
    /// Chord nodes.
    pub j: usize,
    /// Fourier truncation order; the deepest mode is `-2M`.
    pub m: usize,
    pub mesh_diameter: f64,
    /// Neighborhood radius for differentiation.
    pub radius: f64,
    pub q_psi: usize,
    /// Gauss–Legendre order of the forward simulation.
    pub quad: usize,
    pub mode: ReconMode,
    pub noise_level: f64,
    pub noise_seed: u64,
    pub phantom: Phantom,
    pub tikhonov: f64,
    pub weighting: Weighting,
}

impl Default for ReconConfig {
    fn default() -> Self {
        Self::paper()
    }
}

impl ReconConfig {
    /// The resolution of the published experiments.
    pub fn paper() -> Self {
        ReconConfig {
            k: 720,
            n: 1440,
            j: 458,
            m: 128,
            mesh_diameter: 0.0766,
            radius: 0.15,
            q_psi: crate::kernels::DEFAULT_Q_PSI,
            quad: 32,
            mode: ReconMode::Partial,
            noise_level: 0.0,
            noise_seed: 0,
            phantom: Phantom::Experiment1,
            tikhonov: 0.0,
            weighting: Weighting::Uniform,
        }
    }

    /// A quarter-resolution preset that runs in seconds.
    pub fn coarse() -> Self {
        ReconConfig {
            k: 180,
            n: 360,
            j: 114,
            m: 32,
            mesh_diameter: 0.2,
            radius: 0.25,
            q_psi: 256,
            quad: 32,
            ..Self::paper()
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "paper" => Ok(Self::paper()),
            "coarse" => Ok(Self::coarse()),
            other => Err(Error::invalid(format!("unknown preset `{other}`"))),
        }
    }

    pub fn with_mode(mut self, mode: ReconMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_phantom(mut self, phantom: Phantom) -> Self {
        self.phantom = phantom;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::invalid(what.to_string()));
        if self.k < 2 || self.j < 2 || self.m < 1 || self.quad < 2 {
            return bad("K >= 2, J >= 2, M >= 1 and quadrature order >= 2 are required");
        }
        if self.n < 4 || self.n % 2 != 0 {
            return bad("N must be even and >= 4");
        }
        if !(self.mesh_diameter > 0.0 && self.mesh_diameter < 1.0) {
            return bad("mesh diameter must lie in (0, 1)");
        }
        if !(self.radius > 0.0) {
            return bad("neighborhood radius must be positive");
        }
        if self.q_psi < 64 {
            return bad("Q_psi must be >= 64");
        }
        if !(self.noise_level >= 0.0) || !(self.tikhonov >= 0.0) {
            return bad("noise level and Tikhonov parameter must be >= 0");
        }
        Ok(())
    }

    /// Number of boundary nodes carrying data.
    pub fn arc_nodes(&self) -> usize {
        match self.mode {
            ReconMode::Partial => self.k,
            ReconMode::Full => 2 * self.k,
        }
    }

    pub fn arc(&self) -> Result<ArcGrid> {
        ArcGrid::uniform(self.mode.arc_kind(), self.arc_nodes())
    }

    pub fn dirs(&self) -> Result<DirectionGrid> {
        DirectionGrid::new(self.n)
    }

    pub fn chord(&self) -> Result<ChordGrid> {
        ChordGrid::new(self.j, 1.0)
    }

    pub fn mesh(&self) -> Result<Triangulation> {
        triangulate_half_disc(self.mesh_diameter)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Reconstructed,
    Analytic,
}

/// A vector field sampled at triangle centroids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldOnMesh {
    pub centroids: Vec<Vec2>,
    pub areas: Vec<f64>,
    pub values: Vec<Vec2>,
    pub provenance: Provenance,
}

impl FieldOnMesh {
    pub fn new(tri: &Triangulation, values: Vec<Vec2>, provenance: Provenance) -> Result<Self> {
        if values.len() != tri.len() {
            return Err(Error::GridMismatch(format!(
                "{} field values for {} triangles",
                values.len(),
                tri.len()
            )));
        }
        Ok(FieldOnMesh {
            centroids: tri.centroids().to_vec(),
            areas: tri.areas().to_vec(),
            values,
            provenance,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.x.is_finite() && v.y.is_finite())
    }

    pub fn same_mesh(&self, other: &FieldOnMesh) -> bool {
        self.centroids == other.centroids && self.areas == other.areas
    }
}

/// The phantom evaluated at the centroids of `tri`.
pub fn analytic_field<F: VectorField + ?Sized>(field: &F, tri: &Triangulation) -> FieldOnMesh {
    FieldOnMesh {
        centroids: tri.centroids().to_vec(),
        areas: tri.areas().to_vec(),
        values: tri.centroids().iter().map(|&c| field.eval(c)).collect(),
        provenance: Provenance::Analytic,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    /// All of `Ω⁺_Δ`.
    All,
    /// Triangles with centroid height `> 0.1`.
    Upper,
}

impl Region {
    pub const UPPER_CUTOFF: f64 = 0.1;

    pub fn contains(self, c: Vec2) -> bool {
        match self {
            Region::All => true,
            Region::Upper => c.y > Self::UPPER_CUTOFF,
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::All => "all",
            Region::Upper => "upper",
        })
    }
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Region::All),
            "upper" | "up" => Ok(Region::Upper),
            other => Err(Error::invalid(format!("unknown region `{other}`"))),
        }
    }
}

/// Area-weighted relative `L²` error over `region`.
pub fn relative_l2_error(rec: &FieldOnMesh, truth: &FieldOnMesh, region: Region) -> Result<f64> {
    if !rec.same_mesh(truth) {
        return Err(Error::GridMismatch("fields live on different meshes".into()));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for s in 0..truth.len() {
        if region.contains(truth.centroids[s]) {
            let a = truth.areas[s];
            num += (rec.values[s] - truth.values[s]).norm_sq() * a;
            den += truth.values[s].norm_sq() * a;
        }
    }
    if !(den > 0.0) {
        return Err(Error::ZeroDenominator);
    }
    Ok((num / den).sqrt())
}

/// One record per pipeline stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    pub seconds: f64,
    pub metrics: BTreeMap<String, f64>,
}

/// Intermediate tables of a run. Chord tables are absent in full mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageOutputs {
    pub g0: ModeTable,
    pub g1: ModeTable,
    pub v0_chord: Option<ModeTable>,
    pub v0_interior: ModeTable,
    pub v1_chord: Option<ModeTable>,
    pub v1_first: Vec<Complex64>,
    pub derivatives: DerivativeBundle,
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    /// Field on the half-disc mesh.
    pub field: FieldOnMesh,
    pub mesh: Triangulation,
    pub stages: StageOutputs,
    pub diagnostics: Vec<StageRecord>,
}

#[derive(Debug, Clone, Default)]
pub struct ReconOptions {
    /// Stage outputs are stored here and reused by later runs with the same
    /// configuration and data.
    pub checkpoint_dir: Option<PathBuf>,
}

#[derive(Serialize, Deserialize)]
struct Checkpoint<T> {
    fingerprint: u64,
    payload: T,
}

struct Runner<'a> {
    diagnostics: Vec<StageRecord>,
    dir: Option<&'a Path>,
    fingerprint: u64,
}

impl Runner<'_> {
    /// Runs `f` as stage `name`, or loads its output from a matching
    /// checkpoint.
    fn stage<T, F>(&mut self, name: &'static str, f: F) -> Result<T>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce(&mut BTreeMap<String, f64>) -> Result<T>,
    {
        let start = Instant::now();
        let mut metrics = BTreeMap::new();
        let path = self.dir.map(|d| d.join(format!("{name}.json")));
        let cached = path
            .as_ref()
            .and_then(|p| std::fs::read(p).ok())
            .and_then(|bytes| serde_json::from_slice::<Checkpoint<T>>(&bytes).ok())
            .filter(|c| c.fingerprint == self.fingerprint);
        let value = match cached {
            Some(c) => {
                metrics.insert("resumed".into(), 1.0);
                c.payload
            }
            None => {
                let value = f(&mut metrics).map_err(Error::in_stage(name))?;
                if let Some(p) = &path {
                    let ck = Checkpoint {
                        fingerprint: self.fingerprint,
                        payload: value,
                    };
                    std::fs::write(p, serde_json::to_vec(&ck)?)?;
                    ck.payload
                } else {
                    value
                }
            }
        };
        self.diagnostics.push(StageRecord {
            stage: name.to_string(),
            seconds: start.elapsed().as_secs_f64(),
            metrics,
        });
        log::info!("stage {name} done");
        Ok(value)
    }
}

fn fingerprint(cfg: &ReconConfig, sin: &Sinogram) -> u64 {
    let mut h = DefaultHasher::new();
    serde_json::to_string(cfg).unwrap_or_default().hash(&mut h);
    for v in sin.i0().iter().chain(sin.i1()) {
        v.to_bits().hash(&mut h);
    }
    sin.mask().hash(&mut h);
    h.finish()
}

fn check_grids(cfg: &ReconConfig, sin: &Sinogram) -> Result<()> {
    let (k, n) = sin.shape();
    if sin.arc().kind() != cfg.mode.arc_kind() || k != cfg.arc_nodes() || n != cfg.n {
        return Err(Error::GridMismatch(format!(
            "sinogram is {k}x{n} on {:?}, configuration expects {}x{} on {:?}",
            sin.arc().kind(),
            cfg.arc_nodes(),
            cfg.n,
            cfg.mode.arc_kind()
        )));
    }
    Ok(())
}

fn b_at_points(
    points: &[Vec2],
    arc: &ArcGrid,
    g: &ModeTable,
    chord: Option<ChordData<'_>>,
) -> Result<ModeTable> {
    let rows = points
        .par_iter()
        .map(|c| eval_b_modes(arc, g, chord, c.to_complex()))
        .collect::<Result<Vec<_>>>()?;
    ModeTable::from_rows(g.parity(), g.order(), rows)
}

fn max_abs(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Runs the reconstruction selected by `cfg.mode`.
pub fn reconstruct(cfg: &ReconConfig, sin: &Sinogram, opts: &ReconOptions) -> Result<Reconstruction> {
    cfg.validate()?;
    check_grids(cfg, sin)?;
    if let Some(dir) = &opts.checkpoint_dir {
        std::fs::create_dir_all(dir)?;
    }
    let mut run = Runner {
        diagnostics: Vec::new(),
        dir: opts.checkpoint_dir.as_deref(),
        fingerprint: fingerprint(cfg, sin),
    };
    match cfg.mode {
        ReconMode::Partial => partial(cfg, sin, &mut run),
        ReconMode::Full => full(cfg, sin, &mut run),
    }
}

/// Partial-data reconstruction; `sin` must live on the upper half-circle.
pub fn reconstruct_partial(cfg: &ReconConfig, sin: &Sinogram) -> Result<Reconstruction> {
    reconstruct(&cfg.clone().with_mode(ReconMode::Partial), sin, &ReconOptions::default())
}

/// Full-data reconstruction; `sin` must cover the whole circle.
pub fn reconstruct_full(cfg: &ReconConfig, sin: &Sinogram) -> Result<Reconstruction> {
    reconstruct(&cfg.clone().with_mode(ReconMode::Full), sin, &ReconOptions::default())
}

fn boundary_modes(cfg: &ReconConfig, sin: &Sinogram, run: &mut Runner<'_>) -> Result<(ModeTable, ModeTable)> {
    run.stage("boundary_modes", |m| {
        let g = build_boundary_data(sin);
        let g0 = fourier_modes(&g.g0, sin.dirs(), Parity::Even, cfg.m)?;
        let g1 = fourier_modes(&g.g1, sin.dirs(), Parity::Odd, cfg.m)?;
        m.insert("max_abs_g0".into(), max_abs(g0.values()));
        m.insert("max_abs_g1".into(), max_abs(g1.values()));
        Ok((g0, g1))
    })
}

fn differentiate(
    cfg: &ReconConfig,
    mesh: &Triangulation,
    v0: &ModeTable,
    v1_first: &[Complex64],
    run: &mut Runner<'_>,
) -> Result<DerivativeBundle> {
    run.stage("differentiation", |m| {
        let nb = neighborhoods(mesh, cfg.radius)?;
        let sizes = (0..nb.len()).map(|s| nb.members(s).len());
        m.insert("min_neighbors".into(), sizes.clone().min().unwrap_or(0) as f64);
        m.insert("max_neighbors".into(), sizes.max().unwrap_or(0) as f64);
        let v0 = lsq_gradient(mesh, &nb, &v0.column(0), cfg.weighting)?;
        let v1 = lsq_hessian(mesh, &nb, v1_first, cfg.weighting)?;
        Ok(DerivativeBundle { v0, v1 })
    })
}

fn finish(
    mesh: Triangulation,
    stages: StageOutputs,
    upper: usize,
    run: &mut Runner<'_>,
) -> Result<Reconstruction> {
    let start = Instant::now();
    let f1 = assemble_f1(&stages.derivatives);
    let values: Vec<Vec2> = assemble_field(&f1).into_iter().take(upper).collect();
    let half = if mesh.len() == upper {
        mesh
    } else {
        let keep: Vec<[usize; 3]> = mesh.triangles()[..upper].to_vec();
        Triangulation::new(mesh.vertices().to_vec(), keep)?
    };
    let field = FieldOnMesh::new(&half, values, Provenance::Reconstructed)?;
    if !field.is_finite() {
        return Err(Error::in_stage("field")(Error::invalid("non-finite field values")));
    }
    run.diagnostics.push(StageRecord {
        stage: "field".into(),
        seconds: start.elapsed().as_secs_f64(),
        metrics: BTreeMap::from([("triangles".to_string(), upper as f64)]),
    });
    Ok(Reconstruction {
        field,
        mesh: half,
        stages,
        diagnostics: std::mem::take(&mut run.diagnostics),
    })
}

fn partial(cfg: &ReconConfig, sin: &Sinogram, run: &mut Runner<'_>) -> Result<Reconstruction> {
    let arc = sin.arc();
    let (mesh, chord, system, rule) = run.stage_geometry(cfg)?;
    let centroids = mesh.centroids().to_vec();
    let chord_points: Vec<Vec2> = chord.nodes().iter().map(|&x| Vec2::new(x, 0.0)).collect();

    let (g0, g1) = boundary_modes(cfg, sin, run)?;

    let v0_chord = run.stage("chord_v0", |m| {
        let rhs = chord_rhs(arc, &g0, &chord)?;
        let sol = system.solve_modes(&rhs)?;
        m.insert("max_residual".into(), sol.max_residual());
        Ok(sol.modes)
    })?;

    let v0_interior = run.stage("interior_v0", |m| {
        let data = ChordData {
            chord: &chord,
            modes: &v0_chord,
        };
        let v = b_at_points(&centroids, arc, &g0, Some(data))?;
        m.insert("max_abs".into(), max_abs(v.values()));
        Ok(v)
    })?;

    let v1_chord = run.stage("chord_v1", |m| {
        let mut rhs = chord_rhs(arc, &g1, &chord)?;
        let t = area_modes(&chord_points, &mesh, &v0_interior, &rule)?;
        for l in 0..rhs.points() {
            let trow = t.row(l).to_vec();
            for (r, tv) in rhs.row_mut(l).iter_mut().zip(trow) {
                *r += 2.0 * tv;
            }
        }
        m.insert("max_abs_area_term".into(), max_abs(t.values()));
        let sol = system.solve_modes(&rhs)?;
        m.insert("max_residual".into(), sol.max_residual());
        Ok(sol.modes)
    })?;

    let v1_first = run.stage("interior_v1", |m| {
        let data = ChordData {
            chord: &chord,
            modes: &v1_chord,
        };
        let b = b_at_points(&centroids, arc, &g1, Some(data))?;
        let t = area_first(&centroids, &mesh, &v0_interior, &rule)?;
        let v: Vec<Complex64> = (0..centroids.len()).map(|s| b.get(s, 0) + t[s]).collect();
        m.insert("max_abs".into(), max_abs(&v));
        Ok(v)
    })?;

    let derivatives = differentiate(cfg, &mesh, &v0_interior, &v1_first, run)?;
    let upper = mesh.len();
    let stages = StageOutputs {
        g0,
        g1,
        v0_chord: Some(v0_chord),
        v0_interior,
        v1_chord: Some(v1_chord),
        v1_first,
        derivatives,
    };
    finish(mesh, stages, upper, run)
}

fn full(cfg: &ReconConfig, sin: &Sinogram, run: &mut Runner<'_>) -> Result<Reconstruction> {
    let arc = sin.arc();
    let (half, whole, rule) = run.stage("geometry", |m| {
        let half = cfg.mesh()?;
        let whole = half.reflected()?;
        m.insert("triangles".into(), half.len() as f64);
        m.insert("mean_diameter".into(), half.mean_diameter());
        Ok((half, whole, cfg.q_psi))
    })?;
    let rule = PsiRule::new(rule)?;
    let centroids = whole.centroids().to_vec();

    let (g0, g1) = boundary_modes(cfg, sin, run)?;

    let v0_interior = run.stage("interior_v0", |m| {
        let v = b_at_points(&centroids, arc, &g0, None)?;
        m.insert("max_abs".into(), max_abs(v.values()));
        Ok(v)
    })?;

    let v1_first = run.stage("interior_v1", |m| {
        let b = b_at_points(&centroids, arc, &g1, None)?;
        let t = area_first(&centroids, &whole, &v0_interior, &rule)?;
        let v: Vec<Complex64> = (0..centroids.len()).map(|s| b.get(s, 0) + t[s]).collect();
        m.insert("max_abs".into(), max_abs(&v));
        Ok(v)
    })?;

    let derivatives = differentiate(cfg, &whole, &v0_interior, &v1_first, run)?;
    let stages = StageOutputs {
        g0,
        g1,
        v0_chord: None,
        v0_interior,
        v1_chord: None,
        v1_first,
        derivatives,
    };
    let upper = half.len();
    finish(whole, stages, upper, run)
}

impl Runner<'_> {
    fn stage_geometry(&mut self, cfg: &ReconConfig) -> Result<(Triangulation, ChordGrid, HilbertSystem, PsiRule)> {
        let (mesh, chord) = self.stage("geometry", |m| {
            let mesh = cfg.mesh()?;
            let chord = cfg.chord()?;
            let dx = chord.step();
            let flagged = mesh
                .centroids()
                .iter()
                .filter(|c| (c.x.abs() - 1.0).hypot(c.y) < dx)
                .count();
            m.insert("triangles".into(), mesh.len() as f64);
            m.insert("mean_diameter".into(), mesh.mean_diameter());
            m.insert("endpoint_flagged".into(), flagged as f64);
            Ok((mesh, chord))
        })?;
        let system = HilbertSystem::new(&chord, cfg.tikhonov).map_err(Error::in_stage("geometry"))?;
        let rule = PsiRule::new(cfg.q_psi)?;
        Ok((mesh, chord, system, rule))
    }
}

/// `F_m[G](x_ℓ)` for every chord node and mode.
fn chord_rhs(arc: &ArcGrid, g: &ModeTable, chord: &ChordGrid) -> Result<ModeTable> {
    let rows = chord
        .nodes()
        .par_iter()
        .map(|&x| eval_f_modes(arc, g, x))
        .collect::<Result<Vec<_>>>()?;
    ModeTable::from_rows(g.parity(), g.order(), rows)
}

/// True mode values `V⁰_m` (even) and `V¹_m` (odd) at interior points, from
/// direct ray quadrature of the traces followed by the angular Fourier sums.
pub fn interior_trace_modes<F: VectorField + ?Sized>(
    field: &F,
    points: &[Vec2],
    dirs: &DirectionGrid,
    order: usize,
    q: usize,
) -> Result<(ModeTable, ModeTable)> {
    let rule = GaussRule::new(q);
    let n = dirs.len();
    let rows: Vec<(Vec<f64>, Vec<f64>)> = points
        .par_iter()
        .map(|&p| {
            let mut v0 = vec![0.0; n];
            let mut v1 = vec![0.0; n];
            for (i, &theta) in dirs.dirs().iter().enumerate() {
                let (z_in, t0) = entry_point(p, theta)?;
                let (a, b) = ray_traces(field, z_in, theta, -t0, &rule);
                v0[i] = a;
                v1[i] = b;
            }
            Ok((v0, v1))
        })
        .collect::<Result<Vec<_>>>()?;
    let (v0, v1): (Vec<Vec<f64>>, Vec<Vec<f64>>) = rows.into_iter().unzip();
    Ok((
        fourier_modes(&v0.concat(), dirs, Parity::Even, order)?,
        fourier_modes(&v1.concat(), dirs, Parity::Odd, order)?,
    ))
}

/// [`interior_trace_modes`] at the chord nodes: the true traces that the
/// chord solves should recover.
pub fn chord_trace_oracle<F: VectorField + ?Sized>(
    field: &F,
    chord: &ChordGrid,
    dirs: &DirectionGrid,
    order: usize,
    q: usize,
) -> Result<(ModeTable, ModeTable)> {
    let points: Vec<Vec2> = chord.nodes().iter().map(|&x| Vec2::new(x, 0.0)).collect();
    interior_trace_modes(field, &points, dirs, order, q)
}

/// Simulated noiseless sinogram of `cfg.phantom` on the grids of `cfg`.
pub fn simulate(cfg: &ReconConfig) -> Result<Sinogram> {
    let arc = cfg.arc()?;
    let dirs = cfg.dirs()?;
    let tr = crate::forward::simulate_traces(&cfg.phantom, &arc, &dirs, cfg.quad)?;
    crate::forward::traces_to_sinograms(&tr, &arc, &dirs)
}
