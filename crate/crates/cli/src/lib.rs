//! Subcommands `mesh`, `simulate`, `noise`, `reconstruct`, `evaluate` and
//! `render`. Every command writes a `<output>.manifest.json` next to its
//! main output.

pub mod config;
pub mod manifest;
pub mod render;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use momenta_vt::forward::add_noise;
use momenta_vt::geometry::triangulate_half_disc;
use momenta_vt::io;
use momenta_vt::pipeline::{analytic_field, reconstruct, relative_l2_error, simulate, Provenance, ReconOptions};
use momenta_vt::{FieldOnMesh, Phantom, ReconMode, Region, VectorField};

use config::ConfigArgs;
use manifest::RunManifest;
use render::ColorScale;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] momenta_vt::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 2 for usage errors, 4 for numerical-stage failures, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_numerical() => 4,
            _ => 3,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Parser)]
#[command(name = "momenta-vt", version, about = "Vector field tomography from partial moment ray transform data")]
pub struct Cli {
    /// Worker threads for the parallel stages.
    #[arg(long, global = true, env = "MOMENTA_VT_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Triangulate the half-disc.
    Mesh(MeshArgs),
    /// Simulate noiseless moment-transform sinograms of a phantom.
    Simulate(SimulateArgs),
    /// Add uniform noise to a sinogram.
    Noise(NoiseArgs),
    /// Reconstruct the field from a sinogram.
    Reconstruct(ReconstructArgs),
    /// Tabulate relative L² errors of reconstructions.
    Evaluate(EvaluateArgs),
    /// Rasterize a sinogram or a field to a text PPM.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct MeshArgs {
    /// Target mean triangle diameter.
    #[arg(long = "target-h", default_value_t = 0.0766)]
    pub target_h: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// The phantom comes from `--phantom` or the config file.
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Relative L² noise level, e.g. 0.06.
    #[arg(long)]
    pub level: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Field CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the half-disc mesh.
    #[arg(long = "mesh-out")]
    pub mesh_out: Option<PathBuf>,
    /// Also write the analytic field of `--phantom` on the same mesh.
    #[arg(long = "truth-out")]
    pub truth_out: Option<PathBuf>,
    /// JSON-lines stage diagnostics; defaults to `<out>.diagnostics.jsonl`.
    #[arg(long)]
    pub diagnostics: Option<PathBuf>,
    /// Reuse and store stage checkpoints here.
    #[arg(long = "checkpoint-dir")]
    pub checkpoint_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Reconstructed field, as `label=path` or a bare path. Repeatable.
    #[arg(long = "rec", required = true)]
    pub rec: Vec<String>,
    /// Analytic field file on the same mesh.
    #[arg(long, conflicts_with = "phantom")]
    pub truth: Option<PathBuf>,
    /// Evaluate the phantom at the reconstruction's centroids instead.
    #[arg(long)]
    pub phantom: Option<Phantom>,
    /// Also write the table as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Channel {
    I0,
    I1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Component {
    F1,
    F2,
    Magnitude,
    Arrows,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long, conflicts_with = "field", required_unless_present = "field")]
    pub sinogram: Option<PathBuf>,
    #[arg(long, requires = "mesh")]
    pub field: Option<PathBuf>,
    /// Mesh file matching `--field`.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Channel::I0)]
    pub channel: Channel,
    #[arg(long, value_enum, default_value_t = Component::F1)]
    pub component: Component,
    /// Pixels per sinogram cell.
    #[arg(long, default_value_t = 1)]
    pub pixel: usize,
    /// Image width for field renders.
    #[arg(long, default_value_t = 400)]
    pub size: usize,
    /// Fixed lower end of the color scale.
    #[arg(long, requires = "max", allow_negative_numbers = true)]
    pub min: Option<f64>,
    #[arg(long, requires = "min", allow_negative_numbers = true)]
    pub max: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        // a pool may already exist when called repeatedly in-process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::Mesh(a) => cmd_mesh(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Noise(a) => cmd_noise(&a),
        Command::Reconstruct(a) => cmd_reconstruct(&a),
        Command::Evaluate(a) => cmd_evaluate(&a),
        Command::Render(a) => cmd_render(&a),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn require_input(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Data(format!("{}: no such file", path.display())))
    }
}

pub fn cmd_mesh(a: &MeshArgs) -> Result<()> {
    if !(a.target_h > 0.0 && a.target_h < 1.0) {
        return Err(CliError::Usage("--target-h must lie in (0, 1)".into()));
    }
    let mesh = triangulate_half_disc(a.target_h)?;
    io::save_mesh(&mesh, &a.out)?;
    info!("{} triangles, mean diameter {:.4}", mesh.len(), mesh.mean_diameter());
    let mut m = RunManifest::new("mesh");
    m.output(&a.out)?;
    m.write(&RunManifest::path_for(&a.out))
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let resolved = a.config.resolve()?;
    if !resolved.explicit_phantom {
        return Err(CliError::Usage("simulate needs --phantom".into()));
    }
    let cfg = resolved.config;
    let sin = simulate(&cfg)?;
    io::save_sinogram(&sin, &a.out)?;
    info!("simulated {}x{} sinogram of {}", cfg.k, cfg.n, cfg.phantom);
    let mut m = RunManifest::new("simulate");
    m.config = Some(cfg);
    m.output(&a.out)?;
    m.write(&RunManifest::path_for(&a.out))
}

pub fn cmd_noise(a: &NoiseArgs) -> Result<()> {
    if !(a.level >= 0.0) {
        return Err(CliError::Usage("--level must be >= 0".into()));
    }
    require_input(&a.input)?;
    let sin = io::load_sinogram(&a.input)?;
    let noisy = add_noise(&sin, a.level, a.seed)?;
    io::save_sinogram(&noisy, &a.out)?;
    let mut m = RunManifest::new("noise");
    m.noise = noisy.noise().copied();
    if let Some(n) = &m.noise {
        info!("realized noise: I0 {:.2}%, I1 {:.2}%", 100.0 * n.realized[0], 100.0 * n.realized[1]);
    }
    m.input(&a.input)?;
    m.output(&a.out)?;
    m.write(&RunManifest::path_for(&a.out))
}

pub fn cmd_reconstruct(a: &ReconstructArgs) -> Result<()> {
    let resolved = a.config.resolve()?;
    let mut cfg = resolved.config;
    require_input(&a.input)?;
    let sin = io::load_sinogram(&a.input)?;
    let (k, n) = sin.shape();
    let file_mode = match sin.arc().kind() {
        momenta_vt::ArcKind::UpperHalf => ReconMode::Partial,
        momenta_vt::ArcKind::FullCircle => ReconMode::Full,
    };
    let mismatch = |what: String| CliError::Core(momenta_vt::Error::GridMismatch(what));
    if resolved.explicit_mode && cfg.mode != file_mode {
        return Err(mismatch(format!("{} reconstruction of {} data", cfg.mode, file_mode)));
    }
    cfg.mode = file_mode;
    if file_mode == ReconMode::Full && k % 2 != 0 {
        return Err(mismatch(format!("full-circle data needs an even node count, file has {k}")));
    }
    let file_k = if file_mode == ReconMode::Full { k / 2 } else { k };
    if resolved.explicit_k && cfg.k != file_k {
        return Err(mismatch(format!("file has K = {file_k}, configuration asks for {}", cfg.k)));
    }
    if resolved.explicit_n && cfg.n != n {
        return Err(mismatch(format!("file has N = {n}, configuration asks for {}", cfg.n)));
    }
    cfg.k = file_k;
    cfg.n = n;

    let opts = ReconOptions {
        checkpoint_dir: a.checkpoint_dir.clone(),
    };
    let rec = reconstruct(&cfg, &sin, &opts)?;
    io::save_field(&rec.field, &a.out)?;

    let diag_path = a.diagnostics.clone().unwrap_or_else(|| {
        let mut s = a.out.as_os_str().to_owned();
        s.push(".diagnostics.jsonl");
        PathBuf::from(s)
    });
    let mut lines = String::new();
    for d in &rec.diagnostics {
        lines += &serde_json::to_string(d).map_err(momenta_vt::Error::from)?;
        lines.push('\n');
    }
    write_text(&diag_path, &lines)?;

    let mut m = RunManifest::new("reconstruct");
    m.input(&a.input)?;
    m.output(&a.out)?;
    m.output(&diag_path)?;
    if let Some(path) = &a.mesh_out {
        io::save_mesh(&rec.mesh, path)?;
        m.output(path)?;
    }
    if resolved.explicit_phantom {
        let truth = analytic_field(&cfg.phantom, &rec.mesh);
        for region in [Region::All, Region::Upper] {
            let e = relative_l2_error(&rec.field, &truth, region)?;
            info!("relative L2 error over {region}: {:.1}%", 100.0 * e);
            m.errors.insert(region.to_string(), e);
        }
        if let Some(path) = &a.truth_out {
            io::save_field(&truth, path)?;
            m.output(path)?;
        }
    } else if a.truth_out.is_some() {
        return Err(CliError::Usage("--truth-out needs --phantom".into()));
    }
    m.noise = sin.noise().copied();
    m.stages = rec.diagnostics;
    m.config = Some(cfg);
    m.write(&RunManifest::path_for(&a.out))
}

fn truth_on(field: &FieldOnMesh, phantom: Phantom) -> FieldOnMesh {
    FieldOnMesh {
        centroids: field.centroids.clone(),
        areas: field.areas.clone(),
        values: field.centroids.iter().map(|&c| phantom.eval(c)).collect(),
        provenance: Provenance::Analytic,
    }
}

/// Rows are regions, columns the labelled reconstructions.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTable {
    pub labels: Vec<String>,
    /// `errors[r][c]` for region `r` (all, upper) and column `c`.
    pub errors: [Vec<f64>; 2],
}

impl ErrorTable {
    pub fn to_text(&self) -> String {
        let mut out = format!("{:<28}", "");
        for l in &self.labels {
            out += &format!("{l:>12}");
        }
        out.push('\n');
        for (name, row) in ["Error in L2(all)", "Error in L2(upper, y>0.1)"].iter().zip(&self.errors) {
            out += &format!("{name:<28}");
            for e in row {
                out += &format!("{:>11.1}%", 100.0 * e);
            }
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("region");
        for l in &self.labels {
            out += &format!(",{l}");
        }
        out.push('\n');
        for (name, row) in ["all", "upper"].iter().zip(&self.errors) {
            out += name;
            for e in row {
                out += &format!(",{e}");
            }
            out.push('\n');
        }
        out
    }
}

pub fn cmd_evaluate(a: &EvaluateArgs) -> Result<()> {
    if a.truth.is_none() && a.phantom.is_none() {
        return Err(CliError::Usage("evaluate needs --truth or --phantom".into()));
    }
    let truth_file = match &a.truth {
        Some(path) => {
            require_input(path)?;
            Some(io::load_field(path, Provenance::Analytic)?)
        }
        None => None,
    };
    let mut table = ErrorTable {
        labels: Vec::new(),
        errors: [Vec::new(), Vec::new()],
    };
    for (i, spec) in a.rec.iter().enumerate() {
        let (label, path) = match spec.split_once('=') {
            Some((l, p)) => (l.to_string(), PathBuf::from(p)),
            None => (format!("rec{}", i + 1), PathBuf::from(spec)),
        };
        require_input(&path)?;
        let rec = io::load_field(&path, Provenance::Reconstructed)?;
        let truth = match (&truth_file, a.phantom) {
            (Some(t), _) => t.clone(),
            (None, Some(p)) => truth_on(&rec, p),
            (None, None) => unreachable!(),
        };
        table.errors[0].push(relative_l2_error(&rec, &truth, Region::All)?);
        table.errors[1].push(relative_l2_error(&rec, &truth, Region::Upper)?);
        table.labels.push(label);
    }
    let text = table.to_text();
    std::io::stdout()
        .write_all(text.as_bytes())
        .map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
    if let Some(path) = &a.csv {
        write_text(path, &table.to_csv())?;
    }
    Ok(())
}

pub fn cmd_render(a: &RenderArgs) -> Result<()> {
    let scale = match (a.min, a.max) {
        (Some(lo), Some(hi)) if hi > lo => Some(ColorScale { lo, hi }),
        (Some(_), Some(_)) => return Err(CliError::Usage("--max must exceed --min".into())),
        _ => None,
    };
    if a.pixel == 0 || a.size == 0 {
        return Err(CliError::Usage("--pixel and --size must be positive".into()));
    }
    let mut m = RunManifest::new("render");
    let img = if let Some(path) = &a.sinogram {
        require_input(path)?;
        let sin = io::load_sinogram(path)?;
        m.input(path)?;
        let values = match a.channel {
            Channel::I0 => sin.i0(),
            Channel::I1 => sin.i1(),
        };
        render::render_sinogram(&sin, values, scale, a.pixel)
    } else {
        let (field_path, mesh_path) = (a.field.as_ref().unwrap(), a.mesh.as_ref().unwrap());
        require_input(field_path)?;
        require_input(mesh_path)?;
        let field = io::load_field(field_path, Provenance::Reconstructed)?;
        let mesh = io::load_mesh(mesh_path)?;
        if field.len() != mesh.len() || field.centroids != mesh.centroids() {
            return Err(CliError::Core(momenta_vt::Error::GridMismatch(
                "field file does not match the mesh".into(),
            )));
        }
        m.input(field_path)?;
        m.input(mesh_path)?;
        let pick = |f: fn(&momenta_vt::geometry::Vec2) -> f64| field.values.iter().map(f).collect::<Vec<_>>();
        match a.component {
            Component::F1 => render::render_scalar(&mesh, &pick(|v| v.x), scale, a.size),
            Component::F2 => render::render_scalar(&mesh, &pick(|v| v.y), scale, a.size),
            Component::Magnitude => {
                let scale = scale.or_else(|| {
                    let hi = field.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
                    Some(ColorScale { lo: 0.0, hi: if hi > 0.0 { hi } else { 1.0 } })
                });
                render::render_scalar(&mesh, &pick(|v| v.norm()), scale, a.size)
            }
            Component::Arrows => render::render_arrows(&mesh, &field, a.size, 3),
        }
    };
    write_text(&a.out, &img.to_ppm())?;
    m.output(&a.out)?;
    m.write(&RunManifest::path_for(&a.out))
}

#[cfg(test)]
mod tests {
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        super::Cli::command().debug_assert();
    }
}
