//! Configuration resolution: preset, then a flat `key=value` file, then
//! command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use momenta_vt::calculus::Weighting;
use momenta_vt::{Phantom, ReconConfig, ReconMode};

use crate::CliError;

#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// Base parameter set: `paper` or `coarse`.
    #[arg(long)]
    pub preset: Option<String>,
    /// Flat `key=value` file applied on top of the preset.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "K")]
    pub k: Option<usize>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long = "J")]
    pub j: Option<usize>,
    #[arg(long = "M")]
    pub m: Option<usize>,
    /// Target mean triangle diameter.
    #[arg(long)]
    pub diameter: Option<f64>,
    /// Differentiation neighborhood radius.
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long = "q-psi")]
    pub q_psi: Option<usize>,
    /// Gauss-Legendre order of the forward simulation.
    #[arg(long)]
    pub quad: Option<usize>,
    /// `partial` or `full`.
    #[arg(long)]
    pub mode: Option<ReconMode>,
    #[arg(long)]
    pub phantom: Option<Phantom>,
    #[arg(long)]
    pub tikhonov: Option<f64>,
    /// `uniform` or `inverse-distance`.
    #[arg(long)]
    pub weighting: Option<Weighting>,
}

/// A resolved configuration plus which grid and data fields were set
/// explicitly (by file or flag) rather than inherited from the preset.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: ReconConfig,
    pub explicit_k: bool,
    pub explicit_n: bool,
    pub explicit_mode: bool,
    pub explicit_phantom: bool,
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("config key `{key}`: cannot parse `{value}`")))
}

/// Reads `key=value` lines; `#` starts a comment.
pub fn read_pairs(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("{}:{}: expected key=value", path.display(), i + 1))
        })?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

impl Resolved {
    fn new(config: ReconConfig) -> Self {
        Resolved {
            config,
            explicit_k: false,
            explicit_n: false,
            explicit_mode: false,
            explicit_phantom: false,
        }
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let c = &mut self.config;
        match key {
            "K" | "k" => {
                c.k = parse(key, value)?;
                self.explicit_k = true;
            }
            "N" | "n" => {
                c.n = parse(key, value)?;
                self.explicit_n = true;
            }
            "J" | "j" => c.j = parse(key, value)?,
            "M" | "m" => c.m = parse(key, value)?,
            "diameter" | "mesh_diameter" => c.mesh_diameter = parse(key, value)?,
            "radius" | "R" => c.radius = parse(key, value)?,
            "q_psi" | "q-psi" => c.q_psi = parse(key, value)?,
            "quad" => c.quad = parse(key, value)?,
            "mode" => {
                c.mode = parse(key, value)?;
                self.explicit_mode = true;
            }
            "phantom" => {
                c.phantom = parse(key, value)?;
                self.explicit_phantom = true;
            }
            "noise_level" => c.noise_level = parse(key, value)?,
            "noise_seed" => c.noise_seed = parse(key, value)?,
            "tikhonov" => c.tikhonov = parse(key, value)?,
            "weighting" => c.weighting = parse(key, value)?,
            "preset" => {}
            other => return Err(CliError::Usage(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let pairs = match &self.config {
            Some(path) => read_pairs(path)?,
            None => Vec::new(),
        };
        let preset = self
            .preset
            .clone()
            .or_else(|| pairs.iter().find(|(k, _)| k == "preset").map(|(_, v)| v.clone()))
            .unwrap_or_else(|| "paper".into());
        let base = ReconConfig::preset(&preset).map_err(|e| CliError::Usage(e.to_string()))?;
        let mut r = Resolved::new(base);
        for (key, value) in &pairs {
            r.set(key, value)?;
        }
        let c = &mut r.config;
        if let Some(v) = self.k {
            c.k = v;
            r.explicit_k = true;
        }
        if let Some(v) = self.n {
            c.n = v;
            r.explicit_n = true;
        }
        if let Some(v) = self.j {
            c.j = v;
        }
        if let Some(v) = self.m {
            c.m = v;
        }
        if let Some(v) = self.diameter {
            c.mesh_diameter = v;
        }
        if let Some(v) = self.radius {
            c.radius = v;
        }
        if let Some(v) = self.q_psi {
            c.q_psi = v;
        }
        if let Some(v) = self.quad {
            c.quad = v;
        }
        if let Some(v) = self.mode {
            c.mode = v;
            r.explicit_mode = true;
        }
        if let Some(v) = self.phantom {
            c.phantom = v;
            r.explicit_phantom = true;
        }
        if let Some(v) = self.tikhonov {
            c.tikhonov = v;
        }
        if let Some(v) = self.weighting {
            c.weighting = v;
        }
        r.config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(r)
    }
}
