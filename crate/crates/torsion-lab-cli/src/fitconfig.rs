use crate::CliError;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use torsion_lab::identify::{synthetic_dataset, FitProblem, FreeParameter, Observation};
use torsion_lab::{MaterialParameters, ModelKind};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub model: String,
    /// CSV with columns `R,T_w[,weight]`, relative to the config file.
    pub data: Option<PathBuf>,
    pub synthetic: Option<Synthetic>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
    pub free: Vec<FreeParameter>,
    pub max_iterations: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Synthetic {
    pub radii: Vec<f64>,
    #[serde(default)]
    pub noise: f64,
}

pub fn read_observations(path: &Path) -> Result<Vec<Observation>, CliError> {
    let mut rd = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for row in rd.deserialize() {
        let obs: Observation = row.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        out.push(obs);
    }
    Ok(out)
}

fn overlay(mut p: MaterialParameters, values: &BTreeMap<String, f64>) -> Result<MaterialParameters, CliError> {
    for (k, v) in values {
        p.set(k, *v)?;
    }
    Ok(p)
}

/// Builds the fit problem; synthetic data uses `base` overlaid with `params`.
pub fn load(path: &Path, base: MaterialParameters, seed: u64) -> Result<FitProblem, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let cfg: FitConfig = toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let model: ModelKind = cfg.model.parse()?;
    let truth = overlay(base, &cfg.params)?;
    let observations = match (&cfg.data, &cfg.synthetic) {
        (Some(data), None) => {
            let full = path.parent().map(|d| d.join(data)).unwrap_or_else(|| data.clone());
            read_observations(&full)?
        }
        (None, Some(s)) => synthetic_dataset(model, &truth, &s.radii, s.noise, cfg.seed.unwrap_or(seed))?,
        _ => return Err(CliError::Config("fit config needs exactly one of `data` or `[synthetic]`".into())),
    };
    let problem = FitProblem {
        model,
        observations,
        free: cfg.free,
        fixed: overlay(truth, &cfg.fixed)?,
        max_iterations: cfg.max_iterations.unwrap_or(200),
    };
    problem.validate()?;
    Ok(problem)
}
