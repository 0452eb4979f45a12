use crate::args::Common;
use crate::CliError;
use std::fs;
use std::path::Path;
use torsion_lab::materials::positive_definiteness_check;
use torsion_lab::{MaterialParameters, ModelKind};

pub fn thread_pool() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("TORSION_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("TORSION_LAB_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

pub fn default_parameters() -> MaterialParameters {
    MaterialParameters {
        mu_macro: 1.0,
        lambda_macro: 1.0,
        mu_e: 2.0,
        lambda_e: 1.0,
        mu_micro: 2.0,
        lambda_micro: 1.0,
        mu_c: 0.5,
        mu: 1.0,
        a1: 0.2,
        a2: 0.3,
        a3: 1.0 / 7.0,
        a4: 0.4,
        lc: 1.0,
    }
}

pub fn read_parameters(path: &Path) -> Result<MaterialParameters, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e == "toml") {
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    } else {
        Ok(MaterialParameters::from_json(&text)?)
    }
}

pub fn apply_sets(params: &mut MaterialParameters, sets: &[String]) -> Result<(), CliError> {
    for s in sets {
        let (key, value) = s
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--set expects key=value, got '{s}'")))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("--set {key}: '{value}' is not a number")))?;
        params.set(key.trim(), v)?;
    }
    Ok(())
}

pub fn parameters(c: &Common) -> Result<MaterialParameters, CliError> {
    let mut p = match &c.params {
        Some(path) => read_parameters(path)?,
        None => default_parameters(),
    };
    apply_sets(&mut p, &c.sets)?;
    Ok(p)
}

pub fn models(c: &Common, default: &[ModelKind]) -> Result<Vec<ModelKind>, CliError> {
    if c.models.is_empty() {
        return Ok(default.to_vec());
    }
    let mut out = Vec::new();
    for name in &c.models {
        let m: ModelKind = name.parse()?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    Ok(out)
}

pub fn check_admissible(models: &[ModelKind], p: &MaterialParameters, allow: bool) -> Result<(), CliError> {
    if allow {
        return Ok(());
    }
    for &m in models {
        let report = positive_definiteness_check(p, m);
        if !report.admissible {
            return Err(torsion_lab::Error::ParameterDomain(format!(
                "{m}: {} (pass --allow-indefinite to override)",
                report.violations.join(", ")
            ))
            .into());
        }
    }
    Ok(())
}

pub fn check_radius(r: f64) -> Result<(), CliError> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(torsion_lab::Error::Domain(format!("R must be positive and finite, got {r}")).into())
    }
}

/// `min:max:count[:log]`; linear unless `log` is given.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Config(format!("--Lc-grid expects min:max:count[:log], got '{spec}'"));
    let parts: Vec<&str> = spec.split(':').collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    let log = match parts.get(3).map(|s| s.trim()) {
        None | Some("lin") | Some("linear") => false,
        Some("log") => true,
        Some(_) => return Err(bad()),
    };
    if n == 0 || !lo.is_finite() || !hi.is_finite() || hi < lo || lo < 0.0 {
        return Err(bad());
    }
    if log && lo <= 0.0 {
        return Err(CliError::Config("log-spaced Lc grid needs min > 0".into()));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let step = |i: usize| i as f64 / (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else if log {
                10f64.powf(lo.log10() + (hi.log10() - lo.log10()) * step(i))
            } else {
                lo + (hi - lo) * step(i)
            }
        })
        .collect())
}

pub fn grid(c: &Common, default: &str) -> Result<Vec<f64>, CliError> {
    parse_grid(c.lc_grid.as_deref().unwrap_or(default))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        let g = parse_grid("0.01:100:5:log").unwrap();
        assert!((g[2] - 1.0).abs() < 1e-14);
        assert_eq!(g[4], 100.0);
        assert_eq!(parse_grid("2:3:1").unwrap(), vec![2.0]);
        assert!(parse_grid("0:1:5:log").is_err());
        assert!(parse_grid("1:0:5").is_err());
        assert!(parse_grid("a:b").is_err());
    }

    #[test]
    fn sets() {
        let mut p = default_parameters();
        apply_sets(&mut p, &["mu_c=0.25".into(), "Lc = 3".into()]).unwrap();
        assert_eq!((p.mu_c, p.lc), (0.25, 3.0));
        assert!(apply_sets(&mut p, &["nope=1".into()]).is_err());
        assert!(apply_sets(&mut p, &["mu_c".into()]).is_err());
    }
}
