use crate::args::{Command, Common, FitArgs, Format, ProfileArgs, VerifyArgs};
use crate::output::{emit, json_bytes, number, Cell, Table};
use crate::{fitconfig, setup, CliError};
use rayon::prelude::*;
use std::f64::consts::PI;
use torsion_lab::closed_form::{is_bounded, profile_solution};
use torsion_lab::fields::{field_state, Point, ProfileValues};
use torsion_lab::identify::fit;
use torsion_lab::oracle::oracle_stiffness;
use torsion_lab::{stiffness_at, Error, LengthScale, MaterialParameters, ModelKind, RadialProfile, StiffnessTriple};

const DEFAULT_GRID: &str = "1e-3:1e3:61:log";
const VERIFY_GRID: &str = "1e-2:1e2:5:log";

pub fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Curve(c) => curve(&c),
        Command::Profile(a) => profile(&a),
        Command::Compare(c) => compare(&c),
        Command::Verify(a) => verify(&a),
        Command::Fit(a) => fit_command(&a),
        Command::Limits(c) => limits(&c),
    }
}

struct Setup {
    models: Vec<ModelKind>,
    params: MaterialParameters,
    radius: f64,
}

fn prepare(c: &Common, default_models: &[ModelKind]) -> Result<Setup, CliError> {
    let params = setup::parameters(c)?;
    let models = setup::models(c, default_models)?;
    setup::check_radius(c.radius)?;
    setup::check_admissible(&models, &params, c.allow_indefinite)?;
    Ok(Setup { models, params, radius: c.radius })
}

fn finish(c: &Common, table: &Table) -> Result<(), CliError> {
    emit(c.out.as_deref(), &table.render(c.format)?)
}

/// Triples on the grid in grid order; the first failing point is reported.
fn sweep(model: ModelKind, p: &MaterialParameters, radius: f64, grid: &[f64]) -> Result<Vec<StiffnessTriple>, CliError> {
    let out: Result<Vec<_>, Error> = grid
        .par_iter()
        .enumerate()
        .map(|(index, &lc)| {
            stiffness_at(model, p, radius, LengthScale::from(lc)).map_err(|e| Error::GridPoint {
                index,
                source: Box::new(e),
            })
        })
        .collect();
    Ok(out?)
}

fn curve(c: &Common) -> Result<(), CliError> {
    let s = prepare(c, &[ModelKind::RelaxedMicromorphic])?;
    let grid = setup::grid(c, DEFAULT_GRID)?;
    let mut table = Table::new(&["model", "Lc", "T_c", "T_m", "T_w"]);
    for &m in &s.models {
        for (lc, t) in grid.iter().zip(sweep(m, &s.params, s.radius, &grid)?) {
            table.push(vec![m.name().into(), (*lc).into(), t.t_c.into(), t.t_m.into(), t.t_w.into()]);
        }
    }
    finish(c, &table)
}

fn compare(c: &Common) -> Result<(), CliError> {
    let s = prepare(c, &ModelKind::ALL)?;
    let grid = setup::grid(c, DEFAULT_GRID)?;
    let columns: Vec<Vec<StiffnessTriple>> = s
        .models
        .iter()
        .map(|&m| sweep(m, &s.params, s.radius, &grid))
        .collect::<Result<_, _>>()?;
    let mut header = vec!["Lc"];
    header.extend(s.models.iter().map(|m| m.name()));
    let mut table = Table::new(&header);
    for (i, lc) in grid.iter().enumerate() {
        let mut row: Vec<Cell> = vec![(*lc).into()];
        row.extend(columns.iter().map(|col| Cell::Num(col[i].t_w)));
        table.push(row);
    }
    finish(c, &table)
}

fn limits(c: &Common) -> Result<(), CliError> {
    let s = prepare(c, &ModelKind::ALL)?;
    let mut table = Table::new(&["model", "R", "T_w_macro", "T_w_infinite", "bounded"]);
    for &m in &s.models {
        let small = stiffness_at(m, &s.params, s.radius, LengthScale::Finite(0.0))?;
        let large = stiffness_at(m, &s.params, s.radius, LengthScale::Infinite)?;
        let bounded = is_bounded(m, &s.params)?;
        table.push(vec![m.name().into(), s.radius.into(), small.t_w.into(), large.t_w.into(), bounded.into()]);
    }
    finish(c, &table)
}

fn profile(a: &ProfileArgs) -> Result<(), CliError> {
    let c = &a.common;
    let s = prepare(c, &[ModelKind::RelaxedMicromorphic])?;
    if s.models.len() != 1 {
        return Err(CliError::Config("profile takes a single --model".into()));
    }
    if a.samples < 2 {
        return Err(CliError::Config("--samples must be at least 2".into()));
    }
    let model = s.models[0];
    let table = if a.fields {
        field_table(model, &s.params, s.radius, a)?
    } else {
        let sol = profile_solution(model, &s.params, s.radius, s.params.lc.into())?;
        let prof = RadialProfile::sample(model, &sol, s.radius, a.samples);
        let mut t = Table::new(&["r", "g1", "g2", "g_p", "g_m", "dg_p", "dg_m"]);
        for i in 0..prof.len() {
            t.push(
                [prof.radii[i], prof.g1[i], prof.g2[i], prof.g_p[i], prof.g_m[i], prof.dg_p[i], prof.dg_m[i]]
                    .into_iter()
                    .map(Cell::Num)
                    .collect(),
            );
        }
        t
    };
    finish(c, &table)
}

fn field_table(model: ModelKind, p: &MaterialParameters, radius: f64, a: &ProfileArgs) -> Result<Table, CliError> {
    let angles = a.angles.max(1);
    let points: Vec<(f64, f64)> = (0..a.samples)
        .flat_map(|i| {
            let r = radius * i as f64 / (a.samples - 1) as f64;
            (0..angles).map(move |k| (r, 2.0 * PI * k as f64 / angles as f64))
        })
        .collect();
    let states: Vec<Vec<(String, f64)>> = if model.has_profiles() {
        let sol = profile_solution(model, p, radius, p.lc.into())?;
        points
            .par_iter()
            .map(|&(r, phi)| field_state(model, p, &Point::Cylindrical { r, phi, z: a.z }, 1.0, &sol).map(|f| f.components()))
            .collect::<Result<_, _>>()?
    } else {
        let none = ProfileValues::constant(0.0, 0.0);
        points
            .par_iter()
            .map(|&(r, phi)| field_state(model, p, &Point::Cylindrical { r, phi, z: a.z }, 1.0, &none).map(|f| f.components()))
            .collect::<Result<_, _>>()?
    };
    let mut t = Table::new(&["r", "phi", "z", "component", "value"]);
    for ((r, phi), comps) in points.iter().zip(states) {
        for (name, v) in comps {
            t.push(vec![(*r).into(), (*phi).into(), a.z.into(), name.into(), v.into()]);
        }
    }
    Ok(t)
}

fn verify(a: &VerifyArgs) -> Result<(), CliError> {
    let c = &a.common;
    let s = prepare(c, &ModelKind::ALL)?;
    let grid = setup::grid(c, VERIFY_GRID)?;
    if grid.iter().any(|g| !g.is_finite()) {
        return Err(CliError::Config("verify needs a finite Lc grid".into()));
    }
    let cases: Vec<(ModelKind, f64)> = s.models.iter().flat_map(|&m| grid.iter().map(move |&lc| (m, lc))).collect();
    let rows: Vec<(f64, f64, f64)> = cases
        .par_iter()
        .map(|&(m, lc)| {
            let p = s.params.with_lc(lc);
            let closed = stiffness_at(m, &p, s.radius, LengthScale::Finite(lc))?.t_w;
            let (_, numeric) = oracle_stiffness(m, &p, s.radius, a.nodes)?;
            let dev = (numeric.t_w.value - closed).abs() / closed.abs().max(f64::MIN_POSITIVE);
            Ok::<_, Error>((closed, numeric.t_w.value, dev))
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(&["model", "Lc", "T_w_closed", "T_w_oracle", "relative_deviation"]);
    let mut worst = 0.0_f64;
    for (&(m, lc), &(closed, numeric, dev)) in cases.iter().zip(&rows) {
        worst = worst.max(dev);
        table.push(vec![m.name().into(), lc.into(), closed.into(), numeric.into(), dev.into()]);
    }
    finish(c, &table)?;
    eprintln!("max relative deviation {} over {} cases", number(worst), rows.len());
    if worst > a.tolerance {
        return Err(CliError::Verification(format!(
            "max relative deviation {} exceeds {}",
            number(worst),
            number(a.tolerance)
        )));
    }
    Ok(())
}

fn fit_command(a: &FitArgs) -> Result<(), CliError> {
    let c = &a.common;
    let base = setup::parameters(c)?;
    let problem = fitconfig::load(&a.config, base, c.seed)?;
    setup::check_admissible(&[problem.model], &problem.fixed, c.allow_indefinite)?;
    let result = fit(&problem)?;
    let bytes = match c.format {
        Format::Json => json_bytes(&result)?,
        Format::Csv => {
            let mut t = Table::new(&["name", "value"]);
            for (k, v) in &result.fitted_values {
                t.push(vec![k.as_str().into(), (*v).into()]);
            }
            t.push(vec!["residual_norm".into(), result.residual_norm.into()]);
            t.push(vec!["condition_number".into(), result.condition_number.into()]);
            t.push(vec!["iterations".into(), (result.convergence.iterations as f64).into()]);
            t.push(vec!["converged".into(), result.convergence.converged.into()]);
            t.render(Format::Csv)?
        }
    };
    emit(c.out.as_deref(), &bytes)
}
