//! Task runners behind `run <config>`: each produces result records with
//! provenance (config hash, grids, residuals) and the serialized output.

use std::fs;


use crate::asymptotics::{
    fit_short_time_slope, genus_bound_check, karp_pinsky_fit, karp_pinsky_radii, rigidity_defect,
    short_time_grid,
};
use crate::cli::config::{ExperimentConfig, OutputFormat, TaskKind};
use crate::cli::report::{config_hash, to_csv, to_json, Field, Record};
use crate::error::{Error, Result};
use crate::functional::{density_time_profile, entropy, SearchConfig, SearchStatus};
use crate::kernels::{kernel, KernelSpec};
use crate::submanifold::catalog::shape_catalog;
use crate::submanifold::ImmersedSubmanifold;

fn config_err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

fn base_record(cfg: &ExperimentConfig) -> Record {
    let mut rec = Record::default();
    rec.push("task", Field::Str(cfg.task.name().to_string()));
    rec.push("config_sha256", Field::Str(config_hash(&cfg.text)));
    rec
}

fn build_shape(cfg: &ExperimentConfig) -> Result<ImmersedSubmanifold> {
    let (name, _) = cfg.require("shape", "name")?;
    let params = match cfg.get("shape", "params") {
        Some(_) => cfg.require_f64_list("shape", "params")?,
        None => Vec::new(),
    };
    let sigma = shape_catalog(&name, &params)?;
    // an [ambient] section is optional for shape tasks but must agree with
    // the ambient the catalog assigns
    if cfg.has_section("ambient") {
        let (kind, line) = cfg.require("ambient", "kind")?;
        let hyperbolic = match kind.as_str() {
            "euclidean" => false,
            "hyperbolic" => true,
            other => return Err(config_err(line, format!("unknown ambient kind `{other}`"))),
        };
        if hyperbolic != (sigma.ambient.kappa() > 0.0) {
            return Err(config_err(line, "ambient kind does not match the shape"));
        }
        let dim = cfg.require_f64("ambient", "dim")? as usize;
        if dim != sigma.ambient.dim() {
            return Err(config_err(line, "ambient dim does not match the shape"));
        }
        let kappa = cfg.require_f64("ambient", "kappa")?;
        if (kappa - sigma.ambient.kappa()).abs() > 1e-12 {
            return Err(config_err(line, "ambient kappa does not match the shape"));
        }
    }
    Ok(sigma)
}

fn search_config(cfg: &ExperimentConfig) -> Result<SearchConfig> {
    let mut sc = SearchConfig::default();
    if let Some(v) = cfg.get_usize("search", "surface_seeds")? {
        sc.surface_seeds = v;
    }
    if let Some(v) = cfg.get_usize("search", "offset_seeds")? {
        sc.offset_seeds = v;
    }
    if let Some(v) = cfg.get_usize("search", "tau_grid")? {
        sc.tau_grid = v;
    }
    if let Some(v) = cfg.get_usize("search", "refine_top")? {
        sc.refine_top = v;
    }
    if let Some(v) = cfg.get_usize("search", "budget")? {
        sc.budget = v as u64;
    }
    if let Some(v) = cfg.get_f64("search", "step_tol")? {
        sc.step_tol = v;
    }
    if let Some(v) = cfg.get_f64("search", "quad_tol")? {
        sc.quad_tol = v;
    }
    sc.seed_rotation = cfg.seed_order as usize;
    if !(sc.step_tol > 0.0) || !(sc.quad_tol > 0.0) {
        return Err(config_err(0, "search tolerances must be positive"));
    }
    Ok(sc)
}

fn basepoint(cfg: &ExperimentConfig, sigma: &ImmersedSubmanifold) -> Result<Vec<f64>> {
    let u = cfg.require_f64_list("task", "basepoint")?;
    if u.len() != sigma.dim() {
        let line = cfg.require("task", "basepoint")?.1;
        return Err(config_err(
            line,
            format!("basepoint must have {} coordinates", sigma.dim()),
        ));
    }
    Ok(u)
}

fn push_fit(rec: &mut Record, fit: &crate::asymptotics::ExpansionFit) {
    let (exps, coefs): (Vec<f64>, Vec<f64>) = fit.coefficients.iter().copied().unzip();
    rec.push("fit_exponents", Field::List(exps));
    rec.push("fit_coefficients", Field::List(coefs));
    rec.num("fit_residual", fit.residual);
    rec.push("grid", Field::List(fit.grid.clone()));
}

fn kernel_table(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    let (kind, line) = cfg.require("ambient", "kind")?;
    let dim = cfg.require_f64("ambient", "dim")?;
    if dim < 1.0 || dim.fract() != 0.0 {
        return Err(config_err(line, "ambient dim must be a positive integer"));
    }
    let kappa = cfg.require_f64("ambient", "kappa")?;
    match kind.as_str() {
        "euclidean" if kappa == 0.0 => {}
        "hyperbolic" if kappa > 0.0 => {}
        _ => return Err(config_err(line, "ambient kind and kappa disagree")),
    }
    let spec = KernelSpec::new(dim as u32, kappa)?;
    let times = cfg.require_f64_list("task", "times")?;
    let radii = cfg.require_f64_list("task", "radii")?;
    let mut records = Vec::new();
    for &t in &times {
        for &r in &radii {
            let mut rec = base_record(cfg);
            rec.push("n", Field::Int(dim as i64));
            rec.num("kappa", kappa);
            rec.num("t", t);
            rec.num("r", r);
            rec.num("value", kernel(spec, t, r)?);
            records.push(rec);
        }
    }
    Ok(records)
}

fn entropy_record(cfg: &ExperimentConfig, sigma: &ImmersedSubmanifold) -> Result<Record> {
    let sc = search_config(cfg)?;
    let result = entropy(sigma, sigma.ambient.kappa(), &sc)?;
    let mut rec = base_record(cfg);
    rec.push("shape", Field::Str(sigma.name.clone()));
    rec.num("lambda", result.lambda);
    rec.push(
        "argmax_x0",
        Field::List(result.argmax_x0.iter().copied().collect()),
    );
    rec.num("argmax_tau", result.argmax_tau);
    rec.push("probes", Field::Int(result.probes as i64));
    rec.push(
        "status",
        Field::Str(
            match result.status {
                SearchStatus::Converged => "converged",
                SearchStatus::BudgetExhausted => "budget-exhausted",
            }
            .to_string(),
        ),
    );
    rec.push("seed_order", Field::Int(cfg.seed_order as i64));
    Ok(rec)
}

fn short_time(cfg: &ExperimentConfig, sigma: &ImmersedSubmanifold) -> Result<Vec<Record>> {
    let u = basepoint(cfg, sigma)?;
    let tol = cfg.get_f64("task", "tolerance")?.unwrap_or(1e-9);
    if !(tol > 0.0) {
        return Err(config_err(0, "tolerance must be positive"));
    }
    let kappa = sigma.ambient.kappa();
    let defect = rigidity_defect(sigma, &u, kappa)?;
    let grid = short_time_grid(defect);
    let x0 = sigma.position(&u);
    let profile = density_time_profile(sigma, kappa, &x0, &grid, tol)?;
    let fit = fit_short_time_slope(&profile)?;
    let mut rec = base_record(cfg);
    rec.push("shape", Field::Str(sigma.name.clone()));
    rec.push("basepoint", Field::List(u));
    rec.num("defect", defect);
    rec.num("slope", fit.coefficients[0].1);
    rec.num("predicted_slope", defect / 3.0);
    push_fit(&mut rec, &fit);
    rec.push(
        "densities",
        Field::List(profile.iter().map(|&(_, v)| v).collect()),
    );
    Ok(vec![rec])
}

fn ball_volume(cfg: &ExperimentConfig, sigma: &ImmersedSubmanifold) -> Result<Vec<Record>> {
    let u = basepoint(cfg, sigma)?;
    let resolution = cfg.get_f64("task", "resolution")?.unwrap_or(0.05);
    if !(resolution > 0.0) {
        return Err(config_err(0, "resolution must be positive"));
    }
    let x0 = sigma.position(&u);
    let radii = karp_pinsky_radii(sigma, &x0)?;
    let fit = karp_pinsky_fit(sigma, &x0, &radii, resolution)?;
    let mut rec = base_record(cfg);
    rec.push("shape", Field::Str(sigma.name.clone()));
    rec.push("basepoint", Field::List(u));
    rec.num("resolution", resolution);
    rec.num("quadratic_coefficient", fit.coefficients[0].1);
    push_fit(&mut rec, &fit);
    Ok(vec![rec])
}

fn rigidity(cfg: &ExperimentConfig, sigma: &ImmersedSubmanifold) -> Result<Vec<Record>> {
    let per_axis = cfg.get_usize("task", "grid")?.unwrap_or(3);
    if per_axis == 0 {
        return Err(config_err(0, "grid must be positive"));
    }
    let kappa = sigma.ambient.kappa();
    let mut records = Vec::new();
    for u in sigma.grid(per_axis) {
        let defect = rigidity_defect(sigma, &u, kappa)?;
        let c = sigma.curvature_at(&u)?;
        let mut rec = base_record(cfg);
        rec.push("shape", Field::Str(sigma.name.clone()));
        rec.push("point", Field::List(u));
        rec.num("defect", defect);
        rec.num("traceless_second_form_sq", c.traceless2);
        rec.num("identity_residual", defect - 1.5 * c.traceless2);
        records.push(rec);
    }
    Ok(records)
}

fn genus(cfg: &ExperimentConfig, sigma: &ImmersedSubmanifold) -> Result<Vec<Record>> {
    let sc = search_config(cfg)?;
    let lambda = entropy(sigma, sigma.ambient.kappa(), &sc)?.lambda;
    let report = genus_bound_check(sigma, lambda)?;
    let mut rec = base_record(cfg);
    rec.push("shape", Field::Str(sigma.name.clone()));
    rec.num("euler_characteristic", report.chi);
    rec.push("genus", Field::Int(report.genus));
    rec.num("lhs", report.lhs);
    rec.num("rhs", report.rhs);
    rec.num("lambda", report.lambda);
    rec.push("bound_holds", Field::Bool(report.bound_holds));
    rec.push("consistent", Field::Bool(report.consistent));
    Ok(vec![rec])
}

/// Executes the configured task and returns its records.
pub fn run_records(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    match cfg.task {
        TaskKind::KernelTable => kernel_table(cfg),
        TaskKind::Entropy => Ok(vec![entropy_record(cfg, &build_shape(cfg)?)?]),
        TaskKind::ShortTime => short_time(cfg, &build_shape(cfg)?),
        TaskKind::BallVolume => ball_volume(cfg, &build_shape(cfg)?),
        TaskKind::Rigidity => rigidity(cfg, &build_shape(cfg)?),
        TaskKind::Genus => genus(cfg, &build_shape(cfg)?),
    }
}

/// Serializes records in the configured format.
pub fn serialize(cfg: &ExperimentConfig, records: &[Record]) -> Result<String> {
    match cfg.output_format {
        OutputFormat::Json => Ok(to_json(records)),
        OutputFormat::Csv => to_csv(records),
    }
}

/// Runs the task and writes the output file. Nothing is written unless the
/// whole task succeeds.
pub fn run(cfg: &ExperimentConfig) -> Result<()> {
    let records = run_records(cfg)?;
    let text = serialize(cfg, &records)?;
    fs::write(&cfg.output_path, text)?;
    Ok(())
}
