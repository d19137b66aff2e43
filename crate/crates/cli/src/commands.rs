//! Command implementations. Each returns a [`Report`]; printing is left to
//! the caller.

use homfinsler_core::catalog::Fixture;
use homfinsler_core::curvature::{orthonormalize_flag, random_flags, sweep_checks, CurvatureError, NaturallyReductive};
use homfinsler_core::homogeneous::SpaceError;
use homfinsler_core::{lie_core, Check, DVector, HomogeneousSpace, MinkowskiNorm, NormFamily, Tolerances, Witness};
use serde_json::Value;
use thiserror::Error;

use crate::report::{Report, SpaceInfo};
use crate::spacefile::{LoadedSpace, SpaceFile, SpaceFileError};

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    File(#[from] SpaceFileError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error("{0}")]
    Usage(String),
}

/// Global options shared by the commands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub seed: u64,
    pub samples: usize,
    pub tolerances: Tolerances,
}

fn info(loaded: &LoadedSpace) -> SpaceInfo {
    let d = loaded.data.dims();
    SpaceInfo { name: loaded.name.clone(), dims: [d.h, d.m1, d.m2], family: loaded.family.fingerprint() }
}

fn vec_value(v: &DVector<f64>) -> Value {
    Value::from(v.iter().cloned().collect::<Vec<f64>>())
}

fn float(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

fn opt_float(x: Option<f64>) -> Value {
    x.map(float).unwrap_or(Value::Null)
}

fn build(loaded: &LoadedSpace) -> Result<HomogeneousSpace, CommandError> {
    Ok(HomogeneousSpace::new(loaded.data.clone(), loaded.family.clone())?)
}

/// Algebraic audit plus the norm admissibility audit. Never errors on bad
/// data: problems become failed checks.
pub fn validate(loaded: &LoadedSpace, opts: &Options) -> Report {
    let tol = opts.tolerances;
    let mut report = Report::new("validate", info(loaded), opts.seed, opts.samples);
    report.push_checks(&lie_core::audit(&loaded.data.lie, &loaded.data.ip, tol.structure));
    match MinkowskiNorm::new(loaded.family.clone(), loaded.data.ip.clone()) {
        Ok(norm) => report.push_checks(&norm.admissibility_audit(32, tol.convexity)),
        Err(e) => report.push_check(&Check::new(format!("norm construction: {e}"), f64::INFINITY, 0.0, 1)),
    }
    let passed = report.passed;
    report.verdict("valid", passed);
    report
}

fn require_valid(loaded: &LoadedSpace, opts: &Options) -> Result<(), CommandError> {
    let report = validate(loaded, opts);
    if report.passed {
        return Ok(());
    }
    let failed: Vec<String> = report.checks.iter().filter(|c| c.verdict == "fail").map(|c| c.name.clone()).collect();
    Err(CommandError::Usage(format!("input fails validation: {}", failed.join(", "))))
}

/// Structural, Killing-type and spray tests of natural reductiveness.
pub fn nr(loaded: &LoadedSpace, opts: &Options) -> Result<Report, CommandError> {
    require_valid(loaded, opts)?;
    let space = build(loaded)?;
    let tol = opts.tolerances;
    let mut report = Report::new("nr", info(loaded), opts.seed, opts.samples);
    let structural = space.nr_structural_check(tol.structure);
    let latifi = space.nr_latifi_check(opts.samples, opts.seed, tol.nr);
    let spray = space.nr_spray_check(opts.samples, opts.seed, tol.nr);
    report.push_checks(&structural.conditions);
    report.push_check(&latifi);
    report.push_check(&spray);
    report.verdict("nonlinear L", structural.nonlinear);
    report.verdict("structural", structural.naturally_reductive);
    report.verdict("latifi", latifi.passed);
    report.verdict("spray", spray.passed);
    report.verdict(
        "all three agree",
        structural.naturally_reductive == latifi.passed && latifi.passed == spray.passed,
    );
    // The report verdict is the structural one; individual checks may fail
    // on a negative space without the run being an error.
    report.passed = structural.naturally_reductive;
    Ok(report)
}

/// Sampled S-curvature, the algebraic certificate and the block spot check.
pub fn scurv(loaded: &LoadedSpace, opts: &Options) -> Result<Report, CommandError> {
    require_valid(loaded, opts)?;
    let space = build(loaded)?;
    let tol = opts.tolerances;
    let mut report = Report::new("scurv", info(loaded), opts.seed, opts.samples);
    let (structural, checks) = space.s_vanishing_structural(tol.structure);
    let mut worst = Check::new("sampled |S|", 0.0, tol.s_vanish, 0);
    for y in space.unit_directions(opts.samples, opts.seed) {
        let s = space.s_curvature(&y)?;
        report.row([("y", vec_value(&y)), ("S", float(s))]);
        worst.samples += 1;
        if s.abs() > worst.residual {
            worst.residual = s.abs();
            worst.witness = Some(Witness::Vector(y.iter().cloned().collect()));
        }
    }
    worst.passed = worst.residual <= worst.tolerance;
    let blocks = space.s_on_blocks(opts.samples.clamp(1, 50), opts.seed, tol.s_vanish);
    report.push_checks(&checks);
    report.push_check(&worst);
    report.push_check(&blocks);
    report.verdict("certificate", structural);
    report.verdict("vanishing S (sampled)", worst.passed);
    report.passed = structural == worst.passed && blocks.passed;
    Ok(report)
}

/// E-curvature at `y`, or its sampled maximum.
pub fn ecurv(loaded: &LoadedSpace, opts: &Options, y: Option<&[f64]>) -> Result<Report, CommandError> {
    require_valid(loaded, opts)?;
    let space = build(loaded)?;
    let tol = opts.tolerances;
    let mut report = Report::new("ecurv", info(loaded), opts.seed, opts.samples);
    let ys = match y {
        Some(v) => vec![vector(v, space.n(), "--y")?],
        None => space.unit_directions(opts.samples, opts.seed),
    };
    let mut worst = Check::new("sampled max |E_ij|", 0.0, tol.e_vanish, 0);
    for y in &ys {
        let e = space.e_curvature(y)?;
        let rows: Vec<Value> = (0..e.nrows()).map(|r| Value::from(e.row(r).iter().cloned().collect::<Vec<f64>>())).collect();
        report.row([("y", vec_value(y)), ("max |E|", float(e.amax())), ("E", Value::from(rows))]);
        worst.samples += 1;
        if e.amax() > worst.residual || e.amax().is_nan() {
            worst.residual = e.amax();
            worst.witness = Some(Witness::Vector(y.iter().cloned().collect()));
        }
    }
    worst.passed = worst.residual <= worst.tolerance;
    report.push_check(&worst);
    report.verdict("vanishing E (sampled)", worst.passed);
    Ok(report)
}

/// Flag curvature along both paths for an explicit flag or a sweep.
pub fn flag(
    loaded: &LoadedSpace,
    opts: &Options,
    y: Option<&[f64]>,
    v: Option<&[f64]>,
    sweep: Option<usize>,
) -> Result<Report, CommandError> {
    require_valid(loaded, opts)?;
    let space = build(loaded)?;
    let tol = opts.tolerances;
    let nr = NaturallyReductive::certify(&space, tol.structure)?;
    let flags = match (y, v, sweep) {
        (Some(y), Some(v), None) => {
            vec![orthonormalize_flag(space.ip(), &vector(y, space.n(), "--y")?, &vector(v, space.n(), "--v")?)?]
        }
        (None, None, Some(count)) => random_flags(&space, count, opts.seed, 0.0),
        _ => return Err(CommandError::Usage("give either --y and --v, or --sweep N".into())),
    };
    let samples = flags.len();
    let mut report = Report::new("flag", info(loaded), opts.seed, samples);
    let mut results = Vec::with_capacity(samples);
    for f in &flags {
        let r = nr.flag_curvature_nr(f, tol.eps_sing)?;
        report.row([
            ("y", vec_value(&r.flag.y)),
            ("x", vec_value(&r.flag.x)),
            ("|y2|", float(r.y2_norm)),
            ("k_closed", opt_float(r.k_closed)),
            ("k_generic", float(r.k_generic)),
            ("discrepancy", opt_float(r.discrepancy)),
            ("stratum", Value::from(if r.near_singular { "near-singular" } else { "regular" })),
        ]);
        results.push(r);
    }
    report.push_checks(&sweep_checks(&results, tol.xcheck));
    Ok(report)
}

/// The four S/E verdicts next to the algebraic certificate.
pub fn audit_equiv(loaded: &LoadedSpace, opts: &Options) -> Result<Report, CommandError> {
    require_valid(loaded, opts)?;
    let space = build(loaded)?;
    let mut report = Report::new("audit-equiv", info(loaded), opts.seed, opts.samples);
    let audit = space.equivalence_audit(opts.samples, opts.seed, &opts.tolerances);
    report.push_checks(&audit.checks);
    report.verdict("weakly isotropic S", audit.weakly_isotropic_s);
    report.verdict("vanishing S", audit.vanishing_s);
    report.verdict("isotropic E", audit.isotropic_e);
    report.verdict("vanishing E", audit.vanishing_e);
    report.verdict("certificate", audit.structural);
    report.verdict("consistent", audit.consistent());
    report.passed = audit.consistent();
    Ok(report)
}

/// TOML text of a catalog fixture.
pub fn export(name: &str, family: Option<NormFamily>) -> Result<String, CommandError> {
    let fixture = Fixture::from_name(name).ok_or_else(|| {
        let known: Vec<&str> = Fixture::ALL.iter().map(|f| f.name()).collect();
        CommandError::Usage(format!("unknown fixture {name:?}; known: {}", known.join(", ")))
    })?;
    let family = family.unwrap_or(NormFamily::QuarticMean { c: 1.0 });
    Ok(SpaceFile::from_fixture(fixture, &family).to_toml())
}

fn vector(v: &[f64], n: usize, flag: &str) -> Result<DVector<f64>, CommandError> {
    if v.len() != n {
        return Err(CommandError::Usage(format!("{flag} needs {n} components, got {}", v.len())));
    }
    Ok(DVector::from_row_slice(v))
}
