use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use log::{debug, info};
use lueq_core::equivalence::{
    decide_equivalence, orbit_dimension, verify_certificate, DecisionConfig, OptimizerConfig, Verdict,
    DEFAULT_ORBIT_TOL,
};
use lueq_core::linalg::{eigh, frobenius_distance, ComplexMatrix};
use lueq_core::representation::{build_representation, gauge_descriptor};
use lueq_core::states::{
    apply_local_unitary, random_density, random_local_unitary, validate as validate_state, werner, BipartiteDims,
    DensityMatrix, WernerParams,
};
use lueq_core::Error;
use serde::Serialize;

use crate::exit;
use crate::format::{read_json, to_json, write_json, CertificateFile, MatrixFile};
use crate::report::RepresentationReport;
use crate::{Cli, Failure};

/// Variant name of a library error, e.g. `TraceNotOne`.
fn error_name(e: &Error) -> String {
    format!("{e:?}").chars().take_while(|c| c.is_alphanumeric()).collect()
}

fn invalid(e: Error) -> Failure {
    Failure::Invalid(format!("{}: {e}", error_name(&e)))
}

fn read_matrix(path: &Path) -> Result<(BipartiteDims, ComplexMatrix), Failure> {
    let file: MatrixFile = read_json(path)?;
    let mat = file.matrix().map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let dims = BipartiteDims::new(file.m, file.n).map_err(invalid)?;
    Ok((dims, mat))
}

fn load_state(cli: &Cli, path: &Path) -> Result<DensityMatrix, Failure> {
    let (dims, mat) = read_matrix(path)?;
    validate_state(&mat, dims, cli.tolerances().tol_state).map_err(invalid)
}

fn emit<T: Serialize>(cli: &Cli, value: &T, human: impl FnOnce()) {
    if cli.json {
        print!("{}", to_json(value));
    } else {
        human();
    }
}

fn fmt_row(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:>10.6}")).collect::<Vec<_>>().join(" ")
}

fn print_matrix(label: &str, a: &ComplexMatrix) {
    println!("  {label}:");
    for r in 0..a.rows() {
        let cells: Vec<String> = (0..a.cols())
            .map(|c| {
                let z = a[(r, c)];
                format!("{:>9.6}{:+.6}i", z.re, z.im)
            })
            .collect();
        println!("    {}", cells.join("  "));
    }
}

#[derive(Serialize)]
struct ValidateReport {
    m: usize,
    n: usize,
    hermitian_defect: f64,
    trace_re: f64,
    trace_im: f64,
    min_eigenvalue: f64,
    valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

pub fn validate(cli: &Cli, path: &Path) -> Result<u8, Failure> {
    let (dims, mat) = read_matrix(path)?;
    let tr = mat.trace();
    let min_eigenvalue = eigh(&mat.hermitian_part(), 1e-12)
        .map(|e| e.eigenvalues.last().copied().unwrap_or(0.0))
        .unwrap_or(f64::NAN);
    let outcome = validate_state(&mat, dims, cli.tolerances().tol_state);
    let report = ValidateReport {
        m: dims.m(),
        n: dims.n(),
        hermitian_defect: mat.hermitian_defect(),
        trace_re: tr.re,
        trace_im: tr.im,
        min_eigenvalue,
        valid: outcome.is_ok(),
        error: outcome.as_ref().err().map(|e| format!("{}: {e}", error_name(e))),
    };
    emit(cli, &report, || {
        println!("dims              {}x{}", report.m, report.n);
        println!("hermitian defect  {:.3e}", report.hermitian_defect);
        println!("trace             {:.17}{:+.3e}i", report.trace_re, report.trace_im);
        println!("min eigenvalue    {:.6e}", report.min_eigenvalue);
        println!("valid             {}", report.valid);
    });
    match outcome {
        Ok(_) => Ok(exit::OK),
        Err(e) => {
            eprintln!("invalid state: {}: {e}", error_name(&e));
            Ok(exit::INVALID_STATE)
        }
    }
}

pub fn represent(cli: &Cli, path: &Path, check: bool) -> Result<u8, Failure> {
    let rho = load_state(cli, path)?;
    let tol = cli.tolerances();
    let rep = build_representation(&rho, &tol).map_err(invalid)?;
    let gauge = gauge_descriptor(&rep, &tol);
    let report = RepresentationReport::new(&rep, &gauge);

    let check_error = if check {
        let text = to_json(&report);
        let parsed: RepresentationReport = serde_json::from_str(&text).map_err(|e| Failure::SelfCheck(e.to_string()))?;
        let rebuilt = parsed.rebuild().map_err(Failure::SelfCheck)?;
        Some(frobenius_distance(&rebuilt, rho.matrix()).map_err(invalid)?)
    } else {
        None
    };

    if cli.json {
        #[derive(Serialize)]
        struct Out<'a> {
            representation: &'a RepresentationReport,
            #[serde(skip_serializing_if = "Option::is_none")]
            reconstruction_error: Option<f64>,
        }
        print!("{}", to_json(&Out { representation: &report, reconstruction_error: check_error }));
    } else {
        println!("dims {}x{}, rank {}", report.m, report.n, report.rank);
        println!("eigenvalues {}", fmt_row(&report.eigenvalues));
        println!("eigenvalue blocks {:?}", report.eigenvalue_blocks);
        for (i, (item, raw)) in report.items.iter().zip(&rep.items).enumerate() {
            println!(
                "item {}: lambda = {:.10}, Schmidt rank {}, coefficients [{}], blocks {:?}",
                i + 1,
                item.eigenvalue,
                item.schmidt_rank,
                fmt_row(&item.coefficients).trim(),
                item.schmidt_blocks
            );
            print_matrix("X", &raw.x);
            print_matrix("Y", &raw.y);
        }
        println!("degenerate anchor {}", report.degenerate_anchor);
        println!("gauge torus {}", report.gauge.is_torus);
        println!("free parameters {}", report.free_parameter_count);
        if let Some(err) = check_error {
            println!("reconstruction error {err:.3e}");
        }
    }
    match check_error {
        Some(err) if err > 1e-9 => Err(Failure::SelfCheck(format!("report rebuilds the state only to {err:.3e}"))),
        _ => Ok(exit::OK),
    }
}

pub fn check(cli: &Cli, a: &Path, b: &Path, restarts: usize) -> Result<u8, Failure> {
    let rho = load_state(cli, a)?;
    let rho2 = load_state(cli, b)?;
    if rho.dims() != rho2.dims() {
        let (d, d2) = (rho.dims(), rho2.dims());
        return Err(Failure::DimsMismatch(format!(
            "states live on different bipartitions: {}x{} vs {}x{}",
            d.m(),
            d.n(),
            d2.m(),
            d2.n()
        )));
    }
    let config = DecisionConfig {
        tol: cli.tolerances(),
        optimizer: OptimizerConfig { restarts, seed: cli.seed, ..OptimizerConfig::default() },
    };
    let verdict = decide_equivalence(&rho, &rho2, &config).map_err(|e| match e {
        Error::DimsMismatch { .. } => Failure::DimsMismatch(e.to_string()),
        e => invalid(e),
    })?;
    info!("verdict {verdict:?}");

    let mut out = BTreeMap::new();
    let code = match &verdict {
        Verdict::Equivalent { certificate, .. } => {
            let residual = verify_certificate(&rho, &rho2, certificate).map_err(invalid)?;
            let path = cli.out.clone().unwrap_or_else(|| PathBuf::from("certificate.json"));
            write_json(&CertificateFile::new(certificate, Some(residual)), Some(&path))?;
            out.insert("verdict", serde_json::json!("Equivalent"));
            out.insert("residual", serde_json::json!(residual));
            out.insert("certificate", serde_json::json!(path.display().to_string()));
            exit::OK
        }
        Verdict::Inequivalent { witness, detail } => {
            out.insert("verdict", serde_json::json!("Inequivalent"));
            out.insert("witness", serde_json::json!(format!("{witness:?}")));
            out.insert("detail", serde_json::json!(detail));
            exit::INEQUIVALENT
        }
        Verdict::Undecided { reason, best_residual } => {
            out.insert("verdict", serde_json::json!("Undecided"));
            out.insert("reason", serde_json::json!(reason));
            out.insert("best_residual", serde_json::json!(best_residual));
            exit::UNDECIDED
        }
    };
    emit(cli, &out, || {
        for (k, v) in &out {
            match v {
                serde_json::Value::String(s) => println!("{k:<14}{s}"),
                v => println!("{k:<14}{v}"),
            }
        }
    });
    Ok(code)
}

fn write_state(rho: &DensityMatrix, path: Option<&Path>) -> Result<(), Failure> {
    let d = rho.dims();
    write_json(&MatrixFile::new(d.m(), d.n(), rho.matrix()), path)
}

pub fn gen_werner(cli: &Cli, e: f64, f: f64) -> Result<u8, Failure> {
    let rho = WernerParams::new(e, f).and_then(werner).map_err(invalid)?;
    write_state(&rho, cli.out.as_deref())?;
    Ok(exit::OK)
}

pub fn gen_random(cli: &Cli, m: usize, n: usize, rank: Option<usize>) -> Result<u8, Failure> {
    let dims = BipartiteDims::new(m, n).map_err(invalid)?;
    let rho = random_density(dims, rank.unwrap_or(m * n), cli.seed).map_err(invalid)?;
    write_state(&rho, cli.out.as_deref())?;
    Ok(exit::OK)
}

pub fn gen_orbit_pair(cli: &Cli, m: usize, n: usize, rank: Option<usize>) -> Result<u8, Failure> {
    let dims = BipartiteDims::new(m, n).map_err(invalid)?;
    let rho = random_density(dims, rank.unwrap_or(m * n), cli.seed).map_err(invalid)?;
    let lu = random_local_unitary(dims, cli.seed.wrapping_add(1));
    let rho2 = apply_local_unitary(&rho, &lu).map_err(invalid)?;
    let prefix = cli.out.clone().unwrap_or_else(|| PathBuf::from("orbit-pair"));
    let with = |suffix: &str| {
        let mut p = prefix.clone().into_os_string();
        p.push(suffix);
        PathBuf::from(p)
    };
    write_state(&rho, Some(&with(".a.json")))?;
    write_state(&rho2, Some(&with(".b.json")))?;
    write_json(&CertificateFile::new(&lu, None), Some(&with(".lu.json")))?;
    Ok(exit::OK)
}

#[derive(Debug, Default, Serialize)]
struct DimsSummary {
    dims: String,
    orbit_trials: usize,
    orbit_equivalent: usize,
    max_residual: f64,
    negative_trials: usize,
    negative_inequivalent: usize,
}

#[derive(Debug, Default, Serialize)]
struct DegenerateSummary {
    trials: usize,
    equivalent: usize,
    undecided: usize,
    inequivalent: usize,
}

#[derive(Debug, Serialize)]
struct OrbitTestReport {
    per_dims: Vec<DimsSummary>,
    degenerate: DegenerateSummary,
    histogram: BTreeMap<&'static str, usize>,
    passed: bool,
}

fn verdict_name(v: &Verdict) -> &'static str {
    match v {
        Verdict::Equivalent { .. } => "Equivalent",
        Verdict::Inequivalent { .. } => "Inequivalent",
        Verdict::Undecided { .. } => "Undecided",
    }
}

/// Mixes a little of the maximally mixed state in, which moves every
/// eigenvalue not already equal to `1 / mn`.
fn perturb_spectrum(rho: &DensityMatrix, eps: f64) -> Result<DensityMatrix, Error> {
    let d = rho.dims();
    let mixed = DensityMatrix::maximally_mixed(d);
    let mat = rho.matrix().scale_real(1.0 - eps).add(&mixed.matrix().scale_real(eps))?;
    validate_state(&mat, d, 1e-10)
}

pub fn orbit_test(cli: &Cli, dims: &[(usize, usize)], trials: usize) -> Result<u8, Failure> {
    let config = DecisionConfig {
        tol: cli.tolerances(),
        optimizer: OptimizerConfig { seed: cli.seed, ..OptimizerConfig::default() },
    };
    let decide = |a: &DensityMatrix, b: &DensityMatrix| decide_equivalence(a, b, &config).map_err(invalid);
    let mut histogram = BTreeMap::new();
    let mut per_dims = Vec::new();
    for (k, &(m, n)) in dims.iter().enumerate() {
        let d = BipartiteDims::new(m, n).map_err(invalid)?;
        let mut s = DimsSummary { dims: format!("{m}x{n}"), ..DimsSummary::default() };
        for t in 0..trials {
            let seed = cli.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add((k * trials + t) as u64);
            let rank = 1 + t % (m * n);
            let rho = random_density(d, rank, seed).map_err(invalid)?;
            let lu = random_local_unitary(d, seed ^ 0x5555_5555);
            let rho2 = apply_local_unitary(&rho, &lu).map_err(invalid)?;

            let v = decide(&rho, &rho2)?;
            debug!("{m}x{n} rank {rank} seed {seed}: {}", verdict_name(&v));
            *histogram.entry(verdict_name(&v)).or_insert(0) += 1;
            s.orbit_trials += 1;
            if let Verdict::Equivalent { certificate, .. } = &v {
                let r = verify_certificate(&rho, &rho2, certificate).map_err(invalid)?;
                s.max_residual = s.max_residual.max(r);
                if r < config.tol.tol_accept {
                    s.orbit_equivalent += 1;
                }
            }

            let neg = perturb_spectrum(&rho2, 1e-3).map_err(invalid)?;
            let v = decide(&rho, &neg)?;
            *histogram.entry(verdict_name(&v)).or_insert(0) += 1;
            s.negative_trials += 1;
            if v.is_inequivalent() {
                s.negative_inequivalent += 1;
            }
        }
        per_dims.push(s);
    }

    let mut degenerate = DegenerateSummary::default();
    let count = trials.div_ceil(10);
    for t in 0..count {
        let f = 0.05 + 0.15 * t as f64 / count as f64;
        let rho = WernerParams::new(0.0, f).and_then(werner).map_err(invalid)?;
        let lu = random_local_unitary(rho.dims(), cli.seed.wrapping_add(1000 + t as u64));
        let rho2 = apply_local_unitary(&rho, &lu).map_err(invalid)?;
        let v = decide(&rho, &rho2)?;
        *histogram.entry(verdict_name(&v)).or_insert(0) += 1;
        degenerate.trials += 1;
        match v {
            Verdict::Equivalent { .. } => degenerate.equivalent += 1,
            Verdict::Undecided { .. } => degenerate.undecided += 1,
            Verdict::Inequivalent { .. } => degenerate.inequivalent += 1,
        }
    }

    let passed = per_dims
        .iter()
        .all(|s| s.orbit_equivalent == s.orbit_trials && s.negative_inequivalent == s.negative_trials)
        && degenerate.inequivalent == 0;
    let report = OrbitTestReport { per_dims, degenerate, histogram, passed };
    emit(cli, &report, || {
        println!("{:<6} {:>14} {:>12} {:>16}", "dims", "orbit equiv", "max resid", "negatives rej");
        for s in &report.per_dims {
            println!(
                "{:<6} {:>14} {:>12.3e} {:>16}",
                s.dims,
                format!("{}/{}", s.orbit_equivalent, s.orbit_trials),
                s.max_residual,
                format!("{}/{}", s.negative_inequivalent, s.negative_trials)
            );
        }
        let g = &report.degenerate;
        println!(
            "degenerate pairs: {} equivalent, {} undecided, {} inequivalent of {}",
            g.equivalent, g.undecided, g.inequivalent, g.trials
        );
        println!("verdicts {:?}", report.histogram);
        println!("{}", if report.passed { "PASS" } else { "FAIL" });
    });
    Ok(if report.passed { exit::OK } else { exit::SELF_CHECK })
}

pub fn dim(cli: &Cli, path: &Path) -> Result<u8, Failure> {
    let rho = load_state(cli, path)?;
    let d = rho.dims().total();
    #[derive(Serialize)]
    struct Out {
        orbit_dimension: usize,
        ambient_dimension: usize,
    }
    let out = Out {
        orbit_dimension: orbit_dimension(&rho, DEFAULT_ORBIT_TOL).map_err(invalid)?,
        ambient_dimension: d * d - 1,
    };
    emit(cli, &out, || {
        println!("orbit dimension    {}", out.orbit_dimension);
        println!("ambient dimension  {}", out.ambient_dimension);
    });
    Ok(exit::OK)
}
