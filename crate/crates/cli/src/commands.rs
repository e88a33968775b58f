use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use transmute::catalog::{list_identities, Side};
use transmute::dist::laplace_pdf;
use transmute::engine::{run_identity_suite, EquivalenceReport, OutputFormat};
use transmute::oracle::{duplication_residual, mixture_density_quadrature, QuadratureSpec};

use crate::config::{env_layer, read_config_file, Overrides, SEED_ENV};

#[derive(Debug)]
pub enum Failure {
    /// Bad flags, bad config, unreadable or unwritable files.
    Usage(String),
    /// A statistical or numerical check did not pass.
    Check(String),
}

type Outcome = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

pub fn run(flags: Overrides, config_file: Option<&Path>) -> Outcome {
    let env = env_layer(std::env::var(SEED_ENV).ok()).map_err(usage)?;
    let file = match config_file {
        Some(path) => read_config_file(path).map_err(usage)?,
        None => Overrides::default(),
    };
    let config = env.layer(file).layer(flags).into_config().map_err(usage)?;

    let cases = config.cases().map_err(|e| usage(e.to_string()))?;
    let mut sink: Box<dyn Write> = match &config.output_path {
        Some(path) => Box::new(fs::File::create(path).map_err(|e| {
            usage(format!("cannot write report to {}: {e}", path.display()))
        })?),
        None => Box::new(io::stdout()),
    };
    eprintln!(
        "running {} identity cases x {} replicates, n = {}, seed = {}",
        cases.len(),
        config.replicates,
        config.n,
        config.master_seed
    );
    let report = run_identity_suite(&config).map_err(|e| Failure::Check(e.to_string()))?;
    let bytes = render(&report).map_err(usage)?;
    sink.write_all(&bytes)
        .and_then(|()| sink.flush())
        .map_err(|e| usage(format!("cannot write report: {e}")))?;
    for s in &report.identities {
        eprintln!(
            "{:<10} pass fraction {:.3} ({}/{})",
            s.identity, s.pass_fraction, s.passed_replicates, s.replicates
        );
    }
    if report.aggregate_pass {
        eprintln!("aggregate: pass ({} tests, Bonferroni alpha {:e})", report.tests_run, report.bonferroni_alpha);
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "aggregate: FAIL ({} of {} tests rejected at Bonferroni alpha {:e})",
            report.results.iter().filter(|r| !r.passed_adjusted).count(),
            report.tests_run,
            report.bonferroni_alpha
        )))
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    identity: &'a str,
    replicate: u32,
    test_kind: String,
    statistic: f64,
    threshold: f64,
    p_value: Option<f64>,
    passed: bool,
    adjusted_threshold: f64,
    passed_adjusted: bool,
}

pub fn render(report: &EquivalenceReport) -> Result<Vec<u8>, String> {
    match report.config.output_format {
        OutputFormat::Json => Ok(report.to_json().into_bytes()),
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &report.results {
                w.serialize(CsvRow {
                    identity: &r.identity,
                    replicate: r.replicate,
                    test_kind: r.test_kind.to_string(),
                    statistic: r.statistic,
                    threshold: r.threshold,
                    p_value: r.p_value,
                    passed: r.passed,
                    adjusted_threshold: r.adjusted_threshold,
                    passed_adjusted: r.passed_adjusted,
                })
                .map_err(|e| e.to_string())?;
            }
            w.into_inner().map_err(|e| e.to_string())
        }
    }
}

pub fn list(format: &str) -> Outcome {
    let specs = list_identities();
    let mut out = String::new();
    match format {
        "text" => {
            for spec in &specs {
                let params = match spec.id.param_name() {
                    Some(name) => {
                        let values: Vec<String> =
                            spec.id.default_params().iter().map(u32::to_string).collect();
                        format!("{name}={}", values.join(","))
                    }
                    None => "-".to_string(),
                };
                out.push_str(&format!(
                    "{}\t{}\t{}\t{} ~ {}\t{}\n",
                    spec.id,
                    spec.test_plan(),
                    params,
                    spec.expression(Side::Lhs),
                    spec.expression(Side::Rhs),
                    spec.citation()
                ));
            }
        }
        "json" => {
            let entries: Vec<_> = specs
                .iter()
                .map(|spec| {
                    json!({
                        "id": spec.id,
                        "citation": spec.citation(),
                        "test_plan": spec.test_plan(),
                        "parameter": spec.id.param_name().map(|name| json!({
                            "name": name,
                            "defaults": spec.id.default_params(),
                        })),
                        "lhs": spec.expression(Side::Lhs),
                        "rhs": spec.expression(Side::Rhs),
                    })
                })
                .collect();
            out = serde_json::to_string_pretty(&entries).map_err(|e| usage(e.to_string()))?;
            out.push('\n');
        }
        other => return Err(usage(format!("unknown list format `{other}` (expected text or json)"))),
    }
    io::stdout()
        .write_all(out.as_bytes())
        .map_err(|e| usage(e.to_string()))
}

const MAX_GRID_POINTS: usize = 1_000_000;

/// Parses `start:stop:step` into the points `start + i * step <= stop`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(format!("grid `{spec}` must be start:stop:step"));
    };
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("bad number `{s}` in grid `{spec}`"))
    };
    let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
    if !(step > 0.0) || stop < start {
        return Err(format!("grid `{spec}` needs step > 0 and stop >= start"));
    }
    let intervals = ((stop - start) / step + 1e-9).floor();
    if intervals >= MAX_GRID_POINTS as f64 {
        return Err(format!("grid `{spec}` has too many points"));
    }
    Ok((0..=intervals as usize)
        .map(|i| start + i as f64 * step)
        .collect())
}

pub fn density_check(lambda: f64, grid: &str, tol: f64) -> Outcome {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(usage(format!("--lambda must be positive, got {lambda}")));
    }
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(usage(format!("--tol must be positive, got {tol}")));
    }
    let points = parse_grid(grid).map_err(usage)?;
    // the quadrature contract bounds the error by 10x its own tolerance
    let spec = QuadratureSpec::with_tolerance(tol / 100.0);
    let mut out = String::from("l\tquadrature\tclosed_form\tabs_diff\n");
    let mut worst: f64 = 0.0;
    for &l in &points {
        let q = mixture_density_quadrature(l, lambda, &spec)
            .map_err(|e| Failure::Check(format!("l = {l}: {e}")))?;
        let exact = laplace_pdf(l, lambda).map_err(|e| usage(e.to_string()))?;
        let diff = (q - exact).abs();
        worst = worst.max(diff);
        out.push_str(&format!("{l:.6}\t{q:.15}\t{exact:.15}\t{diff:.3e}\n"));
    }
    out.push_str(&format!("# max_abs_diff\t{worst:.3e}\n"));
    io::stdout()
        .write_all(out.as_bytes())
        .map_err(|e| usage(e.to_string()))?;
    if worst < tol {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "max |quadrature - closed form| = {worst:e} is not below {tol:e}"
        )))
    }
}

/// Parses `start:stop` with `0 < start <= stop`.
pub fn parse_range(spec: &str) -> Result<(f64, f64), String> {
    let (a, b) = spec
        .split_once(':')
        .ok_or_else(|| format!("range `{spec}` must be start:stop"))?;
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("bad number `{s}` in range `{spec}`"))
    };
    let (a, b) = (num(a)?, num(b)?);
    if !(a > 0.0) || b < a {
        return Err(format!("range `{spec}` must satisfy 0 < start <= stop"));
    }
    Ok((a, b))
}

/// `count` log-spaced points from `start` to `stop` inclusive.
pub fn log_spaced(start: f64, stop: f64, count: usize) -> Vec<f64> {
    if count <= 1 || start == stop {
        return vec![start];
    }
    let (la, lb) = (start.ln(), stop.ln());
    (0..count)
        .map(|i| {
            if i == 0 {
                start
            } else if i == count - 1 {
                stop
            } else {
                (la + (lb - la) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

pub fn duplication_check(range: &str, points: usize, tol: f64) -> Outcome {
    let (start, stop) = parse_range(range).map_err(usage)?;
    if points == 0 || points > MAX_GRID_POINTS {
        return Err(usage(format!("--points must be between 1 and {MAX_GRID_POINTS}")));
    }
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(usage(format!("--tol must be positive, got {tol}")));
    }
    let mut out = String::from("z\tresidual\n");
    let mut worst: f64 = 0.0;
    for z in log_spaced(start, stop, points) {
        let r = duplication_residual(z).map_err(|e| usage(e.to_string()))?;
        worst = worst.max(r.abs());
        out.push_str(&format!("{z:.9}\t{r:.3e}\n"));
    }
    out.push_str(&format!("# max_abs_residual\t{worst:.3e}\n"));
    io::stdout()
        .write_all(out.as_bytes())
        .map_err(|e| usage(e.to_string()))?;
    if worst < tol {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "max |residual| = {worst:e} is not below {tol:e}"
        )))
    }
}
