//! `slant`: analyze surfaces in E⁴ for slant structure from the command line.

mod analyze;
mod output;
mod source;

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use slant::forms::{loop_integral_psi, Loop};
use slant::jets::{catalog, wirtinger_field, Grid};
use slant::{selfcheck, tol};

use crate::analyze::{Analysis, PointRow};
use crate::output::{format_float, to_json};
use crate::source::{load, CliError, CliResult, Source};

#[derive(Parser)]
#[command(name = "slant", version, about = "Slant surfaces in E^4: angles, curvature, Gauss maps and canonical forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full report: Wirtinger angles, curvature, detection, operator checks, forms.
    Analyze {
        #[command(flatten)]
        src: SourceArgs,
        /// Complex structure id (J0, J1, J1m, J2, Jalpha:<radians>, optionally negated with '-').
        #[arg(long = "J")]
        j: Option<String>,
        #[arg(long, default_value = "64x64")]
        grid: String,
        /// Quadrature steps for the loop integrals.
        #[arg(long, default_value_t = 4096)]
        steps: usize,
        /// Write the per-point table as CSV.
        #[arg(long)]
        csv: Option<String>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Recover every compatible complex structure the surface is slant for.
    Detect {
        #[command(flatten)]
        src: SourceArgs,
        #[arg(long, default_value = "64x64")]
        grid: String,
        #[arg(long)]
        out: Option<String>,
    },
    /// Integrate the normalized canonical 1-form over a loop.
    Loop {
        #[command(flatten)]
        src: SourceArgs,
        #[arg(long = "J")]
        j: Option<String>,
        /// period-u, period-v, square, circle (optionally "@u,v,size"), or "u(t);v(t)".
        #[arg(long = "loop")]
        lp: String,
        #[arg(long, default_value_t = 4096)]
        steps: usize,
        /// Parameter interval for expression loops, "t0,t1".
        #[arg(long = "t-range", allow_hyphen_values = true)]
        t_range: Option<String>,
        #[arg(long)]
        out: Option<String>,
    },
    /// List the catalog entries.
    Catalog {
        #[arg(long)]
        out: Option<String>,
    },
    /// Run the numbered invariant suite.
    Selfcheck {
        /// Run only this criterion (1-based).
        #[arg(long)]
        criterion: Option<usize>,
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Args)]
struct SourceArgs {
    /// Catalog id, optionally with inline parameters ("ex2.4:k=2").
    #[arg(long, conflicts_with = "config")]
    catalog: Option<String>,
    /// Immersion config file (JSON).
    #[arg(long)]
    config: Option<String>,
    /// Parameter overrides "name=value[,name=value]"; repeatable.
    #[arg(long = "param", allow_hyphen_values = true)]
    params: Vec<String>,
}

impl SourceArgs {
    fn load(&self, j: Option<&str>) -> CliResult<Source> {
        load(self.catalog.as_deref(), self.config.as_deref(), &self.params, j)
    }
}

fn parse_grid(s: &str) -> CliResult<Grid> {
    Ok(Grid::parse(s)?)
}

fn emit<T: Serialize>(report: &T, out: Option<&str>) -> CliResult<()> {
    let text = to_json(report).map_err(|e| CliError::Numeric(format!("serialization: {e}")))?;
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Config(format!("{path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_csv(path: &str, rows: &[PointRow]) -> CliResult<()> {
    let io = |e: csv::Error| CliError::Config(format!("{path}: {e}"));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["u", "v", "G", "G_D", "H_norm", "wirtinger", "alpha", "identity_residual"])
        .map_err(io)?;
    for r in rows {
        let cells = [r.u, r.v, r.gauss, r.normal_curvature, r.h_norm, r.wirtinger, r.alpha, r.identity_residual];
        w.write_record(cells.map(format_float)).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Config(format!("{path}: {e}")))
}

fn violations_to_result(v: &[String]) -> CliResult<()> {
    if v.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numeric(v.join("; ")))
    }
}

fn parse_t_range(s: Option<&str>) -> CliResult<(f64, f64)> {
    let Some(s) = s else { return Ok((0.0, TAU)) };
    let bad = || CliError::Config(format!("--t-range '{s}' (expected t0,t1 with t0 < t1)"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let t0: f64 = a.trim().parse().map_err(|_| bad())?;
    let t1: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(t0 < t1) {
        return Err(bad());
    }
    Ok((t0, t1))
}

fn run_loop(src: &Source, spec: &str, steps: usize, t_range: Option<&str>) -> CliResult<Value> {
    let j = src
        .four()
        .ok_or_else(|| CliError::Config("loop integrals need a surface in E^4".into()))?;
    let (lp, kind) = match spec.split_once(';') {
        Some((u, v)) => {
            let (t0, t1) = parse_t_range(t_range)?;
            (Loop::from_exprs(u, v, t0, t1, BTreeMap::new())?, "expression")
        }
        None => {
            let lp = Loop::parse(spec, &src.imm.domain)?;
            let kind = match lp {
                Loop::PeriodU { .. } | Loop::PeriodV { .. } => "period",
                _ => "contractible",
            };
            (lp, kind)
        }
    };
    if steps == 0 {
        return Err(CliError::Config("--steps must be positive".into()));
    }
    let w = wirtinger_field(&src.imm, &Grid::new(16, 16), j)?;
    if !analyze::is_proper(&w) {
        return Err(CliError::Config(format!(
            "'{}' is not proper slant under {} (angle {:.6} to {:.6}); the loop form is undefined",
            src.id, src.structure_id, w.min, w.max
        )));
    }
    let r = loop_integral_psi(&src.imm, j, &lp, steps)?;
    let (check, tolerance, measured) = match kind {
        "period" => ("integrality", Some(tol::PERIOD_INTEGRAL), r.distance),
        "contractible" => ("contractible", Some(tol::CONTRACTIBLE_INTEGRAL), r.value.abs()),
        _ => ("none", None, f64::NAN),
    };
    let ok = tolerance.map_or(true, |t| measured <= t);
    let mut report = json!({
        "command": "loop",
        "source": src.describe(),
        "structure": src.describe_structure(),
        "loop": {"spec": spec, "kind": kind},
        "result": r,
        "check": {"name": check, "value": tolerance.map(|_| measured), "tolerance": tolerance, "ok": ok},
        "closure_tolerance": tol::LOOP_CLOSURE,
        "slant": {"angle_min": w.min, "angle_max": w.max, "spread": w.spread, "tolerance": w.tolerance},
    });
    report["ok"] = json!(ok);
    report["violations"] = if ok {
        json!([])
    } else {
        json!([format!("{check}: {measured:e} exceeds {:e}", tolerance.unwrap_or_default())])
    };
    Ok(report)
}

fn catalog_report() -> CliResult<Value> {
    let mut entries = Vec::new();
    for e in catalog::entries() {
        let p = e.defaults();
        let imm = catalog::build(e.id, &p)?;
        let d = imm.domain;
        entries.push(json!({
            "id": e.id,
            "summary": e.summary,
            "ambient_dim": e.ambient_dim,
            "params": p,
            "structure": e.structure_id(&p),
            "convention": e.convention,
            "domain": [[d.u.0, d.u.1], [d.v.0, d.v.1]],
            "periods": imm.periods,
        }));
    }
    Ok(json!({"command": "catalog", "entries": entries}))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Analyze {
            src,
            j,
            grid,
            steps,
            csv,
            out,
        } => {
            let grid = parse_grid(&grid)?;
            if steps == 0 {
                return Err(CliError::Config("--steps must be positive".into()));
            }
            let source = src.load(j.as_deref())?;
            let Analysis {
                report,
                rows,
                violations,
            } = analyze::analyze(&source, &grid, steps)?;
            if let Some(path) = csv {
                if rows.is_empty() {
                    return Err(CliError::Config("no per-point table in this dimension".into()));
                }
                write_csv(&path, &rows)?;
            }
            emit(&report, out.as_deref())?;
            violations_to_result(&violations.0)
        }
        Command::Detect { src, grid, out } => {
            let grid = parse_grid(&grid)?;
            let source = src.load(None)?;
            if source.imm.ambient_dim != 4 {
                return Err(CliError::Config("detection needs a surface in E^4".into()));
            }
            let (report, violations) = analyze::detect(&source, &grid)?;
            emit(&report, out.as_deref())?;
            violations_to_result(&violations.0)
        }
        Command::Loop {
            src,
            j,
            lp,
            steps,
            t_range,
            out,
        } => {
            let source = src.load(j.as_deref())?;
            let report = run_loop(&source, &lp, steps, t_range.as_deref())?;
            emit(&report, out.as_deref())?;
            let v: Vec<String> = serde_json::from_value(report["violations"].clone()).unwrap_or_default();
            violations_to_result(&v)
        }
        Command::Catalog { out } => emit(&catalog_report()?, out.as_deref()),
        Command::Selfcheck { criterion, out } => {
            let results = match criterion {
                Some(n) if (1..=selfcheck::CRITERIA.len()).contains(&n) => vec![selfcheck::run(n)],
                Some(n) => return Err(CliError::Config(format!("no criterion {n} (1..={})", selfcheck::CRITERIA.len()))),
                None => selfcheck::run_all(),
            };
            let failed: Vec<String> = results
                .iter()
                .filter(|c| !c.passed)
                .map(|c| format!("criterion {}: {}", c.number, c.detail))
                .collect();
            emit(
                &json!({"command": "selfcheck", "criteria": results, "ok": failed.is_empty()}),
                out.as_deref(),
            )?;
            violations_to_result(&failed)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", serde_json::to_string(&e.to_json()).unwrap_or_else(|_| e.to_string()));
            ExitCode::from(e.exit_code())
        }
    }
}
