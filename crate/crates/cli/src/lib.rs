//! The `unilift` command line.
//!
//! Every command prints one JSON document (or CSV / plain text where
//! `--format` allows it) on stdout. Failures print
//! `{"error": {"kind", "message"}}` on stderr.
//!
//! Exit codes: 0 success, 1 result differs from the expected classification
//! or a theorem-backed check failed, 2 input error, 3 unit data missing.

pub mod checkpoint;
pub mod error;
pub mod output;
pub mod units;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use unilift::classify::{
    gate, label_match, m_test, process_survivor, ClassificationReport, FieldResult, Params,
};
use unilift::indecomp::{cone_from_record, indecomposables_up_to, verify_units};
use unilift::reptest::{add_bound_holds, cond_delta_holds};
use unilift::sqrtext::{compositum_check, sqrt5_witness, sqrt_e_witness, Regime, SQRT5_BOUND};
use unilift::{data, f_representable, make_order, Int, KElem, Quad, QuadField};

use crate::error::{CliError, CliResult, EXIT_MISMATCH, EXIT_NEEDS_UNITS, EXIT_OK};

/// Schema tag of every JSON document written to stdout.
pub const REPORT_SCHEMA: &str = "unilift-report/1";

#[derive(Parser, Debug)]
#[command(name = "unilift", version, about = "Universal lattice lifting over real quadratic fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Unit data file or directory (default: $UNILIFT_UNITS, else bundled).
    #[arg(long)]
    pub units: Option<PathBuf>,
    /// Worker threads; 0 uses one per core.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify all extensions of Q(√D) admitting a universal lift.
    Classify {
        #[arg(long = "D")]
        d: Int,
        #[arg(long, default_value_t = 50)]
        m_count: usize,
        /// Accept D outside the bundled class-number-one list.
        #[arg(long)]
        allow_unlisted: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// JSON-lines checkpoint; resumed if it exists.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the m-test and verification for one Δ.
    CheckDelta {
        #[arg(long = "D")]
        d: Int,
        /// Δ as `m,n` meaning m + nτ.
        #[arg(long, value_parser = parse_quad, allow_hyphen_values = true)]
        delta: Quad,
        #[arg(long, default_value_t = 50)]
        m_count: usize,
        #[arg(long)]
        allow_unlisted: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Decide F-representability of α = a + b·w.
    Represent {
        #[arg(long = "D")]
        d: Int,
        #[arg(long, value_parser = parse_quad, allow_hyphen_values = true)]
        delta: Quad,
        /// α as `a_m,a_n,b_m,b_n`.
        #[arg(long, value_parser = parse_kelem, allow_hyphen_values = true)]
        alpha: KElem,
    },
    /// List indecomposables of O_F[w] up to a trace bound.
    Indecomposables {
        #[arg(long = "D")]
        d: Int,
        #[arg(long, value_parser = parse_quad, allow_hyphen_values = true)]
        delta: Quad,
        /// Trace bound; defaults to the bound derived from the unit data.
        #[arg(long)]
        max_trace: Option<Int>,
        #[command(flatten)]
        common: Common,
    },
    /// Non-representable element of F(√e) for gcd(D, D_e) = 1.
    SqrtE {
        #[arg(long = "D")]
        d: Int,
        #[arg(long)]
        e: Int,
    },
    /// Non-representable a + bφ in F(√5).
    Sqrt5Witness {
        /// Comma-separated discriminants.
        #[arg(long = "D", value_delimiter = ',')]
        d: Vec<Int>,
        /// Also scan this many admissible D starting at --from.
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, default_value_t = SQRT5_BOUND)]
        from: Int,
        /// Run the construction below the proven range.
        #[arg(long)]
        allow_unproved: bool,
    },
    /// Re-check every record of a unit data file.
    VerifyUnits {
        #[command(flatten)]
        common: Common,
    },
    /// Classify every listed D and compare with the expected table.
    Table1 {
        /// Comma-separated D to leave out.
        #[arg(long, value_delimiter = ',')]
        skip: Vec<Int>,
        /// Only these D (comma-separated).
        #[arg(long, value_delimiter = ',')]
        only: Vec<Int>,
        #[arg(long)]
        include_193: bool,
        #[arg(long, default_value_t = 50)]
        m_count: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Directory for per-D checkpoints `D<d>.jsonl`.
        #[arg(long)]
        checkpoint_dir: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_ints(s: &str, n: usize) -> Result<Vec<i64>, String> {
    let v: Vec<i64> = s
        .split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated integers, got {}", v.len()));
    }
    Ok(v)
}

pub fn parse_quad(s: &str) -> Result<Quad, String> {
    let v = parse_ints(s, 2)?;
    Ok(Quad::small(v[0], v[1]))
}

pub fn parse_kelem(s: &str) -> Result<KElem, String> {
    let v = parse_ints(s, 4)?;
    Ok(KElem::small(v[0], v[1], v[2], v[3]))
}

fn envelope(config: Value, report: impl Serialize) -> Value {
    json!({"schema": REPORT_SCHEMA, "config": config, "report": report})
}

fn emit(out: &mut dyn Write, v: &Value) -> CliResult<()> {
    let s = serde_json::to_string(v).expect("reports serialize");
    writeln!(out, "{s}").map_err(|e| CliError::Io(format!("stdout: {e}")))
}

fn write_str(out: &mut dyn Write, s: &str) -> CliResult<()> {
    out.write_all(s.as_bytes()).map_err(|e| CliError::Io(format!("stdout: {e}")))
}

fn in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Exit status implied by a classification: missing units first, then any
/// difference from the expected table for listed `D`.
pub fn classification_status(r: &ClassificationReport) -> i32 {
    if !r.needs_units.is_empty() {
        return EXIT_NEEDS_UNITS;
    }
    if data::has_class_number_one(r.d) {
        let expected: Vec<Int> = data::expected_discs(r.d as i64).into_iter().map(Int::from).collect();
        if r.verified_discs() != expected {
            return EXIT_MISMATCH;
        }
    }
    EXIT_OK
}

/// Runs the CLI on `argv` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let ce = CliError::Usage(e.to_string().trim().to_string());
            let _ = writeln!(err, "{}", ce.to_json());
            return ce.exit_code();
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "{}", e.to_json());
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> CliResult<i32> {
    match cmd {
        Command::Classify {
            d,
            m_count,
            allow_unlisted,
            format,
            checkpoint,
            common,
        } => {
            gate(d, allow_unlisted)?;
            units::validate(common.units.as_deref())?;
            let u = units::load(common.units.as_deref())?;
            let params = Params { m_count };
            let ck = checkpoint.as_deref();
            let report = in_pool(common.workers, || checkpoint::classify_resumable(d, &params, &u, ck))??;
            let config = json!({
                "command": "classify",
                "D": d,
                "m_count": m_count,
                "allow_unlisted": allow_unlisted,
                "units": units::describe(common.units.as_deref()),
                "format": format,
            });
            match format {
                Format::Json => emit(out, &envelope(config, &report))?,
                Format::Csv => write_str(out, &output::csv_rows(&[&report])?)?,
                Format::Human => write_str(out, &output::human(&report))?,
            }
            Ok(classification_status(&report))
        }
        Command::CheckDelta {
            d,
            delta,
            m_count,
            allow_unlisted,
            common,
        } => {
            gate(d, allow_unlisted)?;
            if m_count == 0 {
                return Err(CliError::Usage("--m-count must be at least 1".into()));
            }
            units::validate(common.units.as_deref())?;
            let u = units::load(common.units.as_deref())?;
            let f = QuadField::new(d)?;
            let o = make_order(&f, delta.clone())?;
            let m = m_test(&o, m_count)?;
            let outcome = match &m {
                Some(_) => None,
                None => Some(in_pool(common.workers, || process_survivor(&f, &delta, &u))??),
            };
            let needs = matches!(&outcome, Some(o) if o.result == FieldResult::NeedsUnits);
            let report = json!({
                "D": d,
                "delta": delta,
                "t": o.t(),
                "abs_disc": o.abs_disc(),
                "label": label_match(o.abs_disc()),
                "cond_delta": cond_delta_holds(&f, &delta),
                "add_bound": add_bound_holds(&o),
                "m_test": m,
                "outcome": outcome,
            });
            let config = json!({
                "command": "check-delta",
                "D": d,
                "delta": delta,
                "m_count": m_count,
                "allow_unlisted": allow_unlisted,
                "units": units::describe(common.units.as_deref()),
            });
            emit(out, &envelope(config, report))?;
            Ok(if needs { EXIT_NEEDS_UNITS } else { EXIT_OK })
        }
        Command::Represent { d, delta, alpha } => {
            let f = QuadField::new(d)?;
            let o = make_order(&f, delta.clone())?;
            let r = f_representable(&o, &alpha)?;
            let config = json!({"command": "represent", "D": d, "delta": delta, "alpha": alpha});
            let report = json!({
                "representable": r.is_representable(),
                "witness": r.witness,
                "searched_r_count": r.searched_r_count,
            });
            emit(out, &envelope(config, report))?;
            Ok(EXIT_OK)
        }
        Command::Indecomposables {
            d,
            delta,
            max_trace,
            common,
        } => {
            let f = QuadField::new(d)?;
            let o = make_order(&f, delta.clone())?;
            let bound = match max_trace {
                Some(t) => t,
                None => {
                    units::validate(common.units.as_deref())?;
                    let u = units::load(common.units.as_deref())?;
                    let rec = u
                        .iter()
                        .find(|r| r.d == d && r.delta == delta)
                        .ok_or_else(|| unilift::Error::NeedsUnits {
                            d: d.to_string(),
                            delta: delta.to_string(),
                        })?;
                    cone_from_record(&o, rec)?.m
                }
            };
            let list = in_pool(common.workers, || indecomposables_up_to(&o, bound))?;
            let config = json!({
                "command": "indecomposables",
                "D": d,
                "delta": delta,
                "max_trace": max_trace,
                "units": units::describe(common.units.as_deref()),
            });
            let report = json!({"trace_bound": bound, "count": list.len(), "indecomposables": list});
            emit(out, &envelope(config, report))?;
            Ok(EXIT_OK)
        }
        Command::SqrtE { d, e } => {
            let f = QuadField::new(d)?;
            let ctx = compositum_check(&f, e)?;
            let w = sqrt_e_witness(&ctx)?;
            let ok = w.totally_positive && !w.result.is_representable();
            let config = json!({"command": "sqrt-e", "D": d, "e": e});
            let report = json!({"D": d, "e": e, "delta_e": ctx.delta_e, "witness": w});
            emit(out, &envelope(config, report))?;
            Ok(if ok { EXIT_OK } else { EXIT_MISMATCH })
        }
        Command::Sqrt5Witness {
            d,
            count,
            from,
            allow_unproved,
        } => {
            let mut ds = d.clone();
            if let Some(n) = count {
                ds.extend(unilift::sqrtext::sqrt5_candidates(from, n));
            }
            if ds.is_empty() {
                return Err(CliError::Usage("give --D or --count".into()));
            }
            if !allow_unproved {
                if let Some(small) = ds.iter().find(|&&x| x < SQRT5_BOUND) {
                    return Err(CliError::DTooSmall(format!(
                        "D = {small} is below {SQRT5_BOUND}; pass --allow-unproved to run it anyway"
                    )));
                }
            }
            let ws = ds.iter().map(|&x| sqrt5_witness(x)).collect::<unilift::Result<Vec<_>>>()?;
            let bad = ws
                .iter()
                .any(|w| w.regime == Regime::Theorem && (!w.totally_positive || w.representable));
            let config = json!({
                "command": "sqrt5-witness",
                "D": d,
                "count": count,
                "from": from,
                "allow_unproved": allow_unproved,
            });
            emit(out, &envelope(config, json!({"witnesses": ws})))?;
            Ok(if bad { EXIT_MISMATCH } else { EXIT_OK })
        }
        Command::VerifyUnits { common } => {
            units::validate(common.units.as_deref())?;
            let u = units::load(common.units.as_deref())?;
            let results: Vec<Value> = in_pool(common.workers, || {
                use rayon::prelude::*;
                u.par_iter()
                    .map(|r| {
                        let res = QuadField::new(r.d).and_then(|f| {
                            let o = make_order(&f, r.delta.clone())?;
                            verify_units(&o, &r.units)?;
                            cone_from_record(&o, r)
                        });
                        match res {
                            Ok(c) => json!({"D": r.d, "delta": r.delta, "ok": true, "index": c.index, "trace_bound": c.m}),
                            Err(e) => json!({"D": r.d, "delta": r.delta, "ok": false, "error": e.to_string()}),
                        }
                    })
                    .collect()
            })?;
            let failures = results.iter().filter(|v| v["ok"] == false).count();
            let config = json!({"command": "verify-units", "units": units::describe(common.units.as_deref())});
            let report = json!({"records": results.len(), "failures": failures, "results": results});
            emit(out, &envelope(config, report))?;
            Ok(if failures == 0 { EXIT_OK } else { EXIT_MISMATCH })
        }
        Command::Table1 {
            skip,
            only,
            include_193,
            m_count,
            format,
            checkpoint_dir,
            common,
        } => {
            units::validate(common.units.as_deref())?;
            if let Some(dir) = &checkpoint_dir {
                std::fs::create_dir_all(dir).map_err(|e| error::io_err(dir, e))?;
            }
            let u = units::load(common.units.as_deref())?;
            let ds: Vec<Int> = data::class_number_one_discriminants()
                .filter(|d| !skip.contains(d))
                .filter(|d| only.is_empty() || only.contains(d))
                .filter(|&d| d != 193 || include_193)
                .collect();
            let params = Params { m_count };
            let mut reports = Vec::new();
            for &d in &ds {
                let ck = checkpoint_dir.as_deref().map(|p: &Path| p.join(format!("D{d}.jsonl")));
                let r = in_pool(common.workers, || checkpoint::classify_resumable(d, &params, &u, ck.as_deref()))??;
                reports.push(r);
            }
            let rows: Vec<Value> = reports
                .iter()
                .map(|r| {
                    let expected = data::expected_discs(r.d as i64);
                    json!({
                        "D": r.d,
                        "expected": expected,
                        "verified": r.verified_discs(),
                        "needs_units": r.needs_units,
                        "match": classification_status(r) == EXIT_OK,
                    })
                })
                .collect();
            let status = reports
                .iter()
                .map(classification_status)
                .max_by_key(|&c| match c {
                    EXIT_NEEDS_UNITS => 2,
                    EXIT_MISMATCH => 1,
                    _ => 0,
                })
                .unwrap_or(EXIT_OK);
            let config = json!({
                "command": "table1",
                "skip": skip,
                "only": only,
                "include_193": include_193,
                "m_count": m_count,
                "units": units::describe(common.units.as_deref()),
                "format": format,
            });
            match format {
                Format::Json => {
                    let report = json!({"rows": rows, "all_match": status == EXIT_OK, "reports": reports});
                    emit(out, &envelope(config, report))?
                }
                Format::Csv => {
                    let refs: Vec<&ClassificationReport> = reports.iter().collect();
                    write_str(out, &output::csv_rows(&refs)?)?
                }
                Format::Human => {
                    let mut s = String::new();
                    for row in &rows {
                        s.push_str(&format!(
                            "D={:<4} expected={} verified={} {}\n",
                            row["D"],
                            row["expected"],
                            row["verified"],
                            if row["match"] == true { "ok" } else { "MISMATCH" }
                        ));
                    }
                    write_str(out, &s)?
                }
            }
            Ok(status)
        }
    }
}
