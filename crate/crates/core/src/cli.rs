//! Command-line front end.
//!
//! Exit codes: 0 success (disagreements with published formulas included),
//! 1 invalid parameters or usage, 2 internal consistency failure,
//! 3 resource guard.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::congruence::{congruence_count, ExponentMode, HRange, IndexMode};
use crate::curve::{
    enumerate_basis, enumerate_paper_index_set, validate_params, validate_params_strict,
    CurveParams,
};
use crate::engine::{cartier_images, cartier_matrix, p_rank_of};
use crate::error::{Error, Result};
use crate::points::{count_points, maximal_count};
use crate::report::{
    check_genus_cap, emit_report, verify_with, Format, ReportWriter, SweepRecord, VerifyOptions,
    DEFAULT_GENUS_CAP,
};
use crate::sweep::SweepSpec;

#[derive(Debug, Parser)]
#[command(
    name = "cartier",
    version,
    about = "Cartier matrix, a-number and p-rank of y^((q+1)/2) = x^m + x"
)]
struct Cli {
    /// Machine-readable JSON output (errors as JSON on stderr).
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// CSV output.
    #[arg(long, global = true)]
    csv: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CurveArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    s: u32,
    #[arg(long)]
    m: u64,
    /// Reject parameters violating any hypothesis.
    #[arg(long)]
    strict: bool,
    #[arg(long, default_value_t = DEFAULT_GENUS_CAP)]
    genus_cap: u64,
}

impl CurveArgs {
    fn params(&self) -> Result<CurveParams> {
        if self.strict {
            validate_params_strict(self.p, self.s, self.m)
        } else {
            validate_params(self.p, self.s, self.m)
        }
    }

    fn capped_params(&self) -> Result<CurveParams> {
        let params = self.params()?;
        check_genus_cap(&params, self.genus_cap)?;
        Ok(params)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate parameters; report genus and basis sizes.
    Check(CurveArgs),
    /// a-number, g - rank of the Cartier matrix.
    #[command(name = "a-number")]
    ANumber(CurveArgs),
    /// Rank of the Cartier matrix.
    Rank(CurveArgs),
    /// Stable rank of the Cartier matrix.
    #[command(name = "p-rank")]
    PRank(CurveArgs),
    /// Print the Cartier matrix.
    Matrix {
        #[command(flatten)]
        curve: CurveArgs,
        /// Print each basis numerator with its image polynomial.
        #[arg(long)]
        dump: bool,
    },
    /// Count index pairs solving the congruence system.
    #[command(name = "congruence-count")]
    CongruenceCount {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long, default_value = "honest")]
        exponent_mode: String,
        #[arg(long, default_value = "derived-basis")]
        index_mode: String,
        #[arg(long, default_value = "half")]
        h_range: String,
    },
    /// Brute-force point count over F_{p^e}.
    #[command(name = "point-count")]
    PointCount {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long)]
        e: usize,
    },
    /// Full verification report.
    Verify(CurveArgs),
    /// Run a parameter grid from a TOML or JSON spec file.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Output {
    Table,
    Json,
    Csv,
}

/// Runs the CLI on `argv` (including the program name) and returns the exit
/// code.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let wants_json = argv.iter().any(|a| a == "--json");
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            if wants_json {
                let _ = writeln!(
                    err,
                    "{}",
                    json!({"error": "Usage", "message": e.to_string().trim(), "exit_code": 1})
                );
            } else {
                let _ = write!(err, "{e}");
            }
            return 1;
        }
    };
    let mode = if cli.json {
        Output::Json
    } else if cli.csv {
        Output::Csv
    } else {
        Output::Table
    };
    match dispatch(&cli, mode, out, err) {
        Ok(code) => code,
        Err(e) => {
            report_error(&e, mode, err);
            e.exit_code()
        }
    }
}

fn report_error(e: &Error, mode: Output, err: &mut dyn Write) {
    if mode == Output::Json {
        let _ = writeln!(
            err,
            "{}",
            json!({"error": e.kind(), "message": e.to_string(), "exit_code": e.exit_code()})
        );
    } else {
        let _ = writeln!(err, "error: {e}");
    }
}

fn single(
    out: &mut dyn Write,
    mode: Output,
    params: &CurveParams,
    name: &str,
    value: u64,
) -> Result<()> {
    match mode {
        Output::Json => writeln!(
            out,
            "{}",
            json!({"p": params.p(), "s": params.s, "m": params.m, "g": params.g, name: value})
        )?,
        Output::Csv => {
            writeln!(out, "p,s,m,g,{name}")?;
            writeln!(
                out,
                "{},{},{},{},{value}",
                params.p(),
                params.s,
                params.m,
                params.g
            )?;
        }
        Output::Table => writeln!(out, "{value}")?,
    }
    Ok(())
}

fn dispatch(cli: &Cli, mode: Output, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Check(args) => {
            let params = args.params()?;
            let basis = enumerate_basis(&params).map(|b| b.len());
            let literal = enumerate_paper_index_set(&params).len();
            let failures = params.hypotheses.failures();
            match mode {
                Output::Json => writeln!(
                    out,
                    "{}",
                    json!({
                        "p": params.p(), "s": params.s, "m": params.m,
                        "n": params.n, "q": params.q, "g": params.g,
                        "basis_size": basis.as_ref().ok(),
                        "paper_index_set_size": literal,
                        "hypotheses": params.hypotheses,
                        "hypotheses_hold": failures.is_empty(),
                    })
                )?,
                Output::Csv => {
                    writeln!(
                        out,
                        "p,s,m,n,q,g,basis_size,paper_index_set_size,hypotheses_hold"
                    )?;
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{},{},{}",
                        params.p(),
                        params.s,
                        params.m,
                        params.n,
                        params.q,
                        params.g,
                        basis.as_ref().map(|b| b.to_string()).unwrap_or_default(),
                        literal,
                        failures.is_empty()
                    )?;
                }
                Output::Table => {
                    writeln!(
                        out,
                        "p = {}, s = {}, m = {}",
                        params.p(),
                        params.s,
                        params.m
                    )?;
                    writeln!(
                        out,
                        "n = {}, q = {}, genus = {}",
                        params.n, params.q, params.g
                    )?;
                    match &basis {
                        Ok(size) => writeln!(out, "holomorphic basis size = {size}")?,
                        Err(e) => writeln!(out, "holomorphic basis unavailable: {e}")?,
                    }
                    writeln!(out, "literal index set size = {literal}")?;
                    if failures.is_empty() {
                        writeln!(out, "all hypotheses hold")?;
                    } else {
                        writeln!(out, "failed hypotheses: {}", failures.join(", "))?;
                    }
                }
            }
            Ok(0)
        }
        Command::ANumber(args) => {
            let params = args.capped_params()?;
            let rank = cartier_matrix(&params)?.rank() as u64;
            single(out, mode, &params, "a_number", params.g - rank)?;
            Ok(0)
        }
        Command::Rank(args) => {
            let params = args.capped_params()?;
            let rank = cartier_matrix(&params)?.rank() as u64;
            single(out, mode, &params, "matrix_rank", rank)?;
            Ok(0)
        }
        Command::PRank(args) => {
            let params = args.capped_params()?;
            let pr = p_rank_of(&cartier_matrix(&params)?) as u64;
            single(out, mode, &params, "p_rank", pr)?;
            Ok(0)
        }
        Command::Matrix { curve, dump } => {
            let params = curve.capped_params()?;
            if *dump {
                let images = cartier_images(&params)?;
                // Validates that every image lies in the basis span.
                cartier_matrix(&params)?;
                match mode {
                    Output::Json => {
                        let cols: Vec<_> = images
                            .iter()
                            .map(|((a, b), h, img)| {
                                json!({"a": a, "b": b, "h": h.to_string(), "image": img.to_string()})
                            })
                            .collect();
                        writeln!(
                            out,
                            "{}",
                            json!({"p": params.p(), "s": params.s, "m": params.m, "columns": cols})
                        )?;
                    }
                    _ => {
                        for (idx, ((a, b), h, img)) in images.iter().enumerate() {
                            writeln!(out, "col {idx} (a={a}, b={b}): C({h}) = {img}")?;
                        }
                    }
                }
            } else {
                let mat = cartier_matrix(&params)?;
                let g = mat.dim();
                match mode {
                    Output::Json => {
                        let rows: Vec<Vec<u64>> = (0..g)
                            .map(|r| (0..g).map(|c| mat.entry(r, c).value()).collect())
                            .collect();
                        writeln!(
                            out,
                            "{}",
                            json!({"p": params.p(), "s": params.s, "m": params.m, "g": g, "rows": rows})
                        )?;
                    }
                    _ => {
                        let sep = if mode == Output::Csv { "," } else { " " };
                        for r in 0..g {
                            let row: Vec<String> = (0..g)
                                .map(|c| mat.entry(r, c).value().to_string())
                                .collect();
                            writeln!(out, "{}", row.join(sep))?;
                        }
                    }
                }
            }
            Ok(0)
        }
        Command::CongruenceCount {
            curve,
            exponent_mode,
            index_mode,
            h_range,
        } => {
            let params = curve.capped_params()?;
            let e: ExponentMode = exponent_mode.parse()?;
            let i: IndexMode = index_mode.parse()?;
            let h: HRange = h_range.parse()?;
            let count = congruence_count(&params, e, i, h)?;
            match mode {
                Output::Json => writeln!(
                    out,
                    "{}",
                    json!({
                        "p": params.p(), "s": params.s, "m": params.m, "g": params.g,
                        "exponent_mode": e.to_string(), "index_mode": i.to_string(),
                        "h_range": h.to_string(), "count": count,
                    })
                )?,
                _ => single(out, mode, &params, "count", count)?,
            }
            Ok(0)
        }
        Command::PointCount { curve, e } => {
            let params = curve.params()?;
            let count = count_points(&params, *e)?;
            let maximal_target = (*e == 2 * params.s as usize).then(|| maximal_count(&params));
            match mode {
                Output::Json => writeln!(
                    out,
                    "{}",
                    json!({
                        "p": params.p(), "s": params.s, "m": params.m, "g": params.g, "e": count.e,
                        "affine": count.affine, "at_infinity": count.at_infinity,
                        "points_total": count.total,
                        "hasse_weil_interval": count.hasse_weil_interval,
                        "within_hasse_weil": count.within_hasse_weil(),
                        "maximal": maximal_target.map(|t| t == count.total as u128),
                    })
                )?,
                Output::Csv => {
                    writeln!(out, "p,s,m,g,e,affine,at_infinity,points_total")?;
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{},{}",
                        params.p(),
                        params.s,
                        params.m,
                        params.g,
                        count.e,
                        count.affine,
                        count.at_infinity,
                        count.total
                    )?;
                }
                Output::Table => {
                    writeln!(
                        out,
                        "#X(F_{}^{}) = {} ({} affine + {} at infinity)",
                        params.p(),
                        count.e,
                        count.total,
                        count.affine,
                        count.at_infinity
                    )?;
                    if let Some(t) = maximal_target {
                        writeln!(out, "maximal: {}", t == count.total as u128)?;
                    }
                }
            }
            Ok(0)
        }
        Command::Verify(args) => {
            let params = args.params()?;
            let report = verify_with(
                &params,
                VerifyOptions {
                    genus_cap: args.genus_cap,
                    count_points: true,
                },
            )?;
            match mode {
                Output::Json => out.write_all(&emit_report(&report, Format::Json)?)?,
                Output::Csv => {
                    let mut w = ReportWriter::new(&mut *out, Format::Csv, true);
                    w.write(&SweepRecord::Report(report))?;
                    w.finish()?;
                }
                Output::Table => write_table(out, &report)?,
            }
            Ok(0)
        }
        Command::Sweep { spec } => run_sweep_command(spec, mode, out, err),
    }
}

fn write_table(out: &mut dyn Write, r: &crate::report::VerificationReport) -> Result<()> {
    let frac = |n: i128, d: i128| {
        if d == 1 {
            n.to_string()
        } else {
            format!("{n}/{d}")
        }
    };
    let rows: Vec<(&str, String)> = vec![
        ("p, s, m", format!("{}, {}, {}", r.p, r.s, r.m)),
        ("n, q, g", format!("{}, {}, {}", r.n, r.q, r.g)),
        ("matrix rank", r.matrix_rank.to_string()),
        ("a-number", r.a_number.to_string()),
        ("p-rank", r.p_rank.to_string()),
        ("congruence count (honest)", r.cc_honest.to_string()),
        ("congruence count (as printed)", r.cc_paper.to_string()),
        ("rank formula", frac(r.formula_rank_num, r.formula_rank_den)),
        ("a-number formula", frac(r.formula_a_num, r.formula_a_den)),
        (
            "points over F_q^2",
            r.points_total.map_or("-".into(), |v| v.to_string()),
        ),
        ("maximal", r.maximal.map_or("-".into(), |v| v.to_string())),
        ("flags", r.flags.to_compact()),
    ];
    for (k, v) in rows {
        writeln!(out, "{k:<30} {v}")?;
    }
    Ok(())
}

fn run_sweep_command(
    spec_path: &Path,
    mode: Output,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let spec = SweepSpec::load(spec_path)?;
    let format = match mode {
        Output::Csv => Format::Csv,
        Output::Json => Format::Json,
        Output::Table => spec.format.unwrap_or(Format::Json),
    };
    let (instances, excluded) = spec.expand();
    for ex in &excluded {
        writeln!(
            err,
            "excluded ({}, {}, {}): {}",
            ex.p, ex.s, ex.m, ex.reason
        )?;
    }
    let results = crate::sweep::run_sweep(&spec, &instances)?;

    let mut worst = 0;
    let mut emit = |w: &mut dyn Write, destination_empty: bool| -> Result<()> {
        let mut writer = ReportWriter::new(w, format, destination_empty);
        writer.start()?;
        for (params, res) in instances.iter().zip(&results) {
            match res {
                Ok(record) => writer.write(record)?,
                Err(e) => {
                    writeln!(
                        err,
                        "instance ({}, {}, {}) failed: {e}",
                        params.p(),
                        params.s,
                        params.m
                    )?;
                    worst = worst.max(e.exit_code());
                }
            }
        }
        writer.finish()?;
        Ok(())
    };
    match &spec.output_path {
        Some(path) => {
            let mut file = OpenOptions::new().create(true).append(true).open(path)?;
            let empty = file.metadata()?.len() == 0;
            emit(&mut file, empty)?;
        }
        None => emit(out, true)?,
    }
    Ok(worst)
}
