//! `spiegel`: batch verifier for 4-ranks of real quadratic fields and their
//! reflections.
//!
//! Exit codes: 0 on success, 1 on invalid input, 2 when an internal
//! consistency check or theorem check fails.

use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use spiegel_core::arith::factor_squarefree_odd;
use spiegel_core::charsum::identity_report;
use spiegel_core::formsoracle::{class_group, rk4_of};
use spiegel_core::rank4::{
    classify, csv_line, density_compare, json_line, rank_pair_with, scan_each, Method, RankReport,
    ScanOptions, CSV_HEADER,
};
use spiegel_core::Error;

#[derive(Parser, Debug)]
#[command(
    name = "spiegel",
    version,
    about = "4-ranks of narrow class groups of K = Q(sqrt d) and K# = Q(sqrt -d)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report rk4(K) and rk4(K#) for one discriminant d = D, 8D or 4D
    Rank4 {
        #[arg(allow_negative_numbers = true)]
        d: i64,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
        /// Recompute every E-term by all three methods
        #[arg(long)]
        cross_check: bool,
    },
    /// Report every discriminant in [min, max], ascending
    Scan {
        #[arg(long, allow_negative_numbers = true)]
        min: i64,
        #[arg(long, allow_negative_numbers = true)]
        max: i64,
        /// Worker threads (0 = all cores)
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        cross_check: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Check the character-sum identities for an odd squarefree D
    Identities {
        #[arg(allow_negative_numbers = true)]
        d: i64,
    },
    /// Compare the rank formulas with the form class groups of d and d#
    Oracle {
        #[arg(allow_negative_numbers = true)]
        d: i64,
    },
    /// Conditional frequencies of rk4(K#) given rk4(K) over d <= max
    Stats {
        #[arg(long, allow_negative_numbers = true)]
        max: i64,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Csv,
    Json,
}

enum Failure {
    Input(String),
    Consistency(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InternalInconsistency(_) | Error::AssertionFailed(_) => {
                Failure::Consistency(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(format!("write failed: {e}"))
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = match cli.command {
        Command::Rank4 {
            d,
            format,
            cross_check,
        } => cmd_rank4(&mut out, d, format, cross_check),
        Command::Scan {
            min,
            max,
            jobs,
            cross_check,
            format,
        } => cmd_scan(
            &mut out,
            min,
            max,
            ScanOptions { jobs, cross_check },
            format,
        ),
        Command::Identities { d } => cmd_identities(&mut out, d),
        Command::Oracle { d } => cmd_oracle(&mut out, d),
        Command::Stats { max, jobs } => cmd_stats(&mut out, max, jobs),
    };
    let flushed = out.flush();
    match result {
        Ok(()) if flushed.is_ok() => ExitCode::SUCCESS,
        Ok(()) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Consistency(msg)) => {
            eprintln!("consistency failure: {msg}");
            ExitCode::from(2)
        }
    }
}

fn write_report(out: &mut impl Write, report: &RankReport, format: Format) -> io::Result<()> {
    match format {
        Format::Csv => out.write_all(csv_line(&report.row()).as_bytes()),
        Format::Json => writeln!(out, "{}", json_line(&report.row())),
        Format::Human => {
            let criterion = report
                .criterion
                .map(|c| format!(" ({c})"))
                .unwrap_or_default();
            writeln!(
                out,
                "d={} {} D={} omega={} d#={} rk4(K)={} rk4(K#)={} {}{criterion}",
                report.case.d_k,
                report.case.tag,
                report.case.core,
                report.case.core.omega(),
                report.case.d_sharp,
                report.rk4_k,
                report.rk4_sharp,
                report.equality
            )
        }
    }
}

fn cmd_rank4(out: &mut impl Write, d: i64, format: Format, cross_check: bool) -> CmdResult {
    let case = classify(d)?;
    let method = if cross_check {
        Method::CrossCheck
    } else {
        Method::Affine
    };
    let report = rank_pair_with(&case, method)?;
    match format {
        Format::Human => {
            writeln!(
                out,
                "d = {} ({}), D = {}, omega = {}, d# = {}",
                d,
                case.tag,
                case.core,
                case.core.omega(),
                case.d_sharp
            )?;
            for t in &report.e_terms {
                writeln!(out, "  E_D({},{}) = {}", t.u, t.v, t.value)?;
            }
            write!(
                out,
                "rk4(K) = {}, rk4(K#) = {}: {}",
                report.rk4_k, report.rk4_sharp, report.equality
            )?;
            match report.criterion {
                Some(c) => writeln!(out, " (criterion {c})")?,
                None => writeln!(out, " (no single-term criterion for d = 0 mod 8)")?,
            }
        }
        Format::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            write_report(out, &report, format)?;
        }
        Format::Json => write_report(out, &report, format)?,
    }
    Ok(())
}

fn cmd_scan(
    out: &mut impl Write,
    min: i64,
    max: i64,
    options: ScanOptions,
    format: Format,
) -> CmdResult {
    if min < 1 || min > max {
        return Err(Failure::Input(format!(
            "invalid range: need 1 <= min <= max, got [{min}, {max}]"
        )));
    }
    if format == Format::Csv {
        writeln!(out, "{CSV_HEADER}")?;
    }
    let mut write_error = None;
    let aggregate = scan_each(min, max, options, |report| {
        if write_error.is_none() {
            if let Err(e) = write_report(out, report, format) {
                write_error = Some(e);
            }
        }
    })?;
    if let Some(e) = write_error {
        return Err(e.into());
    }
    out.flush()?;
    eprintln!(
        "scanned {} discriminants in [{min}, {max}]: rk4(K) <= rk4(K#) <= rk4(K)+1 holds for {}",
        aggregate.total, aggregate.reflection_ok
    );
    if aggregate.reflection_ok != aggregate.total {
        return Err(Failure::Consistency(
            "reflection inequality violated".into(),
        ));
    }
    Ok(())
}

fn cmd_identities(out: &mut impl Write, d: i64) -> CmdResult {
    let core = factor_squarefree_odd(d)?;
    let report = identity_report(&core);
    writeln!(out, "D = {} ({} mod 4), omega = {}", d, d % 4, core.omega())?;
    for o in &report.outcomes {
        let status = match (o.applicable, o.passed()) {
            (false, _) => "n/a ",
            (true, true) => "PASS",
            (true, false) => "FAIL",
        };
        write!(out, "{status}  {}", o.identity.formula())?;
        if o.applicable {
            write!(out, "  [{} cases]", o.cases)?;
        }
        writeln!(out)?;
        for f in &o.failures {
            writeln!(out, "      {f}")?;
        }
    }
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Consistency(format!(
            "identity failures for D = {d}"
        )))
    }
}

fn cmd_oracle(out: &mut impl Write, d: i64) -> CmdResult {
    let case = classify(d)?;
    let report = rank_pair_with(&case, Method::Affine)?;
    writeln!(
        out,
        "d = {} ({}), D = {}, d# = {}",
        d, case.tag, case.core, case.d_sharp
    )?;
    writeln!(
        out,
        "{:<6} {:>10} {:>8} {:>12} {:>10}",
        "field", "disc", "h+", "rk4 formula", "rk4 forms"
    )?;
    let mut agree = true;
    for (label, disc, formula) in [
        ("K", d, report.rk4_k),
        ("K#", case.d_sharp, report.rk4_sharp),
    ] {
        let group = class_group(disc)?;
        let forms = rk4_of(&group)?;
        agree &= forms == formula;
        writeln!(
            out,
            "{label:<6} {disc:>10} {:>8} {formula:>12} {forms:>10}",
            group.class_number()
        )?;
    }
    if agree {
        writeln!(out, "agreement")?;
        Ok(())
    } else {
        writeln!(out, "MISMATCH")?;
        Err(Failure::Consistency(format!(
            "formula and form class group ranks differ for d = {d}"
        )))
    }
}

fn cmd_stats(out: &mut impl Write, max: i64, jobs: usize) -> CmdResult {
    if max < 1 {
        return Err(Failure::Input(format!(
            "--max must be at least 1, got {max}"
        )));
    }
    let table = density_compare(
        max,
        ScanOptions {
            jobs,
            cross_check: false,
        },
    )?;
    writeln!(out, "X = {}, fields = {}", table.x, table.fields)?;
    writeln!(
        out,
        "{:>2} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "r", "n", "P(s=r)", "theory", "P(s=r+1)", "theory"
    )?;
    for row in &table.rows {
        match (row.same, row.plus_one) {
            (Some(same), Some(plus)) => writeln!(
                out,
                "{:>2} {:>10} {same:>10.4} {:>10.4} {plus:>10.4} {:>10.4}",
                row.r,
                row.conditioned,
                row.theory_same(),
                row.theory_plus_one()
            )?,
            _ => writeln!(
                out,
                "{:>2} {:>10} {:>10} {:>10.4} {:>10} {:>10.4}  insufficient-data",
                row.r,
                row.conditioned,
                "-",
                row.theory_same(),
                "-",
                row.theory_plus_one()
            )?,
        }
    }
    Ok(())
}
