use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use fanobound_core::bounds::{
    audit, solve_concrete, solve_oracle, solve_worst_case, verify, BundleOracle, Certificate,
    Selection, SolveOptions, Verdict, EXAMPLE_PRINTED_R,
};
use fanobound_core::bundle::{anticanonical_volume, h0_anti, RankConvention, SplitBundle};
use fanobound_core::exact::Rat;
use fanobound_core::hrr::{fit_ab, p_table, ChernData, PValue};
use serde_json::{json, Value};

const MCERT_VAR: &str = "FANOBOUND_MCERT";

/// Certified birationality bounds for anti-pluricanonical maps of 5-folds.
#[derive(Parser)]
#[command(name = "fanobound", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify a bound and optionally write the certificate.
    Solve(SolveArgs),
    /// Print P(m) for m = 0..=max-m.
    Table(TableArgs),
    /// Compute h0(-mK) on the projectivization of a split bundle over P^1.
    Oracle(OracleArgs),
    /// Compare every printed claim with the engine.
    Audit(AuditArgs),
    /// Check a certificate file.
    Verify(VerifyArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["worst_case", "k5", "bundle"])))]
struct SolveArgs {
    /// Worst case over all admissible Chern data.
    #[arg(long)]
    worst_case: bool,
    #[arg(long, requires = "k3c2", allow_hyphen_values = true)]
    k5: Option<i64>,
    #[arg(long, requires = "k5", allow_hyphen_values = true)]
    k3c2: Option<i64>,
    /// Five twists, e.g. 0,0,0,0,1.
    #[arg(long, allow_hyphen_values = true)]
    bundle: Option<SplitBundle>,
    #[arg(long, value_enum, conflicts_with_all = ["worst_case", "k5"])]
    convention: Option<Convention>,
    /// How r1, r2, r3 are chosen for a bundle; defaults to `printed` under
    /// `--convention paper` and `minimal` otherwise.
    #[arg(long, value_enum, conflicts_with_all = ["worst_case", "k5"])]
    select: Option<Select>,
    /// Keep every vanishing axiom in the worst-case dimension steps.
    #[arg(long, conflicts_with_all = ["k5", "bundle"])]
    full_basis: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, allow_hyphen_values = true)]
    k5: i64,
    #[arg(long, allow_hyphen_values = true)]
    k3c2: i64,
    #[arg(long, value_parser = clap::value_parser!(u32))]
    max_m: u32,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, allow_hyphen_values = true)]
    bundle: SplitBundle,
    #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
    m: i64,
    #[arg(long, value_enum, default_value_t = Convention::Standard)]
    convention: Convention,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    path: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    Standard,
    Paper,
}

impl From<Convention> for RankConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Standard => RankConvention::Standard,
            Convention::Paper => RankConvention::Paper,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Select {
    Minimal,
    Printed,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Exit 2 for bad input, exit 1 when a computation or check fails.
enum Failure {
    Usage(String),
    Failed(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Failed(e)
    }
}

type Outcome = Result<(), Failure>;

fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure::Usage(msg.to_string())
}

fn options() -> Result<SolveOptions, Failure> {
    let mut opts = SolveOptions::default();
    if let Ok(raw) = std::env::var(MCERT_VAR) {
        let m_cert: i64 = raw
            .trim()
            .parse()
            .map_err(|_| usage(format!("{MCERT_VAR}={raw:?} is not an integer")))?;
        if m_cert < opts.r0 {
            return Err(usage(format!(
                "{MCERT_VAR}={m_cert} must be at least {}",
                opts.r0
            )));
        }
        opts.m_cert = m_cert;
    }
    Ok(opts)
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn solve(args: SolveArgs) -> Outcome {
    let opts = options()?;
    let cert = if args.worst_case {
        solve_worst_case(&SolveOptions {
            full_basis: args.full_basis,
            ..opts
        })
    } else if let (Some(k5), Some(k3c2)) = (args.k5, args.k3c2) {
        let chern = ChernData::new(k5, k3c2).map_err(usage)?;
        p_table(&chern, 8).map_err(usage)?;
        solve_concrete(&chern, Selection::Minimal, &opts)
    } else {
        let bundle = args.bundle.expect("clap requires a source");
        let convention = args.convention.unwrap_or(Convention::Standard);
        let select = args.select.unwrap_or(match convention {
            Convention::Paper => Select::Printed,
            Convention::Standard => Select::Minimal,
        });
        let selection = match select {
            Select::Minimal => Selection::Minimal,
            Select::Printed => Selection::Fixed(EXAMPLE_PRINTED_R),
        };
        let oracle = BundleOracle {
            bundle,
            convention: convention.into(),
        };
        // probe the oracle so that unsupported bundles are reported as bad input
        h0_anti(&bundle, 1, oracle.convention).map_err(usage)?;
        solve_oracle(&oracle, selection, &opts)
    }
    .context("certification failed")?;

    let verdict = verify(&cert);
    if !verdict.is_valid() {
        return Err(anyhow::anyhow!("the produced certificate does not verify: {verdict}").into());
    }
    if let Some(path) = &args.out {
        write_file(path, &cert.to_json())?;
    }
    eprintln!("r0 = {}, r = {:?}", cert.r0, cert.r);
    println!("{}", cert.bound);
    Ok(())
}

/// The split example's volume with a `(−K)³·c₂` other than the one the
/// standard-rank values fit is a sign of mixing conventions.
fn table_warning(chern: &ChernData) -> Option<String> {
    let example = SplitBundle::example();
    if anticanonical_volume(&example) != chern.k5.into() {
        return None;
    }
    let value = |m| {
        h0_anti(&example, m, RankConvention::Standard)
            .ok()
            .map(|h| PValue { m, value: h.value })
    };
    let (_, b) = fit_ab(&value(1)?, &value(2)?).ok()?;
    let fitted = b * Rat::int(144);
    (fitted != Rat::int(chern.k3c2)).then(|| {
        format!(
            "warning: (-K)^5 = {} matches the split example, whose standard-rank values fit \
             (-K)^3.c2 = {fitted}; from m = 2 on this table will not match that oracle",
            chern.k5
        )
    })
}

fn table(args: TableArgs) -> Outcome {
    let chern = ChernData::new(args.k5, args.k3c2).map_err(usage)?;
    let rows = p_table(&chern, args.max_m).map_err(usage)?;
    if let Some(w) = table_warning(&chern) {
        eprintln!("{w}");
    }
    let mut out = String::new();
    match args.format {
        Format::Csv => {
            out.push_str("m,P(m)\n");
            for r in &rows {
                writeln!(out, "{},{}", r.m, r.value).expect("writing to a String");
            }
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| json!({"m": r.m, "P(m)": r.value.to_string()}))
                .collect();
            out = serde_json::to_string_pretty(&rows).expect("serializable") + "\n";
        }
    }
    print!("{out}");
    Ok(())
}

fn oracle(args: OracleArgs) -> Outcome {
    let h = h0_anti(&args.bundle, args.m, args.convention.into()).map_err(usage)?;
    if !h.h1_vanishes {
        eprintln!("warning: h1 does not vanish for some summand; the value is h0 only");
    }
    println!("{}", h.value);
    Ok(())
}

fn run_audit(args: AuditArgs) -> Outcome {
    let opts = options()?;
    let report = audit(&opts).context("audit failed")?;
    if let Some(path) = &args.out {
        // through Value so that keys come out sorted, as in certificates
        let value = serde_json::to_value(&report).expect("serializable");
        let json = serde_json::to_string_pretty(&value).expect("serializable") + "\n";
        write_file(path, &json)?;
    }
    print!("{}", report.summary());
    Ok(())
}

fn run_verify(args: VerifyArgs) -> Outcome {
    let text = fs::read_to_string(&args.path)
        .map_err(|e| usage(format!("cannot read {}: {e}", args.path.display())))?;
    let cert = Certificate::from_json(&text)
        .map_err(|e| usage(format!("{} is not a certificate: {e}", args.path.display())))?;
    match verify(&cert) {
        Verdict::Valid => {
            println!("valid: birational for m >= {}", cert.bound);
            Ok(())
        }
        invalid => {
            println!("{invalid}");
            Err(Failure::Failed(anyhow::anyhow!("certificate rejected")))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Table(a) => table(a),
        Command::Oracle(a) => oracle(a),
        Command::Audit(a) => run_audit(a),
        Command::Verify(a) => run_verify(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Failed(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
