//! The `pirarray` command line.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;

use pirarray::arith::{rational, to_decimal_string, to_fraction_string, ExactRational};
use pirarray::bounds::{min_servers_bound, reference_rates, table1, ServerBoundSource};
use pirarray::constructions::{build, family_counts, ConstructionParams, XiVector, DEFAULT_GENERATION_CAP};
use pirarray::simulate::{availability_sweep, retrieve, retrieve_all, Fleet, FleetConfig};
use pirarray::verify::{k_pir_exhaustive, k_pir_pairs, verify_plan, VerifyReport, DEFAULT_EXHAUSTIVE_CAP};
use pirarray::{ArrayCode, RecoveryPlan};

use crate::formats::{parse_code, parse_plan, table_csv, table_text, transcript_jsonl, write_code, write_plan};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARAM: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "pirarray", version, about = "PIR array codes over GF(2)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a code and write it as PIRCODE.
    Construct(ConstructArgs),
    /// Compute k for a PIRCODE file.
    Verify(VerifyArgs),
    /// Symbolic server counts and rate of a construction.
    Rate(RateArgs),
    /// Every bound and rate formula at (s, t).
    Bounds(BoundsArgs),
    /// The table of best known rates.
    Table(TableArgs),
    /// Replay recovery sessions on a simulated fleet.
    Simulate(SimulateArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyArg {
    C1,
    C2,
    C3,
    IntegerS,
    GeneralS,
}

#[derive(Args, Debug, Clone)]
pub struct FamilyOpts {
    /// Defaults to the family matching --s.
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    #[arg(long)]
    pub t: u64,
    /// c1 only: s = 1 + d/t.
    #[arg(long)]
    pub d: Option<u64>,
    /// Storage overhead as an integer or "num/den".
    #[arg(long, value_parser = parse_s)]
    pub s: Option<Ratio<u64>>,
    /// Comma-separated multiplicities for the integer-s and general-s families.
    #[arg(long, value_delimiter = ',')]
    pub xi: Option<Vec<u64>>,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub family: FamilyOpts,
    /// Refuse codes with more columns than this.
    #[arg(long, default_value_t = DEFAULT_GENERATION_CAP)]
    pub cap: u64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Pairs,
    Exhaustive,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "pairs")]
    pub mode: ModeArg,
    /// Exhaustive mode column cap.
    #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_CAP)]
    pub cap: usize,
    /// Exit 3 unless the achieved k equals this.
    #[arg(long)]
    pub expect_k: Option<usize>,
    /// Check this PIRPLAN instead of searching for one.
    #[arg(long)]
    pub plan_in: Option<PathBuf>,
    /// Write the found plan as PIRPLAN.
    #[arg(long)]
    pub plan_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RateArgs {
    #[command(flatten)]
    pub family: FamilyOpts,
    #[arg(long, default_value_t = 5)]
    pub precision: u32,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[arg(long, value_parser = parse_s)]
    pub s: Ratio<u64>,
    #[arg(long)]
    pub t: u64,
    /// Also print the least number of servers for this k.
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long, default_value_t = 5)]
    pub precision: u32,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Text,
    Csv,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    #[arg(long, default_value_t = 6)]
    pub max_s: u64,
    #[arg(long, default_value_t = 13)]
    pub max_t: u64,
    #[arg(long, value_enum, default_value = "text")]
    pub format: TableFormat,
    #[arg(long, default_value_t = 5)]
    pub precision: u32,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Plan to replay; the pair-mode plan when omitted.
    #[arg(long)]
    pub plan_in: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// 1-based part; every part when omitted.
    #[arg(long)]
    pub part: Option<usize>,
    /// Comma-separated 1-based servers that never answer.
    #[arg(long, value_delimiter = ',')]
    pub fail: Vec<usize>,
    #[arg(long, default_value_t = 0.0)]
    pub drop: f64,
    #[arg(long, default_value_t = 10)]
    pub latency: u64,
    #[arg(long, default_value_t = 5)]
    pub jitter: u64,
    #[arg(long, default_value_t = 64)]
    pub chunk_bits: usize,
    /// Run an availability sweep with this many trials instead of sessions.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Servers failed per sweep trial.
    #[arg(long, default_value_t = 1)]
    pub failures: usize,
    /// Transcript path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Accepts `7`, `5/2`; rejects decimals.
pub fn parse_s(text: &str) -> Result<Ratio<u64>, String> {
    let text = text.trim();
    if text.contains('.') {
        return Err(format!("'{text}' is a decimal; give s as an integer or num/den"));
    }
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: u64 = num.parse().map_err(|_| format!("bad numerator in '{text}'"))?;
    let den: u64 = den.parse().map_err(|_| format!("bad denominator in '{text}'"))?;
    if den == 0 {
        return Err("denominator is zero".into());
    }
    Ok(Ratio::new(num, den))
}

enum Failure {
    Param(anyhow::Error),
    Mismatch(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Param(e)
    }
}

impl From<pirarray::Error> for Failure {
    fn from(e: pirarray::Error) -> Self {
        Failure::Param(e.into())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Param(e.into())
    }
}

type Outcome = Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARAM } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Construct(a) => construct(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Rate(a) => rate(a, out),
        Command::Bounds(a) => bounds(a, out),
        Command::Table(a) => table(a, out),
        Command::Simulate(a) => simulate(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Param(e)) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_PARAM
        }
        Err(Failure::Mismatch(msg)) => {
            let _ = writeln!(err, "mismatch: {msg}");
            EXIT_MISMATCH
        }
    }
}

fn params(opts: &FamilyOpts) -> anyhow::Result<ConstructionParams> {
    let t = opts.t;
    let need_s = |name: &str| opts.s.ok_or_else(|| anyhow!("--family {name} needs --s"));
    let p = match opts.family {
        None => {
            let s = opts.s.ok_or_else(|| anyhow!("give --family or --s"))?;
            ConstructionParams::for_rate(s, t)
        }
        Some(FamilyArg::C1) => match (opts.d, opts.s) {
            (Some(d), _) => ConstructionParams::c1(t, d),
            (None, Some(s)) => {
                let p = s * Ratio::from_integer(t);
                if !p.is_integer() || p.to_integer() < t {
                    bail!("s={s} with t={t} gives no integer d");
                }
                ConstructionParams::c1(t, p.to_integer() - t)
            }
            (None, None) => bail!("--family c1 needs --d or --s"),
        },
        Some(FamilyArg::C2) => ConstructionParams::c2(t),
        Some(FamilyArg::C3) => ConstructionParams::c3(t),
        Some(FamilyArg::IntegerS) => {
            let s = need_s("integer-s")?;
            if !s.is_integer() {
                bail!("--family integer-s needs an integer s, got {s}");
            }
            ConstructionParams::integer_s(s.to_integer(), t)
        }
        Some(FamilyArg::GeneralS) => ConstructionParams::general_s(need_s("general-s")?, t),
    }?;
    if let (Some(s), Some(_)) = (opts.s, opts.family) {
        if s != p.s() {
            bail!("--s {s} disagrees with the family's s = {}", p.s());
        }
    }
    Ok(p)
}

fn xi_of(opts: &FamilyOpts) -> Option<XiVector> {
    opts.xi.as_deref().map(XiVector::from_u64s)
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_to(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_code(path: &Path) -> anyhow::Result<ArrayCode> {
    parse_code(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_plan(path: &Path, code: &ArrayCode) -> anyhow::Result<RecoveryPlan> {
    parse_plan(&read(path)?, code.p()).with_context(|| format!("parsing {}", path.display()))
}

fn frac_and_decimal(r: &ExactRational, precision: u32) -> String {
    format!("{} ({})", to_fraction_string(r), to_decimal_string(r, precision))
}

fn construct(a: ConstructArgs, out: &mut dyn Write) -> Outcome {
    let params = params(&a.family)?;
    let xi = xi_of(&a.family);
    let code = build(&params, xi.as_ref(), a.cap)?;
    let text = write_code(&code);
    match &a.out {
        Some(path) => {
            write_to(path, &text)?;
            writeln!(
                out,
                "wrote {} family={} p={} t={} m={}",
                path.display(),
                params.family(),
                code.p(),
                code.t(),
                code.m()
            )?;
        }
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn report_lines(report: &VerifyReport, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(
        out,
        "k={} m={} rate={}",
        report.k,
        report.m,
        to_fraction_string(&report.rate())
    )?;
    writeln!(out, "mode={} exactness={}", report.mode, report.exactness)?;
    let per: Vec<String> = report.per_part.iter().map(usize::to_string).collect();
    writeln!(out, "per_part={}", per.join(","))?;
    writeln!(out, "singleton_bound={}", to_fraction_string(&report.singleton_bound))
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Outcome {
    let code = load_code(&a.input)?;
    let k = if let Some(path) = &a.plan_in {
        let plan = load_plan(path, &code)?;
        if let Err(v) = verify_plan(&code, &plan) {
            writeln!(out, "plan invalid: {v}")?;
            return Err(Failure::Mismatch(format!("plan {} is invalid", path.display())));
        }
        writeln!(
            out,
            "k={} m={} rate={}",
            plan.k(),
            code.m(),
            to_fraction_string(&rational(plan.k() as u64, code.m() as u64))
        )?;
        writeln!(out, "plan valid")?;
        plan.k()
    } else {
        let report = match a.mode {
            ModeArg::Pairs => k_pir_pairs(&code),
            ModeArg::Exhaustive => k_pir_exhaustive(&code, a.cap)?,
        };
        report_lines(&report, out)?;
        if let Some(path) = &a.plan_out {
            write_to(path, &write_plan(&report.plan))?;
        }
        report.k
    };
    match a.expect_k {
        Some(e) if e != k => Err(Failure::Mismatch(format!("expected k={e}, achieved k={k}"))),
        _ => Ok(()),
    }
}

fn rate(a: RateArgs, out: &mut dyn Write) -> Outcome {
    let params = params(&a.family)?;
    let xi = xi_of(&a.family);
    let counts = family_counts(&params, xi.as_ref())?;
    writeln!(
        out,
        "family={} s={} t={} p={}",
        params.family(),
        params.s(),
        params.t(),
        params.p()
    )?;
    let per: Vec<String> = counts.per_type.iter().map(ToString::to_string).collect();
    writeln!(out, "m={} per_type={}", counts.m, per.join(","))?;
    writeln!(
        out,
        "k={} singleton_servers={} pairs={}",
        counts.k(),
        counts.singleton_servers,
        counts.pairs
    )?;
    writeln!(out, "rate={}", frac_and_decimal(&counts.rate(), a.precision))?;
    Ok(())
}

fn bounds(a: BoundsArgs, out: &mut dyn Write) -> Outcome {
    let sheet = reference_rates(a.s, a.t)?;
    writeln!(out, "s={} t={}", sheet.s, sheet.t)?;
    for (name, value) in sheet.upper_bounds() {
        writeln!(out, "upper {name} = {}", frac_and_decimal(value, a.precision))?;
    }
    if let Some(((dl, tau, ell), value)) = &sheet.corollary {
        writeln!(
            out,
            "printed corollary_bound(delta={dl},tau={tau},l={ell}) = {}",
            frac_and_decimal(value, a.precision)
        )?;
    }
    for (name, value) in sheet.lower_bounds() {
        writeln!(out, "lower {name} = {}", frac_and_decimal(value, a.precision))?;
    }
    if let Some(k) = a.k {
        let (m, source) = min_servers_bound(a.s, a.t, k)?;
        let source = match source {
            ServerBoundSource::SingleCell => "t1_rate",
            ServerBoundSource::SmallS => "upper_g_st",
            ServerBoundSource::Asymptotic => "upper_g_s",
        };
        writeln!(out, "min_servers(k={k}) >= {m} via {source}")?;
    }
    Ok(())
}

fn table(a: TableArgs, out: &mut dyn Write) -> Outcome {
    if a.max_s < 2 || a.max_t < 1 {
        return Err(Failure::Param(anyhow!("need --max-s >= 2 and --max-t >= 1")));
    }
    let entries = table1(a.max_s, a.max_t)?;
    let text = match a.format {
        TableFormat::Text => table_text(&entries, a.precision),
        TableFormat::Csv => table_csv(&entries, a.precision),
    };
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn simulate(a: SimulateArgs, out: &mut dyn Write) -> Outcome {
    let code = load_code(&a.input)?;
    let plan = match &a.plan_in {
        Some(path) => load_plan(path, &code)?,
        None => k_pir_pairs(&code).plan,
    };
    if let Some(&j) = a.fail.iter().find(|&&j| j == 0 || j > code.m()) {
        return Err(Failure::Param(anyhow!("--fail {j} outside 1..={}", code.m())));
    }
    let config = FleetConfig {
        seed: a.seed,
        chunk_bits: a.chunk_bits,
        default_latency: a.latency,
        jitter: a.jitter,
        default_drop_probability: a.drop,
        failed: a.fail.iter().map(|j| j - 1).collect::<BTreeSet<_>>(),
        ..FleetConfig::default()
    };
    let fleet = Fleet::new(code, config)?;
    if let Some(trials) = a.trials {
        let summary = availability_sweep(&fleet, &plan, trials, a.failures)?;
        writeln!(
            out,
            "trials={} failures={} min_surviving={} guarantee={}",
            summary.trials,
            summary.failures_per_trial,
            summary.min_surviving(),
            if summary.guarantee_holds() { "held" } else { "broken" }
        )?;
        for (i, p) in summary.per_part.iter().enumerate() {
            writeln!(
                out,
                "part {}: planned={} min={} mean={:.3} failed_trials={} disagreements={}",
                i + 1,
                p.planned,
                p.min_surviving,
                p.mean_surviving,
                p.failed_trials,
                p.disagreements
            )?;
        }
        return Ok(());
    }
    let sessions = match a.part {
        Some(i) if i == 0 || i > fleet.code().p() => {
            return Err(Failure::Param(anyhow!("--part {i} outside 1..={}", fleet.code().p())))
        }
        Some(i) => vec![retrieve(&fleet, &plan, i - 1)?],
        None => retrieve_all(&fleet, &plan)?,
    };
    let text = transcript_jsonl(&sessions);
    match &a.out {
        Some(path) => {
            write_to(path, &text)?;
            let recovered = sessions.iter().filter(|s| s.agreement).count();
            writeln!(out, "sessions={} agreed={}", sessions.len(), recovered)?;
        }
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}
