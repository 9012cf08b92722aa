use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand, ValueEnum};
use tiedleague_core::brute::{self, BruteOptions, BRUTE_MAX_TEAMS};
use tiedleague_core::engine::{self, EngineOptions, ENGINE_MAX_TEAMS};
use tiedleague_core::eulerian::{
    eulerian_count, eulerian_count_bruteforce, BRUTE_EULERIAN_MAX, EULERIAN_TABLE,
};
use tiedleague_core::report::{JsonReport, TiedCountReport};
use tiedleague_core::{make_team_points, Error, LeagueSize, ProfileClass};

/// Exit status for invalid arguments and configuration problems.
pub const EXIT_INVALID: u8 = 2;
/// Exit status for sizes refused on cost or support grounds.
pub const EXIT_REFUSED: u8 = 3;
pub const EXIT_FAILURE: u8 = 1;

/// Largest league counted without `--long`; eight teams takes hours.
const DESK_MAX_TEAMS: usize = 7;

#[derive(Debug, Parser)]
#[command(
    name = "tiedleague",
    version,
    about = "Count league outcomes in which all teams finish level on points"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count tied outcomes for one league size.
    Count(CountArgs),
    /// Compare the brute-force and optimized counts for 2..=max teams.
    Verify(VerifyArgs),
    /// List the canonical team-1 profiles with their class and factors.
    Profiles(ProfilesArgs),
    /// Print the Eulerian digraph table, brute-force checked where feasible.
    Eulerian(EulerianArgs),
    /// Continue an interrupted run from its checkpoint ledger.
    Resume(ResumeArgs),
    /// Time repeated optimized counts.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Brute,
    Optimized,
    Both,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Optimized => "optimized",
            Method::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Worker threads (defaults to the available parallelism).
    #[arg(long, env = "TIEDLEAGUE_WORKERS")]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Plain row-by-row search without mid-row pruning.
    #[arg(long)]
    strict: bool,
}

impl RunArgs {
    fn workers(&self) -> Result<usize, Failure> {
        match self.workers {
            Some(0) => Err(Failure::invalid(anyhow!("--workers must be at least 1"))),
            Some(w) => Ok(w),
            None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        }
    }
}

#[derive(Debug, Args)]
struct CountArgs {
    #[arg(long, short = 'n')]
    teams: usize,
    #[arg(long, value_enum, default_value_t = Method::Optimized)]
    method: Method,
    /// Append-only ledger of finished profiles; an existing one is resumed.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Allow brute force above five teams.
    #[arg(long)]
    allow_large: bool,
    /// Allow runs that take hours (eight teams).
    #[arg(long)]
    long: bool,
    /// Stop after this many search profiles are recorded (for staged runs).
    #[arg(long)]
    stop_after: Option<usize>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 4)]
    max_teams: usize,
    /// Include the five-team brute-force sweep.
    #[arg(long)]
    long: bool,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Args)]
struct ProfilesArgs {
    #[arg(long, short = 'n')]
    teams: usize,
    /// Only list profiles of this class (e.g. SEARCH).
    #[arg(long)]
    class: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct EulerianArgs {
    #[arg(long, default_value_t = 9)]
    max: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct ResumeArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, short = 'n', default_value_t = 6)]
    teams: usize,
    #[arg(long, default_value_t = 3)]
    repeat: usize,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    fn invalid(error: anyhow::Error) -> Self {
        Failure {
            code: EXIT_INVALID,
            error,
        }
    }

    fn refused(error: anyhow::Error) -> Self {
        Failure {
            code: EXIT_REFUSED,
            error,
        }
    }

    fn failed(error: anyhow::Error) -> Self {
        Failure {
            code: EXIT_FAILURE,
            error,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::SizeRefused { .. } | Error::UnsupportedSize { .. } => EXIT_REFUSED,
            Error::InvalidArgument(_)
            | Error::StaleCheckpoint { .. }
            | Error::Checkpoint { .. }
            | Error::Io { .. } => EXIT_INVALID,
            _ => EXIT_FAILURE,
        };
        Failure {
            code,
            error: e.into(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::failed(e.into())
    }
}

type CmdResult = Result<(), Failure>;

pub fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Count(args) => count(args),
        Command::Verify(args) => verify(args),
        Command::Profiles(args) => profiles(args),
        Command::Eulerian(args) => eulerian(args),
        Command::Resume(args) => resume(args),
        Command::Bench(args) => bench(args),
    }
}

fn league(teams: usize) -> Result<LeagueSize, Failure> {
    LeagueSize::new(teams).map_err(|e| match e {
        Error::UnsupportedSize { .. } => Failure::refused(e.into()),
        _ => Failure::invalid(e.into()),
    })
}

fn engine_options(
    run: &RunArgs,
    checkpoint: Option<PathBuf>,
    stop_after: Option<usize>,
) -> Result<EngineOptions, Failure> {
    Ok(EngineOptions {
        workers: run.workers()?,
        checkpoint,
        strict: run.strict,
        stop_after,
        ..EngineOptions::default()
    })
}

fn check_optimized_size(teams: usize, long: bool) -> CmdResult {
    if teams > ENGINE_MAX_TEAMS {
        return Err(Failure::refused(anyhow!(
            "unsupported size: {teams} teams; the optimized count supports at most {ENGINE_MAX_TEAMS} teams"
        )));
    }
    if teams > DESK_MAX_TEAMS && !long {
        return Err(Failure::refused(anyhow!(
            "{teams} teams takes many hours; pass --long to run it anyway"
        )));
    }
    Ok(())
}

fn count(args: CountArgs) -> CmdResult {
    let size = league(args.teams)?;
    let workers = args.run.workers()?;
    if args.method != Method::Brute {
        check_optimized_size(args.teams, args.long)?;
    }
    if args.method != Method::Optimized && args.teams > BRUTE_MAX_TEAMS && !args.allow_large {
        return Err(Failure::refused(anyhow!(
            "brute force is limited to {BRUTE_MAX_TEAMS} teams; pass --allow-large to override"
        )));
    }

    let optimized = match args.method {
        Method::Brute => None,
        _ => Some(interruptible(engine::count_tied(
            size,
            &engine_options(&args.run, args.checkpoint.clone(), args.stop_after)?,
        ))?),
    };
    let brute = match args.method {
        Method::Optimized => None,
        _ => {
            let started = Instant::now();
            let opts = BruteOptions {
                allow_large: args.allow_large,
                workers,
                ..BruteOptions::default()
            };
            Some((
                brute::count_tied_bruteforce(size, &opts)?,
                started.elapsed(),
            ))
        }
    };

    if let (Some(report), Some((brute_total, _))) = (&optimized, &brute) {
        if report.total != *brute_total {
            return Err(Failure::failed(anyhow!(
                "mismatch for {} teams: optimized {} != brute force {brute_total}",
                args.teams,
                report.total
            )));
        }
    }

    let method = args.method.name();
    let mut out = std::io::stdout().lock();
    match args.run.format {
        Format::Json => {
            let json = match (&optimized, &brute) {
                (Some(report), _) => report.to_json(method),
                (None, Some((total, elapsed))) => JsonReport {
                    n: args.teams,
                    total: *total,
                    breakdown: None,
                    searched_profiles: None,
                    resumed_profiles: None,
                    elapsed_ms: elapsed.as_millis() as u64,
                    workers,
                    method: method.to_string(),
                },
                (None, None) => unreachable!("at least one method runs"),
            };
            writeln!(
                out,
                "{}",
                serde_json::to_string(&json).map_err(|e| Failure::failed(e.into()))?
            )?;
        }
        Format::Text => {
            writeln!(out, "teams: {}", args.teams)?;
            if let Some((total, elapsed)) = &brute {
                writeln!(out, "brute-force total: {total} ({})", seconds(*elapsed))?;
            }
            if let Some(report) = &optimized {
                write_report(&mut out, report)?;
            }
            if optimized.is_some() && brute.is_some() {
                writeln!(out, "brute force and optimized totals agree")?;
            }
        }
    }
    Ok(())
}

fn interruptible(
    result: tiedleague_core::Result<TiedCountReport>,
) -> Result<TiedCountReport, Failure> {
    result.map_err(|e| match e {
        Error::Interrupted { .. } => Failure::failed(anyhow!(
            "{e}; continue with `tiedleague resume --checkpoint <path>`"
        )),
        other => other.into(),
    })
}

fn seconds(d: Duration) -> String {
    format!("{:.3} s", d.as_secs_f64())
}

fn write_report(out: &mut impl Write, report: &TiedCountReport) -> std::io::Result<()> {
    writeln!(out, "total: {}", report.total)?;
    for (class, stats) in &report.breakdown {
        writeln!(
            out,
            "  {:<17} {:>4} profiles  contribution {}",
            class.name(),
            stats.profiles,
            stats.contribution
        )?;
    }
    writeln!(out, "searched profiles: {}", report.searched_profiles)?;
    if let Some(resumed) = &report.resumed_from {
        writeln!(
            out,
            "resumed {} profiles from {}{}",
            resumed.profiles,
            resumed.path.display(),
            if resumed.truncated {
                " (torn record dropped)"
            } else {
                ""
            }
        )?;
    }
    writeln!(out, "workers: {}", report.workers)?;
    writeln!(out, "elapsed: {}", seconds(report.elapsed))
}

fn verify(args: VerifyArgs) -> CmdResult {
    if args.max_teams < 2 || args.max_teams > BRUTE_MAX_TEAMS {
        return Err(Failure::invalid(anyhow!(
            "--max-teams must be in 2..={BRUTE_MAX_TEAMS}; brute force does not go further"
        )));
    }
    if args.max_teams == BRUTE_MAX_TEAMS && !args.long {
        return Err(Failure::invalid(anyhow!(
            "the {BRUTE_MAX_TEAMS}-team brute-force sweep covers 3^20 outcomes; pass --long to include it"
        )));
    }
    let workers = args.run.workers()?;
    let engine_opts = engine_options(&args.run, None, None)?;
    let brute_opts = BruteOptions {
        workers,
        ..BruteOptions::default()
    };

    let mut rows = Vec::new();
    for teams in 2..=args.max_teams {
        let size = league(teams)?;
        let brute = brute::count_tied_bruteforce(size, &brute_opts)?;
        let optimized = engine::count_tied(size, &engine_opts)?.total;
        rows.push((teams, brute, optimized));
    }

    let mut out = std::io::stdout().lock();
    match args.run.format {
        Format::Json => {
            let items: Vec<_> = rows
                .iter()
                .map(|(n, b, o)| {
                    serde_json::json!({
                        "n": n, "brute": b.to_string(), "optimized": o.to_string(), "match": b == o
                    })
                })
                .collect();
            writeln!(out, "{}", serde_json::Value::Array(items))?;
        }
        Format::Text => {
            for (n, b, o) in &rows {
                let verdict = if b == o { "match" } else { "MISMATCH" };
                writeln!(out, "n={n}: brute {b}, optimized {o}: {verdict}")?;
            }
        }
    }
    let mismatches = rows.iter().filter(|(_, b, o)| b != o).count();
    if mismatches > 0 {
        return Err(Failure::failed(anyhow!("{mismatches} size(s) disagree")));
    }
    Ok(())
}

fn profiles(args: ProfilesArgs) -> CmdResult {
    let size = league(args.teams)?;
    let filter = args
        .class
        .as_deref()
        .map(str::parse::<ProfileClass>)
        .transpose()
        .map_err(|e| Failure::invalid(e.into()))?;
    let mut out = std::io::stdout().lock();
    for p in make_team_points(size) {
        let class = p.classify(size);
        if filter.is_some_and(|f| f != class) {
            continue;
        }
        match args.format {
            Format::Json => {
                let row = serde_json::json!({
                    "takes": p.takes(),
                    "class": class,
                    "p1": p.points(),
                    "pbar1": p.conceded(),
                    "representation": p.representation_factor(),
                    "doubling": p.doubling_factor(),
                });
                writeln!(out, "{row}")?;
            }
            Format::Text => writeln!(
                out,
                "{:<20} class={:<16} P1={:<3} Pbar1={:<3} representation={:<5} doubling={}",
                p.to_string(),
                class.name(),
                p.points(),
                p.conceded(),
                p.representation_factor(),
                p.doubling_factor()
            )?,
        }
    }
    Ok(())
}

fn eulerian(args: EulerianArgs) -> CmdResult {
    let last = EULERIAN_TABLE[EULERIAN_TABLE.len() - 1].0;
    if args.max < 2 || args.max > last {
        return Err(Failure::refused(anyhow!("--max must be in 2..={last}")));
    }
    let mut out = std::io::stdout().lock();
    let mut disagreements = 0;
    for n in 2..=args.max {
        let table = eulerian_count(n)?;
        let brute = if n <= BRUTE_EULERIAN_MAX {
            Some(eulerian_count_bruteforce(n)?)
        } else {
            None
        };
        if brute.is_some_and(|b| b != table) {
            disagreements += 1;
        }
        match args.format {
            Format::Json => {
                let row = serde_json::json!({
                    "n": n,
                    "table": table.to_string(),
                    "brute": brute.map(|b| b.to_string()),
                    "agree": brute.map(|b| b == table),
                });
                writeln!(out, "{row}")?;
            }
            Format::Text => match brute {
                Some(b) if b == table => writeln!(out, "n={n}: {table} (brute force {b}: agree)")?,
                Some(b) => writeln!(out, "n={n}: {table} (brute force {b}: DISAGREE)")?,
                None => writeln!(out, "n={n}: {table}")?,
            },
        }
    }
    if disagreements > 0 {
        return Err(Failure::failed(anyhow!("table and brute force disagree")));
    }
    Ok(())
}

fn resume(args: ResumeArgs) -> CmdResult {
    let opts = engine_options(&args.run, None, None)?;
    let report = interruptible(engine::resume(&args.checkpoint, &opts))?;
    let mut out = std::io::stdout().lock();
    match args.run.format {
        Format::Json => writeln!(
            out,
            "{}",
            serde_json::to_string(&report.to_json("optimized"))
                .map_err(|e| Failure::failed(e.into()))?
        )?,
        Format::Text => {
            writeln!(out, "teams: {}", report.teams)?;
            write_report(&mut out, &report)?;
        }
    }
    Ok(())
}

fn bench(args: BenchArgs) -> CmdResult {
    let size = league(args.teams)?;
    check_optimized_size(args.teams, false)?;
    if args.repeat == 0 {
        return Err(Failure::invalid(anyhow!("--repeat must be at least 1")));
    }
    let opts = engine_options(&args.run, None, None)?;
    let mut times = Vec::with_capacity(args.repeat);
    let mut total = None;
    for _ in 0..args.repeat {
        let report = engine::count_tied(size, &opts)?;
        if total.is_some_and(|t| t != report.total) {
            return Err(Failure::failed(anyhow!(
                "total changed between repetitions"
            )));
        }
        total = Some(report.total);
        times.push(report.elapsed);
    }
    times.sort();
    let mut out = std::io::stdout().lock();
    writeln!(
        out,
        "teams={} workers={} strict={} total={} runs={} min={} median={} max={}",
        args.teams,
        opts.workers,
        opts.strict,
        total.unwrap_or_default(),
        times.len(),
        seconds(times[0]),
        seconds(times[times.len() / 2]),
        seconds(times[times.len() - 1])
    )?;
    Ok(())
}
