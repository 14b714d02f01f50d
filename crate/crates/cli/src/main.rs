//! Command-line front end: ingest a byte stream, run the selected mode, and
//! print one JSON report on stdout.
//!
//! Exit codes: 0 success, 1 wildcard budget exceeded, 2 configuration or
//! input errors.

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use wcperiod::engine::onepass::check_promise;
use wcperiod::engine::report::PeriodReport;
use wcperiod::oracle::{gen_hard_instance, oracle_all_periods};
use wcperiod::stream::SymbolSource;
use wcperiod::symbols::{Symbol, WildcardString};
use wcperiod::{distance, Error, OnePassEngine, SpaceStats, SubroutineKind, TwoPassEngine};

const SEED_ENV: &str = "WCPERIOD_SEED";
const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Two-pass engine: every wildcard-period in [1, n-1].
    #[value(name = "periods-2pass")]
    Periods2pass,
    /// One-pass engine: wildcard-periods up to n/2 under the tail promise.
    #[value(name = "periods-1pass")]
    Periods1pass,
    /// Distance to p-periodicity (exact, plus estimates when requested).
    Distance,
    /// Brute-force ground truth period set.
    Oracle,
    /// Generate an adversarial fixture stream.
    Fixture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Subroutine {
    Reference,
    Sketch,
}

impl From<Subroutine> for SubroutineKind {
    fn from(s: Subroutine) -> Self {
        match s {
            Subroutine::Reference => SubroutineKind::Reference,
            Subroutine::Sketch => SubroutineKind::Sketch,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "wcperiod",
    about = "Streaming wildcard-period detection, distance estimation, and fixtures"
)]
struct Args {
    /// What to run.
    #[arg(long, value_enum)]
    mode: Mode,

    /// Input file path, or '-' for stdin. Ignored by fixture mode.
    #[arg(long, default_value = "-")]
    input: String,

    /// Declared wildcard budget (required by the period engines; fixture
    /// mode uses it as the instance parameter).
    #[arg(long, default_value_t = 0)]
    k: usize,

    /// Period parameter for distance mode.
    #[arg(long)]
    p: Option<usize>,

    /// Accuracy parameter for distance estimates.
    #[arg(long)]
    epsilon: Option<f64>,

    /// Failure probability for the randomized distance estimate.
    #[arg(long)]
    delta: Option<f64>,

    /// Byte that marks a wildcard.
    #[arg(long, default_value_t = '?')]
    wildcard_marker: char,

    /// Seed for all randomness; WCPERIOD_SEED overrides the default.
    #[arg(long)]
    seed: Option<u64>,

    /// Candidate-finder implementation for the period engines.
    #[arg(long, value_enum, default_value_t = Subroutine::Reference)]
    subroutine: Subroutine,

    /// Include space instrumentation in the report (always emitted; this
    /// flag is accepted for compatibility).
    #[arg(long, default_value_t = true)]
    stats: bool,

    /// Keep a trailing newline as a stream symbol instead of stripping it.
    #[arg(long, default_value_t = false)]
    keep_trailing_newline: bool,

    /// Fixture mode: stream length (multiple of 4).
    #[arg(long)]
    n: Option<usize>,

    /// Fixture mode: Hamming gap of the construction, k/2 or k/2 + 1.
    #[arg(long)]
    gap: Option<usize>,
}

#[derive(Serialize)]
struct Report {
    schema: u32,
    mode: String,
    n: usize,
    k_declared: usize,
    k_found: usize,
    periods: Vec<usize>,
    smallest_period: Option<usize>,
    flags: Flags,
    #[serde(skip_serializing_if = "Option::is_none")]
    distance: Option<DistanceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fixture: Option<FixtureReport>,
    stats: SpaceStats,
    seed: u64,
}

#[derive(Serialize, Default)]
struct Flags {
    promise_violations: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    boundary_period: Option<usize>,
}

#[derive(Serialize)]
struct DistanceReport {
    p: usize,
    exact: u64,
    estimate: Option<u64>,
    epsilon: Option<f64>,
    delta: Option<f64>,
}

#[derive(Serialize)]
struct FixtureReport {
    gap: usize,
    string: String,
}

fn default_seed() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(wcperiod::DEFAULT_SEED)
}

/// Reopenable byte source: a file path, or stdin buffered to a temp file so
/// the two-pass engine can honestly re-read it.
struct FileSource {
    path: PathBuf,
    marker: u8,
    len: usize,
    temp: bool,
}

impl FileSource {
    fn from_args(args: &Args) -> Result<Self, String> {
        let marker = marker_byte(args)?;
        let (path, temp) = if args.input == "-" {
            let mut buf = Vec::new();
            std::io::stdin()
                .read_to_end(&mut buf)
                .map_err(|e| format!("reading stdin: {e}"))?;
            let path = std::env::temp_dir().join(format!(
                "wcperiod-stdin-{}-{}",
                std::process::id(),
                std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_nanos())
                    .unwrap_or(0)
            ));
            fs::write(&path, &buf).map_err(|e| format!("buffering stdin: {e}"))?;
            (path, true)
        } else {
            (PathBuf::from(&args.input), false)
        };
        let mut len = fs::metadata(&path)
            .map_err(|e| format!("reading {}: {e}", path.display()))?
            .len() as usize;
        if !args.keep_trailing_newline && len > 0 {
            let bytes = fs::read(&path).map_err(|e| format!("reading {}: {e}", path.display()))?;
            if bytes.last() == Some(&b'\n') {
                len -= 1;
            }
        }
        Ok(Self {
            path,
            marker,
            len,
            temp,
        })
    }
}

impl Drop for FileSource {
    fn drop(&mut self) {
        if self.temp {
            let _ = fs::remove_file(&self.path);
        }
    }
}

impl SymbolSource for FileSource {
    fn len(&self) -> usize {
        self.len
    }

    fn open(&self) -> wcperiod::Result<Box<dyn Iterator<Item = Symbol> + '_>> {
        let file = fs::File::open(&self.path).map_err(|_| Error::EmptyStream)?;
        let marker = self.marker;
        let iter = std::io::BufReader::new(file)
            .bytes()
            .map_while(|b| b.ok())
            .take(self.len)
            .map(move |b| {
                if b == marker {
                    Symbol::Wildcard
                } else {
                    Symbol::Ch(b)
                }
            });
        Ok(Box::new(iter))
    }
}

fn marker_byte(args: &Args) -> Result<u8, String> {
    u8::try_from(args.wildcard_marker as u32).map_err(|_| {
        format!(
            "wildcard marker '{}' is not a single byte",
            args.wildcard_marker
        )
    })
}

fn read_input(args: &Args) -> Result<WildcardString, String> {
    let source = FileSource::from_args(args)?;
    let mut bytes = fs::read(&source.path).map_err(|e| e.to_string())?;
    bytes.truncate(source.len);
    WildcardString::parse(&bytes, source.marker).map_err(|e| e.to_string())
}

fn empty_report(mode: &str, seed: u64) -> Report {
    Report {
        schema: SCHEMA_VERSION,
        mode: mode.to_string(),
        n: 0,
        k_declared: 0,
        k_found: 0,
        periods: Vec::new(),
        smallest_period: None,
        flags: Flags::default(),
        distance: None,
        fixture: None,
        stats: SpaceStats::default(),
        seed,
    }
}

fn fill_from_period_report(report: &mut Report, pr: PeriodReport) {
    report.n = pr.n;
    report.k_declared = pr.k_declared;
    report.k_found = pr.k_found;
    report.periods = pr.periods;
    report.smallest_period = pr.smallest_period;
    report.flags.promise_violations = pr.promise_violations;
    report.flags.boundary_period = pr.boundary_period;
    report.stats = pr.stats;
}

fn run(args: &Args) -> Result<(Report, ExitCode), String> {
    let seed = args.seed.unwrap_or_else(default_seed);
    match args.mode {
        Mode::Periods2pass => {
            let source = FileSource::from_args(args)?;
            let engine = TwoPassEngine::new(args.k, SubroutineKind::from(args.subroutine), seed);
            let mut report = empty_report("periods-2pass", seed);
            if source.len() == 1 {
                report.n = 1;
                report.k_declared = args.k;
                return Ok((report, ExitCode::SUCCESS));
            }
            let state = engine.pass_one(&source).map_err(wildcard_budget_exit)?;
            let mut stats = SpaceStats::default();
            let verified = engine
                .pass_two(&source, &state, &mut stats)
                .map_err(|e| e.to_string())?;
            let mut pr = PeriodReport::new(source.len(), args.k, state.wildcards().len(), verified);
            pr.stats = stats;
            fill_from_period_report(&mut report, pr);
            Ok((report, ExitCode::SUCCESS))
        }
        Mode::Periods1pass => {
            let source = FileSource::from_args(args)?;
            let engine = OnePassEngine::new(args.k, SubroutineKind::from(args.subroutine), seed);
            let stream = source.open().map_err(|e| e.to_string())?;
            let pr = engine
                .run(source.len(), stream)
                .map_err(wildcard_budget_exit)?;
            let mut report = empty_report("periods-1pass", seed);
            fill_from_period_report(&mut report, pr);
            Ok((report, ExitCode::SUCCESS))
        }
        Mode::Oracle => {
            let s = read_input(args)?;
            if s.wildcard_count() > args.k {
                return Err(format!(
                    "exit1:{}",
                    Error::TooManyWildcards {
                        found: s.wildcard_count(),
                        declared: args.k,
                    }
                ));
            }
            let periods = oracle_all_periods(&s);
            let mut report = empty_report("oracle", seed);
            report.n = s.n();
            report.k_declared = args.k;
            report.k_found = s.wildcard_count();
            report.flags.promise_violations = periods
                .iter()
                .copied()
                .filter(|&p| !check_promise(&s, p))
                .collect();
            report.smallest_period = periods.first().copied();
            report.periods = periods;
            Ok((report, ExitCode::SUCCESS))
        }
        Mode::Distance => {
            let p = args.p.ok_or("distance mode requires --p")?;
            let s = read_input(args)?;
            let exact = distance::delta_exact(&s, p).map_err(|e| e.to_string())?;
            let estimate = match (args.epsilon, args.delta) {
                (Some(eps), None) => Some(
                    distance::delta_hh(s.symbols().iter().copied(), s.n(), p, eps)
                        .map_err(|e| e.to_string())?,
                ),
                (Some(eps), Some(delta)) => Some(
                    distance::delta_de(s.symbols().iter().copied(), s.n(), p, eps, delta, seed)
                        .map_err(|e| e.to_string())?,
                ),
                (None, Some(_)) => return Err("--delta requires --epsilon".into()),
                (None, None) => None,
            };
            let mut report = empty_report("distance", seed);
            report.n = s.n();
            report.k_declared = args.k;
            report.k_found = s.wildcard_count();
            report.distance = Some(DistanceReport {
                p,
                exact,
                estimate,
                epsilon: args.epsilon,
                delta: args.delta,
            });
            Ok((report, ExitCode::SUCCESS))
        }
        Mode::Fixture => {
            let n = args.n.ok_or("fixture mode requires --n")?;
            let gap = args.gap.ok_or("fixture mode requires --gap")?;
            let instance = gen_hard_instance(n, args.k, gap, seed).map_err(|e| e.to_string())?;
            let mut report = empty_report("fixture", seed);
            report.n = n;
            report.k_declared = args.k;
            report.k_found = instance.stream.wildcard_count();
            report.fixture = Some(FixtureReport {
                gap,
                string: String::from_utf8_lossy(&instance.stream.to_bytes()).into_owned(),
            });
            Ok((report, ExitCode::SUCCESS))
        }
    }
}

/// Wildcard-budget violations exit with status 1; everything else is a
/// configuration error (status 2).
fn wildcard_budget_exit(e: Error) -> String {
    if matches!(e, Error::TooManyWildcards { .. }) {
        format!("exit1:{e}")
    } else {
        e.to_string()
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok((report, code)) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("report serialization cannot fail")
            );
            code
        }
        Err(message) => {
            if let Some(msg) = message.strip_prefix("exit1:") {
                eprintln!("wcperiod: {msg}");
                ExitCode::from(1)
            } else {
                eprintln!("wcperiod: {message}");
                ExitCode::from(2)
            }
        }
    }
}
