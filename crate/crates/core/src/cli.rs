//! The `meanforge` command line.
//!
//! Exit codes: 0 when every expectation is met, 1 when a verification result
//! contradicts its expectation, 2 for usage and domain errors. Settings are
//! resolved as flags, then a flat `key = value` config file, then defaults.
//! `MEANFORGE_THREADS` caps the number of worker threads.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::chains::{builtin_chains, registry_document, select_chains, verify_chain, ChainReport};
use crate::convexity::{certify_convexity, ConvexityCertificate};
use crate::error::Error;
use crate::generating::{difference, generating_function, phi, DifferenceKind};
use crate::grid::GridSpec;
use crate::means::{mean, power_mean, MeanKind, MeanOrder, PositivePair};
use crate::ratio::{
    from_profile, profile, reference_for, verify_derived, RatioPair, RatioProfile,
    REFERENCE_CONSTANTS,
};
use crate::report::{fmt15, format_significant, RatioJson, Report};
use crate::sampling::SamplingSpec;
use crate::tolerance::ToleranceConfig;

pub const THREADS_VAR: &str = "MEANFORGE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "meanforge",
    version,
    about = "Means, difference measures and verified mean inequalities"
)]
pub struct Cli {
    /// Flat `key = value` settings file; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Relative comparison tolerance.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,

    /// Absolute floor of the comparison scale.
    #[arg(long, global = true)]
    pub absolute_floor: Option<f64>,

    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,

    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Markdown,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a named mean or a mean of order t.
    Eval {
        #[arg(long, conflicts_with = "order", required_unless_present = "order")]
        mean: Option<String>,
        /// Order t; accepts fractions such as 1/2 and inf / -inf.
        #[arg(long, allow_hyphen_values = true)]
        order: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
    },
    /// Evaluate a difference measure, and its perspective form when available.
    Diff {
        #[arg(long)]
        kind: String,
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
    },
    /// Convexity certificate of one closed-form measure, or `all`.
    Convexity {
        #[arg(long, default_value = "all")]
        kind: String,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Profile f1''/f2'' and derive the comparison constants.
    Ratio {
        #[arg(long)]
        num: String,
        #[arg(long)]
        den: String,
        #[command(flatten)]
        grid: GridArgs,
        /// Also check the derived inequality on samples.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Verify inequality chains by sampling.
    Verify {
        /// A chain id, a comma-separated list, or `all`.
        #[arg(long, default_value = "all")]
        chain: String,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Full report: chains, optimal constants and convexity certificates.
    Report {
        #[command(flatten)]
        sampling: SamplingArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// List registered items.
    List {
        #[arg(value_enum, default_value = "chains")]
        what: ListTarget,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ListTarget {
    Chains,
    /// The chain registry as structured records.
    Registry,
    Means,
    Differences,
    Ratios,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub x_min: Option<f64>,
    #[arg(long)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SamplingArgs {
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub ratio_min: Option<f64>,
    #[arg(long)]
    pub ratio_max: Option<f64>,
    /// Leave out the fixed edge-case ratios.
    #[arg(long)]
    pub no_edge_cases: bool,
}

/// A failure that ends the run with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<Error> for UsageError {
    fn from(e: Error) -> Self {
        UsageError(e.to_string())
    }
}

impl From<io::Error> for UsageError {
    fn from(e: io::Error) -> Self {
        UsageError(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, UsageError>;

/// Settings read from a config file.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut entries = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .or_else(|| line.split_once(':'))
                .ok_or_else(|| {
                    UsageError(format!("config line {}: expected key = value", n + 1))
                })?;
            let key = key.trim().replace('-', "_");
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(UsageError(format!(
                    "config line {}: unknown key `{key}`",
                    n + 1
                )));
            }
            entries.insert(key, value.trim().trim_matches('"').to_string());
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        self.entries
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| UsageError(format!("config key `{key}`: cannot parse `{v}`")))
            })
            .transpose()
    }
}

pub const CONFIG_KEYS: [&str; 11] = [
    "tolerance",
    "absolute_floor",
    "format",
    "samples",
    "seed",
    "ratio_min",
    "ratio_max",
    "edge_cases",
    "x_min",
    "x_max",
    "points",
];

struct Settings {
    config: ConfigFile,
    tolerance: ToleranceConfig,
    format: Format,
    output: Option<PathBuf>,
}

impl Settings {
    fn resolve(cli: &Cli) -> CliResult<Self> {
        let config = match &cli.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let defaults = ToleranceConfig::default();
        let tolerance = ToleranceConfig {
            relative: pick(cli.tolerance, config.get("tolerance")?, defaults.relative),
            absolute_floor: pick(
                cli.absolute_floor,
                config.get("absolute_floor")?,
                defaults.absolute_floor,
            ),
        };
        if !(tolerance.relative >= 0.0 && tolerance.absolute_floor > 0.0) {
            return Err(UsageError(
                "tolerances must be nonnegative with a positive floor".into(),
            ));
        }
        let config_format = match config.entries.get("format") {
            Some(v) => Some(
                Format::from_str(v, true)
                    .map_err(|_| UsageError(format!("config key `format`: cannot parse `{v}`")))?,
            ),
            None => None,
        };
        Ok(Self {
            tolerance,
            format: pick(cli.format, config_format, Format::Text),
            output: cli.output.clone(),
            config,
        })
    }

    fn grid(&self, args: &GridArgs) -> CliResult<GridSpec> {
        let d = GridSpec::default();
        let grid = GridSpec {
            x_min: pick(args.x_min, self.config.get("x_min")?, d.x_min),
            x_max: pick(args.x_max, self.config.get("x_max")?, d.x_max),
            points: pick(args.points, self.config.get("points")?, d.points),
        };
        grid.validate()?;
        Ok(grid)
    }

    fn sampling(&self, args: &SamplingArgs) -> CliResult<SamplingSpec> {
        let d = SamplingSpec::default();
        let edges = if args.no_edge_cases {
            false
        } else {
            self.config
                .get("edge_cases")?
                .unwrap_or(d.include_edge_cases)
        };
        let spec = SamplingSpec {
            count: pick(args.samples, self.config.get("samples")?, d.count),
            seed: pick(args.seed, self.config.get("seed")?, d.seed),
            ratio_min: pick(args.ratio_min, self.config.get("ratio_min")?, d.ratio_min),
            ratio_max: pick(args.ratio_max, self.config.get("ratio_max")?, d.ratio_max),
            include_edge_cases: edges,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn emit(&self, out: &mut (dyn Write + Send), text: &str) -> CliResult<()> {
        match &self.output {
            Some(path) => {
                fs::write(path, text)
                    .map_err(|e| UsageError(format!("cannot write {}: {e}", path.display())))?;
            }
            None => out.write_all(text.as_bytes())?,
        }
        Ok(())
    }

    fn emit_report(&self, out: &mut (dyn Write + Send), report: &Report) -> CliResult<()> {
        let text = match self.format {
            Format::Text => report.to_text(),
            Format::Json => report.to_json(),
            Format::Markdown => report.to_markdown(),
        };
        self.emit(out, &text)
    }
}

fn pick<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = if code == 0 {
                write!(out, "{}", e.render())
            } else {
                write!(err, "{}", e.render())
            };
            return code;
        }
    };
    let threads = match std::env::var(THREADS_VAR) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Some(n),
            _ => {
                let _ = writeln!(
                    err,
                    "error: {THREADS_VAR} must be a positive integer, got `{v}`"
                );
                return 2;
            }
        },
        Err(_) => None,
    };
    let result = match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli, out)),
            Err(e) => Err(UsageError(e.to_string())),
        },
        None => dispatch(&cli, out),
    };
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> CliResult<T> {
    Ok(s.parse::<T>()?)
}

/// Runs one command; `Ok(false)` means a result contradicted its expectation.
fn dispatch(cli: &Cli, out: &mut (dyn Write + Send)) -> CliResult<bool> {
    let settings = Settings::resolve(cli)?;
    match &cli.command {
        Command::Eval {
            mean: kind,
            order,
            a,
            b,
        } => {
            let p = PositivePair::new(*a, *b)?;
            let value = match (kind, order) {
                (Some(k), _) => mean(parse::<MeanKind>(k)?, p),
                (None, Some(t)) => power_mean(parse::<MeanOrder>(t)?, p),
                (None, None) => unreachable!("clap requires --mean or --order"),
            };
            settings.emit(out, &format!("{}\n", fmt15(value)))?;
            Ok(true)
        }
        Command::Diff { kind, a, b } => {
            let kind = parse::<DifferenceKind>(kind)?;
            let p = PositivePair::new(*a, *b)?;
            let mut text = format!("{kind} = {}\n", fmt15(difference(kind, p)));
            let gf = generating_function(kind);
            if gf.has_closed_forms() {
                text.push_str(&format!("phi = {}\n", fmt15(phi(&gf, p))));
            }
            settings.emit(out, &text)?;
            Ok(true)
        }
        Command::Convexity { kind, grid } => {
            let grid = settings.grid(grid)?;
            let kinds = if kind == "all" {
                DifferenceKind::CLOSED_FORM.to_vec()
            } else {
                vec![parse::<DifferenceKind>(kind)?]
            };
            let certificates = kinds
                .into_iter()
                .map(|k| certify_convexity(k, &grid))
                .collect::<crate::error::Result<Vec<ConvexityCertificate>>>()?;
            let passed = certificates.iter().all(|c| c.passed);
            let report = Report::new(&SamplingSpec::default(), &settings.tolerance)
                .with_convexity(&certificates);
            settings.emit_report(out, &report)?;
            Ok(passed)
        }
        Command::Ratio {
            num,
            den,
            grid,
            verify,
            sampling,
        } => {
            let pair = RatioPair::new(parse(num)?, parse(den)?)?;
            let grid = settings.grid(grid)?;
            let prof = profile(pair, &grid)?;
            let mut ok = true;
            match settings.format {
                Format::Text => {
                    let mut text = ratio_text(&prof);
                    if *verify {
                        let spec = settings.sampling(sampling)?;
                        let ineq = from_profile(&prof);
                        let r = verify_derived(&ineq, &spec, &settings.tolerance)?;
                        ok = r.holds();
                        text.push_str(&format!(
                            "verified on {} samples: lower violations {}, upper violations {}, worst margins {} / {}\n",
                            r.samples,
                            r.lower.violations,
                            r.upper.violations,
                            fmt15(r.lower.worst_margin),
                            fmt15(r.upper.worst_margin)
                        ));
                    }
                    settings.emit(out, &text)?;
                }
                _ => {
                    let report = Report::new(&settings.sampling(sampling)?, &settings.tolerance)
                        .with_ratios(&[prof]);
                    settings.emit_report(out, &report)?;
                }
            }
            Ok(ok)
        }
        Command::Verify { chain, sampling } => {
            let spec = settings.sampling(sampling)?;
            let chains = select_chains(chain)?;
            let reports = chains
                .iter()
                .map(|c| verify_chain(c, &spec, &settings.tolerance))
                .collect::<crate::error::Result<Vec<ChainReport>>>()?;
            let report = Report::new(&spec, &settings.tolerance).with_chains(&reports);
            settings.emit_report(out, &report)?;
            Ok(report.expectations_met())
        }
        Command::Report { sampling, grid } => {
            let spec = settings.sampling(sampling)?;
            let grid = settings.grid(grid)?;
            let reports = builtin_chains()
                .iter()
                .map(|c| verify_chain(c, &spec, &settings.tolerance))
                .collect::<crate::error::Result<Vec<_>>>()?;
            let profiles = REFERENCE_CONSTANTS
                .iter()
                .map(|r| profile(r.pair, &grid))
                .collect::<crate::error::Result<Vec<_>>>()?;
            let certificates = DifferenceKind::CLOSED_FORM
                .iter()
                .map(|&k| certify_convexity(k, &grid))
                .collect::<crate::error::Result<Vec<_>>>()?;
            let report = Report::new(&spec, &settings.tolerance)
                .with_chains(&reports)
                .with_ratios(&profiles)
                .with_convexity(&certificates);
            settings.emit_report(out, &report)?;
            Ok(report.expectations_met())
        }
        Command::List { what } => {
            settings.emit(out, &list(*what))?;
            Ok(true)
        }
    }
}

fn ratio_text(prof: &RatioProfile) -> String {
    let pair = prof.pair;
    let ineq = from_profile(prof);
    let mut text = format!(
        "pair {pair}\ng(1) = {}\nsup = {} at x={}\ninf = {} at x={}\npattern = {}\n{}\nsup = {} at x={}; {}\n",
        fmt15(prof.value_at_1),
        fmt15(prof.sup),
        fmt15(prof.sup_location),
        fmt15(prof.inf),
        fmt15(prof.inf_location),
        prof.pattern,
        ineq,
        format_significant(prof.sup, 9),
        format_significant(prof.sup_location, 9),
        ineq.sharp_statement(),
    );
    if let Some(r) = reference_for(pair) {
        text.push_str(&format!("published g(1) = {}\n", r.published));
    }
    if let Some(note) = RatioJson::new(prof).note {
        text.push_str(&format!("inconsistency: {note}\n"));
    }
    text
}

fn list(what: ListTarget) -> String {
    let mut out = String::new();
    match what {
        ListTarget::Chains => {
            for c in builtin_chains() {
                out.push_str(&format!(
                    "{:<16} {:<15} {}\n",
                    c.id,
                    c.expectation,
                    c.statement()
                ));
            }
        }
        ListTarget::Registry => out = registry_document(),
        ListTarget::Means => {
            for k in MeanKind::ALL {
                out.push_str(&format!("{:<3} {}\n", k.symbol(), k.name()));
            }
        }
        ListTarget::Differences => {
            for k in DifferenceKind::ALL {
                let (x, y) = k.means();
                let forms = if k.has_closed_forms() {
                    "closed forms"
                } else {
                    "chain only"
                };
                out.push_str(&format!("{:<5} {x} - {y:<3} {forms}\n", k.symbol()));
            }
        }
        ListTarget::Ratios => {
            for r in REFERENCE_CONSTANTS.iter() {
                out.push_str(&format!(
                    "{:<10} published g(1) = {:<4} inequality constant = {}\n",
                    r.pair.to_string(),
                    r.published,
                    r.inequality_constant
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        let c =
            ConfigFile::parse("# comment\nseed = 5\nratio-min: 1e-3\nformat = \"json\"\n").unwrap();
        assert_eq!(c.get::<u64>("seed").unwrap(), Some(5));
        assert_eq!(c.get::<f64>("ratio_min").unwrap(), Some(1e-3));
        assert!(ConfigFile::parse("bogus = 1").is_err());
        assert!(ConfigFile::parse("seed 5").is_err());
    }

    #[test]
    fn flags_override_config() {
        assert_eq!(pick(Some(1), Some(2), 3), 1);
        assert_eq!(pick(None, Some(2), 3), 2);
        assert_eq!(pick::<i32>(None, None, 3), 3);
    }
}
