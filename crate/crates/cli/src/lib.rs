//! Command-line front end for `mfa-core`.
//!
//! `parse_config` turns argv into a validated [`RunConfig`]; `execute`
//! runs it against a sink. Exit codes: 0 success, 1 computational error,
//! 2 usage error.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use mfa_core::geometry::{
    assouad_scan, ball_measure, doubling_scan, non_doubling_witness, ScaleGrid, ScanOptions,
    WitnessOutcome,
};
use mfa_core::spectrum::{spectrum_table, tilted_vector, UniformGrid};
use mfa_core::symbolic::{
    abundance_report, assouad_estimate, greedy_word, local_dim_prefixes, moran_construct,
    moran_dimension, sample_word, BlockBase,
};
use mfa_core::table::{format_float, Cell, Tabular};
use mfa_core::{WeightedSystem, Word};

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPUTE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("UsageError: {0}")]
    Usage(String),
    /// Help or version text requested; not a failure.
    #[error("{0}")]
    Display(String),
    #[error("IoError: {0}")]
    Io(#[from] io::Error),
    #[error("{name}: {0}", name = .0.name())]
    Compute(#[from] mfa_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Display(_) => EXIT_OK,
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) | CliError::Compute(_) => EXIT_COMPUTE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "mfa",
    version,
    about = "Multifractal and pointwise Assouad analysis of self-similar measures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct Common {
    /// System file: {"probs": [...], "ratios": [...], "translations": [...]}.
    #[arg(short = 's', long = "system")]
    pub system: PathBuf,
    /// Output file; standard output when absent.
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// tau(q), alpha(q), f and its envelope along a q grid.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// q grid as lo:hi:count.
        #[arg(
            long = "q-grid",
            default_value = "-10:10:201",
            allow_hyphen_values = true
        )]
        q_grid: String,
    },
    /// Subword estimate of the pointwise Assouad dimension of a word.
    AssouadWord {
        #[command(flatten)]
        common: Common,
        /// Explicit word (1-based digits, comma separated beyond 9 maps).
        #[arg(long, conflicts_with = "q")]
        word: Option<String>,
        /// Sample an i.i.d. word from the measure tilted by q instead.
        #[arg(long, allow_hyphen_values = true)]
        q: Option<f64>,
        /// Length of the sampled or repeated word.
        #[arg(long, default_value_t = 10_000)]
        length: usize,
        #[arg(long = "n-lo", default_value_t = 1)]
        n_lo: usize,
        #[arg(long = "n-hi")]
        n_hi: Option<usize>,
    },
    /// Greedy word with prescribed pointwise Assouad dimension.
    Greedy {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 64)]
        length: usize,
    },
    /// Moran construction and its stage dimensions.
    Moran {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        epsilon: f64,
        /// Block length.
        #[arg(long)]
        n: usize,
        /// Number of stages.
        #[arg(long, default_value_t = 10)]
        stages: usize,
        /// Fixed block suffix; empty for the full block set.
        #[arg(long, default_value = "")]
        kappa: String,
    },
    /// Enclosure of mu(B(x, r)).
    Ball {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'x', allow_hyphen_values = true)]
        x: f64,
        #[arg(short = 'r')]
        r: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long = "depth-cap", default_value_t = 64)]
        depth_cap: usize,
    },
    /// Ratios mu(B(x, gamma r)) / mu(B(x, r)) over a scale grid.
    DoublingScan {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'x', allow_hyphen_values = true)]
        x: f64,
        #[arg(long, default_value_t = 2.0)]
        gamma: f64,
        /// Scales as base^(-k), k=k0..k1.
        #[arg(long, default_value = "2^(-k), k=0..40")]
        scales: String,
        #[arg(long = "rel-tol", default_value_t = 1e-8)]
        rel_tol: f64,
        #[arg(long = "depth-cap", default_value_t = 96)]
        depth_cap: usize,
    },
    /// Certified lower bound for the pointwise Assouad dimension at x.
    AssouadScan {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'x', allow_hyphen_values = true)]
        x: f64,
        #[arg(long, default_value = "2^(-k), k=4..24")]
        scales: String,
        /// Scale pairs examined, widest first.
        #[arg(long, default_value_t = 10)]
        pairs: usize,
        #[arg(long = "rel-tol", default_value_t = 1e-8)]
        rel_tol: f64,
        #[arg(long = "depth-cap", default_value_t = 96)]
        depth_cap: usize,
    },
    /// Search for words i, j with p_j >= n p_i next to each other.
    Witness {
        #[command(flatten)]
        common: Common,
        #[arg(long = "n-target")]
        n_target: f64,
        #[arg(long = "depth-cap", default_value_t = 12)]
        depth_cap: usize,
    },
    /// Abundance figures of the suffix-appended block sets.
    Abundance {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value = "")]
        kappa: String,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Spectrum { common, .. }
            | Command::AssouadWord { common, .. }
            | Command::Greedy { common, .. }
            | Command::Moran { common, .. }
            | Command::Ball { common, .. }
            | Command::DoublingScan { common, .. }
            | Command::AssouadScan { common, .. }
            | Command::Witness { common, .. }
            | Command::Abundance { common, .. } => common,
        }
    }
}

/// A validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub q_grid: Option<UniformGrid>,
    pub scales: Option<ScaleGrid>,
}

impl RunConfig {
    pub fn common(&self) -> &Common {
        self.command.common()
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn require(cond: bool, msg: &str) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(usage(msg))
    }
}

/// Parses and validates `argv` (including the program name).
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
            CliError::Display(e.to_string())
        }
        _ => {
            let text = e.to_string();
            usage(text.trim_start_matches("error: ").trim_end())
        }
    })?;
    let command = cli.command;
    let system = &command.common().system;
    if !system.is_file() {
        return Err(usage(format!("system file {} not found", system.display())));
    }
    let mut config = RunConfig {
        command: command.clone(),
        q_grid: None,
        scales: None,
    };
    match &command {
        Command::Spectrum { q_grid, .. } => {
            let grid = UniformGrid::parse(q_grid).map_err(|e| usage(e.to_string()))?;
            config.q_grid = Some(grid);
        }
        Command::AssouadWord {
            word,
            q,
            length,
            n_lo,
            n_hi,
            ..
        } => {
            require(
                word.is_some() || q.is_some(),
                "assouad-word needs --word or --q",
            )?;
            require(*length > 0, "--length must be positive")?;
            require(*n_lo > 0, "--n-lo must be positive")?;
            if let Some(hi) = n_hi {
                require(hi >= n_lo, "--n-hi must be at least --n-lo")?;
            }
        }
        Command::Greedy { length, .. } => require(*length > 0, "--length must be positive")?,
        Command::Moran {
            epsilon, n, stages, ..
        } => {
            require(*epsilon > 0.0, "--epsilon must be positive")?;
            require(*n > 0, "--n must be positive")?;
            require(*stages > 0, "--stages must be positive")?;
        }
        Command::Ball { x, r, tol, .. } => {
            require((0.0..=1.0).contains(x), "-x must lie in [0, 1]")?;
            require(*r > 0.0 && r.is_finite(), "-r must be positive")?;
            require(*tol >= 0.0, "--tol must be non-negative")?;
        }
        Command::DoublingScan {
            x,
            gamma,
            scales,
            rel_tol,
            ..
        } => {
            require((0.0..=1.0).contains(x), "-x must lie in [0, 1]")?;
            require(*gamma > 1.0, "--gamma must exceed 1")?;
            require(*rel_tol >= 0.0, "--rel-tol must be non-negative")?;
            config.scales = Some(ScaleGrid::parse(scales).map_err(|e| usage(e.to_string()))?);
        }
        Command::AssouadScan {
            x,
            scales,
            pairs,
            rel_tol,
            ..
        } => {
            require((0.0..=1.0).contains(x), "-x must lie in [0, 1]")?;
            require(*pairs > 0, "--pairs must be positive")?;
            require(*rel_tol >= 0.0, "--rel-tol must be non-negative")?;
            let grid = ScaleGrid::parse(scales).map_err(|e| usage(e.to_string()))?;
            require(grid.base >= 2.0, "assouad-scan needs scale base >= 2")?;
            config.scales = Some(grid);
        }
        Command::Witness { n_target, .. } => {
            require(*n_target > 0.0, "--n-target must be positive")?
        }
        Command::Abundance { n, delta, .. } => {
            require(*n > 0, "--n must be positive")?;
            require(*delta > 0.0 && *delta <= 1.0, "--delta must lie in (0, 1]")?;
        }
    }
    Ok(config)
}

/// Writes rows as CSV (header, 17 significant digits, LF) or as a JSON
/// array of objects with keys in column order.
pub fn emit_table<R: Tabular, W: Write>(
    rows: &[R],
    format: Format,
    sink: &mut W,
) -> io::Result<()> {
    let cells: Vec<Vec<Cell>> = rows.iter().map(Tabular::cells).collect();
    write_rows(R::columns(), &cells, format, sink)
}

/// Untyped form of [`emit_table`].
pub fn write_rows<W: Write>(
    columns: &[&str],
    rows: &[Vec<Cell>],
    format: Format,
    sink: &mut W,
) -> io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(sink, "{}", columns.join(","))?;
            for row in rows {
                let cells: Vec<String> = row.iter().map(csv_cell).collect();
                writeln!(sink, "{}", cells.join(","))?;
            }
        }
        Format::Json => {
            write!(sink, "[")?;
            for (i, row) in rows.iter().enumerate() {
                if i > 0 {
                    write!(sink, ",")?;
                }
                write!(sink, "{{")?;
                for (j, (key, cell)) in columns.iter().zip(row).enumerate() {
                    if j > 0 {
                        write!(sink, ",")?;
                    }
                    write!(sink, "{}:{}", Value::from(*key), json_cell(cell))?;
                }
                write!(sink, "}}")?;
            }
            writeln!(sink, "]")?;
        }
    }
    Ok(())
}

fn csv_cell(cell: &Cell) -> String {
    match cell {
        Cell::Float(v) => format_float(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
    }
}

fn json_cell(cell: &Cell) -> Value {
    match cell {
        Cell::Float(v) => Value::from(*v),
        Cell::Int(v) => Value::from(*v),
        Cell::Text(s) => Value::from(s.as_str()),
    }
}

fn emit_json<T: Serialize, W: Write>(value: &T, sink: &mut W) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *sink, value).map_err(io::Error::from)?;
    writeln!(sink)?;
    Ok(())
}

fn load_system(common: &Common) -> Result<WeightedSystem, CliError> {
    let text = fs::read_to_string(&common.system)?;
    Ok(WeightedSystem::from_json(&text)?)
}

fn parse_word(text: &str, arity: usize) -> Result<Word, CliError> {
    if text.is_empty() {
        Ok(Word::new())
    } else {
        Ok(Word::parse(text, arity)?)
    }
}

/// Runs a validated configuration, writing to `sink`.
pub fn execute<W: Write>(config: &RunConfig, sink: &mut W) -> Result<(), CliError> {
    let common = config.common();
    let sys = load_system(common)?;
    let format = common.format;
    match &config.command {
        Command::Spectrum { .. } => {
            let grid = config.q_grid.as_ref().expect("validated grid");
            let table = spectrum_table(&sys, grid)?;
            emit_table(&table.rows, format, sink)?;
        }
        Command::AssouadWord {
            word,
            q,
            length,
            n_lo,
            n_hi,
            common,
        } => {
            let word = match (word, q) {
                (Some(w), _) => {
                    let base = parse_word(w, sys.arity())?;
                    if base.is_empty() {
                        return Err(usage("--word must be nonempty"));
                    }
                    base.cycle_to(*length)
                }
                (None, Some(q)) => sample_word(&tilted_vector(&sys, *q)?, *length, common.seed)?,
                (None, None) => unreachable!("validated"),
            };
            let n_hi = n_hi.unwrap_or(word.len());
            let est = assouad_estimate(&sys, &word, *n_lo, n_hi)?;
            match format {
                Format::Csv => emit_table(&est.rows(), format, sink)?,
                Format::Json => emit_json(
                    &json!({
                        "n_lo": est.n_lo,
                        "n_hi": est.n_hi,
                        "quartile_start": est.quartile_start(),
                        "estimate": est.estimate,
                        "per_n_sup": est.per_n_sup,
                    }),
                    sink,
                )?,
            }
        }
        Command::Greedy { alpha, length, .. } => {
            let word = greedy_word(&sys, *alpha, *length)?;
            let depths: Vec<usize> = (1..=word.len()).collect();
            let ratios = local_dim_prefixes(&sys, &word, &depths)?;
            let rows: Vec<Vec<Cell>> = depths
                .iter()
                .zip(&ratios)
                .map(|(&n, &ratio)| vec![n.into(), (word.symbol(n - 1) + 1).into(), ratio.into()])
                .collect();
            write_rows(&["n", "symbol", "ratio"], &rows, format, sink)?;
        }
        Command::Moran {
            alpha,
            epsilon,
            n,
            stages,
            kappa,
            ..
        } => {
            let kappa = parse_word(kappa, sys.arity())?;
            let base = if kappa.is_empty() {
                BlockBase::Full
            } else {
                BlockBase::KappaAppended(kappa)
            };
            let spec = moran_construct(&sys, *alpha, *epsilon, *n, *stages, base)?;
            let s_k = (1..=spec.stages())
                .map(|k| moran_dimension(&spec, k, 0.0))
                .collect::<mfa_core::Result<Vec<f64>>>()?;
            match format {
                Format::Json => emit_json(&json!({ "spec": spec.summary(), "s_k": s_k }), sink)?,
                Format::Csv => {
                    let rows: Vec<Vec<Cell>> = s_k
                        .iter()
                        .enumerate()
                        .map(|(k, &sk)| {
                            vec![
                                (k + 1).into(),
                                (spec.m()[k] as usize).into(),
                                sk.into(),
                                spec.s().into(),
                            ]
                        })
                        .collect();
                    write_rows(&["k", "M", "s_k", "s"], &rows, format, sink)?;
                }
            }
        }
        Command::Ball {
            x,
            r,
            tol,
            depth_cap,
            ..
        } => {
            let b = ball_measure(&sys, *x, *r, *tol, *depth_cap)?;
            let rows = vec![vec![
                (*x).into(),
                (*r).into(),
                b.lower.into(),
                b.upper.into(),
                b.depth_used.into(),
                b.straddle_mass.into(),
            ]];
            write_rows(
                &["x", "r", "lower", "upper", "depth_used", "straddle_mass"],
                &rows,
                format,
                sink,
            )?;
        }
        Command::DoublingScan {
            x,
            gamma,
            rel_tol,
            depth_cap,
            ..
        } => {
            let opts = ScanOptions {
                rel_tol: *rel_tol,
                depth_cap: *depth_cap,
            };
            let grid = config.scales.as_ref().expect("validated grid");
            let scan = doubling_scan(&sys, *x, *gamma, grid, opts)?;
            emit_table(&scan.per_scale, format, sink)?;
        }
        Command::AssouadScan {
            x,
            pairs,
            rel_tol,
            depth_cap,
            ..
        } => {
            let opts = ScanOptions {
                rel_tol: *rel_tol,
                depth_cap: *depth_cap,
            };
            let grid = config.scales.as_ref().expect("validated grid");
            let scan = assouad_scan(&sys, *x, grid, *pairs, opts)?;
            let rows = vec![vec![
                (*x).into(),
                scan.lower_bound.into(),
                scan.r.into(),
                scan.big_r.into(),
                scan.pairs_used.into(),
            ]];
            write_rows(
                &["x", "lower_bound", "r", "R", "pairs_used"],
                &rows,
                format,
                sink,
            )?;
        }
        Command::Witness {
            n_target,
            depth_cap,
            ..
        } => {
            let outcome = non_doubling_witness(&sys, *n_target, *depth_cap)?;
            match format {
                Format::Json => emit_json(&outcome, sink)?,
                Format::Csv => {
                    let rows = match &outcome {
                        WitnessOutcome::Found(p) => vec![vec![
                            p.i.clone().into(),
                            p.j.clone().into(),
                            p.p_i.into(),
                            p.p_j.into(),
                            p.mass_ratio.into(),
                            p.gap.into(),
                        ]],
                        WitnessOutcome::NotFound { .. } => Vec::new(),
                    };
                    write_rows(
                        &["i", "j", "p_i", "p_j", "mass_ratio", "gap"],
                        &rows,
                        format,
                        sink,
                    )?;
                }
            }
        }
        Command::Abundance {
            n, delta, kappa, ..
        } => {
            let kappa = parse_word(kappa, sys.arity())?;
            let report = abundance_report(&sys, *n, *delta, &kappa)?;
            let rows = vec![vec![
                (*n).into(),
                (*delta).into(),
                report.a1_ratio_min.into(),
                i64::from(report.a2_delta_dense).into(),
            ]];
            write_rows(
                &["n", "delta", "a1_ratio_min", "a2_delta_dense"],
                &rows,
                format,
                sink,
            )?;
        }
    }
    Ok(())
}

/// Runs a configuration against its output file or standard output and
/// returns the exit code; errors are reported on standard error.
pub fn run(config: &RunConfig) -> i32 {
    let result = match &config.common().output {
        Some(path) => {
            let mut buf = Vec::new();
            execute(config, &mut buf).and_then(|()| fs::write(path, buf).map_err(CliError::from))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            execute(config, &mut lock).and_then(|()| lock.flush().map_err(CliError::from))
        }
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
