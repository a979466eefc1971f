//! Command-line front end emitting spectrum tables, dynamics time series,
//! sweep results, and verification reports as CSV or JSON.
//!
//! Exit status: 0 on success, 1 when a verification run fails its
//! threshold, 2 on usage or configuration errors. Output is deterministic:
//! fixed column order, fixed float formatting (9 significant digits in CSV,
//! 17 in JSON so values round-trip exactly), seeded randomness.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::entanglement::{
    branch_overlap, entanglement_report, min_purity_over_period, reduced_rotor, Evolution,
    SectorEntry, SuperposedState,
};
use crate::model::{sector_spectrum, ModelParams, SectorIndex, Spinor};
use crate::oracle::verify_against_analytic;
use crate::scenarios::{self, Scenario};

const DEFAULT_INERTIA: f64 = 1.0;
const DEFAULT_DELTA: f64 = 2.0;
const DEFAULT_COUPLING: f64 = 0.5;
const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(
    name = "spin-rotor",
    version,
    about = "Exact spectra and entanglement dynamics of a spin-1/2 coupled to a planar quantum rotor"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    globals: GlobalArgs,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Rotor moment of inertia I (default 1).
    #[arg(long, global = true)]
    inertia: Option<f64>,

    /// Transverse spin splitting Δ (default 2).
    #[arg(long, global = true)]
    delta: Option<f64>,

    /// Spin-rotation coupling g (default 0.5).
    #[arg(long, global = true)]
    coupling: Option<f64>,

    /// Output format (default csv).
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,

    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Seed for the randomized verification scenario (default 42).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Optional TOML config file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-sector eigenenergies, precession frequency, and tilt angle.
    #[command(allow_negative_numbers = true)]
    Spectrum {
        #[arg(long, default_value_t = -10)]
        m_min: i32,
        #[arg(long, default_value_t = 10)]
        m_max: i32,
    },
    /// Time series of branch overlap, purity, entropy, and rotor coherence.
    #[command(allow_negative_numbers = true)]
    Dynamics {
        /// Evolve the balanced two-sector state (|m> + |-m>)|up>/sqrt(2).
        #[arg(long, default_value_t = 4, conflicts_with = "amplitudes")]
        m: i32,
        /// Read a general sector list from a file instead (one line per
        /// sector: `m re(c) im(c) [re(up) im(up) re(down) im(down)]`).
        #[arg(long)]
        amplitudes: Option<PathBuf>,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        #[arg(long, default_value_t = 2001)]
        steps: usize,
    },
    /// Closed-form purity minima and entropy maxima per sector.
    #[command(allow_negative_numbers = true)]
    Sweep {
        /// Comma-separated sector list, e.g. `2,4,8`.
        #[arg(long, value_delimiter = ',', required = true)]
        m_list: Vec<i32>,
    },
    /// Differential check of the closed forms against the dense oracle.
    #[command(allow_negative_numbers = true)]
    Verify {
        /// Built-in scenario name, or `all`.
        #[arg(long, default_value = "all")]
        scenario: String,
        #[arg(long, default_value_t = 1e-9)]
        threshold: f64,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        #[arg(long, default_value_t = 2001)]
        steps: usize,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(std::io::Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Optional config file; any field may be omitted. Flags win over file
/// values, file values win over built-in defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    inertia: Option<f64>,
    delta: Option<f64>,
    coupling: Option<f64>,
    format: Option<String>,
    seed: Option<u64>,
}

struct Resolved {
    params: ModelParams,
    format: OutputFormat,
    seed: u64,
    output: Option<PathBuf>,
}

/// One output cell; `Missing` renders as an empty CSV field / JSON null.
enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Missing,
}

struct Output {
    meta: Map<String, Value>,
    columns: &'static [&'static str],
    rows: Vec<Vec<Cell>>,
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: Cli) -> Result<ExitCode, CliError> {
    let file_config = load_config(cli.globals.config.as_deref())?;
    let resolved = resolve(&cli.globals, &file_config)?;

    let (output, exit) = match &cli.command {
        Command::Spectrum { m_min, m_max } => (cmd_spectrum(&resolved, *m_min, *m_max)?, 0),
        Command::Dynamics {
            m,
            amplitudes,
            t_max,
            steps,
        } => (
            cmd_dynamics(&resolved, *m, amplitudes.as_deref(), *t_max, *steps)?,
            0,
        ),
        Command::Sweep { m_list } => (cmd_sweep(&resolved, m_list)?, 0),
        Command::Verify {
            scenario,
            threshold,
            t_max,
            steps,
        } => cmd_verify(&resolved, scenario, *threshold, *t_max, *steps)?,
    };

    emit(&resolved, output)?;
    Ok(ExitCode::from(exit))
}

fn load_config(path: Option<&Path>) -> Result<FileConfig, CliError> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?;
            toml::from_str(&text)
                .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", p.display())))
        }
    }
}

fn resolve(globals: &GlobalArgs, file: &FileConfig) -> Result<Resolved, CliError> {
    let inertia = globals.inertia.or(file.inertia).unwrap_or(DEFAULT_INERTIA);
    let delta = globals.delta.or(file.delta).unwrap_or(DEFAULT_DELTA);
    let coupling = globals
        .coupling
        .or(file.coupling)
        .unwrap_or(DEFAULT_COUPLING);
    let params =
        ModelParams::new(inertia, delta, coupling).map_err(|e| CliError::Usage(e.to_string()))?;

    let file_format = match file.format.as_deref() {
        None => None,
        Some("csv") => Some(OutputFormat::Csv),
        Some("json") => Some(OutputFormat::Json),
        Some(other) => {
            return Err(CliError::Usage(format!(
                "config format must be 'csv' or 'json', got '{other}'"
            )))
        }
    };

    Ok(Resolved {
        params,
        format: globals.format.or(file_format).unwrap_or(OutputFormat::Csv),
        seed: globals.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        output: globals.output.clone(),
    })
}

/// Endpoint-inclusive uniform grid `t_k = k·t_max/(steps-1)`.
pub fn time_grid(t_max: f64, steps: usize) -> Vec<f64> {
    let n = (steps - 1) as f64;
    (0..steps).map(|k| k as f64 * t_max / n).collect()
}

fn validate_grid(t_max: f64, steps: usize) -> Result<(), CliError> {
    if steps < 2 {
        return Err(CliError::Usage(format!("steps must be >= 2, got {steps}")));
    }
    if !t_max.is_finite() || t_max <= 0.0 {
        return Err(CliError::Usage(format!(
            "t-max must be positive, got {t_max}"
        )));
    }
    Ok(())
}

fn cmd_spectrum(resolved: &Resolved, m_min: i32, m_max: i32) -> Result<Output, CliError> {
    if m_min > m_max {
        return Err(CliError::Usage(format!(
            "m-min ({m_min}) must not exceed m-max ({m_max})"
        )));
    }
    let mut rows = Vec::with_capacity((m_max - m_min + 1) as usize);
    for m in m_min..=m_max {
        let s = sector_spectrum(resolved.params, SectorIndex(m));
        rows.push(vec![
            Cell::Int(m.into()),
            Cell::Float(s.eps_minus),
            Cell::Float(s.eps_plus),
            Cell::Float(s.omega),
            Cell::Float(s.theta),
            Cell::Float(s.lambda),
        ]);
    }
    let mut meta = common_meta(resolved, "spectrum");
    meta.insert("m_min".into(), Value::from(m_min));
    meta.insert("m_max".into(), Value::from(m_max));
    Ok(Output {
        meta,
        columns: &["m", "eps_minus", "eps_plus", "omega", "theta", "lambda"],
        rows,
    })
}

fn cmd_dynamics(
    resolved: &Resolved,
    m: i32,
    amplitudes: Option<&Path>,
    t_max: f64,
    steps: usize,
) -> Result<Output, CliError> {
    validate_grid(t_max, steps)?;
    let initial = match amplitudes {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                CliError::Usage(format!("cannot read amplitudes {}: {e}", path.display()))
            })?;
            parse_amplitudes(&text)?
        }
        None => SuperposedState::equal_superposition(SectorIndex(m)).map_err(|_| {
            CliError::Usage(format!(
                "the balanced two-sector state needs m != 0, got m={m}"
            ))
        })?,
    };

    // Closed-form K columns apply exactly when the state is the balanced
    // spin-up pair; the scenario detector owns that rule.
    let probe = Scenario::new("dynamics", resolved.params, initial.clone());
    let overlap_sector = probe.overlap_sector();

    // Rotor coherence is tracked between the two dominant sectors (largest
    // initial weight, ties broken by lower m). Sector weights are conserved.
    let dominant = dominant_pair(&initial);

    let evolution = Evolution::new(resolved.params, initial)?;
    let grid = time_grid(t_max, steps);
    let mut rows = Vec::with_capacity(grid.len());
    for &t in &grid {
        let state = evolution.state_at(t);
        let report = entanglement_report(&state);
        let coherence = match dominant {
            Some((a, b)) => reduced_rotor(&state)
                .coherence(a, b)
                .map(|c| c.norm())
                .unwrap_or(0.0),
            None => 0.0,
        };
        let mut row = vec![Cell::Float(t)];
        if let Some(sector) = overlap_sector {
            let k = branch_overlap(resolved.params, sector, t);
            row.push(Cell::Float(k.value.re));
            row.push(Cell::Float(k.value.im));
            row.push(Cell::Float(k.magnitude));
        }
        row.push(Cell::Float(report.purity));
        row.push(Cell::Float(report.entropy));
        row.push(Cell::Float(coherence));
        rows.push(row);
    }

    let columns: &'static [&'static str] = if overlap_sector.is_some() {
        &[
            "t",
            "K_re",
            "K_im",
            "K_abs",
            "purity",
            "entropy",
            "rotor_coherence",
        ]
    } else {
        &["t", "purity", "entropy", "rotor_coherence"]
    };

    let mut meta = common_meta(resolved, "dynamics");
    match amplitudes {
        Some(path) => {
            meta.insert("amplitudes".into(), Value::from(path.display().to_string()));
        }
        None => {
            meta.insert("m".into(), Value::from(m));
        }
    }
    meta.insert("t_max".into(), json_float(t_max));
    meta.insert("steps".into(), Value::from(steps as u64));
    Ok(Output {
        meta,
        columns,
        rows,
    })
}

/// The two sectors with the largest conserved weights, or `None` for a
/// single-sector state.
fn dominant_pair(state: &SuperposedState) -> Option<(SectorIndex, SectorIndex)> {
    let entries = state.entries();
    if entries.len() < 2 {
        return None;
    }
    let mut order: Vec<&SectorEntry> = entries.iter().collect();
    order.sort_by(|a, b| {
        b.amplitude
            .norm_sqr()
            .partial_cmp(&a.amplitude.norm_sqr())
            .unwrap()
            .then(a.sector.cmp(&b.sector))
    });
    Some((
        order[0].sector.min(order[1].sector),
        order[0].sector.max(order[1].sector),
    ))
}

fn cmd_sweep(resolved: &Resolved, m_list: &[i32]) -> Result<Output, CliError> {
    if m_list.is_empty() {
        return Err(CliError::Usage("m-list must not be empty".into()));
    }
    let mut rows = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let s = sector_spectrum(resolved.params, SectorIndex(m));
        let minimum = min_purity_over_period(resolved.params, SectorIndex(m));
        let eta = s.lambda / resolved.params.delta();
        // |K| at the purity minimum, from Tr rho^2 = (1 + |K|^2)/2.
        let k_min = (2.0 * minimum.purity - 1.0).max(0.0).sqrt();
        let p_plus = 0.5 * (1.0 + k_min);
        let p_minus = 0.5 * (1.0 - k_min);
        let raw_entropy = [p_plus, p_minus]
            .iter()
            .filter(|&&p| p > 1e-14)
            .map(|&p| -p * p.ln())
            .sum::<f64>();
        let entropy_max = if raw_entropy == 0.0 { 0.0 } else { raw_entropy };
        rows.push(vec![
            if eta.is_finite() {
                Cell::Float(eta)
            } else {
                Cell::Missing
            },
            Cell::Int(m.into()),
            Cell::Float(s.omega),
            Cell::Float(minimum.time),
            Cell::Float(minimum.purity),
            Cell::Float(entropy_max),
        ]);
    }
    let mut meta = common_meta(resolved, "sweep");
    meta.insert(
        "m_list".into(),
        Value::from(m_list.iter().map(|&m| Value::from(m)).collect::<Vec<_>>()),
    );
    Ok(Output {
        meta,
        columns: &[
            "eta",
            "m",
            "omega",
            "t_first_min",
            "purity_min",
            "entropy_max",
        ],
        rows,
    })
}

fn cmd_verify(
    resolved: &Resolved,
    scenario: &str,
    threshold: f64,
    t_max: f64,
    steps: usize,
) -> Result<(Output, u8), CliError> {
    validate_grid(t_max, steps)?;
    if !threshold.is_finite() || threshold <= 0.0 {
        return Err(CliError::Usage(format!(
            "threshold must be positive, got {threshold}"
        )));
    }
    let names: Vec<&str> = if scenario == "all" {
        scenarios::BUILTIN_NAMES.to_vec()
    } else {
        vec![scenario]
    };
    let grid = time_grid(t_max, steps);
    let mut rows = Vec::with_capacity(names.len());
    let mut all_pass = true;
    for name in names {
        let scenario = scenarios::builtin(name, resolved.params, resolved.seed)?;
        let report = verify_against_analytic(&scenario, &grid)?;
        let pass = report.passes(threshold);
        all_pass &= pass;
        rows.push(vec![
            Cell::Text(report.scenario.clone()),
            Cell::Float(report.max_state),
            Cell::Float(report.max_spectrum),
            report.max_overlap.map_or(Cell::Missing, Cell::Float),
            Cell::Float(report.max_purity),
            Cell::Float(report.max_entropy),
            Cell::Float(report.max_schmidt),
            Cell::Bool(pass),
        ]);
    }
    let mut meta = common_meta(resolved, "verify");
    meta.insert("scenario".into(), Value::from(scenario));
    meta.insert("threshold".into(), json_float(threshold));
    meta.insert("t_max".into(), json_float(t_max));
    meta.insert("steps".into(), Value::from(steps as u64));
    let output = Output {
        meta,
        columns: &[
            "scenario",
            "max_state_dev",
            "max_spectrum_dev",
            "max_overlap_dev",
            "max_purity_dev",
            "max_entropy_dev",
            "max_schmidt_dev",
            "pass",
        ],
        rows,
    };
    Ok((output, if all_pass { 0 } else { 1 }))
}

/// Parses the amplitudes file format: one sector per line,
/// `m re(c) im(c) [re(up) im(up) re(down) im(down)]`, `#` comments.
///
/// Spinors default to spin-up and are normalized per line (their magnitude
/// folds into the amplitude); the amplitude vector is then normalized
/// globally, warning on stderr if the correction exceeds 1e-9.
fn parse_amplitudes(text: &str) -> Result<SuperposedState, CliError> {
    let mut entries: Vec<SectorEntry> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 3 && tokens.len() != 7 {
            return Err(CliError::Usage(format!(
                "amplitudes line {lineno}: expected 3 or 7 fields, got {}",
                tokens.len()
            )));
        }
        let m: i32 = tokens[0].parse().map_err(|_| {
            CliError::Usage(format!(
                "amplitudes line {lineno}: bad sector '{}'",
                tokens[0]
            ))
        })?;
        let mut nums = [0.0f64; 6];
        for (slot, token) in nums.iter_mut().zip(&tokens[1..]) {
            *slot = token.parse().map_err(|_| {
                CliError::Usage(format!("amplitudes line {lineno}: bad number '{token}'"))
            })?;
        }
        let mut amplitude = Complex64::new(nums[0], nums[1]);
        let spinor = if tokens.len() == 7 {
            let up = Complex64::new(nums[2], nums[3]);
            let down = Complex64::new(nums[4], nums[5]);
            let norm = (up.norm_sqr() + down.norm_sqr()).sqrt();
            if !norm.is_finite() || norm == 0.0 {
                return Err(CliError::Usage(format!(
                    "amplitudes line {lineno}: zero spinor"
                )));
            }
            amplitude *= norm;
            Spinor::new(up / norm, down / norm)
        } else {
            Spinor::UP
        };
        entries.push(SectorEntry {
            sector: SectorIndex(m),
            amplitude,
            spinor,
        });
    }
    if entries.is_empty() {
        return Err(CliError::Usage("amplitudes file lists no sectors".into()));
    }
    let total = entries
        .iter()
        .map(|e| e.amplitude.norm_sqr())
        .sum::<f64>()
        .sqrt();
    if !total.is_finite() || total == 0.0 {
        return Err(CliError::Usage(
            "amplitudes cannot be normalized (zero or non-finite norm)".into(),
        ));
    }
    if (total - 1.0).abs() > 1e-9 {
        eprintln!("warning: renormalized amplitudes (input norm {total:.6e})");
    }
    for entry in &mut entries {
        entry.amplitude /= total;
    }
    SuperposedState::new(entries, 0.0).map_err(CliError::from)
}

fn common_meta(resolved: &Resolved, command: &str) -> Map<String, Value> {
    let mut meta = Map::new();
    meta.insert("tool".into(), Value::from("spin-rotor"));
    meta.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
    meta.insert("command".into(), Value::from(command));
    meta.insert("inertia".into(), json_float(resolved.params.inertia()));
    meta.insert("delta".into(), json_float(resolved.params.delta()));
    meta.insert("coupling".into(), json_float(resolved.params.coupling()));
    meta.insert(
        "format".into(),
        Value::from(match resolved.format {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }),
    );
    meta.insert("seed".into(), Value::from(resolved.seed));
    meta
}

/// JSON number with 17 significant digits: enough to reproduce the f64
/// bit-exactly on parse.
fn json_float(x: f64) -> Value {
    let literal = format!("{x:.16e}");
    Value::Number(
        literal
            .parse()
            .expect("formatted float is a valid JSON number"),
    )
}

/// CSV float with 9 significant digits.
fn csv_float(x: f64) -> String {
    format!("{x:.8e}")
}

fn render_csv(output: &Output) -> String {
    let mut text = String::new();
    text.push_str(&output.columns.join(","));
    text.push('\n');
    for row in &output.rows {
        let mut first = true;
        for cell in row {
            if !first {
                text.push(',');
            }
            first = false;
            match cell {
                Cell::Int(v) => {
                    let _ = write!(text, "{v}");
                }
                Cell::Float(v) => text.push_str(&csv_float(*v)),
                Cell::Text(v) => text.push_str(v),
                Cell::Bool(v) => {
                    let _ = write!(text, "{v}");
                }
                Cell::Missing => {}
            }
        }
        text.push('\n');
    }
    text
}

fn render_json(output: &Output) -> String {
    let rows: Vec<Value> = output
        .rows
        .iter()
        .map(|row| {
            let mut object = Map::new();
            for (name, cell) in output.columns.iter().zip(row) {
                let value = match cell {
                    Cell::Int(v) => Value::from(*v),
                    Cell::Float(v) => json_float(*v),
                    Cell::Text(v) => Value::from(v.clone()),
                    Cell::Bool(v) => Value::from(*v),
                    Cell::Missing => Value::Null,
                };
                object.insert((*name).to_string(), value);
            }
            Value::Object(object)
        })
        .collect();
    let mut document = Map::new();
    document.insert("meta".into(), Value::Object(output.meta.clone()));
    document.insert("rows".into(), Value::from(rows));
    let mut text = serde_json::to_string_pretty(&Value::Object(document))
        .expect("document serialization cannot fail");
    text.push('\n');
    text
}

fn emit(resolved: &Resolved, output: Output) -> Result<(), CliError> {
    let text = match resolved.format {
        OutputFormat::Csv => render_csv(&output),
        OutputFormat::Json => render_json(&output),
    };
    match &resolved.output {
        Some(path) => fs::write(path, text)?,
        None => {
            let stdout = std::io::stdout();
            stdout.lock().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}
