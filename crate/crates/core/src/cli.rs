//! Command-line driver: runs pipeline stages and oracles over one or more
//! ω values and writes CSV or JSON reports.
//!
//! Exit codes: 0 on success, 2 for invalid configuration (flags or TOML
//! file), 3 when a numerical regime contract is violated, 1 for I/O errors.

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::dilute_gas::{self, SERIES_RELATIVE_CUTOFF};
use crate::fluctuation::{self, FluctuationError, MIN_ASYMPTOTIC_BOX, RESCALE_THRESHOLD};
use crate::instanton::{self, InstantonError, BOUNDARY_LAYER_V};
use crate::numerics;
use crate::potential::{Convention, Family, PotentialSpec};
use crate::spectrum_oracle::{self, GridSpec, OracleError, BOX_SENSITIVITY};

pub const DEFAULT_GRID_N: usize = 4000;
pub const DEFAULT_OMEGA: f64 = 1.0;
pub const DEFAULT_COUNT: usize = 3;
/// Default half box for determinant-type stages, in units of `1/ω`.
pub const DEFAULT_HALF_BOX_OMEGA: f64 = 8.0;
/// Default half box for the instanton profile, in units of `1/ω`.
pub const DEFAULT_PROFILE_HALF_BOX_OMEGA: f64 = 20.0;
pub const KINK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Instanton,
    Determinant,
    Gas,
    Spectrum,
    Compare,
    Sweep,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Instanton => "instanton",
            Command::Determinant => "determinant",
            Command::Gas => "gas",
            Command::Spectrum => "spectrum",
            Command::Compare => "compare",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    #[default]
    Schrodinger,
    Stability,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "triplewell", version, about = "Instanton analysis of the triple-well potential")]
pub struct Args {
    /// Stage to run (may also come from the config file)
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// One value or a comma-separated list
    #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
    pub omega: Option<Vec<f64>>,
    /// Half of the euclidean box T (determinant, gas, stability) or of the profile window
    #[arg(long, allow_negative_numbers = true)]
    pub half_box: Option<f64>,
    /// Grid points for the finite-difference oracles and profiles
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// canonical | literal
    #[arg(long)]
    pub convention: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Worker threads for sweeps
    #[arg(long)]
    pub jobs: Option<usize>,
    /// TOML file with defaults; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Stage executed per entry by `sweep`
    #[arg(long = "command", id = "sweep_command", value_enum)]
    pub sweep_command: Option<Command>,
    /// Number of eigenvalues for `spectrum`
    #[arg(long)]
    pub count: Option<usize>,
    /// Operator diagonalized by `spectrum`
    #[arg(long, value_enum)]
    pub operator: Option<Operator>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OmegaField {
    One(f64),
    Many(Vec<f64>),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    command: Option<Command>,
    omega: Option<OmegaField>,
    half_box: Option<f64>,
    grid_n: Option<usize>,
    convention: Option<String>,
    format: Option<Format>,
    output: Option<PathBuf>,
    jobs: Option<usize>,
    sweep_command: Option<Command>,
    count: Option<usize>,
    operator: Option<Operator>,
}

/// Fully resolved and validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub omegas: Vec<f64>,
    pub half_box: Option<f64>,
    pub grid_n: usize,
    pub convention: Convention,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub jobs: usize,
    pub sweep_command: Option<Command>,
    pub count: usize,
    pub operator: Operator,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical regime violated [{contract}]: {message}")]
    Numerical { contract: &'static str, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical { .. } => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<FluctuationError> for CliError {
    fn from(e: FluctuationError) -> Self {
        let contract = match e {
            FluctuationError::Overflow { .. } => "Overflow",
            FluctuationError::TooFewSteps(_) => "TooFewSteps",
            FluctuationError::ZeroModeVanishes { .. } => "ZeroModeVanishes",
            FluctuationError::AsymptoticRegimeViolated(_) => "AsymptoticRegimeViolated",
            FluctuationError::BoxOutsideGrid { .. } => "BoxOutsideGrid",
        };
        CliError::Numerical { contract, message: e.to_string() }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        let contract = match e {
            OracleError::BoxTooSmall { .. } => "BoxTooSmall",
            OracleError::TooFewPoints(_) => "TooFewPoints",
            OracleError::TooManyModes { .. } => "TooManyModes",
        };
        CliError::Numerical { contract, message: e.to_string() }
    }
}

impl From<InstantonError> for CliError {
    fn from(e: InstantonError) -> Self {
        let contract = match e {
            InstantonError::NonAdjacentMinima { .. } => "NonAdjacentMinima",
            InstantonError::QuadratureFailure { .. } => "QuadratureFailure",
            InstantonError::InsufficientTail(_) => "InsufficientTail",
            InstantonError::InvalidGrid => "InvalidGrid",
        };
        CliError::Numerical { contract, message: e.to_string() }
    }
}

/// Where a setting came from, for error messages.
enum Origin<'a> {
    Flag(&'static str),
    File { path: &'a Path, line: usize },
    Default,
}

impl Origin<'_> {
    fn error(&self, message: impl std::fmt::Display) -> CliError {
        match self {
            Origin::Flag(name) => CliError::Config(format!("--{name}: {message}")),
            Origin::File { path, line } => CliError::Config(format!("{}:{line}: {message}", path.display())),
            Origin::Default => CliError::Config(message.to_string()),
        }
    }
}

struct Source<'a> {
    path: Option<&'a Path>,
    text: &'a str,
}

impl<'a> Source<'a> {
    fn key_line(&self, key: &str) -> usize {
        self.text
            .lines()
            .position(|l| {
                let l = l.trim_start();
                l.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='))
            })
            .map_or(1, |i| i + 1)
    }

    fn pick<T>(&self, flag: Option<T>, file: Option<T>, name: &'static str, key: &str) -> (Option<T>, Origin<'a>) {
        match (flag, file, self.path) {
            (Some(v), _, _) => (Some(v), Origin::Flag(name)),
            (None, Some(v), Some(path)) => (Some(v), Origin::File { path, line: self.key_line(key) }),
            _ => (None, Origin::Default),
        }
    }
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn read_file_config(path: &Path) -> Result<(String, FileConfig), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: cannot read config file: {e}", path.display())))?;
    let parsed: FileConfig = toml::from_str(&text).map_err(|e| {
        let line = e.span().map_or(1, |s| line_of_offset(&text, s.start));
        CliError::Config(format!("{}:{line}: {}", path.display(), e.message()))
    })?;
    Ok((text, parsed))
}

fn positive(value: f64, origin: &Origin, what: &str) -> Result<f64, CliError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(origin.error(format!("{what} must be positive and finite, got {value}")))
    }
}

impl RunConfig {
    /// Merges flags over the optional config file and validates the result.
    pub fn resolve(args: &Args) -> Result<Self, CliError> {
        let (text, file) = match &args.config {
            Some(path) => {
                let (text, file) = read_file_config(path)?;
                (text, file)
            }
            None => (String::new(), FileConfig::default()),
        };
        let src = Source { path: args.config.as_deref(), text: &text };

        let (command, _) = src.pick(args.command, file.command, "command", "command");
        let command = command.ok_or_else(|| {
            CliError::Config("no command given (instanton|determinant|gas|spectrum|compare|sweep)".into())
        })?;

        let file_omega = file.omega.map(|o| match o {
            OmegaField::One(v) => vec![v],
            OmegaField::Many(v) => v,
        });
        let (omegas, origin) = src.pick(args.omega.clone(), file_omega, "omega", "omega");
        let omegas = omegas.unwrap_or_else(|| vec![DEFAULT_OMEGA]);
        if omegas.is_empty() {
            return Err(origin.error("omega list is empty"));
        }
        for &w in &omegas {
            positive(w, &origin, "omega")?;
        }

        let (half_box, origin) = src.pick(args.half_box, file.half_box, "half-box", "half_box");
        if let Some(h) = half_box {
            positive(h, &origin, "half box")?;
        }

        let (grid_n, origin) = src.pick(args.grid_n, file.grid_n, "grid-n", "grid_n");
        let grid_n = grid_n.unwrap_or(DEFAULT_GRID_N);
        if grid_n < 100 {
            return Err(origin.error(format!("grid needs at least 100 points, got {grid_n}")));
        }

        let (convention, origin) = src.pick(args.convention.clone(), file.convention, "convention", "convention");
        let convention = match convention {
            Some(c) => c.parse::<Convention>().map_err(|e| origin.error(e))?,
            None => Convention::default(),
        };

        let (format, _) = src.pick(args.format, file.format, "format", "format");
        let (output, _) = src.pick(args.output.clone(), file.output, "output", "output");

        let (jobs, origin) = src.pick(args.jobs, file.jobs, "jobs", "jobs");
        let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        if jobs == 0 {
            return Err(origin.error("jobs must be at least 1"));
        }

        let (sweep_command, origin) = src.pick(args.sweep_command, file.sweep_command, "command", "sweep_command");
        if command == Command::Sweep {
            match sweep_command {
                None => return Err(CliError::Config("sweep needs --command <stage>".into())),
                Some(Command::Sweep) => return Err(origin.error("sweep cannot run itself")),
                Some(_) => {}
            }
        }

        let (count, origin) = src.pick(args.count, file.count, "count", "count");
        let count = count.unwrap_or(DEFAULT_COUNT);
        if count == 0 {
            return Err(origin.error("count must be at least 1"));
        }

        let (operator, _) = src.pick(args.operator, file.operator, "operator", "operator");

        Ok(Self {
            command,
            omegas,
            half_box,
            grid_n,
            convention,
            format: format.unwrap_or_default(),
            output,
            jobs,
            sweep_command,
            count,
            operator: operator.unwrap_or_default(),
        })
    }

    /// The stage actually evaluated per ω.
    pub fn stage(&self) -> Command {
        match self.command {
            Command::Sweep => self.sweep_command.expect("validated"),
            c => c,
        }
    }

    fn spec(&self, omega: f64) -> PotentialSpec {
        PotentialSpec::new(Family::TripleWell, omega, self.convention)
    }

    fn half_box_for(&self, omega_eff: f64, scale: f64) -> f64 {
        self.half_box.unwrap_or(scale / omega_eff)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.11e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(round12(*x)).map_or(Value::Null, Value::Number),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::from(s.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub meta: Vec<(String, Value)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let v = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("# {k}={v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn to_json(&self) -> String {
        let meta: Map<String, Value> = self.meta.iter().cloned().collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    self.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.json())).collect();
                Value::Object(obj)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("meta".into(), Value::Object(meta));
        doc.insert("rows".into(), Value::Array(rows));
        let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("json serializes");
        s.push('\n');
        s
    }
}

fn columns(stage: Command, operator: Operator) -> Vec<&'static str> {
    match stage {
        Command::Instanton => vec!["omega", "tau", "x_c", "dx_c", "x_o"],
        Command::Determinant => vec![
            "omega",
            "T",
            "f_end",
            "g_end",
            "lambda_low",
            "raw_ratio",
            "reduced_ratio",
            "reduced_bruteforce",
            "relative_difference",
        ],
        Command::Gas => vec!["omega", "d", "E0", "E1", "E2", "d_pipeline", "d_ratio"],
        Command::Spectrum => {
            let extent = match operator {
                Operator::Schrodinger => "L",
                Operator::Stability => "T",
            };
            vec!["omega", extent, "N", "index", "eigenvalue"]
        }
        Command::Compare => vec![
            "omega",
            "E0_semi",
            "E1_semi",
            "E2_semi",
            "E0_num",
            "E1_num",
            "E2_num",
            "splitting_ratio",
            "e1_parity",
        ],
        Command::Sweep => unreachable!("sweep is resolved to its stage"),
    }
}

fn meta(cfg: &RunConfig) -> Vec<(String, Value)> {
    let stage = cfg.stage();
    let mut m: Vec<(String, Value)> = vec![
        ("command".into(), Value::from(cfg.command.as_str())),
        ("stage".into(), Value::from(stage.as_str())),
        ("convention".into(), Value::from(cfg.convention.as_str())),
        ("grid_n".into(), Value::from(cfg.grid_n)),
        ("half_box".into(), cfg.half_box.map_or(Value::from("auto"), Value::from)),
    ];
    let mut tol = |k: &str, v: f64| m.push((k.into(), Value::from(v)));
    match stage {
        Command::Instanton => {
            tol("kink_tolerance", KINK_TOLERANCE);
            tol("boundary_layer_v", BOUNDARY_LAYER_V);
        }
        Command::Determinant => {
            tol("rescale_threshold", RESCALE_THRESHOLD);
            tol("min_asymptotic_box", MIN_ASYMPTOTIC_BOX);
        }
        Command::Gas => {
            tol("series_relative_cutoff", SERIES_RELATIVE_CUTOFF);
            tol("min_asymptotic_box", MIN_ASYMPTOTIC_BOX);
        }
        Command::Spectrum | Command::Compare => {
            tol("box_sensitivity", BOX_SENSITIVITY);
            m.push(("richardson_grids".into(), Value::from("N,2N-1")));
        }
        Command::Sweep => unreachable!(),
    }
    if stage == Command::Spectrum {
        let op = match cfg.operator {
            Operator::Schrodinger => "schrodinger",
            Operator::Stability => "stability",
        };
        m.push(("operator".into(), Value::from(op)));
        m.push(("count".into(), Value::from(cfg.count)));
    }
    m
}

fn instanton_rows(cfg: &RunConfig, omega: f64) -> Result<Vec<Vec<Cell>>, CliError> {
    let spec = cfg.spec(omega);
    let half = cfg.half_box_for(spec.effective_omega(), DEFAULT_PROFILE_HALF_BOX_OMEGA);
    let grid = numerics::uniform_grid(-half, half, cfg.grid_n - 1);
    let profile = instanton::solve_bogomolny(&spec, 0.0, 1.0, &grid, KINK_TOLERANCE)?;
    let x_o = instanton::zero_mode(&profile);
    Ok((0..grid.len())
        .map(|i| {
            vec![
                Cell::Num(omega),
                Cell::Num(grid[i]),
                Cell::Num(profile.x_c[i]),
                Cell::Num(profile.dx_c[i]),
                Cell::Num(x_o[i]),
            ]
        })
        .collect())
}

fn determinant_rows(cfg: &RunConfig, omega: f64) -> Result<Vec<Vec<Cell>>, CliError> {
    let w = cfg.spec(omega).effective_omega();
    let half = cfg.half_box_for(w, DEFAULT_HALF_BOX_OMEGA);
    let r = fluctuation::triple_well_determinants(w, half)?;
    let profile = fluctuation::triple_well_profile(w, half);
    let grid = GridSpec::new(half, cfg.grid_n)?;
    let nu = profile.potential.reference_frequency();
    let bf = spectrum_oracle::determinant_ratio_bruteforce(&|t| profile.curvature_at(t), nu, half, &grid);
    Ok(vec![vec![
        Cell::Num(omega),
        Cell::Num(2.0 * half),
        Cell::Num(r.f_end),
        Cell::Num(r.g_end),
        Cell::Num(r.lambda_low),
        Cell::Num(r.raw_ratio),
        Cell::Num(r.reduced_ratio),
        Cell::Num(bf.reduced),
        Cell::Num(bf.reduced / r.reduced_ratio - 1.0),
    ]])
}

fn gas_rows(cfg: &RunConfig, omega: f64) -> Result<Vec<Vec<Cell>>, CliError> {
    let w = cfg.spec(omega).effective_omega();
    let half = cfg.half_box_for(w, DEFAULT_HALF_BOX_OMEGA);
    let d = dilute_gas::instanton_density(w);
    let e = dilute_gas::energy_levels(w);
    let reduced = fluctuation::triple_well_determinants(w, half)?.reduced_ratio;
    let d_pipeline = dilute_gas::pipeline_density(w, reduced);
    Ok(vec![vec![
        Cell::Num(omega),
        Cell::Num(d),
        Cell::Num(e.e0),
        Cell::Num(e.e1),
        Cell::Num(e.e2),
        Cell::Num(d_pipeline),
        Cell::Num(d_pipeline / d),
    ]])
}

fn spectrum_rows(cfg: &RunConfig, omega: f64) -> Result<Vec<Vec<Cell>>, CliError> {
    let (extent, values) = match cfg.operator {
        Operator::Schrodinger => {
            let (levels, grid) = spectrum_oracle::diagonalize_schrodinger_auto(&cfg.spec(omega), cfg.grid_n, cfg.count)?;
            (grid.half_width, levels)
        }
        Operator::Stability => {
            let w = cfg.spec(omega).effective_omega();
            let half = cfg.half_box_for(w, DEFAULT_HALF_BOX_OMEGA);
            let profile = fluctuation::triple_well_profile(w, half);
            let grid = GridSpec::new(half, cfg.grid_n)?;
            (2.0 * half, spectrum_oracle::diagonalize_stability(&profile, half, &grid, cfg.count)?)
        }
    };
    Ok(values
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            vec![Cell::Num(omega), Cell::Num(extent), Cell::Int(cfg.grid_n as i64), Cell::Int(j as i64), Cell::Num(v)]
        })
        .collect())
}

/// One row of the semiclassical-versus-exact comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub semiclassical: dilute_gas::SpectrumTriplet,
    pub numerical: [f64; 3],
    pub splitting_ratio: f64,
    pub e1_parity: f64,
}

pub fn compare(spec: &PotentialSpec, points: usize) -> Result<Comparison, CliError> {
    let w = spec.effective_omega();
    let semiclassical = dilute_gas::energy_levels(w);
    let (levels, grid) = spectrum_oracle::diagonalize_schrodinger_auto(spec, points, 3)?;
    let parities = spectrum_oracle::schrodinger_parities(spec, &grid, 3)?;
    let split = w * dilute_gas::instanton_density(w);
    Ok(Comparison {
        semiclassical,
        numerical: [levels[0], levels[1], levels[2]],
        splitting_ratio: (levels[2] - levels[0]) / (2.0 * split),
        e1_parity: parities[1],
    })
}

fn compare_rows(cfg: &RunConfig, omega: f64) -> Result<Vec<Vec<Cell>>, CliError> {
    let c = compare(&cfg.spec(omega), cfg.grid_n)?;
    Ok(vec![vec![
        Cell::Num(omega),
        Cell::Num(c.semiclassical.e0),
        Cell::Num(c.semiclassical.e1),
        Cell::Num(c.semiclassical.e2),
        Cell::Num(c.numerical[0]),
        Cell::Num(c.numerical[1]),
        Cell::Num(c.numerical[2]),
        Cell::Num(c.splitting_ratio),
        Cell::Num(c.e1_parity),
    ]])
}

fn rows_for(cfg: &RunConfig, omega: f64) -> Result<Vec<Vec<Cell>>, CliError> {
    match cfg.stage() {
        Command::Instanton => instanton_rows(cfg, omega),
        Command::Determinant => determinant_rows(cfg, omega),
        Command::Gas => gas_rows(cfg, omega),
        Command::Spectrum => spectrum_rows(cfg, omega),
        Command::Compare => compare_rows(cfg, omega),
        Command::Sweep => unreachable!(),
    }
}

/// Builds the report. Sweeps evaluate entries on a pool of `jobs` threads;
/// rows are assembled in input order either way.
pub fn build_report(cfg: &RunConfig) -> Result<Report, CliError> {
    let per_omega: Vec<Result<Vec<Vec<Cell>>, CliError>> = if cfg.command == Command::Sweep {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| CliError::Io(e.to_string()))?;
        pool.install(|| cfg.omegas.par_iter().map(|&w| rows_for(cfg, w)).collect())
    } else {
        cfg.omegas.iter().map(|&w| rows_for(cfg, w)).collect()
    };
    let mut rows = Vec::new();
    for r in per_omega {
        rows.extend(r?);
    }
    Ok(Report { meta: meta(cfg), columns: columns(cfg.stage(), cfg.operator), rows })
}

/// Resolves, runs and writes the report; returns the rendered text.
pub fn run(args: &Args) -> Result<String, CliError> {
    let cfg = RunConfig::resolve(args)?;
    let text = build_report(&cfg)?.render(cfg.format);
    if let Some(path) = &cfg.output {
        std::fs::write(path, &text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(text)
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&args) {
        Ok(text) => {
            if args.output.is_none() {
                print!("{text}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
