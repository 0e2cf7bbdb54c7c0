//! Command-line front end for the spectral toolkit.
//!
//! Five subcommands cover the two routes the library provides and the
//! comparisons between them:
//!
//! * `spectrum`   — closed-form energy levels over a label grid;
//! * `verify`     — numerical diagonalization on a truncated basis,
//!   adjudicating which closed-form variant the numerics match;
//! * `scan`       — closed-form levels swept along one physical parameter;
//! * `critical`   — numerical location of a spectral critical point against
//!   its closed-form prediction;
//! * `fock-check` — operator-algebra self-checks of the basis machinery.
//!
//! Exit codes: `0` success (including `--help`/`--version`); `1` usage,
//! validation, or request errors; `2` a check that ran and disagreed (no
//! matching variant, failed algebra check, no sign change while bracketing,
//! non-Hermitian assembly); `3` physically ill-posed or out-of-domain
//! parameter regimes.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use ncspectra_core::analytic::{self, AnalyticModel, LevelIndex};
use ncspectra_core::fock;
use ncspectra_core::oracle::{self, HamiltonianModel};
use ncspectra_core::params::{derive, validate, PhysParams};
use ncspectra_core::scan::{self, SweepParameter, SweepSpec};
use ncspectra_core::CoreError;

/// CLI-level error: either a library error or a usage problem local to the
/// front end (bad flag value, malformed config, missing mass).
#[derive(Debug)]
pub enum CliError {
    Core(CoreError),
    Usage(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(err) => write!(f, "{err}"),
            CliError::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        CliError::Core(err)
    }
}

/// Map an error to the process exit code. Ill-posed or out-of-domain
/// physics is `3`, disagreement findings are `2`, everything else is a
/// usage/request error, `1`.
fn exit_code(err: &CliError) -> u8 {
    match err {
        CliError::Usage(_) => 1,
        CliError::Core(core) => match core {
            CoreError::IllPosed(_)
            | CoreError::InvalidField(_)
            | CoreError::NotAtCriticalPoint { .. } => 3,
            CoreError::NoSignChange(_) | CoreError::NotHermitian { .. } => 2,
            _ => 1,
        },
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "ncspectra",
    version,
    about = "Spectra of the Landau problem and the Klein-Gordon oscillator in \
             non-commutative complex space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print closed-form energy levels over a label grid
    Spectrum(SpectrumArgs),
    /// Diagonalize a model numerically and report which closed-form variant it matches
    Verify(VerifyArgs),
    /// Sweep one physical parameter and tabulate levels and spin splitting
    Scan(ScanArgs),
    /// Locate a spectral critical point numerically and compare it with its closed form
    Critical(CriticalArgs),
    /// Run the operator-algebra self-checks of the truncated-basis machinery
    FockCheck(FockCheckArgs),
}

/// Physical parameters shared by every subcommand. Each may come from the
/// command line or from `--config`; flags override the file.
#[derive(Args, Debug, Clone)]
struct PhysArgs {
    /// Mass m > 0 (energy units); required unless the config file sets it
    #[arg(long, allow_negative_numbers = true, help_heading = "Physical parameters")]
    m: Option<f64>,

    /// Charge coupling e > 0 [default: 1]
    #[arg(long, allow_negative_numbers = true, help_heading = "Physical parameters")]
    e: Option<f64>,

    /// Magnetic field strength B, any real [default: 0; fock-check: 1]
    #[arg(long = "B", allow_negative_numbers = true, help_heading = "Physical parameters")]
    b: Option<f64>,

    /// Oscillator frequency omega >= 0 [default: 0]
    #[arg(long, allow_negative_numbers = true, help_heading = "Physical parameters")]
    omega: Option<f64>,

    /// Non-commutativity parameter theta, any real [default: 0]
    #[arg(long, allow_negative_numbers = true, help_heading = "Physical parameters")]
    theta: Option<f64>,

    /// Spin projection, exactly +0.5 or -0.5 [default: 0.5]
    #[arg(long = "s-z", allow_negative_numbers = true, help_heading = "Physical parameters")]
    s_z: Option<f64>,

    /// `key = value` file supplying defaults for these parameters (and
    /// `format` where the subcommand prints tables)
    #[arg(long, value_name = "PATH", help_heading = "Physical parameters")]
    config: Option<PathBuf>,
}

/// Fallback values applied after the config file.
struct PhysDefaults {
    m: Option<f64>,
    e: f64,
    b: f64,
    omega: f64,
    theta: f64,
    s_z: f64,
}

/// Spectrum, verify, scan, and critical leave the field off by default.
const STANDARD_DEFAULTS: PhysDefaults =
    PhysDefaults { m: None, e: 1.0, b: 0.0, omega: 0.0, theta: 0.0, s_z: 0.5 };

/// The algebra checks exercise the field-coupled frame, so `fock-check`
/// defaults to unit mass and unit field and runs without any flags.
const FOCK_DEFAULTS: PhysDefaults =
    PhysDefaults { m: Some(1.0), e: 1.0, b: 1.0, omega: 0.0, theta: 0.0, s_z: 0.5 };

struct Resolved {
    phys: PhysParams,
    format_from_config: Option<String>,
}

/// Merge command line, config file, and defaults into a validated parameter
/// set. `allow_format` admits a `format` key in the config for subcommands
/// that print tables.
fn resolve_phys(
    args: &PhysArgs,
    defaults: &PhysDefaults,
    allow_format: bool,
) -> Result<Resolved, CliError> {
    let cfg = match &args.config {
        Some(path) => Some(config::load(path)?),
        None => None,
    };
    let mut allowed: Vec<&str> = config::PHYS_KEYS.to_vec();
    if allow_format {
        allowed.push("format");
    }
    if let Some(cfg) = &cfg {
        cfg.check_keys(&allowed)?;
    }
    let from_cfg = |key: &str| -> Result<Option<f64>, CliError> {
        match &cfg {
            Some(cfg) => cfg.get_f64(key),
            None => Ok(None),
        }
    };
    let Some(m) = args.m.or(from_cfg("m")?).or(defaults.m) else {
        return Err(CliError::Usage(
            "the mass is required: pass --m or set `m` in the config file".to_string(),
        ));
    };
    let e = args.e.or(from_cfg("e")?).unwrap_or(defaults.e);
    let b = args.b.or(from_cfg("B")?).unwrap_or(defaults.b);
    let omega = args.omega.or(from_cfg("omega")?).unwrap_or(defaults.omega);
    let theta = args.theta.or(from_cfg("theta")?).unwrap_or(defaults.theta);
    let s_z = args.s_z.or(from_cfg("s-z")?).unwrap_or(defaults.s_z);

    let phys = PhysParams::new(m, e, b, omega, theta, s_z);
    let violations = validate(&phys);
    if !violations.is_empty() {
        return Err(CliError::Usage(format!(
            "invalid physical parameters: {}",
            violations.join("; ")
        )));
    }
    let format_from_config =
        cfg.as_ref().and_then(|cfg| cfg.get_raw("format")).map(str::to_string);
    Ok(Resolved { phys, format_from_config })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum OutputFormat {
    Csv,
    Json,
}

fn resolve_format(
    flag: &Option<String>,
    from_config: Option<String>,
) -> Result<OutputFormat, CliError> {
    let chosen = flag.clone().or(from_config).unwrap_or_else(|| "csv".to_string());
    match chosen.as_str() {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(CliError::Usage(format!(
            "unknown format `{other}`; expected csv or json"
        ))),
    }
}

fn parse_schedule(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(str::trim)
        .map(|piece| {
            piece.parse::<usize>().map_err(|_| {
                CliError::Usage(format!("schedule entry `{piece}` is not a cutoff"))
            })
        })
        .collect()
}

fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(str::trim)
        .map(|piece| {
            piece.parse::<f64>().map_err(|_| {
                CliError::Usage(format!("grid entry `{piece}` is not a number"))
            })
        })
        .collect()
}

/// Expand `n1,n2;n1,n2;...` into level labels, each pair in both spin
/// orientations (spin-up column first).
fn parse_levels(text: &str) -> Result<Vec<LevelIndex>, CliError> {
    let mut levels = Vec::new();
    for piece in text.split(';') {
        let piece = piece.trim();
        let Some((n1, n2)) = piece.split_once(',') else {
            return Err(CliError::Usage(format!(
                "level `{piece}` is not an `n1,n2` pair"
            )));
        };
        let n1: u32 = n1.trim().parse().map_err(|_| {
            CliError::Usage(format!("level `{piece}`: n1 is not a small integer"))
        })?;
        let n2: u32 = n2.trim().parse().map_err(|_| {
            CliError::Usage(format!("level `{piece}`: n2 is not a small integer"))
        })?;
        for sigma in [1i8, -1] {
            levels.push(LevelIndex::new(n1, n2, sigma)?);
        }
    }
    Ok(levels)
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    /// Model: landau-nc, landau-critical, oscillator-commutative,
    /// oscillator-nc, or oscillator-critical
    #[arg(long)]
    model: String,

    #[command(flatten)]
    phys: PhysArgs,

    /// Largest n1 of the label grid (rectangular-grid models)
    #[arg(long, default_value_t = 5)]
    n1_max: u32,

    /// Largest n2 of the label grid (rectangular-grid models)
    #[arg(long, default_value_t = 5)]
    n2_max: u32,

    /// Largest n of the diagonal label ladder (critical-point models)
    #[arg(long, default_value_t = 5)]
    n_max: u32,

    /// Substitute the critical field exactly instead of requiring --B to
    /// sit on it (oscillator-critical only)
    #[arg(long)]
    at_critical: bool,

    /// Output format: csv or json [default: csv]
    #[arg(long, value_name = "csv|json")]
    format: Option<String>,
}

fn run_spectrum(args: SpectrumArgs) -> Result<u8, CliError> {
    let resolved = resolve_phys(&args.phys, &STANDARD_DEFAULTS, true)?;
    let format = resolve_format(&args.format, resolved.format_from_config)?;
    let model = AnalyticModel::parse(&args.model)?;
    let phys = resolved.phys;
    let table = match model {
        AnalyticModel::LandauNc => {
            analytic::landau_nc_levels(&phys, args.n1_max, args.n2_max)?
        }
        AnalyticModel::LandauCritical => {
            analytic::landau_critical_levels(&phys, args.n_max)?
        }
        AnalyticModel::OscillatorCommutative => {
            analytic::oscillator_commutative_levels(&phys, args.n1_max, args.n2_max)?
        }
        AnalyticModel::OscillatorNc => {
            analytic::oscillator_nc_levels(&phys, args.n1_max, args.n2_max)?
        }
        AnalyticModel::OscillatorCritical => {
            analytic::oscillator_critical_levels(&phys, args.n_max, args.at_critical)?
        }
    };
    match format {
        OutputFormat::Csv => print!("{}", output::spectrum_csv(&table)),
        OutputFormat::Json => print!("{}", output::json_envelope("spectrum", &table)),
    }
    Ok(0)
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Model: landau-commutative, landau-nc, oscillator-commutative, or
    /// oscillator-nc
    #[arg(long)]
    model: String,

    #[command(flatten)]
    phys: PhysArgs,

    /// Number of lowest levels to track
    #[arg(long, default_value_t = 6)]
    k: usize,

    /// Largest residual at which a candidate formula still counts as a match
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,

    /// Comma-separated strictly ascending per-mode cutoffs
    #[arg(long, default_value = "16,24,32,40")]
    schedule: String,

    /// Ladder frame length scale; defaults to the model's matched frame
    #[arg(long, allow_negative_numbers = true)]
    l_ref: Option<f64>,
}

/// The verification targets: the two commutative baselines and the two
/// deformed models in their effective-parameter form. (The shifted
/// assemblies and critical points are reached through the library API; they
/// are comparison tools, not adjudication targets.)
fn verify_model(name: &str) -> Result<HamiltonianModel, CliError> {
    match name {
        "landau-commutative" => Ok(HamiltonianModel::LandauCommutative),
        "landau-nc" => Ok(HamiltonianModel::LandauNcExpanded),
        "oscillator-commutative" => Ok(HamiltonianModel::OscillatorCommutative),
        "oscillator-nc" => Ok(HamiltonianModel::OscillatorNcExpanded),
        other => Err(CliError::Usage(format!(
            "unknown verify model `{other}`; expected landau-commutative, landau-nc, \
             oscillator-commutative, or oscillator-nc"
        ))),
    }
}

fn run_verify(args: VerifyArgs) -> Result<u8, CliError> {
    let resolved = resolve_phys(&args.phys, &STANDARD_DEFAULTS, false)?;
    let model = verify_model(&args.model)?;
    let schedule = parse_schedule(&args.schedule)?;
    let report =
        oracle::verify(model, &resolved.phys, args.k, args.tol, &schedule, args.l_ref)?;
    print!("{}", output::json_envelope("verify", &report));
    Ok(if report.matched_variant.is_some() { 0 } else { 2 })
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// Model: landau-nc, landau-critical, oscillator-commutative,
    /// oscillator-nc, or oscillator-critical
    #[arg(long)]
    model: String,

    #[command(flatten)]
    phys: PhysArgs,

    /// Parameter to sweep: theta, B, omega, or m
    #[arg(long)]
    parameter: String,

    /// Comma-separated strictly ascending grid of parameter values
    #[arg(long, allow_hyphen_values = true)]
    grid: String,

    /// Semicolon-separated `n1,n2` label pairs; each expands to both spin
    /// orientations
    #[arg(long, default_value = "0,0")]
    levels: String,

    /// Output format: csv or json [default: csv]
    #[arg(long, value_name = "csv|json")]
    format: Option<String>,
}

fn run_scan(args: ScanArgs) -> Result<u8, CliError> {
    let resolved = resolve_phys(&args.phys, &STANDARD_DEFAULTS, true)?;
    let format = resolve_format(&args.format, resolved.format_from_config)?;
    let spec = SweepSpec {
        model: AnalyticModel::parse(&args.model)?,
        base: resolved.phys,
        parameter: SweepParameter::parse(&args.parameter)?,
        grid: parse_grid(&args.grid)?,
        levels: parse_levels(&args.levels)?,
    };
    let rows = scan::sweep(&spec)?;
    match format {
        OutputFormat::Csv => print!("{}", output::scan_csv(&spec, &rows)),
        OutputFormat::Json => {
            let data = serde_json::json!({
                "model": spec.model.id(),
                "parameter": spec.parameter.id(),
                "levels": spec.levels,
                "rows": rows,
            });
            print!("{}", output::json_envelope("scan", &data));
        }
    }
    Ok(0)
}

#[derive(Args, Debug)]
struct CriticalArgs {
    /// Model: landau-nc or oscillator-nc
    #[arg(long)]
    model: String,

    #[command(flatten)]
    phys: PhysArgs,

    /// Parameter whose critical value to locate: theta or B
    #[arg(long)]
    parameter: String,

    /// Output format: csv or json [default: csv]
    #[arg(long, value_name = "csv|json")]
    format: Option<String>,
}

fn run_critical(args: CriticalArgs) -> Result<u8, CliError> {
    let resolved = resolve_phys(&args.phys, &STANDARD_DEFAULTS, true)?;
    let format = resolve_format(&args.format, resolved.format_from_config)?;
    let model = AnalyticModel::parse(&args.model)?;
    let parameter = SweepParameter::parse(&args.parameter)?;
    let report = scan::locate_critical(model, &resolved.phys, parameter)?;
    match format {
        OutputFormat::Csv => print!("{}", output::critical_csv(&report)),
        OutputFormat::Json => print!("{}", output::json_envelope("critical", &report)),
    }
    Ok(0)
}

#[derive(Args, Debug)]
struct FockCheckArgs {
    #[command(flatten)]
    phys: PhysArgs,

    /// Per-mode cutoff of the truncated basis
    #[arg(long, default_value_t = 16)]
    n: usize,

    /// Levels excluded near the truncation edge [default: cutoff/5, rounded up]
    #[arg(long)]
    margin: Option<usize>,

    /// Ladder frame length scale [default: 1/sqrt(m * max(omega, omega_c, 1))]
    #[arg(long, allow_negative_numbers = true)]
    l_ref: Option<f64>,

    /// Frame constant for the field-coupled ladder pair [default:
    /// e*B_tilde, or 1 when that is not positive]
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,

    /// Output format: csv or json [default: csv]
    #[arg(long, value_name = "csv|json")]
    format: Option<String>,
}

fn run_fock_check(args: FockCheckArgs) -> Result<u8, CliError> {
    let resolved = resolve_phys(&args.phys, &FOCK_DEFAULTS, true)?;
    let format = resolve_format(&args.format, resolved.format_from_config)?;
    let phys = resolved.phys;
    let d = derive(&phys);
    let margin = args.margin.unwrap_or_else(|| fock::default_margin(args.n));
    let l_ref = args
        .l_ref
        .unwrap_or_else(|| 1.0 / (phys.m * phys.omega.max(d.omega_c).max(1.0)).sqrt());
    let beta = args.beta.unwrap_or_else(|| {
        let framed = phys.e * d.b_tilde;
        if framed > 0.0 {
            framed
        } else {
            1.0
        }
    });
    let report = fock::algebra_suite(args.n, l_ref, margin, phys.theta, beta)?;
    match format {
        OutputFormat::Csv => print!("{}", output::fock_check_csv(&report)),
        OutputFormat::Json => print!("{}", output::json_envelope("fock-check", &report)),
    }
    Ok(if report.all_pass { 0 } else { 2 })
}

fn run(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Spectrum(args) => run_spectrum(args),
        Command::Verify(args) => run_verify(args),
        Command::Scan(args) => run_scan(args),
        Command::Critical(args) => run_critical(args),
        Command::FockCheck(args) => run_fock_check(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0u8,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn levels_expand_to_both_spins_in_order() {
        let levels = parse_levels("0,0;2,1").unwrap();
        let as_tuples: Vec<_> =
            levels.iter().map(|l| (l.n1, l.n2, l.sigma_z)).collect();
        assert_eq!(as_tuples, vec![(0, 0, 1), (0, 0, -1), (2, 1, 1), (2, 1, -1)]);
        assert!(parse_levels("3").is_err());
        assert!(parse_levels("1,x").is_err());
    }

    #[test]
    fn schedules_and_grids_parse_or_complain() {
        assert_eq!(parse_schedule("16, 24,32").unwrap(), vec![16, 24, 32]);
        assert!(parse_schedule("16,big").is_err());
        assert_eq!(parse_grid("-1.5,0,2e-1").unwrap(), vec![-1.5, 0.0, 0.2]);
        assert!(parse_grid("").is_err());
    }

    #[test]
    fn exit_codes_split_by_error_family() {
        let ill = CliError::Core(CoreError::IllPosed("x".into()));
        let field = CliError::Core(CoreError::InvalidField("x".into()));
        let sign = CliError::Core(CoreError::NoSignChange("x".into()));
        let usage = CliError::Usage("x".into());
        let request = CliError::Core(CoreError::InvalidRequest("x".into()));
        assert_eq!(exit_code(&ill), 3);
        assert_eq!(exit_code(&field), 3);
        assert_eq!(exit_code(&sign), 2);
        assert_eq!(exit_code(&usage), 1);
        assert_eq!(exit_code(&request), 1);
    }

    #[test]
    fn format_resolution_prefers_the_flag() {
        assert_eq!(
            resolve_format(&Some("json".into()), Some("csv".into())).unwrap(),
            OutputFormat::Json
        );
        assert_eq!(resolve_format(&None, Some("json".into())).unwrap(), OutputFormat::Json);
        assert_eq!(resolve_format(&None, None).unwrap(), OutputFormat::Csv);
        assert!(resolve_format(&Some("yaml".into()), None).is_err());
    }
}
