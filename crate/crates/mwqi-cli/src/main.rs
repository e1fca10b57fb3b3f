//! Command-line front end for the mwqi simulator.
//!
//! Loads a parameter preset and optional configuration overlay, evaluates
//! single operating points or grids in parallel, and emits CSV or a
//! human-readable report. All floating-point columns carry 12 significant
//! digits; sweep output is byte-identical for identical inputs regardless
//! of the thread count.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use mwqi::config::{parse_config_str, preset_by_name, render_config, Background, ConfigValues};
use mwqi::converter::{
    coefficients_lossless, coefficients_lossy, coefficients_spectral, stability, IoCoefficients,
    KappaRatios, StabilityReport,
};
use mwqi::params::{
    drives_for_cooperativities, occupancies, planck_occupancy, PhysicalParams, ThermalOccupancies,
};
use mwqi::receiver::{
    entanglement_threshold, receiver_moments, BackgroundConvention, ReceiverStats, TargetScenario,
};
use mwqi::source::{source_measures, source_moments, JointSourceState, PerPhotonMeasures};

const SOURCE_HEADER: &str = "Gamma_w,Gamma_o,stable,metric_E,E_N_per_photon,I_fwd_per_photon,I_rev_per_photon,D_w_o_per_photon,D_o_w_per_photon";
const DETECT_HEADER: &str = "M,snr_qi,snr_coh,log10_p_qi,log10_p_coh,F";
const ADVANTAGE_GRID_HEADER: &str = "Gamma_w,Gamma_o,stable,F";
const ADVANTAGE_ETA_HEADER: &str = "eta,F";

// ---------------------------------------------------------------------------
// Command-line definition

#[derive(Parser)]
#[command(
    name = "mwqi",
    version,
    about = "Electro-opto-mechanical entangled-microwave-source and quantum-illumination sweeps",
    after_help = "Exit codes: 0 success, 1 usage error, 2 configuration error, \
                  3 unstable operating point (point command only)."
)]
struct Cli {
    /// Built-in parameter preset used as the base layer.
    #[arg(long, global = true, default_value = "fig2")]
    preset: String,

    /// Configuration file layered over the preset (later keys win).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Converter model fidelity.
    #[arg(long, global = true, value_enum, default_value_t = FidelityArg::Lossless)]
    fidelity: FidelityArg,

    /// Sideband offset in rad/s (spectral fidelity only).
    #[arg(long, global = true, default_value_t = 0.0)]
    omega: f64,

    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for sweeps (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FidelityArg {
    /// Narrowband carrier limit, no intrinsic cavity losses.
    Lossless,
    /// Narrowband carrier limit with intrinsic-loss legs.
    Lossy,
    /// Full frequency-dependent coefficients at the --omega offset.
    Spectral,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep source-quality measures over a cooperativity grid (CSV).
    Source {
        /// Microwave cooperativity: VALUE or MIN:MAX:N[:lin|log].
        #[arg(long = "gamma-w")]
        gamma_w: Option<AxisSpec>,
        /// Optical cooperativity: VALUE or MIN:MAX:N[:lin|log].
        #[arg(long = "gamma-o")]
        gamma_o: Option<AxisSpec>,
    },
    /// Detection-error curves against the integrated mode count (CSV).
    Detect {
        /// Microwave cooperativity of the operating point.
        #[arg(long = "gamma-w")]
        gamma_w: Option<f64>,
        /// Optical cooperativity of the operating point.
        #[arg(long = "gamma-o")]
        gamma_o: Option<f64>,
        /// Target reflectivity (0 <= eta < 1).
        #[arg(long)]
        eta: Option<f64>,
        /// Background brightness as a photon occupancy.
        #[arg(long = "n-b", conflicts_with = "t_b")]
        n_b: Option<f64>,
        /// Background brightness as a temperature in kelvin.
        #[arg(long = "t-b")]
        t_b: Option<f64>,
        /// Mode-count axis: MIN:MAX:N[:lin|log].
        #[arg(long, default_value = "1e4:1e9:26:log")]
        m: AxisSpec,
    },
    /// Quantum-over-classical SNR advantage over a grid or a reflectivity
    /// sweep (CSV).
    Advantage {
        /// Microwave cooperativity: VALUE or MIN:MAX:N[:lin|log].
        #[arg(long = "gamma-w")]
        gamma_w: Option<AxisSpec>,
        /// Optical cooperativity: VALUE or MIN:MAX:N[:lin|log].
        #[arg(long = "gamma-o")]
        gamma_o: Option<AxisSpec>,
        /// Sweep the reflectivity instead of the cooperativity grid:
        /// MIN:MAX:N[:lin|log].
        #[arg(long = "eta-sweep")]
        eta_sweep: Option<AxisSpec>,
        /// Target reflectivity (grid mode).
        #[arg(long)]
        eta: Option<f64>,
        /// Background brightness as a photon occupancy.
        #[arg(long = "n-b", conflicts_with = "t_b")]
        n_b: Option<f64>,
        /// Background brightness as a temperature in kelvin.
        #[arg(long = "t-b")]
        t_b: Option<f64>,
        /// Integrated mode count.
        #[arg(long)]
        m: Option<f64>,
    },
    /// Full report of every derived quantity at one operating point.
    Point {
        /// Microwave cooperativity of the operating point.
        #[arg(long = "gamma-w")]
        gamma_w: Option<f64>,
        /// Optical cooperativity of the operating point.
        #[arg(long = "gamma-o")]
        gamma_o: Option<f64>,
        /// Target reflectivity (enables the receiver sections).
        #[arg(long)]
        eta: Option<f64>,
        /// Background brightness as a photon occupancy.
        #[arg(long = "n-b", conflicts_with = "t_b")]
        n_b: Option<f64>,
        /// Background brightness as a temperature in kelvin.
        #[arg(long = "t-b")]
        t_b: Option<f64>,
        /// Integrated mode count.
        #[arg(long)]
        m: Option<f64>,
    },
}

// ---------------------------------------------------------------------------
// Axis specification

/// One sweep axis: either a pinned value or `MIN:MAX:N[:lin|log]`.
#[derive(Clone, Debug, PartialEq)]
enum AxisSpec {
    Single(f64),
    Range { min: f64, max: f64, n: usize, log: bool },
}

impl FromStr for AxisSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| -> Result<f64, String> {
            let v: f64 = t
                .parse()
                .map_err(|_| format!("'{t}' is not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("'{t}' is not finite"))
            }
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [v] => Ok(AxisSpec::Single(num(v)?)),
            [min, max, count] | [min, max, count, _] => {
                let min = num(min)?;
                let max = num(max)?;
                let n: usize = count
                    .parse()
                    .map_err(|_| format!("'{count}' is not a point count"))?;
                let log = match parts.get(3).copied() {
                    None | Some("lin") => false,
                    Some("log") => true,
                    Some(other) => {
                        return Err(format!("spacing must be 'lin' or 'log', got '{other}'"))
                    }
                };
                if n < 2 {
                    return Err(format!("point count must be at least 2, got {n}"));
                }
                if !(min < max) {
                    return Err(format!("axis needs min < max, got {min} and {max}"));
                }
                if log && min <= 0.0 {
                    return Err("log spacing needs min > 0".into());
                }
                Ok(AxisSpec::Range { min, max, n, log })
            }
            _ => Err("expected VALUE or MIN:MAX:N[:lin|log]".into()),
        }
    }
}

impl AxisSpec {
    /// Materialize the axis; endpoints of a range are hit exactly.
    fn points(&self) -> Vec<f64> {
        match *self {
            AxisSpec::Single(v) => vec![v],
            AxisSpec::Range { min, max, n, log } => (0..n)
                .map(|i| {
                    if i == 0 {
                        min
                    } else if i == n - 1 {
                        max
                    } else {
                        let t = i as f64 / (n - 1) as f64;
                        if log {
                            (min.ln() + (max.ln() - min.ln()) * t).exp()
                        } else {
                            min + (max - min) * t
                        }
                    }
                })
                .collect(),
        }
    }

    fn single(&self) -> Option<f64> {
        match *self {
            AxisSpec::Single(v) => Some(v),
            AxisSpec::Range { .. } => None,
        }
    }
}

// ---------------------------------------------------------------------------
// Error-to-exit-code mapping

enum RunError {
    /// Bad command-line usage (missing/ill-formed arguments, unwritable
    /// output path).
    Usage(String),
    /// Bad or physically inconsistent configuration, or an operating point
    /// at which the requested evaluation is undefined.
    Config(String),
    /// The `point` command was asked to report an unstable operating point.
    Unstable(String),
}

fn config_err(e: mwqi::Error) -> RunError {
    RunError::Config(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                0
            } else {
                1
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(RunError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(RunError::Unstable(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

// ---------------------------------------------------------------------------
// Shared evaluation context

struct Setup {
    values: ConfigValues<f64>,
    params: PhysicalParams<f64>,
    occ: ThermalOccupancies<f64>,
    ratios: KappaRatios<f64>,
    fidelity: FidelityArg,
    omega: f64,
}

impl Setup {
    fn coefficients(&self, gamma_w: f64, gamma_o: f64) -> mwqi::Result<IoCoefficients<f64>> {
        match self.fidelity {
            FidelityArg::Lossless => coefficients_lossless(gamma_w, gamma_o),
            FidelityArg::Lossy => coefficients_lossy(gamma_w, gamma_o, &self.ratios),
            FidelityArg::Spectral => coefficients_spectral(
                gamma_w,
                gamma_o,
                self.params.kappa_w(),
                self.params.kappa_o(),
                self.params.gamma_m(),
                &self.ratios,
                self.omega,
            ),
        }
    }

    fn stability(&self, gamma_w: f64, gamma_o: f64) -> mwqi::Result<StabilityReport<f64>> {
        stability(
            gamma_w,
            gamma_o,
            self.params.kappa_w(),
            self.params.kappa_o(),
            self.params.gamma_m(),
        )
    }
}

fn load_setup(cli: &Cli) -> Result<Setup, RunError> {
    let base: ConfigValues<f64> = preset_by_name(&cli.preset).map_err(config_err)?;
    let values = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                RunError::Config(format!("cannot read config {}: {e}", path.display()))
            })?;
            let overlay = parse_config_str(&text).map_err(config_err)?;
            base.merge(&overlay)
        }
        None => base,
    };
    let params = values.build_params().map_err(config_err)?;
    let occ = occupancies(&params).map_err(config_err)?;
    let ratios = match cli.fidelity {
        FidelityArg::Lossless => KappaRatios::lossless(),
        _ => KappaRatios::from_params(&params).map_err(config_err)?,
    };
    Ok(Setup {
        values,
        params,
        occ,
        ratios,
        fidelity: cli.fidelity,
        omega: cli.omega,
    })
}

fn run(cli: Cli) -> Result<(), RunError> {
    let setup = load_setup(&cli)?;
    match &cli.command {
        Command::Source { gamma_w, gamma_o } => {
            let gw = axis_or_config(gamma_w, setup.values.gamma_w, "--gamma-w")?;
            let go = axis_or_config(gamma_o, setup.values.gamma_o, "--gamma-o")?;
            cmd_source(&setup, &gw, &go, cli.threads, &cli.out)
        }
        Command::Detect {
            gamma_w,
            gamma_o,
            eta,
            n_b,
            t_b,
            m,
        } => {
            let gw = value_or_config(*gamma_w, setup.values.gamma_w, "--gamma-w")?;
            let go = value_or_config(*gamma_o, setup.values.gamma_o, "--gamma-o")?;
            let scenario = resolve_scenario(&setup, *eta, *n_b, *t_b, None, 1.0)?
                .ok_or_else(|| missing_scenario("detect"))?;
            cmd_detect(&setup, gw, go, &scenario, m, cli.threads, &cli.out)
        }
        Command::Advantage {
            gamma_w,
            gamma_o,
            eta_sweep,
            eta,
            n_b,
            t_b,
            m,
        } => {
            if let Some(etas) = eta_sweep {
                let gw = axis_or_config(gamma_w, setup.values.gamma_w, "--gamma-w")?
                    .single()
                    .ok_or_else(|| {
                        RunError::Usage(
                            "--eta-sweep needs single --gamma-w/--gamma-o values, not ranges"
                                .into(),
                        )
                    })?;
                let go = axis_or_config(gamma_o, setup.values.gamma_o, "--gamma-o")?
                    .single()
                    .ok_or_else(|| {
                        RunError::Usage(
                            "--eta-sweep needs single --gamma-w/--gamma-o values, not ranges"
                                .into(),
                        )
                    })?;
                let background = resolve_background(&setup, *n_b, *t_b)?
                    .ok_or_else(|| missing_scenario("advantage --eta-sweep"))?;
                let m = m.or(setup.values.m_modes).unwrap_or(1.0);
                cmd_advantage_eta(&setup, gw, go, etas, background, m, cli.threads, &cli.out)
            } else {
                let gw = axis_or_config(gamma_w, setup.values.gamma_w, "--gamma-w")?;
                let go = axis_or_config(gamma_o, setup.values.gamma_o, "--gamma-o")?;
                let scenario = resolve_scenario(&setup, *eta, *n_b, *t_b, *m, 1.0)?
                    .ok_or_else(|| missing_scenario("advantage"))?;
                cmd_advantage_grid(&setup, &gw, &go, &scenario, cli.threads, &cli.out)
            }
        }
        Command::Point {
            gamma_w,
            gamma_o,
            eta,
            n_b,
            t_b,
            m,
        } => {
            let gw = value_or_config(*gamma_w, setup.values.gamma_w, "--gamma-w")?;
            let go = value_or_config(*gamma_o, setup.values.gamma_o, "--gamma-o")?;
            let scenario = resolve_scenario(&setup, *eta, *n_b, *t_b, *m, 1.0)?;
            cmd_point(&setup, gw, go, scenario.as_ref(), &cli.out)
        }
    }
}

fn axis_or_config(
    flag: &Option<AxisSpec>,
    config: Option<f64>,
    name: &str,
) -> Result<AxisSpec, RunError> {
    match (flag, config) {
        (Some(axis), _) => Ok(axis.clone()),
        (None, Some(v)) => Ok(AxisSpec::Single(v)),
        (None, None) => Err(RunError::Usage(format!(
            "missing {name} (and the configuration sets no fallback value)"
        ))),
    }
}

fn value_or_config(flag: Option<f64>, config: Option<f64>, name: &str) -> Result<f64, RunError> {
    match (flag, config) {
        (Some(v), _) => Ok(v),
        (None, Some(v)) => Ok(v),
        (None, None) => Err(RunError::Usage(format!(
            "missing {name} (and the configuration sets no fallback value)"
        ))),
    }
}

// ---------------------------------------------------------------------------
// Target-scenario resolution

struct Scenario {
    eta: f64,
    n_b: f64,
    m: f64,
    /// The background as given (occupancy or temperature), echoed verbatim
    /// into resolved configuration output.
    background: Background<f64>,
}

fn missing_scenario(what: &str) -> RunError {
    RunError::Usage(format!(
        "{what} needs a target scenario: pass --eta and --n-b (or --t-b), \
         or set eta and n_b (or t_b_k) in the configuration"
    ))
}

fn resolve_background(
    setup: &Setup,
    n_b: Option<f64>,
    t_b: Option<f64>,
) -> Result<Option<Background<f64>>, RunError> {
    let bg = if let Some(v) = n_b {
        Some(Background::Occupancy(v))
    } else if let Some(t) = t_b {
        Some(Background::Temperature(t))
    } else {
        setup.values.background
    };
    Ok(bg)
}

fn background_occupation(setup: &Setup, bg: Background<f64>) -> Result<f64, RunError> {
    match bg {
        Background::Occupancy(v) => Ok(v),
        Background::Temperature(t) => {
            planck_occupancy(setup.params.omega_w, t).map_err(config_err)
        }
    }
}

/// Combine flags and configuration into a target scenario; `None` when
/// neither source specifies one at all.
fn resolve_scenario(
    setup: &Setup,
    eta: Option<f64>,
    n_b: Option<f64>,
    t_b: Option<f64>,
    m: Option<f64>,
    default_m: f64,
) -> Result<Option<Scenario>, RunError> {
    let eta = eta.or(setup.values.eta);
    let background = resolve_background(setup, n_b, t_b)?;
    match (eta, background) {
        (Some(eta), Some(background)) => {
            let n_b = background_occupation(setup, background)?;
            let m = m.or(setup.values.m_modes).unwrap_or(default_m);
            Ok(Some(Scenario {
                eta,
                n_b,
                m,
                background,
            }))
        }
        (None, None) => Ok(None),
        (Some(_), None) => Err(RunError::Usage(
            "missing background brightness: pass --n-b or --t-b (or set n_b/t_b_k in the \
             configuration)"
                .into(),
        )),
        (None, Some(_)) => Err(RunError::Usage(
            "missing --eta (or set eta in the configuration)".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// Deterministic parallel evaluation and output

/// Evaluate `n` independent jobs (optionally on a dedicated pool) and return
/// the results in index order.
fn eval_ordered<F>(
    n: usize,
    threads: usize,
    f: F,
) -> Result<Vec<mwqi::Result<String>>, RunError>
where
    F: Fn(usize) -> mwqi::Result<String> + Sync + Send,
{
    if threads == 0 {
        Ok((0..n).into_par_iter().map(f).collect())
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| RunError::Usage(format!("cannot build a {threads}-thread pool: {e}")))?;
        Ok(pool.install(|| (0..n).into_par_iter().map(f).collect()))
    }
}

fn assemble_csv(header: &str, rows: Vec<mwqi::Result<String>>) -> Result<String, RunError> {
    let mut out = String::with_capacity(rows.len() * 64 + header.len() + 1);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.map_err(config_err)?);
    }
    Ok(out)
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), RunError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| RunError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// 12-significant-digit scientific notation used for every CSV field.
fn fmt(x: f64) -> String {
    format!("{x:.11e}")
}

// ---------------------------------------------------------------------------
// Subcommands

fn cmd_source(
    setup: &Setup,
    gamma_w: &AxisSpec,
    gamma_o: &AxisSpec,
    threads: usize,
    out: &Option<PathBuf>,
) -> Result<(), RunError> {
    let gws = gamma_w.points();
    let gos = gamma_o.points();
    let rows = eval_ordered(gws.len() * gos.len(), threads, |i| {
        let gw = gws[i / gos.len()];
        let go = gos[i % gos.len()];
        let report = setup.stability(gw, go)?;
        if !report.stable {
            return Ok(format!("{},{},0,,,,,,\n", fmt(gw), fmt(go)));
        }
        let c = setup.coefficients(gw, go)?;
        let s = source_moments(&c, &setup.occ)?;
        let measures = source_measures(&s)?;
        let pp = per_photon(&s, &measures.per_photon)?;
        Ok(format!(
            "{},{},1,{},{},{},{},{},{}\n",
            fmt(gw),
            fmt(go),
            fmt(measures.metric_e),
            fmt(pp.e_n),
            fmt(pp.i_fwd),
            fmt(pp.i_rev),
            fmt(pp.d_w_given_o),
            fmt(pp.d_o_given_w),
        ))
    })?;
    write_output(out, &assemble_csv(SOURCE_HEADER, rows)?)
}

fn per_photon(
    s: &JointSourceState<f64>,
    pp: &Option<PerPhotonMeasures<f64>>,
) -> mwqi::Result<PerPhotonMeasures<f64>> {
    match pp {
        Some(pp) => Ok(*pp),
        None => Err(mwqi::Error::UndefinedNormalization(format!(
            "per-photon measures need a positive microwave occupation, got {}",
            s.n_w
        ))),
    }
}

fn cmd_detect(
    setup: &Setup,
    gamma_w: f64,
    gamma_o: f64,
    scenario: &Scenario,
    m_axis: &AxisSpec,
    threads: usize,
    out: &Option<PathBuf>,
) -> Result<(), RunError> {
    let report = setup.stability(gamma_w, gamma_o).map_err(config_err)?;
    if !report.stable {
        return Err(RunError::Config(unstable_message(gamma_w, gamma_o, &report)));
    }
    let c = setup.coefficients(gamma_w, gamma_o).map_err(config_err)?;
    let s = source_moments(&c, &setup.occ).map_err(config_err)?;
    let ms = m_axis.points();
    let rows = eval_ordered(ms.len(), threads, |i| {
        let t = TargetScenario::new(scenario.eta, scenario.n_b, ms[i])?;
        let r = receiver_moments(&s, &c, &setup.occ, &t, BackgroundConvention::default())?;
        Ok(format!(
            "{},{},{},{},{},{}\n",
            fmt(ms[i]),
            fmt(r.snr_qi),
            fmt(r.snr_coh),
            fmt(r.log10_p_qi),
            fmt(r.log10_p_coh),
            fmt(r.advantage_f),
        ))
    })?;
    write_output(out, &assemble_csv(DETECT_HEADER, rows)?)
}

fn unstable_message(gamma_w: f64, gamma_o: f64, report: &StabilityReport<f64>) -> String {
    format!(
        "operating point (gamma_w = {gamma_w}, gamma_o = {gamma_o}) is dynamically unstable \
         (stability margin {} rad/s); no steady state exists there",
        fmt(report.margin)
    )
}

fn cmd_advantage_grid(
    setup: &Setup,
    gamma_w: &AxisSpec,
    gamma_o: &AxisSpec,
    scenario: &Scenario,
    threads: usize,
    out: &Option<PathBuf>,
) -> Result<(), RunError> {
    let gws = gamma_w.points();
    let gos = gamma_o.points();
    let rows = eval_ordered(gws.len() * gos.len(), threads, |i| {
        let gw = gws[i / gos.len()];
        let go = gos[i % gos.len()];
        let report = setup.stability(gw, go)?;
        if !report.stable {
            return Ok(format!("{},{},0,\n", fmt(gw), fmt(go)));
        }
        let c = setup.coefficients(gw, go)?;
        let s = source_moments(&c, &setup.occ)?;
        let t = TargetScenario::new(scenario.eta, scenario.n_b, scenario.m)?;
        let r = receiver_moments(&s, &c, &setup.occ, &t, BackgroundConvention::default())?;
        Ok(format!(
            "{},{},1,{}\n",
            fmt(gw),
            fmt(go),
            fmt(r.advantage_f)
        ))
    })?;
    write_output(out, &assemble_csv(ADVANTAGE_GRID_HEADER, rows)?)
}

#[allow(clippy::too_many_arguments)]
fn cmd_advantage_eta(
    setup: &Setup,
    gamma_w: f64,
    gamma_o: f64,
    eta_axis: &AxisSpec,
    background: Background<f64>,
    m: f64,
    threads: usize,
    out: &Option<PathBuf>,
) -> Result<(), RunError> {
    let report = setup.stability(gamma_w, gamma_o).map_err(config_err)?;
    if !report.stable {
        return Err(RunError::Config(unstable_message(gamma_w, gamma_o, &report)));
    }
    let n_b = background_occupation(setup, background)?;
    let c = setup.coefficients(gamma_w, gamma_o).map_err(config_err)?;
    let s = source_moments(&c, &setup.occ).map_err(config_err)?;
    let etas = eta_axis.points();
    let rows = eval_ordered(etas.len(), threads, |i| {
        let t = TargetScenario::new(etas[i], n_b, m)?;
        let r = receiver_moments(&s, &c, &setup.occ, &t, BackgroundConvention::default())?;
        Ok(format!("{},{}\n", fmt(etas[i]), fmt(r.advantage_f)))
    })?;
    write_output(out, &assemble_csv(ADVANTAGE_ETA_HEADER, rows)?)
}

// ---------------------------------------------------------------------------
// Single-point report

fn cmd_point(
    setup: &Setup,
    gamma_w: f64,
    gamma_o: f64,
    scenario: Option<&Scenario>,
    out: &Option<PathBuf>,
) -> Result<(), RunError> {
    let report = setup.stability(gamma_w, gamma_o).map_err(config_err)?;
    let mut text = String::new();
    let w = &mut text;
    let line = |w: &mut String, s: &str| {
        w.push_str(s);
        w.push('\n');
    };

    line(w, "# single-point evaluation report");
    line(w, &format!("# fidelity = {}", fidelity_name(setup)));
    line(w, "#");
    line(w, "# [stability]");
    line(w, &format!("# gamma_w = {}", fmt(gamma_w)));
    line(w, &format!("# gamma_o = {}", fmt(gamma_o)));
    line(w, &format!("# stable = {}", yes_no(report.stable)));
    line(
        w,
        &format!("# stability_margin_rad_s = {}", fmt(report.margin)),
    );
    line(
        w,
        &format!(
            "# narrowband_condition_gamma_o_lt_1_plus_gamma_w = {}",
            yes_no(report.narrowband_condition)
        ),
    );

    if report.stable {
        write_stable_sections(setup, gamma_w, gamma_o, scenario, w).map_err(config_err)?;
    }

    line(w, "#");
    line(w, "# resolved configuration (re-run: mwqi point --config <this file>)");
    let mut echo = setup.values;
    echo.gamma_w = Some(gamma_w);
    echo.gamma_o = Some(gamma_o);
    if let Some(sc) = scenario {
        echo.eta = Some(sc.eta);
        echo.background = Some(sc.background);
        echo.m_modes = Some(sc.m);
    }
    w.push_str(&render_config(&echo));

    write_output(out, &text)?;
    if report.stable {
        Ok(())
    } else {
        Err(RunError::Unstable(unstable_message(
            gamma_w, gamma_o, &report,
        )))
    }
}

fn fidelity_name(setup: &Setup) -> String {
    match setup.fidelity {
        FidelityArg::Lossless => "lossless_narrowband".to_string(),
        FidelityArg::Lossy => "lossy_narrowband".to_string(),
        FidelityArg::Spectral => format!("full_spectral (omega = {} rad/s)", fmt(setup.omega)),
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn complex_str(z: mwqi::num_complex::Complex<f64>) -> String {
    let sign = if z.im.is_sign_negative() { "-" } else { "+" };
    format!("{} {} {} i", fmt(z.re), sign, fmt(z.im.abs()))
}

fn write_stable_sections(
    setup: &Setup,
    gamma_w: f64,
    gamma_o: f64,
    scenario: Option<&Scenario>,
    w: &mut String,
) -> mwqi::Result<()> {
    let line = |w: &mut String, s: &str| {
        w.push_str(s);
        w.push('\n');
    };
    let kv = |w: &mut String, k: &str, v: f64| {
        w.push_str(&format!("# {k} = {}\n", fmt(v)));
    };

    // Required drives for this operating point.
    line(w, "#");
    line(w, "# [required drives]");
    let gamma_m = setup.params.gamma_m();
    kv(
        w,
        "multiphoton_coupling_G_w_rad_s",
        (gamma_w * setup.params.kappa_w() * gamma_m).sqrt(),
    );
    kv(
        w,
        "multiphoton_coupling_G_o_rad_s",
        (gamma_o * setup.params.kappa_o() * gamma_m).sqrt(),
    );
    match drives_for_cooperativities(&setup.params, gamma_w, gamma_o) {
        Ok((e_w, p_o)) => {
            kv(w, "microwave_drive_e_w_rad_s", e_w);
            kv(w, "optical_pump_power_w", p_o);
        }
        Err(_) => {
            line(
                w,
                "# (drive amplitudes unavailable: single-photon couplings not set)",
            );
        }
    }

    // Input-output coefficients.
    let c = setup.coefficients(gamma_w, gamma_o)?;
    line(w, "#");
    line(w, &format!("# [input-output coefficients: {}]", c.fidelity));
    line(w, &format!("# A_w = {}", complex_str(c.a_w)));
    line(w, &format!("# A_o = {}", complex_str(c.a_o)));
    line(w, &format!("# B = {}", complex_str(c.b)));
    line(w, &format!("# C_w = {}", complex_str(c.c_w)));
    line(w, &format!("# C_o = {}", complex_str(c.c_o)));
    line(w, &format!("# D_w = {}", complex_str(c.d_w)));
    line(w, &format!("# D_o = {}", complex_str(c.d_o)));
    line(w, &format!("# E_w = {}", complex_str(c.e_w_coef)));
    line(w, &format!("# E_o = {}", complex_str(c.e_o_coef)));
    let (res_w, res_o) = c.commutator_residuals();
    kv(w, "commutator_residual_w", res_w);
    kv(w, "commutator_residual_o", res_o);

    // Thermal occupancies feeding the converter.
    line(w, "#");
    line(w, "# [thermal occupancies]");
    kv(w, "n_w_thermal_photons", setup.occ.n_w_t);
    kv(w, "n_o_thermal_photons", setup.occ.n_o_t);
    kv(w, "n_b_thermal_phonons", setup.occ.n_b_t);
    kv(w, "n_w_internal_photons", setup.occ.n_w_int);
    kv(w, "n_o_internal_photons", setup.occ.n_o_int);

    // Source moments and measures.
    let s = source_moments(&c, &setup.occ)?;
    line(w, "#");
    line(w, "# [source moments]");
    kv(w, "n_w_photons", s.n_w);
    kv(w, "n_o_photons", s.n_o);
    line(w, &format!("# cross_correlation = {}", complex_str(s.cross)));
    kv(w, "quadrature_var_w", s.v11);
    kv(w, "quadrature_var_o", s.v33);
    kv(w, "quadrature_cov", s.v13);

    let measures = source_measures(&s)?;
    line(w, "#");
    line(w, "# [symplectic spectrum]");
    kv(w, "nu_minus", measures.nu_minus);
    kv(w, "nu_plus", measures.nu_plus);
    kv(w, "zeta_minus_partial_transpose", measures.zeta_minus);

    line(w, "#");
    line(w, "# [source measures]");
    kv(w, "metric_E", measures.metric_e);
    kv(w, "E_N_ebits", measures.e_n);
    kv(w, "I_fwd_bits", measures.i_fwd);
    kv(w, "I_rev_bits", measures.i_rev);
    kv(w, "D_w_given_o_bits", measures.d_w_given_o);
    kv(w, "D_o_given_w_bits", measures.d_o_given_w);
    if let Some(pp) = measures.per_photon {
        kv(w, "E_N_per_photon", pp.e_n);
        kv(w, "I_fwd_per_photon", pp.i_fwd);
        kv(w, "I_rev_per_photon", pp.i_rev);
        kv(w, "D_w_given_o_per_photon", pp.d_w_given_o);
        kv(w, "D_o_given_w_per_photon", pp.d_o_given_w);
    } else {
        line(
            w,
            "# (per-photon measures undefined: zero microwave occupation)",
        );
    }

    // Receiver sections only when a scenario is present.
    if let Some(sc) = scenario {
        line(w, "#");
        line(w, "# [target scenario]");
        kv(w, "eta_reflectivity", sc.eta);
        kv(w, "n_b_background_photons", sc.n_b);
        kv(w, "m_mode_pairs", sc.m);

        let t = TargetScenario::new(sc.eta, sc.n_b, sc.m)?;
        let r: ReceiverStats<f64> =
            receiver_moments(&s, &c, &setup.occ, &t, BackgroundConvention::default())?;
        let threshold = entanglement_threshold(&s, sc.eta)?;
        line(w, "#");
        line(w, "# [receiver]");
        line(
            w,
            "# background_convention = exact (injected occupancy n_B / (1 - eta))",
        );
        kv(w, "n_b_threshold_photons", threshold);
        line(
            w,
            &format!(
                "# background_exceeds_threshold = {}",
                yes_no(sc.n_b > threshold)
            ),
        );
        kv(w, "n_return_h0_photons", r.n_return_h0);
        kv(w, "n_return_h1_photons", r.n_return_h1);
        kv(w, "mean_plus_h0_photons", r.mean_plus_h0);
        kv(w, "mean_minus_h0_photons", r.mean_minus_h0);
        kv(w, "mean_plus_h1_photons", r.mean_plus_h1);
        kv(w, "mean_minus_h1_photons", r.mean_minus_h1);
        kv(w, "var_diff_h0", r.var_diff_h0);
        kv(w, "var_diff_h1", r.var_diff_h1);
        kv(w, "snr_qi", r.snr_qi);
        kv(w, "snr_coh", r.snr_coh);
        kv(w, "p_qi", r.p_qi);
        kv(w, "p_coh", r.p_coh);
        kv(w, "log10_p_qi", r.log10_p_qi);
        kv(w, "log10_p_coh", r.log10_p_coh);
        kv(w, "advantage_F", r.advantage_f);
    }
    Ok(())
}
