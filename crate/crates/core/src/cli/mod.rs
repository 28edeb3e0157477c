//! The `rabi` command-line front end.
//!
//! Tables print frequencies in units of 2π·MHz; times are in µs. Exit codes:
//! 0 success, 1 invalid configuration or parameters, 2 numerical or I/O
//! failure.

mod config;

use std::f64::consts::{PI, TAU};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

pub use config::{is_frequency_key, is_known_key, parse_config, RawConfig, Units};

use crate::dynamics::{
    build_drift, integrate, rabi_period, Label, Method, Mode, Model, Observable, Trajectory,
};
use crate::effective::{effective_params, regime_classify, EffectiveParams, RegimeReport};
use crate::error::{Error, Result};
use crate::params::{to_mhz, validate, SystemParams};
use crate::stability::{classical_steady_state, spectrum_full, stability_matrix, CavityStability};

#[derive(Debug, Parser)]
#[command(name = "rabi", version, about = "Motion-mediated Rabi coupling between two atomic ensembles")]
pub struct Cli {
    /// Parameter file (flat key = value).
    #[arg(long, global = true, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in parameter set, used when no --config is given.
    #[arg(long, global = true, value_enum)]
    pub preset: Option<Preset>,
    /// Print the parsed parameters as a config file and exit.
    #[arg(long, global = true)]
    pub dump_config: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Fig2,
    CaseOne,
    CaseTwo,
}

impl Preset {
    pub fn params(self) -> SystemParams {
        match self {
            Preset::Fig2 => SystemParams::fig2(),
            Preset::CaseOne => SystemParams::case_one(),
            Preset::CaseTwo => SystemParams::case_two(),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Effective couplings after eliminating the cavity modes.
    Effective(JsonFlag),
    /// Case I / Case II classification.
    Regime(JsonFlag),
    /// Integrate the fluctuation dynamics and write a CSV trajectory.
    Simulate(SimulateArgs),
    /// Tabulate effective quantities over a range of one parameter.
    Sweep(SweepArgs),
    /// Cavity-fluctuation stability and the full drift spectrum.
    Stability(StabilityArgs),
}

#[derive(Debug, Args)]
pub struct JsonFlag {
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value = "full")]
    pub model: Model,
    #[arg(long, default_value = "rk4")]
    pub method: Method,
    /// End time, µs.
    #[arg(long, default_value_t = 20.0)]
    pub t_max: f64,
    /// Output sampling interval, µs.
    #[arg(long, default_value_t = 0.01)]
    pub dt_out: f64,
    /// Initial amplitude, e.g. `cL=1` or `b=0.5,0.1`. Repeatable; the
    /// conjugate entry is filled in. Defaults to cL=1.
    #[arg(long = "init", value_name = "LABEL=RE[,IM]")]
    pub init: Vec<String>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write t·(2π·1 MHz) instead of t in µs.
    #[arg(long)]
    pub normalize_time: bool,
    /// Print the run summary as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Config key to vary.
    #[arg(long)]
    pub var: String,
    /// Range in the config's units.
    #[arg(long, allow_hyphen_values = true)]
    pub from: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub to: f64,
    #[arg(long, default_value_t = 11)]
    pub steps: usize,
    /// Comma-separated output columns.
    #[arg(long, default_value = "C,G_eff_R,G_bar_eff_R,Lambda,gamma_at_eff")]
    pub columns: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    /// Radiation shifts to evaluate, 2π·MHz, comma-separated. Defaults to the
    /// classical steady state when epsilon > 0, else 0.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub r: Vec<f64>,
    #[arg(long)]
    pub json: bool,
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. } | Error::InvalidModel(_) | Error::Domain(_) => 1,
        _ => 2,
    }
}

fn io_error(path: Option<&Path>, e: io::Error) -> Error {
    match path {
        Some(p) => Error::Io(format!("{}: {e}", p.display())),
        None => Error::Io(e.to_string()),
    }
}

/// Runs a parsed command line; returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn load(cli: &Cli) -> Result<RawConfig> {
    match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
            RawConfig::parse(&text).map_err(|e| Error::config(format!("{}: {e}", path.display())))
        }
        None => Ok(RawConfig::from_params(
            &cli.preset.unwrap_or(Preset::Fig2).params(),
            Units::Mhz,
        )),
    }
}

fn checked(raw: &RawConfig, err: &mut dyn Write) -> Result<SystemParams> {
    let p = raw.resolve()?;
    if raw.uses_bare_shift() {
        let _ = writeln!(
            err,
            "warning: detunings given as bare delta with beta != 0; delta' = delta -/+ 2 g1 beta is applied"
        );
    }
    let report = validate(&p);
    for issue in report.warnings() {
        let _ = writeln!(err, "{issue}");
    }
    if report.has_errors() {
        let messages: Vec<String> = report.errors().map(|i| i.to_string()).collect();
        return Err(Error::config(messages.join("; ")));
    }
    Ok(p)
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let raw = load(cli)?;
    if cli.dump_config {
        let p = raw.resolve()?;
        let text = RawConfig::from_params(&p, Units::RadPerUs).render();
        return out.write_all(text.as_bytes()).map_err(|e| io_error(None, e));
    }
    let Some(command) = &cli.command else {
        return Err(Error::config("no command given (try --help)"));
    };
    match command {
        Command::Effective(a) => cmd_effective(&checked(&raw, err)?, a.json, out),
        Command::Regime(a) => cmd_regime(&checked(&raw, err)?, a.json, out),
        Command::Simulate(a) => cmd_simulate(&checked(&raw, err)?, a, out, err),
        Command::Sweep(a) => cmd_sweep(&raw, a, out, err),
        Command::Stability(a) => cmd_stability(&checked(&raw, err)?, a, out),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| io_error(None, e))
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn mhz_c(v: C64) -> String {
    format!("{:.6} {:+.6}i", to_mhz(v.re), to_mhz(v.im))
}

fn row(label: &str, value: String) -> String {
    format!("{label:<28} {value}\n")
}

pub fn render_effective(e: &EffectiveParams) -> String {
    let m = |v: f64| format!("{:.6}", to_mhz(v));
    let im = &e.intermediates;
    let mut s = String::from("# effective parameters (2pi MHz)\n");
    s += &row("C", m(e.direct_coupling));
    s += &row("G_eff", mhz_c(e.g_eff));
    s += &row("G_bar_eff", mhz_c(e.g_bar_eff));
    s += &row("G_eff_R", m(e.g_eff_r));
    s += &row("G_bar_eff_R", m(e.g_bar_eff_r));
    s += &row("Lambda", m(e.lambda));
    s += &row("omega_m_tilde", m(e.omega_m_tilde));
    s += &row("Delta_L_eff", mhz_c(e.detuning_l));
    s += &row("Delta_R_eff", mhz_c(e.detuning_r));
    s += &row("Delta_L_stark", m(e.stark_detuning_l));
    s += &row("Delta_R_stark", m(e.stark_detuning_r));
    s += &row("cross_coupling", mhz_c(e.cross_coupling));
    s += &row("gamma_at_eff", m(e.gamma_at_eff));
    s += &row("antisymmetric", e.antisymmetric.to_string());
    s += &row("z_R (2pi MHz)^2", format!("{:.6}", im.z_r / (TAU * TAU)));
    s += &row(
        "z_R printed form",
        format!("{:.6} ({:.3}% from Re z)", im.z_r_printed / (TAU * TAU), 100.0 * im.z_r_discrepancy()),
    );
    if e.direct_coupling != 0.0 {
        s += &row("predicted period (us)", format!("{:.6}", PI / e.direct_coupling.abs()));
    }
    s
}

pub fn render_regime(r: &RegimeReport) -> String {
    let mut s = String::from("# regime\n");
    s += &row("regime", format!("{:?}", r.regime));
    s += &row("2J (2pi MHz)", format!("{:.6}", to_mhz(r.raman.splitting)));
    s += &row("raman deviation", format!("{:.6}", r.raman.deviation));
    s += &row("raman resonant", r.raman.resonant.to_string());
    s += &row("|C| (2pi MHz)", format!("{:.6}", to_mhz(r.direct_coupling)));
    s += &row("max |G_R| (2pi MHz)", format!("{:.6}", to_mhz(r.membrane_coupling)));
    s += &row("|C| / max |G_R|", format!("{:.6}", r.direct_dominance));
    s += &row("J / |delta_L'|", format!("{:.6}", r.tunnelling_ratio));
    s += &row("g1 alpha / threshold", format!("{:.6}", r.membrane_ratio));
    s
}

fn cmd_effective(p: &SystemParams, as_json: bool, out: &mut dyn Write) -> Result<()> {
    let e = effective_params(p)?;
    let r = regime_classify(p)?;
    if as_json {
        #[derive(Serialize)]
        struct Doc<'a> {
            effective: &'a EffectiveParams,
            regime: &'a RegimeReport,
        }
        return emit(out, &json(&Doc { effective: &e, regime: &r }));
    }
    emit(out, &(render_effective(&e) + &render_regime(&r)))
}

fn cmd_regime(p: &SystemParams, as_json: bool, out: &mut dyn Write) -> Result<()> {
    let r = regime_classify(p)?;
    emit(out, &if as_json { json(&r) } else { render_regime(&r) })
}

/// Parses `label=re[,im]`.
pub fn parse_init(spec: &str) -> Result<(Label, C64)> {
    let bad = || Error::config(format!("bad --init '{spec}' (expected LABEL=RE[,IM])"));
    let (label, value) = spec.split_once('=').ok_or_else(bad)?;
    let label: Label = label.trim().parse().map_err(|e: String| Error::config(e))?;
    let mut parts = value.split(',').map(|v| v.trim().parse::<f64>());
    let re = parts.next().ok_or_else(bad)?.map_err(|_| bad())?;
    let im = match parts.next() {
        Some(v) => v.map_err(|_| bad())?,
        None => 0.0,
    };
    if parts.next().is_some() || !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok((label, C64::new(re, im)))
}

/// Initial state for `model` from `--init` specs; ⟨δc_L⟩ = 1 when empty.
pub fn initial_state(model: Model, specs: &[String]) -> Result<Vec<C64>> {
    let basis = model.basis();
    let mut x = vec![C64::new(0.0, 0.0); basis.len()];
    let inits = if specs.is_empty() {
        vec![(Label::ann(Mode::EnsembleL), C64::new(1.0, 0.0))]
    } else {
        specs.iter().map(|s| parse_init(s)).collect::<Result<_>>()?
    };
    for (label, value) in inits {
        let (label, value) = if label.dagger {
            (label.adjoint(), value.conj())
        } else {
            (label, value)
        };
        let i = basis
            .iter()
            .position(|&l| l == label)
            .ok_or_else(|| Error::config(format!("label '{label}' is not part of the {model} model")))?;
        let j = basis.iter().position(|&l| l == label.adjoint()).expect("paired basis");
        x[i] = value;
        x[j] = value.conj();
    }
    Ok(x)
}

#[derive(Debug, Serialize)]
pub struct SimulationSummary {
    pub model: String,
    pub samples: usize,
    /// Mean spacing of the pop_cL maxima, µs.
    pub period: Option<f64>,
    /// π/|C|, µs.
    pub predicted_period: Option<f64>,
    pub max_cavity_population: Option<f64>,
    pub max_pop_c_l: f64,
}

pub fn summarize(model: Model, traj: &Trajectory, p: &SystemParams) -> (SimulationSummary, Option<Error>) {
    let max = |v: Option<Vec<f64>>| v.map(|v| v.into_iter().fold(0.0, f64::max));
    let (period, warning) = match rabi_period(traj, Observable::PopCL) {
        Ok(t) => (Some(t), None),
        Err(e) => (None, Some(e)),
    };
    let cavity = match (max(traj.population(Observable::PopAL)), max(traj.population(Observable::PopAR))) {
        (Some(a), Some(b)) => Some(a.max(b)),
        _ => None,
    };
    let c = effective_params(p).ok().map(|e| e.direct_coupling);
    let summary = SimulationSummary {
        model: model.to_string(),
        samples: traj.len(),
        period,
        predicted_period: c.filter(|c| *c != 0.0).map(|c| PI / c.abs()),
        max_cavity_population: cavity,
        max_pop_c_l: max(traj.population(Observable::PopCL)).unwrap_or(0.0),
    };
    (summary, warning)
}

fn render_summary(s: &SimulationSummary) -> String {
    let opt = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.6}"));
    format!(
        "model={} samples={} period_us={} predicted_us={} max_cavity_pop={} max_pop_cL={:.6}\n",
        s.model,
        s.samples,
        opt(s.period),
        opt(s.predicted_period),
        opt(s.max_cavity_population),
        s.max_pop_c_l
    )
}

fn cmd_simulate(p: &SystemParams, a: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let x0 = initial_state(a.model, &a.init)?;
    let drift = build_drift(a.model, p)?;
    let traj = integrate(&drift, &x0, a.t_max, a.dt_out, a.method)?;

    match &a.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| io_error(Some(path), e))?;
            let mut w = BufWriter::new(file);
            traj.write_csv(&mut w, a.normalize_time)
                .and_then(|_| w.flush())
                .map_err(|e| io_error(Some(path), e))?;
        }
        None => traj
            .write_csv(&mut *out, a.normalize_time)
            .map_err(|e| io_error(None, e))?,
    }

    let (summary, warning) = summarize(a.model, &traj, p);
    if let Some(w) = warning {
        let _ = writeln!(err, "warning: period not extracted: {w}");
    }
    let text = if a.json { json(&summary) } else { render_summary(&summary) };
    // keep stdout pure CSV when the trajectory goes there
    if a.out.is_some() {
        emit(out, &text)
    } else {
        err.write_all(text.as_bytes()).map_err(|e| io_error(None, e))
    }
}

pub const SWEEP_COLUMNS: &[&str] = &[
    "C",
    "G_eff_abs",
    "G_eff_R",
    "G_bar_eff_R",
    "Lambda",
    "omega_m_tilde",
    "gamma_at_eff",
    "Delta_L_stark",
    "Delta_R_stark",
    "z_R",
    "lambda_plus_re",
    "lambda_plus_im",
    "lambda_minus_re",
    "lambda_minus_im",
    "max_re_N",
];

fn sweep_value(column: &str, p: &SystemParams, e: &EffectiveParams, m: Option<&CavityStability>) -> Result<f64> {
    let v = match column {
        "C" => to_mhz(e.direct_coupling),
        "G_eff_abs" => to_mhz(e.g_eff.norm()),
        "G_eff_R" => to_mhz(e.g_eff_r),
        "G_bar_eff_R" => to_mhz(e.g_bar_eff_r),
        "Lambda" => to_mhz(e.lambda),
        "omega_m_tilde" => to_mhz(e.omega_m_tilde),
        "gamma_at_eff" => to_mhz(e.gamma_at_eff),
        "Delta_L_stark" => to_mhz(e.stark_detuning_l),
        "Delta_R_stark" => to_mhz(e.stark_detuning_r),
        "z_R" => e.intermediates.z_r / (TAU * TAU),
        "lambda_plus_re" => to_mhz(m.expect("computed").lambda_plus.re),
        "lambda_plus_im" => to_mhz(m.expect("computed").lambda_plus.im),
        "lambda_minus_re" => to_mhz(m.expect("computed").lambda_minus.re),
        "lambda_minus_im" => to_mhz(m.expect("computed").lambda_minus.im),
        "max_re_N" => {
            let report = spectrum_full(p, 0.0)?;
            to_mhz(report.spectrum.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max))
        }
        other => return Err(Error::config(format!("unknown column '{other}'"))),
    };
    Ok(v)
}

fn radiation_shift_for(p: &SystemParams) -> Result<f64> {
    if p.epsilon == 0.0 {
        Ok(0.0)
    } else {
        classical_steady_state(p, p.epsilon).map(|s| s.r)
    }
}

pub fn sweep_table(raw: &RawConfig, a: &SweepArgs) -> Result<String> {
    if !is_known_key(&a.var) {
        return Err(Error::config(format!("cannot sweep unknown key '{}'", a.var)));
    }
    if a.steps < 2 || !a.from.is_finite() || !a.to.is_finite() {
        return Err(Error::config("sweep needs a finite range and at least 2 steps"));
    }
    let columns: Vec<&str> = a.columns.split(',').map(str::trim).collect();
    if let Some(bad) = columns.iter().find(|c| !SWEEP_COLUMNS.contains(c)) {
        return Err(Error::config(format!(
            "unknown column '{bad}' (available: {})",
            SWEEP_COLUMNS.join(", ")
        )));
    }
    let needs_m = columns.iter().any(|c| c.starts_with("lambda_"));

    let values: Vec<f64> = (0..a.steps)
        .map(|k| a.from + (a.to - a.from) * k as f64 / (a.steps - 1) as f64)
        .collect();
    let rows: Vec<Result<String>> = values
        .par_iter()
        .map(|&v| {
            let mut point = raw.clone();
            point.set(&a.var, v)?;
            let p = point.resolve()?;
            let e = effective_params(&p)?;
            let m = if needs_m {
                Some(stability_matrix(&p, radiation_shift_for(&p)?)?)
            } else {
                None
            };
            let mut line = format!("{v:?}");
            for c in &columns {
                line += &format!(",{:?}", sweep_value(c, &p, &e, m.as_ref())?);
            }
            Ok(line + "\n")
        })
        .collect();

    let mut table = format!("{},{}\n", a.var, columns.join(","));
    for r in rows {
        table += &r?;
    }
    Ok(table)
}

fn cmd_sweep(raw: &RawConfig, a: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    // validate the base point once; individual points are not re-validated
    checked(raw, err)?;
    let table = sweep_table(raw, a)?;
    match &a.out {
        Some(path) => std::fs::write(path, table).map_err(|e| io_error(Some(path), e)),
        None => emit(out, &table),
    }
}

#[derive(Debug, Serialize)]
struct StabilityDoc {
    cavity: Vec<CavityStability>,
    full: crate::stability::StabilityReport,
    verdict: &'static str,
}

fn cmd_stability(p: &SystemParams, a: &StabilityArgs, out: &mut dyn Write) -> Result<()> {
    let shifts: Vec<f64> = if a.r.is_empty() {
        vec![radiation_shift_for(p)?]
    } else {
        a.r.iter().map(|&r| crate::params::from_mhz(r)).collect()
    };
    let cavity = shifts
        .iter()
        .map(|&r| stability_matrix(p, r))
        .collect::<Result<Vec<_>>>()?;
    let full = spectrum_full(p, shifts[0])?;
    let stable = full.stable && cavity.iter().all(|c| c.stable);
    let verdict = if stable { "STABLE" } else { "UNSTABLE" };

    if a.json {
        return emit(out, &json(&StabilityDoc { cavity, full, verdict }));
    }

    let mut s = String::from("# cavity fluctuation matrix M (2pi MHz)\n");
    s += "r,lambda_plus,lambda_minus,closed_form_plus,closed_form_minus,stable\n";
    for c in &cavity {
        let cf = c
            .closed_form
            .map_or(("n/a".into(), "n/a".into()), |(a, b)| (mhz_c(a), mhz_c(b)));
        s += &format!(
            "{:.6},{},{},{},{},{}\n",
            to_mhz(c.r),
            mhz_c(c.lambda_plus),
            mhz_c(c.lambda_minus),
            cf.0,
            cf.1,
            c.stable
        );
    }
    s += "# full drift spectrum (2pi MHz), most damped first\n";
    for (k, v) in full.spectrum.iter().enumerate() {
        let tag = match full.fast_group.iter().position(|&f| f == k) {
            Some(i) => format!("fast  cavity weight {:.4}", full.cavity_dominance[i]),
            None => "slow".into(),
        };
        s += &format!("{k:>2}  {:>14.6} {:>+16.6}i  {tag}\n", to_mhz(v.re), to_mhz(v.im));
    }
    s += &row("fast group cavity-dominated", full.fast_group_cavity_dominated.to_string());
    s += &row("spectral gap", format!("{:.3}", full.spectral_gap));
    s += &row(
        "slow vs reduced deviation",
        full.slow_deviation.map_or("n/a".into(), |d| format!("{d:.3e}")),
    );
    s += verdict;
    s += "\n";
    emit(out, &s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let cli = Cli::try_parse_from(std::iter::once("rabi").chain(args.iter().copied())).unwrap();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(&cli, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn init_parsing() {
        assert_eq!(parse_init("cL=1").unwrap(), (Label::ann(Mode::EnsembleL), C64::new(1.0, 0.0)));
        assert_eq!(parse_init("b=0.5,-2").unwrap(), (Label::ann(Mode::Mechanical), C64::new(0.5, -2.0)));
        for bad in ["cL", "cL=x", "zz=1", "cL=1,2,3"] {
            assert!(parse_init(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn init_fills_conjugates() {
        let x = initial_state(Model::Effective, &["cRdag=0,1".into()]).unwrap();
        let basis = Model::Effective.basis();
        let i = basis.iter().position(|&l| l == Label::ann(Mode::EnsembleR)).unwrap();
        let j = basis.iter().position(|&l| l == Label::cre(Mode::EnsembleR)).unwrap();
        assert_eq!(x[i], C64::new(0.0, -1.0));
        assert_eq!(x[j], C64::new(0.0, 1.0));
        assert!(initial_state(Model::Reduced, &["aL=1".into()]).is_err());
    }

    #[test]
    fn effective_table_for_reference_set() {
        let (code, out, _) = run_args(&["effective"]);
        assert_eq!(code, 0);
        let c_line = out.lines().find(|l| l.starts_with("C ")).unwrap();
        assert!(c_line.contains("-0.192289"), "{c_line}");
        assert!(out.contains("predicted period (us)        2.600"));
    }

    #[test]
    fn no_command_is_a_usage_error() {
        let (code, _, err) = run_args(&[]);
        assert_eq!(code, 1);
        assert!(err.contains("no command"));
    }

    #[test]
    fn sweep_rejects_unknown_column() {
        let (code, _, err) = run_args(&["sweep", "--var", "J", "--from", "0", "--to", "1", "--columns", "C,bogus"]);
        assert_eq!(code, 1);
        assert!(err.contains("unknown column 'bogus'"));
    }

    #[test]
    fn stability_verdict() {
        let (code, out, _) = run_args(&["stability", "--r", "0,5,-5"]);
        assert_eq!(code, 0);
        assert!(out.trim_end().ends_with("STABLE"));
        assert_eq!(out.lines().filter(|l| l.contains("fast  cavity")).count(), 4);
    }
}
