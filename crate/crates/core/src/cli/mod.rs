//! Experiment runners behind the `afcsim` binary.
//!
//! Each subcommand reads an [`ExperimentConfig`], writes CSV files and a gnuplot script
//! into `<out>/<subcommand>/`, and records everything needed to repeat the run in
//! `report.json`.

mod config;
mod output;

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub use config::{
    EchoConfig, ExperimentConfig, FitConfig, G2Config, MultiplexConfig, ProjectConfig,
    RepeaterSection, SweepConfig,
};
use output::{gnuplot, num, Staging};

use crate::comb::{analytic_efficiency, build_profile_for_grid, OpticalDepthProfile};
use crate::memory::{
    cavity_enhanced_projection, efficiency_sweep, fit_exponential_decay, fit_two_pulse_echo,
    read_sweep_csv, store_and_recall_with, two_pulse_echo_intensity_stretched,
};
use crate::multiplex::{multimode_capacity, FeedforwardSetup};
use crate::quantumstats::{classicality_check, g2_from_counts, simulate_counts};
use crate::repeater::{entanglement_rate, simulate_spinwave_schedule};
use crate::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Rows kept in time-trace CSVs before decimation kicks in.
const MAX_TRACE_ROWS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Comb profile and a single store-and-recall trace.
    Comb,
    /// Efficiency against storage time plus exponential fit.
    Sweep,
    /// Exponential fit of a `tau_s,efficiency` CSV.
    Fit,
    /// Two-pulse echo decay fit.
    EchoFit,
    /// Spectral multiplexing with feed-forward channel selection.
    Multiplex,
    /// Spin-wave scheduling conflicts and entanglement rate.
    Repeater,
    /// Cross-correlation g² from simulated coincidence counts.
    G2,
    /// Impedance-matched cavity efficiency projection.
    Project,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Comb => "comb",
            Command::Sweep => "sweep",
            Command::Fit => "fit",
            Command::EchoFit => "echo-fit",
            Command::Multiplex => "multiplex",
            Command::Repeater => "repeater",
            Command::G2 => "g2",
            Command::Project => "project",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "afcsim", version, about = "Atomic frequency comb memory simulator")]
pub struct Args {
    #[arg(value_enum, required_unless_present = "print_defaults")]
    pub command: Option<Command>,
    /// TOML config; omitted sections take their defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Overrides the config's `seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Print the fully defaulted config and exit.
    #[arg(long)]
    pub print_defaults: bool,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub subcommand: Command,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub outputs: Vec<PathBuf>,
    pub summary: Value,
}

/// 2 for anything wrong with the inputs, 3 for failures while running.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::Csv(_) | Error::ZeroSingles => 3,
        _ => 2,
    }
}

/// Parses arguments, runs, prints the report path; returns the process exit code.
pub fn main_with_args(args: Args) -> i32 {
    if args.print_defaults {
        print!("{}", ExperimentConfig::default().to_toml());
        return 0;
    }
    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} threads: {e}");
            return 3;
        }
    }
    let cfg = match &args.config {
        Some(p) => ExperimentConfig::load(p),
        None => Ok(ExperimentConfig::default()),
    };
    let result = cfg.and_then(|cfg| {
        let cmd = args.command.expect("clap enforces a subcommand");
        run(cmd, &cfg, &args.out, args.seed)
    });
    match result {
        Ok(report) => {
            let dir = report.outputs.first().and_then(|p| p.parent()).unwrap_or(&args.out);
            println!("{}", dir.join("report.json").display());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Runs one subcommand and moves its outputs to `out_dir/<subcommand>/`.
pub fn run(cmd: Command, cfg: &ExperimentConfig, out_dir: &Path, seed: Option<u64>) -> Result<RunReport> {
    let mut cfg = cfg.clone();
    cfg.seed = seed.unwrap_or(cfg.seed);
    let mut st = Staging::new(out_dir, cmd.name())?;
    let summary = match cmd {
        Command::Comb => run_comb(&cfg, &mut st)?,
        Command::Sweep => run_sweep(&cfg, &mut st)?,
        Command::Fit => run_fit(&cfg, &mut st)?,
        Command::EchoFit => run_echo_fit(&cfg, &mut st)?,
        Command::Multiplex => run_multiplex(&cfg, &mut st)?,
        Command::Repeater => run_repeater(&cfg, &mut st)?,
        Command::G2 => run_g2(&cfg, &mut st)?,
        Command::Project => run_project(&cfg, &mut st)?,
    };
    let mut outputs = st.files();
    outputs.push(st.final_path("report.json"));
    let report = RunReport {
        tool: "afcsim".into(),
        version: VERSION.into(),
        subcommand: cmd,
        seed: cfg.seed,
        config: cfg,
        outputs,
        summary,
    };
    let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Config(e.to_string()))?;
    st.text("report.json", &(text + "\n"))?;
    st.commit()?;
    Ok(report)
}

fn stride_for(rows: usize) -> usize {
    rows.div_ceil(MAX_TRACE_ROWS).max(1)
}

fn profile_rows(p: &OpticalDepthProfile, lo: f64, hi: f64) -> Vec<Vec<String>> {
    (0..p.n_bins())
        .filter(|&j| (lo..=hi).contains(&p.frequency(j)))
        .map(|j| vec![num(p.frequency(j)), num(p.depths()[j])])
        .collect()
}

fn run_comb(cfg: &ExperimentConfig, st: &mut Staging) -> Result<Value> {
    let spec = &cfg.comb;
    spec.validate()?;
    let probe_cfg = &cfg.sweep.probe;
    let grid = probe_cfg.grid_for(spec.delta)?;
    let profile = build_profile_for_grid(spec, grid)?;
    let (lo, hi) = spec.band();
    let margin = 0.5 * (hi - lo);
    st.csv("profile.csv", &["freq_Hz", "optical_depth"], profile_rows(&profile, lo - margin, hi + margin))?;

    let probe = probe_cfg.probe(grid, spec.center_detuning)?;
    let r = store_and_recall_with(&probe, spec, &cfg.decoherence, probe_cfg.phase_mode)?;
    let end = r.input_time + 3.5 * spec.storage_time();
    let last = grid.sample_of(end.min(grid.span() - grid.dt()));
    let stride = stride_for(last + 1);
    let (pin, pout) = (probe.intensity(), r.output.intensity());
    st.csv(
        "recall.csv",
        &["time_s", "input_intensity", "output_intensity"],
        (0..=last).step_by(stride).map(|k| vec![num(grid.time(k)), num(pin[k]), num(pout[k])]),
    )?;
    st.text(
        "comb.gp",
        &gnuplot(
            "Comb profile and recall",
            "",
            "",
            "set multiplot layout 2,1\nset xlabel 'Detuning (MHz)'\nset ylabel 'Optical depth'\nplot 'profile.csv' using ($1/1e6):2 with lines\nset xlabel 'Time (us)'\nset ylabel 'Intensity'\nset logscale y\nplot 'recall.csv' using ($1*1e6):2 with lines, '' using ($1*1e6):3 with lines\nunset multiplot",
        ),
    )?;
    Ok(json!({
        "n_teeth": spec.n_teeth(),
        "storage_time_s": spec.storage_time(),
        "efficiency": r.efficiency,
        "analytic_efficiency": analytic_efficiency(spec)?,
        "decay_factor": cfg.decoherence.efficiency_decay(spec.storage_time()),
        "echo_delay_s": r.echo_delay(),
        "transmitted_fraction": r.transmitted_energy / r.input_energy,
        "higher_order_echoes": r.higher_order_echoes,
    }))
}

fn fit_summary(points: &[(f64, f64)], st: &mut Staging, name: &str) -> Result<Value> {
    let fit = fit_exponential_decay(points)?;
    st.csv(
        name,
        &["tau_s", "efficiency", "fitted_efficiency"],
        points.iter().map(|(t, e)| vec![num(*t), num(*e), num(fit.eta0 * (-t / fit.tau_1e).exp())]),
    )?;
    st.text(
        &name.replace(".csv", ".gp"),
        &gnuplot(
            "Efficiency against storage time",
            "Storage time (us)",
            "Efficiency",
            &format!("set logscale y\nplot '{name}' using ($1*1e6):2 with points pt 7, '' using ($1*1e6):3 with lines"),
        ),
    )?;
    serde_json::to_value(fit).map_err(|e| Error::Config(e.to_string()))
}

fn run_sweep(cfg: &ExperimentConfig, st: &mut Staging) -> Result<Value> {
    let pts = efficiency_sweep(&cfg.sweep.taus, &cfg.comb, &cfg.decoherence, &cfg.sweep.probe)?;
    let pairs: Vec<(f64, f64)> = pts.iter().map(|p| (p.tau, p.efficiency)).collect();
    let fit = fit_summary(&pairs, st, "sweep.csv")?;
    Ok(json!({
        "fit": fit,
        "combined_tm_s": cfg.decoherence.combined_tm(),
        "points": pts,
    }))
}

fn run_fit(cfg: &ExperimentConfig, st: &mut Staging) -> Result<Value> {
    let path = cfg
        .fit
        .input
        .as_ref()
        .ok_or_else(|| Error::invalid("fit.input", "path to a tau_s,efficiency CSV is required"))?;
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Config(format!("fit.input {}: {e}", path.display())))?;
    let pts = read_sweep_csv(file)?;
    let fit = fit_summary(&pts, st, "fit.csv")?;
    Ok(json!({ "input": path, "fit": fit }))
}

fn run_echo_fit(cfg: &ExperimentConfig, st: &mut Staging) -> Result<Value> {
    let e = &cfg.echo;
    let points: Vec<(f64, f64)> = match &e.input {
        Some(path) => {
            let mut rdr = csv::ReaderBuilder::new()
                .comment(Some(b'#'))
                .from_path(path)
                .map_err(|err| Error::Config(format!("echo.input {}: {err}", path.display())))?;
            let mut v = Vec::new();
            for rec in rdr.records() {
                let rec = rec?;
                let f = |i: usize| rec.get(i).and_then(|s| s.trim().parse::<f64>().ok());
                match (f(0), f(1)) {
                    (Some(a), Some(b)) => v.push((a, b)),
                    _ => return Err(Error::Config(format!("bad echo row {rec:?}"))),
                }
            }
            v
        }
        None => e
            .t12
            .iter()
            .map(|t| (*t, two_pulse_echo_intensity_stretched(*t, e.t2, e.exponent.unwrap_or(1.0))))
            .collect(),
    };
    let fit = fit_two_pulse_echo(&points, e.exponent)?;
    st.csv(
        "echo.csv",
        &["t12_s", "intensity", "fitted_intensity"],
        points.iter().map(|(t, i)| {
            vec![num(*t), num(*i), num(fit.amplitude * two_pulse_echo_intensity_stretched(*t, fit.t2, fit.exponent))]
        }),
    )?;
    st.text(
        "echo.gp",
        &gnuplot(
            "Two-pulse echo decay",
            "Pulse separation (us)",
            "Echo intensity",
            "set logscale y\nplot 'echo.csv' using ($1*1e6):2 with points pt 7, '' using ($1*1e6):3 with lines",
        ),
    )?;
    Ok(json!({ "fit": fit, "source": if e.input.is_some() { "file" } else { "synthetic" } }))
}

fn run_multiplex(cfg: &ExperimentConfig, st: &mut Staging) -> Result<Value> {
    let m = &cfg.multiplex;
    if m.trace_stride == 0 {
        return Err(Error::invalid("multiplex.trace_stride", "must be ≥ 1"));
    }
    let offsets = m.offsets();
    let setup = FeedforwardSetup::new(&m.plan, &cfg.decoherence, &offsets, &m.settings)?;
    let grid = setup.recalled().grid();

    let profiles = (0..m.plan.n_channels)
        .map(|i| build_profile_for_grid(&m.plan.channel_comb(i), grid))
        .collect::<Result<Vec<_>>>()?;
    let combined = OpticalDepthProfile::combined(&profiles, m.plan.base_comb.out_of_band_depth)?;
    let lo = m.plan.channel_center(0) - m.plan.channel_bandwidth;
    let hi = m.plan.channel_center(m.plan.n_channels - 1) + m.plan.channel_bandwidth;
    let rows = profile_rows(&combined, lo, hi);
    let pstride = stride_for(rows.len() / 4);
    st.csv("profile.csv", &["freq_Hz", "optical_depth"], rows.into_iter().step_by(pstride))?;

    let mut runs = Vec::new();
    let mut plots = Vec::new();
    for &sel in &m.select {
        let run = setup.select(sel, &m.cavity)?;
        let name = format!("trace_ch{sel}.csv");
        st.csv(
            &name,
            &["time_s", "intensity"],
            (0..run.trace.len()).step_by(m.trace_stride).map(|k| vec![num(run.time(k)), num(run.trace[k])]),
        )?;
        plots.push(format!("'{name}' using ($1*1e6):2 with lines title 'channel {sel}'"));
        runs.push(run);
    }
    let matrix: Vec<(usize, Vec<f64>)> = if m.crosstalk_matrix {
        setup.crosstalk_matrix(&m.cavity)?.rows.into_iter().enumerate().collect()
    } else {
        runs.iter().map(|r| (r.selected, r.crosstalk_row.clone())).collect()
    };
    let mut header = vec!["selected_channel".to_string()];
    header.extend((0..m.plan.n_channels).map(|j| format!("power_fraction_ch{j}")));
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    st.csv(
        "crosstalk.csv",
        &header_refs,
        matrix.iter().map(|(i, row)| std::iter::once(i.to_string()).chain(row.iter().map(|v| num(*v))).collect::<Vec<_>>()),
    )?;
    st.text(
        "multiplex.gp",
        &gnuplot(
            "Feed-forward channel selection",
            "Time (us)",
            "Detected intensity",
            &format!(
                "set multiplot layout 2,1\nplot 'profile.csv' using ($1/1e6):2 with lines title 'optical depth'\nplot {}\nunset multiplot",
                plots.join(", ")
            ),
        ),
    )?;
    let neighbour = m.cavity.power_transmission(m.cavity.resonance_detuning + m.plan.spacing) / m.cavity.peak_transmission;
    Ok(json!({
        "selected": m.select,
        "crosstalk_rows": runs.iter().map(|r| json!({ "selected": r.selected, "row": r.crosstalk_row })).collect::<Vec<_>>(),
        "lorentzian_neighbour_fraction": neighbour,
        "multimode_capacity": multimode_capacity(m.plan.base_comb.storage_time(), m.settings.pulse_fwhm, m.plan.n_channels),
        "slots_s": setup.slots(),
    }))
}

fn run_repeater(cfg: &ExperimentConfig, st: &mut Staging) -> Result<Value> {
    let r = &cfg.repeater;
    let out = simulate_spinwave_schedule(&r.memory, &r.trains, &r.pulses)?;
    st.csv(
        "events.csv",
        &["time_s", "train", "event", "pulse_index"],
        out.events.iter().map(|e| {
            vec![num(e.time), e.train.clone(), label(&e.kind), e.pulse.map(|p| p.to_string()).unwrap_or_default()]
        }),
    )?;
    st.csv(
        "conflicts.csv",
        &["time_s", "train", "pulse_index", "kind", "forced_reemission_s"],
        out.conflicts.iter().map(|c| {
            vec![num(c.time), c.train.clone(), c.pulse.to_string(), label(&c.kind), c.forced_reemission.map(num).unwrap_or_default()]
        }),
    )?;
    st.text(
        "repeater.gp",
        &gnuplot(
            "Memory timeline",
            "Time (us)",
            "Event",
            "set ytics ('absorbed' 0, 'to_spin' 1, 'to_optical' 2, 'reemitted' 3)\nmap(s) = s eq 'absorbed' ? 0 : s eq 'to_spin' ? 1 : s eq 'to_optical' ? 2 : 3\nplot 'events.csv' using ($1*1e6):(map(strcol(3))):2 with labels point pt 7 offset 0,1 notitle",
        ),
    )?;
    let rate = entanglement_rate(&r.rate, cfg.seed)?;
    Ok(json!({
        "corrupted": out.corrupted(),
        "n_conflicts": out.conflicts.len(),
        "final_states": out.trains.iter().map(|t| json!({ "id": t.id, "state": t.state })).collect::<Vec<_>>(),
        "reemission_times_s": out.reemission_times,
        "rate": rate,
        "rate_consistent": rate.consistent(),
        "max_conflict_free_block": crate::repeater::max_conflict_free_block(r.rate.optical_storage_time, r.rate.mode_duration),
    }))
}

/// snake_case name of a unit enum variant, via its serde representation.
fn label<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(Value::String(s)) => s,
        other => format!("{other:?}"),
    }
}

fn run_g2(cfg: &ExperimentConfig, st: &mut Staging) -> Result<Value> {
    let model = &cfg.pair_source;
    let counts = simulate_counts(model, cfg.g2.n_windows, cfg.seed)?;
    let est = g2_from_counts(&counts)?;
    let passed = classicality_check(est.g2);
    st.csv(
        "g2.csv",
        &["n_windows", "singles_herald", "singles_signal", "coincidences", "g2", "std_error", "expected_g2", "classical_bound_passed"],
        [vec![
            counts.n_windows.to_string(),
            counts.singles_herald.to_string(),
            counts.singles_signal.to_string(),
            counts.coincidences.to_string(),
            num(est.g2),
            num(est.std_error),
            num(model.expected_g2()),
            passed.to_string(),
        ]],
    )?;
    let report = json!({ "g2": est.g2, "std_error": est.std_error, "classical_bound_passed": passed });
    st.text("g2.json", &(serde_json::to_string_pretty(&report).map_err(|e| Error::Config(e.to_string()))? + "\n"))?;
    st.text(
        "g2.gp",
        &gnuplot(
            "Cross-correlation",
            "",
            "g2",
            "set xrange [-1:1]\nset yrange [0:*]\nplot 'g2.csv' using (0):5:6 with yerrorbars pt 7 title 'g2', 2 with lines dt 2 title 'classical bound'",
        ),
    )?;
    Ok(json!({
        "counts": counts,
        "g2": est.g2,
        "std_error": est.std_error,
        "expected_g2": model.expected_g2(),
        "classical_bound_passed": passed,
    }))
}

fn run_project(cfg: &ExperimentConfig, st: &mut Staging) -> Result<Value> {
    let p = &cfg.project;
    let at = cavity_enhanced_projection(&cfg.comb, &cfg.decoherence, p.tau)?;
    let curve = p
        .taus
        .iter()
        .map(|t| cavity_enhanced_projection(&cfg.comb, &cfg.decoherence, *t).map(|r| (*t, r)))
        .collect::<Result<Vec<_>>>()?;
    st.csv(
        "projection.csv",
        &["tau_s", "cavity_efficiency", "single_pass_efficiency"],
        curve.iter().map(|(t, r)| vec![num(*t), num(r.cavity_matched), num(r.single_pass)]),
    )?;
    st.text(
        "projection.gp",
        &gnuplot(
            "Impedance-matched cavity projection",
            "Storage time (us)",
            "Efficiency",
            "plot 'projection.csv' using ($1*1e6):2 with linespoints title 'cavity', '' using ($1*1e6):3 with linespoints title 'single pass'",
        ),
    )?;
    Ok(json!({ "tau_s": p.tau, "projection": at }))
}
