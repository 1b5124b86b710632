//! Batch front door: flat INI config, subcommand dispatch, and
//! machine-readable outputs with a run manifest.

use crate::case_study::{self, RegimeConfig, SweepMode, SweepSpec};
use crate::error::{LabError, Result};
use crate::potential::{build_maps, Landscape};
use crate::qecd::evolve::{detection_prob, evolve, initial_gaussian};
use crate::qecd::model::build_spectral_model;
use crate::qecd::protocol::{hitting_time, DetectionWindow};
use crate::secd::analytic;
use crate::secd::sim::{monte_carlo_hitting, run_ode_raw, SimConfig};
use crate::secd::Direction;
use clap::{Parser, Subcommand};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};

/// 17 significant digits: round-trip exact for f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

// ---------------------------------------------------------------------------
// config file

#[derive(Debug, Clone)]
struct RawConfig {
    /// (section.key) → (value, line number)
    entries: BTreeMap<String, (String, usize)>,
}

const KNOWN_KEYS: &[&str] = &[
    "potential.kind",
    "potential.a",
    "potential.omega",
    "potential.v0",
    "classical.lambda_c",
    "classical.e",
    "classical.u0",
    "classical.n_traj",
    "classical.seed",
    "classical.max_s",
    "classical.window_sigma",
    "classical.teleport_rel",
    "classical.method",
    "classical.dt",
    "quantum.hbar",
    "quantum.lambda_q",
    "quantum.alpha",
    "quantum.n_grid",
    "quantum.t_final",
    "quantum.n_samples",
    "sweep.mode",
    "sweep.max_pow2",
    "sweep.delta_log10_min",
    "sweep.delta_log10_max",
    "sweep.points",
    "sweep.n_traj",
    "sweep.quantum_max_beta",
    "sweep.s_rate",
    "sweep.h_rate",
    "sweep.delta_list",
    "output.dir",
    "tolerances.quad_tol",
    "tolerances.eig_tol",
];

fn parse_ini(text: &str) -> Result<RawConfig> {
    let mut entries = BTreeMap::new();
    let mut section = String::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find(['#', ';']) {
            Some(p) => &raw_line[..p],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| {
                LabError::ConfigError(format!("line {line_no}: malformed section header"))
            })?;
            section = name.trim().to_string();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            LabError::ConfigError(format!("line {line_no}: expected `key = value`"))
        })?;
        if section.is_empty() {
            return Err(LabError::ConfigError(format!(
                "line {line_no}: key outside any [section]"
            )));
        }
        let full = format!("{}.{}", section, key.trim());
        if !KNOWN_KEYS.contains(&full.as_str()) {
            return Err(LabError::ConfigError(format!(
                "line {line_no}: unknown key `{full}`"
            )));
        }
        if let Some((_, prev_line)) = entries.get(&full) {
            return Err(LabError::ConfigError(format!(
                "line {line_no}: duplicate key `{full}` (first set on line {prev_line})"
            )));
        }
        entries.insert(full, (value.trim().to_string(), line_no));
    }
    Ok(RawConfig { entries })
}

impl RawConfig {
    fn f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.entries.get(key) {
            None => Ok(default),
            Some((v, line)) => v.parse().map_err(|_| {
                LabError::ConfigError(format!("line {line}: `{key}` is not a number: {v}"))
            }),
        }
    }

    fn f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.entries.get(key) {
            None => Ok(default.to_vec()),
            Some((v, line)) => v
                .split(',')
                .map(|s| {
                    s.trim().parse().map_err(|_| {
                        LabError::ConfigError(format!(
                            "line {line}: `{key}` has a non-numeric entry: {s}"
                        ))
                    })
                })
                .collect(),
        }
    }

    fn usize(&self, key: &str, default: usize) -> Result<usize> {
        match self.entries.get(key) {
            None => Ok(default),
            Some((v, line)) => v.parse().map_err(|_| {
                LabError::ConfigError(format!("line {line}: `{key}` is not an integer: {v}"))
            }),
        }
    }

    fn u64(&self, key: &str, default: u64) -> Result<u64> {
        match self.entries.get(key) {
            None => Ok(default),
            Some((v, line)) => v.parse().map_err(|_| {
                LabError::ConfigError(format!("line {line}: `{key}` is not an integer: {v}"))
            }),
        }
    }

    fn string(&self, key: &str, default: &str) -> String {
        self.entries
            .get(key)
            .map(|(v, _)| v.clone())
            .unwrap_or_else(|| default.to_string())
    }

    fn line_of(&self, key: &str) -> usize {
        self.entries.get(key).map(|(_, l)| *l).unwrap_or(0)
    }
}

/// Validated run configuration with defaults filled.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RunConfig {
    pub potential_kind: String,
    pub a: f64,
    pub omega: f64,
    pub v0: f64,
    pub lambda_c: f64,
    pub energy: f64,
    pub u0: Direction,
    pub n_traj: usize,
    pub seed: u64,
    pub max_s: f64,
    pub window_sigma: Option<f64>,
    pub teleport_rel: f64,
    pub method: String,
    pub dt: f64,
    pub hbar_list: Vec<f64>,
    pub lambda_q: f64,
    pub alpha: f64,
    pub n_grid: usize,
    pub t_final: f64,
    pub n_samples: usize,
    pub sweep_mode: String,
    pub sweep_max_pow2: u32,
    pub sweep_delta_log10_min: f64,
    pub sweep_delta_log10_max: f64,
    pub sweep_points: usize,
    pub sweep_n_traj: usize,
    pub sweep_quantum_max_beta: f64,
    pub s_rate: f64,
    pub h_rate: f64,
    pub delta_list: Vec<f64>,
    pub out_dir: String,
    pub quad_tol: f64,
    pub eig_tol: f64,
}

/// Parse and validate a config file.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| LabError::ConfigError(format!("cannot read {}: {e}", path.display())))?;
    let raw = parse_ini(&text)?;

    let kind = raw.string("potential.kind", "quartic");
    if kind != "quartic" {
        return Err(LabError::ConfigError(format!(
            "line {}: potential.kind must be `quartic` (custom landscapes are API-only)",
            raw.line_of("potential.kind")
        )));
    }
    let cfg = RunConfig {
        potential_kind: kind,
        a: raw.f64("potential.a", 1.0)?,
        omega: raw.f64("potential.omega", 2.0)?,
        v0: raw.f64("potential.v0", 1.0)?,
        lambda_c: raw.f64("classical.lambda_c", 1.0)?,
        energy: raw.f64("classical.e", 1.0)?,
        u0: match raw.string("classical.u0", "+1").as_str() {
            "+1" | "1" | "plus" => Direction::Plus,
            "-1" | "minus" => Direction::Minus,
            other => {
                return Err(LabError::ConfigError(format!(
                    "line {}: classical.u0 must be +1 or -1, got {other}",
                    raw.line_of("classical.u0")
                )))
            }
        },
        n_traj: raw.usize("classical.n_traj", 1000)?,
        seed: raw.u64("classical.seed", 42)?,
        max_s: raw.f64("classical.max_s", 1e7)?,
        window_sigma: {
            let w = raw.f64("classical.window_sigma", -1.0)?;
            if w > 0.0 {
                Some(w)
            } else {
                None
            }
        },
        teleport_rel: raw.f64("classical.teleport_rel", 0.05)?,
        method: raw.string("classical.method", "event"),
        dt: raw.f64("classical.dt", 1e-4)?,
        hbar_list: raw.f64_list("quantum.hbar", &[0.05])?,
        lambda_q: raw.f64("quantum.lambda_q", 1.0)?,
        alpha: raw.f64("quantum.alpha", 0.15)?,
        n_grid: raw.usize("quantum.n_grid", 1024)?,
        t_final: raw.f64("quantum.t_final", 10.0)?,
        n_samples: raw.usize("quantum.n_samples", 200)?,
        sweep_mode: raw.string("sweep.mode", "beta"),
        sweep_max_pow2: raw.u64("sweep.max_pow2", 10)? as u32,
        sweep_delta_log10_min: raw.f64("sweep.delta_log10_min", 4.0)?,
        sweep_delta_log10_max: raw.f64("sweep.delta_log10_max", 8.0)?,
        sweep_points: raw.usize("sweep.points", 9)?,
        sweep_n_traj: raw.usize("sweep.n_traj", 2000)?,
        sweep_quantum_max_beta: raw.f64("sweep.quantum_max_beta", 4.0)?,
        s_rate: raw.f64("sweep.s_rate", 1.0)?,
        h_rate: raw.f64("sweep.h_rate", 1.0)?,
        delta_list: raw.f64_list(
            "sweep.delta_list",
            &[1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2],
        )?,
        out_dir: raw.string("output.dir", "out"),
        quad_tol: raw.f64("tolerances.quad_tol", 1e-10)?,
        eig_tol: raw.f64("tolerances.eig_tol", 1e-8)?,
    };

    // value-level validation with line numbers where available
    let complain = |key: &str, msg: &str| -> LabError {
        LabError::ConfigError(format!("line {}: {msg}", raw.line_of(key)))
    };
    if cfg.lambda_c < 0.0 {
        return Err(complain("classical.lambda_c", "rate must be nonnegative"));
    }
    if !(cfg.energy > 0.0) {
        return Err(complain("classical.e", "energy must be positive"));
    }
    if !(cfg.a > 0.0 && cfg.omega > 0.0 && cfg.v0 > 0.0) {
        return Err(complain("potential.a", "quartic needs a, omega, v0 > 0"));
    }
    if cfg.hbar_list.iter().any(|h| !(*h > 0.0)) {
        return Err(complain("quantum.hbar", "hbar entries must be positive"));
    }
    if !(cfg.quad_tol > 0.0) {
        return Err(complain("tolerances.quad_tol", "quad_tol must be positive"));
    }
    if cfg.method != "event" && cfg.method != "ode" {
        return Err(complain("classical.method", "method must be event or ode"));
    }
    if cfg.sweep_mode != "beta" && cfg.sweep_mode != "v0" {
        return Err(complain("sweep.mode", "mode must be beta or v0"));
    }
    Ok(cfg)
}

// ---------------------------------------------------------------------------
// command line

#[derive(Parser)]
#[command(
    name = "ecd-lab",
    version,
    about = "Energy-conserving descent laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Config file path
    #[arg(long, global = true, default_value = "ecd-lab.ini")]
    config: PathBuf,
    /// Output directory (overrides config)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed (overrides config)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (fallback: ECD_LAB_THREADS)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy, Debug)]
enum Command {
    /// Check the landscape assumptions and write a validation report
    Validate,
    /// Monte Carlo hitting times with the event-driven (or raw ODE) engine
    SimulateSecd,
    /// Closed-form hitting-time report
    AnalyticSecd,
    /// Spectral model eigenvalues against the quantization rule
    Spectrum,
    /// Evolve the initial packet and trace norm, energy, window mass
    Evolve,
    /// Randomized-time quantum hitting protocol
    HitQuantum,
    /// Dimensionless case-study integrals over a delta list
    Dimensionless,
    /// Barrier sweep with regression fits
    Sweep,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::SimulateSecd => "simulate-secd",
            Command::AnalyticSecd => "analytic-secd",
            Command::Spectrum => "spectrum",
            Command::Evolve => "evolve",
            Command::HitQuantum => "hit-quantum",
            Command::Dimensionless => "dimensionless",
            Command::Sweep => "sweep",
        }
    }
}

/// Entry point; returns the process exit code (0 ok, 2 flagged warnings,
/// 1 error).
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(flagged) => {
            if flagged {
                2
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

struct OutputSink {
    dir: PathBuf,
    files: Vec<String>,
}

impl OutputSink {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        let mut f = std::fs::File::create(&path)?;
        f.write_all(contents.as_bytes())?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn write_json<T: serde::Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let body = serde_json::to_string_pretty(value).map_err(|e| LabError::Io(e.to_string()))?;
        self.write(name, &(body + "\n"))
    }
}

fn execute(cli: &Cli) -> Result<bool> {
    let start = std::time::Instant::now();
    let mut cfg = parse_config(&cli.config)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.display().to_string();
    }
    let threads = cli.threads.or_else(|| {
        std::env::var("ECD_LAB_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = threads {
        // ignore failure when a pool already exists (e.g. under tests)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }

    let mut sink = OutputSink::new(Path::new(&cfg.out_dir))?;
    let flagged = dispatch(cli.command, &cfg, &mut sink)?;

    let config_text = std::fs::read_to_string(&cli.config)?;
    let mut hasher = Sha256::new();
    hasher.update(config_text.as_bytes());
    let config_sha256 = hex_string(&hasher.finalize());

    #[derive(serde::Serialize)]
    struct Manifest<'a> {
        subcommand: &'a str,
        config_path: String,
        config_sha256: String,
        seed: u64,
        version: &'a str,
        threads: Option<usize>,
        wall_time_s: f64,
        flagged: bool,
        outputs: Vec<String>,
    }
    let manifest = Manifest {
        subcommand: cli.command.name(),
        config_path: cli.config.display().to_string(),
        config_sha256,
        seed: cfg.seed,
        version: env!("CARGO_PKG_VERSION"),
        threads,
        wall_time_s: start.elapsed().as_secs_f64(),
        flagged,
        outputs: sink.files.clone(),
    };
    sink.write_json("manifest.json", &manifest)?;
    Ok(flagged)
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn landscape_of(cfg: &RunConfig) -> Result<Landscape> {
    Landscape::quartic(cfg.a, cfg.omega, cfg.v0)
}

fn sim_config(cfg: &RunConfig) -> SimConfig {
    SimConfig {
        lambda_c: cfg.lambda_c,
        energy: cfg.energy,
        u0: cfg.u0,
        seed: cfg.seed,
        max_s: cfg.max_s,
        n_traj: cfg.n_traj,
        quad_tol: cfg.quad_tol,
        window_sigma: cfg.window_sigma,
        teleport_rel: cfg.teleport_rel,
    }
}

fn dispatch(cmd: Command, cfg: &RunConfig, sink: &mut OutputSink) -> Result<bool> {
    match cmd {
        Command::Validate => {
            let lnd = landscape_of(cfg)?;
            let w = lnd.a_right - lnd.a_left;
            let report =
                lnd.validate_assumptions((lnd.a_left - 1.5 * w, lnd.a_right + 1.5 * w), 1e-2);
            let ok = report.all_ok();
            sink.write_json("validation.json", &report)?;
            Ok(!ok)
        }
        Command::SimulateSecd => {
            let lnd = landscape_of(cfg)?;
            let maps = build_maps(&lnd, cfg.energy, cfg.quad_tol)?;
            if cfg.method == "ode" {
                let out = run_ode_raw(&lnd, &sim_config(cfg), cfg.dt)?;
                #[derive(serde::Serialize)]
                struct OdeReport {
                    hit: bool,
                    t_real: f64,
                    s_elapsed: f64,
                    n_flips: usize,
                    energy_drift: f64,
                    drift_warning: bool,
                }
                let rep = OdeReport {
                    hit: out.run.hit,
                    t_real: out.run.t_real,
                    s_elapsed: out.run.s_elapsed,
                    n_flips: out.run.flips.len(),
                    energy_drift: out.energy_drift,
                    drift_warning: out.drift_warning,
                };
                sink.write_json("hitting_report.json", &rep)?;
                return Ok(out.drift_warning);
            }
            let report = monte_carlo_hitting(&maps, &sim_config(cfg))?;
            let mut csv = String::from("traj_id,seed,hit,t_real,s_elapsed,n_flips\n");
            for t in &report.trajectories {
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    t.traj_id,
                    t.seed,
                    t.hit,
                    fmt_f64(t.t_real),
                    fmt_f64(t.s_elapsed),
                    t.n_flips
                ));
            }
            sink.write("trajectories.csv", &csv)?;
            sink.write_json("hitting_report.json", &report)?;
            Ok(report.n_timeouts > 0)
        }
        Command::AnalyticSecd => {
            let lnd = landscape_of(cfg)?;
            let maps = build_maps(&lnd, cfg.energy, cfg.quad_tol)?;
            let breakdown = analytic::hitting_time_general(&maps, cfg.lambda_c, cfg.u0)?;
            let tt = analytic::transition_times(&maps, cfg.lambda_c)?;
            let symmetric = analytic::hitting_time_symmetric(&maps, cfg.lambda_c, cfg.u0).ok();
            let legs = analytic::expected_legs(breakdown.q, cfg.u0);
            #[derive(serde::Serialize)]
            struct AnalyticReport<'a> {
                breakdown: &'a analytic::HittingBreakdown,
                transition_times: &'a analytic::TransitionTimes,
                symmetric_total: Option<f64>,
                expected_legs_from_start: f64,
            }
            sink.write_json(
                "analytic.json",
                &AnalyticReport {
                    breakdown: &breakdown,
                    transition_times: &tt,
                    symmetric_total: symmetric,
                    expected_legs_from_start: legs,
                },
            )?;
            Ok(false)
        }
        Command::Spectrum => {
            let lnd = landscape_of(cfg)?;
            let maps = build_maps(&lnd, cfg.energy, cfg.quad_tol)?;
            let hbar = cfg.hbar_list[0];
            let model = build_spectral_model(&maps, hbar, cfg.lambda_q, cfg.n_grid)?;
            let mut csv = String::from("n,E_n,E_wkb_n,rel_err\n");
            for n in 1..=model.n_grid {
                let e_n = model.energy(n - 1);
                let e_wkb = (n as f64 * std::f64::consts::PI * hbar / maps.l_y).powi(2);
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    n,
                    fmt_f64(e_n),
                    fmt_f64(e_wkb),
                    fmt_f64(e_n / e_wkb - 1.0)
                ));
            }
            sink.write("spectrum.csv", &csv)?;
            Ok(false)
        }
        Command::Evolve => {
            let lnd = landscape_of(cfg)?;
            let maps = build_maps(&lnd, cfg.energy, cfg.quad_tol)?;
            let hbar = cfg.hbar_list[0];
            let model = build_spectral_model(&maps, hbar, cfg.lambda_q, cfg.n_grid)?;
            let psi0 = initial_gaussian(&model, lnd.a_left, cfg.alpha)?;
            let sigma = cfg.alpha * hbar.sqrt();
            let mut csv = String::from("t,norm,energy,p_window\n");
            for k in 0..=cfg.n_samples {
                let t = cfg.t_final * k as f64 / cfg.n_samples.max(1) as f64;
                let psi = evolve(&model, &psi0, t);
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt_f64(t),
                    fmt_f64(psi.norm(&model)),
                    fmt_f64(psi.energy_expectation(&model)),
                    fmt_f64(detection_prob(&model, &psi, lnd.a_right, sigma))
                ));
            }
            sink.write("evolve.csv", &csv)?;
            Ok(false)
        }
        Command::HitQuantum => {
            let lnd = landscape_of(cfg)?;
            let maps = build_maps(&lnd, cfg.energy, cfg.quad_tol)?;
            let mut qhit_csv = String::from("hbar,T_hit_numeric,T_bound\n");
            let mut last_report = None;
            let mut flagged = false;
            for &hbar in &cfg.hbar_list {
                let model = build_spectral_model(&maps, hbar, cfg.lambda_q, cfg.n_grid)?;
                let psi0 = initial_gaussian(&model, lnd.a_left, cfg.alpha)?;
                let window = DetectionWindow {
                    center: lnd.a_right,
                    sigma: cfg.alpha * hbar.sqrt(),
                };
                let rep = hitting_time(&model, &psi0, window)?;
                flagged |= !rep.bracket_interior;
                qhit_csv.push_str(&format!(
                    "{},{},{}\n",
                    fmt_f64(hbar),
                    fmt_f64(rep.t_hit_numeric),
                    fmt_f64(rep.t_bound)
                ));
                last_report = Some(rep);
            }
            sink.write("qhit.csv", &qhit_csv)?;
            if let Some(rep) = &last_report {
                let mut pbar_csv = String::from("tau,pbar_numeric,pbar_analytic\n");
                for ((tau, pn), pa) in rep
                    .tau_grid
                    .iter()
                    .zip(&rep.pbar_numeric)
                    .zip(&rep.pbar_analytic)
                {
                    pbar_csv.push_str(&format!(
                        "{},{},{}\n",
                        fmt_f64(*tau),
                        fmt_f64(*pn),
                        fmt_f64(*pa)
                    ));
                }
                sink.write("pbar.csv", &pbar_csv)?;
                sink.write_json("qhit.json", rep)?;
            }
            Ok(flagged)
        }
        Command::Dimensionless => {
            let mut csv = String::from("delta,lcal,inner,tail\n");
            for &d in &cfg.delta_list {
                let v = case_study::dimensionless_integrals(d)?;
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt_f64(d),
                    fmt_f64(v.lcal),
                    fmt_f64(v.inner),
                    fmt_f64(v.tail)
                ));
            }
            sink.write("dimensionless.csv", &csv)?;
            Ok(false)
        }
        Command::Sweep => {
            let regime_cfg = RegimeConfig {
                a: cfg.a,
                omega: cfg.omega,
                v0: cfg.v0,
                lambda_c: cfg.lambda_c,
                lambda_q: cfg.lambda_q,
                energy: cfg.energy,
                u0: cfg.u0,
                s_rate: cfg.s_rate,
                h_rate: cfg.h_rate,
            };
            let mode = if cfg.sweep_mode == "beta" {
                SweepMode::Beta {
                    max_pow2: cfg.sweep_max_pow2,
                }
            } else {
                SweepMode::V0 {
                    delta_log10_min: cfg.sweep_delta_log10_min,
                    delta_log10_max: cfg.sweep_delta_log10_max,
                    points: cfg.sweep_points,
                }
            };
            let spec = SweepSpec {
                mode,
                n_traj: cfg.sweep_n_traj,
                seed: cfg.seed,
                max_s: cfg.max_s,
                quantum_max_beta: cfg.sweep_quantum_max_beta,
                quantum_n_grid: cfg.n_grid,
                quantum_hbar: cfg.hbar_list[0],
                quantum_alpha: cfg.alpha,
            };
            let out = case_study::scaling_sweep(&regime_cfg, &spec)?;
            let mut csv = String::from(
                "beta,v0,regime,Tc_analytic,Tc_mc_mean,Tc_mc_se,Tq_bound,Tq_measured,Tsgd_form,Tqtw_form\n",
            );
            for r in &out.rows {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{}\n",
                    fmt_f64(r.beta),
                    fmt_f64(r.v0),
                    match r.regime {
                        case_study::Regime::SmallError => "small_error",
                        case_study::Regime::LargeError => "large_error",
                    },
                    fmt_f64(r.tc_analytic),
                    fmt_f64(r.tc_mc_mean),
                    fmt_f64(r.tc_mc_se),
                    fmt_f64(r.tq_bound),
                    fmt_f64(r.tq_measured),
                    fmt_f64(r.tsgd_form),
                    fmt_f64(r.tqtw_form)
                ));
            }
            sink.write("sweep.csv", &csv)?;
            sink.write_json("exponents.json", &out.fits)?;
            let bad_fit = |f: &Option<crate::stats::LineFit>| {
                f.as_ref().map(|x| !x.slope.is_finite()).unwrap_or(false)
            };
            Ok(bad_fit(&out.fits.small_regime)
                || bad_fit(&out.fits.large_regime_exponent)
                || bad_fit(&out.fits.separation))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_cfg(name: &str, body: &str) -> PathBuf {
        let dir = std::env::temp_dir().join("ecdlab_cfg_tests");
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join(name);
        std::fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn minimal_config_fills_defaults() {
        let p = write_cfg("min.ini", "[potential]\nkind = quartic\n");
        let cfg = parse_config(&p).unwrap();
        assert_eq!(cfg.a, 1.0);
        assert_eq!(cfg.n_traj, 1000);
        assert_eq!(cfg.seed, 42);
    }

    #[test]
    fn negative_rate_rejected_with_line() {
        let p = write_cfg("neg.ini", "[classical]\nlambda_c = -1\n");
        match parse_config(&p).unwrap_err() {
            LabError::ConfigError(msg) => {
                assert!(msg.contains("line 2"), "{msg}");
                assert!(msg.contains("nonnegative"), "{msg}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_key_names_both_lines() {
        let p = write_cfg("dup.ini", "[potential]\na = 1.0\nomega = 2.0\na = 3.0\n");
        match parse_config(&p).unwrap_err() {
            LabError::ConfigError(msg) => {
                assert!(msg.contains("line 4"), "{msg}");
                assert!(msg.contains("line 2"), "{msg}");
                assert!(msg.contains("duplicate"), "{msg}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_key_rejected() {
        let p = write_cfg("unk.ini", "[potential]\nbananas = 7\n");
        let err = parse_config(&p).unwrap_err();
        assert!(matches!(err, LabError::ConfigError(m) if m.contains("unknown key")));
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let p = write_cfg(
            "cmt.ini",
            "# header\n\n[potential]\na = 2.0  # inline\n; semicolon comment\n",
        );
        let cfg = parse_config(&p).unwrap();
        assert_eq!(cfg.a, 2.0);
    }

    #[test]
    fn float_format_round_trips() {
        for x in [1.0, std::f64::consts::PI, 1e-300, 6.281273065462551] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
    }
}
