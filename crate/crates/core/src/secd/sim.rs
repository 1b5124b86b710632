//! Event-driven sECD simulation.
//!
//! In the unit-speed coordinate x = φ(θ) the dynamics between Poisson flips
//! is exactly linear, so first passage is solved in closed form per leg and
//! the only numerics is the cached time antiderivative W. A raw Runge–Kutta
//! integrator of the (Θ, Π) equations cross-validates the event-driven path.

use super::Direction;
use crate::error::{LabError, Result};
use crate::potential::{CoordinateMaps, Landscape};
use crate::stats::mean_se;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Simulation parameters.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SimConfig {
    pub lambda_c: f64,
    pub energy: f64,
    pub u0: Direction,
    pub seed: u64,
    /// intrinsic-time budget per trajectory
    pub max_s: f64,
    pub n_traj: usize,
    pub quad_tol: f64,
    /// optional hitting window half-width |Θ − a| ≤ σ (x threshold moves to
    /// φ(a − σ)); None hits exactly at Θ = a
    pub window_sigma: Option<f64>,
    /// Deep-excursion cutoff as a share of T_det + tail time. Excursions
    /// below the matching depth are replaced by their exact conditional mean
    /// time (the half-line identity), which keeps the hitting-time estimator
    /// unbiased while bounding the event count; the raw excursion duration
    /// has infinite mean, so some cutoff is unavoidable. 0 disables.
    #[serde(default = "default_teleport_rel")]
    pub teleport_rel: f64,
}

fn default_teleport_rel() -> f64 {
    0.05
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_traj < 1 {
            return Err(LabError::DomainError("n_traj must be >= 1".into()));
        }
        if !(self.max_s > 0.0) {
            return Err(LabError::DomainError("max_s must be positive".into()));
        }
        if self.lambda_c < 0.0 {
            return Err(LabError::DomainError("lambda_c must be nonnegative".into()));
        }
        if !(self.energy > 0.0) {
            return Err(LabError::DomainError("energy must be positive".into()));
        }
        Ok(())
    }
}

/// One sECD trajectory in the transformed coordinate.
#[derive(Debug, Clone)]
pub struct ClassicalRun {
    /// s-times of the Poisson sign flips
    pub flips: Vec<f64>,
    pub hit: bool,
    /// accumulated real time at termination
    pub t_real: f64,
    /// intrinsic time at termination
    pub s_elapsed: f64,
    /// final position in x = φ(Θ)
    pub x_final: f64,
}

/// Per-trajectory summary row for the Monte Carlo CSV.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct TrajectorySummary {
    pub traj_id: u64,
    pub seed: u64,
    pub hit: bool,
    pub t_real: f64,
    pub s_elapsed: f64,
    pub n_flips: u64,
}

/// Monte Carlo hitting-time estimate.
#[derive(Debug, Clone, serde::Serialize)]
pub struct HittingReport {
    pub n_traj: usize,
    pub n_hits: usize,
    pub n_timeouts: usize,
    pub mean_t: f64,
    pub se_t: f64,
    pub mean_s: f64,
    pub mean_flips: f64,
    #[serde(skip)]
    pub trajectories: Vec<TrajectorySummary>,
}

/// SplitMix64 round.
fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic per-trajectory stream seed; independent of scheduling so
/// parallel runs reproduce bit-exactly.
pub fn trajectory_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index.wrapping_add(1)))
}

fn exp_sample(rng: &mut ChaCha8Rng, rate: f64) -> f64 {
    if rate <= 0.0 {
        return f64::INFINITY;
    }
    // u in (0, 1]
    let u: f64 = 1.0 - rng.gen::<f64>();
    -u.ln() / rate
}

fn hit_threshold(maps: &CoordinateMaps, cfg: &SimConfig) -> f64 {
    match cfg.window_sigma {
        Some(sigma) => maps.phi(maps.landscape().a_right - sigma),
        None => maps.l_classical,
    }
}

struct StepOutcome {
    hit: bool,
    t_real: f64,
    s_elapsed: f64,
    x_final: f64,
    n_flips: u64,
}

/// Shared event loop. Between flips the x-motion is exactly linear, so the
/// first-passage time per leg is closed-form. Leftward moves crossing the
/// teleport depth are cut there: the sub-excursion's exact mean time is added
/// and the walk resumes at the depth moving right (memoryless clock).
fn step_trajectory(
    maps: &CoordinateMaps,
    cfg: &SimConfig,
    rng: &mut ChaCha8Rng,
    mut flips: Option<&mut Vec<f64>>,
) -> StepOutcome {
    let x_hit = hit_threshold(maps, cfg);
    let teleport = if cfg.lambda_c > 0.0 && cfg.teleport_rel > 0.0 {
        let x_tp = maps.teleport_depth(cfg.teleport_rel);
        Some((x_tp, maps.deep_tail_mean_time(x_tp)))
    } else {
        None
    };
    let mut x = 0.0f64;
    let mut u = cfg.u0.signum();
    let mut s = 0.0f64;
    let mut t = 0.0f64;
    let mut n_flips = 0u64;

    loop {
        let ds = exp_sample(rng, cfg.lambda_c);
        let s_next = s + ds;
        // hitting is possible only while moving right
        if u > 0.0 {
            let s_cross = s + (x_hit - x);
            if s_cross <= s_next.min(cfg.max_s) && x_hit >= x {
                t += maps.time_between(x, x_hit);
                return StepOutcome {
                    hit: true,
                    t_real: t,
                    s_elapsed: s_cross,
                    x_final: x_hit,
                    n_flips,
                };
            }
        }
        // deep-excursion cut while moving left
        if u < 0.0 {
            if let Some((x_tp, mean_deep)) = teleport {
                if x - ds < x_tp && x >= x_tp {
                    let s_at_tp = s + (x - x_tp);
                    if s_at_tp < cfg.max_s {
                        t += maps.time_between(x, x_tp) + mean_deep;
                        x = x_tp;
                        s = s_at_tp;
                        u = 1.0;
                        continue;
                    }
                }
            }
        }
        if s_next >= cfg.max_s {
            let x_end = x + u * (cfg.max_s - s);
            t += maps.time_between(x, x_end);
            return StepOutcome {
                hit: false,
                t_real: t,
                s_elapsed: cfg.max_s,
                x_final: x_end,
                n_flips,
            };
        }
        let x_next = x + u * ds;
        t += maps.time_between(x, x_next);
        x = x_next;
        s = s_next;
        u = -u;
        n_flips += 1;
        if let Some(v) = flips.as_deref_mut() {
            v.push(s);
        }
    }
}

/// Exact event-driven run. Starts at x = 0 (Θ₀ = a_left) with direction u₀;
/// terminates at the first x = L crossing or when s exceeds `max_s`.
pub fn run_event_driven(
    maps: &CoordinateMaps,
    cfg: &SimConfig,
    rng: &mut ChaCha8Rng,
    record_flips: bool,
) -> ClassicalRun {
    let mut flips = Vec::new();
    let out = step_trajectory(
        maps,
        cfg,
        rng,
        if record_flips { Some(&mut flips) } else { None },
    );
    ClassicalRun {
        flips,
        hit: out.hit,
        t_real: out.t_real,
        s_elapsed: out.s_elapsed,
        x_final: out.x_final,
    }
}

/// Driver returning one summary row; flips are counted, not stored.
fn run_summary(maps: &CoordinateMaps, cfg: &SimConfig, traj_id: u64) -> TrajectorySummary {
    let seed = trajectory_seed(cfg.seed, traj_id);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let out = step_trajectory(maps, cfg, &mut rng, None);
    TrajectorySummary {
        traj_id,
        seed,
        hit: out.hit,
        t_real: out.t_real,
        s_elapsed: out.s_elapsed,
        n_flips: out.n_flips,
    }
}

/// Monte Carlo over `cfg.n_traj` trajectories with per-trajectory seeded
/// streams. Timeouts are excluded from the mean and reported.
pub fn monte_carlo_hitting(maps: &CoordinateMaps, cfg: &SimConfig) -> Result<HittingReport> {
    cfg.validate()?;
    let trajectories: Vec<TrajectorySummary> = (0..cfg.n_traj as u64)
        .into_par_iter()
        .map(|i| run_summary(maps, cfg, i))
        .collect();

    let hits: Vec<f64> = trajectories
        .iter()
        .filter(|r| r.hit)
        .map(|r| r.t_real)
        .collect();
    let n_hits = hits.len();
    let n_timeouts = cfg.n_traj - n_hits;
    if n_hits == 0 {
        return Err(LabError::NoHits(n_timeouts));
    }
    let (mean_t, se_t) = mean_se(&hits);
    let mean_s = trajectories
        .iter()
        .filter(|r| r.hit)
        .map(|r| r.s_elapsed)
        .sum::<f64>()
        / n_hits as f64;
    let mean_flips = trajectories
        .iter()
        .filter(|r| r.hit)
        .map(|r| r.n_flips as f64)
        .sum::<f64>()
        / n_hits as f64;
    Ok(HittingReport {
        n_traj: cfg.n_traj,
        n_hits,
        n_timeouts,
        mean_t,
        se_t,
        mean_s,
        mean_flips,
        trajectories,
    })
}

/// One telegraph leg on [0, L] from (0, +): true when the leg exits at L.
pub fn leg_crosses(l: f64, lambda_c: f64, rng: &mut ChaCha8Rng) -> bool {
    let mut x = 0.0f64;
    let mut u = 1.0f64;
    loop {
        let ds = exp_sample(rng, lambda_c);
        if u > 0.0 && x + ds >= l {
            return true;
        }
        if u < 0.0 && x - ds <= 0.0 {
            return false;
        }
        x += u * ds;
        u = -u;
    }
}

/// Number of embedded-chain legs until the first visit to the global well,
/// starting from (0, +). Outward excursions from (0, −) count one leg and
/// return deterministically.
pub fn legs_to_hit(l: f64, lambda_c: f64, rng: &mut ChaCha8Rng) -> u64 {
    let mut legs = 0u64;
    loop {
        legs += 1; // inward leg attempt from (0, +)
        if leg_crosses(l, lambda_c, rng) {
            return legs;
        }
        legs += 1; // outward excursion (0,−) → (0,+)
    }
}

/// Raw-ODE cross-validation run.
#[derive(Debug, Clone)]
pub struct OdeRun {
    pub run: ClassicalRun,
    /// max |Π²V − E| / E along the accepted trajectory
    pub energy_drift: f64,
    /// true when the drift exceeded 1e−4
    pub drift_warning: bool,
}

#[derive(Clone, Copy)]
struct OdeState {
    theta: f64,
    pi: f64,
    s: f64,
}

/// One RK4 step of dΘ/dt = 2/Π, dΠ/dt = −V'/V, ds/dt = 2/Π².
fn rk4_step(lnd: &Landscape, st: OdeState, dt: f64) -> OdeState {
    let f = |y: OdeState| {
        let v = lnd.v(y.theta);
        OdeState {
            theta: 2.0 / y.pi,
            pi: -lnd.v_prime(y.theta) / v,
            s: 2.0 / (y.pi * y.pi),
        }
    };
    let add = |y: OdeState, k: OdeState, h: f64| OdeState {
        theta: y.theta + h * k.theta,
        pi: y.pi + h * k.pi,
        s: y.s + h * k.s,
    };
    let k1 = f(st);
    let k2 = f(add(st, k1, dt / 2.0));
    let k3 = f(add(st, k2, dt / 2.0));
    let k4 = f(add(st, k3, dt));
    OdeState {
        theta: st.theta + dt / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta),
        pi: st.pi + dt / 6.0 * (k1.pi + 2.0 * k2.pi + 2.0 * k3.pi + k4.pi),
        s: st.s + dt / 6.0 * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s),
    }
}

/// Integrate the raw ECD equations with momentum sign flips at Poisson
/// s-times. Events (flips and the a_right crossing) are localized by
/// bisection on partial steps, so the locator inherits the RK4 order.
pub fn run_ode_raw(lnd: &Landscape, cfg: &SimConfig, dt: f64) -> Result<OdeRun> {
    cfg.validate()?;
    if !(dt > 0.0) {
        return Err(LabError::DomainError("dt must be positive".into()));
    }
    let energy = cfg.energy;
    let target = match cfg.window_sigma {
        Some(sigma) => lnd.a_right - sigma,
        None => lnd.a_right,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(trajectory_seed(cfg.seed, 0));
    let mut st = OdeState {
        theta: lnd.a_left,
        pi: cfg.u0.signum() * (energy / lnd.v(lnd.a_left)).sqrt(),
        s: 0.0,
    };
    let mut t = 0.0f64;
    let mut s_flip = exp_sample(&mut rng, cfg.lambda_c);
    let mut flips = Vec::new();
    let mut drift_max = 0.0f64;
    // generous turn-count guard; each flip restarts the clock
    let max_steps = ((cfg.max_s / dt).min(5e8)) as usize + 1_000_000;

    let locate =
        |st: OdeState, dt_full: f64, test: &dyn Fn(&OdeState) -> bool| -> (OdeState, f64) {
            // smallest τ in (0, dt_full] with test(state(τ)); bisection on
            // partial RK4 steps from the same start state
            let mut lo = 0.0f64;
            let mut hi = dt_full;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let trial = rk4_step(lnd, st, mid);
                if test(&trial) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            (rk4_step(lnd, st, hi), hi)
        };

    for _ in 0..max_steps {
        let next = rk4_step(lnd, st, dt);

        // flip first if it happens inside this step
        if next.s >= s_flip {
            let (at_flip, tau) = locate(st, dt, &|y: &OdeState| y.s >= s_flip);
            t += tau;
            st = OdeState {
                pi: -at_flip.pi,
                ..at_flip
            };
            flips.push(st.s);
            s_flip = st.s + exp_sample(&mut rng, cfg.lambda_c);
            continue;
        }

        if st.pi > 0.0 && next.theta >= target {
            let (at_hit, tau) = locate(st, dt, &|y: &OdeState| y.theta >= target);
            t += tau;
            st = at_hit;
            let drift = (st.pi * st.pi * lnd.v(st.theta) - energy).abs() / energy;
            drift_max = drift_max.max(drift);
            return Ok(OdeRun {
                run: ClassicalRun {
                    flips,
                    hit: true,
                    t_real: t,
                    s_elapsed: st.s,
                    x_final: st.theta,
                },
                energy_drift: drift_max,
                drift_warning: drift_max > 1e-4,
            });
        }

        st = next;
        t += dt;
        let drift = (st.pi * st.pi * lnd.v(st.theta) - energy).abs() / energy;
        drift_max = drift_max.max(drift);

        if st.s >= cfg.max_s || st.theta < -1e6 * lnd.a_right.abs().max(1.0) {
            break;
        }
    }
    Ok(OdeRun {
        run: ClassicalRun {
            flips,
            hit: false,
            t_real: t,
            s_elapsed: st.s,
            x_final: st.theta,
        },
        energy_drift: drift_max,
        drift_warning: drift_max > 1e-4,
    })
}
