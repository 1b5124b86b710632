//! Regime comparisons on the symmetric quartic well: baseline closed forms,
//! the matching ECD predictions, the dimensionless reductions, and the
//! barrier sweep with its scaling fits.

use crate::error::{LabError, Result};
use crate::potential::{build_maps, Landscape};
use crate::quad;
use crate::secd::analytic;
use crate::secd::sim::{monte_carlo_hitting, SimConfig};
use crate::secd::Direction;
use crate::stats::{linear_fit, LineFit};

/// Under-guessing regime relative to the barrier height β = a²ω²/8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    SmallError,
    LargeError,
}

/// One case-study configuration: the quartic landscape plus the tunables
/// held constant across a sweep.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct RegimeConfig {
    pub a: f64,
    pub omega: f64,
    pub v0: f64,
    pub lambda_c: f64,
    pub lambda_q: f64,
    pub energy: f64,
    pub u0: Direction,
    /// SGD step-size analog in the baseline form
    pub s_rate: f64,
    /// QTW rate analog in the baseline form
    pub h_rate: f64,
}

impl RegimeConfig {
    /// Barrier height β = a²ω²/8.
    pub fn beta(&self) -> f64 {
        self.a * self.a * self.omega * self.omega / 8.0
    }

    pub fn regime(&self) -> Regime {
        if self.v0 <= self.beta() {
            Regime::SmallError
        } else {
            Regime::LargeError
        }
    }

    pub fn landscape(&self) -> Result<Landscape> {
        Landscape::quartic(self.a, self.omega, self.v0)
    }
}

/// Baseline hitting-time forms evaluated at face value; when the exponent
/// would overflow, the log-time is reported instead and flagged.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct BaselineTimes {
    pub sgd: f64,
    pub qtw: f64,
    pub log_sgd: f64,
    pub log_qtw: f64,
    pub overflowed: bool,
}

/// SGD ≍ (√s/aω³) exp(ω²a²/s) and QTW ≍ (1/aω^{3/2}√h) exp(a²ω/h).
pub fn baseline_times(cfg: &RegimeConfig) -> BaselineTimes {
    assert!(cfg.s_rate > 0.0 && cfg.h_rate > 0.0);
    let (a, om) = (cfg.a, cfg.omega);
    let sgd_exp = om * om * a * a / cfg.s_rate;
    let qtw_exp = a * a * om / cfg.h_rate;
    let log_sgd = (cfg.s_rate.sqrt() / (a * om.powi(3))).ln() + sgd_exp;
    let log_qtw = (1.0 / (a * om.powf(1.5) * cfg.h_rate.sqrt())).ln() + qtw_exp;
    let overflowed = log_sgd > 700.0 || log_qtw > 700.0;
    BaselineTimes {
        sgd: log_sgd.exp(),
        qtw: log_qtw.exp(),
        log_sgd,
        log_qtw,
        overflowed,
    }
}

/// An asymptotic prediction; `boundary` flags a degenerate regime edge.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct PredictedTime {
    pub value: f64,
    pub boundary: bool,
}

/// Matching-regime classical prediction:
/// small error (λ_c a² + √E/ω) log(β/V₀); large error
/// (1_{u₀=−1} + λ_c a √(V₀/E) + √(aω)/V₀^{1/4}) √(aE/ω) V₀^{−1/4}.
pub fn secd_prediction(cfg: &RegimeConfig) -> PredictedTime {
    let beta = cfg.beta();
    match cfg.regime() {
        Regime::SmallError => {
            let log_ratio = (beta / cfg.v0).ln();
            PredictedTime {
                value: (cfg.lambda_c * cfg.a * cfg.a + cfg.energy.sqrt() / cfg.omega)
                    * log_ratio.max(0.0),
                boundary: log_ratio <= 0.0,
            }
        }
        Regime::LargeError => {
            let indicator = match cfg.u0 {
                Direction::Minus => 1.0,
                Direction::Plus => 0.0,
            };
            let bracket = indicator
                + cfg.lambda_c * cfg.a * (cfg.v0 / cfg.energy).sqrt()
                + (cfg.a * cfg.omega).sqrt() / cfg.v0.powf(0.25);
            PredictedTime {
                value: bracket * (cfg.a * cfg.energy / cfg.omega).sqrt() * cfg.v0.powf(-0.25),
                boundary: false,
            }
        }
    }
}

/// Matching-regime quantum upper-bound form: small error (λ_q/ω²) log²(β/V₀),
/// large error λ_q a²/V₀.
pub fn qecd_prediction(cfg: &RegimeConfig) -> PredictedTime {
    let beta = cfg.beta();
    match cfg.regime() {
        Regime::SmallError => {
            let log_ratio = (beta / cfg.v0).ln();
            PredictedTime {
                value: cfg.lambda_q / (cfg.omega * cfg.omega) * log_ratio.max(0.0).powi(2),
                boundary: log_ratio <= 0.0,
            }
        }
        Regime::LargeError => PredictedTime {
            value: cfg.lambda_q * cfg.a * cfg.a / cfg.v0,
            boundary: false,
        },
    }
}

/// The three dimensionless u-integrals of the quartic reduction at
/// δ = V₀/β.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct DimensionlessIntegrals {
    /// ∫_{−1}^{1} √(δ + (1−u²)²) du  — the length integral
    pub lcal: f64,
    /// ∫_0^1 du/√(δ + (1−u²)²)      — the inner momentum integral
    pub inner: f64,
    /// ∫_1^∞ du/√(δ + (1−u²)²)      — the tail momentum integral
    pub tail: f64,
}

pub fn dimensionless_integrals(delta: f64) -> Result<DimensionlessIntegrals> {
    if !(delta > 0.0) {
        return Err(LabError::DomainError("delta must be positive".into()));
    }
    let f = move |u: f64| {
        let w = 1.0 - u * u;
        (delta + w * w).sqrt()
    };
    let lcal = quad::integrate(f, -1.0, 1.0, 1e-11)?;
    let inner = quad::integrate(move |u| 1.0 / f(u), 0.0, 1.0, 1e-11)?;
    let tail = quad::integrate_to_inf(move |u| 1.0 / f(u), 1.0, 1e-11)?;
    Ok(DimensionlessIntegrals { lcal, inner, tail })
}

/// What a sweep varies.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// β = 2^k for k = 0..=max_pow2, scaling ω at fixed a, V₀ fixed.
    Beta { max_pow2: u32 },
    /// V₀ = β·δ over a log grid of δ, landscape otherwise fixed.
    V0 {
        delta_log10_min: f64,
        delta_log10_max: f64,
        points: usize,
    },
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SweepSpec {
    pub mode: SweepMode,
    pub n_traj: usize,
    pub seed: u64,
    pub max_s: f64,
    /// measure the quantum hitting time for cells with β up to this value
    pub quantum_max_beta: f64,
    pub quantum_n_grid: usize,
    pub quantum_hbar: f64,
    pub quantum_alpha: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            mode: SweepMode::Beta { max_pow2: 10 },
            n_traj: 2000,
            seed: 7,
            max_s: 1e7,
            quantum_max_beta: 4.0,
            quantum_n_grid: 1024,
            quantum_hbar: 0.05,
            quantum_alpha: 0.15,
        }
    }
}

/// One sweep cell.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SweepRow {
    pub beta: f64,
    pub v0: f64,
    pub regime: Regime,
    pub tc_analytic: f64,
    pub tc_mc_mean: f64,
    pub tc_mc_se: f64,
    pub tq_bound: f64,
    /// ħ·T_hit from the spectral protocol (the ħ-free combination); NaN when
    /// not measured
    pub tq_measured: f64,
    pub tsgd_form: f64,
    pub tqtw_form: f64,
    /// the exact counterpart of the dominant large-error classical term,
    /// λ_c L ∫_{−∞}^{−a} p
    pub middle_term: f64,
    pub log_sgd_over_tc: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepFits {
    /// T_c(analytic) against log(β/V₀), small-error cells with β/V₀ ≥ 32
    pub small_regime: Option<LineFit>,
    /// log(middle term) against log V₀, large-error cells
    pub large_regime_exponent: Option<LineFit>,
    /// log(T_SGD/T_c^MC) against β
    pub separation: Option<LineFit>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub fits: SweepFits,
}

/// Run one sweep: per-cell exact quadratures, a Monte Carlo batch, the
/// closed baseline forms, and optionally the quantum protocol on the
/// smallest cells; then the three regression fits.
pub fn scaling_sweep(cfg: &RegimeConfig, spec: &SweepSpec) -> Result<SweepResult> {
    let cells: Vec<(f64, f64)> = match spec.mode {
        SweepMode::Beta { max_pow2 } => (0..=max_pow2)
            .map(|k| (2.0f64.powi(k as i32), cfg.v0))
            .collect(),
        SweepMode::V0 {
            delta_log10_min,
            delta_log10_max,
            points,
        } => {
            let beta = cfg.beta();
            (0..points)
                .map(|i| {
                    let t = i as f64 / (points.max(2) - 1) as f64;
                    let log10 = delta_log10_min + (delta_log10_max - delta_log10_min) * t;
                    (beta, beta * 10f64.powf(log10))
                })
                .collect()
        }
    };

    let mut rows = Vec::with_capacity(cells.len());
    for &(beta, v0) in &cells {
        let omega = (8.0 * beta).sqrt() / cfg.a;
        let cell_cfg = RegimeConfig {
            omega,
            v0,
            ..cfg.clone()
        };
        let lnd = cell_cfg.landscape()?;
        let maps = build_maps(&lnd, cfg.energy, 1e-9)?;
        let hb = analytic::hitting_time_general(&maps, cfg.lambda_c, cfg.u0)?;

        // n_traj = 0 skips the Monte Carlo column (deep large-error cells
        // have per-trajectory leg counts scaling like (λ_c L)², which is
        // not worth simulating when only quadrature enters the fit)
        let (mc_mean, mc_se) = if spec.n_traj > 0 {
            let sim_cfg = SimConfig {
                lambda_c: cfg.lambda_c,
                energy: cfg.energy,
                u0: cfg.u0,
                seed: spec.seed.wrapping_add(beta.to_bits() ^ v0.to_bits()),
                max_s: spec.max_s,
                n_traj: spec.n_traj,
                quad_tol: 1e-9,
                window_sigma: None,
                teleport_rel: 0.05,
            };
            let mc = monte_carlo_hitting(&maps, &sim_cfg)?;
            (mc.mean_t, mc.se_t)
        } else {
            (f64::NAN, f64::NAN)
        };

        let base = baseline_times(&cell_cfg);
        let tq_bound = qecd_prediction(&cell_cfg).value;

        let tq_measured = if beta <= spec.quantum_max_beta {
            measure_quantum(&maps, spec).unwrap_or(f64::NAN)
        } else {
            f64::NAN
        };

        rows.push(SweepRow {
            beta,
            v0,
            regime: cell_cfg.regime(),
            tc_analytic: hb.total,
            tc_mc_mean: mc_mean,
            tc_mc_se: mc_se,
            tq_bound,
            tq_measured,
            tsgd_form: base.sgd,
            tqtw_form: base.qtw,
            middle_term: cfg.lambda_c * hb.l_classical * hb.tail_left,
            log_sgd_over_tc: base.log_sgd - mc_mean.ln(),
        });
    }

    let small: Vec<&SweepRow> = rows
        .iter()
        .filter(|r| r.regime == Regime::SmallError && r.beta / r.v0 >= 32.0)
        .collect();
    let small_regime = if small.len() >= 3 {
        let xs: Vec<f64> = small.iter().map(|r| (r.beta / r.v0).ln()).collect();
        let ys: Vec<f64> = small.iter().map(|r| r.tc_analytic).collect();
        Some(linear_fit(&xs, &ys))
    } else {
        None
    };

    let large: Vec<&SweepRow> = rows
        .iter()
        .filter(|r| r.regime == Regime::LargeError)
        .collect();
    let large_regime_exponent = if large.len() >= 3 {
        let xs: Vec<f64> = large.iter().map(|r| r.v0.ln()).collect();
        let ys: Vec<f64> = large.iter().map(|r| r.middle_term.ln()).collect();
        Some(linear_fit(&xs, &ys))
    } else {
        None
    };

    let separation =
        if matches!(spec.mode, SweepMode::Beta { .. }) && rows.len() >= 3 && spec.n_traj > 0 {
            let xs: Vec<f64> = rows.iter().map(|r| r.beta).collect();
            let ys: Vec<f64> = rows.iter().map(|r| r.log_sgd_over_tc).collect();
            Some(linear_fit(&xs, &ys))
        } else {
            None
        };

    Ok(SweepResult {
        rows,
        fits: SweepFits {
            small_regime,
            large_regime_exponent,
            separation,
        },
    })
}

fn measure_quantum(maps: &crate::potential::CoordinateMaps, spec: &SweepSpec) -> Result<f64> {
    use crate::qecd::evolve::initial_gaussian;
    use crate::qecd::model::build_spectral_model;
    use crate::qecd::protocol::{hitting_time, DetectionWindow};
    let model = build_spectral_model(maps, spec.quantum_hbar, 1.0, spec.quantum_n_grid)?;
    let lnd = maps.landscape();
    let psi0 = initial_gaussian(&model, lnd.a_left, spec.quantum_alpha)?;
    let window = DetectionWindow {
        center: lnd.a_right,
        sigma: spec.quantum_alpha * spec.quantum_hbar.sqrt(),
    };
    let rep = hitting_time(&model, &psi0, window)?;
    Ok(spec.quantum_hbar * rep.t_hit_numeric)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_cfg() -> RegimeConfig {
        RegimeConfig {
            a: 1.0,
            omega: 2.0,
            v0: 1.0,
            lambda_c: 1.0,
            lambda_q: 1.0,
            energy: 1.0,
            u0: Direction::Plus,
            s_rate: 1.0,
            h_rate: 1.0,
        }
    }

    #[test]
    fn baseline_forms_arithmetic() {
        let mut cfg = base_cfg();
        cfg.a = 1.0;
        cfg.omega = 1.0;
        let b = baseline_times(&cfg);
        assert!((b.sgd - std::f64::consts::E).abs() < 1e-12);
        assert!((b.qtw - std::f64::consts::E).abs() < 1e-12);
        assert!(!b.overflowed);
        // doubling a multiplies the SGD exponent by 4
        let mut cfg2 = cfg.clone();
        cfg2.a = 2.0;
        let b2 = baseline_times(&cfg2);
        let exp1 = b.log_sgd - (cfg.s_rate.sqrt() / (cfg.a * cfg.omega.powi(3))).ln();
        let exp2 = b2.log_sgd - (cfg2.s_rate.sqrt() / (cfg2.a * cfg2.omega.powi(3))).ln();
        assert!((exp2 / exp1 - 4.0).abs() < 1e-12);
        // overflow path reports logs
        let mut cfg3 = cfg.clone();
        cfg3.omega = 60.0;
        let b3 = baseline_times(&cfg3);
        assert!(b3.overflowed && b3.sgd.is_infinite());
        assert!(b3.log_sgd.is_finite());
    }

    #[test]
    fn secd_prediction_small_regime_arithmetic() {
        // λ_c=1, a=1, E=1, ω=2, β/V₀ = e² → (1 + 1/2)·2 = 3
        let mut cfg = base_cfg();
        let beta = cfg.beta();
        cfg.v0 = beta / std::f64::consts::E.powi(2);
        let p = secd_prediction(&cfg);
        assert!(!p.boundary);
        assert!((p.value - 3.0).abs() < 1e-12);
        // boundary degenerates at V₀ = β
        cfg.v0 = beta;
        let p = secd_prediction(&cfg);
        assert_eq!(p.value, 0.0);
        assert!(p.boundary);
    }

    #[test]
    fn qecd_prediction_arithmetic() {
        // large regime: λ_q=1, a=1, V₀=4 → 1/4
        let mut cfg = base_cfg();
        cfg.v0 = 4.0;
        assert_eq!(cfg.regime(), Regime::LargeError);
        assert!((qecd_prediction(&cfg).value - 0.25).abs() < 1e-15);
        // small regime log² scaling: quadrupling log(β/V₀) multiplies by 16
        let mut c1 = base_cfg();
        c1.v0 = c1.beta() / std::f64::consts::E; // log ratio 1
        let mut c2 = base_cfg();
        c2.v0 = c2.beta() / std::f64::consts::E.powi(4); // log ratio 4
        let q1 = qecd_prediction(&c1).value;
        let q2 = qecd_prediction(&c2).value;
        assert!((q2 / q1 - 16.0).abs() < 1e-9);
    }

    #[test]
    fn dimensionless_integral_regimes() {
        // large δ: lcal/√δ → 2 and inner·√δ → 1
        let big = dimensionless_integrals(1e2).unwrap();
        assert!((big.lcal / 1e1 - 2.0).abs() < 0.01);
        assert!((big.inner * 1e1 - 1.0).abs() < 0.01);
        // tail ≍ δ^{-1/4} over the large range: two-sided ratio bound
        for &d in &[1.0, 1e2] {
            let v = dimensionless_integrals(d).unwrap();
            let r = v.tail * d.powf(0.25);
            assert!(r > 0.5 && r < 2.0, "delta={d}: {r}");
        }
        // small δ: inner ≍ log(1/δ)
        for &d in &[1e-2, 1e-4, 1e-6] {
            let v = dimensionless_integrals(d).unwrap();
            let r = v.inner / (1.0 / d).ln();
            assert!(r > 0.25 && r < 0.55, "delta={d}: {r}");
        }
    }

    #[test]
    fn large_regime_prediction_vs_exact_quadrature() {
        // ratio of the asymptotic form to the exact corollary value stays
        // in a fixed band over a large-error sweep
        let mut ratios = Vec::new();
        for k in [4, 6, 8, 10, 12] {
            let mut cfg = base_cfg();
            cfg.v0 = cfg.beta() * 2.0f64.powi(k);
            let lnd = cfg.landscape().unwrap();
            let maps = build_maps(&lnd, cfg.energy, 1e-9).unwrap();
            let exact = analytic::hitting_time_symmetric(&maps, cfg.lambda_c, cfg.u0).unwrap();
            let pred = secd_prediction(&cfg).value;
            ratios.push(pred / exact);
        }
        // two-sided bound around the fitted constant: the asymptotic form
        // carries an unspecified O(1) prefactor, so only stability is
        // asserted
        let gmean = ratios.iter().map(|r| r.ln()).sum::<f64>() / ratios.len() as f64;
        let gmean = gmean.exp();
        for r in &ratios {
            assert!(
                *r > gmean / 1.5 && *r < gmean * 1.5,
                "ratio {r} drifts from fitted constant {gmean}: {ratios:?}"
            );
        }
    }

    #[test]
    fn classical_lower_bound_e_independent() {
        // λ_c B_{(0,+)} is E-free for the symmetric quartic and bounds the
        // full hitting time from below for every tested E
        let cfg = base_cfg();
        let lnd = cfg.landscape().unwrap();
        let mut bounds = Vec::new();
        for &e in &[0.25, 1.0, 4.0] {
            let maps = build_maps(&lnd, e, 1e-9).unwrap();
            let hb = analytic::hitting_time_general(&maps, cfg.lambda_c, cfg.u0).unwrap();
            assert!(hb.barrier_term <= hb.total);
            bounds.push(hb.barrier_term);
        }
        for w in bounds.windows(2) {
            assert!((w[0] - w[1]).abs() < 1e-7 * w[0], "{bounds:?}");
        }
    }

    #[test]
    fn small_beta_sweep_fits() {
        // a compressed version of the acceptance sweep: fewer cells and
        // trajectories, same structure
        let mut cfg = base_cfg();
        cfg.lambda_c = 4.0;
        let spec = SweepSpec {
            mode: SweepMode::Beta { max_pow2: 8 },
            n_traj: 400,
            quantum_max_beta: 0.0,
            ..Default::default()
        };
        let out = scaling_sweep(&cfg, &spec).unwrap();
        assert_eq!(out.rows.len(), 9);
        let f = out.fits.small_regime.expect("enough small-regime cells");
        assert!(f.r_squared > 0.99, "R² = {}", f.r_squared);
        let sep = out.fits.separation.expect("beta sweep fits separation");
        assert!(sep.r_squared > 0.99, "R² = {}", sep.r_squared);
        // slope of log(T_SGD/T_c) in β is 8/s at fixed a=1
        assert!((sep.slope - 8.0).abs() < 0.2, "slope {}", sep.slope);
    }

    #[test]
    fn v0_sweep_exponent() {
        let mut cfg = base_cfg();
        cfg.omega = 2.0 * std::f64::consts::SQRT_2; // β = 1
        let spec = SweepSpec {
            mode: SweepMode::V0 {
                delta_log10_min: 4.0,
                delta_log10_max: 8.0,
                points: 9,
            },
            n_traj: 0,
            quantum_max_beta: 0.0,
            ..Default::default()
        };
        let out = scaling_sweep(&cfg, &spec).unwrap();
        let f = out.fits.large_regime_exponent.expect("large-regime fit");
        assert!(
            (f.slope - 0.25).abs() < 0.05,
            "V₀ exponent {} ± {}",
            f.slope,
            f.slope_se
        );
    }
}
