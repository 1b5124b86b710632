//! Closed-form hitting-time theory for the one-dimensional telegraph
//! dynamics: crossing probability, embedded four-state chain, running-cost
//! boundary-value solutions, per-transition expected times, and the full
//! expected hitting time with its symmetric specialization.

use super::Direction;
use crate::error::{LabError, Result};
use crate::potential::{CoordinateMaps, Landscape};
use crate::quad;

/// Embedded four-state well-visit chain. States are ordered
/// (0,−), (0,+), (L,−), (L,+).
#[derive(Debug, Clone, serde::Serialize)]
pub struct ChainSpec {
    pub q: f64,
    pub transition: [[f64; 4]; 4],
}

impl ChainSpec {
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(LabError::DomainError(format!("q = {q} outside (0, 1]")));
        }
        Ok(Self {
            q,
            transition: [
                [0.0, 1.0, 0.0, 0.0],
                [1.0 - q, 0.0, 0.0, q],
                [q, 0.0, 0.0, 1.0 - q],
                [0.0, 0.0, 1.0, 0.0],
            ],
        })
    }

    /// Rows sum to one and the stationary distribution is uniform.
    pub fn check_invariants(&self) -> bool {
        let rows_ok = self
            .transition
            .iter()
            .all(|r| (r.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let mut pi_p = [0.0; 4];
        for row in &self.transition {
            for (p, t) in pi_p.iter_mut().zip(row) {
                *p += 0.25 * t;
            }
        }
        rows_ok && pi_p.iter().all(|v| (v - 0.25).abs() < 1e-15)
    }
}

/// Probability that the telegraph started at (0,+) exits [0, L] at L:
/// q = 1/(1 + λ_c L).
pub fn crossing_prob(lambda_c: f64, l: f64) -> f64 {
    assert!(lambda_c >= 0.0 && l > 0.0);
    1.0 / (1.0 + lambda_c * l)
}

/// Expected number of embedded-chain legs until first arrival at the global
/// well: 2/q − 1 from (0,+), 2/q from (0,−).
pub fn expected_legs(q: f64, start: Direction) -> f64 {
    assert!(q > 0.0 && q <= 1.0);
    match start {
        Direction::Plus => 2.0 / q - 1.0,
        Direction::Minus => 2.0 / q,
    }
}

/// Expected running cost accumulated before exiting [0, L], for the interval
/// telegraph with an integrable cost w:
/// G₊(0) = q ∫₀^L (1 + 2λ(L−x)) w(x) dx (start (0,+)), and
/// G₋(L) = q ∫₀^L (1 + 2λx) w(x) dx (start (L,−)).
pub fn interval_cost(
    lambda_c: f64,
    l: f64,
    w: impl Fn(f64) -> f64,
    start: Direction,
    quad_tol: f64,
) -> Result<f64> {
    let q = crossing_prob(lambda_c, l);
    let integral = match start {
        Direction::Plus => quad::integrate(
            |x| (1.0 + 2.0 * lambda_c * (l - x)) * w(x),
            0.0,
            l,
            quad_tol,
        )?,
        Direction::Minus => {
            quad::integrate(|x| (1.0 + 2.0 * lambda_c * x) * w(x), 0.0, l, quad_tol)?
        }
    };
    Ok(q * integral)
}

/// Expected running cost of a half-line excursion until return to the
/// origin: 2 ∫_{R±} w, independent of the flip rate.
pub fn halfline_cost(w: impl Fn(f64) -> f64, side: Direction, quad_tol: f64) -> Result<f64> {
    let integral = match side {
        Direction::Plus => quad::integrate_to_inf(&w, 0.0, quad_tol)?,
        Direction::Minus => quad::integrate_from_neg_inf(&w, 0.0, quad_tol)?,
    };
    Ok(2.0 * integral)
}

/// Expected real time of one embedded-chain transition from each of the four
/// states.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct TransitionTimes {
    /// from (0,−): left-tail excursion, ∫_{−∞}^{a_left} p
    pub outward_left: f64,
    /// from (L,+): right-tail excursion, ∫_{a_right}^{∞} p
    pub outward_right: f64,
    /// from (0,+): (T_det + λ_c B_{(0,+)}) q
    pub inward_left: f64,
    /// from (L,−): (T_det + λ_c B_{(L,−)}) q
    pub inward_right: f64,
}

/// T_det = ½ ∫_{a_left}^{a_right} p dθ, the noiseless crossing time.
pub fn t_det(lnd: &Landscape, energy: f64, quad_tol: f64) -> Result<f64> {
    quad::integrate(
        |t| 0.5 * (energy / lnd.v(t)).sqrt(),
        lnd.a_left,
        lnd.a_right,
        quad_tol,
    )
}

/// Tail momentum integrals ∫_{−∞}^{a_left} p and ∫_{a_right}^{∞} p.
pub fn tail_integrals(lnd: &Landscape, energy: f64, quad_tol: f64) -> Result<(f64, f64)> {
    let left = quad::integrate_from_neg_inf(|t| (energy / lnd.v(t)).sqrt(), lnd.a_left, quad_tol)?;
    let right = quad::integrate_to_inf(|t| (energy / lnd.v(t)).sqrt(), lnd.a_right, quad_tol)?;
    Ok((left, right))
}

/// Barrier double integrals, reduced to single quadratures through the
/// cached φ table: B_{(0,+)} = ∫ (L − φ(θ)) p dθ and
/// B_{(L,−)} = ∫ φ(θ) p dθ over [a_left, a_right].
pub fn barrier_integrals(maps: &CoordinateMaps, quad_tol: f64) -> Result<(f64, f64)> {
    let lnd = maps.landscape();
    let e = maps.energy_e;
    let l = maps.l_classical;
    let b_in_left = quad::integrate(
        |t| (l - maps.phi(t)) * (e / lnd.v(t)).sqrt(),
        lnd.a_left,
        lnd.a_right,
        quad_tol,
    )?;
    let b_in_right = quad::integrate(
        |t| maps.phi(t) * (e / lnd.v(t)).sqrt(),
        lnd.a_left,
        lnd.a_right,
        quad_tol,
    )?;
    Ok((b_in_left, b_in_right))
}

/// All four expected one-transition times.
pub fn transition_times(maps: &CoordinateMaps, lambda_c: f64) -> Result<TransitionTimes> {
    let lnd = maps.landscape();
    let tol = maps.quad_tol;
    let q = crossing_prob(lambda_c, maps.l_classical);
    let tdet = t_det(lnd, maps.energy_e, tol)?;
    let (tail_l, tail_r) = tail_integrals(lnd, maps.energy_e, tol)?;
    let (b0p, blm) = barrier_integrals(maps, tol)?;
    Ok(TransitionTimes {
        outward_left: tail_l,
        outward_right: tail_r,
        inward_left: (tdet + lambda_c * b0p) * q,
        inward_right: (tdet + lambda_c * blm) * q,
    })
}

/// Expected hitting time decomposition:
/// total = T_det + λ_c B_{(0,+)} + (λ_c L + 1_{u₀=−1}) ∫_{−∞}^{a_left} p.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct HittingBreakdown {
    pub t_det: f64,
    /// λ_c B_{(0,+)}
    pub barrier_term: f64,
    /// (λ_c L + 1_{u₀=−1}) ∫_{−∞}^{a_left} p
    pub tail_term: f64,
    pub total: f64,
    // intermediates for the JSON report
    pub q: f64,
    pub l_classical: f64,
    pub b_inward_left: f64,
    pub b_inward_right: f64,
    pub tail_left: f64,
    pub tail_right: f64,
    pub lambda_c: f64,
    pub energy: f64,
}

/// Expected hitting time from a_left for a general validated landscape.
pub fn hitting_time_general(
    maps: &CoordinateMaps,
    lambda_c: f64,
    u0: Direction,
) -> Result<HittingBreakdown> {
    let lnd = maps.landscape();
    let tol = maps.quad_tol;
    let tdet = t_det(lnd, maps.energy_e, tol)?;
    let (tail_l, tail_r) = tail_integrals(lnd, maps.energy_e, tol)?;
    let (b0p, blm) = barrier_integrals(maps, tol)?;
    let l = maps.l_classical;
    let indicator = match u0 {
        Direction::Minus => 1.0,
        Direction::Plus => 0.0,
    };
    let barrier_term = lambda_c * b0p;
    let tail_term = (lambda_c * l + indicator) * tail_l;
    Ok(HittingBreakdown {
        t_det: tdet,
        barrier_term,
        tail_term,
        total: tdet + barrier_term + tail_term,
        q: crossing_prob(lambda_c, l),
        l_classical: l,
        b_inward_left: b0p,
        b_inward_right: blm,
        tail_left: tail_l,
        tail_right: tail_r,
        lambda_c,
        energy: maps.energy_e,
    })
}

/// Symmetric specialization:
/// (1 + λ_c L) ∫_0^∞ p − 1_{u₀=+1} ∫_{a}^∞ p.
pub fn hitting_time_symmetric(maps: &CoordinateMaps, lambda_c: f64, u0: Direction) -> Result<f64> {
    let lnd = maps.landscape();
    if !lnd.is_symmetric() {
        return Err(LabError::DomainError(
            "symmetric formula requires a symmetric landscape".into(),
        ));
    }
    let tol = maps.quad_tol;
    let e = maps.energy_e;
    let half_core = quad::integrate(|t| (e / lnd.v(t)).sqrt(), 0.0, lnd.a_right, tol)?;
    let tail_r = quad::integrate_to_inf(|t| (e / lnd.v(t)).sqrt(), lnd.a_right, tol)?;
    let int_zero_inf = half_core + tail_r;
    let indicator = match u0 {
        Direction::Plus => 1.0,
        Direction::Minus => 0.0,
    };
    Ok((1.0 + lambda_c * maps.l_classical) * int_zero_inf - indicator * tail_r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::build_maps;

    fn maps_1_2_1() -> CoordinateMaps {
        let l = Landscape::quartic(1.0, 2.0, 1.0).unwrap();
        build_maps(&l, 1.0, 1e-10).unwrap()
    }

    #[test]
    fn crossing_prob_values() {
        assert_eq!(crossing_prob(0.0, 3.0), 1.0);
        assert!((crossing_prob(0.5, 2.0) - 0.5).abs() < 1e-15);
        assert!((crossing_prob(2.0, 3.0) - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn legs_values() {
        assert_eq!(expected_legs(1.0, Direction::Plus), 1.0);
        assert_eq!(expected_legs(0.5, Direction::Plus), 3.0);
        assert!((expected_legs(1.0 / 3.0, Direction::Minus) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn chain_matrix_pattern_and_stationarity() {
        let c = ChainSpec::new(0.3).unwrap();
        assert!(c.check_invariants());
        assert_eq!(c.transition[0][1], 1.0);
        assert_eq!(c.transition[3][2], 1.0);
        assert!((c.transition[1][0] - 0.7).abs() < 1e-15);
        assert!((c.transition[1][3] - 0.3).abs() < 1e-15);
        assert!(ChainSpec::new(0.0).is_err());
    }

    #[test]
    fn interval_cost_unit_weight() {
        // w ≡ 1: G₊(0) = q (L + λ L²) = L exactly
        for lambda in [0.0, 0.7, 3.0] {
            let g = interval_cost(lambda, 2.5, |_| 1.0, Direction::Plus, 1e-12).unwrap();
            assert!((g - 2.5).abs() < 1e-10, "lambda={lambda}: {g}");
        }
    }

    #[test]
    fn interval_cost_reflection() {
        let l = 1.7;
        let w = |x: f64| (x * 1.3).cos().powi(2) + 0.1;
        let g_plus = interval_cost(0.9, l, w, Direction::Plus, 1e-12).unwrap();
        let g_minus = interval_cost(0.9, l, move |x| w(l - x), Direction::Minus, 1e-12).unwrap();
        assert!((g_plus - g_minus).abs() < 1e-10);
    }

    #[test]
    fn halfline_cost_values() {
        assert_eq!(halfline_cost(|_| 0.0, Direction::Plus, 1e-10).unwrap(), 0.0);
        let v = halfline_cost(|x| (-x).exp(), Direction::Plus, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn running_cost_change_of_variables() {
        // 2∫ w(x) dx over a left stretch equals ∫ p dθ over the matching
        // θ-range; with the stretch covering the cached domain this is the
        // outward transition time up to the truncation remainder
        let m = maps_1_2_1();
        let lnd = m.landscape().clone();
        let (x_lo, _) = m.x_range();
        let w = |x: f64| {
            let th = m.phi_inv(x);
            0.5 * m.energy_e / lnd.v(th)
        };
        let cost = 2.0 * crate::quad::integrate(w, x_lo, 0.0, 1e-11).unwrap();
        let theta_lo = m.phi_inv(x_lo);
        let oracle = crate::quad::integrate(
            |t| (m.energy_e / lnd.v(t)).sqrt(),
            theta_lo,
            lnd.a_left,
            1e-12,
        )
        .unwrap();
        assert!(
            (cost - oracle).abs() < 1e-5 * oracle,
            "2∫w dx = {cost} vs ∫p dθ = {oracle}"
        );
        // and the full outward time exceeds the truncated stretch only by
        // the tail remainder
        let (tail_l, _) = tail_integrals(&lnd, 1.0, 1e-12).unwrap();
        assert!(tail_l > oracle && tail_l - oracle < 0.05 * tail_l);
    }

    #[test]
    fn transition_times_lambda_zero() {
        let m = maps_1_2_1();
        let tt = transition_times(&m, 0.0).unwrap();
        let tdet = t_det(m.landscape(), 1.0, 1e-12).unwrap();
        assert!((tt.inward_left - tdet).abs() < 1e-9);
        assert!((tt.inward_right - tdet).abs() < 1e-9);
        // frozen oracles (independent quadrature at tol 1e-13)
        assert!((tdet - 0.895_094_655_389_064).abs() < 1e-9);
        assert!((tt.outward_left - 1.503_580_819_071_04).abs() < 1e-8);
        assert!((tt.outward_right - 1.503_580_819_071_04).abs() < 1e-8);
    }

    #[test]
    fn barrier_integrals_symmetric_identities() {
        let m = maps_1_2_1();
        let (b0p, blm) = barrier_integrals(&m, 1e-11).unwrap();
        let tdet = t_det(m.landscape(), 1.0, 1e-12).unwrap();
        // symmetric case: B_{(0,+)} = B_{(L,−)} = L T_det
        assert!((b0p - blm).abs() < 1e-8);
        assert!((b0p - m.l_classical * tdet).abs() < 1e-8);
        // frozen nested-quadrature oracle (2.009_917_372_800_73)
        assert!((b0p - 2.009_917_372_800_73).abs() < 1e-7);
    }

    #[test]
    fn general_formula_trivial_and_symmetric_agreement() {
        let m = maps_1_2_1();
        let hb = hitting_time_general(&m, 0.0, Direction::Plus).unwrap();
        assert!((hb.total - hb.t_det).abs() < 1e-12);
        for lambda in [0.0, 0.3, 1.0, 4.0] {
            for u0 in [Direction::Plus, Direction::Minus] {
                let g = hitting_time_general(&m, lambda, u0).unwrap().total;
                let s = hitting_time_symmetric(&m, lambda, u0).unwrap();
                assert!(
                    (g - s).abs() <= 1e-8 * s.abs(),
                    "lambda={lambda} u0={u0:?}: {g} vs {s}"
                );
            }
        }
        // frozen oracle: quartic(1,2,1), E=1, λ=1, u0=+1
        let g = hitting_time_general(&m, 1.0, Direction::Plus)
            .unwrap()
            .total;
        assert!((g - 6.281_273_065_46).abs() < 1e-7);
    }

    #[test]
    fn symmetric_formula_requires_symmetry() {
        let lnd = tilted();
        let m = build_maps(&lnd, 1.0, 1e-9).unwrap();
        assert!(matches!(
            hitting_time_symmetric(&m, 1.0, Direction::Plus),
            Err(LabError::DomainError(_))
        ));
    }

    #[test]
    fn small_lambda_limit_and_monotonicity() {
        let m = maps_1_2_1();
        let tdet = t_det(m.landscape(), 1.0, 1e-12).unwrap();
        let (tail_l, _) = tail_integrals(m.landscape(), 1.0, 1e-12).unwrap();
        let g = hitting_time_general(&m, 1e-12, Direction::Minus)
            .unwrap()
            .total;
        assert!((g - (tdet + tail_l)).abs() < 1e-8);
        let mut prev = hitting_time_general(&m, 0.0, Direction::Plus)
            .unwrap()
            .total;
        for lambda in [0.1, 0.5, 1.0, 2.0, 5.0] {
            let cur = hitting_time_general(&m, lambda, Direction::Plus)
                .unwrap()
                .total;
            assert!(cur > prev);
            prev = cur;
        }
    }

    #[test]
    fn symmetric_indicator_difference() {
        let m = maps_1_2_1();
        let minus = hitting_time_symmetric(&m, 0.8, Direction::Minus).unwrap();
        let plus = hitting_time_symmetric(&m, 0.8, Direction::Plus).unwrap();
        let (_, tail_r) = tail_integrals(m.landscape(), 1.0, 1e-12).unwrap();
        assert!((minus - plus - tail_r).abs() < 1e-9);
    }

    /// Tilted quartic with the global well on the right; minima found by
    /// Newton on V'.
    fn tilted() -> Landscape {
        let vp = |t: f64| 2.0 * t * (t * t - 1.0) - 0.2;
        let vpp = |t: f64| 6.0 * t * t - 2.0;
        let newton = |mut t: f64| {
            for _ in 0..50 {
                t -= vp(t) / vpp(t);
            }
            t
        };
        let a_left = newton(-0.95);
        let a_right = newton(1.05);
        Landscape::custom(
            |t| 0.5 * (t * t - 1.0) * (t * t - 1.0) + 1.0 - 0.2 * t,
            vp,
            None,
            a_left,
            a_right,
        )
        .unwrap()
    }

    #[test]
    fn b_sum_identity_asymmetric() {
        // B_{(0,+)} + B_{(L,−)} = 2 L T_det for any landscape
        let lnd = tilted();
        assert!(lnd.v0 < lnd.v1);
        let m = build_maps(&lnd, 1.0, 1e-9).unwrap();
        let (b0p, blm) = barrier_integrals(&m, 1e-10).unwrap();
        let tdet = t_det(&lnd, 1.0, 1e-11).unwrap();
        let rel = (b0p + blm - 2.0 * m.l_classical * tdet).abs() / (2.0 * m.l_classical * tdet);
        assert!(rel < 1e-7, "identity off by {rel}");
    }
}
