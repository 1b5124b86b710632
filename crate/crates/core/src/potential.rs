//! Positive double-well landscapes and their quadrature-backed coordinate maps.
//!
//! A landscape is the under-guessed objective V = F − F₀ > 0 with wells at
//! `a_left` (local) and `a_right` (global). All derived geometry lives in
//! [`CoordinateMaps`]:
//!
//! * φ(θ) = (1/√E) ∫_{a_left}^θ √V — the unit-speed coordinate of the
//!   classical dynamics, with L = φ(a_right);
//! * y(θ) = ∫_0^θ dξ/√V — the Liouville coordinate, which compactifies the
//!   real line onto (y₋, y₊) when the tails grow super-quadratically;
//! * W(x) = ½ ∫ p dθ — the antiderivative converting intrinsic to real time.
//!
//! Improper integrals are pushed through θ = R + u/(1−u), so the tails never
//! need explicit truncation; the cached tables are truncated only where V has
//! grown by a factor 10⁶ over the well, and W clamps to its exact asymptote
//! beyond that.

use crate::error::{LabError, Result};
use crate::interp::MonotoneCubic;
use crate::quad;
use std::sync::Arc;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Quartic {
        a: f64,
        omega: f64,
        coeff: f64,
    },
    Custom {
        f: ScalarFn,
        df: ScalarFn,
        d2f: Option<ScalarFn>,
    },
}

/// A positive double-well objective with its well data.
#[derive(Clone)]
pub struct Landscape {
    kind: Kind,
    pub a_left: f64,
    pub a_right: f64,
    /// V at the global minimum (a_right)
    pub v0: f64,
    /// V at the local minimum (a_left)
    pub v1: f64,
}

impl std::fmt::Debug for Landscape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            Kind::Quartic { a, omega, .. } => write!(
                f,
                "Landscape::quartic(a={a}, omega={omega}, v0={})",
                self.v0
            ),
            Kind::Custom { .. } => write!(
                f,
                "Landscape::custom(a_left={}, a_right={})",
                self.a_left, self.a_right
            ),
        }
    }
}

impl Landscape {
    /// Symmetric quartic V(θ) = ω²/8a² (θ²−a²)² + V₀ with wells at ±a.
    pub fn quartic(a: f64, omega: f64, v0: f64) -> Result<Self> {
        if !(a > 0.0 && omega > 0.0 && v0 > 0.0) {
            return Err(LabError::DomainError(
                "quartic requires a > 0, omega > 0, v0 > 0".into(),
            ));
        }
        let coeff = omega * omega / (8.0 * a * a);
        Ok(Self {
            kind: Kind::Quartic { a, omega, coeff },
            a_left: -a,
            a_right: a,
            v0,
            v1: v0,
        })
    }

    /// Custom landscape from analytic value and derivative functions. The
    /// second derivative is optional; the quantum (Liouville) machinery
    /// requires it and errors without it.
    pub fn custom(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2f: Option<ScalarFn>,
        local_min: f64,
        global_min: f64,
    ) -> Result<Self> {
        let v1 = f(local_min);
        let v0 = f(global_min);
        if !(v0 > 0.0) {
            return Err(LabError::AssumptionViolation(format!(
                "V(global_min) = {v0} must be positive (under-guessing regime)"
            )));
        }
        Ok(Self {
            kind: Kind::Custom {
                f: Arc::new(f),
                df: Arc::new(df),
                d2f,
            },
            a_left: local_min,
            a_right: global_min,
            v0,
            v1,
        })
    }

    /// Quartic parameters (a, omega) when applicable.
    pub fn quartic_params(&self) -> Option<(f64, f64)> {
        match self.kind {
            Kind::Quartic { a, omega, .. } => Some((a, omega)),
            Kind::Custom { .. } => None,
        }
    }

    /// Raw evaluation without the positivity check; callers inside the crate
    /// use this on validated landscapes.
    pub(crate) fn v(&self, theta: f64) -> f64 {
        match &self.kind {
            Kind::Quartic { a, coeff, .. } => {
                let d = theta * theta - a * a;
                coeff * d * d + self.v0
            }
            Kind::Custom { f, .. } => f(theta),
        }
    }

    /// V(θ), checking positivity (custom functions may misbehave).
    pub fn eval_v(&self, theta: f64) -> Result<f64> {
        let v = self.v(theta);
        if !(v > 0.0) {
            return Err(LabError::AssumptionViolation(format!(
                "V({theta}) = {v} is not positive"
            )));
        }
        Ok(v)
    }

    /// dV/dθ.
    pub fn v_prime(&self, theta: f64) -> f64 {
        match &self.kind {
            Kind::Quartic { a, coeff, .. } => 4.0 * coeff * theta * (theta * theta - a * a),
            Kind::Custom { df, .. } => df(theta),
        }
    }

    /// d²V/dθ², required by the Liouville effective potential.
    pub fn v_second(&self, theta: f64) -> Result<f64> {
        match &self.kind {
            Kind::Quartic { a, coeff, .. } => Ok(4.0 * coeff * (3.0 * theta * theta - a * a)),
            Kind::Custom { d2f, .. } => d2f.as_ref().map(|g| g(theta)).ok_or_else(|| {
                LabError::DomainError("custom landscape lacks an analytic second derivative".into())
            }),
        }
    }

    /// Momentum magnitude p(θ) = √(E/V(θ)).
    pub fn momentum_p(&self, energy: f64, theta: f64) -> Result<f64> {
        if !(energy > 0.0) {
            return Err(LabError::DomainError(format!(
                "energy E = {energy} must be positive"
            )));
        }
        Ok((energy / self.eval_v(theta)?).sqrt())
    }

    /// Barrier height V at the maximum between the wells (β = V(0) = a²ω²/8 + V₀
    /// offset removed; here we report the raw maximum).
    pub fn barrier_v(&self) -> f64 {
        let n = 2048;
        let mut vmax = f64::MIN;
        for i in 0..=n {
            let t = self.a_left + (self.a_right - self.a_left) * i as f64 / n as f64;
            vmax = vmax.max(self.v(t));
        }
        vmax
    }

    /// True when V(−θ) = V(θ) holds (exactly for the quartic, sampled for
    /// custom landscapes).
    pub fn is_symmetric(&self) -> bool {
        match self.kind {
            Kind::Quartic { .. } => true,
            Kind::Custom { .. } => {
                let r = self.a_right.abs().max(self.a_left.abs()) * 3.0 + 1.0;
                let n = 512;
                (0..=n).all(|i| {
                    let t = r * i as f64 / n as f64;
                    let (v1, v2) = (self.v(t), self.v(-t));
                    (v1 - v2).abs() <= 1e-10 * v1.abs().max(v2.abs()).max(1.0)
                })
            }
        }
    }

    /// Validate the standing assumptions: positivity, exactly two minima with
    /// the global one at `a_right`, and a convergent tail integral
    /// ∫_{|θ|>a} dθ/√V (estimated at two truncation radii which must agree
    /// within `tol` relative).
    pub fn validate_assumptions(&self, scan: (f64, f64), tol: f64) -> ValidationReport {
        let (lo, hi) = scan;
        let n = 4001;
        let mut min_v = f64::MAX;
        let mut samples = Vec::with_capacity(n);
        for i in 0..n {
            let t = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let v = self.v(t);
            min_v = min_v.min(v);
            samples.push(v);
        }
        let positivity_ok = min_v > 0.0;

        let mut n_minima = 0;
        for i in 1..n - 1 {
            if samples[i] < samples[i - 1] && samples[i] <= samples[i + 1] {
                n_minima += 1;
            }
        }
        let two_minima_ok = n_minima == 2;
        let ordering_ok = self.v(self.a_right) <= self.v(self.a_left);

        let symmetry_ok = match self.kind {
            Kind::Quartic { .. } => Some(self.is_symmetric()),
            Kind::Custom { .. } => None,
        };

        // Tail convergence: compare the tail integral truncated at R and 2R.
        let (tail_ok, tail_at_r, tail_at_2r, tail_radius) = if positivity_ok {
            // deep radii keep the remainder of convergent tails well under
            // tol while divergent tails still blow the comparison
            let r = 8.0 * self.truncation_radius_capped();
            let est = |radius: f64| -> f64 {
                let right =
                    quad::integrate(|t| 1.0 / self.v(t).sqrt(), self.a_right, radius, 1e-10)
                        .unwrap_or(f64::NAN);
                let left = quad::integrate(|t| 1.0 / self.v(t).sqrt(), -radius, self.a_left, 1e-10)
                    .unwrap_or(f64::NAN);
                left + right
            };
            let t1 = est(r);
            let t2 = est(2.0 * r);
            let ok =
                t1.is_finite() && t2.is_finite() && (t2 - t1).abs() <= tol * t1.abs().max(1e-300);
            (ok, t1, t2, r)
        } else {
            (false, f64::NAN, f64::NAN, f64::NAN)
        };

        ValidationReport {
            positivity_ok,
            min_v_sampled: min_v,
            two_minima_ok,
            n_minima,
            ordering_ok,
            symmetry_ok,
            tail_ok,
            tail_at_r,
            tail_at_2r,
            tail_radius,
        }
    }

    /// Smallest radius R (beyond both wells) with V(±R) ≥ 10⁶ V₁, capped so
    /// the search terminates on landscapes that never grow that far.
    fn truncation_radius_capped(&self) -> f64 {
        let target = 1e6 * self.v1.max(self.v0);
        let start = self.a_left.abs().max(self.a_right.abs()) + 1.0;
        let cap = start * 1e7;
        let mut r = start;
        while (self.v(r) < target || self.v(-r) < target) && r < cap {
            r *= 2.0;
        }
        if r >= cap {
            return cap;
        }
        // bisect down to the smallest such radius
        let (mut lo, mut hi) = (r / 2.0, r);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.v(mid) >= target && self.v(-mid) >= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

/// Outcome of [`Landscape::validate_assumptions`]; carries failures instead
/// of erroring.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ValidationReport {
    pub positivity_ok: bool,
    pub min_v_sampled: f64,
    pub two_minima_ok: bool,
    pub n_minima: usize,
    /// V(a_right) ≤ V(a_left)
    pub ordering_ok: bool,
    /// present only for the quartic kind
    pub symmetry_ok: Option<bool>,
    pub tail_ok: bool,
    pub tail_at_r: f64,
    pub tail_at_2r: f64,
    pub tail_radius: f64,
}

impl ValidationReport {
    pub fn all_ok(&self) -> bool {
        self.positivity_ok
            && self.two_minima_ok
            && self.ordering_ok
            && self.symmetry_ok.unwrap_or(true)
            && self.tail_ok
    }
}

/// Cached quadrature-backed coordinate maps for one (landscape, E) pair.
#[derive(Clone)]
pub struct CoordinateMaps {
    lnd: Landscape,
    pub energy_e: f64,
    pub quad_tol: f64,
    /// truncation bounds of the cached tables
    pub trunc: (f64, f64),
    /// L = φ(a_right) − φ(a_left), exact quadrature
    pub l_classical: f64,
    /// total Liouville length I(−∞, ∞), exact improper quadrature
    pub l_y: f64,
    pub y_minus: f64,
    pub y_plus: f64,
    phi_tab: MonotoneCubic,
    phi_inv_tab: MonotoneCubic,
    y_tab: MonotoneCubic,
    y_inv_tab: MonotoneCubic,
    /// W as a function of x = φ(θ); W(x) = ½∫_{a_left}^{φ⁻¹(x)} p dθ
    w_tab: MonotoneCubic,
    w_left_asym: f64,
    w_right_asym: f64,
}

const N_TABLE: usize = 4096;

/// Build the cached maps. `quad_tol` controls every segment quadrature; the
/// marching grid is uniform in y so the compactified tails stay resolved.
pub fn build_maps(lnd: &Landscape, energy: f64, quad_tol: f64) -> Result<CoordinateMaps> {
    if !(energy > 0.0) {
        return Err(LabError::DomainError("E must be positive".into()));
    }
    if !(quad_tol > 0.0 && quad_tol < 1e-2) {
        return Err(LabError::DomainError(
            "quad_tol must be in (0, 1e-2)".into(),
        ));
    }
    let seg_tol = (quad_tol * 1e-2).max(1e-14);
    let inv_sqrt_v = |t: f64| 1.0 / lnd.v(t).sqrt();

    let r = lnd.truncation_radius_capped();
    let th_lo = -r;
    let th_hi = r;

    // exact Liouville asymptotes and total length, with the doubling check
    let y_core_r = quad::integrate(inv_sqrt_v, 0.0, th_hi, seg_tol)?;
    let y_core_l = quad::integrate(inv_sqrt_v, th_lo, 0.0, seg_tol)?;
    let tail_r = quad::integrate_to_inf(inv_sqrt_v, th_hi, seg_tol)?;
    let tail_l = quad::integrate_from_neg_inf(inv_sqrt_v, th_lo, seg_tol)?;
    let y_plus = y_core_r + tail_r;
    let y_minus = -(y_core_l + tail_l);
    let l_y = y_plus - y_minus;
    {
        // stability under doubling the truncation radius
        let y2_r = quad::integrate(inv_sqrt_v, 0.0, 2.0 * th_hi, seg_tol)?
            + quad::integrate_to_inf(inv_sqrt_v, 2.0 * th_hi, seg_tol)?;
        let y2_l = quad::integrate(inv_sqrt_v, 2.0 * th_lo, 0.0, seg_tol)?
            + quad::integrate_from_neg_inf(inv_sqrt_v, 2.0 * th_lo, seg_tol)?;
        let l_y_2r = y2_r + y2_l;
        if (l_y_2r - l_y).abs() > quad_tol * l_y.abs() {
            return Err(LabError::QuadratureError(format!(
                "L_y unstable under truncation doubling: {l_y} vs {l_y_2r}"
            )));
        }
        if !l_y.is_finite() {
            return Err(LabError::QuadratureError("L_y not finite".into()));
        }
    }

    // march a grid uniform in y from th_lo to th_hi, accumulating y, φ, W
    let y_lo = y_minus + tail_l;
    let y_hi = y_plus - tail_r;
    let n = N_TABLE;
    let dy = (y_hi - y_lo) / (n - 1) as f64;

    let mut thetas = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    let mut phis = Vec::with_capacity(n);
    let mut ws = Vec::with_capacity(n);

    let sqrt_e = energy.sqrt();
    let mut th = th_lo;
    let mut y_acc = y_lo;
    let mut phi_acc = 0.0;
    let mut w_acc = 0.0;
    thetas.push(th);
    ys.push(y_acc);
    phis.push(phi_acc);
    ws.push(w_acc);

    for k in 1..n {
        let target_dy = if k == n - 1 { y_hi - y_acc } else { dy };
        // Newton solve for the θ step matching the y increment
        let mut th_next = th + target_dy * lnd.v(th).sqrt();
        for _ in 0..60 {
            let seg = quad::integrate(inv_sqrt_v, th, th_next, seg_tol)?;
            let resid = seg - target_dy;
            let step = -resid * lnd.v(th_next).sqrt();
            th_next += step;
            if step.abs() <= 1e-14 * th_next.abs().max(1.0) {
                break;
            }
        }
        if k == n - 1 {
            th_next = th_hi;
        }
        phi_acc += quad::integrate(|t| lnd.v(t).sqrt() / sqrt_e, th, th_next, seg_tol)?;
        w_acc += quad::integrate(|t| 0.5 * (energy / lnd.v(t)).sqrt(), th, th_next, seg_tol)?;
        y_acc += target_dy;
        th = th_next;
        thetas.push(th);
        ys.push(y_acc);
        phis.push(phi_acc);
        ws.push(w_acc);
    }

    // re-anchor: φ and W vanish at a_left, y at 0
    let anchor = |nodes: &[f64], vals: &[f64], x0: f64, f: &dyn Fn(f64, f64) -> f64| -> f64 {
        // value of the accumulated integral at x0, via the nearest node
        let i = match nodes.binary_search_by(|v| v.partial_cmp(&x0).expect("finite")) {
            Ok(i) => i,
            Err(i) => i.min(nodes.len() - 1),
        };
        vals[i] + f(nodes[i], x0)
    };
    let phi_at_aleft = anchor(&thetas, &phis, lnd.a_left, &|from, to| {
        quad::integrate(|t| lnd.v(t).sqrt() / sqrt_e, from, to, seg_tol).unwrap_or(f64::NAN)
    });
    let w_at_aleft = anchor(&thetas, &ws, lnd.a_left, &|from, to| {
        quad::integrate(|t| 0.5 * (energy / lnd.v(t)).sqrt(), from, to, seg_tol).unwrap_or(f64::NAN)
    });
    let y_at_zero = anchor(&thetas, &ys, 0.0, &|from, to| {
        quad::integrate(inv_sqrt_v, from, to, seg_tol).unwrap_or(f64::NAN)
    });
    if !(phi_at_aleft.is_finite() && w_at_aleft.is_finite() && y_at_zero.is_finite()) {
        return Err(LabError::QuadratureError("table anchoring failed".into()));
    }
    for v in &mut phis {
        *v -= phi_at_aleft;
    }
    for v in &mut ws {
        *v -= w_at_aleft;
    }
    let y_shift = y_at_zero;
    for v in &mut ys {
        *v -= y_shift;
    }
    let y_minus = y_minus - y_shift;
    let y_plus = y_plus - y_shift;

    let l_classical = quad::integrate(
        |t| lnd.v(t).sqrt() / sqrt_e,
        lnd.a_left,
        lnd.a_right,
        seg_tol,
    )?;

    let w_left_asym =
        ws[0] - quad::integrate_from_neg_inf(|t| 0.5 * (energy / lnd.v(t)).sqrt(), th_lo, seg_tol)?;
    let w_right_asym = *ws.last().expect("nonempty")
        + quad::integrate_to_inf(|t| 0.5 * (energy / lnd.v(t)).sqrt(), th_hi, seg_tol)?;

    let phi_tab = MonotoneCubic::new(thetas.clone(), phis.clone())?;
    let phi_inv_tab = MonotoneCubic::new(phis.clone(), thetas.clone())?;
    let y_tab = MonotoneCubic::new(thetas.clone(), ys.clone())?;
    let y_inv_tab = MonotoneCubic::new(ys.clone(), thetas.clone())?;
    let w_tab = MonotoneCubic::new(phis, ws)?;

    Ok(CoordinateMaps {
        lnd: lnd.clone(),
        energy_e: energy,
        quad_tol,
        trunc: (th_lo, th_hi),
        l_classical,
        l_y,
        y_minus,
        y_plus,
        phi_tab,
        phi_inv_tab,
        y_tab,
        y_inv_tab,
        w_tab,
        w_left_asym,
        w_right_asym,
    })
}

impl CoordinateMaps {
    pub fn landscape(&self) -> &Landscape {
        &self.lnd
    }

    /// φ(θ) − φ(a_left); clamped at the truncation bounds.
    pub fn phi(&self, theta: f64) -> f64 {
        self.phi_tab.eval(theta)
    }

    /// φ⁻¹(x); clamped at the truncation bounds.
    pub fn phi_inv(&self, x: f64) -> f64 {
        self.phi_inv_tab.eval(x)
    }

    /// Range of x = φ(θ) covered by the cached tables.
    pub fn x_range(&self) -> (f64, f64) {
        (
            self.phi_tab.eval(self.trunc.0),
            self.phi_tab.eval(self.trunc.1),
        )
    }

    /// Liouville coordinate y(θ). Exact (quadrature-backed) beyond the
    /// truncated table, asymptoting to y₋ / y₊.
    pub fn y_of_theta(&self, theta: f64) -> f64 {
        if theta >= self.trunc.0 && theta <= self.trunc.1 {
            return self.y_tab.eval(theta);
        }
        let tol = (self.quad_tol * 1e-2).max(1e-14);
        if theta > 0.0 {
            let g =
                quad::integrate_to_inf(|t| 1.0 / self.lnd.v(t).sqrt(), theta, tol).unwrap_or(0.0);
            self.y_plus - g
        } else {
            let g = quad::integrate_from_neg_inf(|t| 1.0 / self.lnd.v(t).sqrt(), theta, tol)
                .unwrap_or(0.0);
            self.y_minus + g
        }
    }

    /// Inverse Liouville map. For y beyond the truncated table the tail
    /// integral is inverted by Newton iteration on the exact quadrature.
    pub fn theta_of_y(&self, y: f64) -> Result<f64> {
        if y <= self.y_minus || y >= self.y_plus {
            return Err(LabError::DomainError(format!(
                "y = {y} outside ({}, {})",
                self.y_minus, self.y_plus
            )));
        }
        let y_tab_lo = self.y_tab.eval(self.trunc.0);
        let y_tab_hi = self.y_tab.eval(self.trunc.1);
        if y >= y_tab_lo && y <= y_tab_hi {
            return Ok(self.y_inv_tab.eval(y));
        }
        let tol = (self.quad_tol * 1e-2).max(1e-14);
        // gap to the asymptote shrinks like the tail integral; invert it
        let (gap, right) = if y > 0.0 {
            (self.y_plus - y, true)
        } else {
            (y - self.y_minus, false)
        };
        let mut th = if right { self.trunc.1 } else { self.trunc.0 };
        for _ in 0..100 {
            let g = if right {
                quad::integrate_to_inf(|t| 1.0 / self.lnd.v(t).sqrt(), th, tol)?
            } else {
                quad::integrate_from_neg_inf(|t| 1.0 / self.lnd.v(t).sqrt(), th, tol)?
            };
            // dg/dθ = ∓ 1/√V
            let resid = g - gap;
            let step = if right {
                resid * self.lnd.v(th).sqrt()
            } else {
                -resid * self.lnd.v(th).sqrt()
            };
            th += step;
            if step.abs() <= 1e-13 * th.abs().max(1.0) {
                break;
            }
        }
        Ok(th)
    }

    /// Distance integral I(θ₁, θ₂) = y(θ₂) − y(θ₁). Errors outside the
    /// truncated domain.
    pub fn distance_i(&self, t1: f64, t2: f64) -> Result<f64> {
        for t in [t1, t2] {
            if t < self.trunc.0 || t > self.trunc.1 {
                return Err(LabError::DomainError(format!(
                    "theta = {t} outside truncated domain [{}, {}]",
                    self.trunc.0, self.trunc.1
                )));
            }
        }
        Ok(self.y_tab.eval(t2) - self.y_tab.eval(t1))
    }

    /// I(−∞, θ) = y(θ) − y₋, the phase length entering the WKB eigenstates.
    pub fn i_from_left_inf(&self, theta: f64) -> f64 {
        self.y_of_theta(theta) - self.y_minus
    }

    /// Real-time weight between two x-positions: |W(x₂) − W(x₁)| with W the
    /// cached antiderivative of w(x) = ½ p(φ⁻¹(x))². Beyond the truncated
    /// table W clamps to its exact asymptote, so deep-tail excursions
    /// contribute exactly their sub-truncation share.
    pub fn time_between(&self, x1: f64, x2: f64) -> f64 {
        (self.w_eval(x2) - self.w_eval(x1)).abs()
    }

    fn w_eval(&self, x: f64) -> f64 {
        if x < self.w_tab.x_min() {
            self.w_left_asym
        } else if x > self.w_tab.x_max() {
            self.w_right_asym
        } else {
            self.w_tab.eval(x)
        }
    }

    /// Expected real time of one full excursion below `x_tp` (down and back),
    /// 2 (W(x_tp) − W(−∞)). Exact for any flip rate by the half-line
    /// boundary-value identity.
    pub fn deep_tail_mean_time(&self, x_tp: f64) -> f64 {
        2.0 * (self.w_eval(x_tp) - self.w_left_asym)
    }

    /// Depth at which the remaining mean excursion time falls to
    /// `rel_share · (T_det + left tail integral)`; clamped into
    /// [table minimum, −2L]. Used by the simulator to cut heavy-tailed deep
    /// excursions without biasing the mean.
    pub fn teleport_depth(&self, rel_share: f64) -> f64 {
        let tdet_plus_tail = (self.w_eval(self.l_classical) - self.w_eval(0.0))
            + (self.w_eval(0.0) - self.w_left_asym) * 2.0;
        let target = self.w_left_asym + 0.5 * rel_share * tdet_plus_tail;
        let (mut lo, mut hi) = (self.w_tab.x_min(), 0.0);
        if self.w_eval(lo) >= target {
            return lo;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.w_eval(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo.min(-2.0 * self.l_classical)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quartic_1_2_1() -> Landscape {
        Landscape::quartic(1.0, 2.0, 1.0).unwrap()
    }

    #[test]
    fn quartic_well_values() {
        let l = quartic_1_2_1();
        // wells sit at V0
        assert_eq!(l.eval_v(1.0).unwrap(), 1.0);
        assert_eq!(l.eval_v(-1.0).unwrap(), 1.0);
        // barrier: a²ω²/8 + V0 = 0.5 + 1
        assert!((l.eval_v(0.0).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn quartic_hand_arithmetic() {
        // a=2, ω=1, V0=0.25 at θ=0: coeff = 1/32, (0−4)² = 16 → 0.5 + 0.25
        let l = Landscape::quartic(2.0, 1.0, 0.25).unwrap();
        assert!((l.eval_v(0.0).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn momentum_values() {
        let l = quartic_1_2_1();
        assert!((l.momentum_p(1.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        // E=4 at the barrier: sqrt(4/1.5)
        let p = l.momentum_p(4.0, 0.0).unwrap();
        assert!((p - (4.0f64 / 1.5).sqrt()).abs() < 1e-12);
        assert!((p - 1.63299).abs() < 1e-5);
        assert!(matches!(
            l.momentum_p(0.0, 0.0),
            Err(LabError::DomainError(_))
        ));
    }

    #[test]
    fn custom_nonpositive_rejected() {
        // non-positive at the global well: rejected at construction
        let l = Landscape::custom(|t| t, |_| 1.0, None, 1.0, -1.0);
        assert!(matches!(l, Err(LabError::AssumptionViolation(_))));
        // positive at the wells but not everywhere: rejected at evaluation
        let l = Landscape::custom(|t| t, |_| 1.0, None, 2.0, 1.0).unwrap();
        assert!(matches!(
            l.eval_v(-0.5),
            Err(LabError::AssumptionViolation(_))
        ));
        let ok = Landscape::custom(|t| t * t + 1.0, |t| 2.0 * t, None, 0.0, 0.0).unwrap();
        assert!(matches!(ok.eval_v(0.5), Ok(v) if v == 1.25));
    }

    #[test]
    fn validation_quartic_passes() {
        let l = quartic_1_2_1();
        let r = l.validate_assumptions((-6.0, 6.0), 1e-2);
        assert!(r.positivity_ok && r.two_minima_ok && r.ordering_ok && r.tail_ok);
        assert_eq!(r.symmetry_ok, Some(true));
        assert!(r.all_ok());
    }

    #[test]
    fn validation_single_well_fails_minima() {
        let l = Landscape::custom(|t| t * t + 1.0, |t| 2.0 * t, None, 0.0, 0.0).unwrap();
        let r = l.validate_assumptions((-5.0, 5.0), 1e-2);
        assert!(!r.two_minima_ok);
        assert_eq!(r.n_minima, 1);
        assert!(!r.all_ok());
    }

    #[test]
    fn validation_decaying_tail_fails() {
        // V = 1/(1+θ²) violates V → ∞ (and the wells are fake, but the tail
        // check must flag regardless)
        let l = Landscape::custom(
            |t| 1.0 / (1.0 + t * t),
            |t| -2.0 * t / (1.0 + t * t).powi(2),
            None,
            0.0,
            0.0,
        )
        .unwrap();
        let r = l.validate_assumptions((-5.0, 5.0), 1e-2);
        assert!(!r.tail_ok);
    }

    #[test]
    fn maps_basic_geometry() {
        let l = quartic_1_2_1();
        let m = build_maps(&l, 1.0, 1e-10).unwrap();
        // φ(a_left) = 0 by the anchoring of Eq. change-x
        assert!(m.phi(-1.0).abs() < 1e-10);
        // independent high-order quadrature oracle for L (frozen from a
        // 1e-13-tolerance run of an independent integrator)
        assert!((m.l_classical - 2.245_480_252_507_03).abs() < 1e-9);
        assert!((m.phi(1.0) - m.l_classical).abs() < 1e-8);
        // odd symmetry of y about 0
        assert!((m.y_of_theta(1.0) + m.y_of_theta(-1.0)).abs() < 1e-9);
        // frozen oracle values
        assert!((m.l_y - 4.797_350_948_920_2).abs() < 1e-8);
        assert!((m.y_plus - 2.398_675_474_460_1).abs() < 1e-8);
    }

    #[test]
    fn maps_roundtrip_and_derivative() {
        let l = quartic_1_2_1();
        let m = build_maps(&l, 1.0, 1e-10).unwrap();
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let t = rng.gen_range(-3.0..3.0);
            let back = m.phi_inv(m.phi(t));
            assert!((back - t).abs() < 1e-7, "roundtrip {t} -> {back}");
        }
        // dφ/dθ · p = 1 by finite differences
        for t in [-1.5, -0.3, 0.0, 0.9, 2.0] {
            let h = 1e-5;
            let d = (m.phi(t + h) - m.phi(t - h)) / (2.0 * h);
            let p = l.momentum_p(1.0, t).unwrap();
            assert!((d * p - 1.0).abs() < 1e-6, "at {t}: {}", d * p);
        }
    }

    #[test]
    fn momentum_bounded_by_well_floor() {
        let l = quartic_1_2_1();
        let bound = (1.0f64 / l.v0).sqrt();
        for i in 0..200 {
            let t = -10.0 + 20.0 * i as f64 / 199.0;
            assert!(l.momentum_p(1.0, t).unwrap() <= bound + 1e-12);
        }
    }

    #[test]
    fn distance_antisymmetric_and_zero() {
        let l = quartic_1_2_1();
        let m = build_maps(&l, 1.0, 1e-10).unwrap();
        assert_eq!(m.distance_i(0.7, 0.7).unwrap(), 0.0);
        let a = m.distance_i(-1.0, 1.0).unwrap();
        let b = m.distance_i(1.0, -1.0).unwrap();
        assert!((a + b).abs() < 1e-12);
        // symmetric quartic: I(−a, a) = 2 y(a); frozen quadrature oracle
        assert!((a - 1.790_189_310_778_13).abs() < 1e-9);
        assert!((a - 2.0 * m.y_of_theta(1.0)).abs() < 1e-9);
        assert!(m.distance_i(0.0, 1e9).is_err());
    }

    #[test]
    fn theta_of_y_roundtrip_including_tails() {
        let l = quartic_1_2_1();
        let m = build_maps(&l, 1.0, 1e-10).unwrap();
        for frac in [0.001, 0.2, 0.5, 0.9, 0.999, 0.999_99] {
            let y = m.y_minus + frac * (m.y_plus - m.y_minus);
            let th = m.theta_of_y(y).unwrap();
            assert!(
                (m.y_of_theta(th) - y).abs() < 1e-8,
                "frac {frac}: y {y} -> theta {th}"
            );
        }
        assert!(m.theta_of_y(m.y_plus + 0.1).is_err());
    }
}
