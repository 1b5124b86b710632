//! Exponential integral E₁(x) = ∫_x^∞ e^{−u}/u du for x > 0.
//!
//! Series around the logarithmic singularity for small arguments, modified
//! Lentz continued fraction for large ones. Crossover at x = 1 keeps both
//! branches well inside their convergence regions.

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// E₁ by power series: −γ − ln x + Σ_{k≥1} (−1)^{k+1} x^k / (k·k!).
fn exp_e1_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..=60 {
        term *= -x / k as f64;
        let contrib = -term / k as f64;
        sum += contrib;
        if contrib.abs() < 1e-17 * sum.abs().max(1.0) {
            break;
        }
    }
    -EULER_GAMMA - x.ln() + sum
}

/// E₁ by the continued fraction e^{−x}/(x+1−1/(x+3−4/(x+5−9/...))).
fn exp_e1_contfrac(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for k in 1..=200 {
        let a = -(k as f64) * (k as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x).exp() * h
}

/// Exponential integral E₁(x), x > 0. Returns +∞ at x = 0 and 0 once the
/// e^{−x} factor underflows.
pub fn exp_e1(x: f64) -> f64 {
    assert!(x >= 0.0, "E1 defined here for nonnegative arguments");
    if x == 0.0 {
        return f64::INFINITY;
    }
    if x <= 1.0 {
        exp_e1_series(x)
    } else if x > 700.0 {
        0.0
    } else {
        exp_e1_contfrac(x)
    }
}
