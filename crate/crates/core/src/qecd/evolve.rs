//! Wavepackets on the Liouville grid: construction, spectral evolution, and
//! window detection probabilities.

use crate::error::{LabError, Result};
use crate::qecd::model::SpectralModel;
use num_complex::Complex64;

/// A normalized state on the model grid, stored in the Liouville
/// representation u(y) = V^{1/4} ψ(θ(y)), so ∫|ψ|²dθ = ∫|u|²dy.
#[derive(Debug, Clone)]
pub struct Wavepacket {
    pub amplitudes: Vec<Complex64>,
}

impl Wavepacket {
    /// Grid norm √(h Σ |u|²).
    pub fn norm(&self, model: &SpectralModel) -> f64 {
        (model.grid_h * self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// ψ(θ_j) at grid node j.
    pub fn psi_theta_at(&self, model: &SpectralModel, j: usize) -> Complex64 {
        let v = model.maps().landscape().v(model.theta_nodes[j]);
        self.amplitudes[j] / v.powf(0.25)
    }

    /// Spectral coefficients c_n = ⟨u_n, u⟩ under the grid inner product.
    pub fn coefficients(&self, model: &SpectralModel) -> Vec<Complex64> {
        let n = model.n_grid;
        let mut c = Vec::with_capacity(n);
        for k in 0..n {
            let ev = model.eigenvector(k);
            let acc: Complex64 = ev.iter().zip(&self.amplitudes).map(|(e, a)| e * a).sum();
            c.push(acc * model.grid_h);
        }
        c
    }

    /// Position expectation ⟨θ⟩.
    pub fn mean_theta(&self, model: &SpectralModel) -> f64 {
        let mut acc = 0.0;
        for (j, a) in self.amplitudes.iter().enumerate() {
            acc += model.theta_nodes[j] * a.norm_sqr();
        }
        acc * model.grid_h
    }

    /// Energy expectation ⟨ψ|H|ψ⟩ through the spectral decomposition.
    pub fn energy_expectation(&self, model: &SpectralModel) -> f64 {
        self.coefficients(model)
            .iter()
            .enumerate()
            .map(|(n, c)| model.energy(n) * c.norm_sqr())
            .sum()
    }
}

/// Zero-momentum Gaussian of width σ = α√ħ centered at `center`
/// (a_left for the standard protocol), projected onto the grid and
/// re-normalized.
pub fn initial_gaussian(model: &SpectralModel, center: f64, alpha: f64) -> Result<Wavepacket> {
    if !(alpha > 0.0) {
        return Err(LabError::DomainError("alpha must be positive".into()));
    }
    let sigma = alpha * model.hbar.sqrt();
    let lnd = model.maps().landscape();
    // resolution guard: at least 8 grid points per σ around the center
    let v_center = lnd.eval_v(center)?;
    let sigma_y = sigma / v_center.sqrt();
    if sigma_y / model.grid_h < 8.0 {
        return Err(LabError::ResolutionError(format!(
            "sigma spans {:.1} grid points (need >= 8); raise n_grid",
            sigma_y / model.grid_h
        )));
    }
    let mut amplitudes = Vec::with_capacity(model.n_grid);
    let norm_const = (2.0 * std::f64::consts::PI * sigma * sigma).powf(-0.25);
    for j in 0..model.n_grid {
        let th = model.theta_nodes[j];
        let d = th - center;
        let psi = norm_const * (-d * d / (4.0 * sigma * sigma)).exp();
        amplitudes.push(Complex64::new(psi * lnd.v(th).powf(0.25), 0.0));
    }
    let mut wp = Wavepacket { amplitudes };
    let norm = wp.norm(model);
    if !(norm > 0.0) {
        return Err(LabError::ResolutionError(
            "packet vanished on the grid".into(),
        ));
    }
    for a in &mut wp.amplitudes {
        *a /= norm;
    }
    Ok(wp)
}

/// Unitary evolution by real time t: phases e^{−iE_n t/ħ} on the spectral
/// coefficients. The λ_q rescale enters only through reported hitting times,
/// never through this propagator.
pub fn evolve(model: &SpectralModel, psi: &Wavepacket, t: f64) -> Wavepacket {
    let n = model.n_grid;
    let c = psi.coefficients(model);
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (k, ck) in c.iter().enumerate() {
        // E_n t / ħ = ħ λ_n t
        let phase = -model.hbar * model.eigenvalues[k] * t;
        let rot = Complex64::from_polar(1.0, phase) * ck;
        if rot.norm_sqr() < 1e-34 {
            continue;
        }
        let ev = model.eigenvector(k);
        for (o, e) in out.iter_mut().zip(ev) {
            *o += rot * e;
        }
    }
    Wavepacket { amplitudes: out }
}

/// Detection probability ∫_{c−σ}^{c+σ} |ψ(θ)|² dθ by grid quadrature in the
/// θ measure (|u|² dy), with linear partial-cell weights at the window
/// edges.
pub fn detection_prob(
    model: &SpectralModel,
    psi: &Wavepacket,
    window_center: f64,
    sigma: f64,
) -> f64 {
    let maps = model.maps();
    let y_lo = maps.y_of_theta(window_center - sigma);
    let y_hi = maps.y_of_theta(window_center + sigma);
    window_mass(model, &psi.amplitudes, y_lo, y_hi)
}

fn window_mass(model: &SpectralModel, amplitudes: &[Complex64], y_lo: f64, y_hi: f64) -> f64 {
    let h = model.grid_h;
    let y0 = model.y_nodes[0];
    let n = model.n_grid;
    let mut acc = 0.0;
    for (j, a) in amplitudes.iter().enumerate() {
        let y = y0 + h * j as f64;
        // fraction of the cell [y−h/2, y+h/2] inside the window
        let cell_lo = y - 0.5 * h;
        let cell_hi = y + 0.5 * h;
        let lo = cell_lo.max(y_lo);
        let hi = cell_hi.min(y_hi);
        if hi > lo {
            acc += a.norm_sqr() * (hi - lo);
        }
        let _ = n;
    }
    acc
}
