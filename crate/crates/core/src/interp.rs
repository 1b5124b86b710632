//! Monotone cubic interpolation (Fritsch–Carlson) on strictly increasing nodes.
//!
//! The limiter clamps segment slopes so the interpolant never overshoots,
//! which keeps strictly monotone data strictly monotone. Used for all cached
//! coordinate tables (φ, φ⁻¹, y, and the time antiderivative).

use crate::error::{LabError, Result};

#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// node derivatives dy/dx after the Fritsch–Carlson limiter
    ds: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(LabError::DomainError(
                "interp table needs >= 2 nodes".into(),
            ));
        }
        let n = xs.len();
        for i in 1..n {
            if !(xs[i] > xs[i - 1]) {
                return Err(LabError::DomainError(format!(
                    "interp nodes not strictly increasing at index {i}"
                )));
            }
        }
        // secant slopes
        let mut sec = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            sec.push((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]));
        }
        let mut ds = vec![0.0; n];
        ds[0] = sec[0];
        ds[n - 1] = sec[n - 2];
        for i in 1..n - 1 {
            ds[i] = if sec[i - 1] * sec[i] <= 0.0 {
                0.0
            } else {
                // weighted harmonic mean keeps the interpolant monotone
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                let w1 = 2.0 * h1 + h0;
                let w2 = h1 + 2.0 * h0;
                (w1 + w2) / (w1 / sec[i - 1] + w2 / sec[i])
            };
        }
        // Fritsch–Carlson clamp: |d| <= 3 |secant|
        for i in 0..n - 1 {
            if sec[i] == 0.0 {
                ds[i] = 0.0;
                ds[i + 1] = 0.0;
            } else {
                let a = ds[i] / sec[i];
                let b = ds[i + 1] / sec[i];
                let s = (a * a + b * b).sqrt();
                if s > 3.0 {
                    ds[i] = 3.0 / s * a * sec[i];
                    ds[i + 1] = 3.0 / s * b * sec[i];
                }
            }
        }
        Ok(Self { xs, ys, ds })
    }

    pub fn x_min(&self) -> f64 {
        self.xs[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.xs.last().expect("nonempty table")
    }

    fn segment(&self, x: f64) -> usize {
        match self
            .xs
            .binary_search_by(|v| v.partial_cmp(&x).expect("finite nodes"))
        {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.xs.len() - 2),
        }
    }

    /// Evaluate; arguments are clamped to the table range.
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(self.x_min(), self.x_max());
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1, d0, d1) = (self.ys[i], self.ys[i + 1], self.ds[i], self.ds[i + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + d0 * h * (t3 - 2.0 * t2 + t)
            + y1 * (-2.0 * t3 + 3.0 * t2)
            + d1 * h * (t3 - t2)
    }

    /// Derivative of the interpolant.
    pub fn eval_deriv(&self, x: f64) -> f64 {
        let x = x.clamp(self.x_min(), self.x_max());
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1, d0, d1) = (self.ys[i], self.ys[i + 1], self.ds[i], self.ds[i + 1]);
        let t2 = t * t;
        (y0 * (6.0 * t2 - 6.0 * t) / h)
            + d0 * (3.0 * t2 - 4.0 * t + 1.0)
            + (y1 * (6.0 * t - 6.0 * t2) / h)
            + d1 * (3.0 * t2 - 2.0 * t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reproduces_nodes() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.3).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.sinh()).collect();
        let t = MonotoneCubic::new(xs.clone(), ys.clone()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert!((t.eval(*x) - y).abs() < 1e-12);
        }
    }

    #[test]
    fn smooth_accuracy() {
        let n = 400;
        let xs: Vec<f64> = (0..=n).map(|i| -2.0 + 4.0 * i as f64 / n as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.exp()).collect();
        let t = MonotoneCubic::new(xs, ys).unwrap();
        for i in 0..1000 {
            let x = -2.0 + 4.0 * (i as f64 + 0.5) / 1000.0;
            assert!((t.eval(x) - x.exp()).abs() < 1e-4);
        }
    }

    proptest! {
        #[test]
        fn monotone_data_gives_monotone_interpolant(seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = 12;
            let mut xs = vec![0.0];
            let mut ys = vec![0.0];
            for _ in 1..n {
                xs.push(xs.last().unwrap() + rng.gen_range(0.01..1.0));
                ys.push(ys.last().unwrap() + rng.gen_range(0.0..2.0));
            }
            let t = MonotoneCubic::new(xs.clone(), ys).unwrap();
            let mut prev = t.eval(xs[0]);
            let m = 500;
            for i in 1..=m {
                let x = xs[0] + (xs[n-1] - xs[0]) * i as f64 / m as f64;
                let v = t.eval(x);
                prop_assert!(v >= prev - 1e-12, "interpolant decreased");
                prev = v;
            }
        }
    }
}
