//! Stochastic ECD in one dimension: exact event-driven simulation and the
//! closed-form hitting-time theory it is validated against.

pub mod analytic;
pub mod sim;

/// Initial momentum direction u₀ ∈ {−1, +1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Direction {
    Plus,
    Minus,
}

impl Direction {
    pub fn signum(self) -> f64 {
        match self {
            Direction::Plus => 1.0,
            Direction::Minus => -1.0,
        }
    }

    pub fn from_signum(v: f64) -> Option<Self> {
        if v == 1.0 {
            Some(Direction::Plus)
        } else if v == -1.0 {
            Some(Direction::Minus)
        } else {
            None
        }
    }
}
