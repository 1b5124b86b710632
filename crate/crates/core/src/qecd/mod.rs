//! Quantum ECD: Liouville-grid spectral model, wavepacket evolution, and the
//! randomized-time hitting protocol.

pub mod eigen;
pub mod evolve;
pub mod model;
pub mod protocol;
