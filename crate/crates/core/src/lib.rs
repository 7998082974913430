//! Noncyclic nonadiabatic holonomic single-qubit gates on a resonant Λ system.
//!
//! Pulses are inverse-engineered from a Lewis–Riesenfeld invariant ([`invariant`]),
//! sampled into two-segment schedules ([`gate`]), and evaluated under a Lindblad master
//! equation with static Rabi errors ([`dynamics`]). [`sweeps`] runs the batch
//! experiments, [`platform`] maps the three levels onto hardware and [`io`] handles
//! file formats.
//!
//! Units: ħ = 1, time in ns, rates in rad/ns. Level order is `(|0⟩, |e⟩, |1⟩)`.

pub mod dynamics;
pub mod error;
pub mod gate;
pub mod invariant;
pub mod io;
pub mod linalg;
pub mod platform;
pub mod quadrature;
pub mod search;
pub mod sweeps;

pub use error::{Error, Result};
