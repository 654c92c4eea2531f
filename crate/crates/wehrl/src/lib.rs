//! Wehrl entropy of SU(2) (Bloch) coherent states through the stellar
//! representation: a spin-j state corresponds to an unordered multiset of 2j
//! points on the sphere (roots of its amplitude polynomial, suitably mapped),
//! and the entropy of the state has a closed form in those points.
//!
//! The crate provides the state/point conversions, the closed-form entropy,
//! quadrature oracles for cross-checking it, exact integer s-norms, the
//! explicit chord-distance formulas for spins 1, 3/2 and 2, and a multi-start
//! entropy minimizer. Everything is deterministic; all randomness flows from
//! caller-supplied seeds.

pub mod closed_forms;
pub mod entropy;
mod error;
pub mod io;
pub mod majorana;
pub mod search;
pub mod spin;
pub mod verify;

pub use error::WehrlError;
pub use spin::{SpherePoint, SpinState, TwiceSpin};
