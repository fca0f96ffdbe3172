//! Exact-arithmetic toolkit for the two-user linear deterministic
//! interference channel with noisy channel-output feedback: rate regions,
//! equilibrium predicates, and a bit-level GF(2) simulator that
//! cross-checks the polyhedral results.

pub mod bits;
pub mod channel;
pub mod equilibrium;
pub mod gf2;
pub mod polytope;
pub mod rat;
pub mod regions;
pub mod schemes;

pub use bits::Bits;
pub use channel::{ChannelParams, SimTrace, User};
pub use gf2::{BitMatrix, BitVector};
pub use polytope::{LinearSystem, Region2};
pub use rat::Rat;
pub use regions::{NashBounds, RatePair, ThetaBounds};
pub use schemes::{Scheme, SimulationReport};
