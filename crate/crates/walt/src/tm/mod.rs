//! Poly-time Turing machines: descriptions and direct simulation, the clock
//! polynomial, and the encoding into typed lambda terms.

pub mod machine;
pub mod npoly;
pub mod types;

pub use machine::*;
pub use npoly::{npoly, npoly_exponent};
pub use types::{bit_flip, parity, parse_tmspec, tm_simulate, unary_increment, TMSpec, TapeState};
