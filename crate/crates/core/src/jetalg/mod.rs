//! Exact differential-polynomial algebra in the jet variables `u_j = ∂_s^j k`.

mod diffpoly;
pub mod format;
mod monomial;

pub use diffpoly::{rat, DiffPoly};
pub use monomial::JetMonomial;

#[cfg(test)]
mod proptests;
