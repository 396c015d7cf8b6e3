//! Models of contracting, settlement bargaining, frivolous litigation and the
//! selection of legal rules, parameterised by a labor-augmenting cost shock.
//!
//! Each model lives in its own module and is a set of pure functions over
//! small immutable value types:
//!
//! - [`equilibrium`]: how complete a contract is when the marginal benefit of
//!   filling a gap equals its marginal cost.
//! - [`settlement`]: trial values, settlement ranges and trial/settle outcomes
//!   under the American and English fee rules.
//! - [`frivolous`]: the file / defend / drop game for frivolous and
//!   meritorious plaintiffs, solved by backward induction.
//! - [`evolution`]: a population of legal rules flipped between efficient and
//!   inefficient by litigated challenges, with its two-state Markov oracle.
//! - [`composition`]: how a flat cost reduction reshuffles the caseload mix
//!   across areas of law.
//!
//! Randomness is confined to [`evolution`] and always flows from an explicit
//! seed through [`rng`].

pub mod composition;
pub mod equilibrium;
mod error;
pub mod evolution;
pub mod frivolous;
pub mod rng;
pub mod settlement;

pub use error::{Error, Result};
