//! Decide whether a Lévy process admits a partial right inverse (PRI) from its
//! triplet (γ, σ, Π), and cross-validate the decision with Monte Carlo path
//! simulation and ladder/renewal numerics.
//!
//! The crate is organized around four layers:
//!
//! - [`measures`]: Lévy triplets, jump-measure specifications, tail functions
//!   and variation/activity classification.
//! - [`criteria`]: the integral criteria `J` and `L`, dyadic-band divergence
//!   detection, and the full PRI decision procedure.
//! - [`ladder`]: renewal functions of subordinators, Erickson envelopes,
//!   Vigon's upward-tail formula, convolution squares and the integral `I`.
//! - [`simulate`]: path skeletons, first-passage and hitting functionals, the
//!   dyadic right-inverse construction and overshoot statistics.

pub mod criteria;
pub mod error;
pub mod ladder;
pub mod measures;
pub mod quad;
pub mod simulate;

pub use error::{Error, Result};
