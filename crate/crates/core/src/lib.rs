//! Sorting with noisy comparisons, modelled as Markov chains over the
//! arrangements of a multiset.
//!
//! A comparison of `a` and `b` orders them correctly with probability
//! `λ^{|a−b|} / (λ^{a−b} + λ^{b−a})`. Three chains are provided: adjacent
//! swaps ([`ChainKind::Adj`]), arbitrary-pair swaps ([`ChainKind::Any`]) and
//! arbitrary-pair swaps whose acceptance is raised to the positional
//! distance ([`ChainKind::AnyStar`]).
//!
//! ```
//! use noisysort::{exact, ChainKind, Energy, Sequence};
//!
//! let e = Energy::new(2.0).unwrap();
//! let ms: Sequence = "1,2,3".parse().unwrap();
//! let m = exact::build_matrix(ChainKind::Adj, &ms, &e, 100).unwrap();
//! let pi = exact::stationary_solve(&m).unwrap();
//! let gibbs = exact::gibbs_distribution(m.space(), &e);
//! assert!((pi.get(0) - gibbs.get(0)).abs() < 1e-12);
//! ```

pub mod closedform;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod kernels;
pub mod mixing;
pub mod seq;

pub use error::{Error, Result};
pub use kernels::{ChainKind, Move};
pub use seq::{weighted_inversion, Energy, Sequence};
