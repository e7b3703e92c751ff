//! Exact analysis on enumerated state spaces.

mod compare;
mod linalg;
mod matrix;
mod reversibility;
mod space;
mod stationary;

pub use compare::{verify_adj_better, verify_ratio_lemma, AdjBetter, RatioCheck, STRICT_SLACK};
pub use matrix::{build_matrix, Distribution, Stochastic, TransitionMatrix};
pub use reversibility::{detailed_balance_residual, kolmogorov_cycle_ratio};
pub use space::{enumerate_states, multinomial_count, StateSpace, DEFAULT_STATE_CAP};
pub use stationary::{
    arborescence_bruteforce, arborescence_weight, gibbs_distribution, log_arborescence_weight,
    stationary_solve, stationary_tree, tree_distribution, BRUTEFORCE_STATE_LIMIT,
    TREE_MAX_ABS_LN_LAMBDA, TREE_STATE_LIMIT,
};
