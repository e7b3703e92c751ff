//! Numerical checks that adjacent-only comparisons beat arbitrary-pair
//! comparisons at stationarity.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::exact::matrix::build_matrix;
use crate::exact::space::DEFAULT_STATE_CAP;
use crate::exact::stationary::{stationary_solve, stationary_tree};
use crate::kernels::ChainKind;
use crate::seq::{weighted_inversion, Energy, Sequence};

/// Slack used by the strict-inequality verifications.
pub const STRICT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdjBetter {
    pub pi_adj: f64,
    pub pi_any: f64,
    /// `π_adj(abc) > π_any(abc) + STRICT_SLACK`
    pub holds: bool,
}

impl AdjBetter {
    pub fn margin(&self) -> f64 {
        self.pi_adj - self.pi_any - STRICT_SLACK
    }
}

/// Probability of the sorted arrangement `abc` at stationarity under both
/// chains, from exact linear solves.
pub fn verify_adj_better(a: f64, b: f64, c: f64, energy: &Energy) -> Result<AdjBetter> {
    if !(a <= b && b <= c) {
        return domain(format!("expected a ≤ b ≤ c, got ({a}, {b}, {c})"));
    }
    if a == c {
        return domain("the three elements must not all be equal");
    }
    if energy.is_uniform() {
        return domain("λ = 1 is the equality case; strict checks need λ ≠ 1");
    }
    let ms = Sequence::new(vec![a, b, c])?;
    let adj = build_matrix(ChainKind::Adj, &ms, energy, DEFAULT_STATE_CAP)?;
    let any = build_matrix(ChainKind::Any, &ms, energy, DEFAULT_STATE_CAP)?;
    let sorted = adj.space().sorted_index();
    let pi_adj = stationary_solve(&adj)?.get(sorted);
    let pi_any = stationary_solve(&any)?.get(sorted);
    Ok(AdjBetter {
        pi_adj,
        pi_any,
        holds: pi_adj > pi_any + STRICT_SLACK,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioCheck {
    pub s: Vec<f64>,
    pub s_prime: Vec<f64>,
    pub ratio_adj: f64,
    pub ratio_any: f64,
    /// `ratio_adj < ratio_any` with relative slack `STRICT_SLACK`
    pub holds: bool,
}

impl RatioCheck {
    /// Relative excess of the any-pair ratio over the adjacent one, minus slack.
    pub fn margin(&self) -> f64 {
        self.ratio_any / self.ratio_adj - 1.0 - STRICT_SLACK
    }
}

/// For every pair of states `s, s'` one adjacent swap apart with
/// `w(s') > w(s)`, compares `π_adj(s')/π_adj(s)` against
/// `π_any(s')/π_any(s)`.
///
/// Ratios of tiny probabilities need relative accuracy, so both
/// distributions come from the subtraction-free tree-theorem route; this
/// limits the multiset to 200 arrangements and `|ln λ| ≤ 5`.
pub fn verify_ratio_lemma(multiset: &Sequence, energy: &Energy) -> Result<Vec<RatioCheck>> {
    if energy.is_uniform() {
        return domain("λ = 1 makes every ratio equal; strict checks need λ ≠ 1");
    }
    let adj = build_matrix(ChainKind::Adj, multiset, energy, DEFAULT_STATE_CAP)?;
    let any = build_matrix(ChainKind::Any, multiset, energy, DEFAULT_STATE_CAP)?;
    let pi_adj = stationary_tree(&adj)?;
    let pi_any = stationary_tree(&any)?;
    let space = adj.space();
    let mut out = Vec::new();
    for (si, s) in space.states().iter().enumerate() {
        let w_s = weighted_inversion(s);
        for k in 0..s.len().saturating_sub(1) {
            let t = s.swapped(k, k + 1);
            if t == *s || weighted_inversion(&t) <= w_s {
                continue;
            }
            let ti = space.index_of(&t).expect("neighbour in space");
            let ratio_adj = pi_adj.get(ti) / pi_adj.get(si);
            let ratio_any = pi_any.get(ti) / pi_any.get(si);
            out.push(RatioCheck {
                s: s.as_slice().to_vec(),
                s_prime: t.into_vec(),
                ratio_adj,
                ratio_any,
                holds: ratio_any > ratio_adj * (1.0 + STRICT_SLACK),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn adj_better_examples() {
        let e = Energy::new(E).unwrap();
        assert!(verify_adj_better(1., 2., 3., &e).unwrap().holds);
        assert!(verify_adj_better(1., 1., 2., &e).unwrap().holds);
    }

    #[test]
    fn below_one_the_sorted_state_is_least_likely() {
        // λ < 1 drives the chains toward the reversed order; the sorted
        // arrangement is then *less* likely under the adjacent chain
        let r = verify_adj_better(1., 2., 3., &Energy::new(0.7).unwrap()).unwrap();
        assert!(!r.holds);
        assert!(r.pi_adj < r.pi_any);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        let e = Energy::new(E).unwrap();
        assert!(verify_adj_better(2., 2., 2., &e).is_err());
        assert!(verify_adj_better(3., 2., 1., &e).is_err());
        assert!(verify_adj_better(1., 2., 3., &Energy::new(1.0).unwrap()).is_err());
        let ms = Sequence::new(vec![1., 2., 3.]).unwrap();
        assert!(verify_ratio_lemma(&ms, &Energy::new(1.0).unwrap()).is_err());
    }

    #[test]
    fn ratio_lemma_examples() {
        let ms = Sequence::new(vec![1., 2., 3.]).unwrap();
        let checks = verify_ratio_lemma(&ms, &Energy::new(E).unwrap()).unwrap();
        // 123→213, 123→132, 213→231, 132→312, 231→321, 312→321
        assert_eq!(checks.len(), 6);
        assert!(checks.iter().all(|c| c.holds), "{checks:?}");

        let ms = Sequence::new(vec![1., 2., 4.]).unwrap();
        let checks = verify_ratio_lemma(&ms, &Energy::new(E * E).unwrap()).unwrap();
        assert!(checks.iter().all(|c| c.holds), "{checks:?}");
    }
}
