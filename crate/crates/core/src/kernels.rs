//! The three sorting chains: step samplers and exact one-step probabilities.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::seq::{Energy, Sequence};

/// Which comparison rule the chain uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainKind {
    /// Uniformly random adjacent pair.
    Adj,
    /// Uniformly random pair `i < j`.
    Any,
    /// Random pair, swap accepted only if `j − i` independent comparisons agree.
    AnyStar,
}

impl ChainKind {
    pub const ALL: [ChainKind; 3] = [ChainKind::Adj, ChainKind::Any, ChainKind::AnyStar];

    pub fn as_str(&self) -> &'static str {
        match self {
            ChainKind::Adj => "adj",
            ChainKind::Any => "any",
            ChainKind::AnyStar => "any-star",
        }
    }

    /// Number of proposable position pairs for a sequence of length `n`.
    pub fn pair_count(&self, n: usize) -> usize {
        match self {
            ChainKind::Adj => n.saturating_sub(1),
            ChainKind::Any | ChainKind::AnyStar => n * n.saturating_sub(1) / 2,
        }
    }

    /// Whether positions `i < j` (0-based) can be proposed.
    pub fn proposes(&self, i: usize, j: usize) -> bool {
        match self {
            ChainKind::Adj => j == i + 1,
            ChainKind::Any | ChainKind::AnyStar => i < j,
        }
    }

    /// Acceptance probability for swapping `a` at position `i` with `b` at
    /// position `j > i`.
    #[inline]
    pub(crate) fn acceptance(&self, a: f64, b: f64, i: usize, j: usize, energy: &Energy) -> f64 {
        let p = energy.accept(a, b);
        match self {
            ChainKind::AnyStar => p.powi((j - i) as i32),
            _ => p,
        }
    }
}

impl fmt::Display for ChainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChainKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adj" => Ok(ChainKind::Adj),
            "any" => Ok(ChainKind::Any),
            "any-star" => Ok(ChainKind::AnyStar),
            other => Err(Error::Config(format!(
                "unknown chain kind {other:?} (expected adj, any or any-star)"
            ))),
        }
    }
}

/// Trace of one step. Positions are 1-based, `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Move {
    pub i: usize,
    pub j: usize,
    pub accepted: bool,
}

/// Draws the pair `(i, j)`, 0-based with `i < j`.
#[inline]
fn propose<R: Rng + ?Sized>(kind: ChainKind, n: usize, rng: &mut R) -> (usize, usize) {
    match kind {
        ChainKind::Adj => {
            let i = rng.gen_range(0..n - 1);
            (i, i + 1)
        }
        ChainKind::Any | ChainKind::AnyStar => {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            (i.min(j), i.max(j))
        }
    }
}

/// One step applied in place. Returns `None` for sequences of length < 2.
#[inline]
pub fn step_in_place<R: Rng + ?Sized>(
    kind: ChainKind,
    s: &mut [f64],
    energy: &Energy,
    rng: &mut R,
) -> Option<Move> {
    if s.len() < 2 {
        return None;
    }
    let (i, j) = propose(kind, s.len(), rng);
    let accepted = rng.gen::<f64>() < kind.acceptance(s[i], s[j], i, j, energy);
    if accepted {
        s.swap(i, j);
    }
    Some(Move {
        i: i + 1,
        j: j + 1,
        accepted,
    })
}

/// One step of the chain. For `n = 1` the sequence is returned unchanged
/// with a rejected `(1, 1)` move.
pub fn step<R: Rng + ?Sized>(
    kind: ChainKind,
    s: &Sequence,
    energy: &Energy,
    rng: &mut R,
) -> (Sequence, Move) {
    let mut v = s.as_slice().to_vec();
    let mv = step_in_place(kind, &mut v, energy, rng).unwrap_or(Move {
        i: 1,
        j: 1,
        accepted: false,
    });
    (Sequence::from_vec_unchecked(v), mv)
}

/// Move-level probabilities out of `s`: every proposable pair `(i, j)`
/// (0-based) holding distinct elements, with pick × acceptance probability.
pub fn moves(kind: ChainKind, s: &[f64], energy: &Energy) -> Vec<(usize, usize, f64)> {
    let n = s.len();
    if n < 2 {
        return Vec::new();
    }
    let pick = 1.0 / kind.pair_count(n) as f64;
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if !kind.proposes(i, j) || s[i].to_bits() == s[j].to_bits() {
                continue;
            }
            out.push((i, j, pick * kind.acceptance(s[i], s[j], i, j, energy)));
        }
    }
    out
}

/// Exact one-step probability `P(s, t)`.
pub fn transition_probability(
    kind: ChainKind,
    s: &Sequence,
    t: &Sequence,
    energy: &Energy,
) -> Result<f64> {
    if !s.same_multiset(t) {
        return domain(format!("{t:?} is not a rearrangement of {s:?}"));
    }
    let (a, b) = (s.as_slice(), t.as_slice());
    let diff: Vec<usize> = (0..a.len())
        .filter(|&k| a[k].to_bits() != b[k].to_bits())
        .collect();
    match diff.as_slice() {
        [] => {
            let out: f64 = moves(kind, a, energy).iter().map(|m| m.2).sum();
            Ok((1.0 - out).max(0.0))
        }
        &[i, j] if a[i].to_bits() == b[j].to_bits() && kind.proposes(i, j) => {
            let pick = 1.0 / kind.pair_count(a.len()) as f64;
            Ok(pick * kind.acceptance(a[i], a[j], i, j, energy))
        }
        _ => Ok(0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::swap_probability;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::E;

    fn seq(v: &[f64]) -> Sequence {
        Sequence::new(v.to_vec()).unwrap()
    }

    fn en(l: f64) -> Energy {
        Energy::new(l).unwrap()
    }

    #[test]
    fn kind_round_trips_through_strings() {
        for k in ChainKind::ALL {
            assert_eq!(k.as_str().parse::<ChainKind>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{k}\""));
        }
        assert!("Adj".parse::<ChainKind>().is_err());
    }

    #[test]
    fn constant_sequence_never_moves() {
        let s = seq(&[4.0, 4.0, 4.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for k in ChainKind::ALL {
            for _ in 0..100 {
                assert_eq!(step(k, &s, &en(E), &mut rng).0, s);
            }
            assert_eq!(transition_probability(k, &s, &s, &en(E)).unwrap(), 1.0);
        }
    }

    #[test]
    fn single_element_step_is_identity() {
        let s = seq(&[1.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (t, mv) = step(ChainKind::Any, &s, &en(E), &mut rng);
        assert_eq!(t, s);
        assert!(!mv.accepted);
    }

    #[test]
    fn transition_examples() {
        let e2 = E * E;
        let p =
            transition_probability(ChainKind::Adj, &seq(&[2.0, 1.0]), &seq(&[1.0, 2.0]), &en(E))
                .unwrap();
        assert!((p - e2 / (e2 + 1.0)).abs() < 1e-15);

        let s = seq(&[1.0, 2.0, 3.0]);
        let t = seq(&[3.0, 2.0, 1.0]);
        assert_eq!(
            transition_probability(ChainKind::Adj, &s, &t, &en(E)).unwrap(),
            0.0
        );
        let any = transition_probability(ChainKind::Any, &s, &t, &en(E)).unwrap();
        let expected = swap_probability(1.0, 3.0, &en(E)).unwrap() / 3.0;
        assert!((any - expected).abs() < 1e-17);
    }

    #[test]
    fn non_rearrangement_is_rejected() {
        let r =
            transition_probability(ChainKind::Any, &seq(&[1.0, 2.0]), &seq(&[1.0, 3.0]), &en(E));
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn any_star_uses_distance_power() {
        let s = seq(&[3.0, 1.0, 2.0]);
        let t = seq(&[2.0, 1.0, 3.0]);
        let p = transition_probability(ChainKind::AnyStar, &s, &t, &en(E)).unwrap();
        let acc = swap_probability(3.0, 2.0, &en(E)).unwrap();
        assert!((p - acc * acc / 3.0).abs() < 1e-16);
        // distance-one pairs agree across all kinds up to the pick probability
        let u = seq(&[1.0, 3.0, 2.0]);
        let any = transition_probability(ChainKind::Any, &s, &u, &en(E)).unwrap();
        let star = transition_probability(ChainKind::AnyStar, &s, &u, &en(E)).unwrap();
        let adj = transition_probability(ChainKind::Adj, &s, &u, &en(E)).unwrap();
        assert_eq!(any, star);
        assert!((adj * 2.0 / 3.0 - any).abs() < 1e-16);
    }

    fn binomial_check(kind: ChainKind, s: &Sequence, t: &Sequence, energy: &Energy, n: usize) {
        let target = transition_probability(kind, s, t, energy).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let hits = (0..n)
            .filter(|_| step(kind, s, energy, &mut rng).0 == *t)
            .count();
        let freq = hits as f64 / n as f64;
        let sigma = (target * (1.0 - target) / n as f64).sqrt();
        assert!(
            (freq - target).abs() <= 3.0 * sigma,
            "{kind}: {freq} vs {target}"
        );
    }

    #[test]
    fn sampler_matches_examples() {
        binomial_check(
            ChainKind::Adj,
            &seq(&[2.0, 1.0]),
            &seq(&[1.0, 2.0]),
            &en(E),
            100_000,
        );
        // pair (1,3) of (3,1,2) under AnyStar
        binomial_check(
            ChainKind::AnyStar,
            &seq(&[3.0, 1.0, 2.0]),
            &seq(&[2.0, 1.0, 3.0]),
            &en(E),
            100_000,
        );
    }

    #[test]
    fn rows_sum_to_one() {
        let s = seq(&[3.0, 1.0, 2.0, 2.0, 0.5]);
        for k in ChainKind::ALL {
            let mut total = transition_probability(k, &s, &s, &en(1.7)).unwrap();
            for i in 0..s.len() {
                for j in i + 1..s.len() {
                    let t = s.swapped(i, j);
                    if t != s {
                        total += transition_probability(k, &s, &t, &en(1.7)).unwrap();
                    }
                }
            }
            assert!((total - 1.0).abs() < 1e-12, "{k}: {total}");
        }
    }
}
