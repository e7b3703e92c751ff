//! Binary inputs (staircase encoding, coupling and mixing bounds) and the
//! one-outlier closed forms.
//!
//! In the one-outlier setting the multiset is `n − 1` copies of `a` plus a
//! single `b > a`; state `i ∈ 1..=n` has `b` at position `i`, so `i = n` is
//! sorted. `p` is the probability that one comparison of `a` and `b` comes
//! out wrong.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::kernels::ChainKind;
use crate::seq::{swap_probability, Energy, Sequence};

/// Binary multiset: `n_a` copies of `a`, `n_b` copies of `b > a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinarySpec {
    pub a: f64,
    pub b: f64,
    pub n_a: usize,
    pub n_b: usize,
}

impl BinarySpec {
    pub fn new(a: f64, b: f64, n_a: usize, n_b: usize) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || b <= a {
            return domain(format!(
                "binary multiset needs finite a < b, got ({a}, {b})"
            ));
        }
        if n_a == 0 || n_b == 0 {
            return domain("binary multiset needs at least one a and one b");
        }
        Ok(Self { a, b, n_a, n_b })
    }

    pub fn n(&self) -> usize {
        self.n_a + self.n_b
    }

    /// `min(n_a, n_b)`, the diameter of the any-pair chain.
    pub fn n_prime(&self) -> usize {
        self.n_a.min(self.n_b)
    }

    /// Wrong-comparison probability `p = 1 − p_ab`.
    pub fn error_probability(&self, energy: &Energy) -> f64 {
        1.0 - swap_probability(self.b, self.a, energy).expect("finite elements")
    }

    /// The sorted arrangement `a…ab…b`.
    pub fn sorted(&self) -> Sequence {
        let mut v = vec![self.a; self.n_a];
        v.extend(std::iter::repeat_n(self.b, self.n_b));
        Sequence::from_vec_unchecked(v)
    }

    /// Whether `s` is an arrangement of this multiset.
    pub fn matches(&self, s: &Sequence) -> bool {
        let (mut na, mut nb) = (0, 0);
        for &x in s.as_slice() {
            if x.to_bits() == self.a.to_bits() {
                na += 1;
            } else if x.to_bits() == self.b.to_bits() {
                nb += 1;
            } else {
                return false;
            }
        }
        na == self.n_a && nb == self.n_b
    }
}

/// Wrong-comparison probability between `a < b` under `energy`.
pub fn error_probability(a: f64, b: f64, energy: &Energy) -> Result<f64> {
    Ok(1.0 - swap_probability(b, a, energy)?)
}

/// Inverse bridge: the energy at which elements `gap` apart are compared
/// wrongly with probability `p`, `λ = ((1 − p)/p)^{1/(2·gap)}`.
pub fn energy_for_error(p: f64, gap: f64) -> Result<Energy> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("error probability must be in (0, 1), got {p}"));
    }
    if !(gap > 0.0 && gap.is_finite()) {
        return domain(format!("gap must be positive, got {gap}"));
    }
    Energy::new(((1.0 - p) / p).powf(1.0 / (2.0 * gap)))
}

/// Per-`b` inversion counts: `v_i` is the number of `a`s after the `i`-th
/// `b`. Always non-increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Staircase(Vec<usize>);

impl Staircase {
    pub fn new(v: Vec<usize>) -> Result<Self> {
        if v.windows(2).any(|w| w[0] < w[1]) {
            return domain(format!("staircase must be non-increasing, got {v:?}"));
        }
        Ok(Self(v))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for Staircase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for Staircase {
    type Err = Error;

    /// Comma-separated counts, e.g. `2,1,1`.
    fn from_str(s: &str) -> Result<Self> {
        let v = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Config(format!("invalid staircase entry {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Staircase::new(v)
    }
}

pub fn to_staircase(s: &Sequence, spec: &BinarySpec) -> Result<Staircase> {
    if !spec.matches(s) {
        return domain(format!(
            "{s:?} is not an arrangement of the binary multiset"
        ));
    }
    let mut a_after = spec.n_a;
    let mut v = Vec::with_capacity(spec.n_b);
    for &x in s.as_slice() {
        if x.to_bits() == spec.a.to_bits() {
            a_after -= 1;
        } else {
            v.push(a_after);
        }
    }
    Ok(Staircase(v))
}

pub fn from_staircase(v: &Staircase, spec: &BinarySpec) -> Result<Sequence> {
    let v = v.as_slice();
    if v.len() != spec.n_b {
        return domain(format!(
            "staircase has {} entries, expected {}",
            v.len(),
            spec.n_b
        ));
    }
    if v.first().is_some_and(|&x| x > spec.n_a) {
        return domain(format!("staircase entries must be ≤ {}", spec.n_a));
    }
    let mut out = Vec::with_capacity(spec.n());
    let mut prev = spec.n_a;
    for &vi in v {
        out.extend(std::iter::repeat_n(spec.a, prev - vi));
        out.push(spec.b);
        prev = vi;
    }
    out.extend(std::iter::repeat_n(spec.a, prev));
    Ok(Sequence::from_vec_unchecked(out))
}

fn check_p(p: f64, allow_half: bool) -> Result<()> {
    let ok = p > 0.0 && (p < 0.5 || (allow_half && p == 0.5));
    if ok {
        Ok(())
    } else if allow_half {
        domain(format!("error probability must be in (0, 1/2], got {p}"))
    } else {
        domain(format!("error probability must be in (0, 1/2), got {p}"))
    }
}

/// Path-coupling contraction bounds for the any-pair chain on binary input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingBeta {
    /// `1 − 2(1 + p(n−2)) / (n(n−1))`
    pub tight: f64,
    /// `1 − 2p / (n−1)`
    pub loose: f64,
}

pub fn coupling_beta_bound(n: usize, p: f64) -> Result<CouplingBeta> {
    if n < 2 {
        return domain("coupling bound needs n ≥ 2");
    }
    check_p(p, true)?;
    let nf = n as f64;
    Ok(CouplingBeta {
        tight: 1.0 - 2.0 * (1.0 + p * (nf - 2.0)) / (nf * (nf - 1.0)),
        loose: 1.0 - 2.0 * p / (nf - 1.0),
    })
}

/// Upper bound on `t_mix(ε)` of the any-pair chain on binary input:
/// `n (ln n′ − ln ε) / (2p)`.
pub fn mixing_bound_any(n: usize, n_a: usize, n_b: usize, p: f64, eps: f64) -> Result<f64> {
    if n_a == 0 || n_b == 0 || n != n_a + n_b {
        return domain(format!(
            "expected n = n_a + n_b with both ≥ 1, got {n}, {n_a}, {n_b}"
        ));
    }
    check_p(p, true)?;
    if !(eps > 0.0 && eps <= 1.0) {
        return domain(format!("ε must be in (0, 1], got {eps}"));
    }
    let n_prime = n_a.min(n_b) as f64;
    Ok(n as f64 * (n_prime.ln() - eps.ln()) / (2.0 * p))
}

fn outlier_index(n: usize, i: usize) -> Result<()> {
    if n < 2 {
        return domain("one-outlier chains need n ≥ 2");
    }
    if i == 0 || i > n {
        return domain(format!("outlier position must be in 1..={n}, got {i}"));
    }
    Ok(())
}

/// Stationary probability of `b` sitting at position `i` (1-based).
/// `AnyStar` shares the adjacent chain's stationary law.
pub fn outlier_pi(kind: ChainKind, n: usize, p: f64, i: usize) -> Result<f64> {
    outlier_index(n, i)?;
    check_p(p, true)?;
    let (nf, fi) = (n as f64, i as f64);
    Ok(match kind {
        ChainKind::Adj | ChainKind::AnyStar => {
            if p == 0.5 {
                1.0 / nf
            } else {
                // p^{n−i}(1−p)^{i−1}(1−2p) / ((1−p)^n − p^n), divided through by (1−p)^n
                let r = p / (1.0 - p);
                let one_minus_rn = -(nf * r.ln()).exp_m1();
                r.powi((n - i) as i32) * (1.0 - 2.0 * p) / ((1.0 - p) * one_minus_rn)
            }
        }
        ChainKind::Any => {
            let q = 1.0 - p;
            nf * p * q / (((nf - fi + 1.0) * q + (fi - 1.0) * p) * ((nf - fi) * q + fi * p))
        }
    })
}

/// `Σ_i (n − i) · gap · π(s^(i))`.
pub fn expected_weight_generic(kind: ChainKind, n: usize, p: f64, gap: f64) -> Result<f64> {
    let mut total = 0.0;
    for i in 1..=n {
        total += (n - i) as f64 * gap * outlier_pi(kind, n, p, i)?;
    }
    Ok(total)
}

/// Expected total weighted inversion at stationarity, closed forms.
pub fn outlier_expected_weight(kind: ChainKind, n: usize, p: f64, gap: f64) -> Result<f64> {
    outlier_index(n, 1)?;
    check_p(p, true)?;
    if !(gap > 0.0 && gap.is_finite()) {
        return domain(format!("gap must be positive, got {gap}"));
    }
    let nf = n as f64;
    Ok(match kind {
        ChainKind::Adj | ChainKind::AnyStar => {
            if p == 0.5 {
                gap * (nf - 1.0) / 2.0
            } else {
                let r = p / (1.0 - p);
                let one_minus_rn = -(nf * r.ln()).exp_m1();
                // p^{n−1} / ((1−p)^n − p^n) = r^{n−1} / ((1−p)(1 − r^n))
                let tail = r.powi(n as i32 - 1) / ((1.0 - p) * one_minus_rn);
                nf * gap * p * (1.0 / (nf * (1.0 - 2.0 * p)) - tail)
            }
        }
        ChainKind::Any => {
            let q = 1.0 - p;
            let sum: f64 = (0..n)
                .map(|i| {
                    let fi = i as f64;
                    fi * q / (((fi + 1.0) * q + (nf - fi - 1.0) * p) * (fi * q + (nf - fi) * p))
                })
                .sum();
            nf * gap * p * sum
        }
    })
}

/// The four one-outlier comparison bounds evaluated at `(n, p, gap)`.
///
/// Each `*_margin` is the signed slack of the strict inequality, positive
/// when it holds. The adjacent-chain margins are of order `(p/(1−p))^n`
/// and are evaluated from their own closed forms rather than by
/// subtracting two nearly equal numbers; since they underflow for large
/// `n`, their signs are decided from the natural logarithms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutlierBounds {
    pub pi_adj_sorted: f64,
    /// `(1 − 2p)/(1 − p)`, a strict lower bound
    pub pi_adj_lower: f64,
    pub pi_adj_margin: f64,
    pub pi_adj_ln_margin: f64,
    pub pi_adj_ok: bool,
    pub pi_any_sorted: f64,
    /// `(1 − p)/(n p)`, a strict upper bound
    pub pi_any_upper: f64,
    pub pi_any_margin: f64,
    pub pi_any_ok: bool,
    pub ew_adj: f64,
    /// `gap · p/(1 − 2p)`, a strict upper bound
    pub ew_adj_upper: f64,
    pub ew_adj_margin: f64,
    pub ew_adj_ln_margin: f64,
    pub ew_adj_ok: bool,
    pub ew_any: f64,
    /// `n · gap · p`, claimed as a lower bound; only holds for large enough n
    pub ew_any_lower: f64,
    pub ew_any_margin: f64,
    pub ew_any_ok: bool,
}

pub fn outlier_bounds(n: usize, p: f64, gap: f64) -> Result<OutlierBounds> {
    check_p(p, false)?;
    let nf = n as f64;
    let pi_adj_sorted = outlier_pi(ChainKind::Adj, n, p, n)?;
    let pi_any_sorted = outlier_pi(ChainKind::Any, n, p, n)?;
    let ew_adj = outlier_expected_weight(ChainKind::Adj, n, p, gap)?;
    let ew_any = outlier_expected_weight(ChainKind::Any, n, p, gap)?;
    let pi_adj_lower = (1.0 - 2.0 * p) / (1.0 - p);
    let pi_any_upper = (1.0 - p) / (nf * p);
    let ew_adj_upper = gap * p / (1.0 - 2.0 * p);
    let ew_any_lower = nf * gap * p;

    let ln_r = (p / (1.0 - p)).ln();
    let ln_one_minus_rn = (-(nf * ln_r).exp_m1()).ln();
    // π_adj(sorted) − lower = lower · rⁿ/(1 − rⁿ)
    let pi_adj_ln_margin = pi_adj_lower.ln() + nf * ln_r - ln_one_minus_rn;
    // upper − E^w_adj = n·gap·p · r^{n−1}/((1−p)(1 − rⁿ))
    let ew_adj_ln_margin =
        (nf * gap * p).ln() + (nf - 1.0) * ln_r - (1.0 - p).ln() - ln_one_minus_rn;
    let pi_any_margin = pi_any_upper - pi_any_sorted;
    let ew_any_margin = ew_any - ew_any_lower;
    Ok(OutlierBounds {
        pi_adj_sorted,
        pi_adj_lower,
        pi_adj_margin: pi_adj_ln_margin.exp(),
        pi_adj_ln_margin,
        pi_adj_ok: pi_adj_ln_margin > f64::NEG_INFINITY,
        pi_any_sorted,
        pi_any_upper,
        pi_any_margin,
        pi_any_ok: pi_any_margin > 0.0,
        ew_adj,
        ew_adj_upper,
        ew_adj_margin: ew_adj_ln_margin.exp(),
        ew_adj_ln_margin,
        ew_adj_ok: ew_adj_ln_margin > f64::NEG_INFINITY,
        ew_any,
        ew_any_lower,
        ew_any_margin,
        ew_any_ok: ew_any_margin > 0.0,
    })
}
