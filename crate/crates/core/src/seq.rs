//! Sequences, the probabilistic comparator and the total weighted inversion.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use rand::Rng;

use crate::error::{domain, Error, Result};

/// Comparator accuracy. Holds both `λ` and `ln λ` so that energies built
/// from a noise level keep `ln λ = 1/ν` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Energy {
    lambda: f64,
    ln_lambda: f64,
    noise: Option<f64>,
}

impl Energy {
    pub fn new(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return domain(format!("lambda must be finite and > 0, got {lambda}"));
        }
        Ok(Self {
            lambda,
            ln_lambda: lambda.ln(),
            noise: None,
        })
    }

    /// `λ = e^{1/ν}`.
    pub fn from_noise(noise: f64) -> Result<Self> {
        if !noise.is_finite() || noise <= 0.0 {
            return domain(format!("noise must be finite and > 0, got {noise}"));
        }
        let ln_lambda = 1.0 / noise;
        let lambda = ln_lambda.exp();
        if !lambda.is_finite() {
            return domain(format!("noise {noise} gives an infinite lambda"));
        }
        Ok(Self {
            lambda,
            ln_lambda,
            noise: Some(noise),
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn ln_lambda(&self) -> f64 {
        self.ln_lambda
    }

    pub fn noise(&self) -> Option<f64> {
        self.noise
    }

    /// True when every comparison is a fair coin.
    pub fn is_uniform(&self) -> bool {
        self.ln_lambda == 0.0
    }

    /// Probability of swapping `a` (earlier position) with `b` (later
    /// position). Inputs are assumed finite.
    #[inline]
    pub(crate) fn accept(&self, a: f64, b: f64) -> f64 {
        if self.ln_lambda == 0.0 {
            return 0.5;
        }
        let z = 2.0 * (b - a) * self.ln_lambda;
        if z >= 0.0 {
            1.0 / (1.0 + z.exp())
        } else {
            // mirror of the branch above so that accept(a,b) + accept(b,a) == 1
            1.0 - 1.0 / (1.0 + (-z).exp())
        }
    }
}

/// Probability that a comparison of `a` (at the earlier position) with `b`
/// (at the later position) results in a swap:
/// `λ^{a−b} / (λ^{a−b} + λ^{b−a})`, evaluated in logistic form.
pub fn swap_probability(a: f64, b: f64, energy: &Energy) -> Result<f64> {
    if !a.is_finite() || !b.is_finite() {
        return domain(format!("elements must be finite, got ({a}, {b})"));
    }
    Ok(energy.accept(a, b))
}

/// One Bernoulli draw of the comparator. `true` means "swap".
pub fn sample_comparison<R: Rng + ?Sized>(a: f64, b: f64, energy: &Energy, rng: &mut R) -> bool {
    rng.gen::<f64>() < energy.accept(a, b)
}

/// An arrangement of real-valued elements. Equality, hashing and ordering
/// are by bit pattern / total order, so states compare exactly.
#[derive(Clone)]
pub struct Sequence(Vec<f64>);

impl Sequence {
    pub fn new(elems: Vec<f64>) -> Result<Self> {
        if elems.is_empty() {
            return domain("sequence must contain at least one element");
        }
        if let Some(x) = elems.iter().find(|x| !x.is_finite()) {
            return domain(format!("sequence elements must be finite, got {x}"));
        }
        // -0.0 and 0.0 are the same element
        let elems = elems
            .into_iter()
            .map(|x| if x == 0.0 { 0.0 } else { x })
            .collect();
        Ok(Self(elems))
    }

    pub(crate) fn from_vec_unchecked(elems: Vec<f64>) -> Self {
        Self(elems)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Non-decreasing?
    pub fn is_sorted(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }

    /// Swap two positions (0-based).
    pub fn swap(&mut self, i: usize, j: usize) {
        self.0.swap(i, j);
    }

    pub fn swapped(&self, i: usize, j: usize) -> Self {
        let mut t = self.clone();
        t.swap(i, j);
        t
    }

    /// True when `other` is a rearrangement of the same multiset.
    pub fn same_multiset(&self, other: &Sequence) -> bool {
        self.len() == other.len() && sorted_of(self) == sorted_of(other)
    }

    /// Elements joined by `sep`, using the shortest round-trip formatting.
    pub fn join(&self, sep: &str) -> String {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        parts.join(sep)
    }
}

impl PartialEq for Sequence {
    fn eq(&self, other: &Self) -> bool {
        self.0.len() == other.0.len()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

impl Eq for Sequence {}

impl Hash for Sequence {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.len().hash(state);
        for x in &self.0 {
            x.to_bits().hash(state);
        }
    }
}

impl Ord for Sequence {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl PartialOrd for Sequence {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.join(","))
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.join(","))
    }
}

impl FromStr for Sequence {
    type Err = Error;

    /// Comma-separated list of integer or decimal literals, e.g. `5,2,3`.
    fn from_str(s: &str) -> Result<Self> {
        let elems = s
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                tok.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::Config(format!("invalid element {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Sequence::new(elems)
    }
}

impl TryFrom<Vec<f64>> for Sequence {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Sequence::new(v)
    }
}

/// Total weighted inversion: `Σ_{i<j, s_i > s_j} (s_i − s_j)`.
pub fn weighted_inversion(s: &Sequence) -> f64 {
    weighted_inversion_of(s.as_slice())
}

pub(crate) fn weighted_inversion_of(s: &[f64]) -> f64 {
    let mut total = 0.0;
    for (i, &x) in s.iter().enumerate() {
        for &y in &s[i + 1..] {
            if x > y {
                total += x - y;
            }
        }
    }
    total
}

/// The same quantity via displacements: `Σ_i (s^{sort}_i − s_i) · i`,
/// with 1-based positions.
pub fn displacement_inversion(s: &Sequence) -> f64 {
    let sorted = sorted_of(s);
    sorted
        .as_slice()
        .iter()
        .zip(s.as_slice())
        .enumerate()
        .map(|(i, (sorted_i, s_i))| (sorted_i - s_i) * (i + 1) as f64)
        .sum()
}

/// Non-decreasing rearrangement.
pub fn sorted_of(s: &Sequence) -> Sequence {
    let mut v = s.0.clone();
    v.sort_by(f64::total_cmp);
    Sequence(v)
}
