//! Exact-distribution, mixing and one-outlier exports.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::closedform::{
    error_probability, mixing_bound_any, outlier_bounds, outlier_expected_weight, outlier_pi,
    BinarySpec, OutlierBounds,
};
use crate::error::{Error, Result};
use crate::exact::{
    build_matrix, gibbs_distribution, stationary_solve, stationary_tree, Distribution,
    TransitionMatrix,
};
use crate::kernels::ChainKind;
use crate::mixing::mixing_time_of;
use crate::seq::{weighted_inversion, Energy, Sequence};

use super::io::{create_dir, write_csv, write_json};

/// How `cmd_exact` obtains the stationary distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactMethod {
    /// Linear solve of `πP = π`.
    Solve,
    /// Markov chain tree theorem.
    Tree,
    /// The closed-form law `π ∝ λ^{−2w}`, independent of the chain kind.
    Gibbs,
}

impl ExactMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExactMethod::Solve => "solve",
            ExactMethod::Tree => "tree",
            ExactMethod::Gibbs => "gibbs",
        }
    }
}

impl fmt::Display for ExactMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExactMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "solve" => Ok(ExactMethod::Solve),
            "tree" => Ok(ExactMethod::Tree),
            "gibbs" => Ok(ExactMethod::Gibbs),
            other => Err(Error::Config(format!(
                "unknown method {other:?}, expected solve, tree or gibbs"
            ))),
        }
    }
}

/// Exact stationary distribution together with its transition matrix.
#[derive(Debug, Clone)]
pub struct ExactResult {
    pub matrix: TransitionMatrix,
    pub pi: Distribution,
}

impl ExactResult {
    /// `(state_index, sequence, w, pi)` rows in state order.
    pub fn rows(&self) -> impl Iterator<Item = (usize, &Sequence, f64, f64)> + '_ {
        self.matrix
            .space()
            .states()
            .iter()
            .enumerate()
            .map(|(k, s)| (k, s, weighted_inversion(s), self.pi.get(k)))
    }
}

pub fn exact_distribution(
    multiset: &Sequence,
    kind: ChainKind,
    energy: &Energy,
    method: ExactMethod,
    cap: usize,
) -> Result<ExactResult> {
    let matrix = build_matrix(kind, multiset, energy, cap)?;
    let pi = match method {
        ExactMethod::Solve => stationary_solve(&matrix)?,
        ExactMethod::Tree => stationary_tree(&matrix)?,
        ExactMethod::Gibbs => gibbs_distribution(matrix.space(), energy),
    };
    Ok(ExactResult { matrix, pi })
}

/// Computes the distribution and writes `dist.csv` into `out_dir`.
pub fn cmd_exact(
    multiset: &Sequence,
    kind: ChainKind,
    energy: &Energy,
    method: ExactMethod,
    cap: usize,
    out_dir: &Path,
) -> Result<ExactResult> {
    let result = exact_distribution(multiset, kind, energy, method, cap)?;
    create_dir(out_dir)?;
    write_csv(
        &out_dir.join("dist.csv"),
        &["state_index", "sequence", "w", "pi"],
        result
            .rows()
            .map(|(k, s, w, pi)| vec![k.to_string(), s.join(";"), w.to_string(), pi.to_string()]),
    )?;
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingReport {
    pub kind: ChainKind,
    pub states: usize,
    pub eps: f64,
    pub t_mix: usize,
    /// Coupling bound, present for the any-pair chain on binary input with
    /// `λ ≥ 1`.
    pub bound: Option<f64>,
}

/// Splits a multiset with exactly two distinct values into a [`BinarySpec`].
pub fn binary_spec_of(multiset: &Sequence) -> Option<BinarySpec> {
    let v = multiset.as_slice();
    let a = v.iter().copied().fold(f64::INFINITY, f64::min);
    let b = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let n_a = v.iter().filter(|&&x| x == a).count();
    let n_b = v.iter().filter(|&&x| x == b).count();
    if a < b && n_a + n_b == v.len() {
        BinarySpec::new(a, b, n_a, n_b).ok()
    } else {
        None
    }
}

pub fn mixing_report(
    multiset: &Sequence,
    kind: ChainKind,
    energy: &Energy,
    eps: f64,
    cap: usize,
) -> Result<MixingReport> {
    let matrix = build_matrix(kind, multiset, energy, cap)?;
    let t_mix = mixing_time_of(&matrix, eps)?;
    let bound = match (kind, binary_spec_of(multiset)) {
        (ChainKind::Any, Some(spec)) => {
            let p = spec.error_probability(energy);
            if p > 0.0 && p <= 0.5 {
                Some(mixing_bound_any(spec.n(), spec.n_a, spec.n_b, p, eps)?)
            } else {
                None
            }
        }
        _ => None,
    };
    Ok(MixingReport {
        kind,
        states: matrix.dim(),
        eps,
        t_mix,
        bound,
    })
}

/// Measures `t_mix(ε)` and writes `mixing.json` into `out_dir`.
pub fn cmd_mixing(
    multiset: &Sequence,
    kind: ChainKind,
    energy: &Energy,
    eps: f64,
    cap: usize,
    out_dir: &Path,
) -> Result<MixingReport> {
    let report = mixing_report(multiset, kind, energy, eps, cap)?;
    create_dir(out_dir)?;
    write_json(&out_dir.join("mixing.json"), &report)?;
    Ok(report)
}

/// One-outlier summary for `n − 1` ones and a single two.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutlierReport {
    pub n: usize,
    pub p: f64,
    pub gap: f64,
    /// `π(b at position i)` for `i = 1..=n` under the adjacent chain.
    pub pi_adj: Vec<f64>,
    pub pi_any: Vec<f64>,
    pub ew_adj: f64,
    pub ew_any: f64,
    /// Absent when `p = 1/2`, where the strict bounds degenerate.
    pub bounds: Option<OutlierBounds>,
}

pub fn outlier_report(n: usize, energy: &Energy) -> Result<OutlierReport> {
    let gap = 1.0;
    let p = error_probability(1.0, 2.0, energy)?;
    let pi = |kind| {
        (1..=n)
            .map(|i| outlier_pi(kind, n, p, i))
            .collect::<Result<Vec<_>>>()
    };
    let bounds = if p < 0.5 {
        Some(outlier_bounds(n, p, gap)?)
    } else {
        None
    };
    Ok(OutlierReport {
        n,
        p,
        gap,
        pi_adj: pi(ChainKind::Adj)?,
        pi_any: pi(ChainKind::Any)?,
        ew_adj: outlier_expected_weight(ChainKind::Adj, n, p, gap)?,
        ew_any: outlier_expected_weight(ChainKind::Any, n, p, gap)?,
        bounds,
    })
}

/// Writes `outlier.csv` (`i,pi_adj,pi_any`) and `outlier.json`.
pub fn cmd_outlier(n: usize, energy: &Energy, out_dir: &Path) -> Result<OutlierReport> {
    let report = outlier_report(n, energy)?;
    create_dir(out_dir)?;
    write_csv(
        &out_dir.join("outlier.csv"),
        &["i", "pi_adj", "pi_any"],
        (0..n).map(|k| {
            vec![
                (k + 1).to_string(),
                report.pi_adj[k].to_string(),
                report.pi_any[k].to_string(),
            ]
        }),
    )?;
    write_json(&out_dir.join("outlier.json"), &report)?;
    Ok(report)
}
