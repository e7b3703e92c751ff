//! Declarative sweeps over the exact, closed-form and mixing checks.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::closedform::{
    coupling_beta_bound, energy_for_error, expected_weight_generic, mixing_bound_any,
    outlier_bounds, outlier_expected_weight, outlier_pi, BinarySpec,
};
use crate::error::{Error, Result};
use crate::exact::{
    build_matrix, detailed_balance_residual, gibbs_distribution, kolmogorov_cycle_ratio,
    stationary_solve, stationary_tree, verify_adj_better, verify_ratio_lemma, Distribution,
    TransitionMatrix, DEFAULT_STATE_CAP, TREE_MAX_ABS_LN_LAMBDA, TREE_STATE_LIMIT,
};
use crate::kernels::ChainKind;
use crate::mixing::{
    coupled_joint_table, distances_from, expected_coupled_distance, joint_marginals,
    mixing_time_of, tv_slices, CoupledPair,
};
use crate::seq::{Energy, Sequence};

use super::io::{create_dir, write_json};

const TV_TOL: f64 = 1e-10;
const TREE_TV_TOL: f64 = 1e-8;
const DB_TOL: f64 = 1e-10;
const NON_REVERSIBLE_MIN: f64 = 1e-6;
const CYCLE_TOL: f64 = 1e-12;
const OUTLIER_TOL: f64 = 1e-10;
const COUPLING_TOL: f64 = 1e-12;
const MIXING_EPS: f64 = 0.25;
/// Sizes from which the lower bound on the any-pair expected weight is
/// treated as a requirement rather than informational.
const EW_ANY_MIN_N: usize = 30;
const EW_ANY_MAX_P: f64 = 0.25;

/// Grids for [`run_verify`]. Missing fields take the defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// Sorted triples `a ≤ b ≤ c`, not all equal.
    pub triples: Vec<[f64; 3]>,
    /// Energies for the triple checks; must be positive and ≠ 1.
    pub lambdas: Vec<f64>,
    /// Lengths for the one-outlier checks.
    pub outlier_ns: Vec<usize>,
    /// Error probabilities in `(0, 1/2]` for the outlier and binary checks.
    pub ps: Vec<f64>,
    /// `[n_a, n_b]` pairs for the binary coupling and mixing checks.
    pub binary_sizes: Vec<[usize; 2]>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        let mut triples = Vec::new();
        for a in 0..=4 {
            for b in a..=4 {
                for c in b..=4 {
                    if a != c {
                        triples.push([a as f64, b as f64, c as f64]);
                    }
                }
            }
        }
        let e = std::f64::consts::E;
        Self {
            triples,
            lambdas: vec![1.1, e, e * e],
            outlier_ns: (2..=8).chain([30, 50, 100]).collect(),
            ps: vec![0.05, 0.1, 0.25, 0.4],
            binary_sizes: vec![
                [1, 1],
                [1, 2],
                [2, 2],
                [1, 3],
                [2, 3],
                [3, 3],
                [2, 4],
                [4, 4],
            ],
        }
    }
}

impl VerifyConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        for &[a, b, c] in &self.triples {
            if !(a.is_finite() && b.is_finite() && c.is_finite()) || !(a <= b && b <= c) || a == c {
                return bad(format!(
                    "triple ({a}, {b}, {c}) must be finite with a ≤ b ≤ c, not all equal"
                ));
            }
        }
        for &l in &self.lambdas {
            if !(l.is_finite() && l > 0.0) {
                return bad(format!("λ must be positive and finite, got {l}"));
            }
            if l == 1.0 {
                return bad(
                    "λ = 1 is the equality case: both chains are uniform and the strict \
                     comparisons cannot hold; remove it from `lambdas`"
                        .to_string(),
                );
            }
        }
        for &n in &self.outlier_ns {
            if !(2..=10_000).contains(&n) {
                return bad(format!("outlier n must be in 2..=10000, got {n}"));
            }
        }
        for &p in &self.ps {
            if !(p > 0.0 && p <= 0.5) {
                return bad(format!("p must be in (0, 1/2], got {p}"));
            }
        }
        for &[na, nb] in &self.binary_sizes {
            if na == 0 || nb == 0 || na + nb > 12 {
                return bad(format!(
                    "binary size [{na}, {nb}] needs both ≥ 1 and n ≤ 12"
                ));
            }
        }
        Ok(())
    }
}

/// One line of the report. `margin ≥ 0` means the check passed with room.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub params: Value,
    pub margin: f64,
    pub pass: bool,
    pub required: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    fn push(&mut self, check: &str, params: Value, margin: f64, pass: bool, required: bool) {
        self.checks.push(CheckResult {
            check: check.to_string(),
            params,
            margin,
            pass,
            required,
        });
    }

    /// Adds a check that passes iff `margin ≥ 0`.
    fn push_margin(&mut self, check: &str, params: Value, margin: f64, required: bool) {
        self.push(check, params, margin, margin >= 0.0, required);
    }

    pub fn failed_required(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.required && !c.pass)
    }

    pub fn all_required_pass(&self) -> bool {
        self.failed_required().next().is_none()
    }
}

fn build(kind: ChainKind, ms: &Sequence, e: &Energy) -> Result<TransitionMatrix> {
    build_matrix(kind, ms, e, DEFAULT_STATE_CAP)
}

/// `max |π_s P_st − π_t P_ts| / max(π_s P_st, π_t P_ts)` over edges with
/// flow; unlike the absolute residual it does not shrink with `π`.
fn relative_balance_residual(m: &TransitionMatrix, pi: &Distribution) -> f64 {
    let n = m.dim();
    let mut worst = 0.0f64;
    for s in 0..n {
        for t in s + 1..n {
            let f = pi.get(s) * m.get(s, t);
            let g = pi.get(t) * m.get(t, s);
            let top = f.max(g);
            if top > 0.0 {
                worst = worst.max((f - g).abs() / top);
            }
        }
    }
    worst
}

fn triple_checks(report: &mut VerifyReport, t: [f64; 3], lambda: f64) -> Result<()> {
    let e = Energy::new(lambda)?;
    let ms = Sequence::new(t.to_vec())?;
    let params = json!({ "triple": t, "lambda": lambda });
    let mats = ChainKind::ALL
        .iter()
        .map(|&k| build(k, &ms, &e))
        .collect::<Result<Vec<_>>>()?;
    let pis = mats
        .iter()
        .map(stationary_solve)
        .collect::<Result<Vec<_>>>()?;
    let gibbs = gibbs_distribution(mats[0].space(), &e);

    for (m, pi) in mats.iter().zip(&pis) {
        let kind = m.kind();
        let p = json!({ "triple": t, "lambda": lambda, "chain": kind });
        if kind != ChainKind::Any {
            let tv = tv_slices(pi.as_slice(), gibbs.as_slice())?;
            report.push_margin("gibbs_law", p.clone(), TV_TOL - tv, true);
            let r = detailed_balance_residual(m, pi);
            report.push_margin("detailed_balance", p.clone(), DB_TOL - r, true);
        }
        let tree_ok =
            m.dim() <= TREE_STATE_LIMIT && e.ln_lambda().abs() <= TREE_MAX_ABS_LN_LAMBDA + 1e-9;
        if tree_ok {
            let tree = stationary_tree(m)?;
            let tv = tv_slices(tree.as_slice(), pi.as_slice())?;
            report.push_margin("tree_vs_solve", p, TREE_TV_TOL - tv, true);
        }
    }

    let [a, b, c] = t;
    if a < b && b < c {
        let any = &mats[1];
        let r = relative_balance_residual(any, &pis[1]);
        report.push_margin(
            "any_not_reversible",
            params.clone(),
            r - NON_REVERSIBLE_MIN,
            true,
        );

        // abc → bac → bca → cba in lexicographic state indices
        let sp = any.space();
        let idx = |v: [f64; 3]| {
            sp.index_of(&Sequence::new(v.to_vec()).expect("finite"))
                .expect("state")
        };
        let cycle = [
            idx([a, b, c]),
            idx([b, a, c]),
            idx([b, c, a]),
            idx([c, b, a]),
        ];
        let ratio = kolmogorov_cycle_ratio(any, &cycle)?;
        let expected = 2.0 * (a - c) * e.ln_lambda();
        let err = (ratio.ln() - expected).abs();
        report.push_margin(
            "kolmogorov_cycle",
            json!({ "triple": t, "lambda": lambda, "ratio": ratio, "expected": expected.exp() }),
            CYCLE_TOL * expected.abs().max(1.0) - err,
            true,
        );
    }

    let better = verify_adj_better(a, b, c, &e)?;
    report.push(
        "adj_better",
        json!({ "triple": t, "lambda": lambda, "pi_adj": better.pi_adj, "pi_any": better.pi_any }),
        better.margin(),
        better.holds,
        true,
    );

    if e.ln_lambda().abs() <= TREE_MAX_ABS_LN_LAMBDA + 1e-9 {
        let checks = verify_ratio_lemma(&ms, &e)?;
        if let Some(worst) = checks
            .iter()
            .min_by(|x, y| x.margin().total_cmp(&y.margin()))
        {
            report.push(
                "ratio_lemma",
                json!({ "triple": t, "lambda": lambda, "pairs": checks.len(),
                        "worst_s": worst.s, "worst_s_prime": worst.s_prime }),
                worst.margin(),
                checks.iter().all(|c| c.holds),
                true,
            );
        }
    }
    Ok(())
}

fn outlier_checks(report: &mut VerifyReport, n: usize, p: f64) -> Result<()> {
    let gap = 1.0;
    let e = energy_for_error(p, gap)?;
    let mut v = vec![1.0; n - 1];
    v.push(2.0);
    let ms = Sequence::new(v)?;
    for kind in ChainKind::ALL {
        let m = build(kind, &ms, &e)?;
        let pi = stationary_solve(&m)?;
        let mut worst = 0.0f64;
        for (k, s) in m.space().states().iter().enumerate() {
            let pos = s
                .as_slice()
                .iter()
                .position(|&x| x == 2.0)
                .expect("outlier")
                + 1;
            worst = worst.max((outlier_pi(kind, n, p, pos)? - pi.get(k)).abs());
        }
        report.push_margin(
            "outlier_pi",
            json!({ "n": n, "p": p, "chain": kind }),
            OUTLIER_TOL - worst,
            true,
        );
    }
    for kind in [ChainKind::Adj, ChainKind::Any] {
        let closed = outlier_expected_weight(kind, n, p, gap)?;
        let generic = expected_weight_generic(kind, n, p, gap)?;
        let rel = (closed - generic).abs() / generic.abs().max(f64::MIN_POSITIVE);
        report.push_margin(
            "outlier_ew_closed_form",
            json!({ "n": n, "p": p, "chain": kind, "closed": closed, "generic": generic }),
            OUTLIER_TOL - rel,
            true,
        );
    }
    if p < 0.5 {
        let b = outlier_bounds(n, p, gap)?;
        let params = json!({ "n": n, "p": p });
        report.push(
            "pi_adj_sorted_lower",
            params.clone(),
            b.pi_adj_margin,
            b.pi_adj_ok,
            true,
        );
        report.push(
            "pi_any_sorted_upper",
            params.clone(),
            b.pi_any_margin,
            b.pi_any_ok,
            true,
        );
        report.push(
            "ew_adj_upper",
            params.clone(),
            b.ew_adj_margin,
            b.ew_adj_ok,
            true,
        );
        let required = n >= EW_ANY_MIN_N && p <= EW_ANY_MAX_P;
        let name = if required || b.ew_any_ok {
            "ew_any_lower"
        } else {
            "ew_any_lower (informational: bound not met)"
        };
        report.push(name, params, b.ew_any_margin, b.ew_any_ok, required);
    }
    Ok(())
}

fn binary_checks(report: &mut VerifyReport, n_a: usize, n_b: usize, p: f64) -> Result<()> {
    let spec = BinarySpec::new(1.0, 2.0, n_a, n_b)?;
    let n = spec.n();
    let e = energy_for_error(p, 1.0)?;
    let m = build(ChainKind::Any, &spec.sorted(), &e)?;
    let space = m.space();
    let params = json!({ "n_a": n_a, "n_b": n_b, "p": p });

    if n >= 2 {
        let beta = coupling_beta_bound(n, p)?.tight;
        let (mut worst_marginal, mut worst_contraction) = (0.0f64, f64::INFINITY);
        for x in space.states() {
            let v = x.as_slice();
            for i in 0..n {
                for j in i + 1..n {
                    if v[i] == v[j] {
                        continue;
                    }
                    let pair = CoupledPair::new(x.clone(), i, j)?;
                    let table = coupled_joint_table(&pair, &spec, &e)?;
                    let (mx, my) = joint_marginals(&table);
                    for (state, marg) in [(&pair.x, mx), (&pair.y, my)] {
                        let from = space.index_of(state).expect("state");
                        let mut dense = vec![0.0; space.len()];
                        for (t, q) in marg {
                            dense[space.index_of(&t).expect("state")] += q;
                        }
                        for (to, q) in dense.iter().enumerate() {
                            worst_marginal = worst_marginal.max((q - m.get(from, to)).abs());
                        }
                    }
                    let d = expected_coupled_distance(&table, space)?;
                    worst_contraction = worst_contraction.min(beta - d);
                }
            }
        }
        report.push_margin(
            "coupling_marginals",
            params.clone(),
            COUPLING_TOL - worst_marginal,
            true,
        );
        report.push_margin(
            "coupling_contraction",
            params.clone(),
            worst_contraction + COUPLING_TOL,
            true,
        );
    }

    let diameter = (0..space.len())
        .flat_map(|s| distances_from(ChainKind::Any, space, s))
        .map(|d| d.expect("connected"))
        .max()
        .unwrap_or(0);
    report.push(
        "any_diameter",
        json!({ "n_a": n_a, "n_b": n_b, "diameter": diameter }),
        0.0,
        diameter == spec.n_prime(),
        true,
    );

    let t_mix = mixing_time_of(&m, MIXING_EPS)?;
    let bound = mixing_bound_any(n, n_a, n_b, p, MIXING_EPS)?;
    report.push_margin(
        "mixing_bound_any",
        json!({ "n_a": n_a, "n_b": n_b, "p": p, "eps": MIXING_EPS, "t_mix": t_mix, "bound": bound }),
        bound - t_mix as f64,
        true,
    );
    Ok(())
}

/// Runs every check declared by `config`.
pub fn run_verify(config: &VerifyConfig) -> Result<VerifyReport> {
    config.validate()?;
    let mut report = VerifyReport::default();
    for &lambda in &config.lambdas {
        for &t in &config.triples {
            triple_checks(&mut report, t, lambda)?;
        }
    }
    for &n in &config.outlier_ns {
        for &p in &config.ps {
            outlier_checks(&mut report, n, p)?;
        }
    }
    for &[n_a, n_b] in &config.binary_sizes {
        for &p in &config.ps {
            binary_checks(&mut report, n_a, n_b, p)?;
        }
    }
    Ok(report)
}

/// Runs the sweep and writes `verify.json` into `out_dir`.
pub fn cmd_verify(config: &VerifyConfig, out_dir: &Path) -> Result<VerifyReport> {
    let report = run_verify(config)?;
    create_dir(out_dir)?;
    write_json(&out_dir.join("verify.json"), &report)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_shape() {
        let c = VerifyConfig::default();
        assert_eq!(c.triples.len(), 30);
        c.validate().unwrap();
    }

    #[test]
    fn json_defaults_and_rejections() {
        let c = VerifyConfig::from_json(r#"{"lambdas": [2.0]}"#).unwrap();
        assert_eq!(c.lambdas, vec![2.0]);
        assert_eq!(c.ps, VerifyConfig::default().ps);
        let err = VerifyConfig::from_json(r#"{"lambdas": [1.0]}"#).unwrap_err();
        assert!(err.to_string().contains("λ = 1"));
        assert!(VerifyConfig::from_json(r#"{"triples": [[3, 2, 1]]}"#).is_err());
        assert!(VerifyConfig::from_json(r#"{"bogus": 1}"#).is_err());
        assert!(VerifyConfig::from_json("[").is_err());
    }

    #[test]
    fn small_outlier_bound_is_informational() {
        let c = VerifyConfig {
            triples: vec![],
            lambdas: vec![],
            outlier_ns: vec![3],
            ps: vec![0.25],
            binary_sizes: vec![],
        };
        let r = run_verify(&c).unwrap();
        let ew = r
            .checks
            .iter()
            .find(|c| c.check.starts_with("ew_any_lower"))
            .unwrap();
        assert!(!ew.pass && !ew.required);
        assert!(ew.check.contains("informational"));
        assert!(r.all_required_pass());
    }

    #[test]
    fn small_sweep_passes() {
        let c = VerifyConfig {
            triples: vec![[1.0, 2.0, 3.0], [0.0, 0.0, 1.0]],
            lambdas: vec![2.0],
            outlier_ns: vec![4],
            ps: vec![0.1, 0.5],
            binary_sizes: vec![[2, 2]],
        };
        let r = run_verify(&c).unwrap();
        let failed: Vec<_> = r.failed_required().collect();
        assert!(failed.is_empty(), "{failed:?}");
        assert!(r.checks.iter().any(|c| c.check == "kolmogorov_cycle"));
    }

    #[test]
    fn inverted_energy_fails_adj_better() {
        let c = VerifyConfig {
            triples: vec![[1.0, 2.0, 3.0]],
            lambdas: vec![0.7],
            outlier_ns: vec![],
            ps: vec![],
            binary_sizes: vec![],
        };
        let r = run_verify(&c).unwrap();
        assert!(!r.all_required_pass());
    }
}
