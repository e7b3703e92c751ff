//! Stationary distributions: linear solve, Gibbs closed form, and the
//! Markov chain tree theorem (Laplacian minors and brute-force
//! arborescence enumeration).

use crate::error::{domain, Error, Result};
use crate::exact::linalg::lu_solve;
use crate::exact::matrix::{Distribution, Stochastic, TransitionMatrix};
use crate::exact::space::StateSpace;
use crate::seq::{weighted_inversion, Energy};

/// Largest space accepted by the tree-theorem route.
pub const TREE_STATE_LIMIT: usize = 200;
/// Largest space accepted by brute-force arborescence enumeration.
pub const BRUTEFORCE_STATE_LIMIT: usize = 8;
/// Tree-theorem route is limited to `|ln λ| ≤` this value.
pub const TREE_MAX_ABS_LN_LAMBDA: f64 = 5.0;

const STATIONARY_RESIDUAL_TOL: f64 = 1e-10;

/// Solves `π P = π`, `Σ π = 1` with the last balance equation replaced by
/// the normalization.
pub fn stationary_solve(p: &impl AsRef<Stochastic>) -> Result<Distribution> {
    let p = p.as_ref();
    let n = p.dim();
    // row r of the system is column r of (P − I)
    let mut a = vec![0.0; n * n];
    for from in 0..n {
        for to in 0..n {
            let v = p.get(from, to) - if from == to { 1.0 } else { 0.0 };
            a[to * n + from] = v;
        }
    }
    for k in 0..n {
        a[(n - 1) * n + k] = 1.0;
    }
    let mut b = vec![0.0; n];
    b[n - 1] = 1.0;
    let pi = lu_solve(a, n, b)?;

    let residual = p
        .apply_left(&pi)
        .iter()
        .zip(&pi)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    if residual.is_nan() || residual > STATIONARY_RESIDUAL_TOL {
        return Err(Error::Numeric {
            what: "stationary residual ‖πP − π‖∞ above tolerance",
            residual,
        });
    }
    Distribution::new(pi)
}

/// `π(s) ∝ λ^{−2 w(s)}`, normalized by log-sum-exp.
pub fn gibbs_distribution(space: &StateSpace, energy: &Energy) -> Distribution {
    let logw: Vec<f64> = space
        .states()
        .iter()
        .map(|s| -2.0 * weighted_inversion(s) * energy.ln_lambda())
        .collect();
    Distribution::new(normalize_log(&logw)).expect("softmax is a distribution")
}

fn normalize_log(logw: &[f64]) -> Vec<f64> {
    let max = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_z = max + logw.iter().map(|l| (l - max).exp()).sum::<f64>().ln();
    logw.iter().map(|l| (l - log_z).exp()).collect()
}

/// `ln W(root)`: log of the total weight of spanning in-arborescences
/// rooted at `root`, i.e. the log-determinant of the transition-graph
/// Laplacian with row and column `root` removed.
///
/// The minor is reduced by Schur complements in which every pivot is
/// recomputed as the sum of the remaining off-diagonal weights of its row
/// (root column included), so no subtraction ever happens. `-∞` means no
/// arborescence exists.
pub fn log_arborescence_weight(p: &impl AsRef<Stochastic>, root: usize) -> f64 {
    let p = p.as_ref();
    let n = p.dim();
    let mut w = vec![0.0; n * n];
    for u in 0..n {
        for v in 0..n {
            if u != v {
                w[u * n + v] = p.get(u, v);
            }
        }
    }
    let mut alive = vec![true; n];
    let mut log_det = 0.0;
    for u in (0..n).filter(|&u| u != root) {
        let d: f64 = (0..n)
            .filter(|&v| v != u && alive[v])
            .map(|v| w[u * n + v])
            .sum();
        if d <= 0.0 {
            return f64::NEG_INFINITY;
        }
        log_det += d.ln();
        alive[u] = false;
        for i in 0..n {
            let wiu = w[i * n + u];
            if !alive[i] || i == root || wiu == 0.0 {
                continue;
            }
            let f = wiu / d;
            for j in 0..n {
                if j != i && alive[j] {
                    let wuj = w[u * n + j];
                    if wuj != 0.0 {
                        w[i * n + j] += f * wuj;
                    }
                }
            }
        }
    }
    log_det
}

/// `W(root)` via the Laplacian minor.
pub fn arborescence_weight(p: &impl AsRef<Stochastic>, root: usize) -> f64 {
    log_arborescence_weight(p, root).exp()
}

/// Tree-theorem stationary distribution of an arbitrary (small) chain,
/// without the energy-range guard.
pub fn tree_distribution(p: &impl AsRef<Stochastic>) -> Result<Distribution> {
    let p = p.as_ref();
    if p.dim() > TREE_STATE_LIMIT {
        return Err(Error::SizeGuard {
            what: "tree-theorem stationary distribution",
            size: p.dim(),
            limit: TREE_STATE_LIMIT,
        });
    }
    let logw: Vec<f64> = (0..p.dim())
        .map(|r| log_arborescence_weight(p, r))
        .collect();
    if logw.iter().all(|l| *l == f64::NEG_INFINITY) {
        return domain("chain is not irreducible: no spanning arborescence");
    }
    Distribution::new(normalize_log(&logw))
}

/// Tree-theorem stationary distribution of a sorting chain.
pub fn stationary_tree(m: &TransitionMatrix) -> Result<Distribution> {
    let ln = m.energy().ln_lambda().abs();
    if ln > TREE_MAX_ABS_LN_LAMBDA + 1e-9 {
        return domain(format!(
            "tree method is limited to |ln λ| ≤ {TREE_MAX_ABS_LN_LAMBDA} (got {ln}); use stationary_solve"
        ));
    }
    tree_distribution(m)
}

/// `W(root)` by enumerating every parent function on the non-root states
/// and keeping the acyclic ones.
pub fn arborescence_bruteforce(p: &impl AsRef<Stochastic>, root: usize) -> Result<f64> {
    let p = p.as_ref();
    let n = p.dim();
    if n > BRUTEFORCE_STATE_LIMIT {
        return Err(Error::SizeGuard {
            what: "brute-force arborescence enumeration",
            size: n,
            limit: BRUTEFORCE_STATE_LIMIT,
        });
    }
    if root >= n {
        return domain(format!("root {root} outside a {n}-state space"));
    }
    let others: Vec<usize> = (0..n).filter(|&u| u != root).collect();
    let choices: Vec<Vec<usize>> = others
        .iter()
        .map(|&u| (0..n).filter(|&v| v != u && p.get(u, v) > 0.0).collect())
        .collect();
    if choices.iter().any(|c| c.is_empty()) {
        return Ok(0.0);
    }

    let mut parent = vec![usize::MAX; n];
    let mut digits = vec![0usize; others.len()];
    // Neumaier-compensated sum: up to 8⁷ terms
    let (mut total, mut carry) = (0.0f64, 0.0f64);
    'outer: loop {
        for (k, &u) in others.iter().enumerate() {
            parent[u] = choices[k][digits[k]];
        }
        if reaches_root(&parent, root) {
            let term = others.iter().map(|&u| p.get(u, parent[u])).product::<f64>();
            let t = total + term;
            carry += if total.abs() >= term.abs() {
                (total - t) + term
            } else {
                (term - t) + total
            };
            total = t;
        }
        // odometer increment
        for k in 0..digits.len() {
            digits[k] += 1;
            if digits[k] < choices[k].len() {
                continue 'outer;
            }
            digits[k] = 0;
        }
        break;
    }
    Ok(total + carry)
}

fn reaches_root(parent: &[usize], root: usize) -> bool {
    let n = parent.len();
    (0..n).all(|start| {
        let mut u = start;
        for _ in 0..n {
            if u == root {
                return true;
            }
            u = parent[u];
        }
        u == root
    })
}
