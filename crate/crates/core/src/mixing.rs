//! Total variation, exact mixing times, and the binary-input path coupling
//! for the any-pair chain.

use std::collections::{BTreeMap, VecDeque};

use rand::Rng;

use crate::closedform::BinarySpec;
use crate::error::{domain, Error, Result};
use crate::exact::{build_matrix, stationary_solve, Distribution, StateSpace, TransitionMatrix};
use crate::kernels::ChainKind;
use crate::seq::{Energy, Sequence};

/// Hard limit on evolution steps in [`empirical_mixing_time`].
pub const MIXING_STEP_CAP: usize = 1_000_000;

/// `½ Σ |μ − ν|`.
pub fn tv_distance(mu: &Distribution, nu: &Distribution) -> Result<f64> {
    tv_slices(mu.as_slice(), nu.as_slice())
}

pub(crate) fn tv_slices(mu: &[f64], nu: &[f64]) -> Result<f64> {
    if mu.len() != nu.len() {
        return domain(format!(
            "distributions have different lengths ({} vs {})",
            mu.len(),
            nu.len()
        ));
    }
    Ok(0.5 * mu.iter().zip(nu).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Smallest `t` with `max_s TV(δ_s Pᵗ, π) ≤ ε`, by exact evolution of every
/// start distribution.
pub fn empirical_mixing_time(
    kind: ChainKind,
    multiset: &Sequence,
    energy: &Energy,
    eps: f64,
    cap: usize,
) -> Result<usize> {
    let m = build_matrix(kind, multiset, energy, cap)?;
    mixing_time_of(&m, eps)
}

/// As [`empirical_mixing_time`] for an already assembled matrix.
pub fn mixing_time_of(m: &TransitionMatrix, eps: f64) -> Result<usize> {
    if !(eps > 0.0 && eps < 1.0) {
        return domain(format!("ε must be in (0, 1), got {eps}"));
    }
    let pi = stationary_solve(m)?;
    let pi = pi.as_slice();
    let n = m.dim();
    let sparse = m.matrix().sparse_rows();
    let diag: Vec<f64> = (0..n).map(|k| m.get(k, k)).collect();

    // row s holds δ_s Pᵗ
    let mut rows: Vec<Vec<f64>> = (0..n)
        .map(|s| {
            let mut r = vec![0.0; n];
            r[s] = 1.0;
            r
        })
        .collect();
    let worst = |rows: &[Vec<f64>]| -> f64 {
        rows.iter()
            .map(|r| tv_slices(r, pi).expect("same length"))
            .fold(0.0, f64::max)
    };
    let mut tv = worst(&rows);
    let mut t = 0;
    while tv > eps {
        if t >= MIXING_STEP_CAP {
            return Err(Error::MixingTimeout {
                cap: MIXING_STEP_CAP,
                tv,
            });
        }
        for row in rows.iter_mut() {
            let mut next: Vec<f64> = row.iter().zip(&diag).map(|(a, d)| a * d).collect();
            for (k, &mass) in row.iter().enumerate() {
                if mass == 0.0 {
                    continue;
                }
                for &(to, p) in &sparse[k] {
                    next[to] += mass * p;
                }
            }
            *row = next;
        }
        t += 1;
        tv = worst(&rows);
    }
    Ok(t)
}

/// Neighbours of `s` in the support graph of `kind`: proposable
/// transpositions of distinct elements.
fn support_neighbours(kind: ChainKind, s: &Sequence) -> impl Iterator<Item = Sequence> + '_ {
    let n = s.len();
    let v = s.as_slice();
    (0..n)
        .flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
        .filter(move |&(i, j)| kind.proposes(i, j) && v[i].to_bits() != v[j].to_bits())
        .map(move |(i, j)| s.swapped(i, j))
}

/// Breadth-first distances from `source` over the support graph.
pub fn distances_from(kind: ChainKind, space: &StateSpace, source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; space.len()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let d = dist[u].expect("queued states are labelled");
        for t in support_neighbours(kind, space.state(u)) {
            let v = space.index_of(&t).expect("neighbour in space");
            if dist[v].is_none() {
                dist[v] = Some(d + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Minimum number of transitions from `x` to `y`.
pub fn rho_distance(
    x: &Sequence,
    y: &Sequence,
    kind: ChainKind,
    space: &StateSpace,
) -> Result<usize> {
    let (Some(xi), Some(yi)) = (space.index_of(x), space.index_of(y)) else {
        return domain("both sequences must belong to the state space");
    };
    distances_from(kind, space, xi)[yi]
        .ok_or_else(|| Error::Domain(format!("{y:?} is unreachable from {x:?}")))
}

/// Two binary sequences one transposition apart: `y = x` with positions
/// `i_star < j_star` (0-based) exchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledPair {
    pub x: Sequence,
    pub y: Sequence,
    pub i_star: usize,
    pub j_star: usize,
}

impl CoupledPair {
    pub fn new(x: Sequence, i_star: usize, j_star: usize) -> Result<Self> {
        let (i_star, j_star) = (i_star.min(j_star), i_star.max(j_star));
        if j_star >= x.len() || i_star == j_star {
            return domain(format!("invalid positions ({i_star}, {j_star})"));
        }
        let v = x.as_slice();
        if v[i_star].to_bits() == v[j_star].to_bits() {
            return domain("positions hold equal elements, so x = y");
        }
        let y = x.swapped(i_star, j_star);
        Ok(Self {
            x,
            y,
            i_star,
            j_star,
        })
    }
}

/// Joint next-state distribution of one coupled step, as `((x', y'), prob)`
/// sorted by outcome.
pub type JointTable = Vec<((Sequence, Sequence), f64)>;

/// Exact tabulation of the path coupling for the any-pair chain.
///
/// Swaps are paired `(i*,j*)↔(i*,j*)`, `(i*,k)↔(j*,k)`, `(k,j*)↔(k,i*)`
/// and `(i,j)↔(i,j)`. Within each paired proposal both chains move
/// together with the smaller of the two move probabilities; the excess
/// moves one chain alone. All remaining mass stays at `(x, y)`.
pub fn coupled_joint_table(
    pair: &CoupledPair,
    spec: &BinarySpec,
    energy: &Energy,
) -> Result<JointTable> {
    if !spec.matches(&pair.x) || !spec.matches(&pair.y) {
        return domain("the path coupling is defined for binary inputs only");
    }
    let n = pair.x.len();
    let (x, y) = (&pair.x, &pair.y);
    let (is, js) = (pair.i_star, pair.j_star);
    let pick = 1.0 / ChainKind::Any.pair_count(n) as f64;
    // move probability of the unordered position pair {i, j} in s
    let mv = |s: &Sequence, i: usize, j: usize| {
        let (i, j) = (i.min(j), i.max(j));
        let v = s.as_slice();
        pick * ChainKind::Any.acceptance(v[i], v[j], i, j, energy)
    };

    let mut table: BTreeMap<(Sequence, Sequence), f64> = BTreeMap::new();
    let mut add = |xn: Sequence, yn: Sequence, p: f64| {
        if p > 0.0 {
            *table.entry((xn, yn)).or_insert(0.0) += p;
        }
    };

    add(y.clone(), y.clone(), mv(x, is, js));
    add(x.clone(), x.clone(), mv(y, is, js));

    for k in (0..n).filter(|&k| k != is && k != js) {
        for ((xi, xj), (yi, yj)) in [((is, k), (js, k)), ((k, js), (k, is))] {
            let px = mv(x, xi, xj);
            let py = mv(y, yi, yj);
            let (xn, yn) = (x.swapped(xi, xj), y.swapped(yi, yj));
            add(xn.clone(), yn.clone(), px.min(py));
            add(xn, y.clone(), (px - py).max(0.0));
            add(x.clone(), yn, (py - px).max(0.0));
        }
    }

    for i in (0..n).filter(|&i| i != is && i != js) {
        for j in (i + 1..n).filter(|&j| j != is && j != js) {
            add(x.swapped(i, j), y.swapped(i, j), mv(x, i, j));
        }
    }

    let listed: f64 = table.values().sum();
    let residual = 1.0 - listed;
    if residual < -1e-12 {
        return Err(Error::Numeric {
            what: "coupling probabilities exceed one",
            residual,
        });
    }
    if residual > 0.0 {
        *table.entry((x.clone(), y.clone())).or_insert(0.0) += residual;
    }
    Ok(table.into_iter().collect())
}

/// Marginal distributions of `x'` and `y'` from a joint table.
pub fn joint_marginals(table: &JointTable) -> (BTreeMap<Sequence, f64>, BTreeMap<Sequence, f64>) {
    let mut mx = BTreeMap::new();
    let mut my = BTreeMap::new();
    for ((xn, yn), p) in table {
        *mx.entry(xn.clone()).or_insert(0.0) += p;
        *my.entry(yn.clone()).or_insert(0.0) += p;
    }
    (mx, my)
}

/// `E[ρ(x', y')]` after one coupled step.
pub fn expected_coupled_distance(table: &JointTable, space: &StateSpace) -> Result<f64> {
    let mut total = 0.0;
    for ((xn, yn), p) in table {
        total += p * rho_distance(xn, yn, ChainKind::Any, space)? as f64;
    }
    Ok(total)
}

/// Draws one coupled step.
pub fn coupled_step_any<R: Rng + ?Sized>(
    pair: &CoupledPair,
    spec: &BinarySpec,
    energy: &Energy,
    rng: &mut R,
) -> Result<(Sequence, Sequence)> {
    let table = coupled_joint_table(pair, spec, energy)?;
    let u: f64 = rng.gen::<f64>() * table.iter().map(|e| e.1).sum::<f64>();
    let mut acc = 0.0;
    for ((xn, yn), p) in &table {
        acc += p;
        if u < acc {
            return Ok((xn.clone(), yn.clone()));
        }
    }
    let ((xn, yn), _) = table.last().expect("table is never empty");
    Ok((xn.clone(), yn.clone()))
}
