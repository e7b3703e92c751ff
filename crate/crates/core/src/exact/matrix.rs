use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::exact::space::{enumerate_states, StateSpace};
use crate::kernels::{moves, ChainKind};
use crate::seq::{Energy, Sequence};

const ROW_SUM_TOL: f64 = 1e-12;

/// Dense row-stochastic matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Stochastic {
    dim: usize,
    data: Vec<f64>,
}

impl Stochastic {
    /// Validates non-negativity and unit row sums (within 1e-12).
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return domain("empty matrix");
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return domain(format!("row {r} has {} entries, expected {dim}", row.len()));
            }
            data.extend(row);
        }
        Self::from_dense(dim, data)
    }

    pub fn from_dense(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return domain("matrix data does not match its dimension");
        }
        for r in 0..dim {
            let row = &data[r * dim..(r + 1) * dim];
            if let Some(x) = row.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
                return domain(format!("row {r} has an invalid entry {x}"));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return domain(format!("row {r} sums to {sum}"));
            }
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.data[from * self.dim + to]
    }

    pub fn row(&self, from: usize) -> &[f64] {
        &self.data[from * self.dim..(from + 1) * self.dim]
    }

    /// `μ P`.
    pub fn apply_left(&self, mu: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (from, &m) in mu.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            for (o, p) in out.iter_mut().zip(self.row(from)) {
                *o += m * p;
            }
        }
        out
    }

    /// Positive off-diagonal entries per row, as `(to, prob)`.
    pub fn sparse_rows(&self) -> Vec<Vec<(usize, f64)>> {
        (0..self.dim)
            .map(|r| {
                self.row(r)
                    .iter()
                    .enumerate()
                    .filter(|&(c, &p)| c != r && p > 0.0)
                    .map(|(c, &p)| (c, p))
                    .collect()
            })
            .collect()
    }
}

impl AsRef<Stochastic> for Stochastic {
    fn as_ref(&self) -> &Stochastic {
        self
    }
}

/// Probability vector over a state space.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Clips solver noise down to −1e-12 to zero and checks the total.
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return domain("empty distribution");
        }
        for p in probs.iter_mut() {
            if !p.is_finite() || *p < -1e-12 {
                return Err(Error::Numeric {
                    what: "distribution entry out of range",
                    residual: *p,
                });
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::Numeric {
                what: "distribution does not sum to one",
                residual: total - 1.0,
            });
        }
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn point_mass(n: usize, at: usize) -> Self {
        let mut probs = vec![0.0; n];
        probs[at] = 1.0;
        Self { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn get(&self, idx: usize) -> f64 {
        self.probs[idx]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn argmax(&self) -> usize {
        self.probs
            .iter()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |b, (k, &p)| if p > b.1 { (k, p) } else { b },
            )
            .0
    }
}

/// Transition matrix of one of the sorting chains over an enumerated space.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    kind: ChainKind,
    energy: Energy,
    space: StateSpace,
    matrix: Stochastic,
}

impl TransitionMatrix {
    pub fn kind(&self) -> ChainKind {
        self.kind
    }

    pub fn energy(&self) -> &Energy {
        &self.energy
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Stochastic {
        &self.matrix
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.matrix.get(from, to)
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

impl AsRef<Stochastic> for TransitionMatrix {
    fn as_ref(&self) -> &Stochastic {
        &self.matrix
    }
}

/// Assembles the full transition matrix of `kind` over all arrangements
/// of `multiset`. Self-loops are the complement of the outgoing mass.
pub fn build_matrix(
    kind: ChainKind,
    multiset: &Sequence,
    energy: &Energy,
    cap: usize,
) -> Result<TransitionMatrix> {
    let space = enumerate_states(multiset, cap)?;
    build_matrix_on(kind, space, energy)
}

fn build_matrix_on(
    kind: ChainKind,
    space: StateSpace,
    energy: &Energy,
) -> Result<TransitionMatrix> {
    let dim = space.len();
    let rows: Vec<Vec<f64>> = space
        .states()
        .par_iter()
        .enumerate()
        .map(|(from, s)| {
            let mut row = vec![0.0; dim];
            let mut out = 0.0;
            for (i, j, p) in moves(kind, s.as_slice(), energy) {
                let to = space
                    .index_of(&s.swapped(i, j))
                    .expect("transposition stays in the space");
                row[to] += p;
                out += p;
            }
            row[from] = (1.0 - out).max(0.0);
            row
        })
        .collect();
    let matrix = Stochastic::from_dense(dim, rows.concat())?;
    Ok(TransitionMatrix {
        kind,
        energy: *energy,
        space,
        matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn seq(v: &[f64]) -> Sequence {
        Sequence::new(v.to_vec()).unwrap()
    }

    #[test]
    fn two_state_adj() {
        let m = build_matrix(
            ChainKind::Adj,
            &seq(&[1., 2.]),
            &Energy::new(E).unwrap(),
            5040,
        )
        .unwrap();
        let e2 = E * E;
        let up = 1.0 / (1.0 + e2);
        assert!((m.get(0, 1) - up).abs() < 1e-15);
        assert!((m.get(0, 0) - (1.0 - up)).abs() < 1e-15);
        assert!((m.get(1, 0) - e2 / (1.0 + e2)).abs() < 1e-15);
        assert!((m.get(1, 1) - (1.0 - e2 / (1.0 + e2))).abs() < 1e-15);
    }

    #[test]
    fn constant_multiset_gives_identity() {
        let m = build_matrix(
            ChainKind::Any,
            &seq(&[2., 2., 2.]),
            &Energy::new(E).unwrap(),
            5040,
        )
        .unwrap();
        assert_eq!(m.dim(), 1);
        assert_eq!(m.get(0, 0), 1.0);
    }

    #[test]
    fn any_rows_have_three_neighbours() {
        let m = build_matrix(
            ChainKind::Any,
            &seq(&[1., 2., 3.]),
            &Energy::new(E).unwrap(),
            5040,
        )
        .unwrap();
        for r in 0..m.dim() {
            let off = (0..m.dim())
                .filter(|&c| c != r && m.get(r, c) > 0.0)
                .count();
            assert_eq!(off, 3);
        }
    }

    #[test]
    fn support_is_symmetric() {
        for kind in ChainKind::ALL {
            let m = build_matrix(
                kind,
                &seq(&[1., 2., 2., 4.]),
                &Energy::new(3.0).unwrap(),
                5040,
            )
            .unwrap();
            for r in 0..m.dim() {
                for c in 0..m.dim() {
                    assert_eq!(m.get(r, c) > 0.0, m.get(c, r) > 0.0);
                }
            }
        }
    }

    #[test]
    fn stochastic_validation() {
        assert!(Stochastic::from_rows(vec![vec![0.5, 0.6], vec![0.5, 0.5]]).is_err());
        assert!(Stochastic::from_rows(vec![vec![1.5, -0.5], vec![0.5, 0.5]]).is_err());
        assert!(Stochastic::from_rows(vec![vec![1.0], vec![1.0]]).is_err());
        assert!(Distribution::new(vec![0.5, 0.6]).is_err());
        let d = Distribution::new(vec![1.0 + 1e-13, -1e-13]).unwrap();
        assert_eq!(d.get(1), 0.0);
    }
}
