use crate::error::{domain, Result};
use crate::exact::matrix::{Distribution, Stochastic};

/// `max_{s,t} |π(s) P(s,t) − π(t) P(t,s)|`.
pub fn detailed_balance_residual(p: &impl AsRef<Stochastic>, pi: &Distribution) -> f64 {
    let p = p.as_ref();
    let n = p.dim();
    let mut worst = 0.0f64;
    for s in 0..n {
        for t in s + 1..n {
            let flow = pi.get(s) * p.get(s, t) - pi.get(t) * p.get(t, s);
            worst = worst.max(flow.abs());
        }
    }
    worst
}

/// `P(C) / P(C⁻¹)` for the closed walk through `cycle`; the edge from the
/// last state back to the first is implied (a repeated closing state is
/// accepted too). Equals 1 on every cycle iff the chain is reversible.
pub fn kolmogorov_cycle_ratio(p: &impl AsRef<Stochastic>, cycle: &[usize]) -> Result<f64> {
    let p = p.as_ref();
    let mut cycle = cycle;
    if cycle.len() > 1 && cycle.first() == cycle.last() {
        cycle = &cycle[..cycle.len() - 1];
    }
    if cycle.len() < 2 {
        return domain("a cycle needs at least two states");
    }
    if let Some(&bad) = cycle.iter().find(|&&s| s >= p.dim()) {
        return domain(format!("state {bad} outside a {}-state space", p.dim()));
    }
    let mut log_ratio = 0.0;
    for k in 0..cycle.len() {
        let (u, v) = (cycle[k], cycle[(k + 1) % cycle.len()]);
        let (fwd, back) = (p.get(u, v), p.get(v, u));
        if fwd <= 0.0 || back <= 0.0 {
            return domain(format!("edge {u} ↔ {v} has zero probability"));
        }
        log_ratio += fwd.ln() - back.ln();
    }
    Ok(log_ratio.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::matrix::build_matrix;
    use crate::exact::stationary::stationary_solve;
    use crate::kernels::ChainKind;
    use crate::seq::{Energy, Sequence};
    use std::f64::consts::E;

    fn chain(kind: ChainKind, lambda: f64) -> crate::exact::TransitionMatrix {
        let ms = Sequence::new(vec![1., 2., 3.]).unwrap();
        build_matrix(kind, &ms, &Energy::new(lambda).unwrap(), 5040).unwrap()
    }

    // state indices in lexicographic order: 123 132 213 231 312 321
    const WITNESS: [usize; 4] = [0, 2, 3, 5];

    #[test]
    fn any_chain_witness_cycle() {
        let m = chain(ChainKind::Any, E);
        let r = kolmogorov_cycle_ratio(&m, &WITNESS).unwrap();
        assert!((r - E.powi(-4)).abs() < 1e-12, "{r}");
        assert!((r - 0.018316).abs() < 1e-6);
        // closing state repeated
        let r2 = kolmogorov_cycle_ratio(&m, &[0, 2, 3, 5, 0]).unwrap();
        assert!((r - r2).abs() < 1e-15);
        let flat = chain(ChainKind::Any, 1.0);
        assert!((kolmogorov_cycle_ratio(&flat, &WITNESS).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reversible_chains_have_unit_ratios() {
        let m = chain(ChainKind::AnyStar, E);
        assert!((kolmogorov_cycle_ratio(&m, &WITNESS).unwrap() - 1.0).abs() < 1e-10);
        // the Adj chain has no direct 123 ↔ 321 edge
        assert!(kolmogorov_cycle_ratio(&chain(ChainKind::Adj, E), &WITNESS).is_err());
        let hex = [0, 1, 4, 5, 3, 2];
        assert!(
            (kolmogorov_cycle_ratio(&chain(ChainKind::Adj, E), &hex).unwrap() - 1.0).abs() < 1e-10
        );
    }

    #[test]
    fn detailed_balance() {
        for (kind, reversible) in [
            (ChainKind::Adj, true),
            (ChainKind::AnyStar, true),
            (ChainKind::Any, false),
        ] {
            let m = chain(kind, E);
            let pi = stationary_solve(&m).unwrap();
            let res = detailed_balance_residual(&m, &pi);
            if reversible {
                assert!(res <= 1e-10, "{kind}: {res}");
            } else {
                assert!(res > 1e-6, "{kind}: {res}");
            }
        }
    }
}
