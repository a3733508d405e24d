mod common;

use common::{random_lp, DenseLp};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tapdispatch_milp::{
    solve_milp, BnbConfig, BranchingRule, MilpStatus, NodeOrder, VarKind,
};

/// Optimum by enumerating every 0/1 assignment of `bins` and solving the rest
/// by vertex enumeration.
fn enumerate(lp: &DenseLp, bins: &[usize]) -> Option<f64> {
    let keep: Vec<usize> = (0..lp.c.len()).filter(|j| !bins.contains(j)).collect();
    let mut best: Option<f64> = None;
    for mask in 0..(1u32 << bins.len()) {
        let fixed: Vec<f64> = (0..bins.len()).map(|k| ((mask >> k) & 1) as f64).collect();
        let shift_obj: f64 = bins.iter().zip(&fixed).map(|(&j, v)| lp.c[j] * v).sum();
        let mut rlo = lp.rlo.clone();
        let mut rhi = lp.rhi.clone();
        for (i, row) in lp.a.iter().enumerate() {
            let s: f64 = bins.iter().zip(&fixed).map(|(&j, v)| row[j] * v).sum();
            rlo[i] -= s;
            rhi[i] -= s;
        }
        let reduced = DenseLp {
            c: keep.iter().map(|&j| lp.c[j]).collect(),
            a: lp.a.iter().map(|row| keep.iter().map(|&j| row[j]).collect()).collect(),
            rlo,
            rhi,
            lo: keep.iter().map(|&j| lp.lo[j]).collect(),
            hi: keep.iter().map(|&j| lp.hi[j]).collect(),
        };
        if let Some(v) = reduced.vertex_optimum() {
            let v = v + shift_obj;
            if best.map_or(true, |b| v < b) {
                best = Some(v);
            }
        }
    }
    best
}

fn random_milp(rng: &mut ChaCha8Rng) -> (DenseLp, Vec<usize>) {
    let nb = rng.gen_range(1..=4);
    let nc = rng.gen_range(1..=3);
    let m = rng.gen_range(1..=4);
    let mut lp = random_lp(rng, nb + nc, m);
    for j in 0..nb {
        lp.lo[j] = 0.0;
        lp.hi[j] = 1.0;
        for row in lp.a.iter_mut() {
            if row[j] == 0.0 && rng.gen_bool(0.5) {
                row[j] = rng.gen_range(-6..=6) as f64;
            }
        }
    }
    (lp, (0..nb).collect())
}

#[test]
fn branch_and_bound_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let configs = [
        (BranchingRule::MostFractional, NodeOrder::BestBound),
        (BranchingRule::PseudoCost, NodeOrder::BestBound),
        (BranchingRule::MostFractional, NodeOrder::DepthFirst),
    ];
    let heuristics = [true, false];
    let (mut solved, mut infeasible) = (0, 0);
    for trial in 0..300 {
        let (lp, bins) = random_milp(&mut rng);
        let model = lp.to_model(&bins);
        let expected = enumerate(&lp, &bins);
        for (&(branching, node_order), heur) in configs
            .iter()
            .flat_map(|c| heuristics.iter().map(move |h| (c, *h)))
        {
            let cfg = BnbConfig {
                relative_gap: 0.0,
                branching,
                node_order,
                rounding: heur,
                dive_every: heur.then_some(3),
                ..Default::default()
            };
            let s = solve_milp(&model, &cfg);
            match expected {
                Some(v) => {
                    assert_eq!(s.status, MilpStatus::Optimal, "trial {trial}: {lp:?}");
                    assert!((s.objective - v).abs() <= 1e-6 * (1.0 + v.abs()), "trial {trial}: {} vs {v}", s.objective);
                    let x = s.assignment.as_ref().unwrap();
                    assert!(model.is_feasible(x, 1e-6), "trial {trial}");
                    for (j, var) in model.vars().iter().enumerate() {
                        if var.kind == VarKind::Binary {
                            assert!(x[j] == 0.0 || x[j] == 1.0);
                        }
                    }
                    assert!(s.best_bound <= s.objective + 1e-9);
                }
                None => assert_eq!(s.status, MilpStatus::Infeasible, "trial {trial}: {lp:?}"),
            }
        }
        if expected.is_some() {
            solved += 1;
        } else {
            infeasible += 1;
        }
    }
    assert!(solved > 60 && infeasible > 20, "{solved} solved, {infeasible} infeasible");
}

#[test]
fn reported_gap_respects_tolerance() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let (lp, bins) = random_milp(&mut rng);
        let model = lp.to_model(&bins);
        let Some(opt) = enumerate(&lp, &bins) else { continue };
        for gap in [1e-4, 0.05, 0.5] {
            let s = solve_milp(&model, &BnbConfig { relative_gap: gap, ..Default::default() });
            assert_eq!(s.status, MilpStatus::Optimal);
            assert!(s.gap <= gap + 1e-12, "gap {} > {gap}", s.gap);
            assert!(s.best_bound <= opt + 1e-6, "bound {} above optimum {opt}", s.best_bound);
            assert!(s.objective >= opt - 1e-6);
        }
    }
}

#[test]
fn node_limit_reports_limit() {
    // A model whose relaxation is fractional at the root.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut hit = false;
    for _ in 0..200 {
        let (lp, bins) = random_milp(&mut rng);
        let model = lp.to_model(&bins);
        let full = solve_milp(&model, &BnbConfig { relative_gap: 0.0, ..Default::default() });
        if full.nodes < 4 {
            continue;
        }
        let s = solve_milp(&model, &BnbConfig { relative_gap: 0.0, node_limit: Some(2), ..Default::default() });
        assert_eq!(s.status, MilpStatus::Limit);
        if let Some(x) = &s.assignment {
            assert!(model.is_feasible(x, 1e-6));
        }
        hit = true;
    }
    assert!(hit);
}
