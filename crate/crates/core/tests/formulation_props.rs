mod support;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tapdispatch::formulation::{build_ed1, build_ed1_with, Ed1Options};
use tapdispatch::harness::check;
use tapdispatch::network::{BranchDevice, NetworkCase};
use tapdispatch::plt::EncodingVariant;
use tapdispatch::{load_case, solve_ed0, solve_ed1, SolutionStatus, SolveOptions};

fn cases(n: usize, seed: u64) -> Vec<NetworkCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| support::random_small_case(&mut rng)).collect()
}

fn close(a: f64, b: f64, gap: f64) -> bool {
    (a - b).abs() <= gap * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn adjustable_devices_never_cost_more() {
    let opts = SolveOptions::default();
    let mut compared = 0;
    for c in cases(40, 1) {
        let (_, e0) = solve_ed0(&c, &opts).unwrap();
        let (_, e1) = solve_ed1(&c, &opts).unwrap();
        if let Some(c0) = e0.objective {
            let c1 = e1.objective.expect("fixed schedule is ED1-feasible");
            assert!(c1 <= c0 + opts.gap * c0.abs().max(1.0), "{c1} > {c0}");
            compared += 1;
        }
    }
    assert!(compared >= 25);
}

#[test]
fn uncongested_cases_gain_nothing() {
    let opts = SolveOptions::default();
    let mut seen = 0;
    for mut c in cases(40, 2) {
        // Generous ratings and angle room: nothing in the network can bind.
        for br in &mut c.branches {
            br.rating *= 20.0;
        }
        for b in &mut c.buses {
            b.angle_bounds = (-1.5, 1.5);
        }
        let (_, e0) = solve_ed0(&c, &opts).unwrap();
        let Some(c0) = e0.objective else { continue };
        let slack_ok = c.branches.iter().enumerate().all(|(i, br)| {
            br.rating == 0.0 || e0.flow[i].iter().all(|f| br.rating * c.base_mva - f.abs() > 1e-4)
        });
        let angles_ok = e0.theta.iter().flatten().all(|t| t.abs() < 1.5 - 1e-6);
        if !(slack_ok && angles_ok) {
            continue;
        }
        let (_, e1) = solve_ed1(&c, &opts).unwrap();
        assert!(close(e1.objective.unwrap(), c0, opts.gap), "{:?} vs {c0}", e1.objective);
        seen += 1;
    }
    assert!(seen >= 20, "{seen}");
}

#[test]
fn degenerate_devices_change_nothing() {
    let opts = SolveOptions::default();
    for c in cases(30, 3) {
        let mut with = c.clone();
        for br in &mut with.branches {
            if br.device.is_passive() {
                br.device = BranchDevice {
                    tap_set: vec![1.0],
                    tap_step_max: 0.01,
                    tap_adjust_budget: 3,
                    ..BranchDevice::default()
                };
            }
        }
        let (_, a) = solve_ed1(&c, &opts).unwrap();
        let (_, b) = solve_ed1(&with, &opts).unwrap();
        assert_eq!(a.status, b.status);
        if let (Some(x), Some(y)) = (a.objective, b.objective) {
            assert!(close(x, y, opts.gap));
        }
    }
}

#[test]
fn zero_budgets_freeze_the_devices() {
    let opts = SolveOptions::default();
    let mut solved = 0;
    for mut c in cases(30, 4) {
        for br in &mut c.branches {
            br.device.tap_adjust_budget = 0;
            br.device.shift_adjust_budget = 0;
        }
        let (_, e0) = solve_ed0(&c, &opts).unwrap();
        let (_, e1) = solve_ed1(&c, &opts).unwrap();
        assert_eq!(e0.status, e1.status);
        if e1.status != SolutionStatus::Optimal {
            continue;
        }
        for (i, br) in c.branches.iter().enumerate() {
            let d = &br.device;
            let tap0 = if d.has_adjustable_tap() { d.initial_tap } else { d.fixed_tap() };
            assert!(e1.tap[i].iter().all(|t| (t - tap0).abs() < 1e-9));
            assert!(e1.shift[i].iter().all(|s| (s - d.initial_shift).abs() < 1e-9));
        }
        assert!(close(e0.objective.unwrap(), e1.objective.unwrap(), opts.gap));
        solved += 1;
    }
    assert!(solved >= 15);
}

#[test]
fn solved_schedules_pass_every_check() {
    let opts = SolveOptions { shift_grid: true, ..SolveOptions::default() };
    for c in cases(30, 5) {
        let (_, e1) = solve_ed1(&c, &opts).unwrap();
        if e1.status.has_dispatch() {
            let r = check(&c, &e1);
            assert!(r.passed(), "{}", r.render());
        }
    }
}

#[test]
fn binary_counts_follow_the_devices() {
    let c = load_case(include_str!("../cases/six_bus.toml")).unwrap();
    // Per branch-hour: tap selection binaries plus one change indicator per device.
    let per_hour = |tap_bins: fn(usize) -> usize| -> usize {
        c.branches
            .iter()
            .map(|b| {
                let d = &b.device;
                let k = d.tap_set.len();
                let taps = if d.has_adjustable_tap() { tap_bins(k) + 1 } else { 0 };
                taps + d.has_shifter() as usize
            })
            .sum()
    };
    let adj = build_ed1(&c, EncodingVariant::SegmentAdjacency).unwrap();
    let exact = build_ed1(&c, EncodingVariant::DisjunctiveExact).unwrap();
    assert_eq!(adj.binary_count(), per_hour(|k| k - 1) * c.horizon);
    assert_eq!(exact.binary_count(), per_hour(|k| k) * c.horizon);
    assert_eq!(adj.binary_count(), 288);

    let grid = build_ed1_with(&c, Ed1Options { shift_grid: true, ..Ed1Options::default() }).unwrap();
    let grid_points: usize = c
        .branches
        .iter()
        .filter(|b| b.device.has_shifter())
        .map(|b| {
            let (lo, hi) = b.device.shifter_range;
            ((hi - lo) / b.device.shift_step_max + 1e-9).floor() as usize + 1
        })
        .sum();
    assert_eq!(grid.binary_count(), exact.binary_count() + grid_points * c.horizon);
}

#[test]
fn solves_are_deterministic() {
    let c = load_case(include_str!("../cases/six_bus.toml")).unwrap();
    let opts = SolveOptions::default();
    let (_, a) = solve_ed1(&c, &opts).unwrap();
    let (_, b) = solve_ed1(&c, &opts).unwrap();
    assert_eq!(a.objective, b.objective);
    assert_eq!(a.tap, b.tap);
    assert_eq!(a.p, b.p);
}
