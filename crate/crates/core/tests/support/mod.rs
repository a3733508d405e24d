//! Reference implementations shared by the integration tests: a dense
//! tableau simplex, an LP for a dispatch with every device fixed, and a
//! generator of small random cases.
#![allow(dead_code)]

use rand::Rng;
use tapdispatch::network::{Branch, BranchDevice, Bus, Generator, NetworkCase, DEFAULT_ANGLE_BOUND};

/// `min c·x` over `rlo <= A x <= rhi`, `lo <= x <= hi`, variable bounds finite.
#[derive(Clone, Debug, Default)]
pub struct DenseLp {
    pub c: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub rlo: Vec<f64>,
    pub rhi: Vec<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl DenseLp {
    pub fn add_var(&mut self, c: f64, lo: f64, hi: f64) -> usize {
        self.c.push(c);
        self.lo.push(lo);
        self.hi.push(hi);
        for row in &mut self.a {
            row.push(0.0);
        }
        self.c.len() - 1
    }

    pub fn add_row(&mut self, terms: &[(usize, f64)], lo: f64, hi: f64) {
        let mut row = vec![0.0; self.c.len()];
        for &(j, v) in terms {
            row[j] += v;
        }
        self.a.push(row);
        self.rlo.push(lo);
        self.rhi.push(hi);
    }

    pub fn feasible(&self, x: &[f64], tol: f64) -> bool {
        (0..self.c.len()).all(|j| x[j] >= self.lo[j] - tol && x[j] <= self.hi[j] + tol)
            && self.a.iter().enumerate().all(|(i, row)| {
                let v: f64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
                v >= self.rlo[i] - tol && v <= self.rhi[i] + tol
            })
    }
}

const EPS: f64 = 1e-10;

/// Two-phase tableau simplex with Bland's rule. Returns the optimal value
/// and point, or `None` when infeasible.
pub fn tableau_solve(lp: &DenseLp) -> Option<(f64, Vec<f64>)> {
    let n = lp.c.len();
    // Shift to y = x - lo >= 0 and collect rows as (coefs, sense, rhs) with
    // sense -1 for <=, +1 for >=, 0 for =.
    let mut rows: Vec<(Vec<f64>, i8, f64)> = Vec::new();
    for (i, a) in lp.a.iter().enumerate() {
        let base: f64 = a.iter().zip(&lp.lo).map(|(a, l)| a * l).sum();
        let (l, h) = (lp.rlo[i], lp.rhi[i]);
        if l == h {
            rows.push((a.clone(), 0, l - base));
            continue;
        }
        if h.is_finite() {
            rows.push((a.clone(), -1, h - base));
        }
        if l.is_finite() {
            rows.push((a.clone(), 1, l - base));
        }
    }
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        rows.push((e, -1, lp.hi[j] - lp.lo[j]));
    }
    let m = rows.len();
    let slacks: Vec<usize> = rows.iter().filter(|r| r.1 != 0).map(|_| 1).collect();
    let ns = slacks.len();
    // Columns: y (n), slacks (ns), artificials (m), rhs.
    let width = n + ns + m + 1;
    let rhs = width - 1;
    let mut t = vec![vec![0.0; width]; m];
    let mut s = 0;
    for (i, (a, sense, b)) in rows.iter().enumerate() {
        t[i][..n].copy_from_slice(a);
        if *sense != 0 {
            t[i][n + s] = if *sense < 0 { 1.0 } else { -1.0 };
            s += 1;
        }
        t[i][rhs] = *b;
        if t[i][rhs] < 0.0 {
            for v in t[i].iter_mut() {
                *v = -*v;
            }
        }
        t[i][n + ns + i] = 1.0;
    }
    let mut basis: Vec<usize> = (0..m).map(|i| n + ns + i).collect();

    // Phase 1: minimize the sum of artificials.
    let mut cost = vec![0.0; width];
    for c in cost.iter_mut().skip(n + ns).take(m) {
        *c = 1.0;
    }
    run(&mut t, &mut basis, &cost, n + ns + m);
    let infeas: f64 = basis
        .iter()
        .enumerate()
        .filter(|(_, &b)| b >= n + ns)
        .map(|(i, _)| t[i][rhs])
        .sum();
    if infeas > 1e-7 {
        return None;
    }
    // Drive remaining artificials out of the basis, dropping redundant rows.
    let mut i = 0;
    while i < t.len() {
        if basis[i] >= n + ns {
            match (0..n + ns).find(|&j| t[i][j].abs() > 1e-9) {
                Some(j) => pivot(&mut t, &mut basis, i, j),
                None => {
                    t.remove(i);
                    basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    let mut cost = vec![0.0; width];
    cost[..n].copy_from_slice(&lp.c);
    run(&mut t, &mut basis, &cost, n + ns);
    let mut x = lp.lo.clone();
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            x[b] += t[i][rhs];
        }
    }
    let obj = lp.c.iter().zip(&x).map(|(c, x)| c * x).sum();
    Some((obj, x))
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], r: usize, c: usize) {
    let p = t[r][c];
    for v in t[r].iter_mut() {
        *v /= p;
    }
    let prow = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != r && row[c] != 0.0 {
            let f = row[c];
            for (v, pv) in row.iter_mut().zip(&prow) {
                *v -= f * pv;
            }
        }
    }
    basis[r] = c;
}

/// Primal simplex on columns `0..ncols` of a tableau in canonical form.
/// The box on every original variable keeps the problem bounded.
fn run(t: &mut [Vec<f64>], basis: &mut [usize], cost: &[f64], ncols: usize) {
    let rhs = cost.len() - 1;
    loop {
        let reduced = |j: usize| -> f64 {
            cost[j] - basis.iter().enumerate().map(|(i, &b)| cost[b] * t[i][j]).sum::<f64>()
        };
        let Some(enter) = (0..ncols).find(|&j| !basis.contains(&j) && reduced(j) < -1e-9) else {
            return;
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..t.len() {
            if t[i][enter] > EPS {
                let ratio = t[i][rhs] / t[i][enter];
                let better = match leave {
                    None => true,
                    Some((l, best)) => ratio < best - 1e-12 || (ratio <= best + 1e-12 && basis[i] < basis[l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (r, _) = leave.expect("bounded by construction");
        pivot(t, basis, r, enter);
    }
}

/// Dispatch LP with every tap and shift fixed, written directly from the
/// DC model: angle, output and cost-epigraph variables per hour. Objective
/// is in $, matching the library's ED objective.
pub fn fixed_device_lp(case: &NetworkCase, tap: &[Vec<f64>], shift: &[Vec<f64>]) -> DenseLp {
    let h = case.horizon;
    let mut lp = DenseLp::default();
    let theta: Vec<Vec<usize>> = case
        .buses
        .iter()
        .map(|b| {
            (0..h)
                .map(|_| {
                    let (lo, hi) = if b.is_reference { (0.0, 0.0) } else { b.angle_bounds };
                    lp.add_var(0.0, lo, hi)
                })
                .collect()
        })
        .collect();
    let p: Vec<Vec<usize>> = case
        .generators
        .iter()
        .map(|g| (0..h).map(|_| lp.add_var(0.0, g.p_min, g.p_max)).collect())
        .collect();
    for (gi, g) in case.generators.iter().enumerate() {
        let (cmin, cmax) = (g.cost_at(g.p_min), g.cost_at(g.p_max));
        for t in 0..h {
            let z = lp.add_var(1.0, cmin.min(cmax) - 1.0, cmax.max(cmin) + 1.0);
            // z >= f0 + slope (p - p0) on every segment.
            for w in g.cost_curve.windows(2) {
                let ((p0, f0), (p1, f1)) = (w[0], w[1]);
                let slope = (f1 - f0) / (p1 - p0);
                lp.add_row(&[(z, 1.0), (p[gi][t], -slope)], f0 - slope * p0, f64::INFINITY);
            }
        }
    }
    for t in 0..h {
        let mut inj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); case.buses.len()];
        let mut consts = vec![0.0; case.buses.len()];
        for (gi, g) in case.generators.iter().enumerate() {
            inj[case.bus_index(&g.bus).unwrap()].push((p[gi][t], 1.0));
        }
        for (li, br) in case.branches.iter().enumerate() {
            let f = case.bus_index(&br.from_bus).unwrap();
            let to = case.bus_index(&br.to_bus).unwrap();
            let k = 1.0 / (tap[li][t] * br.x);
            let flow = [(theta[f][t], k), (theta[to][t], -k)];
            let off = -shift[li][t] * k;
            if br.rating > 0.0 {
                lp.add_row(&flow, -br.rating - off, br.rating - off);
            }
            for &(v, c) in &flow {
                inj[f].push((v, -c));
                inj[to].push((v, c));
            }
            consts[f] -= off;
            consts[to] += off;
        }
        for b in 0..case.buses.len() {
            let d = case.demand[b][t] - consts[b];
            lp.add_row(&inj[b], d, d);
        }
        let cap: f64 = case.generators.iter().map(|g| g.p_max).sum();
        if case.reserve[t] > 0.0 {
            let terms: Vec<_> = p.iter().map(|row| (row[t], 1.0)).collect();
            lp.add_row(&terms, f64::NEG_INFINITY, cap - case.reserve[t]);
        }
        for (gi, g) in case.generators.iter().enumerate() {
            let up = g.ramp_up;
            let dn = g.ramp_down;
            if !(up.is_finite() || dn.is_finite()) {
                continue;
            }
            if t == 0 {
                if let Some(p0) = g.initial_p {
                    lp.add_row(&[(p[gi][0], 1.0)], p0 - dn, p0 + up);
                }
            } else {
                lp.add_row(&[(p[gi][t], 1.0), (p[gi][t - 1], -1.0)], -dn, up);
            }
        }
    }
    lp
}

/// Per-branch settings reachable from the initial ones: every tap/shift
/// trajectory obeying the step limits and adjustment budgets.
pub fn device_trajectories(case: &NetworkCase, li: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
    let d = &case.branches[li].device;
    let h = case.horizon;
    let taps: Vec<f64> = if d.has_adjustable_tap() { d.tap_set.clone() } else { vec![d.fixed_tap()] };
    let shifts: Vec<f64> = if d.has_shifter() {
        let (lo, hi) = d.shifter_range;
        let n = ((hi - lo) / d.shift_step_max + 1e-9).floor() as usize;
        (0..=n).map(|k| lo + k as f64 * d.shift_step_max).collect()
    } else {
        vec![d.initial_shift]
    };
    let mut out = Vec::new();
    let mut cur = (Vec::new(), Vec::new());
    fn rec(
        d: &BranchDevice,
        h: usize,
        taps: &[f64],
        shifts: &[f64],
        cur: &mut (Vec<f64>, Vec<f64>),
        used: (u32, u32),
        out: &mut Vec<(Vec<f64>, Vec<f64>)>,
    ) {
        if cur.0.len() == h {
            out.push(cur.clone());
            return;
        }
        let prev_t = cur.0.last().copied().unwrap_or(d.initial_tap);
        let prev_s = cur.1.last().copied().unwrap_or(d.initial_shift);
        for &w in taps {
            let tc = (w - prev_t).abs() > 1e-9;
            if d.has_adjustable_tap() && ((w - prev_t).abs() > d.tap_step_max + 1e-9 || (tc && used.0 >= d.tap_adjust_budget)) {
                continue;
            }
            for &s in shifts {
                let sc = (s - prev_s).abs() > 1e-9;
                if d.has_shifter() && ((s - prev_s).abs() > d.shift_step_max + 1e-9 || (sc && used.1 >= d.shift_adjust_budget)) {
                    continue;
                }
                cur.0.push(w);
                cur.1.push(s);
                rec(d, h, taps, shifts, cur, (used.0 + tc as u32, used.1 + sc as u32), out);
                cur.0.pop();
                cur.1.pop();
            }
        }
    }
    rec(d, h, &taps, &shifts, &mut cur, (0, 0), &mut out);
    out
}

/// Minimum over every reachable device schedule of the fixed-device LP,
/// solved with the tableau oracle. `None` if no schedule is feasible.
pub fn enumerated_optimum(case: &NetworkCase) -> Option<f64> {
    let per_branch: Vec<_> = (0..case.branches.len()).map(|li| device_trajectories(case, li)).collect();
    let mut best: Option<f64> = None;
    let mut pick = vec![0usize; per_branch.len()];
    loop {
        let tap: Vec<Vec<f64>> = pick.iter().enumerate().map(|(l, &k)| per_branch[l][k].0.clone()).collect();
        let shift: Vec<Vec<f64>> = pick.iter().enumerate().map(|(l, &k)| per_branch[l][k].1.clone()).collect();
        if let Some((v, _)) = tableau_solve(&fixed_device_lp(case, &tap, &shift)) {
            best = Some(best.map_or(v, |b: f64| b.min(v)));
        }
        let mut l = 0;
        loop {
            if l == pick.len() {
                return best;
            }
            pick[l] += 1;
            if pick[l] < per_branch[l].len() {
                break;
            }
            pick[l] = 0;
            l += 1;
        }
    }
}

/// Small connected case: 3 or 4 buses on a ring (plus a chord), up to 2
/// adjustable branches with K <= 3 taps and shifters on a 3-point grid,
/// one or two hours, ratings tight enough that devices matter.
pub fn random_small_case<R: Rng>(rng: &mut R) -> NetworkCase {
    let nb = rng.gen_range(3..=4);
    let h = rng.gen_range(1..=2);
    let buses: Vec<Bus> = (0..nb)
        .map(|i| Bus {
            id: format!("b{i}"),
            is_reference: i == 0,
            angle_bounds: (-DEFAULT_ANGLE_BOUND, DEFAULT_ANGLE_BOUND),
        })
        .collect();
    let mut ends: Vec<(usize, usize)> = (0..nb - 1).map(|i| (i, i + 1)).collect();
    if nb > 2 {
        ends.push((nb - 1, 0));
    }
    if nb == 4 && rng.gen_bool(0.5) {
        ends.push((1, 3));
    }
    let step = 3f64.to_radians();
    let mut adjustable = 0;
    let branches: Vec<Branch> = ends
        .iter()
        .enumerate()
        .map(|(i, &(f, t))| {
            let mut device = BranchDevice::default();
            if adjustable < 2 && rng.gen_bool(0.6) {
                adjustable += 1;
                let kind = rng.gen_range(0..3);
                if kind != 1 {
                    let k = rng.gen_range(2..=3);
                    device.tap_set = [0.98, 1.0, 1.02][3 - k..].to_vec();
                    device.initial_tap = 1.0;
                    device.tap_step_max = if rng.gen_bool(0.7) { 0.02 } else { 0.01 };
                    device.tap_adjust_budget = rng.gen_range(0..=2);
                }
                if kind != 0 {
                    device.shifter_range = (-step, step);
                    device.shift_step_max = step;
                    device.shift_adjust_budget = rng.gen_range(0..=2);
                }
            }
            Branch {
                id: format!("l{i}"),
                from_bus: format!("b{f}"),
                to_bus: format!("b{t}"),
                x: rng.gen_range(0.05..0.3),
                r: 0.0,
                b: 0.0,
                rating: if rng.gen_bool(0.8) { rng.gen_range(0.2..0.8) } else { 0.0 },
                device,
            }
        })
        .collect();
    let ng = rng.gen_range(2..=3).min(nb);
    let generators: Vec<Generator> = (0..ng)
        .map(|i| {
            let p_max = rng.gen_range(1.0..2.5);
            let p_min = if rng.gen_bool(0.3) { 0.1 } else { 0.0 };
            let a = rng.gen_range(100.0..500.0);
            let s1 = rng.gen_range(5.0..40.0) * 100.0;
            let s2 = s1 + rng.gen_range(0.0..20.0) * 100.0;
            let mid = p_max / 2.0;
            let ramp = if rng.gen_bool(0.3) { rng.gen_range(0.3..1.0) } else { f64::INFINITY };
            Generator {
                id: format!("g{i}"),
                bus: format!("b{}", [0, nb - 1, 1][i]),
                p_min,
                p_max,
                ramp_up: ramp,
                ramp_down: ramp,
                initial_p: ramp.is_finite().then(|| rng.gen_range(p_min..p_max / 2.0)),
                cost_curve: vec![(0.0, a), (mid, a + s1 * mid), (p_max, a + s1 * mid + s2 * (p_max - mid))],
            }
        })
        .collect();
    let demand: Vec<Vec<f64>> = (0..nb)
        .map(|b| {
            (0..h)
                .map(|_| {
                    let gen_bus = generators.iter().any(|g| g.bus == format!("b{b}"));
                    if gen_bus && rng.gen_bool(0.6) { 0.0 } else { rng.gen_range(0.1..0.7) }
                })
                .collect()
        })
        .collect();
    let reserve = (0..h).map(|_| if rng.gen_bool(0.2) { 0.2 } else { 0.0 }).collect();
    NetworkCase {
        name: "random".into(),
        base_mva: 100.0,
        horizon: h,
        buses,
        branches,
        generators,
        demand,
        reserve,
    }
}

/// Random boxed LP with rows drawn around an interior point; one row in ten
/// is pushed out of reach so some instances are infeasible.
pub fn random_lp<R: Rng>(rng: &mut R, n: usize, m: usize) -> DenseLp {
    let mut lp = DenseLp::default();
    let mut x0 = Vec::new();
    for _ in 0..n {
        let lo = rng.gen_range(-4..=1) as f64;
        let hi = lo + rng.gen_range(0..=5) as f64;
        x0.push(rng.gen_range(lo..=hi));
        lp.add_var(rng.gen_range(-5..=5) as f64, lo, hi);
    }
    for _ in 0..m {
        let mut terms = Vec::new();
        for j in 0..n {
            if rng.gen_bool(0.7) {
                terms.push((j, rng.gen_range(-3..=3) as f64));
            }
        }
        let v: f64 = terms.iter().map(|&(j, a)| a * x0[j]).sum();
        let shift = if rng.gen_bool(0.1) { 40.0 } else { 0.0 };
        let (lo, hi) = match rng.gen_range(0..4) {
            0 => (f64::NEG_INFINITY, (v + rng.gen_range(0.0..2.0)).round() - shift),
            1 => ((v - rng.gen_range(0.0..2.0)).round() + shift, f64::INFINITY),
            2 => {
                let l = (v - rng.gen_range(0.0..2.0)).floor() + shift;
                (l, l + rng.gen_range(0..=3) as f64)
            }
            _ => (v + shift, v + shift),
        };
        lp.add_row(&terms, lo, hi);
    }
    lp
}

/// The same LP as a solver model.
pub fn to_model(lp: &DenseLp) -> tapdispatch_milp::MilpModel {
    use tapdispatch_milp::{LinExpr, MilpModel};
    let mut m = MilpModel::new("dense");
    let vars: Vec<_> = (0..lp.c.len())
        .map(|j| m.add_continuous(format!("x{j}"), lp.lo[j], lp.hi[j]).unwrap())
        .collect();
    for (i, row) in lp.a.iter().enumerate() {
        let mut e = LinExpr::new();
        for (j, &a) in row.iter().enumerate() {
            if a != 0.0 {
                e.add_term(vars[j], a);
            }
        }
        m.add_range(format!("r{i}"), &e, lp.rlo[i], lp.rhi[i]).unwrap();
    }
    let mut obj = LinExpr::new();
    for (j, &c) in lp.c.iter().enumerate() {
        obj.add_term(vars[j], c);
    }
    m.set_objective(&obj).unwrap();
    m
}
