//! Brute-force reference solvers used by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use tapdispatch_milp::{LinExpr, MilpModel, VarKind};

/// Dense LP `min c x` s.t. `rlo <= A x <= rhi`, `lo <= x <= hi`, all bounds finite
/// on the variables.
#[derive(Clone, Debug)]
pub struct DenseLp {
    pub c: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub rlo: Vec<f64>,
    pub rhi: Vec<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

fn solve_square(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))?;
        if m[p][k].abs() < 1e-10 {
            return None;
        }
        m.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                m[i][j] -= f * m[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| m[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / m[k][k];
    }
    Some(x)
}

impl DenseLp {
    pub fn feasible(&self, x: &[f64], tol: f64) -> bool {
        let n = self.c.len();
        (0..n).all(|j| x[j] >= self.lo[j] - tol && x[j] <= self.hi[j] + tol)
            && self.a.iter().enumerate().all(|(i, row)| {
                let v: f64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
                v >= self.rlo[i] - tol && v <= self.rhi[i] + tol
            })
    }

    /// Optimal value by vertex enumeration; `None` if infeasible. The
    /// variable box makes the feasible set a polytope, so an optimum, if
    /// any, sits at a vertex.
    pub fn vertex_optimum(&self) -> Option<f64> {
        let n = self.c.len();
        let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            planes.push((e.clone(), self.lo[j]));
            planes.push((e, self.hi[j]));
        }
        for (i, row) in self.a.iter().enumerate() {
            if self.rlo[i].is_finite() {
                planes.push((row.clone(), self.rlo[i]));
            }
            if self.rhi[i].is_finite() {
                planes.push((row.clone(), self.rhi[i]));
            }
        }
        let mut best: Option<f64> = None;
        let mut pick = vec![0usize; n];
        fn rec(
            lp: &DenseLp,
            planes: &[(Vec<f64>, f64)],
            pick: &mut Vec<usize>,
            depth: usize,
            start: usize,
            best: &mut Option<f64>,
        ) {
            let n = pick.len();
            if depth == n {
                let m: Vec<Vec<f64>> = pick.iter().map(|&p| planes[p].0.clone()).collect();
                let b: Vec<f64> = pick.iter().map(|&p| planes[p].1).collect();
                if let Some(x) = solve_square(m, b) {
                    if lp.feasible(&x, 1e-7) {
                        let v: f64 = lp.c.iter().zip(&x).map(|(a, b)| a * b).sum();
                        if best.map_or(true, |b| v < b) {
                            *best = Some(v);
                        }
                    }
                }
                return;
            }
            for p in start..planes.len() {
                pick[depth] = p;
                rec(lp, planes, pick, depth + 1, p + 1, best);
            }
        }
        rec(self, &planes, &mut pick, 0, 0, &mut best);
        best
    }

    pub fn to_model(&self, binaries: &[usize]) -> MilpModel {
        let mut m = MilpModel::new("dense");
        let vars: Vec<_> = (0..self.c.len())
            .map(|j| {
                let kind = if binaries.contains(&j) {
                    VarKind::Binary
                } else {
                    VarKind::Continuous
                };
                m.add_var(format!("x{j}"), kind, self.lo[j], self.hi[j]).unwrap()
            })
            .collect();
        for (i, row) in self.a.iter().enumerate() {
            let mut e = LinExpr::new();
            for (j, &a) in row.iter().enumerate() {
                e.add_term(vars[j], a);
            }
            m.add_range(format!("r{i}"), &e, self.rlo[i], self.rhi[i]).unwrap();
        }
        let mut obj = LinExpr::new();
        for (j, &c) in self.c.iter().enumerate() {
            obj.add_term(vars[j], c);
        }
        m.set_objective(&obj).unwrap();
        m
    }
}

fn small_int<R: Rng>(rng: &mut R, lo: i32, hi: i32) -> f64 {
    rng.gen_range(lo..=hi) as f64
}

/// Random boxed LP; row bounds are drawn around a random interior point so
/// most instances are feasible, with an occasional deliberately infeasible row.
pub fn random_lp<R: Rng>(rng: &mut R, n: usize, m: usize) -> DenseLp {
    let lo: Vec<f64> = (0..n).map(|_| small_int(rng, -4, 1)).collect();
    let hi: Vec<f64> = lo.iter().map(|l| l + small_int(rng, 0, 5)).collect();
    let x0: Vec<f64> = (0..n).map(|j| rng.gen_range(lo[j]..=hi[j])).collect();
    let c = (0..n).map(|_| small_int(rng, -5, 5)).collect();
    let mut a = Vec::new();
    let mut rlo = Vec::new();
    let mut rhi = Vec::new();
    for _ in 0..m {
        let row: Vec<f64> = (0..n)
            .map(|_| if rng.gen_bool(0.3) { 0.0 } else { small_int(rng, -3, 3) })
            .collect();
        let v: f64 = row.iter().zip(&x0).map(|(a, b)| a * b).sum();
        let shift = if rng.gen_bool(0.1) { 50.0 } else { 0.0 };
        match rng.gen_range(0..4) {
            0 => {
                rlo.push(f64::NEG_INFINITY);
                rhi.push((v + rng.gen_range(0.0..2.0)).round() - shift);
            }
            1 => {
                rlo.push((v - rng.gen_range(0.0..2.0)).round() + shift);
                rhi.push(f64::INFINITY);
            }
            2 => {
                let l = (v - rng.gen_range(0.0..2.0)).floor() + shift;
                rlo.push(l);
                rhi.push(l + small_int(rng, 0, 3));
            }
            _ => {
                rlo.push(v + shift);
                rhi.push(v + shift);
            }
        }
        a.push(row);
    }
    DenseLp { c, a, rlo, rhi, lo, hi }
}
