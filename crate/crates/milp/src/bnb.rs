//! LP-based branch-and-bound for models with binary variables.
//!
//! Node LPs are warm-started from the parent's optimal basis and re-solved
//! with the dual simplex. Until the first incumbent is known the search
//! plunges depth-first along the rounding direction; afterwards nodes are
//! taken in the configured order. Fractional node solutions are passed to a
//! row-aware rounding heuristic, and periodic dives (fix the largest
//! fractional binary to one, re-solve, repeat) look for incumbents early.
//! The search is single-threaded and fully deterministic for a fixed model
//! and configuration.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::rc::Rc;
use std::time::{Duration, Instant};

use crate::model::{MilpModel, VarKind};
use crate::simplex::{Basis, LpData, LpOptions, LpStatus, Simplex};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchingRule {
    MostFractional,
    PseudoCost,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeOrder {
    BestBound,
    DepthFirst,
}

#[derive(Clone, Debug)]
pub struct BnbConfig {
    /// Stop when `(incumbent - bound) / max(1, |incumbent|)` falls to this value.
    pub relative_gap: f64,
    pub node_limit: Option<usize>,
    pub time_limit: Option<Duration>,
    pub branching: BranchingRule,
    pub node_order: NodeOrder,
    pub integrality_tol: f64,
    /// Try lock-free rounding of every fractional node solution.
    pub rounding: bool,
    /// Dive from the root and then from every n-th node; `None` disables diving.
    pub dive_every: Option<usize>,
    pub lp: LpOptions,
}

impl Default for BnbConfig {
    fn default() -> Self {
        BnbConfig {
            relative_gap: 1e-4,
            node_limit: None,
            time_limit: None,
            branching: BranchingRule::MostFractional,
            node_order: NodeOrder::BestBound,
            integrality_tol: 1e-6,
            rounding: true,
            dive_every: Some(20),
            lp: LpOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MilpStatus {
    /// Incumbent proven within the requested gap.
    Optimal,
    Infeasible,
    /// The relaxation is unbounded.
    Unbounded,
    /// Node or time limit hit; the incumbent, if any, is returned.
    Limit,
}

#[derive(Clone, Debug)]
pub struct MilpSolution {
    pub status: MilpStatus,
    /// Best integral assignment found, binaries snapped to 0/1.
    pub assignment: Option<Vec<f64>>,
    pub objective: f64,
    pub best_bound: f64,
    pub gap: f64,
    pub nodes: usize,
    pub lp_iterations: usize,
    pub elapsed: Duration,
}

impl MilpSolution {
    pub fn has_incumbent(&self) -> bool {
        self.assignment.is_some()
    }
}

/// Relative gap as reported by the search.
pub fn relative_gap(incumbent: f64, bound: f64) -> f64 {
    ((incumbent - bound) / incumbent.abs().max(1.0)).max(0.0)
}

pub fn solve_milp(model: &MilpModel, cfg: &BnbConfig) -> MilpSolution {
    solve_milp_with_start(model, cfg, None)
}

/// Like [`solve_milp`], seeding the incumbent from `start`: its binary
/// entries are fixed and the remaining LP is solved.
pub fn solve_milp_with_start(
    model: &MilpModel,
    cfg: &BnbConfig,
    start: Option<&[f64]>,
) -> MilpSolution {
    Search::new(model, cfg).run(start)
}

#[derive(Debug)]
struct Node {
    bound: f64,
    depth: usize,
    id: usize,
    fixes: Vec<(usize, f64, f64)>,
    basis: Option<Rc<Basis>>,
    branch: Option<BranchInfo>,
}

#[derive(Clone, Copy, Debug)]
struct BranchInfo {
    var: usize,
    up: bool,
    frac: f64,
    parent_obj: f64,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // Max-heap: the "greatest" node is the one with the smallest bound.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| self.depth.cmp(&other.depth))
            .then_with(|| other.id.cmp(&self.id))
    }
}

#[derive(Clone, Debug, Default)]
struct PseudoCosts {
    down_sum: Vec<f64>,
    down_n: Vec<u32>,
    up_sum: Vec<f64>,
    up_n: Vec<u32>,
}

impl PseudoCosts {
    fn new(n: usize) -> Self {
        PseudoCosts {
            down_sum: vec![0.0; n],
            down_n: vec![0; n],
            up_sum: vec![0.0; n],
            up_n: vec![0; n],
        }
    }

    fn record(&mut self, info: &BranchInfo, child_obj: f64) {
        let gain = (child_obj - info.parent_obj).max(0.0);
        if info.up {
            let unit = gain / (1.0 - info.frac).max(1e-6);
            self.up_sum[info.var] += unit;
            self.up_n[info.var] += 1;
        } else {
            let unit = gain / info.frac.max(1e-6);
            self.down_sum[info.var] += unit;
            self.down_n[info.var] += 1;
        }
    }

    fn averages(&self) -> (f64, f64) {
        let avg = |s: &[f64], n: &[u32]| {
            let (tot, cnt) = s
                .iter()
                .zip(n)
                .filter(|(_, &c)| c > 0)
                .fold((0.0, 0u32), |(t, k), (v, c)| (t + v / *c as f64, k + 1));
            if cnt == 0 {
                1.0
            } else {
                tot / cnt as f64
            }
        };
        (
            avg(&self.down_sum, &self.down_n),
            avg(&self.up_sum, &self.up_n),
        )
    }

    fn score(&self, j: usize, frac: f64, avg: (f64, f64)) -> f64 {
        let down = if self.down_n[j] > 0 {
            self.down_sum[j] / self.down_n[j] as f64
        } else {
            avg.0
        };
        let up = if self.up_n[j] > 0 {
            self.up_sum[j] / self.up_n[j] as f64
        } else {
            avg.1
        };
        (down * frac).max(1e-6) * (up * (1.0 - frac)).max(1e-6)
    }
}

struct Search<'m> {
    model: &'m MilpModel,
    cfg: &'m BnbConfig,
    data: LpData,
    ints: Vec<usize>,
    started: Instant,
    incumbent: Option<Vec<f64>>,
    incumbent_obj: f64,
    pruned_bound: f64,
    nodes: usize,
    lp_iterations: usize,
    next_id: usize,
    pseudo: PseudoCosts,
    /// Per column: (row, coefficient).
    cols: Vec<Vec<(usize, f64)>>,
    rows: Vec<RowData>,
}

struct RowData {
    terms: Vec<(usize, f64)>,
    lo: f64,
    hi: f64,
}

const ROUNDING_TOL: f64 = 1e-7;

impl<'m> Search<'m> {
    fn new(model: &'m MilpModel, cfg: &'m BnbConfig) -> Self {
        let data = LpData::from_model(model);
        let ints = model
            .vars()
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == VarKind::Binary)
            .map(|(j, _)| j)
            .collect();
        let mut cols = vec![Vec::new(); model.num_vars()];
        let rows = model
            .constraints()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let terms: Vec<(usize, f64)> = c.expr.terms.iter().map(|(v, a)| (v.0, *a)).collect();
                for &(j, a) in &terms {
                    cols[j].push((i, a));
                }
                let (lo, hi) = c.bounds();
                RowData { terms, lo, hi }
            })
            .collect();
        Search {
            cols,
            rows,
            model,
            cfg,
            pseudo: PseudoCosts::new(model.num_vars()),
            data,
            ints,
            started: Instant::now(),
            incumbent: None,
            incumbent_obj: f64::INFINITY,
            pruned_bound: f64::INFINITY,
            nodes: 0,
            lp_iterations: 0,
            next_id: 0,
        }
    }

    fn gap_tolerance(&self) -> f64 {
        self.cfg.relative_gap * self.incumbent_obj.abs().max(1.0)
    }

    /// True if a node with this bound cannot improve the incumbent enough.
    fn prunable(&self, bound: f64) -> bool {
        self.incumbent.is_some() && bound >= self.incumbent_obj - self.gap_tolerance()
    }

    fn note_pruned(&mut self, bound: f64) {
        if bound < self.incumbent_obj {
            self.pruned_bound = self.pruned_bound.min(bound);
        }
    }

    fn limits_hit(&self) -> bool {
        if let Some(n) = self.cfg.node_limit {
            if self.nodes >= n {
                return true;
            }
        }
        if let Some(t) = self.cfg.time_limit {
            if self.started.elapsed() >= t {
                return true;
            }
        }
        false
    }

    fn fractional(&self, x: &[f64]) -> Vec<(usize, f64)> {
        self.ints
            .iter()
            .filter_map(|&j| {
                let f = x[j] - x[j].floor();
                if f > self.cfg.integrality_tol && f < 1.0 - self.cfg.integrality_tol {
                    Some((j, f))
                } else {
                    None
                }
            })
            .collect()
    }

    fn choose_branch(&self, cands: &[(usize, f64)]) -> (usize, f64) {
        match self.cfg.branching {
            BranchingRule::MostFractional => *cands
                .iter()
                .max_by(|a, b| {
                    let fa = a.1.min(1.0 - a.1);
                    let fb = b.1.min(1.0 - b.1);
                    fa.total_cmp(&fb).then_with(|| b.0.cmp(&a.0))
                })
                .expect("candidates"),
            BranchingRule::PseudoCost => {
                let avg = self.pseudo.averages();
                *cands
                    .iter()
                    .max_by(|a, b| {
                        let sa = self.pseudo.score(a.0, a.1, avg);
                        let sb = self.pseudo.score(b.0, b.1, avg);
                        sa.total_cmp(&sb).then_with(|| b.0.cmp(&a.0))
                    })
                    .expect("candidates")
            }
        }
    }

    /// Rounds each fractional binary in whichever direction keeps every row
    /// it touches feasible, preferring the cheaper one. Continuous values are
    /// left alone, so success yields a feasible point.
    fn simple_round(&self, x: &[f64]) -> Option<Vec<f64>> {
        let cands = self.fractional(x);
        if cands.is_empty() {
            return Some(x.to_vec());
        }
        let mut act: Vec<f64> = self
            .rows
            .iter()
            .map(|r| r.terms.iter().map(|&(j, a)| a * x[j]).sum())
            .collect();
        let mut y = x.to_vec();
        for (j, f) in cands {
            let mut dirs = [-f, 1.0 - f];
            if self.data.cost[j] < 0.0 {
                dirs.swap(0, 1);
            }
            let ok = |d: f64, act: &[f64]| {
                self.cols[j].iter().all(|&(i, a)| {
                    let r = &self.rows[i];
                    let v = act[i] + a * d;
                    let tol = ROUNDING_TOL * (1.0 + v.abs());
                    v >= r.lo - tol && v <= r.hi + tol
                })
            };
            let d = dirs.into_iter().find(|&d| ok(d, &act))?;
            for &(i, a) in &self.cols[j] {
                act[i] += a * d;
            }
            y[j] = (x[j] + d).round();
        }
        Some(y)
    }

    /// Fixes the binary with the largest fractional value to one (falling
    /// back to zero when that is infeasible) and re-solves until the point
    /// rounds or the dive fails.
    fn dive(&mut self, x: &[f64], fixes: &[(usize, f64, f64)], basis: &Basis) {
        let mut sx = Simplex::new(&self.data, Some(basis), self.cfg.lp.clone());
        for &(j, lo, hi) in fixes {
            sx.set_bounds(j, lo, hi);
        }
        let mut x = x.to_vec();
        for _ in 0..=self.ints.len() {
            if let Some(y) = self.simple_round(&x) {
                self.offer_incumbent(&y);
                break;
            }
            let cands = self.fractional(&x);
            let Some(&(j, _)) = cands
                .iter()
                .max_by(|a, b| x[a.0].total_cmp(&x[b.0]).then_with(|| b.0.cmp(&a.0)))
            else {
                break;
            };
            sx.set_bounds(j, 1.0, 1.0);
            let mut status = sx.solve();
            self.lp_iterations += sx.iterations;
            sx.iterations = 0;
            if status == LpStatus::Infeasible {
                sx.set_bounds(j, 0.0, 0.0);
                status = sx.solve();
                self.lp_iterations += sx.iterations;
                sx.iterations = 0;
            }
            if status != LpStatus::Optimal || self.prunable(sx.objective()) {
                break;
            }
            x.copy_from_slice(sx.values());
        }
    }

    fn snap(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        for &j in &self.ints {
            out[j] = out[j].round();
        }
        out
    }

    fn offer_incumbent(&mut self, x: &[f64]) -> bool {
        let snapped = self.snap(x);
        let obj = self.model.eval_objective(&snapped);
        if obj < self.incumbent_obj {
            log::debug!("incumbent {obj} at node {}", self.nodes);
            self.incumbent_obj = obj;
            self.incumbent = Some(snapped);
            true
        } else {
            false
        }
    }

    fn try_start(&mut self, start: &[f64], root_basis: Option<&Basis>) {
        if start.len() != self.model.num_vars() {
            return;
        }
        let mut sx = Simplex::new(&self.data, root_basis, self.cfg.lp.clone());
        for &j in &self.ints {
            let v = start[j].round().clamp(self.data.lower[j], self.data.upper[j]);
            sx.set_bounds(j, v, v);
        }
        let status = sx.solve();
        self.lp_iterations += sx.iterations;
        if status == LpStatus::Optimal {
            let x = sx.values().to_vec();
            self.offer_incumbent(&x);
        }
    }

    fn run(mut self, start: Option<&[f64]>) -> MilpSolution {
        let mut root = Simplex::new(&self.data, None, self.cfg.lp.clone());
        let status = root.solve();
        self.lp_iterations += root.iterations;
        self.nodes = 1;
        match status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => return self.finish(MilpStatus::Infeasible, f64::INFINITY),
            LpStatus::Unbounded => {
                return self.finish(MilpStatus::Unbounded, f64::NEG_INFINITY)
            }
            LpStatus::IterationLimit | LpStatus::Numerical => {
                return self.finish(MilpStatus::Limit, f64::NEG_INFINITY)
            }
        }
        let root_obj = root.objective();
        let root_x = root.values().to_vec();
        let root_basis = Rc::new(root.basis());
        drop(root);

        if let Some(s) = start {
            self.try_start(s, Some(&root_basis));
        }

        let cands = self.fractional(&root_x);
        if cands.is_empty() {
            self.offer_incumbent(&root_x);
            return self.finish(MilpStatus::Optimal, root_obj);
        }
        self.heuristics(&root_x, &[], &root_basis, true);
        if self.prunable(root_obj) {
            return self.finish(MilpStatus::Optimal, root_obj);
        }

        let mut heap: BinaryHeap<Node> = BinaryHeap::new();
        let mut stack: Vec<Node> = Vec::new();
        let mut unresolved = f64::INFINITY;
        let mut next = self.branch(
            &root_x,
            root_obj,
            &cands,
            &[],
            0,
            &root_basis,
            &mut heap,
            &mut stack,
        );

        loop {
            let node = match next.take() {
                Some(n) => n,
                None => match self.pop(&mut heap, &mut stack) {
                    Some(n) => n,
                    None => break,
                },
            };
            if self.prunable(node.bound) {
                self.note_pruned(node.bound);
                continue;
            }
            if self.limits_hit() {
                let open_min = heap
                    .iter()
                    .chain(stack.iter())
                    .map(|n| n.bound)
                    .fold(node.bound, f64::min);
                let bound = open_min.min(unresolved);
                return self.finish(MilpStatus::Limit, bound);
            }
            self.nodes += 1;
            if self.nodes % 1000 == 0 {
                log::debug!(
                    "nodes {} open {} incumbent {} elapsed {:?}",
                    self.nodes,
                    heap.len() + stack.len(),
                    self.incumbent_obj,
                    self.started.elapsed()
                );
            }

            let mut sx = Simplex::new(&self.data, node.basis.as_deref(), self.cfg.lp.clone());
            for &(j, lo, hi) in &node.fixes {
                sx.set_bounds(j, lo, hi);
            }
            let status = sx.solve();
            self.lp_iterations += sx.iterations;
            match status {
                LpStatus::Optimal => {}
                LpStatus::Infeasible => continue,
                _ => {
                    unresolved = unresolved.min(node.bound);
                    continue;
                }
            }
            let obj = sx.objective();
            if let Some(info) = node.branch {
                self.pseudo.record(&info, obj);
            }
            if self.prunable(obj) {
                self.note_pruned(obj);
                continue;
            }
            let x = sx.values().to_vec();
            let cands = self.fractional(&x);
            if cands.is_empty() {
                self.offer_incumbent(&x);
                continue;
            }
            let basis = Rc::new(sx.basis());
            drop(sx);
            let dive = matches!(self.cfg.dive_every, Some(k) if k > 0 && self.nodes % k == 0);
            self.heuristics(&x, &node.fixes, &basis, dive);
            if self.prunable(obj) {
                self.note_pruned(obj);
                continue;
            }
            next = self.branch(
                &x,
                obj,
                &cands,
                &node.fixes,
                node.depth + 1,
                &basis,
                &mut heap,
                &mut stack,
            );
        }
        let bound = unresolved.min(self.pruned_bound).min(self.incumbent_obj);
        if self.incumbent.is_none() {
            if unresolved.is_finite() {
                return self.finish(MilpStatus::Limit, unresolved);
            }
            return self.finish(MilpStatus::Infeasible, f64::INFINITY);
        }
        if unresolved.is_finite() {
            return self.finish(MilpStatus::Limit, bound);
        }
        self.finish(MilpStatus::Optimal, bound)
    }

    fn heuristics(&mut self, x: &[f64], fixes: &[(usize, f64, f64)], basis: &Basis, dive: bool) {
        if self.cfg.rounding {
            if let Some(y) = self.simple_round(x) {
                self.offer_incumbent(&y);
                return;
            }
        }
        if dive && self.cfg.dive_every.is_some() {
            self.dive(x, fixes, basis);
        }
    }

    fn pop(&self, heap: &mut BinaryHeap<Node>, stack: &mut Vec<Node>) -> Option<Node> {
        if let Some(n) = stack.pop() {
            return Some(n);
        }
        heap.pop()
    }

    /// Creates both children; returns the one to process next when plunging.
    #[allow(clippy::too_many_arguments)]
    fn branch(
        &mut self,
        x: &[f64],
        obj: f64,
        cands: &[(usize, f64)],
        fixes: &[(usize, f64, f64)],
        depth: usize,
        basis: &Rc<Basis>,
        heap: &mut BinaryHeap<Node>,
        stack: &mut Vec<Node>,
    ) -> Option<Node> {
        let (j, frac) = self.choose_branch(cands);
        let v = x[j];
        let make = |up: bool, this: &mut Self| {
            let mut f = fixes.to_vec();
            let (lo, hi) = current_bounds(&this.data, fixes, j);
            if up {
                f.push((j, v.ceil().max(lo), hi));
            } else {
                f.push((j, lo, v.floor().min(hi)));
            }
            this.next_id += 1;
            Node {
                bound: obj,
                depth,
                id: this.next_id,
                fixes: f,
                basis: Some(Rc::clone(basis)),
                branch: Some(BranchInfo {
                    var: j,
                    up,
                    frac,
                    parent_obj: obj,
                }),
            }
        };
        let prefer_up = frac >= 0.5;
        let first = make(prefer_up, self);
        let second = make(!prefer_up, self);
        let plunge = self.incumbent.is_none() || self.cfg.node_order == NodeOrder::DepthFirst;
        if plunge {
            if self.cfg.node_order == NodeOrder::DepthFirst {
                stack.push(second);
            } else {
                heap.push(second);
            }
            Some(first)
        } else {
            heap.push(first);
            heap.push(second);
            None
        }
    }

    fn finish(self, status: MilpStatus, bound: f64) -> MilpSolution {
        let (objective, gap, best_bound) = match &self.incumbent {
            Some(_) => {
                let b = bound.min(self.incumbent_obj);
                (self.incumbent_obj, relative_gap(self.incumbent_obj, b), b)
            }
            None => (f64::INFINITY, f64::INFINITY, bound),
        };
        MilpSolution {
            status,
            assignment: self.incumbent,
            objective,
            best_bound,
            gap,
            nodes: self.nodes,
            lp_iterations: self.lp_iterations,
            elapsed: self.started.elapsed(),
        }
    }
}

fn current_bounds(data: &LpData, fixes: &[(usize, f64, f64)], j: usize) -> (f64, f64) {
    fixes
        .iter()
        .rev()
        .find(|f| f.0 == j)
        .map(|f| (f.1, f.2))
        .unwrap_or((data.lower[j], data.upper[j]))
}
