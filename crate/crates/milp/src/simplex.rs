//! Bounded-variable revised simplex (primal and dual) on the computational
//! form `A x - s = 0`, `l <= x <= u`, `lr <= s <= ur`.
//!
//! Every row gets a logical variable `s_i` whose column is `-e_i`, so the
//! all-logical basis is always available as a starting point. Cold starts
//! run the dual simplex when every nonbasic variable can be placed at a
//! dual-feasible bound (true whenever all variables are boxed) and fall
//! back to a composite primal phase 1 otherwise. Warm starts after bound
//! changes go straight to the dual simplex.

use crate::lu::{Factor, SparseCol};
use crate::model::MilpModel;

/// Outcome of a linear solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    /// The basis could not be kept well-conditioned.
    Numerical,
}

#[derive(Clone, Debug)]
pub struct LpOptions {
    /// Primal feasibility tolerance on bounds.
    pub feasibility_tol: f64,
    /// Dual feasibility (optimality) tolerance on reduced costs.
    pub optimality_tol: f64,
    pub max_iterations: Option<usize>,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub bland_after: usize,
    /// Basis updates between refactorizations.
    pub refactor_every: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            feasibility_tol: 1e-8,
            optimality_tol: 1e-7,
            max_iterations: None,
            bland_after: 1000,
            refactor_every: 64,
        }
    }
}

/// Result of [`solve_lp`].
#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    /// Values of the model variables.
    pub primal: Vec<f64>,
    /// Row duals: sensitivity of the objective to each row's active bound.
    pub duals: Vec<f64>,
    /// Reduced costs of the model variables.
    pub reduced_costs: Vec<f64>,
    pub iterations: usize,
    /// For `Unbounded`: an improving primal ray over the variables.
    /// For `Infeasible`: row multipliers `y` such that `y^T (A x - s)` cannot
    /// vanish for any `x`, `s` inside their bounds.
    pub certificate: Option<Vec<f64>>,
}

/// Solves the linear relaxation of `model` (integrality is ignored).
pub fn solve_lp(model: &MilpModel) -> LpSolution {
    solve_lp_with(model, &LpOptions::default())
}

pub fn solve_lp_with(model: &MilpModel, opts: &LpOptions) -> LpSolution {
    let data = LpData::from_model(model);
    let mut sx = Simplex::new(&data, None, opts.clone());
    let status = sx.solve();
    sx.solution(status)
}

/// Compiled column-major and row-major copies of the constraint matrix.
#[derive(Clone, Debug)]
pub(crate) struct LpData {
    pub m: usize,
    pub n: usize,
    col_start: Vec<usize>,
    col_rows: Vec<usize>,
    col_vals: Vec<f64>,
    row_start: Vec<usize>,
    row_cols: Vec<usize>,
    row_vals: Vec<f64>,
    /// Costs of structurals then logicals (always zero).
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub offset: f64,
    identity_rows: Vec<usize>,
    neg_one: [f64; 1],
}

impl LpData {
    pub fn from_model(model: &MilpModel) -> Self {
        let n = model.num_vars();
        let m = model.num_constraints();
        let mut counts = vec![0usize; n];
        let mut row_start = Vec::with_capacity(m + 1);
        let mut row_cols = Vec::new();
        let mut row_vals = Vec::new();
        let mut lower = Vec::with_capacity(n + m);
        let mut upper = Vec::with_capacity(n + m);
        for v in model.vars() {
            lower.push(v.lower);
            upper.push(v.upper);
        }
        for c in model.constraints() {
            row_start.push(row_cols.len());
            for &(v, a) in &c.expr.terms {
                row_cols.push(v.0);
                row_vals.push(a);
                counts[v.0] += 1;
            }
            let (lo, hi) = c.bounds();
            lower.push(lo);
            upper.push(hi);
        }
        row_start.push(row_cols.len());
        let mut col_start = vec![0usize; n + 1];
        for j in 0..n {
            col_start[j + 1] = col_start[j] + counts[j];
        }
        let mut fill = col_start.clone();
        let mut col_rows = vec![0usize; row_cols.len()];
        let mut col_vals = vec![0.0; row_cols.len()];
        for i in 0..m {
            for p in row_start[i]..row_start[i + 1] {
                let j = row_cols[p];
                col_rows[fill[j]] = i;
                col_vals[fill[j]] = row_vals[p];
                fill[j] += 1;
            }
        }
        let mut cost = vec![0.0; n + m];
        for &(v, c) in &model.objective().terms {
            cost[v.0] += c;
        }
        LpData {
            m,
            n,
            col_start,
            col_rows,
            col_vals,
            row_start,
            row_cols,
            row_vals,
            cost,
            lower,
            upper,
            offset: model.objective().constant,
            identity_rows: (0..m).collect(),
            neg_one: [-1.0],
        }
    }

    /// Column `j` of `[A  -I]`.
    pub fn column(&self, j: usize) -> SparseCol<'_> {
        if j < self.n {
            let (a, b) = (self.col_start[j], self.col_start[j + 1]);
            SparseCol {
                rows: &self.col_rows[a..b],
                vals: &self.col_vals[a..b],
            }
        } else {
            let i = j - self.n;
            SparseCol {
                rows: &self.identity_rows[i..i + 1],
                vals: &self.neg_one,
            }
        }
    }

    fn dot_column(&self, j: usize, y: &[f64]) -> f64 {
        if j < self.n {
            let mut s = 0.0;
            for p in self.col_start[j]..self.col_start[j + 1] {
                s += self.col_vals[p] * y[self.col_rows[p]];
            }
            s
        } else {
            -y[j - self.n]
        }
    }

    fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_start[i], self.row_start[i + 1]);
        (&self.row_cols[a..b], &self.row_vals[a..b])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum VarState {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic at zero with both bounds infinite.
    Free,
}

/// Warm-start information: basic variables per position and nonbasic states.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Basis {
    head: Vec<usize>,
    state: Vec<VarState>,
}

const PIVOT_TOL: f64 = 1e-9;
const DROP_TOL: f64 = 1e-14;
const DEGENERATE_STEP: f64 = 1e-12;

pub(crate) struct Simplex<'a> {
    data: &'a LpData,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    state: Vec<VarState>,
    head: Vec<usize>,
    x: Vec<f64>,
    d: Vec<f64>,
    factor: Option<Factor>,
    pub iterations: usize,
    max_iterations: usize,
    opts: LpOptions,
    certificate: Option<Vec<f64>>,
    ray: Option<Vec<f64>>,
    // scratch
    col: Vec<f64>,
    rho: Vec<f64>,
    alpha: Vec<f64>,
    alpha_touched: Vec<usize>,
}

impl<'a> Simplex<'a> {
    pub fn new(data: &'a LpData, basis: Option<&Basis>, opts: LpOptions) -> Self {
        let (m, n) = (data.m, data.n);
        let total = n + m;
        let max_iterations = opts
            .max_iterations
            .unwrap_or(20 * total + 10_000);
        let mut sx = Simplex {
            data,
            lower: data.lower.clone(),
            upper: data.upper.clone(),
            state: vec![VarState::AtLower; total],
            head: (n..total).collect(),
            x: vec![0.0; total],
            d: vec![0.0; total],
            factor: None,
            iterations: 0,
            max_iterations,
            opts,
            certificate: None,
            ray: None,
            col: vec![0.0; m],
            rho: vec![0.0; m],
            alpha: vec![0.0; total],
            alpha_touched: Vec::new(),
        };
        match basis {
            Some(b) if b.head.len() == m && b.state.len() == total => {
                sx.head = b.head.clone();
                sx.state = b.state.clone();
            }
            _ => {
                for i in 0..m {
                    sx.state[n + i] = VarState::Basic;
                }
                for j in 0..n {
                    sx.state[j] = VarState::AtLower;
                }
            }
        }
        sx.place_nonbasics();
        sx
    }

    /// Tightens or relaxes the bounds of variable `j`.
    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        self.lower[j] = lower;
        self.upper[j] = upper;
        if self.state[j] != VarState::Basic {
            self.state[j] = self.nonbasic_state_for(j, self.state[j]);
            self.x[j] = self.nonbasic_value(j);
        }
        self.factor = None;
    }

    pub fn basis(&self) -> Basis {
        Basis {
            head: self.head.clone(),
            state: self.state.clone(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.x[..self.data.n]
    }

    pub fn objective(&self) -> f64 {
        let c = &self.data.cost;
        self.data.offset
            + (0..self.data.n)
                .map(|j| c[j] * self.x[j])
                .sum::<f64>()
    }

    fn nonbasic_state_for(&self, j: usize, prefer: VarState) -> VarState {
        let (lo, hi) = (self.lower[j], self.upper[j]);
        match (lo.is_finite(), hi.is_finite()) {
            (false, false) => VarState::Free,
            (true, false) => VarState::AtLower,
            (false, true) => VarState::AtUpper,
            (true, true) => {
                if prefer == VarState::AtUpper && lo < hi {
                    VarState::AtUpper
                } else if prefer == VarState::AtLower || prefer == VarState::AtUpper {
                    VarState::AtLower
                } else if lo.abs() <= hi.abs() {
                    VarState::AtLower
                } else {
                    VarState::AtUpper
                }
            }
        }
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.state[j] {
            VarState::AtLower => self.lower[j],
            VarState::AtUpper => self.upper[j],
            VarState::Free | VarState::Basic => 0.0,
        }
    }

    fn place_nonbasics(&mut self) {
        for j in 0..self.state.len() {
            if self.state[j] != VarState::Basic {
                self.state[j] = self.nonbasic_state_for(j, self.state[j]);
                self.x[j] = self.nonbasic_value(j);
            }
        }
    }

    fn refactor(&mut self) -> bool {
        let data = self.data;
        let n = data.n;
        for _attempt in 0..data.m.max(1) + 1 {
            let head = &self.head;
            match Factor::new(data.m, |k| data.column(head[k])) {
                Ok(f) => {
                    self.factor = Some(f);
                    self.recompute_basic_values();
                    return true;
                }
                Err(sing) => {
                    log::debug!("singular basis, replacing {} columns", sing.positions.len());
                    for (&pos, &row) in sing.positions.iter().zip(&sing.rows) {
                        let old = self.head[pos];
                        let logical = n + row;
                        self.head[pos] = logical;
                        self.state[logical] = VarState::Basic;
                        let prefer = if (self.x[old] - self.lower[old]).abs()
                            <= (self.upper[old] - self.x[old]).abs()
                        {
                            VarState::AtLower
                        } else {
                            VarState::AtUpper
                        };
                        self.state[old] = self.nonbasic_state_for(old, prefer);
                        self.x[old] = self.nonbasic_value(old);
                    }
                }
            }
        }
        false
    }

    fn needs_refactor(&self) -> bool {
        match &self.factor {
            None => true,
            Some(f) => {
                f.num_updates() >= self.opts.refactor_every
                    || (f.num_updates() > 8 && f.eta_nnz() > 2 * f.lu_nnz() + 4 * self.data.m)
            }
        }
    }

    fn factor_is_fresh(&self) -> bool {
        self.factor.as_ref().map_or(false, |f| f.num_updates() == 0)
    }

    /// x_B = B^{-1} (-N x_N)
    fn recompute_basic_values(&mut self) {
        let data = self.data;
        let rhs = &mut self.col;
        rhs.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..data.n + data.m {
            if self.state[j] == VarState::Basic {
                continue;
            }
            let xj = self.x[j];
            if xj == 0.0 {
                continue;
            }
            let c = data.column(j);
            for (&r, &a) in c.rows.iter().zip(c.vals) {
                rhs[r] -= a * xj;
            }
        }
        let f = self.factor.as_mut().expect("factor");
        f.ftran(rhs);
        for (pos, &j) in self.head.iter().enumerate() {
            self.x[j] = rhs[pos];
        }
    }

    /// Recomputes reduced costs for the given basic cost vector (by position).
    fn compute_reduced_costs(&mut self, cb: &mut Vec<f64>, phase_one: bool) {
        let data = self.data;
        self.factor.as_mut().expect("factor").btran(cb);
        let y = &*cb;
        for j in 0..data.n + data.m {
            if self.state[j] == VarState::Basic {
                self.d[j] = 0.0;
            } else {
                let c = if phase_one { 0.0 } else { data.cost[j] };
                self.d[j] = c - data.dot_column(j, y);
            }
        }
    }

    fn phase_two_duals(&mut self) -> Vec<f64> {
        let mut cb: Vec<f64> = self.head.iter().map(|&j| self.data.cost[j]).collect();
        self.compute_reduced_costs(&mut cb, false);
        cb
    }

    fn infeasibility(&self, j: usize) -> f64 {
        let x = self.x[j];
        if x < self.lower[j] {
            self.lower[j] - x
        } else if x > self.upper[j] {
            x - self.upper[j]
        } else {
            0.0
        }
    }

    fn movable(&self, j: usize) -> bool {
        self.lower[j] < self.upper[j]
    }

    /// Places boxed nonbasics on their dual-feasible bound. Returns false if
    /// some nonbasic with an infinite bound has a wrong-signed reduced cost.
    fn make_dual_feasible(&mut self) -> bool {
        let tol = self.opts.optimality_tol;
        let mut flipped = false;
        for j in 0..self.state.len() {
            if !self.movable(j) {
                continue;
            }
            let d = self.d[j];
            match self.state[j] {
                VarState::Basic => {}
                VarState::AtLower if d < -tol => {
                    if self.upper[j].is_finite() {
                        self.state[j] = VarState::AtUpper;
                        self.x[j] = self.upper[j];
                        flipped = true;
                    } else {
                        return false;
                    }
                }
                VarState::AtUpper if d > tol => {
                    if self.lower[j].is_finite() {
                        self.state[j] = VarState::AtLower;
                        self.x[j] = self.lower[j];
                        flipped = true;
                    } else {
                        return false;
                    }
                }
                VarState::Free if d.abs() > tol => return false,
                _ => {}
            }
        }
        if flipped {
            self.recompute_basic_values();
        }
        true
    }

    fn dual_infeasibility(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.state.len() {
            if !self.movable(j) {
                continue;
            }
            let d = self.d[j];
            let v = match self.state[j] {
                VarState::Basic => 0.0,
                VarState::AtLower => (-d).max(0.0),
                VarState::AtUpper => d.max(0.0),
                VarState::Free => d.abs(),
            };
            worst = worst.max(v);
        }
        worst
    }

    pub fn solve(&mut self) -> LpStatus {
        self.certificate = None;
        self.ray = None;
        if !self.refactor() {
            return LpStatus::Numerical;
        }
        self.phase_two_duals();
        let status = if self.make_dual_feasible() {
            match self.dual() {
                LpStatus::Optimal => {
                    if self.dual_infeasibility() > self.opts.optimality_tol {
                        self.primal()
                    } else {
                        LpStatus::Optimal
                    }
                }
                LpStatus::Numerical => self.primal(),
                other => other,
            }
        } else {
            self.primal()
        };
        if status == LpStatus::Optimal {
            // Final duals from a fresh factorization.
            if !self.factor_is_fresh() && !self.refactor() {
                return LpStatus::Numerical;
            }
            self.phase_two_duals();
        }
        status
    }

    fn dual(&mut self) -> LpStatus {
        let ptol = self.opts.feasibility_tol;
        let dtol = self.opts.optimality_tol;
        let data = self.data;
        let n = data.n;
        let mut retries = 0;
        loop {
            if self.iterations >= self.max_iterations {
                return LpStatus::IterationLimit;
            }
            if self.needs_refactor() {
                if !self.refactor() {
                    return LpStatus::Numerical;
                }
                self.phase_two_duals();
                if self.dual_infeasibility() > 10.0 * dtol {
                    // Lost dual feasibility through drift; let the caller switch.
                    if !self.make_dual_feasible() {
                        return LpStatus::Numerical;
                    }
                }
            }
            // Leaving row: largest bound violation.
            let mut r = usize::MAX;
            let mut worst = ptol;
            for (pos, &j) in self.head.iter().enumerate() {
                let v = self.infeasibility(j);
                if v > worst {
                    worst = v;
                    r = pos;
                }
            }
            if r == usize::MAX {
                if self.factor_is_fresh() {
                    return LpStatus::Optimal;
                }
                self.factor = None;
                continue;
            }
            let leaving = self.head[r];
            let to_lower = self.x[leaving] < self.lower[leaving];
            let target = if to_lower {
                self.lower[leaving]
            } else {
                self.upper[leaving]
            };

            // rho = B^{-T} e_r, then the pivot row alpha = rho^T [A -I].
            self.rho.iter_mut().for_each(|v| *v = 0.0);
            self.rho[r] = 1.0;
            {
                let f = self.factor.as_mut().expect("factor");
                f.btran(&mut self.rho);
            }
            for &j in &self.alpha_touched {
                self.alpha[j] = 0.0;
            }
            self.alpha_touched.clear();
            for i in 0..data.m {
                let ri = self.rho[i];
                if ri.abs() <= DROP_TOL {
                    continue;
                }
                let (cols, vals) = data.row(i);
                for (&j, &a) in cols.iter().zip(vals) {
                    if self.alpha[j] == 0.0 {
                        self.alpha_touched.push(j);
                    }
                    self.alpha[j] += ri * a;
                    if self.alpha[j] == 0.0 {
                        self.alpha[j] = f64::MIN_POSITIVE;
                    }
                }
                self.alpha[n + i] = -ri;
                self.alpha_touched.push(n + i);
            }

            // Harris two-pass ratio test on the duals.
            let eligible = |sx: &Self, j: usize| -> Option<f64> {
                if sx.state[j] == VarState::Basic || !sx.movable(j) {
                    return None;
                }
                let a = sx.alpha[j];
                if a.abs() <= PIVOT_TOL {
                    return None;
                }
                // x_r changes by -a * dx_j; we need it to move towards target.
                let ok = match sx.state[j] {
                    VarState::AtLower => (to_lower && a < 0.0) || (!to_lower && a > 0.0),
                    VarState::AtUpper => (to_lower && a > 0.0) || (!to_lower && a < 0.0),
                    VarState::Free => true,
                    VarState::Basic => false,
                };
                if !ok {
                    return None;
                }
                let slack = match sx.state[j] {
                    VarState::AtLower => sx.d[j].max(0.0),
                    VarState::AtUpper => (-sx.d[j]).max(0.0),
                    _ => sx.d[j].abs(),
                };
                Some(slack)
            };
            let mut tmax = f64::INFINITY;
            for &j in &self.alpha_touched {
                if let Some(s) = eligible(self, j) {
                    tmax = tmax.min((s + dtol) / self.alpha[j].abs());
                }
            }
            if tmax == f64::INFINITY {
                if !self.factor_is_fresh() && retries < 3 {
                    retries += 1;
                    self.factor = None;
                    continue;
                }
                self.certificate = Some(self.rho.clone());
                return LpStatus::Infeasible;
            }
            let mut q = usize::MAX;
            let mut best = 0.0;
            for &j in &self.alpha_touched {
                if let Some(s) = eligible(self, j) {
                    let a = self.alpha[j].abs();
                    if s / a <= tmax && (a > best || (a == best && j < q)) {
                        best = a;
                        q = j;
                    }
                }
            }
            let alpha_q = self.alpha[q];
            let theta_d = self.d[q] / alpha_q;

            // Entering column.
            self.load_column(q);
            {
                let f = self.factor.as_mut().expect("factor");
                f.ftran(&mut self.col);
            }
            let w_r = self.col[r];
            if (w_r - alpha_q).abs() > 1e-7 * (1.0 + alpha_q.abs()) || w_r.abs() <= PIVOT_TOL {
                // Row and column disagree: refactor and retry.
                if retries < 5 {
                    retries += 1;
                    self.factor = None;
                    continue;
                }
                return LpStatus::Numerical;
            }
            retries = 0;

            let delta_q = (self.x[leaving] - target) / w_r;
            self.x[q] += delta_q;
            for (pos, &j) in self.head.iter().enumerate() {
                let w = self.col[pos];
                if w != 0.0 {
                    self.x[j] -= delta_q * w;
                }
            }
            self.x[leaving] = target;

            for &j in &self.alpha_touched {
                if self.state[j] != VarState::Basic {
                    self.d[j] -= theta_d * self.alpha[j];
                }
            }
            self.d[q] = 0.0;
            self.d[leaving] = -theta_d;

            self.head[r] = q;
            self.state[q] = VarState::Basic;
            self.state[leaving] = if to_lower {
                VarState::AtLower
            } else {
                VarState::AtUpper
            };
            if self.lower[leaving] == self.upper[leaving] {
                self.state[leaving] = VarState::AtLower;
            }
            self.factor.as_mut().expect("factor").update(r, &self.col);
            self.iterations += 1;
        }
    }

    fn load_column(&mut self, j: usize) {
        self.col.iter_mut().for_each(|v| *v = 0.0);
        let c = self.data.column(j);
        for (&r, &a) in c.rows.iter().zip(c.vals) {
            self.col[r] = a;
        }
    }

    fn primal(&mut self) -> LpStatus {
        let ptol = self.opts.feasibility_tol;
        let dtol = self.opts.optimality_tol;
        let total = self.state.len();
        let mut degenerate_run = 0usize;
        let mut bland = false;
        let mut retries = 0;
        loop {
            if self.iterations >= self.max_iterations {
                return LpStatus::IterationLimit;
            }
            if self.needs_refactor() && !self.refactor() {
                return LpStatus::Numerical;
            }
            // Phase-one costs on infeasible basics.
            let mut phase_one = false;
            let mut cb: Vec<f64> = Vec::with_capacity(self.head.len());
            for &j in &self.head {
                let x = self.x[j];
                let c = if x < self.lower[j] - ptol {
                    phase_one = true;
                    -1.0
                } else if x > self.upper[j] + ptol {
                    phase_one = true;
                    1.0
                } else {
                    0.0
                };
                cb.push(c);
            }
            if !phase_one {
                cb = self.head.iter().map(|&j| self.data.cost[j]).collect();
            }
            self.compute_reduced_costs(&mut cb, phase_one);

            // Pricing.
            let mut q = usize::MAX;
            let mut best = 0.0;
            let mut dir = 0.0;
            for j in 0..total {
                if self.state[j] == VarState::Basic || !self.movable(j) {
                    continue;
                }
                let d = self.d[j];
                let (score, dj) = match self.state[j] {
                    VarState::AtLower if d < -dtol => (-d, 1.0),
                    VarState::AtUpper if d > dtol => (d, -1.0),
                    VarState::Free if d.abs() > dtol => (d.abs(), -d.signum()),
                    _ => continue,
                };
                if bland {
                    q = j;
                    dir = dj;
                    break;
                }
                if score > best {
                    best = score;
                    q = j;
                    dir = dj;
                }
            }
            if q == usize::MAX {
                if !self.factor_is_fresh() {
                    self.factor = None;
                    continue;
                }
                if phase_one {
                    self.certificate = Some(cb);
                    return LpStatus::Infeasible;
                }
                return LpStatus::Optimal;
            }

            self.load_column(q);
            {
                let f = self.factor.as_mut().expect("factor");
                f.ftran(&mut self.col);
            }

            // Harris ratio test. rate = change of x_b per unit step.
            let limit_of = |sx: &Self, pos: usize| -> Option<(f64, f64, f64)> {
                let w = sx.col[pos];
                if w.abs() <= PIVOT_TOL {
                    return None;
                }
                let b = sx.head[pos];
                let rate = -dir * w;
                let x = sx.x[b];
                let bound = if rate > 0.0 {
                    if x < sx.lower[b] - ptol {
                        sx.lower[b]
                    } else if x <= sx.upper[b] + ptol {
                        sx.upper[b]
                    } else {
                        return None;
                    }
                } else if x > sx.upper[b] + ptol {
                    sx.upper[b]
                } else if x >= sx.lower[b] - ptol {
                    sx.lower[b]
                } else {
                    return None;
                };
                if !bound.is_finite() {
                    return None;
                }
                let dist = ((bound - x) * rate.signum()).max(0.0);
                Some((dist, rate.abs(), bound))
            };
            let mut tmax = f64::INFINITY;
            for pos in 0..self.head.len() {
                if let Some((dist, rate, _)) = limit_of(self, pos) {
                    tmax = tmax.min((dist + ptol) / rate);
                }
            }
            let flip = self.upper[q] - self.lower[q];
            let mut r = usize::MAX;
            let mut step = f64::INFINITY;
            let mut leave_bound = 0.0;
            if tmax < f64::INFINITY {
                let mut best_rate = 0.0;
                for pos in 0..self.head.len() {
                    if let Some((dist, rate, bound)) = limit_of(self, pos) {
                        let t = dist / rate;
                        let better = if bland {
                            t <= tmax && (r == usize::MAX || self.head[pos] < self.head[r])
                        } else {
                            t <= tmax && rate > best_rate
                        };
                        if better {
                            best_rate = rate;
                            r = pos;
                            step = t;
                            leave_bound = bound;
                        }
                    }
                }
            }
            if flip.is_finite() && flip <= step {
                // Bound flip of the entering variable.
                let t = flip;
                self.x[q] = if dir > 0.0 { self.upper[q] } else { self.lower[q] };
                self.state[q] = if dir > 0.0 {
                    VarState::AtUpper
                } else {
                    VarState::AtLower
                };
                for (pos, &j) in self.head.iter().enumerate() {
                    let w = self.col[pos];
                    if w != 0.0 {
                        self.x[j] += dir * t * -w;
                    }
                }
                self.iterations += 1;
                degenerate_run = 0;
                bland = false;
                continue;
            }
            if r == usize::MAX {
                if phase_one {
                    if retries < 3 {
                        retries += 1;
                        self.factor = None;
                        continue;
                    }
                    return LpStatus::Numerical;
                }
                if !self.factor_is_fresh() && retries < 3 {
                    retries += 1;
                    self.factor = None;
                    continue;
                }
                let mut ray = vec![0.0; self.data.n];
                if q < self.data.n {
                    ray[q] = dir;
                }
                for (pos, &j) in self.head.iter().enumerate() {
                    if j < self.data.n {
                        ray[j] = -dir * self.col[pos];
                    }
                }
                self.ray = Some(ray);
                return LpStatus::Unbounded;
            }
            retries = 0;
            let t = step;
            let leaving = self.head[r];
            self.x[q] += dir * t;
            for (pos, &j) in self.head.iter().enumerate() {
                let w = self.col[pos];
                if w != 0.0 {
                    self.x[j] -= dir * t * w;
                }
            }
            self.x[leaving] = leave_bound;
            self.head[r] = q;
            self.state[q] = VarState::Basic;
            self.state[leaving] = if leave_bound == self.lower[leaving] {
                VarState::AtLower
            } else {
                VarState::AtUpper
            };
            self.factor.as_mut().expect("factor").update(r, &self.col);
            self.iterations += 1;
            if t <= DEGENERATE_STEP {
                degenerate_run += 1;
                if degenerate_run >= self.opts.bland_after {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
                bland = false;
            }
        }
    }

    /// Row duals of the current basis (phase-two costs).
    fn row_duals(&mut self) -> Vec<f64> {
        let n = self.data.n;
        (0..self.data.m).map(|i| self.d[n + i]).collect()
    }

    pub fn solution(&mut self, status: LpStatus) -> LpSolution {
        let n = self.data.n;
        let duals = if status == LpStatus::Optimal {
            self.row_duals()
        } else {
            vec![0.0; self.data.m]
        };
        let certificate = match status {
            LpStatus::Infeasible => self.certificate.clone(),
            LpStatus::Unbounded => self.ray.clone(),
            _ => None,
        };
        LpSolution {
            status,
            objective: match status {
                LpStatus::Optimal => self.objective(),
                LpStatus::Unbounded => f64::NEG_INFINITY,
                LpStatus::Infeasible => f64::INFINITY,
                _ => f64::NAN,
            },
            primal: self.x[..n].to_vec(),
            duals,
            reduced_costs: self.d[..n].to_vec(),
            iterations: self.iterations,
            certificate,
        }
    }
}

/// Objective of the Lagrangian dual at `(duals, reduced_costs)`; a lower
/// bound on the primal optimum when the multipliers are dual feasible.
pub fn dual_objective(model: &MilpModel, sol: &LpSolution) -> f64 {
    let tiny = 1e-9;
    let mut total = model.objective().constant;
    for (v, &d) in model.vars().iter().zip(&sol.reduced_costs) {
        if d > tiny {
            total += d * v.lower;
        } else if d < -tiny {
            total += d * v.upper;
        }
    }
    for (c, &y) in model.constraints().iter().zip(&sol.duals) {
        let (lo, hi) = c.bounds();
        if y > tiny {
            total += y * lo;
        } else if y < -tiny {
            total += y * hi;
        }
    }
    total
}
