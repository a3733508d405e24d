//! Sparse LU factorization of simplex bases with product-form (eta) updates.
//!
//! Left-looking Gilbert-Peierls elimination with threshold partial pivoting:
//! among candidates within `PIVOT_THRESHOLD` of the column maximum the row
//! with the fewest entries in the basis wins.

/// A sparse column given as parallel row/value slices.
#[derive(Clone, Copy, Debug)]
pub(crate) struct SparseCol<'a> {
    pub rows: &'a [usize],
    pub vals: &'a [f64],
}

const PIVOT_THRESHOLD: f64 = 0.1;
const SINGULAR_TOL: f64 = 1e-11;

/// Reported when the basis matrix is (numerically) singular.
#[derive(Debug, Clone)]
pub(crate) struct Singular {
    /// Basis positions whose column could not be pivoted.
    pub positions: Vec<usize>,
    /// Rows left without a pivot, one per deficient position.
    pub rows: Vec<usize>,
}

#[derive(Debug, Clone)]
struct Eta {
    pos: usize,
    pivot: f64,
    idx: Vec<usize>,
    val: Vec<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct Factor {
    m: usize,
    // L is unit lower triangular in pivot order, diagonal stored first.
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<f64>,
    // U is upper triangular in pivot order, diagonal stored last.
    up: Vec<usize>,
    ui: Vec<usize>,
    ux: Vec<f64>,
    /// pinv[row] = pivot step of that row.
    pinv: Vec<usize>,
    /// q[step] = basis position eliminated at that step.
    q: Vec<usize>,
    etas: Vec<Eta>,
    eta_nnz: usize,
    work: Vec<f64>,
}

impl Factor {
    /// Factorizes the `m x m` matrix whose column `k` is `col(k)`.
    pub fn new<'a, F>(m: usize, col: F) -> Result<Self, Singular>
    where
        F: Fn(usize) -> SparseCol<'a>,
    {
        // Row counts for the sparsity tie-break.
        let mut row_count = vec![0usize; m];
        let mut col_nnz = Vec::with_capacity(m);
        for k in 0..m {
            let c = col(k);
            for &r in c.rows {
                row_count[r] += 1;
            }
            col_nnz.push(c.rows.len());
        }
        // Cheap ordering: sparsest columns first, stable on position.
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&k| (col_nnz[k], k));

        let mut f = Factor {
            m,
            lp: Vec::with_capacity(m + 1),
            li: Vec::new(),
            lx: Vec::new(),
            up: Vec::with_capacity(m + 1),
            ui: Vec::new(),
            ux: Vec::new(),
            pinv: vec![usize::MAX; m],
            q: Vec::with_capacity(m),
            etas: Vec::new(),
            eta_nnz: 0,
            work: vec![0.0; m],
        };

        let mut x = vec![0.0; m];
        let mut mark = vec![false; m];
        let mut reach: Vec<usize> = Vec::with_capacity(m);
        let mut stack: Vec<(usize, usize)> = Vec::new();
        let mut deficient = Vec::new();
        // Column of L (pivot step) for each row, during elimination.
        let mut lcol_of_row = vec![usize::MAX; m];

        for &pos in &order {
            let step = f.q.len();
            let c = col(pos);

            // Symbolic: rows reachable from the column pattern through L.
            reach.clear();
            for &r in c.rows {
                if mark[r] {
                    continue;
                }
                stack.push((r, 0));
                mark[r] = true;
                while let Some(&(node, start)) = stack.last() {
                    let lc = lcol_of_row[node];
                    let mut pushed = None;
                    let mut next = start;
                    if lc != usize::MAX {
                        let end = f.lp_end(lc);
                        while f.lp[lc] + next < end {
                            let child = f.li[f.lp[lc] + next];
                            next += 1;
                            if !mark[child] {
                                mark[child] = true;
                                pushed = Some(child);
                                break;
                            }
                        }
                    }
                    if let Some(child) = pushed {
                        stack.last_mut().unwrap().1 = next;
                        stack.push((child, 0));
                    } else {
                        stack.pop();
                        reach.push(node);
                    }
                }
            }
            // reach is in reverse topological order.
            for &r in &reach {
                x[r] = 0.0;
            }
            for (&r, &v) in c.rows.iter().zip(c.vals) {
                x[r] = v;
            }
            for &j in reach.iter().rev() {
                let lc = lcol_of_row[j];
                if lc == usize::MAX {
                    continue;
                }
                let xj = x[j];
                if xj == 0.0 {
                    continue;
                }
                for p in f.lp[lc] + 1..f.lp_end(lc) {
                    x[f.li[p]] -= f.lx[p] * xj;
                }
            }

            // Pivot selection among rows without a pivot.
            let mut amax = 0.0f64;
            for &r in &reach {
                if f.pinv[r] == usize::MAX {
                    amax = amax.max(x[r].abs());
                }
            }
            let mut ipiv = usize::MAX;
            if amax > SINGULAR_TOL {
                let mut best = (usize::MAX, 0.0f64);
                for &r in &reach {
                    if f.pinv[r] != usize::MAX {
                        continue;
                    }
                    let a = x[r].abs();
                    if a >= PIVOT_THRESHOLD * amax {
                        let cnt = row_count[r];
                        if cnt < best.0 || (cnt == best.0 && a > best.1) {
                            best = (cnt, a);
                            ipiv = r;
                        }
                    }
                }
            }
            if ipiv == usize::MAX {
                deficient.push(pos);
                for &r in &reach {
                    x[r] = 0.0;
                    mark[r] = false;
                }
                continue;
            }

            f.up.push(f.ui.len());
            f.lp.push(f.li.len());
            let pivot = x[ipiv];
            for &r in reach.iter().rev() {
                if f.pinv[r] != usize::MAX && x[r] != 0.0 {
                    f.ui.push(f.pinv[r]);
                    f.ux.push(x[r]);
                }
            }
            f.ui.push(step);
            f.ux.push(pivot);
            f.pinv[ipiv] = step;
            lcol_of_row[ipiv] = step;
            f.li.push(ipiv);
            f.lx.push(1.0);
            for &r in &reach {
                if f.pinv[r] == usize::MAX && x[r] != 0.0 {
                    f.li.push(r);
                    f.lx.push(x[r] / pivot);
                }
            }
            for &r in &reach {
                x[r] = 0.0;
                mark[r] = false;
            }
            f.q.push(pos);
        }
        f.lp.push(f.li.len());
        f.up.push(f.ui.len());

        if !deficient.is_empty() {
            let rows: Vec<usize> = (0..m).filter(|&r| f.pinv[r] == usize::MAX).collect();
            return Err(Singular {
                positions: deficient,
                rows,
            });
        }
        // Rename L rows to pivot order.
        for r in f.li.iter_mut() {
            *r = f.pinv[*r];
        }
        Ok(f)
    }

    fn lp_end(&self, lc: usize) -> usize {
        if lc + 1 < self.lp.len() {
            self.lp[lc + 1]
        } else {
            self.li.len()
        }
    }

    pub fn num_updates(&self) -> usize {
        self.etas.len()
    }

    pub fn eta_nnz(&self) -> usize {
        self.eta_nnz
    }

    pub fn lu_nnz(&self) -> usize {
        self.li.len() + self.ui.len()
    }

    /// Solves `B x = rhs` in place; `rhs` is indexed by row, the result by basis position.
    pub fn ftran(&mut self, rhs: &mut [f64]) {
        let m = self.m;
        let w = &mut self.work;
        for i in 0..m {
            w[self.pinv[i]] = rhs[i];
        }
        // L solve
        for j in 0..m {
            let xj = w[j];
            if xj == 0.0 {
                continue;
            }
            for p in self.lp[j] + 1..self.lp[j + 1] {
                w[self.li[p]] -= self.lx[p] * xj;
            }
        }
        // U solve
        for j in (0..m).rev() {
            if w[j] == 0.0 {
                continue;
            }
            let dpos = self.up[j + 1] - 1;
            w[j] /= self.ux[dpos];
            let xj = w[j];
            for p in self.up[j]..dpos {
                w[self.ui[p]] -= self.ux[p] * xj;
            }
        }
        for k in 0..m {
            rhs[self.q[k]] = w[k];
        }
        for eta in &self.etas {
            let xr = rhs[eta.pos];
            if xr == 0.0 {
                continue;
            }
            let xr = xr / eta.pivot;
            rhs[eta.pos] = xr;
            for (&i, &v) in eta.idx.iter().zip(&eta.val) {
                rhs[i] -= v * xr;
            }
        }
    }

    /// Solves `B^T y = rhs` in place; `rhs` is indexed by basis position, the result by row.
    pub fn btran(&mut self, rhs: &mut [f64]) {
        let m = self.m;
        for eta in self.etas.iter().rev() {
            let mut s = rhs[eta.pos];
            for (&i, &v) in eta.idx.iter().zip(&eta.val) {
                s -= v * rhs[i];
            }
            rhs[eta.pos] = s / eta.pivot;
        }
        let w = &mut self.work;
        for k in 0..m {
            w[k] = rhs[self.q[k]];
        }
        // U^T solve
        for j in 0..m {
            let dpos = self.up[j + 1] - 1;
            let mut s = w[j];
            for p in self.up[j]..dpos {
                s -= self.ux[p] * w[self.ui[p]];
            }
            w[j] = s / self.ux[dpos];
        }
        // L^T solve
        for j in (0..m).rev() {
            let mut s = w[j];
            for p in self.lp[j] + 1..self.lp[j + 1] {
                s -= self.lx[p] * w[self.li[p]];
            }
            w[j] = s;
        }
        for i in 0..m {
            rhs[i] = w[self.pinv[i]];
        }
    }

    /// Records the replacement of the column at basis position `pos`;
    /// `column` must be the FTRAN'd entering column.
    pub fn update(&mut self, pos: usize, column: &[f64]) {
        let mut idx = Vec::new();
        let mut val = Vec::new();
        for (i, &v) in column.iter().enumerate() {
            if i != pos && v != 0.0 {
                idx.push(i);
                val.push(v);
            }
        }
        self.eta_nnz += idx.len() + 1;
        self.etas.push(Eta {
            pos,
            pivot: column[pos],
            idx,
            val,
        });
    }
}
