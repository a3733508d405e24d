//! Solver-agnostic linear model: variables, linear rows, objective and a name registry.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use thiserror::Error;

/// Index of a variable inside a [`MilpModel`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

/// Index of a constraint row inside a [`MilpModel`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConId(pub usize);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    Continuous,
    Binary,
}

/// Row sense. Ranged rows keep their base sense and carry an MPS-style range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("duplicate constraint name `{0}`")]
    DuplicateConstraint(String),
    #[error("variable `{name}` has empty domain [{lower}, {upper}]")]
    EmptyDomain { name: String, lower: f64, upper: f64 },
    #[error("binary variable `{0}` must have bounds inside [0, 1]")]
    BinaryBounds(String),
    #[error("{context} references unknown variable {var}")]
    UnknownVariable { context: String, var: VarId },
    #[error("non-finite coefficient in {0}")]
    NonFinite(String),
}

/// Affine expression `sum coef * var + constant`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinExpr {
    pub terms: Vec<(VarId, f64)>,
    pub constant: f64,
}

impl LinExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(value: f64) -> Self {
        Self {
            terms: Vec::new(),
            constant: value,
        }
    }

    pub fn term(var: VarId, coef: f64) -> Self {
        Self {
            terms: vec![(var, coef)],
            constant: 0.0,
        }
    }

    pub fn add_term(&mut self, var: VarId, coef: f64) -> &mut Self {
        self.terms.push((var, coef));
        self
    }

    pub fn add_constant(&mut self, value: f64) -> &mut Self {
        self.constant += value;
        self
    }

    pub fn add_scaled(&mut self, other: &LinExpr, factor: f64) -> &mut Self {
        self.terms
            .extend(other.terms.iter().map(|&(v, c)| (v, c * factor)));
        self.constant += other.constant * factor;
        self
    }

    pub fn scaled(&self, factor: f64) -> LinExpr {
        let mut out = LinExpr::new();
        out.add_scaled(self, factor);
        out
    }

    /// Merges duplicate variables, sorts by variable index and drops exact zeros.
    pub fn normalized(&self) -> LinExpr {
        let mut terms = self.terms.clone();
        terms.sort_by_key(|t| t.0);
        let mut merged: Vec<(VarId, f64)> = Vec::with_capacity(terms.len());
        for (v, c) in terms {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += c,
                _ => merged.push((v, c)),
            }
        }
        merged.retain(|t| t.1 != 0.0);
        LinExpr {
            terms: merged,
            constant: self.constant,
        }
    }

    pub fn eval(&self, values: &[f64]) -> f64 {
        self.terms
            .iter()
            .fold(self.constant, |acc, &(v, c)| acc + c * values[v.0])
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| t.1 == 0.0)
    }
}

impl From<VarId> for LinExpr {
    fn from(v: VarId) -> Self {
        LinExpr::term(v, 1.0)
    }
}

impl From<f64> for LinExpr {
    fn from(c: f64) -> Self {
        LinExpr::constant(c)
    }
}

impl AddAssign<&LinExpr> for LinExpr {
    fn add_assign(&mut self, rhs: &LinExpr) {
        self.add_scaled(rhs, 1.0);
    }
}

impl SubAssign<&LinExpr> for LinExpr {
    fn sub_assign(&mut self, rhs: &LinExpr) {
        self.add_scaled(rhs, -1.0);
    }
}

impl Add<&LinExpr> for LinExpr {
    type Output = LinExpr;
    fn add(mut self, rhs: &LinExpr) -> LinExpr {
        self += rhs;
        self
    }
}

impl Sub<&LinExpr> for LinExpr {
    type Output = LinExpr;
    fn sub(mut self, rhs: &LinExpr) -> LinExpr {
        self -= rhs;
        self
    }
}

impl Add for LinExpr {
    type Output = LinExpr;
    fn add(self, rhs: LinExpr) -> LinExpr {
        self + &rhs
    }
}

impl Sub for LinExpr {
    type Output = LinExpr;
    fn sub(self, rhs: LinExpr) -> LinExpr {
        self - &rhs
    }
}

impl Mul<f64> for LinExpr {
    type Output = LinExpr;
    fn mul(self, k: f64) -> LinExpr {
        self.scaled(k)
    }
}

impl Neg for LinExpr {
    type Output = LinExpr;
    fn neg(self) -> LinExpr {
        self.scaled(-1.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

/// A linear row `lo <= expr <= hi` stored the MPS way: sense, right-hand side
/// and an optional range.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: String,
    /// Normalized expression with zero constant.
    pub expr: LinExpr,
    pub sense: Sense,
    pub rhs: f64,
    pub range: Option<f64>,
}

impl Constraint {
    /// Activity interval implied by sense, rhs and range (MPS RANGES semantics).
    pub fn bounds(&self) -> (f64, f64) {
        let rhs = self.rhs;
        match (self.sense, self.range) {
            (Sense::Le, None) => (f64::NEG_INFINITY, rhs),
            (Sense::Ge, None) => (rhs, f64::INFINITY),
            (Sense::Eq, None) => (rhs, rhs),
            (Sense::Le, Some(r)) => (rhs - r.abs(), rhs),
            (Sense::Ge, Some(r)) => (rhs, rhs + r.abs()),
            (Sense::Eq, Some(r)) if r >= 0.0 => (rhs, rhs + r),
            (Sense::Eq, Some(r)) => (rhs + r, rhs),
        }
    }
}

/// A violated bound or row found by [`MilpModel::violations`].
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub what: String,
    pub amount: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MilpModel {
    pub name: String,
    pub metadata: BTreeMap<String, String>,
    vars: Vec<Variable>,
    cons: Vec<Constraint>,
    objective: LinExpr,
    var_names: HashMap<String, VarId>,
    con_names: HashMap<String, ConId>,
}

impl MilpModel {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        kind: VarKind,
        lower: f64,
        upper: f64,
    ) -> Result<VarId, ModelError> {
        let name = name.into();
        if self.var_names.contains_key(&name) {
            return Err(ModelError::DuplicateVariable(name));
        }
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(ModelError::EmptyDomain { name, lower, upper });
        }
        if kind == VarKind::Binary && (lower < 0.0 || upper > 1.0) {
            return Err(ModelError::BinaryBounds(name));
        }
        let id = VarId(self.vars.len());
        self.var_names.insert(name.clone(), id);
        self.vars.push(Variable {
            name,
            kind,
            lower,
            upper,
        });
        Ok(id)
    }

    pub fn add_continuous(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
    ) -> Result<VarId, ModelError> {
        self.add_var(name, VarKind::Continuous, lower, upper)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> Result<VarId, ModelError> {
        self.add_var(name, VarKind::Binary, 0.0, 1.0)
    }

    /// Adds `expr (sense) rhs`; the expression constant is moved to the right-hand side.
    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        expr: &LinExpr,
        sense: Sense,
        rhs: f64,
    ) -> Result<ConId, ModelError> {
        self.push_row(name.into(), expr, sense, rhs, None)
    }

    /// Adds `lower <= expr <= upper` as a single ranged row.
    pub fn add_range(
        &mut self,
        name: impl Into<String>,
        expr: &LinExpr,
        lower: f64,
        upper: f64,
    ) -> Result<ConId, ModelError> {
        let name = name.into();
        if lower == upper {
            return self.push_row(name, expr, Sense::Eq, lower, None);
        }
        match (lower.is_finite(), upper.is_finite()) {
            (true, true) => self.push_row(name, expr, Sense::Le, upper, Some(upper - lower)),
            (false, true) => self.push_row(name, expr, Sense::Le, upper, None),
            (true, false) => self.push_row(name, expr, Sense::Ge, lower, None),
            (false, false) => self.push_row(name, expr, Sense::Le, f64::INFINITY, None),
        }
    }

    /// Adds a row with an explicit MPS range, as read from a RANGES section.
    pub fn add_ranged_row(
        &mut self,
        name: impl Into<String>,
        expr: &LinExpr,
        sense: Sense,
        rhs: f64,
        range: Option<f64>,
    ) -> Result<ConId, ModelError> {
        self.push_row(name.into(), expr, sense, rhs, range)
    }

    fn push_row(
        &mut self,
        name: String,
        expr: &LinExpr,
        sense: Sense,
        rhs: f64,
        range: Option<f64>,
    ) -> Result<ConId, ModelError> {
        if self.con_names.contains_key(&name) {
            return Err(ModelError::DuplicateConstraint(name));
        }
        let norm = expr.normalized();
        for &(v, c) in &norm.terms {
            if v.0 >= self.vars.len() {
                return Err(ModelError::UnknownVariable {
                    context: format!("row `{name}`"),
                    var: v,
                });
            }
            if !c.is_finite() {
                return Err(ModelError::NonFinite(format!("row `{name}`")));
            }
        }
        let id = ConId(self.cons.len());
        self.con_names.insert(name.clone(), id);
        self.cons.push(Constraint {
            name,
            rhs: rhs - norm.constant,
            expr: LinExpr {
                terms: norm.terms,
                constant: 0.0,
            },
            sense,
            range,
        });
        Ok(id)
    }

    /// Sets the minimization objective; its constant is kept as an offset.
    pub fn set_objective(&mut self, expr: &LinExpr) -> Result<(), ModelError> {
        let norm = expr.normalized();
        if let Some(&(v, _)) = norm.terms.iter().find(|t| t.0 .0 >= self.vars.len()) {
            return Err(ModelError::UnknownVariable {
                context: "objective".into(),
                var: v,
            });
        }
        self.objective = norm;
        Ok(())
    }

    pub fn objective(&self) -> &LinExpr {
        &self.objective
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.cons
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.vars[id.0]
    }

    pub fn constraint(&self, id: ConId) -> &Constraint {
        &self.cons[id.0]
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.cons.len()
    }

    pub fn num_binaries(&self) -> usize {
        self.vars
            .iter()
            .filter(|v| v.kind == VarKind::Binary)
            .count()
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.var_names.get(name).copied()
    }

    pub fn constraint_by_name(&self, name: &str) -> Option<ConId> {
        self.con_names.get(name).copied()
    }

    pub fn set_bounds(&mut self, id: VarId, lower: f64, upper: f64) -> Result<(), ModelError> {
        let var = &mut self.vars[id.0];
        if lower > upper {
            return Err(ModelError::EmptyDomain {
                name: var.name.clone(),
                lower,
                upper,
            });
        }
        if var.kind == VarKind::Binary && (lower < 0.0 || upper > 1.0) {
            return Err(ModelError::BinaryBounds(var.name.clone()));
        }
        var.lower = lower;
        var.upper = upper;
        Ok(())
    }

    /// Re-checks every model invariant.
    pub fn validate(&self) -> Result<(), ModelError> {
        let mut seen = HashMap::new();
        for (i, v) in self.vars.iter().enumerate() {
            if seen.insert(v.name.as_str(), i).is_some() {
                return Err(ModelError::DuplicateVariable(v.name.clone()));
            }
            if v.lower > v.upper || v.lower.is_nan() || v.upper.is_nan() {
                return Err(ModelError::EmptyDomain {
                    name: v.name.clone(),
                    lower: v.lower,
                    upper: v.upper,
                });
            }
            if v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0) {
                return Err(ModelError::BinaryBounds(v.name.clone()));
            }
        }
        let mut seen_rows = HashMap::new();
        for c in &self.cons {
            if seen_rows.insert(c.name.as_str(), ()).is_some() {
                return Err(ModelError::DuplicateConstraint(c.name.clone()));
            }
            if let Some(&(v, _)) = c.expr.terms.iter().find(|t| t.0 .0 >= self.vars.len()) {
                return Err(ModelError::UnknownVariable {
                    context: format!("row `{}`", c.name),
                    var: v,
                });
            }
        }
        if let Some(&(v, _)) = self
            .objective
            .terms
            .iter()
            .find(|t| t.0 .0 >= self.vars.len())
        {
            return Err(ModelError::UnknownVariable {
                context: "objective".into(),
                var: v,
            });
        }
        Ok(())
    }

    pub fn eval_objective(&self, values: &[f64]) -> f64 {
        self.objective.eval(values)
    }

    /// Lists every bound, row or integrality violation larger than `tol`.
    pub fn violations(&self, values: &[f64], tol: f64) -> Vec<Violation> {
        let mut out = Vec::new();
        for (v, &x) in self.vars.iter().zip(values) {
            let amount = (v.lower - x).max(x - v.upper).max(0.0);
            if amount > tol {
                out.push(Violation {
                    what: format!("bound of `{}`", v.name),
                    amount,
                });
            }
            if v.kind == VarKind::Binary {
                let frac = (x - x.round()).abs();
                if frac > tol {
                    out.push(Violation {
                        what: format!("integrality of `{}`", v.name),
                        amount: frac,
                    });
                }
            }
        }
        for c in &self.cons {
            let act = c.expr.eval(values);
            let (lo, hi) = c.bounds();
            let amount = (lo - act).max(act - hi).max(0.0);
            if amount > tol {
                out.push(Violation {
                    what: format!("row `{}`", c.name),
                    amount,
                });
            }
        }
        out
    }

    pub fn is_feasible(&self, values: &[f64], tol: f64) -> bool {
        values.len() == self.vars.len() && self.violations(values, tol).is_empty()
    }

    /// True when both models have the same variables, rows and objective.
    pub fn same_structure(&self, other: &MilpModel) -> bool {
        self.vars == other.vars && self.cons == other.cons && self.objective == other.objective
    }
}
