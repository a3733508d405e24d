//! Exact piecewise-linear encoding of tap quotients.
//!
//! The DC flow through a branch with an adjustable tap is
//! `(θf − θt − δ)/(τx)` with `τ` taken from a finite set `{ω_1 < … < ω_K}`.
//! Each of the three terms `α/(τx)` is written with weights `z_{i,1}, z_{i,2}`
//! on the two endpoints of α's box for every candidate tap `i`:
//!
//! ```text
//! α = Σ_i z_{i,2}·ᾱ + z_{i,1}·α̲      τ = Σ_i (z_{i,1} + z_{i,2})·ω_i      Σ z = 1
//! Y(α) = Σ_i (z_{i,2}·ᾱ + z_{i,1}·α̲) · c_i        with c_i = 1/(ω_i x)
//! ```
//!
//! Binaries then confine the weight mass to one tap. Under
//! [`EncodingVariant::DisjunctiveExact`] one selector `s_i` per tap carries
//! `z_{i,1} + z_{i,2} = s_i`, which makes the encoding exact. Under
//! [`EncodingVariant::SegmentAdjacency`] `K − 1` segment binaries allow mass on
//! two neighbouring taps, so τ may land strictly between grid points.
//!
//! The coefficients `c_i` are supplied per tap, so any quotient of the form
//! `α·g(ω_i)` with discrete `ω` can be encoded the same way.

use std::fmt;

use tapdispatch_milp::{ConId, LinExpr, MilpModel, ModelError, Sense, VarId};
use thiserror::Error;

/// Tolerance for normalization and support checks on recovered weights.
pub const WEIGHT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EncodingVariant {
    /// Segment binaries with adjacency constraints.
    SegmentAdjacency,
    /// One selector binary per tap.
    #[default]
    DisjunctiveExact,
}

impl EncodingVariant {
    pub fn label(self) -> &'static str {
        match self {
            EncodingVariant::SegmentAdjacency => "adjacency",
            EncodingVariant::DisjunctiveExact => "disjunctive",
        }
    }
}

impl fmt::Display for EncodingVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphaKind {
    ThetaFrom,
    ThetaTo,
    Shift,
}

impl AlphaKind {
    pub const ALL: [AlphaKind; 3] = [AlphaKind::ThetaFrom, AlphaKind::ThetaTo, AlphaKind::Shift];

    pub fn label(self) -> &'static str {
        match self {
            AlphaKind::ThetaFrom => "tm",
            AlphaKind::ThetaTo => "tn",
            AlphaKind::Shift => "d",
        }
    }

    /// Sign of the block in `Y(θf) − Y(θt) − Y(δ)`.
    pub fn sign(self) -> f64 {
        match self {
            AlphaKind::ThetaFrom => 1.0,
            AlphaKind::ThetaTo | AlphaKind::Shift => -1.0,
        }
    }
}

/// The quantity α of one block and its box. `expr` must take values in
/// `[lower, upper]`; a point box (`lower == upper`) is treated as the constant.
#[derive(Clone, Debug)]
pub struct AlphaInput {
    pub expr: LinExpr,
    pub lower: f64,
    pub upper: f64,
}

impl AlphaInput {
    pub fn var(v: VarId, lower: f64, upper: f64) -> Self {
        AlphaInput {
            expr: v.into(),
            lower,
            upper,
        }
    }

    pub fn constant(value: f64) -> Self {
        AlphaInput {
            expr: LinExpr::constant(value),
            lower: value,
            upper: value,
        }
    }

    pub fn is_point(&self) -> bool {
        self.lower == self.upper
    }
}

#[derive(Clone, Debug)]
pub struct AlphaBlock {
    pub kind: AlphaKind,
    pub lower: f64,
    pub upper: f64,
    /// `weights[i] = [z_{i,1}, z_{i,2}]`; empty for a point box.
    pub weights: Vec<[VarId; 2]>,
}

impl AlphaBlock {
    pub fn is_point(&self) -> bool {
        self.weights.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct PltEncoding {
    pub branch_id: String,
    /// 1-based hour.
    pub hour: usize,
    pub variant: EncodingVariant,
    pub taps: Vec<f64>,
    pub coefficients: Vec<f64>,
    pub blocks: [AlphaBlock; 3],
    /// `y_k`, `k = 1..K−1` ([`EncodingVariant::SegmentAdjacency`] with `K > 1`).
    pub segment_binaries: Vec<VarId>,
    /// `s_i`, `i = 1..K` ([`EncodingVariant::DisjunctiveExact`] with `K > 1`).
    pub tap_binaries: Vec<VarId>,
    /// Continuous surrogate for τ, bounded by `[ω_1, ω_K]`.
    pub tap_variable: VarId,
    /// Linear expression equal to the branch flow.
    pub flow_expression: LinExpr,
}

impl PltEncoding {
    pub fn weight_count(&self) -> usize {
        self.blocks.iter().map(|b| 2 * b.weights.len()).sum()
    }

    pub fn binary_count(&self) -> usize {
        self.segment_binaries.len() + self.tap_binaries.len()
    }

    /// Binary values that select tap `index` (0-based), for building MIP starts.
    pub fn selection_for(&self, index: usize) -> Vec<(VarId, f64)> {
        let mut out = Vec::new();
        for (i, &s) in self.tap_binaries.iter().enumerate() {
            out.push((s, (i == index) as u8 as f64));
        }
        let segs = self.segment_binaries.len();
        if segs > 0 {
            let k = index.min(segs - 1);
            for (j, &y) in self.segment_binaries.iter().enumerate() {
                out.push((y, (j == k) as u8 as f64));
            }
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum PltError {
    #[error("tap set is empty; use the fixed-tap flow instead")]
    EmptyTapSet,
    #[error("{taps} taps but {coefficients} coefficients")]
    CoefficientCount { taps: usize, coefficients: usize },
    #[error("{0} interval has lower > upper or is not finite")]
    BadInterval(&'static str),
    #[error("segment binaries need at least one non-point block")]
    NoFreeBlock,
    #[error("weights of block {alpha} sum to {sum}")]
    Normalization { alpha: &'static str, sum: f64 },
    #[error("tap weight spread over taps {0:?}")]
    SplitWeights(Vec<usize>),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Everything the encoder needs for one quotient term group.
#[derive(Clone, Debug)]
pub struct QuotientSpec<'a> {
    pub branch_id: &'a str,
    pub hour: usize,
    pub taps: &'a [f64],
    pub coefficients: &'a [f64],
    pub alphas: [AlphaInput; 3],
    pub variant: EncodingVariant,
}

/// Encodes the flow `(θf − θt − δ)/(τx)` of one branch-hour.
pub fn encode_branch_flow(
    model: &mut MilpModel,
    branch_id: &str,
    hour: usize,
    alphas: [AlphaInput; 3],
    taps: &[f64],
    x: f64,
    variant: EncodingVariant,
) -> Result<PltEncoding, PltError> {
    let coefficients: Vec<f64> = taps.iter().map(|w| 1.0 / (w * x)).collect();
    encode_quotient(
        model,
        &QuotientSpec {
            branch_id,
            hour,
            taps,
            coefficients: &coefficients,
            alphas,
            variant,
        },
    )
}

/// Encodes `Σ_blocks sign · α · c(τ)` where `c(ω_i) = coefficients[i]`.
pub fn encode_quotient(model: &mut MilpModel, spec: &QuotientSpec) -> Result<PltEncoding, PltError> {
    let taps = spec.taps;
    let k = taps.len();
    if k == 0 {
        return Err(PltError::EmptyTapSet);
    }
    if spec.coefficients.len() != k {
        return Err(PltError::CoefficientCount {
            taps: k,
            coefficients: spec.coefficients.len(),
        });
    }
    for (a, kind) in spec.alphas.iter().zip(AlphaKind::ALL) {
        if !(a.lower.is_finite() && a.upper.is_finite()) || a.lower > a.upper {
            return Err(PltError::BadInterval(kind.label()));
        }
    }
    let variant = spec.variant;
    let free_blocks = spec.alphas.iter().filter(|a| !a.is_point()).count();
    if variant == EncodingVariant::SegmentAdjacency && k > 1 && free_blocks == 0 {
        return Err(PltError::NoFreeBlock);
    }

    let tag = format!("{}_{}", spec.branch_id, spec.hour);
    let tau = model.add_continuous(format!("tau_{tag}"), taps[0], taps[k - 1])?;

    let mut tap_binaries = Vec::new();
    let mut segment_binaries = Vec::new();
    if k > 1 {
        match variant {
            EncodingVariant::DisjunctiveExact => {
                for i in 1..=k {
                    tap_binaries.push(model.add_binary(format!("s_{tag}_{i}"))?);
                }
            }
            EncodingVariant::SegmentAdjacency => {
                for j in 1..k {
                    segment_binaries.push(model.add_binary(format!("yseg_{tag}_{j}"))?);
                }
            }
        }
    }

    let mut flow = LinExpr::new();
    // Per-tap mass used to scale point blocks; set by the first free block.
    let mut mass: Option<Vec<LinExpr>> = if !tap_binaries.is_empty() {
        Some(tap_binaries.iter().map(|&s| LinExpr::from(s)).collect())
    } else if k == 1 {
        Some(vec![LinExpr::constant(1.0)])
    } else {
        None
    };

    let mut blocks = Vec::with_capacity(3);
    for (a, kind) in spec.alphas.iter().zip(AlphaKind::ALL) {
        let label = kind.label();
        if a.is_point() {
            blocks.push(AlphaBlock {
                kind,
                lower: a.lower,
                upper: a.upper,
                weights: Vec::new(),
            });
            continue;
        }
        let mut weights = Vec::with_capacity(k);
        for i in 1..=k {
            let z1 = model.add_continuous(format!("z_{tag}_{label}_{i}_1"), 0.0, 1.0)?;
            let z2 = model.add_continuous(format!("z_{tag}_{label}_{i}_2"), 0.0, 1.0)?;
            weights.push([z1, z2]);
        }

        let mut recovery = a.expr.clone();
        let mut coupling = LinExpr::from(tau);
        let mut total = LinExpr::new();
        for (i, &[z1, z2]) in weights.iter().enumerate() {
            recovery.add_term(z2, -a.upper).add_term(z1, -a.lower);
            coupling.add_term(z1, -taps[i]).add_term(z2, -taps[i]);
            total.add_term(z1, 1.0).add_term(z2, 1.0);
            let c = kind.sign() * spec.coefficients[i];
            flow.add_term(z2, c * a.upper).add_term(z1, c * a.lower);
        }
        model.add_constraint(format!("pltrec_{tag}_{label}"), &recovery, Sense::Eq, 0.0)?;
        model.add_constraint(format!("pltcpl_{tag}_{label}"), &coupling, Sense::Eq, 0.0)?;
        model.add_constraint(format!("pltsum_{tag}_{label}"), &total, Sense::Eq, 1.0)?;

        if k > 1 {
            match variant {
                EncodingVariant::DisjunctiveExact => {
                    for (i, &[z1, z2]) in weights.iter().enumerate() {
                        let e = LinExpr::term(z1, 1.0) + LinExpr::term(z2, 1.0)
                            - LinExpr::term(tap_binaries[i], 1.0);
                        model.add_constraint(
                            format!("pltsel_{tag}_{label}_{}", i + 1),
                            &e,
                            Sense::Eq,
                            0.0,
                        )?;
                    }
                }
                EncodingVariant::SegmentAdjacency => {
                    let y = &segment_binaries;
                    for (i, zs) in weights.iter().enumerate() {
                        for (j, &z) in zs.iter().enumerate() {
                            let mut e = LinExpr::from(z);
                            if i > 0 {
                                e.add_term(y[i - 1], -1.0);
                            }
                            if i + 1 < k {
                                e.add_term(y[i], -1.0);
                            }
                            model.add_constraint(
                                format!("pltadj_{tag}_{label}_{}_{}", i + 1, j + 1),
                                &e,
                                Sense::Le,
                                0.0,
                            )?;
                        }
                    }
                }
            }
        }

        if mass.is_none() {
            mass = Some(
                weights
                    .iter()
                    .map(|&[z1, z2]| LinExpr::term(z1, 1.0) + LinExpr::term(z2, 1.0))
                    .collect(),
            );
        }
        blocks.push(AlphaBlock {
            kind,
            lower: a.lower,
            upper: a.upper,
            weights,
        });
    }

    let mass = mass.expect("mass set: free block or selectors exist");
    for (a, kind) in spec.alphas.iter().zip(AlphaKind::ALL) {
        if a.is_point() && a.lower != 0.0 {
            for (i, m) in mass.iter().enumerate() {
                flow.add_scaled(m, kind.sign() * spec.coefficients[i] * a.lower);
            }
        }
    }

    if free_blocks == 0 {
        let mut e = LinExpr::from(tau);
        for (i, m) in mass.iter().enumerate() {
            e.add_scaled(m, -taps[i]);
        }
        model.add_constraint(format!("pltcpl_{tag}"), &e, Sense::Eq, 0.0)?;
    }
    if k > 1 {
        let sel: &[VarId] = if tap_binaries.is_empty() {
            &segment_binaries
        } else {
            &tap_binaries
        };
        let mut e = LinExpr::new();
        for &v in sel {
            e.add_term(v, 1.0);
        }
        model.add_constraint(format!("pltone_{tag}"), &e, Sense::Eq, 1.0)?;
    }

    let blocks: [AlphaBlock; 3] = blocks.try_into().expect("three blocks");
    Ok(PltEncoding {
        branch_id: spec.branch_id.to_string(),
        hour: spec.hour,
        variant,
        taps: taps.to_vec(),
        coefficients: spec.coefficients.to_vec(),
        blocks,
        segment_binaries,
        tap_binaries,
        tap_variable: tau,
        flow_expression: flow.normalized(),
    })
}

/// Values implied by an assignment of an encoding's variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Recovered {
    pub tau: f64,
    /// `[θf, θt, δ]`.
    pub alphas: [f64; 3],
    pub flow: f64,
    /// Weight mass per tap.
    pub tap_mass: Vec<f64>,
}

impl Recovered {
    /// Index of the tap carrying (essentially) all the weight, if any.
    pub fn selected_tap(&self) -> Option<usize> {
        self.tap_mass.iter().position(|m| (m - 1.0).abs() <= WEIGHT_TOL)
    }
}

pub fn recover_values(enc: &PltEncoding, assignment: &[f64]) -> Result<Recovered, PltError> {
    let k = enc.taps.len();
    let mut alphas = [0.0; 3];
    let mut mass: Option<Vec<f64>> = None;
    for (slot, b) in alphas.iter_mut().zip(&enc.blocks) {
        if b.is_point() {
            *slot = b.lower;
            continue;
        }
        let sum: f64 = b
            .weights
            .iter()
            .map(|&[z1, z2]| assignment[z1.0] + assignment[z2.0])
            .sum();
        if (sum - 1.0).abs() > WEIGHT_TOL {
            return Err(PltError::Normalization {
                alpha: b.kind.label(),
                sum,
            });
        }
        *slot = b
            .weights
            .iter()
            .map(|&[z1, z2]| assignment[z2.0] * b.upper + assignment[z1.0] * b.lower)
            .sum();
        if mass.is_none() {
            mass = Some(
                b.weights
                    .iter()
                    .map(|&[z1, z2]| assignment[z1.0] + assignment[z2.0])
                    .collect(),
            );
        }
    }
    let mass = match mass {
        Some(m) => m,
        None if !enc.tap_binaries.is_empty() => {
            enc.tap_binaries.iter().map(|s| assignment[s.0]).collect()
        }
        None if k == 1 => vec![1.0],
        None => {
            let tau = assignment[enc.tap_variable.0];
            let mut m = vec![0.0; k];
            if let Some(i) = enc.taps.iter().position(|w| (w - tau).abs() <= WEIGHT_TOL) {
                m[i] = 1.0;
            }
            m
        }
    };

    let support: Vec<usize> = (0..k).filter(|&i| mass[i] > WEIGHT_TOL).collect();
    let allowed = match (enc.variant, support.as_slice()) {
        (_, [_]) => true,
        (EncodingVariant::SegmentAdjacency, [a, b]) => b - a == 1,
        _ => false,
    };
    if !allowed {
        return Err(PltError::SplitWeights(support));
    }
    let tau = mass.iter().zip(&enc.taps).map(|(m, w)| m * w).sum();
    Ok(Recovered {
        tau,
        alphas,
        flow: enc.flow_expression.eval(assignment),
        tap_mass: mass,
    })
}

/// Adds `cur − prev ≤ bound` and `prev − cur ≤ bound`, i.e. `|cur − prev| ≤ bound`.
pub fn linearize_abs_step(
    model: &mut MilpModel,
    name: &str,
    prev: &LinExpr,
    cur: &LinExpr,
    bound: &LinExpr,
) -> Result<[ConId; 2], ModelError> {
    let up = cur.clone() - prev.clone() - bound.clone();
    let dn = prev.clone() - cur.clone() - bound.clone();
    let a = model.add_constraint(format!("{name}_up"), &up, Sense::Le, 0.0)?;
    let b = model.add_constraint(format!("{name}_dn"), &dn, Sense::Le, 0.0)?;
    Ok([a, b])
}
