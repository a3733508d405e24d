//! Builds the dispatch models: ED0 with every device held at a fixed setting
//! (a pure LP) and ED1 with adjustable taps and shifters (a MILP).
//!
//! Variables per hour `h` (1-based in names):
//!
//! | name | meaning |
//! |---|---|
//! | `p_<gen>_<h>` | generator output, p.u. |
//! | `seg_<gen>_<h>_<k>` | output on cost segment `k` |
//! | `theta_<bus>_<h>` | bus angle, rad |
//! | `delta_<branch>_<h>` | shifter angle, rad |
//! | `tau_<branch>_<h>` | tap ratio surrogate (see [`crate::plt`]) |
//! | `itau_<branch>_<h>`, `idelta_<branch>_<h>` | adjustment indicators |
//!
//! Rows: `pdef` (output = p_min + segments), `bal` (bus balance), `lim` (line
//! limit, ranged), `ramp` (ranged), `res` (system reserve), `tstep`/`dstep`
//! (step limits), `tind`/`dind` (indicator coupling) and `tbud`/`dbud`
//! (adjustment budgets). With flow cuts enabled each encoded branch-hour also
//! gets `pltcut_<branch>_<h>_up`/`_dn`: valid rows bounding the flow between
//! the smallest and largest tap slopes over the reachable angle difference.
//! They remove no feasible point but shrink the relaxation a lot.

use tapdispatch_milp::{ConId, LinExpr, MilpModel, ModelError, Sense, VarId, VarKind};
use thiserror::Error;

use crate::network::{validate_case, Diagnostic, NetworkCase};
use crate::plt::{
    encode_branch_flow, linearize_abs_step, recover_values, AlphaInput, EncodingVariant,
    PltEncoding, PltError,
};
use crate::solution::{DispatchSolution, SolutionStatus};

/// Tolerance for snapping recovered taps onto the tap set.
pub const TAP_SNAP_TOL: f64 = 1e-6;
/// Largest bus balance residual, p.u., accepted by [`extract_solution`].
pub const BALANCE_TOL: f64 = 1e-6;
/// Changes smaller than this do not count as an adjustment.
pub const CHANGE_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Ed0,
    Ed1,
}

impl ModelKind {
    pub fn label(self) -> &'static str {
        match self {
            ModelKind::Ed0 => "ed0",
            ModelKind::Ed1 => "ed1",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ed1Options {
    pub variant: EncodingVariant,
    /// Restrict shifter angles to `lo + k·Δδ` with one-hot binaries.
    pub shift_grid: bool,
    /// Add the `pltcut` hull rows on every encoded branch-hour.
    /// They leave the feasible set unchanged and tighten the LP relaxation.
    pub flow_cuts: bool,
}

impl Default for Ed1Options {
    fn default() -> Self {
        Ed1Options {
            variant: EncodingVariant::default(),
            shift_grid: false,
            flow_cuts: true,
        }
    }
}

/// Fixed tap and shift per branch and hour.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviceSchedule {
    pub tap: Vec<Vec<f64>>,
    pub shift: Vec<Vec<f64>>,
}

impl DeviceSchedule {
    /// Every device at its initial setting for the whole horizon.
    pub fn initial(case: &NetworkCase) -> Self {
        let h = case.horizon;
        DeviceSchedule {
            tap: case
                .branches
                .iter()
                .map(|b| vec![b.device.fixed_tap(); h])
                .collect(),
            shift: case
                .branches
                .iter()
                .map(|b| vec![b.device.initial_shift; h])
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TapRef {
    Fixed(f64),
    /// Index into [`ModelIndex::encodings`].
    Encoded(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ShiftRef {
    Fixed(f64),
    Var(VarId),
}

/// Where each physical quantity lives in the model.
#[derive(Clone, Debug, Default)]
pub struct ModelIndex {
    pub p: Vec<Vec<VarId>>,
    pub segments: Vec<Vec<Vec<VarId>>>,
    pub theta: Vec<Vec<VarId>>,
    /// Flow in p.u. as a linear expression of model variables.
    pub flow: Vec<Vec<LinExpr>>,
    pub tap: Vec<Vec<TapRef>>,
    pub shift: Vec<Vec<ShiftRef>>,
    pub encodings: Vec<PltEncoding>,
    /// Empty for branches without an adjustable tap.
    pub tap_indicators: Vec<Vec<VarId>>,
    /// Empty for branches without a shifter.
    pub shift_indicators: Vec<Vec<VarId>>,
    /// Grid binaries and their angles, when the shift grid is enabled.
    pub shift_grid: Vec<Vec<Vec<(VarId, f64)>>>,
    pub balance_rows: Vec<Vec<ConId>>,
    pub limit_rows: Vec<Vec<Option<ConId>>>,
}

#[derive(Clone, Debug)]
pub struct DispatchModel {
    pub kind: ModelKind,
    pub variant: Option<EncodingVariant>,
    pub milp: MilpModel,
    pub index: ModelIndex,
}

#[derive(Debug, Error)]
pub enum FormulationError {
    #[error("invalid case: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidCase(Vec<Diagnostic>),
    #[error("device schedule does not match the case")]
    ScheduleShape,
    #[error(transparent)]
    Plt(#[from] PltError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

enum Devices<'a> {
    Fixed(&'a DeviceSchedule),
    Adjustable(Ed1Options),
}

/// ED0: devices held at their initial settings.
pub fn build_ed0(case: &NetworkCase) -> Result<DispatchModel, FormulationError> {
    build(case, Devices::Fixed(&DeviceSchedule::initial(case)), ModelKind::Ed0)
}

/// An ED0-style LP with devices fixed to the given schedule.
pub fn build_with_devices(
    case: &NetworkCase,
    schedule: &DeviceSchedule,
) -> Result<DispatchModel, FormulationError> {
    let h = case.horizon;
    let n = case.branches.len();
    if schedule.tap.len() != n
        || schedule.shift.len() != n
        || schedule.tap.iter().chain(&schedule.shift).any(|r| r.len() != h)
    {
        return Err(FormulationError::ScheduleShape);
    }
    build(case, Devices::Fixed(schedule), ModelKind::Ed0)
}

/// ED1: adjustable taps encoded exactly, shifters as bounded variables.
pub fn build_ed1(case: &NetworkCase, variant: EncodingVariant) -> Result<DispatchModel, FormulationError> {
    build_ed1_with(
        case,
        Ed1Options {
            variant,
            ..Ed1Options::default()
        },
    )
}

pub fn build_ed1_with(case: &NetworkCase, opts: Ed1Options) -> Result<DispatchModel, FormulationError> {
    build(case, Devices::Adjustable(opts), ModelKind::Ed1)
}

fn model_name(case: &NetworkCase) -> String {
    let s: String = case
        .name
        .chars()
        .map(|c| if c.is_whitespace() { '_' } else { c })
        .collect();
    if s.is_empty() {
        "case".into()
    } else {
        s
    }
}

fn build(case: &NetworkCase, devices: Devices, kind: ModelKind) -> Result<DispatchModel, FormulationError> {
    let diags = validate_case(case);
    if !diags.is_empty() {
        return Err(FormulationError::InvalidCase(diags));
    }
    let hours = case.horizon;
    let nb = case.buses.len();
    let nl = case.branches.len();
    let ng = case.generators.len();
    let mut m = MilpModel::new(model_name(case));
    m.metadata.insert("case".into(), case.name.clone());
    m.metadata.insert("model".into(), kind.label().into());
    m.metadata.insert("horizon".into(), hours.to_string());
    m.metadata.insert("base_mva".into(), case.base_mva.to_string());
    let variant = match &devices {
        Devices::Adjustable(o) => {
            m.metadata.insert("variant".into(), o.variant.label().into());
            if o.shift_grid {
                m.metadata.insert("shift_grid".into(), "true".into());
            }
            Some(o.variant)
        }
        Devices::Fixed(_) => None,
    };

    let bus_of: Vec<(usize, usize)> = case
        .branches
        .iter()
        .map(|b| {
            (
                case.bus_index(&b.from_bus).expect("validated"),
                case.bus_index(&b.to_bus).expect("validated"),
            )
        })
        .collect();
    let gen_bus: Vec<usize> = case
        .generators
        .iter()
        .map(|g| case.bus_index(&g.bus).expect("validated"))
        .collect();
    let segs: Vec<Vec<(f64, f64)>> = case.generators.iter().map(|g| g.cost_segments()).collect();

    let mut ix = ModelIndex {
        p: vec![Vec::with_capacity(hours); ng],
        segments: vec![Vec::with_capacity(hours); ng],
        theta: vec![Vec::with_capacity(hours); nb],
        flow: vec![Vec::with_capacity(hours); nl],
        tap: vec![Vec::with_capacity(hours); nl],
        shift: vec![Vec::with_capacity(hours); nl],
        tap_indicators: vec![Vec::new(); nl],
        shift_indicators: vec![Vec::new(); nl],
        shift_grid: vec![Vec::new(); nl],
        balance_rows: vec![Vec::with_capacity(hours); nb],
        limit_rows: vec![Vec::with_capacity(hours); nl],
        encodings: Vec::new(),
    };
    let mut objective = LinExpr::new();

    for h in 1..=hours {
        let t = h - 1;
        for (gi, g) in case.generators.iter().enumerate() {
            let p = m.add_continuous(format!("p_{}_{h}", g.id), g.p_min, g.p_max)?;
            objective.add_constant(g.cost_at(g.p_min));
            let mut vars = Vec::with_capacity(segs[gi].len());
            let mut def = LinExpr::from(p);
            for (k, &(len, slope)) in segs[gi].iter().enumerate() {
                let s = m.add_continuous(format!("seg_{}_{h}_{}", g.id, k + 1), 0.0, len)?;
                objective.add_term(s, slope);
                def.add_term(s, -1.0);
                vars.push(s);
            }
            if !vars.is_empty() {
                m.add_constraint(format!("pdef_{}_{h}", g.id), &def, Sense::Eq, g.p_min)?;
            }
            ix.p[gi].push(p);
            ix.segments[gi].push(vars);
        }

        for (bi, b) in case.buses.iter().enumerate() {
            let (lo, hi) = if b.is_reference { (0.0, 0.0) } else { b.angle_bounds };
            ix.theta[bi].push(m.add_continuous(format!("theta_{}_{h}", b.id), lo, hi)?);
        }

        for (li, br) in case.branches.iter().enumerate() {
            let (f, to) = bus_of[li];
            let tf = ix.theta[f][t];
            let tt = ix.theta[to][t];
            let d = &br.device;
            let (tap, shift, flow) = match &devices {
                Devices::Fixed(s) => {
                    let (tau, delta) = (s.tap[li][t], s.shift[li][t]);
                    let c = 1.0 / (tau * br.x);
                    let mut e = LinExpr::term(tf, c) - LinExpr::term(tt, c);
                    e.add_constant(-delta * c);
                    (TapRef::Fixed(tau), ShiftRef::Fixed(delta), e)
                }
                Devices::Adjustable(opts) => {
                    let shift = if d.has_shifter() {
                        let (lo, hi) = d.shifter_range;
                        let v = m.add_continuous(format!("delta_{}_{h}", br.id), lo, hi)?;
                        if opts.shift_grid {
                            let mut grid = Vec::new();
                            let mut link = LinExpr::from(v);
                            let mut one = LinExpr::new();
                            let n = ((hi - lo) / d.shift_step_max + 1e-9).floor() as usize;
                            for k in 0..=n {
                                let angle = lo + k as f64 * d.shift_step_max;
                                let g = m.add_binary(format!("dg_{}_{h}_{k}", br.id))?;
                                link.add_term(g, -angle);
                                one.add_term(g, 1.0);
                                grid.push((g, angle));
                            }
                            m.add_constraint(format!("dgrid_{}_{h}", br.id), &link, Sense::Eq, 0.0)?;
                            m.add_constraint(format!("dgsel_{}_{h}", br.id), &one, Sense::Eq, 1.0)?;
                            ix.shift_grid[li].push(grid);
                        }
                        ShiftRef::Var(v)
                    } else {
                        ShiftRef::Fixed(d.initial_shift)
                    };
                    if d.has_adjustable_tap() {
                        let fb = &case.buses[f];
                        let tb = &case.buses[to];
                        let theta_box = |b: &crate::network::Bus| {
                            if b.is_reference {
                                (0.0, 0.0)
                            } else {
                                b.angle_bounds
                            }
                        };
                        let (flo, fhi) = theta_box(fb);
                        let (tlo, thi) = theta_box(tb);
                        let delta_alpha = match shift {
                            ShiftRef::Var(v) => AlphaInput::var(v, d.shifter_range.0, d.shifter_range.1),
                            ShiftRef::Fixed(c) => AlphaInput::constant(c),
                        };
                        let enc = encode_branch_flow(
                            &mut m,
                            &br.id,
                            h,
                            [
                                AlphaInput::var(tf, flo, fhi),
                                AlphaInput::var(tt, tlo, thi),
                                delta_alpha,
                            ],
                            &d.tap_set,
                            br.x,
                            opts.variant,
                        )?;
                        let flow = enc.flow_expression.clone();
                        if opts.flow_cuts {
                            let (dlo, dhi, mut phi) = match shift {
                                ShiftRef::Var(v) => (d.shifter_range.0, d.shifter_range.1, LinExpr::from(v) * -1.0),
                                ShiftRef::Fixed(c) => (c, c, LinExpr::constant(-c)),
                            };
                            phi.add_term(tf, 1.0).add_term(tt, -1.0);
                            let mut a = flo - thi - dhi;
                            let mut b = fhi - tlo - dlo;
                            if br.rating > 0.0 {
                                let cap = br.rating * d.tap_set[d.tap_set.len() - 1] * br.x;
                                a = a.max(-cap);
                                b = b.min(cap);
                            }
                            add_flow_hull(&mut m, &format!("pltcut_{}_{h}", br.id), &flow, &phi, a, b, &d.tap_set, br.x)?;
                        }
                        ix.encodings.push(enc);
                        (TapRef::Encoded(ix.encodings.len() - 1), shift, flow)
                    } else {
                        let tau = d.fixed_tap();
                        let c = 1.0 / (tau * br.x);
                        let mut e = LinExpr::term(tf, c) - LinExpr::term(tt, c);
                        match shift {
                            ShiftRef::Var(v) => {
                                e.add_term(v, -c);
                            }
                            ShiftRef::Fixed(delta) => {
                                e.add_constant(-delta * c);
                            }
                        }
                        (TapRef::Fixed(tau), shift, e)
                    }
                }
            };
            ix.tap[li].push(tap);
            ix.shift[li].push(shift);
            ix.flow[li].push(flow.normalized());

            if let Devices::Adjustable(_) = devices {
                if d.has_adjustable_tap() {
                    ix.tap_indicators[li].push(m.add_binary(format!("itau_{}_{h}", br.id))?);
                }
                if d.has_shifter() {
                    ix.shift_indicators[li].push(m.add_binary(format!("idelta_{}_{h}", br.id))?);
                }
            }
        }

        // Bus balance: generation − outflow + inflow = demand.
        let mut bal: Vec<LinExpr> = vec![LinExpr::new(); nb];
        for (gi, &b) in gen_bus.iter().enumerate() {
            bal[b].add_term(ix.p[gi][t], 1.0);
        }
        for (li, &(f, to)) in bus_of.iter().enumerate() {
            bal[f].add_scaled(&ix.flow[li][t], -1.0);
            bal[to].add_scaled(&ix.flow[li][t], 1.0);
        }
        for (bi, e) in bal.iter().enumerate() {
            let id = case.buses[bi].id.as_str();
            let r = m.add_constraint(format!("bal_{id}_{h}"), e, Sense::Eq, case.demand[bi][t])?;
            ix.balance_rows[bi].push(r);
        }

        for (li, br) in case.branches.iter().enumerate() {
            let row = if br.rating > 0.0 {
                Some(m.add_range(
                    format!("lim_{}_{h}", br.id),
                    &ix.flow[li][t],
                    -br.rating,
                    br.rating,
                )?)
            } else {
                None
            };
            ix.limit_rows[li].push(row);
        }

        for (gi, g) in case.generators.iter().enumerate() {
            let cur = LinExpr::from(ix.p[gi][t]);
            let prev = match (t, g.initial_p) {
                (0, Some(p0)) => LinExpr::constant(p0),
                (0, None) => continue,
                _ => LinExpr::from(ix.p[gi][t - 1]),
            };
            if g.ramp_up.is_finite() || g.ramp_down.is_finite() {
                m.add_range(
                    format!("ramp_{}_{h}", g.id),
                    &(cur - prev),
                    -g.ramp_down,
                    g.ramp_up,
                )?;
            }
        }

        let r = case.reserve[t];
        if r > 0.0 {
            let mut e = LinExpr::new();
            let mut cap = 0.0;
            for (gi, g) in case.generators.iter().enumerate() {
                e.add_term(ix.p[gi][t], 1.0);
                cap += g.p_max;
            }
            m.add_constraint(format!("res_{h}"), &e, Sense::Le, cap - r)?;
        }

        if let Devices::Adjustable(_) = devices {
            for (li, br) in case.branches.iter().enumerate() {
                let d = &br.device;
                if d.has_adjustable_tap() {
                    let cur = tap_expr(&ix, li, t);
                    let prev = if t == 0 {
                        LinExpr::constant(d.initial_tap)
                    } else {
                        tap_expr(&ix, li, t - 1)
                    };
                    let span = d.tap_set[d.tap_set.len() - 1] - d.tap_set[0];
                    linearize_abs_step(
                        &mut m,
                        &format!("tstep_{}_{h}", br.id),
                        &prev,
                        &cur,
                        &LinExpr::constant(d.tap_step_max),
                    )?;
                    linearize_abs_step(
                        &mut m,
                        &format!("tind_{}_{h}", br.id),
                        &prev,
                        &cur,
                        &LinExpr::term(ix.tap_indicators[li][t], span),
                    )?;
                }
                if d.has_shifter() {
                    let cur = shift_expr(&ix, li, t);
                    let prev = if t == 0 {
                        LinExpr::constant(d.initial_shift)
                    } else {
                        shift_expr(&ix, li, t - 1)
                    };
                    let span = d.shifter_range.1 - d.shifter_range.0;
                    linearize_abs_step(
                        &mut m,
                        &format!("dstep_{}_{h}", br.id),
                        &prev,
                        &cur,
                        &LinExpr::constant(d.shift_step_max),
                    )?;
                    linearize_abs_step(
                        &mut m,
                        &format!("dind_{}_{h}", br.id),
                        &prev,
                        &cur,
                        &LinExpr::term(ix.shift_indicators[li][t], span),
                    )?;
                }
            }
        }
    }

    if let Devices::Adjustable(_) = devices {
        for (li, br) in case.branches.iter().enumerate() {
            let d = &br.device;
            if d.has_adjustable_tap() {
                let mut e = LinExpr::new();
                for &v in &ix.tap_indicators[li] {
                    e.add_term(v, 1.0);
                }
                m.add_constraint(format!("tbud_{}", br.id), &e, Sense::Le, d.tap_adjust_budget as f64)?;
            }
            if d.has_shifter() {
                let mut e = LinExpr::new();
                for &v in &ix.shift_indicators[li] {
                    e.add_term(v, 1.0);
                }
                m.add_constraint(format!("dbud_{}", br.id), &e, Sense::Le, d.shift_adjust_budget as f64)?;
            }
        }
    }

    m.set_objective(&objective)?;
    Ok(DispatchModel {
        kind,
        variant,
        milp: m,
        index: ix,
    })
}

/// Valid rows for `P = φ/(τx)` with `φ ∈ [a, b]` and `τ ∈ [ω1, ωK]`: the two
/// non-vertical edges of the hull of `(φ, φ·c)` for `φ ∈ {a, b}`,
/// `c ∈ {1/(ωK x), 1/(ω1 x)}`. They cut off nothing feasible but keep the
/// relaxation from spreading weight across distant taps.
#[allow(clippy::too_many_arguments)]
fn add_flow_hull(
    m: &mut MilpModel,
    name: &str,
    flow: &LinExpr,
    phi: &LinExpr,
    a: f64,
    b: f64,
    taps: &[f64],
    x: f64,
) -> Result<(), ModelError> {
    if !(b - a > 1e-12) {
        return Ok(());
    }
    let c_hi = 1.0 / (taps[0] * x);
    let c_lo = 1.0 / (taps[taps.len() - 1] * x);
    // Upper edge through (a, a·c_lo) and (b, b·c_hi), lower through (a, a·c_hi) and (b, b·c_lo).
    let s_up = (b * c_hi - a * c_lo) / (b - a);
    let s_dn = (b * c_lo - a * c_hi) / (b - a);
    let up = flow.clone() - phi.scaled(s_up);
    let dn = flow.clone() - phi.scaled(s_dn);
    m.add_constraint(format!("{name}_up"), &up, Sense::Le, a * c_lo - s_up * a)?;
    m.add_constraint(format!("{name}_dn"), &dn, Sense::Ge, a * c_hi - s_dn * a)?;
    Ok(())
}

fn tap_expr(ix: &ModelIndex, li: usize, t: usize) -> LinExpr {
    match ix.tap[li][t] {
        TapRef::Fixed(v) => LinExpr::constant(v),
        TapRef::Encoded(e) => ix.encodings[e].tap_variable.into(),
    }
}

fn shift_expr(ix: &ModelIndex, li: usize, t: usize) -> LinExpr {
    match ix.shift[li][t] {
        ShiftRef::Fixed(v) => LinExpr::constant(v),
        ShiftRef::Var(v) => v.into(),
    }
}

impl DispatchModel {
    /// Binary values holding every device at its initial setting with no
    /// adjustments. Non-binary entries are zero; the branch-and-bound start
    /// only reads the binaries and re-solves the rest.
    pub fn neutral_start(&self, case: &NetworkCase) -> Vec<f64> {
        let mut x = vec![0.0; self.milp.num_vars()];
        let ix = &self.index;
        for (li, br) in case.branches.iter().enumerate() {
            let d = &br.device;
            for t in 0..case.horizon {
                if let TapRef::Encoded(e) = ix.tap[li][t] {
                    let i = d.tap_index(d.initial_tap).unwrap_or(0);
                    for (v, val) in ix.encodings[e].selection_for(i) {
                        x[v.0] = val;
                    }
                }
                if let Some(grid) = ix.shift_grid[li].get(t) {
                    let best = grid
                        .iter()
                        .min_by(|a, b| {
                            (a.1 - d.initial_shift)
                                .abs()
                                .total_cmp(&(b.1 - d.initial_shift).abs())
                        })
                        .map(|g| g.0);
                    if let Some(g) = best {
                        x[g.0] = 1.0;
                    }
                }
            }
        }
        x
    }

    pub fn binary_count(&self) -> usize {
        self.milp
            .vars()
            .iter()
            .filter(|v| v.kind == VarKind::Binary)
            .count()
    }
}

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("assignment has {got} values, model has {want} variables")]
    Length { got: usize, want: usize },
    #[error("branch {branch} hour {hour}: {source}")]
    Encoding {
        branch: String,
        hour: usize,
        source: PltError,
    },
    #[error("branch {branch} hour {hour}: tap {tap} is not in the tap set")]
    UnsnappableTap { branch: String, hour: usize, tap: f64 },
    #[error("bus {bus} hour {hour}: balance residual {residual:e} p.u.")]
    Balance { bus: String, hour: usize, residual: f64 },
}

/// Reads a dispatch schedule out of a model assignment. The status is set to
/// optimal with zero gap; callers that know better overwrite it.
pub fn extract_solution(
    dm: &DispatchModel,
    case: &NetworkCase,
    x: &[f64],
) -> Result<DispatchSolution, ExtractError> {
    if x.len() != dm.milp.num_vars() {
        return Err(ExtractError::Length {
            got: x.len(),
            want: dm.milp.num_vars(),
        });
    }
    let ix = &dm.index;
    let hours = case.horizon;
    let base = case.base_mva;

    let p = ix
        .p
        .iter()
        .map(|row| row.iter().map(|v| x[v.0] * base).collect())
        .collect();
    let theta = ix
        .theta
        .iter()
        .map(|row| row.iter().map(|v| x[v.0]).collect())
        .collect();
    let flow = ix
        .flow
        .iter()
        .map(|row| row.iter().map(|e| e.eval(x) * base).collect())
        .collect();

    let mut tap = Vec::with_capacity(case.branches.len());
    let mut shift = Vec::with_capacity(case.branches.len());
    let mut adjust_counts = Vec::with_capacity(case.branches.len());
    for (li, br) in case.branches.iter().enumerate() {
        let d = &br.device;
        let mut taps = Vec::with_capacity(hours);
        let mut shifts = Vec::with_capacity(hours);
        for t in 0..hours {
            let tau = match ix.tap[li][t] {
                TapRef::Fixed(v) => v,
                TapRef::Encoded(e) => {
                    let enc = &ix.encodings[e];
                    let r = recover_values(enc, x).map_err(|source| ExtractError::Encoding {
                        branch: br.id.clone(),
                        hour: t + 1,
                        source,
                    })?;
                    *enc
                        .taps
                        .iter()
                        .find(|w| (*w - r.tau).abs() <= TAP_SNAP_TOL)
                        .ok_or_else(|| ExtractError::UnsnappableTap {
                            branch: br.id.clone(),
                            hour: t + 1,
                            tap: r.tau,
                        })?
                }
            };
            let delta = match ix.shift[li][t] {
                ShiftRef::Fixed(v) => v,
                ShiftRef::Var(v) => x[v.0].clamp(d.shifter_range.0, d.shifter_range.1),
            };
            taps.push(tau);
            shifts.push(delta);
        }
        let count = |vals: &[f64], init: f64| {
            let mut prev = init;
            let mut n = 0;
            for &v in vals {
                if (v - prev).abs() > CHANGE_TOL {
                    n += 1;
                }
                prev = v;
            }
            n
        };
        let init_tap = if d.has_adjustable_tap() { d.initial_tap } else { taps.first().copied().unwrap_or(1.0) };
        adjust_counts.push((count(&taps, init_tap), count(&shifts, d.initial_shift)));
        tap.push(taps);
        shift.push(shifts);
    }

    for (bi, rows) in ix.balance_rows.iter().enumerate() {
        for (t, &r) in rows.iter().enumerate() {
            let c = dm.milp.constraint(r);
            let residual = c.expr.eval(x) - c.rhs;
            if residual.abs() > BALANCE_TOL {
                return Err(ExtractError::Balance {
                    bus: case.buses[bi].id.clone(),
                    hour: t + 1,
                    residual,
                });
            }
        }
    }

    Ok(DispatchSolution {
        status: SolutionStatus::Optimal,
        objective: Some(dm.milp.eval_objective(x)),
        gap: 0.0,
        p,
        theta,
        flow,
        tap,
        shift,
        adjust_counts,
        solve_time: Default::default(),
        nodes: 0,
    })
}
