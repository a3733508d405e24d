//! Network case data: buses, generalized branches with optional tap-changer
//! and phase-shifter devices, generators and hourly demand.
//!
//! Everything inside a [`NetworkCase`] is per-unit on `base_mva` with angles
//! in radians. MW and degrees only appear in the TOML case file, handled by
//! [`load_case`] and [`serialize_case`].

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default angle box for buses that do not specify one.
pub const DEFAULT_ANGLE_BOUND: f64 = 0.6;

const TAP_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Bus {
    pub id: String,
    pub is_reference: bool,
    /// `(lo, hi)` in radians.
    pub angle_bounds: (f64, f64),
}

/// Tap changer and phase shifter settings for one branch. An empty tap set
/// means the ratio is fixed at 1; a shifter range of `(0, 0)` means no shifter.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchDevice {
    pub tap_set: Vec<f64>,
    /// `(lo, hi)` in radians.
    pub shifter_range: (f64, f64),
    pub tap_step_max: f64,
    /// Radians.
    pub shift_step_max: f64,
    pub tap_adjust_budget: u32,
    pub shift_adjust_budget: u32,
    pub initial_tap: f64,
    /// Radians.
    pub initial_shift: f64,
}

impl Default for BranchDevice {
    fn default() -> Self {
        BranchDevice {
            tap_set: Vec::new(),
            shifter_range: (0.0, 0.0),
            tap_step_max: 0.0,
            shift_step_max: 0.0,
            tap_adjust_budget: 0,
            shift_adjust_budget: 0,
            initial_tap: 1.0,
            initial_shift: 0.0,
        }
    }
}

impl BranchDevice {
    /// More than one tap to choose from.
    pub fn has_adjustable_tap(&self) -> bool {
        self.tap_set.len() > 1
    }

    pub fn has_shifter(&self) -> bool {
        self.shifter_range.0 < self.shifter_range.1
    }

    pub fn is_passive(&self) -> bool {
        !self.has_adjustable_tap() && !self.has_shifter()
    }

    /// Ratio used when the tap is not adjustable.
    pub fn fixed_tap(&self) -> f64 {
        match self.tap_set.as_slice() {
            [] => 1.0,
            [w] => *w,
            _ => self.initial_tap,
        }
    }

    /// Position of `tap` in the tap set, if it is a member.
    pub fn tap_index(&self, tap: f64) -> Option<usize> {
        self.tap_set.iter().position(|w| (w - tap).abs() <= TAP_TOL)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub id: String,
    pub from_bus: String,
    pub to_bus: String,
    pub x: f64,
    pub r: f64,
    pub b: f64,
    /// Per-unit; 0 means unlimited.
    pub rating: f64,
    pub device: BranchDevice,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub id: String,
    pub bus: String,
    pub p_min: f64,
    pub p_max: f64,
    /// Per-unit per hour; infinite when unconstrained.
    pub ramp_up: f64,
    pub ramp_down: f64,
    /// Output in the hour before the horizon; ramps at hour 1 are skipped when absent.
    pub initial_p: Option<f64>,
    /// `(p, cost $/h)` breakpoints of a convex piecewise-linear cost, p per-unit.
    pub cost_curve: Vec<(f64, f64)>,
}

impl Generator {
    /// Cost in $/h at output `p` (per-unit), interpolating the curve.
    pub fn cost_at(&self, p: f64) -> f64 {
        let c = &self.cost_curve;
        if c.len() == 1 {
            return c[0].1;
        }
        let k = c
            .windows(2)
            .position(|w| p <= w[1].0)
            .unwrap_or(c.len() - 2);
        let (p0, f0) = c[k];
        let (p1, f1) = c[k + 1];
        f0 + (f1 - f0) * (p - p0) / (p1 - p0)
    }

    /// Segments of the cost curve restricted to `[p_min, p_max]` as `(length, slope)`.
    pub fn cost_segments(&self) -> Vec<(f64, f64)> {
        self.cost_curve
            .windows(2)
            .filter_map(|w| {
                let (a, fa) = w[0];
                let (b, fb) = w[1];
                let lo = a.max(self.p_min);
                let hi = b.min(self.p_max);
                (hi > lo).then(|| (hi - lo, (fb - fa) / (b - a)))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetworkCase {
    pub name: String,
    pub base_mva: f64,
    pub horizon: usize,
    pub buses: Vec<Bus>,
    pub branches: Vec<Branch>,
    pub generators: Vec<Generator>,
    /// `demand[bus][hour]`, per-unit, buses in case order.
    pub demand: Vec<Vec<f64>>,
    /// Spinning reserve requirement per hour, per-unit.
    pub reserve: Vec<f64>,
}

impl NetworkCase {
    pub fn bus_index(&self, id: &str) -> Option<usize> {
        self.buses.iter().position(|b| b.id == id)
    }

    pub fn branch_index(&self, id: &str) -> Option<usize> {
        self.branches.iter().position(|b| b.id == id)
    }

    pub fn generator_index(&self, id: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.id == id)
    }

    pub fn reference_bus(&self) -> Option<usize> {
        self.buses.iter().position(|b| b.is_reference)
    }

    pub fn total_demand(&self, hour: usize) -> f64 {
        self.demand.iter().map(|d| d[hour]).sum()
    }

    /// Same case with every device removed, so every branch is a plain line
    /// at ratio 1 and no shift.
    pub fn without_devices(&self) -> NetworkCase {
        let mut c = self.clone();
        for br in &mut c.branches {
            br.device = BranchDevice::default();
        }
        c
    }
}

/// Which invariant a [`Diagnostic`] reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    InvalidId,
    DuplicateId,
    BaseMva,
    Horizon,
    ReferenceBusCount,
    AngleBounds,
    UnknownBus,
    SelfLoop,
    Reactance,
    Resistance,
    Charging,
    Rating,
    NonPositiveTap,
    DuplicateTap,
    TapOrder,
    ShifterRange,
    TapStep,
    ShiftStep,
    InitialTap,
    InitialShift,
    GeneratorLimits,
    Ramp,
    CostBreakpoints,
    CostSpan,
    CostConvexity,
    DemandShape,
    Demand,
    Reserve,
    NonFinite,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::InvalidId => "invalid id",
            Rule::DuplicateId => "duplicate id",
            Rule::BaseMva => "base MVA must be positive",
            Rule::Horizon => "horizon must be at least one hour",
            Rule::ReferenceBusCount => "exactly one reference bus",
            Rule::AngleBounds => "angle bounds must satisfy lo < hi",
            Rule::UnknownBus => "unknown bus",
            Rule::SelfLoop => "self-loop branch",
            Rule::Reactance => "reactance must be positive",
            Rule::Resistance => "resistance must be non-negative",
            Rule::Charging => "charging must be non-negative",
            Rule::Rating => "rating must be non-negative",
            Rule::NonPositiveTap => "tap ratios must be positive",
            Rule::DuplicateTap => "duplicate tap value on branch",
            Rule::TapOrder => "tap set must be strictly increasing",
            Rule::ShifterRange => "shifter range must satisfy lo <= hi",
            Rule::TapStep => "tap step must be positive for adjustable taps",
            Rule::ShiftStep => "shift step must be positive for adjustable shifters",
            Rule::InitialTap => "initial tap not in discrete set",
            Rule::InitialShift => "initial shift outside shifter range",
            Rule::GeneratorLimits => "generator limits must satisfy 0 <= p_min <= p_max",
            Rule::Ramp => "ramp limits must be non-negative",
            Rule::CostBreakpoints => "cost breakpoints must be strictly increasing",
            Rule::CostSpan => "cost curve must span [p_min, p_max]",
            Rule::CostConvexity => "cost curve must be convex",
            Rule::DemandShape => "demand must cover every hour",
            Rule::Demand => "demand must be finite",
            Rule::Reserve => "reserve must be non-negative and cover every hour",
            Rule::NonFinite => "value must be finite",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostic {
    /// `bus 3`, `branch L7`, `generator G1` or `case`.
    pub entity: String,
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity, self.rule)?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum CaseError {
    #[error("case file: {0}")]
    Schema(String),
    #[error("{} invalid: {}", .0.len(), join(.0))]
    Invalid(Vec<Diagnostic>),
}

fn join(d: &[Diagnostic]) -> String {
    d.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; ")
}

impl CaseError {
    pub fn diagnostics(&self) -> &[Diagnostic] {
        match self {
            CaseError::Invalid(d) => d,
            CaseError::Schema(_) => &[],
        }
    }
}

/// Checks every case invariant, returning one diagnostic per violation.
pub fn validate_case(case: &NetworkCase) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut push = |entity: String, rule: Rule, detail: String| {
        out.push(Diagnostic {
            entity,
            rule,
            detail,
        })
    };

    if !(case.base_mva > 0.0 && case.base_mva.is_finite()) {
        push("case".into(), Rule::BaseMva, format!("{}", case.base_mva));
    }
    if case.horizon == 0 {
        push("case".into(), Rule::Horizon, String::new());
    }

    let check_id = |id: &str| !id.is_empty() && !id.chars().any(|c| c.is_whitespace());

    let mut bus_ids = HashSet::new();
    for b in &case.buses {
        let e = format!("bus {}", b.id);
        if !check_id(&b.id) {
            push(e.clone(), Rule::InvalidId, String::new());
        }
        if !bus_ids.insert(b.id.as_str()) {
            push(e.clone(), Rule::DuplicateId, String::new());
        }
        let (lo, hi) = b.angle_bounds;
        if !(lo.is_finite() && hi.is_finite()) {
            push(e.clone(), Rule::NonFinite, "angle bounds".into());
        } else if lo >= hi {
            push(e, Rule::AngleBounds, format!("[{lo}, {hi}]"));
        }
    }
    let refs = case.buses.iter().filter(|b| b.is_reference).count();
    if refs != 1 {
        push("case".into(), Rule::ReferenceBusCount, format!("found {refs}"));
    }

    let mut br_ids = HashSet::new();
    for br in &case.branches {
        let e = format!("branch {}", br.id);
        if !check_id(&br.id) {
            push(e.clone(), Rule::InvalidId, String::new());
        }
        if !br_ids.insert(br.id.as_str()) {
            push(e.clone(), Rule::DuplicateId, String::new());
        }
        for end in [&br.from_bus, &br.to_bus] {
            if !bus_ids.contains(end.as_str()) {
                push(e.clone(), Rule::UnknownBus, end.clone());
            }
        }
        if br.from_bus == br.to_bus {
            push(e.clone(), Rule::SelfLoop, br.from_bus.clone());
        }
        for (v, what) in [(br.x, "x"), (br.r, "r"), (br.b, "b"), (br.rating, "rating")] {
            if !v.is_finite() {
                push(e.clone(), Rule::NonFinite, what.into());
            }
        }
        if !(br.x > 0.0) {
            push(e.clone(), Rule::Reactance, format!("{}", br.x));
        }
        if br.r < 0.0 {
            push(e.clone(), Rule::Resistance, format!("{}", br.r));
        }
        if br.b < 0.0 {
            push(e.clone(), Rule::Charging, format!("{}", br.b));
        }
        if br.rating < 0.0 {
            push(e.clone(), Rule::Rating, format!("{}", br.rating));
        }

        let d = &br.device;
        if d.tap_set.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            push(e.clone(), Rule::NonPositiveTap, String::new());
        }
        for w in d.tap_set.windows(2) {
            if w[0] == w[1] {
                push(e.clone(), Rule::DuplicateTap, format!("{}", w[0]));
            } else if w[0] > w[1] {
                push(e.clone(), Rule::TapOrder, format!("{} > {}", w[0], w[1]));
            }
        }
        let (slo, shi) = d.shifter_range;
        if !(slo.is_finite() && shi.is_finite()) {
            push(e.clone(), Rule::NonFinite, "shifter range".into());
        } else if slo > shi {
            push(e.clone(), Rule::ShifterRange, format!("[{slo}, {shi}]"));
        }
        if d.tap_set.len() > 1 && !(d.tap_step_max > 0.0) {
            push(e.clone(), Rule::TapStep, format!("{}", d.tap_step_max));
        }
        if slo < shi && !(d.shift_step_max > 0.0) {
            push(e.clone(), Rule::ShiftStep, format!("{}", d.shift_step_max));
        }
        if !d.tap_set.is_empty() && d.tap_index(d.initial_tap).is_none() {
            push(e.clone(), Rule::InitialTap, format!("{}", d.initial_tap));
        }
        if !(d.initial_shift >= slo && d.initial_shift <= shi) {
            push(e, Rule::InitialShift, format!("{}", d.initial_shift));
        }
    }

    let mut gen_ids = HashSet::new();
    for g in &case.generators {
        let e = format!("generator {}", g.id);
        if !check_id(&g.id) {
            push(e.clone(), Rule::InvalidId, String::new());
        }
        if !gen_ids.insert(g.id.as_str()) {
            push(e.clone(), Rule::DuplicateId, String::new());
        }
        if !bus_ids.contains(g.bus.as_str()) {
            push(e.clone(), Rule::UnknownBus, g.bus.clone());
        }
        if !(g.p_min.is_finite() && g.p_max.is_finite()) {
            push(e.clone(), Rule::NonFinite, "limits".into());
        } else if !(0.0 <= g.p_min && g.p_min <= g.p_max) {
            push(e.clone(), Rule::GeneratorLimits, format!("[{}, {}]", g.p_min, g.p_max));
        }
        if g.ramp_up.is_nan() || g.ramp_down.is_nan() || g.ramp_up < 0.0 || g.ramp_down < 0.0 {
            push(e.clone(), Rule::Ramp, String::new());
        }
        if g.initial_p.is_some_and(|p| !p.is_finite()) {
            push(e.clone(), Rule::NonFinite, "initial_p".into());
        }
        let c = &g.cost_curve;
        if c.iter().any(|(p, f)| !p.is_finite() || !f.is_finite()) {
            push(e.clone(), Rule::NonFinite, "cost curve".into());
            continue;
        }
        if c.windows(2).any(|w| w[0].0 >= w[1].0) {
            push(e.clone(), Rule::CostBreakpoints, String::new());
            continue;
        }
        let span = match (c.first(), c.last()) {
            (Some(a), Some(b)) => a.0 <= g.p_min && b.0 >= g.p_max,
            _ => false,
        };
        if !span {
            push(e.clone(), Rule::CostSpan, String::new());
        }
        let slopes: Vec<f64> = c
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();
        if slopes
            .windows(2)
            .any(|s| s[1] < s[0] - 1e-9 * s[0].abs().max(1.0))
        {
            push(e, Rule::CostConvexity, String::new());
        }
    }

    let h = case.horizon;
    if case.demand.len() != case.buses.len() || case.demand.iter().any(|d| d.len() != h) {
        push("case".into(), Rule::DemandShape, String::new());
    } else {
        for (b, d) in case.buses.iter().zip(&case.demand) {
            if d.iter().any(|v| !v.is_finite()) {
                push(format!("bus {}", b.id), Rule::Demand, String::new());
            }
        }
    }
    if case.reserve.len() != h || case.reserve.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) {
        push("case".into(), Rule::Reserve, String::new());
    }
    out
}

// ---- file format ----

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseFile {
    name: String,
    base_mva: f64,
    horizon: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reserve: Option<Vec<f64>>,
    buses: Vec<BusFile>,
    branches: Vec<BranchFile>,
    generators: Vec<GeneratorFile>,
    #[serde(default)]
    demand: BTreeMap<String, Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BusFile {
    id: String,
    #[serde(default)]
    is_reference: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angle_bounds: Option<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BranchFile {
    id: String,
    from_bus: String,
    to_bus: String,
    x: f64,
    #[serde(default)]
    r: f64,
    #[serde(default)]
    b: f64,
    #[serde(default)]
    rating: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    device: Option<DeviceFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeviceFile {
    #[serde(default)]
    tap_set: Vec<f64>,
    #[serde(default)]
    shifter_range: [f64; 2],
    #[serde(default)]
    tap_step_max: f64,
    #[serde(default)]
    shift_step_max: f64,
    #[serde(default)]
    tap_adjust_budget: u32,
    #[serde(default)]
    shift_adjust_budget: u32,
    #[serde(default = "one")]
    initial_tap: f64,
    #[serde(default)]
    initial_shift: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorFile {
    id: String,
    bus: String,
    p_min: f64,
    p_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ramp_up: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ramp_down: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial_p: Option<f64>,
    cost_curve: Vec<[f64; 2]>,
}

/// Parses and validates a TOML case file, converting to per-unit and radians.
pub fn load_case(text: &str) -> Result<NetworkCase, CaseError> {
    let file: CaseFile = toml::from_str(text).map_err(|e| CaseError::Schema(e.to_string()))?;
    let base = file.base_mva;
    let h = file.horizon;
    let deg = f64::to_radians;

    let buses: Vec<Bus> = file
        .buses
        .into_iter()
        .map(|b| Bus {
            angle_bounds: b
                .angle_bounds
                .map(|[lo, hi]| (deg(lo), deg(hi)))
                .unwrap_or((-DEFAULT_ANGLE_BOUND, DEFAULT_ANGLE_BOUND)),
            id: b.id,
            is_reference: b.is_reference,
        })
        .collect();

    let mut demand_map: HashMap<String, Vec<f64>> = file.demand.into_iter().collect();
    let mut unknown: Vec<String> = demand_map
        .keys()
        .filter(|k| !buses.iter().any(|b| &b.id == *k))
        .cloned()
        .collect();
    if !unknown.is_empty() {
        unknown.sort();
        return Err(CaseError::Schema(format!(
            "demand refers to unknown bus {}",
            unknown.join(", ")
        )));
    }
    let demand = buses
        .iter()
        .map(|b| match demand_map.remove(&b.id) {
            Some(v) => v.into_iter().map(|d| d / base).collect(),
            None => vec![0.0; h],
        })
        .collect();

    let branches = file
        .branches
        .into_iter()
        .map(|br| {
            let device = br
                .device
                .map(|d| BranchDevice {
                    tap_set: d.tap_set,
                    shifter_range: (deg(d.shifter_range[0]), deg(d.shifter_range[1])),
                    tap_step_max: d.tap_step_max,
                    shift_step_max: deg(d.shift_step_max),
                    tap_adjust_budget: d.tap_adjust_budget,
                    shift_adjust_budget: d.shift_adjust_budget,
                    initial_tap: d.initial_tap,
                    initial_shift: deg(d.initial_shift),
                })
                .unwrap_or_default();
            Branch {
                id: br.id,
                from_bus: br.from_bus,
                to_bus: br.to_bus,
                x: br.x,
                r: br.r,
                b: br.b,
                rating: br.rating / base,
                device,
            }
        })
        .collect();

    let generators = file
        .generators
        .into_iter()
        .map(|g| Generator {
            id: g.id,
            bus: g.bus,
            p_min: g.p_min / base,
            p_max: g.p_max / base,
            ramp_up: g.ramp_up.map_or(f64::INFINITY, |r| r / base),
            ramp_down: g.ramp_down.map_or(f64::INFINITY, |r| r / base),
            initial_p: g.initial_p.map(|p| p / base),
            cost_curve: g.cost_curve.iter().map(|[p, f]| (p / base, *f)).collect(),
        })
        .collect();

    let case = NetworkCase {
        name: file.name,
        base_mva: base,
        horizon: h,
        buses,
        branches,
        generators,
        demand,
        reserve: file
            .reserve
            .map(|r| r.into_iter().map(|v| v / base).collect())
            .unwrap_or_else(|| vec![0.0; h]),
    };
    let diags = validate_case(&case);
    if diags.is_empty() {
        Ok(case)
    } else {
        Err(CaseError::Invalid(diags))
    }
}

/// Writes a case back to the TOML file format (MW and degrees).
pub fn serialize_case(case: &NetworkCase) -> String {
    let base = case.base_mva;
    let deg = f64::to_degrees;
    let file = CaseFile {
        name: case.name.clone(),
        base_mva: base,
        horizon: case.horizon,
        reserve: case
            .reserve
            .iter()
            .any(|r| *r != 0.0)
            .then(|| case.reserve.iter().map(|r| r * base).collect()),
        buses: case
            .buses
            .iter()
            .map(|b| BusFile {
                id: b.id.clone(),
                is_reference: b.is_reference,
                angle_bounds: Some([deg(b.angle_bounds.0), deg(b.angle_bounds.1)]),
            })
            .collect(),
        branches: case
            .branches
            .iter()
            .map(|br| {
                let d = &br.device;
                BranchFile {
                    id: br.id.clone(),
                    from_bus: br.from_bus.clone(),
                    to_bus: br.to_bus.clone(),
                    x: br.x,
                    r: br.r,
                    b: br.b,
                    rating: br.rating * base,
                    device: (*d != BranchDevice::default()).then(|| DeviceFile {
                        tap_set: d.tap_set.clone(),
                        shifter_range: [deg(d.shifter_range.0), deg(d.shifter_range.1)],
                        tap_step_max: d.tap_step_max,
                        shift_step_max: deg(d.shift_step_max),
                        tap_adjust_budget: d.tap_adjust_budget,
                        shift_adjust_budget: d.shift_adjust_budget,
                        initial_tap: d.initial_tap,
                        initial_shift: deg(d.initial_shift),
                    }),
                }
            })
            .collect(),
        generators: case
            .generators
            .iter()
            .map(|g| GeneratorFile {
                id: g.id.clone(),
                bus: g.bus.clone(),
                p_min: g.p_min * base,
                p_max: g.p_max * base,
                ramp_up: g.ramp_up.is_finite().then(|| g.ramp_up * base),
                ramp_down: g.ramp_down.is_finite().then(|| g.ramp_down * base),
                initial_p: g.initial_p.map(|p| p * base),
                cost_curve: g.cost_curve.iter().map(|(p, f)| [p * base, *f]).collect(),
            })
            .collect(),
        demand: case
            .buses
            .iter()
            .zip(&case.demand)
            .filter(|(_, d)| d.iter().any(|v| *v != 0.0))
            .map(|(b, d)| (b.id.clone(), d.iter().map(|v| v * base).collect()))
            .collect(),
    };
    toml::to_string(&file).expect("case serializes")
}
