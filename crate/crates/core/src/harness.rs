//! The `run` and `check` workflows: solve ED0/ED1, compare, write reports and
//! schedule CSVs, and independently verify a schedule against a case.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use tapdispatch_milp::{export_mps, MpsError};
use thiserror::Error;

use crate::dispatch::{solve_ed0, solve_ed1, DispatchError, SolveOptions};
use crate::formulation::{DispatchModel, ModelKind};
use crate::network::{load_case, CaseError, NetworkCase};
use crate::physics::{dc_error_report, dc_flow, write_dc_error_csv, ComplexTap, DcErrorRow};
use crate::solution::{DispatchSolution, SolutionStatus};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;
/// `check` found at least one failing constraint family.
pub const EXIT_CHECK_FAILED: i32 = 4;

/// Tolerances used by [`check`], in p.u. unless noted.
pub const CHECK_BALANCE_TOL: f64 = 1e-6;
pub const CHECK_LIMIT_TOL: f64 = 1e-6;
pub const CHECK_STEP_TOL: f64 = 1e-9;
pub const CHECK_TAP_TOL: f64 = 1e-6;
/// Flows within this many MW of the rating are reported as binding.
pub const BINDING_TOL_MW: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunMode {
    Ed0,
    Ed1,
    Both,
}

impl std::str::FromStr for RunMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ed0" => Ok(RunMode::Ed0),
            "ed1" => Ok(RunMode::Ed1),
            "both" => Ok(RunMode::Both),
            _ => Err(format!("unknown mode {s:?} (expected ed0, ed1 or both)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub mode: RunMode,
    pub solve: SolveOptions,
    pub export_mps: bool,
    pub out_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: RunMode::Both,
            solve: SolveOptions::default(),
            export_mps: false,
            out_dir: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ModelRun {
    pub kind: ModelKind,
    pub solution: DispatchSolution,
    pub binaries: usize,
    pub rows: usize,
    pub columns: usize,
    /// Lossless DC-vs-AC comparison; empty without a dispatch.
    pub dc_error: Vec<DcErrorRow>,
    pub mps: Option<String>,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub case_name: String,
    pub gap: f64,
    pub variant: &'static str,
    pub ed0: Option<ModelRun>,
    pub ed1: Option<ModelRun>,
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Case(#[from] CaseError),
    #[error(transparent)]
    Dispatch(#[from] DispatchError),
    #[error(transparent)]
    Mps(#[from] MpsError),
    #[error("schedule line {line}: {msg}")]
    Schedule { line: usize, msg: String },
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        EXIT_INVALID
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn read_case_file(path: &Path) -> Result<NetworkCase, HarnessError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(load_case(&text)?)
}

impl RunReport {
    /// `(ED0 − ED1)/ED0 · 100` when both runs produced a dispatch.
    pub fn cost_reduction_pct(&self) -> Option<f64> {
        let a = self.ed0.as_ref()?.solution.objective?;
        let b = self.ed1.as_ref()?.solution.objective?;
        (a != 0.0).then(|| (a - b) / a * 100.0)
    }

    /// ED1 decides in mode `both`; a flip where only ED1 is feasible exits 0.
    /// A limit exits 3 whether or not it left a dispatch behind.
    pub fn exit_code(&self) -> i32 {
        let run = self.ed1.as_ref().or(self.ed0.as_ref());
        match run.map(|r| r.solution.status) {
            Some(SolutionStatus::Optimal) => EXIT_OK,
            Some(SolutionStatus::Infeasible | SolutionStatus::Unbounded) => EXIT_INFEASIBLE,
            Some(SolutionStatus::Limit | SolutionStatus::FeasibleGap) => EXIT_LIMIT,
            None => EXIT_INVALID,
        }
    }

    fn runs(&self) -> impl Iterator<Item = &ModelRun> {
        self.ed0.iter().chain(self.ed1.iter())
    }

    pub fn render_text(&self, case: &NetworkCase) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "case: {}", self.case_name);
        let _ = writeln!(s, "termination gap: {}%", fmt_trim(self.gap * 100.0));
        let _ = writeln!(s, "encoding: {}", self.variant);
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "{:<5} {:<13} {:>16} {:>10} {:>9} {:>8} {:>8}",
            "model", "status", "cost ($)", "gap (%)", "time (s)", "nodes", "binaries"
        );
        for r in self.runs() {
            let sol = &r.solution;
            let cost = sol.objective.map_or("---".into(), |c| format!("{c:.2}"));
            let gap = if sol.status.has_dispatch() {
                format!("{:.4}", sol.gap * 100.0)
            } else {
                "---".into()
            };
            let _ = writeln!(
                s,
                "{:<5} {:<13} {:>16} {:>10} {:>9.3} {:>8} {:>8}",
                r.kind.label().to_uppercase(),
                sol.status.label(),
                cost,
                gap,
                sol.solve_time.as_secs_f64(),
                sol.nodes,
                r.binaries
            );
        }
        if self.ed0.is_some() && self.ed1.is_some() {
            let red = self
                .cost_reduction_pct()
                .map_or("---".into(), |v| format!("{:.2}%", if v.abs() < 0.005 { 0.0 } else { v }));
            let _ = writeln!(s, "cost reduction: {red}");
        }
        for r in self.runs() {
            let sol = &r.solution;
            if !sol.status.has_dispatch() {
                continue;
            }
            let label = r.kind.label().to_uppercase();
            let _ = writeln!(s, "\n{label} generation (MW)");
            table(
                &mut s,
                case.generators.iter().map(|g| g.id.as_str()),
                &sol.p,
                |v| format!("{v:.2}"),
            );
            let devs: Vec<usize> = (0..case.branches.len())
                .filter(|&i| !case.branches[i].device.is_passive())
                .collect();
            if !devs.is_empty() {
                let ids = devs.iter().map(|&i| case.branches[i].id.as_str());
                let _ = writeln!(s, "\n{label} tap ratio (p.u.)");
                let rows: Vec<Vec<f64>> = devs.iter().map(|&i| sol.tap[i].clone()).collect();
                table(&mut s, ids.clone(), &rows, |v| format!("{v:.4}"));
                let _ = writeln!(s, "\n{label} phase shift (deg)");
                let rows: Vec<Vec<f64>> = devs
                    .iter()
                    .map(|&i| sol.shift[i].iter().map(|d| d.to_degrees()).collect())
                    .collect();
                table(&mut s, ids, &rows, |v| format!("{v:.3}"));
                let _ = writeln!(s, "\n{label} adjustments (tap, shift)");
                for &i in &devs {
                    let (a, b) = sol.adjust_counts[i];
                    let _ = writeln!(s, "  {}: {a}, {b}", case.branches[i].id);
                }
            }
            if let Some(worst) = r
                .dc_error
                .iter()
                .max_by(|a, b| a.rel_err.total_cmp(&b.rel_err))
            {
                let ok = r.dc_error.iter().all(|e| e.within_taylor_bound(1e-9));
                let _ = writeln!(
                    s,
                    "\n{label} DC-vs-AC check: max relative error {:.4}% (branch {} hour {}){}; Taylor bound {}",
                    worst.rel_err * 100.0,
                    worst.branch_id,
                    worst.hour,
                    if worst.rel_err < 0.02 { "" } else { " [above 2%]" },
                    if ok { "holds" } else { "VIOLATED" }
                );
            }
        }
        s
    }

    pub fn render_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let red = self.cost_reduction_pct().map_or(String::new(), |v| v.to_string());
        let _ = w.write_record([
            "case",
            "model",
            "status",
            "cost",
            "gap",
            "time_s",
            "nodes",
            "cost_reduction_pct",
        ]);
        for r in self.runs() {
            let sol = &r.solution;
            let _ = w.write_record([
                self.case_name.clone(),
                r.kind.label().into(),
                sol.status.label().into(),
                sol.objective.map_or(String::new(), |c| c.to_string()),
                if sol.status.has_dispatch() {
                    sol.gap.to_string()
                } else {
                    String::new()
                },
                sol.solve_time.as_secs_f64().to_string(),
                sol.nodes.to_string(),
                red.clone(),
            ]);
        }
        String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
    }
}

fn fmt_trim(v: f64) -> String {
    let s = format!("{v:.8}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

fn table<'a>(
    s: &mut String,
    ids: impl Iterator<Item = &'a str>,
    rows: &[Vec<f64>],
    fmt: impl Fn(f64) -> String,
) {
    let hours = rows.first().map_or(0, Vec::len);
    let _ = write!(s, "{:>8}", "hour");
    for h in 1..=hours {
        let _ = write!(s, " {h:>8}");
    }
    let _ = writeln!(s);
    for (id, row) in ids.zip(rows) {
        let _ = write!(s, "{id:>8}");
        for &v in row {
            let _ = write!(s, " {:>8}", fmt(v));
        }
        let _ = writeln!(s);
    }
}

fn model_run(
    case: &NetworkCase,
    res: Result<(DispatchModel, DispatchSolution), DispatchError>,
    export: bool,
) -> Result<ModelRun, HarnessError> {
    let (dm, solution) = res?;
    let dc_error = if solution.status.has_dispatch() {
        dc_error_report(case, &solution, true).unwrap_or_default()
    } else {
        Vec::new()
    };
    let mps = if export {
        Some(export_mps(&dm.milp)?)
    } else {
        None
    };
    Ok(ModelRun {
        kind: dm.kind,
        binaries: dm.milp.num_binaries(),
        rows: dm.milp.num_constraints(),
        columns: dm.milp.num_vars(),
        solution,
        dc_error,
        mps,
    })
}

/// Solves the requested models. In mode `both` the two solves run on
/// separate threads.
pub fn run_case(case: &NetworkCase, cfg: &RunConfig) -> Result<RunReport, HarnessError> {
    let opts = &cfg.solve;
    let (ed0, ed1) = match cfg.mode {
        RunMode::Ed0 => (Some(solve_ed0(case, opts)), None),
        RunMode::Ed1 => (None, Some(solve_ed1(case, opts))),
        RunMode::Both => std::thread::scope(|s| {
            let a = s.spawn(|| solve_ed0(case, opts));
            let b = solve_ed1(case, opts);
            (Some(a.join().expect("ED0 solve panicked")), Some(b))
        }),
    };
    Ok(RunReport {
        case_name: case.name.clone(),
        gap: opts.gap,
        variant: opts.variant.label(),
        ed0: ed0.map(|r| model_run(case, r, cfg.export_mps)).transpose()?,
        ed1: ed1.map(|r| model_run(case, r, cfg.export_mps)).transpose()?,
    })
}

/// Writes `report.txt`, `report.csv` and one directory per model with the
/// schedule CSVs (and `model.mps` when exported).
pub fn write_outputs(report: &RunReport, case: &NetworkCase, dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let write = |p: PathBuf, data: &[u8]| fs::write(&p, data).map_err(io_err(&p));
    write(dir.join("report.txt"), report.render_text(case).as_bytes())?;
    write(dir.join("report.csv"), report.render_csv().as_bytes())?;
    for r in report.runs() {
        let sub = dir.join(r.kind.label());
        fs::create_dir_all(&sub).map_err(io_err(&sub))?;
        if let Some(m) = &r.mps {
            write(sub.join("model.mps"), m.as_bytes())?;
        }
        if !r.solution.status.has_dispatch() {
            continue;
        }
        let sol = &r.solution;
        write(sub.join("generation.csv"), &generation_csv(case, sol))?;
        write(sub.join("devices.csv"), &devices_csv(case, sol))?;
        write(sub.join("flows.csv"), &flows_csv(case, sol))?;
        write(sub.join("schedule.csv"), &schedule_csv(case, sol))?;
        let mut buf = Vec::new();
        write_dc_error_csv(&r.dc_error, &mut buf).map_err(|e| HarnessError::Io {
            path: sub.join("dc_error.csv"),
            source: e.into(),
        })?;
        write(sub.join("dc_error.csv"), &buf)?;
    }
    Ok(())
}

/// Loads a case, runs it and writes outputs if an output directory is set.
pub fn run(case_path: &Path, cfg: &RunConfig) -> Result<(RunReport, NetworkCase), HarnessError> {
    let case = read_case_file(case_path)?;
    let report = run_case(&case, cfg)?;
    if let Some(dir) = &cfg.out_dir {
        write_outputs(&report, &case, dir)?;
    }
    Ok((report, case))
}

fn csv_bytes(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let _ = w.write_record(header);
    for r in rows {
        let _ = w.write_record(&r);
    }
    w.into_inner().unwrap_or_default()
}

pub fn generation_csv(case: &NetworkCase, sol: &DispatchSolution) -> Vec<u8> {
    let rows = case.generators.iter().enumerate().flat_map(|(g, gen)| {
        sol.p[g]
            .iter()
            .enumerate()
            .map(move |(h, v)| vec![gen.id.clone(), (h + 1).to_string(), v.to_string()])
    });
    csv_bytes(&["gen", "hour", "MW"], rows)
}

/// Branches with a tap set or shifter only.
pub fn devices_csv(case: &NetworkCase, sol: &DispatchSolution) -> Vec<u8> {
    let rows = case
        .branches
        .iter()
        .enumerate()
        .filter(|(_, b)| !b.device.is_passive())
        .flat_map(|(i, br)| {
            (0..sol.tap[i].len()).map(move |h| {
                vec![
                    br.id.clone(),
                    (h + 1).to_string(),
                    sol.tap[i][h].to_string(),
                    sol.shift[i][h].to_degrees().to_string(),
                ]
            })
        });
    csv_bytes(&["branch", "hour", "tap", "shift_deg"], rows)
}

pub fn flows_csv(case: &NetworkCase, sol: &DispatchSolution) -> Vec<u8> {
    let base = case.base_mva;
    let rows = case.branches.iter().enumerate().flat_map(|(i, br)| {
        sol.flow[i].iter().enumerate().map(move |(h, &f)| {
            let limit = br.rating * base;
            let binding = limit > 0.0 && f.abs() >= limit - BINDING_TOL_MW;
            vec![
                br.id.clone(),
                (h + 1).to_string(),
                f.to_string(),
                if limit > 0.0 { limit.to_string() } else { String::new() },
                binding.to_string(),
            ]
        })
    });
    csv_bytes(&["branch", "hour", "MW", "limit", "binding"], rows)
}

/// The exchange format read by [`read_schedule`]: one row per value with
/// kinds `p` (MW), `theta` (deg), `tap` (p.u.) and `shift` (deg).
pub fn schedule_csv(case: &NetworkCase, sol: &DispatchSolution) -> Vec<u8> {
    let mut rows = Vec::new();
    let mut push = |kind: &str, id: &str, vals: &[f64], f: &dyn Fn(f64) -> f64| {
        for (h, &v) in vals.iter().enumerate() {
            rows.push(vec![kind.into(), id.into(), (h + 1).to_string(), f(v).to_string()]);
        }
    };
    for (g, gen) in case.generators.iter().enumerate() {
        push("p", &gen.id, &sol.p[g], &|v| v);
    }
    for (b, bus) in case.buses.iter().enumerate() {
        push("theta", &bus.id, &sol.theta[b], &f64::to_degrees);
    }
    for (i, br) in case.branches.iter().enumerate() {
        push("tap", &br.id, &sol.tap[i], &|v| v);
        push("shift", &br.id, &sol.shift[i], &f64::to_degrees);
    }
    csv_bytes(&["kind", "id", "hour", "value"], rows.into_iter())
}

/// Parses a schedule CSV into a solution whose flows are recomputed from
/// angles, taps and shifts.
pub fn read_schedule(case: &NetworkCase, text: &str) -> Result<DispatchSolution, HarnessError> {
    let h = case.horizon;
    let nan = |n: usize| vec![vec![f64::NAN; h]; n];
    let mut sol = DispatchSolution::without_dispatch(SolutionStatus::Optimal, Default::default());
    sol.gap = 0.0;
    sol.p = nan(case.generators.len());
    sol.theta = nan(case.buses.len());
    sol.tap = nan(case.branches.len());
    sol.shift = nan(case.branches.len());

    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let bad = |line: usize, msg: String| HarnessError::Schedule { line, msg };
    let headers = rdr.headers().map_err(|e| bad(1, e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["kind", "id", "hour", "value"] {
        return Err(bad(1, "expected header kind,id,hour,value".into()));
    }
    for (n, rec) in rdr.records().enumerate() {
        let line = n + 2;
        let rec = rec.map_err(|e| bad(line, e.to_string()))?;
        if rec.len() != 4 {
            return Err(bad(line, format!("expected 4 fields, found {}", rec.len())));
        }
        let (kind, id) = (&rec[0], &rec[1]);
        let hour: usize = rec[2]
            .parse()
            .map_err(|_| bad(line, format!("bad hour {:?}", &rec[2])))?;
        if hour == 0 || hour > h {
            return Err(bad(line, format!("hour {hour} outside 1..={h}")));
        }
        let value: f64 = rec[3]
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| bad(line, format!("bad value {:?}", &rec[3])))?;
        let (slot, v) = match kind {
            "p" => (case.generator_index(id).map(|i| &mut sol.p[i]), value),
            "theta" => (case.bus_index(id).map(|i| &mut sol.theta[i]), value.to_radians()),
            "tap" => (case.branch_index(id).map(|i| &mut sol.tap[i]), value),
            "shift" => (case.branch_index(id).map(|i| &mut sol.shift[i]), value.to_radians()),
            _ => return Err(bad(line, format!("unknown kind {kind:?}"))),
        };
        let row = slot.ok_or_else(|| bad(line, format!("unknown {kind} id {id:?}")))?;
        row[hour - 1] = v;
    }
    for (kind, rows) in [("p", &sol.p), ("theta", &sol.theta), ("tap", &sol.tap), ("shift", &sol.shift)] {
        for (i, row) in rows.iter().enumerate() {
            if let Some(t) = row.iter().position(|v| v.is_nan()) {
                let id = match kind {
                    "p" => &case.generators[i].id,
                    "theta" => &case.buses[i].id,
                    _ => &case.branches[i].id,
                };
                return Err(bad(0, format!("missing {kind} for {id} hour {}", t + 1)));
            }
        }
    }

    sol.flow = case
        .branches
        .iter()
        .enumerate()
        .map(|(i, br)| {
            let f = case.bus_index(&br.from_bus).expect("validated");
            let t = case.bus_index(&br.to_bus).expect("validated");
            (0..h)
                .map(|k| {
                    dc_flow(
                        sol.theta[f][k],
                        sol.theta[t][k],
                        ComplexTap::new(sol.tap[i][k], sol.shift[i][k]),
                        br.x,
                    ) * case.base_mva
                })
                .collect()
        })
        .collect();
    Ok(sol)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyResult {
    pub family: &'static str,
    pub violations: Vec<String>,
    /// Largest violation in the family's unit (MW for power, p.u. or rad otherwise).
    pub worst: f64,
}

impl FamilyResult {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub families: Vec<FamilyResult>,
    /// Largest `|Σp − Σd|` over hours, MW.
    pub system_residual_mw: f64,
    pub dc_error: Vec<DcErrorRow>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.families.iter().all(FamilyResult::passed)
    }

    pub fn family(&self, name: &str) -> Option<&FamilyResult> {
        self.families.iter().find(|f| f.family == name)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for f in &self.families {
            if f.passed() {
                let _ = writeln!(s, "{}: pass", f.family);
            } else {
                let _ = writeln!(
                    s,
                    "{}: FAIL ({} violations, worst excess {:.6})",
                    f.family,
                    f.violations.len(),
                    f.worst
                );
                for v in f.violations.iter().take(5) {
                    let _ = writeln!(s, "  {v}");
                }
            }
        }
        let _ = writeln!(s, "system residual: {:.3e} MW", self.system_residual_mw);
        if let Some(w) = self.dc_error.iter().max_by(|a, b| a.rel_err.total_cmp(&b.rel_err)) {
            let _ = writeln!(
                s,
                "DC-vs-AC: max relative error {:.4}% (branch {} hour {})",
                w.rel_err * 100.0,
                w.branch_id,
                w.hour
            );
        }
        s
    }
}

struct Family {
    r: FamilyResult,
}

impl Family {
    fn new(family: &'static str) -> Self {
        Family {
            r: FamilyResult {
                family,
                violations: Vec::new(),
                worst: 0.0,
            },
        }
    }

    /// Records `excess` if positive.
    fn over(&mut self, excess: f64, what: impl FnOnce() -> String) {
        if excess > 0.0 {
            self.r.worst = self.r.worst.max(excess);
            self.r.violations.push(what());
        }
    }
}

/// Verifies a schedule against every constraint family of the case.
pub fn check(case: &NetworkCase, sol: &DispatchSolution) -> CheckReport {
    let hours = case.horizon;
    let base = case.base_mva;
    let bidx = |id: &str| case.bus_index(id).expect("validated");

    let mut bal = Family::new("balance");
    let mut sys = 0.0f64;
    for t in 0..hours {
        let mut net = vec![0.0; case.buses.len()];
        for (g, gen) in case.generators.iter().enumerate() {
            net[bidx(&gen.bus)] += sol.p[g][t];
        }
        for (i, br) in case.branches.iter().enumerate() {
            net[bidx(&br.from_bus)] -= sol.flow[i][t];
            net[bidx(&br.to_bus)] += sol.flow[i][t];
        }
        let mut total = 0.0;
        for (b, bus) in case.buses.iter().enumerate() {
            let r = net[b] - case.demand[b][t] * base;
            total += r;
            bal.over(r.abs() - CHECK_BALANCE_TOL * base, || {
                format!("bus {} hour {}: residual {r:.6} MW", bus.id, t + 1)
            });
        }
        sys = sys.max(total.abs());
    }

    let mut lim = Family::new("line_limits");
    for (i, br) in case.branches.iter().enumerate() {
        if br.rating <= 0.0 {
            continue;
        }
        for t in 0..hours {
            let f = sol.flow[i][t];
            lim.over(f.abs() - (br.rating + CHECK_LIMIT_TOL) * base, || {
                format!("branch {} hour {}: |{f:.4}| > {} MW", br.id, t + 1, br.rating * base)
            });
        }
    }

    let mut gl = Family::new("generator_limits");
    let tol = CHECK_LIMIT_TOL * base;
    for (g, gen) in case.generators.iter().enumerate() {
        for t in 0..hours {
            let p = sol.p[g][t];
            gl.over(gen.p_min * base - p - tol, || {
                format!("generator {} hour {}: {p:.4} MW below minimum", gen.id, t + 1)
            });
            gl.over(p - gen.p_max * base - tol, || {
                format!("generator {} hour {}: {p:.4} MW above maximum", gen.id, t + 1)
            });
            let prev = if t == 0 {
                gen.initial_p.map(|v| v * base)
            } else {
                Some(sol.p[g][t - 1])
            };
            if let Some(prev) = prev {
                let d = p - prev;
                gl.over(d - gen.ramp_up * base - tol, || {
                    format!("generator {} hour {}: ramp up {d:.4} MW", gen.id, t + 1)
                });
                gl.over(-d - gen.ramp_down * base - tol, || {
                    format!("generator {} hour {}: ramp down {:.4} MW", gen.id, t + 1, -d)
                });
            }
        }
    }
    for t in 0..hours {
        let r = case.reserve[t];
        if r > 0.0 {
            let head: f64 = case
                .generators
                .iter()
                .enumerate()
                .map(|(g, gen)| gen.p_max * base - sol.p[g][t])
                .sum();
            gl.over(r * base - head - tol, || {
                format!("hour {}: reserve headroom {head:.4} MW below {} MW", t + 1, r * base)
            });
        }
    }

    let mut bud = Family::new("budgets");
    let mut steps = Family::new("steps");
    let mut mem = Family::new("tap_membership");
    let mut rng = Family::new("shift_range");
    for (i, br) in case.branches.iter().enumerate() {
        let d = &br.device;
        let changes = |vals: &[f64], init: f64| {
            let mut prev = init;
            let mut n = 0u32;
            for &v in vals {
                if (v - prev).abs() > crate::formulation::CHANGE_TOL {
                    n += 1;
                }
                prev = v;
            }
            n
        };
        for t in 0..hours {
            let tau = sol.tap[i][t];
            let ok = if d.has_adjustable_tap() {
                d.tap_set.iter().any(|w| (w - tau).abs() <= CHECK_TAP_TOL)
            } else {
                (tau - d.fixed_tap()).abs() <= CHECK_TAP_TOL
            };
            if !ok {
                mem.over(1.0, || format!("branch {} hour {}: tap {tau} not allowed", br.id, t + 1));
            }
            let delta = sol.shift[i][t];
            let (lo, hi) = d.shifter_range;
            rng.over((lo - delta).max(delta - hi) - CHECK_STEP_TOL, || {
                format!(
                    "branch {} hour {}: shift {:.4} deg outside [{:.4}, {:.4}]",
                    br.id,
                    t + 1,
                    delta.to_degrees(),
                    lo.to_degrees(),
                    hi.to_degrees()
                )
            });
        }
        if d.has_adjustable_tap() {
            let n = changes(&sol.tap[i], d.initial_tap);
            bud.over(n as f64 - d.tap_adjust_budget as f64, || {
                format!("branch {}: {n} tap adjustments, budget {}", br.id, d.tap_adjust_budget)
            });
            let mut prev = d.initial_tap;
            for (t, &v) in sol.tap[i].iter().enumerate() {
                steps.over((v - prev).abs() - d.tap_step_max - CHECK_STEP_TOL, || {
                    format!("branch {} hour {}: tap step {:.6}", br.id, t + 1, v - prev)
                });
                prev = v;
            }
        }
        if d.has_shifter() {
            let n = changes(&sol.shift[i], d.initial_shift);
            bud.over(n as f64 - d.shift_adjust_budget as f64, || {
                format!("branch {}: {n} shift adjustments, budget {}", br.id, d.shift_adjust_budget)
            });
            let mut prev = d.initial_shift;
            for (t, &v) in sol.shift[i].iter().enumerate() {
                steps.over((v - prev).abs() - d.shift_step_max - CHECK_STEP_TOL, || {
                    format!(
                        "branch {} hour {}: shift step {:.6} deg",
                        br.id,
                        t + 1,
                        (v - prev).to_degrees()
                    )
                });
                prev = v;
            }
        }
    }

    CheckReport {
        families: [bal, lim, gl, bud, steps, mem, rng].into_iter().map(|f| f.r).collect(),
        system_residual_mw: sys,
        dc_error: dc_error_report(case, sol, true).unwrap_or_default(),
    }
}

/// `schedule` is a schedule CSV, a directory containing `schedule.csv`, or a
/// run output directory, in which case the ED1 schedule is preferred.
pub fn check_path(case_path: &Path, schedule: &Path) -> Result<CheckReport, HarnessError> {
    let case = read_case_file(case_path)?;
    let file = if schedule.is_dir() {
        ["schedule.csv", "ed1/schedule.csv", "ed0/schedule.csv"]
            .iter()
            .map(|f| schedule.join(f))
            .find(|p| p.is_file())
            .unwrap_or_else(|| schedule.join("schedule.csv"))
    } else {
        schedule.to_path_buf()
    };
    let text = fs::read_to_string(&file).map_err(io_err(&file))?;
    let sol = read_schedule(&case, &text)?;
    Ok(check(&case, &sol))
}
