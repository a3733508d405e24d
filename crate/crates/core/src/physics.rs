//! Branch power for the generalized branch model: a line in series with an
//! off-nominal transformer `t = τ·e^{jδ}` at the sending end.

use num_complex::Complex64;
use thiserror::Error;

use crate::network::NetworkCase;
use crate::solution::DispatchSolution;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexTap {
    pub ratio: f64,
    /// Radians.
    pub shift: f64,
}

impl ComplexTap {
    pub const NEUTRAL: ComplexTap = ComplexTap {
        ratio: 1.0,
        shift: 0.0,
    };

    pub fn new(ratio: f64, shift: f64) -> Self {
        ComplexTap { ratio, shift }
    }

    pub fn as_complex(self) -> Complex64 {
        Complex64::from_polar(self.ratio, self.shift)
    }
}

/// DC approximation of the sending-end flow, `(θf − θt − δ)/(τx)`.
pub fn dc_flow(theta_from: f64, theta_to: f64, tap: ComplexTap, x: f64) -> f64 {
    (theta_from - theta_to - tap.shift) / (tap.ratio * x)
}

/// Exact real power at the sending end,
/// `Re{ (Vf/t) · conj( j·(Vf/t)·b/2 + (Vf/t − Vt)·y ) }` with `y = 1/(r + jx)`.
///
/// With `r = b = 0` and unit voltage magnitudes this is `sin(θf − θt − δ)/(τx)`,
/// so it agrees in sign with [`dc_flow`].
pub fn ac_sending_power(
    v_from: Complex64,
    v_to: Complex64,
    tap: ComplexTap,
    r: f64,
    x: f64,
    b: f64,
) -> f64 {
    let y = Complex64::new(r, x).inv();
    let vf = v_from / tap.as_complex();
    let current = Complex64::i() * vf * (b / 2.0) + (vf - v_to) * y;
    (vf * current.conj()).re
}

#[derive(Debug, Error)]
pub enum PhysicsError {
    #[error("solution has no {0}")]
    Missing(&'static str),
    #[error("solution covers {got} hours, case has {want}")]
    Horizon { got: usize, want: usize },
}

/// One branch-hour of a [`dc_error_report`]. Powers are in MW.
#[derive(Clone, Debug, PartialEq)]
pub struct DcErrorRow {
    pub branch_id: String,
    /// 1-based.
    pub hour: usize,
    pub p_dc: f64,
    pub p_ac: f64,
    pub abs_err: f64,
    /// `abs_err / |p_dc|`, or 0 when the DC flow is zero.
    pub rel_err: f64,
    /// `|φ|³/(6τx)` in MW with `φ = θf − θt − δ`; bounds `abs_err` when `r = b = 0`.
    pub taylor_bound: f64,
}

impl DcErrorRow {
    pub fn within_taylor_bound(&self, slack_mw: f64) -> bool {
        self.abs_err <= self.taylor_bound + slack_mw
    }
}

/// Compares the DC flows of a solution with the exact branch power at
/// `V = e^{jθ}`. With `flat_voltage` the branch is also taken as lossless and
/// uncharged (`r = b = 0`), isolating the small-angle error; otherwise the
/// case's `r` and `b` are used.
pub fn dc_error_report(
    case: &NetworkCase,
    solution: &DispatchSolution,
    flat_voltage: bool,
) -> Result<Vec<DcErrorRow>, PhysicsError> {
    let h = case.horizon;
    for (v, what) in [
        (solution.theta.len() == case.buses.len(), "angles"),
        (solution.flow.len() == case.branches.len(), "flows"),
        (solution.tap.len() == case.branches.len(), "taps"),
        (solution.shift.len() == case.branches.len(), "shifts"),
    ] {
        if !v {
            return Err(PhysicsError::Missing(what));
        }
    }
    if let Some(row) = solution
        .theta
        .iter()
        .chain(&solution.flow)
        .chain(&solution.tap)
        .chain(&solution.shift)
        .find(|r| r.len() != h)
    {
        return Err(PhysicsError::Horizon {
            got: row.len(),
            want: h,
        });
    }

    let base = case.base_mva;
    let mut rows = Vec::with_capacity(case.branches.len() * h);
    for (k, br) in case.branches.iter().enumerate() {
        let f = case.bus_index(&br.from_bus).expect("validated case");
        let t = case.bus_index(&br.to_bus).expect("validated case");
        let (r, b) = if flat_voltage { (0.0, 0.0) } else { (br.r, br.b) };
        for hour in 0..h {
            let tf = solution.theta[f][hour];
            let tt = solution.theta[t][hour];
            let tap = ComplexTap::new(solution.tap[k][hour], solution.shift[k][hour]);
            let p_ac = ac_sending_power(
                Complex64::from_polar(1.0, tf),
                Complex64::from_polar(1.0, tt),
                tap,
                r,
                br.x,
                b,
            ) * base;
            let p_dc = solution.flow[k][hour];
            let abs_err = (p_ac - p_dc).abs();
            let phi = tf - tt - tap.shift;
            rows.push(DcErrorRow {
                branch_id: br.id.clone(),
                hour: hour + 1,
                p_dc,
                p_ac,
                abs_err,
                rel_err: if p_dc.abs() > 1e-9 { abs_err / p_dc.abs() } else { 0.0 },
                taylor_bound: phi.abs().powi(3) / (6.0 * tap.ratio * br.x) * base,
            });
        }
    }
    Ok(rows)
}

pub fn write_dc_error_csv<W: std::io::Write>(rows: &[DcErrorRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["branch_id", "hour", "p_dc", "p_ac", "abs_err", "rel_err"])?;
    for r in rows {
        w.write_record([
            r.branch_id.clone(),
            r.hour.to_string(),
            r.p_dc.to_string(),
            r.p_ac.to_string(),
            r.abs_err.to_string(),
            r.rel_err.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
