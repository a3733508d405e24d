//! DC flow versus the exact sending-end power of a branch with an
//! off-nominal tap and a phase shift.

use num_complex::Complex64;
use tapdispatch::physics::{ac_sending_power, dc_flow, ComplexTap};

fn main() {
    let x = 0.05;
    println!("{:>8} {:>6} {:>7} {:>10} {:>10} {:>9}", "angle", "tap", "shift", "dc (pu)", "ac (pu)", "error");
    for angle_deg in [1.0, 5.0, 10.0, 20.0] {
        for (tau, shift_deg) in [(1.0, 0.0), (0.98, 3.0), (1.02, -3.0)] {
            let tf = f64::to_radians(angle_deg);
            let tap = ComplexTap::new(tau, f64::to_radians(shift_deg));
            let dc = dc_flow(tf, 0.0, tap, x);
            let ac = ac_sending_power(Complex64::from_polar(1.0, tf), Complex64::new(1.0, 0.0), tap, 0.0, x, 0.0);
            println!(
                "{angle_deg:>8.1} {tau:>6.2} {shift_deg:>7.1} {dc:>10.5} {ac:>10.5} {:>8.3}%",
                (ac - dc).abs() / dc.abs() * 100.0
            );
        }
    }

    // Resistance and charging only enter the exact expression.
    let v1 = Complex64::from_polar(1.0, 0.1);
    let v2 = Complex64::new(1.0, 0.0);
    let lossless = ac_sending_power(v1, v2, ComplexTap::NEUTRAL, 0.0, 0.1, 0.0);
    let lossy = ac_sending_power(v1, v2, ComplexTap::NEUTRAL, 0.02, 0.1, 0.2);
    println!("\nlossless {lossless:.5} pu, with r = 0.02 and b = 0.2: {lossy:.5} pu");
}
