//! Solves the bundled six-bus case with devices fixed (ED0) and adjustable
//! (ED1) and prints costs and the device schedules.

use tapdispatch::{load_case, solve_ed0, solve_ed1, SolveOptions};

fn main() {
    let text = include_str!("../cases/six_bus.toml");
    let case = load_case(text).expect("bundled case is valid");
    let opts = SolveOptions::default();
    let (_, ed0) = solve_ed0(&case, &opts).unwrap();
    let (dm, ed1) = solve_ed1(&case, &opts).unwrap();
    let (c0, c1) = (ed0.objective.unwrap(), ed1.objective.unwrap());
    println!("ED0 {:>12.2} $  ({})", c0, ed0.status);
    println!("ED1 {:>12.2} $  ({}, {} binaries, {} nodes)", c1, ed1.status, dm.milp.num_binaries(), ed1.nodes);
    println!("reduction {:.2}%\n", (c0 - c1) / c0 * 100.0);

    for (i, br) in case.branches.iter().enumerate() {
        if br.device.is_passive() {
            continue;
        }
        let taps: Vec<String> = ed1.tap[i].iter().map(|t| format!("{t:.2}")).collect();
        let shifts: Vec<String> = ed1.shift[i].iter().map(|d| format!("{:.0}", d.to_degrees())).collect();
        println!("branch {} taps   {}", br.id, taps.join(" "));
        println!("branch {} shifts {}", br.id, shifts.join(" "));
    }
    println!();
    for (g, gen) in case.generators.iter().enumerate() {
        let e0: f64 = ed0.p[g].iter().sum();
        let e1: f64 = ed1.p[g].iter().sum();
        println!("{} energy {e0:>8.1} MWh -> {e1:>8.1} MWh", gen.id);
    }
}
