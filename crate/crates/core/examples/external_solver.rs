//! Round trip through an external solver: export the model as MPS, then read
//! the solver's CPLEX-style `.sol` file and turn it into a dispatch.
//!
//! Usage: `external_solver <model.mps out> [<solution.sol in>]`. Without a
//! solution file the example solves the model itself and writes the `.sol`
//! it would expect from an external tool, to show the format.

use tapdispatch::{build_ed1, extract_solution, load_case, EncodingVariant};
use tapdispatch_milp::{export_mps, read_cplex_sol, solve_milp, BnbConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let mps_path = args.next().unwrap_or_else(|| "six_bus_ed1.mps".into());
    let case = load_case(include_str!("../cases/six_bus.toml")).unwrap();
    let dm = build_ed1(&case, EncodingVariant::DisjunctiveExact).unwrap();
    std::fs::write(&mps_path, export_mps(&dm.milp).unwrap()).unwrap();
    println!("model written to {mps_path}");

    let sol_text = match args.next() {
        Some(p) => std::fs::read_to_string(p).unwrap(),
        None => {
            let s = solve_milp(&dm.milp, &BnbConfig::default());
            let x = s.assignment.unwrap();
            let mut t = format!(
                "<?xml version=\"1.0\"?>\n<CPLEXSolution>\n <header objectiveValue=\"{}\"/>\n <variables>\n",
                s.objective
            );
            for (v, val) in dm.milp.vars().iter().zip(&x) {
                t += &format!("  <variable name=\"{}\" value=\"{val}\"/>\n", v.name);
            }
            t + " </variables>\n</CPLEXSolution>\n"
        }
    };
    let ext = read_cplex_sol(&sol_text).unwrap();
    let x = ext.assignment(&dm.milp, true).unwrap();
    let sol = extract_solution(&dm, &case, &x).unwrap();
    println!(
        "solution objective {:.2} $ (file reports {:?})",
        sol.objective.unwrap(),
        ext.objective
    );
}
