//! On the derated 30-bus case no dispatch meets the line limits with the
//! devices at their initial settings, while adjusting them does.

use tapdispatch::{load_case, solve_ed0, solve_ed1, SolveOptions};

fn main() {
    let case = load_case(include_str!("../cases/ieee30_flip.toml")).unwrap();
    let opts = SolveOptions::default();
    let (_, ed0) = solve_ed0(&case, &opts).unwrap();
    let (_, ed1) = solve_ed1(&case, &opts).unwrap();
    println!("ED0: {}", ed0.status);
    match ed1.objective {
        Some(c) => println!("ED1: {} at {c:.2} $", ed1.status),
        None => println!("ED1: {}", ed1.status),
    }
    if let Some(i) = case.branch_index("10") {
        let peak = ed1.flow[i].iter().fold(0.0f64, |m, f| m.max(f.abs()));
        println!("branch 10 peak flow {peak:.2} MW, rating {:.2} MW", case.branches[i].rating * case.base_mva);
    }
}
