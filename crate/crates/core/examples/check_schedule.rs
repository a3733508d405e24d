//! Writes a schedule CSV for a solved case, verifies it, then edits one tap
//! off the tap set and scales generation to show the failing families.

use tapdispatch::harness::{check, read_schedule, schedule_csv};
use tapdispatch::{load_case, solve_ed1, SolveOptions};

fn main() {
    let case = load_case(include_str!("../cases/six_bus.toml")).unwrap();
    let (_, sol) = solve_ed1(&case, &SolveOptions::default()).unwrap();
    let csv = String::from_utf8(schedule_csv(&case, &sol)).unwrap();

    let clean = read_schedule(&case, &csv).unwrap();
    print!("as solved:\n{}", check(&case, &clean).render());

    let mut edited = clean.clone();
    let br = case.branch_index("2").unwrap();
    edited.tap[br][5] = 0.995;
    print!("\ntap edited:\n{}", check(&case, &edited).render());

    let mut scaled = clean;
    for row in &mut scaled.p {
        for p in row.iter_mut() {
            *p *= 1.01;
        }
    }
    print!("\ngeneration x1.01:\n{}", check(&case, &scaled).render());
}
