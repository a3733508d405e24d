//! Builds a three-bus case from TOML text, shows validation diagnostics for
//! a broken variant and solves the valid one.

use tapdispatch::{load_case, solve_ed1, CaseError, SolveOptions};

const CASE: &str = r#"
name = "three-bus"
base_mva = 100.0
horizon = 2

[[buses]]
id = "a"
is_reference = true

[[buses]]
id = "b"

[[buses]]
id = "c"

[[branches]]
id = "ab"
from_bus = "a"
to_bus = "b"
x = 0.1
rating = 60.0

[branches.device]
tap_set = [0.95, 1.0, 1.05]
tap_step_max = 0.05
tap_adjust_budget = 2
shifter_range = [-10.0, 10.0]
shift_step_max = 10.0
shift_adjust_budget = 2

[[branches]]
id = "ac"
from_bus = "a"
to_bus = "c"
x = 0.1
rating = 100.0

[[branches]]
id = "bc"
from_bus = "b"
to_bus = "c"
x = 0.1
rating = 100.0

[[generators]]
id = "cheap"
bus = "a"
p_min = 0.0
p_max = 200.0
cost_curve = [[0.0, 0.0], [200.0, 2000.0]]

[[generators]]
id = "dear"
bus = "c"
p_min = 0.0
p_max = 200.0
cost_curve = [[0.0, 0.0], [200.0, 6000.0]]

[demand]
b = [120.0, 150.0]
c = [30.0, 30.0]
"#;

fn main() {
    let broken = CASE.replace("tap_set = [0.95, 1.0, 1.05]", "tap_set = [0.95, 1.0, 1.0]");
    match load_case(&broken) {
        Err(CaseError::Invalid(diags)) => {
            for d in diags {
                println!("rejected: {d}");
            }
        }
        other => println!("unexpected: {other:?}"),
    }

    let case = load_case(CASE).unwrap();
    let (_, sol) = solve_ed1(&case, &SolveOptions::default()).unwrap();
    println!("\n{} cost {:.2} $", sol.status, sol.objective.unwrap());
    for h in 0..case.horizon {
        println!(
            "hour {}: cheap {:.1} MW, dear {:.1} MW, tap {:.2}, shift {:.2} deg, flow ab {:.1} MW",
            h + 1,
            sol.p[0][h],
            sol.p[1][h],
            sol.tap[0][h],
            sol.shift[0][h].to_degrees(),
            sol.flow[0][h]
        );
    }
}
