//! A small facility-location MILP: the LP relaxation with its duals, then
//! branch-and-bound, then the same model as MPS text.

use tapdispatch_milp::{export_mps, solve_lp, solve_milp, BnbConfig, LinExpr, MilpModel, Sense};

fn main() {
    let open_cost = [30.0, 25.0, 40.0];
    let capacity = [50.0, 40.0, 70.0];
    let demand = [20.0, 35.0, 25.0];
    let ship = [[2.0, 4.0, 5.0], [3.0, 1.0, 3.0], [4.0, 3.0, 1.0]];

    let mut m = MilpModel::new("facility");
    let mut obj = LinExpr::new();
    let open: Vec<_> = (0..3)
        .map(|i| {
            let y = m.add_binary(format!("open{i}")).unwrap();
            obj.add_term(y, open_cost[i]);
            y
        })
        .collect();
    let mut flow = vec![vec![]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let x = m.add_continuous(format!("x{i}{j}"), 0.0, f64::INFINITY).unwrap();
            obj.add_term(x, ship[i][j]);
            flow[i].push(x);
        }
    }
    for j in 0..3 {
        let mut e = LinExpr::new();
        for row in &flow {
            e.add_term(row[j], 1.0);
        }
        m.add_constraint(format!("dem{j}"), &e, Sense::Ge, demand[j]).unwrap();
    }
    for i in 0..3 {
        let mut e = LinExpr::new();
        for &x in &flow[i] {
            e.add_term(x, 1.0);
        }
        e.add_term(open[i], -capacity[i]);
        m.add_constraint(format!("cap{i}"), &e, Sense::Le, 0.0).unwrap();
    }
    m.set_objective(&obj).unwrap();

    let lp = solve_lp(&m);
    println!("relaxation: {:?} {:.3} ({} iterations)", lp.status, lp.objective, lp.iterations);
    for (c, d) in m.constraints().iter().zip(&lp.duals) {
        println!("  dual {:<5} {d:+.3}", c.name);
    }

    let mip = solve_milp(&m, &BnbConfig::default());
    let x = mip.assignment.as_ref().unwrap();
    println!("\nmilp: {:?} {:.3} after {} nodes", mip.status, mip.objective, mip.nodes);
    for (i, &y) in open.iter().enumerate() {
        println!("  site {i} open={}", x[y.0] > 0.5);
    }

    println!("\n{}", export_mps(&m).unwrap());
}
