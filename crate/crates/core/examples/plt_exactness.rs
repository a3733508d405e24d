//! Maximizes and minimizes the encoded quotient `(θf − θt − δ)/(τx)` over
//! its box and tap set, and compares with direct evaluation at the box
//! corners for every tap.

use tapdispatch::plt::{encode_branch_flow, recover_values, AlphaInput, EncodingVariant};
use tapdispatch_milp::{solve_milp, BnbConfig, MilpModel};

fn main() {
    let taps = [0.97, 0.99, 1.0, 1.03];
    let x = 0.2;
    let boxes = [(-0.2, 0.3), (-0.1, 0.25), (-0.15, 0.15)];

    for variant in [EncodingVariant::DisjunctiveExact, EncodingVariant::SegmentAdjacency] {
        for sense in [1.0, -1.0] {
            let mut m = MilpModel::new("plt");
            let tf = m.add_continuous("tf", boxes[0].0, boxes[0].1).unwrap();
            let tt = m.add_continuous("tt", boxes[1].0, boxes[1].1).unwrap();
            let d = m.add_continuous("d", boxes[2].0, boxes[2].1).unwrap();
            let enc = encode_branch_flow(
                &mut m,
                "br",
                1,
                [
                    AlphaInput::var(tf, boxes[0].0, boxes[0].1),
                    AlphaInput::var(tt, boxes[1].0, boxes[1].1),
                    AlphaInput::var(d, boxes[2].0, boxes[2].1),
                ],
                &taps,
                x,
                variant,
            )
            .unwrap();
            m.set_objective(&enc.flow_expression.scaled(-sense)).unwrap();
            let sol = solve_milp(&m, &BnbConfig { relative_gap: 0.0, ..Default::default() });
            let a = sol.assignment.unwrap();
            let r = recover_values(&enc, &a).unwrap();

            // The extreme is at a box corner: largest |φ| with the smallest tap.
            let mut best = f64::NEG_INFINITY;
            for &w in &taps {
                for f in [boxes[0].0, boxes[0].1] {
                    for t in [boxes[1].0, boxes[1].1] {
                        for s in [boxes[2].0, boxes[2].1] {
                            best = best.max(sense * (f - t - s) / (w * x));
                        }
                    }
                }
            }
            println!(
                "{:<11} {}: encoded {:+.12} enumerated {:+.12} at tap {:.2}",
                variant.label(),
                if sense > 0.0 { "max" } else { "min" },
                r.flow,
                sense * best,
                r.tau
            );
        }
    }
}
