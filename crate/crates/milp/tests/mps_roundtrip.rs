use proptest::prelude::*;
use tapdispatch_milp::{export_mps, import_mps, LinExpr, MilpModel, Sense};

fn value() -> impl Strategy<Value = f64> {
    prop_oneof![
        (-1000i32..1000).prop_map(|v| v as f64),
        -1e6f64..1e6,
        (-1e-9f64..1e-9).prop_filter("nonzero", |v| *v != 0.0),
        Just(1.0 / 3.0),
        Just(1e20),
    ]
}

#[derive(Debug, Clone)]
struct Spec {
    vars: Vec<(bool, f64, f64)>,
    rows: Vec<(Vec<(usize, f64)>, u8, f64, f64)>,
    obj: Vec<(usize, f64)>,
    offset: f64,
}

fn spec() -> impl Strategy<Value = Spec> {
    (1usize..8).prop_flat_map(|n| {
        let var = (any::<bool>(), value(), 0.0f64..100.0, 0u8..4).prop_map(|(b, lo, w, kind)| {
            if b {
                (true, 0.0, if kind == 0 { 0.0 } else { 1.0 })
            } else {
                match kind {
                    0 => (false, f64::NEG_INFINITY, f64::INFINITY),
                    1 => (false, f64::NEG_INFINITY, lo),
                    2 => (false, lo, f64::INFINITY),
                    _ => (false, lo, lo + w),
                }
            }
        });
        let row = (
            prop::collection::vec((0..n, value()), 0..5),
            0u8..4,
            value(),
            0.0f64..50.0,
        );
        (
            prop::collection::vec(var, n),
            prop::collection::vec(row, 0..6),
            prop::collection::vec((0..n, value()), 0..5),
            value(),
        )
            .prop_map(|(vars, rows, obj, offset)| Spec { vars, rows, obj, offset })
    })
}

fn build(s: &Spec) -> MilpModel {
    let mut m = MilpModel::new("prop");
    m.metadata.insert("horizon".into(), "24".into());
    let ids: Vec<_> = s
        .vars
        .iter()
        .enumerate()
        .map(|(j, &(bin, lo, hi))| {
            if bin {
                let v = m.add_binary(format!("b{j}")).unwrap();
                m.set_bounds(v, lo, hi).unwrap();
                v
            } else {
                m.add_continuous(format!("x{j}"), lo, hi).unwrap()
            }
        })
        .collect();
    for (i, (terms, kind, rhs, width)) in s.rows.iter().enumerate() {
        let mut e = LinExpr::new();
        for &(j, a) in terms {
            e.add_term(ids[j], a);
        }
        let name = format!("c{i}");
        match kind {
            0 => m.add_constraint(name, &e, Sense::Le, *rhs),
            1 => m.add_constraint(name, &e, Sense::Ge, *rhs),
            2 => m.add_constraint(name, &e, Sense::Eq, *rhs),
            _ => m.add_range(name, &e, *rhs, rhs + width),
        }
        .unwrap();
    }
    let mut obj = LinExpr::constant(s.offset);
    for &(j, a) in &s.obj {
        obj.add_term(ids[j], a);
    }
    m.set_objective(&obj).unwrap();
    m
}

proptest! {
    #[test]
    fn export_import_round_trip(s in spec()) {
        let m = build(&s);
        let text = export_mps(&m).unwrap();
        let back = import_mps(&text).unwrap();
        prop_assert!(back == m, "round trip changed the model:\n{text}");
        prop_assert_eq!(export_mps(&back).unwrap(), text);
    }
}
