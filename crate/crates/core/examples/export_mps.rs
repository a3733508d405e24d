//! Writes the six-bus ED1 model as free-format MPS, reads it back and
//! checks that nothing was lost. Pass a path to keep the file.

use tapdispatch::{build_ed1, load_case, EncodingVariant};
use tapdispatch_milp::{export_mps, import_mps};

fn main() {
    let case = load_case(include_str!("../cases/six_bus.toml")).unwrap();
    let dm = build_ed1(&case, EncodingVariant::SegmentAdjacency).unwrap();
    let text = export_mps(&dm.milp).unwrap();
    let back = import_mps(&text).unwrap();
    assert!(back.same_structure(&dm.milp));
    assert_eq!(export_mps(&back).unwrap(), text);
    println!(
        "{} columns ({} binary), {} rows, {} bytes; round trip exact",
        dm.milp.num_vars(),
        dm.milp.num_binaries(),
        dm.milp.num_constraints(),
        text.len()
    );
    for line in text.lines().take(8) {
        println!("  {line}");
    }
    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, &text).unwrap();
        println!("written to {path}");
    }
}
