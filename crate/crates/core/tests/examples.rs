use std::path::Path;

// examples are compiled by `cargo test`; this keeps one per capability
#[test]
fn one_example_per_capability() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples");
    for name in [
        "weights_and_ordering",
        "operator_identities",
        "multicorrelation",
        "decay_sweep",
        "bound_formulas",
        "sl_n_reduction",
    ] {
        let path = dir.join(format!("{name}.rs"));
        let text = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
        assert!(text.contains("fn main()"), "{name}");
    }
}
