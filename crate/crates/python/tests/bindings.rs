use pygrushko::{gersten, is_primitive, stallings, GraphOfGroups};

fn example(name: &str) -> GraphOfGroups {
    let path = format!("{}/../core/examples/{name}", env!("CARGO_MANIFEST_DIR"));
    GraphOfGroups::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn decomposition_through_the_wrappers() {
    let g = example("double_f2.json");
    assert!(g.validate().is_empty());
    assert_eq!(g.is_free(1_000_000, 8).unwrap(), Some(3));
    let d = example("z2.json").decompose(1_000_000, 8).unwrap();
    assert_eq!((d.free_rank(), d.factors().len(), d.flagged_factor()), (0, 1, None));
    assert_eq!(d.factors()[0].abelianization(), (2, vec![]));
    let r = example("relative_double.json").relative_decompose("v0", "e0", 1_000_000, 8).unwrap();
    assert_eq!((r.free_rank(), r.flagged_factor()), (1, Some(0)));
    assert!(r.factors()[0].vertices().iter().any(|(v, _)| v == "v0"));
}

#[test]
fn utilities_through_the_wrappers() {
    let ab = vec!["a".to_string(), "b".to_string()];
    assert!(is_primitive("a b", ab.clone(), 8).unwrap());
    assert!(!is_primitive("a^2 b^2", ab.clone(), 8).unwrap());
    assert_eq!(gersten(ab.clone(), vec![vec!["a b a^-1 b^-1".into()]], 8).unwrap(), (4, 2, None));
    assert_eq!(stallings(ab, vec![vec!["a".into()]]).unwrap(), vec!["vertices 1 basepoint 0\n0 0 a\n".to_string()]);
}

#[test]
fn bad_input_is_rejected() {
    assert!(GraphOfGroups::from_json("{").is_err());
    assert!(is_primitive("q", vec!["a".into()], 8).is_err());
}
