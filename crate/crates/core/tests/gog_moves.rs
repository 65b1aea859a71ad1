use std::collections::BTreeSet;

use grushko::gog::{blow_up, cleave, unkill, unpull, EdgePair};
use grushko::stallings::LabeledGraph;
use grushko::{
    abelianization, apply_conjugation, detect_visible, gersten_representative, make_good_bases, presentation, reduce,
    vertex_link, Basis, ConjugationData, Endomorphism, GerstenConfig, GogError, GraphOfGroups, MoveKind, Violation,
    Word,
};
use serde_json::json;

fn w(s: &str) -> Word {
    Word::parse(s).unwrap()
}

fn words(ss: &[&str]) -> Vec<Word> {
    ss.iter().map(|s| w(s)).collect()
}

/// Vertices as `(id, basis)`, edges as `(id, origin, terminus, basis,
/// forward words, backward words)`; reverse ids get an `_inv` suffix.
type EdgeSpec<'a> = (&'a str, &'a str, &'a str, &'a [&'a str], &'a [&'a str], &'a [&'a str]);

fn build(vertices: &[(&str, &[&str])], edges: &[EdgeSpec]) -> GraphOfGroups {
    let vs: serde_json::Map<String, serde_json::Value> =
        vertices.iter().map(|(v, b)| (v.to_string(), json!({ "basis": b }))).collect();
    let es: Vec<serde_json::Value> = edges
        .iter()
        .map(|(id, o, t, basis, fw, bw)| {
            let fwd: serde_json::Map<String, serde_json::Value> =
                basis.iter().zip(fw.iter()).map(|(b, x)| (b.to_string(), json!(x))).collect();
            let bwd: serde_json::Map<String, serde_json::Value> =
                basis.iter().zip(bw.iter()).map(|(b, x)| (b.to_string(), json!(x))).collect();
            json!({
                "id": id, "reverse_id": format!("{id}_inv"), "origin": o, "terminus": t, "basis": basis,
                "bonding_forward": fwd, "bonding_backward": bwd,
            })
        })
        .collect();
    GraphOfGroups::from_value(json!({ "vertices": vs, "edges": es })).unwrap()
}

fn worked_cleave() -> GraphOfGroups {
    build(
        &[("v", &["b1", "b2"]), ("u", &["c1", "c2"])],
        &[
            ("e", "v", "u", &["a1", "a2"], &["b1^2 b2^2", "b1^2 b2^2 b1^2"], &["c1^2", "c2^2"]),
            ("f", "v", "v", &["z"], &["b1"], &["b2"]),
        ],
    )
}

fn hnn() -> GraphOfGroups {
    build(&[("v", &["a", "b"])], &[("e", "v", "v", &["z"], &["a"], &["b"])])
}

fn same_pi1(a: &GraphOfGroups, b: &GraphOfGroups) {
    assert!(b.validate().is_empty(), "{:?}", b.validate());
    assert_eq!(abelianization(&presentation(a)), abelianization(&presentation(b)));
}

fn words_at(g: &GraphOfGroups, e: &str) -> Vec<Word> {
    g.words(g.find_edge(e).unwrap()).to_vec()
}

fn basis_of(g: &GraphOfGroups, v: &str) -> Vec<String> {
    g.vertex_basis(v).unwrap().symbols().iter().map(|s| s.to_string()).collect()
}

#[test]
fn validation() {
    assert!(worked_cleave().validate().is_empty());
    let g = build(&[("v", &["a"]), ("u", &["c", "d"])], &[("e", "v", "u", &["x", "y"], &["a", "a"], &["c", "d"])]);
    assert_eq!(g.validate(), vec![Violation::NotMonomorphism { edge: "e".into() }]);

    let fixed = json!({
        "vertices": {"v": {"basis": ["a"]}},
        "edges": [{"id": "e", "reverse_id": "e", "origin": "v", "terminus": "v", "basis": ["z"],
                   "bonding_forward": {"z": "a"}, "bonding_backward": {"z": "a"}}]
    });
    let g = GraphOfGroups::from_value(fixed).unwrap();
    assert!(g.validate().contains(&Violation::BadInvolution { edge: "e".into() }));

    let apart = build(&[("v", &["a"]), ("u", &["b"])], &[]);
    assert_eq!(apart.validate(), vec![Violation::Disconnected]);
    assert_eq!(build(&[], &[]).validate(), vec![Violation::EmptyGraph]);

    let stray = build(&[("v", &["a"])], &[("e", "v", "v", &["z"], &["q"], &["a"])]);
    assert!(matches!(stray.validate()[0], Violation::SymbolOutsideBasis { .. }));
}

#[test]
fn malformed_documents_are_rejected() {
    let missing = r#"{"vertices": {"v": {"basis": ["a"]}}, "edges": [{"id": "e", "reverse_id": "f",
        "origin": "v", "terminus": "v", "basis": ["z"], "bonding_forward": {}, "bonding_backward": {"z": "a"}}]}"#;
    assert!(matches!(GraphOfGroups::from_json(missing), Err(GogError::Format(_))));
    let extra = r#"{"vertices": {"v": {"basis": ["a"], "colour": 1}}, "edges": []}"#;
    assert!(GraphOfGroups::from_json(extra).is_err());
    assert!(GraphOfGroups::from_json("{").is_err());
}

#[test]
fn json_round_trip() {
    let g = worked_cleave();
    assert_eq!(GraphOfGroups::from_json(&g.to_json()).unwrap(), g);
}

#[test]
fn links() {
    let link = vertex_link(&worked_cleave(), "v").unwrap();
    let seq = &link.sequence;
    assert_eq!(seq.tags(), ["e", "f", "f_inv"]);
    // b1^2 b2^2 and b1^2 b2^2 b1^2 generate <b1^2, b2^2>: two bigons sharing a vertex.
    let b = Basis::from_names(&["b1", "b2"]).unwrap();
    let expect = LabeledGraph::wedge_of_loops(&words(&["b1^2", "b2^2"]), &b).unwrap().tighten().core();
    assert!(seq.components()[0].same_shape(&expect, false));
    assert_eq!(seq.components()[1].edge_count(), 1);
    assert_eq!(seq.components()[2].edge_count(), 1);
    assert_eq!(seq.counts(), vec![3, 3]);

    let lonely = build(&[("v", &["a"])], &[]);
    assert!(vertex_link(&lonely, "v").unwrap().sequence.is_empty());

    let link = vertex_link(&hnn(), "v").unwrap();
    let labels: Vec<Vec<usize>> = link.sequence.components().iter().map(|c| c.edges().iter().map(|e| e.symbol).collect()).collect();
    assert_eq!(labels, vec![vec![0], vec![1]]);
}

#[test]
fn reduction() {
    let pendant = build(&[("u", &["a", "b"]), ("w", &["c"])], &[("e", "u", "w", &["z"], &["a"], &["c"])]);
    let (r, log) = reduce(&pendant, &BTreeSet::new()).unwrap();
    assert_eq!(r.vertices().keys().collect::<Vec<_>>(), ["u"]);
    assert!(r.edges().is_empty());
    assert_eq!(log[0].kind, MoveKind::Prune);
    same_pi1(&pendant, &r);

    let z2 = build(&[("v", &["a"])], &[("e", "v", "v", &["z"], &["a"], &["a"])]);
    assert_eq!(reduce(&z2, &BTreeSet::new()).unwrap(), (z2.clone(), vec![]));

    let chain = build(
        &[("u", &["a", "b"]), ("v", &["c"]), ("w", &["d", "x"])],
        &[("e1", "u", "v", &["z"], &["a"], &["c"]), ("e2", "v", "w", &["y"], &["c^2"], &["d"])],
    );
    let (r, log) = reduce(&chain, &BTreeSet::new()).unwrap();
    assert_eq!(log.len(), 1);
    assert_eq!(log[0].kind, MoveKind::Splice);
    assert_eq!(r.edges().len(), 1);
    let e = &r.edges()[0];
    assert_eq!((e.origin.as_str(), e.terminus.as_str()), ("u", "w"));
    assert_eq!((e.forward.clone(), e.backward.clone()), (words(&["a^2"]), words(&["d"])));
    same_pi1(&chain, &r);

    let protected: BTreeSet<String> = ["e".to_string()].into();
    assert_eq!(reduce(&pendant, &protected).unwrap().0, pendant);
}

#[test]
fn conjugate_bonding_data() {
    let g = worked_cleave();
    assert_eq!(apply_conjugation(&g, &ConjugationData::default()).unwrap(), g);

    let ab = Basis::from_names(&["a1", "a2"]).unwrap();
    let psi = Endomorphism::new(ab.clone(), ab, words(&["a1^-1 a2", "a2^-1 a1 a1"])).unwrap();
    let mut c = ConjugationData::default();
    c.edge_autos.insert("e".into(), psi);
    let h = apply_conjugation(&g, &c).unwrap();
    assert_eq!(words_at(&h, "e"), words(&["b1^2", "b2^2"]));
    same_pi1(&g, &h);

    let mut c = ConjugationData::default();
    c.conjugators.insert("e".into(), w("b1"));
    let h = apply_conjugation(&g, &c).unwrap();
    assert_eq!(words_at(&h, "e"), words(&["b1 b1^2 b2^2 b1^-1", "b1 b1^2 b2^2 b1^2 b1^-1"]));
    let (before, after) = (vertex_link(&g, "v").unwrap(), vertex_link(&h, "v").unwrap());
    for (x, y) in before.sequence.components().iter().zip(after.sequence.components()) {
        assert!(x.same_shape(y, false));
    }

    let mut bad = ConjugationData::default();
    let vb = Basis::from_names(&["b1", "b2"]).unwrap();
    bad.vertex_autos.insert("v".into(), Endomorphism::new(vb.clone(), vb, words(&["b1^2", "b2"])).unwrap());
    assert!(matches!(apply_conjugation(&g, &bad), Err(GogError::NotAnAutomorphism(_))));
}

#[test]
fn good_bases_for_the_worked_cleave() {
    let g = worked_cleave();
    let link = vertex_link(&g, "v").unwrap();
    let config = GerstenConfig::default();
    let rep = gersten_representative(&link.sequence, &config).unwrap();
    assert!(rep.automorphism.is_identity());
    let vs = detect_visible(&rep.sequence, &BTreeSet::new(), &config).unwrap().unwrap();
    assert_eq!(vs.kind(), "cleave");
    let good = make_good_bases(&g, "v", &vs, &rep.automorphism).unwrap();
    assert_eq!(good.stages.len(), 1);
    let psi = &good.stages[0].edge_autos["e"];
    assert_eq!(psi.images(), words(&["a1^-1 a2", "a2^-1 a1 a1"]).as_slice());
    assert_eq!(words_at(&good.graph, "e"), words(&["b1^2", "b2^2"]));
    assert_eq!((good.next.kind, good.next.edge.as_deref()), (MoveKind::Cleave, Some("e")));
    same_pi1(&g, &good.graph);

    let (h, _) = cleave(&good.graph, "v", "e").unwrap();
    assert_eq!(basis_of(&h, "v'"), ["b1"]);
    assert_eq!(basis_of(&h, "v''"), ["b2"]);
    assert_eq!(words_at(&h, "e'"), words(&["b1^2"]));
    assert_eq!(words_at(&h, "e''"), words(&["b2^2"]));
    assert_eq!(h.edge_basis(h.find_edge("e'").unwrap()).symbols()[0].as_str(), "a1");
    let f = h.find_edge("f").unwrap();
    assert_eq!((h.origin(f), h.terminus(f)), ("v'", "v''"));
    same_pi1(&g, &h);
    assert!(h.measure() < good.graph.measure());
}

#[test]
fn good_bases_for_an_unused_letter_change_nothing() {
    let g = build(&[("v1", &["a", "b"]), ("v2", &["c", "d"])], &[("e", "v1", "v2", &["z"], &["a"], &["c"])]);
    let link = vertex_link(&g, "v1").unwrap();
    let config = GerstenConfig::default();
    let rep = gersten_representative(&link.sequence, &config).unwrap();
    let vs = detect_visible(&rep.sequence, &BTreeSet::new(), &config).unwrap().unwrap();
    assert_eq!(vs.kind(), "blow-up");
    let good = make_good_bases(&g, "v1", &vs, &rep.automorphism).unwrap();
    assert!(good.stages.is_empty());
    assert_eq!(good.graph, g);
}

fn barbell() -> GraphOfGroups {
    build(&[("v", &["a", "b"]), ("u", &["c", "d"])], &[("e", "v", "u", &["x", "y"], &["a", "b a b^-1"], &["c", "d"])])
}

#[test]
fn good_bases_for_unkill() {
    let g = barbell();
    let link = vertex_link(&g, "v").unwrap();
    let config = GerstenConfig::default();
    let rep = gersten_representative(&link.sequence, &config).unwrap();
    let vs = detect_visible(&rep.sequence, &BTreeSet::new(), &config).unwrap().unwrap();
    assert_eq!(vs.kind(), "unkill");
    let good = make_good_bases(&g, "v", &vs, &rep.automorphism).unwrap();
    let ws = words_at(&good.graph, "e");
    let t = good.graph.vertex_basis("v").unwrap().symbols().iter().find(|s| s.as_str() == "b").unwrap().clone();
    let (near, far): (Vec<&Word>, Vec<&Word>) = ws.iter().partition(|x| x.occurrences(&t) == 0);
    assert_eq!((near.len(), far.len()), (1, 1));
    let (h, detail) = unkill(&good.graph, "v", "e").unwrap();
    assert_eq!(detail, "t = b");
    assert_eq!(basis_of(&h, "v"), ["a"]);
    same_pi1(&g, &h);
}

#[test]
fn blow_ups() {
    let g = build(&[("v", &["a", "b"]), ("u", &["c"])], &[("e", "v", "u", &["z"], &["a"], &["c^2"])]);
    let (h, detail) = blow_up(&g, "v").unwrap();
    assert_eq!(detail, "letter b");
    assert_eq!(basis_of(&h, "v"), ["a"]);
    let new = h.find_edge("v:b").unwrap();
    assert!(h.is_trivial(new));
    assert_eq!((h.origin(new), h.terminus(new)), ("v", "v"));
    same_pi1(&g, &h);

    let star = build(
        &[("v", &["b1", "b2"]), ("u", &["c", "x"]), ("w", &["d", "y"])],
        &[("e", "v", "u", &["z"], &["b1"], &["c"]), ("f", "v", "w", &["z"], &["b2"], &["d"])],
    );
    let (h, _) = blow_up(&star, "v").unwrap();
    assert_eq!(basis_of(&h, "v'"), ["b1"]);
    assert_eq!(basis_of(&h, "v''"), ["b2"]);
    let split = h.find_edge("v:split").unwrap();
    assert!(h.is_trivial(split));
    assert_eq!((h.origin(split), h.terminus(split)), ("v'", "v''"));
    assert_eq!(h.origin(h.find_edge("e").unwrap()), "v'");
    assert_eq!(h.origin(h.find_edge("f").unwrap()), "v''");
    same_pi1(&star, &h);
    let (m0, m1) = (star.measure(), h.measure());
    assert_eq!((m0.edge_ranks.clone(), m0.vertex_rank_sum), (m1.edge_ranks.clone(), m1.vertex_rank_sum));
    assert_eq!(m1.splittable + 1, m0.splittable);

    let tied = build(&[("v", &["a", "b"])], &[("e", "v", "v", &["z"], &["a b"], &["a b"])]);
    assert!(matches!(blow_up(&tied, "v"), Err(GogError::BasesNotGood { .. })));
}

#[test]
fn unpulls() {
    let g = hnn();
    let (h, _) = unpull(&g, "v", "e_inv").unwrap();
    assert_eq!(basis_of(&h, "v"), ["a"]);
    assert!(h.is_trivial(h.find_edge("e").unwrap()));
    same_pi1(&g, &h);
    assert!(h.measure() < g.measure());

    let g = build(
        &[("v", &["b1", "b2"]), ("u", &["c1", "c2"])],
        &[("e", "v", "u", &["a1", "a2"], &["b1^2", "b2"], &["c1", "c2"])],
    );
    let (h, detail) = unpull(&g, "v", "e").unwrap();
    assert_eq!(detail, "a2 -> b2");
    assert_eq!(h.edge_basis(h.find_edge("e").unwrap()).len(), 1);
    assert_eq!(basis_of(&h, "v"), ["b1"]);
    same_pi1(&g, &h);
    assert_eq!(h.measure().edge_ranks, vec![1]);
    assert!(h.measure() < g.measure());

    let g = build(&[("v", &["b1"]), ("u", &["c", "d"])], &[("e", "v", "u", &["z"], &["b1^-1"], &["c"])]);
    let (h, _) = unpull(&g, "v", "e").unwrap();
    assert!(basis_of(&h, "v").is_empty());
    assert!(h.is_trivial(h.find_edge("e").unwrap()));
    same_pi1(&g, &h);

    assert!(matches!(unpull(&barbell(), "v", "e"), Err(GogError::BasesNotGood { .. })));
    assert!(matches!(unpull(&hnn(), "v", "nope"), Err(GogError::UnknownEdge(_))));
}

#[test]
fn unkills() {
    let (h, _) = unkill(&barbell(), "v", "e").unwrap();
    assert_eq!(words_at(&h, "e'"), words(&["a"]));
    assert_eq!(words_at(&h, "e''"), words(&["a"]));
    same_pi1(&barbell(), &h);

    let g = build(&[("v", &["a", "b"]), ("u", &["c", "d"])], &[("e", "v", "u", &["x", "y"], &["a^2", "b a^3 b^-1"], &["c", "d"])]);
    let (h, _) = unkill(&g, "v", "e").unwrap();
    assert_eq!(words_at(&h, "e'"), words(&["a^2"]));
    assert_eq!(words_at(&h, "e''"), words(&["a^3"]));
    assert_eq!(h.find_edge("e_inv''").map(|o| h.origin(o).to_string()).unwrap(), "u");
    same_pi1(&g, &h);
    assert!(h.measure() < g.measure());

    let g = build(&[("v", &["a", "b"]), ("u", &["c"])], &[("e", "v", "u", &["x"], &["a^2"], &["c"])]);
    assert!(matches!(unkill(&g, "v", "e"), Err(GogError::BasesNotGood { kind: MoveKind::Unkill, .. })));
}

#[test]
fn cleaves() {
    let g = build(&[("v", &["a", "b"]), ("u", &["c", "d"])], &[("e", "v", "u", &["x", "y"], &["a", "b"], &["c", "d"])]);
    let (h, _) = cleave(&g, "v", "e").unwrap();
    assert_eq!(h.measure().edge_ranks, vec![1, 1]);
    assert_eq!(words_at(&h, "e'"), words(&["a"]));
    assert_eq!(words_at(&h, "e''"), words(&["b"]));
    same_pi1(&g, &h);

    let g = build(&[("v", &["a", "b"]), ("u", &["c"])], &[("e", "v", "u", &["x"], &["a b"], &["c"])]);
    assert!(matches!(cleave(&g, "v", "e"), Err(GogError::BasesNotGood { kind: MoveKind::Cleave, .. })));
}

#[test]
fn measures() {
    let g = worked_cleave();
    assert_eq!(g.measure().to_string(), "({2,1}, 4, 2)");
    let (pruned, _) = reduce(
        &build(&[("u", &["a", "b"]), ("w", &["c"])], &[("e", "u", "w", &["z"], &["a"], &["c"])]),
        &BTreeSet::new(),
    )
    .unwrap();
    assert!(pruned.measure().edge_ranks.is_empty());
}

#[test]
fn edge_pair_fields_are_public() {
    let g = hnn();
    let EdgePair { id, reverse_id, .. } = &g.edges()[0];
    assert_eq!((id.as_str(), reverse_id.as_str()), ("e", "e_inv"));
}
