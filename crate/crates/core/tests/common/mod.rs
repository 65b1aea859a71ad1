#![allow(dead_code)]

use grushko::automorphism::whitehead_autos;
use grushko::{Basis, ConjClassSequence, ConjugationData, Endomorphism, ExtendedPermutation, GraphOfGroups, Letter, Word};
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::json;

pub fn basis(n: usize) -> Basis {
    Basis::from_names(&["a", "b", "c", "d"][..n]).unwrap()
}

pub fn random_word(rng: &mut impl Rng, b: &Basis, max_len: usize) -> Word {
    loop {
        let len = rng.gen_range(1..=max_len);
        let w = Word::reduce((0..len).map(|_| b.letter(rng.gen_range(0..b.len()), rng.gen_bool(0.5))));
        if !w.is_identity() {
            return w;
        }
    }
}

pub fn random_auto(rng: &mut impl Rng, b: &Basis, steps: usize) -> Endomorphism {
    let all: Vec<_> = whitehead_autos(b).collect();
    let mut alpha = Endomorphism::identity(b);
    for _ in 0..steps {
        let Some(w) = all.choose(rng) else { break };
        alpha = w.as_endomorphism().compose(&alpha).unwrap();
    }
    let mut order: Vec<usize> = (0..b.len()).collect();
    order.shuffle(rng);
    let images: Vec<Letter> = order.iter().map(|&i| b.letter(i, rng.gen_bool(0.5))).collect();
    let perm = ExtendedPermutation::new(b, b, images).unwrap().as_endomorphism();
    perm.compose(&alpha).unwrap()
}

pub fn random_sequence(rng: &mut impl Rng, b: &Basis) -> ConjClassSequence {
    let n = rng.gen_range(1..=3);
    let gens: Vec<Vec<Word>> =
        (0..n).map(|_| (0..rng.gen_range(1..=2)).map(|_| random_word(rng, b, 5)).collect()).collect();
    let tags = (0..n).map(|i| format!("c{i}")).collect();
    ConjClassSequence::from_generators(&gens, b, tags).unwrap()
}

/// A connected random graph of groups with injective bonding maps.
pub fn random_graph(rng: &mut impl Rng) -> GraphOfGroups {
    loop {
        let n = rng.gen_range(1..=3);
        let names = ["a", "b", "c"];
        let bases: Vec<Vec<String>> =
            (0..n).map(|i| (0..rng.gen_range(1..=3)).map(|j| format!("{}{i}", names[j])).collect()).collect();
        let mut edges = Vec::new();
        let mut pairs: Vec<(usize, usize)> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
        for _ in 0..rng.gen_range(0..=1) {
            pairs.push((rng.gen_range(0..n), rng.gen_range(0..n)));
        }
        if n == 1 && pairs.is_empty() {
            pairs.push((0, 0));
        }
        for (k, (o, t)) in pairs.into_iter().enumerate() {
            let ob = Basis::from_names(&bases[o]).unwrap();
            let tb = Basis::from_names(&bases[t]).unwrap();
            let rank = rng.gen_range(1..=2usize.min(ob.len()).min(tb.len()));
            let eb: Vec<String> = (0..rank).map(|j| format!("z{j}")).collect();
            let fwd: serde_json::Map<_, _> =
                eb.iter().map(|z| (z.clone(), json!(random_word(rng, &ob, 3).to_string()))).collect();
            let bwd: serde_json::Map<_, _> =
                eb.iter().map(|z| (z.clone(), json!(random_word(rng, &tb, 3).to_string()))).collect();
            edges.push(json!({
                "id": format!("e{k}"), "reverse_id": format!("e{k}_inv"),
                "origin": format!("v{o}"), "terminus": format!("v{t}"), "basis": eb,
                "bonding_forward": fwd, "bonding_backward": bwd,
            }));
        }
        let vertices: serde_json::Map<_, _> =
            bases.iter().enumerate().map(|(i, b)| (format!("v{i}"), json!({ "basis": b }))).collect();
        let g = GraphOfGroups::from_value(json!({ "vertices": vertices, "edges": edges })).unwrap();
        if g.validate().is_empty() {
            return g;
        }
    }
}

pub fn zoo(name: &str) -> GraphOfGroups {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name);
    GraphOfGroups::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub fn barbell() -> GraphOfGroups {
    GraphOfGroups::from_value(json!({
        "vertices": {"v": {"basis": ["a", "b"]}, "u": {"basis": ["c", "d"]}},
        "edges": [{"id": "e", "reverse_id": "e_inv", "origin": "v", "terminus": "u", "basis": ["x", "y"],
                   "bonding_forward": {"x": "a^2", "y": "b a^3 b^-1"}, "bonding_backward": {"x": "c", "y": "d^2"}}]
    }))
    .unwrap()
}

/// Random vertex and edge automorphisms and conjugators.
pub fn random_conjugation(rng: &mut impl Rng, g: &GraphOfGroups) -> ConjugationData {
    let mut c = ConjugationData::default();
    for (v, b) in g.vertices() {
        if !b.is_empty() {
            c.vertex_autos.insert(v.clone(), random_auto(rng, b, 2));
        }
    }
    for e in g.edges() {
        if !e.basis.is_empty() {
            c.edge_autos.insert(e.id.clone(), random_auto(rng, &e.basis, 2));
        }
        for id in [&e.id, &e.reverse_id] {
            let o = g.find_edge(id).unwrap();
            let b = g.vertex_basis(g.origin(o)).unwrap();
            if !b.is_empty() && rng.gen_bool(0.5) {
                c.conjugators.insert(id.clone(), random_word(rng, b, 2));
            }
        }
    }
    c
}
