//! Finite graphs of finite-rank free groups: the data model and its JSON
//! form, validation, vertex links, conjugate bonding data, the good-basis
//! construction and the simplifying moves.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automorphism::{invert_automorphism, is_automorphism};
use crate::gersten::{ConjClassSequence, GerstenError, VisibleSimplification};
use crate::stallings::{is_isomorphism, is_monomorphism, stallings_representative, GraphError, GraphSequence, LabeledGraph};
use crate::word::{Basis, Endomorphism, Symbol, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GogError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Gersten(#[from] GerstenError),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("edge `{edge}` does not start at vertex `{vertex}`")]
    NotIncident { edge: String, vertex: String },
    #[error("bases at `{vertex}` are not good for {kind}: {reason}")]
    BasesNotGood { kind: MoveKind, vertex: String, reason: String },
    #[error("simplification does not match the current vertex link: {0}")]
    DetectionMismatch(String),
    #[error("change of basis at `{0}` is not an automorphism")]
    NotAnAutomorphism(String),
    #[error("{0}")]
    Format(String),
}

/// One edge pair `{e, e^-1}`. `forward` holds the words `w_{e,b}` at
/// `origin`, `backward` the words `w_{e^-1,b}` at `terminus`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgePair {
    pub id: String,
    pub reverse_id: String,
    pub origin: String,
    pub terminus: String,
    pub basis: Basis,
    pub forward: Vec<Word>,
    pub backward: Vec<Word>,
}

/// An oriented edge: a pair index and whether it is read backwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Oriented {
    pub pair: usize,
    pub reversed: bool,
}

impl Oriented {
    pub fn reverse(self) -> Oriented {
        Oriented { pair: self.pair, reversed: !self.reversed }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphOfGroups {
    vertices: BTreeMap<String, Basis>,
    edges: Vec<EdgePair>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexDoc {
    basis: Basis,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    id: String,
    reverse_id: String,
    origin: String,
    terminus: String,
    basis: Basis,
    bonding_forward: BTreeMap<Symbol, Word>,
    bonding_backward: BTreeMap<Symbol, Word>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    vertices: BTreeMap<String, VertexDoc>,
    edges: Vec<EdgeDoc>,
}

fn bonding_list(edge: &str, field: &str, basis: &Basis, map: BTreeMap<Symbol, Word>) -> Result<Vec<Word>, GogError> {
    if let Some(extra) = map.keys().find(|s| !basis.contains(s)) {
        return Err(GogError::Format(format!("edge `{edge}`: {field} has `{extra}` outside the edge basis")));
    }
    basis
        .symbols()
        .iter()
        .map(|s| {
            map.get(s)
                .cloned()
                .ok_or_else(|| GogError::Format(format!("edge `{edge}`: {field} lacks an image for `{s}`")))
        })
        .collect()
}

/// Problems found by [`GraphOfGroups::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Violation {
    EmptyGraph,
    BadInvolution { edge: String },
    DuplicateEdgeId { edge: String },
    UnknownEndpoint { edge: String, vertex: String },
    SymbolOutsideBasis { edge: String, vertex: String, symbol: String },
    NotMonomorphism { edge: String },
    Disconnected,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyGraph => write!(f, "graph has no vertices"),
            Violation::BadInvolution { edge } => write!(f, "edge `{edge}` is its own reverse"),
            Violation::DuplicateEdgeId { edge } => write!(f, "edge id `{edge}` is used twice"),
            Violation::UnknownEndpoint { edge, vertex } => write!(f, "edge `{edge}` ends at unknown vertex `{vertex}`"),
            Violation::SymbolOutsideBasis { edge, vertex, symbol } => {
                write!(f, "bonding of `{edge}` uses `{symbol}`, not in the basis of `{vertex}`")
            }
            Violation::NotMonomorphism { edge } => write!(f, "bonding map of `{edge}` is not injective"),
            Violation::Disconnected => write!(f, "underlying graph is disconnected"),
        }
    }
}

/// Edge-rank multiset (sorted descending), total vertex rank, and
/// `Σ max(rank - 1, 0)`; compared in that order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TerminationMeasure {
    pub edge_ranks: Vec<usize>,
    pub vertex_rank_sum: usize,
    pub splittable: usize,
}

impl fmt::Display for TerminationMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ranks: Vec<String> = self.edge_ranks.iter().map(usize::to_string).collect();
        write!(f, "({{{}}}, {}, {})", ranks.join(","), self.vertex_rank_sum, self.splittable)
    }
}

impl GraphOfGroups {
    pub fn new(vertices: BTreeMap<String, Basis>, edges: Vec<EdgePair>) -> Self {
        GraphOfGroups { vertices, edges }
    }

    pub fn from_json(text: &str) -> Result<Self, GogError> {
        let doc: GraphDoc = serde_json::from_str(text).map_err(|e| GogError::Format(format!("invalid document: {e}")))?;
        Self::from_doc(doc)
    }

    pub fn from_value(value: serde_json::Value) -> Result<Self, GogError> {
        let doc: GraphDoc = serde_json::from_value(value).map_err(|e| GogError::Format(format!("invalid document: {e}")))?;
        Self::from_doc(doc)
    }

    fn from_doc(doc: GraphDoc) -> Result<Self, GogError> {
        let vertices = doc.vertices.into_iter().map(|(k, v)| (k, v.basis)).collect();
        let mut edges = Vec::with_capacity(doc.edges.len());
        for e in doc.edges {
            let forward = bonding_list(&e.id, "bonding_forward", &e.basis, e.bonding_forward)?;
            let backward = bonding_list(&e.id, "bonding_backward", &e.basis, e.bonding_backward)?;
            edges.push(EdgePair {
                id: e.id,
                reverse_id: e.reverse_id,
                origin: e.origin,
                terminus: e.terminus,
                basis: e.basis,
                forward,
                backward,
            });
        }
        Ok(GraphOfGroups { vertices, edges })
    }

    fn to_doc(&self) -> GraphDoc {
        let map = |basis: &Basis, words: &[Word]| basis.symbols().iter().cloned().zip(words.iter().cloned()).collect();
        GraphDoc {
            vertices: self.vertices.iter().map(|(k, b)| (k.clone(), VertexDoc { basis: b.clone() })).collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    id: e.id.clone(),
                    reverse_id: e.reverse_id.clone(),
                    origin: e.origin.clone(),
                    terminus: e.terminus.clone(),
                    basis: e.basis.clone(),
                    bonding_forward: map(&e.basis, &e.forward),
                    bonding_backward: map(&e.basis, &e.backward),
                })
                .collect(),
        }
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_doc()).expect("document serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("document serializes")
    }

    pub fn vertices(&self) -> &BTreeMap<String, Basis> {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgePair] {
        &self.edges
    }

    pub fn vertex_basis(&self, v: &str) -> Result<&Basis, GogError> {
        self.vertices.get(v).ok_or_else(|| GogError::UnknownVertex(v.to_string()))
    }

    pub fn find_edge(&self, id: &str) -> Result<Oriented, GogError> {
        for (i, e) in self.edges.iter().enumerate() {
            if e.id == id {
                return Ok(Oriented { pair: i, reversed: false });
            }
            if e.reverse_id == id {
                return Ok(Oriented { pair: i, reversed: true });
            }
        }
        Err(GogError::UnknownEdge(id.to_string()))
    }

    pub fn edge_id(&self, o: Oriented) -> &str {
        let e = &self.edges[o.pair];
        if o.reversed {
            &e.reverse_id
        } else {
            &e.id
        }
    }

    pub fn origin(&self, o: Oriented) -> &str {
        let e = &self.edges[o.pair];
        if o.reversed {
            &e.terminus
        } else {
            &e.origin
        }
    }

    pub fn terminus(&self, o: Oriented) -> &str {
        self.origin(o.reverse())
    }

    /// Bonding words of `o` at its origin.
    pub fn words(&self, o: Oriented) -> &[Word] {
        let e = &self.edges[o.pair];
        if o.reversed {
            &e.backward
        } else {
            &e.forward
        }
    }

    fn words_mut(&mut self, o: Oriented) -> &mut Vec<Word> {
        let e = &mut self.edges[o.pair];
        if o.reversed {
            &mut e.backward
        } else {
            &mut e.forward
        }
    }

    pub fn edge_basis(&self, o: Oriented) -> &Basis {
        &self.edges[o.pair].basis
    }

    pub fn is_trivial(&self, o: Oriented) -> bool {
        self.edges[o.pair].basis.is_empty()
    }

    /// Oriented edges starting at `v`: pairs in order, forward before
    /// backward, so a loop contributes twice.
    pub fn incident(&self, v: &str) -> Vec<Oriented> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.origin == v {
                out.push(Oriented { pair: i, reversed: false });
            }
            if e.terminus == v {
                out.push(Oriented { pair: i, reversed: true });
            }
        }
        out
    }

    pub fn valence(&self, v: &str) -> usize {
        self.incident(v).len()
    }

    /// `φ_o` as a map from the edge basis to the basis at the origin.
    pub fn bonding(&self, o: Oriented) -> Result<Endomorphism, GogError> {
        let target = self.vertex_basis(self.origin(o))?;
        Ok(Endomorphism::new(self.edge_basis(o).clone(), target.clone(), self.words(o).to_vec())?)
    }

    fn bonding_is_iso(&self, o: Oriented) -> Result<bool, GogError> {
        let target = self.vertex_basis(self.origin(o))?;
        Ok(is_isomorphism(self.words(o), self.edge_basis(o).len(), target)?)
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.vertices.is_empty() {
            out.push(Violation::EmptyGraph);
        }
        let mut seen = BTreeSet::new();
        for e in &self.edges {
            if e.id == e.reverse_id {
                out.push(Violation::BadInvolution { edge: e.id.clone() });
            }
            for id in [&e.id, &e.reverse_id] {
                if !seen.insert(id.clone()) && e.id != e.reverse_id {
                    out.push(Violation::DuplicateEdgeId { edge: id.clone() });
                }
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            for reversed in [false, true] {
                let o = Oriented { pair: i, reversed };
                let (id, v) = (self.edge_id(o), self.origin(o));
                let Some(basis) = self.vertices.get(v) else {
                    out.push(Violation::UnknownEndpoint { edge: id.to_string(), vertex: v.to_string() });
                    continue;
                };
                let outside: BTreeSet<&Symbol> =
                    self.words(o).iter().flat_map(Word::symbols).filter(|s| !basis.contains(s)).collect();
                for s in &outside {
                    out.push(Violation::SymbolOutsideBasis {
                        edge: id.to_string(),
                        vertex: v.to_string(),
                        symbol: s.to_string(),
                    });
                }
                if outside.is_empty() && !matches!(is_monomorphism(self.words(o), e.basis.len(), basis), Ok(true)) {
                    out.push(Violation::NotMonomorphism { edge: id.to_string() });
                }
            }
        }
        if !self.vertices.is_empty() && !self.is_connected() {
            out.push(Violation::Disconnected);
        }
        out
    }

    fn is_connected(&self) -> bool {
        let Some(start) = self.vertices.keys().next() else {
            return true;
        };
        let mut seen = BTreeSet::from([start.as_str()]);
        let mut queue = VecDeque::from([start.as_str()]);
        while let Some(v) = queue.pop_front() {
            for e in &self.edges {
                for (a, b) in [(&e.origin, &e.terminus), (&e.terminus, &e.origin)] {
                    if a == v && self.vertices.contains_key(b) && seen.insert(b.as_str()) {
                        queue.push_back(b.as_str());
                    }
                }
            }
        }
        seen.len() == self.vertices.len()
    }

    pub fn measure(&self) -> TerminationMeasure {
        let mut edge_ranks: Vec<usize> = self.edges.iter().map(|e| e.basis.len()).filter(|&r| r > 0).collect();
        edge_ranks.sort_unstable_by(|a, b| b.cmp(a));
        TerminationMeasure {
            edge_ranks,
            vertex_rank_sum: self.vertices.values().map(Basis::len).sum(),
            splittable: self.vertices.values().map(|b| b.len().saturating_sub(1)).sum(),
        }
    }

    fn fresh_vertex(&self, base: &str) -> String {
        let mut name = base.to_string();
        while self.vertices.contains_key(&name) {
            name.push('\'');
        }
        name
    }

    fn edge_id_taken(&self, id: &str) -> bool {
        self.edges.iter().any(|e| e.id == id || e.reverse_id == id)
    }

    fn fresh_edge(&self, base: &str, reserved: &[String]) -> String {
        let mut name = base.to_string();
        while self.edge_id_taken(&name) || reserved.contains(&name) {
            name.push('\'');
        }
        name
    }

    /// Rewrites endpoint `v` of every oriented edge in `ends` to `to`.
    fn set_origin(&mut self, o: Oriented, to: &str) {
        let e = &mut self.edges[o.pair];
        if o.reversed {
            e.terminus = to.to_string();
        } else {
            e.origin = to.to_string();
        }
    }
}

/// The conjugacy classes of the incident edge groups at a vertex.
#[derive(Debug, Clone)]
pub struct VertexLink {
    pub vertex: String,
    pub oriented: Vec<Oriented>,
    /// Folded based graphs of the bonding images, one per oriented edge.
    pub based: GraphSequence,
    pub sequence: ConjClassSequence,
}

pub fn vertex_link(g: &GraphOfGroups, v: &str) -> Result<VertexLink, GogError> {
    let basis = g.vertex_basis(v)?;
    let oriented = g.incident(v);
    let gens: Vec<Vec<Word>> = oriented.iter().map(|&o| g.words(o).to_vec()).collect();
    let tags: Vec<String> = oriented.iter().map(|&o| g.edge_id(o).to_string()).collect();
    let mut based = stallings_representative(&gens, basis)?;
    based.tags = tags;
    let sequence = ConjClassSequence::from_graphs(&based);
    Ok(VertexLink { vertex: v.to_string(), oriented, based, sequence })
}

/// Change of bases: `ψ_e` per edge pair (keyed by the pair's forward id),
/// `ψ_v` per vertex, and a conjugator `h_e` per oriented edge. The bonding
/// words become `ψ_v(h_e · φ_e(ψ_e(b)) · h_e^-1)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ConjugationData {
    pub edge_autos: BTreeMap<String, Endomorphism>,
    pub vertex_autos: BTreeMap<String, Endomorphism>,
    pub conjugators: BTreeMap<String, Word>,
}

impl ConjugationData {
    pub fn is_empty(&self) -> bool {
        self.edge_autos.is_empty() && self.vertex_autos.is_empty() && self.conjugators.is_empty()
    }
}

pub fn apply_conjugation(g: &GraphOfGroups, c: &ConjugationData) -> Result<GraphOfGroups, GogError> {
    for (v, psi) in &c.vertex_autos {
        let basis = g.vertex_basis(v)?;
        if psi.domain() != basis || psi.codomain() != basis || !is_automorphism(psi) {
            return Err(GogError::NotAnAutomorphism(v.clone()));
        }
    }
    for (id, psi) in &c.edge_autos {
        let o = g.find_edge(id)?;
        let basis = g.edge_basis(o);
        if psi.domain() != basis || psi.codomain() != basis || (!basis.is_empty() && !is_automorphism(psi)) {
            return Err(GogError::NotAnAutomorphism(id.clone()));
        }
    }
    for (id, h) in &c.conjugators {
        let o = g.find_edge(id)?;
        g.vertex_basis(g.origin(o))?.check_word(h)?;
    }
    let mut out = g.clone();
    for i in 0..g.edges.len() {
        let pair = &g.edges[i];
        let psi_e = c.edge_autos.get(&pair.id);
        for reversed in [false, true] {
            let o = Oriented { pair: i, reversed };
            let phi = g.bonding(o)?;
            let psi_v = c.vertex_autos.get(g.origin(o));
            let h = c.conjugators.get(g.edge_id(o));
            let mut words = Vec::with_capacity(pair.basis.len());
            for s in pair.basis.symbols() {
                let b = Word::symbol(s);
                let pre = match psi_e {
                    Some(psi) => psi.apply(&b)?,
                    None => b,
                };
                let mut w = phi.apply(&pre)?;
                if let Some(h) = h {
                    w = h.conjugate(&w);
                }
                if let Some(psi) = psi_v {
                    w = psi.apply(&w)?;
                }
                words.push(w);
            }
            *out.words_mut(o) = words;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoveKind {
    BlowUp,
    Unpull,
    Unkill,
    Cleave,
    Prune,
    Splice,
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MoveKind::BlowUp => "blow-up",
            MoveKind::Unpull => "unpull",
            MoveKind::Unkill => "unkill",
            MoveKind::Cleave => "cleave",
            MoveKind::Prune => "prune",
            MoveKind::Splice => "splice",
        };
        f.write_str(s)
    }
}

/// A move and where it applies; the move finds the rest of its data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub kind: MoveKind,
    pub vertex: String,
    pub edge: Option<String>,
}

fn not_good(kind: MoveKind, vertex: &str, reason: impl Into<String>) -> GogError {
    GogError::BasesNotGood { kind, vertex: vertex.to_string(), reason: reason.into() }
}

fn incident_edge(g: &GraphOfGroups, v: &str, e: &str) -> Result<Oriented, GogError> {
    g.vertex_basis(v)?;
    let o = g.find_edge(e)?;
    if g.origin(o) != v {
        return Err(GogError::NotIncident { edge: e.to_string(), vertex: v.to_string() });
    }
    Ok(o)
}

fn word_symbols(words: &[Word]) -> BTreeSet<Symbol> {
    words.iter().flat_map(|w| w.symbols().cloned()).collect()
}

/// Symbols used by the bonding words of every oriented edge at `v` except
/// those in `skip`.
fn symbols_elsewhere(g: &GraphOfGroups, v: &str, skip: Oriented) -> BTreeSet<Symbol> {
    g.incident(v)
        .into_iter()
        .filter(|&o| o != skip)
        .flat_map(|o| word_symbols(g.words(o)))
        .collect()
}

/// Classes of basis symbols under "used in the same bonding image", with
/// the words of `split` (if any) contributing one word at a time.
fn symbol_classes(g: &GraphOfGroups, v: &str, split: Option<Oriented>) -> Vec<BTreeSet<Symbol>> {
    let basis = &g.vertices[v];
    let mut parent: Vec<usize> = (0..basis.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut join = |syms: BTreeSet<Symbol>| {
        let idx: Vec<usize> = syms.iter().filter_map(|s| basis.index_of(s)).collect();
        for w in idx.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a.max(b)] = a.min(b);
        }
    };
    for o in g.incident(v) {
        if Some(o) == split {
            for w in g.words(o) {
                join(w.symbols().cloned().collect());
            }
        } else {
            join(word_symbols(g.words(o)));
        }
    }
    let mut classes: BTreeMap<usize, BTreeSet<Symbol>> = BTreeMap::new();
    for i in 0..basis.len() {
        let r = find(&mut parent, i);
        classes.entry(r).or_default().insert(basis.symbol(i).clone());
    }
    classes.into_values().collect()
}

fn subset(words: &[Word], side: &BTreeSet<Symbol>) -> bool {
    words.iter().flat_map(Word::symbols).all(|s| side.contains(s))
}

fn pick<T: Clone>(items: &[T], keep: &[usize]) -> Vec<T> {
    keep.iter().map(|&i| items[i].clone()).collect()
}

fn restrict_basis(basis: &Basis, keep: &[usize]) -> Basis {
    Basis::new(keep.iter().map(|&i| basis.symbol(i).clone()).collect()).expect("subset of a basis")
}

/// Blow up at `v`: an unused basis letter becomes a new trivial loop;
/// otherwise `v` splits along the classes of co-used letters, joined by a
/// trivial edge.
pub fn blow_up(g: &GraphOfGroups, v: &str) -> Result<(GraphOfGroups, String), GogError> {
    let basis = g.vertex_basis(v)?.clone();
    let used: BTreeSet<Symbol> = g.incident(v).into_iter().flat_map(|o| word_symbols(g.words(o))).collect();
    let mut out = g.clone();
    if let Some(letter) = basis.symbols().iter().find(|s| !used.contains(*s)).cloned() {
        out.vertices.insert(v.to_string(), basis.restrict(|s| *s != letter));
        let id = out.fresh_edge(&format!("{v}:{letter}"), &[]);
        let reverse_id = out.fresh_edge(&format!("{v}:{letter}^-1"), std::slice::from_ref(&id));
        out.edges.push(EdgePair {
            id,
            reverse_id,
            origin: v.to_string(),
            terminus: v.to_string(),
            basis: Basis::default(),
            forward: Vec::new(),
            backward: Vec::new(),
        });
        return Ok((out, format!("letter {letter}")));
    }
    let classes = symbol_classes(g, v, None);
    if classes.len() < 2 {
        return Err(not_good(MoveKind::BlowUp, v, "every basis letter is tied to every other"));
    }
    let left = classes[0].clone();
    let left_basis = basis.restrict(|s| left.contains(s));
    let right_basis = basis.restrict(|s| !left.contains(s));
    let (v1, v2) = split_vertex(&mut out, v, left_basis.clone(), right_basis.clone());
    for o in g.incident(v) {
        let side = if subset(g.words(o), &left) { &v1 } else { &v2 };
        out.set_origin(o, side);
    }
    let id = out.fresh_edge(&format!("{v}:split"), &[]);
    let reverse_id = out.fresh_edge(&format!("{v}:split^-1"), std::slice::from_ref(&id));
    out.edges.push(EdgePair {
        id,
        reverse_id,
        origin: v1,
        terminus: v2,
        basis: Basis::default(),
        forward: Vec::new(),
        backward: Vec::new(),
    });
    Ok((out, format!("{left_basis} | {right_basis}")))
}

fn split_vertex(g: &mut GraphOfGroups, v: &str, left: Basis, right: Basis) -> (String, String) {
    g.vertices.remove(v);
    let v1 = g.fresh_vertex(&format!("{v}'"));
    g.vertices.insert(v1.clone(), left);
    let v2 = g.fresh_vertex(&format!("{v}''"));
    g.vertices.insert(v2.clone(), right);
    (v1, v2)
}

/// Unpull at `v` along `e`: finds `b_e` with `w_{e,b_e} = b_v^{±1}` where
/// `b_v` occurs in no other bonding word at `v`, then drops both letters.
pub fn unpull(g: &GraphOfGroups, v: &str, e: &str) -> Result<(GraphOfGroups, String), GogError> {
    let o = incident_edge(g, v, e)?;
    let words = g.words(o);
    let elsewhere = symbols_elsewhere(g, v, o);
    let found = words.iter().enumerate().find_map(|(j, w)| {
        let [l] = w.letters() else { return None };
        let s = &l.symbol;
        let clean = !elsewhere.contains(s) && words.iter().enumerate().all(|(k, x)| k == j || x.occurrences(s) == 0);
        clean.then(|| (j, l.clone()))
    });
    let Some((j, letter)) = found else {
        return Err(not_good(MoveKind::Unpull, v, format!("no bonding word of `{e}` is a free letter")));
    };
    let mut out = g.clone();
    let keep: Vec<usize> = (0..words.len()).filter(|&k| k != j).collect();
    let b_e = g.edge_basis(o).symbol(j).clone();
    let pair = &mut out.edges[o.pair];
    pair.basis = restrict_basis(&pair.basis, &keep);
    pair.forward = pick(&pair.forward, &keep);
    pair.backward = pick(&pair.backward, &keep);
    let vb = out.vertices[v].restrict(|s| *s != letter.symbol);
    out.vertices.insert(v.to_string(), vb);
    Ok((out, format!("{b_e} -> {letter}")))
}

/// `t u t^-1` with `u` free of `t`, returning `u`.
fn strip_conjugate(w: &Word, t: &Symbol) -> Option<Word> {
    let ls = w.letters();
    let (first, last) = (ls.first()?, ls.last()?);
    if ls.len() < 3 || first.symbol != *t || first.inverse || last.symbol != *t || !last.inverse {
        return None;
    }
    let inner = Word::reduce(ls[1..ls.len() - 1].iter().cloned());
    (inner.occurrences(t) == 0).then_some(inner)
}

/// Unkill at `v` along `e`: finds a letter `t` unused elsewhere at `v` such
/// that each word of `e` is free of `t` or has the form `t u t^-1`, with
/// both kinds present; `e` splits in two and `t` leaves the vertex basis.
pub fn unkill(g: &GraphOfGroups, v: &str, e: &str) -> Result<(GraphOfGroups, String), GogError> {
    let o = incident_edge(g, v, e)?;
    let words = g.words(o);
    let elsewhere = symbols_elsewhere(g, v, o);
    let basis = g.vertex_basis(v)?;
    let mut found = None;
    for t in basis.symbols().iter().filter(|t| !elsewhere.contains(*t)) {
        let mut near = Vec::new();
        let mut far = Vec::new();
        let mut ok = true;
        for (j, w) in words.iter().enumerate() {
            if w.occurrences(t) == 0 {
                near.push(j);
            } else if let Some(u) = strip_conjugate(w, t) {
                far.push((j, u));
            } else {
                ok = false;
                break;
            }
        }
        if ok && !near.is_empty() && !far.is_empty() {
            found = Some((t.clone(), near, far));
            break;
        }
    }
    let Some((t, near, far)) = found else {
        return Err(not_good(MoveKind::Unkill, v, format!("no letter splits the images of `{e}`")));
    };
    let far_idx: Vec<usize> = far.iter().map(|(j, _)| *j).collect();
    let far_words: Vec<Word> = far.into_iter().map(|(_, u)| u).collect();
    let mut out = g.clone();
    let back = g.words(o.reverse());
    let ebasis = g.edge_basis(o);
    let rev_id = g.edge_id(o.reverse()).to_string();
    let id1 = out.fresh_edge(&format!("{e}'"), &[]);
    let rid1 = out.fresh_edge(&format!("{rev_id}'"), std::slice::from_ref(&id1));
    let id2 = out.fresh_edge(&format!("{e}''"), &[id1.clone(), rid1.clone()]);
    let rid2 = out.fresh_edge(&format!("{rev_id}''"), &[id1.clone(), rid1.clone(), id2.clone()]);
    let terminus = g.terminus(o).to_string();
    let first = EdgePair {
        id: id1,
        reverse_id: rid1,
        origin: v.to_string(),
        terminus: terminus.clone(),
        basis: restrict_basis(ebasis, &near),
        forward: pick(words, &near),
        backward: pick(back, &near),
    };
    let second = EdgePair {
        id: id2,
        reverse_id: rid2,
        origin: v.to_string(),
        terminus,
        basis: restrict_basis(ebasis, &far_idx),
        forward: far_words,
        backward: pick(back, &far_idx),
    };
    out.edges.splice(o.pair..=o.pair, [first, second]);
    let vb = out.vertices[v].restrict(|s| *s != t);
    out.vertices.insert(v.to_string(), vb);
    Ok((out, format!("t = {t}")))
}

/// Cleave at `v` along `e`: the letters co-used with the first word of `e`
/// form one side, the rest the other; `v` and `e` split accordingly.
pub fn cleave(g: &GraphOfGroups, v: &str, e: &str) -> Result<(GraphOfGroups, String), GogError> {
    let o = incident_edge(g, v, e)?;
    let words = g.words(o);
    let Some(first) = words.first() else {
        return Err(not_good(MoveKind::Cleave, v, format!("edge `{e}` has trivial group")));
    };
    let classes = symbol_classes(g, v, Some(o));
    let anchor = first.symbols().next().cloned();
    let left = classes
        .iter()
        .find(|c| anchor.as_ref().is_some_and(|a| c.contains(a)))
        .cloned()
        .unwrap_or_default();
    let near: Vec<usize> = (0..words.len()).filter(|&j| subset(&words[j..=j], &left)).collect();
    let far: Vec<usize> = (0..words.len()).filter(|&j| !subset(&words[j..=j], &left)).collect();
    let basis = g.vertex_basis(v)?.clone();
    if far.is_empty() || left.len() == basis.len() {
        return Err(not_good(MoveKind::Cleave, v, format!("images of `{e}` do not split")));
    }
    let left_basis = basis.restrict(|s| left.contains(s));
    let right_basis = basis.restrict(|s| !left.contains(s));
    let mut out = g.clone();
    let (v1, v2) = split_vertex(&mut out, v, left_basis.clone(), right_basis.clone());
    let side = |o: Oriented| if subset(g.words(o), &left) { v1.clone() } else { v2.clone() };
    for other in g.incident(v).into_iter().filter(|&x| x != o && x != o.reverse()) {
        out.set_origin(other, &side(other));
    }
    let terminus = if g.terminus(o) == v { side(o.reverse()) } else { g.terminus(o).to_string() };
    let back = g.words(o.reverse());
    let ebasis = g.edge_basis(o);
    let rev_id = g.edge_id(o.reverse()).to_string();
    let id1 = out.fresh_edge(&format!("{e}'"), &[]);
    let rid1 = out.fresh_edge(&format!("{rev_id}'"), std::slice::from_ref(&id1));
    let id2 = out.fresh_edge(&format!("{e}''"), &[id1.clone(), rid1.clone()]);
    let rid2 = out.fresh_edge(&format!("{rev_id}''"), &[id1.clone(), rid1.clone(), id2.clone()]);
    let first = EdgePair {
        id: id1,
        reverse_id: rid1,
        origin: v1,
        terminus: terminus.clone(),
        basis: restrict_basis(ebasis, &near),
        forward: pick(words, &near),
        backward: pick(back, &near),
    };
    let second = EdgePair {
        id: id2,
        reverse_id: rid2,
        origin: v2,
        terminus,
        basis: restrict_basis(ebasis, &far),
        forward: pick(words, &far),
        backward: pick(back, &far),
    };
    out.edges.splice(o.pair..=o.pair, [first, second]);
    Ok((out, format!("{left_basis} | {right_basis}")))
}

fn is_protected(g: &GraphOfGroups, o: Oriented, protected: &BTreeSet<String>) -> bool {
    let e = &g.edges[o.pair];
    protected.contains(&e.id) || protected.contains(&e.reverse_id)
}

/// Removes the valence-one vertex `v` whose edge `e` bonds isomorphically.
pub fn prune(g: &GraphOfGroups, v: &str, e: &str) -> Result<GraphOfGroups, GogError> {
    let o = incident_edge(g, v, e)?;
    if g.valence(v) != 1 || g.is_trivial(o) || !g.bonding_is_iso(o)? {
        return Err(not_good(MoveKind::Prune, v, "not a valence-one vertex with isomorphic bonding"));
    }
    let mut out = g.clone();
    out.edges.remove(o.pair);
    out.vertices.remove(v);
    Ok(out)
}

/// Removes the valence-two vertex `v` (not on a loop) whose edge `e` bonds
/// isomorphically, reattaching the other edge `ẽ` at the far end of `e`
/// with bonding `φ_{ē} ∘ φ_e^-1 ∘ φ_ẽ`.
pub fn splice(g: &GraphOfGroups, v: &str, e: &str) -> Result<GraphOfGroups, GogError> {
    let o = incident_edge(g, v, e)?;
    let inc = g.incident(v);
    let other = match inc.as_slice() {
        [a, b] if *a == o && *b != o.reverse() => *b,
        [a, b] if *b == o && *a != o.reverse() => *a,
        _ => return Err(not_good(MoveKind::Splice, v, "not a valence-two vertex off a loop")),
    };
    if g.is_trivial(o) || !g.bonding_is_iso(o)? {
        return Err(not_good(MoveKind::Splice, v, format!("bonding of `{e}` is not an isomorphism")));
    }
    let u = g.terminus(o).to_string();
    let inverse = invert_automorphism(&g.bonding(o)?)?;
    let far = g.bonding(o.reverse())?;
    let through = far.compose(&inverse)?.compose(&g.bonding(other)?)?;
    let mut out = g.clone();
    *out.words_mut(other) = through.images().to_vec();
    out.set_origin(other, &u);
    out.edges.remove(o.pair);
    out.vertices.remove(v);
    Ok(out)
}

/// One reducing move, vertices in id order, edges in incidence order.
pub fn reduce_step(g: &GraphOfGroups, protected: &BTreeSet<String>) -> Result<Option<(Move, GraphOfGroups)>, GogError> {
    for v in g.vertices.keys() {
        let inc = g.incident(v);
        let candidates: Vec<(MoveKind, Oriented)> = match inc.as_slice() {
            [o] => vec![(MoveKind::Prune, *o)],
            [a, b] if *b != a.reverse() => vec![(MoveKind::Splice, *a), (MoveKind::Splice, *b)],
            _ => Vec::new(),
        };
        for (kind, o) in candidates {
            if g.is_trivial(o) || is_protected(g, o, protected) || !g.bonding_is_iso(o)? {
                continue;
            }
            let e = g.edge_id(o).to_string();
            let out = match kind {
                MoveKind::Prune => prune(g, v, &e)?,
                _ => splice(g, v, &e)?,
            };
            return Ok(Some((Move { kind, vertex: v.clone(), edge: Some(e) }, out)));
        }
    }
    Ok(None)
}

/// Applies reducing moves until none applies.
pub fn reduce(g: &GraphOfGroups, protected: &BTreeSet<String>) -> Result<(GraphOfGroups, Vec<Move>), GogError> {
    let mut current = g.clone();
    let mut log = Vec::new();
    while let Some((mv, next)) = reduce_step(&current, protected)? {
        log.push(mv);
        current = next;
    }
    Ok((current, log))
}

/// Applies a move by kind; returns the new graph and a short description
/// of the data the move found.
pub fn apply_move(g: &GraphOfGroups, mv: &Move) -> Result<(GraphOfGroups, String), GogError> {
    let edge = || mv.edge.as_deref().ok_or_else(|| GogError::UnknownEdge(String::new()));
    match mv.kind {
        MoveKind::BlowUp => blow_up(g, &mv.vertex),
        MoveKind::Unpull => unpull(g, &mv.vertex, edge()?),
        MoveKind::Unkill => unkill(g, &mv.vertex, edge()?),
        MoveKind::Cleave => cleave(g, &mv.vertex, edge()?),
        MoveKind::Prune => Ok((prune(g, &mv.vertex, edge()?)?, String::new())),
        MoveKind::Splice => Ok((splice(g, &mv.vertex, edge()?)?, String::new())),
    }
}

/// Conjugate graph of groups with good bases for a detected simplification.
#[derive(Debug, Clone)]
pub struct GoodBases {
    pub graph: GraphOfGroups,
    /// Changes of basis applied in order.
    pub stages: Vec<ConjugationData>,
    pub next: Move,
}

fn mismatch(msg: impl Into<String>) -> GogError {
    GogError::DetectionMismatch(msg.into())
}

/// Edges reachable from `start` without crossing `cut`, and the vertices met.
fn reach_without(g: &LabeledGraph, start: usize, cut: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for (i, e) in g.edges().iter().enumerate() {
            if i == cut {
                continue;
            }
            for (a, b) in [(e.origin, e.terminus), (e.terminus, e.origin)] {
                if a == v && seen.insert(b) {
                    stack.push(b);
                }
            }
        }
    }
    seen
}

/// Checks a detection against the link it claims to describe.
fn check_detection(seq: &ConjClassSequence, vs: &VisibleSimplification) -> Result<(), GogError> {
    let ambient = seq.ambient();
    let component = |c: usize, tag: &str| -> Result<&LabeledGraph, GogError> {
        match (seq.components().get(c), seq.tags().get(c)) {
            (Some(g), Some(t)) if t == tag => Ok(g),
            _ => Err(mismatch(format!("no component {c} tagged `{tag}`"))),
        }
    };
    let side_of = |left: &[Symbol], right: &[Symbol]| -> Result<BTreeSet<usize>, GogError> {
        let l: BTreeSet<usize> = left.iter().filter_map(|s| ambient.index_of(s)).collect();
        let r: BTreeSet<usize> = right.iter().filter_map(|s| ambient.index_of(s)).collect();
        if l.is_empty() || r.is_empty() || l.len() + r.len() != ambient.len() || !l.is_disjoint(&r) {
            return Err(mismatch("partition does not split the vertex basis"));
        }
        Ok(l)
    };
    match vs {
        VisibleSimplification::BlowUp { left, right, .. } => {
            let l = side_of(left, right)?;
            for c in seq.components() {
                let used = c.symbols_used();
                if !(used.is_subset(&l) || used.is_disjoint(&l)) {
                    return Err(mismatch("a component uses both sides of the blow-up"));
                }
            }
        }
        VisibleSimplification::Unpull { component: c, tag, symbol, edge }
        | VisibleSimplification::Unkill { component: c, tag, symbol, edge, .. } => {
            let g = component(*c, tag)?;
            let e = g.edges().get(*edge).ok_or_else(|| mismatch(format!("no edge {edge}")))?;
            if ambient.symbol(e.symbol) != symbol || seq.abs_count(symbol)? != 1 {
                return Err(mismatch(format!("`{symbol}` is not a letter used once")));
            }
            let separates = !reach_without(g, e.origin, *edge).contains(&e.terminus);
            if separates != matches!(vs, VisibleSimplification::Unkill { .. }) {
                return Err(mismatch("separation does not match the detected case"));
            }
        }
        VisibleSimplification::Cleave { component: c, tag, vertex, left, right, .. } => {
            let g = component(*c, tag)?;
            let l = side_of(left, right)?;
            let touch = |want: bool| -> BTreeSet<usize> {
                g.edges()
                    .iter()
                    .filter(|e| l.contains(&e.symbol) == want)
                    .flat_map(|e| [e.origin, e.terminus])
                    .collect()
            };
            let common: Vec<usize> = touch(true).intersection(&touch(false)).copied().collect();
            if common != [*vertex] {
                return Err(mismatch(format!("component is not a wedge at vertex {vertex}")));
            }
            for (i, other) in seq.components().iter().enumerate() {
                let used = other.symbols_used();
                if i != *c && !(used.is_subset(&l) || used.is_disjoint(&l)) {
                    return Err(mismatch("another component uses both sides of the cleave"));
                }
            }
        }
    }
    Ok(())
}

fn stage(g: &mut GraphOfGroups, stages: &mut Vec<ConjugationData>, c: ConjugationData) -> Result<(), GogError> {
    if !c.is_empty() {
        *g = apply_conjugation(g, &c)?;
        stages.push(c);
    }
    Ok(())
}

/// Folded based graph of the bonding image of `o`.
fn based_image(g: &GraphOfGroups, o: Oriented) -> Result<LabeledGraph, GogError> {
    let basis = g.vertex_basis(g.origin(o))?;
    Ok(LabeledGraph::wedge_of_loops(g.words(o), basis)?.tighten())
}

/// The change of basis `ψ_e` making the bonding words of `o` the tree
/// generators of `sigma` (generator `i` named by the `i`-th edge symbol).
fn tree_change(g: &GraphOfGroups, o: Oriented, sigma: &LabeledGraph, avoid: Option<usize>) -> Result<(Endomorphism, Vec<Word>), GogError> {
    let base = sigma.basepoint().ok_or(GraphError::NoBasepoint)?;
    let tree = sigma.spanning_tree_basis(base, avoid)?;
    let names = g.edge_basis(o);
    let images = g.words(o).iter().map(|w| tree.rewrite_in(w, names)).collect::<Result<Vec<_>, _>>()?;
    let rho = Endomorphism::new(names.clone(), names.clone(), images)?;
    Ok((invert_automorphism(&rho)?, tree.generators().to_vec()))
}

fn edge_stage(g: &GraphOfGroups, o: Oriented, psi: Endomorphism) -> ConjugationData {
    let mut c = ConjugationData::default();
    if !psi.is_identity() {
        c.edge_autos.insert(g.edges[o.pair].id.clone(), psi);
    }
    c
}

fn conjugator_stage(g: &GraphOfGroups, o: Oriented, h: Word) -> ConjugationData {
    let mut c = ConjugationData::default();
    if !h.is_identity() {
        c.conjugators.insert(g.edge_id(o).to_string(), h);
    }
    c
}

/// The unique edge of `sigma` labeled `symbol`.
fn edge_labeled(sigma: &LabeledGraph, symbol: usize) -> Result<usize, GogError> {
    let hits: Vec<usize> = (0..sigma.edge_count()).filter(|&i| sigma.edges()[i].symbol == symbol).collect();
    match hits.as_slice() {
        [i] => Ok(*i),
        _ => Err(mismatch("distinguished letter does not label exactly one edge")),
    }
}

/// Changes bases around `v` so that the detected simplification `vs` can be
/// performed by the corresponding move. `alpha` is the automorphism taking
/// the link at `v` to the sequence `vs` was detected on.
pub fn make_good_bases(
    g: &GraphOfGroups,
    v: &str,
    vs: &VisibleSimplification,
    alpha: &Endomorphism,
) -> Result<GoodBases, GogError> {
    let mut cur = g.clone();
    let mut stages = Vec::new();
    let mut c = ConjugationData::default();
    if !alpha.is_identity() {
        c.vertex_autos.insert(v.to_string(), alpha.clone());
    }
    stage(&mut cur, &mut stages, c)?;

    let link = vertex_link(&cur, v)?;
    check_detection(&link.sequence, vs)?;
    let mut c = ConjugationData::default();
    for (i, &o) in link.oriented.iter().enumerate() {
        let (_, h) = link.based.components[i].core_with_conjugator(false);
        if !h.is_identity() {
            c.conjugators.insert(cur.edge_id(o).to_string(), h);
        }
    }
    stage(&mut cur, &mut stages, c)?;

    let basis = cur.vertex_basis(v)?.clone();
    let (kind, o) = match vs {
        VisibleSimplification::BlowUp { .. } => {
            let next = Move { kind: MoveKind::BlowUp, vertex: v.to_string(), edge: None };
            return Ok(GoodBases { graph: cur, stages, next });
        }
        VisibleSimplification::Unpull { component, symbol, .. } => {
            let o = link.oriented[*component];
            let b = basis.index_of(symbol).ok_or_else(|| mismatch("unknown letter"))?;
            let sigma = based_image(&cur, o)?;
            let eps = edge_labeled(&sigma, b)?;
            let (psi_e, gens) = tree_change(&cur, o, &sigma, Some(eps))?;
            let tree = sigma.spanning_tree_basis(sigma.basepoint().ok_or(GraphError::NoBasepoint)?, Some(eps))?;
            let j = tree.generator_of_edge(eps).ok_or_else(|| mismatch("distinguished edge separates"))?;
            let mut images: Vec<Word> = basis.symbols().iter().map(Word::symbol).collect();
            images[b] = gens[j].clone();
            let beta = Endomorphism::new(basis.clone(), basis.clone(), images)?;
            let mut c = edge_stage(&cur, o, psi_e);
            let psi_v = invert_automorphism(&beta)?;
            if !psi_v.is_identity() {
                c.vertex_autos.insert(v.to_string(), psi_v);
            }
            stage(&mut cur, &mut stages, c)?;
            (MoveKind::Unpull, o)
        }
        VisibleSimplification::Unkill { component, symbol, .. } => {
            let o = link.oriented[*component];
            let b = basis.index_of(symbol).ok_or_else(|| mismatch("unknown letter"))?;
            let mut sigma = based_image(&cur, o)?;
            let mut eps = edge_labeled(&sigma, b)?;
            let base = sigma.basepoint().ok_or(GraphError::NoBasepoint)?;
            if !reach_without(&sigma, base, eps).contains(&sigma.edges()[eps].origin) {
                let mut images: Vec<Word> = basis.symbols().iter().map(Word::symbol).collect();
                images[b] = images[b].inverse();
                let mut c = ConjugationData::default();
                c.vertex_autos.insert(v.to_string(), Endomorphism::new(basis.clone(), basis.clone(), images)?);
                stage(&mut cur, &mut stages, c)?;
                sigma = based_image(&cur, o)?;
                eps = edge_labeled(&sigma, b)?;
            }
            let base = sigma.basepoint().ok_or(GraphError::NoBasepoint)?;
            let path = sigma.path_between(base, sigma.edges()[eps].origin);
            let c = conjugator_stage(&cur, o, path.inverse());
            stage(&mut cur, &mut stages, c)?;
            let sigma = based_image(&cur, o)?;
            let (psi_e, _) = tree_change(&cur, o, &sigma, None)?;
            let c = edge_stage(&cur, o, psi_e);
            stage(&mut cur, &mut stages, c)?;
            (MoveKind::Unkill, o)
        }
        VisibleSimplification::Cleave { component, vertex, .. } => {
            let o = link.oriented[*component];
            let sigma = based_image(&cur, o)?;
            let (canon, vmap, _) = sigma.canonical_map(false);
            if canon != link.sequence.components()[*component] {
                return Err(mismatch("special component changed under conjugation"));
            }
            let p = vmap.iter().position(|&c| c == *vertex).ok_or_else(|| mismatch("no wedge vertex"))?;
            let base = sigma.basepoint().ok_or(GraphError::NoBasepoint)?;
            let path = sigma.path_between(base, p);
            let c = conjugator_stage(&cur, o, path.inverse());
            stage(&mut cur, &mut stages, c)?;
            let sigma = based_image(&cur, o)?;
            let (psi_e, _) = tree_change(&cur, o, &sigma, None)?;
            let c = edge_stage(&cur, o, psi_e);
            stage(&mut cur, &mut stages, c)?;
            (MoveKind::Cleave, o)
        }
    };
    let next = Move { kind, vertex: v.to_string(), edge: Some(cur.edge_id(o).to_string()) };
    Ok(GoodBases { graph: cur, stages, next })
}
