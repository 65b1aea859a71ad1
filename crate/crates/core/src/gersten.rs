//! Complexity bookkeeping on sequences of conjugacy classes of subgroups,
//! greedy Whitehead descent to a minimal-complexity representative, and
//! detection of visible simplifications on that representative.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::automorphism::{whitehead_autos, WhiteheadAuto};
use crate::stallings::{alpha_sharp_graph, GraphError, GraphSequence, LabeledGraph};
use crate::word::{Basis, Endomorphism, Symbol, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GerstenError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("ambient rank {rank} exceeds the Whitehead search cap {cap}")]
    RankTooLarge { rank: usize, cap: usize },
    #[error("sequence is not minimal: {0} lowers its complexity")]
    NotGerstenReduced(String),
    #[error("the identity word is never primitive")]
    IdentityWord,
    #[error("symbol `{0}` is not in the ambient basis")]
    UnknownSymbol(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GerstenConfig {
    /// Largest ambient rank the exhaustive Whitehead search accepts.
    pub max_rank: usize,
}

impl Default for GerstenConfig {
    fn default() -> Self {
        GerstenConfig { max_rank: 8 }
    }
}

/// Unbased tight cores in canonical form, one per conjugacy class.
#[derive(Clone, PartialEq, Eq)]
pub struct ConjClassSequence {
    ambient: Basis,
    components: Vec<LabeledGraph>,
    tags: Vec<String>,
}

/// Per-symbol edge counts sorted nondecreasing; compared lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Lexity(pub Vec<usize>);

impl ConjClassSequence {
    /// Takes cores of the given graphs and puts them in canonical form.
    pub fn new(ambient: &Basis, graphs: Vec<LabeledGraph>, tags: Vec<String>) -> Self {
        assert_eq!(graphs.len(), tags.len(), "one tag per component");
        let components = graphs.iter().map(|g| g.tighten().core().canonical(false)).collect();
        ConjClassSequence { ambient: ambient.clone(), components, tags }
    }

    pub fn from_graphs(seq: &GraphSequence) -> Self {
        Self::new(&seq.ambient, seq.components.clone(), seq.tags.clone())
    }

    /// Conjugacy classes of the subgroups generated by each list.
    pub fn from_generators(gens: &[Vec<Word>], ambient: &Basis, tags: Vec<String>) -> Result<Self, GraphError> {
        let graphs = gens
            .iter()
            .map(|g| LabeledGraph::wedge_of_loops(g, ambient))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(ambient, graphs, tags))
    }

    pub fn ambient(&self) -> &Basis {
        &self.ambient
    }

    pub fn components(&self) -> &[LabeledGraph] {
        &self.components
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn abs_count(&self, symbol: &Symbol) -> Result<usize, GerstenError> {
        let s = self
            .ambient
            .index_of(symbol)
            .ok_or_else(|| GerstenError::UnknownSymbol(symbol.to_string()))?;
        Ok(self.counts()[s])
    }

    /// Edge count for each ambient symbol, in basis order.
    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.ambient.len()];
        for c in &self.components {
            for e in c.edges() {
                counts[e.symbol] += 1;
            }
        }
        counts
    }

    pub fn complexity(&self) -> usize {
        self.components.iter().map(LabeledGraph::edge_count).sum()
    }

    pub fn lexity(&self) -> Lexity {
        let mut counts = self.counts();
        counts.sort_unstable();
        Lexity(counts)
    }

    pub fn minlex(&self) -> usize {
        self.counts().into_iter().min().unwrap_or(0)
    }

    /// `α_#` componentwise. `α` is trusted to be an automorphism.
    pub fn alpha_sharp(&self, alpha: &Endomorphism) -> Result<ConjClassSequence, GraphError> {
        let components = self
            .components
            .iter()
            .map(|c| alpha_sharp_graph(alpha, c).map(|g| g.canonical(false)))
            .collect::<Result<_, _>>()?;
        Ok(ConjClassSequence { ambient: alpha.codomain().clone(), components, tags: self.tags.clone() })
    }

    /// Complexity after `α_#`, giving up once it reaches `bound`.
    fn complexity_after(&self, alpha: &Endomorphism, bound: usize) -> Result<Option<usize>, GraphError> {
        let mut total = 0;
        for c in &self.components {
            total += alpha_sharp_graph(alpha, c)?.edge_count();
            if total >= bound {
                return Ok(None);
            }
        }
        Ok(Some(total))
    }

    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (tag, c) in self.tags.iter().zip(&self.components) {
            out.push_str(&format!("component {tag}\n"));
            out.push_str(&c.dump(false));
        }
        out
    }
}

impl fmt::Debug for ConjClassSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ConjClassSequence over {}\n{}", self.ambient, self.dump())
    }
}

fn check_rank(ambient: &Basis, config: &GerstenConfig) -> Result<(), GerstenError> {
    if ambient.len() > config.max_rank {
        return Err(GerstenError::RankTooLarge { rank: ambient.len(), cap: config.max_rank });
    }
    Ok(())
}

/// The first elementary Whitehead automorphism (in enumeration order) that
/// strictly lowers complexity, with the image sequence.
pub fn improve_step(
    seq: &ConjClassSequence,
    config: &GerstenConfig,
) -> Result<Option<(WhiteheadAuto, ConjClassSequence)>, GerstenError> {
    check_rank(&seq.ambient, config)?;
    let current = seq.complexity();
    if current == 0 {
        return Ok(None);
    }
    for w in whitehead_autos(&seq.ambient) {
        let alpha = w.as_endomorphism();
        if seq.complexity_after(&alpha, current)?.is_some() {
            let next = seq.alpha_sharp(&alpha)?;
            return Ok(Some((w, next)));
        }
    }
    Ok(None)
}

/// Outcome of greedy descent: the minimal sequence, the composite
/// automorphism `α` with `result = α_#(seq)`, and the steps in order applied.
#[derive(Debug, Clone)]
pub struct GerstenResult {
    pub sequence: ConjClassSequence,
    pub automorphism: Endomorphism,
    pub steps: Vec<WhiteheadAuto>,
}

pub fn gersten_representative(seq: &ConjClassSequence, config: &GerstenConfig) -> Result<GerstenResult, GerstenError> {
    check_rank(&seq.ambient, config)?;
    let mut current = seq.clone();
    let mut alpha = Endomorphism::identity(&seq.ambient);
    let mut steps = Vec::new();
    while let Some((w, next)) = improve_step(&current, config)? {
        alpha = w.as_endomorphism().compose(&alpha)?;
        steps.push(w);
        current = next;
    }
    Ok(GerstenResult { sequence: current, automorphism: alpha, steps })
}

/// A certificate that the graph of groups around a vertex can be simplified.
/// Components are referred to by index into the sequence (with the tag kept
/// for display), edges by their canonical id inside the component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum VisibleSimplification {
    /// Every component's labels lie on one side of `left ⊔ right`.
    /// `unused` is set when `right` consists of letters no component uses.
    BlowUp { left: Vec<Symbol>, right: Vec<Symbol>, unused: bool },
    /// The unique `symbol` edge does not separate its component.
    Unpull { component: usize, tag: String, symbol: Symbol, edge: usize },
    /// The unique `symbol` edge separates its component; `near` and `far` are
    /// the remaining edges on the origin and terminus sides.
    Unkill { component: usize, tag: String, symbol: Symbol, edge: usize, near: Vec<usize>, far: Vec<usize> },
    /// `component` is a wedge at `vertex` of a part labeled by `left` (edges
    /// `left_edges`) and a part labeled by `right`; all other components
    /// respect the partition.
    Cleave {
        component: usize,
        tag: String,
        vertex: usize,
        left: Vec<Symbol>,
        right: Vec<Symbol>,
        left_edges: Vec<usize>,
    },
}

impl VisibleSimplification {
    pub fn kind(&self) -> &'static str {
        match self {
            VisibleSimplification::BlowUp { .. } => "blow-up",
            VisibleSimplification::Unpull { .. } => "unpull",
            VisibleSimplification::Unkill { .. } => "unkill",
            VisibleSimplification::Cleave { .. } => "cleave",
        }
    }

    pub fn component(&self) -> Option<usize> {
        match self {
            VisibleSimplification::BlowUp { .. } => None,
            VisibleSimplification::Unpull { component, .. }
            | VisibleSimplification::Unkill { component, .. }
            | VisibleSimplification::Cleave { component, .. } => Some(*component),
        }
    }
}

impl fmt::Display for VisibleSimplification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |s: &[Symbol]| s.iter().map(Symbol::as_str).collect::<Vec<_>>().join(",");
        match self {
            VisibleSimplification::BlowUp { left, right, unused } => {
                write!(f, "blow-up {{{}}} | {{{}}}", set(left), set(right))?;
                if *unused {
                    write!(f, " (unused)")?;
                }
                Ok(())
            }
            VisibleSimplification::Unpull { tag, symbol, edge, .. } => {
                write!(f, "unpull {symbol} at component {tag} edge {edge}")
            }
            VisibleSimplification::Unkill { tag, symbol, edge, .. } => {
                write!(f, "unkill {symbol} at component {tag} edge {edge}")
            }
            VisibleSimplification::Cleave { tag, vertex, left, right, .. } => {
                write!(f, "cleave component {tag} at vertex {vertex} into {{{}}} | {{{}}}", set(left), set(right))
            }
        }
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }

    fn union_all(&mut self, items: impl IntoIterator<Item = usize>) {
        let mut first = None;
        for x in items {
            match first {
                None => first = Some(x),
                Some(f) => self.union(f, x),
            }
        }
    }
}

/// Splits `used` by the union-find classes; the class of the lowest used
/// symbol goes left. `None` when there is only one class.
fn split_classes(uf: &mut UnionFind, used: &BTreeSet<usize>) -> Option<(BTreeSet<usize>, BTreeSet<usize>)> {
    let first = *used.iter().next()?;
    let root = uf.find(first);
    let (left, right): (BTreeSet<usize>, BTreeSet<usize>) = used.iter().partition(|&&s| uf.find(s) == root);
    (!right.is_empty()).then_some((left, right))
}

fn names(ambient: &Basis, set: &BTreeSet<usize>) -> Vec<Symbol> {
    set.iter().map(|&s| ambient.symbol(s).clone()).collect()
}

/// Detection with the minimality guard: fails if an elementary Whitehead
/// automorphism still lowers complexity.
pub fn detect_visible(
    seq: &ConjClassSequence,
    excluded: &BTreeSet<String>,
    config: &GerstenConfig,
) -> Result<Option<VisibleSimplification>, GerstenError> {
    if let Some((w, _)) = improve_step(seq, config)? {
        return Err(GerstenError::NotGerstenReduced(w.to_string()));
    }
    Ok(detect_visible_unchecked(seq, excluded))
}

/// Detection in priority order: blow up, then unpull/unkill, then cleave.
/// Components whose tag is in `excluded` are never chosen as special.
pub fn detect_visible_unchecked(seq: &ConjClassSequence, excluded: &BTreeSet<String>) -> Option<VisibleSimplification> {
    detect_blow_up(seq)
        .or_else(|| detect_single_edge(seq, excluded))
        .or_else(|| detect_cleave(seq, excluded))
}

fn detect_blow_up(seq: &ConjClassSequence) -> Option<VisibleSimplification> {
    let n = seq.ambient.len();
    if n < 2 {
        return None;
    }
    let mut used = BTreeSet::new();
    let mut uf = UnionFind::new(n);
    for c in &seq.components {
        let syms = c.symbols_used();
        uf.union_all(syms.iter().copied());
        used.extend(syms);
    }
    let all: BTreeSet<usize> = (0..n).collect();
    let unused: BTreeSet<usize> = all.difference(&used).copied().collect();
    if !unused.is_empty() {
        let (left, right) = if used.is_empty() {
            (all.iter().skip(1).copied().collect(), BTreeSet::from([0]))
        } else {
            (used, unused)
        };
        return Some(VisibleSimplification::BlowUp {
            left: names(&seq.ambient, &left),
            right: names(&seq.ambient, &right),
            unused: true,
        });
    }
    let (left, right) = split_classes(&mut uf, &used)?;
    Some(VisibleSimplification::BlowUp {
        left: names(&seq.ambient, &left),
        right: names(&seq.ambient, &right),
        unused: false,
    })
}

/// Edges reachable from `start` without crossing `cut`.
fn reachable_edges(g: &LabeledGraph, start: usize, cut: usize) -> (BTreeSet<usize>, BTreeSet<usize>) {
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    let mut edges = BTreeSet::new();
    while let Some(v) = stack.pop() {
        for (i, e) in g.edges().iter().enumerate() {
            if i == cut || (e.origin != v && e.terminus != v) {
                continue;
            }
            edges.insert(i);
            let other = if e.origin == v { e.terminus } else { e.origin };
            if seen.insert(other) {
                stack.push(other);
            }
        }
    }
    (seen, edges)
}

fn detect_single_edge(seq: &ConjClassSequence, excluded: &BTreeSet<String>) -> Option<VisibleSimplification> {
    let counts = seq.counts();
    for (ci, c) in seq.components.iter().enumerate() {
        if excluded.contains(&seq.tags[ci]) {
            continue;
        }
        for (ei, e) in c.edges().iter().enumerate() {
            if counts[e.symbol] != 1 {
                continue;
            }
            let tag = seq.tags[ci].clone();
            let symbol = seq.ambient.symbol(e.symbol).clone();
            let (near_vertices, near) = reachable_edges(c, e.origin, ei);
            if near_vertices.contains(&e.terminus) {
                return Some(VisibleSimplification::Unpull { component: ci, tag, symbol, edge: ei });
            }
            let (_, far) = reachable_edges(c, e.terminus, ei);
            return Some(VisibleSimplification::Unkill {
                component: ci,
                tag,
                symbol,
                edge: ei,
                near: near.into_iter().collect(),
                far: far.into_iter().collect(),
            });
        }
    }
    None
}

/// Groups the edges of `g` into branches at `p`: two edges share a branch
/// when they meet at a vertex other than `p`.
fn branches_at(g: &LabeledGraph, p: usize) -> Vec<Vec<usize>> {
    let m = g.edge_count();
    let mut uf = UnionFind::new(m);
    for v in (0..g.vertex_count()).filter(|&v| v != p) {
        uf.union_all((0..m).filter(|&i| g.edges()[i].origin == v || g.edges()[i].terminus == v));
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_index = std::collections::BTreeMap::new();
    for i in 0..m {
        let r = uf.find(i);
        let k = *root_index.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[k].push(i);
    }
    groups
}

fn detect_cleave(seq: &ConjClassSequence, excluded: &BTreeSet<String>) -> Option<VisibleSimplification> {
    let n = seq.ambient.len();
    for (ci, c) in seq.components.iter().enumerate() {
        if excluded.contains(&seq.tags[ci]) || c.is_empty() {
            continue;
        }
        let mut base = UnionFind::new(n);
        let mut used = BTreeSet::new();
        for (cj, other) in seq.components.iter().enumerate() {
            let syms = other.symbols_used();
            used.extend(syms.iter().copied());
            if cj != ci {
                base.union_all(syms);
            }
        }
        for p in 0..c.vertex_count() {
            let branches = branches_at(c, p);
            if branches.len() < 2 {
                continue;
            }
            let mut uf = UnionFind(base.0.clone());
            for b in &branches {
                uf.union_all(b.iter().map(|&i| c.edges()[i].symbol));
            }
            if let Some((left, right)) = split_classes(&mut uf, &used) {
                let left_edges = (0..c.edge_count()).filter(|&i| left.contains(&c.edges()[i].symbol)).collect();
                return Some(VisibleSimplification::Cleave {
                    component: ci,
                    tag: seq.tags[ci].clone(),
                    vertex: p,
                    left: names(&seq.ambient, &left),
                    right: names(&seq.ambient, &right),
                    left_edges,
                });
            }
        }
    }
    None
}

/// Whitehead's test: `w` is primitive iff the minimal representative of the
/// conjugacy class of `⟨w⟩` is a single loop.
pub fn is_primitive(w: &Word, ambient: &Basis, config: &GerstenConfig) -> Result<bool, GerstenError> {
    if w.is_identity() {
        return Err(GerstenError::IdentityWord);
    }
    ambient.check_word(w)?;
    let seq = ConjClassSequence::from_generators(&[vec![w.clone()]], ambient, vec!["w".into()])?;
    Ok(gersten_representative(&seq, config)?.sequence.complexity() == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::is_automorphism;

    fn basis(s: &str) -> Basis {
        Basis::parse(s).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn seq(ambient: &str, gens: &[&[&str]]) -> ConjClassSequence {
        let gens: Vec<Vec<Word>> = gens.iter().map(|g| g.iter().map(|s| w(s)).collect()).collect();
        let tags = (0..gens.len()).map(|i| i.to_string()).collect();
        ConjClassSequence::from_generators(&gens, &basis(ambient), tags).unwrap()
    }

    fn none() -> BTreeSet<String> {
        BTreeSet::new()
    }

    #[test]
    fn counts_on_small_classes() {
        let s = seq("a,b", &[&["a"]]);
        assert_eq!((s.complexity(), s.lexity(), s.minlex()), (1, Lexity(vec![0, 1]), 0));
        assert_eq!(s.abs_count(&"a".parse().unwrap()).unwrap(), 1);
        assert_eq!(s.abs_count(&"b".parse().unwrap()).unwrap(), 0);
        assert!(s.abs_count(&"c".parse().unwrap()).is_err());
        let rose = seq("a,b", &[&["a", "b"]]);
        assert_eq!((rose.complexity(), rose.lexity(), rose.minlex()), (2, Lexity(vec![1, 1]), 1));
        let comm = seq("a,b", &[&["a b a^-1 b^-1"]]);
        assert_eq!((comm.complexity(), comm.lexity(), comm.minlex()), (4, Lexity(vec![2, 2]), 2));
    }

    #[test]
    fn conjugates_share_a_component() {
        let a = seq("a,b", &[&["a b a^-1 b a b^-1 a^-1"]]);
        let b = seq("a,b", &[&["b"]]);
        assert_eq!(a.components()[0], b.components()[0]);
    }

    #[test]
    fn improve_step_examples() {
        let cfg = GerstenConfig::default();
        assert!(improve_step(&seq("a,b", &[&["b"]]), &cfg).unwrap().is_none());
        let (_, next) = improve_step(&seq("a,b", &[&["a b"]]), &cfg).unwrap().unwrap();
        assert_eq!(next.complexity(), 1);
        assert!(improve_step(&seq("a,b", &[&["a b a^-1 b^-1"]]), &cfg).unwrap().is_none());
    }

    #[test]
    fn representative_automorphism_matches() {
        let cfg = GerstenConfig::default();
        let s = seq("a,b", &[&["a a b a^-1", "a b^-1 a b b a^-1"]]);
        let r = gersten_representative(&s, &cfg).unwrap();
        assert!(is_automorphism(&r.automorphism));
        assert_eq!(s.alpha_sharp(&r.automorphism).unwrap(), r.sequence);
        assert!(r.sequence.complexity() <= 3);
        assert!(improve_step(&r.sequence, &cfg).unwrap().is_none());
        let rose = seq("a,b", &[&["a", "b"]]);
        let r = gersten_representative(&rose, &cfg).unwrap();
        assert!(r.automorphism.is_identity());
        assert_eq!(r.sequence, rose);
    }

    #[test]
    fn rank_cap() {
        let cfg = GerstenConfig { max_rank: 1 };
        assert!(matches!(
            improve_step(&seq("a,b", &[&["a"]]), &cfg),
            Err(GerstenError::RankTooLarge { rank: 2, cap: 1 })
        ));
    }

    #[test]
    fn detection_examples() {
        let cfg = GerstenConfig::default();
        let d = detect_visible(&seq("a,b", &[&["a"]]), &none(), &cfg).unwrap().unwrap();
        assert_eq!(
            d,
            VisibleSimplification::BlowUp { left: vec!["a".parse().unwrap()], right: vec!["b".parse().unwrap()], unused: true }
        );
        let d = detect_visible(&seq("a,b", &[&["a"], &["b"]]), &none(), &cfg).unwrap().unwrap();
        assert_eq!(d.kind(), "blow-up");
        let d = detect_visible(&seq("a,b", &[&["a", "b"]]), &none(), &cfg).unwrap().unwrap();
        match d {
            VisibleSimplification::Unpull { component, symbol, .. } => assert_eq!((component, symbol.as_str()), (0, "a")),
            other => panic!("expected unpull, got {other}"),
        }
        let d = detect_visible(&seq("b1,b2", &[&["b1^2", "b2^2"], &["b1"], &["b2"]]), &none(), &cfg).unwrap().unwrap();
        match d {
            VisibleSimplification::Cleave { component, left, right, left_edges, .. } => {
                assert_eq!(component, 0);
                assert_eq!(left, vec![Symbol::new("b1").unwrap()]);
                assert_eq!(right, vec![Symbol::new("b2").unwrap()]);
                assert_eq!(left_edges.len(), 2);
            }
            other => panic!("expected a cleave, got {other}"),
        }
        assert_eq!(detect_visible(&seq("a,b", &[&["a b a^-1 b^-1"]]), &none(), &cfg).unwrap(), None);
        assert!(matches!(
            detect_visible(&seq("a,b", &[&["a b"]]), &none(), &cfg),
            Err(GerstenError::NotGerstenReduced(_))
        ));
    }

    #[test]
    fn unkill_on_separating_edge() {
        // Barbell: a loop, a bridge b, a loop c.
        let s = seq("a,b,c", &[&["a", "b c b^-1"], &["a c"]]);
        let d = detect_visible_unchecked(&s, &none()).unwrap();
        match d {
            VisibleSimplification::Unkill { symbol, near, far, .. } => {
                assert_eq!(symbol.as_str(), "b");
                assert_eq!(near.len() + far.len(), 2);
            }
            other => panic!("expected an unkill, got {other}"),
        }
    }

    #[test]
    fn exclusions_skip_special_components() {
        let s = seq("a,b", &[&["a", "b"]]);
        let excluded = BTreeSet::from(["0".to_string()]);
        assert_eq!(detect_visible_unchecked(&s, &excluded), None);
    }

    #[test]
    fn primitive_words() {
        let cfg = GerstenConfig::default();
        let ab = basis("a,b");
        assert!(is_primitive(&w("a"), &ab, &cfg).unwrap());
        assert!(is_primitive(&w("a b"), &ab, &cfg).unwrap());
        assert!(!is_primitive(&w("a b a^-1 b^-1"), &ab, &cfg).unwrap());
        assert!(!is_primitive(&w("a^2 b^2"), &ab, &cfg).unwrap());
        assert_eq!(is_primitive(&Word::identity(), &ab, &cfg), Err(GerstenError::IdentityWord));
    }
}
