//! Labeled graphs over a basis, folding, cores and the fold-based
//! monomorphism/isomorphism tests.
//!
//! Every geometric edge is stored once, oriented so that it reads a positive
//! basis letter. A graph with zero vertices is the marker for the trivial
//! subgroup.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::word::{Basis, Endomorphism, Letter, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("symbol `{0}` has the identity as image")]
    EmptyImage(String),
    #[error("unknown edge id {0}")]
    UnknownEdge(usize),
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("word `{0}` does not lie in the subgroup")]
    NotInSubgroup(String),
    #[error("map is not an automorphism")]
    NotAnAutomorphism,
    #[error("graph has no basepoint")]
    NoBasepoint,
}

/// An edge read from `origin` to `terminus` with the positive label `symbol`
/// (an index into the ambient basis).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub origin: usize,
    pub terminus: usize,
    pub symbol: usize,
}

/// Signed letter code: `2 * symbol + (1 if inverse)`.
pub(crate) fn code(symbol: usize, inverse: bool) -> usize {
    2 * symbol + inverse as usize
}

pub(crate) fn word_codes(basis: &Basis, word: &Word) -> Result<Vec<usize>, WordError> {
    word.letters()
        .iter()
        .map(|l| {
            basis
                .index_of(&l.symbol)
                .map(|i| code(i, l.inverse))
                .ok_or_else(|| WordError::NotInBasis { symbol: l.symbol.to_string(), basis: basis.to_string() })
        })
        .collect()
}

pub(crate) fn codes_word(basis: &Basis, codes: impl IntoIterator<Item = usize>) -> Word {
    Word::reduce(codes.into_iter().map(|c| basis.letter(c / 2, c % 2 == 1)))
}

#[derive(Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    ambient: Basis,
    vertex_count: usize,
    edges: Vec<Edge>,
    basepoint: Option<usize>,
    tight: bool,
}

/// A half-edge seen from one of its endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfEdge {
    pub edge: usize,
    pub forward: bool,
    pub code: usize,
    pub target: usize,
}

impl LabeledGraph {
    /// The trivial-subgroup marker.
    pub fn empty(ambient: &Basis) -> Self {
        LabeledGraph { ambient: ambient.clone(), vertex_count: 0, edges: Vec::new(), basepoint: None, tight: true }
    }

    /// A graph from raw parts; connectivity is the caller's responsibility.
    pub fn from_parts(
        ambient: &Basis,
        vertex_count: usize,
        edges: Vec<Edge>,
        basepoint: Option<usize>,
    ) -> Result<Self, GraphError> {
        for e in &edges {
            if e.origin >= vertex_count {
                return Err(GraphError::UnknownVertex(e.origin));
            }
            if e.terminus >= vertex_count {
                return Err(GraphError::UnknownVertex(e.terminus));
            }
            if e.symbol >= ambient.len() {
                return Err(GraphError::UnknownEdge(e.symbol));
            }
        }
        if let Some(b) = basepoint {
            if b >= vertex_count {
                return Err(GraphError::UnknownVertex(b));
            }
        }
        let mut g = LabeledGraph { ambient: ambient.clone(), vertex_count, edges, basepoint, tight: false };
        g.tight = g.compute_tight();
        Ok(g)
    }

    /// One subdivided loop per generator, all at the basepoint 0.
    pub fn wedge_of_loops(gens: &[Word], ambient: &Basis) -> Result<Self, GraphError> {
        let mut vertex_count = 1;
        let mut edges = Vec::new();
        for g in gens {
            let codes = word_codes(ambient, g)?;
            let n = codes.len();
            let mut prev = 0;
            for (i, c) in codes.into_iter().enumerate() {
                let next = if i + 1 == n {
                    0
                } else {
                    vertex_count += 1;
                    vertex_count - 1
                };
                edges.push(oriented_edge(prev, next, c));
                prev = next;
            }
        }
        let mut g = LabeledGraph { ambient: ambient.clone(), vertex_count, edges, basepoint: Some(0), tight: false };
        g.tight = g.compute_tight();
        Ok(g)
    }

    /// The rose with one loop per ambient symbol.
    pub fn rose(ambient: &Basis) -> Self {
        let edges = (0..ambient.len()).map(|s| Edge { origin: 0, terminus: 0, symbol: s }).collect();
        LabeledGraph { ambient: ambient.clone(), vertex_count: 1, edges, basepoint: Some(0), tight: true }
    }

    pub fn ambient(&self) -> &Basis {
        &self.ambient
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn basepoint(&self) -> Option<usize> {
        self.basepoint
    }

    pub fn is_empty(&self) -> bool {
        self.vertex_count == 0
    }

    pub fn is_tight(&self) -> bool {
        self.tight
    }

    pub fn with_basepoint(mut self, basepoint: Option<usize>) -> Self {
        self.basepoint = basepoint;
        self
    }

    /// Rank of the fundamental group; 0 for the empty marker.
    pub fn rank(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            self.edges.len() + 1 - self.vertex_count
        }
    }

    /// Half-edges leaving each vertex, sorted by (label code, edge id).
    pub fn half_edges(&self) -> Vec<Vec<HalfEdge>> {
        let mut out = vec![Vec::new(); self.vertex_count];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.origin].push(HalfEdge { edge: i, forward: true, code: code(e.symbol, false), target: e.terminus });
            out[e.terminus].push(HalfEdge { edge: i, forward: false, code: code(e.symbol, true), target: e.origin });
        }
        for hs in &mut out {
            hs.sort_by_key(|h| (h.code, h.edge, !h.forward));
        }
        out
    }

    pub fn valence(&self, v: usize) -> usize {
        self.edges.iter().map(|e| (e.origin == v) as usize + (e.terminus == v) as usize).sum()
    }

    /// Symbols (as ambient indices) labeling at least one edge.
    pub fn symbols_used(&self) -> BTreeSet<usize> {
        self.edges.iter().map(|e| e.symbol).collect()
    }

    /// Number of edges labeled by the symbol with index `s`.
    pub fn symbol_count(&self, s: usize) -> usize {
        self.edges.iter().filter(|e| e.symbol == s).count()
    }

    fn compute_tight(&self) -> bool {
        self.half_edges().iter().all(|hs| hs.windows(2).all(|w| w[0].code != w[1].code))
    }

    /// Transition table: for each vertex and label code, the half-edge reading it.
    fn transitions(&self) -> Vec<Vec<Option<HalfEdge>>> {
        let width = 2 * self.ambient.len();
        let mut table = vec![vec![None; width]; self.vertex_count];
        for (v, hs) in self.half_edges().into_iter().enumerate() {
            for h in hs {
                table[v][h.code].get_or_insert(h);
            }
        }
        table
    }

    /// Reads `word` from `start`; `None` if the lift leaves the graph.
    pub fn read(&self, start: usize, word: &Word) -> Result<Option<usize>, GraphError> {
        let codes = word_codes(&self.ambient, word)?;
        let table = self.transitions();
        let mut at = start;
        for c in codes {
            match table[at][c] {
                Some(h) => at = h.target,
                None => return Ok(None),
            }
        }
        Ok(Some(at))
    }

    /// Membership of `word` in the subgroup read at the basepoint.
    pub fn contains(&self, word: &Word) -> Result<bool, GraphError> {
        if self.is_empty() {
            self.ambient.check_word(word)?;
            return Ok(word.is_identity());
        }
        let base = self.basepoint.ok_or(GraphError::NoBasepoint)?;
        Ok(self.read(base, word)? == Some(base))
    }

    /// Folds until no vertex has two outgoing half-edges with one label.
    pub fn tighten(&self) -> LabeledGraph {
        if self.tight {
            return self.clone();
        }
        self.fold_where(|_| true)
    }

    /// Folds only pairs whose label symbol is `symbol`.
    pub fn tighten_label(&self, symbol: usize) -> LabeledGraph {
        self.fold_where(|c| c / 2 == symbol)
    }

    fn fold_where(&self, foldable: impl Fn(usize) -> bool) -> LabeledGraph {
        let n = self.vertex_count;
        let mut parent: Vec<usize> = (0..n).collect();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.origin].push(i);
            if e.terminus != e.origin {
                adj[e.terminus].push(i);
            }
        }
        let mut alive = vec![true; self.edges.len()];
        let mut work: Vec<usize> = (0..n).rev().collect();

        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }

        while let Some(v0) = work.pop() {
            let v = find(&mut parent, v0);
            let mut seen: HashMap<usize, (usize, usize)> = HashMap::new();
            let mut fold = None;
            let list = std::mem::take(&mut adj[v]);
            let mut kept = Vec::with_capacity(list.len());
            for &ei in &list {
                if !alive[ei] || kept.contains(&ei) {
                    continue;
                }
                kept.push(ei);
                if fold.is_some() {
                    continue;
                }
                let e = self.edges[ei];
                let (o, t) = (find(&mut parent, e.origin), find(&mut parent, e.terminus));
                let mut halves = Vec::with_capacity(2);
                if o == v {
                    halves.push((code(e.symbol, false), t));
                }
                if t == v {
                    halves.push((code(e.symbol, true), o));
                }
                for (c, other) in halves {
                    if !foldable(c) {
                        continue;
                    }
                    match seen.get(&c) {
                        Some(&(prev, prev_other)) if prev != ei => {
                            fold = Some((prev, prev_other, ei, other));
                            break;
                        }
                        Some(_) => {}
                        None => {
                            seen.insert(c, (ei, other));
                        }
                    }
                }
            }
            adj[v] = kept;
            if let Some((_keep, x, drop, y)) = fold {
                alive[drop] = false;
                let (x, y) = (find(&mut parent, x), find(&mut parent, y));
                if x != y {
                    let (big, small) = if adj[x].len() >= adj[y].len() { (x, y) } else { (y, x) };
                    parent[small] = big;
                    let moved = std::mem::take(&mut adj[small]);
                    adj[big].extend(moved);
                    work.push(big);
                }
                work.push(find(&mut parent, v));
            }
        }

        let mut renumber = vec![usize::MAX; n];
        let mut count = 0;
        for i in 0..n {
            let r = find(&mut parent, i);
            if renumber[r] == usize::MAX {
                renumber[r] = count;
                count += 1;
            }
        }
        let mut edges = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if alive[i] {
                edges.push(Edge {
                    origin: renumber[find(&mut parent, e.origin)],
                    terminus: renumber[find(&mut parent, e.terminus)],
                    symbol: e.symbol,
                });
            }
        }
        let basepoint = self.basepoint.map(|b| renumber[find(&mut parent, b)]);
        let mut g = LabeledGraph { ambient: self.ambient.clone(), vertex_count: count, edges, basepoint, tight: false };
        g.tight = g.compute_tight();
        g
    }

    /// Shortest path (as half-edges) from `from` to every vertex, by BFS in
    /// label order.
    fn bfs_paths(&self, from: usize, skip_edge: Option<usize>) -> Vec<Option<(usize, HalfEdge)>> {
        let hs = self.half_edges();
        let mut pred: Vec<Option<(usize, HalfEdge)>> = vec![None; self.vertex_count];
        let mut seen = vec![false; self.vertex_count];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for h in &hs[v] {
                if Some(h.edge) == skip_edge || seen[h.target] {
                    continue;
                }
                seen[h.target] = true;
                pred[h.target] = Some((v, *h));
                queue.push_back(h.target);
            }
        }
        pred
    }

    fn path_word(&self, pred: &[Option<(usize, HalfEdge)>], to: usize) -> Vec<usize> {
        let mut codes = Vec::new();
        let mut at = to;
        while let Some((prev, h)) = pred[at] {
            codes.push(h.code);
            at = prev;
        }
        codes.reverse();
        codes
    }

    /// Word read along a shortest path between two vertices.
    pub fn path_between(&self, from: usize, to: usize) -> Word {
        let pred = self.bfs_paths(from, None);
        codes_word(&self.ambient, self.path_word(&pred, to))
    }

    /// Iteratively removes valence ≤ 1 vertices, keeping `keep` if given.
    fn prune(&self, keep: Option<usize>) -> (LabeledGraph, Vec<Option<usize>>) {
        let mut alive_v = vec![true; self.vertex_count];
        let mut alive_e = vec![true; self.edges.len()];
        let mut valence: Vec<usize> = (0..self.vertex_count).map(|_| 0).collect();
        for e in &self.edges {
            valence[e.origin] += 1;
            valence[e.terminus] += 1;
        }
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); self.vertex_count];
        for (i, e) in self.edges.iter().enumerate() {
            incident[e.origin].push(i);
            if e.terminus != e.origin {
                incident[e.terminus].push(i);
            }
        }
        let mut stack: Vec<usize> =
            (0..self.vertex_count).filter(|&v| valence[v] <= 1 && Some(v) != keep).collect();
        while let Some(v) = stack.pop() {
            if !alive_v[v] || valence[v] > 1 || Some(v) == keep {
                continue;
            }
            alive_v[v] = false;
            for &ei in &incident[v] {
                if !alive_e[ei] {
                    continue;
                }
                alive_e[ei] = false;
                let e = self.edges[ei];
                let other = if e.origin == v { e.terminus } else { e.origin };
                valence[other] -= 1;
                if valence[other] <= 1 && alive_v[other] && Some(other) != keep {
                    stack.push(other);
                }
            }
        }
        let mut renumber = vec![None; self.vertex_count];
        let mut count = 0;
        for v in 0..self.vertex_count {
            if alive_v[v] {
                renumber[v] = Some(count);
                count += 1;
            }
        }
        let edges = self
            .edges
            .iter()
            .zip(&alive_e)
            .filter(|(_, &a)| a)
            .map(|(e, _)| Edge {
                origin: renumber[e.origin].unwrap(),
                terminus: renumber[e.terminus].unwrap(),
                symbol: e.symbol,
            })
            .collect();
        let basepoint = self.basepoint.and_then(|b| renumber[b]);
        let g = LabeledGraph { ambient: self.ambient.clone(), vertex_count: count, edges, basepoint, tight: self.tight };
        (g, renumber)
    }

    /// The core together with a conjugator.
    ///
    /// With `based` the basepoint and the path to it are kept and the
    /// conjugator is trivial. Otherwise the basepoint moves to the nearest core
    /// vertex `*'` and the returned `h` satisfies `[(core, *')] = h [(g, *)] h^-1`.
    /// A graph of rank 0 yields the empty marker.
    pub fn core_with_conjugator(&self, based: bool) -> (LabeledGraph, Word) {
        if self.is_empty() || self.rank() == 0 {
            return (LabeledGraph::empty(&self.ambient), Word::identity());
        }
        if based {
            let (g, _) = self.prune(self.basepoint);
            return (g, Word::identity());
        }
        let (mut core, renumber) = self.prune(None);
        let Some(base) = self.basepoint else {
            return (core, Word::identity());
        };
        let pred = self.bfs_paths(base, None);
        let mut dist: Vec<(usize, usize)> = Vec::new();
        for v in 0..self.vertex_count {
            if renumber[v].is_some() {
                let len = self.path_word(&pred, v).len();
                dist.push((len, v));
            }
        }
        let target = dist.iter().min().map(|&(_, v)| v).unwrap();
        let path = codes_word(&self.ambient, self.path_word(&pred, target));
        core.basepoint = renumber[target];
        (core, path.inverse())
    }

    pub fn core(&self) -> LabeledGraph {
        self.core_with_conjugator(false).0
    }

    /// Replaces every edge by a subdivided path spelling its image.
    pub fn apply_auto(&self, alpha: &Endomorphism) -> Result<LabeledGraph, GraphError> {
        if alpha.domain() != &self.ambient {
            return Err(WordError::BasisMismatch {
                expected: alpha.domain().to_string(),
                found: self.ambient.to_string(),
            }
            .into());
        }
        let target = alpha.codomain();
        let images: Vec<Vec<usize>> =
            alpha.images().iter().map(|w| word_codes(target, w)).collect::<Result<_, _>>()?;
        for (s, img) in images.iter().enumerate() {
            if img.is_empty() && self.edges.iter().any(|e| e.symbol == s) {
                return Err(GraphError::EmptyImage(self.ambient.symbol(s).to_string()));
            }
        }
        let mut vertex_count = self.vertex_count;
        let mut edges = Vec::new();
        for e in &self.edges {
            let img = &images[e.symbol];
            let mut prev = e.origin;
            for (i, &c) in img.iter().enumerate() {
                let next = if i + 1 == img.len() {
                    e.terminus
                } else {
                    vertex_count += 1;
                    vertex_count - 1
                };
                edges.push(oriented_edge(prev, next, c));
                prev = next;
            }
        }
        let mut g = LabeledGraph { ambient: target.clone(), vertex_count, edges, basepoint: self.basepoint, tight: false };
        g.tight = g.compute_tight();
        Ok(g)
    }

    /// Collapses each listed edge to a point.
    pub fn collapse_edges(&self, collapse: &BTreeSet<usize>) -> Result<LabeledGraph, GraphError> {
        if let Some(&bad) = collapse.iter().find(|&&e| e >= self.edges.len()) {
            return Err(GraphError::UnknownEdge(bad));
        }
        let mut parent: Vec<usize> = (0..self.vertex_count).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &ei in collapse {
            let e = self.edges[ei];
            let (a, b) = (find(&mut parent, e.origin), find(&mut parent, e.terminus));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut renumber = vec![usize::MAX; self.vertex_count];
        let mut count = 0;
        for v in 0..self.vertex_count {
            let r = find(&mut parent, v);
            if renumber[r] == usize::MAX {
                renumber[r] = count;
                count += 1;
            }
        }
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !collapse.contains(i))
            .map(|(_, e)| Edge {
                origin: renumber[find(&mut parent, e.origin)],
                terminus: renumber[find(&mut parent, e.terminus)],
                symbol: e.symbol,
            })
            .collect();
        let basepoint = self.basepoint.map(|b| renumber[find(&mut parent, b)]);
        let mut g = LabeledGraph { ambient: self.ambient.clone(), vertex_count: count, edges, basepoint, tight: false };
        g.tight = g.compute_tight();
        Ok(g)
    }

    /// Free basis of the fundamental group at `base` from a breadth-first
    /// maximal tree. `avoid` keeps one edge out of the tree when possible.
    pub fn spanning_tree_basis(&self, base: usize, avoid: Option<usize>) -> Result<SpanningTreeBasis, GraphError> {
        if base >= self.vertex_count {
            return Err(GraphError::UnknownVertex(base));
        }
        let mut pred = self.bfs_paths(base, avoid);
        if avoid.is_some() && (0..self.vertex_count).any(|v| v != base && pred[v].is_none()) {
            pred = self.bfs_paths(base, None);
        }
        let mut in_tree = vec![false; self.edges.len()];
        for p in pred.iter().flatten() {
            in_tree[p.1.edge] = true;
        }
        let mut generators = Vec::new();
        let mut generator_edges = Vec::new();
        let mut generator_of_edge = vec![None; self.edges.len()];
        for (i, e) in self.edges.iter().enumerate() {
            if in_tree[i] {
                continue;
            }
            let mut codes = self.path_word(&pred, e.origin);
            codes.push(code(e.symbol, false));
            codes.extend(self.path_word(&pred, e.terminus).iter().rev().map(|c| c ^ 1));
            generator_of_edge[i] = Some(generators.len());
            generators.push(codes_word(&self.ambient, codes));
            generator_edges.push(i);
        }
        Ok(SpanningTreeBasis {
            graph: self.clone(),
            base,
            in_tree,
            generators,
            generator_edges,
            generator_of_edge,
            table: self.transitions(),
        })
    }

    /// Canonical relabeling: breadth-first from the basepoint, or the
    /// lexicographically least over all start vertices when unbased.
    pub fn canonical(&self, based: bool) -> LabeledGraph {
        self.canonical_map(based).0
    }

    /// Canonical form plus the maps old vertex → new vertex and
    /// old edge → new edge.
    pub fn canonical_map(&self, based: bool) -> (LabeledGraph, Vec<usize>, Vec<usize>) {
        if self.is_empty() {
            return (LabeledGraph::empty(&self.ambient), Vec::new(), Vec::new());
        }
        match (based, self.basepoint) {
            (true, Some(b)) => self.relabel_from(b, true),
            _ => (0..self.vertex_count)
                .map(|v| self.relabel_from(v, false))
                .min_by(|a, b| a.0.edges.cmp(&b.0.edges))
                .unwrap(),
        }
    }

    fn relabel_from(&self, start: usize, keep_base: bool) -> (LabeledGraph, Vec<usize>, Vec<usize>) {
        let hs = self.half_edges();
        let mut order = vec![usize::MAX; self.vertex_count];
        order[start] = 0;
        let mut next = 1;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for h in &hs[v] {
                if order[h.target] == usize::MAX {
                    order[h.target] = next;
                    next += 1;
                    queue.push_back(h.target);
                }
            }
        }
        let mut indexed: Vec<(Edge, usize)> = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| (Edge { origin: order[e.origin], terminus: order[e.terminus], symbol: e.symbol }, i))
            .collect();
        indexed.sort();
        let mut edge_map = vec![0; self.edges.len()];
        for (new, &(_, old)) in indexed.iter().enumerate() {
            edge_map[old] = new;
        }
        let edges = indexed.into_iter().map(|(e, _)| e).collect();
        let basepoint = if keep_base { Some(0) } else { None };
        let g = LabeledGraph { ambient: self.ambient.clone(), vertex_count: self.vertex_count, edges, basepoint, tight: self.tight };
        (g, order, edge_map)
    }

    /// Text dump of the canonical form.
    pub fn dump(&self, based: bool) -> String {
        let c = self.canonical(based);
        let mut out = match c.basepoint {
            Some(b) => format!("vertices {} basepoint {}\n", c.vertex_count, b),
            None => format!("vertices {} basepoint -\n", c.vertex_count),
        };
        for e in &c.edges {
            out.push_str(&format!("{} {} {}\n", e.origin, e.terminus, self.ambient.symbol(e.symbol)));
        }
        out
    }

    /// Equality up to label-preserving isomorphism.
    pub fn same_shape(&self, other: &LabeledGraph, based: bool) -> bool {
        self.ambient == other.ambient && self.canonical(based) == other.canonical(based)
    }
}

fn oriented_edge(from: usize, to: usize, c: usize) -> Edge {
    if c.is_multiple_of(2) {
        Edge { origin: from, terminus: to, symbol: c / 2 }
    } else {
        Edge { origin: to, terminus: from, symbol: c / 2 }
    }
}

impl fmt::Debug for LabeledGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LabeledGraph(v={}, base={:?}, edges=[", self.vertex_count, self.basepoint)?;
        for (i, e) in self.edges.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}-{}->{}", e.origin, self.ambient.symbol(e.symbol), e.terminus)?;
        }
        write!(f, "])")
    }
}

/// Generators of the fundamental group read from a maximal tree, and the
/// rewriting of subgroup elements in those generators.
#[derive(Debug, Clone)]
pub struct SpanningTreeBasis {
    graph: LabeledGraph,
    base: usize,
    in_tree: Vec<bool>,
    generators: Vec<Word>,
    generator_edges: Vec<usize>,
    generator_of_edge: Vec<Option<usize>>,
    table: Vec<Vec<Option<HalfEdge>>>,
}

impl SpanningTreeBasis {
    pub fn generators(&self) -> &[Word] {
        &self.generators
    }

    pub fn in_tree(&self, edge: usize) -> bool {
        self.in_tree[edge]
    }

    pub fn tree_edges(&self) -> BTreeSet<usize> {
        (0..self.in_tree.len()).filter(|&i| self.in_tree[i]).collect()
    }

    /// Edge carrying the i-th generator.
    pub fn generator_edge(&self, i: usize) -> usize {
        self.generator_edges[i]
    }

    pub fn generator_of_edge(&self, edge: usize) -> Option<usize> {
        self.generator_of_edge[edge]
    }

    /// Rewrites an ambient word in the generators, named by `names`.
    pub fn rewrite_in(&self, word: &Word, names: &Basis) -> Result<Word, GraphError> {
        let codes = word_codes(self.graph.ambient(), word)?;
        let mut at = self.base;
        let mut out = Vec::new();
        for c in codes {
            let h = self.table[at][c].ok_or_else(|| GraphError::NotInSubgroup(word.to_string()))?;
            if let Some(i) = self.generator_of_edge[h.edge] {
                out.push(names.letter(i, !h.forward));
            }
            at = h.target;
        }
        if at != self.base {
            return Err(GraphError::NotInSubgroup(word.to_string()));
        }
        Ok(Word::reduce(out))
    }

    /// Rewrites in the default names `x1, x2, ...`.
    pub fn rewrite(&self, word: &Word) -> Result<Word, GraphError> {
        self.rewrite_in(word, &Basis::numbered("x", self.generators.len()))
    }
}

/// Based graphs, one per subgroup, over one ambient basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSequence {
    pub ambient: Basis,
    pub components: Vec<LabeledGraph>,
    pub tags: Vec<String>,
}

impl GraphSequence {
    pub fn complexity(&self) -> usize {
        self.components.iter().map(LabeledGraph::edge_count).sum()
    }

    /// `α_#` applied componentwise (cores of tightened images). Checks that
    /// `α` is an automorphism.
    pub fn alpha_sharp(&self, alpha: &Endomorphism) -> Result<GraphSequence, GraphError> {
        if !is_isomorphism(alpha.images(), alpha.domain().len(), alpha.codomain())? {
            return Err(GraphError::NotAnAutomorphism);
        }
        self.alpha_sharp_unchecked(alpha)
    }

    pub fn alpha_sharp_unchecked(&self, alpha: &Endomorphism) -> Result<GraphSequence, GraphError> {
        let components = self
            .components
            .iter()
            .map(|c| alpha_sharp_graph(alpha, c))
            .collect::<Result<_, _>>()?;
        Ok(GraphSequence { ambient: alpha.codomain().clone(), components, tags: self.tags.clone() })
    }
}

/// `core(tight(α Σ))` for one component.
pub fn alpha_sharp_graph(alpha: &Endomorphism, g: &LabeledGraph) -> Result<LabeledGraph, GraphError> {
    if g.is_empty() {
        return Ok(LabeledGraph::empty(alpha.codomain()));
    }
    Ok(g.apply_auto(alpha)?.tighten().core())
}

/// Folded based graph of each generating set; rank-0 subgroups become the
/// empty marker.
pub fn stallings_representative(gens: &[Vec<Word>], ambient: &Basis) -> Result<GraphSequence, GraphError> {
    let mut components = Vec::with_capacity(gens.len());
    for g in gens {
        let folded = LabeledGraph::wedge_of_loops(g, ambient)?.tighten();
        components.push(if folded.rank() == 0 { LabeledGraph::empty(ambient) } else { folded });
    }
    let tags = (0..gens.len()).map(|i| i.to_string()).collect();
    Ok(GraphSequence { ambient: ambient.clone(), components, tags })
}

/// Injectivity of the map from a free group of rank `domain_rank` sending
/// its basis to `images`.
pub fn is_monomorphism(images: &[Word], domain_rank: usize, ambient: &Basis) -> Result<bool, GraphError> {
    if images.len() != domain_rank {
        return Ok(false);
    }
    let folded = LabeledGraph::wedge_of_loops(images, ambient)?.tighten();
    Ok(folded.rank() == domain_rank)
}

/// Bijectivity: injective and the folded image is the rose.
pub fn is_isomorphism(images: &[Word], domain_rank: usize, ambient: &Basis) -> Result<bool, GraphError> {
    if images.len() != domain_rank || domain_rank != ambient.len() {
        return Ok(false);
    }
    let folded = LabeledGraph::wedge_of_loops(images, ambient)?.tighten();
    Ok(folded.rank() == domain_rank && folded.vertex_count() == 1)
}

/// Letter for a code, for callers outside this module.
pub fn code_letter(basis: &Basis, c: usize) -> Letter {
    basis.letter(c / 2, c % 2 == 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(s: &str) -> Basis {
        Basis::parse(s).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn ws(items: &[&str]) -> Vec<Word> {
        items.iter().map(|s| w(s)).collect()
    }

    #[test]
    fn wedge_shapes() {
        let ab = basis("a,b");
        let g = LabeledGraph::wedge_of_loops(&ws(&["a"]), &ab).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 1));
        let g = LabeledGraph::wedge_of_loops(&[], &ab).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 0));
        let g = LabeledGraph::wedge_of_loops(&ws(&["a a b a^-1", "a b^-1 a b b a^-1"]), &ab).unwrap();
        assert_eq!(g.edge_count(), 10);
        assert_eq!(g.vertex_count(), 9);
        assert!(LabeledGraph::wedge_of_loops(&ws(&["c"]), &ab).is_err());
    }

    #[test]
    fn tighten_examples() {
        let ab = basis("a,b");
        let g = LabeledGraph::wedge_of_loops(&ws(&["a", "a"]), &ab).unwrap().tighten();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 1));
        // Hand fold of <a a b a^-1, a b^-1 a b b a^-1>: the four a-edges at the
        // basepoint merge, then three b-edges into their common end.
        let h = LabeledGraph::wedge_of_loops(&ws(&["a a b a^-1", "a b^-1 a b b a^-1"]), &ab).unwrap();
        let t = h.tighten();
        assert!(t.is_tight());
        assert_eq!(t.rank(), 2);
        assert_eq!((t.vertex_count(), t.edge_count()), (4, 5));
        assert_eq!(t.tighten(), t);
        assert!(t.contains(&w("a a b a^-1")).unwrap());
        assert!(t.contains(&w("a b^-1 a b b a^-1")).unwrap());
        assert!(!t.contains(&w("a")).unwrap());
    }

    #[test]
    fn tighten_label_only_folds_that_label() {
        let ab = basis("a,b");
        // Two a-edges and two b-edges out of vertex 0.
        let edges = vec![
            Edge { origin: 0, terminus: 1, symbol: 0 },
            Edge { origin: 0, terminus: 2, symbol: 0 },
            Edge { origin: 0, terminus: 3, symbol: 1 },
            Edge { origin: 0, terminus: 4, symbol: 1 },
        ];
        let g = LabeledGraph::from_parts(&ab, 5, edges, Some(0)).unwrap();
        let t = g.tighten_label(1);
        assert_eq!(t.edge_count(), 3);
        assert!(!t.is_tight());
        assert_eq!(t.tighten().edge_count(), 2);
        let loops = LabeledGraph::from_parts(
            &ab,
            1,
            vec![Edge { origin: 0, terminus: 0, symbol: 1 }, Edge { origin: 0, terminus: 0, symbol: 1 }],
            Some(0),
        )
        .unwrap();
        assert_eq!(loops.tighten_label(1).edge_count(), 1);
        assert_eq!(loops.tighten_label(0), loops);
    }

    #[test]
    fn core_and_conjugator() {
        let ab = basis("a,b");
        // basepoint -a-> 1 -b-> 2, loop a at 2
        let edges = vec![
            Edge { origin: 0, terminus: 1, symbol: 0 },
            Edge { origin: 1, terminus: 2, symbol: 1 },
            Edge { origin: 2, terminus: 2, symbol: 0 },
        ];
        let g = LabeledGraph::from_parts(&ab, 3, edges, Some(0)).unwrap();
        let (core, h) = g.core_with_conjugator(false);
        assert_eq!((core.vertex_count(), core.edge_count()), (1, 1));
        assert_eq!(h, w("b^-1 a^-1"));
        // [(core, *')] = h H h^-1
        let gen = w("a b a b^-1 a^-1");
        assert!(g.contains(&gen).unwrap());
        assert!(core.contains(&h.concat(&gen).concat(&h.inverse())).unwrap());

        let tree = LabeledGraph::wedge_of_loops(&ws(&["a a^-1"]), &ab).unwrap().tighten();
        let (c, h) = tree.core_with_conjugator(false);
        assert!(c.is_empty());
        assert!(h.is_identity());

        let rose = LabeledGraph::rose(&ab);
        let (c, h) = rose.core_with_conjugator(false);
        assert!(c.same_shape(&rose, false));
        assert!(h.is_identity());
    }

    #[test]
    fn apply_auto_examples() {
        let ab = basis("a,b");
        let loop_a = LabeledGraph::wedge_of_loops(&ws(&["a"]), &ab).unwrap();
        let alpha = Endomorphism::parse(&ab, &ab, "a -> a b").unwrap();
        let g = loop_a.apply_auto(&alpha).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert!(g.contains(&w("a b")).unwrap());
        let id = Endomorphism::identity(&ab);
        assert!(loop_a.apply_auto(&id).unwrap().same_shape(&loop_a, true));
        let beta = Endomorphism::parse(&ab, &ab, "b -> a b a^-1").unwrap();
        let edge_b = LabeledGraph::from_parts(&ab, 2, vec![Edge { origin: 0, terminus: 1, symbol: 1 }], Some(0)).unwrap();
        let path = edge_b.apply_auto(&beta).unwrap();
        assert_eq!(path.edge_count(), 3);
        assert_eq!(path.read(0, &w("a b a^-1")).unwrap(), Some(1));
        let kill = Endomorphism::parse(&ab, &ab, "a -> 1").unwrap();
        assert!(matches!(loop_a.apply_auto(&kill), Err(GraphError::EmptyImage(_))));
    }

    #[test]
    fn collapse_examples() {
        let ab = basis("a,b");
        let circle = LabeledGraph::wedge_of_loops(&ws(&["a b"]), &ab).unwrap();
        assert_eq!(circle.collapse_edges(&BTreeSet::new()).unwrap(), circle);
        let c = circle.collapse_edges(&BTreeSet::from([0])).unwrap();
        assert_eq!((c.vertex_count(), c.edge_count()), (1, 1));
        assert_eq!(c.edges()[0].symbol, 1);
        assert!(circle.collapse_edges(&BTreeSet::from([7])).is_err());

        let b12 = basis("b1,b2");
        let comp = LabeledGraph::wedge_of_loops(&ws(&["b1^2 b2^2", "b1^2 b2^2 b1^2"]), &b12).unwrap().tighten();
        let b2_edges: BTreeSet<usize> = (0..comp.edge_count()).filter(|&i| comp.edges()[i].symbol == 1).collect();
        let c = comp.collapse_edges(&b2_edges).unwrap();
        assert!(c.edges().iter().all(|e| e.symbol == 0));
        assert_eq!(c.edge_count(), 2);
    }

    #[test]
    fn alpha_sharp_examples() {
        let ab = basis("a,b");
        let seq = stallings_representative(&[ws(&["a b"])], &ab).unwrap();
        let core_seq = GraphSequence {
            ambient: ab.clone(),
            components: seq.components.iter().map(|c| c.core()).collect(),
            tags: seq.tags.clone(),
        };
        let id = Endomorphism::identity(&ab);
        assert_eq!(core_seq.alpha_sharp(&id).unwrap().components[0].canonical(false), core_seq.components[0].canonical(false));
        let alpha = Endomorphism::parse(&ab, &ab, "b -> a^-1 b").unwrap();
        let out = core_seq.alpha_sharp(&alpha).unwrap();
        assert_eq!(out.components[0].edge_count(), 1);
        assert_eq!(out.components[0].edges()[0].symbol, 1);
        let not_auto = Endomorphism::parse(&ab, &ab, "a -> a a").unwrap();
        assert!(matches!(core_seq.alpha_sharp(&not_auto), Err(GraphError::NotAnAutomorphism)));

        // a -> a b^-1 sends <a a b a^-1, a b^-1 a b b a^-1> to a smaller core.
        let h = stallings_representative(&[ws(&["a a b a^-1", "a b^-1 a b b a^-1"])], &ab).unwrap();
        let core_h = h.components[0].core();
        let gersten = Endomorphism::parse(&ab, &ab, "a -> a b^-1").unwrap();
        let image = alpha_sharp_graph(&gersten, &core_h).unwrap();
        assert_eq!(core_h.edge_count(), 4);
        assert_eq!(image.edge_count(), 3);
        assert_eq!(image.rank(), 2);
    }

    #[test]
    fn spanning_tree_examples() {
        let ab = basis("a,b");
        let rose = LabeledGraph::rose(&ab);
        let st = rose.spanning_tree_basis(0, None).unwrap();
        assert_eq!(st.generators(), ws(&["a", "b"]).as_slice());
        assert_eq!(st.rewrite(&w("a b")).unwrap(), w("x1 x2"));

        let circle = LabeledGraph::wedge_of_loops(&ws(&["a b"]), &ab).unwrap();
        let st = circle.spanning_tree_basis(0, None).unwrap();
        assert_eq!(st.generators(), ws(&["a b"]).as_slice());
        assert_eq!(st.rewrite(&w("a b")).unwrap(), w("x1"));
        assert!(matches!(st.rewrite(&w("a")), Err(GraphError::NotInSubgroup(_))));

        let b12 = basis("b1,b2");
        let comp = LabeledGraph::wedge_of_loops(&ws(&["b1^2 b2^2", "b1^2 b2^2 b1^2"]), &b12).unwrap().tighten();
        assert_eq!((comp.vertex_count(), comp.edge_count()), (3, 4));
        let st = comp.spanning_tree_basis(comp.basepoint().unwrap(), None).unwrap();
        assert_eq!(st.generators(), ws(&["b1^2", "b2^2"]).as_slice());
        assert_eq!(st.rewrite(&w("b1^2 b2^2")).unwrap(), w("x1 x2"));
        assert_eq!(st.rewrite(&w("b1^2 b2^2 b1^2")).unwrap(), w("x1 x2 x1"));
    }

    #[test]
    fn contains_examples() {
        let a = basis("a,b");
        let loop_a = LabeledGraph::wedge_of_loops(&ws(&["a"]), &a).unwrap();
        assert!(loop_a.contains(&w("a^3")).unwrap());
        assert!(!loop_a.contains(&w("b")).unwrap());
        let h = LabeledGraph::wedge_of_loops(&ws(&["a a b a^-1", "a b^-1 a b b a^-1"]), &a).unwrap().tighten();
        assert!(h.contains(&w("a a b a^-1")).unwrap());
    }

    #[test]
    fn mono_and_iso() {
        let ab = basis("a,b");
        assert!(is_monomorphism(&ws(&["a", "b"]), 2, &ab).unwrap());
        assert!(!is_monomorphism(&ws(&["a", "a"]), 2, &ab).unwrap());
        let b12 = basis("b1,b2");
        assert!(is_monomorphism(&ws(&["b1^2 b2^2", "b1^2 b2^2 b1^2"]), 2, &b12).unwrap());
        assert!(is_isomorphism(&ws(&["a", "b"]), 2, &ab).unwrap());
        assert!(!is_isomorphism(&ws(&["a^2"]), 1, &basis("a")).unwrap());
        assert!(is_isomorphism(&ws(&["a b^-1", "b"]), 2, &ab).unwrap());
    }

    #[test]
    fn stallings_sequences() {
        let ab = basis("a,b");
        let s = stallings_representative(&[ws(&["a"]), ws(&["b"])], &ab).unwrap();
        assert_eq!(s.complexity(), 2);
        let b12 = basis("b1,b2");
        let s = stallings_representative(&[ws(&["b1^2 b2^2", "b1^2 b2^2 b1^2"]), ws(&["b1"]), ws(&["b2"])], &b12).unwrap();
        let counts: Vec<usize> = s.components.iter().map(|c| c.edge_count()).collect();
        assert_eq!(counts, vec![4, 1, 1]);
        let s = stallings_representative(&[vec![]], &ab).unwrap();
        assert!(s.components[0].is_empty());
    }

    #[test]
    fn dump_format() {
        let ab = basis("a,b");
        let g = LabeledGraph::wedge_of_loops(&ws(&["a b"]), &ab).unwrap();
        assert_eq!(g.dump(true), "vertices 2 basepoint 0\n0 1 a\n1 0 b\n");
    }
}
