//! The decomposition driver: reduce, look for a visible simplification at
//! each vertex, change bases, apply the move, repeat; then read the free
//! product decomposition off the trivial edges.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::automorphism::invert_automorphism;
use crate::gersten::{detect_visible_unchecked, gersten_representative, GerstenConfig};
use crate::gog::{
    apply_conjugation, apply_move, make_good_bases, reduce, reduce_step, vertex_link, ConjugationData, EdgePair,
    GogError, GraphOfGroups, Move, MoveKind, TerminationMeasure, Violation,
};
use crate::word::{Basis, Endomorphism, Symbol, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecomposeError {
    #[error("invalid input: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidInput(Vec<Violation>),
    #[error(transparent)]
    Gog(#[from] GogError),
    #[error("step {step}: measure went from {before} to {after}")]
    MeasureViolation { step: usize, before: TerminationMeasure, after: TerminationMeasure },
    #[error("move cap of {0} reached")]
    MoveCap(usize),
    #[error("factor at `{0}` is a free group of rank at least two that no move split off")]
    UnabsorbedFreeFactor(String),
    #[error("relative mode needs {0}")]
    RelativePreconditionFailed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecomposeConfig {
    pub max_moves: usize,
    pub gersten: GerstenConfig,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        DecomposeConfig { max_moves: 1_000_000, gersten: GerstenConfig::default() }
    }
}

/// One applied move with the changes of basis that preceded it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LogEntry {
    pub step: usize,
    #[serde(rename = "move")]
    pub mv: Move,
    pub detection: Option<String>,
    pub detail: String,
    pub stages: Vec<ConjugationData>,
    pub before: TerminationMeasure,
    pub after: TerminationMeasure,
}

impl fmt::Display for LogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "STEP {} | MOVE {} | VERTEX {} | EDGE {} | measure {}→{}",
            self.step,
            self.mv.kind,
            self.mv.vertex,
            self.mv.edge.as_deref().unwrap_or("-"),
            self.before,
            self.after
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub graph: GraphOfGroups,
    /// Set on the factor containing the distinguished vertex in relative mode.
    pub flagged: bool,
}

/// Where a current vertex basis element came from: a word in the basis of
/// an input vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexOrigin {
    pub source: String,
    pub images: BTreeMap<Symbol, Word>,
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub free_rank: usize,
    pub factors: Vec<Factor>,
    pub log: Vec<LogEntry>,
    /// The graph of groups when no move applied any more.
    pub final_graph: GraphOfGroups,
    pub origins: BTreeMap<String, VertexOrigin>,
}

impl Decomposition {
    pub fn is_free(&self) -> bool {
        self.factors.is_empty()
    }

    /// The decomposition document; factors are plain graph-of-groups
    /// documents and `flagged_factor` indexes the one holding the
    /// distinguished vertex in relative mode.
    pub fn to_value(&self) -> serde_json::Value {
        let factors: Vec<serde_json::Value> = self.factors.iter().map(|f| f.graph.to_value()).collect();
        serde_json::json!({
            "free_rank": self.free_rank,
            "factors": factors,
            "flagged_factor": self.factors.iter().position(|f| f.flagged),
            "log": self.log,
        })
    }
}

fn initial_origins(g: &GraphOfGroups) -> BTreeMap<String, VertexOrigin> {
    g.vertices()
        .iter()
        .map(|(v, b)| {
            let images = b.symbols().iter().map(|s| (s.clone(), Word::symbol(s))).collect();
            (v.clone(), VertexOrigin { source: v.clone(), images })
        })
        .collect()
}

fn track_conjugation(
    origins: &mut BTreeMap<String, VertexOrigin>,
    g: &GraphOfGroups,
    c: &ConjugationData,
) -> Result<(), GogError> {
    for (v, psi) in &c.vertex_autos {
        let inverse = invert_automorphism(psi)?;
        let entry = origins.get_mut(v).ok_or_else(|| GogError::UnknownVertex(v.clone()))?;
        let basis = g.vertex_basis(v)?;
        let old: Vec<Word> = basis.symbols().iter().map(|s| entry.images[s].clone()).collect();
        let mut images = BTreeMap::new();
        for (s, w) in basis.symbols().iter().zip(inverse.images()) {
            let expr = Word::reduce(w.letters().iter().flat_map(|l| {
                let i = basis.index_of(&l.symbol).expect("letter of the vertex basis");
                let x = &old[i];
                if l.inverse {
                    x.inverse().letters().to_vec()
                } else {
                    x.letters().to_vec()
                }
            }));
            images.insert(s.clone(), expr);
        }
        entry.images = images;
    }
    Ok(())
}

fn track_move(
    origins: &BTreeMap<String, VertexOrigin>,
    mv: &Move,
    after: &GraphOfGroups,
) -> BTreeMap<String, VertexOrigin> {
    after
        .vertices()
        .iter()
        .filter_map(|(v, basis)| {
            let from = origins.get(v).or_else(|| origins.get(&mv.vertex))?;
            let images = basis
                .symbols()
                .iter()
                .filter_map(|s| from.images.get(s).map(|w| (s.clone(), w.clone())))
                .collect();
            Some((v.clone(), VertexOrigin { source: from.source.clone(), images }))
        })
        .collect()
}

struct Driver<'a> {
    config: &'a DecomposeConfig,
    protected: BTreeSet<String>,
    log: Vec<LogEntry>,
    origins: BTreeMap<String, VertexOrigin>,
}

impl Driver<'_> {
    fn record(
        &mut self,
        before_graph: &GraphOfGroups,
        after: GraphOfGroups,
        mv: Move,
        detection: Option<String>,
        detail: String,
        stages: Vec<ConjugationData>,
    ) -> Result<GraphOfGroups, DecomposeError> {
        let step = self.log.len() + 1;
        if step > self.config.max_moves {
            return Err(DecomposeError::MoveCap(self.config.max_moves));
        }
        let before = before_graph.measure();
        let after_measure = after.measure();
        if after_measure >= before {
            return Err(DecomposeError::MeasureViolation { step, before, after: after_measure });
        }
        let mut staged = before_graph.clone();
        for c in &stages {
            track_conjugation(&mut self.origins, &staged, c)?;
            staged = apply_conjugation(&staged, c)?;
        }
        self.origins = track_move(&self.origins, &mv, &after);
        self.log.push(LogEntry { step, mv, detection, detail, stages, before, after: after_measure });
        Ok(after)
    }

    fn run(&mut self, g: &GraphOfGroups) -> Result<GraphOfGroups, DecomposeError> {
        let mut current = g.clone();
        loop {
            if let Some((mv, next)) = reduce_step(&current, &self.protected)? {
                current = self.record(&current, next, mv, None, String::new(), Vec::new())?;
                continue;
            }
            let Some((v, vs, alpha)) = self.find_simplification(&current)? else {
                return Ok(current);
            };
            let good = make_good_bases(&current, &v, &vs, &alpha)?;
            let (next, detail) = apply_move(&good.graph, &good.next)?;
            current = self.record(&current, next, good.next, Some(vs.to_string()), detail, good.stages)?;
        }
    }

    fn find_simplification(
        &self,
        g: &GraphOfGroups,
    ) -> Result<Option<(String, crate::gersten::VisibleSimplification, Endomorphism)>, DecomposeError> {
        for v in g.vertices().keys() {
            let link = vertex_link(g, v)?;
            let rep = gersten_representative(&link.sequence, &self.config.gersten).map_err(GogError::from)?;
            if let Some(vs) = detect_visible_unchecked(&rep.sequence, &self.protected) {
                return Ok(Some((v.clone(), vs, rep.automorphism)));
            }
        }
        Ok(None)
    }
}

/// Components of the graph with trivial-group edges removed, each as its
/// own graph of groups, ordered by least vertex id.
fn split_at_trivial_edges(g: &GraphOfGroups) -> (usize, Vec<GraphOfGroups>) {
    let names: Vec<&String> = g.vertices().keys().collect();
    let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let mut parent: Vec<usize> = (0..names.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut trivial = 0;
    for e in g.edges() {
        if e.basis.is_empty() {
            trivial += 1;
            continue;
        }
        let (a, b) = (find(&mut parent, index[e.origin.as_str()]), find(&mut parent, index[e.terminus.as_str()]));
        parent[a.max(b)] = a.min(b);
    }
    let mut groups: BTreeMap<usize, (BTreeMap<String, Basis>, Vec<EdgePair>)> = BTreeMap::new();
    for (i, v) in names.iter().enumerate() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().0.insert((*v).clone(), g.vertices()[*v].clone());
    }
    for e in g.edges().iter().filter(|e| !e.basis.is_empty()) {
        let r = find(&mut parent, index[e.origin.as_str()]);
        groups.get_mut(&r).expect("component exists").1.push(e.clone());
    }
    let free = trivial + 1 - groups.len();
    (free, groups.into_values().map(|(v, e)| GraphOfGroups::new(v, e)).collect())
}

fn extract(
    g: &GraphOfGroups,
    flagged_vertex: Option<&str>,
    protected: &BTreeSet<String>,
) -> Result<(usize, Vec<Factor>), DecomposeError> {
    let (mut free_rank, parts) = split_at_trivial_edges(g);
    let mut factors = Vec::new();
    for part in parts {
        let flagged = flagged_vertex.is_some_and(|v| part.vertices().contains_key(v));
        let (part, _) = reduce(&part, protected)?;
        if !flagged && part.edges().is_empty() && part.vertices().len() == 1 {
            let (v, basis) = part.vertices().iter().next().expect("one vertex");
            match basis.len() {
                0 => continue,
                1 => {
                    free_rank += 1;
                    continue;
                }
                _ => return Err(DecomposeError::UnabsorbedFreeFactor(v.clone())),
            }
        }
        factors.push(Factor { graph: part, flagged });
    }
    Ok((free_rank, factors))
}

fn check_input(g: &GraphOfGroups) -> Result<(), DecomposeError> {
    let violations = g.validate();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(DecomposeError::InvalidInput(violations))
    }
}

/// Free rank and freely indecomposable non-free factors of `π1(g)`.
pub fn decompose(g: &GraphOfGroups, config: &DecomposeConfig) -> Result<Decomposition, DecomposeError> {
    check_input(g)?;
    let mut driver = Driver { config, protected: BTreeSet::new(), log: Vec::new(), origins: initial_origins(g) };
    let final_graph = driver.run(g)?;
    let (free_rank, factors) = extract(&final_graph, None, &driver.protected)?;
    Ok(Decomposition { free_rank, factors, log: driver.log, final_graph, origins: driver.origins })
}

/// The free rank when `π1(g)` is free.
pub fn is_free(g: &GraphOfGroups, config: &DecomposeConfig) -> Result<Option<usize>, DecomposeError> {
    let d = decompose(g, config)?;
    Ok(d.is_free().then_some(d.free_rank))
}

/// Decomposition relative to the vertex group at `v0`, which must have
/// valence one with its edge `e0` bonding isomorphically. The edge `e0` is
/// never reduced and never chosen as the special edge of a move; the
/// factor containing `v0` is flagged.
pub fn relative_decompose(
    g: &GraphOfGroups,
    v0: &str,
    e0: &str,
    config: &DecomposeConfig,
) -> Result<Decomposition, DecomposeError> {
    check_input(g)?;
    let fail = |m: String| DecomposeError::RelativePreconditionFailed(m);
    g.vertex_basis(v0).map_err(|_| fail(format!("vertex `{v0}` to exist")))?;
    let o = g.find_edge(e0).map_err(|_| fail(format!("edge `{e0}` to exist")))?;
    let o = if g.origin(o) == v0 { o } else { o.reverse() };
    if g.origin(o) != v0 {
        return Err(fail(format!("edge `{e0}` to end at `{v0}`")));
    }
    if g.valence(v0) != 1 {
        return Err(fail(format!("`{v0}` to have valence one")));
    }
    let iso = crate::stallings::is_isomorphism(g.words(o), g.edge_basis(o).len(), g.vertex_basis(v0)?)
        .map_err(GogError::from)?;
    if !iso {
        return Err(fail(format!("the bonding of `{e0}` at `{v0}` to be an isomorphism")));
    }
    let protected: BTreeSet<String> = [g.edge_id(o).to_string(), g.edge_id(o.reverse()).to_string()].into();
    let mut driver = Driver { config, protected, log: Vec::new(), origins: initial_origins(g) };
    let final_graph = driver.run(g)?;
    let (free_rank, factors) = extract(&final_graph, Some(v0), &driver.protected)?;
    Ok(Decomposition { free_rank, factors, log: driver.log, final_graph, origins: driver.origins })
}

/// Re-applies a log to its input.
pub fn replay(g: &GraphOfGroups, log: &[LogEntry]) -> Result<GraphOfGroups, GogError> {
    let mut current = g.clone();
    for entry in log {
        for c in &entry.stages {
            current = apply_conjugation(&current, c)?;
        }
        current = apply_move(&current, &entry.mv)?.0;
    }
    Ok(current)
}

/// Whether a log entry is one of the reducing moves.
pub fn is_reduction(entry: &LogEntry) -> bool {
    matches!(entry.mv.kind, MoveKind::Prune | MoveKind::Splice)
}
