//! Elementary Whitehead automorphisms, extended permutations, and the
//! fold-based factorization and inversion of automorphisms.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::stallings::{is_isomorphism, GraphError};
use crate::word::{Basis, Endomorphism, Letter, Symbol, Word, WordError};

/// `(b, A)`: `c ↦ bc` for `c ∈ A \ A⁻¹`, `c ↦ bcb⁻¹` for `c ∈ A ∩ A⁻¹`,
/// identity otherwise.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WhiteheadAuto {
    basis: Basis,
    multiplier: Letter,
    turned: BTreeSet<Letter>,
}

impl WhiteheadAuto {
    pub fn new(basis: &Basis, multiplier: Letter, turned: BTreeSet<Letter>) -> Result<Self, WordError> {
        for l in std::iter::once(&multiplier).chain(turned.iter()) {
            if !basis.contains(&l.symbol) {
                return Err(WordError::NotInBasis { symbol: l.symbol.to_string(), basis: basis.to_string() });
            }
        }
        if turned.iter().any(|l| l.symbol == multiplier.symbol) {
            return Err(WordError::InvalidToken(format!("turned set contains multiplier {multiplier}")));
        }
        Ok(WhiteheadAuto { basis: basis.clone(), multiplier, turned })
    }

    pub fn multiplier(&self) -> &Letter {
        &self.multiplier
    }

    pub fn turned(&self) -> &BTreeSet<Letter> {
        &self.turned
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn inverse(&self) -> WhiteheadAuto {
        WhiteheadAuto { basis: self.basis.clone(), multiplier: self.multiplier.inverse(), turned: self.turned.clone() }
    }

    pub fn as_endomorphism(&self) -> Endomorphism {
        let b = Word::letter(self.multiplier.clone());
        let images = self
            .basis
            .symbols()
            .iter()
            .map(|s| {
                let c = Word::symbol(s);
                let pos = self.turned.contains(&Letter::new(s.clone(), false));
                let neg = self.turned.contains(&Letter::new(s.clone(), true));
                match (pos, neg) {
                    (true, true) => b.conjugate(&c),
                    (true, false) => b.concat(&c),
                    (false, true) => c.concat(&b.inverse()),
                    (false, false) => c,
                }
            })
            .collect();
        Endomorphism::new(self.basis.clone(), self.basis.clone(), images).expect("images lie over the basis")
    }
}

impl fmt::Display for WhiteheadAuto {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let turned: Vec<String> = self.turned.iter().map(|l| l.to_string()).collect();
        write!(f, "({}, {{{}}})", self.multiplier, turned.join(", "))
    }
}

impl fmt::Debug for WhiteheadAuto {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A signed bijection from one basis onto the letters of another of the
/// same size.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExtendedPermutation {
    domain: Basis,
    codomain: Basis,
    images: Vec<Letter>,
}

impl ExtendedPermutation {
    pub fn new(domain: &Basis, codomain: &Basis, images: Vec<Letter>) -> Result<Self, WordError> {
        if images.len() != domain.len() || domain.len() != codomain.len() {
            return Err(WordError::ImageCount { expected: domain.len(), found: images.len() });
        }
        let mut hit = BTreeSet::new();
        for l in &images {
            if !codomain.contains(&l.symbol) {
                return Err(WordError::NotInBasis { symbol: l.symbol.to_string(), basis: codomain.to_string() });
            }
            if !hit.insert(l.symbol.clone()) {
                return Err(WordError::DuplicateSymbol(l.symbol.to_string()));
            }
        }
        Ok(ExtendedPermutation { domain: domain.clone(), codomain: codomain.clone(), images })
    }

    pub fn images(&self) -> &[Letter] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.domain == self.codomain
            && self.images.iter().zip(self.domain.symbols()).all(|(l, s)| !l.inverse && &l.symbol == s)
    }

    pub fn inverse(&self) -> ExtendedPermutation {
        let mut images = vec![None; self.codomain.len()];
        for (s, l) in self.domain.symbols().iter().zip(&self.images) {
            let i = self.codomain.index_of(&l.symbol).unwrap();
            images[i] = Some(Letter::new(s.clone(), l.inverse));
        }
        ExtendedPermutation {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            images: images.into_iter().map(Option::unwrap).collect(),
        }
    }

    pub fn as_endomorphism(&self) -> Endomorphism {
        let images = self.images.iter().cloned().map(Word::letter).collect();
        Endomorphism::new(self.domain.clone(), self.codomain.clone(), images).expect("images lie over the codomain")
    }
}

impl fmt::Debug for ExtendedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.domain.symbols().iter().zip(&self.images).map(|(s, l)| format!("{s}↦{l}")).collect();
        write!(f, "perm[{}]", parts.join(", "))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum ElementaryAuto {
    Whitehead(WhiteheadAuto),
    Permutation(ExtendedPermutation),
}

impl ElementaryAuto {
    pub fn as_endomorphism(&self) -> Endomorphism {
        match self {
            ElementaryAuto::Whitehead(w) => w.as_endomorphism(),
            ElementaryAuto::Permutation(p) => p.as_endomorphism(),
        }
    }

    pub fn inverse(&self) -> ElementaryAuto {
        match self {
            ElementaryAuto::Whitehead(w) => ElementaryAuto::Whitehead(w.inverse()),
            ElementaryAuto::Permutation(p) => ElementaryAuto::Permutation(p.inverse()),
        }
    }
}

impl fmt::Display for ElementaryAuto {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementaryAuto::Whitehead(w) => write!(f, "{w}"),
            ElementaryAuto::Permutation(p) => write!(f, "{p:?}"),
        }
    }
}

/// Every non-trivial elementary Whitehead automorphism of `basis`:
/// multipliers in basis order then their inverses; turned sets by a binary
/// counter over the remaining letters listed as `x, x^-1` pairs in basis order.
pub fn whitehead_autos(basis: &Basis) -> impl Iterator<Item = WhiteheadAuto> + '_ {
    let multipliers: Vec<Letter> = (0..basis.len())
        .map(|i| basis.letter(i, false))
        .chain((0..basis.len()).map(|i| basis.letter(i, true)))
        .collect();
    multipliers.into_iter().flat_map(move |b| {
        let others: Vec<Letter> = basis.letters().filter(|l| l.symbol != b.symbol).collect();
        let count: u64 = 1 << others.len();
        (1..count).map(move |mask| {
            let turned = others.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, l)| l.clone()).collect();
            WhiteheadAuto { basis: basis.clone(), multiplier: b.clone(), turned }
        })
    })
}

/// Composes factors left to right: `f1 ∘ f2 ∘ … ∘ fk`.
pub fn compose_all(factors: &[ElementaryAuto], domain: &Basis) -> Result<Endomorphism, WordError> {
    let mut acc: Option<Endomorphism> = None;
    for f in factors.iter().rev() {
        let e = f.as_endomorphism();
        acc = Some(match acc {
            None => e,
            Some(inner) => e.compose(&inner)?,
        });
    }
    Ok(acc.unwrap_or_else(|| Endomorphism::identity(domain)))
}

pub fn is_automorphism(alpha: &Endomorphism) -> bool {
    is_isomorphism(alpha.images(), alpha.domain().len(), alpha.codomain()).unwrap_or(false)
}

/// Factors an automorphism into elementary ones, `α = f1 ∘ … ∘ fk`, read off
/// from the folds that tighten the subdivided rose of `α` to the rose.
pub fn factor_automorphism(alpha: &Endomorphism) -> Result<Vec<ElementaryAuto>, GraphError> {
    if !is_automorphism(alpha) {
        return Err(GraphError::NotAnAutomorphism);
    }
    if alpha.is_identity() {
        return Ok(Vec::new());
    }
    let mut state = FoldState::new(alpha)?;
    let mut steps: Vec<Vec<WhiteheadAuto>> = Vec::new();
    while let Some(fold) = state.next_fold() {
        let (e1, e2) = (fold.keep, fold.drop);
        let loop1 = state.is_loop(e1);
        let loop2 = state.is_loop(e2);
        if state.other_end(e1, fold.at) == state.other_end(e2, fold.at) {
            return Err(GraphError::NotAnAutomorphism);
        }
        if loop1 || loop2 {
            let (lp, arc) = if loop1 { (e1, e2) } else { (e2, e1) };
            if !state.in_tree(arc) {
                steps.push(state.swap_into_tree(arc, &[arc])?);
            }
            steps.push(state.fold(fold.at, lp, arc)?);
        } else {
            for e in [e1, e2] {
                if !state.in_tree(e) {
                    steps.push(state.swap_into_tree(e, &[e1, e2])?);
                }
            }
            steps.push(state.fold(fold.at, e1, e2)?);
        }
    }
    let perm = state.final_permutation(alpha.codomain())?;
    let mut factors = Vec::new();
    if !perm.is_identity() {
        factors.push(ElementaryAuto::Permutation(perm));
    }
    for step in steps.into_iter().rev() {
        factors.extend(step.into_iter().map(ElementaryAuto::Whitehead));
    }
    let check = compose_all(&factors, alpha.domain())?;
    if &check != alpha {
        return Err(GraphError::NotAnAutomorphism);
    }
    Ok(factors)
}

/// Inverse of an automorphism, via its factorization; checked both ways.
pub fn invert_automorphism(alpha: &Endomorphism) -> Result<Endomorphism, GraphError> {
    let factors = factor_automorphism(alpha)?;
    let inverse_factors: Vec<ElementaryAuto> = factors.iter().rev().map(ElementaryAuto::inverse).collect();
    let inverse = compose_all(&inverse_factors, alpha.codomain())?;
    let left = alpha.compose(&inverse)?;
    let right = inverse.compose(alpha)?;
    if !left.is_identity() || !right.is_identity() {
        return Err(GraphError::NotAnAutomorphism);
    }
    Ok(inverse)
}

#[derive(Clone, Copy, Debug)]
struct FEdge {
    origin: usize,
    terminus: usize,
    code: usize,
}

struct Fold {
    at: usize,
    keep: usize,
    drop: usize,
}

/// Marked graph during factorization. Slot `i` is the domain generator `a_i`,
/// realised by a non-tree edge traversed in the recorded direction.
struct FoldState {
    domain: Basis,
    edges: Vec<Option<FEdge>>,
    tree: Vec<bool>,
    slots: Vec<(usize, bool)>,
}

type Path = Vec<(usize, bool)>;

impl FoldState {
    fn new(alpha: &Endomorphism) -> Result<Self, GraphError> {
        let target = alpha.codomain();
        let mut vertex_count = 1;
        let mut edges = Vec::new();
        let mut tree = Vec::new();
        let mut slots = Vec::new();
        for img in alpha.images() {
            let codes = crate::stallings::word_codes(target, img)?;
            let mut prev = 0;
            for (i, &c) in codes.iter().enumerate() {
                let last = i + 1 == codes.len();
                let next = if last {
                    0
                } else {
                    vertex_count += 1;
                    vertex_count - 1
                };
                let e = if c % 2 == 0 {
                    FEdge { origin: prev, terminus: next, code: c }
                } else {
                    FEdge { origin: next, terminus: prev, code: c ^ 1 }
                };
                edges.push(Some(e));
                tree.push(!last);
                if last {
                    slots.push((edges.len() - 1, c % 2 == 0));
                }
                prev = next;
            }
        }
        Ok(FoldState { domain: alpha.domain().clone(), edges, tree, slots })
    }

    fn edge(&self, e: usize) -> FEdge {
        self.edges[e].expect("live edge")
    }

    fn is_loop(&self, e: usize) -> bool {
        let x = self.edge(e);
        x.origin == x.terminus
    }

    fn in_tree(&self, e: usize) -> bool {
        self.tree[e]
    }

    fn other_end(&self, e: usize, at: usize) -> usize {
        let x = self.edge(e);
        if x.origin == at {
            x.terminus
        } else {
            x.origin
        }
    }

    /// Lowest pair (by edge id) of half-edges with one label at one vertex.
    fn next_fold(&self) -> Option<Fold> {
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, e) in self.edges.iter().enumerate() {
            let Some(e) = e else { continue };
            for (v, c) in [(e.origin, e.code), (e.terminus, e.code ^ 1)] {
                if let Some(&j) = seen.get(&(v, c)) {
                    if j != i && best.is_none_or(|(_, a, b)| (j, i) < (a, b)) {
                        best = Some((v, j, i));
                    }
                } else {
                    seen.insert((v, c), i);
                }
            }
        }
        best.map(|(at, keep, drop)| Fold { at, keep, drop })
    }

    /// Tree path (as traversals) from vertex 0 to every vertex.
    fn tree_paths(&self) -> HashMap<usize, Path> {
        let mut adj: HashMap<usize, Vec<(usize, bool, usize)>> = HashMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            if let (Some(e), true) = (e, self.tree[i]) {
                adj.entry(e.origin).or_default().push((i, true, e.terminus));
                adj.entry(e.terminus).or_default().push((i, false, e.origin));
            }
        }
        let mut paths = HashMap::from([(0usize, Vec::new())]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            let base = paths[&v].clone();
            for &(e, fwd, w) in adj.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
                if let std::collections::hash_map::Entry::Vacant(slot) = paths.entry(w) {
                    let mut p = base.clone();
                    p.push((e, fwd));
                    slot.insert(p);
                    queue.push_back(w);
                }
            }
        }
        paths
    }

    fn generator_loops(&self) -> Vec<Path> {
        let paths = self.tree_paths();
        self.slots
            .iter()
            .map(|&(e, fwd)| {
                let x = self.edge(e);
                let (from, to) = if fwd { (x.origin, x.terminus) } else { (x.terminus, x.origin) };
                let mut p = paths[&from].clone();
                p.push((e, fwd));
                p.extend(paths[&to].iter().rev().map(|&(e, f)| (e, !f)));
                p
            })
            .collect()
    }

    /// Expresses a closed path at 0 in the current slot generators.
    fn rewrite(&self, path: &Path) -> Word {
        let mut slot_of: HashMap<usize, (usize, bool)> = HashMap::new();
        for (i, &(e, fwd)) in self.slots.iter().enumerate() {
            slot_of.insert(e, (i, fwd));
        }
        Word::reduce(path.iter().filter_map(|&(e, fwd)| {
            slot_of.get(&e).map(|&(i, dir)| self.domain.letter(i, fwd != dir))
        }))
    }

    /// Change of marking between the old loops (mapped through `edge_map`)
    /// and the new slots, factored as at most two Whitehead automorphisms.
    fn step_factors(&self, old_loops: Vec<Path>) -> Result<Vec<WhiteheadAuto>, GraphError> {
        let images: Vec<Word> = old_loops.iter().map(|p| self.rewrite(p)).collect();
        whitehead_pair(&self.domain, &images)
    }

    /// Puts a non-tree edge into the tree, removing another edge of its cycle.
    fn swap_into_tree(&mut self, e: usize, protect: &[usize]) -> Result<Vec<WhiteheadAuto>, GraphError> {
        let old_loops = self.generator_loops();
        let x = self.edge(e);
        let paths = self.tree_paths();
        let (p, q) = (&paths[&x.origin], &paths[&x.terminus]);
        let common = p.iter().zip(q.iter()).take_while(|(a, b)| a == b).count();
        let cycle: Vec<usize> = p[common..].iter().chain(q[common..].iter()).map(|&(e, _)| e).collect();
        let out = *cycle.iter().find(|c| !protect.contains(c)).ok_or(GraphError::NotAnAutomorphism)?;
        let slot = self.slots.iter().position(|&(s, _)| s == e).expect("non-tree edge has a slot");
        self.tree[e] = true;
        self.tree[out] = false;
        // Orient the new slot so that the old generator maps to itself.
        self.slots[slot] = (out, true);
        let probe = self.rewrite(&old_loops[slot]);
        if probe.letters().first().is_some_and(|l| l.inverse) {
            self.slots[slot].1 = false;
        }
        self.step_factors(old_loops)
    }

    /// Identifies `drop` with `keep`; both leave `at` with one label.
    fn fold(&mut self, at: usize, keep: usize, drop: usize) -> Result<Vec<WhiteheadAuto>, GraphError> {
        let old_loops = self.generator_loops();
        let k = self.edge(keep);
        let d = self.edge(drop);
        let leaves = |x: FEdge, code: usize| -> bool {
            // true if the forward traversal of x leaves `at` reading `code`
            x.origin == at && x.code == code
        };
        let label = if d.origin == at { d.code } else { d.code ^ 1 };
        let d_forward_leaves = d.origin == at && d.code == label;
        let k_forward_leaves = leaves(k, label);
        // forward traversal of drop corresponds to keep traversed in `same`
        let same = d_forward_leaves == k_forward_leaves;
        let mut merged_from = self.other_end(drop, at);
        let mut merged_into = self.other_end(keep, at);
        if merged_from == 0 {
            // vertex 0 stays the basepoint
            std::mem::swap(&mut merged_from, &mut merged_into);
        }
        self.edges[drop] = None;
        self.tree[drop] = false;
        for e in self.edges.iter_mut().flatten() {
            if e.origin == merged_from {
                e.origin = merged_into;
            }
            if e.terminus == merged_from {
                e.terminus = merged_into;
            }
        }
        let mapped: Vec<Path> = old_loops
            .into_iter()
            .map(|p| p.into_iter().map(|(e, f)| if e == drop { (keep, if same { f } else { !f }) } else { (e, f) }).collect())
            .collect();
        self.step_factors(mapped)
    }

    fn final_permutation(&self, codomain: &Basis) -> Result<ExtendedPermutation, GraphError> {
        if self.edges.iter().flatten().any(|e| e.origin != 0 || e.terminus != 0) {
            return Err(GraphError::NotAnAutomorphism);
        }
        let images = self
            .slots
            .iter()
            .map(|&(e, fwd)| {
                let c = self.edge(e).code;
                codomain.letter(c / 2, !fwd)
            })
            .collect();
        ExtendedPermutation::new(&self.domain, codomain, images).map_err(|_| GraphError::NotAnAutomorphism)
    }
}

/// Factors `a_j ↦ a_i^p a_j a_i^q` (with `a_i` fixed, `|p|, |q| ≤ 1`) as
/// `W+ ∘ W-`, dropping trivial factors.
fn whitehead_pair(basis: &Basis, images: &[Word]) -> Result<Vec<WhiteheadAuto>, GraphError> {
    let moved: Vec<usize> = (0..images.len()).filter(|&j| images[j] != Word::symbol(basis.symbol(j))).collect();
    if moved.is_empty() {
        return Ok(Vec::new());
    }
    let fixed_ok = |i: usize| images[i] == Word::symbol(basis.symbol(i));
    for i in 0..basis.len() {
        if !fixed_ok(i) {
            continue;
        }
        let ai = Word::symbol(basis.symbol(i));
        let mut plus = BTreeSet::new();
        let mut minus = BTreeSet::new();
        let mut ok = true;
        for &j in &moved {
            let aj = Word::symbol(basis.symbol(j));
            let mut found = false;
            'search: for p in -1i64..=1 {
                for q in -1i64..=1 {
                    if ai.pow(p).concat(&aj).concat(&ai.pow(q)) == images[j] {
                        let s = basis.symbol(j).clone();
                        match p {
                            1 => {
                                plus.insert(Letter::new(s.clone(), false));
                            }
                            -1 => {
                                minus.insert(Letter::new(s.clone(), false));
                            }
                            _ => {}
                        }
                        match q {
                            -1 => {
                                plus.insert(Letter::new(s, true));
                            }
                            1 => {
                                minus.insert(Letter::new(s, true));
                            }
                            _ => {}
                        }
                        found = true;
                        break 'search;
                    }
                }
            }
            if !found {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        let mut out = Vec::new();
        let sym: Symbol = basis.symbol(i).clone();
        if !plus.is_empty() {
            out.push(WhiteheadAuto { basis: basis.clone(), multiplier: Letter::new(sym.clone(), false), turned: plus });
        }
        if !minus.is_empty() {
            out.push(WhiteheadAuto { basis: basis.clone(), multiplier: Letter::new(sym, true), turned: minus });
        }
        let factors: Vec<ElementaryAuto> = out.iter().cloned().map(ElementaryAuto::Whitehead).collect();
        let check = compose_all(&factors, basis)?;
        if check.images() == images {
            return Ok(out);
        }
    }
    Err(GraphError::NotAnAutomorphism)
}
