//! Finite presentations of fundamental groups of graphs of groups and
//! their abelianizations, used as an independent invariant.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::gog::GraphOfGroups;
use crate::word::Word;

/// Generators by name; relators as lists of `(generator, ±1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relators: Vec<Vec<(usize, i8)>>,
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self
            .relators
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&(g, e)| if e < 0 { format!("{}^-1", self.generators[g]) } else { self.generators[g].clone() })
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        write!(f, "< {} | {} >", self.generators.join(", "), rels.join(", "))
    }
}

/// Rank of the free part and the invariant factors greater than one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Abelianization {
    pub betti: usize,
    pub torsion: Vec<u128>,
}

impl fmt::Display for Abelianization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.betti > 0 {
            parts.push(format!("Z^{}", self.betti));
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// Vertex generators `v.s`, one stable letter `t.e` per edge pair outside a
/// breadth-first spanning tree from the least vertex, and relators
/// `t · w_{e,b} · t^-1 · w_{e^-1,b}^-1`.
pub fn presentation(g: &GraphOfGroups) -> Presentation {
    let mut generators = Vec::new();
    let mut index: BTreeMap<(String, String), usize> = BTreeMap::new();
    for (v, basis) in g.vertices() {
        for s in basis.symbols() {
            index.insert((v.clone(), s.to_string()), generators.len());
            generators.push(format!("{v}.{s}"));
        }
    }
    let tree = spanning_pairs(g);
    let mut stable = BTreeMap::new();
    for (i, e) in g.edges().iter().enumerate() {
        if !tree.contains(&i) {
            stable.insert(i, generators.len());
            generators.push(format!("t.{}", e.id));
        }
    }
    let lift = |v: &str, w: &Word| -> Vec<(usize, i8)> {
        w.letters()
            .iter()
            .map(|l| (index[&(v.to_string(), l.symbol.to_string())], if l.inverse { -1 } else { 1 }))
            .collect()
    };
    let mut relators = Vec::new();
    for (i, e) in g.edges().iter().enumerate() {
        for (fw, bw) in e.forward.iter().zip(&e.backward) {
            let mut r = Vec::new();
            let t = stable.get(&i).copied();
            if let Some(t) = t {
                r.push((t, 1));
            }
            r.extend(lift(&e.origin, fw));
            if let Some(t) = t {
                r.push((t, -1));
            }
            r.extend(lift(&e.terminus, bw).into_iter().rev().map(|(g, s)| (g, -s)));
            relators.push(free_reduce(r));
        }
    }
    Presentation { generators, relators }
}

fn free_reduce(r: Vec<(usize, i8)>) -> Vec<(usize, i8)> {
    let mut out: Vec<(usize, i8)> = Vec::with_capacity(r.len());
    for x in r {
        match out.last() {
            Some(&(g, s)) if g == x.0 && s == -x.1 => {
                out.pop();
            }
            _ => out.push(x),
        }
    }
    out
}

fn spanning_pairs(g: &GraphOfGroups) -> BTreeSet<usize> {
    let mut tree = BTreeSet::new();
    let Some(root) = g.vertices().keys().next() else {
        return tree;
    };
    let mut seen = BTreeSet::from([root.clone()]);
    let mut queue = VecDeque::from([root.clone()]);
    while let Some(v) = queue.pop_front() {
        for (i, e) in g.edges().iter().enumerate() {
            for (a, b) in [(&e.origin, &e.terminus), (&e.terminus, &e.origin)] {
                if *a == v && !seen.contains(b) {
                    seen.insert(b.clone());
                    tree.insert(i);
                    queue.push_back(b.clone());
                }
            }
        }
    }
    tree
}

/// Exponent-sum matrix of the relators, one row per relator.
pub fn relation_matrix(p: &Presentation) -> Vec<Vec<i128>> {
    p.relators
        .iter()
        .map(|r| {
            let mut row = vec![0i128; p.generators.len()];
            for &(g, s) in r {
                row[g] += i128::from(s);
            }
            row
        })
        .collect()
}

/// Diagonal of a Smith normal form of an integer matrix (nonzero entries,
/// each dividing the next).
pub fn smith_diagonal(mut m: Vec<Vec<i128>>) -> Vec<u128> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows && t < cols {
        let Some((pr, pc)) = min_entry(&m, t) else { break };
        m.swap(t, pr);
        for row in m.iter_mut() {
            row.swap(t, pc);
        }
        loop {
            let p = m[t][t];
            let mut clean = true;
            for i in t + 1..rows {
                let q = m[i][t] / p;
                if q != 0 {
                    for j in t..cols {
                        m[i][j] -= q * m[t][j];
                    }
                }
                if m[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                let q = m[t][j] / p;
                if q != 0 {
                    for row in m.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                }
                if m[t][j] != 0 {
                    clean = false;
                }
            }
            if clean {
                break;
            }
            let (pr, pc) = min_entry_cross(&m, t);
            m.swap(t, pr);
            for row in m.iter_mut() {
                row.swap(t, pc);
            }
        }
        diag.push(m[t][t].unsigned_abs());
        t += 1;
    }
    normalize_divisors(diag)
}

fn min_entry(m: &[Vec<i128>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(u128, usize, usize)> = None;
    for (i, row) in m.iter().enumerate().skip(t) {
        for (j, &x) in row.iter().enumerate().skip(t) {
            if x != 0 && best.is_none_or(|(b, _, _)| x.unsigned_abs() < b) {
                best = Some((x.unsigned_abs(), i, j));
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

/// Smallest nonzero entry in row `t` or column `t` beyond the pivot.
fn min_entry_cross(m: &[Vec<i128>], t: usize) -> (usize, usize) {
    let mut best = (m[t][t].unsigned_abs(), t, t);
    for (i, row) in m.iter().enumerate().skip(t) {
        let x = row[t];
        if x != 0 && x.unsigned_abs() < best.0 {
            best = (x.unsigned_abs(), i, t);
        }
    }
    for (j, &x) in m[t].iter().enumerate().skip(t) {
        if x != 0 && x.unsigned_abs() < best.0 {
            best = (x.unsigned_abs(), t, j);
        }
    }
    (best.1, best.2)
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Turns any list of diagonal entries into invariant factors.
pub fn normalize_divisors(mut d: Vec<u128>) -> Vec<u128> {
    d.retain(|&x| x != 0);
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = gcd(d[i], d[j]);
            let l = d[i] / g * d[j];
            d[i] = g;
            d[j] = l;
        }
    }
    d
}

pub fn abelianization(p: &Presentation) -> Abelianization {
    let diag = smith_diagonal(relation_matrix(p));
    Abelianization {
        betti: p.generators.len() - diag.len(),
        torsion: diag.into_iter().filter(|&x| x > 1).collect(),
    }
}

/// Abelianization of a free product: ranks add, torsion concatenates.
pub fn free_product(parts: &[Abelianization], free_rank: usize) -> Abelianization {
    let betti = free_rank + parts.iter().map(|a| a.betti).sum::<usize>();
    let torsion = normalize_divisors(parts.iter().flat_map(|a| a.torsion.iter().copied()).collect());
    Abelianization { betti, torsion: torsion.into_iter().filter(|&x| x > 1).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_rank(m: &[Vec<i128>]) -> usize {
        // Rank by fraction-free elimination.
        let mut a = m.to_vec();
        let rows = a.len();
        let cols = a.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..rows).find(|&r| a[r][c] != 0) else { continue };
            a.swap(rank, p);
            for r in 0..rows {
                if r != rank && a[r][c] != 0 {
                    let (x, y) = (a[rank][c], a[r][c]);
                    for k in 0..cols {
                        a[r][k] = a[r][k] * x - a[rank][k] * y;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn small_groups() {
        let free = Presentation { generators: vec!["a".into(), "b".into()], relators: vec![] };
        assert_eq!(abelianization(&free), Abelianization { betti: 2, torsion: vec![] });
        let z2 = Presentation { generators: vec!["a".into(), "t".into()], relators: vec![vec![(1, 1), (0, 1), (1, -1), (0, -1)]] };
        assert_eq!(abelianization(&z2), Abelianization { betti: 2, torsion: vec![] });
        let c2 = Presentation { generators: vec!["a".into()], relators: vec![vec![(0, 1), (0, 1)]] };
        assert_eq!(abelianization(&c2), Abelianization { betti: 0, torsion: vec![2] });
    }

    #[test]
    fn smith_form_known_matrices() {
        assert_eq!(smith_diagonal(vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]), vec![2, 6, 12]);
        assert_eq!(smith_diagonal(vec![vec![4, 0], vec![0, 6]]), vec![2, 12]);
        assert_eq!(smith_diagonal(vec![vec![0, 0], vec![0, 0]]), Vec::<u128>::new());
    }

    #[test]
    fn smith_form_matches_rank_and_determinant() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..5);
            let m: Vec<Vec<i128>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-5..=5)).collect()).collect();
            let d = smith_diagonal(m.clone());
            assert_eq!(d.len(), naive_rank(&m));
            for w in d.windows(2) {
                assert_eq!(w[1] % w[0], 0);
            }
            if d.len() == n {
                let det = determinant(&m).unsigned_abs();
                assert_eq!(d.iter().product::<u128>(), det);
            }
        }
    }

    fn determinant(m: &[Vec<i128>]) -> i128 {
        let n = m.len();
        if n == 1 {
            return m[0][0];
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<i128>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect()).collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * determinant(&minor)
            })
            .sum()
    }
}
