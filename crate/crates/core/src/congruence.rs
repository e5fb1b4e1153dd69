//! Congruences of finite lattices and the semilattice `Con L` they form.

use std::collections::BTreeMap;
use std::fmt;

use crate::measure::PosetMeasure;
use crate::order::{ElemId, FiniteJoinSemilattice, OrderError};

/// A finite lattice: a finite ⟨∨,0⟩-semilattice with its meet table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteLattice {
    sl: FiniteJoinSemilattice,
    meet: Vec<u32>,
}

impl FiniteLattice {
    pub fn from_semilattice(sl: FiniteJoinSemilattice) -> Self {
        let meet = sl
            .ids()
            .flat_map(|x| sl.ids().map(move |y| (x, y)))
            .map(|(x, y)| sl.meet(x, y).0 as u32)
            .collect();
        FiniteLattice { sl, meet }
    }

    /// Validates a supplied meet table as greatest lower bounds.
    pub fn with_meets(sl: FiniteJoinSemilattice, meet: Vec<ElemId>) -> Result<Self, OrderError> {
        let n = sl.len();
        if meet.len() != n * n {
            return Err(OrderError::Malformed(format!(
                "meet table has {} entries, expected {}",
                meet.len(),
                n * n
            )));
        }
        for x in sl.ids() {
            for y in sl.ids() {
                if meet[x.0 * n + y.0] != sl.meet(x, y) {
                    return Err(OrderError::Malformed(format!(
                        "meet({}, {}) is not the greatest lower bound",
                        sl.name(x),
                        sl.name(y)
                    )));
                }
            }
        }
        Ok(FiniteLattice {
            meet: meet.iter().map(|m| m.0 as u32).collect(),
            sl,
        })
    }

    pub fn semilattice(&self) -> &FiniteJoinSemilattice {
        &self.sl
    }

    pub fn len(&self) -> usize {
        self.sl.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sl.is_empty()
    }

    pub fn ids(&self) -> impl DoubleEndedIterator<Item = ElemId> + ExactSizeIterator + '_ {
        self.sl.ids()
    }

    pub fn join(&self, x: ElemId, y: ElemId) -> ElemId {
        self.sl.join(x, y)
    }

    pub fn meet(&self, x: ElemId, y: ElemId) -> ElemId {
        ElemId(self.meet[x.0 * self.len() + y.0] as usize)
    }
}

/// A partition of the lattice, stored as sorted blocks in order of their least
/// element.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Congruence {
    blocks: Vec<Vec<ElemId>>,
}

impl Congruence {
    /// Canonicalizes a block labelling `label[x]`.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut by_label: BTreeMap<usize, Vec<ElemId>> = BTreeMap::new();
        for (x, &l) in labels.iter().enumerate() {
            by_label.entry(l).or_default().push(ElemId(x));
        }
        let mut blocks: Vec<Vec<ElemId>> = by_label.into_values().collect();
        blocks.sort();
        Congruence { blocks }
    }

    pub fn identity(n: usize) -> Self {
        Congruence::from_labels(&(0..n).collect::<Vec<_>>())
    }

    pub fn full(n: usize) -> Self {
        Congruence::from_labels(&vec![0; n])
    }

    pub fn blocks(&self) -> &[Vec<ElemId>] {
        &self.blocks
    }

    fn labels(&self) -> Vec<usize> {
        let n = self.blocks.iter().map(Vec::len).sum();
        let mut out = vec![0; n];
        for (i, b) in self.blocks.iter().enumerate() {
            for x in b {
                out[x.0] = i;
            }
        }
        out
    }

    pub fn related(&self, x: ElemId, y: ElemId) -> bool {
        let l = self.labels();
        l[x.0] == l[y.0]
    }

    /// Every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Congruence) -> bool {
        let l = other.labels();
        self.blocks.iter().all(|b| b.iter().all(|x| l[x.0] == l[b[0].0]))
    }

    /// The least equivalence containing both; again a congruence.
    pub fn join(&self, other: &Congruence) -> Congruence {
        let mut uf = UnionFind::new(self.labels().len());
        for b in self.blocks.iter().chain(&other.blocks) {
            for x in &b[1..] {
                uf.union(b[0].0, x.0);
            }
        }
        Congruence::from_labels(&uf.labels())
    }

    /// Compatibility with both lattice operations.
    pub fn is_compatible(&self, l: &FiniteLattice) -> bool {
        let lab = self.labels();
        for b in &self.blocks {
            for &x in b {
                for &y in b {
                    if x >= y {
                        continue;
                    }
                    for z in l.ids() {
                        if lab[l.join(x, z).0] != lab[l.join(y, z).0]
                            || lab[l.meet(x, z).0] != lab[l.meet(y, z).0]
                        {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Text form such as `{0,a}{b}{1}`, using the lattice's element names.
    pub fn display_with(&self, l: &FiniteJoinSemilattice) -> String {
        self.blocks
            .iter()
            .map(|b| {
                let names: Vec<&str> = b.iter().map(|&x| l.name(x)).collect();
                format!("{{{}}}", names.join(","))
            })
            .collect()
    }
}

impl fmt::Debug for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            let ids: Vec<String> = b.iter().map(|x| x.0.to_string()).collect();
            write!(f, "{{{}}}", ids.join(","))?;
        }
        Ok(())
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        self.parent[rx.max(ry)] = rx.min(ry);
        true
    }

    fn labels(&mut self) -> Vec<usize> {
        (0..self.parent.len()).map(|x| self.find(x)).collect()
    }
}

/// `Θ(x, y)`: the least congruence identifying `x` and `y`.
pub fn principal_congruence(l: &FiniteLattice, x: ElemId, y: ElemId) -> Congruence {
    let n = l.len();
    let mut uf = UnionFind::new(n);
    uf.union(x.0, y.0);
    loop {
        let mut changed = false;
        for p in 0..n {
            let q = uf.find(p);
            if p == q {
                continue;
            }
            for z in l.ids() {
                let (p, q) = (ElemId(p), ElemId(q));
                changed |= uf.union(l.join(p, z).0, l.join(q, z).0);
                changed |= uf.union(l.meet(p, z).0, l.meet(q, z).0);
            }
        }
        if !changed {
            break;
        }
    }
    Congruence::from_labels(&uf.labels())
}

/// `Con L` as an explicit semilattice; element `i` is `congruences()[i]`.
#[derive(Clone, Debug)]
pub struct ConcSemilattice {
    congruences: Vec<Congruence>,
    semilattice: FiniteJoinSemilattice,
}

impl ConcSemilattice {
    pub fn congruences(&self) -> &[Congruence] {
        &self.congruences
    }

    pub fn semilattice(&self) -> &FiniteJoinSemilattice {
        &self.semilattice
    }

    pub fn id_of(&self, c: &Congruence) -> Option<ElemId> {
        self.congruences.binary_search(c).ok().map(ElemId)
    }
}

/// All congruences of `l`, obtained as joins of principal congruences.
pub fn all_congruences(l: &FiniteLattice) -> ConcSemilattice {
    let n = l.len();
    let mut found: Vec<Congruence> = vec![Congruence::identity(n)];
    for x in l.ids() {
        for y in l.ids() {
            if x < y {
                let t = principal_congruence(l, x, y);
                if !found.contains(&t) {
                    found.push(t);
                }
            }
        }
    }
    let mut i = 0;
    while i < found.len() {
        for j in 0..i {
            let c = found[i].join(&found[j]);
            if !found.contains(&c) {
                found.push(c);
            }
        }
        i += 1;
    }
    found.sort();
    let names: Vec<String> = found.iter().map(|c| c.display_with(l.semilattice())).collect();
    let pos = |c: &Congruence| ElemId(found.binary_search(c).expect("closed under join"));
    let join = found
        .iter()
        .flat_map(|x| found.iter().map(|y| pos(&x.join(y))))
        .collect();
    let zero = pos(&Congruence::identity(n));
    let semilattice = FiniteJoinSemilattice::from_join_table(names, zero, join).expect("congruences form a semilattice");
    ConcSemilattice {
        congruences: found,
        semilattice,
    }
}

/// `μ(x, y) = Θ(y, x ∨ y)` on `L` with values in `Con L`.
pub fn theta_plus_measure(l: &FiniteLattice) -> (ConcSemilattice, PosetMeasure<FiniteJoinSemilattice>) {
    let conc = all_congruences(l);
    let mut mu = Vec::with_capacity(l.len() * l.len());
    for x in l.ids() {
        for y in l.ids() {
            let t = principal_congruence(l, y, l.join(x, y));
            mu.push(conc.id_of(&t).expect("principal congruences are enumerated"));
        }
    }
    let m = PosetMeasure::new(l.semilattice().poset().clone(), conc.semilattice.clone(), mu)
        .expect("table has the right size");
    (conc, m)
}

/// Every congruence, by filtering all set partitions of the carrier for
/// compatibility. Exponential; meant as a cross-check on small lattices.
pub fn congruences_by_filter(l: &FiniteLattice) -> Vec<Congruence> {
    fn partitions(n: usize, i: usize, labels: &mut Vec<usize>, blocks: usize, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(labels.clone());
            return;
        }
        for b in 0..=blocks {
            labels.push(b);
            partitions(n, i + 1, labels, blocks.max(b + 1), out);
            labels.pop();
        }
    }
    let mut all = Vec::new();
    partitions(l.len(), 0, &mut Vec::new(), 0, &mut all);
    let mut out: Vec<Congruence> = all
        .iter()
        .map(|labels| Congruence::from_labels(labels))
        .filter(|c| c.is_compatible(l))
        .collect();
    out.sort();
    out
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::order::FinitePoset;

    fn lattice(names: &[&str], covers: &[(&str, &str)]) -> FiniteLattice {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let id = |s: &str| ElemId(names.iter().position(|n| n == s).unwrap());
        let pairs: Vec<_> = covers.iter().map(|&(x, y)| (id(x), id(y))).collect();
        let p = FinitePoset::from_relation(names.clone(), &pairs).unwrap();
        FiniteLattice::from_semilattice(FiniteJoinSemilattice::from_poset(p).unwrap())
    }

    pub fn m3() -> FiniteLattice {
        lattice(
            &["0", "p", "q", "r", "1"],
            &[("0", "p"), ("0", "q"), ("0", "r"), ("p", "1"), ("q", "1"), ("r", "1")],
        )
    }

    pub fn n5() -> FiniteLattice {
        lattice(
            &["0", "p", "q", "r", "1"],
            &[("0", "p"), ("p", "q"), ("q", "1"), ("0", "r"), ("r", "1")],
        )
    }

    pub fn chain2() -> FiniteLattice {
        lattice(&["0", "1"], &[("0", "1")])
    }
}
