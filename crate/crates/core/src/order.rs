//! Finite posets and finite ⟨∨,0⟩-semilattices given by explicit tables, together
//! with the structural predicates used throughout the crate (lower sets,
//! distributivity, join-irreducibles, meets).
//!
//! Elements are opaque [`ElemId`]s carrying a display name. Orders are stored as
//! dense bit matrices so that `leq` is a single bit test.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::Hash;

use thiserror::Error;

/// Abstract access to a ⟨∨,0⟩-semilattice.
///
/// Implementors must satisfy the semilattice laws: `join` is associative,
/// commutative and idempotent, `zero` is neutral, and `leq(x, y)` holds exactly
/// when `join(x, y) == y`. When [`JoinSemilattice::elements`] returns `Some`, the
/// list is the complete carrier.
pub trait JoinSemilattice {
    type Elem: Clone + Eq + Ord + Hash + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn leq(&self, x: &Self::Elem, y: &Self::Elem) -> bool;
    fn join(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;

    /// Exhaustive enumeration of the carrier, when the structure offers one.
    fn elements(&self) -> Option<Vec<Self::Elem>> {
        None
    }

    fn join_all<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items
            .into_iter()
            .fold(self.zero(), |acc, x| self.join(&acc, x))
    }
}

impl<T: JoinSemilattice + ?Sized> JoinSemilattice for &T {
    type Elem = T::Elem;

    fn zero(&self) -> Self::Elem {
        (**self).zero()
    }
    fn leq(&self, x: &Self::Elem, y: &Self::Elem) -> bool {
        (**self).leq(x, y)
    }
    fn join(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        (**self).join(x, y)
    }
    fn elements(&self) -> Option<Vec<Self::Elem>> {
        (**self).elements()
    }
}

/// Index of an element inside a finite poset or semilattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElemId(pub usize);

impl ElemId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("not a partial order at ({x}, {y}): {reason}")]
    NotAPartialOrder {
        x: String,
        y: String,
        reason: &'static str,
    },
    #[error("join({x}, {y}) is not the least upper bound")]
    JoinNotLub { x: String, y: String },
    #[error("zero is not below {x}")]
    NoZero { x: String },
    #[error("provided order disagrees with the order derived from joins at ({x}, {y})")]
    OrderMismatch { x: String, y: String },
    #[error("unknown element {0}")]
    UnknownElement(String),
    #[error("map is not isotone at ({x}, {y})")]
    NotIsotone { x: String, y: String },
    #[error("map does not preserve joins at ({x}, {y})")]
    NotJoinPreserving { x: String, y: String },
    #[error("map does not send zero to zero")]
    ZeroNotPreserved,
    #[error("malformed table: {0}")]
    Malformed(String),
}

/// Dense square bit matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    n: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let stride = n.div_ceil(64).max(1);
        BitMatrix {
            n,
            stride,
            bits: vec![0; n * stride],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = BitMatrix::new(n);
        for i in 0..n {
            for j in 0..n {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.bits[i * self.stride + j / 64] >> (j % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        let word = &mut self.bits[i * self.stride + j / 64];
        if value {
            *word |= 1 << (j % 64);
        } else {
            *word &= !(1 << (j % 64));
        }
    }

    /// Row `i` as packed words.
    pub fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.stride..(i + 1) * self.stride]
    }

    /// Reflexive-transitive closure (Warshall).
    pub fn closure(&mut self) {
        for i in 0..self.n {
            self.set(i, i, true);
        }
        for k in 0..self.n {
            for i in 0..self.n {
                if self.get(i, k) {
                    for w in 0..self.stride {
                        let v = self.bits[k * self.stride + w];
                        self.bits[i * self.stride + w] |= v;
                    }
                }
            }
        }
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: String = (0..self.n)
                .map(|j| if self.get(i, j) { '1' } else { '.' })
                .collect();
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

/// A finite partially ordered set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePoset {
    names: Vec<String>,
    leq: BitMatrix,
}

impl FinitePoset {
    /// Validates that `leq` is reflexive, antisymmetric and transitive.
    pub fn new(names: Vec<String>, leq: BitMatrix) -> Result<Self, OrderError> {
        let n = names.len();
        if leq.size() != n {
            return Err(OrderError::Malformed(format!(
                "order has size {} but there are {n} elements",
                leq.size()
            )));
        }
        check_distinct(&names)?;
        let name = |i: usize| names[i].clone();
        for x in 0..n {
            if !leq.get(x, x) {
                return Err(OrderError::NotAPartialOrder {
                    x: name(x),
                    y: name(x),
                    reason: "not reflexive",
                });
            }
        }
        for x in 0..n {
            for y in 0..n {
                if x != y && leq.get(x, y) && leq.get(y, x) {
                    return Err(OrderError::NotAPartialOrder {
                        x: name(x),
                        y: name(y),
                        reason: "not antisymmetric",
                    });
                }
            }
        }
        for x in 0..n {
            for z in 0..n {
                if leq.get(x, z) {
                    continue;
                }
                if (0..n).any(|y| leq.get(x, y) && leq.get(y, z)) {
                    return Err(OrderError::NotAPartialOrder {
                        x: name(x),
                        y: name(z),
                        reason: "not transitive",
                    });
                }
            }
        }
        Ok(FinitePoset { names, leq })
    }

    /// Builds the reflexive-transitive closure of `pairs`, then validates.
    pub fn from_relation(names: Vec<String>, pairs: &[(ElemId, ElemId)]) -> Result<Self, OrderError> {
        let mut m = BitMatrix::new(names.len());
        for &(x, y) in pairs {
            if x.0 >= names.len() || y.0 >= names.len() {
                return Err(OrderError::UnknownElement(format!("#{}", x.0.max(y.0))));
            }
            m.set(x.0, y.0, true);
        }
        m.closure();
        FinitePoset::new(names, m)
    }

    /// The chain `0 < 1 < … < n-1` with decimal names.
    pub fn chain(n: usize) -> Self {
        let names = (0..n).map(|i| i.to_string()).collect();
        FinitePoset {
            names,
            leq: BitMatrix::from_fn(n, |i, j| i <= j),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn ids(&self) -> impl DoubleEndedIterator<Item = ElemId> + ExactSizeIterator + '_ {
        (0..self.names.len()).map(ElemId)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, x: ElemId) -> &str {
        &self.names[x.0]
    }

    pub fn id_of(&self, name: &str) -> Option<ElemId> {
        self.names.iter().position(|n| n == name).map(ElemId)
    }

    #[inline]
    pub fn leq(&self, x: ElemId, y: ElemId) -> bool {
        self.leq.get(x.0, y.0)
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.leq
    }

    /// `↓X = {p : p ≤ x for some x ∈ X}`.
    pub fn lower_set(&self, xs: &[ElemId]) -> Result<BTreeSet<ElemId>, OrderError> {
        for x in xs {
            if x.0 >= self.len() {
                return Err(OrderError::UnknownElement(format!("#{}", x.0)));
            }
        }
        Ok(self
            .ids()
            .filter(|&p| xs.iter().any(|&x| self.leq(p, x)))
            .collect())
    }

    pub fn is_lower_set(&self, xs: &BTreeSet<ElemId>) -> bool {
        xs.iter()
            .all(|&x| self.ids().all(|p| !self.leq(p, x) || xs.contains(&p)))
    }

    /// Covering pairs `x ⋖ y` (the transitive reduction of the strict order).
    pub fn covers(&self) -> Vec<(ElemId, ElemId)> {
        let mut out = Vec::new();
        for x in self.ids() {
            for y in self.ids() {
                if x == y || !self.leq(x, y) {
                    continue;
                }
                let between = self
                    .ids()
                    .any(|z| z != x && z != y && self.leq(x, z) && self.leq(z, y));
                if !between {
                    out.push((x, y));
                }
            }
        }
        out
    }
}

fn check_distinct(names: &[String]) -> Result<(), OrderError> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(OrderError::Malformed(format!("duplicate element name {n}")));
        }
    }
    Ok(())
}

/// Unvalidated input for [`validate_semilattice`].
#[derive(Clone, Debug)]
pub struct SemilatticeCandidate {
    pub names: Vec<String>,
    pub leq: BitMatrix,
    pub zero: ElemId,
    /// Row-major `n × n` join table.
    pub join: Vec<ElemId>,
}

/// An explicit finite ⟨∨,0⟩-semilattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteJoinSemilattice {
    poset: FinitePoset,
    zero: ElemId,
    join: Vec<u32>,
}

/// Outcome of [`FiniteJoinSemilattice::is_distributive`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Distributivity {
    Distributive,
    /// `c ≤ a ∨ b`, but no `x ≤ a`, `y ≤ b` have `x ∨ y = c`.
    Counterexample { c: ElemId, a: ElemId, b: ElemId },
}

impl Distributivity {
    pub fn holds(&self) -> bool {
        matches!(self, Distributivity::Distributive)
    }
}

/// Checks a candidate semilattice and returns the validated structure.
///
/// The provided order must be a partial order with `zero` least, and every
/// `join(x, y)` must be the least upper bound of `{x, y}` under it. The order
/// re-derived from the join table (`x ≤ y` iff `x ∨ y = y`) is cross-checked
/// against the provided one.
pub fn validate_semilattice(c: SemilatticeCandidate) -> Result<FiniteJoinSemilattice, OrderError> {
    let n = c.names.len();
    if c.join.len() != n * n {
        return Err(OrderError::Malformed(format!(
            "join table has {} entries, expected {}",
            c.join.len(),
            n * n
        )));
    }
    if n == 0 || c.zero.0 >= n {
        return Err(OrderError::Malformed("missing zero element".into()));
    }
    if let Some(bad) = c.join.iter().find(|j| j.0 >= n) {
        return Err(OrderError::UnknownElement(format!("#{}", bad.0)));
    }
    let poset = FinitePoset::new(c.names, c.leq)?;
    let name = |i: usize| poset.names[i].clone();
    if let Some(x) = poset.ids().find(|&x| !poset.leq(c.zero, x)) {
        return Err(OrderError::NoZero { x: name(x.0) });
    }
    for x in 0..n {
        for y in 0..n {
            let j = c.join[x * n + y].0;
            let upper = poset.leq.get(x, j) && poset.leq.get(y, j);
            let least = (0..n)
                .all(|z| !(poset.leq.get(x, z) && poset.leq.get(y, z)) || poset.leq.get(j, z));
            if !upper || !least {
                return Err(OrderError::JoinNotLub {
                    x: name(x),
                    y: name(y),
                });
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            if (c.join[x * n + y].0 == y) != poset.leq.get(x, y) {
                return Err(OrderError::OrderMismatch {
                    x: name(x),
                    y: name(y),
                });
            }
        }
    }
    Ok(FiniteJoinSemilattice {
        poset,
        zero: c.zero,
        join: c.join.iter().map(|j| j.0 as u32).collect(),
    })
}

impl FiniteJoinSemilattice {
    /// Builds a semilattice from a join table alone; the order is derived from
    /// `x ≤ y` iff `x ∨ y = y`.
    pub fn from_join_table(
        names: Vec<String>,
        zero: ElemId,
        join: Vec<ElemId>,
    ) -> Result<Self, OrderError> {
        let n = names.len();
        if join.len() != n * n {
            return Err(OrderError::Malformed(format!(
                "join table has {} entries, expected {}",
                join.len(),
                n * n
            )));
        }
        let leq = BitMatrix::from_fn(n, |x, y| join[x * n + y].0 == y);
        validate_semilattice(SemilatticeCandidate {
            names,
            leq,
            zero,
            join,
        })
    }

    /// Builds a semilattice from an order that is known to be a finite lattice
    /// (every pair has a least upper bound).
    pub fn from_poset(poset: FinitePoset) -> Result<Self, OrderError> {
        let n = poset.len();
        let zero = poset
            .ids()
            .find(|&z| poset.ids().all(|x| poset.leq(z, x)))
            .ok_or_else(|| OrderError::NoZero {
                x: poset.names.first().cloned().unwrap_or_default(),
            })?;
        let mut join = Vec::with_capacity(n * n);
        for x in poset.ids() {
            for y in poset.ids() {
                let ubs: Vec<ElemId> = poset
                    .ids()
                    .filter(|&z| poset.leq(x, z) && poset.leq(y, z))
                    .collect();
                let lub = ubs
                    .iter()
                    .copied()
                    .find(|&u| ubs.iter().all(|&v| poset.leq(u, v)))
                    .ok_or_else(|| OrderError::JoinNotLub {
                        x: poset.name(x).to_string(),
                        y: poset.name(y).to_string(),
                    })?;
                join.push(lub);
            }
        }
        validate_semilattice(SemilatticeCandidate {
            names: poset.names,
            leq: poset.leq,
            zero,
            join,
        })
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    pub fn ids(&self) -> impl DoubleEndedIterator<Item = ElemId> + ExactSizeIterator + '_ {
        self.poset.ids()
    }

    pub fn name(&self, x: ElemId) -> &str {
        self.poset.name(x)
    }

    pub fn id_of(&self, name: &str) -> Option<ElemId> {
        self.poset.id_of(name)
    }

    pub fn zero(&self) -> ElemId {
        self.zero
    }

    #[inline]
    pub fn leq(&self, x: ElemId, y: ElemId) -> bool {
        self.poset.leq(x, y)
    }

    #[inline]
    pub fn join(&self, x: ElemId, y: ElemId) -> ElemId {
        ElemId(self.join[x.0 * self.len() + y.0] as usize)
    }

    pub fn join_of(&self, xs: impl IntoIterator<Item = ElemId>) -> ElemId {
        xs.into_iter().fold(self.zero, |acc, x| self.join(acc, x))
    }

    pub fn lower_set(&self, xs: &[ElemId]) -> Result<BTreeSet<ElemId>, OrderError> {
        self.poset.lower_set(xs)
    }

    /// `↓x` as a sorted vector.
    pub fn down(&self, x: ElemId) -> Vec<ElemId> {
        self.ids().filter(|&p| self.leq(p, x)).collect()
    }

    /// Greatest lower bound: the join of all common lower bounds. Finite
    /// ⟨∨,0⟩-semilattices are lattices, so this always exists.
    pub fn meet(&self, x: ElemId, y: ElemId) -> ElemId {
        let m = self.join_of(self.ids().filter(|&z| self.leq(z, x) && self.leq(z, y)));
        debug_assert!(self.leq(m, x) && self.leq(m, y));
        m
    }

    /// Checks `c ≤ a∨b ⟹ ∃x≤a, y≤b: c = x∨y`, scanning `(c, a, b)` in
    /// lexicographic id order and returning the first failure.
    pub fn is_distributive(&self) -> Distributivity {
        let n = self.len();
        // reach[a*n+b] = {x∨y : x ≤ a, y ≤ b}
        let downs: Vec<Vec<ElemId>> = self.ids().map(|x| self.down(x)).collect();
        let mut reach = BitMatrix::new(n * n);
        for a in 0..n {
            for b in 0..n {
                for &x in &downs[a] {
                    for &y in &downs[b] {
                        reach.set(a * n + b, self.join(x, y).0, true);
                    }
                }
            }
        }
        for c in self.ids() {
            for a in self.ids() {
                for b in self.ids() {
                    if self.leq(c, self.join(a, b)) && !reach.get(a.0 * n + b.0, c.0) {
                        return Distributivity::Counterexample { c, a, b };
                    }
                }
            }
        }
        Distributivity::Distributive
    }

    /// Nonzero `p` such that `p = x ∨ y` forces `p ∈ {x, y}`.
    pub fn join_irreducibles(&self) -> BTreeSet<ElemId> {
        self.ids()
            .filter(|&p| p != self.zero)
            .filter(|&p| {
                self.ids()
                    .all(|x| self.ids().all(|y| self.join(x, y) != p || x == p || y == p))
            })
            .collect()
    }

    /// Distributive, and every element a finite join of join-irreducibles.
    ///
    /// In a finite semilattice every element is the join of the
    /// join-irreducibles below it, so this coincides with
    /// [`is_distributive`](Self::is_distributive).
    pub fn is_strongly_distributive(&self) -> bool {
        let ji = self.join_irreducibles();
        debug_assert!(self
            .ids()
            .all(|x| self.join_of(ji.iter().copied().filter(|&p| self.leq(p, x))) == x));
        self.is_distributive().holds()
    }

    /// Verifies associativity, commutativity, idempotence, neutrality of zero
    /// and the least-upper-bound property directly on the tables.
    pub fn check_laws(&self) -> Result<(), String> {
        let ids: Vec<ElemId> = self.ids().collect();
        let nm = |x: ElemId| self.name(x).to_string();
        for &x in &ids {
            if self.join(x, x) != x {
                return Err(format!("idempotence fails at {}", nm(x)));
            }
            if self.join(x, self.zero) != x || self.join(self.zero, x) != x {
                return Err(format!("zero is not neutral for {}", nm(x)));
            }
            for &y in &ids {
                let j = self.join(x, y);
                if j != self.join(y, x) {
                    return Err(format!("commutativity fails at ({}, {})", nm(x), nm(y)));
                }
                if !self.leq(x, j) || !self.leq(y, j) {
                    return Err(format!("join({}, {}) is not an upper bound", nm(x), nm(y)));
                }
                for &z in &ids {
                    if self.join(x, self.join(y, z)) != self.join(j, z) {
                        return Err(format!(
                            "associativity fails at ({}, {}, {})",
                            nm(x),
                            nm(y),
                            nm(z)
                        ));
                    }
                    if self.leq(x, z) && self.leq(y, z) && !self.leq(j, z) {
                        return Err(format!("join({}, {}) is not least", nm(x), nm(y)));
                    }
                }
            }
        }
        Ok(())
    }

    /// Restricts to a subset closed under joins and containing zero.
    pub fn subsemilattice(&self, members: &BTreeSet<ElemId>) -> Result<(Self, Vec<ElemId>), OrderError> {
        if !members.contains(&self.zero) {
            return Err(OrderError::Malformed("subset does not contain zero".into()));
        }
        let ids: Vec<ElemId> = members.iter().copied().collect();
        let pos = |x: ElemId| ids.iter().position(|&y| y == x);
        let mut join = Vec::with_capacity(ids.len() * ids.len());
        for &x in &ids {
            for &y in &ids {
                let j = self.join(x, y);
                join.push(ElemId(pos(j).ok_or_else(|| {
                    OrderError::Malformed(format!(
                        "subset not closed under join of {} and {}",
                        self.name(x),
                        self.name(y)
                    ))
                })?));
            }
        }
        let names = ids.iter().map(|&x| self.name(x).to_string()).collect();
        let zero = ElemId(pos(self.zero).expect("zero is a member"));
        Ok((Self::from_join_table(names, zero, join)?, ids))
    }
}

impl JoinSemilattice for FiniteJoinSemilattice {
    type Elem = ElemId;

    fn zero(&self) -> ElemId {
        self.zero
    }
    fn leq(&self, x: &ElemId, y: &ElemId) -> bool {
        self.poset.leq(*x, *y)
    }
    fn join(&self, x: &ElemId, y: &ElemId) -> ElemId {
        FiniteJoinSemilattice::join(self, *x, *y)
    }
    fn elements(&self) -> Option<Vec<ElemId>> {
        Some(self.ids().collect())
    }
}

/// A subset of a finite semilattice's carrier viewed as a ⟨∨,0⟩-subsemilattice,
/// keeping the ambient element ids.
#[derive(Clone, Debug)]
pub struct SubSemilattice<'a> {
    parent: &'a FiniteJoinSemilattice,
    members: BTreeSet<ElemId>,
}

impl<'a> SubSemilattice<'a> {
    pub fn new(parent: &'a FiniteJoinSemilattice, members: BTreeSet<ElemId>) -> Result<Self, OrderError> {
        parent.subsemilattice(&members)?;
        Ok(SubSemilattice { parent, members })
    }

    pub fn members(&self) -> &BTreeSet<ElemId> {
        &self.members
    }
}

impl JoinSemilattice for SubSemilattice<'_> {
    type Elem = ElemId;

    fn zero(&self) -> ElemId {
        self.parent.zero()
    }
    fn leq(&self, x: &ElemId, y: &ElemId) -> bool {
        self.parent.leq(*x, *y)
    }
    fn join(&self, x: &ElemId, y: &ElemId) -> ElemId {
        self.parent.join(*x, *y)
    }
    fn elements(&self) -> Option<Vec<ElemId>> {
        Some(self.members.iter().copied().collect())
    }
}

/// An isotone map between finite posets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsotoneMap {
    graph: Vec<ElemId>,
}

impl IsotoneMap {
    pub fn new(source: &FinitePoset, target: &FinitePoset, graph: Vec<ElemId>) -> Result<Self, OrderError> {
        if graph.len() != source.len() {
            return Err(OrderError::Malformed("map is not total on the source".into()));
        }
        if let Some(bad) = graph.iter().find(|y| y.0 >= target.len()) {
            return Err(OrderError::UnknownElement(format!("#{}", bad.0)));
        }
        for x in source.ids() {
            for y in source.ids() {
                if source.leq(x, y) && !target.leq(graph[x.0], graph[y.0]) {
                    return Err(OrderError::NotIsotone {
                        x: source.name(x).to_string(),
                        y: source.name(y).to_string(),
                    });
                }
            }
        }
        Ok(IsotoneMap { graph })
    }

    pub fn apply(&self, x: ElemId) -> ElemId {
        self.graph[x.0]
    }

    pub fn graph(&self) -> &[ElemId] {
        &self.graph
    }
}

/// A map between finite semilattices preserving `∨` and `0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinZeroHomomorphism {
    map: IsotoneMap,
}

impl JoinZeroHomomorphism {
    pub fn new(
        source: &FiniteJoinSemilattice,
        target: &FiniteJoinSemilattice,
        graph: Vec<ElemId>,
    ) -> Result<Self, OrderError> {
        let map = IsotoneMap::new(source.poset(), target.poset(), graph)?;
        if map.apply(source.zero()) != target.zero() {
            return Err(OrderError::ZeroNotPreserved);
        }
        for x in source.ids() {
            for y in source.ids() {
                if map.apply(source.join(x, y)) != target.join(map.apply(x), map.apply(y)) {
                    return Err(OrderError::NotJoinPreserving {
                        x: source.name(x).to_string(),
                        y: source.name(y).to_string(),
                    });
                }
            }
        }
        Ok(JoinZeroHomomorphism { map })
    }

    pub fn identity(s: &FiniteJoinSemilattice) -> Self {
        JoinZeroHomomorphism {
            map: IsotoneMap {
                graph: s.ids().collect(),
            },
        }
    }

    pub fn apply(&self, x: ElemId) -> ElemId {
        self.map.apply(x)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &JoinZeroHomomorphism) -> JoinZeroHomomorphism {
        JoinZeroHomomorphism {
            map: IsotoneMap {
                graph: self.map.graph.iter().map(|&x| other.apply(x)).collect(),
            },
        }
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    pub fn chain(n: usize) -> FiniteJoinSemilattice {
        FiniteJoinSemilattice::from_poset(FinitePoset::chain(n)).unwrap()
    }

    /// `{0, a, b, ab}` with componentwise join.
    pub fn square() -> FiniteJoinSemilattice {
        let join = |x: usize, y: usize| ElemId(x | y);
        let table = (0..4).flat_map(|x| (0..4).map(move |y| join(x, y))).collect();
        FiniteJoinSemilattice::from_join_table(names(&["0", "a", "b", "ab"]), ElemId(0), table).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn id(s: &FiniteJoinSemilattice, n: &str) -> ElemId {
        s.id_of(n).unwrap()
    }

    #[test]
    fn two_chain_is_valid() {
        let s = chain(2);
        assert_eq!(s.len(), 2);
        assert!(s.check_laws().is_ok());
    }

    #[test]
    fn square_is_valid() {
        let s = square();
        assert!(s.check_laws().is_ok());
        assert_eq!(s.join(id(&s, "a"), id(&s, "b")), id(&s, "ab"));
    }

    #[test]
    fn corrupted_square_reports_join_not_lub() {
        let s = square();
        let mut join: Vec<ElemId> = (0..4)
            .flat_map(|x| (0..4).map(move |y| ElemId(x | y)))
            .collect();
        join[4 + 2] = ElemId(1);
        let err = validate_semilattice(SemilatticeCandidate {
            names: names(&["0", "a", "b", "ab"]),
            leq: s.poset().matrix().clone(),
            zero: ElemId(0),
            join,
        })
        .unwrap_err();
        assert_eq!(
            err,
            OrderError::JoinNotLub {
                x: "a".into(),
                y: "b".into()
            }
        );
    }

    #[test]
    fn non_order_and_missing_zero_are_rejected() {
        let mut m = BitMatrix::from_fn(2, |i, j| i <= j);
        m.set(1, 0, true);
        let err = FinitePoset::new(names(&["x", "y"]), m).unwrap_err();
        assert!(matches!(err, OrderError::NotAPartialOrder { reason: "not antisymmetric", .. }));

        let s = chain(2);
        let err = validate_semilattice(SemilatticeCandidate {
            names: names(&["0", "1"]),
            leq: s.poset().matrix().clone(),
            zero: ElemId(1),
            join: vec![ElemId(0), ElemId(1), ElemId(1), ElemId(1)],
        })
        .unwrap_err();
        assert_eq!(err, OrderError::NoZero { x: "0".into() });
    }

    #[test]
    fn lower_sets() {
        let s = square();
        let a = id(&s, "a");
        assert_eq!(s.lower_set(&[a]).unwrap(), [ElemId(0), a].into_iter().collect());
        assert!(s.lower_set(&[]).unwrap().is_empty());
        assert!(matches!(s.lower_set(&[ElemId(9)]), Err(OrderError::UnknownElement(_))));
    }

    #[test]
    fn distributivity_and_irreducibles() {
        let s = square();
        assert!(s.is_distributive().holds());
        assert!(s.is_strongly_distributive());
        assert_eq!(
            s.join_irreducibles(),
            [id(&s, "a"), id(&s, "b")].into_iter().collect()
        );
        let c3 = chain(3);
        assert!(c3.is_distributive().holds());
        assert_eq!(c3.join_irreducibles(), [ElemId(1), ElemId(2)].into_iter().collect());
        let one = FiniteJoinSemilattice::from_join_table(names(&["0"]), ElemId(0), vec![ElemId(0)]).unwrap();
        assert!(one.is_strongly_distributive());
        assert!(one.join_irreducibles().is_empty());
    }

    #[test]
    fn meets_in_square() {
        let s = square();
        assert_eq!(s.meet(id(&s, "a"), id(&s, "b")), ElemId(0));
        assert_eq!(s.meet(id(&s, "a"), id(&s, "ab")), id(&s, "a"));
    }

    #[test]
    fn homomorphism_checks() {
        let s = square();
        let c = chain(2);
        // collapse everything nonzero to 1
        let h = JoinZeroHomomorphism::new(&s, &c, vec![ElemId(0), ElemId(1), ElemId(1), ElemId(1)]).unwrap();
        assert_eq!(h.apply(ElemId(3)), ElemId(1));
        let bad = JoinZeroHomomorphism::new(&s, &c, vec![ElemId(1), ElemId(1), ElemId(1), ElemId(1)]);
        assert_eq!(bad.unwrap_err(), OrderError::ZeroNotPreserved);
        let not_iso = IsotoneMap::new(c.poset(), c.poset(), vec![ElemId(1), ElemId(0)]);
        assert!(matches!(not_iso, Err(OrderError::NotIsotone { .. })));
    }

    #[test]
    fn covers_of_square() {
        let s = square();
        assert_eq!(s.poset().covers().len(), 4);
    }
}
