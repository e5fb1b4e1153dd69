//! The semilattices `S(Λ)` generated by `a`, `b` and a chain of `c_i` with
//! `c_i ≤ a ∨ b` and `c_i ≤ c_j` for `i ≤ j`, and `F(Λ) = D(S(Λ))`.
//!
//! Indices are natural numbers; every element of `F(Λ)` only involves finitely
//! many of them (its support), so all constructions here are finite.

mod interp;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::free::term::{parse_term, print_term, TermError};
use crate::free::{FreeElement, FreeError, FreeExtension};
use crate::order::{ElemId, FiniteJoinSemilattice, JoinSemilattice, JoinZeroHomomorphism, OrderError};

pub use interp::{interpolate, Interpolation};

/// Position of a generator `c_i` in the chain `Λ`.
pub type ChainIndex = u64;

/// A finite set of chain indices.
pub type IndexSet = BTreeSet<ChainIndex>;

/// Normal form of an element of `S(Λ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ChainElement {
    Zero,
    A,
    B,
    /// `a ∨ b`, which lies above every `c_i`.
    AB,
    C(ChainIndex),
    /// `a ∨ c_i`
    AC(ChainIndex),
    /// `b ∨ c_i`
    BC(ChainIndex),
}

impl ChainElement {
    fn parts(self) -> (bool, bool, Option<ChainIndex>) {
        match self {
            ChainElement::Zero => (false, false, None),
            ChainElement::A => (true, false, None),
            ChainElement::B => (false, true, None),
            ChainElement::AB => (true, true, None),
            ChainElement::C(i) => (false, false, Some(i)),
            ChainElement::AC(i) => (true, false, Some(i)),
            ChainElement::BC(i) => (false, true, Some(i)),
        }
    }

    fn from_parts(a: bool, b: bool, c: Option<ChainIndex>) -> Self {
        match (a, b, c) {
            (true, true, _) => ChainElement::AB,
            (false, false, None) => ChainElement::Zero,
            (true, false, None) => ChainElement::A,
            (false, true, None) => ChainElement::B,
            (false, false, Some(i)) => ChainElement::C(i),
            (true, false, Some(i)) => ChainElement::AC(i),
            (false, true, Some(i)) => ChainElement::BC(i),
        }
    }

    pub fn index(self) -> Option<ChainIndex> {
        self.parts().2
    }

    pub fn join(self, other: ChainElement) -> ChainElement {
        let (a1, b1, c1) = self.parts();
        let (a2, b2, c2) = other.parts();
        ChainElement::from_parts(a1 || a2, b1 || b2, c1.max(c2))
    }

    pub fn leq(self, other: ChainElement) -> bool {
        self.join(other) == other
    }

    /// Reindexes the `c` component.
    pub fn reindex(self, f: impl Fn(ChainIndex) -> ChainIndex) -> ChainElement {
        let (a, b, c) = self.parts();
        ChainElement::from_parts(a, b, c.map(f))
    }

    /// Parses `0`, `a`, `b`, `c(i)` and the joins written by [`fmt::Display`].
    pub fn parse(s: &str) -> Option<ChainElement> {
        match parse_term(&FreeExtension::new(ChainFamily), s, chain_atom).ok()? {
            FreeElement::Base(e) => Some(e),
            FreeElement::Reduced(_) => None,
        }
    }
}

impl fmt::Display for ChainElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainElement::Zero => write!(f, "0"),
            ChainElement::A => write!(f, "a"),
            ChainElement::B => write!(f, "b"),
            ChainElement::AB => write!(f, "join(a,b)"),
            ChainElement::C(i) => write!(f, "c({i})"),
            ChainElement::AC(i) => write!(f, "join(a,c({i}))"),
            ChainElement::BC(i) => write!(f, "join(b,c({i}))"),
        }
    }
}

/// `S(ℕ)`: the chain semilattice over all natural indices. Each `S(X)` for a
/// finite `X` is the subsemilattice of elements whose index lies in `X`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ChainFamily;

impl JoinSemilattice for ChainFamily {
    type Elem = ChainElement;

    fn zero(&self) -> ChainElement {
        ChainElement::Zero
    }
    fn leq(&self, x: &ChainElement, y: &ChainElement) -> bool {
        x.leq(*y)
    }
    fn join(&self, x: &ChainElement, y: &ChainElement) -> ChainElement {
        x.join(*y)
    }
}

/// Elements of `F(Λ)`.
pub type FElement = FreeElement<ChainElement>;

/// `F(ℕ)` with its order and operations.
pub fn f_ext() -> FreeExtension<ChainFamily> {
    FreeExtension::new(ChainFamily)
}

pub fn chain_atom(name: &str, arg: Option<u64>) -> Option<ChainElement> {
    match (name, arg) {
        ("0", None) => Some(ChainElement::Zero),
        ("a", None) => Some(ChainElement::A),
        ("b", None) => Some(ChainElement::B),
        ("c", Some(i)) => Some(ChainElement::C(i)),
        _ => None,
    }
}

/// Parses a term over `S(Λ)`.
pub fn parse_f(s: &str) -> Result<FElement, TermError> {
    parse_term(&f_ext(), s, chain_atom)
}

/// Canonical text of an element of `F(Λ)`; re-parses to the same element.
pub fn print_f(x: &FElement) -> String {
    print_term(x, &ChainElement::Zero, &|e: &ChainElement| e.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("index map is not isotone at {0} < {1}")]
    NotIsotone(ChainIndex, ChainIndex),
    #[error("support {support:?} is not contained in {within:?}")]
    SupportNotContained { support: IndexSet, within: IndexSet },
    #[error("target index set has {target} elements, fewer than {source_len}")]
    TooShort { source_len: usize, target: usize },
    #[error("intersection {0:?} is not a lower subset of both index sets")]
    HypothesisViolated(IndexSet),
    #[error("x is not below y")]
    NotLeq,
    #[error("support of {which} is not contained in its index set")]
    SupportViolation { which: &'static str },
    #[error("index set is empty")]
    EmptyIndexSet,
    #[error("self-check failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Free(#[from] FreeError),
    #[error(transparent)]
    Order(#[from] OrderError),
}

/// Carrier of `S(X)` in the fixed order `0, a, b, a∨b` followed by
/// `c_i, a∨c_i, b∨c_i` for increasing `i`.
pub fn s_lambda_elements(indices: &IndexSet) -> Vec<ChainElement> {
    let mut out = vec![ChainElement::Zero, ChainElement::A, ChainElement::B, ChainElement::AB];
    for &i in indices {
        out.extend([ChainElement::C(i), ChainElement::AC(i), ChainElement::BC(i)]);
    }
    out
}

/// `S(X)` as an explicit `3|X| + 4`-element semilattice whose element names are
/// terms of the shared grammar.
pub fn s_lambda(indices: &IndexSet) -> FiniteJoinSemilattice {
    let elems = s_lambda_elements(indices);
    let pos: BTreeMap<ChainElement, usize> = elems.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let join = elems
        .iter()
        .flat_map(|x| elems.iter().map(|y| ElemId(pos[&x.join(*y)])))
        .collect();
    let names = elems.iter().map(|e| e.to_string()).collect();
    FiniteJoinSemilattice::from_join_table(names, ElemId(0), join).expect("S(X) is a semilattice")
}

/// `S(f)` for an isotone map `f` between finite chains: fixes `0, a, b, a∨b`
/// and sends `c_i` to `c_{f(i)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainHom {
    map: BTreeMap<ChainIndex, ChainIndex>,
}

pub fn s_map(f: BTreeMap<ChainIndex, ChainIndex>) -> Result<ChainHom, ChainError> {
    let pairs: Vec<_> = f.iter().collect();
    for w in pairs.windows(2) {
        if w[0].1 > w[1].1 {
            return Err(ChainError::NotIsotone(*w[0].0, *w[1].0));
        }
    }
    Ok(ChainHom { map: f })
}

impl ChainHom {
    pub fn identity(indices: &IndexSet) -> Self {
        ChainHom {
            map: indices.iter().map(|&i| (i, i)).collect(),
        }
    }

    pub fn domain(&self) -> IndexSet {
        self.map.keys().copied().collect()
    }

    pub fn image(&self) -> IndexSet {
        self.map.values().copied().collect()
    }

    pub fn index_map(&self) -> &BTreeMap<ChainIndex, ChainIndex> {
        &self.map
    }

    /// Image of a base element. Indices outside the domain are a caller error.
    pub fn apply(&self, e: &ChainElement) -> ChainElement {
        e.reindex(|i| self.map[&i])
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &ChainHom) -> ChainHom {
        ChainHom {
            map: self.map.iter().map(|(&i, j)| (i, other.map[j])).collect(),
        }
    }

    /// The map as a verified ⟨∨,0⟩-homomorphism `S(X) → S(Y)`.
    pub fn to_homomorphism(&self, target: &IndexSet) -> Result<JoinZeroHomomorphism, ChainError> {
        let src_elems = s_lambda_elements(&self.domain());
        let tgt_elems = s_lambda_elements(target);
        let graph = src_elems
            .iter()
            .map(|e| {
                let img = self.apply(e);
                tgt_elems
                    .iter()
                    .position(|t| *t == img)
                    .map(ElemId)
                    .ok_or(ChainError::SupportNotContained {
                        support: img.index().into_iter().collect(),
                        within: target.clone(),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(JoinZeroHomomorphism::new(
            &s_lambda(&self.domain()),
            &s_lambda(target),
            graph,
        )?)
    }

    /// `F(f)` applied to an element whose support lies in the domain.
    pub fn lift(&self, x: &FElement) -> Result<FElement, ChainError> {
        let supp = support(x);
        let dom = self.domain();
        if !supp.is_subset(&dom) {
            return Err(ChainError::SupportNotContained {
                support: supp,
                within: dom,
            });
        }
        let ext = f_ext();
        Ok(ext.lift_hom(&ext, &|e: &ChainElement| self.apply(e), x)?)
    }
}

/// Least index set `X` with `x ∈ F(X)`: the indices occurring anywhere in `x`.
pub fn support(x: &FElement) -> IndexSet {
    let mut out = IndexSet::new();
    x.for_each_leaf(&mut |e| {
        if let Some(i) = e.index() {
            out.insert(i);
        }
    });
    out
}

/// `e_{X,Y}`: the embedding of `X` onto a lower subset of `Y`.
pub fn lower_embedding(xs: &IndexSet, ys: &IndexSet) -> Result<ChainHom, ChainError> {
    if xs.len() > ys.len() {
        return Err(ChainError::TooShort {
            source_len: xs.len(),
            target: ys.len(),
        });
    }
    s_map(xs.iter().copied().zip(ys.iter().copied()).collect())
}

/// `x[Y/X] = F(e_{X,Y})(x)`.
pub fn substitute(x: &FElement, xs: &IndexSet, ys: &IndexSet) -> Result<FElement, ChainError> {
    let supp = support(x);
    if !supp.is_subset(xs) {
        return Err(ChainError::SupportNotContained {
            support: supp,
            within: xs.clone(),
        });
    }
    lower_embedding(xs, ys)?.lift(x)
}

fn is_lower_subset(sub: &IndexSet, of: &IndexSet) -> bool {
    sub.iter().all(|&s| of.range(..s).all(|i| sub.contains(i)))
}

/// Checks `x[Y/X] = x` for `x ∈ F(X ∩ Y)` when `X ∩ Y` is a lower subset of
/// both `X` and `Y`.
pub fn fix_check(x: &FElement, xs: &IndexSet, ys: &IndexSet) -> Result<bool, ChainError> {
    let common: IndexSet = xs.intersection(ys).copied().collect();
    if !is_lower_subset(&common, xs) || !is_lower_subset(&common, ys) {
        return Err(ChainError::HypothesisViolated(common));
    }
    let supp = support(x);
    if !supp.is_subset(&common) {
        return Err(ChainError::SupportNotContained {
            support: supp,
            within: common,
        });
    }
    Ok(substitute(x, xs, ys)? == *x)
}

/// Checks that `c_ξ`, `ξ = max X`, lies below every upper bound `x` of
/// `{c_i : i ∈ X}`, by projecting `x` down to `S(Λ)` and concluding there.
pub fn supci_check(xs: &IndexSet, x: &FElement) -> Result<bool, ChainError> {
    let xi = *xs.last().ok_or(ChainError::EmptyIndexSet)?;
    let ext = f_ext();
    let c = |i| FreeElement::Base(ChainElement::C(i));
    if !xs.iter().all(|&i| ext.leq(&c(i), x)) {
        return Ok(true);
    }
    let projected = x.pi_down(0)?;
    let y = *projected.as_base().expect("rank 0");
    if !xs.iter().all(|&i| ChainElement::C(i).leq(y)) {
        return Err(ChainError::Internal(format!(
            "c_i ≤ x but c_i ≰ π(x) = {y}"
        )));
    }
    Ok(ChainElement::C(xi).leq(y) && ext.leq(&c(xi), x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::Distributivity;

    fn set(xs: &[u64]) -> IndexSet {
        xs.iter().copied().collect()
    }

    fn t(s: &str) -> FElement {
        parse_f(s).unwrap()
    }

    #[test]
    fn chain_order_normal_forms() {
        use ChainElement::*;
        assert!(C(1).leq(AB));
        assert!(C(0).leq(C(1)));
        assert!(!C(1).leq(C(0)));
        assert!(C(0).leq(BC(1)));
        assert_eq!(AC(0).join(B), AB);
        assert_eq!(C(0).join(BC(1)), BC(1));
        assert_eq!(AC(2).join(C(5)), AC(5));
        assert!(!AB.leq(AC(3)));
    }

    #[test]
    fn s_lambda_sizes_and_joins() {
        let s = s_lambda(&set(&[]));
        assert_eq!(s.poset().names(), &["0", "a", "b", "join(a,b)"]);
        assert_eq!(s_lambda(&set(&[0])).len(), 7);
        let s01 = s_lambda(&set(&[0, 1]));
        let c0 = s01.id_of("c(0)").unwrap();
        let bc1 = s01.id_of("join(b,c(1))").unwrap();
        assert_eq!(s01.join(c0, bc1), bc1);
        assert!(s01.check_laws().is_ok());
    }

    #[test]
    fn s_lambda_order_facts() {
        let s = s_lambda(&set(&[0]));
        let id = |n: &str| s.id_of(n).unwrap();
        assert_eq!(
            s.is_distributive(),
            Distributivity::Counterexample {
                c: id("c(0)"),
                a: id("a"),
                b: id("b")
            }
        );
        assert!(!s.is_strongly_distributive());
        assert_eq!(
            s.join_irreducibles(),
            [id("a"), id("b"), id("c(0)")].into_iter().collect()
        );
        assert_eq!(s.meet(id("join(a,c(0))"), id("join(b,c(0))")), id("c(0)"));
        let s01 = s_lambda(&set(&[0, 1]));
        let lower = s01.lower_set(&[s01.id_of("c(1)").unwrap()]).unwrap();
        let names: Vec<_> = lower.iter().map(|&e| s01.name(e)).collect();
        assert_eq!(names, ["0", "c(0)", "c(1)"]);
    }

    #[test]
    fn s_map_examples() {
        let id = s_map([(0, 0), (1, 1)].into_iter().collect()).unwrap();
        let h = id.to_homomorphism(&set(&[0, 1])).unwrap();
        assert_eq!(h, JoinZeroHomomorphism::identity(&s_lambda(&set(&[0, 1]))));

        let shift = s_map([(0, 5)].into_iter().collect()).unwrap();
        assert_eq!(shift.apply(&ChainElement::C(0)), ChainElement::C(5));
        assert_eq!(shift.apply(&ChainElement::AC(0)), ChainElement::AC(5));
        assert_eq!(shift.apply(&ChainElement::AB), ChainElement::AB);

        let constant = s_map([(0, 0), (1, 0)].into_iter().collect()).unwrap();
        assert!(constant.to_homomorphism(&set(&[0])).is_ok());
        assert_eq!(constant.apply(&ChainElement::BC(1)), ChainElement::BC(0));

        assert_eq!(
            s_map([(0, 3), (1, 2)].into_iter().collect()),
            Err(ChainError::NotIsotone(0, 1))
        );
    }

    #[test]
    fn supports() {
        assert_eq!(support(&t("join(a,b)")), set(&[]));
        assert_eq!(support(&t("c(3)")), set(&[3]));
        assert_eq!(
            support(&t("bowtie(join(a,c(2)), join(b,c(5)), c(5))")),
            set(&[2, 5])
        );
    }

    #[test]
    fn substitution_examples() {
        assert_eq!(substitute(&t("c(3)"), &set(&[3]), &set(&[7, 9])).unwrap(), t("c(7)"));
        let x = t("bowtie(a, b, c(5))");
        assert_eq!(substitute(&x, &set(&[0, 5]), &set(&[0, 5])).unwrap(), x);
        assert_eq!(
            substitute(&x, &set(&[0, 5]), &set(&[0, 3, 8])).unwrap(),
            t("bowtie(a, b, c(3))")
        );
        assert!(matches!(
            substitute(&x, &set(&[0]), &set(&[0, 3])),
            Err(ChainError::SupportNotContained { .. })
        ));
        assert!(matches!(
            substitute(&t("c(0)"), &set(&[0, 1]), &set(&[4])),
            Err(ChainError::TooShort { .. })
        ));
    }

    #[test]
    fn fix_examples() {
        assert!(fix_check(&t("c(1)"), &set(&[0, 1, 5]), &set(&[0, 1, 7])).unwrap());
        let x = t("join(bowtie(a,b,c(2)), c(1))");
        assert!(fix_check(&x, &set(&[1, 2]), &set(&[1, 2])).unwrap());
        assert_eq!(
            fix_check(&t("c(2)"), &set(&[1, 2]), &set(&[0, 2])),
            Err(ChainError::HypothesisViolated(set(&[2])))
        );
    }

    #[test]
    fn supci_examples() {
        let xs = set(&[0, 1]);
        assert!(supci_check(&xs, &t("c(1)")).unwrap());
        assert!(supci_check(&xs, &t("join(a,c(1))")).unwrap());
        assert!(supci_check(&xs, &t("join(a,b)")).unwrap());
        assert!(supci_check(&xs, &t("bowtie(a,b,c(0))")).unwrap());
        assert_eq!(supci_check(&set(&[]), &t("a")), Err(ChainError::EmptyIndexSet));
    }

    #[test]
    fn collapsing_map_sends_generator_to_generator() {
        let f = s_map([(0, 1)].into_iter().collect()).unwrap();
        let x = t("bowtie(a, b, c(0))");
        let y = f.lift(&x).unwrap();
        assert_eq!(y, t("bowtie(a, b, c(1))"));
        assert!(f_ext().is_reduced(&y));
    }

    #[test]
    fn printing_round_trips() {
        for s in [
            "0",
            "join(a,c(4))",
            "bowtie(a,b,join(a,b))",
            "join(c(1),bowtie(a,b,join(a,b)))",
            "bowtie(bowtie(a,b,join(a,b)),b,join(a,b))",
            "bowtie@3(a,b,c(0))",
        ] {
            let x = t(s);
            assert_eq!(print_f(&x), s);
            assert_eq!(t(&print_f(&x)), x);
        }
    }
}
