//! Monotone refinement: splitting an isotone chain `c_i ≤ a ∨ b` into isotone
//! chains `a_i ≤ a`, `b_i ≤ b` with `c_i = a_i ∨ b_i`.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::measure::Side;
use crate::order::{ElemId, FiniteJoinSemilattice, JoinSemilattice};

/// Default bound on `|↓a| · |↓b|` for [`refine_bruteforce`].
pub const DEFAULT_BRUTE_BOUND: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefineError {
    #[error("chain is not isotone at position {0}")]
    ChainNotIsotone(usize),
    #[error("chain element at position {0} is not below a ∨ b")]
    NotBelowAB(usize),
    #[error("semilattice is not distributive")]
    NotDistributive,
    #[error("no split of the element at position {0} below the available bound")]
    DistributivitySplitFailed(usize),
    #[error("insertion order is not a permutation of the chain positions")]
    BadOrder,
    #[error("search space {size} exceeds bound {bound}")]
    TooLarge { size: usize, bound: usize },
    #[error("constructed sequences are not a refinement: {0}")]
    InvalidWitness(String),
}

/// `a`, `b` and an isotone chain below `a ∨ b` in a finite semilattice.
#[derive(Clone, Debug)]
pub struct RefinementProblem<'s> {
    s: &'s FiniteJoinSemilattice,
    a: ElemId,
    b: ElemId,
    chain: Vec<ElemId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinementWitness {
    pub a_seq: Vec<ElemId>,
    pub b_seq: Vec<ElemId>,
}

/// Join-irreducible covers `(A_i, B_i)` behind a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinIrredCover {
    pub a_sets: Vec<BTreeSet<ElemId>>,
    pub b_sets: Vec<BTreeSet<ElemId>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BruteOutcome {
    Witness(RefinementWitness),
    Unsat,
}

impl<'s> RefinementProblem<'s> {
    pub fn new(s: &'s FiniteJoinSemilattice, a: ElemId, b: ElemId, chain: Vec<ElemId>) -> Result<Self, RefineError> {
        let ab = s.join(a, b);
        for (i, &c) in chain.iter().enumerate() {
            if !s.leq(c, ab) {
                return Err(RefineError::NotBelowAB(i));
            }
            if i > 0 && !s.leq(chain[i - 1], c) {
                return Err(RefineError::ChainNotIsotone(i));
            }
        }
        Ok(RefinementProblem { s, a, b, chain })
    }

    pub fn semilattice(&self) -> &FiniteJoinSemilattice {
        self.s
    }

    pub fn a(&self) -> ElemId {
        self.a
    }

    pub fn b(&self) -> ElemId {
        self.b
    }

    pub fn chain(&self) -> &[ElemId] {
        &self.chain
    }

    /// Checks `a_i ≤ a`, `b_i ≤ b`, `c_i = a_i ∨ b_i` and isotonicity.
    pub fn validate(&self, w: &RefinementWitness) -> Result<(), RefineError> {
        let s = self.s;
        let bad = |msg: String| Err(RefineError::InvalidWitness(msg));
        if w.a_seq.len() != self.chain.len() || w.b_seq.len() != self.chain.len() {
            return bad("length mismatch".into());
        }
        for i in 0..self.chain.len() {
            let (ai, bi) = (w.a_seq[i], w.b_seq[i]);
            if !s.leq(ai, self.a) {
                return bad(format!("a_{i} ≰ a"));
            }
            if !s.leq(bi, self.b) {
                return bad(format!("b_{i} ≰ b"));
            }
            if s.join(ai, bi) != self.chain[i] {
                return bad(format!("a_{i} ∨ b_{i} ≠ c_{i}"));
            }
            if i > 0 && !(s.leq(w.a_seq[i - 1], ai) && s.leq(w.b_seq[i - 1], bi)) {
                return bad(format!("not isotone at {i}"));
            }
        }
        Ok(())
    }

    fn checked(&self, w: RefinementWitness) -> Result<RefinementWitness, RefineError> {
        self.validate(&w)?;
        Ok(w)
    }

    /// Lexicographically least `(x, y)` with `x ≤ ua`, `y ≤ ub`, `x ∨ y = c`.
    fn split(&self, c: ElemId, ua: ElemId, ub: ElemId) -> Option<(ElemId, ElemId)> {
        let s = self.s;
        s.down(ua)
            .into_iter()
            .flat_map(|x| s.down(ub).into_iter().map(move |y| (x, y)))
            .find(|&(x, y)| s.join(x, y) == c)
    }
}

/// `a_i = a ∧ c_i`, `b_i = b ∧ c_i`.
pub fn refine_lattice(p: &RefinementProblem) -> Result<RefinementWitness, RefineError> {
    let s = p.s;
    let w = RefinementWitness {
        a_seq: p.chain.iter().map(|&c| s.meet(p.a, c)).collect(),
        b_seq: p.chain.iter().map(|&c| s.meet(p.b, c)).collect(),
    };
    p.checked(w)
}

/// Covers of each `c_i` by its maximal join-irreducibles, split between `↓a`
/// and `↓b` starting from the largest index and propagated downward through
/// `A_i = ↓A_j ∩ C_i`, `B_i = ↓B_j ∩ C_i`.
pub fn refine_strongly_distributive(
    p: &RefinementProblem,
) -> Result<(RefinementWitness, JoinIrredCover), RefineError> {
    let s = p.s;
    if !s.is_strongly_distributive() {
        return Err(RefineError::NotDistributive);
    }
    let ji = s.join_irreducibles();
    let maximal_below = |c: ElemId| -> BTreeSet<ElemId> {
        let below: Vec<ElemId> = ji.iter().copied().filter(|&q| s.leq(q, c)).collect();
        below
            .iter()
            .copied()
            .filter(|&q| !below.iter().any(|&r| r != q && s.leq(q, r)))
            .collect()
    };
    let below_some = |q: ElemId, set: &BTreeSet<ElemId>| set.iter().any(|&r| s.leq(q, r));
    let k = p.chain.len();
    let mut a_sets = vec![BTreeSet::new(); k];
    let mut b_sets = vec![BTreeSet::new(); k];
    for i in (0..k).rev() {
        let ci = maximal_below(p.chain[i]);
        let (ua, ub): (BTreeSet<ElemId>, BTreeSet<ElemId>) = if i + 1 == k {
            (
                ci.iter().copied().filter(|&q| s.leq(q, p.a)).collect(),
                ci.iter().copied().filter(|&q| s.leq(q, p.b)).collect(),
            )
        } else {
            (
                ci.iter().copied().filter(|&q| below_some(q, &a_sets[i + 1])).collect(),
                ci.iter().copied().filter(|&q| below_some(q, &b_sets[i + 1])).collect(),
            )
        };
        if ua.union(&ub).copied().collect::<BTreeSet<_>>() != ci {
            return Err(RefineError::InvalidWitness(format!("A_{i} ∪ B_{i} ≠ C_{i}")));
        }
        a_sets[i] = ua;
        b_sets[i] = ub;
    }
    let w = RefinementWitness {
        a_seq: a_sets.iter().map(|x| s.join_of(x.iter().copied())).collect(),
        b_seq: b_sets.iter().map(|x| s.join_of(x.iter().copied())).collect(),
    };
    Ok((p.checked(w)?, JoinIrredCover { a_sets, b_sets }))
}

/// Inserts chain positions one at a time in `order`, keeping a valid partial
/// witness. A position `k` between placed neighbours `i < k < j` splits
/// `c_k ≤ a_j ∨ b_j` as `a' ∨ b'` and takes `a_k = a_i ∨ a'`, `b_k = b_i ∨ b'`.
pub fn refine_sequential(p: &RefinementProblem, order: &[usize]) -> Result<RefinementWitness, RefineError> {
    let s = p.s;
    let k = p.chain.len();
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..k).collect::<Vec<_>>() {
        return Err(RefineError::BadOrder);
    }
    let mut placed: Vec<Option<(ElemId, ElemId)>> = vec![None; k];
    for &pos in order {
        let below = (0..pos).rev().find_map(|i| placed[i]);
        let above = (pos + 1..k).find_map(|j| placed[j]);
        let (ua, ub) = above.unwrap_or((p.a, p.b));
        let (x, y) = p
            .split(p.chain[pos], ua, ub)
            .ok_or(RefineError::DistributivitySplitFailed(pos))?;
        placed[pos] = Some(match below {
            Some((ai, bi)) => (s.join(ai, x), s.join(bi, y)),
            None => (x, y),
        });
    }
    let (a_seq, b_seq) = placed.into_iter().map(|e| e.expect("every position placed")).unzip();
    p.checked(RefinementWitness { a_seq, b_seq })
}

/// Backtracking over `(a_i, b_i) ∈ ↓a × ↓b` with `a_i ∨ b_i = c_i`, keeping
/// both sequences isotone.
pub fn refine_bruteforce(p: &RefinementProblem, bound: usize) -> Result<BruteOutcome, RefineError> {
    let s = p.s;
    let da = s.down(p.a);
    let db = s.down(p.b);
    let size = da.len() * db.len();
    if size > bound {
        return Err(RefineError::TooLarge { size, bound });
    }
    let candidates: Vec<Vec<(ElemId, ElemId)>> = p
        .chain
        .iter()
        .map(|&c| {
            da.iter()
                .flat_map(|&x| db.iter().map(move |&y| (x, y)))
                .filter(|&(x, y)| s.join(x, y) == c)
                .collect()
        })
        .collect();

    fn go(
        s: &FiniteJoinSemilattice,
        cands: &[Vec<(ElemId, ElemId)>],
        i: usize,
        acc: &mut Vec<(ElemId, ElemId)>,
    ) -> bool {
        if i == cands.len() {
            return true;
        }
        for &(x, y) in &cands[i] {
            if let Some(&(px, py)) = acc.last() {
                if !s.leq(px, x) || !s.leq(py, y) {
                    continue;
                }
            }
            acc.push((x, y));
            if go(s, cands, i + 1, acc) {
                return true;
            }
            acc.pop();
        }
        false
    }

    let mut acc = Vec::with_capacity(p.chain.len());
    if !go(s, &candidates, 0, &mut acc) {
        return Ok(BruteOutcome::Unsat);
    }
    let (a_seq, b_seq) = acc.into_iter().unzip();
    Ok(BruteOutcome::Witness(p.checked(RefinementWitness { a_seq, b_seq })?))
}

/// Rows `x_{i,ξ}` for `i = 0..=n` over a finite sample of indices `ξ`, with
/// the distinguished `a`, `b`, `c_ξ` and optionally a fixed side per step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequencePattern<E> {
    pub labels: Vec<String>,
    pub rows: Vec<Vec<E>>,
    pub a: E,
    pub b: E,
    pub c: Vec<E>,
    pub sides: Option<Vec<Side>>,
}

/// Indices where a condition fails, and the first failing `(row, index)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConditionStatus {
    pub failing: Vec<usize>,
    pub first: Option<(usize, usize)>,
}

impl ConditionStatus {
    pub fn holds(&self) -> bool {
        self.failing.is_empty()
    }

    fn record(&mut self, row: usize, col: usize) {
        if self.failing.last() != Some(&col) && !self.failing.contains(&col) {
            self.failing.push(col);
        }
        if self.first.is_none_or(|f| (col, row) < (f.1, f.0)) {
            self.first = Some((row, col));
        }
    }
}

/// Per-index status of the three conditions, isotonicity of every row and,
/// per row, the first sample position from which it is constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternReport {
    /// `x_{0,ξ} = 0` and `x_{n,ξ} = c_ξ`.
    pub condition1: ConditionStatus,
    /// `x_{i,ξ} ≤ c_ξ` for every `i`.
    pub condition2: ConditionStatus,
    /// `x_{i+1,ξ} ≤ a ∨ x_{i,ξ}` or `x_{i+1,ξ} ≤ b ∨ x_{i,ξ}`.
    pub condition3: ConditionStatus,
    pub rows_isotone: Vec<bool>,
    pub constant_from: Vec<usize>,
}

pub fn check_pattern<S: JoinSemilattice>(sp: &SequencePattern<S::Elem>, s: &S) -> PatternReport {
    let cols = sp.c.len();
    let n = sp.rows.len().saturating_sub(1);
    let zero = s.zero();
    let mut c1 = ConditionStatus::default();
    let mut c2 = ConditionStatus::default();
    let mut c3 = ConditionStatus::default();
    for xi in 0..cols {
        let x = |i: usize| &sp.rows[i][xi];
        if sp.rows.is_empty() || *x(0) != zero || *x(n) != sp.c[xi] {
            c1.record(0, xi);
        }
        for i in 0..sp.rows.len() {
            if !s.leq(x(i), &sp.c[xi]) {
                c2.record(i, xi);
            }
        }
        for i in 0..n {
            let on_a = s.leq(x(i + 1), &s.join(&sp.a, x(i)));
            let on_b = s.leq(x(i + 1), &s.join(&sp.b, x(i)));
            let ok = match sp.sides.as_ref().map(|v| v[i]) {
                Some(Side::A) => on_a,
                Some(Side::B) => on_b,
                None => on_a || on_b,
            };
            if !ok {
                c3.record(i + 1, xi);
            }
        }
    }
    let rows_isotone = sp
        .rows
        .iter()
        .map(|r| r.windows(2).all(|w| s.leq(&w[0], &w[1])))
        .collect();
    let constant_from = sp
        .rows
        .iter()
        .map(|r| {
            let mut k = r.len().saturating_sub(1);
            while k > 0 && r[k - 1] == r[k] {
                k -= 1;
            }
            k
        })
        .collect();
    PatternReport {
        condition1: c1,
        condition2: c2,
        condition3: c3,
        rows_isotone,
        constant_from,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{parse_f, s_lambda, FElement};
    use crate::free::FreeLevel;
    use crate::order::fixtures::{chain, square};

    fn ids(s: &FiniteJoinSemilattice, names: &[&str]) -> Vec<ElemId> {
        names.iter().map(|n| s.id_of(n).unwrap()).collect()
    }

    fn problem<'a>(s: &'a FiniteJoinSemilattice, c: &[&str]) -> RefinementProblem<'a> {
        RefinementProblem::new(s, s.id_of("a").unwrap(), s.id_of("b").unwrap(), ids(s, c)).unwrap()
    }

    #[test]
    fn lattice_branch() {
        let s = square();
        let w = refine_lattice(&problem(&s, &["0", "a", "ab"])).unwrap();
        assert_eq!(w.a_seq, ids(&s, &["0", "a", "a"]));
        assert_eq!(w.b_seq, ids(&s, &["0", "0", "b"]));
        let w = refine_lattice(&problem(&s, &["ab", "ab"])).unwrap();
        assert_eq!(w.a_seq, ids(&s, &["a", "a"]));
        assert_eq!(w.b_seq, ids(&s, &["b", "b"]));
        let w = refine_lattice(&problem(&s, &["0", "0"])).unwrap();
        assert_eq!(w.a_seq, ids(&s, &["0", "0"]));
    }

    #[test]
    fn join_irreducible_branch() {
        let s = square();
        let (w, cover) = refine_strongly_distributive(&problem(&s, &["0", "a", "ab"])).unwrap();
        assert!(problem(&s, &["0", "a", "ab"]).validate(&w).is_ok());
        assert_eq!(cover.a_sets[2], ids(&s, &["a"]).into_iter().collect());
        let (_, cover) = refine_strongly_distributive(&problem(&s, &["ab", "ab", "ab"])).unwrap();
        for i in 0..3 {
            assert_eq!(cover.a_sets[i], ids(&s, &["a"]).into_iter().collect());
            assert_eq!(cover.b_sets[i], ids(&s, &["b"]).into_iter().collect());
        }
        let (w, _) = refine_strongly_distributive(&problem(&s, &[])).unwrap();
        assert!(w.a_seq.is_empty());
        let sl = s_lambda(&[0].into_iter().collect());
        let p = RefinementProblem::new(&sl, sl.id_of("a").unwrap(), sl.id_of("b").unwrap(), ids(&sl, &["c(0)"])).unwrap();
        assert_eq!(refine_strongly_distributive(&p).unwrap_err(), RefineError::NotDistributive);
    }

    #[test]
    fn sequential_branch() {
        let s = square();
        let p = problem(&s, &["0", "a", "ab"]);
        assert!(refine_sequential(&p, &[1, 0, 2]).is_ok());
        let p = problem(&s, &["ab", "ab"]);
        assert!(refine_sequential(&p, &[1, 0]).is_ok());
        let c = chain(3);
        let p = RefinementProblem::new(&c, ElemId(1), ElemId(2), vec![ElemId(2)]).unwrap();
        let w = refine_sequential(&p, &[0]).unwrap();
        assert_eq!(c.join(w.a_seq[0], w.b_seq[0]), ElemId(2));
        assert_eq!(refine_sequential(&p, &[0, 0]), Err(RefineError::BadOrder));
    }

    #[test]
    fn brute_force() {
        let s = square();
        assert!(matches!(
            refine_bruteforce(&problem(&s, &[]), DEFAULT_BRUTE_BOUND),
            Ok(BruteOutcome::Witness(_))
        ));
        let sl = s_lambda(&[0].into_iter().collect());
        let p = RefinementProblem::new(&sl, sl.id_of("a").unwrap(), sl.id_of("b").unwrap(), ids(&sl, &["c(0)"])).unwrap();
        assert_eq!(refine_bruteforce(&p, DEFAULT_BRUTE_BOUND), Ok(BruteOutcome::Unsat));
        assert!(matches!(refine_bruteforce(&p, 3), Err(RefineError::TooLarge { .. })));
    }

    #[test]
    fn problem_guards() {
        let s = square();
        let a = s.id_of("a").unwrap();
        let err = RefinementProblem::new(&s, a, a, ids(&s, &["b"])).unwrap_err();
        assert_eq!(err, RefineError::NotBelowAB(0));
        let err = RefinementProblem::new(&s, a, s.id_of("b").unwrap(), ids(&s, &["a", "b"])).unwrap_err();
        assert_eq!(err, RefineError::ChainNotIsotone(1));
    }

    fn t(s: &str) -> FElement {
        parse_f(s).unwrap()
    }

    #[test]
    fn pattern_with_a_side_only() {
        let f = FreeLevel::new(crate::chain::ChainFamily, Some(1));
        let sp = SequencePattern {
            labels: vec!["1".into(), "2".into()],
            rows: vec![vec![t("0"), t("0")], vec![t("c(1)"), t("c(2)")]],
            a: t("a"),
            b: t("b"),
            c: vec![t("c(1)"), t("c(2)")],
            sides: Some(vec![Side::A]),
        };
        let r = check_pattern(&sp, &f);
        assert!(r.condition1.holds() && r.condition2.holds());
        assert_eq!(r.condition3.failing, vec![0, 1]);
        assert_eq!(r.condition3.first, Some((1, 0)));
        assert_eq!(r.rows_isotone, vec![true, true]);
        assert_eq!(r.constant_from, vec![0, 1]);
    }

    #[test]
    fn degenerate_pattern() {
        let f = FreeLevel::new(crate::chain::ChainFamily, Some(0));
        let sp = SequencePattern {
            labels: vec!["0".into()],
            rows: vec![vec![t("0")]],
            a: t("a"),
            b: t("b"),
            c: vec![t("c(0)")],
            sides: None,
        };
        assert!(!check_pattern(&sp, &f).condition1.holds());
        let sp = SequencePattern { c: vec![t("0")], ..sp };
        assert!(check_pattern(&sp, &f).condition1.holds());
    }
}
