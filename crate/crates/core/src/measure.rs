//! Poset measures, the V-measure condition and the chain measure that admits
//! no decomposition of its top step.

use std::collections::VecDeque;

use thiserror::Error;

use crate::chain::{f_ext, ChainElement, ChainFamily, FElement};
use crate::free::{FreeElement, FreeLevel};
use crate::order::{BitMatrix, ElemId, FinitePoset, JoinSemilattice};
use crate::refine::SequencePattern;

/// Default bound on the size of an interval `[x, y]` searched for
/// decompositions.
pub const DEFAULT_INTERVAL_BOUND: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeasureError {
    #[error("measure table has {got} entries, expected {expected}")]
    TableSize { got: usize, expected: usize },
    #[error("interval [{x}, {y}] has {size} elements (bound {bound})")]
    SearchSpaceTooLarge { x: String, y: String, size: usize, bound: usize },
    #[error("value semilattice cannot be enumerated; pass the (a, b) pairs explicitly")]
    PairsRequired,
    #[error("{0} is not an element of the poset")]
    IndexOutOfPoset(String),
    #[error("{0} and {1} do not form an increasing chain")]
    NotAChain(String, String),
}

/// A map `μ: P × P → S`, stored row-major.
#[derive(Clone, Debug)]
pub struct PosetMeasure<S: JoinSemilattice> {
    poset: FinitePoset,
    values: S,
    mu: Vec<S::Elem>,
}

/// First failure of the measure axioms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `x ≤ y` but `μ(x, y) ≠ 0`.
    NonzeroOnComparable { x: ElemId, y: ElemId },
    /// `μ(x, z) ≰ μ(x, y) ∨ μ(y, z)`.
    Triangle { x: ElemId, y: ElemId, z: ElemId },
}

/// Which bound a decomposition step satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    A,
    B,
}

/// `x = z_0 ≤ z_1 ≤ … ≤ z_n = y` with a side for every step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub chain: Vec<ElemId>,
    pub sides: Vec<Side>,
}

/// `x ≤ y` and `μ(y, x) ≤ a ∨ b`, yet no decomposition of `[x, y]` exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FailureWitness<E> {
    pub x: ElemId,
    pub y: ElemId,
    pub a: E,
    pub b: E,
}

impl<S: JoinSemilattice> PosetMeasure<S> {
    pub fn new(poset: FinitePoset, values: S, mu: Vec<S::Elem>) -> Result<Self, MeasureError> {
        let expected = poset.len() * poset.len();
        if mu.len() != expected {
            return Err(MeasureError::TableSize { got: mu.len(), expected });
        }
        Ok(PosetMeasure { poset, values, mu })
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }

    pub fn values(&self) -> &S {
        &self.values
    }

    pub fn value(&self, x: ElemId, y: ElemId) -> S::Elem {
        self.mu[x.0 * self.poset.len() + y.0].clone()
    }

    fn at(&self, x: usize, y: usize) -> &S::Elem {
        &self.mu[x * self.poset.len() + y]
    }

    /// Checks `x ≤ y ⟹ μ(x, y) = 0` over all pairs, then the triangular
    /// inequality over all triples, in id order.
    pub fn is_poset_measure(&self) -> Result<(), Violation> {
        let n = self.poset.len();
        let s = &self.values;
        let zero = s.zero();
        for x in 0..n {
            for y in 0..n {
                if self.poset.leq(ElemId(x), ElemId(y)) && *self.at(x, y) != zero {
                    return Err(Violation::NonzeroOnComparable {
                        x: ElemId(x),
                        y: ElemId(y),
                    });
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if !s.leq(self.at(x, z), &s.join(self.at(x, y), self.at(y, z))) {
                        return Err(Violation::Triangle {
                            x: ElemId(x),
                            y: ElemId(y),
                            z: ElemId(z),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Breadth-first search for a decomposition of `[x, y]` whose steps have
    /// `μ(z_{i+1}, z_i) ≤ a` or `≤ b`. Chains never repeat an element.
    pub fn find_decomposition(
        &self,
        x: ElemId,
        y: ElemId,
        a: &S::Elem,
        b: &S::Elem,
        bound: usize,
    ) -> Result<Option<Decomposition>, MeasureError> {
        let interval: Vec<ElemId> = self
            .poset
            .ids()
            .filter(|&z| self.poset.leq(x, z) && self.poset.leq(z, y))
            .collect();
        if interval.len() > bound {
            return Err(MeasureError::SearchSpaceTooLarge {
                x: self.poset.name(x).into(),
                y: self.poset.name(y).into(),
                size: interval.len(),
                bound,
            });
        }
        let s = &self.values;
        let mut prev: Vec<Option<(ElemId, Side)>> = vec![None; self.poset.len()];
        let mut seen = vec![false; self.poset.len()];
        seen[x.0] = true;
        let mut queue = VecDeque::from([x]);
        while let Some(z) = queue.pop_front() {
            if z == y {
                let mut chain = vec![y];
                let mut sides = Vec::new();
                let mut cur = y;
                while let Some((p, side)) = prev[cur.0] {
                    chain.push(p);
                    sides.push(side);
                    cur = p;
                }
                chain.reverse();
                sides.reverse();
                if chain.len() == 1 {
                    chain.push(y);
                    sides.push(Side::A);
                }
                return Ok(Some(Decomposition { chain, sides }));
            }
            for &next in &interval {
                if seen[next.0] || !self.poset.leq(z, next) {
                    continue;
                }
                let step = self.at(next.0, z.0);
                let side = if s.leq(step, a) {
                    Side::A
                } else if s.leq(step, b) {
                    Side::B
                } else {
                    continue;
                };
                seen[next.0] = true;
                prev[next.0] = Some((z, side));
                queue.push_back(next);
            }
        }
        Ok(None)
    }

    /// Tests the V-measure condition for every `x ≤ y` and every `(a, b)` in
    /// `pairs`, or in `S × S` when `pairs` is `None` and `S` is enumerable.
    ///
    /// Pairs `(x, y)` are visited with `x` increasing and, for each `x`, `y`
    /// decreasing; the first failure is returned.
    pub fn is_v_measure(
        &self,
        pairs: Option<&[(S::Elem, S::Elem)]>,
        bound: usize,
    ) -> Result<Option<FailureWitness<S::Elem>>, MeasureError> {
        let owned;
        let pairs = match pairs {
            Some(p) => p,
            None => {
                let all = self.values.elements().ok_or(MeasureError::PairsRequired)?;
                owned = all
                    .iter()
                    .flat_map(|a| all.iter().map(move |b| (a.clone(), b.clone())))
                    .collect::<Vec<_>>();
                &owned
            }
        };
        let s = &self.values;
        for x in self.poset.ids() {
            for y in self.poset.ids().rev() {
                if x == y || !self.poset.leq(x, y) {
                    continue;
                }
                let back = self.at(y.0, x.0);
                for (a, b) in pairs {
                    if !s.leq(back, &s.join(a, b)) {
                        continue;
                    }
                    if self.find_decomposition(x, y, a, b, bound)?.is_none() {
                        return Ok(Some(FailureWitness {
                            x,
                            y,
                            a: a.clone(),
                            b: b.clone(),
                        }));
                    }
                }
            }
        }
        Ok(None)
    }

    /// The family `x_{i,ξ} = μ(ξ, z_{n-i})` for `i = 0..=n` and `ξ` ranging
    /// over `indices`, with the distinguished `a`, `b` and `c_ξ` attached.
    pub fn extension_sequences(
        &self,
        indices: &[&str],
        chain: &[&str],
        a: S::Elem,
        b: S::Elem,
        c: Vec<S::Elem>,
    ) -> Result<SequencePattern<S::Elem>, MeasureError> {
        let lookup = |name: &str| {
            self.poset
                .id_of(name)
                .ok_or_else(|| MeasureError::IndexOutOfPoset(name.to_string()))
        };
        let xis = indices.iter().map(|n| lookup(n)).collect::<Result<Vec<_>, _>>()?;
        let zs = chain.iter().map(|n| lookup(n)).collect::<Result<Vec<_>, _>>()?;
        if zs.is_empty() {
            return Err(MeasureError::NotAChain(String::new(), String::new()));
        }
        for w in zs.windows(2) {
            if !self.poset.leq(w[0], w[1]) {
                return Err(MeasureError::NotAChain(
                    self.poset.name(w[0]).into(),
                    self.poset.name(w[1]).into(),
                ));
            }
        }
        if c.len() != xis.len() {
            return Err(MeasureError::TableSize {
                got: c.len(),
                expected: xis.len(),
            });
        }
        let n = zs.len() - 1;
        let rows = (0..=n)
            .map(|i| xis.iter().map(|&xi| self.value(xi, zs[n - i])).collect())
            .collect();
        Ok(SequencePattern {
            labels: indices.iter().map(|s| s.to_string()).collect(),
            rows,
            a,
            b,
            c,
            sides: None,
        })
    }
}

/// Values of the chain measures: `F(Λ)` truncated at a depth.
pub type ChainValues = FreeLevel<ChainFamily>;

fn base(e: ChainElement) -> FElement {
    FreeElement::Base(e)
}

/// The measure on the chain `0 < 1 < … < n` with `μ(ξ, η) = 0` for `ξ ≤ η`,
/// `c_ξ` for `η < ξ < n` and `a ∨ b` for `η < ξ = n`.
pub fn counterexample_measure(n: u64, depth: u32) -> PosetMeasure<ChainValues> {
    let poset = FinitePoset::chain(n as usize + 1);
    let mut mu = Vec::new();
    for xi in 0..=n {
        for eta in 0..=n {
            mu.push(base(if xi <= eta {
                ChainElement::Zero
            } else if xi < n {
                ChainElement::C(xi)
            } else {
                ChainElement::AB
            }));
        }
    }
    PosetMeasure::new(poset, FreeLevel::new(ChainFamily, Some(depth)), mu).expect("square table")
}

/// `counterexample_measure(n)` extended by a point `m` with `0 < m < n`,
/// incomparable to `1, …, n-1`. The new values refine `c_ξ` through the
/// isotone split `c_ξ = a_ξ ∨ b_ξ` with `a_ξ = ⋁_{η ≤ ξ} ⋈(a, b, c_η)` and
/// `b_ξ = ⋁_{η ≤ ξ} ⋈(b, a, c_η)`, so `0 ≤ m ≤ n` decomposes the top step.
pub fn midpoint_extension(n: u64, depth: u32) -> PosetMeasure<ChainValues> {
    assert!(n >= 1);
    let ext = f_ext();
    let top = n as usize;
    let m = top + 1;
    let mut names: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
    names.push("m".into());
    let size = names.len();
    let leq = BitMatrix::from_fn(size, |x, y| {
        x == y || (x <= top && y <= top && x <= y) || (x == 0) || (x == m && y == top)
    });
    let poset = FinitePoset::new(names, leq).expect("chain plus a midpoint is a poset");
    let split = |first: ChainElement, second: ChainElement, xi: u64| -> FElement {
        let parts: Vec<FElement> = (0..=xi)
            .map(|eta| {
                ext.bowtie(base(first), base(second), base(ChainElement::C(eta)))
                    .expect("c_η ≤ a ∨ b")
            })
            .collect();
        ext.join_all(parts.iter())
    };
    let base_mu = counterexample_measure(n, depth);
    let mut mu = Vec::with_capacity(size * size);
    for x in 0..size {
        for y in 0..size {
            let v = if poset.leq(ElemId(x), ElemId(y)) {
                base(ChainElement::Zero)
            } else if x <= top && y <= top {
                base_mu.value(ElemId(x), ElemId(y))
            } else if x == m {
                // y ∈ {0, …, n-1}
                base(ChainElement::A)
            } else if x == top {
                base(ChainElement::B)
            } else {
                split(ChainElement::B, ChainElement::A, x as u64)
            };
            mu.push(v);
        }
    }
    PosetMeasure::new(poset, FreeLevel::new(ChainFamily, Some(depth)), mu).expect("square table")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::parse_f;
    use crate::order::FiniteJoinSemilattice;
    use crate::refine::check_pattern;

    fn t(s: &str) -> FElement {
        parse_f(s).unwrap()
    }

    fn ab_pair() -> Vec<(FElement, FElement)> {
        vec![(t("a"), t("b"))]
    }

    #[test]
    fn counterexample_values() {
        let m = counterexample_measure(3, 1);
        assert_eq!(m.value(ElemId(2), ElemId(0)), t("c(2)"));
        assert_eq!(m.value(ElemId(0), ElemId(2)), t("0"));
        assert_eq!(m.value(ElemId(3), ElemId(1)), t("join(a,b)"));
        assert_eq!(m.is_poset_measure(), Ok(()));
    }

    #[test]
    fn counterexample_fails_at_the_top_step() {
        for n in 2..=4 {
            let m = counterexample_measure(n, 1);
            let w = m.is_v_measure(Some(&ab_pair()), DEFAULT_INTERVAL_BOUND).unwrap().unwrap();
            assert_eq!((w.x, w.y), (ElemId(0), ElemId(n as usize)));
            assert_eq!((w.a, w.b), (t("a"), t("b")));
        }
    }

    #[test]
    fn corrupted_diagonal_is_reported() {
        let p = FinitePoset::chain(2);
        let s = crate::order::fixtures::square();
        let mu = vec![ElemId(1), ElemId(0), ElemId(0), ElemId(0)];
        let m = PosetMeasure::new(p, s, mu).unwrap();
        assert_eq!(
            m.is_poset_measure(),
            Err(Violation::NonzeroOnComparable {
                x: ElemId(0),
                y: ElemId(0)
            })
        );
    }

    #[test]
    fn zero_measure_is_a_v_measure() {
        let p = FinitePoset::chain(3);
        let s: FiniteJoinSemilattice = crate::order::fixtures::square();
        let m = PosetMeasure::new(p, s, vec![ElemId(0); 9]).unwrap();
        assert_eq!(m.is_v_measure(None, DEFAULT_INTERVAL_BOUND), Ok(None));
        let d = m
            .find_decomposition(ElemId(0), ElemId(0), &ElemId(0), &ElemId(0), 8)
            .unwrap()
            .unwrap();
        assert_eq!(d.chain.len(), 2);
    }

    #[test]
    fn midpoint_extension_is_an_honest_extension() {
        for n in 2..=4 {
            let m = midpoint_extension(n, 2);
            assert_eq!(m.is_poset_measure(), Ok(()));
            let base_m = counterexample_measure(n, 2);
            for x in 0..=n as usize {
                for y in 0..=n as usize {
                    assert_eq!(m.value(ElemId(x), ElemId(y)), base_m.value(ElemId(x), ElemId(y)));
                }
            }
            let mid = m.poset().id_of("m").unwrap();
            let d = m
                .find_decomposition(ElemId(0), ElemId(n as usize), &t("a"), &t("b"), 64)
                .unwrap()
                .unwrap();
            assert_eq!(d.chain, vec![ElemId(0), mid, ElemId(n as usize)]);
            assert_eq!(d.sides, vec![Side::A, Side::B]);
        }
    }

    #[test]
    fn extension_sequences_read_the_table() {
        let m = counterexample_measure(3, 1);
        let c = vec![t("c(1)"), t("c(2)")];
        let sp = m
            .extension_sequences(&["1", "2"], &["0", "3"], t("a"), t("b"), c.clone())
            .unwrap();
        assert_eq!(sp.rows[0], vec![t("0"), t("0")]);
        assert_eq!(sp.rows[1], c);
        assert!(matches!(
            m.extension_sequences(&["1"], &["0", "7"], t("a"), t("b"), vec![t("c(1)")]),
            Err(MeasureError::IndexOutOfPoset(_))
        ));

        let ext = midpoint_extension(3, 2);
        let sp = ext
            .extension_sequences(&["1", "2"], &["0", "m", "3"], t("a"), t("b"), c)
            .unwrap();
        let report = check_pattern(&sp, ext.values());
        assert!(report.condition1.holds() && report.condition3.holds());
        assert!(report.condition2.holds());
    }
}
