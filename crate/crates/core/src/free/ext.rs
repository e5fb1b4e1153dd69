use crate::order::JoinSemilattice;

use super::{FreeElement, FreeError, Triple};

/// `D(S)` over a base semilattice `S`, with the order, joins, canonical
/// generators and functor action.
#[derive(Clone, Debug)]
pub struct FreeExtension<B> {
    base: B,
}

type Elem<B> = FreeElement<<B as JoinSemilattice>::Elem>;

impl<B: JoinSemilattice> FreeExtension<B> {
    pub fn new(base: B) -> Self {
        FreeExtension { base }
    }

    pub fn base(&self) -> &B {
        &self.base
    }

    pub fn embed(&self, e: B::Elem) -> Elem<B> {
        FreeElement::Base(e)
    }

    pub fn zero(&self) -> Elem<B> {
        FreeElement::Base(self.base.zero())
    }

    pub fn is_zero(&self, x: &Elem<B>) -> bool {
        matches!(x, FreeElement::Base(e) if *e == self.base.zero())
    }

    /// The order of `D(S)`.
    ///
    /// At a common level `n ≥ 1`, `x ≤ y` iff every triple of `x` missing from
    /// `y` (the diagonal included) has `u ≤ π(y)` or `w ≤ π(y)`. When `x` lives
    /// strictly below `y`, this reduces to `x ≤ π(y)`.
    pub fn leq(&self, x: &Elem<B>, y: &Elem<B>) -> bool {
        if let (FreeElement::Base(a), FreeElement::Base(b)) = (x, y) {
            return self.base.leq(a, b);
        }
        if x == y {
            return true;
        }
        let (rx, ry) = (x.rank(), y.rank());
        if rx < ry {
            return self.leq(x, y.as_reduced().expect("positive rank").diagonal());
        }
        let (px, tx) = x.at_level(rx);
        let (py, ty) = y.at_level(rx);
        if !self.leq(px, py) {
            return false;
        }
        tx.iter().all(|t| {
            ty.binary_search(t).is_ok() || self.leq(&t.u, py) || self.leq(&t.w, py)
        })
    }

    /// Least upper bound in `D(S)`.
    ///
    /// Works at the larger of the two ranks: the candidate projection is
    /// `π(x) ∨ π(y)` and the candidate triples the union of both triple sets.
    /// Until nothing changes, triples with `u ≤ p` or `w ≤ p` are dropped (they
    /// are absorbed by the order), and `w` is folded into `p` whenever a
    /// surviving triple has `v ≤ p` or meets its swap `⟨v, u, w⟩`; in both
    /// situations every upper bound must already lie above `w`.
    pub fn join(&self, x: &Elem<B>, y: &Elem<B>) -> Elem<B> {
        if let (FreeElement::Base(a), FreeElement::Base(b)) = (x, y) {
            return FreeElement::Base(self.base.join(a, b));
        }
        if x == y {
            return x.clone();
        }
        let level = x.rank().max(y.rank());
        let (px, tx) = x.at_level(level);
        let (py, ty) = y.at_level(level);
        let mut p = self.join(px, py);
        let mut triples: Vec<Triple<B::Elem>> = merge_sorted(tx, ty);
        loop {
            triples.retain(|t| !self.leq(&t.u, &p) && !self.leq(&t.w, &p));
            let fold: Vec<Elem<B>> = triples
                .iter()
                .filter(|t| self.leq(&t.v, &p) || triples.binary_search(&t.swapped()).is_ok())
                .map(|t| t.w.clone())
                .collect();
            if fold.is_empty() {
                break;
            }
            for w in &fold {
                p = self.join(&p, w);
            }
        }
        FreeElement::from_parts(level, p, triples)
    }

    pub fn join_all<'a, I>(&self, items: I) -> Elem<B>
    where
        I: IntoIterator<Item = &'a Elem<B>>,
        B::Elem: 'a,
    {
        items
            .into_iter()
            .fold(self.zero(), |acc, x| self.join(&acc, x))
    }

    /// The canonical generator `⋈(u, v, w)` at the least level above its
    /// components: `w` if `u = v`, `v = 0` or `w = 0`; `0` if `u = 0`; otherwise
    /// `{⟨0,0,0⟩, ⟨u,v,w⟩}`.
    pub fn bowtie(&self, u: Elem<B>, v: Elem<B>, w: Elem<B>) -> Result<Elem<B>, FreeError> {
        let level = 1 + u.rank().max(v.rank()).max(w.rank());
        self.bowtie_at(level, u, v, w)
    }

    /// `⋈(u, v, w)` computed in `R(Rˡ⁻¹(S))` for an explicit `level`.
    pub fn bowtie_at(&self, level: u32, u: Elem<B>, v: Elem<B>, w: Elem<B>) -> Result<Elem<B>, FreeError> {
        let component_rank = u.rank().max(v.rank()).max(w.rank());
        if level <= component_rank {
            return Err(FreeError::LevelTooLow {
                level,
                component_rank,
            });
        }
        if !self.leq(&w, &self.join(&u, &v)) {
            return Err(FreeError::NotInC);
        }
        if u == v || self.is_zero(&v) || self.is_zero(&w) {
            return Ok(w);
        }
        if self.is_zero(&u) {
            return Ok(self.zero());
        }
        Ok(FreeElement::from_parts(level, self.zero(), vec![Triple::new(u, v, w)]))
    }

    /// Checked construction of a level-`rank` element from its diagonal and
    /// non-diagonal triples, verifying conditions (1)–(3) and membership in `𝒞`.
    pub fn reduced(
        &self,
        rank: u32,
        diagonal: Elem<B>,
        rest: Vec<Triple<B::Elem>>,
    ) -> Result<Elem<B>, FreeError> {
        FreeElement::check_shape(rank, &diagonal, &rest)?;
        for t in &rest {
            if !self.leq(&t.w, &self.join(&t.u, &t.v)) {
                return Err(FreeError::NotInC);
            }
            if t.components().iter().any(|c| self.leq(c, &diagonal)) {
                return Err(FreeError::NotReduced("component below the diagonal".into()));
            }
            if rest.contains(&t.swapped()) {
                return Err(FreeError::NotReduced("both ⟨u,v,w⟩ and ⟨v,u,w⟩".into()));
            }
        }
        Ok(FreeElement::from_parts(rank, diagonal, rest))
    }

    /// Re-checks conditions (1)–(3) on a stored element, recursively.
    pub fn is_reduced(&self, x: &Elem<B>) -> bool {
        let Some(r) = x.as_reduced() else {
            return true;
        };
        let p = r.diagonal();
        FreeElement::check_shape(r.rank(), p, r.rest()).is_ok()
            && self.is_reduced(p)
            && r.rest().iter().all(|t| {
                t.components().iter().all(|c| self.is_reduced(c) && !self.leq(c, p))
                    && self.leq(&t.w, &self.join(&t.u, &t.v))
                    && r.rest().binary_search(&t.swapped()).is_err()
            })
    }

    /// `D(f)` for a ⟨∨,0⟩-homomorphism `f` on the bases: the unique extension
    /// with `⋈(u, v, w) ↦ ⋈(f u, f v, f w)`, applied level by level.
    pub fn lift_hom<B2, F>(&self, target: &FreeExtension<B2>, f: &F, x: &Elem<B>) -> Result<Elem<B2>, FreeError>
    where
        B2: JoinSemilattice,
        F: Fn(&B::Elem) -> B2::Elem,
    {
        match x {
            FreeElement::Base(e) => Ok(FreeElement::Base(f(e))),
            FreeElement::Reduced(r) => {
                let mut acc = self.lift_hom(target, f, r.diagonal())?;
                for t in r.rest() {
                    let g = target.bowtie_at(
                        r.rank(),
                        self.lift_hom(target, f, &t.u)?,
                        self.lift_hom(target, f, &t.v)?,
                        self.lift_hom(target, f, &t.w)?,
                    )?;
                    acc = target.join(&acc, &g);
                }
                Ok(acc)
            }
        }
    }
}

fn merge_sorted<T: Ord + Clone>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i].clone());
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// A ⟨∨,0⟩-semilattice view of `D(S)`: elements of rank at most `depth`
/// (unbounded when `None`).
#[derive(Clone, Debug)]
pub struct FreeLevel<B> {
    ext: FreeExtension<B>,
    depth: Option<u32>,
}

impl<B: JoinSemilattice> FreeLevel<B> {
    pub fn new(base: B, depth: Option<u32>) -> Self {
        FreeLevel {
            ext: FreeExtension::new(base),
            depth,
        }
    }

    pub fn ext(&self) -> &FreeExtension<B> {
        &self.ext
    }

    pub fn depth(&self) -> Option<u32> {
        self.depth
    }

    pub fn contains(&self, x: &Elem<B>) -> bool {
        self.depth.is_none_or(|d| x.rank() <= d)
    }
}

impl<B: JoinSemilattice> JoinSemilattice for FreeLevel<B> {
    type Elem = Elem<B>;

    fn zero(&self) -> Self::Elem {
        self.ext.zero()
    }
    fn leq(&self, x: &Self::Elem, y: &Self::Elem) -> bool {
        self.ext.leq(x, y)
    }
    fn join(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        self.ext.join(x, y)
    }
}

impl<B: JoinSemilattice> JoinSemilattice for FreeExtension<B> {
    type Elem = Elem<B>;

    fn zero(&self) -> Self::Elem {
        FreeExtension::zero(self)
    }
    fn leq(&self, x: &Self::Elem, y: &Self::Elem) -> bool {
        FreeExtension::leq(self, x, y)
    }
    fn join(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        FreeExtension::join(self, x, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::fixtures::square;
    use crate::order::{ElemId, FiniteJoinSemilattice};

    fn setup() -> (FreeExtension<FiniteJoinSemilattice>, [FreeElement<ElemId>; 4]) {
        let ext = FreeExtension::new(square());
        let e = |i| FreeElement::Base(ElemId(i));
        (ext, [e(0), e(1), e(2), e(3)])
    }

    #[test]
    fn bowtie_cases() {
        let (ext, [zero, a, b, ab]) = setup();
        assert_eq!(ext.bowtie(a.clone(), a.clone(), a.clone()).unwrap(), a);
        assert_eq!(ext.bowtie(zero.clone(), b.clone(), zero.clone()).unwrap(), zero);
        assert_eq!(ext.bowtie(zero.clone(), b.clone(), b.clone()).unwrap(), zero);
        let x = ext.bowtie(a.clone(), b.clone(), ab.clone()).unwrap();
        let r = x.as_reduced().unwrap();
        assert_eq!(r.rank(), 1);
        assert_eq!(r.diagonal(), &zero);
        assert_eq!(r.rest(), &[Triple::new(a.clone(), b.clone(), ab.clone())]);
        assert_eq!(ext.bowtie(a.clone(), a.clone(), ab.clone()), Err(FreeError::NotInC));
    }

    #[test]
    fn order_on_generators() {
        let (ext, [zero, a, b, ab]) = setup();
        let x = ext.bowtie(a.clone(), b.clone(), ab.clone()).unwrap();
        assert!(ext.leq(&x, &a));
        assert!(!ext.leq(&a, &x));
        assert!(ext.leq(&x, &x));
        assert!(ext.leq(&zero, &x));
        assert!(!ext.leq(&x, &b));
    }

    #[test]
    fn join_of_swapped_generators_is_w() {
        let (ext, [zero, a, b, ab]) = setup();
        let x = ext.bowtie(a.clone(), b.clone(), ab.clone()).unwrap();
        let y = ext.bowtie(b.clone(), a.clone(), ab.clone()).unwrap();
        assert_eq!(ext.join(&x, &y), ab);
        assert_eq!(ext.join(&x, &zero), x);
        assert_eq!(ext.join(&zero, &x), x);
    }

    #[test]
    fn projections() {
        let (ext, [zero, a, b, ab]) = setup();
        let x = ext.bowtie(a.clone(), b.clone(), ab.clone()).unwrap();
        assert_eq!(x.pi(), zero);
        assert_eq!(a.pi(), a);
        assert_eq!(x.pi_down(0).unwrap(), zero);
        assert_eq!(x.pi_down(1).unwrap(), x);
        assert_eq!(a.pi_down(1), Err(FreeError::RankTooHigh { requested: 1, rank: 0 }));
    }

    #[test]
    fn complexity_counts_every_triple() {
        let (ext, [_, a, b, ab]) = setup();
        let x = ext.bowtie(a.clone(), b.clone(), ab.clone()).unwrap();
        assert_eq!(a.complexity(), 0);
        assert_eq!(x.complexity(), 2);
        let y = ext.bowtie(x.clone(), b.clone(), ab.clone()).unwrap();
        // ⟨0,0,0⟩ contributes 1, ⟨x, b, ab⟩ contributes 2 + 0 + 0 + 1
        assert_eq!(y.rank(), 2);
        assert_eq!(y.complexity(), 4);
    }

    #[test]
    fn rank_two_projection_chain() {
        let (ext, [zero, a, b, ab]) = setup();
        let x = ext.bowtie(a.clone(), b.clone(), ab.clone()).unwrap();
        let diag = ext.join(&x, &a);
        assert_eq!(diag, a, "x ≤ a");
        let z = ext.bowtie(b.clone(), a.clone(), ab.clone()).unwrap();
        let y1 = ext.bowtie(ab.clone(), x.clone(), ab.clone()).unwrap();
        let y = ext.join(&y1, &z);
        assert_eq!(y.rank(), 2);
        let p1 = y.pi_down(1).unwrap();
        assert_eq!(p1, y.as_reduced().unwrap().diagonal().clone());
        assert_eq!(p1, z);
        assert_eq!(y.pi_down(0).unwrap(), zero);
    }

    #[test]
    fn checked_constructor_rejects_conflicts() {
        let (ext, [zero, a, b, ab]) = setup();
        let t = Triple::new(a.clone(), b.clone(), ab.clone());
        let err = ext.reduced(1, zero.clone(), vec![t.clone(), t.swapped()]).unwrap_err();
        assert!(matches!(err, FreeError::NotReduced(_)));
        let err = ext.reduced(1, a.clone(), vec![t.clone()]).unwrap_err();
        assert!(matches!(err, FreeError::NotReduced(_)));
        let ok = ext.reduced(1, zero, vec![t]).unwrap();
        assert!(ext.is_reduced(&ok));
    }
}
