use std::fmt;
use std::sync::Arc;

use super::FreeError;

/// A triple `⟨u, v, w⟩` of elements one level down.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple<E> {
    pub u: FreeElement<E>,
    pub v: FreeElement<E>,
    pub w: FreeElement<E>,
}

impl<E: Clone> Triple<E> {
    pub fn new(u: FreeElement<E>, v: FreeElement<E>, w: FreeElement<E>) -> Self {
        Triple { u, v, w }
    }

    /// `⟨v, u, w⟩`.
    pub fn swapped(&self) -> Self {
        Triple {
            u: self.v.clone(),
            v: self.u.clone(),
            w: self.w.clone(),
        }
    }

    pub fn components(&self) -> [&FreeElement<E>; 3] {
        [&self.u, &self.v, &self.w]
    }

    fn complexity(&self) -> u64 {
        self.u.complexity() + self.v.complexity() + self.w.complexity() + 1
    }

    pub(crate) fn max_rank(&self) -> u32 {
        self.u.rank().max(self.v.rank()).max(self.w.rank())
    }
}

/// Payload of a non-base element: the diagonal (its `π`) and the sorted,
/// nonempty list of non-diagonal triples.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReducedSet<E> {
    rank: u32,
    diagonal: FreeElement<E>,
    rest: Vec<Triple<E>>,
    complexity: u64,
}

impl<E> ReducedSet<E> {
    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn diagonal(&self) -> &FreeElement<E> {
        &self.diagonal
    }

    pub fn rest(&self) -> &[Triple<E>] {
        &self.rest
    }
}

/// An element of `D(S)` in canonical form.
///
/// Equality is structural: triples are kept sorted and every element sits at
/// its minimal level, so two canonical forms are equal exactly when they denote
/// the same element.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FreeElement<E> {
    Base(E),
    Reduced(Arc<ReducedSet<E>>),
}

impl<E: Clone + Ord> FreeElement<E> {
    /// Assembles a level-`rank` element from a diagonal and a list of
    /// non-diagonal triples, collapsing to the diagonal when no triple remains.
    /// Reducedness is the caller's responsibility.
    pub(crate) fn from_parts(rank: u32, diagonal: FreeElement<E>, mut rest: Vec<Triple<E>>) -> Self {
        if rest.is_empty() {
            return diagonal;
        }
        rest.sort();
        rest.dedup();
        debug_assert!(rank > diagonal.rank());
        debug_assert!(rest.iter().all(|t| t.max_rank() < rank));
        let complexity =
            3 * diagonal.complexity() + 1 + rest.iter().map(Triple::complexity).sum::<u64>();
        FreeElement::Reduced(Arc::new(ReducedSet {
            rank,
            diagonal,
            rest,
            complexity,
        }))
    }

    /// Checked constructor for a level-`rank` reduced set. Verifies conditions
    /// (2) and (3) structurally; `𝒞`-membership of the triples needs the base
    /// order and is checked by [`FreeExtension::reduced`](super::FreeExtension::reduced).
    pub(crate) fn check_shape(rank: u32, diagonal: &FreeElement<E>, rest: &[Triple<E>]) -> Result<(), FreeError> {
        if rank == 0 {
            return Err(FreeError::NotReduced("rank 0 cannot hold triples".into()));
        }
        let needed = rest
            .iter()
            .map(Triple::max_rank)
            .chain(std::iter::once(diagonal.rank()))
            .max()
            .unwrap_or(0);
        if needed >= rank {
            return Err(FreeError::LevelTooLow {
                level: rank,
                component_rank: needed,
            });
        }
        for t in rest {
            if t.u == t.v {
                return Err(FreeError::NotReduced("triple with u = v".into()));
            }
        }
        Ok(())
    }
}

impl<E> FreeElement<E> {
    pub fn rank(&self) -> u32 {
        match self {
            FreeElement::Base(_) => 0,
            FreeElement::Reduced(r) => r.rank,
        }
    }

    /// `cx(x)`: 0 on the base, otherwise the sum of `cx u + cx v + cx w + 1`
    /// over all triples including the diagonal.
    pub fn complexity(&self) -> u64 {
        match self {
            FreeElement::Base(_) => 0,
            FreeElement::Reduced(r) => r.complexity,
        }
    }

    pub fn as_base(&self) -> Option<&E> {
        match self {
            FreeElement::Base(e) => Some(e),
            FreeElement::Reduced(_) => None,
        }
    }

    pub fn as_reduced(&self) -> Option<&ReducedSet<E>> {
        match self {
            FreeElement::Base(_) => None,
            FreeElement::Reduced(r) => Some(r),
        }
    }

    pub fn is_base(&self) -> bool {
        matches!(self, FreeElement::Base(_))
    }

    /// Non-diagonal triples (empty on base elements).
    pub fn triples(&self) -> &[Triple<E>] {
        match self {
            FreeElement::Base(_) => &[],
            FreeElement::Reduced(r) => &r.rest,
        }
    }

    /// Visits every base element occurring in the tree.
    pub fn for_each_leaf(&self, f: &mut impl FnMut(&E)) {
        match self {
            FreeElement::Base(e) => f(e),
            FreeElement::Reduced(r) => {
                r.diagonal.for_each_leaf(f);
                for t in &r.rest {
                    t.u.for_each_leaf(f);
                    t.v.for_each_leaf(f);
                    t.w.for_each_leaf(f);
                }
            }
        }
    }
}

impl<E: Clone> FreeElement<E> {
    /// The canonical projection one level down: the diagonal, or the element
    /// itself on the base.
    pub fn pi(&self) -> FreeElement<E> {
        match self {
            FreeElement::Base(_) => self.clone(),
            FreeElement::Reduced(r) => r.diagonal.clone(),
        }
    }

    /// `π` applied until the rank is at most `k`.
    pub fn pi_down(&self, k: u32) -> Result<FreeElement<E>, FreeError> {
        if k > self.rank() {
            return Err(FreeError::RankTooHigh {
                requested: k,
                rank: self.rank(),
            });
        }
        let mut x = self.clone();
        while x.rank() > k {
            x = x.pi();
        }
        Ok(x)
    }

    /// The element's view at `level ≥ rank`: its diagonal and non-diagonal
    /// triples once lifted through the identification `x ↦ {⟨x, x, x⟩}`.
    pub(crate) fn at_level(&self, level: u32) -> (&FreeElement<E>, &[Triple<E>]) {
        match self {
            FreeElement::Reduced(r) if r.rank == level => (&r.diagonal, &r.rest),
            _ => (self, &[]),
        }
    }
}

impl<E: fmt::Debug> fmt::Debug for FreeElement<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FreeElement::Base(e) => write!(f, "{e:?}"),
            FreeElement::Reduced(r) => {
                write!(f, "R{}{{⟨{:?}⟩", r.rank, r.diagonal)?;
                for t in &r.rest {
                    write!(f, ", ⟨{:?}, {:?}, {:?}⟩", t.u, t.v, t.w)?;
                }
                write!(f, "}}")
            }
        }
    }
}
