//! The one-step free distributive extension `R(S)` of a ⟨∨,0⟩-semilattice and
//! its iterates `Rⁿ(S)`, whose increasing union is `D(S)`.
//!
//! An element of `R(S)` is a *reduced* finite set of triples `⟨u, v, w⟩` with
//! `w ≤ u ∨ v`: it has exactly one diagonal triple `⟨p, p, p⟩` (its projection
//! `π`), never both `⟨u, v, w⟩` and `⟨v, u, w⟩`, and every other triple has all
//! three components outside `↓p`. Each `x ∈ S` is identified with `{⟨x, x, x⟩}`,
//! so an element of `Rⁿ(S)` is stored at the least level containing it; that
//! level is its rank.

mod element;
mod enumerate;
mod ext;
pub mod term;

pub use element::{FreeElement, ReducedSet, Triple};
pub use enumerate::{enumerate_r, enumeration_size, DEFAULT_OUTPUT_CAP, DEFAULT_TRIPLE_GUARD};
pub use ext::{FreeExtension, FreeLevel};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FreeError {
    #[error("triple is not in 𝒞: w is not below u ∨ v")]
    NotInC,
    #[error("cannot project an element of rank {rank} to level {requested}")]
    RankTooHigh { requested: u32, rank: u32 },
    #[error("level {level} cannot hold components of rank {component_rank}")]
    LevelTooLow { level: u32, component_rank: u32 },
    #[error("enumeration too large: {triples} non-diagonal triples (bound {bound})")]
    TooLarge { triples: usize, bound: usize },
    #[error("enumeration would produce {count} elements (cap {cap})")]
    OutputTooLarge { count: u128, cap: u128 },
    #[error("not a reduced set: {0}")]
    NotReduced(String),
}
