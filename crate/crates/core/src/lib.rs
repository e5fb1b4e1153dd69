pub mod chain;
pub mod congruence;
pub mod corpus;
pub mod dot;
pub mod free;
pub mod json;
pub mod measure;
pub mod order;
pub mod refine;
pub mod sample;
pub mod suites;

pub use free::{FreeElement, FreeError, FreeExtension, Triple};
pub use order::{
    validate_semilattice, Distributivity, ElemId, FiniteJoinSemilattice, FinitePoset, JoinSemilattice,
    JoinZeroHomomorphism, OrderError,
};
