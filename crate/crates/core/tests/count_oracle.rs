//! Element counts of R(S) recomputed on a bitmask model of S, without the
//! library's order or enumeration.

use meetless::chain::{f_ext, s_lambda_elements, IndexSet};
use meetless::free::{enumerate_r, enumeration_size, FreeError, DEFAULT_OUTPUT_CAP, DEFAULT_TRIPLE_GUARD};
use meetless::suites::R_OF_SQUARE;
use meetless::FiniteJoinSemilattice;

/// A finite semilattice of down-sets of join-irreducibles, as bitmasks.
/// `close` adds every irreducible forced by the relations.
struct Model {
    elems: Vec<u32>,
    close: fn(u32) -> u32,
}

impl Model {
    fn leq(&self, x: u32, y: u32) -> bool {
        x & !y == 0
    }

    fn join(&self, x: u32, y: u32) -> u32 {
        (self.close)(x | y)
    }

    /// Per diagonal `p`: pairs `{u, v}` of distinct elements outside `↓p`
    /// and `w ≤ u ∨ v` outside `↓p` each give a conflict pair with three
    /// states (neither triple, one, or the other).
    fn conflict_pairs(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for &p in &self.elems {
            let free: Vec<u32> = self.elems.iter().copied().filter(|&e| !self.leq(e, p)).collect();
            let mut pairs = 0u32;
            for (i, &u) in free.iter().enumerate() {
                for &v in &free[i + 1..] {
                    let top = self.join(u, v);
                    pairs += free.iter().filter(|&&w| self.leq(w, top)).count() as u32;
                }
            }
            out.push(pairs);
        }
        out
    }

    fn r_count(&self) -> u128 {
        self.conflict_pairs().iter().map(|&k| 3u128.pow(k)).sum()
    }
}

// bits: a = 1, b = 2, c_0 = 4, c_1 = 8; c_0 ≤ c_1 ≤ a ∨ b
fn close_square(x: u32) -> u32 {
    x
}

fn close_one(x: u32) -> u32 {
    if x & 3 == 3 {
        x | 4
    } else {
        x
    }
}

fn close_two(x: u32) -> u32 {
    let mut x = x;
    if x & 3 == 3 {
        x |= 12;
    }
    if x & 8 != 0 {
        x |= 4;
    }
    x
}

fn square() -> Model {
    Model {
        elems: vec![0, 1, 2, 3],
        close: close_square,
    }
}

fn s_one() -> Model {
    Model {
        elems: vec![0, 1, 2, 7, 4, 5, 6],
        close: close_one,
    }
}

fn s_two() -> Model {
    Model {
        elems: vec![0, 1, 2, 15, 4, 5, 6, 12, 13, 14],
        close: close_two,
    }
}

#[test]
fn models_are_closed_under_joins() {
    for m in [square(), s_one(), s_two()] {
        for &x in &m.elems {
            for &y in &m.elems {
                assert!(m.elems.contains(&m.join(x, y)));
            }
        }
    }
}

#[test]
fn square_count_matches_pinned_value() {
    let count = square().r_count();
    assert_eq!(count, 3u128.pow(9) + 9 + 9 + 1);
    assert_eq!(count, R_OF_SQUARE as u128);
}

#[test]
fn enumeration_matches_the_model() {
    let ext = f_ext();
    let empty = s_lambda_elements(&IndexSet::new());
    let elems = enumerate_r(&ext, &empty, DEFAULT_TRIPLE_GUARD, DEFAULT_OUTPUT_CAP).unwrap();
    assert_eq!(elems.len(), R_OF_SQUARE);

    let one = s_lambda_elements(&[0].into_iter().collect());
    assert_eq!(enumeration_size(&ext, &one), s_one().r_count());
    let two = s_lambda_elements(&[0, 1].into_iter().collect());
    let widest = 2 * *s_two().conflict_pairs().iter().max().unwrap() as usize;
    assert_eq!(
        enumerate_r(&ext, &two, 0, DEFAULT_OUTPUT_CAP).unwrap_err(),
        FreeError::TooLarge { triples: widest, bound: 0 }
    );
}

#[test]
fn guard_reports_the_square_triple_count() {
    let ext = f_ext();
    let empty = s_lambda_elements(&IndexSet::new());
    assert_eq!(
        enumerate_r(&ext, &empty, 17, DEFAULT_OUTPUT_CAP).unwrap_err(),
        FreeError::TooLarge { triples: 18, bound: 17 }
    );
    assert!(enumerate_r(&ext, &empty, 18, DEFAULT_OUTPUT_CAP).is_ok());
    assert!(matches!(
        enumerate_r(&ext, &empty, 18, 1000),
        Err(FreeError::OutputTooLarge { count: 19702, cap: 1000 })
    ));
}

#[test]
fn small_bases() {
    for (n, expected) in [(1, 1), (2, 2), (3, 9 + 1 + 1)] {
        let s = FiniteJoinSemilattice::from_poset(meetless::FinitePoset::chain(n)).unwrap();
        let ext = meetless::FreeExtension::new(&s);
        let carrier: Vec<_> = s.ids().collect();
        let r = enumerate_r(&ext, &carrier, DEFAULT_TRIPLE_GUARD, DEFAULT_OUTPUT_CAP).unwrap();
        assert_eq!(r.len(), expected, "chain of {n}");
    }
    let three = Model {
        elems: vec![0, 1, 3],
        close: close_square,
    };
    assert_eq!(three.r_count(), 11);
}
