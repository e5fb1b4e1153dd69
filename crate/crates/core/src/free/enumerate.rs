use crate::order::JoinSemilattice;

use super::{FreeElement, FreeError, FreeExtension, Triple};

/// Default bound on the number of non-diagonal triples eligible under the
/// zero diagonal.
pub const DEFAULT_TRIPLE_GUARD: usize = 64;

/// Default bound on the number of elements an enumeration may produce.
pub const DEFAULT_OUTPUT_CAP: u128 = 4_000_000;

/// Eligible conflict pairs `{⟨u,v,w⟩, ⟨v,u,w⟩}` (with `u < v`) for diagonal `p`.
fn conflict_pairs<B: JoinSemilattice>(
    ext: &FreeExtension<B>,
    carrier: &[FreeElement<B::Elem>],
    p: &FreeElement<B::Elem>,
) -> Vec<Triple<B::Elem>> {
    let free: Vec<&FreeElement<B::Elem>> = carrier.iter().filter(|c| !ext.leq(c, p)).collect();
    let mut out = Vec::new();
    for (i, u) in free.iter().enumerate() {
        for v in &free[i + 1..] {
            let (u, v) = if u < v { (*u, *v) } else { (*v, *u) };
            let top = ext.join(u, v);
            for w in &free {
                if ext.leq(w, &top) {
                    out.push(Triple::new(u.clone(), v.clone(), (*w).clone()));
                }
            }
        }
    }
    out
}

/// Number of elements of `R(S)` over `carrier`: for each diagonal `p`, three
/// choices (neither, one or the other) per eligible conflict pair.
pub fn enumeration_size<B: JoinSemilattice>(ext: &FreeExtension<B>, carrier: &[B::Elem]) -> u128 {
    let carrier: Vec<_> = carrier.iter().cloned().map(FreeElement::Base).collect();
    carrier
        .iter()
        .map(|p| 3u128.saturating_pow(conflict_pairs(ext, &carrier, p).len() as u32))
        .fold(0u128, u128::saturating_add)
}

/// Every element of `R(S)` for the finite ⟨∨,0⟩-semilattice whose carrier is
/// `carrier` (which must be closed under joins and contain zero).
///
/// `triple_guard` bounds the number of non-diagonal triples eligible under the
/// zero diagonal; `output_cap` bounds the number of produced elements. Either
/// overflow is reported as an error, never truncated.
pub fn enumerate_r<B: JoinSemilattice>(
    ext: &FreeExtension<B>,
    carrier: &[B::Elem],
    triple_guard: usize,
    output_cap: u128,
) -> Result<Vec<FreeElement<B::Elem>>, FreeError> {
    let mut carrier: Vec<FreeElement<B::Elem>> = carrier.iter().cloned().map(FreeElement::Base).collect();
    carrier.sort();
    carrier.dedup();
    let level = 1 + carrier.iter().map(FreeElement::rank).max().unwrap_or(0);

    let per_diagonal: Vec<(FreeElement<B::Elem>, Vec<Triple<B::Elem>>)> = carrier
        .iter()
        .map(|p| (p.clone(), conflict_pairs(ext, &carrier, p)))
        .collect();
    let triples = 2 * per_diagonal
        .iter()
        .map(|(_, pairs)| pairs.len())
        .max()
        .unwrap_or(0);
    if triples > triple_guard {
        return Err(FreeError::TooLarge {
            triples,
            bound: triple_guard,
        });
    }
    let count = per_diagonal
        .iter()
        .map(|(_, pairs)| 3u128.saturating_pow(pairs.len() as u32))
        .fold(0u128, u128::saturating_add);
    if count > output_cap {
        return Err(FreeError::OutputTooLarge {
            count,
            cap: output_cap,
        });
    }

    let mut out = Vec::with_capacity(count as usize);
    for (p, pairs) in per_diagonal {
        let mut choice = vec![0u8; pairs.len()];
        loop {
            let rest: Vec<Triple<B::Elem>> = pairs
                .iter()
                .zip(&choice)
                .filter_map(|(t, &c)| match c {
                    1 => Some(t.clone()),
                    2 => Some(t.swapped()),
                    _ => None,
                })
                .collect();
            out.push(FreeElement::from_parts(level, p.clone(), rest));
            // odometer in base 3
            let mut i = 0;
            while i < choice.len() && choice[i] == 2 {
                choice[i] = 0;
                i += 1;
            }
            if i == choice.len() {
                break;
            }
            choice[i] += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::fixtures::{chain, square};
    use crate::order::{ElemId, FiniteJoinSemilattice};

    fn all(s: &FiniteJoinSemilattice) -> Result<Vec<FreeElement<ElemId>>, FreeError> {
        let ext = FreeExtension::new(s);
        enumerate_r(&ext, &s.ids().collect::<Vec<_>>(), DEFAULT_TRIPLE_GUARD, DEFAULT_OUTPUT_CAP)
    }

    #[test]
    fn two_chain_is_its_own_extension() {
        let s = chain(2);
        let r = all(&s).unwrap();
        assert_eq!(r, vec![FreeElement::Base(ElemId(0)), FreeElement::Base(ElemId(1))]);
    }

    #[test]
    fn trivial_semilattice() {
        let s = chain(1);
        assert_eq!(all(&s).unwrap().len(), 1);
    }

    #[test]
    fn enumerated_elements_are_reduced_and_distinct() {
        let s = square();
        let ext = FreeExtension::new(&s);
        let r = all(&s).unwrap();
        let mut sorted = r.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), r.len());
        for x in r.iter().step_by(97) {
            assert!(ext.is_reduced(x));
        }
    }

    #[test]
    fn guard_overflow_is_an_error() {
        let s = square();
        let ext = FreeExtension::new(&s);
        let ids: Vec<_> = s.ids().collect();
        assert_eq!(
            enumerate_r(&ext, &ids, 4, DEFAULT_OUTPUT_CAP),
            Err(FreeError::TooLarge { triples: 18, bound: 4 })
        );
        assert!(matches!(
            enumerate_r(&ext, &ids, 64, 100),
            Err(FreeError::OutputTooLarge { .. })
        ));
    }
}
