//! Seeded generators of index sets, chain maps and elements of `F(Λ)` and
//! `R(S)`, used by the property suites.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::chain::{f_ext, ChainElement, ChainIndex, FElement, IndexSet};
use crate::free::{FreeElement, FreeExtension, Triple};
use crate::order::JoinSemilattice;

/// A random subset of `0..universe` with at most `max_len` elements.
pub fn index_set<R: Rng>(rng: &mut R, universe: u64, max_len: usize) -> IndexSet {
    let len = rng.gen_range(0..=max_len.min(universe as usize));
    let mut all: Vec<u64> = (0..universe).collect();
    all.shuffle(rng);
    all.into_iter().take(len).collect()
}

pub fn chain_element<R: Rng>(rng: &mut R, indices: &IndexSet) -> ChainElement {
    let idx: Vec<ChainIndex> = indices.iter().copied().collect();
    let pick = rng.gen_range(0..4 + 3 * idx.len());
    match pick {
        0 => ChainElement::Zero,
        1 => ChainElement::A,
        2 => ChainElement::B,
        3 => ChainElement::AB,
        k => {
            let i = idx[(k - 4) / 3];
            match (k - 4) % 3 {
                0 => ChainElement::C(i),
                1 => ChainElement::AC(i),
                _ => ChainElement::BC(i),
            }
        }
    }
}

/// An isotone map from `from` into `to` (which must be nonempty unless `from`
/// is empty).
pub fn isotone_map<R: Rng>(rng: &mut R, from: &IndexSet, to: &IndexSet) -> BTreeMap<ChainIndex, ChainIndex> {
    let targets: Vec<ChainIndex> = to.iter().copied().collect();
    let mut picks: Vec<ChainIndex> = from.iter().map(|_| *targets.choose(rng).expect("nonempty target")).collect();
    picks.sort_unstable();
    from.iter().copied().zip(picks).collect()
}

/// A random element of `F(X)` built from generators and joins, of rank at
/// most `depth`.
pub fn f_element<R: Rng>(rng: &mut R, indices: &IndexSet, depth: u32) -> FElement {
    let ext = f_ext();
    random_free(rng, &ext, depth, &mut |r| FreeElement::Base(chain_element(r, indices)))
}

/// Same as [`f_element`] over an arbitrary base, drawing base elements from
/// `leaf`.
pub fn random_free<R: Rng, B: JoinSemilattice>(
    rng: &mut R,
    ext: &FreeExtension<B>,
    depth: u32,
    leaf: &mut dyn FnMut(&mut R) -> FreeElement<B::Elem>,
) -> FreeElement<B::Elem> {
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng);
    }
    let parts = rng.gen_range(1..=3);
    let mut acc = if rng.gen_bool(0.5) { leaf(rng) } else { ext.zero() };
    for _ in 0..parts {
        let u = random_free(rng, ext, depth - 1, leaf);
        let v = random_free(rng, ext, depth - 1, leaf);
        let top = ext.join(&u, &v);
        let mut w = top.clone();
        for _ in 0..4 {
            let r = random_free(rng, ext, depth - 1, leaf);
            if ext.leq(&r, &top) {
                w = r;
                break;
            }
        }
        let g = ext.bowtie(u, v, w).expect("w ≤ u ∨ v");
        acc = ext.join(&acc, &g);
    }
    acc
}

/// A random element of `R(S)` of rank at most one over the finite carrier:
/// a random diagonal and up to `max_triples` compatible triples.
pub fn reduced_element<R: Rng, B: JoinSemilattice>(
    rng: &mut R,
    ext: &FreeExtension<B>,
    carrier: &[B::Elem],
    max_triples: usize,
) -> FreeElement<B::Elem> {
    let base: Vec<FreeElement<B::Elem>> = carrier.iter().cloned().map(FreeElement::Base).collect();
    let p = base.choose(rng).expect("nonempty carrier").clone();
    let eligible: Vec<&FreeElement<B::Elem>> = base.iter().filter(|e| !ext.leq(e, &p)).collect();
    let mut triples: Vec<Triple<B::Elem>> = Vec::new();
    if eligible.len() >= 2 {
        for _ in 0..rng.gen_range(0..=max_triples) {
            let u = *eligible.choose(rng).expect("nonempty");
            let v = *eligible.choose(rng).expect("nonempty");
            if u == v {
                continue;
            }
            let top = ext.join(u, v);
            let ws: Vec<&&FreeElement<B::Elem>> = eligible.iter().filter(|w| ext.leq(w, &top)).collect();
            let w = (**ws.choose(rng).expect("u is below u ∨ v")).clone();
            let t = Triple::new(u.clone(), v.clone(), w);
            if !triples.contains(&t) && !triples.contains(&t.swapped()) {
                triples.push(t);
            }
        }
    }
    if triples.is_empty() {
        return p;
    }
    ext.reduced(1, p, triples).expect("constructed reduced")
}
