//! Exhaustive corpora of small lattices, one representative per isomorphism
//! class.
//!
//! A finite ⟨∨,0⟩-semilattice always has a top, so the lattices of size `n` are
//! exactly the ⟨∨,0⟩-semilattices of size `n`.

use std::collections::BTreeSet;

use sha2::{Digest, Sha256};

use crate::json::semilattice_to_json;
use crate::order::{BitMatrix, ElemId, FiniteJoinSemilattice, FinitePoset};

fn interior_names(k: usize) -> Vec<String> {
    (0..k)
        .map(|i| {
            let c = (b'a' + i as u8) as char;
            c.to_string()
        })
        .collect()
}

/// Strict order on the interior `1..n-1`, encoded as a bitmask over pairs
/// `(i, j)` with `i < j`.
fn pair_index(k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            out.push((i, j));
        }
    }
    out
}

fn relation(k: usize, pairs: &[(usize, usize)], mask: u64) -> Vec<Vec<bool>> {
    let mut r = vec![vec![false; k]; k];
    for (bit, &(i, j)) in pairs.iter().enumerate() {
        if mask >> bit & 1 == 1 {
            r[i][j] = true;
        }
    }
    r
}

fn is_transitive(r: &[Vec<bool>]) -> bool {
    let k = r.len();
    (0..k).all(|i| (0..k).all(|j| !r[i][j] || (0..k).all(|l| !r[j][l] || r[i][l])))
}

fn full_poset(k: usize, r: &[Vec<bool>]) -> FinitePoset {
    let n = k + 2;
    let mut names = vec!["0".to_string()];
    names.extend(interior_names(k));
    names.push("1".to_string());
    let leq = BitMatrix::from_fn(n, |x, y| {
        x == y || x == 0 || y == n - 1 || (x > 0 && y > 0 && x < n - 1 && y < n - 1 && r[x - 1][y - 1])
    });
    FinitePoset::new(names, leq).expect("bounded extension of a strict order")
}

fn has_joins(p: &FinitePoset) -> bool {
    let n = p.len();
    for x in 0..n {
        for y in 0..n {
            let ubs: Vec<usize> = (0..n)
                .filter(|&z| p.leq(ElemId(x), ElemId(z)) && p.leq(ElemId(y), ElemId(z)))
                .collect();
            if !ubs.iter().any(|&u| ubs.iter().all(|&v| p.leq(ElemId(u), ElemId(v)))) {
                return false;
            }
        }
    }
    true
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn go(k: usize, cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(k, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(k, &mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

/// Least encoding of the relation over all relabellings of the interior,
/// as a bit string over all ordered pairs.
fn canonical(r: &[Vec<bool>], perms: &[Vec<usize>]) -> Vec<bool> {
    let k = r.len();
    perms
        .iter()
        .map(|p| {
            let mut code = Vec::with_capacity(k * k);
            for i in 0..k {
                for j in 0..k {
                    code.push(r[p[i]][p[j]]);
                }
            }
            code
        })
        .min()
        .unwrap_or_default()
}

/// All lattices with exactly `n` elements up to isomorphism, bottom named
/// `0`, top named `1` and the rest `a`, `b`, … in a linear extension order.
pub fn lattices(n: usize) -> Vec<FiniteJoinSemilattice> {
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        let p = FinitePoset::new(vec!["0".into()], BitMatrix::from_fn(1, |_, _| true)).expect("one point");
        return vec![FiniteJoinSemilattice::from_poset(p).expect("one point")];
    }
    let k = n - 2;
    let pairs = pair_index(k);
    let perms = permutations(k);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0..1u64 << pairs.len() {
        let r = relation(k, &pairs, mask);
        if !is_transitive(&r) {
            continue;
        }
        let code = canonical(&r, &perms);
        if seen.contains(&code) {
            continue;
        }
        let p = full_poset(k, &r);
        if !has_joins(&p) {
            continue;
        }
        seen.insert(code);
        out.push(FiniteJoinSemilattice::from_poset(p).expect("every pair has a join"));
    }
    out
}

pub fn lattices_up_to(n: usize) -> Vec<FiniteJoinSemilattice> {
    (1..=n).flat_map(lattices).collect()
}

/// The distributive members of [`lattices_up_to`].
pub fn distributive_up_to(n: usize) -> Vec<FiniteJoinSemilattice> {
    lattices_up_to(n)
        .into_iter()
        .filter(|s| s.is_distributive().holds())
        .collect()
}

/// SHA-256 of the canonical JSON text, in lowercase hex.
pub fn content_hash(s: &FiniteJoinSemilattice) -> String {
    let text = serde_json::to_string(&semilattice_to_json(s)).expect("serializable");
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_of_small_lattices() {
        let counts: Vec<usize> = (1..=7).map(|n| lattices(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 5, 15, 53]);
    }

    #[test]
    fn distributive_counts() {
        let counts: Vec<usize> = (1..=6)
            .map(|n| lattices(n).iter().filter(|s| s.is_distributive().holds()).count())
            .collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 3, 5]);
    }

    #[test]
    fn hashes_are_stable_and_distinct() {
        let all = lattices_up_to(5);
        let hashes: BTreeSet<String> = all.iter().map(content_hash).collect();
        assert_eq!(hashes.len(), all.len());
        assert_eq!(content_hash(&all[0]), content_hash(&lattices(1)[0]));
    }
}
