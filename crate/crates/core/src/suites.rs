//! Named property suites. Each suite runs a fixed, seeded workload and reports
//! how many checks it made and which ones failed.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chain::{
    f_ext, fix_check, interpolate, print_f, s_lambda, s_lambda_elements, s_map, substitute, supci_check, support,
    ChainElement, ChainError, ChainFamily, ChainHom, FElement, IndexSet, Interpolation,
};
use crate::congruence::{all_congruences, congruences_by_filter, theta_plus_measure, FiniteLattice};
use crate::corpus;
use crate::free::{enumerate_r, FreeElement, FreeExtension, Triple, DEFAULT_OUTPUT_CAP, DEFAULT_TRIPLE_GUARD};
use crate::measure::{counterexample_measure, midpoint_extension, DEFAULT_INTERVAL_BOUND};
use crate::order::{Distributivity, ElemId, FiniteJoinSemilattice, JoinSemilattice};
use crate::refine::{
    refine_bruteforce, refine_lattice, refine_sequential, refine_strongly_distributive, BruteOutcome,
    RefinementProblem, DEFAULT_BRUTE_BOUND,
};
use crate::sample;

/// `|R(S(∅))|`: per diagonal `p`, three choices for each unordered pair
/// `{u, v}` outside `↓p` and each `w ≤ u ∨ v` outside `↓p`. Only the zero
/// diagonal has eligible pairs beyond the nine at `a` and `b`.
pub const R_OF_SQUARE: usize = 19702;

const SEED: u64 = 0x6d65_6574;
const MAX_MESSAGES: usize = 20;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub checked: u64,
    pub violations: u64,
    pub messages: Vec<String>,
    pub notes: Vec<String>,
    /// Wall-clock time; left out of the JSON form so reports are reproducible.
    #[serde(skip)]
    pub seconds: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.checked > 0
    }
}

#[derive(Default)]
struct Tally {
    checked: u64,
    violations: u64,
    messages: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.fail(msg());
        }
    }

    fn fail(&mut self, msg: String) {
        self.violations += 1;
        if self.messages.len() < MAX_MESSAGES {
            self.messages.push(msg);
        }
    }

    fn note(&mut self, msg: String) {
        self.notes.push(msg);
    }
}

type SuiteFn = fn(&mut Tally);

const SUITES: &[(&str, &str, SuiteFn)] = &[
    ("laws", "semilattice laws on every lattice with at most 7 elements and on S(Λ)", laws),
    ("rs-structure", "R(S(∅)) is a ⟨∨,0⟩-semilattice containing S(∅)", rs_structure),
    ("join-oracle", "free joins agree with least upper bounds found by search", join_oracle),
    ("projection", "x ≤ y iff x ≤ π(y) for base x", projection),
    ("bowtie", "⋈(u,v,w) ≤ u and ⋈(u,v,w) ∨ ⋈(v,u,w) = w", bowtie_identities),
    ("functor", "identity, composition and join preservation of F(f)", functor),
    ("interpolation", "interpolants or certificates for comparable pairs", interpolation),
    ("lemmas", "substitution, intersections of S and R, suprema of the c_i", lemmas),
    ("theta-plus", "Θ⁺ is a V-measure on every lattice with at most 6 elements", theta_plus),
    ("shadow", "the chain measure is a poset measure but not a V-measure", shadow),
    ("refinement", "monotone refinement on small distributive semilattices", refinement),
];

/// Names and one-line descriptions of the registered suites, in run order.
pub fn suite_names() -> Vec<(&'static str, &'static str)> {
    SUITES.iter().map(|(n, d, _)| (*n, *d)).collect()
}

pub fn run_suite(name: &str) -> Option<SuiteReport> {
    let (_, _, f) = SUITES.iter().find(|(n, _, _)| *n == name)?;
    let start = Instant::now();
    let mut t = Tally::default();
    f(&mut t);
    Some(SuiteReport {
        name: name.to_string(),
        checked: t.checked,
        violations: t.violations,
        messages: t.messages,
        notes: t.notes,
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn set(xs: &[u64]) -> IndexSet {
    xs.iter().copied().collect()
}

fn base(e: ChainElement) -> FElement {
    FreeElement::Base(e)
}

/// Row-major bit rows over a fixed number of columns.
struct BitRows {
    words: usize,
    data: Vec<u64>,
}

impl BitRows {
    fn new(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        BitRows {
            words,
            data: vec![0; rows * words],
        }
    }

    fn set(&mut self, r: usize, c: usize) {
        self.data[r * self.words + c / 64] |= 1 << (c % 64);
    }

    fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    fn ones(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        ones(self.row(r))
    }

    fn count(&self, r: usize) -> u32 {
        self.row(r).iter().map(|w| w.count_ones()).sum()
    }
}

fn ones(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(i, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let b = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(i * 64 + b)
        })
    })
}

fn r_of_square(t: &mut Tally) -> Option<Vec<FElement>> {
    let ext = f_ext();
    match enumerate_r(&ext, &s_lambda_elements(&IndexSet::new()), DEFAULT_TRIPLE_GUARD, DEFAULT_OUTPUT_CAP) {
        Ok(e) => Some(e),
        Err(e) => {
            t.fail(format!("enumerating R(S(∅)) failed: {e}"));
            None
        }
    }
}

/// `x ≤ y` computed from the reduced-set definition alone: both sides are
/// written as sets of triples at the common level, lower-rank elements as the
/// single triple `⟨x, x, x⟩`, and every triple of `x` missing from `y` needs
/// `u ≤ π(y)` or `w ≤ π(y)`.
fn naive_leq<B: JoinSemilattice>(ext: &FreeExtension<B>, x: &FreeElement<B::Elem>, y: &FreeElement<B::Elem>) -> bool {
    let n = x.rank().max(y.rank());
    if n == 0 {
        return ext.base().leq(x.as_base().expect("rank 0"), y.as_base().expect("rank 0"));
    }
    let at_level = |e: &FreeElement<B::Elem>| -> (Vec<Triple<B::Elem>>, FreeElement<B::Elem>) {
        match e.as_reduced() {
            Some(r) if r.rank() == n => {
                let d = r.diagonal().clone();
                let mut ts = vec![Triple::new(d.clone(), d.clone(), d.clone())];
                ts.extend(r.rest().iter().cloned());
                (ts, d)
            }
            _ => (vec![Triple::new(e.clone(), e.clone(), e.clone())], e.clone()),
        }
    };
    let (tx, _) = at_level(x);
    let (ty, py) = at_level(y);
    tx.iter()
        .all(|t| ty.contains(t) || naive_leq(ext, &t.u, &py) || naive_leq(ext, &t.w, &py))
}

fn laws(t: &mut Tally) {
    let all = corpus::lattices_up_to(7);
    t.note(format!("{} lattices with at most 7 elements", all.len()));
    for s in &all {
        let r = s.check_laws();
        t.check(r.is_ok(), || format!("{} elements: {}", s.len(), r.clone().unwrap_err()));
        let rebuilt = FiniteJoinSemilattice::from_join_table(
            s.ids().map(|x| s.name(x).to_string()).collect(),
            s.zero(),
            s.ids().flat_map(|x| s.ids().map(move |y| s.join(x, y))).collect(),
        );
        t.check(rebuilt.is_ok(), || format!("join table of a {}-element lattice rejected", s.len()));
    }
    let index_sets = [set(&[]), set(&[0]), set(&[0, 1]), set(&[0, 1, 2]), set(&[3, 7, 9]), set(&[5])];
    for xs in &index_sets {
        let s = s_lambda(xs);
        t.check(s.len() == 4 + 3 * xs.len(), || format!("|S({xs:?})| = {}", s.len()));
        let r = s.check_laws();
        t.check(r.is_ok(), || format!("S({xs:?}): {}", r.clone().unwrap_err()));
        let elems = s_lambda_elements(xs);
        for &x in &elems {
            for &y in &elems {
                let j = x.join(y);
                t.check(
                    x.leq(j) && y.leq(j) && elems.iter().all(|&z| !(x.leq(z) && y.leq(z)) || j.leq(z)),
                    || format!("{x} ∨ {y} = {j} is not the least upper bound in S({xs:?})"),
                );
            }
        }
        let d = s.is_distributive();
        match xs.first() {
            None => t.check(d.holds(), || "S(∅) is not distributive".into()),
            Some(&i) => {
                let want = Distributivity::Counterexample {
                    c: s.id_of(&ChainElement::C(i).to_string()).expect("c_min"),
                    a: s.id_of("a").expect("a"),
                    b: s.id_of("b").expect("b"),
                };
                t.check(d == want, || format!("S({xs:?}) distributivity report {d:?}"));
            }
        }
    }
}

fn rs_structure(t: &mut Tally) {
    let ext = f_ext();
    let Some(elems) = r_of_square(t) else { return };
    let n = elems.len();
    t.check(n == R_OF_SQUARE, || format!("|R(S(∅))| = {n}, expected {R_OF_SQUARE}"));
    let distinct: HashSet<&FElement> = elems.iter().collect();
    t.check(distinct.len() == n, || format!("{} duplicates", n - distinct.len()));
    for x in &elems {
        t.check(ext.is_reduced(x) && x.rank() <= 1 && support(x).is_empty(), || {
            format!("{} is not a reduced rank-1 element over S(∅)", print_f(x))
        });
    }

    let mut up = BitRows::new(n, n);
    for i in 0..n {
        for j in 0..n {
            if ext.leq(&elems[i], &elems[j]) {
                up.set(i, j);
            }
        }
    }
    let mut comparable = 0u64;
    for i in 0..n {
        t.check(up.get(i, i), || format!("{} ≰ itself", print_f(&elems[i])));
        for j in up.ones(i) {
            comparable += 1;
            if j != i && up.get(j, i) {
                t.fail(format!("antisymmetry fails: {} and {}", print_f(&elems[i]), print_f(&elems[j])));
            }
        }
        t.checked += 1;
    }
    let mut acc = vec![0u64; up.words];
    for i in 0..n {
        acc.fill(0);
        for j in up.ones(i) {
            for (a, w) in acc.iter_mut().zip(up.row(j)) {
                *a |= w;
            }
        }
        t.check(acc == up.row(i), || format!("transitivity fails above {}", print_f(&elems[i])));
    }
    t.note(format!("{n} elements, {comparable} comparable ordered pairs"));

    // Decreasing up-set size is a linear extension, so among the common upper
    // bounds of two elements the least one, if any, comes first.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (Reverse(up.count(i)), i));
    let mut pos = vec![0; n];
    for (new, &old) in order.iter().enumerate() {
        pos[old] = new;
    }
    let mut sorted = BitRows::new(n, n);
    for new in 0..n {
        for old in up.ones(order[new]) {
            sorted.set(new, pos[old]);
        }
    }
    drop(up);
    let words = sorted.words;
    let mut pairs = 0u64;
    for i in 0..n {
        let ri = sorted.row(i);
        for j in i + 1..n {
            if ri[j / 64] >> (j % 64) & 1 == 1 {
                pairs += 1;
                continue;
            }
            let rj = sorted.row(j);
            let start = j / 64;
            let first = (start..words).find_map(|w| {
                let c = ri[w] & rj[w];
                (c != 0).then(|| w * 64 + c.trailing_zeros() as usize)
            });
            let ok = match first {
                None => false,
                Some(k) => {
                    let rk = sorted.row(k);
                    (0..start).all(|w| ri[w] & rj[w] == 0) && (start..words).all(|w| ri[w] & rj[w] & !rk[w] == 0)
                }
            };
            pairs += 1;
            if !ok {
                t.fail(format!(
                    "{} and {} have no least upper bound",
                    print_f(&elems[order[i]]),
                    print_f(&elems[order[j]])
                ));
            }
        }
    }
    t.checked += pairs;
    t.note(format!("{pairs} unordered pairs have a least upper bound"));

    let mut rng = rng(2);
    for _ in 0..20_000 {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let (si, sj) = (pos[i], pos[j]);
        let (ri, rj) = (sorted.row(si), sorted.row(sj));
        let lub = (0..words)
            .find_map(|w| {
                let c = ri[w] & rj[w];
                (c != 0).then(|| w * 64 + c.trailing_zeros() as usize)
            })
            .map(|k| &elems[order[k]]);
        let j_free = ext.join(&elems[i], &elems[j]);
        t.check(lub == Some(&j_free), || {
            format!("join({}, {}) = {}", print_f(&elems[i]), print_f(&elems[j]), print_f(&j_free))
        });
    }

    for xs in [set(&[]), set(&[0]), set(&[0, 1])] {
        let carrier = s_lambda_elements(&xs);
        for &x in &carrier {
            for &y in &carrier {
                let (fx, fy) = (base(x), base(y));
                t.check(ext.leq(&fx, &fy) == x.leq(y), || format!("embedding changes the order at {x}, {y}"));
                t.check(ext.join(&fx, &fy) == base(x.join(y)), || format!("embedding changes {x} ∨ {y}"));
            }
            if xs.is_empty() {
                t.check(distinct.contains(&base(x)), || format!("{x} missing from R(S(∅))"));
            }
        }
    }
}

fn join_oracle(t: &mut Tally) {
    let ext = f_ext();
    let Some(elems) = r_of_square(t) else { return };
    let mut rng = rng(3);
    let n = elems.len();
    for _ in 0..2000 {
        let x = &elems[rng.gen_range(0..n)];
        let y = &elems[rng.gen_range(0..n)];
        let ubs: Vec<&FElement> = elems.iter().filter(|z| ext.leq(x, z) && ext.leq(y, z)).collect();
        let mut least = ubs[0];
        for z in &ubs {
            if ext.leq(z, least) {
                least = z;
            }
        }
        let is_least = ubs.iter().all(|z| ext.leq(least, z));
        let j = ext.join(x, y);
        t.check(is_least && *least == j, || {
            format!("join({}, {}) = {}, search found {}", print_f(x), print_f(y), print_f(&j), print_f(least))
        });
    }

    let carrier = s_lambda_elements(&set(&[0]));
    let mut family = BTreeSet::new();
    while family.len() < 200 {
        family.insert(sample::reduced_element(&mut rng, &ext, &carrier, 4));
    }
    let family: Vec<FElement> = family.into_iter().collect();
    let mut pool: BTreeSet<FElement> = family.iter().cloned().collect();
    pool.extend(carrier.iter().copied().map(base));
    let mut joins = HashMap::new();
    for (i, x) in family.iter().enumerate() {
        for (k, y) in family.iter().enumerate().skip(i) {
            let j = ext.join(x, y);
            pool.insert(j.clone());
            joins.insert((i, k), j);
        }
    }
    for _ in 0..2000 {
        pool.insert(sample::reduced_element(&mut rng, &ext, &carrier, 6));
    }
    let pool: Vec<FElement> = pool.into_iter().collect();
    t.note(format!("family of {} elements of R(S({{0}})), pool of {}", family.len(), pool.len()));
    let mut up = BitRows::new(family.len(), pool.len());
    for (i, x) in family.iter().enumerate() {
        for (k, z) in pool.iter().enumerate() {
            if ext.leq(x, z) {
                up.set(i, k);
            }
        }
    }
    let mut common = vec![0u64; up.words];
    for i in 0..family.len() {
        for k in i..family.len() {
            let (x, y) = (&family[i], &family[k]);
            let j = &joins[&(i, k)];
            t.check(ext.leq(x, j) && ext.leq(y, j), || format!("join of {} and {} is not an upper bound", print_f(x), print_f(y)));
            t.check(ext.is_reduced(j), || format!("join {} is not reduced", print_f(j)));
            for (c, (a, b)) in common.iter_mut().zip(up.row(i).iter().zip(up.row(k))) {
                *c = a & b;
            }
            let bad = ones(&common).find(|&z| !ext.leq(j, &pool[z]));
            t.check(bad.is_none(), || {
                format!(
                    "join({}, {}) = {} is not below the upper bound {}",
                    print_f(x),
                    print_f(y),
                    print_f(j),
                    print_f(&pool[bad.unwrap()])
                )
            });
        }
    }
}

fn projection(t: &mut Tally) {
    let ext = f_ext();
    let Some(elems) = r_of_square(t) else { return };
    let carrier = s_lambda_elements(&IndexSet::new());
    for &x in &carrier {
        let fx = base(x);
        for y in &elems {
            let direct = ext.leq(&fx, y);
            let projected = ext.leq(&fx, &y.pi());
            let naive = naive_leq(&ext, &fx, y);
            t.check(direct == projected && direct == naive, || {
                format!("{x} vs {}: leq {direct}, via π {projected}, by definition {naive}", print_f(y))
            });
        }
    }
    let mut rng = rng(4);
    for _ in 0..100_000 {
        let x = &elems[rng.gen_range(0..elems.len())];
        let y = &elems[rng.gen_range(0..elems.len())];
        t.check(ext.leq(x, y) == naive_leq(&ext, x, y), || {
            format!("leq({}, {}) disagrees with the definition", print_f(x), print_f(y))
        });
    }
    for _ in 0..2000 {
        let lam = sample::index_set(&mut rng, 4, 2);
        let x = sample::f_element(&mut rng, &lam, 2);
        let y = ext.join(&x, &sample::f_element(&mut rng, &lam, 2));
        t.check(naive_leq(&ext, &x, &y), || format!("{} ≰ its join with another element", print_f(&x)));
    }
}

fn bowtie_identities(t: &mut Tally) {
    let ext = f_ext();
    for xs in [set(&[]), set(&[0])] {
        let carrier = s_lambda_elements(&xs);
        let mut in_c = 0u64;
        for &u in &carrier {
            for &v in &carrier {
                for &w in &carrier {
                    let (fu, fv, fw) = (base(u), base(v), base(w));
                    if !w.leq(u.join(v)) {
                        let r = ext.bowtie(fu, fv, fw);
                        t.check(r.is_err(), || format!("⋈({u}, {v}, {w}) accepted outside 𝒞"));
                        continue;
                    }
                    in_c += 1;
                    let (g, h) = match (
                        ext.bowtie(fu.clone(), fv.clone(), fw.clone()),
                        ext.bowtie(fv.clone(), fu.clone(), fw.clone()),
                    ) {
                        (Ok(g), Ok(h)) => (g, h),
                        (g, h) => {
                            t.fail(format!("⋈ rejected ({u}, {v}, {w}): {g:?} {h:?}"));
                            continue;
                        }
                    };
                    t.check(ext.is_reduced(&g), || format!("⋈({u}, {v}, {w}) is not reduced"));
                    t.check(ext.leq(&g, &fu), || format!("⋈({u}, {v}, {w}) ≰ {u}"));
                    t.check(ext.join(&g, &h) == fw, || format!("⋈({u}, {v}, {w}) ∨ ⋈({v}, {u}, {w}) ≠ {w}"));
                }
            }
        }
        t.note(format!("|𝒞(S({xs:?}))| = {in_c}"));
    }
}

#[derive(Clone, Debug)]
struct SampledHom {
    map: ChainHom,
    swap: bool,
}

fn swap_ab(e: ChainElement) -> ChainElement {
    match e {
        ChainElement::A => ChainElement::B,
        ChainElement::B => ChainElement::A,
        ChainElement::AC(i) => ChainElement::BC(i),
        ChainElement::BC(i) => ChainElement::AC(i),
        other => other,
    }
}

impl SampledHom {
    fn apply(&self, e: &ChainElement) -> ChainElement {
        let e = self.map.apply(e);
        if self.swap {
            swap_ab(e)
        } else {
            e
        }
    }
}

fn nonempty_index_set(rng: &mut ChaCha8Rng, universe: u64, max_len: usize) -> IndexSet {
    loop {
        let s = sample::index_set(rng, universe, max_len);
        if !s.is_empty() {
            return s;
        }
    }
}

fn functor(t: &mut Tally) {
    let ext = f_ext();
    let mut rng = rng(6);
    for _ in 0..100 {
        let xs = nonempty_index_set(&mut rng, 8, 4);
        let ys = nonempty_index_set(&mut rng, 8, 4);
        let zs = nonempty_index_set(&mut rng, 8, 4);
        let f = SampledHom {
            map: s_map(sample::isotone_map(&mut rng, &xs, &ys)).expect("isotone"),
            swap: rng.gen_bool(0.5),
        };
        let g = SampledHom {
            map: s_map(sample::isotone_map(&mut rng, &ys, &zs)).expect("isotone"),
            swap: rng.gen_bool(0.5),
        };
        t.check(f.map.to_homomorphism(&ys).is_ok(), || format!("S(f) rejected for {:?}", f.map));
        let carrier = s_lambda_elements(&xs);
        let target: HashSet<ChainElement> = s_lambda_elements(&ys).into_iter().collect();
        t.check(f.apply(&ChainElement::Zero) == ChainElement::Zero, || "f(0) ≠ 0".into());
        for &x in &carrier {
            t.check(target.contains(&f.apply(&x)), || format!("f({x}) leaves S(Y)"));
            for &y in &carrier {
                t.check(f.apply(&x.join(y)) == f.apply(&x).join(f.apply(&y)), || format!("f does not preserve {x} ∨ {y}"));
            }
        }
        let fe = |e: &ChainElement| f.apply(e);
        let ge = |e: &ChainElement| g.apply(e);
        let gfe = |e: &ChainElement| g.apply(&f.apply(e));
        let ide = |e: &ChainElement| *e;
        let id = ChainHom::identity(&xs);
        let lift = |h: &dyn Fn(&ChainElement) -> ChainElement, x: &FElement| ext.lift_hom(&ext, &h, x);
        t.check(lift(&fe, &ext.zero()) == Ok(ext.zero()), || "F(f)(0) ≠ 0".into());
        for _ in 0..100 {
            let x = sample::f_element(&mut rng, &xs, 2);
            let other = sample::f_element(&mut rng, &xs, 2);
            let bigger = ext.join(&x, &other);
            let (Ok(fx), Ok(fo), Ok(fb), Ok(gfx), Ok(g_fx), Ok(idx)) = (
                lift(&fe, &x),
                lift(&fe, &other),
                lift(&fe, &bigger),
                lift(&gfe, &x),
                lift(&fe, &x).and_then(|y| lift(&ge, &y)),
                lift(&ide, &x),
            ) else {
                t.fail(format!("lifting failed on {}", print_f(&x)));
                continue;
            };
            t.check(idx == x && id.lift(&x).as_ref() == Ok(&x), || format!("F(id)({}) ≠ itself", print_f(&x)));
            t.check(gfx == g_fx, || format!("F(g∘f) ≠ F(g)∘F(f) at {}", print_f(&x)));
            t.check(fb == ext.join(&fx, &fo), || format!("F(f) does not preserve the join at {}", print_f(&x)));
            t.check(ext.leq(&fx, &fb), || format!("F(f) is not isotone at {}", print_f(&x)));
            t.check(support(&fx).is_subset(&ys), || format!("support of F(f)({}) leaves Y", print_f(&x)));
            t.check(ext.is_reduced(&fx), || format!("F(f)({}) is not reduced", print_f(&x)));
            if !f.swap && !g.swap {
                let composed = f.map.then(&g.map).lift(&x);
                t.check(composed.as_ref() == Ok(&gfx), || format!("ChainHom::then disagrees at {}", print_f(&x)));
            }
        }
    }
}

/// Elements of complexity at most two over `S(Λ)`: the base and every
/// rank-1 element with a single non-diagonal triple.
fn small_family(lam: &IndexSet) -> Vec<FElement> {
    let ext = f_ext();
    let carrier: Vec<FElement> = s_lambda_elements(lam).into_iter().map(base).collect();
    let mut out = carrier.clone();
    for p in &carrier {
        for u in &carrier {
            for v in &carrier {
                for w in &carrier {
                    if u == v || [u, v, w].iter().any(|c| ext.leq(c, p)) || !ext.leq(w, &ext.join(u, v)) {
                        continue;
                    }
                    if let Ok(x) = ext.reduced(1, p.clone(), vec![Triple::new(u.clone(), v.clone(), w.clone())]) {
                        out.push(x);
                    }
                }
            }
        }
    }
    out
}

fn subsets(of: &IndexSet) -> Vec<IndexSet> {
    let v: Vec<u64> = of.iter().copied().collect();
    (0..1u32 << v.len())
        .map(|m| v.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, &x)| x).collect())
        .collect()
}

fn supersets_within(sub: &IndexSet, lam: &IndexSet) -> Vec<IndexSet> {
    let free: IndexSet = lam.difference(sub).copied().collect();
    subsets(&free).into_iter().map(|s| s.union(sub).copied().collect()).collect()
}

/// Checks one interpolation instance independently of the algorithm's own
/// verification. `exists` is the brute-force answer to "some `z ∈ F(∅)` lies
/// between `x` and `y`", when known.
fn check_interpolation(
    t: &mut Tally,
    ext: &FreeExtension<ChainFamily>,
    x: &FElement,
    xs: &IndexSet,
    y: &FElement,
    ys: &IndexSet,
    exists: Option<bool>,
) {
    let common: IndexSet = xs.intersection(ys).copied().collect();
    let xi = ys.difference(xs).next().copied();
    let certified = xi.is_some_and(|i| ext.leq(&base(ChainElement::C(i)), y));
    let ctx = || format!("x = {}, X = {xs:?}, y = {}, Y = {ys:?}", print_f(x), print_f(y));
    if let Some(e) = exists {
        t.check(e || certified, || format!("neither an interpolant nor c_ξ ≤ y: {}", ctx()));
    }
    match interpolate(x, xs, y, ys) {
        Ok(Interpolation::Interpolant(z)) => {
            t.check(
                support(&z).is_subset(&common) && ext.leq(x, &z) && ext.leq(&z, y),
                || format!("bad interpolant {}: {}", print_f(&z), ctx()),
            );
            if let Some(e) = exists {
                t.check(e, || format!("interpolant returned but search found none: {}", ctx()));
            }
        }
        Ok(Interpolation::Certificate { xi: got }) => {
            t.check(Some(got) == xi && certified, || format!("bad certificate ξ = {got}: {}", ctx()));
        }
        Err(e) => t.fail(format!("interpolate failed ({e}): {}", ctx())),
    }
}

fn interpolation(t: &mut Tally) {
    let ext = f_ext();
    let lam = set(&[0, 1, 2]);
    let family = small_family(&lam);
    let Some(r0) = r_of_square(t) else { return };
    let mut up = BitRows::new(family.len(), r0.len());
    let mut down = BitRows::new(family.len(), r0.len());
    for (i, x) in family.iter().enumerate() {
        for (k, z) in r0.iter().enumerate() {
            if ext.leq(x, z) {
                up.set(i, k);
            }
            if ext.leq(z, x) {
                down.set(i, k);
            }
        }
    }
    let supports: Vec<IndexSet> = family.iter().map(support).collect();
    let mut pairs = 0u64;
    let before = t.checked;
    for (i, x) in family.iter().enumerate() {
        for (j, y) in family.iter().enumerate() {
            if !ext.leq(x, y) {
                continue;
            }
            pairs += 1;
            let exists = up.row(i).iter().zip(down.row(j)).any(|(a, b)| a & b != 0);
            for xs in supersets_within(&supports[i], &lam) {
                for ys in supersets_within(&supports[j], &lam) {
                    let disjoint = xs.is_disjoint(&ys);
                    check_interpolation(t, &ext, x, &xs, y, &ys, disjoint.then_some(exists));
                }
            }
        }
    }
    t.note(format!(
        "complexity ≤ 2 over Λ = {{0,1,2}}: {} elements, {pairs} comparable pairs, {} checks",
        family.len(),
        t.checked - before
    ));

    let mut rng = rng(7);
    let mut sampled = Vec::new();
    let within = |z: &FElement| z.complexity() <= 6;
    let mut pool: Vec<FElement> = Vec::new();
    while pool.len() < 3000 {
        let z = sample::f_element(&mut rng, &lam, 2);
        if within(&z) {
            pool.push(z);
        }
    }
    for x in &pool {
        let r = &pool[rng.gen_range(0..pool.len())];
        let y = ext.join(x, r);
        if within(&y) {
            sampled.push((x.clone(), y.clone()));
        }
        if x.rank() >= 1 {
            sampled.push((x.pi(), x.clone()));
            for t3 in x.triples() {
                if let Ok(g) = ext.bowtie_at(x.rank(), t3.u.clone(), t3.v.clone(), t3.w.clone()) {
                    if within(&g) {
                        sampled.push((g.clone(), x.clone()));
                        sampled.push((g, t3.u.clone()));
                    }
                }
            }
        }
        let other = &pool[rng.gen_range(0..pool.len())];
        if ext.leq(x, other) {
            sampled.push((x.clone(), other.clone()));
        }
    }
    let before = t.checked;
    let mut searched = 0;
    for (x, y) in &sampled {
        for xs in supersets_within(&support(x), &lam) {
            for ys in supersets_within(&support(y), &lam) {
                let exists = (xs.is_disjoint(&ys) && x.rank() <= 1 && y.rank() <= 1 && searched < 1000).then(|| {
                    searched += 1;
                    r0.iter().any(|z| ext.leq(x, z) && ext.leq(z, y))
                });
                check_interpolation(t, &ext, x, &xs, y, &ys, exists);
            }
        }
    }
    t.note(format!(
        "sampled complexity ≤ 6: {} pairs, {} checks, {searched} decided by search",
        sampled.len(),
        t.checked - before
    ));
}

fn is_lower(sub: &IndexSet, of: &IndexSet) -> bool {
    of.iter().all(|i| !sub.iter().any(|s| i < s) || sub.contains(i))
}

fn lemmas(t: &mut Tally) {
    let ext = f_ext();
    let mut rng = rng(8);

    // Substitution fixes F(X ∩ Y) when X ∩ Y is a lower subset of both.
    let small = set(&[0, 1, 2, 3]);
    let before = t.checked;
    for xs in subsets(&small) {
        for ys in subsets(&small) {
            let common: IndexSet = xs.intersection(&ys).copied().collect();
            let hyp = is_lower(&common, &xs) && is_lower(&common, &ys);
            let r = fix_check(&ext.zero(), &xs, &ys);
            if !hyp {
                t.check(matches!(r, Err(ChainError::HypothesisViolated(_))), || {
                    format!("fix_check on X = {xs:?}, Y = {ys:?}: {r:?}")
                });
                continue;
            }
            if xs.len() > ys.len() {
                t.check(matches!(r, Err(ChainError::TooShort { .. })), || {
                    format!("fix_check on X = {xs:?}, Y = {ys:?}: {r:?}")
                });
                continue;
            }
            let mut xs_elems: Vec<FElement> = s_lambda_elements(&common).into_iter().map(base).collect();
            xs_elems.extend((0..20).map(|_| sample::f_element(&mut rng, &common, 2)));
            for x in &xs_elems {
                let r = fix_check(x, &xs, &ys);
                t.check(r == Ok(true), || format!("{}[{ys:?}/{xs:?}]: {r:?}", print_f(x)));
            }
        }
    }
    for _ in 0..10_000 {
        let common = sample::index_set(&mut rng, 8, 4);
        let top = common.last().map_or(0, |m| m + 1);
        let extra = |rng: &mut ChaCha8Rng| -> IndexSet {
            (0..rng.gen_range(0..4)).map(|_| rng.gen_range(top..top + 12)).collect()
        };
        let a = extra(&mut rng);
        let mut b: IndexSet = extra(&mut rng).difference(&a).copied().collect();
        while b.len() < a.len() {
            b.insert(rng.gen_range(top + 12..top + 24));
        }
        let xs: IndexSet = common.union(&a).copied().collect();
        let ys: IndexSet = common.union(&b).copied().collect();
        let x = sample::f_element(&mut rng, &common, 2);
        let r = fix_check(&x, &xs, &ys);
        t.check(r == Ok(true), || format!("{}[{ys:?}/{xs:?}]: {r:?}", print_f(&x)));
    }
    t.note(format!("substitution fixes: {} checks", t.checked - before));

    let before = t.checked;
    for _ in 0..10_000 {
        let xs = sample::index_set(&mut rng, 12, 5);
        let mut ys = sample::index_set(&mut rng, 20, 8);
        while ys.len() < xs.len() {
            ys.insert(rng.gen_range(0..20));
        }
        let x = sample::f_element(&mut rng, &xs, 2);
        let e: BTreeMap<u64, u64> = xs.iter().copied().zip(ys.iter().copied()).collect();
        let want: IndexSet = support(&x).iter().map(|i| e[i]).collect();
        match substitute(&x, &xs, &ys) {
            Ok(s) => t.check(support(&s) == want, || format!("support of {}[{ys:?}/{xs:?}]", print_f(&x))),
            Err(err) => t.fail(format!("substitute failed on {}: {err}", print_f(&x))),
        }
    }
    t.note(format!("support of substitutions: {} checks", t.checked - before));

    // S(X ∩ Y) = S(X) ∩ S(Y), and unions along chains.
    let before = t.checked;
    for k in 0..10_000 {
        let xs = sample::index_set(&mut rng, 12, 6);
        let ys = sample::index_set(&mut rng, 12, 6);
        let common: IndexSet = xs.intersection(&ys).copied().collect();
        let sx: BTreeSet<ChainElement> = s_lambda_elements(&xs).into_iter().collect();
        let sy: BTreeSet<ChainElement> = s_lambda_elements(&ys).into_iter().collect();
        let si: BTreeSet<ChainElement> = s_lambda_elements(&common).into_iter().collect();
        t.check(si == sx.intersection(&sy).copied().collect(), || format!("S({xs:?} ∩ {ys:?})"));
        if k % 10 == 0 {
            let big = s_lambda(&xs);
            let members: BTreeSet<ElemId> = si.iter().map(|e| big.id_of(&e.to_string()).expect("member")).collect();
            let sub = big.subsemilattice(&members).map(|(s, _)| s);
            let direct = s_lambda(&common);
            let same = sub.is_ok_and(|s| {
                s.len() == direct.len()
                    && s.ids().all(|x| {
                        s.ids().all(|y| s.name(s.join(x, y)) == direct.name(direct.join(x, y)))
                            && s.name(x) == direct.name(x)
                    })
            });
            t.check(same, || format!("S({common:?}) is not the restriction of S({xs:?})"));
        }
        let x1 = sample::index_set(&mut rng, 12, 3);
        let x2: IndexSet = x1.union(&sample::index_set(&mut rng, 12, 3)).copied().collect();
        let x3: IndexSet = x2.union(&sample::index_set(&mut rng, 12, 3)).copied().collect();
        let union: BTreeSet<ChainElement> = [&x1, &x2, &x3].iter().flat_map(|x| s_lambda_elements(x)).collect();
        let whole: BTreeSet<ChainElement> = s_lambda_elements(&x3).into_iter().collect();
        t.check(union == whole, || format!("union along {x1:?} ⊆ {x2:?} ⊆ {x3:?}"));
    }
    t.note(format!("intersections and unions of S: {} checks", t.checked - before));

    // R(S₁ ∩ S₂) = R(S₁) ∩ R(S₂) over the sub-semilattices of S({0, 1}).
    let before = t.checked;
    let whole = s_lambda_elements(&set(&[0, 1]));
    let mut subs: Vec<Vec<ChainElement>> = Vec::new();
    for mask in 0..1u32 << (whole.len() - 1) {
        let members: Vec<ChainElement> = std::iter::once(whole[0])
            .chain((1..whole.len()).filter(|i| mask >> (i - 1) & 1 == 1).map(|i| whole[i]))
            .collect();
        let closed = members.iter().all(|x| members.iter().all(|y| members.contains(&x.join(*y))));
        if closed {
            subs.push(members);
        }
    }
    let mut ids: HashMap<FElement, u32> = HashMap::new();
    let mut r_of: Vec<Option<Vec<u32>>> = Vec::new();
    for members in &subs {
        r_of.push(enumerate_r(&ext, members, DEFAULT_TRIPLE_GUARD, 50_000).ok().map(|elems| {
            let mut v: Vec<u32> = elems
                .into_iter()
                .map(|e| {
                    let next = ids.len() as u32;
                    *ids.entry(e).or_insert(next)
                })
                .collect();
            v.sort_unstable();
            v
        }));
    }
    let index: HashMap<&[ChainElement], usize> = subs.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let feasible = r_of.iter().filter(|r| r.is_some()).count();
    let mut compared = 0u64;
    for i in 0..subs.len() {
        let Some(ri) = &r_of[i] else { continue };
        for j in i + 1..subs.len() {
            let Some(rj) = &r_of[j] else { continue };
            let meet: Vec<ChainElement> = subs[i].iter().filter(|e| subs[j].contains(e)).copied().collect();
            let Some(Some(rm)) = index.get(meet.as_slice()).map(|&k| r_of[k].as_ref()) else {
                t.fail(format!("intersection {meet:?} is missing or too large"));
                continue;
            };
            let both: Vec<u32> = ri.iter().filter(|e| rj.binary_search(e).is_ok()).copied().collect();
            compared += 1;
            t.checked += (ri.len() + rj.len()) as u64;
            if both != *rm {
                t.fail(format!("R({:?} ∩ {:?}) ≠ R ∩ R", subs[i], subs[j]));
            }
            let nested_ij = subs[i].iter().all(|e| subs[j].contains(e));
            let nested_ji = subs[j].iter().all(|e| subs[i].contains(e));
            if nested_ij || nested_ji {
                let (small, large) = if nested_ij { (ri, rj) } else { (rj, ri) };
                t.check(small.iter().all(|e| large.binary_search(e).is_ok()), || {
                    format!("R is not monotone along {:?} ⊆ {:?}", subs[i], subs[j])
                });
            }
        }
    }
    t.note(format!(
        "{} sub-semilattices of S({{0,1}}), {feasible} enumerable, {compared} pairs compared, {} element checks",
        subs.len(),
        t.checked - before
    ));

    // If every c_i (i ∈ X) lies below x, so does c_max X.
    let before = t.checked;
    let mut premises = 0u64;
    let mut supci = |t: &mut Tally, xs: &IndexSet, x: &FElement| {
        let xi = *xs.last().expect("nonempty");
        let premise = xs.iter().all(|&i| ext.leq(&base(ChainElement::C(i)), x));
        if premise {
            premises += 1;
            t.check(ext.leq(&base(ChainElement::C(xi)), x), || format!("c_{xi} ≰ {}", print_f(x)));
        }
        let r = supci_check(xs, x);
        t.check(r == Ok(true), || format!("supci_check({xs:?}, {}) = {r:?}", print_f(x)));
    };
    let lam = set(&[0, 1, 2]);
    let family = small_family(&lam);
    for xs in subsets(&lam).into_iter().filter(|s| !s.is_empty()) {
        for x in &family {
            supci(t, &xs, x);
        }
    }
    for _ in 0..10_000 {
        let xs = nonempty_index_set(&mut rng, 8, 4);
        let wider: IndexSet = xs.union(&sample::index_set(&mut rng, 10, 2)).copied().collect();
        let mut x = sample::f_element(&mut rng, &wider, 2);
        if rng.gen_bool(0.5) {
            for &i in &xs {
                if rng.gen_bool(0.8) {
                    x = ext.join(&x, &base(ChainElement::C(i)));
                }
            }
        }
        supci(t, &xs, &x);
    }
    t.note(format!("suprema of the c_i: {} checks, {premises} with the premise true", t.checked - before));
}

fn theta_plus(t: &mut Tally) {
    let all = corpus::lattices_up_to(6);
    t.note(format!("{} lattices with at most 6 elements", all.len()));
    for s in all {
        let l = FiniteLattice::from_semilattice(s);
        let conc = all_congruences(&l);
        let filtered = congruences_by_filter(&l);
        t.check(conc.congruences() == filtered.as_slice(), || {
            format!("{}-element lattice: closure finds {} congruences, filter {}", l.len(), conc.congruences().len(), filtered.len())
        });
        let (_, m) = theta_plus_measure(&l);
        let pm = m.is_poset_measure();
        t.check(pm.is_ok(), || format!("Θ⁺ on a {}-element lattice: {pm:?}", l.len()));
        let v = m.is_v_measure(None, DEFAULT_INTERVAL_BOUND);
        t.check(v == Ok(None), || format!("Θ⁺ on a {}-element lattice: {v:?}", l.len()));
    }
}

fn shadow(t: &mut Tally) {
    let (a, b) = (base(ChainElement::A), base(ChainElement::B));
    let pair = [(a.clone(), b.clone())];
    for n in 2..=6u64 {
        for depth in 0..=2 {
            let m = counterexample_measure(n, depth);
            let pm = m.is_poset_measure();
            t.check(pm.is_ok(), || format!("n = {n}, depth {depth}: {pm:?}"));
            let w = m.is_v_measure(Some(&pair), DEFAULT_INTERVAL_BOUND);
            let expected = matches!(&w, Ok(Some(f)) if f.x == ElemId(0) && f.y == ElemId(n as usize) && f.a == a && f.b == b);
            t.check(expected, || format!("n = {n}, depth {depth}: {w:?}"));
            if depth >= 1 {
                let mid = midpoint_extension(n, depth);
                let ok = mid.is_poset_measure().is_ok()
                    && matches!(
                        mid.find_decomposition(ElemId(0), ElemId(n as usize), &a, &b, DEFAULT_INTERVAL_BOUND),
                        Ok(Some(_))
                    );
                t.check(ok, || format!("midpoint extension of n = {n} does not split the top step"));
            }
        }
    }
}

fn isotone_chains(s: &FiniteJoinSemilattice, below: ElemId, max_len: usize) -> Vec<Vec<ElemId>> {
    let down = s.down(below);
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for c in &frontier {
            for &z in &down {
                if c.last().is_none_or(|&l: &ElemId| s.leq(l, z)) {
                    let mut d: Vec<ElemId> = c.clone();
                    d.push(z);
                    next.push(d);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, k - 1);
            out.push(q);
        }
    }
    out
}

fn refinement(t: &mut Tally) {
    let corpus = corpus::distributive_up_to(5);
    let perms: Vec<Vec<Vec<usize>>> = (0..=4).map(permutations).collect();
    let mut problems = 0u64;
    for s in &corpus {
        for a in s.ids() {
            for b in s.ids() {
                for chain in isotone_chains(s, s.join(a, b), 4) {
                    problems += 1;
                    let p = RefinementProblem::new(s, a, b, chain.clone()).expect("isotone chain below a ∨ b");
                    let ctx = || format!("{}-element lattice, a = {}, b = {}, chain {chain:?}", s.len(), s.name(a), s.name(b));
                    let lat = refine_lattice(&p);
                    t.check(lat.as_ref().is_ok_and(|w| p.validate(w).is_ok()), || format!("lattice: {lat:?}; {}", ctx()));
                    let sd = refine_strongly_distributive(&p);
                    t.check(sd.as_ref().is_ok_and(|(w, _)| p.validate(w).is_ok()), || format!("sd: {sd:?}; {}", ctx()));
                    for order in &perms[chain.len()] {
                        let seq = refine_sequential(&p, order);
                        t.check(seq.as_ref().is_ok_and(|w| p.validate(w).is_ok()), || {
                            format!("seq {order:?}: {seq:?}; {}", ctx())
                        });
                    }
                    let brute = refine_bruteforce(&p, DEFAULT_BRUTE_BOUND);
                    t.check(
                        matches!(&brute, Ok(BruteOutcome::Witness(w)) if p.validate(w).is_ok()) && lat.is_ok(),
                        || format!("brute: {brute:?}; {}", ctx()),
                    );
                }
            }
        }
    }
    t.note(format!("{} distributive lattices, {problems} problems", corpus.len()));
    for lam in [set(&[0]), set(&[0, 1]), set(&[0, 1, 2])] {
        let s = s_lambda(&lam);
        let id = |e: ChainElement| s.id_of(&e.to_string()).expect("element of S(Λ)");
        let chain: Vec<ElemId> = lam.iter().map(|&i| id(ChainElement::C(i))).collect();
        let p = RefinementProblem::new(&s, id(ChainElement::A), id(ChainElement::B), chain).expect("c_i ≤ a ∨ b");
        let brute = refine_bruteforce(&p, DEFAULT_BRUTE_BOUND);
        t.check(brute == Ok(BruteOutcome::Unsat), || format!("S({lam:?}): brute force gave {brute:?}"));
        t.check(refine_lattice(&p).is_err(), || format!("S({lam:?}): meets produced a refinement"));
        t.check(refine_strongly_distributive(&p).is_err(), || format!("S({lam:?}): sd produced a refinement"));
    }
}
