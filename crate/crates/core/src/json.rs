//! JSON interchange for semilattices, lattices, posets and measures.
//!
//! Join and meet tables list every unordered pair `{x, y}` (including `x = y`)
//! once as `[x, y, z]`; an omitted pair is an error.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{parse_f, print_f, ChainFamily, FElement};
use crate::congruence::FiniteLattice;
use crate::free::term::TermError;
use crate::free::FreeLevel;
use crate::measure::{MeasureError, PosetMeasure};
use crate::order::{validate_semilattice, ElemId, FiniteJoinSemilattice, FinitePoset, OrderError, SemilatticeCandidate};

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("invalid JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("duplicate element name {0}")]
    DuplicateName(String),
    #[error("unknown element {0}")]
    UnknownName(String),
    #[error("pair ({0}, {1}) is missing from the table")]
    MissingPair(String, String),
    #[error("pair ({0}, {1}) is listed with two different values")]
    Conflict(String, String),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemilatticeJson {
    pub elements: Vec<String>,
    pub zero: String,
    pub joins: Vec<[String; 3]>,
    /// Optional generating pairs `x ≤ y` of an order to cross-check against
    /// the one derived from `joins`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<[String; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meets: Option<Vec<[String; 3]>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetJson {
    pub elements: Vec<String>,
    /// Generating pairs `x ≤ y`; the order is their reflexive-transitive
    /// closure.
    pub leq: Vec<[String; 2]>,
}

/// Value semilattice of a measure: an explicit table, or `"terms"` for
/// elements of `F(Λ)` written in the term grammar.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValuesJson {
    Table(SemilatticeJson),
    Terms(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureJson {
    pub poset: PosetJson,
    pub values: ValuesJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    pub mu: Vec<[String; 3]>,
}

/// `a`, `b` and a chain below `a ∨ b` in an explicit semilattice, with an
/// optional insertion order for the sequential algorithm.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefinementJson {
    pub semilattice: SemilatticeJson,
    pub a: String,
    pub b: String,
    pub chain: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<usize>>,
}

/// Parsed parts of a [`RefinementJson`]: the semilattice, `a`, `b` and the
/// chain.
pub type RefinementParts = (FiniteJoinSemilattice, ElemId, ElemId, Vec<ElemId>);

/// A parsed measure with either kind of values.
#[derive(Clone, Debug)]
pub enum AnyMeasure {
    Table(PosetMeasure<FiniteJoinSemilattice>),
    Terms(PosetMeasure<FreeLevel<ChainFamily>>),
}

fn index(names: &[String]) -> Result<HashMap<&str, usize>, JsonError> {
    let mut m = HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if m.insert(n.as_str(), i).is_some() {
            return Err(JsonError::DuplicateName(n.clone()));
        }
    }
    Ok(m)
}

fn lookup(idx: &HashMap<&str, usize>, name: &str) -> Result<usize, JsonError> {
    idx.get(name).copied().ok_or_else(|| JsonError::UnknownName(name.into()))
}

fn symmetric_table(names: &[String], entries: &[[String; 3]]) -> Result<Vec<ElemId>, JsonError> {
    let idx = index(names)?;
    let n = names.len();
    let mut t: Vec<Option<usize>> = vec![None; n * n];
    for [x, y, z] in entries {
        let (x, y, z) = (lookup(&idx, x)?, lookup(&idx, y)?, lookup(&idx, z)?);
        for (p, q) in [(x, y), (y, x)] {
            match t[p * n + q] {
                Some(old) if old != z => {
                    return Err(JsonError::Conflict(names[x].clone(), names[y].clone()))
                }
                _ => t[p * n + q] = Some(z),
            }
        }
    }
    t.iter()
        .enumerate()
        .map(|(i, v)| v.map(ElemId).ok_or_else(|| JsonError::MissingPair(names[i / n].clone(), names[i % n].clone())))
        .collect()
}

fn table_entries(names: &[String], f: impl Fn(usize, usize) -> usize) -> Vec<[String; 3]> {
    let n = names.len();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for x in 0..n {
        for y in x..n {
            out.push([names[x].clone(), names[y].clone(), names[f(x, y)].clone()]);
        }
    }
    out
}

pub fn semilattice_to_json(s: &FiniteJoinSemilattice) -> SemilatticeJson {
    let names = s.poset().names().to_vec();
    SemilatticeJson {
        joins: table_entries(&names, |x, y| s.join(ElemId(x), ElemId(y)).0),
        zero: s.name(s.zero()).to_string(),
        elements: names,
        order: None,
        meets: None,
    }
}

/// Validates the join table. Without `order` the order is derived from the
/// joins; with it, the joins must be least upper bounds for that order.
pub fn semilattice_from_json(j: &SemilatticeJson) -> Result<FiniteJoinSemilattice, JsonError> {
    let join = symmetric_table(&j.elements, &j.joins)?;
    let zero = ElemId(lookup(&index(&j.elements)?, &j.zero)?);
    match &j.order {
        None => Ok(FiniteJoinSemilattice::from_join_table(j.elements.clone(), zero, join)?),
        Some(pairs) => {
            let poset = poset_from_json(&PosetJson {
                elements: j.elements.clone(),
                leq: pairs.clone(),
            })?;
            Ok(validate_semilattice(SemilatticeCandidate {
                names: j.elements.clone(),
                leq: poset.matrix().clone(),
                zero,
                join,
            })?)
        }
    }
}

pub fn refinement_from_json(j: &RefinementJson) -> Result<RefinementParts, JsonError> {
    let s = semilattice_from_json(&j.semilattice)?;
    let id = |n: &str| s.id_of(n).ok_or_else(|| JsonError::UnknownName(n.into()));
    let (a, b) = (id(&j.a)?, id(&j.b)?);
    let chain = j.chain.iter().map(|c| id(c)).collect::<Result<Vec<_>, _>>()?;
    Ok((s, a, b, chain))
}

pub fn lattice_to_json(l: &FiniteLattice) -> SemilatticeJson {
    let mut j = semilattice_to_json(l.semilattice());
    j.meets = Some(table_entries(&j.elements, |x, y| l.meet(ElemId(x), ElemId(y)).0));
    j
}

/// A lattice file; when `meets` is absent the meets are computed.
pub fn lattice_from_json(j: &SemilatticeJson) -> Result<FiniteLattice, JsonError> {
    let s = semilattice_from_json(j)?;
    match &j.meets {
        Some(m) => Ok(FiniteLattice::with_meets(s, symmetric_table(&j.elements, m)?)?),
        None => Ok(FiniteLattice::from_semilattice(s)),
    }
}

pub fn poset_to_json(p: &FinitePoset) -> PosetJson {
    let names = p.names().to_vec();
    let leq = p
        .covers()
        .into_iter()
        .map(|(x, y)| [names[x.0].clone(), names[y.0].clone()])
        .collect();
    PosetJson { elements: names, leq }
}

pub fn poset_from_json(j: &PosetJson) -> Result<FinitePoset, JsonError> {
    let idx = index(&j.elements)?;
    let pairs = j
        .leq
        .iter()
        .map(|[x, y]| Ok((ElemId(lookup(&idx, x)?), ElemId(lookup(&idx, y)?))))
        .collect::<Result<Vec<_>, JsonError>>()?;
    Ok(FinitePoset::from_relation(j.elements.clone(), &pairs)?)
}

fn mu_table<E: Clone>(
    p: &FinitePoset,
    entries: &[[String; 3]],
    value: impl Fn(&str) -> Result<E, JsonError>,
) -> Result<Vec<E>, JsonError> {
    let idx = index(p.names())?;
    let n = p.len();
    let mut t: Vec<Option<E>> = vec![None; n * n];
    for [x, y, v] in entries {
        let (x, y) = (lookup(&idx, x)?, lookup(&idx, y)?);
        if t[x * n + y].is_some() {
            return Err(JsonError::Conflict(p.names()[x].clone(), p.names()[y].clone()));
        }
        t[x * n + y] = Some(value(v)?);
    }
    t.into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| JsonError::MissingPair(p.names()[i / n].clone(), p.names()[i % n].clone())))
        .collect()
}

fn mu_entries<E>(p: &FinitePoset, m: impl Fn(ElemId, ElemId) -> E, show: impl Fn(&E) -> String) -> Vec<[String; 3]> {
    let mut out = Vec::new();
    for x in p.ids() {
        for y in p.ids() {
            out.push([p.name(x).to_string(), p.name(y).to_string(), show(&m(x, y))]);
        }
    }
    out
}

pub fn measure_from_json(j: &MeasureJson) -> Result<AnyMeasure, JsonError> {
    let poset = poset_from_json(&j.poset)?;
    match &j.values {
        ValuesJson::Table(s) => {
            let s = semilattice_from_json(s)?;
            let mu = mu_table(&poset, &j.mu, |v| {
                s.id_of(v).ok_or_else(|| JsonError::UnknownName(v.into()))
            })?;
            Ok(AnyMeasure::Table(PosetMeasure::new(poset, s, mu)?))
        }
        ValuesJson::Terms(kind) if kind == "terms" => {
            let mu = mu_table(&poset, &j.mu, |v| Ok(parse_f(v)?))?;
            let values = FreeLevel::new(ChainFamily, j.depth);
            Ok(AnyMeasure::Terms(PosetMeasure::new(poset, values, mu)?))
        }
        ValuesJson::Terms(kind) => Err(JsonError::UnknownName(kind.clone())),
    }
}

pub fn measure_to_json(m: &AnyMeasure) -> MeasureJson {
    match m {
        AnyMeasure::Table(m) => {
            let s = m.values();
            MeasureJson {
                poset: poset_to_json(m.poset()),
                values: ValuesJson::Table(semilattice_to_json(s)),
                depth: None,
                mu: mu_entries(m.poset(), |x, y| m.value(x, y), |v| s.name(*v).to_string()),
            }
        }
        AnyMeasure::Terms(m) => MeasureJson {
            poset: poset_to_json(m.poset()),
            values: ValuesJson::Terms("terms".into()),
            depth: m.values().depth(),
            mu: mu_entries(m.poset(), |x, y| m.value(x, y), |v: &FElement| print_f(v)),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::theta_plus_measure;
    use crate::measure::counterexample_measure;
    use crate::order::fixtures::square;

    #[test]
    fn semilattice_round_trip() {
        let s = square();
        let j = semilattice_to_json(&s);
        assert_eq!(j.joins.len(), 10);
        let text = serde_json::to_string(&j).unwrap();
        let back: SemilatticeJson = serde_json::from_str(&text).unwrap();
        assert_eq!(semilattice_from_json(&back).unwrap(), s);
    }

    #[test]
    fn missing_and_conflicting_pairs() {
        let mut j = semilattice_to_json(&square());
        j.joins.pop();
        assert!(matches!(semilattice_from_json(&j), Err(JsonError::MissingPair(..))));
        let mut j = semilattice_to_json(&square());
        j.joins.push(["a".into(), "b".into(), "a".into()]);
        assert!(matches!(semilattice_from_json(&j), Err(JsonError::Conflict(..))));
        let mut j = semilattice_to_json(&square());
        let e = j.joins.iter_mut().find(|e| e[0] == "a" && e[1] == "b").unwrap();
        e[2] = "a".into();
        // without an order this is the chain 0 < b < a < ab
        assert!(semilattice_from_json(&j).is_ok());
        j.order = Some(vec![
            ["0".into(), "a".into()],
            ["0".into(), "b".into()],
            ["a".into(), "ab".into()],
            ["b".into(), "ab".into()],
        ]);
        assert_eq!(
            semilattice_from_json(&j).unwrap_err().to_string(),
            OrderError::JoinNotLub { x: "a".into(), y: "b".into() }.to_string()
        );
    }

    #[test]
    fn measure_round_trips() {
        let m = AnyMeasure::Terms(counterexample_measure(3, 1));
        let j = measure_to_json(&m);
        let back = measure_from_json(&j).unwrap();
        assert_eq!(measure_to_json(&back), j);

        let l = FiniteLattice::from_semilattice(square());
        let (_, m) = theta_plus_measure(&l);
        let j = measure_to_json(&AnyMeasure::Table(m));
        let text = serde_json::to_string_pretty(&j).unwrap();
        let back: MeasureJson = serde_json::from_str(&text).unwrap();
        assert_eq!(measure_to_json(&measure_from_json(&back).unwrap()), j);
    }

    #[test]
    fn lattice_round_trip() {
        let l = FiniteLattice::from_semilattice(square());
        let j = lattice_to_json(&l);
        assert_eq!(lattice_from_json(&j).unwrap(), l);
    }
}
