//! Direct sums of the line bundles `zeta_I` over products of 2-spheres.
//!
//! `zeta_I` is the tensor product of the pulled-back line bundles
//! `zeta_n`, `n in I`. A [`BundleFamily`] is the direct sum of finitely many
//! such lines together with a number of trivial lines. The same data also
//! names the projection class `p_I1 + ... + p_Im + g^k`, and the library
//! only ever works at the level of these classes.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::ring::{Atom, RingElement};

/// A nonempty finite set of atoms, stored ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct IndexSet(Vec<Atom>);

impl IndexSet {
    pub fn new<I: IntoIterator<Item = Atom>>(atoms: I) -> Result<Self> {
        let mut v: Vec<Atom> = atoms.into_iter().collect();
        if v.is_empty() {
            return Err(Error::EmptyIndexSet);
        }
        v.sort_unstable();
        v.dedup();
        Ok(IndexSet(v))
    }

    pub fn from_ids(ids: &[u128]) -> Result<Self> {
        let atoms = ids
            .iter()
            .map(|&i| Atom::new(i))
            .collect::<Result<Vec<_>>>()?;
        IndexSet::new(atoms)
    }

    pub fn singleton(a: Atom) -> Self {
        IndexSet(vec![a])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, a: Atom) -> bool {
        self.0.binary_search(&a).is_ok()
    }

    pub fn as_singleton(&self) -> Option<Atom> {
        match self.0.as_slice() {
            [a] => Some(*a),
            _ => None,
        }
    }
}

/// `zeta_I1 + ... + zeta_Im + theta^trivial_lines`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct BundleFamily {
    pub sets: Vec<IndexSet>,
    pub trivial_lines: usize,
}

impl BundleFamily {
    pub fn new(sets: Vec<IndexSet>, trivial_lines: usize) -> Self {
        BundleFamily {
            sets,
            trivial_lines,
        }
    }

    /// Family without trivial summands.
    pub fn from_sets(sets: Vec<IndexSet>) -> Self {
        BundleFamily::new(sets, 0)
    }

    /// Shorthand for tests and fixtures: `from_ids(&[&[1, 2], &[2]])`.
    pub fn from_ids(sets: &[&[u128]]) -> Result<Self> {
        let sets = sets
            .iter()
            .map(|s| IndexSet::from_ids(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(BundleFamily::from_sets(sets))
    }

    /// Number of nontrivial summands `m`.
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty() && self.trivial_lines == 0
    }

    /// Complex rank: every summand is a line.
    pub fn dimension(&self) -> usize {
        self.sets.len() + self.trivial_lines
    }

    pub fn direct_sum(&self, other: &BundleFamily) -> BundleFamily {
        let mut sets = self.sets.clone();
        sets.extend(other.sets.iter().cloned());
        BundleFamily::new(sets, self.trivial_lines + other.trivial_lines)
    }

    /// Ascending union of all index sets.
    pub fn union_atoms(&self) -> Vec<Atom> {
        let mut v: Vec<Atom> = self
            .sets
            .iter()
            .flat_map(|s| s.atoms().iter().copied())
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Smallest `n` such that `{n}` occurs at least twice among the sets.
    /// Such a pair `zeta_n + zeta_n` splits off a trivial line.
    pub fn has_duplicate_singleton(&self) -> Option<Atom> {
        let mut singles: Vec<Atom> = self
            .sets
            .iter()
            .filter_map(IndexSet::as_singleton)
            .collect();
        singles.sort_unstable();
        singles.windows(2).find(|w| w[0] == w[1]).map(|w| w[0])
    }

    /// Canonical JSON: sorted, deduplicated inner arrays.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("family serialization cannot fail")
    }

    /// Parses `{"sets": [[1,2],[2]], "trivial_lines": 0}`. Inner arrays are
    /// canonicalized; `trivial_lines` defaults to 0 when absent. Errors name
    /// the offending field.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
            field: "<document>".into(),
            message: e.to_string(),
        })?;
        BundleFamily::from_json_value(&value)
    }

    pub fn from_json_value(value: &Value) -> Result<Self> {
        let parse_err = |field: String, message: &str| Error::Parse {
            field,
            message: message.to_string(),
        };
        let obj = value
            .as_object()
            .ok_or_else(|| parse_err("<document>".into(), "expected a JSON object"))?;
        if let Some(key) = obj.keys().find(|k| *k != "sets" && *k != "trivial_lines") {
            return Err(parse_err(key.clone(), "unknown field"));
        }
        let sets_val = obj
            .get("sets")
            .ok_or_else(|| parse_err("sets".into(), "missing field"))?;
        let arr = sets_val
            .as_array()
            .ok_or_else(|| parse_err("sets".into(), "expected an array of arrays"))?;
        let mut sets = Vec::with_capacity(arr.len());
        for (i, inner) in arr.iter().enumerate() {
            let inner = inner
                .as_array()
                .ok_or_else(|| parse_err(format!("sets[{i}]"), "expected an array of atoms"))?;
            if inner.is_empty() {
                return Err(parse_err(
                    format!("sets[{i}]"),
                    "index sets must be nonempty",
                ));
            }
            let mut atoms = Vec::with_capacity(inner.len());
            for (k, a) in inner.iter().enumerate() {
                let id = a.as_u64().filter(|&id| id >= 1).ok_or_else(|| {
                    parse_err(format!("sets[{i}][{k}]"), "atoms must be positive integers")
                })?;
                atoms.push(Atom::new(id as u128)?);
            }
            sets.push(IndexSet::new(atoms)?);
        }
        let trivial_lines = match obj.get("trivial_lines") {
            None => 0,
            Some(v) => v.as_u64().ok_or_else(|| {
                parse_err("trivial_lines".into(), "expected a nonnegative integer")
            })? as usize,
        };
        Ok(BundleFamily::new(sets, trivial_lines))
    }
}

/// `e(zeta_I) = sum over n in I of xn`.
pub fn euler_line(set: &IndexSet) -> RingElement {
    set.atoms().iter().fold(RingElement::zero(), |acc, &a| {
        acc.add(&RingElement::generator(a))
    })
}

/// Euler class of the family via the product formula. Any trivial summand
/// kills the class; the empty sum has class 1.
pub fn euler_class(family: &BundleFamily) -> RingElement {
    if family.trivial_lines > 0 {
        return RingElement::zero();
    }
    let mut acc = RingElement::one();
    for set in &family.sets {
        // Colliding monomials are dropped inside `mul`, so the running
        // product never grows beyond its nonzero support.
        acc = acc.mul(&euler_line(set));
        if acc.is_zero() {
            break;
        }
    }
    acc
}
