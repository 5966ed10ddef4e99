//! Exact arithmetic in `Z[x1, x2, ...] / (xi^2)`.
//!
//! This is the integral cohomology ring of a finite product of 2-spheres,
//! with `xi` the pullback of the orientation class along the i-th
//! projection. Every monomial is squarefree, so a monomial is just a finite
//! set of atoms and multiplication of two monomials either unions disjoint
//! supports or vanishes.
//!
//! The number of generators is never fixed: an element mentions finitely
//! many atoms and all operations work over the union of what they see.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sphere coordinate, i.e. the index `n` of the generator `xn`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u128", into = "u128")]
pub struct Atom(u128);

impl Atom {
    pub fn new(id: u128) -> Result<Self> {
        if id == 0 {
            Err(Error::InvalidAtom(id))
        } else {
            Ok(Atom(id))
        }
    }

    pub const fn id(self) -> u128 {
        self.0
    }
}

impl TryFrom<u128> for Atom {
    type Error = Error;

    fn try_from(id: u128) -> Result<Self> {
        Atom::new(id)
    }
}

impl From<Atom> for u128 {
    fn from(a: Atom) -> u128 {
        a.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A squarefree monomial, stored as its strictly ascending support.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<Atom>);

impl Monomial {
    /// The empty monomial (the unit).
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    /// Builds a monomial from any collection of atoms. Repeats collapse,
    /// since a monomial is a set of atoms.
    pub fn from_atoms<I: IntoIterator<Item = Atom>>(atoms: I) -> Self {
        let mut v: Vec<Atom> = atoms.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Monomial(v)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, a: Atom) -> bool {
        self.0.binary_search(&a).is_ok()
    }

    /// Product of two monomials: `None` when the supports overlap (the
    /// product contains some `xi^2` and vanishes).
    pub fn disjoint_union(&self, other: &Monomial) -> Option<Monomial> {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => return None,
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Some(Monomial(out))
    }
}

// Graded order: lower degree first, then lexicographic on supports.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, a) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            write!(f, "x{}", a)?;
        }
        Ok(())
    }
}

/// A ring element: a finite map from monomials to nonzero integers.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RingElement {
    terms: BTreeMap<Monomial, BigInt>,
}

impl RingElement {
    pub fn zero() -> Self {
        RingElement::default()
    }

    pub fn one() -> Self {
        RingElement::monomial(Monomial::one(), BigInt::one())
    }

    /// The degree-one class `xa`.
    pub fn generator(a: Atom) -> Self {
        RingElement::monomial(Monomial(vec![a]), BigInt::one())
    }

    pub fn monomial(m: Monomial, c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        RingElement { terms }
    }

    /// Sums a list of terms, merging repeated monomials.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, BigInt)>>(terms: I) -> Self {
        let mut out = RingElement::zero();
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    /// Top class `x1*x2*...*xn` of `H*((S^2)^n)`.
    pub fn top_class(n: usize) -> Self {
        let atoms = (1..=n as u128).map(Atom);
        RingElement::monomial(Monomial(atoms.collect()), BigInt::one())
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `m`, zero when absent.
    pub fn coeff(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// `Some(d)` when the element is nonzero and every term has degree `d`.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut degrees = self.terms.keys().map(Monomial::degree);
        let d = degrees.next()?;
        degrees.all(|e| e == d).then_some(d)
    }

    pub fn add(&self, other: &RingElement) -> RingElement {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    /// Bilinear product. Pairs of monomials with overlapping supports are
    /// skipped before their coefficients are ever multiplied.
    pub fn mul(&self, other: &RingElement) -> RingElement {
        let mut out = RingElement::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some(m) = ma.disjoint_union(mb) {
                    out.add_term(m, ca * cb);
                }
            }
        }
        out
    }

    pub fn neg(&self) -> RingElement {
        RingElement {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    /// Every atom mentioned by some term.
    pub fn support(&self) -> Vec<Atom> {
        let mut v: Vec<Atom> = self
            .terms
            .keys()
            .flat_map(|m| m.atoms().iter().copied())
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Evaluates `x_{i1} * x_{i2} * ... * x_{iN}` for a length-`n` sequence over
/// `{1..n}`. The result is the top class when the sequence is a permutation
/// and zero otherwise.
pub fn product_of_generators(seq: &[Atom], n: usize) -> Result<RingElement> {
    if seq.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: seq.len(),
        });
    }
    if let Some(a) = seq.iter().find(|a| a.id() > n as u128) {
        return Err(Error::InvalidInput(format!("atom {a} outside 1..={n}")));
    }
    Ok(seq.iter().fold(RingElement::one(), |acc, &a| {
        acc.mul(&RingElement::generator(a))
    }))
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let abs = c.abs();
            match (k, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.degree() == 0 {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

impl Add for &RingElement {
    type Output = RingElement;
    fn add(self, rhs: &RingElement) -> RingElement {
        RingElement::add(self, rhs)
    }
}

impl Sub for &RingElement {
    type Output = RingElement;
    fn sub(self, rhs: &RingElement) -> RingElement {
        RingElement::add(self, &RingElement::neg(rhs))
    }
}

impl Mul for &RingElement {
    type Output = RingElement;
    fn mul(self, rhs: &RingElement) -> RingElement {
        RingElement::mul(self, rhs)
    }
}

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        RingElement::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: u128) -> RingElement {
        RingElement::generator(Atom::new(i).unwrap())
    }

    fn mono(ids: &[u128]) -> Monomial {
        Monomial::from_atoms(ids.iter().map(|&i| Atom::new(i).unwrap()))
    }

    fn seq(ids: &[u128]) -> Vec<Atom> {
        ids.iter().map(|&i| Atom::new(i).unwrap()).collect()
    }

    #[test]
    fn atom_zero_rejected() {
        assert_eq!(Atom::new(0), Err(Error::InvalidAtom(0)));
    }

    #[test]
    fn generator_is_single_term() {
        let g = x(1);
        assert_eq!(g.num_terms(), 1);
        assert_eq!(g.coeff(&mono(&[1])), BigInt::one());
    }

    #[test]
    fn generators_square_to_zero() {
        assert!(x(1).mul(&x(1)).is_zero());
        assert_eq!(
            x(1).mul(&x(2)),
            RingElement::monomial(mono(&[1, 2]), 1.into())
        );
    }

    #[test]
    fn addition() {
        assert_eq!(x(1).add(&x(1)), RingElement::monomial(mono(&[1]), 2.into()));
        assert!(x(1).add(&x(1).neg()).is_zero());
        assert_eq!(RingElement::zero().add(&x(3)), x(3));
    }

    #[test]
    fn products_of_sums() {
        let s = &x(1) + &x(2);
        assert_eq!(&s * &x(2), RingElement::monomial(mono(&[1, 2]), 1.into()));
        assert_eq!(&s * &s, RingElement::monomial(mono(&[1, 2]), 2.into()));
        assert_eq!(&s * &RingElement::one(), s);
    }

    #[test]
    fn coefficients() {
        let e = RingElement::monomial(mono(&[1, 2]), 2.into());
        assert_eq!(e.coeff(&mono(&[1, 2])), BigInt::from(2));
        assert_eq!(e.coeff(&mono(&[1])), BigInt::zero());
        assert_eq!(RingElement::zero().coeff(&Monomial::one()), BigInt::zero());
    }

    #[test]
    fn zero_tests() {
        assert!(RingElement::zero().is_zero());
        assert!(!x(1).is_zero());
        assert!(x(1).mul(&x(1)).is_zero());
    }

    #[test]
    fn product_rule_examples() {
        assert_eq!(
            product_of_generators(&seq(&[2, 1]), 2).unwrap(),
            RingElement::top_class(2)
        );
        assert!(product_of_generators(&seq(&[1, 1]), 2).unwrap().is_zero());
        assert_eq!(
            product_of_generators(&seq(&[3, 1, 2]), 3).unwrap(),
            RingElement::top_class(3)
        );
    }

    #[test]
    fn product_rule_rejects_bad_sequences() {
        assert!(matches!(
            product_of_generators(&seq(&[1]), 2),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            product_of_generators(&seq(&[1, 3]), 2),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn rendering() {
        let e = RingElement::from_terms([
            (mono(&[3, 4]), BigInt::from(1)),
            (mono(&[1, 2]), BigInt::from(2)),
        ]);
        assert_eq!(e.to_string(), "2*x1*x2 + x3*x4");
        assert_eq!(RingElement::zero().to_string(), "0");
        assert_eq!(RingElement::one().to_string(), "1");
        let f = RingElement::from_terms([
            (Monomial::one(), BigInt::from(-3)),
            (mono(&[1]), BigInt::from(-1)),
            (mono(&[2]), BigInt::from(5)),
        ]);
        assert_eq!(f.to_string(), "-3 - x1 + 5*x2");
    }

    #[test]
    fn homogeneous_degree() {
        assert_eq!(RingElement::zero().homogeneous_degree(), None);
        assert_eq!(RingElement::one().homogeneous_degree(), Some(0));
        assert_eq!((&x(1) + &x(2)).homogeneous_degree(), Some(1));
        assert_eq!((&x(1) + &RingElement::one()).homogeneous_degree(), None);
    }
}
