//! Seeded random inputs for the self-test and the property sweeps.

use num_bigint::BigInt;
use rand::Rng;

use crate::bundles::{BundleFamily, IndexSet};
use crate::matching::hall_via_matching;
use crate::ring::{Atom, Monomial, RingElement};

fn atom(id: u128) -> Atom {
    Atom::new(id).expect("sampled ids start at 1")
}

/// Up to `max_terms` terms over atoms `1..=max_atom` with coefficients in
/// `-max_coeff..=max_coeff`.
pub fn ring_element<R: Rng>(
    rng: &mut R,
    max_atom: u32,
    max_terms: usize,
    max_coeff: i64,
) -> RingElement {
    let terms = rng.gen_range(0..=max_terms);
    RingElement::from_terms((0..terms).map(|_| {
        let mono = Monomial::from_atoms(
            (1..=max_atom)
                .filter(|_| rng.gen_bool(0.4))
                .map(|i| atom(i.into())),
        );
        (mono, BigInt::from(rng.gen_range(-max_coeff..=max_coeff)))
    }))
}

/// A uniformly random nonempty subset of `1..=max_atom`.
pub fn index_set<R: Rng>(rng: &mut R, max_atom: u32) -> IndexSet {
    let mask: u64 = rng.gen_range(1..(1u64 << max_atom));
    IndexSet::new(
        (0..max_atom)
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| atom(u128::from(b) + 1)),
    )
    .expect("mask is nonzero")
}

/// `1..=max_m` sets, each a random nonempty subset of `1..=max_atom`.
pub fn family<R: Rng>(rng: &mut R, max_m: usize, max_atom: u32) -> BundleFamily {
    let m = rng.gen_range(1..=max_m);
    BundleFamily::from_sets((0..m).map(|_| index_set(rng, max_atom)).collect())
}

/// A random family satisfying Hall's condition, by rejection.
pub fn hall_family<R: Rng>(rng: &mut R, max_m: usize, max_atom: u32) -> BundleFamily {
    loop {
        let f = family(rng, max_m, max_atom);
        if hall_via_matching(&f) {
            return f;
        }
    }
}
