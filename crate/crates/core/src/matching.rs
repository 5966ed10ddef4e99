//! Hall's condition, systems of distinct representatives, and SDR counts.
//!
//! Families are viewed as bipartite graphs between set indices (left) and
//! the atoms of their union (right). Atoms are densely renumbered in
//! ascending order, so every traversal below is deterministic.

use std::collections::VecDeque;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use serde::Serialize;

use crate::bundles::BundleFamily;
use crate::error::{Error, Result};
use crate::ring::Atom;

/// Largest family size accepted by [`hall_exhaustive`] by default.
pub const HALL_EXHAUSTIVE_CAP: usize = 16;
/// Largest matrix order accepted by [`sdr_count`].
pub const PERMANENT_CAP: usize = 20;
/// Largest matrix order accepted by [`sdr_count_naive`].
pub const NAIVE_PERMANENT_CAP: usize = 8;

/// Representatives `t_1, ..., t_m` with `t_j in I_j`, when they exist.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct MatchingResult {
    pub assignment: Option<Vec<Atom>>,
}

impl MatchingResult {
    pub fn none() -> Self {
        MatchingResult { assignment: None }
    }

    pub fn saturating(assignment: Vec<Atom>) -> Self {
        MatchingResult {
            assignment: Some(assignment),
        }
    }

    pub fn is_saturating(&self) -> bool {
        self.assignment.is_some()
    }

    /// True when the assignment is an SDR of `family`: one representative
    /// per set, each a member of its set, all distinct. An absent
    /// assignment is never valid.
    pub fn is_valid_for(&self, family: &BundleFamily) -> bool {
        let Some(reps) = &self.assignment else {
            return false;
        };
        if reps.len() != family.len() {
            return false;
        }
        if !reps
            .iter()
            .zip(&family.sets)
            .all(|(&t, set)| set.contains(t))
        {
            return false;
        }
        let mut sorted = reps.clone();
        sorted.sort_unstable();
        sorted.windows(2).all(|w| w[0] != w[1])
    }
}

/// A subfamily whose union is smaller than itself. Indices are 1-based
/// positions in the family, ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct HallViolation {
    pub indices: Vec<usize>,
}

impl HallViolation {
    /// Checks `|union of I_j, j in F| < |F|` for a nonempty in-range `F`.
    pub fn is_valid_for(&self, family: &BundleFamily) -> bool {
        if self.indices.is_empty() || self.indices.iter().any(|&j| j == 0 || j > family.len()) {
            return false;
        }
        let mut union: Vec<Atom> = self
            .indices
            .iter()
            .flat_map(|&j| family.sets[j - 1].atoms().iter().copied())
            .collect();
        union.sort_unstable();
        union.dedup();
        let mut distinct = self.indices.clone();
        distinct.sort_unstable();
        distinct.dedup();
        union.len() < distinct.len()
    }
}

/// Left adjacency with atoms renumbered densely.
struct Bipartite {
    atoms: Vec<Atom>,
    adj: Vec<Vec<usize>>,
}

impl Bipartite {
    fn new(family: &BundleFamily) -> Self {
        let atoms = family.union_atoms();
        let adj = family
            .sets
            .iter()
            .map(|s| {
                s.atoms()
                    .iter()
                    .map(|a| atoms.binary_search(a).expect("atom is in the union"))
                    .collect()
            })
            .collect();
        Bipartite { atoms, adj }
    }
}

const UNREACHED: u32 = u32::MAX;

/// Hopcroft-Karp. Returns the right partner of every left vertex and the
/// left partner of every right vertex.
fn hopcroft_karp(adj: &[Vec<usize>], n_right: usize) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
    let n_left = adj.len();
    let mut match_left: Vec<Option<usize>> = vec![None; n_left];
    let mut match_right: Vec<Option<usize>> = vec![None; n_right];
    let mut dist = vec![UNREACHED; n_left];
    let mut cursor = vec![0usize; n_left];
    let mut queue = VecDeque::new();
    let mut stack: Vec<usize> = Vec::new();

    loop {
        // Layer the free left vertices and everything reachable along
        // alternating paths.
        queue.clear();
        for u in 0..n_left {
            if match_left[u].is_none() {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = UNREACHED;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                match match_right[v] {
                    None => found = true,
                    Some(w) if dist[w] == UNREACHED => {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                    Some(_) => {}
                }
            }
        }
        if !found {
            break;
        }

        cursor.iter_mut().for_each(|c| *c = 0);
        for root in 0..n_left {
            if match_left[root].is_some() {
                continue;
            }
            stack.clear();
            stack.push(root);
            while let Some(&u) = stack.last() {
                if cursor[u] == adj[u].len() {
                    dist[u] = UNREACHED;
                    stack.pop();
                    if let Some(&parent) = stack.last() {
                        cursor[parent] += 1;
                    }
                    continue;
                }
                let v = adj[u][cursor[u]];
                match match_right[v] {
                    None => {
                        for &x in &stack {
                            let y = adj[x][cursor[x]];
                            match_left[x] = Some(y);
                            match_right[y] = Some(x);
                        }
                        break;
                    }
                    Some(w) if dist[w] != UNREACHED && dist[w] == dist[u] + 1 => stack.push(w),
                    Some(_) => cursor[u] += 1,
                }
            }
        }
    }
    (match_left, match_right)
}

/// Per-set representative of a maximum matching (not necessarily
/// saturating). `None` marks unmatched sets.
pub fn maximum_matching(family: &BundleFamily) -> Vec<Option<Atom>> {
    let g = Bipartite::new(family);
    let (left, _) = hopcroft_karp(&g.adj, g.atoms.len());
    left.into_iter().map(|v| v.map(|v| g.atoms[v])).collect()
}

/// Maximum matching, reported as an SDR when it saturates every set.
pub fn max_matching(family: &BundleFamily) -> MatchingResult {
    let reps: Option<Vec<Atom>> = maximum_matching(family).into_iter().collect();
    MatchingResult { assignment: reps }
}

pub fn hall_via_matching(family: &BundleFamily) -> bool {
    max_matching(family).is_saturating()
}

/// Hall's condition by enumerating all `2^m - 1` nonempty subfamilies.
/// Trivial lines are ignored.
pub fn hall_exhaustive(family: &BundleFamily) -> Result<bool> {
    Ok(exhaustive_violation(family, HALL_EXHAUSTIVE_CAP)?.is_none())
}

/// First subfamily (in ascending bitmask order) violating Hall's
/// inequality, found by enumeration.
pub fn exhaustive_violation(family: &BundleFamily, cap: usize) -> Result<Option<HallViolation>> {
    let m = family.len();
    if m > cap {
        return Err(Error::CapExceeded {
            what: "family size for exhaustive Hall check",
            value: m,
            cap,
        });
    }
    let g = Bipartite::new(family);
    let words = g.atoms.len().div_ceil(64).max(1);
    let rows: Vec<Vec<u64>> = g
        .adj
        .iter()
        .map(|nbrs| {
            let mut row = vec![0u64; words];
            for &v in nbrs {
                row[v / 64] |= 1 << (v % 64);
            }
            row
        })
        .collect();
    // unions[mask] = union of the rows in `mask`, built from the mask with
    // its lowest bit cleared.
    let mut unions = vec![0u64; (1usize << m) * words];
    for mask in 1usize..(1 << m) {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let mut size = 0u32;
        for w in 0..words {
            let word = unions[rest * words + w] | rows[low][w];
            unions[mask * words + w] = word;
            size += word.count_ones();
        }
        if (size as usize) < mask.count_ones() as usize {
            let indices = (0..m)
                .filter(|&j| mask >> j & 1 == 1)
                .map(|j| j + 1)
                .collect();
            return Ok(Some(HallViolation { indices }));
        }
    }
    Ok(None)
}

/// A Hall violation certificate, or `None` exactly when Hall holds.
///
/// Starting from a set left unmatched by a maximum matching, collect every
/// set reachable along alternating paths. All atoms met on the way are
/// matched (else the matching would augment) and their partners are among
/// the collected sets, so the union has exactly one fewer atom than the
/// collected subfamily.
pub fn find_violation(family: &BundleFamily) -> Option<HallViolation> {
    let g = Bipartite::new(family);
    let (left, right) = hopcroft_karp(&g.adj, g.atoms.len());
    let root = left.iter().position(Option::is_none)?;
    let mut in_f = vec![false; g.adj.len()];
    let mut seen_atom = vec![false; g.atoms.len()];
    let mut queue = VecDeque::from([root]);
    in_f[root] = true;
    while let Some(u) = queue.pop_front() {
        for &v in &g.adj[u] {
            if seen_atom[v] {
                continue;
            }
            seen_atom[v] = true;
            let w = right[v].expect("maximum matching admits no augmenting path");
            if !in_f[w] {
                in_f[w] = true;
                queue.push_back(w);
            }
        }
    }
    let indices = (0..g.adj.len())
        .filter(|&j| in_f[j])
        .map(|j| j + 1)
        .collect();
    Some(HallViolation { indices })
}

/// Columns of the incidence matrix: `atoms` ascending and deduplicated,
/// checked against the number of sets.
fn incidence_columns(family: &BundleFamily, atoms: &[Atom], cap: usize) -> Result<Vec<Atom>> {
    let mut cols = atoms.to_vec();
    cols.sort_unstable();
    cols.dedup();
    let m = family.len();
    if cols.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: cols.len(),
        });
    }
    if m > cap {
        return Err(Error::CapExceeded {
            what: "matrix order for permanent",
            value: m,
            cap,
        });
    }
    Ok(cols)
}

/// Number of bijections `sigma` from sets to `atoms` with `sigma(j) in I_j`,
/// i.e. the permanent of the 0/1 incidence matrix, by Ryser's formula over
/// column subsets in Gray-code order.
pub fn sdr_count(family: &BundleFamily, atoms: &[Atom]) -> Result<BigUint> {
    let cols = incidence_columns(family, atoms, PERMANENT_CAP)?;
    let m = cols.len();
    if m == 0 {
        return Ok(BigUint::from(1u32));
    }
    let row_masks: Vec<u32> = family
        .sets
        .iter()
        .map(|set| {
            cols.iter()
                .enumerate()
                .filter(|(_, &a)| set.contains(a))
                .fold(0u32, |mask, (k, _)| mask | 1 << k)
        })
        .collect();

    // Row sums are at most 20 and there are at most 2^20 subsets, so every
    // partial sum stays below 2^20 * 20^20 < 2^107.
    let mut row_sums = vec![0i64; m];
    let mut total: i128 = 0;
    let mut gray = 0u32;
    for k in 1u32..(1 << m) {
        let bit = k.trailing_zeros();
        gray ^= 1 << bit;
        let delta = if gray >> bit & 1 == 1 { 1 } else { -1 };
        for (sum, &mask) in row_sums.iter_mut().zip(&row_masks) {
            if mask >> bit & 1 == 1 {
                *sum += delta;
            }
        }
        if row_sums.contains(&0) {
            continue;
        }
        let prod: i128 = row_sums.iter().map(|&s| s as i128).product();
        if gray.count_ones().is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    if m % 2 == 1 {
        total = -total;
    }
    BigInt::from(total)
        .to_biguint()
        .ok_or_else(|| Error::InvariantViolation(format!("negative permanent {total}")))
}

/// Same count as [`sdr_count`], by summing over all `m!` permutations.
pub fn sdr_count_naive(family: &BundleFamily, atoms: &[Atom]) -> Result<BigUint> {
    let cols = incidence_columns(family, atoms, NAIVE_PERMANENT_CAP)?;
    let m = cols.len();
    let count = (0..m)
        .permutations(m)
        .filter(|perm| {
            perm.iter()
                .zip(&family.sets)
                .all(|(&c, set)| set.contains(cols[c]))
        })
        .count();
    Ok(BigUint::from(count))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(sets: &[&[u128]]) -> BundleFamily {
        BundleFamily::from_ids(sets).unwrap()
    }

    fn atoms(ids: &[u128]) -> Vec<Atom> {
        ids.iter().map(|&i| Atom::new(i).unwrap()).collect()
    }

    #[test]
    fn hall_exhaustive_examples() {
        assert!(!hall_exhaustive(&fam(&[&[1], &[1]])).unwrap());
        assert!(hall_exhaustive(&fam(&[&[1, 2], &[2]])).unwrap());
        assert!(hall_exhaustive(&BundleFamily::default()).unwrap());
    }

    #[test]
    fn hall_exhaustive_cap() {
        let sets: Vec<Vec<u128>> = (1..=17).map(|i| vec![i]).collect();
        let refs: Vec<&[u128]> = sets.iter().map(Vec::as_slice).collect();
        let f = fam(&refs);
        assert!(matches!(
            hall_exhaustive(&f),
            Err(Error::CapExceeded { .. })
        ));
        assert!(hall_via_matching(&f));
        assert_eq!(exhaustive_violation(&f, 17).unwrap(), None);
    }

    #[test]
    fn exhaustive_violation_reports_first_mask() {
        let f = fam(&[&[1], &[1]]);
        let v = exhaustive_violation(&f, HALL_EXHAUSTIVE_CAP)
            .unwrap()
            .unwrap();
        assert_eq!(v.indices, vec![1, 2]);
    }

    #[test]
    fn max_matching_examples() {
        assert_eq!(
            max_matching(&fam(&[&[1, 2], &[2]])).assignment,
            Some(atoms(&[1, 2]))
        );
        assert_eq!(max_matching(&fam(&[&[1], &[1]])).assignment, None);
        assert_eq!(max_matching(&fam(&[&[5]])).assignment, Some(atoms(&[5])));
        assert_eq!(
            max_matching(&BundleFamily::default()).assignment,
            Some(vec![])
        );
    }

    #[test]
    fn matching_needs_augmentation() {
        // Greedy picks 1 for the first set; the second set forces a swap.
        let f = fam(&[&[1, 2], &[1]]);
        let m = max_matching(&f);
        assert!(m.is_valid_for(&f));
        assert_eq!(m.assignment, Some(atoms(&[2, 1])));
    }

    #[test]
    fn hall_via_matching_examples() {
        assert!(!hall_via_matching(&fam(&[&[1], &[2], &[1, 2]])));
        assert!(hall_via_matching(&fam(&[&[1], &[2], &[1, 3]])));
    }

    #[test]
    fn find_violation_examples() {
        assert_eq!(
            find_violation(&fam(&[&[1], &[1]])).unwrap().indices,
            vec![1, 2]
        );
        assert_eq!(find_violation(&fam(&[&[1, 2], &[2]])), None);
        let f = fam(&[&[1], &[2], &[1, 2], &[1, 2]]);
        assert!(find_violation(&f).unwrap().is_valid_for(&f));
    }

    #[test]
    fn validity_predicates_reject_bad_certificates() {
        let f = fam(&[&[1, 2], &[2]]);
        assert!(!MatchingResult::saturating(atoms(&[2, 2])).is_valid_for(&f));
        assert!(!MatchingResult::saturating(atoms(&[3, 2])).is_valid_for(&f));
        assert!(!MatchingResult::saturating(atoms(&[1])).is_valid_for(&f));
        assert!(!MatchingResult::none().is_valid_for(&f));
        assert!(!HallViolation {
            indices: vec![1, 2]
        }
        .is_valid_for(&f));
        assert!(!HallViolation { indices: vec![] }.is_valid_for(&f));
        assert!(!HallViolation { indices: vec![3] }.is_valid_for(&f));
    }

    #[test]
    fn sdr_count_examples() {
        let s = atoms(&[1, 2]);
        for count in [sdr_count, sdr_count_naive] {
            assert_eq!(
                count(&fam(&[&[1, 2], &[1, 2]]), &s).unwrap(),
                BigUint::from(2u32)
            );
            assert_eq!(
                count(&fam(&[&[1, 2], &[2]]), &s).unwrap(),
                BigUint::from(1u32)
            );
            assert_eq!(count(&fam(&[&[1], &[1]]), &s).unwrap(), BigUint::from(0u32));
            assert_eq!(
                count(&BundleFamily::default(), &[]).unwrap(),
                BigUint::from(1u32)
            );
        }
    }

    #[test]
    fn sdr_count_dimension_mismatch() {
        let f = fam(&[&[1, 2], &[2]]);
        assert_eq!(
            sdr_count(&f, &atoms(&[1])),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 1
            })
        );
        assert!(matches!(
            sdr_count(&f, &atoms(&[1, 1])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn permanent_of_all_ones() {
        // perm(J_n) = n!
        let full: Vec<u128> = (1..=10).collect();
        let sets: Vec<&[u128]> = vec![full.as_slice(); 10];
        let f = fam(&sets);
        assert_eq!(
            sdr_count(&f, &atoms(&full)).unwrap(),
            BigUint::from(3_628_800u32)
        );
    }

    #[test]
    fn permanent_at_cap() {
        let full: Vec<u128> = (1..=20).collect();
        let sets: Vec<&[u128]> = vec![full.as_slice(); 20];
        let f = fam(&sets);
        let expected: BigUint = (1u32..=20).map(BigUint::from).product();
        assert_eq!(sdr_count(&f, &atoms(&full)).unwrap(), expected);
    }

    #[test]
    fn naive_cap() {
        let full: Vec<u128> = (1..=9).collect();
        let sets: Vec<&[u128]> = vec![full.as_slice(); 9];
        let f = fam(&sets);
        assert!(matches!(
            sdr_count_naive(&f, &atoms(&full)),
            Err(Error::CapExceeded { .. })
        ));
    }
}
