//! Exhaustive verification over all small families.
//!
//! Every ordered family of `m` nonempty subsets of `{1..A}` is visited, for
//! `1 <= m <= max_m`. On each, the Euler class, the subset-enumeration Hall
//! test and the maximum matching are computed independently and must agree.
//! Optionally the coefficient identity is checked too.

use rayon::prelude::*;
use serde::Serialize;

use crate::bundles::{euler_class, BundleFamily, IndexSet};
use crate::error::{Error, Result};
use crate::matching::{exhaustive_violation, max_matching, HALL_EXHAUSTIVE_CAP};
use crate::obstruction::verify_coefficient_identity;
use crate::ring::Atom;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepConfig {
    pub max_m: usize,
    pub max_atom: u32,
    pub check_coefficients: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SizeSummary {
    pub m: usize,
    pub families: u64,
    pub hall_true: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub max_m: usize,
    pub max_atom: u32,
    pub families: u64,
    pub agreements: u64,
    pub mismatches: u64,
    pub coefficient_checks: u64,
    pub coefficient_failures: u64,
    pub by_size: Vec<SizeSummary>,
    /// Smallest (in enumeration order) family on which something failed.
    pub first_failure: Option<String>,
}

impl SweepSummary {
    pub fn passed(&self) -> bool {
        self.mismatches == 0 && self.coefficient_failures == 0
    }
}

#[derive(Default)]
struct Tally {
    families: u64,
    hall_true: u64,
    mismatches: u64,
    coefficient_checks: u64,
    coefficient_failures: u64,
    first_failure: Option<(usize, String)>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.families += other.families;
        self.hall_true += other.hall_true;
        self.mismatches += other.mismatches;
        self.coefficient_checks += other.coefficient_checks;
        self.coefficient_failures += other.coefficient_failures;
        self.first_failure = match (self.first_failure, other.first_failure) {
            (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
            (a, b) => a.or(b),
        };
        self
    }

    fn fail(&mut self, rank: usize, message: String) {
        if self.first_failure.as_ref().is_none_or(|(r, _)| rank < *r) {
            self.first_failure = Some((rank, message));
        }
    }
}

/// All nonempty subsets of `{1..max_atom}` in ascending bitmask order.
pub fn nonempty_subsets(max_atom: u32) -> Vec<IndexSet> {
    (1u64..(1 << max_atom))
        .map(|mask| {
            IndexSet::new(
                (0..max_atom)
                    .filter(|b| mask >> b & 1 == 1)
                    .map(|b| Atom::new(u128::from(b) + 1).expect("ids start at 1")),
            )
            .expect("mask is nonzero")
        })
        .collect()
}

/// Number of ordered families the sweep visits.
pub fn family_count(max_m: usize, max_atom: u32) -> u64 {
    let s = (1u64 << max_atom) - 1;
    (1..=max_m as u32).map(|m| s.pow(m)).sum()
}

fn check_family(family: &BundleFamily, rank: usize, check_coefficients: bool, tally: &mut Tally) {
    tally.families += 1;
    let euler_nonzero = !euler_class(family).is_zero();
    let hall = match exhaustive_violation(family, HALL_EXHAUSTIVE_CAP) {
        Ok(v) => v.is_none(),
        Err(e) => {
            tally.mismatches += 1;
            tally.fail(rank, format!("{}: {e}", family.to_json()));
            return;
        }
    };
    let matching = max_matching(family);
    let saturates = matching.is_valid_for(family);
    if hall {
        tally.hall_true += 1;
    }
    if euler_nonzero != hall || hall != saturates || matching.is_saturating() != saturates {
        tally.mismatches += 1;
        tally.fail(
            rank,
            format!(
                "{}: euler_nonzero={euler_nonzero} hall={hall} matching={saturates}",
                family.to_json()
            ),
        );
    }
    if check_coefficients {
        tally.coefficient_checks += 1;
        if !matches!(verify_coefficient_identity(family), Ok(true)) {
            tally.coefficient_failures += 1;
            tally.fail(
                rank,
                format!("{}: coefficient identity fails", family.to_json()),
            );
        }
    }
}

/// Runs the sweep, partitioning each size class by its first set. Counts
/// and the reported first failure do not depend on scheduling.
pub fn run(cfg: &SweepConfig) -> Result<SweepSummary> {
    if cfg.max_m == 0 || cfg.max_atom == 0 {
        return Err(Error::InvalidInput(
            "max_m and max_atom must be positive".into(),
        ));
    }
    if cfg.max_atom > 20 {
        return Err(Error::CapExceeded {
            what: "max_atom",
            value: cfg.max_atom as usize,
            cap: 20,
        });
    }
    let subsets = nonempty_subsets(cfg.max_atom);
    let s = subsets.len();
    let mut summary = SweepSummary {
        max_m: cfg.max_m,
        max_atom: cfg.max_atom,
        ..SweepSummary::default()
    };
    let mut first_failure: Option<(usize, String)> = None;
    let mut offset = 0usize;
    for m in 1..=cfg.max_m {
        let per_first = s.pow(m as u32 - 1);
        let tally = (0..s)
            .into_par_iter()
            .map(|first| {
                let mut tally = Tally::default();
                let mut digits = vec![0usize; m];
                digits[0] = first;
                for rest in 0..per_first {
                    let mut r = rest;
                    for d in digits[1..].iter_mut().rev() {
                        *d = r % s;
                        r /= s;
                    }
                    let family = BundleFamily::from_sets(
                        digits.iter().map(|&d| subsets[d].clone()).collect(),
                    );
                    let rank = offset + first * per_first + rest;
                    check_family(&family, rank, cfg.check_coefficients, &mut tally);
                }
                tally
            })
            .reduce(Tally::default, Tally::merge);
        offset += s * per_first;

        summary.families += tally.families;
        summary.mismatches += tally.mismatches;
        summary.coefficient_checks += tally.coefficient_checks;
        summary.coefficient_failures += tally.coefficient_failures;
        summary.by_size.push(SizeSummary {
            m,
            families: tally.families,
            hall_true: tally.hall_true,
        });
        if first_failure.is_none() {
            first_failure = tally.first_failure;
        }
    }
    summary.agreements = summary.families - summary.mismatches;
    summary.first_failure = first_failure.map(|(_, msg)| msg);
    Ok(summary)
}
