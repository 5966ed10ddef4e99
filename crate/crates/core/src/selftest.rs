//! Fast embedded checks run by `euler-hall selftest`.
//!
//! Ring checks take the multiplication as a parameter so that a broken
//! product can be fed in and must be caught.

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bundles::BundleFamily;
use crate::dynamics::{
    gamma_generations, gamma_one_closed_form, hall_certificate_for_prefix, hall_persistence_check,
    verify_labeling, DynamicsConfig,
};
use crate::matching::{sdr_count, sdr_count_naive};
use crate::obstruction::{doubled_verdict, subordination_verdict, verify_coefficient_identity};
use crate::ring::{Atom, RingElement};
use crate::sample;
use crate::sweep::{self, SweepConfig};

pub type MulFn = fn(&RingElement, &RingElement) -> RingElement;

const SEED: u64 = 0x5eed_e1e2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

fn check(name: &'static str, outcome: Result<String, String>) -> CheckResult {
    match outcome {
        Ok(detail) => CheckResult {
            name,
            passed: true,
            detail,
        },
        Err(detail) => CheckResult {
            name,
            passed: false,
            detail,
        },
    }
}

pub fn run() -> SelftestReport {
    run_with(RingElement::mul)
}

pub fn run_with(mul: MulFn) -> SelftestReport {
    let checks = vec![
        check("ring_axioms", ring_axioms(mul, 1000)),
        check("product_rule", product_rule(mul, 4)),
        check("equivalence_sweep", equivalence_sweep()),
        check("ryser_vs_naive", ryser_vs_naive(100)),
        check("verdicts", verdicts()),
        check("dynamics", dynamics()),
        check("persistence", persistence(50)),
    ];
    SelftestReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

/// Commutativity, associativity, distributivity and nilpotency on random
/// elements over `x1..x6`, coefficients in `-9..=9`.
pub fn ring_axioms(mul: MulFn, trials: usize) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for trial in 0..trials {
        let a = sample::ring_element(&mut rng, 6, 4, 9);
        let b = sample::ring_element(&mut rng, 6, 4, 9);
        let c = sample::ring_element(&mut rng, 6, 4, 9);
        if mul(&a, &b) != mul(&b, &a) {
            return Err(format!("trial {trial}: ab != ba for a = {a}, b = {b}"));
        }
        if mul(&mul(&a, &b), &c) != mul(&a, &mul(&b, &c)) {
            return Err(format!(
                "trial {trial}: (ab)c != a(bc) for a = {a}, b = {b}, c = {c}"
            ));
        }
        if mul(&a, &b.add(&c)) != mul(&a, &b).add(&mul(&a, &c)) {
            return Err(format!(
                "trial {trial}: a(b+c) != ab+ac for a = {a}, b = {b}, c = {c}"
            ));
        }
    }
    for i in 1..=6u128 {
        let x = RingElement::generator(Atom::new(i).expect("positive"));
        if !mul(&x, &x).is_zero() {
            return Err(format!("x{i}^2 != 0"));
        }
    }
    Ok(format!("{trials} random triples"))
}

/// For every length-`n` sequence over `{1..n}`, `n <= max_n`, the product
/// of generators is the top class on permutations and zero otherwise.
pub fn product_rule(mul: MulFn, max_n: usize) -> Result<String, String> {
    let mut count = 0usize;
    for n in 1..=max_n {
        let top = RingElement::top_class(n);
        for seq in std::iter::repeat_n(1..=n as u128, n).multi_cartesian_product() {
            let product = seq.iter().fold(RingElement::one(), |acc, &i| {
                mul(
                    &acc,
                    &RingElement::generator(Atom::new(i).expect("positive")),
                )
            });
            let distinct = seq.iter().all_unique();
            let expected = if distinct {
                top.clone()
            } else {
                RingElement::zero()
            };
            if product != expected {
                return Err(format!(
                    "sequence {seq:?}: got {product}, expected {expected}"
                ));
            }
            count += 1;
        }
    }
    Ok(format!("{count} sequences"))
}

fn equivalence_sweep() -> Result<String, String> {
    let summary = sweep::run(&SweepConfig {
        max_m: 3,
        max_atom: 3,
        check_coefficients: true,
    })
    .map_err(|e| e.to_string())?;
    if summary.passed() {
        Ok(format!("{} families", summary.families))
    } else {
        Err(summary.first_failure.unwrap_or_default())
    }
}

fn ryser_vs_naive(trials: usize) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    for _ in 0..trials {
        let f = sample::family(&mut rng, 5, 6);
        for subset in f.union_atoms().into_iter().combinations(f.len()) {
            let fast = sdr_count(&f, &subset).map_err(|e| e.to_string())?;
            let slow = sdr_count_naive(&f, &subset).map_err(|e| e.to_string())?;
            if fast != slow {
                return Err(format!("{}: Ryser {fast} vs naive {slow}", f.to_json()));
            }
        }
        if !verify_coefficient_identity(&f).map_err(|e| e.to_string())? {
            return Err(format!("{}: coefficient identity fails", f.to_json()));
        }
    }
    Ok(format!("{trials} random families"))
}

fn verdicts() -> Result<String, String> {
    let fam = |sets: &[&[u128]]| BundleFamily::from_ids(sets).map_err(|e| e.to_string());
    let cases: [(&[&[u128]], &str); 3] = [
        (&[&[1, 2], &[2]], "not_subordinate"),
        (&[&[1], &[1]], "subordinate"),
        (&[&[1, 2], &[1, 2], &[1, 2]], "undecided"),
    ];
    for (sets, expected) in cases {
        let v = subordination_verdict(&fam(sets)?).map_err(|e| e.to_string())?;
        if v.tag() != expected {
            return Err(format!("{sets:?}: {} instead of {expected}", v.tag()));
        }
    }
    let doubled = doubled_verdict(&fam(&[&[3], &[1, 2]])?).map_err(|e| e.to_string())?;
    if doubled.tag() != "subordinate" {
        return Err("doubling a family with a singleton did not split off a trivial line".into());
    }
    Ok("fixtures agree".into())
}

fn dynamics() -> Result<String, String> {
    let cfg = DynamicsConfig::new(2, 3).map_err(|e| e.to_string())?;
    let g = gamma_generations(&cfg).map_err(|e| e.to_string())?;
    let labeling = verify_labeling(&g);
    if !labeling.passed() {
        return Err(format!("labeling failed: {labeling:?}"));
    }
    let sdr = hall_certificate_for_prefix(&g, 3).map_err(|e| e.to_string())?;
    let closed = gamma_one_closed_form(2).map_err(|e| e.to_string())?;
    let gamma_one: Vec<_> = g.generations[1].iter().map(|l| l.set.clone()).collect();
    if gamma_one != closed {
        return Err("Gamma_1 differs from its closed form".into());
    }
    Ok(format!(
        "sizes {:?}, prefix SDR of {}",
        g.sizes(),
        sdr.assignment.map_or(0, |a| a.len())
    ))
}

fn persistence(trials: usize) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 2);
    let cfg = DynamicsConfig::new(2, 0).map_err(|e| e.to_string())?;
    for _ in 0..trials {
        let f = sample::hall_family(&mut rng, 4, 5);
        if !hall_persistence_check(&f, &cfg).map_err(|e| e.to_string())? {
            return Err(format!("{}: image fails Hall", f.to_json()));
        }
    }
    Ok(format!("{trials} random Hall families"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Monomial;

    // Forgets that xi^2 = 0: overlapping supports are merged instead.
    fn sabotaged_mul(a: &RingElement, b: &RingElement) -> RingElement {
        RingElement::from_terms(a.terms().flat_map(|(ma, ca)| {
            b.terms().map(move |(mb, cb)| {
                let merged = Monomial::from_atoms(ma.atoms().iter().chain(mb.atoms()).copied());
                (merged, (ca * cb))
            })
        }))
    }

    #[test]
    fn fresh_build_passes() {
        let report = run();
        assert!(report.passed, "{report:#?}");
    }

    #[test]
    fn sabotaged_multiplication_is_caught() {
        let report = run_with(sabotaged_mul);
        assert!(!report.passed);
        assert!(!report.checks[0].passed);
        assert!(!report.checks[1].passed);
    }

    #[test]
    fn deterministic() {
        assert_eq!(run(), run());
    }
}
