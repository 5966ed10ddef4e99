//! The Euler obstruction and subordination verdicts.
//!
//! For `xi = zeta_I1 + ... + zeta_Im` the following are equivalent:
//! the Euler class of `xi` is nonzero; the sets satisfy Hall's condition;
//! the sets admit a matching. Moreover each coefficient of `e(xi)` counts
//! matchings onto the corresponding monomial's support. Both statements are
//! checked here on concrete families, and turned into verdicts on whether
//! the trivial line `theta` sits inside `xi`.

use itertools::Itertools;
use num_bigint::BigInt;
use serde::Serialize;

use crate::bundles::{euler_class, BundleFamily};
use crate::error::{Error, Result};
use crate::matching::{
    exhaustive_violation, find_violation, hall_via_matching, max_matching, sdr_count,
    HallViolation, MatchingResult, HALL_EXHAUSTIVE_CAP,
};
use crate::ring::{Atom, Monomial, RingElement};

/// The three equivalent conditions, each computed on its own.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub euler_class: RingElement,
    pub euler_nonzero: bool,
    /// Hall's condition via maximum matching.
    pub hall: bool,
    /// Hall's condition by subset enumeration, when `m` is within the
    /// enumeration cap.
    pub hall_exhaustive: Option<bool>,
    pub matching: MatchingResult,
    pub euler_class_degree: Option<usize>,
    pub agree: bool,
}

fn require_no_trivial_lines(family: &BundleFamily) -> Result<()> {
    if family.trivial_lines > 0 {
        return Err(Error::InvalidInput(format!(
            "family has {} trivial lines; only sums of zeta_I are accepted",
            family.trivial_lines
        )));
    }
    Ok(())
}

/// Computes all three conditions and checks they agree. Disagreement is an
/// [`Error::InvariantViolation`].
pub fn equivalence_report(family: &BundleFamily) -> Result<EquivalenceReport> {
    require_no_trivial_lines(family)?;
    let e = euler_class(family);
    let euler_nonzero = !e.is_zero();
    let hall = hall_via_matching(family);
    let hall_exhaustive = if family.len() <= HALL_EXHAUSTIVE_CAP {
        Some(exhaustive_violation(family, HALL_EXHAUSTIVE_CAP)?.is_none())
    } else {
        None
    };
    let matching = max_matching(family);
    if matching.is_saturating() && !matching.is_valid_for(family) {
        return Err(Error::InvariantViolation(format!(
            "matching {:?} is not an SDR of {}",
            matching.assignment,
            family.to_json()
        )));
    }
    let agree = euler_nonzero == hall
        && hall == matching.is_saturating()
        && hall_exhaustive.is_none_or(|h| h == hall);
    if !agree {
        return Err(Error::InvariantViolation(format!(
            "euler_nonzero={euler_nonzero}, hall={hall}, hall_exhaustive={hall_exhaustive:?}, \
             matching={} disagree on {}",
            matching.is_saturating(),
            family.to_json()
        )));
    }
    Ok(EquivalenceReport {
        euler_class_degree: e.homogeneous_degree(),
        euler_class: e,
        euler_nonzero,
        hall,
        hall_exhaustive,
        matching,
        agree,
    })
}

/// Checks that every coefficient of `e(xi)` is the matching count onto
/// its support: for each `m`-subset `S` of the union, the coefficient of
/// `prod_{s in S} xs` equals the permanent of the incidence matrix on `S`,
/// and no term lives outside the union.
pub fn verify_coefficient_identity(family: &BundleFamily) -> Result<bool> {
    verify_coefficient_identity_with(family, sdr_count)
}

/// [`verify_coefficient_identity`] with a caller-chosen SDR counter.
pub fn verify_coefficient_identity_with<F>(family: &BundleFamily, count: F) -> Result<bool>
where
    F: Fn(&BundleFamily, &[Atom]) -> Result<num_bigint::BigUint>,
{
    require_no_trivial_lines(family)?;
    let m = family.len();
    let e = euler_class(family);
    let union = family.union_atoms();
    let inside = e.terms().all(|(mono, _)| {
        mono.degree() == m && mono.atoms().iter().all(|a| union.binary_search(a).is_ok())
    });
    if !inside {
        return Ok(false);
    }
    for subset in union.iter().copied().combinations(m) {
        let lhs = e.coeff(&Monomial::from_atoms(subset.iter().copied()));
        let rhs = BigInt::from(count(family, &subset)?);
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `theta` is subequivalent to the family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Hall holds, so the Euler class is nonzero and `theta` cannot split
    /// off. The SDR is the certificate.
    NotSubordinate { matching: Vec<Atom> },
    /// `{n}` occurs twice and `zeta_n + zeta_n` contains `theta`.
    Subordinate {
        witness: Atom,
        violation: HallViolation,
    },
    /// Hall fails but no duplicated singleton exists; nothing decides it.
    Undecided { violation: HallViolation },
}

impl Verdict {
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::NotSubordinate { .. } => "not_subordinate",
            Verdict::Subordinate { .. } => "subordinate",
            Verdict::Undecided { .. } => "undecided",
        }
    }

    pub fn witness(&self) -> Option<Atom> {
        match self {
            Verdict::Subordinate { witness, .. } => Some(*witness),
            _ => None,
        }
    }

    pub fn matching(&self) -> Option<&[Atom]> {
        match self {
            Verdict::NotSubordinate { matching } => Some(matching),
            _ => None,
        }
    }

    pub fn violation(&self) -> Option<&HallViolation> {
        match self {
            Verdict::NotSubordinate { .. } => None,
            Verdict::Subordinate { violation, .. } | Verdict::Undecided { violation } => {
                Some(violation)
            }
        }
    }
}

pub fn subordination_verdict(family: &BundleFamily) -> Result<Verdict> {
    require_no_trivial_lines(family)?;
    let matching = max_matching(family);
    if let Some(reps) = matching.assignment {
        return Ok(Verdict::NotSubordinate { matching: reps });
    }
    let violation = find_violation(family).ok_or_else(|| {
        Error::InvariantViolation(format!(
            "no saturating matching but no Hall violation for {}",
            family.to_json()
        ))
    })?;
    Ok(match family.has_duplicate_singleton() {
        Some(witness) => Verdict::Subordinate { witness, violation },
        None => Verdict::Undecided { violation },
    })
}

/// Verdict for `xi + xi`. Doubling turns any singleton into a duplicated
/// one.
pub fn doubled_verdict(family: &BundleFamily) -> Result<Verdict> {
    require_no_trivial_lines(family)?;
    subordination_verdict(&family.direct_sum(family))
}

/// Wire form of an analysis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub family: BundleFamily,
    pub euler_class: String,
    pub euler_class_degree: Option<usize>,
    pub euler_nonzero: bool,
    pub hall: bool,
    pub matching: Option<Vec<Atom>>,
    pub verdict: &'static str,
    pub witness: Option<Atom>,
    pub violation: Option<Vec<usize>>,
    pub doubled_verdict: &'static str,
    pub doubled_witness: Option<Atom>,
}

/// Equivalence report plus verdicts, ready for serialization.
pub fn analyze(family: &BundleFamily) -> Result<AnalysisReport> {
    let report = equivalence_report(family)?;
    let verdict = subordination_verdict(family)?;
    if matches!(verdict, Verdict::NotSubordinate { .. }) != report.hall {
        return Err(Error::InvariantViolation(format!(
            "verdict {} contradicts hall={} for {}",
            verdict.tag(),
            report.hall,
            family.to_json()
        )));
    }
    let doubled = doubled_verdict(family)?;
    Ok(AnalysisReport {
        family: family.clone(),
        euler_class: report.euler_class.to_string(),
        euler_class_degree: report.euler_class_degree,
        euler_nonzero: report.euler_nonzero,
        hall: report.hall,
        matching: report.matching.assignment,
        verdict: verdict.tag(),
        witness: verdict.witness(),
        violation: verdict.violation().map(|v| v.indices.clone()),
        doubled_verdict: doubled.tag(),
        doubled_witness: doubled.witness(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::sdr_count_naive;

    fn fam(sets: &[&[u128]]) -> BundleFamily {
        BundleFamily::from_ids(sets).unwrap()
    }

    fn a(i: u128) -> Atom {
        Atom::new(i).unwrap()
    }

    #[test]
    fn equivalence_examples() {
        let r = equivalence_report(&fam(&[&[1], &[1]])).unwrap();
        assert!(!r.euler_nonzero && !r.hall && !r.matching.is_saturating() && r.agree);
        assert_eq!(r.hall_exhaustive, Some(false));

        let r = equivalence_report(&fam(&[&[1, 2], &[2]])).unwrap();
        assert!(r.euler_nonzero && r.hall && r.agree);
        assert_eq!(r.matching.assignment, Some(vec![a(1), a(2)]));
        assert_eq!(r.euler_class_degree, Some(2));

        let r = equivalence_report(&BundleFamily::default()).unwrap();
        assert!(r.euler_nonzero && r.hall && r.matching.is_saturating() && r.agree);
        assert_eq!(r.euler_class, RingElement::one());
    }

    #[test]
    fn trivial_lines_rejected() {
        let f = BundleFamily::new(vec![], 1);
        assert!(matches!(
            equivalence_report(&f),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            subordination_verdict(&f),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(doubled_verdict(&f), Err(Error::InvalidInput(_))));
        assert!(matches!(
            verify_coefficient_identity(&f),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn coefficient_identity_examples() {
        assert!(verify_coefficient_identity(&fam(&[&[1, 2], &[1, 2]])).unwrap());
        assert!(verify_coefficient_identity(&fam(&[&[1], &[2]])).unwrap());
        assert!(
            verify_coefficient_identity_with(&fam(&[&[1, 3], &[2, 3], &[1]]), sdr_count_naive)
                .unwrap()
        );
    }

    #[test]
    fn coefficient_identity_detects_wrong_counter() {
        let f = fam(&[&[1, 2], &[1, 2]]);
        let off_by_one = |f: &BundleFamily, s: &[Atom]| sdr_count(f, s).map(|c| c + 1u32);
        assert!(!verify_coefficient_identity_with(&f, off_by_one).unwrap());
    }

    #[test]
    fn verdict_examples() {
        let v = subordination_verdict(&fam(&[&[1], &[1]])).unwrap();
        assert_eq!(v.tag(), "subordinate");
        assert_eq!(v.witness(), Some(a(1)));

        let v = subordination_verdict(&fam(&[&[1, 2], &[2]])).unwrap();
        assert_eq!(
            v,
            Verdict::NotSubordinate {
                matching: vec![a(1), a(2)]
            }
        );

        // Hall holds here ({1,2} matches both sets), so the Euler class 2*x1*x2
        // obstructs.
        let v = subordination_verdict(&fam(&[&[1, 2], &[1, 2]])).unwrap();
        assert_eq!(v.tag(), "not_subordinate");

        let v = subordination_verdict(&fam(&[&[1, 2], &[1, 2], &[1, 2]])).unwrap();
        assert_eq!(v.tag(), "undecided");
        assert_eq!(v.violation().unwrap().indices, vec![1, 2, 3]);
    }

    #[test]
    fn doubled_verdict_examples() {
        assert_eq!(
            doubled_verdict(&fam(&[&[3], &[1, 2]])).unwrap().witness(),
            Some(a(3))
        );
        assert_eq!(
            doubled_verdict(&fam(&[&[1, 2]])).unwrap().tag(),
            "not_subordinate"
        );
        assert_eq!(
            doubled_verdict(&fam(&[&[1, 2], &[1, 2]])).unwrap().tag(),
            "undecided"
        );
        assert_eq!(
            doubled_verdict(&fam(&[&[1], &[2]])).unwrap().witness(),
            Some(a(1))
        );
    }

    #[test]
    fn analysis_report_json() {
        let r = analyze(&fam(&[&[1, 2], &[2]])).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(
            json,
            r#"{"family":{"sets":[[1,2],[2]],"trivial_lines":0},"euler_class":"x1*x2","euler_class_degree":2,"euler_nonzero":true,"hall":true,"matching":[1,2],"verdict":"not_subordinate","witness":null,"violation":null,"doubled_verdict":"subordinate","doubled_witness":2}"#
        );
        let r = analyze(&fam(&[&[1], &[1]])).unwrap();
        assert_eq!(r.verdict, "subordinate");
        assert_eq!(r.witness, Some(a(1)));
        assert_eq!(r.violation, Some(vec![1, 2]));
    }
}
