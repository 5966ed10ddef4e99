//! Index-set dynamics: the relabeling `nu`, the sets `I_j`, the set maps
//! `alpha_j`, the generations `Gamma_n` grown from `{1}`, and the
//! representative labeling that certifies Hall's condition on every
//! finite prefix.
//!
//! `nu(j, t) = 2 + cantor(zigzag(j), t - 1)`. The Cantor pairing makes
//! `nu` injective, and decoding `a - 2` recovers `t`, which is strictly
//! smaller than `a`. So `level(1) = 0`, `level(nu(j, t)) = level(t) + 1`
//! is a well-founded grading of the positive integers whose level sets
//! are `{1}` followed by infinitely many infinite strata.
//!
//! The integers `j` are truncated to a window `-W..=W`.

use rayon::prelude::*;
use serde::Serialize;

use crate::bundles::{BundleFamily, IndexSet};
use crate::error::{Error, Result};
use crate::matching::{hall_via_matching, max_matching, MatchingResult};
use crate::ring::Atom;

/// Bijection `Z -> N0`: `0, 1, -1, 2, -2, ...` map to `0, 1, 2, 3, 4, ...`.
pub fn zigzag(j: i64) -> u128 {
    if j > 0 {
        2 * j as u128 - 1
    } else {
        2 * j.unsigned_abs() as u128
    }
}

pub fn unzigzag(z: u128) -> Option<i64> {
    let half = i128::try_from(z.div_ceil(2)).ok()?;
    i64::try_from(if z % 2 == 1 { half } else { -half }).ok()
}

/// `w (w + 1) / 2`, or `None` on overflow.
fn triangle(w: u128) -> Option<u128> {
    if w.is_multiple_of(2) {
        (w / 2).checked_mul(w + 1)
    } else {
        w.checked_mul(w.div_ceil(2))
    }
}

/// Cantor pairing `C(a, b) = (a + b)(a + b + 1) / 2 + b`.
pub fn cantor_pair(a: u128, b: u128) -> Option<u128> {
    triangle(a.checked_add(b)?)?.checked_add(b)
}

/// Inverse of [`cantor_pair`].
pub fn cantor_unpair(n: u128) -> (u128, u128) {
    // Largest w with triangle(w) <= n.
    let (mut lo, mut hi) = (0u128, 1u128 << 65);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match triangle(mid) {
            Some(t) if t <= n => lo = mid,
            _ => hi = mid,
        }
    }
    let b = n - triangle(lo).expect("lo passed the search");
    (lo - b, b)
}

/// The injective relabeling `nu : Z x N -> N`, with values `>= 2`.
pub fn nu(j: i64, t: Atom) -> Result<Atom> {
    let value = cantor_pair(zigzag(j), t.id() - 1)
        .and_then(|c| c.checked_add(2))
        .ok_or_else(|| Error::Overflow(format!("nu({j}, {t}) exceeds 128 bits")))?;
    Atom::new(value)
}

/// `(j, t)` with `nu(j, t) = a`, for every `a >= 2` whose `j` fits in i64.
pub fn nu_inverse(a: Atom) -> Option<(i64, Atom)> {
    if a.id() < 2 {
        return None;
    }
    let (x, y) = cantor_unpair(a.id() - 2);
    Some((unzigzag(x)?, Atom::new(y + 1).ok()?))
}

/// Stratum of `a`: 0 for atom 1, otherwise one more than the stratum of the
/// `t` decoded from `a = nu(j, t)`.
pub fn level(a: Atom) -> u32 {
    let mut id = a.id();
    let mut depth = 0;
    while id >= 2 {
        let (_, y) = cantor_unpair(id - 2);
        id = y + 1;
        depth += 1;
    }
    depth
}

/// `I_j = {nu(j, 1), ..., nu(j, j)}` for `j >= 1`.
pub fn i_set(j: i64) -> Result<IndexSet> {
    if j < 1 {
        return Err(Error::InvalidInput(format!("I_j needs j >= 1, got {j}")));
    }
    let atoms = (1..=j as u128)
        .map(|u| nu(j, Atom::new(u)?))
        .collect::<Result<Vec<_>>>()?;
    IndexSet::new(atoms)
}

/// `alpha_j(J)`: `nu(j, J)` for `j <= 0`, and
/// `nu(j, J \ {1..j}) ∪ I_j` for `j >= 1`.
pub fn alpha(j: i64, set: &IndexSet) -> Result<IndexSet> {
    if j <= 0 {
        let atoms = set
            .atoms()
            .iter()
            .map(|&u| nu(j, u))
            .collect::<Result<Vec<_>>>()?;
        return IndexSet::new(atoms);
    }
    let mut atoms = set
        .atoms()
        .iter()
        .filter(|u| u.id() > j as u128)
        .map(|&u| nu(j, u))
        .collect::<Result<Vec<_>>>()?;
    atoms.extend_from_slice(i_set(j)?.atoms());
    IndexSet::new(atoms)
}

/// Generations are kept below this many sets in total.
pub const MAX_GAMMA_SETS: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DynamicsConfig {
    /// `j` ranges over `-window..=window`.
    pub window: u32,
    /// Number of generations beyond `Gamma_0`.
    pub depth: u32,
    /// Largest atom id any generated set or label may contain.
    pub atom_cap: u128,
}

impl DynamicsConfig {
    pub fn new(window: u32, depth: u32) -> Result<Self> {
        if window == 0 {
            return Err(Error::InvalidInput("window must be at least 1".into()));
        }
        Ok(DynamicsConfig {
            window,
            depth,
            atom_cap: u128::MAX,
        })
    }

    pub fn with_atom_cap(mut self, cap: u128) -> Self {
        self.atom_cap = cap;
        self
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> + Clone {
        let w = i64::from(self.window);
        -w..=w
    }
}

/// A member of some `Gamma_n`, with the `alpha` indices that produced it
/// (innermost first) and its representative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabeledSet {
    pub set: IndexSet,
    pub provenance: Vec<i64>,
    pub label: Atom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaFamily {
    pub window: u32,
    pub generations: Vec<Vec<LabeledSet>>,
}

impl GammaFamily {
    pub fn depth(&self) -> usize {
        self.generations.len() - 1
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.generations.iter().map(Vec::len).collect()
    }

    /// Members of `Gamma_0, ..., Gamma_m` in generation order.
    pub fn prefix(&self, m: usize) -> impl Iterator<Item = &LabeledSet> {
        self.generations.iter().take(m + 1).flatten()
    }

    /// `Gamma_0 ∪ ... ∪ Gamma_m` as an indexed bundle family.
    pub fn prefix_family(&self, m: usize) -> BundleFamily {
        BundleFamily::from_sets(self.prefix(m).map(|l| l.set.clone()).collect())
    }
}

fn check_cap(a: Atom, cap: u128) -> Result<Atom> {
    if a.id() > cap {
        Err(Error::Overflow(format!("atom {a} exceeds atom cap {cap}")))
    } else {
        Ok(a)
    }
}

/// `Gamma_0 = [{1}]` labeled 1; `Gamma_{k+1}` lists `alpha_j(I)` for each
/// `I` in `Gamma_k` (in order) and each `j` in the window (ascending),
/// labeled `nu(j, t(I))`. Sets produced twice are kept twice.
pub fn gamma_generations(cfg: &DynamicsConfig) -> Result<GammaFamily> {
    if cfg.window == 0 {
        return Err(Error::InvalidInput("window must be at least 1".into()));
    }
    let width = 2 * cfg.window as usize + 1;
    let mut total = 1usize;
    let mut size = 1usize;
    for _ in 0..cfg.depth {
        size = size.saturating_mul(width);
        total = total.saturating_add(size);
    }
    if total > MAX_GAMMA_SETS {
        return Err(Error::CapExceeded {
            what: "total Gamma family size",
            value: total,
            cap: MAX_GAMMA_SETS,
        });
    }

    let one = Atom::new(1)?;
    check_cap(one, cfg.atom_cap)?;
    let mut generations = vec![vec![LabeledSet {
        set: IndexSet::singleton(one),
        provenance: Vec::new(),
        label: one,
    }]];
    for _ in 0..cfg.depth {
        let parents = generations.last().expect("Gamma_0 exists");
        let children = parents
            .par_iter()
            .map(|parent| {
                cfg.indices()
                    .map(|j| {
                        let set = alpha(j, &parent.set)?;
                        for &a in set.atoms() {
                            check_cap(a, cfg.atom_cap)?;
                        }
                        let label = check_cap(nu(j, parent.label)?, cfg.atom_cap)?;
                        let mut provenance = parent.provenance.clone();
                        provenance.push(j);
                        Ok(LabeledSet {
                            set,
                            provenance,
                            label,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        generations.push(children.into_iter().flatten().collect());
    }
    Ok(GammaFamily {
        window: cfg.window,
        generations,
    })
}

/// `[{nu(j, 1)} for -W <= j <= 0] ++ [I_j for 1 <= j <= W]`, the expected
/// shape of `Gamma_1`.
pub fn gamma_one_closed_form(window: u32) -> Result<Vec<IndexSet>> {
    let w = i64::from(window);
    let one = Atom::new(1)?;
    let mut sets = (-w..=0)
        .map(|j| nu(j, one).map(IndexSet::singleton))
        .collect::<Result<Vec<_>>>()?;
    for j in 1..=w {
        sets.push(i_set(j)?);
    }
    Ok(sets)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub passed: bool,
    pub counterexample: Option<String>,
}

impl CheckOutcome {
    fn from_first_failure(failure: Option<String>) -> Self {
        CheckOutcome {
            passed: failure.is_none(),
            counterexample: failure,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabelingReport {
    /// `t(I) in I`.
    pub membership: CheckOutcome,
    /// Labels distinct across all generations.
    pub injectivity: CheckOutcome,
    /// `level(t(I))` equals the generation of `I`.
    pub level: CheckOutcome,
}

impl LabelingReport {
    pub fn passed(&self) -> bool {
        self.membership.passed && self.injectivity.passed && self.level.passed
    }
}

pub fn verify_labeling(g: &GammaFamily) -> LabelingReport {
    let indexed = || {
        g.generations
            .iter()
            .enumerate()
            .flat_map(|(n, gen)| gen.iter().enumerate().map(move |(k, l)| (n, k, l)))
    };

    let membership = indexed()
        .find(|(_, _, l)| !l.set.contains(l.label))
        .map(|(n, k, l)| {
            format!(
                "generation {n}, set {k}: label {} not in {:?}",
                l.label,
                l.set.atoms()
            )
        });

    let mut labels: Vec<(Atom, usize, usize)> =
        indexed().map(|(n, k, l)| (l.label, n, k)).collect();
    labels.sort_unstable();
    let injectivity = labels.windows(2).find(|w| w[0].0 == w[1].0).map(|w| {
        format!(
            "label {} shared by generation {} set {} and generation {} set {}",
            w[0].0, w[0].1, w[0].2, w[1].1, w[1].2
        )
    });

    let level = indexed()
        .find(|(n, _, l)| level(l.label) as usize != *n)
        .map(|(n, k, l)| {
            format!(
                "generation {n}, set {k}: label {} has level {}",
                l.label,
                level(l.label)
            )
        });

    LabelingReport {
        membership: CheckOutcome::from_first_failure(membership),
        injectivity: CheckOutcome::from_first_failure(injectivity),
        level: CheckOutcome::from_first_failure(level),
    }
}

/// The labels of `Gamma_0 ∪ ... ∪ Gamma_m` as an SDR of that family,
/// confirmed both by the SDR predicate and by an independent maximum
/// matching.
pub fn hall_certificate_for_prefix(g: &GammaFamily, m: usize) -> Result<MatchingResult> {
    if m > g.depth() {
        return Err(Error::InvalidInput(format!(
            "prefix {m} is deeper than the family (depth {})",
            g.depth()
        )));
    }
    let family = g.prefix_family(m);
    let sdr = MatchingResult::saturating(g.prefix(m).map(|l| l.label).collect());
    if !sdr.is_valid_for(&family) {
        return Err(Error::InvariantViolation(format!(
            "labels of the first {} generations are not an SDR",
            m + 1
        )));
    }
    if !max_matching(&family).is_saturating() {
        return Err(Error::InvariantViolation(format!(
            "maximum matching does not saturate the first {} generations",
            m + 1
        )));
    }
    Ok(sdr)
}

/// `[alpha_j(J_i) for i in family, j in window]`.
pub fn alpha_image(family: &BundleFamily, cfg: &DynamicsConfig) -> Result<BundleFamily> {
    let mut sets = Vec::with_capacity(family.len() * (2 * cfg.window as usize + 1));
    for set in &family.sets {
        for j in cfg.indices() {
            sets.push(alpha(j, set)?);
        }
    }
    Ok(BundleFamily::from_sets(sets))
}

/// Whether Hall's condition survives `alpha`: the image family of a Hall
/// family is checked by maximum matching. The explicit SDR
/// `s_{j,i} = nu(j, t_i)` is also built and must agree.
pub fn hall_persistence_check(family: &BundleFamily, cfg: &DynamicsConfig) -> Result<bool> {
    if family.trivial_lines > 0 {
        return Err(Error::InvalidInput("family has trivial lines".into()));
    }
    let Some(reps) = max_matching(family).assignment else {
        return Err(Error::InvalidInput(format!(
            "family {} fails Hall's condition",
            family.to_json()
        )));
    };
    let image = alpha_image(family, cfg)?;
    let holds = hall_via_matching(&image);

    let mut lifted = Vec::with_capacity(image.len());
    for &t in &reps {
        for j in cfg.indices() {
            lifted.push(nu(j, t)?);
        }
    }
    let explicit = MatchingResult::saturating(lifted).is_valid_for(&image);
    if explicit != holds {
        return Err(Error::InvariantViolation(format!(
            "lifted SDR valid={explicit} but matching says hall={holds} for {}",
            family.to_json()
        )));
    }
    Ok(holds)
}
