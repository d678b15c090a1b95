use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergroup::{Element, HypergroupModel};
use crate::weighted::EtaSequence;

const MAX_COUNTEREXAMPLES: usize = 64;

/// A tested `n` where `(E ∗ {a_i}) ∩ (E ∗ {a_j})` is nonempty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub n: u64,
    /// The sequence indices `(i, j)` whose translates of `E` overlap.
    pub indices: (i64, i64),
    pub overlap: Vec<Element>,
}

/// Horizon-bounded outcome of an eventual-disjointness condition.
///
/// `first_n` is the least `N` such that every tested `n` in `[N, horizon]` is
/// disjoint. The condition is said to hold at the horizon when such an `N`
/// exists and leaves at least half of the tested range clean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AperiodicityVerdict {
    pub holds_at_horizon: bool,
    pub first_n: Option<u64>,
    pub horizon: u64,
    pub counterexamples: Vec<Counterexample>,
    /// Values of `n` the window could not decide.
    pub inconclusive: Vec<u64>,
}

impl AperiodicityVerdict {
    /// Tested `n` values with an overlap.
    pub fn failing_n(&self) -> BTreeSet<u64> {
        self.counterexamples.iter().map(|c| c.n).collect()
    }
}

enum Status {
    Disjoint,
    Overlap,
    Inconclusive,
}

fn summarize(horizon: u64, statuses: &[Status], counterexamples: Vec<Counterexample>) -> AperiodicityVerdict {
    let last_bad = statuses.iter().rposition(|s| !matches!(s, Status::Disjoint));
    let clean_from = match last_bad {
        None => Some(1),
        Some(i) if (i as u64 + 1) < horizon => Some(i as u64 + 2),
        _ => None,
    };
    let holds = clean_from.is_some_and(|n| horizon > 0 && n <= horizon.div_ceil(2));
    AperiodicityVerdict {
        holds_at_horizon: holds,
        first_n: if holds { clean_from } else { None },
        horizon,
        counterexamples,
        inconclusive: statuses
            .iter()
            .enumerate()
            .filter(|(_, s)| matches!(s, Status::Inconclusive))
            .map(|(i, _)| i as u64 + 1)
            .collect(),
    }
}

fn check_set(model: &HypergroupModel, e: &BTreeSet<Element>) -> Result<()> {
    if e.is_empty() {
        return Err(Error::PreconditionFailed("E must have positive Haar measure".into()));
    }
    for &x in e {
        model.require(x)?;
    }
    Ok(())
}

/// In-window part of `E ∗ {a_m}` and whether the full set leaves the window.
/// `None` when `a_m` itself is unavailable.
fn translate_set(
    model: &HypergroupModel,
    eta: &EtaSequence,
    e: &BTreeSet<Element>,
    m: i64,
) -> Result<Option<(BTreeSet<Element>, bool)>> {
    match eta.eval(model, m) {
        Ok(a) => {
            let (set, overflow) = model.set_convolve_partial(e, &BTreeSet::from([a]))?;
            Ok(Some((set, overflow.is_some())))
        }
        Err(Error::WindowOverflow { .. } | Error::EtaOutOfRange(_)) => Ok(None),
        Err(err) => Err(err),
    }
}

/// `E ∩ (E ∗ {a_{±n}}) = ∅` for `n = 1..=horizon`. Since `E` lies in the
/// window, the in-window part of `E ∗ {a_{±n}}` decides the intersection
/// exactly; only an unavailable `a_{±n}` leaves `n` undecided.
pub fn aperiodic_sequence_check(
    model: &HypergroupModel,
    eta: &EtaSequence,
    e: &BTreeSet<Element>,
    horizon: u64,
) -> Result<AperiodicityVerdict> {
    check_set(model, e)?;
    let mut statuses = Vec::with_capacity(horizon as usize);
    let mut counterexamples = Vec::new();
    for n in 1..=horizon {
        let mut status = Status::Disjoint;
        for m in [n as i64, -(n as i64)] {
            match translate_set(model, eta, e, m)? {
                None => {
                    if !matches!(status, Status::Overlap) {
                        status = Status::Inconclusive;
                    }
                }
                Some((set, _)) => {
                    let overlap: Vec<Element> = e.intersection(&set).copied().collect();
                    if !overlap.is_empty() {
                        status = Status::Overlap;
                        if counterexamples.len() < MAX_COUNTEREXAMPLES {
                            counterexamples.push(Counterexample {
                                n,
                                indices: (0, m),
                                overlap,
                            });
                        }
                    }
                }
            }
        }
        statuses.push(status);
    }
    Ok(summarize(horizon, &statuses, counterexamples))
}

/// `(E ∗ {a_{rn}}) ∩ (E ∗ {a_{sn}}) = ∅` for distinct `r, s` with
/// `|r|, |s| ≤ rs_bound` and `|rn|, |sn| ≤ horizon`. An empty in-window
/// intersection is conclusive when at least one side stays in the window.
pub fn strongly_aperiodic_check(
    model: &HypergroupModel,
    eta: &EtaSequence,
    e: &BTreeSet<Element>,
    horizon: u64,
    rs_bound: i64,
) -> Result<AperiodicityVerdict> {
    check_set(model, e)?;
    let mut cache: HashMap<i64, Option<(BTreeSet<Element>, bool)>> = HashMap::new();
    let mut statuses = Vec::with_capacity(horizon as usize);
    let mut counterexamples = Vec::new();
    let h = horizon as i64;
    for n in 1..=horizon {
        let ni = n as i64;
        let rs: Vec<i64> = (-rs_bound..=rs_bound).filter(|r| (r * ni).abs() <= h).collect();
        for &r in &rs {
            if let std::collections::hash_map::Entry::Vacant(slot) = cache.entry(r * ni) {
                slot.insert(translate_set(model, eta, e, r * ni)?);
            }
        }
        let mut status = Status::Disjoint;
        'pairs: for (i, &r) in rs.iter().enumerate() {
            for &s in &rs[i + 1..] {
                let (left, right) = (&cache[&(r * ni)], &cache[&(s * ni)]);
                let (Some((a, a_out)), Some((b, b_out))) = (left, right) else {
                    status = Status::Inconclusive;
                    continue;
                };
                let overlap: Vec<Element> = a.intersection(b).copied().collect();
                if !overlap.is_empty() {
                    status = Status::Overlap;
                    if counterexamples.len() < MAX_COUNTEREXAMPLES {
                        counterexamples.push(Counterexample {
                            n,
                            indices: (r * ni, s * ni),
                            overlap,
                        });
                    }
                    break 'pairs;
                }
                if *a_out && *b_out {
                    status = Status::Inconclusive;
                }
            }
        }
        statuses.push(status);
    }
    Ok(summarize(horizon, &statuses, counterexamples))
}

/// Both characterizations of an aperiodic center element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterAperiodicity {
    /// `E ∩ (E ∗ {z}^n) = ∅` from some `n` on.
    pub direct: AperiodicityVerdict,
    /// `(E ∗ {z}^{rn}) ∩ (E ∗ {z}^{sn}) = ∅` for distinct `r, s`, read with
    /// "for all `n ≥ N`".
    pub via_powers: AperiodicityVerdict,
    pub agree: bool,
    /// Whether reading the quantifier as "for all `n ≠ N`" would change the
    /// second verdict.
    pub readings_differ: bool,
}

pub fn aperiodic_center_check(
    model: &HypergroupModel,
    z: Element,
    e: &BTreeSet<Element>,
    horizon: u64,
    rs_bound: i64,
) -> Result<CenterAperiodicity> {
    let eta = EtaSequence::center_powers(model, z)?;
    let direct = aperiodic_sequence_check(model, &eta, e, horizon)?;
    let via_powers = strongly_aperiodic_check(model, &eta, e, horizon, rs_bound)?;
    let bad = via_powers.failing_n().len() + via_powers.inconclusive.len();
    let literal_holds = horizon > 0 && bad <= 1;
    Ok(CenterAperiodicity {
        agree: direct.holds_at_horizon == via_powers.holds_at_horizon,
        readings_differ: literal_holds != via_powers.holds_at_horizon,
        direct,
        via_powers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: impl IntoIterator<Item = i64>) -> BTreeSet<Element> {
        v.into_iter().map(Element).collect()
    }

    #[test]
    fn integer_labels() {
        let z = HypergroupModel::integer_group(80).unwrap();
        let v = aperiodic_sequence_check(&z, &EtaSequence::Labels, &set(-2..=2), 64).unwrap();
        assert!(v.holds_at_horizon);
        assert_eq!(v.first_n, Some(5));
        assert_eq!(v.failing_n(), (1..=4).collect());
    }

    #[test]
    fn dunkl_ramirez_labels() {
        let dr = HypergroupModel::dunkl_ramirez(0.5, 64).unwrap();
        let v = aperiodic_sequence_check(&dr, &EtaSequence::Labels, &set(0..=2), 64).unwrap();
        assert!(v.holds_at_horizon && v.inconclusive.is_empty());
        assert_eq!(v.first_n, Some(3));
    }

    #[test]
    fn su2_labels_and_constant() {
        let su = HypergroupModel::su2(64).unwrap();
        let v = aperiodic_sequence_check(&su, &EtaSequence::Labels, &set(0..=1), 64).unwrap();
        assert_eq!(v.first_n, Some(3));
        let constant = EtaSequence::Constant { value: Element(1) };
        let v = aperiodic_sequence_check(&su, &constant, &set(0..=1), 64).unwrap();
        assert!(!v.holds_at_horizon && v.first_n.is_none());
        assert!(v.counterexamples[0].overlap.contains(&Element(0)));
    }

    #[test]
    fn strong_examples() {
        let z = HypergroupModel::integer_group(80).unwrap();
        let v = strongly_aperiodic_check(&z, &EtaSequence::Labels, &set([0]), 64, 3).unwrap();
        assert_eq!(v.first_n, Some(1));
        let v = strongly_aperiodic_check(&z, &EtaSequence::Labels, &set(-2..=2), 64, 3).unwrap();
        assert_eq!(v.first_n, Some(5));
        let su = HypergroupModel::su2(64).unwrap();
        let constant = EtaSequence::Constant { value: Element(1) };
        let v = strongly_aperiodic_check(&su, &constant, &set([0]), 64, 3).unwrap();
        assert!(!v.holds_at_horizon);
    }

    #[test]
    fn center_examples() {
        let z = HypergroupModel::integer_group(80).unwrap();
        let c = aperiodic_center_check(&z, Element(1), &set([0]), 64, 3).unwrap();
        assert!(c.direct.holds_at_horizon && c.via_powers.holds_at_horizon && c.agree);
        assert_eq!(c.direct.first_n, Some(1));
        let c = aperiodic_center_check(&z, Element(0), &set([0]), 64, 3).unwrap();
        assert!(!c.direct.holds_at_horizon && !c.via_powers.holds_at_horizon);

        let dr = HypergroupModel::dunkl_ramirez(0.5, 16).unwrap();
        let c = aperiodic_center_check(&dr, Element(1), &set(0..=1), 16, 3).unwrap();
        assert!(!c.direct.holds_at_horizon);
        assert!(c.direct.failing_n().contains(&2));
    }

    #[test]
    fn sequence_check_matches_center_direct_part() {
        let z = HypergroupModel::integer_group(40).unwrap();
        let e = set([-1, 0, 3]);
        for gen in [1, 2, 0] {
            let eta = EtaSequence::center_powers(&z, Element(gen)).unwrap();
            let a = aperiodic_sequence_check(&z, &eta, &e, 16).unwrap();
            let c = aperiodic_center_check(&z, Element(gen), &e, 16, 2).unwrap();
            assert_eq!(a, c.direct);
        }
    }

    #[test]
    fn unavailable_terms_are_inconclusive() {
        let dr = HypergroupModel::dunkl_ramirez(0.5, 8).unwrap();
        let v = aperiodic_sequence_check(&dr, &EtaSequence::Labels, &set(0..=2), 12).unwrap();
        assert_eq!(v.inconclusive, (9..=12).collect::<Vec<_>>());
        assert!(!v.holds_at_horizon);
    }

    #[test]
    fn empty_set_is_rejected() {
        let z = HypergroupModel::integer_group(8).unwrap();
        assert!(matches!(
            aperiodic_sequence_check(&z, &EtaSequence::Labels, &BTreeSet::new(), 4),
            Err(Error::PreconditionFailed(_))
        ));
    }
}
