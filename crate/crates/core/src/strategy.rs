//! Strategy families and their communication cost.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::model::{Alt, AlternativeSet, Announcement, Valuation, ValueTable};
use crate::rational::{int, Rational};

/// The per-valuation shift `f_i(v_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OffsetRule {
    Constant(Rational),
    /// Explicit lookup by valuation, falling back to `default`.
    PerValuation {
        entries: Vec<(Vec<Rational>, Rational)>,
        default: Rational,
    },
}

impl OffsetRule {
    pub fn zero() -> Self {
        OffsetRule::Constant(Rational::zero())
    }

    pub fn eval(&self, v: &Valuation) -> Rational {
        match self {
            OffsetRule::Constant(c) => c.clone(),
            OffsetRule::PerValuation { entries, default } => entries
                .iter()
                .find(|(values, _)| values.as_slice() == v.values())
                .map(|(_, f)| f.clone())
                .unwrap_or_else(|| default.clone()),
        }
    }
}

/// The constant reported off the truthful subset.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum FloorRule {
    /// `min_{a∈A'} b(v)(a)`, the largest admissible constant.
    #[default]
    MinOverSubset,
    Constant(Rational),
}

/// Off-maxima reports for the maxima-plus-ten strategy; every value lies
/// in `[0, 9]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OffMaximaRule {
    Constant(Rational),
    PerAlternative(Vec<Rational>),
    /// `v(a)` clamped into `[0, 9]`.
    ClampedValue,
}

impl OffMaximaRule {
    fn eval(&self, v: &Valuation, a: Alt) -> Result<Rational> {
        let x = match self {
            OffMaximaRule::Constant(c) => c.clone(),
            OffMaximaRule::PerAlternative(values) => values
                .get(a.0)
                .cloned()
                .ok_or(Error::LengthMismatch {
                    expected: v.len(),
                    found: values.len(),
                })?,
            OffMaximaRule::ClampedValue => {
                v.at(a).clone().max(Rational::zero()).min(int(9))
            }
        };
        check_off_range(&x)?;
        Ok(x)
    }
}

fn check_off_range(x: &Rational) -> Result<()> {
    if *x < Rational::zero() || *x > int(9) {
        Err(Error::OffRuleOutOfRange(Box::new(x.clone())))
    } else {
        Ok(())
    }
}

/// Bundle-level reporting for one bidder in an auction whose alternatives
/// are allocations. Built by [`crate::auctions::bundling_strategy`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleReporting {
    /// Bitmask of goods the bidder receives, per allocation.
    pub bundle_of: Vec<u32>,
    /// For each bundle mask, an allocation in which the bidder receives
    /// exactly that bundle.
    pub representative: Vec<Option<Alt>>,
    /// Bundles the bidder reports on, sorted.
    pub family: Vec<u32>,
}

impl BundleReporting {
    fn report(&self, v: &Valuation) -> Result<Announcement> {
        let mut out = Vec::with_capacity(self.bundle_of.len());
        for (x, &bundle) in self.bundle_of.iter().enumerate() {
            if self.family.binary_search(&bundle).is_ok() {
                out.push(v.at(Alt(x)).clone());
                continue;
            }
            // floor extension: best reported member inside the bundle
            let mut best: Option<Rational> = None;
            for &member in &self.family {
                if member & !bundle != 0 {
                    continue;
                }
                let rep = self.representative[member as usize].ok_or_else(|| {
                    Error::InvalidStrategy(format!("no allocation realises bundle {member:#b}"))
                })?;
                let value = v.at(rep).clone();
                if best.as_ref().is_none_or(|b| value > *b) {
                    best = Some(value);
                }
            }
            out.push(best.unwrap_or_else(Rational::zero));
        }
        Ok(Announcement::new(out))
    }

    /// Allocations on which the bidder reports truthfully.
    pub fn induced_subset(&self) -> Vec<Alt> {
        self.bundle_of
            .iter()
            .enumerate()
            .filter(|(_, b)| self.family.binary_search(b).is_ok())
            .map(|(x, _)| Alt(x))
            .collect()
    }
}

/// A rule mapping a true valuation to an announcement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    Truth,
    /// `v(a) + f(v) + skew(a)`; an empty `skew` means no per-alternative
    /// term.
    ShiftedTruth {
        offset: OffsetRule,
        skew: Vec<Rational>,
    },
    /// Truthful up to `f(v)` on `subset`, a constant floor elsewhere.
    NearlyTruth {
        subset: Vec<Alt>,
        offset: OffsetRule,
        floor: FloorRule,
    },
    Scaling(Rational),
    /// Explicit valuation → announcement lookup.
    Table(Vec<(Vec<Rational>, Announcement)>),
    Bundling(BundleReporting),
    /// `v(a_k) + 10` on every listed maximum, values in `[0, 9]` elsewhere.
    MaximaPlusTen {
        maxima: Vec<Alt>,
        off: OffMaximaRule,
    },
}

impl Strategy {
    pub fn shifted(offset: OffsetRule) -> Self {
        Strategy::ShiftedTruth {
            offset,
            skew: Vec::new(),
        }
    }

    pub fn nearly_truth(
        alternatives: &AlternativeSet,
        subset: Vec<Alt>,
        offset: OffsetRule,
        floor: FloorRule,
    ) -> Result<Self> {
        let s = Strategy::NearlyTruth {
            subset: normalise_subset(subset),
            offset,
            floor,
        };
        s.validate(alternatives)?;
        Ok(s)
    }

    /// Checks structural invariants against an alternative set.
    pub fn validate(&self, alternatives: &AlternativeSet) -> Result<()> {
        let n = alternatives.len();
        match self {
            Strategy::Truth | Strategy::Scaling(_) | Strategy::Table(_) => Ok(()),
            Strategy::ShiftedTruth { skew, .. } => {
                if skew.is_empty() || skew.len() == n {
                    Ok(())
                } else {
                    Err(Error::LengthMismatch {
                        expected: n,
                        found: skew.len(),
                    })
                }
            }
            Strategy::NearlyTruth { subset, .. } => {
                if subset.is_empty() {
                    return Err(Error::InvalidStrategy(
                        "nearly-truth subset must be non-empty".into(),
                    ));
                }
                for a in subset {
                    alternatives.check(*a)?;
                }
                Ok(())
            }
            Strategy::Bundling(r) => {
                if r.bundle_of.len() == n {
                    Ok(())
                } else {
                    Err(Error::LengthMismatch {
                        expected: n,
                        found: r.bundle_of.len(),
                    })
                }
            }
            Strategy::MaximaPlusTen { maxima, off } => {
                if maxima.is_empty() {
                    return Err(Error::InvalidStrategy("maxima must be non-empty".into()));
                }
                for a in maxima {
                    alternatives.check(*a)?;
                }
                if let OffMaximaRule::PerAlternative(values) = off {
                    if values.len() != n {
                        return Err(Error::LengthMismatch {
                            expected: n,
                            found: values.len(),
                        });
                    }
                }
                Ok(())
            }
        }
    }

    /// `b(v)`.
    pub fn apply(&self, v: &Valuation) -> Result<Announcement> {
        let values = v.values();
        match self {
            Strategy::Truth => Ok(Announcement::from(v)),
            Strategy::ShiftedTruth { offset, skew } => {
                let f = offset.eval(v);
                Ok(Announcement::new(
                    values
                        .iter()
                        .enumerate()
                        .map(|(a, x)| match skew.get(a) {
                            Some(s) => x + &f + s,
                            None => x + &f,
                        })
                        .collect(),
                ))
            }
            Strategy::NearlyTruth {
                subset,
                offset,
                floor,
            } => {
                let f = offset.eval(v);
                let min = subset
                    .iter()
                    .map(|a| v.at(*a) + &f)
                    .min()
                    .ok_or_else(|| Error::InvalidStrategy("empty subset".into()))?;
                let c = match floor {
                    FloorRule::MinOverSubset => min,
                    FloorRule::Constant(c) => {
                        if *c > min {
                            return Err(Error::FloorTooHigh {
                                floor: Box::new(c.clone()),
                                min: Box::new(min),
                            });
                        }
                        c.clone()
                    }
                };
                let mut out = vec![c; values.len()];
                for a in subset {
                    out[a.0] = v.at(*a) + &f;
                }
                Ok(Announcement::new(out))
            }
            Strategy::Scaling(k) => Ok(Announcement::new(
                values.iter().map(|x| x * k).collect(),
            )),
            Strategy::Table(entries) => entries
                .iter()
                .find(|(key, _)| key.as_slice() == values)
                .map(|(_, b)| b.clone())
                .ok_or(Error::MissingTableEntry),
            Strategy::Bundling(r) => r.report(v),
            Strategy::MaximaPlusTen { maxima, off } => {
                let ten = int(10);
                let mut out = Vec::with_capacity(values.len());
                for a in 0..values.len() {
                    let a = Alt(a);
                    if maxima.contains(&a) {
                        out.push(v.at(a) + &ten);
                    } else {
                        out.push(off.eval(v, a)?);
                    }
                }
                Ok(Announcement::new(out))
            }
        }
    }

    /// Alternatives reported truthfully (up to a shift), when the strategy
    /// has such a subset.
    pub fn truthful_subset(&self, num_alternatives: usize) -> Option<Vec<Alt>> {
        match self {
            Strategy::Truth | Strategy::Scaling(_) => {
                Some((0..num_alternatives).map(Alt).collect())
            }
            Strategy::ShiftedTruth { skew, .. } if skew.iter().all(Zero::is_zero) => {
                Some((0..num_alternatives).map(Alt).collect())
            }
            Strategy::NearlyTruth { subset, .. } => Some(subset.clone()),
            Strategy::Bundling(r) => Some(r.induced_subset()),
            _ => None,
        }
    }
}

fn normalise_subset(mut subset: Vec<Alt>) -> Vec<Alt> {
    subset.sort();
    subset.dedup();
    subset
}

/// `b_i(v)(a_k) = v(a_k) + 10` on every maximum, `off` elsewhere.
pub fn make_maxima_plus_ten(maxima: Vec<Alt>, off: OffMaximaRule) -> Result<Strategy> {
    if maxima.is_empty() {
        return Err(Error::InvalidStrategy("maxima must be non-empty".into()));
    }
    match &off {
        OffMaximaRule::Constant(c) => check_off_range(c)?,
        OffMaximaRule::PerAlternative(values) => {
            for (a, x) in values.iter().enumerate() {
                if !maxima.contains(&Alt(a)) {
                    check_off_range(x)?;
                }
            }
        }
        OffMaximaRule::ClampedValue => {}
    }
    Ok(Strategy::MaximaPlusTen {
        maxima: normalise_subset(maxima),
        off,
    })
}

/// Numbers a player transmits under `strategy`.
pub fn communication_cost(strategy: &Strategy, num_alternatives: usize) -> usize {
    match strategy {
        Strategy::NearlyTruth { subset, .. } => subset.len() + 1,
        Strategy::Bundling(r) => r.family.len(),
        Strategy::Truth
        | Strategy::ShiftedTruth { .. }
        | Strategy::Scaling(_)
        | Strategy::Table(_)
        | Strategy::MaximaPlusTen { .. } => num_alternatives,
    }
}

/// One strategy per player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyProfile {
    strategies: Vec<Strategy>,
}

impl StrategyProfile {
    pub fn new(strategies: Vec<Strategy>) -> Self {
        Self { strategies }
    }

    pub fn truth(n: usize) -> Self {
        Self::uniform(Strategy::Truth, n)
    }

    pub fn uniform(s: Strategy, n: usize) -> Self {
        Self {
            strategies: vec![s; n],
        }
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }

    pub fn get(&self, i: usize) -> &Strategy {
        &self.strategies[i]
    }

    pub fn strategies(&self) -> &[Strategy] {
        &self.strategies
    }

    pub fn validate(&self, alternatives: &AlternativeSet, players: usize) -> Result<()> {
        if self.strategies.len() != players {
            return Err(Error::PlayerCountMismatch {
                players,
                found: self.strategies.len(),
                what: "strategies",
            });
        }
        self.strategies
            .iter()
            .try_for_each(|s| s.validate(alternatives))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn alts(n: usize) -> AlternativeSet {
        AlternativeSet::numbered(n).unwrap()
    }

    fn val(v: &[i64]) -> Valuation {
        Valuation::new(v.iter().map(|&x| int(x)).collect())
    }

    fn values(b: &Announcement) -> Vec<Rational> {
        b.values().to_vec()
    }

    #[test]
    fn truth_is_identity() {
        let v = val(&[3, -1, 2]);
        assert_eq!(values(&Strategy::Truth.apply(&v).unwrap()), v.values());
    }

    #[test]
    fn nearly_truth_with_zero_floor() {
        let s = Strategy::nearly_truth(
            &alts(3),
            vec![Alt(0), Alt(1)],
            OffsetRule::zero(),
            FloorRule::Constant(int(0)),
        )
        .unwrap();
        let b = s.apply(&val(&[3, 1, 2])).unwrap();
        assert_eq!(values(&b), vec![int(3), int(1), int(0)]);
    }

    #[test]
    fn nearly_truth_default_floor_is_subset_minimum() {
        let s = Strategy::nearly_truth(
            &alts(4),
            vec![Alt(0), Alt(2)],
            OffsetRule::Constant(rat(1, 2)),
            FloorRule::MinOverSubset,
        )
        .unwrap();
        let b = s.apply(&val(&[3, 9, 2, 5])).unwrap();
        assert_eq!(values(&b), vec![rat(7, 2), rat(5, 2), rat(5, 2), rat(5, 2)]);
    }

    #[test]
    fn floor_above_minimum_is_rejected() {
        let s = Strategy::nearly_truth(
            &alts(3),
            vec![Alt(0), Alt(1)],
            OffsetRule::zero(),
            FloorRule::Constant(int(2)),
        )
        .unwrap();
        assert!(matches!(
            s.apply(&val(&[3, 1, 0])).unwrap_err(),
            Error::FloorTooHigh { .. }
        ));
    }

    #[test]
    fn empty_subset_is_rejected() {
        assert!(Strategy::nearly_truth(&alts(2), vec![], OffsetRule::zero(), FloorRule::default())
            .is_err());
    }

    #[test]
    fn maxima_plus_ten_reports() {
        let s = make_maxima_plus_ten(vec![Alt(0), Alt(1)], OffMaximaRule::Constant(int(0))).unwrap();
        let b = s.apply(&val(&[2, 1, 1])).unwrap();
        assert_eq!(values(&b), vec![int(12), int(11), int(0)]);
    }

    #[test]
    fn maxima_plus_ten_rejects_out_of_range() {
        assert!(matches!(
            make_maxima_plus_ten(vec![Alt(0)], OffMaximaRule::Constant(int(10))).unwrap_err(),
            Error::OffRuleOutOfRange(_)
        ));
        assert!(make_maxima_plus_ten(vec![], OffMaximaRule::ClampedValue).is_err());
    }

    #[test]
    fn clamped_off_rule_stays_in_range() {
        let s = make_maxima_plus_ten(vec![Alt(0)], OffMaximaRule::ClampedValue).unwrap();
        let b = s.apply(&val(&[20, 15, 4])).unwrap();
        assert_eq!(values(&b), vec![int(30), int(9), int(4)]);
    }

    #[test]
    fn communication_costs() {
        let a = alts(9);
        let near = Strategy::nearly_truth(
            &a,
            vec![Alt(0), Alt(1), Alt(2)],
            OffsetRule::zero(),
            FloorRule::default(),
        )
        .unwrap();
        assert_eq!(communication_cost(&near, 9), 4);
        assert_eq!(communication_cost(&Strategy::Truth, 9), 9);
        let all = Strategy::nearly_truth(&a, a.iter().collect(), OffsetRule::zero(), FloorRule::default())
            .unwrap();
        assert_eq!(communication_cost(&all, 9), 10);
    }

    #[test]
    fn table_lookup_and_miss() {
        let v = val(&[1, 2]);
        let s = Strategy::Table(vec![(v.values().to_vec(), Announcement::new(vec![int(5), int(0)]))]);
        assert_eq!(values(&s.apply(&v).unwrap()), vec![int(5), int(0)]);
        assert_eq!(s.apply(&val(&[0, 0])).unwrap_err(), Error::MissingTableEntry);
    }

    #[test]
    fn skewed_shift_differs_per_alternative() {
        let s = Strategy::ShiftedTruth {
            offset: OffsetRule::Constant(int(1)),
            skew: vec![int(0), int(1), int(0)],
        };
        let b = s.apply(&val(&[1, 1, 1])).unwrap();
        assert_eq!(values(&b), vec![int(2), int(3), int(2)]);
    }
}
