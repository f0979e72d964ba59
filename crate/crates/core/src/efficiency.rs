//! Welfare loss of equilibrium profiles against truthful reporting.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::auctions::{enumerate_allocations, valuation_from_bundles, AllocationSet, BundleTable, GoodsSet};
use crate::equilibrium::is_expost_equilibrium;
use crate::error::{Error, Result};
use crate::model::{welfare_maximizers, Alt, AlternativeSet, GameInstance, HSpec, Player, Valuation, ValueTable};
use crate::rational::{int, Rational};
use crate::strategy::{FloorRule, OffsetRule, Strategy, StrategyProfile};

/// Outcomes of truthful and equilibrium reporting at one valuation
/// profile. Ties are resolved pessimistically: the best truthful choice
/// against the worst equilibrium choice.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioOutcome {
    pub dominant_alternative: Alt,
    pub equilibrium_alternative: Alt,
    pub dominant_welfare: Rational,
    pub equilibrium_welfare: Rational,
    pub ratio: Rational,
}

fn true_welfare(valuations: &[&Valuation], a: Alt) -> Rational {
    valuations.iter().fold(Rational::zero(), |acc, v| acc + v.at(a))
}

fn ratio_at(
    alternatives: &AlternativeSet,
    truth: &StrategyProfile,
    eq: &StrategyProfile,
    valuations: &[&Valuation],
) -> Result<RatioOutcome> {
    let announce = |profile: &StrategyProfile| {
        valuations
            .iter()
            .enumerate()
            .map(|(i, v)| profile.get(i).apply(v))
            .collect::<Result<Vec<_>>>()
    };
    let pick = |profile: &StrategyProfile, best: bool| -> Result<(Alt, Rational)> {
        let bids = announce(profile)?;
        let scored = welfare_maximizers(alternatives, &bids)
            .into_iter()
            .map(|a| (a, true_welfare(valuations, a)));
        // first alternative attaining the extreme
        let chosen = if best {
            scored.reduce(|x, y| if y.1 > x.1 { y } else { x })
        } else {
            scored.reduce(|x, y| if y.1 < x.1 { y } else { x })
        };
        Ok(chosen.expect("alternative set is non-empty"))
    };
    let (dominant_alternative, dominant_welfare) = pick(truth, true)?;
    let (equilibrium_alternative, equilibrium_welfare) = pick(eq, false)?;
    if equilibrium_welfare.is_zero() {
        return Err(Error::UndefinedRatio);
    }
    Ok(RatioOutcome {
        ratio: &dominant_welfare / &equilibrium_welfare,
        dominant_alternative,
        equilibrium_alternative,
        dominant_welfare,
        equilibrium_welfare,
    })
}

/// `S(dominant choice) / S(equilibrium choice)` at one valuation profile
/// (one valuation per player).
pub fn efficiency_ratio(
    instance: &GameInstance,
    truth: &StrategyProfile,
    eq: &StrategyProfile,
    valuations: &[Valuation],
) -> Result<RatioOutcome> {
    let n = instance.num_players();
    truth.validate(instance.alternatives(), n)?;
    eq.validate(instance.alternatives(), n)?;
    if valuations.len() != n {
        return Err(Error::PlayerCountMismatch {
            players: n,
            found: valuations.len(),
            what: "valuations",
        });
    }
    let refs: Vec<&Valuation> = valuations.iter().collect();
    ratio_at(instance.alternatives(), truth, eq, &refs)
}

/// The largest ratio over every full grid profile.
#[derive(Debug, Clone, PartialEq)]
pub struct WorstCase {
    /// `1` when every profile was skipped.
    pub ratio: Rational,
    /// Grid index per player of the first profile attaining `ratio`.
    pub witness: Option<Vec<usize>>,
    pub outcome: Option<RatioOutcome>,
    pub profiles_checked: u64,
    /// Profiles whose maximal true welfare is zero.
    pub profiles_skipped: u64,
}

fn digits(mut cell: u64, radices: &[usize]) -> Vec<usize> {
    let mut out = vec![0; radices.len()];
    for (d, &r) in out.iter_mut().zip(radices).rev() {
        *d = (cell % r as u64) as usize;
        cell /= r as u64;
    }
    out
}

fn profile_count(instance: &GameInstance) -> Result<(Vec<usize>, u64)> {
    let radices: Vec<usize> = instance.families().iter().map(Vec::len).collect();
    let count = radices.iter().try_fold(1u64, |acc, &r| {
        acc.checked_mul(r as u64)
            .ok_or_else(|| Error::InvalidParameter("grid product overflows".into()))
    })?;
    Ok((radices, count))
}

/// Maximises the ratio against truthful reporting over every full grid
/// profile. Profiles where no alternative has positive true welfare are
/// skipped; a zero equilibrium welfare elsewhere is an error. Ties keep
/// the first profile in odometer order.
pub fn worst_case_ratio(instance: &GameInstance, eq: &StrategyProfile) -> Result<WorstCase> {
    let n = instance.num_players();
    let truth = StrategyProfile::truth(n);
    eq.validate(instance.alternatives(), n)?;
    let (radices, count) = profile_count(instance)?;
    let results: Vec<Option<(u64, RatioOutcome)>> = (0..count)
        .into_par_iter()
        .map(|cell| {
            let idx = digits(cell, &radices);
            let vals: Vec<&Valuation> = idx
                .iter()
                .enumerate()
                .map(|(i, &k)| &instance.family(Player(i))[k])
                .collect();
            let best = instance
                .alternatives()
                .iter()
                .map(|a| true_welfare(&vals, a))
                .max()
                .expect("non-empty");
            if best <= Rational::zero() {
                return Ok(None);
            }
            ratio_at(instance.alternatives(), &truth, eq, &vals).map(|o| Some((cell, o)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut worst = WorstCase {
        ratio: Rational::one(),
        witness: None,
        outcome: None,
        profiles_checked: 0,
        profiles_skipped: 0,
    };
    for r in results {
        let Some((cell, outcome)) = r else {
            worst.profiles_skipped += 1;
            continue;
        };
        worst.profiles_checked += 1;
        if worst.outcome.is_none() || outcome.ratio > worst.ratio {
            worst.ratio = outcome.ratio.clone();
            worst.witness = Some(digits(cell, &radices));
            worst.outcome = Some(outcome);
        }
    }
    Ok(worst)
}

/// `sup N·max_i v_i(m) / Σ_i v_i(m)` over grid profiles and alternatives
/// with positive total; the family is homogeneous of every degree above
/// it. `None` when no alternative ever has positive total.
pub fn homogeneity_degree(instance: &GameInstance) -> Result<Option<Rational>> {
    let n = int(instance.num_players() as i64);
    let (radices, count) = profile_count(instance)?;
    let best = (0..count)
        .into_par_iter()
        .filter_map(|cell| {
            let idx = digits(cell, &radices);
            let vals: Vec<&Valuation> = idx
                .iter()
                .enumerate()
                .map(|(i, &k)| &instance.family(Player(i))[k])
                .collect();
            instance
                .alternatives()
                .iter()
                .filter_map(|a| {
                    let total = true_welfare(&vals, a);
                    if total <= Rational::zero() {
                        return None;
                    }
                    let top = vals.iter().map(|v| v.at(a)).max().expect("players").clone();
                    Some(&n * top / total)
                })
                .max()
        })
        .max();
    Ok(best)
}

/// The most players valuing one alternative positively. Players draw
/// valuations independently, so this is the per-alternative count of
/// players with some grid valuation positive there.
pub fn compatibility_degree(instance: &GameInstance) -> usize {
    instance
        .alternatives()
        .iter()
        .map(|a| {
            instance
                .families()
                .iter()
                .filter(|grid| grid.iter().any(|v| *v.at(a) > Rational::zero()))
                .count()
        })
        .max()
        .unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// The number of players.
    Players,
    Homogeneous,
    Compatible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bound {
    pub kind: BoundKind,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyReport {
    pub worst: WorstCase,
    /// Every applicable bound, players first.
    pub bounds: Vec<Bound>,
    /// The tightest bound (first among equals).
    pub applied: Bound,
    pub satisfied: bool,
    pub equilibrium_cells: u64,
}

impl EfficiencyReport {
    pub fn ratio(&self) -> &Rational {
        &self.worst.ratio
    }
}

/// Confirms `eq` is an equilibrium, then compares the worst-case ratio
/// with the tightest of the player-count, homogeneity and compatibility
/// bounds.
pub fn bound_check(instance: &GameInstance, eq: &StrategyProfile) -> Result<EfficiencyReport> {
    let verdict = is_expost_equilibrium(instance, eq)?;
    if !verdict.is_pass() {
        return Err(Error::NotAnEquilibrium);
    }
    let worst = worst_case_ratio(instance, eq)?;
    let mut bounds = vec![Bound {
        kind: BoundKind::Players,
        value: int(instance.num_players() as i64),
    }];
    if let Some(p) = homogeneity_degree(instance)? {
        bounds.push(Bound {
            kind: BoundKind::Homogeneous,
            value: p,
        });
    }
    let c = compatibility_degree(instance);
    if c > 0 {
        bounds.push(Bound {
            kind: BoundKind::Compatible,
            value: int(c as i64),
        });
    }
    let applied = bounds
        .iter()
        .cloned()
        .reduce(|x, y| if y.value < x.value { y } else { x })
        .expect("player bound always present");
    Ok(EfficiencyReport {
        satisfied: worst.ratio <= applied.value,
        worst,
        bounds,
        applied,
        equilibrium_cells: verdict.cells_checked,
    })
}

/// An efficiency example: one valuation profile and the equilibrium
/// profile that loses welfare on it.
#[derive(Debug, Clone)]
pub struct EfficiencyExample {
    pub instance: GameInstance,
    pub profile: StrategyProfile,
    pub allocations: Option<AllocationSet>,
}

/// `n` goods and `n` bidders; bidder `i` values a bundle at `1` if it
/// holds good `i`, at `1 + ε` if it is the grand bundle, `0` otherwise.
/// Every bidder reports only on the grand-bundle allocations (zero
/// elsewhere). Allocations beyond `cap` are refused.
pub fn gen_example5(n: usize, epsilon: &Rational, cap: usize) -> Result<EfficiencyExample> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 players, got {n}")));
    }
    if *epsilon <= Rational::zero() {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} must be positive")));
    }
    let goods = GoodsSet::letters(n)?;
    let set = enumerate_allocations(&goods, n, cap)?;
    let grand = goods.all();
    let families = (0..n)
        .map(|i| {
            let values = (0..=grand)
                .map(|k| {
                    if k == grand {
                        Rational::one() + epsilon
                    } else if k & (1 << i) != 0 {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect();
            let table = BundleTable::new(&goods, values)?;
            Ok(vec![valuation_from_bundles(&set, i, &table)?])
        })
        .collect::<Result<Vec<_>>>()?;
    let maxima: Vec<Alt> = (0..n).map(|i| set.grand(i)).collect();
    let instance = GameInstance::new(
        set.alternatives().clone(),
        GameInstance::default_players(n),
        families,
        HSpec::Zero,
        Some(maxima.clone()),
    )?;
    let strategy = Strategy::nearly_truth(
        instance.alternatives(),
        maxima,
        OffsetRule::zero(),
        FloorRule::Constant(Rational::zero()),
    )?;
    Ok(EfficiencyExample {
        profile: StrategyProfile::uniform(strategy, n),
        instance,
        allocations: Some(set),
    })
}

/// Alternatives `m_0 … m_{M−1}`; player `i` (from 1) values `m_i` at
/// `1 + iε`, `m_0` at `1`, everything else at `0`, and reports truthfully
/// on every alternative except `m_0` (zero there).
pub fn gen_example6(num_alternatives: usize, n: usize, epsilon: &Rational) -> Result<EfficiencyExample> {
    if n == 0 || num_alternatives < n + 1 {
        return Err(Error::InvalidParameter(format!(
            "need at least {} alternatives for {n} players, got {num_alternatives}",
            n + 1
        )));
    }
    if *epsilon <= Rational::zero() {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} must be positive")));
    }
    let alternatives = AlternativeSet::new((0..num_alternatives).map(|k| format!("m{k}")))?;
    let families = (1..=n)
        .map(|i| {
            let mut values = vec![Rational::zero(); num_alternatives];
            values[0] = Rational::one();
            values[i] = Rational::one() + int(i as i64) * epsilon;
            vec![Valuation::new(values)]
        })
        .collect();
    let maxima: Vec<Alt> = (1..=n).map(Alt).collect();
    let instance = GameInstance::new(
        alternatives,
        GameInstance::default_players(n),
        families,
        HSpec::Zero,
        Some(maxima),
    )?;
    let strategy = Strategy::nearly_truth(
        instance.alternatives(),
        (1..num_alternatives).map(Alt).collect(),
        OffsetRule::zero(),
        FloorRule::Constant(Rational::zero()),
    )?;
    Ok(EfficiencyExample {
        profile: StrategyProfile::uniform(strategy, n),
        instance,
        allocations: None,
    })
}
