//! Exact ex-post equilibrium decision on finite grids.
//!
//! A profile is an equilibrium iff, for every non-empty player subset,
//! every grid profile, every announced-welfare maximiser `a` and every
//! participating player `i`, `a` maximises `v_i + Σ_{j≠i} b_j`. Any
//! announcement a deviator can make yields exactly one of the values
//! `v_i(x) + Σ_{j≠i} b_j(x) − h_i`, so this condition is equivalent to
//! the absence of profitable deviations for every tie-break and every
//! `h`; deviations are never enumerated.

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    argmax_all, utility, welfare_maximizers, Alt, AlternativeSet, Announcement, GameInstance,
    Player, PriorityOrder, Valuation, ValueTable,
};
use crate::parallelogram::{check_mve_sampled, MveVerdict, SampledFunction};
use crate::rational::{rat, Rational};
use crate::strategy::{Strategy, StrategyProfile};

/// `v_i(x) + Σ_j opponents_j(x)` for every alternative.
fn deviator_values<T: ValueTable>(v: &Valuation, opponents: &[T]) -> Vec<Rational> {
    let mut out = v.values().to_vec();
    for o in opponents {
        for (x, b) in out.iter_mut().zip(o.values()) {
            *x += b;
        }
    }
    out
}

/// The best alternative for the deviator against `opponents` (lowest
/// index among ties) and how much it beats `a` by.
pub fn best_deviation<T: ValueTable>(v: &Valuation, opponents: &[T], a: Alt) -> (Alt, Rational) {
    let values = deviator_values(v, opponents);
    let best = argmax_all(&values)[0];
    let gap = &values[best.0] - &values[a.0];
    (best, gap)
}

/// `max_x [v_i(x) + Σ_{j≠i} b_j(x)] − [v_i(a) + Σ_{j≠i} b_j(a)]`; zero iff
/// `a` is optimal for the player given the opponents' announcements.
pub fn best_response_gap<T: ValueTable>(v: &Valuation, opponents: &[T], a: Alt) -> Rational {
    best_deviation(v, opponents, a).1
}

/// A grid profile on which some participating player gains by deviating.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    /// Participating players, increasing.
    pub subset: Vec<Player>,
    /// Grid index of each participant's valuation.
    pub valuation_indices: Vec<usize>,
    pub valuations: Vec<Valuation>,
    pub announcements: Vec<Announcement>,
    /// A welfare maximiser of the announced profile.
    pub chosen: Alt,
    pub deviator: Player,
    /// The deviator's best alternative against the others' bids.
    pub better: Alt,
    pub gap: Rational,
    /// An announcement for the deviator that makes `better` the unique
    /// maximiser.
    pub deviation: Announcement,
}

impl Witness {
    fn position(&self, p: Player) -> usize {
        self.subset
            .iter()
            .position(|&q| q == p)
            .expect("deviator participates")
    }

    /// Re-derives the announcements from the strategies and returns the
    /// deviator's utility gain from announcing `deviation` instead of its
    /// strategy, under a tie-break that selects `chosen`.
    pub fn replay(&self, instance: &GameInstance, profile: &StrategyProfile) -> Result<Rational> {
        let alts = instance.alternatives();
        let mut bids = Vec::with_capacity(self.subset.len());
        for (p, &k) in self.subset.iter().zip(&self.valuation_indices) {
            let v = instance
                .family(*p)
                .get(k)
                .ok_or(Error::InvalidParameter(format!("no valuation {k} for player {p}")))?;
            bids.push(profile.get(p.0).apply(v)?);
        }
        if !welfare_maximizers(alts, &bids).contains(&self.chosen) {
            return Err(Error::InvalidParameter(format!(
                "{} is not a welfare maximiser of the replayed profile",
                alts.label(self.chosen)
            )));
        }
        let mut order: Vec<Alt> = vec![self.chosen];
        order.extend(alts.iter().filter(|&a| a != self.chosen));
        let order = PriorityOrder::new(alts, order)?;
        let me = self.position(self.deviator);
        let truth = &instance.family(self.deviator)[self.valuation_indices[me]];
        let honest: Vec<(Player, &Announcement)> =
            self.subset.iter().copied().zip(bids.iter()).collect();
        let mut deviated = honest.clone();
        deviated[me].1 = &self.deviation;
        let h = instance.h();
        let before = utility(alts, self.deviator, truth, &honest, h, &order);
        let after = utility(alts, self.deviator, truth, &deviated, h, &order);
        Ok(after - before)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EquilibriumStatus {
    Pass,
    Fail(Box<Witness>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumVerdict {
    pub status: EquilibriumStatus,
    /// `(subset, grid profile)` cells examined: all of them on a pass,
    /// up to and including the witness cell on a failure.
    pub cells_checked: u64,
    pub subsets_checked: u64,
}

impl EquilibriumVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self.status, EquilibriumStatus::Pass)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.status {
            EquilibriumStatus::Pass => None,
            EquilibriumStatus::Fail(w) => Some(w),
        }
    }
}

/// Announcements of every grid valuation of every player.
fn announce_all(instance: &GameInstance, profile: &StrategyProfile) -> Result<Vec<Vec<Announcement>>> {
    profile.validate(instance.alternatives(), instance.num_players())?;
    instance
        .families()
        .iter()
        .enumerate()
        .map(|(i, grid)| grid.iter().map(|v| profile.get(i).apply(v)).collect())
        .collect()
}

/// Non-empty subsets of `0..n`, by size and then lexicographically.
fn subsets(n: usize) -> Vec<Vec<Player>> {
    let mut out = Vec::new();
    for size in 1..=n {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            out.push(idx.iter().map(|&i| Player(i)).collect());
            let mut k = size;
            while k > 0 && idx[k - 1] == n - size + k - 1 {
                k -= 1;
            }
            if k == 0 {
                break;
            }
            idx[k - 1] += 1;
            for j in k..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    out
}

/// Mixed-radix digits of `cell`, first position most significant.
fn cell_digits(mut cell: u64, radices: &[usize]) -> Vec<usize> {
    let mut out = vec![0; radices.len()];
    for (d, &r) in out.iter_mut().zip(radices).rev() {
        *d = (cell % r as u64) as usize;
        cell /= r as u64;
    }
    out
}

fn cell_count(radices: &[usize]) -> Result<u64> {
    radices.iter().try_fold(1u64, |acc, &r| {
        acc.checked_mul(r as u64)
            .ok_or_else(|| Error::InvalidParameter("grid product overflows".into()))
    })
}

fn subtract(total: &[Rational], b: &Announcement) -> Vec<Rational> {
    total.iter().zip(b.values()).map(|(t, x)| t - x).collect()
}

struct Opponents(Vec<Rational>);

impl ValueTable for Opponents {
    fn values(&self) -> &[Rational] {
        &self.0
    }
}

fn check_cell(
    instance: &GameInstance,
    bids: &[Vec<Announcement>],
    subset: &[Player],
    digits: &[usize],
) -> Option<Witness> {
    let alts = instance.alternatives();
    let members: Vec<&Announcement> = subset.iter().zip(digits).map(|(p, &k)| &bids[p.0][k]).collect();
    let mut total = vec![Rational::zero(); alts.len()];
    for b in &members {
        for (t, x) in total.iter_mut().zip(b.values()) {
            *t += x;
        }
    }
    let maximizers = argmax_all(&total);
    for &a in &maximizers {
        for (pos, (&p, &k)) in subset.iter().zip(digits).enumerate() {
            let v = &instance.family(p)[k];
            let opp = Opponents(subtract(&total, members[pos]));
            let (better, gap) = best_deviation(v, std::slice::from_ref(&opp), a);
            if gap > Rational::zero() {
                return Some(Witness {
                    subset: subset.to_vec(),
                    valuation_indices: digits.to_vec(),
                    valuations: subset.iter().zip(digits).map(|(q, &j)| instance.family(*q)[j].clone()).collect(),
                    announcements: members.iter().map(|b| (*b).clone()).collect(),
                    chosen: a,
                    deviator: p,
                    better,
                    gap,
                    deviation: promote(&opp.0, better),
                });
            }
        }
    }
    None
}

/// An announcement that makes `target` the unique maximiser against
/// opponent totals `opp`: zero elsewhere, just enough at `target`.
fn promote(opp: &[Rational], target: Alt) -> Announcement {
    let top = opp.iter().max().cloned().unwrap_or_else(Rational::zero);
    let mut values = vec![Rational::zero(); opp.len()];
    values[target.0] = top - &opp[target.0] + Rational::one();
    Announcement::new(values)
}

/// Decides whether `profile` is an ex-post equilibrium on the instance's
/// grids. Deterministic: on failure the witness is the first failing cell
/// in (subset, grid profile, maximiser, player) order regardless of how
/// many threads run.
pub fn is_expost_equilibrium(instance: &GameInstance, profile: &StrategyProfile) -> Result<EquilibriumVerdict> {
    let bids = announce_all(instance, profile)?;
    let mut cells_checked = 0u64;
    let mut subsets_checked = 0u64;
    for subset in subsets(instance.num_players()) {
        subsets_checked += 1;
        let radices: Vec<usize> = subset.iter().map(|p| instance.family(*p).len()).collect();
        let count = cell_count(&radices)?;
        let found = (0..count).into_par_iter().find_map_first(|cell| {
            check_cell(instance, &bids, &subset, &cell_digits(cell, &radices)).map(|w| (cell, w))
        });
        if let Some((cell, w)) = found {
            return Ok(EquilibriumVerdict {
                status: EquilibriumStatus::Fail(Box::new(w)),
                cells_checked: cells_checked + cell + 1,
                subsets_checked,
            });
        }
        cells_checked += count;
    }
    Ok(EquilibriumVerdict {
        status: EquilibriumStatus::Pass,
        cells_checked,
        subsets_checked,
    })
}

/// Offsets `b(v)(a_k) − v(a_k)` of one grid valuation over every maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct OffsetRow {
    pub valuation_index: usize,
    pub offsets: Vec<(Alt, Rational)>,
    pub constant: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NearTruthReport {
    /// Distinct maxima of all players, increasing.
    pub maxima: Vec<Alt>,
    /// One row list per player.
    pub rows: Vec<Vec<OffsetRow>>,
}

impl NearTruthReport {
    pub fn all_constant(&self) -> bool {
        self.rows.iter().flatten().all(|r| r.constant)
    }

    /// The single offset shared by every row, when there is one.
    pub fn common_offset(&self) -> Option<Rational> {
        let mut all = self.rows.iter().flatten().flat_map(|r| r.offsets.iter().map(|(_, o)| o));
        let first = all.next()?.clone();
        all.all(|o| *o == first).then_some(first)
    }
}

/// For every player and grid valuation, the offsets of the announcement
/// over the true value at each player's maximum.
pub fn verify_near_truth_on_maxima(instance: &GameInstance, profile: &StrategyProfile) -> Result<NearTruthReport> {
    let maxima = instance
        .maxima()
        .ok_or_else(|| Error::InvalidParameter("instance has no maxima".into()))?;
    let mut distinct = maxima.to_vec();
    distinct.sort();
    distinct.dedup();
    let bids = announce_all(instance, profile)?;
    let rows = bids
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(k, b)| {
                    let v = &instance.family(Player(i))[k];
                    let offsets: Vec<(Alt, Rational)> = distinct.iter().map(|&a| (a, b.at(a) - v.at(a))).collect();
                    let constant = offsets.windows(2).all(|w| w[0].1 == w[1].1);
                    OffsetRow {
                        valuation_index: k,
                        offsets,
                        constant,
                    }
                })
                .collect()
        })
        .collect();
    Ok(NearTruthReport { maxima: distinct, rows })
}

/// `s ↦ b(Z^{(a,s)})(a) − b(Z^{(a,s)})(a′)` sampled on `grid`.
pub fn extract_g(
    strategy: &Strategy,
    num_alternatives: usize,
    a: Alt,
    other: Alt,
    grid: &[Rational],
) -> Result<SampledFunction> {
    if a.0 >= num_alternatives || other.0 >= num_alternatives {
        return Err(Error::AlternativeOutOfRange {
            index: a.0.max(other.0),
            len: num_alternatives,
        });
    }
    let values = grid
        .iter()
        .map(|s| {
            let b = strategy.apply(&Valuation::z(num_alternatives, a, s.clone()))?;
            Ok(b.at(a) - b.at(other))
        })
        .collect::<Result<Vec<_>>>()?;
    SampledFunction::new(grid.to_vec(), values)
}

/// Mean value exclusion on two extracted g-functions.
pub fn check_mve_pair(g1: &SampledFunction, g2: &SampledFunction) -> MveVerdict {
    check_mve_sampled(g1, g2)
}

/// A grid valuation whose bid difference disagrees with the g-table.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationMismatch {
    pub valuation_index: usize,
    pub s: Rational,
    pub bid_difference: Rational,
    pub g_value: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationReport {
    pub checked: usize,
    pub mismatches: Vec<PropagationMismatch>,
}

/// Sampled consistency of bid differences with g: for every grid
/// valuation of `player` maximised at `a` with `v(a) − v(a′) = s` on the
/// g-grid, compares `b(v)(a) − b(v)(a′)` with `g(s)`. `skip` lists the
/// points (shared segment endpoints) where the two may differ.
pub fn check_difference_propagation(
    instance: &GameInstance,
    profile: &StrategyProfile,
    player: Player,
    a: Alt,
    other: Alt,
    g: &SampledFunction,
    skip: &[Rational],
) -> Result<PropagationReport> {
    let strategy = profile.get(player.0);
    let mut report = PropagationReport {
        checked: 0,
        mismatches: Vec::new(),
    };
    for (k, v) in instance.family(player).iter().enumerate() {
        if !v.is_maximum(a) {
            continue;
        }
        let s = v.at(a) - v.at(other);
        if skip.contains(&s) {
            continue;
        }
        let Some(index) = g.grid().iter().position(|x| *x == s) else {
            continue;
        };
        let b = strategy.apply(v)?;
        let diff = b.at(a) - b.at(other);
        report.checked += 1;
        if diff != g.values()[index] {
            report.mismatches.push(PropagationMismatch {
                valuation_index: k,
                s,
                bid_difference: diff,
                g_value: g.values()[index].clone(),
            });
        }
    }
    Ok(report)
}

/// `Z^{(peak, height)}`, `height > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZValuation {
    peak: Alt,
    height: Rational,
}

impl ZValuation {
    pub fn new(peak: Alt, height: Rational) -> Result<Self> {
        if height <= Rational::zero() {
            return Err(Error::InvalidParameter(format!("Z-valuation height {height} must be positive")));
        }
        Ok(Self { peak, height })
    }

    pub fn peak(&self) -> Alt {
        self.peak
    }

    pub fn height(&self) -> &Rational {
        &self.height
    }

    pub fn valuation(&self, num_alternatives: usize) -> Valuation {
        Valuation::z(num_alternatives, self.peak, self.height.clone())
    }

    /// Recognises a Z-valuation.
    pub fn of(v: &Valuation) -> Option<Self> {
        v.as_z().map(|(peak, height)| Self { peak, height })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lemma {
    /// A strict maximum keeps the strictly highest bid.
    StrictArgmax,
    /// Equal values get equal bids.
    EqualValuesEqualBids,
    /// On `Z^{(a,s)}` the bid at `a` exceeds every other bid by `s`.
    ZSpread,
    /// On `Z^{(a_i,s)}` the bid at `a_i` exceeds the bid at every other
    /// player's maximum by `s`.
    ZSpreadToMaxima,
    /// On `Z^{(a_i,t)}` all other players' maxima get equal bids.
    EqualBidsOnOtherMaxima,
    /// On `Z^{(a_i,t)}` other players' maxima outbid every `â ≠ a_i`.
    OtherMaximaDominate,
}

impl Lemma {
    pub const ALL: [Lemma; 6] = [
        Lemma::StrictArgmax,
        Lemma::EqualValuesEqualBids,
        Lemma::ZSpread,
        Lemma::ZSpreadToMaxima,
        Lemma::EqualBidsOnOtherMaxima,
        Lemma::OtherMaximaDominate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::StrictArgmax => "strict-argmax",
            Lemma::EqualValuesEqualBids => "equal-values-equal-bids",
            Lemma::ZSpread => "z-spread",
            Lemma::ZSpreadToMaxima => "z-spread-to-maxima",
            Lemma::EqualBidsOnOtherMaxima => "equal-bids-on-other-maxima",
            Lemma::OtherMaximaDominate => "other-maxima-dominate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LemmaStatus {
    Pass,
    Fail {
        player: Player,
        valuation_index: usize,
        detail: String,
    },
    /// The instance lacks the lemma's hypotheses (player count, maxima).
    NotApplicable,
}

impl LemmaStatus {
    pub fn is_pass(&self) -> bool {
        matches!(self, LemmaStatus::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, LemmaStatus::Fail { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaReport {
    pub results: Vec<(Lemma, LemmaStatus)>,
}

impl LemmaReport {
    pub fn status(&self, lemma: Lemma) -> &LemmaStatus {
        &self
            .results
            .iter()
            .find(|(l, _)| *l == lemma)
            .expect("every lemma is reported")
            .1
    }

    pub fn any_fail(&self) -> bool {
        self.results.iter().any(|(_, s)| s.is_fail())
    }
}

struct LemmaScan {
    status: LemmaStatus,
}

impl LemmaScan {
    fn applicable(yes: bool) -> Self {
        Self {
            status: if yes { LemmaStatus::Pass } else { LemmaStatus::NotApplicable },
        }
    }

    fn active(&self) -> bool {
        self.status.is_pass()
    }

    fn fail(&mut self, player: Player, valuation_index: usize, detail: impl FnOnce() -> String) {
        if self.active() {
            self.status = LemmaStatus::Fail {
                player,
                valuation_index,
                detail: detail(),
            };
        }
    }
}

/// Checks the necessary conditions every equilibrium satisfies on the
/// instance's grids. Lemmas over full non-negative families apply when no
/// maxima are set; lemmas over constant-maximum families apply when they
/// are.
pub fn check_structural_lemmas(instance: &GameInstance, profile: &StrategyProfile) -> Result<LemmaReport> {
    let bids = announce_all(instance, profile)?;
    let n = instance.num_players();
    let num_alts = instance.alternatives().len();
    let maxima = instance.maxima();
    let mut l1 = LemmaScan::applicable(true);
    let mut equal = LemmaScan::applicable(n >= 2 && maxima.is_none());
    let mut spread = LemmaScan::applicable(n >= 3 && num_alts >= 3 && maxima.is_none());
    let mut spread_max = LemmaScan::applicable(n >= 3 && num_alts >= 3 && maxima.is_some());
    let mut equal_max = LemmaScan::applicable(n >= 3 && maxima.is_some());
    let mut dominate = LemmaScan::applicable(n >= 2 && maxima.is_some());

    for (i, row) in bids.iter().enumerate() {
        let p = Player(i);
        let family = instance.family(p);
        for (k, (v, b)) in family.iter().zip(row).enumerate() {
            if let Some(a) = v.strict_maximum() {
                if let Some(x) = (0..num_alts).map(Alt).find(|&x| x != a && b.at(x) >= b.at(a)) {
                    l1.fail(p, k, || format!("strict maximum {} bid {} but alternative {} bid {}", a.0, b.at(a), x.0, b.at(x)));
                }
            }
            if equal.active() {
                'pairs: for x in 0..num_alts {
                    for y in x + 1..num_alts {
                        if v.at(Alt(x)) == v.at(Alt(y)) && b.at(Alt(x)) != b.at(Alt(y)) {
                            equal.fail(p, k, || format!("alternatives {x} and {y} valued equally but bid {} and {}", b.at(Alt(x)), b.at(Alt(y))));
                            break 'pairs;
                        }
                    }
                }
            }
            if spread.active() {
                if let Some((peak, s)) = v.as_z() {
                    if let Some(x) = (0..num_alts).map(Alt).find(|&x| x != peak && b.at(peak) - b.at(x) != s) {
                        spread.fail(p, k, || format!("spread toward {} is {}, expected {s}", x.0, b.at(peak) - b.at(x)));
                    }
                }
            }
        }
        if spread.active() && !family.iter().any(|v| v.as_z().is_some()) {
            return Err(Error::MissingZValuation { player: i, needed: "any alternative".into() });
        }
        let Some(maxima) = maxima else {
            continue;
        };
        if !(spread_max.active() || equal_max.active() || dominate.active()) {
            continue;
        }
        let own = maxima[i];
        let mut others: Vec<Alt> = maxima.iter().copied().filter(|&a| a != own).collect();
        others.sort();
        others.dedup();
        let zs: Vec<(usize, Rational)> = family
            .iter()
            .enumerate()
            .filter_map(|(k, v)| match v.as_z() {
                Some((peak, s)) if peak == own => Some((k, s)),
                _ => None,
            })
            .collect();
        if zs.is_empty() {
            return Err(Error::MissingZValuation {
                player: i,
                needed: instance.alternatives().label(own).to_string(),
            });
        }
        for (k, s) in zs {
            let b = &row[k];
            if let Some(x) = others.iter().find(|&&x| b.at(own) - b.at(x) != s) {
                spread_max.fail(p, k, || format!("spread toward maximum {} is {}, expected {s}", x.0, b.at(own) - b.at(*x)));
            }
            if let Some(w) = others.windows(2).find(|w| b.at(w[0]) != b.at(w[1])) {
                equal_max.fail(p, k, || format!("maxima {} and {} bid {} and {}", w[0].0, w[1].0, b.at(w[0]), b.at(w[1])));
            }
            for &x in &others {
                if let Some(y) = (0..num_alts).map(Alt).find(|&y| y != own && b.at(y) > b.at(x)) {
                    dominate.fail(p, k, || format!("maximum {} bid {} below alternative {} bid {}", x.0, b.at(x), y.0, b.at(y)));
                }
            }
        }
    }
    let results = vec![
        (Lemma::StrictArgmax, l1.status),
        (Lemma::EqualValuesEqualBids, equal.status),
        (Lemma::ZSpread, spread.status),
        (Lemma::ZSpreadToMaxima, spread_max.status),
        (Lemma::EqualBidsOnOtherMaxima, equal_max.status),
        (Lemma::OtherMaximaDominate, dominate.status),
    ];
    Ok(LemmaReport { results })
}

/// Outcome of sampling random deviations against the checker's verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheckReport {
    pub verdict_pass: bool,
    pub samples: usize,
    /// Sampled deviations that strictly improve the deviator's utility
    /// for some pair of tie-breaks.
    pub improving: usize,
    /// Witness-cell deviations built from the checker's best alternative
    /// that failed to improve (always zero when the reduction is sound).
    pub witness_misses: usize,
}

impl CrossCheckReport {
    /// A pass admits no improving deviation; a failure's witness-cell
    /// deviations all improve.
    pub fn agrees(&self) -> bool {
        if self.verdict_pass {
            self.improving == 0
        } else {
            self.witness_misses == 0 && self.improving > 0
        }
    }
}

fn random_rational<R: Rng>(rng: &mut R, bound: i64) -> Rational {
    let den = *[1i64, 2, 3, 4].choose(rng).expect("non-empty");
    rat(rng.gen_range(-bound * den..=bound * den), den)
}

/// Whether replacing the deviator's bid by `deviation` can raise its
/// utility: some maximiser after the deviation beats some maximiser
/// before it.
fn improves(
    alts: &AlternativeSet,
    v: &Valuation,
    opp: &[Rational],
    own: &Announcement,
    deviation: &Announcement,
) -> bool {
    let u: Vec<Rational> = deviator_values(v, &[Opponents(opp.to_vec())]);
    let welfare = |b: &Announcement| -> Vec<Rational> { opp.iter().zip(b.values()).map(|(o, x)| o + x).collect() };
    let before = argmax_all(&welfare(own));
    let after = argmax_all(&welfare(deviation));
    debug_assert!(before.iter().all(|a| a.0 < alts.len()));
    let worst_before = before.iter().map(|a| &u[a.0]).min().expect("non-empty");
    let best_after = after.iter().map(|a| &u[a.0]).max().expect("non-empty");
    best_after > worst_before
}

/// Samples `samples` deviations (random tables, truth with a bump, and
/// other grid valuations' announcements) at random cells and compares the
/// outcome with the checker. On a failing instance half the samples go to
/// the witness cell, deviating toward the witness's better alternative.
pub fn cross_check_deviations(
    instance: &GameInstance,
    profile: &StrategyProfile,
    samples: usize,
    seed: u64,
) -> Result<CrossCheckReport> {
    let verdict = is_expost_equilibrium(instance, profile)?;
    let bids = announce_all(instance, profile)?;
    let alts = instance.alternatives();
    let all_subsets = subsets(instance.num_players());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CrossCheckReport {
        verdict_pass: verdict.is_pass(),
        samples,
        improving: 0,
        witness_misses: 0,
    };
    for t in 0..samples {
        let at_witness = verdict.witness().filter(|_| t % 2 == 0);
        let (subset, digits, deviator) = match at_witness {
            Some(w) => (w.subset.clone(), w.valuation_indices.clone(), w.deviator),
            None => {
                let subset = all_subsets.choose(&mut rng).expect("non-empty").clone();
                let digits: Vec<usize> = subset.iter().map(|p| rng.gen_range(0..instance.family(*p).len())).collect();
                let deviator = *subset.choose(&mut rng).expect("non-empty");
                (subset, digits, deviator)
            }
        };
        let me = subset.iter().position(|&p| p == deviator).expect("member");
        let v = &instance.family(deviator)[digits[me]];
        let own = &bids[deviator.0][digits[me]];
        let mut opp = vec![Rational::zero(); alts.len()];
        for (pos, (&p, &k)) in subset.iter().zip(&digits).enumerate() {
            if pos != me {
                for (o, x) in opp.iter_mut().zip(bids[p.0][k].values()) {
                    *o += x;
                }
            }
        }
        let deviation = match at_witness {
            Some(w) => {
                let mut values = v.values().to_vec();
                values[w.better.0] += Rational::one() + random_rational(&mut rng, 2).abs();
                Announcement::new(values)
            }
            None => match rng.gen_range(0..3) {
                0 => Announcement::new((0..alts.len()).map(|_| random_rational(&mut rng, 5)).collect()),
                1 => {
                    let mut values = v.values().to_vec();
                    let x = rng.gen_range(0..alts.len());
                    values[x] += rat(rng.gen_range(1..=8), 2);
                    Announcement::new(values)
                }
                _ => {
                    let k = rng.gen_range(0..bids[deviator.0].len());
                    bids[deviator.0][k].clone()
                }
            },
        };
        let better = improves(alts, v, &opp, own, &deviation);
        if better {
            report.improving += 1;
        } else if at_witness.is_some() {
            report.witness_misses += 1;
        }
    }
    Ok(report)
}
