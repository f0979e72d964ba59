//! Combinatorial auctions: allocations as alternatives, bundle-valued
//! bidders without externalities, quasi-fields and bundling strategies.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grids::constant_maximum_grid;
use crate::model::{Alt, AlternativeSet, GameInstance, HSpec, Valuation};
use crate::rational::{int, rat, Rational};
use crate::strategy::{BundleReporting, FloorRule, OffsetRule, Strategy, StrategyProfile};

/// Goods supported per auction; bundles are `u32` bitmasks.
pub const MAX_GOODS: usize = 16;

/// Allocation count above which [`enumerate_allocations`] refuses to run
/// unless a larger cap is passed (4 goods, 3 players).
pub const DEFAULT_ALLOCATION_CAP: usize = 256;

/// Bitmask of goods.
pub type Bundle = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodsSet {
    labels: Vec<String>,
}

impl GoodsSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidParameter("goods set must be non-empty".into()));
        }
        if labels.len() > MAX_GOODS {
            return Err(Error::InvalidParameter(format!(
                "{} goods exceed the supported {MAX_GOODS}",
                labels.len()
            )));
        }
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(Error::InvalidParameter("duplicate good label".into()));
        }
        Ok(Self { labels })
    }

    /// Goods `a, b, c, …`.
    pub fn letters(n: usize) -> Result<Self> {
        if n > 26 {
            return Err(Error::InvalidParameter(format!("{n} goods exceed the alphabet")));
        }
        Self::new((0..n).map(|i| ((b'a' + i as u8) as char).to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn all(&self) -> Bundle {
        ((1u64 << self.len()) - 1) as Bundle
    }

    pub fn lookup(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown good {label:?}")))
    }

    pub fn bundle<S: AsRef<str>>(&self, goods: &[S]) -> Result<Bundle> {
        goods
            .iter()
            .try_fold(0, |acc, g| Ok(acc | 1 << self.lookup(g.as_ref())?))
    }

    /// Concatenated labels, `-` for the empty bundle.
    pub fn bundle_label(&self, bundle: Bundle) -> String {
        if bundle == 0 {
            return "-".into();
        }
        (0..self.len())
            .filter(|g| bundle & (1 << g) != 0)
            .map(|g| self.labels[g].as_str())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Owner {
    Seller,
    Player(usize),
}

/// An owner for every good.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Allocation {
    owners: Vec<Owner>,
}

impl Allocation {
    pub fn owners(&self) -> &[Owner] {
        &self.owners
    }

    pub fn bundle(&self, player: usize) -> Bundle {
        self.owners
            .iter()
            .enumerate()
            .filter(|(_, o)| **o == Owner::Player(player))
            .fold(0, |acc, (g, _)| acc | 1 << g)
    }
}

/// Every allocation of a goods set to `players` bidders and the seller.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationSet {
    goods: GoodsSet,
    players: usize,
    allocations: Vec<Allocation>,
    alternatives: AlternativeSet,
}

impl AllocationSet {
    pub fn goods(&self) -> &GoodsSet {
        &self.goods
    }

    pub fn num_players(&self) -> usize {
        self.players
    }

    pub fn allocations(&self) -> &[Allocation] {
        &self.allocations
    }

    pub fn alternatives(&self) -> &AlternativeSet {
        &self.alternatives
    }

    pub fn allocation(&self, a: Alt) -> &Allocation {
        &self.allocations[a.0]
    }

    /// `(b1,b2,…)` bundle labels.
    pub fn label_of(&self, allocation: &Allocation) -> String {
        let parts: Vec<String> = (0..self.players)
            .map(|p| self.goods.bundle_label(allocation.bundle(p)))
            .collect();
        format!("({})", parts.join(","))
    }

    /// The allocation giving each player exactly the listed bundle (the
    /// seller keeps the rest).
    pub fn find(&self, bundles: &[Bundle]) -> Option<Alt> {
        self.allocations
            .iter()
            .position(|x| (0..self.players).all(|p| x.bundle(p) == bundles[p]))
            .map(Alt)
    }

    /// The allocation giving every good to `player`.
    pub fn grand(&self, player: usize) -> Alt {
        let mut bundles = vec![0; self.players];
        bundles[player] = self.goods.all();
        self.find(&bundles).expect("every assignment is enumerated")
    }
}

/// All `(players + 1)^|goods|` allocations in odometer order: the first
/// good is the most significant digit, the seller is digit 0.
pub fn enumerate_allocations(goods: &GoodsSet, players: usize, cap: usize) -> Result<AllocationSet> {
    let base = players as u128 + 1;
    let count = (0..goods.len()).try_fold(1u128, |acc, _| acc.checked_mul(base));
    let count = match count {
        Some(c) if c <= cap as u128 => c as usize,
        Some(c) => return Err(Error::TooManyAllocations { count: c, cap }),
        None => return Err(Error::TooManyAllocations { count: u128::MAX, cap }),
    };
    let mut allocations = Vec::with_capacity(count);
    for mut c in 0..count {
        let mut owners = vec![Owner::Seller; goods.len()];
        for o in owners.iter_mut().rev() {
            let digit = c % (players + 1);
            c /= players + 1;
            if digit > 0 {
                *o = Owner::Player(digit - 1);
            }
        }
        allocations.push(Allocation { owners });
    }
    let mut set = AllocationSet {
        goods: goods.clone(),
        players,
        allocations,
        alternatives: AlternativeSet::numbered(1)?,
    };
    let labels: Vec<String> = set.allocations.iter().map(|x| set.label_of(x)).collect();
    set.alternatives = AlternativeSet::new(labels)?;
    Ok(set)
}

/// A value for every bundle, indexed by bitmask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleTable {
    values: Vec<Rational>,
}

impl BundleTable {
    /// `values[mask]` for every mask of `goods`.
    pub fn new(goods: &GoodsSet, values: Vec<Rational>) -> Result<Self> {
        let expected = 1usize << goods.len();
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: values.len(),
            });
        }
        Ok(Self { values })
    }

    /// From `(bundle, value)` pairs; the empty bundle defaults to zero and
    /// every other bundle must be listed.
    pub fn from_entries(goods: &GoodsSet, entries: &[(Bundle, Rational)]) -> Result<Self> {
        let mut values: Vec<Option<Rational>> = vec![None; 1 << goods.len()];
        values[0] = Some(Rational::zero());
        for (mask, v) in entries {
            let slot = values
                .get_mut(*mask as usize)
                .ok_or_else(|| Error::MissingBundle(format!("{mask:#b}")))?;
            *slot = Some(v.clone());
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(m, v)| v.ok_or_else(|| Error::MissingBundle(goods.bundle_label(m as Bundle))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { values })
    }

    /// Sum of per-good values.
    pub fn additive(goods: &GoodsSet, item_values: &[Rational]) -> Result<Self> {
        if item_values.len() != goods.len() {
            return Err(Error::LengthMismatch {
                expected: goods.len(),
                found: item_values.len(),
            });
        }
        let values = (0..1usize << goods.len())
            .map(|m| {
                (0..goods.len())
                    .filter(|g| m & (1 << g) != 0)
                    .fold(Rational::zero(), |acc, g| acc + &item_values[g])
            })
            .collect();
        Ok(Self { values })
    }

    pub fn get(&self, bundle: Bundle) -> &Rational {
        &self.values[bundle as usize]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }
}

/// `x ↦ table(bundle of player in x)`.
pub fn valuation_from_bundles(set: &AllocationSet, player: usize, table: &BundleTable) -> Result<Valuation> {
    if player >= set.num_players() {
        return Err(Error::InvalidParameter(format!("no player {player}")));
    }
    if table.values.len() != 1 << set.goods().len() {
        return Err(Error::LengthMismatch {
            expected: 1 << set.goods().len(),
            found: table.values.len(),
        });
    }
    let values = set
        .allocations
        .iter()
        .map(|x| table.get(x.bundle(player)).clone())
        .collect();
    Ok(Valuation::new(values))
}

/// `K ⊆ K′ ⇒ table(K) ≤ table(K′)`; checked on single-good extensions.
pub fn is_monotone(table: &BundleTable) -> bool {
    let n = table.values.len();
    (0..n).all(|m| {
        (0..usize::BITS)
            .map(|g| 1usize << g)
            .take_while(|bit| *bit < n)
            .filter(|bit| m & bit == 0)
            .all(|bit| table.values[m] <= table.values[m | bit])
    })
}

/// Every monotone table with values from `values` and the empty bundle at
/// zero, in odometer order over masks `1..2^g`.
pub fn monotone_tables(goods: &GoodsSet, values: &[Rational]) -> Vec<BundleTable> {
    let slots = (1usize << goods.len()) - 1;
    let mut out = Vec::new();
    let mut digits = vec![0usize; slots];
    loop {
        let mut table = vec![Rational::zero()];
        table.extend(digits.iter().map(|&d| values[d].clone()));
        let t = BundleTable { values: table };
        if is_monotone(&t) && t.values.iter().all(|v| *v >= Rational::zero()) {
            out.push(t);
        }
        let mut k = slots;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < values.len() {
                break;
            }
            digits[k] = 0;
        }
    }
}

/// A set of bundles.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BundleFamily {
    members: BTreeSet<Bundle>,
}

impl BundleFamily {
    pub fn new<I: IntoIterator<Item = Bundle>>(members: I) -> Self {
        Self {
            members: members.into_iter().collect(),
        }
    }

    /// Every subset of the goods.
    pub fn power_set(goods: &GoodsSet) -> Self {
        Self::new(0..=goods.all())
    }

    /// All unions of parts of a partition (the empty union included).
    pub fn from_partition(parts: &[Bundle]) -> Self {
        let mut members = BTreeSet::new();
        for choice in 0u32..(1 << parts.len()) {
            let union = parts
                .iter()
                .enumerate()
                .filter(|(k, _)| choice & (1 << k) != 0)
                .fold(0, |acc, (_, p)| acc | p);
            members.insert(union);
        }
        Self { members }
    }

    pub fn members(&self) -> &BTreeSet<Bundle> {
        &self.members
    }

    pub fn contains(&self, b: Bundle) -> bool {
        self.members.contains(&b)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Why a family fails to be a quasi-field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuasiFieldViolation {
    Empty,
    /// `bundle` is a member, `complement` is not.
    MissingComplement { bundle: Bundle, complement: Bundle },
    /// Disjoint members whose union is missing.
    MissingUnion { first: Bundle, second: Bundle },
    /// A member uses goods outside the goods set.
    ForeignGoods(Bundle),
}

impl QuasiFieldViolation {
    /// The offending pair of bundles.
    pub fn pair(&self) -> Option<(Bundle, Bundle)> {
        match *self {
            QuasiFieldViolation::MissingComplement { bundle, complement } => Some((bundle, complement)),
            QuasiFieldViolation::MissingUnion { first, second } => Some((first, second)),
            _ => None,
        }
    }

    pub fn describe(&self, goods: &GoodsSet) -> String {
        match *self {
            QuasiFieldViolation::Empty => "family is empty".into(),
            QuasiFieldViolation::MissingComplement { bundle, complement } => format!(
                "{{{}}} is a member but its complement {{{}}} is not",
                goods.bundle_label(bundle),
                goods.bundle_label(complement)
            ),
            QuasiFieldViolation::MissingUnion { first, second } => format!(
                "disjoint members {{{}}} and {{{}}} have no union in the family",
                goods.bundle_label(first),
                goods.bundle_label(second)
            ),
            QuasiFieldViolation::ForeignGoods(b) => format!("bundle {b:#b} uses unknown goods"),
        }
    }
}

impl fmt::Display for QuasiFieldViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pair() {
            Some((x, y)) => write!(f, "{self:?} on ({x:#b}, {y:#b})"),
            None => write!(f, "{self:?}"),
        }
    }
}

/// Non-empty, closed under complement and under unions of disjoint
/// members. Complements are checked first, members in increasing order.
pub fn is_quasi_field(family: &BundleFamily, goods: &GoodsSet) -> std::result::Result<(), QuasiFieldViolation> {
    if family.is_empty() {
        return Err(QuasiFieldViolation::Empty);
    }
    let all = goods.all();
    if let Some(&b) = family.members.iter().find(|&&b| b & !all != 0) {
        return Err(QuasiFieldViolation::ForeignGoods(b));
    }
    for &b in &family.members {
        let complement = all & !b;
        if !family.contains(complement) {
            return Err(QuasiFieldViolation::MissingComplement { bundle: b, complement });
        }
    }
    for &x in &family.members {
        for &y in family.members.range(x..) {
            if x & y == 0 && !family.contains(x | y) {
                return Err(QuasiFieldViolation::MissingUnion { first: x, second: y });
            }
        }
    }
    Ok(())
}

/// Bundle-level reporting of `player` on `family`, without checking the
/// family's structure.
pub fn bundling_strategy_unchecked(set: &AllocationSet, player: usize, family: &BundleFamily) -> Result<Strategy> {
    let mut representative = vec![None; 1 << set.goods().len()];
    let mut bundle_of = Vec::with_capacity(set.allocations.len());
    for (x, alloc) in set.allocations.iter().enumerate() {
        let b = alloc.bundle(player);
        bundle_of.push(b);
        representative[b as usize].get_or_insert(Alt(x));
    }
    if family.members.iter().any(|&b| b as usize >= representative.len()) {
        return Err(Error::InvalidStrategy("family uses unknown goods".into()));
    }
    Ok(Strategy::Bundling(BundleReporting {
        bundle_of,
        representative,
        family: family.members.iter().copied().collect(),
    }))
}

/// True values on members of a quasi-field; on any other bundle, the
/// highest value of a member contained in it.
pub fn bundling_strategy(set: &AllocationSet, player: usize, family: &BundleFamily) -> Result<Strategy> {
    is_quasi_field(family, set.goods()).map_err(|v| Error::NotQuasiField(v.describe(set.goods())))?;
    bundling_strategy_unchecked(set, player, family)
}

/// A generated auction instance with its strategy profile.
#[derive(Debug, Clone)]
pub struct AuctionExample {
    pub allocations: AllocationSet,
    pub instance: GameInstance,
    pub profile: StrategyProfile,
}

/// Two goods, two bidders, every monotone table with values in
/// `{0, 1, 2}`. Bidder 1 reports on `{∅, {a}, {a,b}}`, bidder 2 on
/// `{∅, {b}, {a,b}}`.
pub fn gen_vickrey2() -> Result<AuctionExample> {
    let goods = GoodsSet::letters(2)?;
    let set = enumerate_allocations(&goods, 2, DEFAULT_ALLOCATION_CAP)?;
    let tables = monotone_tables(&goods, &[int(0), int(1), int(2)]);
    let families = (0..2)
        .map(|p| tables.iter().map(|t| valuation_from_bundles(&set, p, t)).collect())
        .collect::<Result<Vec<Vec<Valuation>>>>()?;
    let instance = GameInstance::new(
        set.alternatives().clone(),
        GameInstance::default_players(2),
        families,
        HSpec::Zero,
        None,
    )?;
    let profile = StrategyProfile::new(vec![
        bundling_strategy_unchecked(&set, 0, &BundleFamily::new([0b00, 0b01, 0b11]))?,
        bundling_strategy_unchecked(&set, 1, &BundleFamily::new([0b00, 0b10, 0b11]))?,
    ]);
    Ok(AuctionExample {
        allocations: set,
        instance,
        profile,
    })
}

/// Per-player bundles of the reduced allocation set.
const SPRIME: [[Bundle; 3]; 6] = [
    [0, 0, 0],
    [0, 0b110, 0],
    [0, 0b111, 0],
    [0b011, 0, 0],
    [0b111, 0, 0],
    [0, 0, 0b111],
];

/// Three goods, three bidders, truthful reporting on six allocations
/// containing every bidder's grand bundle.
#[derive(Debug, Clone)]
pub struct SPrimeExample {
    pub example: AuctionExample,
    pub subset: Vec<Alt>,
}

/// The six-allocation subset with a nearly-truthful profile over it
/// (floor 0), on seeded grids of non-negative valuations maximised at
/// each bidder's grand bundle (Z-valuations included). Valuations are arbitrary over
/// allocations: no monotonicity, externalities allowed.
pub fn gen_sprime(grid_size: usize, seed: u64) -> Result<SPrimeExample> {
    let goods = GoodsSet::letters(3)?;
    let set = enumerate_allocations(&goods, 3, 64)?;
    let subset: Vec<Alt> = SPRIME
        .iter()
        .map(|b| set.find(b).expect("listed allocations exist"))
        .collect();
    let maxima: Vec<Alt> = (0..3).map(|p| set.grand(p)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = [int(0), rat(1, 2), int(1), int(2)];
    let families = maxima
        .iter()
        .map(|&m| constant_maximum_grid(&mut rng, set.alternatives().len(), m, &values, grid_size, &[int(1)]))
        .collect();
    let instance = GameInstance::new(
        set.alternatives().clone(),
        GameInstance::default_players(3),
        families,
        HSpec::Zero,
        Some(maxima),
    )?;
    let strategy = Strategy::nearly_truth(set.alternatives(), subset.clone(), OffsetRule::zero(), FloorRule::Constant(int(0)))?;
    let profile = StrategyProfile::uniform(strategy, 3);
    Ok(SPrimeExample {
        example: AuctionExample {
            allocations: set,
            instance,
            profile,
        },
        subset: subset.into_iter().collect::<BTreeSet<_>>().into_iter().collect(),
    })
}

/// For one allocation outside the subset: which bidders' bids are pinned
/// by no-externality to a bid they already make inside the subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionRow {
    pub allocation: Alt,
    pub label: String,
    pub forced: Vec<bool>,
}

impl ExtensionRow {
    /// Some bidders' bids are forced and others' are not.
    pub fn asymmetric(&self) -> bool {
        self.forced.iter().any(|&f| f) && self.forced.iter().any(|&f| !f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionReport {
    pub rows: Vec<ExtensionRow>,
}

impl ExtensionReport {
    pub fn forced_count(&self) -> usize {
        self.rows.iter().filter(|r| r.forced.iter().any(|&f| f)).count()
    }

    pub fn asymmetric_count(&self) -> usize {
        self.rows.iter().filter(|r| r.asymmetric()).count()
    }

    pub fn row(&self, label: &str) -> Option<&ExtensionRow> {
        self.rows.iter().find(|r| r.label == label)
    }
}

/// Under no-externality, a bidder's bid on `x` equals its bid on any
/// allocation giving it the same bundle. Lists, for every allocation
/// outside `subset`, whose bids the subset already determines.
pub fn extension_report(set: &AllocationSet, subset: &[Alt]) -> ExtensionReport {
    let n = set.num_players();
    let reported: Vec<BTreeSet<Bundle>> = (0..n)
        .map(|p| subset.iter().map(|&a| set.allocation(a).bundle(p)).collect())
        .collect();
    let rows = set
        .alternatives()
        .iter()
        .filter(|a| !subset.contains(a))
        .map(|a| {
            let alloc = set.allocation(a);
            ExtensionRow {
                allocation: a,
                label: set.label_of(alloc),
                forced: (0..n).map(|p| reported[p].contains(&alloc.bundle(p))).collect(),
            }
        })
        .collect();
    ExtensionReport { rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ValueTable;

    #[test]
    fn allocation_counts() {
        let g1 = GoodsSet::letters(1).unwrap();
        assert_eq!(enumerate_allocations(&g1, 1, 256).unwrap().allocations().len(), 2);
        let g2 = GoodsSet::letters(2).unwrap();
        assert_eq!(enumerate_allocations(&g2, 2, 256).unwrap().allocations().len(), 9);
        let g3 = GoodsSet::letters(3).unwrap();
        assert_eq!(enumerate_allocations(&g3, 3, 256).unwrap().allocations().len(), 64);
    }

    #[test]
    fn cap_is_explicit() {
        let g = GoodsSet::letters(4).unwrap();
        assert_eq!(
            enumerate_allocations(&g, 4, DEFAULT_ALLOCATION_CAP).unwrap_err(),
            Error::TooManyAllocations { count: 625, cap: 256 }
        );
    }

    #[test]
    fn odometer_order_and_labels() {
        let g = GoodsSet::letters(2).unwrap();
        let set = enumerate_allocations(&g, 2, 256).unwrap();
        let labels: Vec<&str> = set.alternatives().labels().iter().map(String::as_str).collect();
        assert_eq!(labels[0], "(-,-)");
        assert_eq!(labels[1], "(b,-)");
        assert_eq!(labels[3], "(a,-)");
        assert_eq!(labels[4], "(ab,-)");
        assert_eq!(labels[8], "(-,ab)");
    }

    #[test]
    fn zero_table_gives_zero_valuation() {
        let g = GoodsSet::letters(2).unwrap();
        let set = enumerate_allocations(&g, 2, 256).unwrap();
        let t = BundleTable::new(&g, vec![int(0); 4]).unwrap();
        let v = valuation_from_bundles(&set, 0, &t).unwrap();
        assert!(v.values().iter().all(Zero::is_zero));
    }

    #[test]
    fn missing_bundle_is_reported() {
        let g = GoodsSet::letters(2).unwrap();
        let err = BundleTable::from_entries(&g, &[(0b01, int(1)), (0b11, int(2))]).unwrap_err();
        assert_eq!(err, Error::MissingBundle("b".into()));
    }

    #[test]
    fn monotonicity() {
        let g = GoodsSet::letters(2).unwrap();
        assert!(is_monotone(&BundleTable::new(&g, vec![int(0); 4]).unwrap()));
        let bad = BundleTable::new(&g, vec![int(0), int(2), int(0), int(1)]).unwrap();
        assert!(!is_monotone(&bad));
        let additive = BundleTable::additive(&g, &[int(1), rat(1, 2)]).unwrap();
        assert!(is_monotone(&additive));
        assert_eq!(additive.get(0b11), &rat(3, 2));
    }

    #[test]
    fn quasi_fields() {
        let g = GoodsSet::letters(2).unwrap();
        assert!(is_quasi_field(&BundleFamily::new([0, 0b11]), &g).is_ok());
        assert!(is_quasi_field(&BundleFamily::from_partition(&[0b01, 0b10]), &g).is_ok());
        let v = is_quasi_field(&BundleFamily::new([0, 0b01, 0b11]), &g).unwrap_err();
        assert_eq!(v.pair(), Some((0b01, 0b10)));
        assert_eq!(is_quasi_field(&BundleFamily::default(), &g).unwrap_err(), QuasiFieldViolation::Empty);
    }

    #[test]
    fn partition_field_has_four_bundles() {
        let f = BundleFamily::from_partition(&[0b01, 0b10]);
        assert_eq!(f.len(), 4);
    }

    #[test]
    fn grand_bundle_field_bids_only_on_grand_bundle() {
        let g = GoodsSet::letters(2).unwrap();
        let set = enumerate_allocations(&g, 2, 256).unwrap();
        let s = bundling_strategy(&set, 0, &BundleFamily::new([0, 0b11])).unwrap();
        let t = BundleTable::new(&g, vec![int(0), int(1), int(2), int(3)]).unwrap();
        let b = s.apply(&valuation_from_bundles(&set, 0, &t).unwrap()).unwrap();
        for (x, alloc) in set.allocations().iter().enumerate() {
            let expected = if alloc.bundle(0) == 0b11 { int(3) } else { int(0) };
            assert_eq!(b.at(Alt(x)), &expected);
        }
        assert!(bundling_strategy(&set, 0, &BundleFamily::new([0, 0b01, 0b11])).is_err());
    }

    #[test]
    fn power_set_field_is_truth() {
        let g = GoodsSet::letters(2).unwrap();
        let set = enumerate_allocations(&g, 2, 256).unwrap();
        let s = bundling_strategy(&set, 1, &BundleFamily::power_set(&g)).unwrap();
        let t = BundleTable::new(&g, vec![int(0), int(1), int(2), int(4)]).unwrap();
        let v = valuation_from_bundles(&set, 1, &t).unwrap();
        assert_eq!(s.apply(&v).unwrap().values(), v.values());
    }

    #[test]
    fn sprime_has_six_allocations_with_grand_bundles() {
        let ex = gen_sprime(3, 1).unwrap();
        assert_eq!(ex.subset.len(), 6);
        let labels: Vec<&str> = ex.subset.iter().map(|&a| ex.example.allocations.alternatives().label(a)).collect();
        for l in ["(abc,-,-)", "(-,abc,-)", "(-,-,abc)", "(ab,-,-)", "(-,bc,-)", "(-,-,-)"] {
            assert!(labels.contains(&l), "{l}");
        }
    }

    #[test]
    fn extension_forces_first_bidder_on_ab_c() {
        let ex = gen_sprime(2, 1).unwrap();
        let r = extension_report(&ex.example.allocations, &ex.subset);
        let row = r.row("(ab,c,-)").unwrap();
        assert!(row.forced[0] && !row.forced[1]);
        assert!(row.asymmetric());
    }
}
