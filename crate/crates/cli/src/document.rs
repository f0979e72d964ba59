//! The TOML instance format.
//!
//! Every number is an exact rational written `"p/q"` or as an integer
//! string. Valuation and announcement maps list values by alternative
//! label; unlisted alternatives are `0`. With an `[auction]` section the
//! alternatives are the enumerated allocations (labels such as
//! `"(ab,-)"`), families may be given as bundle tables, and bundles are
//! written as good labels joined by `+` (`"-"` is the empty bundle).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use vcglab::auctions::{
    bundling_strategy_unchecked, enumerate_allocations, valuation_from_bundles, AllocationSet, Bundle,
    BundleFamily, BundleTable, GoodsSet,
};
use vcglab::rational::zero;
use vcglab::strategy::{FloorRule, OffMaximaRule, OffsetRule};
use vcglab::{
    format_rational, parse_rational, Alt, AlternativeSet, Announcement, GameInstance, HSpec, Rational, Strategy,
    StrategyProfile, Valuation, ValueTable,
};

use crate::error::CliError;

/// Optional analyses `check` runs after the equilibrium decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckName {
    Equilibrium,
    NearTruth,
    Lemmas,
    CrossCheck,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct InstanceDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alternatives: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub players: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<HDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub auction: Option<AuctionDoc>,
    #[serde(default, rename = "family")]
    pub families: Vec<FamilyDoc>,
    /// One per player, or a single entry every player uses.
    #[serde(default, rename = "strategy")]
    pub strategies: Vec<StrategyDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct HDoc {
    pub kind: HKind,
    /// Per-player constants for `kind = "constant"`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constants: Vec<String>,
    /// The alternative for `kind = "opponents-at"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alternative: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HKind {
    Zero,
    Constant,
    Clarke,
    OpponentsAt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct AuctionDoc {
    pub goods: Vec<String>,
    pub bidders: usize,
}

pub type ValueMap = BTreeMap<String, String>;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FamilyDoc {
    /// The alternative every valuation of this player maximises.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maximum: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub valuations: Vec<ValueMap>,
    /// Bundle tables (auction instances only), appended after `valuations`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bundles: Vec<ValueMap>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    Truth,
    Shifted,
    NearlyTruth,
    Scaling,
    Table,
    Bundling,
    MaximaPlusTen,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct TableEntryDoc {
    pub valuation: ValueMap,
    pub announcement: ValueMap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct StrategyDoc {
    pub kind: StrategyKind,
    /// Constant shift (shifted, nearly-truth); default `0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<String>,
    /// Per-alternative extra term (shifted).
    #[serde(default, skip_serializing_if = "ValueMap::is_empty")]
    pub skew: ValueMap,
    /// Truthful alternatives (nearly-truth).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subset: Vec<String>,
    /// `"min"` (default) or a constant (nearly-truth).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor: Option<String>,
    /// Scaling factor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub entries: Vec<TableEntryDoc>,
    /// Reported bundles (bundling).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub family: Vec<String>,
    /// Maxima (maxima-plus-ten).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub maxima: Vec<String>,
    /// `"clamp"` (default), a constant, or a map by alternative
    /// (maxima-plus-ten).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub off: Option<OffDoc>,
}

impl StrategyDoc {
    pub fn of_kind(kind: StrategyKind) -> Self {
        Self {
            kind,
            offset: None,
            skew: ValueMap::new(),
            subset: Vec::new(),
            floor: None,
            factor: None,
            entries: Vec::new(),
            family: Vec::new(),
            maxima: Vec::new(),
            off: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OffDoc {
    Value(String),
    PerAlternative(ValueMap),
}

/// A parsed, validated instance.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub name: Option<String>,
    pub instance: GameInstance,
    pub profile: StrategyProfile,
    pub allocations: Option<AllocationSet>,
    pub checks: Vec<CheckName>,
}

fn rational(text: &str, place: &str) -> Result<Rational, CliError> {
    parse_rational(text).map_err(|e| CliError::input(place, e))
}

fn alternative(alts: &AlternativeSet, label: &str, place: &str) -> Result<Alt, CliError> {
    alts.lookup(label).map_err(|e| CliError::input(place, e))
}

fn value_vector(alts: &AlternativeSet, map: &ValueMap, place: &str) -> Result<Vec<Rational>, CliError> {
    let mut out = vec![zero(); alts.len()];
    for (label, text) in map {
        let a = alternative(alts, label, place)?;
        out[a.0] = rational(text, &format!("{place}, {label}"))?;
    }
    Ok(out)
}

/// `-` or good labels joined by `+`.
pub fn parse_bundle(goods: &GoodsSet, text: &str, place: &str) -> Result<Bundle, CliError> {
    if text == "-" {
        return Ok(0);
    }
    let parts: Vec<&str> = text.split('+').map(str::trim).collect();
    goods.bundle(&parts).map_err(|e| CliError::input(place, e))
}

pub fn bundle_key(goods: &GoodsSet, bundle: Bundle) -> String {
    if bundle == 0 {
        return "-".into();
    }
    (0..goods.len())
        .filter(|g| bundle & (1 << g) != 0)
        .map(|g| goods.labels()[g].as_str())
        .collect::<Vec<_>>()
        .join("+")
}

/// Parses and validates a document. Instances with more than
/// `max_alternatives` alternatives are refused.
pub fn parse_instance(text: &str, max_alternatives: usize) -> Result<Loaded, CliError> {
    let doc: InstanceDoc = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    load(&doc, max_alternatives)
}

pub fn load(doc: &InstanceDoc, max_alternatives: usize) -> Result<Loaded, CliError> {
    let allocations = match &doc.auction {
        Some(a) => {
            let goods = GoodsSet::new(a.goods.clone()).map_err(|e| CliError::input("auction", e))?;
            Some(enumerate_allocations(&goods, a.bidders, max_alternatives).map_err(|e| CliError::input("auction", e))?)
        }
        None => None,
    };
    let alts = match &allocations {
        Some(set) => {
            let derived = set.alternatives().clone();
            if !doc.alternatives.is_empty() && doc.alternatives != derived.labels() {
                return Err(CliError::semantic(
                    "alternatives",
                    "listed alternatives differ from the enumerated allocations",
                ));
            }
            derived
        }
        None => AlternativeSet::new(doc.alternatives.clone()).map_err(|e| CliError::input("alternatives", e))?,
    };
    if alts.len() > max_alternatives {
        return Err(CliError::semantic(
            "alternatives",
            format!("{} alternatives exceed --max-alternatives {max_alternatives}", alts.len()),
        ));
    }

    let n = doc.families.len();
    if n == 0 {
        return Err(CliError::semantic("family", "at least one [[family]] is required"));
    }
    let players = if doc.players.is_empty() {
        GameInstance::default_players(n)
    } else {
        doc.players.clone()
    };

    let mut families = Vec::with_capacity(n);
    let mut maxima = Vec::with_capacity(n);
    for (i, f) in doc.families.iter().enumerate() {
        let place = format!("family {}", i + 1);
        let mut grid = Vec::new();
        for (k, map) in f.valuations.iter().enumerate() {
            grid.push(Valuation::new(value_vector(&alts, map, &format!("{place}, valuation {}", k + 1))?));
        }
        if !f.bundles.is_empty() {
            let set = allocations
                .as_ref()
                .ok_or_else(|| CliError::semantic(&place, "bundle tables need an [auction] section"))?;
            for (k, map) in f.bundles.iter().enumerate() {
                let here = format!("{place}, bundle table {}", k + 1);
                let goods = set.goods();
                let mut values = vec![zero(); 1 << goods.len()];
                for (key, text) in map {
                    values[parse_bundle(goods, key, &here)? as usize] = rational(text, &format!("{here}, {key}"))?;
                }
                let table = BundleTable::new(goods, values).map_err(|e| CliError::input(&here, e))?;
                grid.push(valuation_from_bundles(set, i, &table).map_err(|e| CliError::input(&here, e))?);
            }
        }
        families.push(grid);
        maxima.push(f.maximum.as_deref().map(|m| alternative(&alts, m, &place)).transpose()?);
    }
    let maxima = if maxima.iter().all(Option::is_some) {
        Some(maxima.into_iter().map(Option::unwrap).collect())
    } else if maxima.iter().all(Option::is_none) {
        None
    } else {
        return Err(CliError::semantic("family", "give a maximum for every family or for none"));
    };

    let h = match &doc.h {
        None => HSpec::Zero,
        Some(h) => match h.kind {
            HKind::Zero => HSpec::Zero,
            HKind::Clarke => HSpec::Clarke,
            HKind::Constant => HSpec::Constant(
                h.constants
                    .iter()
                    .map(|c| rational(c, "h"))
                    .collect::<Result<_, _>>()?,
            ),
            HKind::OpponentsAt => {
                let label = h
                    .alternative
                    .as_deref()
                    .ok_or_else(|| CliError::semantic("h", "opponents-at needs an alternative"))?;
                HSpec::OpponentsAt(alternative(&alts, label, "h")?)
            }
        },
    };

    let instance =
        GameInstance::new(alts.clone(), players, families, h, maxima).map_err(|e| CliError::input("instance", e))?;

    let strategies = match doc.strategies.len() {
        0 => return Err(CliError::semantic("strategy", "at least one [[strategy]] is required")),
        1 => (0..n)
            .map(|i| strategy(&doc.strategies[0], &alts, allocations.as_ref(), i, "strategy 1"))
            .collect::<Result<Vec<_>, _>>()?,
        k if k == n => doc
            .strategies
            .iter()
            .enumerate()
            .map(|(i, s)| strategy(s, &alts, allocations.as_ref(), i, &format!("strategy {}", i + 1)))
            .collect::<Result<Vec<_>, _>>()?,
        k => {
            return Err(CliError::semantic(
                "strategy",
                format!("{k} strategies for {n} players; give one or one per player"),
            ))
        }
    };
    let profile = StrategyProfile::new(strategies);
    profile
        .validate(instance.alternatives(), n)
        .map_err(|e| CliError::input("strategy", e))?;
    // announcements must exist for every grid valuation
    for (i, grid) in instance.families().iter().enumerate() {
        for (k, v) in grid.iter().enumerate() {
            profile
                .get(i)
                .apply(v)
                .map_err(|e| CliError::input(&format!("strategy {} on valuation {}", i + 1, k + 1), e))?;
        }
    }

    let mut checks = doc.checks.clone();
    checks.retain(|c| *c != CheckName::Equilibrium);
    Ok(Loaded {
        name: doc.name.clone(),
        instance,
        profile,
        allocations,
        checks,
    })
}

fn strategy(
    doc: &StrategyDoc,
    alts: &AlternativeSet,
    allocations: Option<&AllocationSet>,
    player: usize,
    place: &str,
) -> Result<Strategy, CliError> {
    let offset = || -> Result<OffsetRule, CliError> {
        Ok(match &doc.offset {
            None => OffsetRule::zero(),
            Some(t) => OffsetRule::Constant(rational(t, place)?),
        })
    };
    let labels = |list: &[String]| -> Result<Vec<Alt>, CliError> {
        list.iter().map(|l| alternative(alts, l, place)).collect()
    };
    let s = match doc.kind {
        StrategyKind::Truth => Strategy::Truth,
        StrategyKind::Shifted => Strategy::ShiftedTruth {
            offset: offset()?,
            skew: if doc.skew.is_empty() {
                Vec::new()
            } else {
                value_vector(alts, &doc.skew, place)?
            },
        },
        StrategyKind::NearlyTruth => {
            let floor = match doc.floor.as_deref() {
                None | Some("min") => FloorRule::MinOverSubset,
                Some(t) => FloorRule::Constant(rational(t, place)?),
            };
            Strategy::nearly_truth(alts, labels(&doc.subset)?, offset()?, floor).map_err(|e| CliError::input(place, e))?
        }
        StrategyKind::Scaling => {
            let factor = doc
                .factor
                .as_deref()
                .ok_or_else(|| CliError::semantic(place, "scaling needs a factor"))?;
            Strategy::Scaling(rational(factor, place)?)
        }
        StrategyKind::Table => Strategy::Table(
            doc.entries
                .iter()
                .enumerate()
                .map(|(k, e)| {
                    let here = format!("{place}, entry {}", k + 1);
                    Ok((
                        value_vector(alts, &e.valuation, &here)?,
                        Announcement::new(value_vector(alts, &e.announcement, &here)?),
                    ))
                })
                .collect::<Result<_, CliError>>()?,
        ),
        StrategyKind::Bundling => {
            let set = allocations.ok_or_else(|| CliError::semantic(place, "bundling needs an [auction] section"))?;
            let members = doc
                .family
                .iter()
                .map(|b| parse_bundle(set.goods(), b, place))
                .collect::<Result<Vec<_>, _>>()?;
            bundling_strategy_unchecked(set, player, &BundleFamily::new(members)).map_err(|e| CliError::input(place, e))?
        }
        StrategyKind::MaximaPlusTen => {
            let off = match &doc.off {
                None => OffMaximaRule::ClampedValue,
                Some(OffDoc::Value(t)) if t == "clamp" => OffMaximaRule::ClampedValue,
                Some(OffDoc::Value(t)) => OffMaximaRule::Constant(rational(t, place)?),
                Some(OffDoc::PerAlternative(map)) => OffMaximaRule::PerAlternative(value_vector(alts, map, place)?),
            };
            vcglab::strategy::make_maxima_plus_ten(labels(&doc.maxima)?, off).map_err(|e| CliError::input(place, e))?
        }
    };
    Ok(s)
}

/// Non-zero entries by label.
pub fn value_map<T: ValueTable>(alts: &AlternativeSet, values: &T) -> ValueMap {
    values
        .values()
        .iter()
        .enumerate()
        .filter(|(_, x)| **x != zero())
        .map(|(a, x)| (alts.label(Alt(a)).to_string(), format_rational(x)))
        .collect()
}

fn strategy_doc(s: &Strategy, alts: &AlternativeSet, goods: Option<&GoodsSet>) -> Result<StrategyDoc, CliError> {
    let labels = |list: &[Alt]| list.iter().map(|a| alts.label(*a).to_string()).collect::<Vec<_>>();
    let offset = |rule: &OffsetRule| match rule {
        OffsetRule::Constant(c) if *c == zero() => Ok(None),
        OffsetRule::Constant(c) => Ok(Some(format_rational(c))),
        OffsetRule::PerValuation { .. } => Err(CliError::semantic(
            "strategy",
            "per-valuation offsets have no file representation",
        )),
    };
    let mut doc;
    match s {
        Strategy::Truth => doc = StrategyDoc::of_kind(StrategyKind::Truth),
        Strategy::ShiftedTruth { offset: o, skew } => {
            doc = StrategyDoc::of_kind(StrategyKind::Shifted);
            doc.offset = offset(o)?;
            if !skew.is_empty() {
                doc.skew = value_map(alts, &Announcement::new(skew.clone()));
            }
        }
        Strategy::NearlyTruth { subset, offset: o, floor } => {
            doc = StrategyDoc::of_kind(StrategyKind::NearlyTruth);
            doc.subset = labels(subset);
            doc.offset = offset(o)?;
            doc.floor = Some(match floor {
                FloorRule::MinOverSubset => "min".into(),
                FloorRule::Constant(c) => format_rational(c),
            });
        }
        Strategy::Scaling(f) => {
            doc = StrategyDoc::of_kind(StrategyKind::Scaling);
            doc.factor = Some(format_rational(f));
        }
        Strategy::Table(entries) => {
            doc = StrategyDoc::of_kind(StrategyKind::Table);
            doc.entries = entries
                .iter()
                .map(|(v, b)| TableEntryDoc {
                    valuation: value_map(alts, &Valuation::new(v.clone())),
                    announcement: value_map(alts, b),
                })
                .collect();
        }
        Strategy::Bundling(r) => {
            let goods = goods.ok_or_else(|| CliError::semantic("strategy", "bundling outside an auction"))?;
            doc = StrategyDoc::of_kind(StrategyKind::Bundling);
            doc.family = r.family.iter().map(|b| bundle_key(goods, *b)).collect();
        }
        Strategy::MaximaPlusTen { maxima, off } => {
            doc = StrategyDoc::of_kind(StrategyKind::MaximaPlusTen);
            doc.maxima = labels(maxima);
            doc.off = Some(match off {
                OffMaximaRule::ClampedValue => OffDoc::Value("clamp".into()),
                OffMaximaRule::Constant(c) => OffDoc::Value(format_rational(c)),
                OffMaximaRule::PerAlternative(v) => OffDoc::PerAlternative(value_map(alts, &Announcement::new(v.clone()))),
            });
        }
    }
    Ok(doc)
}

/// The document describing `instance` and `profile`; a uniform profile
/// is written as a single strategy.
pub fn to_document(
    name: &str,
    instance: &GameInstance,
    profile: &StrategyProfile,
    allocations: Option<&AllocationSet>,
    checks: Vec<CheckName>,
) -> Result<InstanceDoc, CliError> {
    let alts = instance.alternatives();
    let families = instance
        .families()
        .iter()
        .enumerate()
        .map(|(i, grid)| FamilyDoc {
            maximum: instance.maxima().map(|m| alts.label(m[i]).to_string()),
            valuations: grid.iter().map(|v| value_map(alts, v)).collect(),
            bundles: Vec::new(),
        })
        .collect();
    let goods = allocations.map(|s| s.goods());
    let uniform = profile.strategies().windows(2).all(|w| w[0] == w[1]);
    let strategies = if uniform {
        vec![strategy_doc(profile.get(0), alts, goods)?]
    } else {
        profile
            .strategies()
            .iter()
            .map(|s| strategy_doc(s, alts, goods))
            .collect::<Result<_, _>>()?
    };
    let h = match instance.h() {
        HSpec::Zero => None,
        HSpec::Clarke => Some(HDoc {
            kind: HKind::Clarke,
            constants: Vec::new(),
            alternative: None,
        }),
        HSpec::Constant(c) => Some(HDoc {
            kind: HKind::Constant,
            constants: c.iter().map(format_rational).collect(),
            alternative: None,
        }),
        HSpec::OpponentsAt(a) => Some(HDoc {
            kind: HKind::OpponentsAt,
            constants: Vec::new(),
            alternative: Some(alts.label(*a).to_string()),
        }),
    };
    Ok(InstanceDoc {
        name: Some(name.to_string()),
        alternatives: alts.labels().to_vec(),
        players: instance.players().to_vec(),
        checks,
        h,
        auction: allocations.map(|s| AuctionDoc {
            goods: s.goods().labels().to_vec(),
            bidders: s.num_players(),
        }),
        families,
        strategies,
    })
}

pub fn write_document(doc: &InstanceDoc) -> Result<String, CliError> {
    let body = toml::to_string(doc).map_err(|e| CliError::Output(e.to_string()))?;
    Ok(format!("# rationals are \"p/q\"; unlisted alternatives are 0\n{body}"))
}
