//! Alternatives, valuations, announcements, welfare and VCG utility.

use std::collections::HashMap;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{is_non_negative, Rational};

/// Index of an alternative inside its [`AlternativeSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Alt(pub usize);

/// Index of a player inside a [`GameInstance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Player(pub usize);

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Ordered, non-empty set of distinct alternative labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlternativeSet {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl AlternativeSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyAlternatives);
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::DuplicateAlternative(label.clone()));
            }
        }
        Ok(Self { labels, index })
    }

    /// `a1, …, an`.
    pub fn numbered(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|k| format!("a{k}")))
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

    pub fn label(&self, a: Alt) -> &str {
        &self.labels[a.0]
    }

    pub fn lookup(&self, label: &str) -> Result<Alt> {
        self.index
            .get(label)
            .map(|&i| Alt(i))
            .ok_or_else(|| Error::UnknownAlternative(label.to_string()))
    }

    pub fn check(&self, a: Alt) -> Result<Alt> {
        if a.0 < self.len() {
            Ok(a)
        } else {
            Err(Error::AlternativeOutOfRange {
                index: a.0,
                len: self.len(),
            })
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Alt> + '_ {
        (0..self.len()).map(Alt)
    }
}

/// Anything that assigns a rational to every alternative.
pub trait ValueTable {
    fn values(&self) -> &[Rational];

    fn at(&self, a: Alt) -> &Rational {
        &self.values()[a.0]
    }
}

impl<T: ValueTable + ?Sized> ValueTable for &T {
    fn values(&self) -> &[Rational] {
        (**self).values()
    }
}

/// A player's true valuation `v_i : A -> Q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Valuation {
    values: Vec<Rational>,
    non_negative: bool,
}

impl Valuation {
    /// An unrestricted valuation.
    pub fn new(values: Vec<Rational>) -> Self {
        Self {
            values,
            non_negative: false,
        }
    }

    /// A valuation in `Q_+^A`; rejects negative entries.
    pub fn non_negative(alternatives: &AlternativeSet, values: Vec<Rational>) -> Result<Self> {
        if values.len() != alternatives.len() {
            return Err(Error::LengthMismatch {
                expected: alternatives.len(),
                found: values.len(),
            });
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !is_non_negative(v)) {
            return Err(Error::NegativeValue {
                alternative: alternatives.labels()[i].clone(),
                value: Box::new(v.clone()),
            });
        }
        Ok(Self {
            values,
            non_negative: true,
        })
    }

    /// The Z-valuation: `height` at `peak`, zero elsewhere.
    pub fn z(num_alternatives: usize, peak: Alt, height: Rational) -> Self {
        let mut values = vec![Rational::zero(); num_alternatives];
        values[peak.0] = height;
        Self {
            values,
            non_negative: true,
        }
    }

    pub fn is_non_negative(&self) -> bool {
        self.non_negative
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest value.
    pub fn max_value(&self) -> Rational {
        self.values
            .iter()
            .max()
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// `true` when `a` attains the maximum value.
    pub fn is_maximum(&self, a: Alt) -> bool {
        self.values.iter().all(|v| v <= &self.values[a.0])
    }

    /// The unique strict maximiser, if one exists.
    pub fn strict_maximum(&self) -> Option<Alt> {
        let max = self.max_value();
        let mut at = self.values.iter().enumerate().filter(|(_, v)| **v == max);
        let (first, _) = at.next()?;
        match at.next() {
            Some(_) => None,
            None => Some(Alt(first)),
        }
    }

    /// When this is a Z-valuation (exactly one positive entry, zero
    /// elsewhere), its peak and height.
    pub fn as_z(&self) -> Option<(Alt, Rational)> {
        let mut peak = None;
        for (i, v) in self.values.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            if *v < Rational::zero() || peak.is_some() {
                return None;
            }
            peak = Some((Alt(i), v.clone()));
        }
        peak
    }
}

impl ValueTable for Valuation {
    fn values(&self) -> &[Rational] {
        &self.values
    }
}

/// A reported valuation `b_i(v_i)`. Negative values are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Announcement {
    values: Vec<Rational>,
}

impl Announcement {
    pub fn new(values: Vec<Rational>) -> Self {
        Self { values }
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.values
    }
}

impl ValueTable for Announcement {
    fn values(&self) -> &[Rational] {
        &self.values
    }
}

impl From<&Valuation> for Announcement {
    fn from(v: &Valuation) -> Self {
        Self {
            values: v.values.clone(),
        }
    }
}

/// A total order on alternatives used to break welfare ties. Realises
/// one social-welfare maximiser.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriorityOrder {
    order: Vec<Alt>,
    rank: Vec<usize>,
}

impl PriorityOrder {
    pub fn new(alternatives: &AlternativeSet, order: Vec<Alt>) -> Result<Self> {
        if order.len() != alternatives.len() {
            return Err(Error::LengthMismatch {
                expected: alternatives.len(),
                found: order.len(),
            });
        }
        let mut rank = vec![usize::MAX; order.len()];
        for (pos, a) in order.iter().enumerate() {
            alternatives.check(*a)?;
            if rank[a.0] != usize::MAX {
                return Err(Error::DuplicateAlternative(
                    alternatives.label(*a).to_string(),
                ));
            }
            rank[a.0] = pos;
        }
        Ok(Self { order, rank })
    }

    /// Prefers lower indices.
    pub fn natural(alternatives: &AlternativeSet) -> Self {
        let order: Vec<Alt> = alternatives.iter().collect();
        let rank = (0..order.len()).collect();
        Self { order, rank }
    }

    pub fn order(&self) -> &[Alt] {
        &self.order
    }

    pub fn rank(&self, a: Alt) -> usize {
        self.rank[a.0]
    }
}

/// Either one concrete tie-break, or every tie-break at once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TieBreakPolicy {
    Priority(PriorityOrder),
    AllOrders,
}

/// The `h_i` term of a VCG game; depends only on the opponents'
/// announcements.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum HSpec {
    /// Simple VCG games.
    #[default]
    Zero,
    /// A per-player constant, indexed by player.
    Constant(Vec<Rational>),
    /// Clarke pivot: `max_a Σ_{j≠i} b_j(a)`.
    Clarke,
    /// `Σ_{j≠i} b_j(a0)` for a fixed alternative.
    OpponentsAt(Alt),
}

impl HSpec {
    pub fn eval<T: ValueTable>(&self, player: Player, opponents: &[T]) -> Rational {
        match self {
            HSpec::Zero => Rational::zero(),
            HSpec::Constant(per_player) => per_player
                .get(player.0)
                .cloned()
                .unwrap_or_else(Rational::zero),
            HSpec::Clarke => {
                let Some(first) = opponents.first() else {
                    return Rational::zero();
                };
                (0..first.values().len())
                    .map(|a| sum_at(opponents, Alt(a)))
                    .max()
                    .unwrap_or_else(Rational::zero)
            }
            HSpec::OpponentsAt(a) => sum_at(opponents, *a),
        }
    }
}

fn sum_at<T: ValueTable>(profile: &[T], a: Alt) -> Rational {
    profile
        .iter()
        .fold(Rational::zero(), |acc, t| acc + t.at(a))
}

/// `S(a) = Σ_i profile_i(a)`.
pub fn social_welfare<T: ValueTable>(profile: &[T], a: Alt) -> Result<Rational> {
    for t in profile {
        if a.0 >= t.values().len() {
            return Err(Error::AlternativeOutOfRange {
                index: a.0,
                len: t.values().len(),
            });
        }
    }
    Ok(sum_at(profile, a))
}

/// All alternatives maximising announced welfare, in index order.
pub fn welfare_maximizers<T: ValueTable>(alternatives: &AlternativeSet, profile: &[T]) -> Vec<Alt> {
    let totals: Vec<Rational> = alternatives.iter().map(|a| sum_at(profile, a)).collect();
    argmax_all(&totals)
}

pub(crate) fn argmax_all(totals: &[Rational]) -> Vec<Alt> {
    let Some(best) = totals.iter().max() else {
        return Vec::new();
    };
    totals
        .iter()
        .enumerate()
        .filter(|(_, t)| *t == best)
        .map(|(i, _)| Alt(i))
        .collect()
}

/// The maximiser that ranks first under `order`.
pub fn choose<T: ValueTable>(
    alternatives: &AlternativeSet,
    order: &PriorityOrder,
    profile: &[T],
) -> Alt {
    welfare_maximizers(alternatives, profile)
        .into_iter()
        .min_by_key(|a| order.rank(*a))
        .expect("alternative set is non-empty")
}

/// `U_i = v_i(M(b)) + Σ_{j≠i} b_j(M(b)) − h_i(b_{−i})`.
///
/// `announcements` holds one `(player, announcement)` pair per
/// participating player, `who` included.
pub fn utility(
    alternatives: &AlternativeSet,
    who: Player,
    true_valuation: &Valuation,
    announcements: &[(Player, &Announcement)],
    h: &HSpec,
    order: &PriorityOrder,
) -> Rational {
    let bids: Vec<&Announcement> = announcements.iter().map(|(_, b)| *b).collect();
    let chosen = choose(alternatives, order, &bids);
    let opponents: Vec<&Announcement> = announcements
        .iter()
        .filter(|(p, _)| *p != who)
        .map(|(_, b)| *b)
        .collect();
    true_valuation.at(chosen).clone() + sum_at(&opponents, chosen) - h.eval(who, &opponents)
}

/// A finite VCG game: alternatives, players, sampled valuation families,
/// the `h` specification and optional per-player maxima (the `R_i(a_i)`
/// families).
#[derive(Debug, Clone, PartialEq)]
pub struct GameInstance {
    alternatives: AlternativeSet,
    players: Vec<String>,
    families: Vec<Vec<Valuation>>,
    h: HSpec,
    maxima: Option<Vec<Alt>>,
}

impl GameInstance {
    pub fn new(
        alternatives: AlternativeSet,
        players: Vec<String>,
        families: Vec<Vec<Valuation>>,
        h: HSpec,
        maxima: Option<Vec<Alt>>,
    ) -> Result<Self> {
        let n = players.len();
        if families.len() != n {
            return Err(Error::PlayerCountMismatch {
                players: n,
                found: families.len(),
                what: "valuation grids",
            });
        }
        if let HSpec::Constant(c) = &h {
            if c.len() != n {
                return Err(Error::PlayerCountMismatch {
                    players: n,
                    found: c.len(),
                    what: "h constants",
                });
            }
        }
        if let HSpec::OpponentsAt(a) = &h {
            alternatives.check(*a)?;
        }
        for (i, grid) in families.iter().enumerate() {
            if grid.is_empty() {
                return Err(Error::EmptyGrid(i));
            }
            for v in grid {
                if v.len() != alternatives.len() {
                    return Err(Error::LengthMismatch {
                        expected: alternatives.len(),
                        found: v.len(),
                    });
                }
            }
        }
        if let Some(maxima) = &maxima {
            if maxima.len() != n {
                return Err(Error::PlayerCountMismatch {
                    players: n,
                    found: maxima.len(),
                    what: "maxima",
                });
            }
            for (i, (grid, &a)) in families.iter().zip(maxima).enumerate() {
                alternatives.check(a)?;
                for (k, v) in grid.iter().enumerate() {
                    if let Some((idx, value)) =
                        v.values().iter().enumerate().find(|(_, x)| !is_non_negative(x))
                    {
                        return Err(Error::NegativeValue {
                            alternative: alternatives.labels()[idx].clone(),
                            value: Box::new(value.clone()),
                        });
                    }
                    if !v.is_maximum(a) {
                        return Err(Error::NotAMaximum {
                            player: i,
                            index: k,
                            maximum: alternatives.label(a).to_string(),
                        });
                    }
                }
            }
        }
        Ok(Self {
            alternatives,
            players,
            families,
            h,
            maxima,
        })
    }

    pub fn alternatives(&self) -> &AlternativeSet {
        &self.alternatives
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn family(&self, p: Player) -> &[Valuation] {
        &self.families[p.0]
    }

    pub fn families(&self) -> &[Vec<Valuation>] {
        &self.families
    }

    pub fn h(&self) -> &HSpec {
        &self.h
    }

    pub fn maxima(&self) -> Option<&[Alt]> {
        self.maxima.as_deref()
    }

    /// Same instance with a different `h`.
    pub fn with_h(&self, h: HSpec) -> Result<Self> {
        Self::new(
            self.alternatives.clone(),
            self.players.clone(),
            self.families.clone(),
            h,
            self.maxima.clone(),
        )
    }

    /// Same instance with each player's grid replaced by a subset of it.
    pub fn restrict(&self, keep: &[Vec<usize>]) -> Result<Self> {
        let families = self
            .families
            .iter()
            .zip(keep)
            .map(|(grid, idx)| idx.iter().map(|&k| grid[k].clone()).collect())
            .collect();
        Self::new(
            self.alternatives.clone(),
            self.players.clone(),
            families,
            self.h.clone(),
            self.maxima.clone(),
        )
    }

    /// Player labels `1..=n`.
    pub fn default_players(n: usize) -> Vec<String> {
        (1..=n).map(|i| i.to_string()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn alts(n: usize) -> AlternativeSet {
        AlternativeSet::numbered(n).unwrap()
    }

    fn ann(v: &[i64]) -> Announcement {
        Announcement::new(v.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn alternative_set_rejects_empty_and_duplicates() {
        assert_eq!(
            AlternativeSet::new(Vec::<String>::new()).unwrap_err(),
            Error::EmptyAlternatives
        );
        assert!(matches!(
            AlternativeSet::new(["x", "y", "x"]).unwrap_err(),
            Error::DuplicateAlternative(_)
        ));
    }

    #[test]
    fn welfare_of_single_player() {
        let v = Valuation::new(vec![int(7)]);
        assert_eq!(social_welfare(&[&v], Alt(0)).unwrap(), int(7));
    }

    #[test]
    fn welfare_unknown_alternative() {
        let v = Valuation::new(vec![int(7)]);
        assert!(social_welfare(&[&v], Alt(3)).is_err());
        assert!(alts(2).lookup("zz").is_err());
    }

    #[test]
    fn all_zero_ties_everything() {
        let a = alts(3);
        let profile = [ann(&[0, 0, 0]), ann(&[0, 0, 0])];
        assert_eq!(welfare_maximizers(&a, &profile), vec![Alt(0), Alt(1), Alt(2)]);
    }

    #[test]
    fn choose_respects_priority() {
        let a = alts(3);
        let profile = [ann(&[1, 2, 2])];
        let order = PriorityOrder::new(&a, vec![Alt(2), Alt(1), Alt(0)]).unwrap();
        assert_eq!(choose(&a, &order, &profile), Alt(2));
        assert_eq!(choose(&a, &PriorityOrder::natural(&a), &profile), Alt(1));
    }

    #[test]
    fn lone_truthful_player_gets_own_maximum() {
        let a = alts(3);
        let v = Valuation::new(vec![int(1), rat(7, 2), int(2)]);
        let b = Announcement::from(&v);
        let u = utility(
            &a,
            Player(0),
            &v,
            &[(Player(0), &b)],
            &HSpec::Zero,
            &PriorityOrder::natural(&a),
        );
        assert_eq!(u, rat(7, 2));
    }

    #[test]
    fn h_shifts_utility_by_its_value() {
        let a = alts(3);
        let v0 = Valuation::new(vec![int(1), int(0), int(2)]);
        let b0 = Announcement::from(&v0);
        let b1 = ann(&[3, 1, 0]);
        let order = PriorityOrder::natural(&a);
        let bids = [(Player(0), &b0), (Player(1), &b1)];
        let plain = utility(&a, Player(0), &v0, &bids, &HSpec::Zero, &order);
        let clarke = utility(&a, Player(0), &v0, &bids, &HSpec::Clarke, &order);
        assert_eq!(plain - clarke, int(3));
    }

    #[test]
    fn instance_checks_maxima() {
        let a = alts(2);
        let v = Valuation::new(vec![int(1), int(2)]);
        let err = GameInstance::new(
            a,
            vec!["1".into()],
            vec![vec![v]],
            HSpec::Zero,
            Some(vec![Alt(0)]),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotAMaximum { .. }));
    }

    #[test]
    fn z_valuation_roundtrip() {
        let z = Valuation::z(4, Alt(2), rat(3, 2));
        assert_eq!(z.as_z(), Some((Alt(2), rat(3, 2))));
        assert_eq!(Valuation::new(vec![int(1), int(1)]).as_z(), None);
        assert_eq!(Valuation::new(vec![int(0), int(0)]).as_z(), None);
    }
}
