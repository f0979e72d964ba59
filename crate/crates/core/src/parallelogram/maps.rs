//! Function representations on the non-negative rationals.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, is_non_negative, Rational};

/// A function that can be evaluated at (some) non-negative rationals.
pub trait PointMap {
    /// `None` where the function is not defined (off a sampling grid).
    fn value_at(&self, x: &Rational) -> Option<Rational>;
}

/// An open interval on which an [`IntervalMap`] is constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstPiece {
    pub lower: Rational,
    pub upper: Rational,
    pub value: Rational,
}

/// A function `R_+ -> R_+` that is the identity except on finitely many
/// open intervals (where it is constant) and finitely many points (where
/// it takes an arbitrary value).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntervalMap {
    pieces: Vec<ConstPiece>,
    points: BTreeMap<Rational, Rational>,
}

/// Bounds of `{x : h(x) = y}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreimageBounds {
    pub inf: Rational,
    pub inf_attained: bool,
    pub sup: Rational,
    pub sup_attained: bool,
}

impl IntervalMap {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn new(mut pieces: Vec<ConstPiece>, points: BTreeMap<Rational, Rational>) -> Result<Self> {
        pieces.sort_by(|a, b| a.lower.cmp(&b.lower));
        for p in &pieces {
            if !is_non_negative(&p.lower) || p.lower >= p.upper {
                return Err(Error::InvalidIntervalMap(format!(
                    "piece ({}, {}) is not a non-empty interval of R+",
                    p.lower, p.upper
                )));
            }
            if !is_non_negative(&p.value) {
                return Err(Error::InvalidIntervalMap(format!(
                    "negative value {} on ({}, {})",
                    p.value, p.lower, p.upper
                )));
            }
        }
        for w in pieces.windows(2) {
            if w[0].upper > w[1].lower {
                return Err(Error::InvalidIntervalMap(format!(
                    "pieces ({}, {}) and ({}, {}) overlap",
                    w[0].lower, w[0].upper, w[1].lower, w[1].upper
                )));
            }
        }
        for (x, y) in &points {
            if !is_non_negative(x) || !is_non_negative(y) {
                return Err(Error::InvalidIntervalMap(format!(
                    "point {x} -> {y} leaves R+"
                )));
            }
        }
        Ok(Self { pieces, points })
    }

    pub fn pieces(&self) -> &[ConstPiece] {
        &self.pieces
    }

    pub fn points(&self) -> &BTreeMap<Rational, Rational> {
        &self.points
    }

    /// Overrides the value at a single point.
    pub fn with_point(mut self, x: Rational, y: Rational) -> Self {
        self.points.insert(x, y);
        self
    }

    fn piece_containing(&self, x: &Rational) -> Option<&ConstPiece> {
        let idx = self.pieces.partition_point(|p| p.lower < *x);
        let p = self.pieces.get(idx.checked_sub(1)?)?;
        (*x < p.upper).then_some(p)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        if let Some(y) = self.points.get(x) {
            return y.clone();
        }
        match self.piece_containing(x) {
            Some(p) => p.value.clone(),
            None => x.clone(),
        }
    }

    /// Every point where the map may change behaviour, plus every value it
    /// takes off the identity.
    pub fn critical_points(&self) -> BTreeSet<Rational> {
        let mut out = BTreeSet::new();
        for p in &self.pieces {
            out.insert(p.lower.clone());
            out.insert(p.upper.clone());
            out.insert(p.value.clone());
        }
        for (x, y) in &self.points {
            out.insert(x.clone());
            out.insert(y.clone());
        }
        out
    }

    /// Locations (not values) where behaviour can change.
    fn breakpoints(&self) -> BTreeSet<Rational> {
        let mut out = BTreeSet::new();
        for p in &self.pieces {
            out.insert(p.lower.clone());
            out.insert(p.upper.clone());
        }
        out.extend(self.points.keys().cloned());
        out
    }

    /// Whether `h(x) = c` for every `x` in the open interval `(lo, hi)`.
    pub fn constant_on(&self, lo: &Rational, hi: &Rational, c: &Rational) -> bool {
        let mut cuts: Vec<Rational> = vec![lo.clone()];
        cuts.extend(
            self.breakpoints()
                .into_iter()
                .filter(|x| x > lo && x < hi),
        );
        cuts.push(hi.clone());
        for x in &cuts[1..cuts.len() - 1] {
            if self.eval(x) != *c {
                return false;
            }
        }
        // between cuts the map is either one constant or the identity
        cuts.windows(2).all(|w| {
            let (a, b) = interior_samples(&w[0], &w[1]);
            self.eval(&a) == *c && self.eval(&b) == *c
        })
    }

    /// Bounds of the preimage of `y`, or `None` if `y` is never attained.
    pub fn preimage_bounds(&self, y: &Rational) -> Option<PreimageBounds> {
        let mut inf: Option<Rational> = None;
        let mut sup: Option<Rational> = None;
        let mut take = |lo: &Rational, hi: &Rational| {
            if inf.as_ref().is_none_or(|i| lo < i) {
                inf = Some(lo.clone());
            }
            if sup.as_ref().is_none_or(|s| hi > s) {
                sup = Some(hi.clone());
            }
        };
        for p in self.pieces.iter().filter(|p| p.value == *y) {
            take(&p.lower, &p.upper);
        }
        for (x, _) in self.points.iter().filter(|(_, v)| *v == y) {
            take(x, x);
        }
        if self.eval(y) == *y {
            take(y, y);
        }
        let inf = inf?;
        let sup = sup?;
        Some(PreimageBounds {
            inf_attained: self.eval(&inf) == *y,
            sup_attained: self.eval(&sup) == *y,
            inf,
            sup,
        })
    }
}

impl PointMap for IntervalMap {
    fn value_at(&self, x: &Rational) -> Option<Rational> {
        Some(self.eval(x))
    }
}

/// Two distinct points strictly inside `(a, b)`.
pub(crate) fn interior_samples(a: &Rational, b: &Rational) -> (Rational, Rational) {
    let third = (b - a) / int(3);
    (a + &third, a + &third + &third)
}

/// A function known only on a finite, strictly increasing grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledFunction {
    grid: Vec<Rational>,
    values: Vec<Rational>,
}

impl SampledFunction {
    pub fn new(grid: Vec<Rational>, values: Vec<Rational>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::InvalidSampledFunction(format!(
                "{} grid points but {} values",
                grid.len(),
                values.len()
            )));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSampledFunction(
                "grid must be strictly increasing".into(),
            ));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` on `grid`.
    pub fn sample<F: PointMap + ?Sized>(f: &F, grid: &[Rational]) -> Result<Self> {
        let values = grid
            .iter()
            .map(|x| {
                f.value_at(x).ok_or_else(|| {
                    Error::InvalidSampledFunction(format!("source undefined at {x}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(grid.to_vec(), values)
    }

    pub fn grid(&self) -> &[Rational] {
        &self.grid
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.grid.iter().zip(&self.values)
    }
}

impl PointMap for SampledFunction {
    fn value_at(&self, x: &Rational) -> Option<Rational> {
        self.grid
            .binary_search(x)
            .ok()
            .map(|i| self.values[i].clone())
    }
}

/// A grid that refines every critical point of the given maps: the points
/// themselves, `0`, two interior samples between consecutive points, and
/// two points past the largest. `extra` points are merged in first.
pub fn refining_grid(maps: &[&IntervalMap], extra: &[Rational]) -> Vec<Rational> {
    let mut points: BTreeSet<Rational> = BTreeSet::new();
    points.insert(Rational::zero());
    for m in maps {
        points.extend(m.critical_points());
    }
    points.extend(extra.iter().filter(|x| is_non_negative(x)).cloned());
    let base: Vec<Rational> = points.iter().cloned().collect();
    for w in base.windows(2) {
        let (a, b) = interior_samples(&w[0], &w[1]);
        points.insert(a);
        points.insert(b);
    }
    if let Some(last) = base.last() {
        points.insert(last + Rational::one());
        points.insert(last + int(2));
    }
    points.into_iter().collect()
}

/// `{0, step, 2·step, …}` up to and including `limit`.
pub fn uniform_grid(step: &Rational, limit: &Rational) -> Result<Vec<Rational>> {
    if *step <= Rational::zero() {
        return Err(Error::InvalidParameter(format!("grid step {step} must be positive")));
    }
    let mut out = Vec::new();
    let mut x = Rational::zero();
    while x <= *limit {
        out.push(x.clone());
        x += step;
    }
    Ok(out)
}
