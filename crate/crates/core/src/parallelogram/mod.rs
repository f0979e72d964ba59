//! Segment decompositions of function pairs satisfying mean value
//! exclusion.
//!
//! A [`SignedDecomposition`] is a finite set of disjoint open segments
//! `(I⁻, I⁺)` with `0 < I⁻`, each carrying a sign, with opposite signs on
//! any two segments that share an endpoint. It determines a compatible
//! pair `(h1, h2)` up to one binary choice per shared endpoint:
//!
//! * off every closed segment both maps are the identity;
//! * inside a `-` segment `h1 = I⁻, h2 = I⁺`; inside a `+` segment
//!   `h1 = I⁺, h2 = I⁻`;
//! * an unshared endpoint takes the interior values of its segment;
//! * at a shared endpoint `t = I⁺ = J⁻`, the map that the left segment's
//!   sign sends to `I⁺` on the interior fixes `t`, and the other map takes
//!   `I⁻` or `J⁺` ([`EndpointChoice`]).
//!
//! [`decompose`] inverts [`build_compatible_pair`] for any pair given as
//! [`IntervalMap`]s.

mod maps;
mod mve;

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

pub use maps::{
    refining_grid, uniform_grid, ConstPiece, IntervalMap, PointMap, PreimageBounds,
    SampledFunction,
};
pub use mve::{check_mve, check_mve_sampled, MveClause, MveVerdict, MveViolation};

use crate::error::{Error, Result};
use crate::rational::{rat, Rational};

/// An open interval `(lower, upper)` with `0 < lower < upper`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Segment {
    lower: Rational,
    upper: Rational,
}

impl Segment {
    pub fn new(lower: Rational, upper: Rational) -> Result<Self> {
        if lower <= Rational::zero() {
            return Err(Error::InvalidDecomposition(format!(
                "segment ({lower}, {upper}) must have a positive lower endpoint"
            )));
        }
        if lower >= upper {
            return Err(Error::InvalidDecomposition(format!(
                "segment ({lower}, {upper}) is empty"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> &Rational {
        &self.lower
    }

    pub fn upper(&self) -> &Rational {
        &self.upper
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lower < x && x < &self.upper
    }

    pub fn closure_contains(&self, x: &Rational) -> bool {
        &self.lower <= x && x <= &self.upper
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lower, self.upper)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_int(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_int(x: i64) -> Result<Self> {
        match x {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(Error::InvalidDecomposition(format!("sign must be ±1, got {x}"))),
        }
    }
}

/// Value taken at a shared endpoint `t = I⁺ = J⁻` by the map that is not
/// pinned to `t`: `I⁻` or `J⁺`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EndpointChoice {
    Lower,
    Upper,
}

/// Disjoint signed segments plus one [`EndpointChoice`] per shared
/// endpoint (in increasing order of the endpoint).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedDecomposition {
    segments: Vec<Segment>,
    signs: Vec<Sign>,
    choices: Vec<EndpointChoice>,
}

impl SignedDecomposition {
    pub fn empty() -> Self {
        Self {
            segments: Vec::new(),
            signs: Vec::new(),
            choices: Vec::new(),
        }
    }

    /// Segments may be given in any order; they are sorted. `choices` is
    /// matched to shared endpoints in increasing order.
    pub fn new(
        segments: Vec<Segment>,
        signs: Vec<Sign>,
        choices: Vec<EndpointChoice>,
    ) -> Result<Self> {
        if segments.len() != signs.len() {
            return Err(Error::InvalidDecomposition(format!(
                "{} segments but {} signs",
                segments.len(),
                signs.len()
            )));
        }
        let mut paired: Vec<(Segment, Sign)> = segments.into_iter().zip(signs).collect();
        paired.sort_by(|a, b| a.0.lower.cmp(&b.0.lower));
        let mut shared = 0;
        for w in paired.windows(2) {
            let (left, ls) = &w[0];
            let (right, rs) = &w[1];
            if left.upper > right.lower {
                return Err(Error::InvalidDecomposition(format!(
                    "segments {left} and {right} overlap"
                )));
            }
            if left.upper == right.lower {
                if ls == rs {
                    return Err(Error::InvalidDecomposition(format!(
                        "segments {left} and {right} share an endpoint but have equal signs"
                    )));
                }
                shared += 1;
            }
        }
        if choices.len() != shared {
            return Err(Error::InvalidDecomposition(format!(
                "{shared} shared endpoints but {} endpoint choices",
                choices.len()
            )));
        }
        let (segments, signs) = paired.into_iter().unzip();
        Ok(Self {
            segments,
            signs,
            choices,
        })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    pub fn choices(&self) -> &[EndpointChoice] {
        &self.choices
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// `(index of left segment, endpoint choice)` for every shared endpoint.
    pub fn shared_endpoints(&self) -> Vec<(usize, EndpointChoice)> {
        let mut k = 0;
        let mut out = Vec::new();
        for i in 0..self.segments.len().saturating_sub(1) {
            if self.segments[i].upper == self.segments[i + 1].lower {
                out.push((i, self.choices[k]));
                k += 1;
            }
        }
        out
    }

    fn lower_shared(&self, i: usize) -> bool {
        i > 0 && self.segments[i - 1].upper == self.segments[i].lower
    }

    fn upper_shared(&self, i: usize) -> bool {
        i + 1 < self.segments.len() && self.segments[i].upper == self.segments[i + 1].lower
    }

    /// Whether `x` lies in the closure of some segment.
    pub fn covers(&self, x: &Rational) -> bool {
        self.segments.iter().any(|s| s.closure_contains(x))
    }

    /// Every segment endpoint, sorted.
    pub fn endpoints(&self) -> Vec<Rational> {
        let set: BTreeSet<Rational> = self
            .segments
            .iter()
            .flat_map(|s| [s.lower.clone(), s.upper.clone()])
            .collect();
        set.into_iter().collect()
    }
}

/// Interior values `(h1, h2)` on a signed segment.
fn interior_values(seg: &Segment, sign: Sign) -> (Rational, Rational) {
    match sign {
        Sign::Minus => (seg.lower.clone(), seg.upper.clone()),
        Sign::Plus => (seg.upper.clone(), seg.lower.clone()),
    }
}

/// Values `(h1, h2)` at the shared endpoint between `left` and `right`.
fn shared_values(
    left: &Segment,
    sign: Sign,
    right: &Segment,
    choice: EndpointChoice,
) -> (Rational, Rational) {
    let t = left.upper.clone();
    let free = match choice {
        EndpointChoice::Lower => left.lower.clone(),
        EndpointChoice::Upper => right.upper.clone(),
    };
    match sign {
        Sign::Plus => (t, free),
        Sign::Minus => (free, t),
    }
}

/// The unique compatible pair realising `d` and its endpoint choices.
pub fn build_compatible_pair(d: &SignedDecomposition) -> (IntervalMap, IntervalMap) {
    let mut p1 = Vec::with_capacity(d.len());
    let mut p2 = Vec::with_capacity(d.len());
    let mut pts1 = std::collections::BTreeMap::new();
    let mut pts2 = std::collections::BTreeMap::new();
    let shared: Vec<(usize, EndpointChoice)> = d.shared_endpoints();
    for (i, (seg, &sign)) in d.segments.iter().zip(&d.signs).enumerate() {
        let (v1, v2) = interior_values(seg, sign);
        p1.push(ConstPiece {
            lower: seg.lower.clone(),
            upper: seg.upper.clone(),
            value: v1.clone(),
        });
        p2.push(ConstPiece {
            lower: seg.lower.clone(),
            upper: seg.upper.clone(),
            value: v2.clone(),
        });
        if !d.lower_shared(i) {
            pts1.insert(seg.lower.clone(), v1.clone());
            pts2.insert(seg.lower.clone(), v2.clone());
        }
        if !d.upper_shared(i) {
            pts1.insert(seg.upper.clone(), v1);
            pts2.insert(seg.upper.clone(), v2);
        }
    }
    for (i, choice) in shared {
        let (v1, v2) = shared_values(&d.segments[i], d.signs[i], &d.segments[i + 1], choice);
        let t = d.segments[i].upper.clone();
        pts1.insert(t.clone(), v1);
        pts2.insert(t, v2);
    }
    (
        IntervalMap::new(p1, pts1).expect("decomposition segments are disjoint"),
        IntervalMap::new(p2, pts2).expect("decomposition segments are disjoint"),
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConditionStatus {
    Pass,
    /// No point of the decomposition falls under this condition.
    Vacuous,
    Fail { at: Rational, detail: String },
}

impl ConditionStatus {
    pub fn is_fail(&self) -> bool {
        matches!(self, ConditionStatus::Fail { .. })
    }
}

/// Outcome of each of the seven compatibility conditions, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibilityReport {
    pub conditions: Vec<ConditionStatus>,
    /// Whether the values at shared endpoints match the decomposition's
    /// recorded choices (conditions 6–7 only require membership).
    pub endpoint_choices_match: bool,
}

impl CompatibilityReport {
    pub fn all_pass(&self) -> bool {
        self.conditions.iter().all(|c| !c.is_fail())
    }

    /// First failing condition, numbered from 1.
    pub fn first_failure(&self) -> Option<(usize, &ConditionStatus)> {
        self.conditions
            .iter()
            .enumerate()
            .find(|(_, c)| c.is_fail())
            .map(|(i, c)| (i + 1, c))
    }
}

struct ConditionCheck {
    status: ConditionStatus,
}

impl ConditionCheck {
    fn new() -> Self {
        Self {
            status: ConditionStatus::Vacuous,
        }
    }

    fn record(&mut self, ok: bool, at: &Rational, detail: impl FnOnce() -> String) {
        if self.status.is_fail() {
            return;
        }
        self.status = if ok {
            ConditionStatus::Pass
        } else {
            ConditionStatus::Fail {
                at: at.clone(),
                detail: detail(),
            }
        };
    }
}

/// Checks conditions 1–7 for `(h1, h2)` against `d`: at every segment
/// endpoint, at every grid point of a grid refining all breakpoints of
/// both maps (points outside the closed segments for condition 1, points
/// inside for 2–3).
pub fn verify_compatibility(
    h1: &IntervalMap,
    h2: &IntervalMap,
    d: &SignedDecomposition,
) -> CompatibilityReport {
    let grid = refining_grid(&[h1, h2], &d.endpoints());
    let mut checks: Vec<ConditionCheck> = (0..7).map(|_| ConditionCheck::new()).collect();

    for x in grid.iter().filter(|x| !d.covers(x)) {
        let (a, b) = (h1.eval(x), h2.eval(x));
        checks[0].record(a == *x && b == *x, x, || {
            format!("h1({x}) = {a}, h2({x}) = {b}, expected identity")
        });
    }
    for (seg, &sign) in d.segments.iter().zip(&d.signs) {
        let (e1, e2) = interior_values(seg, sign);
        let slot = match sign {
            Sign::Minus => 1,
            Sign::Plus => 2,
        };
        for x in grid.iter().filter(|x| seg.contains(x)) {
            let (a, b) = (h1.eval(x), h2.eval(x));
            checks[slot].record(a == e1 && b == e2, x, || {
                format!("inside {seg}: h1 = {a}, h2 = {b}, expected {e1}, {e2}")
            });
        }
    }
    for (i, (seg, &sign)) in d.segments.iter().zip(&d.signs).enumerate() {
        let (e1, e2) = interior_values(seg, sign);
        if !d.lower_shared(i) {
            let x = &seg.lower;
            let (a, b) = (h1.eval(x), h2.eval(x));
            checks[3].record(a == e1 && b == e2, x, || {
                format!("lower end of {seg}: h1 = {a}, h2 = {b}, expected {e1}, {e2}")
            });
        }
        if !d.upper_shared(i) {
            let x = &seg.upper;
            let (a, b) = (h1.eval(x), h2.eval(x));
            checks[4].record(a == e1 && b == e2, x, || {
                format!("upper end of {seg}: h1 = {a}, h2 = {b}, expected {e1}, {e2}")
            });
        }
    }
    let mut choices_match = true;
    for (i, choice) in d.shared_endpoints() {
        let (left, right) = (&d.segments[i], &d.segments[i + 1]);
        let t = &left.upper;
        let (a, b) = (h1.eval(t), h2.eval(t));
        let allowed = |v: &Rational| *v == left.lower || *v == right.upper;
        let (slot, ok) = match d.signs[i] {
            Sign::Plus => (5, a == *t && allowed(&b)),
            Sign::Minus => (6, b == *t && allowed(&a)),
        };
        checks[slot].record(ok, t, || {
            format!("shared endpoint {t}: h1 = {a}, h2 = {b}")
        });
        let (e1, e2) = shared_values(left, d.signs[i], right, choice);
        choices_match &= a == e1 && b == e2;
    }
    CompatibilityReport {
        conditions: checks.into_iter().map(|c| c.status).collect(),
        endpoint_choices_match: choices_match,
    }
}

/// Why a pair could not be decomposed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecomposeError {
    /// The pair violates mean value exclusion on its refining grid.
    MveViolated(MveViolation),
    /// A candidate segment would start at zero.
    ZeroLowerEndpoint { upper: Rational },
    Overlap { first: Segment, second: Segment },
    /// Neither the "+" nor the "−" condition holds on a segment.
    Unsigned(Segment),
    /// Adjacent segments with equal signs.
    EqualSignsAtSharedEndpoint(Rational),
    /// The free map at a shared endpoint takes neither allowed value.
    BadSharedValue { at: Rational, found: Rational },
    /// Reconstructed decomposition does not reproduce the pair.
    NotCompatible(CompatibilityReport),
}

impl fmt::Display for DecomposeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecomposeError::MveViolated(v) => write!(
                f,
                "mean value exclusion violated at s = {}, t = {}, y = {} ({:?})",
                v.s, v.t, v.y, v.clause
            ),
            DecomposeError::ZeroLowerEndpoint { upper } => {
                write!(f, "segment (0, {upper}) starts at zero")
            }
            DecomposeError::Overlap { first, second } => {
                write!(f, "segments {first} and {second} overlap")
            }
            DecomposeError::Unsigned(s) => {
                write!(f, "segment {s} satisfies neither sign condition")
            }
            DecomposeError::EqualSignsAtSharedEndpoint(t) => {
                write!(f, "segments meeting at {t} have equal signs")
            }
            DecomposeError::BadSharedValue { at, found } => {
                write!(f, "value {found} at shared endpoint {at} is not an adjacent endpoint")
            }
            DecomposeError::NotCompatible(r) => match r.first_failure() {
                Some((k, ConditionStatus::Fail { at, detail })) => {
                    write!(f, "condition {k} fails at {at}: {detail}")
                }
                _ => write!(f, "pair is not compatible with the recovered segments"),
            },
        }
    }
}

impl std::error::Error for DecomposeError {}

/// Candidate segment found from the preimage structure of `h1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Origin {
    /// `h1(I⁻) = I⁺` at the left-most preimage point.
    D3,
    /// `h1(I⁺) = I⁻` at the right-most preimage point.
    D4,
    /// Preimage of `I⁺` accumulates at `I⁻` from the right.
    D5,
    /// Preimage of `I⁻` accumulates at `I⁺` from the left.
    D6,
}

/// The `D₃ ∪ D₄ ∪ D₅ ∪ D₆` candidates of `h1`, as raw `(lower, upper)`.
fn d_candidates(h1: &IntervalMap) -> Vec<(Rational, Rational, Origin)> {
    let mut values: BTreeSet<Rational> = h1.pieces().iter().map(|p| p.value.clone()).collect();
    values.extend(h1.points().iter().filter(|(x, y)| x != y).map(|(_, y)| y.clone()));
    let mut out = Vec::new();
    for y in values {
        let Some(b) = h1.preimage_bounds(&y) else {
            continue;
        };
        if b.inf < y {
            let origin = if b.inf_attained { Origin::D3 } else { Origin::D5 };
            out.push((b.inf.clone(), y.clone(), origin));
        }
        if b.sup > y {
            let origin = if b.sup_attained { Origin::D4 } else { Origin::D6 };
            out.push((y.clone(), b.sup.clone(), origin));
        }
    }
    out.sort();
    out.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
    out
}

/// Recovers the signed segments (and endpoint choices) of a pair.
///
/// Candidates are the segments `(inf h1⁻¹(y), y)` and `(y, sup h1⁻¹(y))`
/// for every value `y` that `h1` takes off the identity; each must be
/// disjoint from the others and satisfy the "+" or "−" condition, and
/// the result is re-verified against both maps.
// errors carry exact segments as witnesses and arise once per call
#[allow(clippy::result_large_err)]
pub fn decompose(
    h1: &IntervalMap,
    h2: &IntervalMap,
) -> std::result::Result<SignedDecomposition, DecomposeError> {
    let grid = refining_grid(&[h1, h2], &[]);
    if let MveVerdict::Violation(v) = check_mve(h1, h2, &grid) {
        return Err(DecomposeError::MveViolated(v));
    }
    let mut segments = Vec::new();
    for (lower, upper, _) in d_candidates(h1) {
        let seg = Segment::new(lower, upper.clone())
            .map_err(|_| DecomposeError::ZeroLowerEndpoint { upper })?;
        segments.push(seg);
    }
    segments.sort();
    for w in segments.windows(2) {
        if w[0].upper > w[1].lower {
            return Err(DecomposeError::Overlap {
                first: w[0].clone(),
                second: w[1].clone(),
            });
        }
    }
    let mut signs = Vec::with_capacity(segments.len());
    for seg in &segments {
        let plus = h1.constant_on(&seg.lower, &seg.upper, &seg.upper)
            && h2.constant_on(&seg.lower, &seg.upper, &seg.lower);
        let minus = h1.constant_on(&seg.lower, &seg.upper, &seg.lower)
            && h2.constant_on(&seg.lower, &seg.upper, &seg.upper);
        signs.push(match (plus, minus) {
            (true, _) => Sign::Plus,
            (false, true) => Sign::Minus,
            (false, false) => return Err(DecomposeError::Unsigned(seg.clone())),
        });
    }
    let mut choices = Vec::new();
    for i in 0..segments.len().saturating_sub(1) {
        let (left, right) = (&segments[i], &segments[i + 1]);
        if left.upper != right.lower {
            continue;
        }
        if signs[i] == signs[i + 1] {
            return Err(DecomposeError::EqualSignsAtSharedEndpoint(left.upper.clone()));
        }
        let t = &left.upper;
        let free = match signs[i] {
            Sign::Plus => h2.eval(t),
            Sign::Minus => h1.eval(t),
        };
        let choice = if free == left.lower {
            EndpointChoice::Lower
        } else if free == right.upper {
            EndpointChoice::Upper
        } else {
            return Err(DecomposeError::BadSharedValue {
                at: t.clone(),
                found: free,
            });
        };
        choices.push(choice);
    }
    let d = SignedDecomposition::new(segments, signs, choices)
        .expect("segments were checked disjoint and alternating");
    let report = verify_compatibility(h1, h2, &d);
    if !report.all_pass() || !report.endpoint_choices_match {
        return Err(DecomposeError::NotCompatible(report));
    }
    Ok(d)
}

/// Membership of one candidate segment in each of the `D₁ … D₆` families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentClass {
    pub lower: Rational,
    pub upper: Rational,
    /// `[D₁, D₂, D₃, D₄, D₅, D₆]`.
    pub member: [bool; 6],
}

impl SegmentClass {
    pub fn in_d(&self) -> bool {
        self.member[2..].iter().any(|&m| m)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub classes: Vec<SegmentClass>,
    /// Every `D₁ ∪ D₂` segment lies inside some `D₃ … D₆` segment.
    pub containment_holds: bool,
}

/// Classifies the finitely many segments that `h1`'s representation
/// generates: the `D₃–D₆` candidates and the `D₁/D₂` segments
/// `(x, h1(x))` at every breakpoint and at two interior points of every
/// piece.
///
/// On an interval map the limit-point families are decidable: the
/// preimage of a value is a finite union of open pieces and points, so
/// an unattained infimum (supremum) is the open end of a piece with that
/// value, i.e. a sequence in the preimage converging from the right
/// (left).
pub fn classify_segments(h1: &IntervalMap) -> Classification {
    let mut raw: BTreeSet<(Rational, Rational)> = d_candidates(h1)
        .into_iter()
        .map(|(l, u, _)| (l, u))
        .collect();
    let mut probes: BTreeSet<Rational> = h1.critical_points();
    for p in h1.pieces() {
        let (a, b) = maps::interior_samples(&p.lower, &p.upper);
        probes.insert(a);
        probes.insert(b);
    }
    for x in probes {
        let y = h1.eval(&x);
        match y.cmp(&x) {
            std::cmp::Ordering::Greater => {
                raw.insert((x, y));
            }
            std::cmp::Ordering::Less => {
                raw.insert((y, x));
            }
            std::cmp::Ordering::Equal => {}
        }
    }
    let classes: Vec<SegmentClass> = raw
        .into_iter()
        .map(|(lower, upper)| {
            let d1 = h1.eval(&lower) == upper;
            let d2 = h1.eval(&upper) == lower;
            let up = h1.preimage_bounds(&upper);
            let down = h1.preimage_bounds(&lower);
            let inf_here = up.as_ref().is_some_and(|b| b.inf == lower);
            let sup_here = down.as_ref().is_some_and(|b| b.sup == upper);
            let d3 = d1 && inf_here;
            let d4 = d2 && sup_here;
            let d5 = inf_here && !d1;
            let d6 = sup_here && !d2;
            SegmentClass {
                lower,
                upper,
                member: [d1, d2, d3, d4, d5, d6],
            }
        })
        .collect();
    let containment_holds = classes
        .iter()
        .filter(|c| c.member[0] || c.member[1])
        .all(|c| {
            classes
                .iter()
                .filter(|d| d.in_d())
                .any(|d| d.lower <= c.lower && c.upper <= d.upper)
        });
    Classification {
        classes,
        containment_holds,
    }
}

/// Segments of `d` are pairwise disjoint.
pub fn segments_disjoint(d: &SignedDecomposition) -> bool {
    let s = d.segments();
    (0..s.len()).all(|i| {
        (i + 1..s.len()).all(|j| s[i].upper <= s[j].lower || s[j].upper <= s[i].lower)
    })
}

/// Endpoint behaviour: an endpoint of one segment carries that segment's
/// interior values; a shared endpoint joins segments of opposite sign and
/// each map takes the interior value of one of the two.
pub fn endpoints_consistent(d: &SignedDecomposition, h1: &IntervalMap, h2: &IntervalMap) -> bool {
    d.endpoints().into_iter().all(|t| {
        let owners: Vec<usize> = (0..d.len())
            .filter(|&i| d.segments[i].lower == t || d.segments[i].upper == t)
            .collect();
        let interiors: Vec<(Rational, Rational)> = owners
            .iter()
            .map(|&i| interior_values(&d.segments[i], d.signs[i]))
            .collect();
        let (a, b) = (h1.eval(&t), h2.eval(&t));
        match owners.as_slice() {
            [_] => a == interiors[0].0 && b == interiors[0].1,
            [i, j] => {
                d.signs[*i] != d.signs[*j]
                    && interiors.iter().any(|(x, _)| *x == a)
                    && interiors.iter().any(|(_, y)| *y == b)
            }
            _ => false,
        }
    })
}

/// Both maps are the identity at every grid point outside the closed
/// segments.
pub fn identity_off_segments(
    d: &SignedDecomposition,
    h1: &IntervalMap,
    h2: &IntervalMap,
    grid: &[Rational],
) -> bool {
    grid.iter()
        .filter(|x| !d.covers(x))
        .all(|x| h1.eval(x) == *x && h2.eval(x) == *x)
}

/// A grid point `δ < ε` with `0 < h1(δ), h2(δ) < ε`.
pub fn small_argument_witness<A, B>(h1: &A, h2: &B, eps: &Rational, grid: &[Rational]) -> Option<Rational>
where
    A: PointMap + ?Sized,
    B: PointMap + ?Sized,
{
    let zero = Rational::zero();
    grid.iter()
        .filter(|d| **d > zero && *d < eps)
        .find(|d| {
            let inside = |v: Option<Rational>| v.is_some_and(|v| v > zero && &v < eps);
            inside(h1.value_at(d)) && inside(h2.value_at(d))
        })
        .cloned()
}

/// A random valid decomposition with at most `max_segments` segments and
/// endpoints on the lattice `(0, 20]` with step `1/12`. Roughly half of
/// the consecutive segments share an endpoint.
pub fn random_decomposition<R: Rng + ?Sized>(rng: &mut R, max_segments: usize) -> SignedDecomposition {
    const STEPS: i64 = 240;
    let k = rng.gen_range(0..=max_segments);
    let mut ticks: BTreeSet<i64> = BTreeSet::new();
    while ticks.len() < 2 * k {
        ticks.insert(rng.gen_range(1..=STEPS));
    }
    let ticks: Vec<i64> = ticks.into_iter().collect();
    let mut bounds: Vec<(i64, i64)> = ticks.chunks(2).map(|c| (c[0], c[1])).collect();
    for i in 1..bounds.len() {
        if rng.gen_bool(0.5) {
            bounds[i].0 = bounds[i - 1].1;
        }
    }
    let mut segments = Vec::with_capacity(k);
    let mut signs: Vec<Sign> = Vec::with_capacity(k);
    let mut choices = Vec::new();
    for (i, &(lo, hi)) in bounds.iter().enumerate() {
        segments.push(Segment::new(rat(lo, 12), rat(hi, 12)).expect("0 < lo < hi"));
        let shared = i > 0 && bounds[i - 1].1 == lo;
        let sign = if shared {
            choices.push(if rng.gen_bool(0.5) {
                EndpointChoice::Lower
            } else {
                EndpointChoice::Upper
            });
            match signs[i - 1] {
                Sign::Plus => Sign::Minus,
                Sign::Minus => Sign::Plus,
            }
        } else if rng.gen_bool(0.5) {
            Sign::Plus
        } else {
            Sign::Minus
        };
        signs.push(sign);
    }
    SignedDecomposition::new(segments, signs, choices).expect("constructed valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn seg(l: i64, u: i64) -> Segment {
        Segment::new(int(l), int(u)).unwrap()
    }

    #[test]
    fn empty_decomposition_gives_identity() {
        let (h1, h2) = build_compatible_pair(&SignedDecomposition::empty());
        for x in [int(0), int(1), rat(7, 3)] {
            assert_eq!(h1.eval(&x), x);
            assert_eq!(h2.eval(&x), x);
        }
    }

    #[test]
    fn single_minus_segment() {
        let d = SignedDecomposition::new(vec![seg(1, 2)], vec![Sign::Minus], vec![]).unwrap();
        let (h1, h2) = build_compatible_pair(&d);
        assert_eq!(h1.eval(&rat(3, 2)), int(1));
        assert_eq!(h2.eval(&rat(3, 2)), int(2));
        assert_eq!((h1.eval(&int(1)), h2.eval(&int(1))), (int(1), int(2)));
        assert_eq!((h1.eval(&int(2)), h2.eval(&int(2))), (int(1), int(2)));
        assert_eq!(h1.eval(&int(3)), int(3));
        assert_eq!(h2.eval(&rat(1, 2)), rat(1, 2));
    }

    #[test]
    fn shared_endpoint_choice() {
        let d = SignedDecomposition::new(
            vec![seg(1, 2), seg(2, 3)],
            vec![Sign::Plus, Sign::Minus],
            vec![EndpointChoice::Upper],
        )
        .unwrap();
        let (h1, h2) = build_compatible_pair(&d);
        assert_eq!(h1.eval(&int(2)), int(2));
        assert_eq!(h2.eval(&int(2)), int(3));
    }

    #[test]
    fn decomposition_invariants() {
        assert!(Segment::new(int(0), int(1)).is_err());
        assert!(Segment::new(int(2), int(1)).is_err());
        assert!(SignedDecomposition::new(vec![seg(1, 3), seg(2, 4)], vec![Sign::Plus, Sign::Minus], vec![]).is_err());
        assert!(SignedDecomposition::new(
            vec![seg(1, 2), seg(2, 3)],
            vec![Sign::Plus, Sign::Plus],
            vec![EndpointChoice::Lower]
        )
        .is_err());
        assert!(SignedDecomposition::new(vec![seg(1, 2), seg(2, 3)], vec![Sign::Plus, Sign::Minus], vec![]).is_err());
    }

    #[test]
    fn build_then_verify_passes() {
        let d = SignedDecomposition::new(
            vec![seg(1, 2), seg(2, 3), seg(5, 7)],
            vec![Sign::Minus, Sign::Plus, Sign::Plus],
            vec![EndpointChoice::Lower],
        )
        .unwrap();
        let (h1, h2) = build_compatible_pair(&d);
        let r = verify_compatibility(&h1, &h2, &d);
        assert!(r.all_pass(), "{r:?}");
        assert!(r.endpoint_choices_match);
        assert_eq!(r.conditions[0], ConditionStatus::Pass);
    }

    #[test]
    fn interior_mutation_fails_condition_two() {
        let d = SignedDecomposition::new(vec![seg(1, 2)], vec![Sign::Minus], vec![]).unwrap();
        let (h1, h2) = build_compatible_pair(&d);
        let h1 = h1.with_point(rat(3, 2), rat(5, 4));
        let r = verify_compatibility(&h1, &h2, &d);
        assert_eq!(r.first_failure().unwrap().0, 2);
    }

    #[test]
    fn plus_mutation_fails_condition_three() {
        let d = SignedDecomposition::new(vec![seg(4, 6)], vec![Sign::Plus], vec![]).unwrap();
        let (h1, h2) = build_compatible_pair(&d);
        let h2 = h2.with_point(int(5), int(6));
        let r = verify_compatibility(&h1, &h2, &d);
        assert_eq!(r.first_failure().unwrap().0, 3);
    }

    #[test]
    fn decompose_identity_is_empty() {
        let id = IntervalMap::identity();
        assert_eq!(decompose(&id, &id).unwrap(), SignedDecomposition::empty());
    }

    #[test]
    fn decompose_single_segment() {
        let d = SignedDecomposition::new(vec![seg(1, 2)], vec![Sign::Minus], vec![]).unwrap();
        let (h1, h2) = build_compatible_pair(&d);
        assert_eq!(decompose(&h1, &h2).unwrap(), d);
    }

    #[test]
    fn decompose_chain_with_shared_endpoint() {
        let d = SignedDecomposition::new(
            vec![seg(1, 2), seg(2, 4), seg(6, 9)],
            vec![Sign::Plus, Sign::Minus, Sign::Minus],
            vec![EndpointChoice::Lower],
        )
        .unwrap();
        let (h1, h2) = build_compatible_pair(&d);
        let back = decompose(&h1, &h2).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.signs()[0].as_int() * back.signs()[1].as_int(), -1);
    }

    #[test]
    fn decompose_rejects_mve_violation() {
        let h1 = IntervalMap::identity().with_point(int(1), int(3));
        let err = decompose(&h1, &IntervalMap::identity()).unwrap_err();
        assert!(matches!(err, DecomposeError::MveViolated(_)));
    }

    #[test]
    fn classify_plus_segment() {
        let d = SignedDecomposition::new(vec![seg(1, 2)], vec![Sign::Plus], vec![]).unwrap();
        let (h1, _) = build_compatible_pair(&d);
        let c = classify_segments(&h1);
        let class = c
            .classes
            .iter()
            .find(|c| c.lower == int(1) && c.upper == int(2))
            .unwrap();
        assert!(class.member[0] && class.member[2]);
        assert!(c.containment_holds);
    }

    #[test]
    fn classify_minus_segment_is_d4() {
        let d = SignedDecomposition::new(vec![seg(1, 2)], vec![Sign::Minus], vec![]).unwrap();
        let (h1, _) = build_compatible_pair(&d);
        let c = classify_segments(&h1);
        let class = c
            .classes
            .iter()
            .find(|c| c.lower == int(1) && c.upper == int(2))
            .unwrap();
        assert!(class.member[1] && class.member[3]);
    }

    #[test]
    fn classify_unattained_infimum_is_d5() {
        // (1,2) minus, (2,3) plus, h1(2) = 1: preimage of 3 is (2,3], open at 2
        let d = SignedDecomposition::new(
            vec![seg(1, 2), seg(2, 3)],
            vec![Sign::Minus, Sign::Plus],
            vec![EndpointChoice::Lower],
        )
        .unwrap();
        let (h1, _) = build_compatible_pair(&d);
        let c = classify_segments(&h1);
        let class = c
            .classes
            .iter()
            .find(|c| c.lower == int(2) && c.upper == int(3))
            .unwrap();
        assert!(class.member[4] && !class.member[2]);
        assert!(c.containment_holds);
    }

    #[test]
    fn classify_identity_is_empty() {
        let c = classify_segments(&IntervalMap::identity());
        assert!(c.classes.is_empty());
    }

    #[test]
    fn small_argument_witness_exists() {
        let d = SignedDecomposition::new(vec![seg(1, 2)], vec![Sign::Plus], vec![]).unwrap();
        let (h1, h2) = build_compatible_pair(&d);
        let grid = refining_grid(&[&h1, &h2], &[]);
        assert!(small_argument_witness(&h1, &h2, &int(3), &grid).is_some());
        assert!(small_argument_witness(&h1, &h2, &rat(1, 2), &grid).is_some());
    }
}
