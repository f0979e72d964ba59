//! The mean-value-exclusion condition on finite grids.

use std::collections::BTreeSet;

use serde::Serialize;

use super::maps::{PointMap, SampledFunction};
use crate::rational::Rational;

/// Which of the two symmetric implications failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MveClause {
    /// `y` strictly between `s` and `f1(s)` (closed at `f1(s)`) equals `f2(t)`.
    FirstBetweenSecond,
    /// `y` strictly between `s` and `f2(s)` (closed at `f2(s)`) equals `f1(t)`.
    SecondBetweenFirst,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MveViolation {
    pub clause: MveClause,
    pub s: Rational,
    pub t: Rational,
    pub y: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MveVerdict {
    Pass,
    Violation(MveViolation),
}

impl MveVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, MveVerdict::Pass)
    }

    pub fn violation(&self) -> Option<&MveViolation> {
        match self {
            MveVerdict::Pass => None,
            MveVerdict::Violation(v) => Some(v),
        }
    }
}

/// `s < y <= fs` or `fs <= y < s`.
fn excluded(s: &Rational, fs: &Rational, y: &Rational) -> bool {
    (s < y && y <= fs) || (fs <= y && y < s)
}

fn scan<A, B>(
    clause: MveClause,
    moved: &A,
    probe: &B,
    grid: &[Rational],
) -> Option<MveViolation>
where
    A: PointMap + ?Sized,
    B: PointMap + ?Sized,
{
    let probe_values: Vec<(&Rational, Rational)> = grid
        .iter()
        .filter_map(|t| probe.value_at(t).map(|y| (t, y)))
        .collect();
    for s in grid {
        let Some(fs) = moved.value_at(s) else {
            continue;
        };
        if fs == *s {
            continue;
        }
        if let Some((t, y)) = probe_values.iter().find(|(_, y)| excluded(s, &fs, y)) {
            return Some(MveViolation {
                clause,
                s: s.clone(),
                t: (*t).clone(),
                y: y.clone(),
            });
        }
    }
    None
}

/// Checks both clauses for every `s, t` on `grid` (with `y = f(t)`),
/// skipping points where a function is undefined. The first violation in
/// (clause, `s`, `t`) order is reported.
pub fn check_mve<A, B>(f1: &A, f2: &B, grid: &[Rational]) -> MveVerdict
where
    A: PointMap + ?Sized,
    B: PointMap + ?Sized,
{
    scan(MveClause::FirstBetweenSecond, f1, f2, grid)
        .or_else(|| scan(MveClause::SecondBetweenFirst, f2, f1, grid))
        .map_or(MveVerdict::Pass, MveVerdict::Violation)
}

/// [`check_mve`] over the union of both sampling grids.
pub fn check_mve_sampled(g1: &SampledFunction, g2: &SampledFunction) -> MveVerdict {
    let grid: BTreeSet<Rational> = g1.grid().iter().chain(g2.grid()).cloned().collect();
    let grid: Vec<Rational> = grid.into_iter().collect();
    check_mve(g1, g2, &grid)
}
