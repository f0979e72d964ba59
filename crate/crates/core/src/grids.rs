//! Finite valuation grids and the abstract-alternative instance
//! generators.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Alt, AlternativeSet, GameInstance, HSpec, Valuation, ValueTable};
use crate::rational::{int, rat, Rational};
use crate::strategy::{make_maxima_plus_ten, FloorRule, OffMaximaRule, OffsetRule, Strategy, StrategyProfile};

/// Every valuation with entries from `values`, in odometer order (first
/// alternative most significant).
pub fn full_grid(num_alternatives: usize, values: &[Rational]) -> Vec<Valuation> {
    let mut out = Vec::new();
    let mut digits = vec![0usize; num_alternatives];
    loop {
        out.push(Valuation::new(digits.iter().map(|&d| values[d].clone()).collect()));
        let mut k = num_alternatives;
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

/// `{0, 1, …, top}`.
pub fn integer_values(top: i64) -> Vec<Rational> {
    (0..=top).map(int).collect()
}

/// `count` distinct valuations maximised at `maximum`: first `Z^{(maximum,
/// h)}` for each `h` in `z_heights`, then random draws from `values` with
/// the largest draw moved to `maximum`.
pub fn constant_maximum_grid<R: Rng + ?Sized>(
    rng: &mut R,
    num_alternatives: usize,
    maximum: Alt,
    values: &[Rational],
    count: usize,
    z_heights: &[Rational],
) -> Vec<Valuation> {
    let mut seen: BTreeSet<Vec<Rational>> = BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    for h in z_heights.iter().take(count) {
        let z = Valuation::z(num_alternatives, maximum, h.clone());
        if seen.insert(z.values().to_vec()) {
            out.push(z);
        }
    }
    let mut attempts = 0;
    while out.len() < count && attempts < 64 * count + 64 {
        attempts += 1;
        let mut draw: Vec<Rational> = (0..num_alternatives)
            .map(|_| values.choose(rng).expect("non-empty value set").clone())
            .collect();
        let top = draw.iter().max().expect("non-empty").clone();
        draw[maximum.0] = top;
        if seen.insert(draw.clone()) {
            out.push(Valuation::new(draw));
        }
    }
    out
}

/// A generated abstract instance and the profile under test.
#[derive(Debug, Clone)]
pub struct Generated {
    pub instance: GameInstance,
    pub profile: StrategyProfile,
}

fn constant_maximum_instance(
    num_alternatives: usize,
    maxima: &[Alt],
    values: &[Rational],
    grid_size: usize,
    seed: u64,
) -> Result<GameInstance> {
    let alternatives = AlternativeSet::numbered(num_alternatives)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let families = maxima
        .iter()
        .map(|&m| {
            alternatives.check(m)?;
            Ok(constant_maximum_grid(&mut rng, num_alternatives, m, values, grid_size, &[int(1)]))
        })
        .collect::<Result<Vec<_>>>()?;
    GameInstance::new(
        alternatives,
        GameInstance::default_players(maxima.len()),
        families,
        HSpec::Zero,
        Some(maxima.to_vec()),
    )
}

/// Player `i` has maximum `a_{i+1}`; nearly-truthful reporting over the
/// first `subset_size` alternatives (which must cover every maximum)
/// with floor `0`, on seeded grids with values in `{0, 1/2, 1, 2}`.
///
/// The floor stays strictly below the subset minimum unless every
/// subset value is zero; the largest admissible floor would let an
/// alternative outside the subset tie for the top whenever a valuation
/// is constant on the subset.
pub fn gen_near_truth(
    players: usize,
    num_alternatives: usize,
    subset_size: usize,
    grid_size: usize,
    seed: u64,
) -> Result<Generated> {
    if players == 0 || players > num_alternatives || subset_size < players || subset_size > num_alternatives {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= players <= subset size <= alternatives, got {players}, {subset_size}, {num_alternatives}"
        )));
    }
    let maxima: Vec<Alt> = (0..players).map(Alt).collect();
    let values = [int(0), rat(1, 2), int(1), int(2)];
    let instance = constant_maximum_instance(num_alternatives, &maxima, &values, grid_size, seed)?;
    let strategy = Strategy::nearly_truth(
        instance.alternatives(),
        (0..subset_size).map(Alt).collect(),
        OffsetRule::zero(),
        FloorRule::Constant(int(0)),
    )?;
    Ok(Generated {
        profile: StrategyProfile::uniform(strategy, players),
        instance,
    })
}

/// Player `i` has maximum `a_{i+1}` and reports `v + 10` on every maximum
/// and `v` clamped into `[0, 9]` elsewhere, on seeded grids with values in
/// `{0, …, 12}`.
pub fn gen_maxima_plus_ten(players: usize, num_alternatives: usize, grid_size: usize, seed: u64) -> Result<Generated> {
    if players == 0 || players > num_alternatives {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= players <= alternatives, got {players} and {num_alternatives}"
        )));
    }
    let maxima: Vec<Alt> = (0..players).map(Alt).collect();
    let values = integer_values(12);
    let instance = constant_maximum_instance(num_alternatives, &maxima, &values, grid_size, seed)?;
    let strategy = make_maxima_plus_ten(maxima, OffMaximaRule::ClampedValue)?;
    Ok(Generated {
        profile: StrategyProfile::uniform(strategy, players),
        instance,
    })
}
