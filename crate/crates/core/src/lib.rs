//! Exact verification tools for VCG games.
//!
//! * [`model`]: alternatives, valuations, announcements, welfare, utility.
//! * [`strategy`]: strategy families and their communication cost.
//! * [`equilibrium`]: ex-post equilibrium decision with replayable
//!   witnesses, g-function extraction and necessary-condition checks.
//! * [`efficiency`]: welfare ratios, degree measures and bounds.
//! * [`parallelogram`]: mean value exclusion and segment decompositions.
//! * [`auctions`]: allocations, bundle valuations, quasi-fields.
//! * [`grids`]: valuation grids and instance generators.
//!
//! All arithmetic is exact ([`Rational`]).

pub mod auctions;
pub mod efficiency;
pub mod equilibrium;
pub mod error;
pub mod grids;
pub mod model;
pub mod parallelogram;
pub mod rational;
pub mod strategy;

pub use error::{Error, Result};
pub use model::{
    choose, social_welfare, utility, welfare_maximizers, Alt, AlternativeSet, Announcement,
    GameInstance, HSpec, Player, PriorityOrder, TieBreakPolicy, Valuation, ValueTable,
};
pub use rational::{format_rational, parse_rational, Rational};
pub use strategy::{communication_cost, Strategy, StrategyProfile};
