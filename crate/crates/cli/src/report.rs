//! Report documents: serialised as JSON for `--format machine`, rendered
//! as text otherwise. Reports carry counts but no timings, so identical
//! inputs give identical output.

use serde::Serialize;
use vcglab::efficiency::{Bound, BoundKind, EfficiencyReport};
use vcglab::equilibrium::{CrossCheckReport, EquilibriumVerdict, LemmaReport, LemmaStatus, NearTruthReport, Witness};
use vcglab::parallelogram::{MveClause, MveVerdict};
use vcglab::{format_rational, Alt, AlternativeSet, GameInstance, Rational, ValueTable};

use crate::functions::{FunctionDoc, MapDoc};

/// Every alternative by label, zeros included, so witnesses replay from
/// the report alone.
fn full_map<T: ValueTable>(alts: &AlternativeSet, values: &T) -> Vec<(String, String)> {
    values
        .values()
        .iter()
        .enumerate()
        .map(|(a, x)| (alts.label(Alt(a)).to_string(), format_rational(x)))
        .collect()
}

fn show_map(entries: &[(String, String)]) -> String {
    let parts: Vec<String> = entries.iter().map(|(k, v)| format!("{k}: {v}")).collect();
    format!("{{{}}}", parts.join(", "))
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessEntry {
    pub player: String,
    /// 1-based index into the player's family.
    pub valuation_index: usize,
    pub valuation: Vec<(String, String)>,
    pub announcement: Vec<(String, String)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessDoc {
    pub cell: Vec<WitnessEntry>,
    pub chosen: String,
    pub deviator: String,
    pub better: String,
    pub gap: String,
    /// Announcement that makes `better` the unique maximiser.
    pub deviation: Vec<(String, String)>,
    /// Utility gain of `deviation` re-evaluated from scratch.
    pub replayed_gain: String,
}

impl WitnessDoc {
    pub fn new(instance: &GameInstance, w: &Witness, replayed: &Rational) -> Self {
        let alts = instance.alternatives();
        let players = instance.players();
        let cell = w
            .subset
            .iter()
            .enumerate()
            .map(|(k, p)| WitnessEntry {
                player: players[p.0].clone(),
                valuation_index: w.valuation_indices[k] + 1,
                valuation: full_map(alts, &w.valuations[k]),
                announcement: full_map(alts, &w.announcements[k]),
            })
            .collect();
        Self {
            cell,
            chosen: alts.label(w.chosen).to_string(),
            deviator: players[w.deviator.0].clone(),
            better: alts.label(w.better).to_string(),
            gap: format_rational(&w.gap),
            deviation: full_map(alts, &w.deviation),
            replayed_gain: format_rational(replayed),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OffsetRowDoc {
    pub player: String,
    pub valuation_index: usize,
    pub offsets: Vec<(String, String)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NearTruthDoc {
    pub all_constant: bool,
    pub common_offset: Option<String>,
    /// Valuations whose offsets differ across the maxima.
    pub non_constant: Vec<OffsetRowDoc>,
}

impl NearTruthDoc {
    pub fn new(instance: &GameInstance, r: &NearTruthReport) -> Self {
        let alts = instance.alternatives();
        let non_constant = r
            .rows
            .iter()
            .enumerate()
            .flat_map(|(i, rows)| {
                rows.iter().filter(|row| !row.constant).map(move |row| OffsetRowDoc {
                    player: instance.players()[i].clone(),
                    valuation_index: row.valuation_index + 1,
                    offsets: row
                        .offsets
                        .iter()
                        .map(|(a, x)| (alts.label(*a).to_string(), format_rational(x)))
                        .collect(),
                })
            })
            .collect();
        Self {
            all_constant: r.all_constant(),
            common_offset: r.common_offset().as_ref().map(format_rational),
            non_constant,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaDoc {
    pub lemma: String,
    pub status: String,
    pub detail: Option<String>,
}

pub fn lemma_docs(instance: &GameInstance, r: &LemmaReport) -> Vec<LemmaDoc> {
    r.results
        .iter()
        .map(|(lemma, status)| {
            let (status, detail) = match status {
                LemmaStatus::Pass => ("pass", None),
                LemmaStatus::NotApplicable => ("not-applicable", None),
                LemmaStatus::Fail {
                    player,
                    valuation_index,
                    detail,
                } => (
                    "fail",
                    Some(format!(
                        "player {}, valuation {}: {detail}",
                        instance.players()[player.0],
                        valuation_index + 1
                    )),
                ),
            };
            LemmaDoc {
                lemma: lemma.name().to_string(),
                status: status.to_string(),
                detail,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossCheckDoc {
    pub samples: usize,
    pub improving: usize,
    pub witness_misses: usize,
    pub agrees: bool,
}

impl From<&CrossCheckReport> for CrossCheckDoc {
    fn from(r: &CrossCheckReport) -> Self {
        Self {
            samples: r.samples,
            improving: r.improving,
            witness_misses: r.witness_misses,
            agrees: r.agrees(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub command: &'static str,
    pub name: Option<String>,
    pub status: &'static str,
    pub players: usize,
    pub alternatives: usize,
    pub cells_checked: u64,
    pub subsets_checked: u64,
    pub witness: Option<WitnessDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub near_truth: Option<NearTruthDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lemmas: Option<Vec<LemmaDoc>>,
    /// Why the lemma suite could not run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lemmas_skipped: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<CrossCheckDoc>,
}

impl CheckReport {
    pub fn new(name: Option<String>, instance: &GameInstance, verdict: &EquilibriumVerdict) -> Self {
        Self {
            command: "check",
            name,
            status: if verdict.is_pass() { "pass" } else { "fail" },
            players: instance.num_players(),
            alternatives: instance.alternatives().len(),
            cells_checked: verdict.cells_checked,
            subsets_checked: verdict.subsets_checked,
            witness: None,
            near_truth: None,
            lemmas: None,
            lemmas_skipped: None,
            cross_check: None,
        }
    }

    pub fn human(&self) -> String {
        let mut out = Vec::new();
        let title = self.name.as_deref().unwrap_or("instance");
        out.push(format!(
            "{title}: {} ({} players, {} alternatives, {} cells over {} player subsets)",
            self.status.to_uppercase(),
            self.players,
            self.alternatives,
            self.cells_checked,
            self.subsets_checked
        ));
        if let Some(w) = &self.witness {
            out.push("witness:".into());
            for e in &w.cell {
                out.push(format!(
                    "  player {} valuation #{} {} announces {}",
                    e.player,
                    e.valuation_index,
                    show_map(&e.valuation),
                    show_map(&e.announcement)
                ));
            }
            out.push(format!(
                "  at chosen {} player {} gains {} by moving the outcome to {}",
                w.chosen, w.deviator, w.gap, w.better
            ));
            out.push(format!(
                "  deviation {} replays with gain {}",
                show_map(&w.deviation),
                w.replayed_gain
            ));
        }
        if let Some(nt) = &self.near_truth {
            match (&nt.common_offset, nt.all_constant) {
                (Some(c), _) => out.push(format!("offsets on maxima: constant, common value {c}")),
                (None, true) => out.push("offsets on maxima: constant per valuation".into()),
                (None, false) => out.push(format!(
                    "offsets on maxima: {} valuations not constant",
                    nt.non_constant.len()
                )),
            }
        }
        if let Some(ls) = &self.lemmas {
            for l in ls {
                match &l.detail {
                    Some(d) => out.push(format!("lemma {}: {} ({d})", l.lemma, l.status)),
                    None => out.push(format!("lemma {}: {}", l.lemma, l.status)),
                }
            }
        }
        if let Some(reason) = &self.lemmas_skipped {
            out.push(format!("lemmas skipped: {reason}"));
        }
        if let Some(c) = &self.cross_check {
            out.push(format!(
                "cross-check: {} sampled deviations, {} improving, {} witness misses, {}",
                c.samples,
                c.improving,
                c.witness_misses,
                if c.agrees { "agrees" } else { "DISAGREES" }
            ));
        }
        out.join("\n")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundDoc {
    pub kind: BoundKind,
    pub value: String,
}

impl From<&Bound> for BoundDoc {
    fn from(b: &Bound) -> Self {
        Self {
            kind: b.kind,
            value: format_rational(&b.value),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioWitnessDoc {
    /// 1-based valuation index per player.
    pub valuation_indices: Vec<usize>,
    pub dominant_alternative: String,
    pub equilibrium_alternative: String,
    pub dominant_welfare: String,
    pub equilibrium_welfare: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct EfficiencyDoc {
    pub command: &'static str,
    pub name: Option<String>,
    /// `satisfied`, `violated` or `refused` (not an equilibrium).
    pub status: &'static str,
    pub ratio: Option<String>,
    pub applied: Option<BoundDoc>,
    pub bounds: Vec<BoundDoc>,
    pub profiles_checked: u64,
    pub profiles_skipped: u64,
    pub equilibrium_cells: u64,
    pub witness: Option<RatioWitnessDoc>,
}

impl EfficiencyDoc {
    pub fn refused(name: Option<String>) -> Self {
        Self {
            command: "efficiency",
            name,
            status: "refused",
            ratio: None,
            applied: None,
            bounds: Vec::new(),
            profiles_checked: 0,
            profiles_skipped: 0,
            equilibrium_cells: 0,
            witness: None,
        }
    }

    pub fn new(name: Option<String>, instance: &GameInstance, r: &EfficiencyReport) -> Self {
        let alts = instance.alternatives();
        let witness = match (&r.worst.witness, &r.worst.outcome) {
            (Some(idx), Some(o)) => Some(RatioWitnessDoc {
                valuation_indices: idx.iter().map(|k| k + 1).collect(),
                dominant_alternative: alts.label(o.dominant_alternative).to_string(),
                equilibrium_alternative: alts.label(o.equilibrium_alternative).to_string(),
                dominant_welfare: format_rational(&o.dominant_welfare),
                equilibrium_welfare: format_rational(&o.equilibrium_welfare),
            }),
            _ => None,
        };
        Self {
            command: "efficiency",
            name,
            status: if r.satisfied { "satisfied" } else { "violated" },
            ratio: Some(format_rational(r.ratio())),
            applied: Some((&r.applied).into()),
            bounds: r.bounds.iter().map(Into::into).collect(),
            profiles_checked: r.worst.profiles_checked,
            profiles_skipped: r.worst.profiles_skipped,
            equilibrium_cells: r.equilibrium_cells,
            witness,
        }
    }

    pub fn human(&self) -> String {
        let title = self.name.as_deref().unwrap_or("instance");
        let Some(ratio) = &self.ratio else {
            return format!("{title}: REFUSED (profile is not an ex-post equilibrium)");
        };
        let mut out = vec![format!("{title}: worst-case ratio {ratio}")];
        let bounds: Vec<String> = self
            .bounds
            .iter()
            .map(|b| format!("{} {}", bound_name(b.kind), b.value))
            .collect();
        out.push(format!("bounds: {}", bounds.join(", ")));
        if let Some(a) = &self.applied {
            out.push(format!("applied bound: {} {} ({})", bound_name(a.kind), a.value, self.status));
        }
        out.push(format!(
            "{} profiles checked, {} without positive welfare skipped, equilibrium verified on {} cells",
            self.profiles_checked, self.profiles_skipped, self.equilibrium_cells
        ));
        if let Some(w) = &self.witness {
            let idx: Vec<String> = w.valuation_indices.iter().map(ToString::to_string).collect();
            out.push(format!(
                "worst profile (valuations #{}): truthful choice {} with welfare {}, equilibrium choice {} with welfare {}",
                idx.join(", #"),
                w.dominant_alternative,
                w.dominant_welfare,
                w.equilibrium_alternative,
                w.equilibrium_welfare
            ));
        }
        out.join("\n")
    }
}

fn bound_name(kind: BoundKind) -> &'static str {
    match kind {
        BoundKind::Players => "players",
        BoundKind::Homogeneous => "homogeneous",
        BoundKind::Compatible => "compatible",
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MveViolationDoc {
    pub clause: MveClause,
    pub s: String,
    pub t: String,
    pub y: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct MveDoc {
    pub grid_points: usize,
    pub pass: bool,
    pub violation: Option<MveViolationDoc>,
}

impl MveDoc {
    pub fn new(grid_points: usize, verdict: &MveVerdict) -> Self {
        Self {
            grid_points,
            pass: verdict.is_pass(),
            violation: verdict.violation().map(|v| MveViolationDoc {
                clause: v.clause,
                s: format_rational(&v.s),
                t: format_rational(&v.t),
                y: format_rational(&v.y),
            }),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DecomposeDoc {
    pub command: &'static str,
    /// `segments`, `maps` or `sampled`.
    pub input: &'static str,
    pub status: &'static str,
    pub mve: MveDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<FunctionDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h1: Option<MapDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h2: Option<MapDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl DecomposeDoc {
    pub fn human(&self) -> String {
        let mut out = vec![format!("{} input: {}", self.input, self.status.to_uppercase())];
        match &self.mve.violation {
            None => out.push(format!("mean value exclusion holds on {} grid points", self.mve.grid_points)),
            Some(v) => out.push(format!(
                "mean value exclusion fails on {} grid points: s = {}, t = {}, y = {} ({:?})",
                self.mve.grid_points, v.s, v.t, v.y, v.clause
            )),
        }
        if let Some(d) = &self.decomposition {
            if d.segments.is_empty() {
                out.push("no segments: both maps are the identity".into());
            }
            for s in &d.segments {
                out.push(format!("segment ({}, {}) sign {}", s.lower, s.upper, s.sign));
            }
            if !d.choices.is_empty() {
                let c: Vec<String> = d.choices.iter().map(|c| format!("{c:?}").to_lowercase()).collect();
                out.push(format!("shared endpoint choices: {}", c.join(", ")));
            }
        }
        for (name, m) in [("h1", &self.h1), ("h2", &self.h2)] {
            if let Some(m) = m {
                let pieces: Vec<String> =
                    m.pieces.iter().map(|p| format!("({}, {}) -> {}", p.lower, p.upper, p.value)).collect();
                let points: Vec<String> = m.points.iter().map(|p| format!("{} -> {}", p.at, p.value)).collect();
                out.push(format!(
                    "{name}: identity except {}",
                    pieces.into_iter().chain(points).collect::<Vec<_>>().join("; ")
                ));
            }
        }
        if let Some(e) = &self.error {
            out.push(format!("error: {e}"));
        }
        out.join("\n")
    }
}
