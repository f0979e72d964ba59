//! The TOML function-pair format read by `decompose`.
//!
//! Exactly one of three forms:
//! * `[[segment]]` tables (`lower`, `upper`, `sign = "+"|"-"`) plus a
//!   top-level `choices = ["lower"|"upper", …]`, one per shared endpoint;
//!   the compatible pair is built from them.
//! * `[h1]` and `[h2]` interval maps: `pieces = [{lower, upper, value}]`
//!   (constant on the open interval) and `points = [{at, value}]`; the
//!   identity elsewhere.
//! * `[sampled]` with `grid`, `g1`, `g2`: values on a finite grid, for
//!   the mean-value-exclusion check only.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use vcglab::parallelogram::{
    ConstPiece, EndpointChoice, IntervalMap, SampledFunction, Segment, Sign, SignedDecomposition,
};
use vcglab::{format_rational, parse_rational, Rational};

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FunctionDoc {
    #[serde(default, skip_serializing_if = "Vec::is_empty", rename = "segment")]
    pub segments: Vec<SegmentDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub choices: Vec<ChoiceDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h1: Option<MapDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h2: Option<MapDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampled: Option<SampledDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentDoc {
    pub lower: String,
    pub upper: String,
    pub sign: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChoiceDoc {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    #[serde(default)]
    pub pieces: Vec<PieceDoc>,
    #[serde(default)]
    pub points: Vec<PointDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceDoc {
    pub lower: String,
    pub upper: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointDoc {
    pub at: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampledDoc {
    pub grid: Vec<String>,
    pub g1: Vec<String>,
    pub g2: Vec<String>,
}

/// A parsed function file.
#[derive(Debug, Clone)]
pub enum FunctionInput {
    Segments(SignedDecomposition),
    Maps(IntervalMap, IntervalMap),
    Sampled(SampledFunction, SampledFunction),
}

fn rational(text: &str, place: &str) -> Result<Rational, CliError> {
    parse_rational(text).map_err(|e| CliError::input(place, e))
}

fn rationals(list: &[String], place: &str) -> Result<Vec<Rational>, CliError> {
    list.iter().map(|t| rational(t, place)).collect()
}

fn map(doc: &MapDoc, place: &str) -> Result<IntervalMap, CliError> {
    let pieces = doc
        .pieces
        .iter()
        .map(|p| {
            Ok(ConstPiece {
                lower: rational(&p.lower, place)?,
                upper: rational(&p.upper, place)?,
                value: rational(&p.value, place)?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut points = BTreeMap::new();
    for p in &doc.points {
        let at = rational(&p.at, place)?;
        if points.insert(at.clone(), rational(&p.value, place)?).is_some() {
            return Err(CliError::semantic(place, format!("point {at} listed twice")));
        }
    }
    IntervalMap::new(pieces, points).map_err(|e| CliError::input(place, e))
}

pub fn parse_functions(text: &str) -> Result<FunctionInput, CliError> {
    let doc: FunctionDoc = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    let forms = [
        !doc.segments.is_empty() || !doc.choices.is_empty(),
        doc.h1.is_some() || doc.h2.is_some(),
        doc.sampled.is_some(),
    ];
    if forms.iter().filter(|f| **f).count() > 1 {
        return Err(CliError::semantic(
            "functions",
            "give segments, interval maps or samples, not several",
        ));
    }
    if let Some(s) = &doc.sampled {
        let grid = rationals(&s.grid, "sampled.grid")?;
        let g1 = SampledFunction::new(grid.clone(), rationals(&s.g1, "sampled.g1")?)
            .map_err(|e| CliError::input("sampled.g1", e))?;
        let g2 =
            SampledFunction::new(grid, rationals(&s.g2, "sampled.g2")?).map_err(|e| CliError::input("sampled.g2", e))?;
        return Ok(FunctionInput::Sampled(g1, g2));
    }
    if forms[1] {
        let h1 = map(doc.h1.as_ref().ok_or_else(|| CliError::semantic("h2", "[h1] is missing"))?, "h1")?;
        let h2 = map(doc.h2.as_ref().ok_or_else(|| CliError::semantic("h1", "[h2] is missing"))?, "h2")?;
        return Ok(FunctionInput::Maps(h1, h2));
    }
    let mut segments = Vec::new();
    let mut signs = Vec::new();
    for (k, s) in doc.segments.iter().enumerate() {
        let place = format!("segment {}", k + 1);
        let lower = rational(&s.lower, &place)?;
        let upper = rational(&s.upper, &place)?;
        segments.push(Segment::new(lower, upper).map_err(|e| CliError::input(&place, e))?);
        signs.push(match s.sign.as_str() {
            "+" => Sign::Plus,
            "-" => Sign::Minus,
            other => return Err(CliError::semantic(&place, format!("sign {other:?} is not \"+\" or \"-\""))),
        });
    }
    let choices = doc
        .choices
        .iter()
        .map(|c| match c {
            ChoiceDoc::Lower => EndpointChoice::Lower,
            ChoiceDoc::Upper => EndpointChoice::Upper,
        })
        .collect();
    let d = SignedDecomposition::new(segments, signs, choices).map_err(|e| CliError::input("segment", e))?;
    Ok(FunctionInput::Segments(d))
}

pub fn map_doc(m: &IntervalMap) -> MapDoc {
    MapDoc {
        pieces: m
            .pieces()
            .iter()
            .map(|p| PieceDoc {
                lower: format_rational(&p.lower),
                upper: format_rational(&p.upper),
                value: format_rational(&p.value),
            })
            .collect(),
        points: m
            .points()
            .iter()
            .map(|(at, value)| PointDoc {
                at: format_rational(at),
                value: format_rational(value),
            })
            .collect(),
    }
}

pub fn decomposition_doc(d: &SignedDecomposition) -> FunctionDoc {
    FunctionDoc {
        segments: d
            .segments()
            .iter()
            .zip(d.signs())
            .map(|(s, sign)| SegmentDoc {
                lower: format_rational(s.lower()),
                upper: format_rational(s.upper()),
                sign: if *sign == Sign::Plus { "+" } else { "-" }.into(),
            })
            .collect(),
        choices: d
            .choices()
            .iter()
            .map(|c| match c {
                EndpointChoice::Lower => ChoiceDoc::Lower,
                EndpointChoice::Upper => ChoiceDoc::Upper,
            })
            .collect(),
        ..FunctionDoc::default()
    }
}
