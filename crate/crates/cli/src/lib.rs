//! Command-line front end: instance and function-pair formats, the
//! `check`, `efficiency`, `decompose` and `generate` commands, and their
//! reports.
//!
//! Exit codes: `0` success (PASS, bound satisfied, pair decomposed),
//! `1` negative result (FAIL, bound violated or profile refused, pair not
//! decomposable), `2` unreadable or invalid input.

pub mod document;
pub mod error;
pub mod functions;
pub mod report;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use vcglab::auctions::{gen_sprime, gen_vickrey2};
use vcglab::efficiency::{bound_check, gen_example5, gen_example6};
use vcglab::equilibrium::{
    check_structural_lemmas, cross_check_deviations, is_expost_equilibrium, verify_near_truth_on_maxima,
    EquilibriumStatus,
};
use vcglab::grids::{gen_maxima_plus_ten, gen_near_truth};
use vcglab::parallelogram::{
    build_compatible_pair, check_mve, check_mve_sampled, decompose, refining_grid, uniform_grid, IntervalMap,
};
use vcglab::{parse_rational, Error as CoreError, Rational};

use crate::document::{parse_instance, to_document, write_document, CheckName};
use crate::error::CliError;
use crate::functions::{decomposition_doc, map_doc, parse_functions, FunctionInput};
use crate::report::{CheckReport, CrossCheckDoc, DecomposeDoc, EfficiencyDoc, MveDoc, NearTruthDoc, WitnessDoc};

#[derive(Debug, Parser)]
#[command(name = "vcglab", version, about = "Exact ex-post equilibrium and efficiency checks for VCG games")]
pub struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Refuse instances (and generated auctions) with more alternatives.
    #[arg(long, global = true, default_value_t = 1024)]
    pub max_alternatives: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Seed for the randomised deviation cross-check; never affects verdicts.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    /// JSON.
    Machine,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether the instance's profile is an ex-post equilibrium.
    Check {
        /// Instance document (TOML)
        file: PathBuf,
        /// Extra analyses, added to those listed in the file.
        #[arg(long, value_enum, value_delimiter = ',')]
        with: Vec<CheckArg>,
        /// Sampled deviations for the cross-check.
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Worst-case welfare ratio of an equilibrium profile against its bounds.
    Efficiency {
        /// Instance document (TOML)
        file: PathBuf,
    },
    /// Decompose a function pair into signed segments, or check mean value
    /// exclusion on sampled functions.
    Decompose {
        /// Function document (TOML)
        file: PathBuf,
        /// Also check mean value exclusion on the grid {0, STEP, 2·STEP, …}.
        #[arg(long, value_name = "STEP")]
        grid: Option<String>,
    },
    /// Print a generated instance document.
    Generate {
        #[arg(value_enum)]
        name: Generator,
        /// Players, or bidders for auctions
        #[arg(long)]
        players: Option<usize>,
        /// Alternatives (example6, maxima-plus-ten, near-truth)
        #[arg(long)]
        alternatives: Option<usize>,
        /// Truthful alternatives (near-truth).
        #[arg(long)]
        subset_size: Option<usize>,
        /// Perturbation "p/q" (example5, example6)
        #[arg(long)]
        epsilon: Option<String>,
        /// Valuations per player (sprime, maxima-plus-ten, near-truth).
        #[arg(long, default_value_t = 4)]
        grid_size: usize,
        /// Seed for drawing valuation grids.
        #[arg(long, default_value_t = 0)]
        grid_seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckArg {
    NearTruth,
    Lemmas,
    CrossCheck,
}

impl From<CheckArg> for CheckName {
    fn from(c: CheckArg) -> Self {
        match c {
            CheckArg::NearTruth => CheckName::NearTruth,
            CheckArg::Lemmas => CheckName::Lemmas,
            CheckArg::CrossCheck => CheckName::CrossCheck,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Generator {
    Vickrey2,
    Example5,
    Example6,
    Sprime,
    MaximaPlusTen,
    NearTruth,
}

/// Parses `args` (program name first) and runs the command, writing the
/// report to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        pool = pool.num_threads(j.max(1));
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker pool: {e}");
            return 2;
        }
    };
    let (result, buffer) = pool.install(|| {
        let mut buffer = Vec::new();
        (execute(&cli, &mut buffer), buffer)
    });
    if let Err(e) = out.write_all(&buffer) {
        let _ = writeln!(err, "error: cannot write output: {e}");
        return 2;
    }
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn emit<R: Serialize>(out: &mut dyn Write, format: Format, report: &R, human: String) -> Result<(), CliError> {
    let text = match format {
        Format::Human => human,
        Format::Machine => serde_json::to_string_pretty(report).map_err(|e| CliError::Output(e.to_string()))?,
    };
    writeln!(out, "{text}").map_err(|e| CliError::Output(e.to_string()))
}

fn core(place: &str) -> impl Fn(CoreError) -> CliError + '_ {
    move |e| CliError::input(place, e)
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::Check { file, with, samples } => {
            let loaded = parse_instance(&read(file)?, cli.max_alternatives)?;
            let mut checks = loaded.checks.clone();
            checks.extend(with.iter().map(|&c| CheckName::from(c)));
            let (instance, profile) = (&loaded.instance, &loaded.profile);
            let verdict = is_expost_equilibrium(instance, profile).map_err(core("check"))?;
            let mut report = CheckReport::new(loaded.name.clone(), instance, &verdict);
            if let EquilibriumStatus::Fail(w) = &verdict.status {
                let replayed = w.replay(instance, profile).map_err(core("witness replay"))?;
                report.witness = Some(WitnessDoc::new(instance, w, &replayed));
            }
            if checks.contains(&CheckName::NearTruth) {
                let r = verify_near_truth_on_maxima(instance, profile).map_err(core("near-truth"))?;
                report.near_truth = Some(NearTruthDoc::new(instance, &r));
            }
            if checks.contains(&CheckName::Lemmas) {
                match check_structural_lemmas(instance, profile) {
                    Ok(r) => report.lemmas = Some(report::lemma_docs(instance, &r)),
                    Err(e @ CoreError::MissingZValuation { .. }) => report.lemmas_skipped = Some(e.to_string()),
                    Err(e) => return Err(CliError::input("lemmas", e)),
                }
            }
            if checks.contains(&CheckName::CrossCheck) {
                let r = cross_check_deviations(instance, profile, *samples, cli.seed).map_err(core("cross-check"))?;
                report.cross_check = Some(CrossCheckDoc::from(&r));
            }
            let human = report.human();
            emit(out, cli.format, &report, human)?;
            Ok(if verdict.is_pass() { 0 } else { 1 })
        }
        Command::Efficiency { file } => {
            let loaded = parse_instance(&read(file)?, cli.max_alternatives)?;
            let (doc, code) = match bound_check(&loaded.instance, &loaded.profile) {
                Ok(r) => {
                    let code = if r.satisfied { 0 } else { 1 };
                    (EfficiencyDoc::new(loaded.name.clone(), &loaded.instance, &r), code)
                }
                Err(CoreError::NotAnEquilibrium) => (EfficiencyDoc::refused(loaded.name.clone()), 1),
                Err(e) => return Err(CliError::input("efficiency", e)),
            };
            let human = doc.human();
            emit(out, cli.format, &doc, human)?;
            Ok(code)
        }
        Command::Decompose { file, grid } => {
            let step = grid
                .as_deref()
                .map(|t| parse_rational(t).map_err(core("--grid")))
                .transpose()?;
            let doc = decompose_command(parse_functions(&read(file)?)?, step.as_ref())?;
            let code = if doc.status == "ok" { 0 } else { 1 };
            let human = doc.human();
            emit(out, cli.format, &doc, human)?;
            Ok(code)
        }
        Command::Generate {
            name,
            players,
            alternatives,
            subset_size,
            epsilon,
            grid_size,
            grid_seed,
        } => {
            let epsilon = epsilon
                .as_deref()
                .map(|t| parse_rational(t).map_err(core("--epsilon")))
                .transpose()?;
            let text = generate(
                *name,
                GenerateParams {
                    players: *players,
                    alternatives: *alternatives,
                    subset_size: *subset_size,
                    epsilon,
                    grid_size: *grid_size,
                    grid_seed: *grid_seed,
                    cap: cli.max_alternatives,
                },
            )?;
            write!(out, "{text}").map_err(|e| CliError::Output(e.to_string()))?;
            Ok(0)
        }
    }
}

/// The refining grid of both maps, merged with `{0, step, …}` up to two
/// past the last breakpoint.
fn check_grid(h1: &IntervalMap, h2: &IntervalMap, step: Option<&Rational>) -> Result<Vec<Rational>, CliError> {
    let base = refining_grid(&[h1, h2], &[]);
    let Some(step) = step else {
        return Ok(base);
    };
    let limit = base.last().cloned().unwrap_or_else(vcglab::rational::zero);
    let extra = uniform_grid(step, &limit).map_err(core("--grid"))?;
    Ok(refining_grid(&[h1, h2], &extra))
}

fn decompose_command(input: FunctionInput, step: Option<&Rational>) -> Result<DecomposeDoc, CliError> {
    match input {
        FunctionInput::Sampled(g1, g2) => {
            if step.is_some() {
                return Err(CliError::semantic("--grid", "sampled functions carry their own grid"));
            }
            let verdict = check_mve_sampled(&g1, &g2);
            let points: std::collections::BTreeSet<&Rational> = g1.grid().iter().chain(g2.grid()).collect();
            Ok(DecomposeDoc {
                command: "decompose",
                input: "sampled",
                status: if verdict.is_pass() { "ok" } else { "fail" },
                mve: MveDoc::new(points.len(), &verdict),
                decomposition: None,
                h1: None,
                h2: None,
                error: None,
            })
        }
        FunctionInput::Segments(d) => {
            let (h1, h2) = build_compatible_pair(&d);
            let grid = check_grid(&h1, &h2, step)?;
            let verdict = check_mve(&h1, &h2, &grid);
            let (status, error) = match decompose(&h1, &h2) {
                Ok(back) if back == d && verdict.is_pass() => ("ok", None),
                Ok(back) => ("fail", Some(format!("round trip recovered {} segments", back.len()))),
                Err(e) => ("fail", Some(e.to_string())),
            };
            Ok(DecomposeDoc {
                command: "decompose",
                input: "segments",
                status,
                mve: MveDoc::new(grid.len(), &verdict),
                decomposition: Some(decomposition_doc(&d)),
                h1: Some(map_doc(&h1)),
                h2: Some(map_doc(&h2)),
                error,
            })
        }
        FunctionInput::Maps(h1, h2) => {
            let grid = check_grid(&h1, &h2, step)?;
            let verdict = check_mve(&h1, &h2, &grid);
            let (status, decomposition, error) = match decompose(&h1, &h2) {
                Ok(d) if verdict.is_pass() => ("ok", Some(decomposition_doc(&d)), None),
                Ok(d) => ("fail", Some(decomposition_doc(&d)), Some("mean value exclusion fails on the finer grid".into())),
                Err(e) => ("fail", None, Some(e.to_string())),
            };
            Ok(DecomposeDoc {
                command: "decompose",
                input: "maps",
                status,
                mve: MveDoc::new(grid.len(), &verdict),
                decomposition,
                h1: None,
                h2: None,
                error,
            })
        }
    }
}

/// Generator parameters; unset values take per-generator defaults.
#[derive(Debug, Clone)]
pub struct GenerateParams {
    pub players: Option<usize>,
    pub alternatives: Option<usize>,
    pub subset_size: Option<usize>,
    pub epsilon: Option<Rational>,
    pub grid_size: usize,
    pub grid_seed: u64,
    pub cap: usize,
}

/// The instance document for a named generator.
pub fn generate(name: Generator, p: GenerateParams) -> Result<String, CliError> {
    let g = |e| CliError::input("generate", e);
    let eps = |default: (i64, i64)| {
        p.epsilon
            .clone()
            .unwrap_or_else(|| vcglab::rational::rat(default.0, default.1))
    };
    let doc = match name {
        Generator::Vickrey2 => {
            let ex = gen_vickrey2().map_err(g)?;
            to_document("vickrey2", &ex.instance, &ex.profile, Some(&ex.allocations), Vec::new())?
        }
        Generator::Example5 => {
            let n = p.players.unwrap_or(4);
            let e = eps((1, 100));
            let ex = gen_example5(n, &e, p.cap).map_err(g)?;
            to_document(
                &format!("example5 n={n} epsilon={e}"),
                &ex.instance,
                &ex.profile,
                ex.allocations.as_ref(),
                Vec::new(),
            )?
        }
        Generator::Example6 => {
            let n = p.players.unwrap_or(3);
            let m = p.alternatives.unwrap_or(n + 2);
            let e = eps((1, 10));
            let ex = gen_example6(m, n, &e).map_err(g)?;
            to_document(&format!("example6 n={n} epsilon={e}"), &ex.instance, &ex.profile, None, Vec::new())?
        }
        Generator::Sprime => {
            let ex = gen_sprime(p.grid_size, p.grid_seed).map_err(g)?;
            to_document(
                "sprime",
                &ex.example.instance,
                &ex.example.profile,
                Some(&ex.example.allocations),
                vec![CheckName::Lemmas],
            )?
        }
        Generator::MaximaPlusTen => {
            let n = p.players.unwrap_or(3);
            let m = p.alternatives.unwrap_or(5);
            let x = gen_maxima_plus_ten(n, m, p.grid_size, p.grid_seed).map_err(g)?;
            to_document(
                "maxima-plus-ten",
                &x.instance,
                &x.profile,
                None,
                vec![CheckName::NearTruth, CheckName::Lemmas],
            )?
        }
        Generator::NearTruth => {
            let n = p.players.unwrap_or(3);
            let m = p.alternatives.unwrap_or(n + 2);
            let k = p.subset_size.unwrap_or(n + 1);
            let x = gen_near_truth(n, m, k, p.grid_size, p.grid_seed).map_err(g)?;
            to_document("near-truth", &x.instance, &x.profile, None, vec![CheckName::Lemmas])?
        }
    };
    write_document(&doc)
}
