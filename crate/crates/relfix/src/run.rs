//! Solver dispatch: turns a [`RunConfig`] into a [`Report`] and an exit code.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relfix_core::bailey::{bailey_iterate, bailey_residuals};
use relfix_core::criteria::{sample_jacobian_norms, Verdict};
use relfix_core::leslie_gower::{bh_map, diagnose, iterate_lg, solve_linear, LgModel};
use relfix_core::rating::{assemble_rates, indicated_base_rate};
use relfix_core::rerate::{fixed_point_residual, iterate_from_ones, multi_start_spread};
use relfix_core::sampling::{random_positive_state, random_positive_vector};
use relfix_core::{certify, compute_box, FactorState, IterationSettings, IterationTrace, Norm, RatingProblem};

use crate::digest::{lg_digest, rating_digest};
use crate::ingest::{read_lg_json, read_rating_csv, RatingData};
use crate::report::*;

/// Points drawn from `U` when sampling the Jacobian.
pub const JACOBIAN_SAMPLES: usize = 200;
/// Starts used by the multi-start checks, the first being all ones.
pub const RATING_STARTS: usize = 10;
pub const LG_STARTS: usize = 5;
/// Tolerance for iteration limit vs. linear solution in `lg`.
pub const LG_AGREEMENT: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Rate,
    Certify,
    Lg,
    Bailey,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input: PathBuf,
    pub plr: f64,
    /// `None` picks the per-command default.
    pub tolerance: Option<f64>,
    pub max_iters: Option<usize>,
    pub seed: u64,
    pub format: Format,
    pub strict: bool,
    pub shrink: f64,
    pub base_cell: Option<Vec<usize>>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command, input: impl Into<PathBuf>) -> Self {
        Self {
            command,
            input: input.into(),
            plr: 1.0,
            tolerance: None,
            max_iters: None,
            seed: 0,
            format: Format::Text,
            strict: true,
            shrink: 0.5,
            base_cell: None,
            out: None,
        }
    }

    fn settings(&self, defaults: IterationSettings) -> anyhow::Result<IterationSettings> {
        Ok(IterationSettings::new(
            self.tolerance.unwrap_or(defaults.tolerance()),
            self.max_iters.unwrap_or(defaults.max_iters()),
            Norm::Infinity,
        )?)
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    /// 0, or 2 when an iteration stopped without converging.
    pub exit_code: i32,
}

impl Outcome {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.report.to_text(),
            Format::Json => self.report.to_json(),
        }
    }
}

pub fn run(config: &RunConfig) -> anyhow::Result<Outcome> {
    if !config.input.exists() {
        anyhow::bail!("input file {} does not exist", config.input.display());
    }
    match config.command {
        Command::Rate => run_rate(config),
        Command::Certify => run_certify(config),
        Command::Lg => run_lg(config),
        Command::Bailey => run_bailey(config),
    }
}

/// Runs `config` and writes the rendered report to `--out` or stdout.
pub fn run_and_write(config: &RunConfig) -> anyhow::Result<i32> {
    let outcome = run(config)?;
    let text = outcome.render(config.format);
    match &config.out {
        Some(path) => write_atomic(path, text.as_bytes())?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(outcome.exit_code)
}

/// Writes to a temporary file beside `path`, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)?;
    Ok(())
}

fn load_rating(config: &RunConfig) -> anyhow::Result<(RatingData, RatingProblem)> {
    let data = read_rating_csv(&config.input, config.strict, config.base_cell.as_deref())?;
    let problem = data.to_problem(config.plr, config.strict)?;
    Ok((data, problem))
}

fn echo(data: &RatingData, problem: &RatingProblem) -> RatingEcho {
    RatingEcho {
        axis_names: data.axis_names.clone(),
        dims: data.dims.clone(),
        levels: data.levels.clone(),
        plr: problem.plr(),
        total_exposure: problem.exposures().total(),
        total_loss: problem.total_loss(),
        digest: rating_digest(&data.dims, &data.exposures, &data.losses),
    }
}

fn summary<S>(trace: &IterationTrace<S>, settings: &IterationSettings) -> TraceSummary {
    TraceSummary {
        converged: trace.converged,
        iterations: trace.iterations_used,
        final_residual: trace.last_residual(),
        tolerance: settings.tolerance(),
        max_iters: settings.max_iters(),
    }
}

/// Certificate when one applies, plus the sampled-Jacobian and multi-start
/// checks, all driven by `seed`.
fn certification(problem: &RatingProblem, settings: &IterationSettings, seed: u64) -> anyhow::Result<Certification> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (certificate, note) = if !problem.is_strict() {
        (None, Some("certificates require strict input".to_string()))
    } else {
        match certify(problem) {
            Ok(c) => (
                Some(CertificateReport {
                    verdict: match c.verdict {
                        Verdict::CertifiedUnique => "certified-unique",
                        Verdict::Uncertified => "uncertified",
                    },
                    rho_inf: c.rho_inf,
                    rho_1: c.rho_1,
                    r_inf: c.r_inf,
                    r_1: c.r_1,
                    rho: c.rho,
                    r: c.r,
                }),
                None,
            ),
            Err(e) => (None, Some(format!("{e}; multi-start check reported instead"))),
        }
    };
    let sampled_jacobian = match compute_box(problem) {
        Ok(domain) => {
            let s = sample_jacobian_norms(problem, &domain, &mut rng, JACOBIAN_SAMPLES)?;
            Some(SampledJacobian {
                samples: s.samples,
                max_norm_inf: s.max_inf,
                max_norm_1: s.max_1,
            })
        }
        Err(_) => None,
    };
    let mut starts = vec![FactorState::ones(problem.dims())];
    starts.extend((1..RATING_STARTS).map(|_| random_positive_state(&mut rng, problem.dims(), 0.1, 10.0)));
    let multi = multi_start_spread(problem, &starts, settings)?;
    Ok(Certification {
        certificate,
        note,
        checks: Checks {
            seed,
            sampled_jacobian,
            multi_start: Some(MultiStartReport {
                starts: multi.starts,
                spread: multi.spread,
                all_converged: multi.all_converged,
            }),
        },
    })
}

fn run_rate(config: &RunConfig) -> anyhow::Result<Outcome> {
    let (data, problem) = load_rating(config)?;
    let settings = config.settings(IterationSettings::default())?;
    let trace = iterate_from_ones(&problem, &settings)?;
    let factors = trace.last();
    let base_rate = indicated_base_rate(&problem, factors)?;
    let rates = assemble_rates(base_rate, factors)?;
    let blocks = factors
        .blocks()
        .iter()
        .enumerate()
        .map(|(t, b)| Block {
            name: data.axis_names[t].clone(),
            levels: data.levels[t].clone(),
            factors: b.clone(),
        })
        .collect();
    let report = RateReport {
        command: "rate",
        problem: echo(&data, &problem),
        iteration: summary(&trace, &settings),
        fixed_point_residual: fixed_point_residual(&problem, factors, Norm::Infinity)?,
        factors: blocks,
        base_rate,
        rates: RateTable {
            dims: rates.dims().to_vec(),
            values: rates.values().to_vec(),
        },
        certification: certification(&problem, &settings, config.seed)?,
    };
    Ok(Outcome {
        exit_code: if trace.converged { 0 } else { 2 },
        report: Report::Rate(report),
    })
}

fn run_certify(config: &RunConfig) -> anyhow::Result<Outcome> {
    let (data, problem) = load_rating(config)?;
    let settings = config.settings(IterationSettings::default())?;
    let cert = certification(&problem, &settings, config.seed)?;
    let converged = cert.checks.multi_start.as_ref().is_none_or(|m| m.all_converged);
    let certified = cert.certificate.as_ref().is_some_and(|c| c.verdict == "certified-unique");
    Ok(Outcome {
        exit_code: if converged || certified { 0 } else { 2 },
        report: Report::Certify(CertifyReport {
            command: "certify",
            problem: echo(&data, &problem),
            certification: cert,
        }),
    })
}

fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max)
}

fn run_lg(config: &RunConfig) -> anyhow::Result<Outcome> {
    let model: LgModel = read_lg_json(&config.input)?;
    let settings = config.settings(IterationSettings::leslie_gower())?;
    let diag = diagnose(&model, config.shrink)?;
    let (linear_solution, linear_note) = match solve_linear(&model) {
        Ok(sol) => {
            let image = bh_map(&model, &sol.x);
            (
                Some(LinearReport {
                    map_residual: sup_distance(&image, &sol.x),
                    x: sol.x,
                    positive: sol.positive,
                }),
                None,
            )
        }
        Err(e) => (None, Some(e.to_string())),
    };
    let d = model.species();
    let trace = iterate_lg(&model, &vec![1.0; d], &settings)?;
    let limit = trace.last().clone();
    let mut converged = trace.converged;
    let agreement = match &linear_solution {
        Some(sol) if sol.positive => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let mut worst: f64 = 0.0;
            for _ in 0..LG_STARTS {
                let start = random_positive_vector(&mut rng, d, 0.01, 10.0);
                let t = iterate_lg(&model, &start, &settings)?;
                converged &= t.converged;
                worst = worst.max(sup_distance(t.last(), &sol.x));
            }
            let distance = sup_distance(&limit, &sol.x);
            Some(Agreement {
                distance,
                multi_start_distance: worst,
                starts: LG_STARTS,
                tolerance: LG_AGREEMENT,
                agree: distance.max(worst) <= LG_AGREEMENT,
            })
        }
        _ => None,
    };
    let c = model.c();
    let report = LgReport {
        command: "lg",
        model: LgEcho {
            species: d,
            b: model.b().to_vec(),
            c: (0..c.rows()).map(|i| c.row(i).to_vec()).collect(),
            digest: lg_digest(&model),
        },
        diagnostics: LgDiagnosticsReport {
            growth_ok: diag.growth_ok,
            rank_consistent: diag.rank_consistent,
            invertible: diag.invertible,
            weak_competition: diag.weak_competition,
            weak_competition_tight: diag.weak_competition_tight,
            slack: diag.slack,
            carrying_capacities: diag.carrying_capacities,
            box_lower: diag.trapping_box.as_ref().map(|b| b.lower.clone()),
            box_upper: diag.trapping_box.as_ref().map(|b| b.upper.clone()),
        },
        linear_solution,
        linear_note,
        iteration: summary(&trace, &settings),
        limit,
        agreement,
        seed: config.seed,
    };
    Ok(Outcome {
        exit_code: if converged { 0 } else { 2 },
        report: Report::Lg(report),
    })
}

fn run_bailey(config: &RunConfig) -> anyhow::Result<Outcome> {
    let data = read_rating_csv(&config.input, true, config.base_cell.as_deref())?;
    let bailey = data.to_bailey()?;
    let settings = config.settings(IterationSettings::default())?;
    let (m, n) = (data.dims[0], data.dims[1]);
    let run = bailey_iterate(&bailey, &vec![1.0; m], &vec![1.0; n], &settings)?;
    let (rows, cols) = bailey_residuals(&bailey, &run.fit.x, &run.fit.y);
    let problem = data.to_problem(config.plr, true)?;
    let (loss_ratio, loss_ratio_note) = match iterate_from_ones(&problem, &settings) {
        Ok(trace) => {
            let f = trace.last();
            let y0 = run.fit.y[0];
            let y_scaled: Vec<f64> = run.fit.y.iter().map(|v| v / y0).collect();
            let distance = sup_distance(f.block(0), &run.fit.x).max(sup_distance(f.block(1), &y_scaled));
            (
                Some(LossRatioComparison {
                    x: f.block(0).to_vec(),
                    y: f.block(1).to_vec(),
                    distance,
                }),
                None,
            )
        }
        Err(e) => (None, Some(e.to_string())),
    };
    let report = BaileyReport {
        command: "bailey",
        problem: echo(&data, &problem),
        iteration: summary(&run.trace, &settings),
        x: run.fit.x.clone(),
        y: run.fit.y.clone(),
        row_residuals: rows,
        column_residuals: cols,
        loss_ratio,
        loss_ratio_note,
    };
    Ok(Outcome {
        exit_code: if run.trace.converged { 0 } else { 2 },
        report: Report::Bailey(report),
    })
}
