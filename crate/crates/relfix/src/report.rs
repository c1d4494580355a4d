//! Report documents. JSON is the machine-readable form; the text form is a
//! rendering of the same data.
//!
//! Floats are printed in shortest round-trip form in both (`{:?}` in text),
//! and nothing time- or host-dependent is included, so equal inputs give equal
//! bytes.

use std::fmt::Write as _;

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct RatingEcho {
    pub axis_names: Vec<String>,
    pub dims: Vec<usize>,
    /// Original index at each position, after any base-cell swap.
    pub levels: Vec<Vec<usize>>,
    pub plr: f64,
    pub total_exposure: f64,
    pub total_loss: f64,
    pub digest: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceSummary {
    pub converged: bool,
    pub iterations: usize,
    pub final_residual: Option<f64>,
    pub tolerance: f64,
    pub max_iters: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Block {
    pub name: String,
    pub levels: Vec<usize>,
    pub factors: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateTable {
    pub dims: Vec<usize>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub verdict: &'static str,
    pub rho_inf: f64,
    pub rho_1: f64,
    pub r_inf: f64,
    pub r_1: f64,
    pub rho: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SampledJacobian {
    pub samples: usize,
    pub max_norm_inf: f64,
    pub max_norm_1: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MultiStartReport {
    pub starts: usize,
    pub spread: f64,
    pub all_converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Checks {
    pub seed: u64,
    pub sampled_jacobian: Option<SampledJacobian>,
    pub multi_start: Option<MultiStartReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certification {
    pub certificate: Option<CertificateReport>,
    /// Why no certificate was produced, when it was not.
    pub note: Option<String>,
    pub checks: Checks,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateReport {
    pub command: &'static str,
    pub problem: RatingEcho,
    pub iteration: TraceSummary,
    pub fixed_point_residual: f64,
    pub factors: Vec<Block>,
    pub base_rate: f64,
    pub rates: RateTable,
    pub certification: Certification,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertifyReport {
    pub command: &'static str,
    pub problem: RatingEcho,
    pub certification: Certification,
}

#[derive(Debug, Clone, Serialize)]
pub struct LgEcho {
    pub species: usize,
    pub b: Vec<f64>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
    pub digest: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct LgDiagnosticsReport {
    pub growth_ok: bool,
    pub rank_consistent: bool,
    pub invertible: bool,
    pub weak_competition: bool,
    pub weak_competition_tight: bool,
    pub slack: Vec<f64>,
    pub carrying_capacities: Vec<f64>,
    pub box_lower: Option<Vec<f64>>,
    pub box_upper: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LinearReport {
    pub x: Vec<f64>,
    pub positive: bool,
    /// `‖bh_map(x) − x‖∞` at the linear solution.
    pub map_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Agreement {
    /// ∞-distance between the iteration limit and the linear solution.
    pub distance: f64,
    /// Largest such distance over the seeded random starts.
    pub multi_start_distance: f64,
    pub starts: usize,
    pub tolerance: f64,
    pub agree: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LgReport {
    pub command: &'static str,
    pub model: LgEcho,
    pub diagnostics: LgDiagnosticsReport,
    pub linear_solution: Option<LinearReport>,
    pub linear_note: Option<String>,
    pub iteration: TraceSummary,
    pub limit: Vec<f64>,
    pub agreement: Option<Agreement>,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LossRatioComparison {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// ∞-distance to the Bailey relativities, both scaled to `x[0] = y[0] = 1`.
    pub distance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BaileyReport {
    pub command: &'static str,
    pub problem: RatingEcho,
    pub iteration: TraceSummary,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub row_residuals: Vec<f64>,
    pub column_residuals: Vec<f64>,
    pub loss_ratio: Option<LossRatioComparison>,
    pub loss_ratio_note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Report {
    Rate(RateReport),
    Certify(CertifyReport),
    Lg(LgReport),
    Bailey(BaileyReport),
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self {
            Report::Rate(r) => {
                out.push_str("relfix rate\n");
                rating_echo(&mut out, &r.problem);
                trace(&mut out, &r.iteration);
                line(&mut out, "fixed-point residual", r.fixed_point_residual);
                out.push_str("\nindicated relativities\n");
                for b in &r.factors {
                    let _ = writeln!(out, "  {}:", b.name);
                    for (level, f) in b.levels.iter().zip(&b.factors) {
                        let _ = writeln!(out, "    {level:>4}  {f:?}");
                    }
                }
                let _ = writeln!(out, "\nbase rate: {:?}", r.base_rate);
                let _ = writeln!(out, "rate table ({} cells, row-major):", r.rates.values.len());
                for v in &r.rates.values {
                    let _ = writeln!(out, "  {v:?}");
                }
                certification(&mut out, &r.certification);
            }
            Report::Certify(r) => {
                out.push_str("relfix certify\n");
                rating_echo(&mut out, &r.problem);
                certification(&mut out, &r.certification);
            }
            Report::Lg(r) => {
                out.push_str("relfix lg\n");
                let _ = writeln!(out, "species: {}", r.model.species);
                list(&mut out, "b", &r.model.b);
                for (i, row) in r.model.c.iter().enumerate() {
                    list(&mut out, &format!("C[{i}]"), row);
                }
                let _ = writeln!(out, "digest: {}", r.model.digest);
                let d = &r.diagnostics;
                out.push_str("\ndiagnostics\n");
                let _ = writeln!(out, "  growth_ok: {}", d.growth_ok);
                let _ = writeln!(out, "  rank_consistent: {}", d.rank_consistent);
                let _ = writeln!(out, "  invertible: {}", d.invertible);
                let _ = writeln!(out, "  weak_competition: {} (tight: {})", d.weak_competition, d.weak_competition_tight);
                list(&mut out, "  slack", &d.slack);
                list(&mut out, "  carrying capacities", &d.carrying_capacities);
                if let (Some(lo), Some(hi)) = (&d.box_lower, &d.box_upper) {
                    list(&mut out, "  box lower", lo);
                    list(&mut out, "  box upper", hi);
                }
                out.push('\n');
                match &r.linear_solution {
                    Some(l) => {
                        list(&mut out, "linear solution", &l.x);
                        let _ = writeln!(out, "  positive: {}", l.positive);
                        let _ = writeln!(out, "  map residual: {:?}", l.map_residual);
                    }
                    None => {
                        let _ = writeln!(out, "linear solution: none ({})", r.linear_note.as_deref().unwrap_or(""));
                    }
                }
                trace(&mut out, &r.iteration);
                list(&mut out, "iteration limit", &r.limit);
                if let Some(a) = &r.agreement {
                    let _ = writeln!(
                        out,
                        "agreement: {} (distance {:?}, {} random starts max {:?}, tolerance {:?})",
                        if a.agree { "yes" } else { "no" },
                        a.distance,
                        a.starts,
                        a.multi_start_distance,
                        a.tolerance
                    );
                }
                let _ = writeln!(out, "seed: {}", r.seed);
            }
            Report::Bailey(r) => {
                out.push_str("relfix bailey\n");
                rating_echo(&mut out, &r.problem);
                trace(&mut out, &r.iteration);
                list(&mut out, "x", &r.x);
                list(&mut out, "y", &r.y);
                list(&mut out, "row residuals", &r.row_residuals);
                list(&mut out, "column residuals", &r.column_residuals);
                match &r.loss_ratio {
                    Some(c) => {
                        out.push_str("\nloss-ratio relativities\n");
                        list(&mut out, "  x", &c.x);
                        list(&mut out, "  y", &c.y);
                        let _ = writeln!(out, "  distance to Bailey (both normalized): {:?}", c.distance);
                    }
                    None => {
                        let _ = writeln!(out, "\nloss-ratio relativities: none ({})", r.loss_ratio_note.as_deref().unwrap_or(""));
                    }
                }
            }
        }
        out
    }
}

fn line(out: &mut String, key: &str, v: f64) {
    let _ = writeln!(out, "{key}: {v:?}");
}

fn list(out: &mut String, key: &str, v: &[f64]) {
    let items: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
    let _ = writeln!(out, "{key}: [{}]", items.join(", "));
}

fn rating_echo(out: &mut String, p: &RatingEcho) {
    let _ = writeln!(out, "factors: {} {:?}", p.axis_names.join(" x "), p.dims);
    let _ = writeln!(out, "total exposure: {:?}", p.total_exposure);
    let _ = writeln!(out, "total loss: {:?}", p.total_loss);
    let _ = writeln!(out, "permissible loss ratio: {:?}", p.plr);
    let _ = writeln!(out, "digest: {}", p.digest);
}

fn trace(out: &mut String, t: &TraceSummary) {
    let _ = writeln!(
        out,
        "\niteration: {} after {} of at most {} steps (tolerance {:?})",
        if t.converged { "converged" } else { "NOT converged" },
        t.iterations,
        t.max_iters,
        t.tolerance
    );
    if let Some(r) = t.final_residual {
        let _ = writeln!(out, "final step size: {r:?}");
    }
}

fn certification(out: &mut String, c: &Certification) {
    out.push_str("\ncertificate\n");
    match &c.certificate {
        Some(cert) => {
            let _ = writeln!(out, "  verdict: {}", cert.verdict);
            let _ = writeln!(out, "  rho_inf: {:?}", cert.rho_inf);
            let _ = writeln!(out, "  rho_1: {:?}", cert.rho_1);
            let _ = writeln!(out, "  r_inf: {:?}", cert.r_inf);
            let _ = writeln!(out, "  r_1: {:?}", cert.r_1);
        }
        None => {
            let _ = writeln!(out, "  none: {}", c.note.as_deref().unwrap_or(""));
        }
    }
    let _ = writeln!(out, "  seed: {}", c.checks.seed);
    if let Some(s) = &c.checks.sampled_jacobian {
        let _ = writeln!(
            out,
            "  sampled Jacobian over {} points: max inf-norm {:?}, max 1-norm {:?}",
            s.samples, s.max_norm_inf, s.max_norm_1
        );
    }
    if let Some(m) = &c.checks.multi_start {
        let _ = writeln!(
            out,
            "  multi-start ({} starts): spread {:?}, all converged: {}",
            m.starts, m.spread, m.all_converged
        );
    }
}
