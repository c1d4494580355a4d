//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs without the libtest harness so the lines always show.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relfix_core::bailey::{bailey_iterate, bailey_residuals, BaileyProblem};
use relfix_core::criteria::{jacobian, sample_jacobian_norms, JacobianConvention};
use relfix_core::leslie_gower::{bh_map, check_necessary, iterate_lg, solve_linear, LgModel};
use relfix_core::rating::indicated_base_rate;
use relfix_core::rerate::{fixed_point_residual, iterate, iterate_from_ones, phi};
use relfix_core::sampling::{random_positive_state, random_positive_vector};
use relfix_core::{
    certify, compute_box, FactorState, IterationSettings, Matrix, Norm, RatingProblem, RiskTensor, Verdict,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn problem(rng: &mut ChaCha8Rng, dims: &[usize], loss: (f64, f64), exposure: (f64, f64)) -> RatingProblem {
    let len = dims.iter().product();
    let l: Vec<f64> = (0..len).map(|_| rng.gen_range(loss.0..loss.1)).collect();
    let e: Vec<f64> = (0..len).map(|_| rng.gen_range(exposure.0..exposure.1)).collect();
    RatingProblem::new(
        RiskTensor::with_default_names(dims.to_vec(), l).unwrap(),
        RiskTensor::with_default_names(dims.to_vec(), e).unwrap(),
        1.0,
    )
    .unwrap()
}

fn sup(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max)
}

fn jacobian_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    let mut instances = 0;
    for dims in [[2, 2, 2], [3, 3, 2]] {
        for _ in 0..10 {
            let p = problem(&mut rng, &dims, (1.0, 20.0), (1.0, 10.0));
            let f = random_positive_state(&mut rng, &dims, 0.5, 2.0);
            let jac = jacobian(&p, &f, JacobianConvention::Full).unwrap();
            let flat = f.to_flat();
            for col in 0..flat.len() {
                let shifted = |delta: f64| {
                    let mut g = flat.clone();
                    g[col] += delta;
                    phi(&p, &FactorState::from_flat(&dims, &g).unwrap()).unwrap().to_flat()
                };
                let (plus, minus) = (shifted(h), shifted(-h));
                for row in 0..flat.len() {
                    let fd = (plus[row] - minus[row]) / (2.0 * h);
                    worst = worst.max((fd - jac.get(row, col)).abs());
                }
            }
            instances += 1;
        }
    }
    outcome(
        worst <= 1e-6,
        format!("{instances} instances, max |analytic - central difference| = {worst:.3e} (limit 1e-6)"),
    )
}

fn certificate_instances() -> Vec<RatingProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    (0..20)
        .map(|k| {
            let dims = if k % 2 == 0 { [2, 2, 2] } else { [3, 3, 2] };
            let spread = [0.05, 0.5, 2.0, 9.0][k % 4];
            problem(&mut rng, &dims, (1.0, 20.0), (1.0, 1.0 + spread))
        })
        .collect()
}

fn certificate_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = 0;
    let mut margin_inf = f64::INFINITY;
    let mut margin_1 = f64::INFINITY;
    let instances = certificate_instances();
    for p in &instances {
        let cert = certify(p).unwrap();
        let s = sample_jacobian_norms(p, &cert.domain, &mut rng, 200).unwrap();
        if s.max_inf > cert.rho_inf + 1e-12 || s.max_1 > cert.rho_1 + 1e-12 {
            failures += 1;
        }
        if cert.rho_inf > cert.r_inf || cert.rho_1 > cert.r_1 {
            failures += 1;
        }
        margin_inf = margin_inf.min(cert.rho_inf - s.max_inf);
        margin_1 = margin_1.min(cert.rho_1 - s.max_1);
    }
    outcome(
        failures == 0,
        format!(
            "{} instances x 200 points, {failures} violations; min rho_inf - |J|_inf = {margin_inf:.3e}, min rho_1 - |J|_1 = {margin_1:.3e}",
            instances.len()
        ),
    )
}

fn certified_convergence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let settings = IterationSettings::default();
    let (mut spread, mut residual, mut max_rho): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut ok = true;
    let instances = 12;
    for k in 0..instances {
        let dims = if k % 2 == 0 { [2, 2, 2] } else { [3, 3, 2] };
        let p = problem(&mut rng, &dims, (5.0, 15.0), (1.0, 1.01));
        let cert = certify(&p).unwrap();
        ok &= cert.verdict == Verdict::CertifiedUnique && cert.rho < 1.0;
        max_rho = max_rho.max(cert.rho);
        let mut first: Option<FactorState> = None;
        for _ in 0..10 {
            let start = random_positive_state(&mut rng, &dims, 0.1, 10.0);
            let trace = iterate(&p, &start, &settings).unwrap();
            ok &= trace.converged;
            let limit = trace.into_last();
            residual = residual.max(fixed_point_residual(&p, &limit, Norm::Infinity).unwrap());
            match &first {
                None => first = Some(limit),
                Some(f) => spread = spread.max(f.distance(&limit, Norm::Infinity)),
            }
        }
    }
    outcome(
        ok && spread <= 1e-8 && residual <= 1e-9,
        format!(
            "{instances} instances, max rho = {max_rho:.3e}; limit spread {spread:.3e} (limit 1e-8), residual {residual:.3e} (limit 1e-9)"
        ),
    )
}

fn box_trapping() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut violations = 0;
    let instances = certificate_instances();
    for p in &instances {
        let u = compute_box(p).unwrap();
        for _ in 0..200 {
            let f = random_positive_state(&mut rng, p.dims(), 1e-3, 1e3);
            violations += u.violations(&phi(p, &f).unwrap(), 1e-12);
        }
    }
    outcome(
        violations == 0,
        format!("{} instances x 200 states, {violations} coordinates outside U", instances.len()),
    )
}

fn degenerate_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let settings = IterationSettings::default();
    let mut ok = true;
    for dims in [[2, 2, 2], [3, 3, 2], [4, 2, 3]] {
        let len = dims.iter().product();
        let l: Vec<f64> = (0..len).map(|_| rng.gen_range(1.0..20.0)).collect();
        let p = RatingProblem::new(
            RiskTensor::with_default_names(dims.to_vec(), l).unwrap(),
            RiskTensor::filled(dims.to_vec(), 7.5).unwrap(),
            1.0,
        )
        .unwrap();
        let c = certify(&p).unwrap();
        ok &= [c.rho_inf, c.rho_1, c.r_inf, c.r_1].iter().all(|&v| v == 0.0);
        let start = random_positive_state(&mut rng, &dims, 0.1, 10.0);
        let trace = iterate(&p, &start, &settings).unwrap();
        // the first image is already the fixed point
        ok &= trace.converged && trace.iterations_used <= 2;
        ok &= fixed_point_residual(&p, &trace.iterates[1], Norm::Infinity).unwrap() == 0.0;
    }
    let uniform = RatingProblem::new(
        RiskTensor::filled(vec![3, 2, 2], 4.0).unwrap(),
        RiskTensor::filled(vec![3, 2, 2], 2.0).unwrap(),
        1.0,
    )
    .unwrap();
    let trace = iterate_from_ones(&uniform, &settings).unwrap();
    let ones_exact = *trace.last() == FactorState::ones(&[3, 2, 2]) && trace.iterations_used == 1;
    outcome(
        ok && ones_exact,
        format!("constant exposures: all four bounds exactly 0 and one-step limit: {ok}; uniform data gives exact ones: {ones_exact}"),
    )
}

fn weak_model(rng: &mut ChaCha8Rng, d: usize) -> LgModel {
    let b: Vec<f64> = (0..d).map(|_| rng.gen_range(1.5..4.0)).collect();
    let diag: Vec<f64> = (0..d).map(|_| rng.gen_range(0.5..2.0)).collect();
    let mut c = Matrix::diagonal(&diag);
    for i in 0..d {
        let budget = rng.gen_range(0.1..0.9) * (b[i] - 1.0);
        let w: Vec<f64> = (0..d).map(|j| if j == i { 0.0 } else { rng.gen_range(0.0..1.0) }).collect();
        let total: f64 = (0..d).map(|j| w[j] * b[j] / diag[j]).sum();
        for j in (0..d).filter(|&j| j != i) {
            c.set(i, j, budget * w[j] / total);
        }
    }
    LgModel::new(b, c).unwrap()
}

fn lg_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let settings = IterationSettings::leslie_gower();
    let (mut dist, mut residual): (f64, f64) = (0.0, 0.0);
    let mut models = 0;
    let mut ok = true;
    while models < 50 {
        let d = [2, 3, 5, 8][models % 4];
        let m = weak_model(&mut rng, d);
        let nec = check_necessary(&m);
        let Ok(sol) = solve_linear(&m) else { continue };
        if !(nec.invertible && sol.positive) {
            continue;
        }
        residual = residual.max(sup(&bh_map(&m, &sol.x), &sol.x));
        for _ in 0..5 {
            let x0 = random_positive_vector(&mut rng, d, 1e-2, 1e2);
            let t = iterate_lg(&m, &x0, &settings).unwrap();
            ok &= t.converged;
            dist = dist.max(sup(t.last(), &sol.x));
        }
        models += 1;
    }
    outcome(
        ok && dist <= 1e-7 && residual <= 1e-10,
        format!("{models} models, 5 starts each: max |limit - linear| = {dist:.3e} (limit 1e-7), map residual {residual:.3e} (limit 1e-10)"),
    )
}

fn lg_decoupled() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let settings = IterationSettings::leslie_gower();
    let mut worst: f64 = 0.0;
    let mut ok = true;
    let mut cases = 0;
    let mut check = |b: Vec<f64>, diag: Vec<f64>, rng: &mut ChaCha8Rng| {
        let k: Vec<f64> = b.iter().zip(&diag).map(|(b, c)| (b - 1.0) / c).collect();
        let m = LgModel::new(b, Matrix::diagonal(&diag)).unwrap();
        let x0 = random_positive_vector(rng, k.len(), 1e-2, 1e2);
        let t = iterate_lg(&m, &x0, &settings).unwrap();
        ok &= t.converged;
        worst = worst.max(sup(t.last(), &k));
        cases += 1;
    };
    check(vec![2.0, 3.0], vec![1.0, 1.0], &mut rng);
    for d in [2, 3, 5, 8] {
        let b: Vec<f64> = (0..d).map(|_| rng.gen_range(1.2..5.0)).collect();
        let diag: Vec<f64> = (0..d).map(|_| rng.gen_range(0.1..3.0)).collect();
        check(b, diag, &mut rng);
    }
    outcome(
        ok && worst <= 1e-10,
        format!("{cases} diagonal models: max |limit - (b-1)/c_ii| = {worst:.3e} (limit 1e-10)"),
    )
}

fn lg_necessary_conditions() -> Outcome {
    let m = |b: [f64; 2], c: [[f64; 2]; 2]| {
        LgModel::new(b.to_vec(), Matrix::from_rows(&[c[0].to_vec(), c[1].to_vec()]).unwrap()).unwrap()
    };
    // C = [[1,1],[1,1]]: b - 1 = (1,1) lies in the range of C, (1,2) does not
    let consistent = check_necessary(&m([2.0, 2.0], [[1.0, 1.0], [1.0, 1.0]]));
    let inconsistent = check_necessary(&m([2.0, 3.0], [[1.0, 1.0], [1.0, 1.0]]));
    let low_growth = check_necessary(&m([0.8, 2.0], [[1.0, 0.2], [0.1, 1.0]]));
    let unit_growth = check_necessary(&m([1.0, 2.0], [[1.0, 0.0], [0.0, 1.0]]));
    let fine = check_necessary(&m([2.0, 3.0], [[1.0, 0.2], [0.1, 1.0]]));
    let checks = [
        ("singular consistent", !consistent.invertible && consistent.rank_consistent && consistent.rank == 1),
        ("singular inconsistent", !inconsistent.invertible && !inconsistent.rank_consistent && inconsistent.augmented_rank == 2),
        ("b < 1", !low_growth.growth_ok && low_growth.invertible),
        ("b = 1", !unit_growth.growth_ok),
        ("regular", fine.growth_ok && fine.invertible && fine.rank_consistent),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    outcome(
        failed.is_empty(),
        format!("{} fixtures, failing: {failed:?}", checks.len()),
    )
}

fn bailey_cross_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let settings = IterationSettings::new(1e-13, 10_000, Norm::Infinity).unwrap();
    let (mut bailey_err, mut lr_err, mut bias): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut ok = true;
    for (m, n) in [(2, 2), (3, 4), (5, 3)] {
        let x = random_positive_vector(&mut rng, m, 0.5, 2.0);
        let y = random_positive_vector(&mut rng, n, 50.0, 200.0);
        let r: Vec<f64> = (0..m * n).map(|k| x[k / n] * y[k % n]).collect();
        let p = BaileyProblem::new(Matrix::new(m, n, r.clone()).unwrap(), Matrix::new(m, n, vec![1.0; m * n]).unwrap()).unwrap();
        let run = bailey_iterate(&p, &vec![1.0; m], &vec![1.0; n], &settings).unwrap();
        ok &= run.trace.converged;
        let (rows, cols) = bailey_residuals(&p, &run.fit.x, &run.fit.y);
        bias = bias.max(rows.iter().chain(&cols).fold(0.0, |a, v| a.max(v.abs())));
        let rating = RatingProblem::new(
            RiskTensor::with_default_names(vec![m, n], r.clone()).unwrap(),
            RiskTensor::filled(vec![m, n], 1.0).unwrap(),
            1.0,
        )
        .unwrap();
        let trace = iterate_from_ones(&rating, &settings).unwrap();
        ok &= trace.converged;
        let f = trace.last();
        let base = indicated_base_rate(&rating, f).unwrap();
        for i in 0..m {
            for j in 0..n {
                let target = r[i * n + j];
                bailey_err = bailey_err.max((run.fit.product(i, j) - target).abs());
                lr_err = lr_err.max((base * f.block(0)[i] * f.block(1)[j] - target).abs());
            }
        }
    }
    outcome(
        ok && bailey_err <= 1e-9 && lr_err <= 1e-9 && bias <= 1e-9,
        format!("product error: Bailey {bailey_err:.3e}, loss-ratio {lr_err:.3e}; bias residual {bias:.3e} (limits 1e-9)"),
    )
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn cli_json(command: &str, input: &Path, seed: &str) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_relfix"))
        .args([command, "--input", input.to_str().unwrap(), "--format", "json", "--seed", seed])
        .output()
        .expect("binary runs");
    (out.status.code(), out.stdout)
}

fn cli_determinism() -> Outcome {
    let mut identical = true;
    for (cmd, input) in [("rate", "separable.csv"), ("certify", "uniform.csv"), ("lg", "decoupled_lg.json")] {
        let a = cli_json(cmd, &fixture(input), "12345");
        let b = cli_json(cmd, &fixture(input), "12345");
        identical &= a == b && a.0 == Some(0);
    }
    let mut goldens = 0;
    for (cmd, input, golden) in [
        ("rate", "uniform.csv", "uniform_rate.golden.json"),
        ("rate", "separable.csv", "separable_rate.golden.json"),
        ("lg", "decoupled_lg.json", "decoupled_lg.golden.json"),
    ] {
        let (code, out) = cli_json(cmd, &fixture(input), "0");
        if code == Some(0) && out == std::fs::read(fixture(golden)).unwrap() {
            goldens += 1;
        }
    }
    outcome(
        identical && goldens == 3,
        format!("repeat runs byte-identical: {identical}; golden fixtures matching: {goldens}/3"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 10] = [
        ("jacobian oracle", jacobian_oracle, Some(Duration::from_secs(5))),
        ("certificate soundness", certificate_soundness, Some(Duration::from_secs(10))),
        ("certified convergence", certified_convergence, Some(Duration::from_secs(10))),
        ("box trapping", box_trapping, None),
        ("degenerate exactness", degenerate_exactness, None),
        ("LG equivalence", lg_equivalence, Some(Duration::from_secs(20))),
        ("LG decoupled closed form", lg_decoupled, None),
        ("LG necessary conditions", lg_necessary_conditions, None),
        ("Bailey cross-check", bailey_cross_check, None),
        ("CLI determinism and golden files", cli_determinism, None),
    ];
    let mut failed = 0;
    for (k, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_time = limit.map_or(true, |l| elapsed < l);
        let pass = result.pass && in_time;
        if !pass {
            failed += 1;
        }
        let budget = limit.map_or(String::new(), |l| format!(" of {} s", l.as_secs()));
        println!(
            "criterion {:>2} [{name}]: {}  {}; {:.2} s{budget}",
            k + 1,
            if pass { "PASS" } else { "FAIL" },
            result.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
