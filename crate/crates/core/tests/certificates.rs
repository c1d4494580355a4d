//! Second, independent transcription of the three-factor bounds, written with
//! explicit `x`, `y`, `z` blocks and named extremes, checked against the
//! general implementation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relfix_core::criteria::{r_certificates, rho_certificates};
use relfix_core::{certify, RatingProblem, RiskTensor, Verdict};

struct Axis {
    l: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

fn axes(l: &RiskTensor, e: &RiskTensor) -> [Axis; 3] {
    let d = l.dims().to_vec();
    let mut out: [Axis; 3] = core::array::from_fn(|t| Axis {
        l: vec![0.0; d[t]],
        lo: vec![f64::INFINITY; d[t]],
        hi: vec![0.0; d[t]],
    });
    for i in 0..d[0] {
        for j in 0..d[1] {
            for k in 0..d[2] {
                let (lv, ev) = (l.get(&[i, j, k]).unwrap(), e.get(&[i, j, k]).unwrap());
                for (t, s) in [(0, i), (1, j), (2, k)] {
                    out[t].l[s] += lv;
                    out[t].lo[s] = out[t].lo[s].min(ev);
                    out[t].hi[s] = out[t].hi[s].max(ev);
                }
            }
        }
    }
    out
}

/// ρ∞ and ρ₁ for blocks x, y, z.
fn rho_oracle(l: &RiskTensor, e: &RiskTensor) -> (f64, f64) {
    let [x, y, z] = axes(l, e);
    let a = |ax: &Axis, s: usize| -> f64 {
        (ax.l[s] / ax.l[0]) * (ax.hi[0] * ax.hi[s] - ax.lo[0] * ax.lo[s]) / (ax.lo[s] * ax.lo[s])
    };
    let g = |ax: &Axis| -> f64 {
        let mut sum = 0.0;
        for s in 0..ax.l.len() {
            sum += ax.l[s] / ax.hi[s];
        }
        ax.l[0] / (ax.lo[0] * sum)
    };
    let (nx, ny, nz) = (x.l.len() as f64, y.l.len() as f64, z.l.len() as f64);
    let (gx, gy, gz) = (g(&x), g(&y), g(&z));
    let mut rho_inf: f64 = 0.0;
    for i in 0..x.l.len() {
        rho_inf = rho_inf.max(a(&x, i) * ((ny - 1.0) * gy + (nz - 1.0) * gz));
    }
    for j in 0..y.l.len() {
        rho_inf = rho_inf.max(a(&y, j) * ((nx - 1.0) * gx + (nz - 1.0) * gz));
    }
    for k in 0..z.l.len() {
        rho_inf = rho_inf.max(a(&z, k) * ((nx - 1.0) * gx + (ny - 1.0) * gy));
    }
    let sx: f64 = (0..x.l.len()).map(|i| a(&x, i)).sum();
    let sy: f64 = (0..y.l.len()).map(|j| a(&y, j)).sum();
    let sz: f64 = (0..z.l.len()).map(|k| a(&z, k)).sum();
    let rho_1 = (gx * (sy + sz)).max(gy * (sx + sz)).max(gz * (sx + sy));
    (rho_inf, rho_1)
}

/// r∞ and r₁ for blocks x, y, z.
fn r_oracle(l: &RiskTensor, e: &RiskTensor) -> (f64, f64) {
    let [x, y, z] = axes(l, e);
    let (mu, m) = (e.min_value(), e.max_value());
    let c = m * (m * m - mu * mu) / (mu * mu * mu);
    let total = l.total();
    let (nx, ny, nz) = (x.l.len() as f64, y.l.len() as f64, z.l.len() as f64);
    let (x0, y0, z0) = (x.l[0], y.l[0], z.l[0]);
    let mut row: f64 = 0.0;
    for s in 0..x.l.len() {
        row = row.max(x.l[s] / x0 * ((ny - 1.0) * y0 + (nz - 1.0) * z0));
    }
    for s in 0..y.l.len() {
        row = row.max(y.l[s] / y0 * ((nx - 1.0) * x0 + (nz - 1.0) * z0));
    }
    for s in 0..z.l.len() {
        row = row.max(z.l[s] / z0 * ((nx - 1.0) * x0 + (ny - 1.0) * y0));
    }
    let col = (x0 / y0 + x0 / z0).max(y0 / x0 + y0 / z0).max(z0 / x0 + z0 / y0);
    (c / total * row, c * col)
}

fn random(rng: &mut ChaCha8Rng, dims: Vec<usize>, spread: f64) -> (RiskTensor, RiskTensor) {
    let len = dims.iter().product();
    let l: Vec<f64> = (0..len).map(|_| rng.gen_range(0.5..30.0)).collect();
    let e: Vec<f64> = (0..len).map(|_| rng.gen_range(1.0..1.0 + spread)).collect();
    (
        RiskTensor::with_default_names(dims.clone(), l).unwrap(),
        RiskTensor::with_default_names(dims, e).unwrap(),
    )
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300)
}

#[test]
fn bounds_agree_with_explicit_transcription() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for dims in [vec![2, 2, 2], vec![3, 3, 2], vec![2, 4, 3], vec![5, 2, 2]] {
        for spread in [0.001, 0.1, 2.0, 50.0] {
            let (l, e) = random(&mut rng, dims.clone(), spread);
            let p = RatingProblem::new(l.clone(), e.clone(), 0.8).unwrap();
            let rho = rho_certificates(&p).unwrap();
            let (rho_inf, rho_1) = rho_oracle(&l, &e);
            assert!(close(rho.rho_inf, rho_inf), "{dims:?} {} vs {rho_inf}", rho.rho_inf);
            assert!(close(rho.rho_1, rho_1), "{dims:?} {} vs {rho_1}", rho.rho_1);
            let (r_inf, r_1) = r_certificates(&p).unwrap();
            let (oi, o1) = r_oracle(&l, &e);
            assert!(close(r_inf, oi), "{dims:?} {r_inf} vs {oi}");
            assert!(close(r_1, o1), "{dims:?} {r_1} vs {o1}");
            assert!(rho.rho_inf <= r_inf * (1.0 + 1e-12));
            assert!(rho.rho_1 <= r_1 * (1.0 + 1e-12));
        }
    }
}

#[test]
fn hand_computed_two_by_two_by_two() {
    // exposures 1 everywhere except cell (1,1,1) = 2; losses 1 everywhere
    let l = RiskTensor::filled(vec![2, 2, 2], 1.0).unwrap();
    let e = RiskTensor::from_fn(vec![2, 2, 2], |i| if i == [1, 1, 1] { 2.0 } else { 1.0 }).unwrap();
    let p = RatingProblem::new(l, e, 1.0).unwrap();
    // every axis: l = (4, 4), min = (1, 1), max = (1, 2)
    // a[0] = 0, a[1] = (1*2 - 1*1)/1 = 1; g = 4 / (1 * (4/1 + 4/2)) = 2/3
    // rho_inf = 1 * (2/3 + 2/3) = 4/3; rho_1 = 2/3 * (1 + 1) = 4/3
    let rho = rho_certificates(&p).unwrap();
    assert!((rho.rho_inf - 4.0 / 3.0).abs() < 1e-15);
    assert!((rho.rho_1 - 4.0 / 3.0).abs() < 1e-15);
    // M(M^2 - mu^2)/mu^3 = 6; L = 8; rows: 1 * (4 + 4) = 8, cols: 2
    let (r_inf, r_1) = r_certificates(&p).unwrap();
    assert!((r_inf - 6.0).abs() < 1e-15);
    assert!((r_1 - 12.0).abs() < 1e-15);
    assert_eq!(certify(&p).unwrap().verdict, Verdict::Uncertified);
}
