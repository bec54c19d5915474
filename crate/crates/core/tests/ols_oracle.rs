use bloat_core::econometrics::{ols_fe, Cluster, FixedEffect, Panel, RegressionSpec};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

struct Sim {
    firm: Vec<usize>,
    time: Vec<usize>,
    y: Vec<f64>,
    x1: Vec<f64>,
    x2: Vec<f64>,
    firms: usize,
    times: usize,
}

fn simulate(seed: u64) -> Sim {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let firms = rng.random_range(4..8);
    let times = rng.random_range(3..6);
    let fe_f: Vec<f64> = (0..firms).map(|_| rng.random_range(-3.0..3.0)).collect();
    let fe_t: Vec<f64> = (0..times).map(|_| rng.random_range(-3.0..3.0)).collect();
    let mut s = Sim { firm: vec![], time: vec![], y: vec![], x1: vec![], x2: vec![], firms, times };
    for f in 0..firms {
        for t in 0..times {
            // Keep the first two periods so every firm and period appears.
            if t >= 2 && f >= 2 && rng.random::<f64>() < 0.25 {
                continue;
            }
            let x1: f64 = StandardNormal.sample(&mut rng);
            let x2: f64 = 0.5 * fe_f[f] + Distribution::<f64>::sample(&StandardNormal, &mut rng);
            let e: f64 = StandardNormal.sample(&mut rng);
            s.firm.push(f);
            s.time.push(t);
            s.x1.push(x1);
            s.x2.push(x2);
            s.y.push(1.5 * x1 - 0.7 * x2 + fe_f[f] + fe_t[t] + e);
        }
    }
    s
}

fn to_panel(s: &Sim) -> Panel {
    let mut p = Panel::new(
        s.firm.iter().map(|f| format!("F{f}")).collect(),
        s.time.iter().map(|t| format!("{}", 2000 + t)).collect(),
        s.firm.iter().map(|f| format!("I{}", f % 2)).collect(),
    )
    .unwrap();
    p.add_field("y", s.y.iter().map(|v| Some(*v)).collect()).unwrap();
    p.add_field("x1", s.x1.iter().map(|v| Some(*v)).collect()).unwrap();
    p.add_field("x2", s.x2.iter().map(|v| Some(*v)).collect()).unwrap();
    p
}

/// OLS on `[x1, x2, firm dummies, time dummies except the first]`, with a
/// firm-clustered CR1 sandwich.
fn dummy_ols(s: &Sim) -> (Vec<f64>, Vec<f64>) {
    let n = s.y.len();
    let k = 2 + s.firms + s.times - 1;
    let mut z = DMatrix::<f64>::zeros(n, k);
    for i in 0..n {
        z[(i, 0)] = s.x1[i];
        z[(i, 1)] = s.x2[i];
        z[(i, 2 + s.firm[i])] = 1.0;
        if s.time[i] > 0 {
            z[(i, 2 + s.firms + s.time[i] - 1)] = 1.0;
        }
    }
    let y = DVector::from_vec(s.y.clone());
    let ztz_inv = (z.transpose() * &z).try_inverse().unwrap();
    let beta = &ztz_inv * z.transpose() * &y;
    let e = &y - &z * &beta;
    let mut meat = DMatrix::<f64>::zeros(k, k);
    for g in 0..s.firms {
        let mut u = DVector::<f64>::zeros(k);
        for i in (0..n).filter(|&i| s.firm[i] == g) {
            u += z.row(i).transpose() * e[i];
        }
        meat += &u * u.transpose();
    }
    let c = s.firms as f64 / (s.firms - 1) as f64 * (n - 1) as f64 / (n - k) as f64;
    let v = &ztz_inv * meat * &ztz_inv * c;
    (vec![beta[0], beta[1]], vec![v[(0, 0)].sqrt(), v[(1, 1)].sqrt()])
}

#[test]
fn demeaning_matches_dummy_regression() {
    for seed in 0..20 {
        let s = simulate(seed);
        let spec = RegressionSpec {
            cluster: Cluster::Firm,
            drop_singletons: false,
            ..RegressionSpec::new("y", &["x1", "x2"], &[FixedEffect::Firm, FixedEffect::Time])
        };
        let r = ols_fe(&to_panel(&s), &spec).unwrap();
        let (beta, se) = dummy_ols(&s);
        for j in 0..2 {
            assert!((r.coefficients[j] - beta[j]).abs() < 1e-8, "seed {seed} coef {j}: {} vs {}", r.coefficients[j], beta[j]);
            assert!((r.std_errors[j] - se[j]).abs() < 1e-8, "seed {seed} se {j}: {} vs {}", r.std_errors[j], se[j]);
        }
        assert_eq!(r.k, 2 + s.firms + s.times - 1);
    }
}

#[test]
fn absorbed_constants_do_not_move_coefficients() {
    let s = simulate(99);
    let spec = RegressionSpec::new("y", &["x1", "x2"], &[FixedEffect::Firm, FixedEffect::Time]);
    let base = ols_fe(&to_panel(&s), &spec).unwrap();
    let mut shifted = to_panel(&s);
    let y: Vec<Option<f64>> = s.y.iter().zip(&s.firm).map(|(v, f)| Some(v + 100.0 * (*f as f64) - 7.0)).collect();
    shifted.add_field("y", y).unwrap();
    let moved = ols_fe(&shifted, &spec).unwrap();
    for (a, b) in base.coefficients.iter().zip(&moved.coefficients) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn observation_clusters_approach_classical_errors_under_homoskedasticity() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 20_000;
    let firms: Vec<String> = (0..n).map(|i| format!("F{}", i / 4)).collect();
    let times: Vec<String> = (0..n).map(|i| format!("{}", i % 4)).collect();
    let inds: Vec<String> = (0..n).map(|i| format!("I{}", i % 3)).collect();
    let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let y: Vec<f64> = x.iter().map(|x| 0.3 * x + Distribution::<f64>::sample(&StandardNormal, &mut rng)).collect();
    let mut p = Panel::new(firms, times, inds).unwrap();
    p.add_field("x", x.into_iter().map(Some).collect()).unwrap();
    p.add_field("y", y.into_iter().map(Some).collect()).unwrap();
    let robust = RegressionSpec { cluster: Cluster::Observation, ..RegressionSpec::new("y", &["x"], &[FixedEffect::Time]) };
    let classical = RegressionSpec { cluster: Cluster::None, ..robust.clone() };
    let r = ols_fe(&p, &robust).unwrap();
    let c = ols_fe(&p, &classical).unwrap();
    let cr1 = n as f64 / (n - 1) as f64 * (n - 1) as f64 / (n - r.k) as f64;
    let ratio = r.std_errors[0] / (c.std_errors[0] * cr1.sqrt());
    assert!((ratio - 1.0).abs() < 0.03, "ratio {ratio}");
}
