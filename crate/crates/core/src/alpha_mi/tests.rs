use super::*;
use crate::renyi::{gallager_e0, renyi_divergence, shannon_entropy};
use crate::simplex::{Joint, Normalization};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn alpha(v: f64) -> AlphaOrder {
    AlphaOrder::new(v).unwrap()
}

fn d(v: &[f64]) -> Distribution {
    Distribution::new(v, Normalization::Strict).unwrap()
}

fn random_instance(rng: &mut ChaCha8Rng, nx: usize, ny: usize) -> (Distribution, Channel) {
    let p = dirichlet_one(rng, nx);
    let w = Channel::from_rows((0..nx).map(|_| dirichlet_one(rng, ny)).collect()).unwrap();
    (p, w)
}

fn output(r: &MiResult) -> &Distribution {
    match r.witness.as_ref().unwrap() {
        Witness::Output(q) => q,
        Witness::Product { .. } => panic!("expected an output witness"),
    }
}

const ORDERS: [f64; 7] = [0.3, 0.55, 0.9, 1.5, 2.0, 5.0, 20.0];

#[test]
fn sibson_hand_value() {
    let r = sibson_mi(&Distribution::uniform(2), &Channel::bsc(0.1), alpha(0.5)).unwrap();
    assert!((r.value + 0.8f64.ln()).abs() < 1e-14);
}

#[test]
fn gallager_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let (p, w) = random_instance(&mut rng, 3, 4);
        for a in ORDERS {
            let k = a / (1.0 - a);
            let s = sibson_mi(&p, &w, alpha(a)).unwrap().value;
            let e = gallager_e0(1.0 / a - 1.0, &p, &w).unwrap();
            assert!((s - k * e).abs() < 1e-10);
            let ar = arimoto_mi(&p, &w, alpha(a)).unwrap().value;
            let e = gallager_e0(1.0 / a - 1.0, &tilt(&p, alpha(a)), &w).unwrap();
            assert!((ar - k * e).abs() < 1e-10);
        }
    }
}

#[test]
fn divergence_forms_at_witnesses() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let (p, w) = random_instance(&mut rng, 3, 3);
        let j = compose(&p, &w).unwrap();
        let u = Distribution::uniform(p.len());
        for a in ORDERS {
            let o = alpha(a);
            let s = sibson_mi(&p, &w, o).unwrap();
            let div = renyi_divergence(&j, &Joint::product(&p, output(&s)), o);
            assert!((s.value - div).abs() < 1e-10);

            let ar = arimoto_mi(&p, &w, o).unwrap();
            let pa = tilt(&p, o);
            let ja = compose(&pa, &w).unwrap();
            let q = output(&ar);
            let first = renyi_divergence(&ja, &Joint::product(&pa, q), o);
            let second = renyi_divergence(&j, &Joint::product(&u, q), o) - renyi_divergence(&p, &u, o);
            assert!((ar.value - first).abs() < 1e-10);
            assert!((ar.value - second).abs() < 1e-10);

            let h = hayashi_mi(&p, &w, o).unwrap();
            let py = j.marginal_y();
            let first = renyi_divergence(&ja, &Joint::product(&pa, &py), o);
            let second = renyi_divergence(&j, &Joint::product(&u, &py), o) - renyi_divergence(&p, &u, o);
            assert!((h.value - first).abs() < 1e-10);
            assert!((h.value - second).abs() < 1e-10);
        }
    }
}

#[test]
fn noiseless_channel() {
    let p = d(&[0.5, 0.2, 0.2, 0.1]);
    let w = Channel::identity(4);
    let cfg = SolverConfig::default();
    for a in ORDERS {
        let o = alpha(a);
        let h = |v: f64| renyi_entropy(&p, alpha(v));
        assert!((sibson_mi(&p, &w, o).unwrap().value - h(1.0 / a)).abs() < 1e-10);
        assert!((arimoto_mi(&p, &w, o).unwrap().value - h(a)).abs() < 1e-10);
        assert!((hayashi_mi(&p, &w, o).unwrap().value - h(a)).abs() < 1e-10);
        assert!((ac_mi(&p, &w, o, &cfg).unwrap().value - shannon_entropy(&p)).abs() < 1e-6);
        if a > 0.5 {
            let lp = lp_mi(&p, &w, o, &cfg).unwrap().value;
            assert!((lp - h(a / (2.0 * a - 1.0))).abs() < 1e-5, "alpha {a}: {lp}");
        }
    }
}

#[test]
fn independent_channel_gives_zero() {
    let p = d(&[0.3, 0.7]);
    let py = d(&[0.2, 0.5, 0.3]);
    let w = Channel::constant(2, &py);
    let cfg = SolverConfig::default();
    for a in [0.3, 1.0, 2.0] {
        let all = all_measures(&p, &w, alpha(a), &cfg).unwrap();
        for (m, outcome) in &all {
            if let MeasureOutcome::Value(r) = outcome {
                assert!(r.value.abs() < 1e-9, "{m} at {a}: {}", r.value);
            }
        }
    }
    let lp = lp_mi(&p, &w, alpha(2.0), &cfg).unwrap();
    match lp.witness.unwrap() {
        Witness::Product { q_x, q_y } => {
            assert!(q_x.max_abs_diff(&p) < 1e-6);
            assert!(q_y.max_abs_diff(&py) < 1e-6);
        }
        _ => panic!("expected a product witness"),
    }
}

#[test]
fn uniform_prior_arimoto_is_sibson() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (_, w) = random_instance(&mut rng, 3, 4);
    let u = Distribution::uniform(3);
    for a in ORDERS {
        let s = sibson_mi(&u, &w, alpha(a)).unwrap().value;
        let ar = arimoto_mi(&u, &w, alpha(a)).unwrap().value;
        assert!((s - ar).abs() < 1e-12);
    }
}

#[test]
fn shannon_window_and_order_errors() {
    let p = d(&[0.3, 0.7]);
    let w = Channel::bsc(0.2);
    let shannon = shannon_mi(&compose(&p, &w).unwrap());
    let cfg = SolverConfig::default();
    for m in Measure::ALL {
        let v = m.compute(&p, &w, alpha(1.0), &cfg).unwrap().value;
        assert_eq!(v, shannon);
        assert!(m.compute(&p, &w, AlphaOrder::infinity(), &cfg).is_err() || m == Measure::Shannon);
    }
    let bad = SolverConfig {
        max_iterations: 0,
        ..SolverConfig::default()
    };
    assert!(matches!(ac_mi(&p, &w, alpha(2.0), &bad), Err(Error::InvalidConfig(_))));
    let short = SolverConfig {
        max_iterations: 1,
        ..SolverConfig::default()
    };
    assert!(matches!(
        ac_mi(&p, &w, alpha(2.0), &short),
        Err(Error::SolverDidNotConverge { .. })
    ));
}

#[test]
fn lp_is_flagged_below_half() {
    let all = all_measures(&d(&[0.3, 0.7]), &Channel::bsc(0.2), alpha(0.4), &SolverConfig::default()).unwrap();
    let (m, outcome) = all.last().unwrap();
    assert_eq!(*m, Measure::LapidothPfister);
    assert!(matches!(outcome, MeasureOutcome::Unavailable(_)));
}

#[test]
fn witnesses_survive_perturbation() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cfg = SolverConfig::default();
    for _ in 0..10 {
        let (p, w) = random_instance(&mut rng, 3, 3);
        let j = compose(&p, &w).unwrap();
        let u = Distribution::uniform(3);
        for a in ORDERS {
            let o = alpha(a);
            let s = sibson_mi(&p, &w, o).unwrap();
            let q = output(&s).mix(&u, 1e-3);
            assert!(renyi_divergence(&j, &Joint::product(&p, &q), o) >= s.value - 1e-12);

            let ac = ac_mi(&p, &w, o, &cfg).unwrap();
            let q = output(&ac).mix(&u, 1e-3);
            let moved: f64 = p
                .support()
                .map(|(x, px)| px * renyi_divergence(w.row(x), q.probs(), o))
                .sum();
            assert!(moved >= ac.value - 1e-9);
        }
    }
}

/// Brute-force `min_q Σ_x p(x) D_α(W_x ‖ q)` over a 2-point grid.
fn ac_grid(p: &Distribution, w: &Channel, o: AlphaOrder, step: f64) -> f64 {
    let n = (1.0 / step).round() as usize;
    (0..=n)
        .map(|i| {
            let t = i as f64 / n as f64;
            let q = [t, 1.0 - t];
            p.support().map(|(x, px)| px * renyi_divergence(w.row(x), &q[..], o)).sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn ac_matches_grid_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cfg = SolverConfig::default();
    for _ in 0..10 {
        let (p, w) = random_instance(&mut rng, 2, 2);
        for a in ORDERS {
            let v = ac_mi(&p, &w, alpha(a), &cfg).unwrap().value;
            let g = ac_grid(&p, &w, alpha(a), 0.005);
            assert!(v <= g + 1e-12 && g - v < 2e-3, "alpha {a}: {v} vs {g}");
        }
    }
}

#[test]
fn ac_and_lp_gaps_close() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cfg = SolverConfig::default();
    for _ in 0..20 {
        let (p, w) = random_instance(&mut rng, 4, 3);
        for a in ORDERS {
            let ac = ac_mi(&p, &w, alpha(a), &cfg).unwrap();
            assert!(ac.gap.unwrap() < 1e-7, "ac alpha {a}: gap {:?}", ac.gap);
            if a > 0.5 {
                let lp = lp_mi(&p, &w, alpha(a), &cfg).unwrap();
                assert!(lp.gap.unwrap().abs() < 1e-7, "lp alpha {a}: gap {:?}", lp.gap);
            }
        }
    }
}

#[test]
fn measure_names_round_trip() {
    for m in Measure::ALL {
        assert_eq!(m.name().parse::<Measure>().unwrap(), m);
    }
    assert!("renyi".parse::<Measure>().is_err());
}
