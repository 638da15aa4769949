use proptest::prelude::*;

use alpha_mi::alpha_mi::{arimoto_mi, hayashi_mi, sibson_mi, SolverConfig};
use alpha_mi::leakage::{gains, leakage_ratio, max_expected_gain, GainKind, Representation};
use alpha_mi::means::{expectation, power_mean};
use alpha_mi::renyi::renyi_entropy;
use alpha_mi::simplex::{tilt, AlphaOrder, Channel, Distribution, Normalization};

fn dist(n: std::ops::Range<usize>) -> impl Strategy<Value = Distribution> {
    prop::collection::vec(0.01f64..1.0, n).prop_map(|v| Distribution::new(&v, Normalization::Renormalize).unwrap())
}

fn instance() -> impl Strategy<Value = (Distribution, Channel)> {
    (2usize..6, 2usize..6).prop_flat_map(|(nx, ny)| {
        (
            dist(nx..nx + 1),
            prop::collection::vec(dist(ny..ny + 1), nx).prop_map(|rows| Channel::from_rows(rows).unwrap()),
        )
    })
}

fn order() -> impl Strategy<Value = f64> {
    (0.2f64..10.0).prop_filter("away from one", |a| (a - 1.0).abs() > 1e-3)
}

fn o(a: f64) -> AlphaOrder {
    AlphaOrder::new(a).unwrap()
}

proptest! {
    #[test]
    fn tilt_is_an_involution(p in dist(2..7), a in order()) {
        let back = tilt(&tilt(&p, o(a)), o(1.0 / a));
        prop_assert!(back.max_abs_diff(&p) < 1e-12);
    }

    #[test]
    fn renyi_entropy_is_bounded_and_nonincreasing(p in dist(2..7), a in order(), b in order()) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (h_lo, h_hi) = (renyi_entropy(&p, o(lo)), renyi_entropy(&p, o(hi)));
        prop_assert!(h_hi <= h_lo + 1e-12);
        prop_assert!(h_hi >= -1e-12 && h_lo <= (p.len() as f64).ln() + 1e-12);
    }

    #[test]
    fn closed_form_measures_are_nonnegative((p, w) in instance(), a in order()) {
        let h = renyi_entropy(&p, o(a));
        let ar = arimoto_mi(&p, &w, o(a)).unwrap().value;
        prop_assert!(sibson_mi(&p, &w, o(a)).unwrap().value >= -1e-12);
        prop_assert!(ar >= -1e-12 && ar <= h + 1e-12);
        prop_assert!(hayashi_mi(&p, &w, o(a)).unwrap().value >= -1e-12);
    }

    #[test]
    fn sibson_satisfies_data_processing((p, w) in instance(), v in dist(2..5), a in order()) {
        let post = Channel::from_rows(vec![v.clone(); w.ny()]).unwrap();
        let z = w.then(&post).unwrap();
        let (direct, processed) = (sibson_mi(&p, &w, o(a)).unwrap().value, sibson_mi(&p, &z, o(a)).unwrap().value);
        prop_assert!(processed <= direct + 1e-12);
    }

    #[test]
    fn closed_form_gains_are_maximal(p in dist(2..6), r in dist(2..6), a in order()) {
        prop_assume!(p.len() == r.len());
        for kind in [GainKind::AlphaScore(a), GainKind::PseudoSpherical(a), GainKind::PowerScore(a)] {
            let (best, _) = max_expected_gain(&p, kind).unwrap();
            let at_r = expectation(&p, &gains(kind, &r)).unwrap();
            prop_assert!(at_r <= best + 1e-12 * best.abs().max(1.0), "{kind:?}: {at_r} > {best}");
        }
    }

    #[test]
    fn power_means_increase_with_order(p in dist(2..6), s in -3.0f64..3.0, t in -3.0f64..3.0, seed in 0u64..1000) {
        let f: Vec<f64> = (0..p.len()).map(|i| 0.1 + ((seed + i as u64 * 7919) % 97) as f64 / 10.0).collect();
        let (lo, hi) = if s < t { (s, t) } else { (t, s) };
        let (m_lo, m_hi) = (power_mean(&p, &f, lo).unwrap().value(), power_mean(&p, &f, hi).unwrap().value());
        prop_assert!(m_lo <= m_hi * (1.0 + 1e-12));
    }

    #[test]
    fn closed_form_leakage_matches_measure((p, w) in instance(), a in order(), k in 0usize..8) {
        let rep = Representation::ALL[k];
        let r = leakage_ratio(&p, &w, o(a), rep, &SolverConfig::default()).unwrap();
        prop_assert!(r.residual < 1e-8, "{rep} at {a}: {}", r.residual);
    }
}
