use mmwave_core::antenna::PhaseResolution;
use mmwave_core::sim::*;
use mmwave_core::Result;
use proptest::prelude::*;

/// Evaluates drops back to front, to show order does not matter.
struct Reversed;

impl DropRunner for Reversed {
    fn run_indices(&self, drops: u64, f: &(dyn Fn(u64) -> Result<DropOutcome> + Sync)) -> Result<Vec<DropOutcome>> {
        (0..drops).rev().map(f).collect()
    }
}

fn small(density: f64) -> Scenario {
    Scenario {
        drops: 300,
        density_per_km2: density,
        region_side_m: 1000.0,
        seed: 17,
        ..Scenario::default()
    }
}

#[test]
fn evaluation_order_does_not_matter() {
    let s = small(100.0);
    let a = run_drops(&s).unwrap();
    let b = run_drops_with(&s, &Reversed).unwrap();
    assert_eq!(a, b);
}

#[test]
fn outage_accounting() {
    let s = small(25.0);
    let r = run_drops(&s).unwrap();
    assert_eq!(r.sinr.len() as u64 + r.sinr.outage_count(), s.drops);
    let f = r.outage_fraction() + r.sinr.len() as f64 / s.drops as f64;
    assert!((f - 1.0).abs() < 1e-12);
    assert_eq!(r.inr.len(), r.sinr.len());
}

#[test]
fn bits_sweep_uses_common_random_numbers() {
    let s = small(100.0);
    let res = [PhaseResolution::Bits(3), PhaseResolution::Bits(6), PhaseResolution::Unbounded];
    let pts = sweep_bits(&s, &res, &Sequential).unwrap();
    let pl = |i: usize| pts[i].result.outcomes.iter().map(|o| o.serving_path_loss_db.to_bits()).collect::<Vec<_>>();
    assert_eq!(pl(0), pl(1));
    assert_eq!(pl(0), pl(2));
    assert_eq!(pts[2].result, run_drops(&s).unwrap());
    assert!(sweep_bits(&s, &[], &Sequential).is_err());
}

#[test]
fn density_sweep_points_match_single_runs() {
    let s = small(50.0);
    let pts = sweep_density(&s, &[50.0, 200.0], &Sequential).unwrap();
    assert_eq!(pts[0].result, run_drops(&s).unwrap());
    let s200 = Scenario {
        density_per_km2: 200.0,
        ..s.clone()
    };
    assert_eq!(pts[1].result, run_drops(&s200).unwrap());
    assert!(sweep_density(&s, &[], &Sequential).is_err());
}

#[test]
fn sinr_never_exceeds_snr() {
    let r = run_drops(&small(100.0)).unwrap();
    for o in &r.outcomes {
        if let Some(b) = o.budget {
            assert!(b.sinr_db() <= b.snr_db());
            assert!(b.signal_mw >= 0.0 && b.interference_mw >= 0.0);
        }
    }
}

proptest! {
    #[test]
    fn ecdf_matches_naive_counting(samples in prop::collection::vec(-50.0..50.0f64, 1..200), x in -60.0..60.0f64, q in 0.001..0.999f64) {
        let e = EcdfSeries::new(samples.clone(), 0).unwrap();
        let n = samples.len() as f64;
        let le = samples.iter().filter(|&&v| v <= x).count() as f64;
        let lt = samples.iter().filter(|&&v| v < x).count() as f64;
        prop_assert_eq!(e.cdf(x).unwrap(), le / n);
        prop_assert_eq!(e.fraction_below(x).unwrap(), lt / n);
        // lower quantile: smallest sample whose naive CDF reaches q
        let mut sorted = samples.clone();
        sorted.sort_by(f64::total_cmp);
        let naive = sorted.iter().copied().find(|&v| samples.iter().filter(|&&w| w <= v).count() as f64 >= q * n - 1e-9).unwrap();
        prop_assert_eq!(e.quantile(q).unwrap(), naive);
    }

    #[test]
    fn merge_is_order_independent(a in prop::collection::vec(-5.0..5.0f64, 0..40), b in prop::collection::vec(-5.0..5.0f64, 0..40),
                                  c in prop::collection::vec(-5.0..5.0f64, 0..40)) {
        let (ea, eb, ec) = (EcdfSeries::new(a.clone(), 1).unwrap(), EcdfSeries::new(b.clone(), 2).unwrap(), EcdfSeries::new(c.clone(), 0).unwrap());
        let left = ea.merge(&eb).merge(&ec);
        let right = ec.merge(&eb.merge(&ea));
        prop_assert_eq!(&left, &right);
        let all = EcdfSeries::new([a, b, c].concat(), 3).unwrap();
        prop_assert_eq!(left, all);
    }
}
