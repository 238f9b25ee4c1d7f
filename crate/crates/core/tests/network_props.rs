use mmwave_core::network::*;
use mmwave_core::rng::{substream, Purpose};
use proptest::prelude::*;

fn three_sector(rotation: f64) -> Site {
    Site {
        position: [0.0, 0.0],
        sector_boresights: (0..3).map(|s| rotation + 120.0 * s as f64).map(|b| (b + 180.0).rem_euclid(360.0) - 180.0).collect(),
    }
}

#[test]
fn noise_floor_and_cell_radius() {
    let c = RadioConstants::default();
    assert!((c.noise_power_dbm() - (-80.01)).abs() < 0.005);
    assert!((mean_cell_radius_m(100.0) - 56.42).abs() < 0.005);
}

#[test]
fn deployment_count_matches_density() {
    let mut total = 0usize;
    let drops = 2000;
    for d in 0..drops {
        let mut rng = substream(21, Purpose::Deployment, d, 0);
        let dep = drop_deployment(25.0, 2000.0, 3, &mut rng).unwrap();
        assert!(!dep.sites.is_empty());
        for s in &dep.sites {
            assert!(s.position[0].abs() <= 1000.0 && s.position[1].abs() <= 1000.0);
            assert_eq!(s.sector_boresights.len(), 3);
        }
        total += dep.sites.len();
    }
    let mean = total as f64 / drops as f64;
    assert!((mean - 100.0).abs() < 2.0, "{mean}");
}

#[test]
fn sector_boundaries_go_to_lower_index() {
    let site = three_sector(0.0);
    assert_eq!(site.sector_for(60.0).0, 0);
    assert_eq!(site.sector_for(-60.0).0, 0);
    assert_eq!(site.sector_for(180.0).0, 1);
    let (s, rel) = site.sector_for(100.0);
    assert_eq!(s, 1);
    assert!((rel + 20.0).abs() < 1e-12);
    let iso = Site {
        position: [0.0, 0.0],
        sector_boresights: vec![0.0],
    };
    assert_eq!(iso.sector_for(179.0), (0, 179.0));
}

#[test]
fn sinr_from_budget_matches_raw_formula() {
    // SINR = (P_tx G_0 / l_0) / (sum_i P_tx G_i / l_i + W N_0), all in linear units
    let c = RadioConstants::default();
    let links = [(95.0, 120.0), (110.0, 3.0), (101.5, 0.7), (130.0, 64.0)];
    let mw = |pl: f64, g: f64| 10f64.powf((30.0 - pl) / 10.0) * g;
    let noise = 10f64.powf((-174.0 + 10.0 * 500e6f64.log10() + 7.0) / 10.0);
    let want = 10.0 * (mw(links[0].0, links[0].1) / (links[1..].iter().map(|&(p, g)| mw(p, g)).sum::<f64>() + noise)).log10();

    let signal = c.received_power_mw(links[0].0, links[0].1);
    let interferers: Vec<f64> = links[1..].iter().map(|&(p, g)| c.received_power_mw(p, g)).collect();
    let budget = LinkBudget {
        serving_bs: 0,
        signal_mw: signal,
        interference_mw: interferers.iter().sum(),
        noise_mw: c.noise_power_mw(),
    };
    assert!((budget.sinr_db() - want).abs() <= 1e-9 * want.abs());
    assert!((compute_sinr(signal, &interferers, &c) - want).abs() <= 1e-9 * want.abs());
}

#[test]
fn no_interference_gives_minus_infinite_inr() {
    let c = RadioConstants::default();
    assert_eq!(compute_inr(&[], &c), f64::NEG_INFINITY);
    assert_eq!(compute_sinr(0.0, &[1.0], &c), f64::NEG_INFINITY);
    assert_eq!(c.received_power_mw(f64::INFINITY, 10.0), 0.0);
}

proptest! {
    #[test]
    fn every_azimuth_has_one_sector(rotation in -180.0..180.0f64, azimuth in -180.0..180.0f64) {
        let site = three_sector(rotation);
        let (s, rel) = site.sector_for(azimuth);
        prop_assert!(rel.abs() <= 60.0);
        let back = (site.sector_boresights[s] + rel - azimuth + 540.0).rem_euclid(360.0) - 180.0;
        prop_assert!(back.abs() < 1e-9);
        // half-open windows [b - 60, b + 60): exactly one contains the azimuth
        let holders = site.sector_boresights.iter().filter(|&&b| {
            let r = (azimuth - b + 540.0).rem_euclid(360.0) - 180.0;
            (-60.0..60.0).contains(&r)
        }).count();
        prop_assert_eq!(holders, 1);
    }

    #[test]
    fn interference_only_hurts(signal_db in -60.0..20.0f64, inter in prop::collection::vec(-120.0..-30.0f64, 1..8), drop in 0usize..8) {
        let c = RadioConstants::default();
        let signal = 10f64.powf(signal_db / 10.0);
        let mw: Vec<f64> = inter.iter().map(|d| 10f64.powf(d / 10.0)).collect();
        let snr = 10.0 * (signal / c.noise_power_mw()).log10();
        let sinr = compute_sinr(signal, &mw, &c);
        prop_assert!(sinr <= snr + 1e-12);
        let mut fewer = mw.clone();
        fewer.remove(drop % mw.len());
        prop_assert!(compute_sinr(signal, &fewer, &c) >= sinr - 1e-12);
        prop_assert!(compute_inr(&fewer, &c) <= compute_inr(&mw, &c) + 1e-12);
    }
}
