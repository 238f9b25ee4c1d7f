//! Deployment geometry, sectorization, association and the SINR/INR link
//! budget.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::channel::ChannelRealization;
use crate::error::{invalid, Result};
use crate::math::{db_to_linear, linear_to_db, wrap_deg};

/// Thermal noise density, dBm/Hz.
pub const THERMAL_NOISE_DBM_HZ: f64 = -174.0;

/// A base-station site. Each sector is an array facing its boresight.
#[derive(Debug, Clone, PartialEq)]
pub struct Site {
    /// Metres.
    pub position: [f64; 2],
    /// Global azimuths of the sector boresights, degrees.
    pub sector_boresights: Vec<f64>,
}

impl Site {
    /// Half-width of each sector's steering window, degrees: 60 for three
    /// sectors, 180 (anything) for a single array.
    pub fn half_window(&self) -> f64 {
        180.0 / self.sector_boresights.len() as f64
    }

    /// Sector serving a global `azimuth`, with the azimuth relative to that
    /// sector's boresight. Sectors are scanned in index order and the first
    /// whose closed window contains the azimuth wins, so boundary azimuths
    /// go to the lower index.
    pub fn sector_for(&self, azimuth: f64) -> (usize, f64) {
        let half = self.half_window();
        let mut best = (0, f64::INFINITY, 0.0);
        for (i, b) in self.sector_boresights.iter().enumerate() {
            let rel = wrap_deg(azimuth - b);
            if rel.abs() <= half + 1e-9 {
                return (i, rel.clamp(-half, half));
            }
            // unreachable for evenly spaced sectors; keep the closest anyway
            if rel.abs() < best.1 {
                best = (i, rel.abs(), rel);
            }
        }
        (best.0, best.2.clamp(-half, half))
    }
}

/// Radio constants of the downlink budget.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct RadioConstants {
    pub tx_power_dbm: f64,
    pub bandwidth_hz: f64,
    pub noise_figure_db: f64,
    pub carrier_hz: f64,
}

impl Default for RadioConstants {
    fn default() -> Self {
        RadioConstants {
            tx_power_dbm: 30.0,
            bandwidth_hz: 500e6,
            noise_figure_db: 7.0,
            carrier_hz: 28e9,
        }
    }
}

impl RadioConstants {
    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_hz > 0.0) || !self.bandwidth_hz.is_finite() {
            return Err(invalid("bandwidth_hz", "must be positive"));
        }
        if !(self.carrier_hz > 0.0) || !self.carrier_hz.is_finite() {
            return Err(invalid("carrier_hz", "must be positive"));
        }
        if !self.tx_power_dbm.is_finite() || !self.noise_figure_db.is_finite() {
            return Err(invalid("radio", "powers must be finite"));
        }
        Ok(())
    }

    /// `W N_0` in dBm: `-174 + 10 log10(W) + NF`.
    pub fn noise_power_dbm(&self) -> f64 {
        THERMAL_NOISE_DBM_HZ + 10.0 * libm::log10(self.bandwidth_hz) + self.noise_figure_db
    }

    pub fn noise_power_mw(&self) -> f64 {
        db_to_linear(self.noise_power_dbm())
    }

    /// Received power `P_TX / l * G` in mW.
    pub fn received_power_mw(&self, path_loss_db: f64, gain: f64) -> f64 {
        if path_loss_db == f64::INFINITY || gain <= 0.0 {
            return 0.0;
        }
        db_to_linear(self.tx_power_dbm - path_loss_db) * gain
    }
}

/// Base stations of one drop with the typical UE.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub sites: Vec<Site>,
    pub ue: [f64; 2],
}

/// Homogeneous Poisson deployment in a square of side `region_side`
/// metres centred on the typical UE. The BS count is conditioned on being
/// at least one. Every site gets `sectors` boresights spaced evenly and one
/// common random rotation.
pub fn drop_deployment<R: Rng + ?Sized>(
    density_per_km2: f64,
    region_side: f64,
    sectors: usize,
    rng: &mut R,
) -> Result<Deployment> {
    if !(density_per_km2 > 0.0) || !density_per_km2.is_finite() {
        return Err(invalid("density", "must be positive"));
    }
    if !(region_side > 0.0) || !region_side.is_finite() {
        return Err(invalid("region_side", "must be positive"));
    }
    if sectors == 0 {
        return Err(invalid("sectors", "need at least one sector"));
    }
    let mean = density_per_km2 * (region_side / 1000.0) * (region_side / 1000.0);
    let poisson = Poisson::new(mean).map_err(|_| invalid("density", "mean BS count out of range"))?;
    let count = loop {
        let n = poisson.sample(rng) as usize;
        if n > 0 {
            break n;
        }
    };
    let half = region_side / 2.0;
    let spacing = 360.0 / sectors as f64;
    let sites = (0..count)
        .map(|_| {
            let x = (rng.random::<f64>() * 2.0 - 1.0) * half;
            let y = (rng.random::<f64>() * 2.0 - 1.0) * half;
            let rotation = rng.random::<f64>() * 360.0;
            Site {
                position: [x, y],
                sector_boresights: (0..sectors).map(|s| wrap_deg(rotation + spacing * s as f64)).collect(),
            }
        })
        .collect();
    Ok(Deployment { sites, ue: [0.0, 0.0] })
}

/// Mean cell radius `sqrt(1 / (pi density))`, metres.
pub fn mean_cell_radius_m(density_per_km2: f64) -> f64 {
    libm::sqrt(1e6 / (core::f64::consts::PI * density_per_km2))
}

pub fn distance_m(a: [f64; 2], b: [f64; 2]) -> f64 {
    libm::hypot(b[0] - a[0], b[1] - a[1])
}

/// Global azimuth of `to` seen from `from`, degrees in `[-180, 180)`.
pub fn bearing_deg(from: [f64; 2], to: [f64; 2]) -> f64 {
    wrap_deg(libm::atan2(to[1] - from[1], to[0] - from[0]).to_degrees())
}

/// Serving site and sector of a UE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Association {
    pub site: usize,
    pub sector: usize,
    /// UE azimuth relative to the serving sector boresight, degrees.
    pub steering: f64,
    pub path_loss_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AssociationOutcome {
    Served(Association),
    /// Every link is in outage.
    Outage,
}

/// Minimum-path-loss association. `links[i]` is the channel between site
/// `i` and the UE.
pub fn associate(ue: [f64; 2], sites: &[Site], links: &[ChannelRealization]) -> Result<AssociationOutcome> {
    if sites.len() != links.len() {
        return Err(crate::Error::DimensionMismatch {
            what: "links per site",
            expected: sites.len(),
            actual: links.len(),
        });
    }
    let best = links
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.is_outage() && l.path_loss_db.is_finite())
        .min_by(|a, b| a.1.path_loss_db.total_cmp(&b.1.path_loss_db));
    let Some((site, link)) = best else {
        return Ok(AssociationOutcome::Outage);
    };
    let azimuth = bearing_deg(sites[site].position, ue);
    let (sector, steering) = sites[site].sector_for(azimuth);
    Ok(AssociationOutcome::Served(Association {
        site,
        sector,
        steering,
        path_loss_db: link.path_loss_db,
    }))
}

/// Linear powers entering the SINR and INR of one UE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub serving_bs: usize,
    pub signal_mw: f64,
    pub interference_mw: f64,
    pub noise_mw: f64,
}

impl LinkBudget {
    pub fn sinr_db(&self) -> f64 {
        linear_to_db(self.signal_mw / (self.interference_mw + self.noise_mw))
    }

    pub fn snr_db(&self) -> f64 {
        linear_to_db(self.signal_mw / self.noise_mw)
    }

    pub fn inr_db(&self) -> f64 {
        linear_to_db(self.interference_mw / self.noise_mw)
    }
}

/// SINR in dB from the serving received power and each interferer's
/// received power (all mW). Zero signal gives `-inf`.
pub fn compute_sinr(signal_mw: f64, interferers_mw: &[f64], constants: &RadioConstants) -> f64 {
    let interference: f64 = interferers_mw.iter().sum();
    linear_to_db(signal_mw / (interference + constants.noise_power_mw()))
}

/// INR in dB; no interference gives `-inf`.
pub fn compute_inr(interferers_mw: &[f64], constants: &RadioConstants) -> f64 {
    let interference: f64 = interferers_mw.iter().sum();
    linear_to_db(interference / constants.noise_power_mw())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{LinkState, ChannelRealization};
    use crate::rng::{substream, Purpose};

    fn link(pl: f64) -> ChannelRealization {
        ChannelRealization {
            clusters: Vec::new(),
            state: LinkState::Nlos,
            path_loss_db: pl,
        }
    }

    fn site(x: f64, y: f64, sectors: usize) -> Site {
        Site {
            position: [x, y],
            sector_boresights: (0..sectors).map(|s| wrap_deg(120.0 * s as f64)).collect(),
        }
    }

    #[test]
    fn noise_floor() {
        let c = RadioConstants::default();
        assert!((c.noise_power_dbm() + 80.0103).abs() < 1e-3);
    }

    #[test]
    fn association_is_argmin() {
        let sites = [site(10.0, 0.0, 3), site(-10.0, 0.0, 3)];
        let out = associate([0.0, 0.0], &sites, &[link(100.0), link(90.0)]).unwrap();
        match out {
            AssociationOutcome::Served(a) => {
                assert_eq!(a.site, 1);
                assert_eq!(a.path_loss_db, 90.0);
                // UE lies due east of site 1: sector 0, boresight-aligned
                assert_eq!(a.sector, 0);
                assert!(a.steering.abs() < 1e-9);
            }
            AssociationOutcome::Outage => panic!("expected service"),
        }
        let out = associate([0.0, 0.0], &sites, &[ChannelRealization::outage(), ChannelRealization::outage()]).unwrap();
        assert_eq!(out, AssociationOutcome::Outage);
        assert!(associate([0.0, 0.0], &sites, &[link(1.0)]).is_err());
    }

    #[test]
    fn boundary_goes_to_lower_sector() {
        let s = site(0.0, 0.0, 3);
        let (i, rel) = s.sector_for(60.0);
        assert_eq!(i, 0);
        assert!((rel - 60.0).abs() < 1e-9);
        let (i, rel) = s.sector_for(180.0);
        assert_eq!(i, 1);
        assert!((rel - 60.0).abs() < 1e-9);
        let (i, _) = s.sector_for(-60.0);
        assert_eq!(i, 0);
    }

    #[test]
    fn single_sector_takes_everything() {
        let s = site(0.0, 0.0, 1);
        for az in [-179.0, -90.0, 0.0, 135.0] {
            let (i, rel) = s.sector_for(az);
            assert_eq!(i, 0);
            assert!((rel - az).abs() < 1e-9);
        }
    }

    #[test]
    fn sinr_limits() {
        let c = RadioConstants::default();
        let signal = c.received_power_mw(100.0, 1000.0);
        let snr = compute_sinr(signal, &[], &c);
        assert!((snr - (30.0 - 100.0 + 30.0 + 80.0103)).abs() < 1e-3);
        let big = signal * 1e3;
        let sinr = compute_sinr(signal, &[big], &c);
        assert!((sinr + 30.0).abs() < 1e-3);
        assert_eq!(compute_sinr(0.0, &[1.0], &c), f64::NEG_INFINITY);
        assert_eq!(compute_inr(&[], &c), f64::NEG_INFINITY);
        assert!(compute_inr(&[c.noise_power_mw()], &c).abs() < 1e-12);
    }

    #[test]
    fn deployment_rejects_bad_inputs() {
        let mut rng = substream(1, Purpose::Test, 0, 0);
        assert!(drop_deployment(100.0, 0.0, 3, &mut rng).is_err());
        assert!(drop_deployment(0.0, 1000.0, 3, &mut rng).is_err());
        assert!(drop_deployment(100.0, 1000.0, 0, &mut rng).is_err());
    }

    #[test]
    fn deployment_structure() {
        let mut rng = substream(2, Purpose::Test, 0, 0);
        let d = drop_deployment(100.0, 1000.0, 3, &mut rng).unwrap();
        assert!(!d.sites.is_empty());
        for s in &d.sites {
            assert!(s.position[0].abs() <= 500.0 && s.position[1].abs() <= 500.0);
            assert_eq!(s.sector_boresights.len(), 3);
            let gap = wrap_deg(s.sector_boresights[1] - s.sector_boresights[0]);
            assert!((gap - 120.0).abs() < 1e-9);
        }
    }

    #[test]
    fn cell_radius_at_100() {
        let r = mean_cell_radius_m(100.0);
        assert!((r - 56.42).abs() < 0.01);
    }
}
