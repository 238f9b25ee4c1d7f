//! Monte Carlo drop driver, empirical CDFs and parameter sweeps.
//!
//! A drop places base stations around the typical UE, samples one channel
//! per site, associates the UE, steers every beam and records the UE's SINR
//! and INR. Each drop only reads substreams keyed by its own index, so any
//! [`DropRunner`] (sequential here, threaded in `mmwave-sim`) yields the same
//! samples.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::Rng;

use crate::antenna::{
    make_weights, AmplitudeProfile, ArrayConfig, Direction, ElementPatternModel, ParametricPatch,
    PhaseResolution, TabulatedPattern,
};
use crate::channel::{
    link_gain, link_gain_with_rx, rx_responses, sample_link, ArraySide, ChannelRealization,
    GainComposition, PathLossParams,
};
use crate::error::{invalid, Error, Result};
use crate::network::{
    associate, bearing_deg, distance_m, drop_deployment, AssociationOutcome, LinkBudget,
    RadioConstants,
};
use crate::rng::{substream, Purpose};

/// Links shorter than this are evaluated at this distance.
pub const MIN_LINK_DISTANCE_M: f64 = 1.0;

/// Antenna configuration family of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum PatternKind {
    /// Isotropic elements on a single array per site.
    Iso,
    /// Parametric patch elements on three 120-degree sectors.
    ThreeGpp(ParametricPatch),
    /// Tabulated elements on three 120-degree sectors.
    Tabulated(Arc<TabulatedPattern>),
}

impl PatternKind {
    pub fn element_model(&self) -> ElementPatternModel {
        match self {
            PatternKind::Iso => ElementPatternModel::Isotropic,
            PatternKind::ThreeGpp(p) => ElementPatternModel::ParametricPatch(*p),
            PatternKind::Tabulated(t) => ElementPatternModel::Tabulated(Arc::clone(t)),
        }
    }

    pub fn sectors(&self) -> usize {
        match self {
            PatternKind::Iso => 1,
            _ => 3,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            PatternKind::Iso => "iso",
            PatternKind::ThreeGpp(_) => "3gpp",
            PatternKind::Tabulated(_) => "tabulated",
        }
    }
}

/// Everything that defines one experiment point.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub pattern: PatternKind,
    pub bs_array: ArrayConfig,
    pub ue_array: ArrayConfig,
    pub constants: RadioConstants,
    pub path_loss: PathLossParams,
    pub density_per_km2: f64,
    /// Side of the square deployment region, metres.
    pub region_side_m: f64,
    pub drops: u64,
    pub seed: u64,
    pub quantization: PhaseResolution,
    pub gain_composition: GainComposition,
    pub interferer_load: InterfererLoad,
    /// The UE panel points within this many degrees (uniform) of its
    /// serving BS and steers electronically onto it. Zero faces it exactly.
    pub ue_panel_window_deg: f64,
}

/// Which sectors of an interfering site transmit during a drop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum InterfererLoad {
    /// Every sector serves a UE of its own.
    AllSectors,
    /// The site serves one UE; only the sector containing it transmits.
    #[default]
    OneSector,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            pattern: PatternKind::ThreeGpp(ParametricPatch::default()),
            bs_array: ArrayConfig::square(8, 8),
            ue_array: ArrayConfig::square(4, 4),
            constants: RadioConstants::default(),
            path_loss: PathLossParams::default(),
            density_per_km2: 100.0,
            region_side_m: 2000.0,
            drops: 10_000,
            seed: 1,
            quantization: PhaseResolution::Unbounded,
            gain_composition: GainComposition::default(),
            interferer_load: InterfererLoad::default(),
            ue_panel_window_deg: 60.0,
        }
    }
}

impl Scenario {
    /// Defaults for a pattern family. Tabulated patch arrays use the
    /// 0.55 (horizontal) / 0.77 (vertical) wavelength element pitch of the
    /// simulated patch.
    pub fn for_pattern(pattern: PatternKind) -> Self {
        let mut s = Scenario {
            pattern,
            ..Scenario::default()
        };
        if let PatternKind::Tabulated(_) = s.pattern {
            for a in [&mut s.bs_array, &mut s.ue_array] {
                a.dh = 0.55;
                a.dv = 0.77;
            }
        }
        s
    }

    pub fn validate(&self) -> Result<()> {
        self.bs_array.validate()?;
        self.ue_array.validate()?;
        self.constants.validate()?;
        self.path_loss.validate()?;
        if self.drops == 0 {
            return Err(invalid("drops", "must be at least 1"));
        }
        if !(self.density_per_km2 > 0.0) || !self.density_per_km2.is_finite() {
            return Err(invalid("density_per_km2", "must be positive"));
        }
        if !(self.region_side_m > 0.0) || !self.region_side_m.is_finite() {
            return Err(invalid("region_side_m", "must be positive"));
        }
        if !(0.0..=180.0).contains(&self.ue_panel_window_deg) {
            return Err(invalid("ue_panel_window_deg", "must lie in [0, 180]"));
        }
        if let PhaseResolution::Bits(0) = self.quantization {
            return Err(invalid("quantization_bits", "must be at least 1"));
        }
        match &self.pattern {
            PatternKind::Iso => {}
            PatternKind::ThreeGpp(p) => p.validate()?,
            PatternKind::Tabulated(t) => {
                if !t.covers_sphere() {
                    return Err(invalid("pattern", "tabulated grid must cover [0,180] x [-180,180]"));
                }
            }
        }
        Ok(())
    }
}

/// Result of one drop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DropOutcome {
    pub drop: u64,
    /// `None` when every link was in outage.
    pub budget: Option<LinkBudget>,
    /// Path loss of the serving link (`+inf` in outage).
    pub serving_path_loss_db: f64,
    pub sites: usize,
}

impl DropOutcome {
    pub fn is_outage(&self) -> bool {
        self.budget.is_none()
    }
}

/// Per-scenario state shared by all drops.
struct Prepared<'a> {
    s: &'a Scenario,
    model: ElementPatternModel,
    bs_amp: AmplitudeProfile,
    ue_amp: AmplitudeProfile,
}

/// Runs one drop of `s`.
pub fn simulate_drop(s: &Scenario, drop: u64) -> Result<DropOutcome> {
    let p = Prepared {
        s,
        model: s.pattern.element_model(),
        bs_amp: AmplitudeProfile::uniform(s.bs_array.len()),
        ue_amp: AmplitudeProfile::uniform(s.ue_array.len()),
    };
    p.drop(drop)
}

impl Prepared<'_> {
    fn drop(&self, drop: u64) -> Result<DropOutcome> {
        let s = self.s;
        let mut rng = substream(s.seed, Purpose::Deployment, drop, 0);
        let dep = drop_deployment(s.density_per_km2, s.region_side_m, s.pattern.sectors(), &mut rng)?;
        let ue = dep.ue;

        let mut links = Vec::with_capacity(dep.sites.len());
        for (i, site) in dep.sites.iter().enumerate() {
            let d = f64::max(distance_m(site.position, ue), MIN_LINK_DISTANCE_M);
            let mut rng = substream(s.seed, Purpose::Link, drop, i as u64);
            let real = sample_link(d, &s.path_loss, &mut rng)?;
            links.push(real);
        }

        let assoc = match associate(ue, &dep.sites, &links)? {
            AssociationOutcome::Outage => {
                return Ok(DropOutcome {
                    drop,
                    budget: None,
                    serving_path_loss_db: f64::INFINITY,
                    sites: dep.sites.len(),
                })
            }
            AssociationOutcome::Served(a) => a,
        };

        let serving_site = &dep.sites[assoc.site];
        let taken = core::mem::replace(&mut links[assoc.site], ChannelRealization::outage());
        links[assoc.site] = taken.anchored(bearing_deg(serving_site.position, ue), bearing_deg(ue, serving_site.position));
        let q = s.quantization;
        let comp = s.gain_composition;

        let mut rng = substream(s.seed, Purpose::Orientation, drop, 0);
        let off = (rng.random::<f64>() * 2.0 - 1.0) * s.ue_panel_window_deg;
        let ue_weights = make_weights(&s.ue_array, Direction::horizontal(-off), q);
        let rx = ArraySide {
            model: &self.model,
            cfg: &s.ue_array,
            amp: &self.ue_amp,
            weights: &ue_weights,
            boresight: bearing_deg(ue, serving_site.position) + off,
        };

        let tx_weights = make_weights(&s.bs_array, Direction::horizontal(assoc.steering), q);
        let tx = ArraySide {
            model: &self.model,
            cfg: &s.bs_array,
            amp: &self.bs_amp,
            weights: &tx_weights,
            boresight: serving_site.sector_boresights[assoc.sector],
        };
        let serving_link = &links[assoc.site];
        let gain = link_gain(serving_link, &tx, &rx, comp)?;
        let signal_mw = s.constants.received_power_mw(serving_link.path_loss_db, gain);

        let mut interference_mw = 0.0;
        for (i, (site, link)) in dep.sites.iter().zip(&links).enumerate() {
            if i == assoc.site || link.is_outage() {
                continue;
            }
            interference_mw += self.interference_from(drop, i as u64, site, link, &rx)?;
        }

        Ok(DropOutcome {
            drop,
            budget: Some(LinkBudget {
                serving_bs: assoc.site,
                signal_mw,
                interference_mw,
                noise_mw: s.constants.noise_power_mw(),
            }),
            serving_path_loss_db: serving_link.path_loss_db,
            sites: dep.sites.len(),
        })
    }

    /// Power received from an interfering site, whose active sectors steer
    /// at UEs of their own placed uniformly in azimuth.
    fn interference_from(
        &self,
        drop: u64,
        index: u64,
        site: &crate::network::Site,
        link: &ChannelRealization,
        rx: &ArraySide<'_>,
    ) -> Result<f64> {
        let s = self.s;
        let responses = rx_responses(link, rx, s.gain_composition)?;
        let mut rng = substream(s.seed, Purpose::Steering, drop, index);
        let half = site.half_window();
        let mut total = 0.0;
        let mut emit = |boresight: f64, steer: f64| -> Result<()> {
            let w = make_weights(&s.bs_array, Direction::horizontal(steer), s.quantization);
            let tx = ArraySide {
                model: &self.model,
                cfg: &s.bs_array,
                amp: &self.bs_amp,
                weights: &w,
                boresight,
            };
            let g = link_gain_with_rx(link, &tx, &responses, s.gain_composition)?;
            total += s.constants.received_power_mw(link.path_loss_db, g);
            Ok(())
        };
        match s.interferer_load {
            InterfererLoad::AllSectors => {
                for &boresight in &site.sector_boresights {
                    let steer = (rng.random::<f64>() * 2.0 - 1.0) * half;
                    emit(boresight, steer)?;
                }
            }
            InterfererLoad::OneSector => {
                let azimuth = rng.random::<f64>() * 360.0;
                let (sector, steer) = site.sector_for(azimuth);
                emit(site.sector_boresights[sector], steer)?;
            }
        }
        Ok(total)
    }
}

/// Sorted sample set with an outage count.
#[derive(Debug, Clone, PartialEq)]
pub struct EcdfSeries {
    samples: Vec<f64>,
    outage_count: u64,
}

impl EcdfSeries {
    /// Sorts `samples` ascending. NaN samples are rejected.
    pub fn new(mut samples: Vec<f64>, outage_count: u64) -> Result<Self> {
        if samples.iter().any(|x| x.is_nan()) {
            return Err(invalid("samples", "NaN sample"));
        }
        samples.sort_by(f64::total_cmp);
        Ok(EcdfSeries {
            samples,
            outage_count,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn outage_count(&self) -> u64 {
        self.outage_count
    }

    /// Outage UEs over all UEs (outage plus sampled).
    pub fn outage_fraction(&self) -> f64 {
        let total = self.outage_count + self.samples.len() as u64;
        if total == 0 {
            0.0
        } else {
            self.outage_count as f64 / total as f64
        }
    }

    /// `F(x)`: fraction of samples `<= x`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if self.samples.is_empty() {
            return Err(Error::EmptySeries);
        }
        let k = self.samples.partition_point(|&v| v <= x);
        Ok(k as f64 / self.samples.len() as f64)
    }

    /// Fraction of samples strictly below `x`.
    pub fn fraction_below(&self, x: f64) -> Result<f64> {
        if self.samples.is_empty() {
            return Err(Error::EmptySeries);
        }
        let k = self.samples.partition_point(|&v| v < x);
        Ok(k as f64 / self.samples.len() as f64)
    }

    /// Lower empirical quantile: the order statistic of rank `ceil(q N)`.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if self.samples.is_empty() {
            return Err(Error::EmptySeries);
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(invalid("quantile", "q must lie in (0, 1)"));
        }
        let n = self.samples.len();
        let rank = libm::ceil(q * n as f64 - 1e-9).max(1.0) as usize;
        Ok(self.samples[rank.min(n) - 1])
    }

    pub fn median(&self) -> Result<f64> {
        self.quantile(0.5)
    }

    /// Union of two sample sets; associative and order independent.
    pub fn merge(&self, other: &EcdfSeries) -> EcdfSeries {
        let mut samples = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.samples.len() && j < other.samples.len() {
            if self.samples[i].total_cmp(&other.samples[j]).is_le() {
                samples.push(self.samples[i]);
                i += 1;
            } else {
                samples.push(other.samples[j]);
                j += 1;
            }
        }
        samples.extend_from_slice(&self.samples[i..]);
        samples.extend_from_slice(&other.samples[j..]);
        EcdfSeries {
            samples,
            outage_count: self.outage_count + other.outage_count,
        }
    }
}

/// Fraction of INR samples strictly below 0 dB.
pub fn noise_limited_probability(inr: &EcdfSeries) -> Result<f64> {
    inr.fraction_below(0.0)
}

pub fn quantile(e: &EcdfSeries, q: f64) -> Result<f64> {
    e.quantile(q)
}

/// Aggregated drops of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub drops: u64,
    pub sinr: EcdfSeries,
    pub inr: EcdfSeries,
    pub outcomes: Vec<DropOutcome>,
}

impl RunResult {
    pub fn from_outcomes(mut outcomes: Vec<DropOutcome>) -> Result<Self> {
        outcomes.sort_by_key(|o| o.drop);
        let mut sinr = Vec::with_capacity(outcomes.len());
        let mut inr = Vec::with_capacity(outcomes.len());
        let mut outage = 0;
        for o in &outcomes {
            match &o.budget {
                Some(b) => {
                    sinr.push(b.sinr_db());
                    inr.push(b.inr_db());
                }
                None => outage += 1,
            }
        }
        Ok(RunResult {
            drops: outcomes.len() as u64,
            sinr: EcdfSeries::new(sinr, outage)?,
            inr: EcdfSeries::new(inr, outage)?,
            outcomes,
        })
    }

    pub fn outage_fraction(&self) -> f64 {
        self.sinr.outage_fraction()
    }

    pub fn noise_limited_probability(&self) -> Result<f64> {
        noise_limited_probability(&self.inr)
    }
}

/// Executes the drops of a scenario. Implementations may run drops in any
/// order or in parallel; results are keyed by drop index.
pub trait DropRunner {
    fn run_indices(&self, drops: u64, f: &(dyn Fn(u64) -> Result<DropOutcome> + Sync)) -> Result<Vec<DropOutcome>>;
}

/// Runs drops one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl DropRunner for Sequential {
    fn run_indices(&self, drops: u64, f: &(dyn Fn(u64) -> Result<DropOutcome> + Sync)) -> Result<Vec<DropOutcome>> {
        (0..drops).map(f).collect()
    }
}

pub fn run_drops_with<R: DropRunner + ?Sized>(s: &Scenario, runner: &R) -> Result<RunResult> {
    s.validate()?;
    let p = Prepared {
        s,
        model: s.pattern.element_model(),
        bs_amp: AmplitudeProfile::uniform(s.bs_array.len()),
        ue_amp: AmplitudeProfile::uniform(s.ue_array.len()),
    };
    let outcomes = runner.run_indices(s.drops, &|d| p.drop(d))?;
    RunResult::from_outcomes(outcomes)
}

/// Runs every drop of `s` sequentially.
pub fn run_drops(s: &Scenario) -> Result<RunResult> {
    run_drops_with(s, &Sequential)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityPoint {
    pub density_per_km2: f64,
    pub result: RunResult,
}

impl DensityPoint {
    pub fn noise_limited_probability(&self) -> Result<f64> {
        self.result.noise_limited_probability()
    }
}

/// `run_drops` at each density, everything else held fixed.
pub fn sweep_density<R: DropRunner + ?Sized>(s: &Scenario, densities: &[f64], runner: &R) -> Result<Vec<DensityPoint>> {
    if densities.is_empty() {
        return Err(invalid("densities", "need at least one density"));
    }
    densities
        .iter()
        .map(|&d| {
            let point = Scenario {
                density_per_km2: d,
                ..s.clone()
            };
            Ok(DensityPoint {
                density_per_km2: d,
                result: run_drops_with(&point, runner)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BitsPoint {
    pub resolution: PhaseResolution,
    pub result: RunResult,
}

/// `run_drops` at each phase resolution with the same seed, so every
/// resolution sees identical deployments and channels.
pub fn sweep_bits<R: DropRunner + ?Sized>(s: &Scenario, resolutions: &[PhaseResolution], runner: &R) -> Result<Vec<BitsPoint>> {
    if resolutions.is_empty() {
        return Err(invalid("bits", "need at least one resolution"));
    }
    resolutions
        .iter()
        .map(|&r| {
            let point = Scenario {
                quantization: r,
                ..s.clone()
            };
            Ok(BitsPoint {
                resolution: r,
                result: run_drops_with(&point, runner)?,
            })
        })
        .collect()
}

/// Parses a phase resolution: a positive bit count, or `inf` / `unbounded`.
pub fn parse_resolution(text: &str) -> Result<PhaseResolution> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("unbounded") {
        return Ok(PhaseResolution::Unbounded);
    }
    match t.parse::<u32>() {
        Ok(b) if (1..=32).contains(&b) => Ok(PhaseResolution::Bits(b)),
        _ => Err(invalid("bits", String::from("expected 1..=32 or 'inf'"))),
    }
}
