//! Statistical 28 GHz channel: cluster/subpath sampling, three-state path
//! loss, the per-element channel matrix and the aligned beamforming gain.
//!
//! Azimuths of subpaths are kept in degrees, wrapped to `[-180, 180)`, in a
//! frame local to the link. The caller decides how that frame maps onto the
//! global geometry (see [`ChannelRealization::anchored`]); array boresights
//! are then subtracted to get the angle seen by each array.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp, Normal, Poisson};

use crate::antenna::{
    array_gain_db, beam_response, check_lengths, element_gain_db, AmplitudeProfile, ArrayConfig,
    BeamWeights, Direction, ElementPatternModel,
};
use crate::error::{invalid, Error, Result};
use crate::math::{db_to_linear, wrap_deg};

/// Mean of the Poisson law of the cluster count, before clipping at 1.
pub const CLUSTER_MEAN: f64 = 1.8;
/// Subpaths per cluster are uniform on `1..=MAX_SUBPATHS`.
pub const MAX_SUBPATHS: usize = 10;
/// Power-decay exponent applied to `U_k`.
pub const POWER_DECAY_EXPONENT: f64 = 2.8;
/// Standard deviation of the per-cluster shadowing `Z_k`, dB.
pub const CLUSTER_SHADOW_SIGMA_DB: f64 = 4.0;
/// `V_kl` is uniform on `[0, SUBPATH_POWER_SPREAD)`.
pub const SUBPATH_POWER_SPREAD: f64 = 0.6;
/// Mean of the exponential intra-cluster spread, radians.
pub const SPREAD_MEAN_RAD: f64 = 0.178;
/// Floor on the intra-cluster spread, radians.
pub const SPREAD_FLOOR_RAD: f64 = 0.0122;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Subpath {
    /// Fraction of the link power carried by this subpath.
    pub power_frac: f64,
    /// Small-scale phase, radians in `[0, 2 pi)`.
    pub phase: f64,
    /// Departure azimuth, degrees.
    pub aod_phi: f64,
    /// Arrival azimuth, degrees.
    pub aoa_phi: f64,
}

impl Subpath {
    /// Small-scale fading gain `sqrt(P) e^{j phase}`.
    pub fn gain(&self) -> Complex64 {
        Complex64::from_polar(libm::sqrt(self.power_frac), self.phase)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    /// Central departure azimuth, degrees.
    pub aod_center: f64,
    /// Central arrival azimuth, degrees.
    pub aoa_center: f64,
    pub subpaths: Vec<Subpath>,
}

impl Cluster {
    pub fn power(&self) -> f64 {
        self.subpaths.iter().map(|s| s.power_frac).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum LinkState {
    Los,
    Nlos,
    Outage,
}

/// Log-distance parameters for one propagation state.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct StateParams {
    pub intercept_db: f64,
    pub exponent: f64,
    pub shadowing_sigma_db: f64,
}

/// Three-state path loss: log-distance with shadowing per state, plus the
/// distance-dependent state probabilities
///
/// ```text
/// p_out(d) = max(0, 1 - exp(-d / outage_scale_m + outage_offset))
/// p_los(d) = (1 - p_out(d)) exp(-d / los_scale_m)
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct PathLossParams {
    pub los: StateParams,
    pub nlos: StateParams,
    pub outage_scale_m: f64,
    pub outage_offset: f64,
    pub los_scale_m: f64,
}

impl Default for PathLossParams {
    fn default() -> Self {
        PathLossParams {
            los: StateParams {
                intercept_db: 61.4,
                exponent: 2.0,
                shadowing_sigma_db: 5.8,
            },
            nlos: StateParams {
                intercept_db: 72.0,
                exponent: 2.92,
                shadowing_sigma_db: 8.7,
            },
            outage_scale_m: 30.0,
            outage_offset: 5.2,
            los_scale_m: 67.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateProbabilities {
    pub los: f64,
    pub nlos: f64,
    pub outage: f64,
}

impl PathLossParams {
    pub fn validate(&self) -> Result<()> {
        for (name, s) in [("path_loss.los", &self.los), ("path_loss.nlos", &self.nlos)] {
            if !(s.exponent > 0.0) || !s.exponent.is_finite() {
                return Err(invalid(name, "exponent must be positive"));
            }
            if !(s.shadowing_sigma_db >= 0.0) || !s.shadowing_sigma_db.is_finite() {
                return Err(invalid(name, "shadowing sigma must be non-negative"));
            }
            if !s.intercept_db.is_finite() {
                return Err(invalid(name, "intercept must be finite"));
            }
        }
        if !(self.outage_scale_m > 0.0 && self.los_scale_m > 0.0) {
            return Err(invalid("path_loss", "distance scales must be positive"));
        }
        if !self.outage_offset.is_finite() {
            return Err(invalid("path_loss", "outage offset must be finite"));
        }
        Ok(())
    }

    pub fn state(&self, state: LinkState) -> Option<&StateParams> {
        match state {
            LinkState::Los => Some(&self.los),
            LinkState::Nlos => Some(&self.nlos),
            LinkState::Outage => None,
        }
    }

    pub fn probabilities(&self, d: f64) -> StateProbabilities {
        let d = f64::max(d, 0.0);
        let outage = (1.0 - libm::exp(-d / self.outage_scale_m + self.outage_offset)).clamp(0.0, 1.0);
        let los = (1.0 - outage) * libm::exp(-d / self.los_scale_m);
        let nlos = (1.0 - outage - los).max(0.0);
        StateProbabilities { los, nlos, outage }
    }
}

/// One sampled link: its clusters, propagation state and path loss.
///
/// An outage link has no clusters and infinite path loss.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub clusters: Vec<Cluster>,
    pub state: LinkState,
    pub path_loss_db: f64,
}

impl ChannelRealization {
    pub fn outage() -> Self {
        ChannelRealization {
            clusters: Vec::new(),
            state: LinkState::Outage,
            path_loss_db: f64::INFINITY,
        }
    }

    pub fn is_outage(&self) -> bool {
        self.state == LinkState::Outage
    }

    pub fn subpaths(&self) -> impl Iterator<Item = &Subpath> {
        self.clusters.iter().flat_map(|c| c.subpaths.iter())
    }

    pub fn total_power(&self) -> f64 {
        self.subpaths().map(|s| s.power_frac).sum()
    }

    /// Index of the cluster carrying the most power.
    pub fn dominant_cluster(&self) -> Option<usize> {
        self.clusters
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.power().total_cmp(&b.1.power()))
            .map(|(i, _)| i)
    }

    /// Rotates the departure and arrival angle sets so that the dominant
    /// cluster is centered on `aod` and `aoa` (degrees). Relative angles
    /// between clusters and subpaths are preserved.
    pub fn anchored(mut self, aod: f64, aoa: f64) -> Self {
        if let Some(k) = self.dominant_cluster() {
            let dep = aod - self.clusters[k].aod_center;
            let arr = aoa - self.clusters[k].aoa_center;
            for c in &mut self.clusters {
                c.aod_center = wrap_deg(c.aod_center + dep);
                c.aoa_center = wrap_deg(c.aoa_center + arr);
                for s in &mut c.subpaths {
                    s.aod_phi = wrap_deg(s.aod_phi + dep);
                    s.aoa_phi = wrap_deg(s.aoa_phi + arr);
                }
            }
        }
        self
    }
}

fn sample_azimuths<R: Rng + ?Sized>(rng: &mut R, count: usize) -> (f64, Vec<f64>) {
    let spread = Exp::new(1.0 / SPREAD_MEAN_RAD).expect("positive rate");
    let center = rng.random::<f64>() * 2.0 * PI;
    let subpaths = (1..=count)
        .map(|l| {
            let s = f64::max(spread.sample(rng), SPREAD_FLOOR_RAD);
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            wrap_deg((center + sign * s / 2.0).to_degrees())
        })
        .collect();
    (wrap_deg(center.to_degrees()), subpaths)
}

/// Draws the cluster/subpath structure of one link, with subpath powers
/// normalized to sum to one.
pub fn sample_clusters<R: Rng + ?Sized>(rng: &mut R) -> Vec<Cluster> {
    let poisson = Poisson::new(CLUSTER_MEAN).expect("positive mean");
    let shadow = Normal::new(0.0, CLUSTER_SHADOW_SIGMA_DB).expect("finite sigma");
    let k = f64::max(poisson.sample(rng), 1.0) as usize;

    let mut clusters = Vec::with_capacity(k);
    let mut total = 0.0;
    for _ in 0..k {
        let count = rng.random_range(1..=MAX_SUBPATHS);
        // (0, 1] so that a cluster never gets exactly zero power
        let u = 1.0 - rng.random::<f64>();
        let z = shadow.sample(rng);
        let base = libm::pow(u, POWER_DECAY_EXPONENT - 1.0) / count as f64;
        let (aod_center, aods) = sample_azimuths(rng, count);
        let (aoa_center, aoas) = sample_azimuths(rng, count);
        let mut subpaths = Vec::with_capacity(count);
        for l in 0..count {
            let v = rng.random::<f64>() * SUBPATH_POWER_SPREAD;
            let power = base * libm::pow(10.0, -0.1 * z + v);
            total += power;
            subpaths.push(Subpath {
                power_frac: power,
                phase: rng.random::<f64>() * 2.0 * PI,
                aod_phi: aods[l],
                aoa_phi: aoas[l],
            });
        }
        clusters.push(Cluster {
            aod_center,
            aoa_center,
            subpaths,
        });
    }
    for s in clusters.iter_mut().flat_map(|c| c.subpaths.iter_mut()) {
        s.power_frac /= total;
    }
    clusters
}

/// Categorical draw of the propagation state at distance `d` metres.
pub fn sample_link_state<R: Rng + ?Sized>(d: f64, params: &PathLossParams, rng: &mut R) -> LinkState {
    let p = params.probabilities(d);
    let x: f64 = rng.random();
    if x < p.los {
        LinkState::Los
    } else if x < p.los + p.nlos {
        LinkState::Nlos
    } else {
        LinkState::Outage
    }
}

/// Path loss without shadowing. Outage is `+inf`.
pub fn mean_path_loss_db(d: f64, state: LinkState, params: &PathLossParams) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(invalid("distance", "must be positive and finite"));
    }
    Ok(match params.state(state) {
        Some(s) => s.intercept_db + 10.0 * s.exponent * libm::log10(d),
        None => f64::INFINITY,
    })
}

/// Path loss with a log-normal shadowing draw. Outage is `+inf` and
/// consumes no randomness.
pub fn path_loss_db<R: Rng + ?Sized>(d: f64, state: LinkState, params: &PathLossParams, rng: &mut R) -> Result<f64> {
    let mean = mean_path_loss_db(d, state, params)?;
    match params.state(state) {
        Some(s) if s.shadowing_sigma_db > 0.0 => {
            let n = Normal::new(0.0, s.shadowing_sigma_db).map_err(|_| invalid("shadowing", "bad sigma"))?;
            Ok(mean + n.sample(rng))
        }
        _ => Ok(mean),
    }
}

/// Samples state, path loss and (for non-outage links) clusters.
pub fn sample_link<R: Rng + ?Sized>(d: f64, params: &PathLossParams, rng: &mut R) -> Result<ChannelRealization> {
    let state = sample_link_state(d, params, rng);
    if state == LinkState::Outage {
        return Ok(ChannelRealization::outage());
    }
    let path_loss_db = path_loss_db(d, state, params, rng)?;
    let clusters = sample_clusters(rng);
    Ok(ChannelRealization {
        clusters,
        state,
        path_loss_db,
    })
}

/// How array patterns enter the channel matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum GainComposition {
    /// `F` is the array field pattern `sqrt(A_A)` and `u` is the bare
    /// spatial signature of each element.
    Literal,
    /// `F` is the element field pattern and each element term carries its
    /// amplitude and beamforming weight explicitly.
    #[default]
    ElementOnly,
}

/// An array as seen by one end of a link.
#[derive(Debug, Clone, Copy)]
pub struct ArraySide<'a> {
    pub model: &'a ElementPatternModel,
    pub cfg: &'a ArrayConfig,
    pub amp: &'a AmplitudeProfile,
    pub weights: &'a BeamWeights,
    /// Global azimuth of the array boresight, degrees.
    pub boresight: f64,
}

impl ArraySide<'_> {
    fn check(&self) -> Result<()> {
        check_lengths(self.cfg, self.amp, self.weights)
    }

    /// Direction of a global azimuth in this array's frame (horizontal plane).
    pub fn local(&self, azimuth: f64) -> Direction {
        Direction::horizontal(azimuth - self.boresight)
    }

    /// Sum over the elements of this side's per-subpath factor. For
    /// [`GainComposition::ElementOnly`] this is `F_e(dir) * a.(w o u(dir))`;
    /// for [`GainComposition::Literal`] it is `sqrt(A_A(dir)) * sum(u(dir))`.
    pub fn response(&self, composition: GainComposition, azimuth: f64) -> Result<Complex64> {
        let dir = self.local(azimuth);
        match composition {
            GainComposition::ElementOnly => {
                let f = libm::sqrt(db_to_linear(element_gain_db(self.model, dir)?));
                Ok(beam_response(self.cfg, self.amp, self.weights, dir) * f)
            }
            GainComposition::Literal => {
                let f = libm::sqrt(db_to_linear(array_gain_db(self.model, self.cfg, self.amp, self.weights, dir)?));
                let u: Complex64 = self.cfg.spatial_signature(dir).into_iter().sum();
                Ok(u * f)
            }
        }
    }

    /// Per-element factors for one subpath, before the sum over elements.
    fn element_terms(&self, composition: GainComposition, azimuth: f64) -> Result<Vec<Complex64>> {
        let dir = self.local(azimuth);
        let u = self.cfg.spatial_signature(dir);
        match composition {
            GainComposition::ElementOnly => {
                let f = libm::sqrt(db_to_linear(element_gain_db(self.model, dir)?));
                Ok(u
                    .iter()
                    .zip(self.weights.weights())
                    .zip(self.amp.amplitudes())
                    .map(|((u, w), a)| u * w * (a * f))
                    .collect())
            }
            GainComposition::Literal => {
                let f = libm::sqrt(db_to_linear(array_gain_db(self.model, self.cfg, self.amp, self.weights, dir)?));
                Ok(u.into_iter().map(|u| u * f).collect())
            }
        }
    }
}

/// Dense `n_tx x n_rx` complex matrix, row-major over transmit elements.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    n_tx: usize,
    n_rx: usize,
    data: Vec<Complex64>,
}

impl ChannelMatrix {
    pub fn zeros(n_tx: usize, n_rx: usize) -> Self {
        ChannelMatrix {
            n_tx,
            n_rx,
            data: vec![Complex64::new(0.0, 0.0); n_tx * n_rx],
        }
    }

    pub fn from_vec(n_tx: usize, n_rx: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n_tx * n_rx {
            return Err(Error::DimensionMismatch {
                what: "channel matrix",
                expected: n_tx * n_rx,
                actual: data.len(),
            });
        }
        Ok(ChannelMatrix { n_tx, n_rx, data })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_tx, self.n_rx)
    }

    pub fn get(&self, t: usize, r: usize) -> Complex64 {
        self.data[t * self.n_rx + r]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }
}

/// Assembles `h_{r,t} = sum_kl g_kl F_r u_r F_t conj(u_t)` for every
/// transmit/receive element pair. Vertical angles are fixed at 90 degrees.
pub fn channel_matrix(
    real: &ChannelRealization,
    tx: &ArraySide<'_>,
    rx: &ArraySide<'_>,
    composition: GainComposition,
) -> Result<ChannelMatrix> {
    tx.check()?;
    rx.check()?;
    let (n_tx, n_rx) = (tx.cfg.len(), rx.cfg.len());
    let mut h = ChannelMatrix::zeros(n_tx, n_rx);
    if real.is_outage() {
        return Ok(h);
    }
    for s in real.subpaths() {
        let g = s.gain();
        let t_terms = tx.element_terms(composition, s.aod_phi)?;
        let r_terms = rx.element_terms(composition, s.aoa_phi)?;
        for (t, tt) in t_terms.iter().enumerate() {
            let row = g * tt.conj();
            for (r, rr) in r_terms.iter().enumerate() {
                h.data[t * n_rx + r] += row * rr;
            }
        }
    }
    Ok(h)
}

/// `|sum_r sum_t h_{r,t}|^2`.
pub fn aligned_gain(h: &ChannelMatrix) -> f64 {
    h.data.iter().sum::<Complex64>().norm_sqr()
}

/// Aligned gain of a link without materializing the channel matrix: the
/// double sum factorizes into per-side responses for every subpath.
pub fn link_gain(
    real: &ChannelRealization,
    tx: &ArraySide<'_>,
    rx: &ArraySide<'_>,
    composition: GainComposition,
) -> Result<f64> {
    tx.check()?;
    rx.check()?;
    if real.is_outage() {
        return Ok(0.0);
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for s in real.subpaths() {
        let t = tx.response(composition, s.aod_phi)?;
        let r = rx.response(composition, s.aoa_phi)?;
        sum += s.gain() * r * t.conj();
    }
    Ok(sum.norm_sqr())
}

/// Same as [`link_gain`] with the receive responses precomputed, one per
/// subpath in iteration order. Lets one receive beam be shared across
/// several transmit sectors.
pub fn link_gain_with_rx(
    real: &ChannelRealization,
    tx: &ArraySide<'_>,
    rx_responses: &[Complex64],
    composition: GainComposition,
) -> Result<f64> {
    tx.check()?;
    if real.is_outage() {
        return Ok(0.0);
    }
    let expected = real.subpaths().count();
    if expected != rx_responses.len() {
        return Err(Error::DimensionMismatch {
            what: "receive responses",
            expected,
            actual: rx_responses.len(),
        });
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for (s, r) in real.subpaths().zip(rx_responses) {
        let t = tx.response(composition, s.aod_phi)?;
        sum += s.gain() * r * t.conj();
    }
    Ok(sum.norm_sqr())
}

/// Receive-side responses for every subpath of `real`.
pub fn rx_responses(real: &ChannelRealization, rx: &ArraySide<'_>, composition: GainComposition) -> Result<Vec<Complex64>> {
    rx.check()?;
    real.subpaths().map(|s| rx.response(composition, s.aoa_phi)).collect()
}
