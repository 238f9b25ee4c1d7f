//! Element radiation patterns, beamforming weights and the array pattern of
//! a uniform planar array (UPA).
//!
//! Angles are in degrees throughout. `theta` is the vertical angle measured
//! from zenith (90 is the horizontal plane) and `phi` is the horizontal angle
//! measured from array boresight.
//!
//! The array is indexed row-major: element `(p, r)` with vertical index `p`
//! in `0..rows` and horizontal index `r` in `0..cols` sits at position
//! `p * cols + r` in every weight and amplitude vector.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::math::{cos_deg, db_to_linear, linear_to_db, sin_deg, wrap_deg};

/// A pair of angles `(theta, phi)` in degrees, always stored normalized:
/// `theta` in `[0, 180]`, `phi` in `[-180, 180)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Direction {
    theta: f64,
    phi: f64,
}

impl Direction {
    /// Builds a normalized direction. A `theta` outside `[0, 180]` is folded
    /// back over the pole, which moves `phi` by 180 degrees.
    pub fn new(theta: f64, phi: f64) -> Self {
        let mut t = libm::fmod(theta, 360.0);
        if t < 0.0 {
            t += 360.0;
        }
        let mut p = phi;
        if t > 180.0 {
            t = 360.0 - t;
            p += 180.0;
        }
        Direction {
            theta: t,
            phi: wrap_deg(p),
        }
    }

    /// A direction in the horizontal plane.
    pub fn horizontal(phi: f64) -> Self {
        Direction::new(90.0, phi)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Parametric patch element (the 3GPP sectorized element).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ParametricPatch {
    /// Vertical 3 dB beamwidth, degrees.
    #[cfg_attr(feature = "serde", serde(rename = "theta_3db_deg"))]
    pub theta_3db: f64,
    /// Horizontal 3 dB beamwidth, degrees.
    #[cfg_attr(feature = "serde", serde(rename = "phi_3db_deg"))]
    pub phi_3db: f64,
    /// Side-lobe level limit, dB.
    #[cfg_attr(feature = "serde", serde(rename = "sla_v_db"))]
    pub sla_v: f64,
    /// Front-back ratio, dB.
    #[cfg_attr(feature = "serde", serde(rename = "a_m_db"))]
    pub a_m: f64,
    /// Peak element gain, dBi.
    #[cfg_attr(feature = "serde", serde(rename = "g_max_dbi"))]
    pub g_max: f64,
}

impl Default for ParametricPatch {
    fn default() -> Self {
        ParametricPatch {
            theta_3db: 65.0,
            phi_3db: 65.0,
            sla_v: 30.0,
            a_m: 30.0,
            g_max: 8.0,
        }
    }
}

impl ParametricPatch {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta_3db > 0.0 && self.phi_3db > 0.0) {
            return Err(invalid("beamwidth", "3 dB beamwidths must be positive"));
        }
        if !(self.sla_v >= 0.0 && self.a_m >= 0.0) {
            return Err(invalid("attenuation", "SLA_V and A_m must be non-negative"));
        }
        if !self.g_max.is_finite() {
            return Err(invalid("g_max", "must be finite"));
        }
        Ok(())
    }

    /// Vertical cut `A_EV(theta)`, dB (non-positive).
    pub fn vertical_db(&self, theta: f64) -> f64 {
        let x = (theta - 90.0) / self.theta_3db;
        -f64::min(12.0 * x * x, self.sla_v)
    }

    /// Horizontal cut `A_EH(phi)`, dB (non-positive).
    pub fn horizontal_db(&self, phi: f64) -> f64 {
        let x = phi / self.phi_3db;
        -f64::min(12.0 * x * x, self.a_m)
    }

    pub fn gain_db(&self, dir: Direction) -> f64 {
        let combined = -(self.vertical_db(dir.theta) + self.horizontal_db(dir.phi));
        self.g_max - f64::min(combined, self.a_m)
    }
}

/// Element gain sampled on a regular `(theta, phi)` grid, dBi.
///
/// `gain` is row-major over theta: the value at `(theta_grid[i], phi_grid[j])`
/// is `gain[i * phi_grid.len() + j]`. Between nodes the gain is bilinear in
/// dB; outside the theta range it is clamped to the nearest edge; outside the
/// phi range it is an [`Error::OutOfDomain`].
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPattern {
    theta_grid: Vec<f64>,
    phi_grid: Vec<f64>,
    gain: Vec<f64>,
}

impl TabulatedPattern {
    pub fn new(theta_grid: Vec<f64>, phi_grid: Vec<f64>, gain: Vec<f64>) -> Result<Self> {
        check_axis("theta_grid", &theta_grid, 0.0, 180.0)?;
        check_axis("phi_grid", &phi_grid, -180.0, 180.0)?;
        let expected = theta_grid.len() * phi_grid.len();
        if gain.len() != expected {
            return Err(Error::DimensionMismatch {
                what: "tabulated gain",
                expected,
                actual: gain.len(),
            });
        }
        if gain.iter().any(|g| !g.is_finite()) {
            return Err(invalid("gain", "tabulated gains must be finite"));
        }
        Ok(TabulatedPattern {
            theta_grid,
            phi_grid,
            gain,
        })
    }

    pub fn theta_grid(&self) -> &[f64] {
        &self.theta_grid
    }

    pub fn phi_grid(&self) -> &[f64] {
        &self.phi_grid
    }

    pub fn gains(&self) -> &[f64] {
        &self.gain
    }

    pub fn node(&self, i: usize, j: usize) -> f64 {
        self.gain[i * self.phi_grid.len() + j]
    }

    pub fn max_gain_db(&self) -> f64 {
        self.gain.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// True when the grid spans the whole sphere `[0,180] x [-180,180]`.
    pub fn covers_sphere(&self) -> bool {
        let t = &self.theta_grid;
        let p = &self.phi_grid;
        t[0] <= 0.0 && t[t.len() - 1] >= 180.0 && p[0] <= -180.0 && p[p.len() - 1] >= 180.0
    }

    pub fn gain_db(&self, dir: Direction) -> Result<f64> {
        let (p0, p1) = (self.phi_grid[0], self.phi_grid[self.phi_grid.len() - 1]);
        if dir.phi < p0 || dir.phi > p1 {
            return Err(Error::OutOfDomain {
                theta: dir.theta,
                phi: dir.phi,
            });
        }
        let (i, ti) = bracket(&self.theta_grid, dir.theta);
        let (j, tj) = bracket(&self.phi_grid, dir.phi);
        let i1 = (i + 1).min(self.theta_grid.len() - 1);
        let j1 = (j + 1).min(self.phi_grid.len() - 1);
        let g00 = self.node(i, j);
        let g01 = self.node(i, j1);
        let g10 = self.node(i1, j);
        let g11 = self.node(i1, j1);
        let top = g00 + (g01 - g00) * tj;
        let bottom = g10 + (g11 - g10) * tj;
        Ok(top + (bottom - top) * ti)
    }

    /// A smooth stand-in for a full-wave simulated patch at 29.5 GHz:
    /// peak 5.71 dBi, about 6 dB down at 60 degrees off boresight, 25 dB
    /// front-back ratio. Sampled on a 1 degree grid.
    pub fn synthetic_patch() -> Self {
        const PEAK_DBI: f64 = 5.71;
        const BEAMWIDTH: f64 = 84.85;
        const FLOOR_DB: f64 = 25.0;
        let theta_grid: Vec<f64> = (0..=180).map(f64::from).collect();
        let phi_grid: Vec<f64> = (-180..=180).map(f64::from).collect();
        let mut gain = Vec::with_capacity(theta_grid.len() * phi_grid.len());
        for &t in &theta_grid {
            for &p in &phi_grid {
                let v = (t - 90.0) / BEAMWIDTH;
                let h = p / BEAMWIDTH;
                let att = f64::min(12.0 * (v * v + h * h), FLOOR_DB);
                gain.push(PEAK_DBI - att);
            }
        }
        TabulatedPattern {
            theta_grid,
            phi_grid,
            gain,
        }
    }
}

fn check_axis(name: &'static str, axis: &[f64], lo: f64, hi: f64) -> Result<()> {
    if axis.len() < 2 {
        return Err(invalid(name, "needs at least two nodes"));
    }
    if axis.iter().any(|v| !v.is_finite() || *v < lo || *v > hi) {
        return Err(invalid(name, "node outside the angular range"));
    }
    if axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid(name, "nodes must be strictly increasing"));
    }
    Ok(())
}

/// Returns the lower node index and the fractional position towards the
/// next node, clamping to the axis ends.
fn bracket(axis: &[f64], x: f64) -> (usize, f64) {
    let last = axis.len() - 1;
    if x <= axis[0] {
        return (0, 0.0);
    }
    if x >= axis[last] {
        return (last, 0.0);
    }
    let upper = axis.partition_point(|&v| v <= x);
    let i = upper - 1;
    let t = (x - axis[i]) / (axis[i + 1] - axis[i]);
    (i, t)
}

/// How a single element radiates.
#[derive(Debug, Clone, PartialEq)]
pub enum ElementPatternModel {
    /// 0 dB in every direction.
    Isotropic,
    ParametricPatch(ParametricPatch),
    Tabulated(Arc<TabulatedPattern>),
}

impl Default for ElementPatternModel {
    fn default() -> Self {
        ElementPatternModel::ParametricPatch(ParametricPatch::default())
    }
}

/// Element gain `A_E(theta, phi)` in dB.
pub fn element_gain_db(model: &ElementPatternModel, dir: Direction) -> Result<f64> {
    match model {
        ElementPatternModel::Isotropic => Ok(0.0),
        ElementPatternModel::ParametricPatch(p) => Ok(p.gain_db(dir)),
        ElementPatternModel::Tabulated(t) => t.gain_db(dir),
    }
}

/// Geometry of a uniform planar array. Spacings are in wavelengths.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ArrayConfig {
    pub rows: usize,
    pub cols: usize,
    #[cfg_attr(feature = "serde", serde(rename = "dv_wavelengths", default = "half_wavelength"))]
    pub dv: f64,
    #[cfg_attr(feature = "serde", serde(rename = "dh_wavelengths", default = "half_wavelength"))]
    pub dh: f64,
}

#[cfg(feature = "serde")]
fn half_wavelength() -> f64 {
    0.5
}

impl ArrayConfig {
    /// Half-wavelength spaced `rows x cols` array.
    pub fn square(rows: usize, cols: usize) -> Self {
        ArrayConfig {
            rows,
            cols,
            dv: 0.5,
            dh: 0.5,
        }
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(invalid("array", "rows and cols must be at least 1"));
        }
        if !(self.dv > 0.0 && self.dh > 0.0) || !self.dv.is_finite() || !self.dh.is_finite() {
            return Err(invalid("array", "element spacings must be positive"));
        }
        Ok(())
    }

    /// Per-element phase progression steps (radians) towards `dir`:
    /// `(2 pi dv cos(theta), 2 pi dh sin(theta) sin(phi))`.
    fn phase_steps(&self, dir: Direction) -> (f64, f64) {
        let vertical = 2.0 * PI * self.dv * cos_deg(dir.theta);
        let horizontal = 2.0 * PI * self.dh * sin_deg(dir.theta) * sin_deg(dir.phi);
        (vertical, horizontal)
    }

    /// Planar spatial signature `u(dir)`, one unit phasor per element.
    pub fn spatial_signature(&self, dir: Direction) -> Vec<Complex64> {
        let (sv, sh) = self.phase_steps(dir);
        let mut out = Vec::with_capacity(self.len());
        for p in 0..self.rows {
            for r in 0..self.cols {
                out.push(Complex64::from_polar(1.0, p as f64 * sv + r as f64 * sh));
            }
        }
        out
    }
}

impl Default for ArrayConfig {
    fn default() -> Self {
        ArrayConfig::square(8, 8)
    }
}

/// Phase-shifter resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PhaseResolution {
    /// `b` bits: phases restricted to multiples of `2 pi / 2^b`.
    Bits(u32),
    /// Ideal, continuous phase.
    Unbounded,
}

impl PhaseResolution {
    pub fn levels(&self) -> Option<u64> {
        match self {
            PhaseResolution::Bits(b) => Some(1u64 << (*b).min(63)),
            PhaseResolution::Unbounded => None,
        }
    }
}

impl core::fmt::Display for PhaseResolution {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PhaseResolution::Bits(b) => write!(f, "{b}"),
            PhaseResolution::Unbounded => f.write_str("inf"),
        }
    }
}

/// Unit-magnitude beamforming weights for one steering direction.
///
/// The stored weight of element `(p, r)` is the conjugate of the spatial
/// signature at the steering direction (optionally phase-quantized), so the
/// product `w * u(dir)` reproduces the `Psi_p`, `Psi_r` phase terms against
/// any evaluation direction.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamWeights {
    weights: Vec<Complex64>,
    steering: Direction,
    resolution: PhaseResolution,
    rows: usize,
    cols: usize,
}

impl BeamWeights {
    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn steering(&self) -> Direction {
        self.steering
    }

    pub fn resolution(&self) -> PhaseResolution {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Rounds `phase` (radians) to the nearest of `levels` uniformly spaced
/// values in `[0, 2 pi)`.
pub fn quantize_phase(phase: f64, levels: u64) -> f64 {
    let step = 2.0 * PI / levels as f64;
    let k = libm::round(phase / step);
    let k = k.rem_euclid_f64(levels as f64);
    k * step
}

trait RemEuclid {
    fn rem_euclid_f64(self, m: f64) -> f64;
}

impl RemEuclid for f64 {
    fn rem_euclid_f64(self, m: f64) -> f64 {
        let r = libm::fmod(self, m);
        if r < 0.0 {
            r + m
        } else {
            r
        }
    }
}

/// Beamforming vector for `steering`, with optional phase quantization.
pub fn make_weights(cfg: &ArrayConfig, steering: Direction, resolution: PhaseResolution) -> BeamWeights {
    let (sv, sh) = cfg.phase_steps(steering);
    let mut weights = Vec::with_capacity(cfg.len());
    for p in 0..cfg.rows {
        for r in 0..cfg.cols {
            let ideal = -(p as f64 * sv + r as f64 * sh);
            let w = match resolution.levels() {
                None => Complex64::from_polar(1.0, ideal),
                Some(levels) => Complex64::from_polar(1.0, quantize_phase(ideal, levels)),
            };
            weights.push(w);
        }
    }
    BeamWeights {
        weights,
        steering,
        resolution,
        rows: cfg.rows,
        cols: cfg.cols,
    }
}

/// Per-element amplitude taper together with the correlation coefficient
/// `rho` of the array factor.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeProfile {
    amplitudes: Vec<f64>,
    rho: f64,
}

impl AmplitudeProfile {
    /// Equal amplitudes `1/sqrt(n)`, `rho = 1`.
    pub fn uniform(n: usize) -> Self {
        let a = 1.0 / libm::sqrt(n as f64);
        AmplitudeProfile {
            amplitudes: alloc::vec![a; n],
            rho: 1.0,
        }
    }

    /// Arbitrary non-negative taper, rescaled to unit total power.
    pub fn normalized(amplitudes: Vec<f64>) -> Result<Self> {
        if amplitudes.is_empty() || amplitudes.iter().any(|a| !(*a >= 0.0) || !a.is_finite()) {
            return Err(invalid("amplitudes", "must be finite and non-negative"));
        }
        let power: f64 = amplitudes.iter().map(|a| a * a).sum();
        if power <= 0.0 {
            return Err(invalid("amplitudes", "must not all be zero"));
        }
        let scale = 1.0 / libm::sqrt(power);
        Ok(AmplitudeProfile {
            amplitudes: amplitudes.into_iter().map(|a| a * scale).collect(),
            rho: 1.0,
        })
    }

    pub fn with_rho(mut self, rho: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(invalid("rho", "correlation coefficient must lie in [0, 1]"));
        }
        self.rho = rho;
        Ok(self)
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }
}

/// Below this `|a . w|^2` the pattern is treated as an exact null.
pub const NULL_POWER_FLOOR: f64 = 1e-20;

pub(crate) fn check_lengths(cfg: &ArrayConfig, amp: &AmplitudeProfile, w: &BeamWeights) -> Result<()> {
    let n = cfg.len();
    if amp.len() != n {
        return Err(Error::DimensionMismatch {
            what: "amplitude profile",
            expected: n,
            actual: amp.len(),
        });
    }
    if w.len() != n || w.rows != cfg.rows || w.cols != cfg.cols {
        return Err(Error::DimensionMismatch {
            what: "beam weights",
            expected: n,
            actual: w.len(),
        });
    }
    Ok(())
}

/// Complex beam response `a . (w o u(dir))`. Its squared magnitude is the
/// linear array factor for `rho = 1`.
pub fn beam_response(cfg: &ArrayConfig, amp: &AmplitudeProfile, w: &BeamWeights, dir: Direction) -> Complex64 {
    let (sv, sh) = cfg.phase_steps(dir);
    let col_step = Complex64::from_polar(1.0, sh);
    let mut sum = Complex64::new(0.0, 0.0);
    for p in 0..cfg.rows {
        let mut phasor = Complex64::from_polar(1.0, p as f64 * sv);
        let base = p * cfg.cols;
        for r in 0..cfg.cols {
            let i = base + r;
            sum += w.weights[i] * phasor * amp.amplitudes[i];
            phasor *= col_step;
        }
    }
    sum
}

/// Linear array factor `1 + rho (|a . w|^2 - 1)`, with nulls mapped to 0.
pub fn array_factor_linear(cfg: &ArrayConfig, amp: &AmplitudeProfile, w: &BeamWeights, dir: Direction) -> Result<f64> {
    check_lengths(cfg, amp, w)?;
    let coherent = beam_response(cfg, amp, w, dir).norm_sqr();
    Ok(af_from_coherent(coherent, amp.rho))
}

fn af_from_coherent(coherent: f64, rho: f64) -> f64 {
    let v = 1.0 + rho * (coherent - 1.0);
    if v <= NULL_POWER_FLOOR {
        0.0
    } else {
        v
    }
}

/// Array factor `AF(theta, phi)` in dB; an exact null is `-inf`.
pub fn array_factor_db(cfg: &ArrayConfig, amp: &AmplitudeProfile, w: &BeamWeights, dir: Direction) -> Result<f64> {
    array_factor_linear(cfg, amp, w, dir).map(linear_to_db)
}

/// Array radiation pattern `A_A = A_E + AF`, dB.
pub fn array_gain_db(
    model: &ElementPatternModel,
    cfg: &ArrayConfig,
    amp: &AmplitudeProfile,
    w: &BeamWeights,
    dir: Direction,
) -> Result<f64> {
    let af = array_factor_db(cfg, amp, w, dir)?;
    let e = element_gain_db(model, dir)?;
    Ok(e + af)
}

/// Vertically polarized field amplitude `sqrt(10^(A_A/10))`. The
/// horizontal component is identically zero.
pub fn field_amplitude(
    model: &ElementPatternModel,
    cfg: &ArrayConfig,
    amp: &AmplitudeProfile,
    w: &BeamWeights,
    dir: Direction,
) -> Result<f64> {
    let gain = array_gain_db(model, cfg, amp, w, dir)?;
    Ok(libm::sqrt(db_to_linear(gain)))
}

/// One row of a horizontal pattern cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternCutRow {
    pub phi: f64,
    pub element_db: f64,
    pub af_db: f64,
    pub array_db: f64,
}

/// Horizontal cut at fixed `theta` over `phi` in `[-180, 180]`.
pub fn export_pattern_cut(
    model: &ElementPatternModel,
    cfg: &ArrayConfig,
    amp: &AmplitudeProfile,
    w: &BeamWeights,
    theta: f64,
    phi_step: f64,
) -> Result<Vec<PatternCutRow>> {
    if !(phi_step > 0.0) || !phi_step.is_finite() {
        return Err(invalid("phi_step", "must be positive"));
    }
    check_lengths(cfg, amp, w)?;
    let steps = libm::floor(360.0 / phi_step + 1e-9) as usize;
    let mut rows = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let phi = -180.0 + k as f64 * phi_step;
        let dir = Direction::new(theta, phi);
        let element_db = element_gain_db(model, dir)?;
        let af_db = array_factor_db(cfg, amp, w, dir)?;
        rows.push(PatternCutRow {
            phi,
            element_db,
            af_db,
            array_db: element_db + af_db,
        });
    }
    Ok(rows)
}
