//! Simulated range profiles.
//!
//! A frame's points are moved to spherical coordinates and each range becomes
//! the mean of a unit-height Gaussian over discrete range bins. The sum of
//! those Gaussians, sampled at integer bins, stands in for the de-chirped
//! range profile that CFAR discarded.

use std::f64::consts::FRAC_PI_2;

use crate::frames::{Echo, Frame, Point};

/// Components are evaluated only within this many sigmas of their mean.
pub const TRUNCATION_SIGMAS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum ProfileError {
    #[error("range {range} m maps to bin {bin}, outside [0, {window})")]
    OutOfRange { range: f64, bin: f64, window: usize },
    #[error("invalid profile configuration: {0}")]
    Config(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileConfig {
    /// Number of range bins.
    pub window: usize,
    /// Meters per bin.
    pub range_resolution: f64,
    /// Gaussian std in bins.
    pub sigma: f64,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        Self { window: 512, range_resolution: 0.0375, sigma: 1.0 }
    }
}

impl ProfileConfig {
    pub fn validate(&self) -> Result<(), ProfileError> {
        if self.window < 2 {
            return Err(ProfileError::Config("window must be at least 2 bins"));
        }
        if !(self.range_resolution > 0.0 && self.range_resolution.is_finite()) {
            return Err(ProfileError::Config("range_resolution must be positive"));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(ProfileError::Config("sigma must be positive"));
        }
        Ok(())
    }

    pub fn max_range(&self) -> f64 {
        self.window as f64 * self.range_resolution
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalPoint {
    pub range: f64,
    /// Radians from boresight (+y) towards +x.
    pub azimuth: f64,
    /// Radians above the x-y plane.
    pub elevation: f64,
}

pub fn cart_to_spherical(p: &Point) -> SphericalPoint {
    let range = (p.x * p.x + p.y * p.y + p.z * p.z).sqrt();
    if range == 0.0 {
        return SphericalPoint { range: 0.0, azimuth: 0.0, elevation: 0.0 };
    }
    SphericalPoint {
        range,
        azimuth: p.x.atan2(p.y),
        elevation: (p.z / range).clamp(-1.0, 1.0).asin(),
    }
}

pub fn spherical_to_cart(s: &SphericalPoint) -> Point {
    let elevation = s.elevation.clamp(-FRAC_PI_2, FRAC_PI_2);
    let (sin_az, cos_az) = s.azimuth.sin_cos();
    let (sin_el, cos_el) = elevation.sin_cos();
    Point::new(s.range * sin_az * cos_el, s.range * cos_az * cos_el, s.range * sin_el)
}

pub fn range_to_bin(range: f64, cfg: &ProfileConfig) -> Result<f64, ProfileError> {
    let bin = range / cfg.range_resolution;
    if !(range >= 0.0) || !(bin < cfg.window as f64) {
        return Err(ProfileError::OutOfRange { range, bin, window: cfg.window });
    }
    Ok(bin)
}

pub fn bin_to_range(bin: f64, cfg: &ProfileConfig) -> f64 {
    bin * cfg.range_resolution
}

/// One point's contribution to a profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSource {
    /// Fractional bin of the Gaussian mean.
    pub bin: f64,
    pub azimuth: f64,
    pub elevation: f64,
    pub echo: Option<Echo>,
    /// Which input frame the point came from.
    pub tag: u8,
    /// Position of the point within its frame.
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RangeProfile {
    pub values: Vec<f64>,
    pub sources: Vec<ProfileSource>,
    pub sigma: f64,
    /// Means of every component added so far, ascending.
    centers: Vec<f64>,
}

impl RangeProfile {
    pub fn zeros(cfg: &ProfileConfig) -> Self {
        Self { values: vec![0.0; cfg.window], sources: Vec::new(), sigma: cfg.sigma, centers: Vec::new() }
    }

    pub fn window(&self) -> usize {
        self.values.len()
    }

    /// Adds a unit-height Gaussian centred at `bin`.
    pub fn add_component(&mut self, bin: f64) {
        let reach = TRUNCATION_SIGMAS * self.sigma;
        let lo = (bin - reach).ceil().max(0.0) as usize;
        let hi = ((bin + reach).floor() as usize).min(self.values.len() - 1);
        let inv_two_var = 1.0 / (2.0 * self.sigma * self.sigma);
        for (k, v) in self.values.iter_mut().enumerate().take(hi + 1).skip(lo) {
            let d = k as f64 - bin;
            *v += (-d * d * inv_two_var).exp();
        }
        let at = self.centers.partition_point(|&c| c < bin);
        self.centers.insert(at, bin);
    }

    /// The profile between bins, from the same truncated components that
    /// produced the samples.
    pub fn value_at(&self, bin: f64) -> f64 {
        self.value_and_slope(bin).0
    }

    /// Value and first derivative (per bin) at a fractional bin.
    pub fn value_and_slope(&self, bin: f64) -> (f64, f64) {
        let reach = TRUNCATION_SIGMAS * self.sigma;
        let start = self.centers.partition_point(|&c| c < bin - reach);
        let inv_var = 1.0 / (self.sigma * self.sigma);
        let (mut value, mut slope) = (0.0, 0.0);
        for &c in self.centers[start..].iter().take_while(|&&c| c <= bin + reach) {
            let d = bin - c;
            let e = (-0.5 * d * d * inv_var).exp();
            value += e;
            slope -= d * inv_var * e;
        }
        (value, slope)
    }
}

pub fn build_profile(frame: &Frame, cfg: &ProfileConfig, tag: u8) -> Result<RangeProfile, ProfileError> {
    build_profile_from_points(&frame.points, cfg, tag)
}

pub fn build_profile_from_points(points: &[Point], cfg: &ProfileConfig, tag: u8) -> Result<RangeProfile, ProfileError> {
    cfg.validate()?;
    let mut profile = RangeProfile::zeros(cfg);
    for (index, p) in points.iter().enumerate() {
        let s = cart_to_spherical(p);
        let bin = range_to_bin(s.range, cfg)?;
        profile.add_component(bin);
        profile.sources.push(ProfileSource {
            bin,
            azimuth: s.azimuth,
            elevation: s.elevation,
            echo: p.echo,
            tag,
            index,
        });
    }
    Ok(profile)
}
