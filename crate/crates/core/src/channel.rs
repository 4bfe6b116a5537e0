//! Radio channel relations: delay resolution, close-in path loss and
//! Fresnel power coefficients at dielectric walls.

use core::f64::consts::PI;

use thiserror::Error;

use crate::math;

/// Propagation speed in free space (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Close-in reference distance (m).
pub const REFERENCE_DISTANCE: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("carrier frequency must be positive and finite, got {0} Hz")]
    InvalidCarrier(f64),
    #[error("bandwidth must be positive and finite, got {0} Hz")]
    InvalidBandwidth(f64),
    #[error("path-loss exponent must be positive and finite, got {0}")]
    InvalidExponent(f64),
    #[error("distance {0} m is inside the {REFERENCE_DISTANCE} m reference distance")]
    InsideReferenceDistance(f64),
}

/// Carrier frequency and occupied bandwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FrequencyBand {
    carrier_hz: f64,
    bandwidth_hz: f64,
}

impl FrequencyBand {
    pub fn new(carrier_hz: f64, bandwidth_hz: f64) -> Result<Self, ChannelError> {
        if !(carrier_hz > 0.0 && carrier_hz.is_finite()) {
            return Err(ChannelError::InvalidCarrier(carrier_hz));
        }
        if !(bandwidth_hz > 0.0 && bandwidth_hz.is_finite()) {
            return Err(ChannelError::InvalidBandwidth(bandwidth_hz));
        }
        Ok(Self { carrier_hz, bandwidth_hz })
    }

    pub fn carrier_hz(&self) -> f64 {
        self.carrier_hz
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_hz
    }

    /// Nyquist sample spacing `1/B` (s).
    pub fn sample_period(&self) -> f64 {
        1.0 / self.bandwidth_hz
    }
}

/// Distance light travels in one Nyquist sample, `c / B`.
pub fn raw_resolution(band: &FrequencyBand) -> f64 {
    SPEED_OF_LIGHT / band.bandwidth_hz
}

/// Free-space path loss at the 1 m reference distance (dB).
pub fn fspl_ref(carrier_hz: f64) -> f64 {
    20.0 * math::log10(4.0 * PI * REFERENCE_DISTANCE * carrier_hz / SPEED_OF_LIGHT)
}

/// Close-in free-space reference path-loss model without shadowing.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CiPathLossModel {
    ple: f64,
    carrier_hz: f64,
}

impl CiPathLossModel {
    /// Path-loss exponent measured for indoor LOS links at 28 and 73 GHz.
    pub const INDOOR_LOS_PLE: f64 = 1.7;

    pub fn new(ple: f64, carrier_hz: f64) -> Result<Self, ChannelError> {
        if !(ple > 0.0 && ple.is_finite()) {
            return Err(ChannelError::InvalidExponent(ple));
        }
        if !(carrier_hz > 0.0 && carrier_hz.is_finite()) {
            return Err(ChannelError::InvalidCarrier(carrier_hz));
        }
        Ok(Self { ple, carrier_hz })
    }

    pub fn ple(&self) -> f64 {
        self.ple
    }

    pub fn carrier_hz(&self) -> f64 {
        self.carrier_hz
    }

    pub fn reference_distance(&self) -> f64 {
        REFERENCE_DISTANCE
    }

    /// Loss at the reference distance (dB).
    pub fn reference_loss(&self) -> f64 {
        fspl_ref(self.carrier_hz)
    }

    /// `PL(d) = FSPL(d0) + 10·n·log10(d / d0)` in dB.
    pub fn path_loss(&self, d: f64) -> Result<f64, ChannelError> {
        if !(d >= REFERENCE_DISTANCE) {
            return Err(ChannelError::InsideReferenceDistance(d));
        }
        Ok(self.reference_loss() + 10.0 * self.ple * math::log10(d / REFERENCE_DISTANCE))
    }
}

/// Free function form of [`CiPathLossModel::path_loss`].
pub fn ci_path_loss(model: &CiPathLossModel, d: f64) -> Result<f64, ChannelError> {
    model.path_loss(d)
}

/// Fractions of incident power reflected and transmitted at a wall.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FresnelResult {
    pub reflect_power_frac: f64,
    pub transmit_power_frac: f64,
}

impl FresnelResult {
    /// Reflection loss in dB (infinite when nothing is reflected).
    pub fn reflection_loss_db(&self) -> f64 {
        -10.0 * math::log10(self.reflect_power_frac)
    }

    pub fn transmission_loss_db(&self) -> f64 {
        -10.0 * math::log10(self.transmit_power_frac)
    }
}

/// Perpendicular-polarization (TE) Fresnel power coefficients for a wave
/// arriving from free space at `incidence_angle` from the normal.
///
/// The interface is lossless, so the two fractions sum to one.
pub fn fresnel_power(incidence_angle: f64, eps_r: f64) -> FresnelResult {
    if eps_r == 1.0 {
        return FresnelResult { reflect_power_frac: 0.0, transmit_power_frac: 1.0 };
    }
    let cos_i = math::cos(incidence_angle).max(0.0);
    let sin_i = math::sin(incidence_angle);
    let root = math::sqrt((eps_r - sin_i * sin_i).max(0.0));
    let denom = cos_i + root;
    let r = if denom > 0.0 { (cos_i - root) / denom } else { -1.0 };
    let reflect = (r * r).min(1.0);
    FresnelResult { reflect_power_frac: reflect, transmit_power_frac: 1.0 - reflect }
}
