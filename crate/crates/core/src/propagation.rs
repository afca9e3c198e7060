//! Spreading loss, Earth-space slant geometry, and slant absorption.
//!
//! Terrestrial links take a constant specific attenuation at their altitude;
//! Earth-space paths integrate gamma(h) along the refracted ray,
//! L_abs = int gamma(h) / sin theta(h) dh, from the ground station up to the
//! top of the modelled atmosphere (100 km; vacuum above).

use thiserror::Error;

use crate::atmosphere::{
    self, specific_attenuation, standard_profile, AtmosphereError, PROFILE_TOP_KM,
};
use crate::EARTH_RADIUS_KM;

#[derive(Debug, Error, PartialEq)]
pub enum PropagationError {
    #[error("distance must be positive, got {distance_km} km")]
    NonPositiveDistance { distance_km: f64 },
    #[error("frequency must be positive, got {frequency_ghz} GHz")]
    NonPositiveFrequency { frequency_ghz: f64 },
    #[error("satellite altitude must be positive, got {altitude_km} km")]
    NonPositiveAltitude { altitude_km: f64 },
    #[error("elevation {elevation_deg} deg outside [0, 90] deg")]
    ElevationOutOfRange { elevation_deg: f64 },
    #[error("ground height {ground_height_km} km outside [0, 100] km")]
    GroundHeightOutOfRange { ground_height_km: f64 },
    #[error(transparent)]
    Atmosphere(#[from] AtmosphereError),
}

/// Ground-station-to-satellite geometry on a spherical Earth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlantGeometry {
    /// Satellite altitude r above the surface, km.
    pub satellite_altitude_km: f64,
    /// Elevation angle theta of the satellite at the ground station, deg.
    pub elevation_deg: f64,
}

impl SlantGeometry {
    pub fn new(satellite_altitude_km: f64, elevation_deg: f64) -> Result<Self, PropagationError> {
        if !(satellite_altitude_km > 0.0) {
            return Err(PropagationError::NonPositiveAltitude {
                altitude_km: satellite_altitude_km,
            });
        }
        if !(0.0..=90.0).contains(&elevation_deg) {
            return Err(PropagationError::ElevationOutOfRange { elevation_deg });
        }
        Ok(Self { satellite_altitude_km, elevation_deg })
    }
}

/// Loss budget of one path, dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLoss {
    pub spreading_db: f64,
    pub absorption_db: f64,
    pub total_db: f64,
}

impl PathLoss {
    fn new(spreading_db: f64, absorption_db: f64) -> Self {
        Self { spreading_db, absorption_db, total_db: spreading_db + absorption_db }
    }
}

/// Free-space spreading loss 92.45 + 20 log10(f d) dB, f in GHz, d in km.
pub fn spreading_loss(frequency_ghz: f64, distance_km: f64) -> Result<f64, PropagationError> {
    if !(frequency_ghz > 0.0) {
        return Err(PropagationError::NonPositiveFrequency { frequency_ghz });
    }
    if !(distance_km > 0.0) {
        return Err(PropagationError::NonPositiveDistance { distance_km });
    }
    Ok(92.45 + 20.0 * (frequency_ghz * distance_km).log10())
}

/// Slant distance d = sqrt(R^2 sin^2 theta + 2 R r + r^2) - R sin theta, km.
pub fn slant_distance(geometry: &SlantGeometry) -> f64 {
    let r = geometry.satellite_altitude_km;
    let s = geometry.elevation_deg.to_radians().sin();
    let rs = EARTH_RADIUS_KM * s;
    (rs * rs + 2.0 * EARTH_RADIUS_KM * r + r * r).sqrt() - rs
}

/// Path loss of a horizontal link with both ends at `altitude_km`:
/// spreading plus gamma(altitude) * distance.
pub fn terrestrial_path_loss(
    frequency_ghz: f64,
    distance_km: f64,
    altitude_km: f64,
) -> Result<PathLoss, PropagationError> {
    let spread = spreading_loss(frequency_ghz, distance_km)?;
    let sample = standard_profile(altitude_km)?;
    let gamma = specific_attenuation(frequency_ghz, &sample)?.total_db_km();
    Ok(PathLoss::new(spread, gamma * distance_km))
}

/// Number of Simpson intervals of the slant integral. Even; the integrand is
/// evaluated on a sqrt-height grid, so spacing is sub-mm at the ground and
/// ~100 m at the top of the atmosphere.
const SLANT_INTERVALS: usize = 2000;

/// Specific-attenuation profile of one frequency, cached on the integration
/// grid so that elevation sweeps do not re-evaluate the line tables.
///
/// Grid nodes are u_i = i du with u = sqrt(h - ground); Simpson in u handles
/// the 1/sin theta(h) -> 1/sqrt(h) singularity of a horizon ray exactly.
pub struct AbsorptionProfile {
    ground_height_km: f64,
    du: f64,
    /// gamma at each grid node, dB/km.
    gamma_db_km: Vec<f64>,
    /// Bouguer products n(h_i) (R + h_i) at each node.
    bend: Vec<f64>,
}

impl AbsorptionProfile {
    pub fn new(frequency_ghz: f64, ground_height_km: f64) -> Result<Self, PropagationError> {
        Self::with_top(frequency_ghz, ground_height_km, PROFILE_TOP_KM)
    }

    /// Profile truncated at `top_km` (used when the far end is inside the
    /// atmosphere).
    pub fn with_top(
        frequency_ghz: f64,
        ground_height_km: f64,
        top_km: f64,
    ) -> Result<Self, PropagationError> {
        if !(0.0..=PROFILE_TOP_KM).contains(&ground_height_km) {
            return Err(PropagationError::GroundHeightOutOfRange { ground_height_km });
        }
        let top_km = top_km.min(PROFILE_TOP_KM);
        if top_km <= ground_height_km {
            // degenerate: no atmosphere between the endpoints
            return Ok(Self {
                ground_height_km,
                du: 0.0,
                gamma_db_km: vec![],
                bend: vec![],
            });
        }
        let u_top = (top_km - ground_height_km).sqrt();
        let du = u_top / SLANT_INTERVALS as f64;
        let mut gamma_db_km = Vec::with_capacity(SLANT_INTERVALS + 1);
        let mut bend = Vec::with_capacity(SLANT_INTERVALS + 1);
        for i in 0..=SLANT_INTERVALS {
            let u = i as f64 * du;
            let h = (ground_height_km + u * u).min(PROFILE_TOP_KM);
            let sample = standard_profile(h)?;
            gamma_db_km.push(specific_attenuation(frequency_ghz, &sample)?.total_db_km());
            bend.push(atmosphere::refractive_index(h) * (EARTH_RADIUS_KM + h));
        }
        Ok(Self { ground_height_km, du, gamma_db_km, bend })
    }

    /// Slant absorption along the full cached column, dB.
    pub fn slant_absorption(&self, elevation_deg: f64) -> f64 {
        self.integrate(elevation_deg, self.gamma_db_km.len().saturating_sub(1))
    }

    /// Slant absorption up to `top_km`, dB (composite rule over whole grid
    /// intervals; the cut rounds to the nearest node).
    pub fn slant_absorption_to(&self, elevation_deg: f64, top_km: f64) -> f64 {
        if self.gamma_db_km.is_empty() {
            return 0.0;
        }
        let u_cut = (top_km.min(PROFILE_TOP_KM) - self.ground_height_km).max(0.0).sqrt();
        let n = ((u_cut / self.du).round() as usize).min(self.gamma_db_km.len() - 1);
        self.integrate(elevation_deg, n)
    }

    fn integrate(&self, elevation_deg: f64, last: usize) -> f64 {
        if last == 0 || self.gamma_db_km.is_empty() {
            return 0.0;
        }
        let invariant = self.bend[0] * elevation_deg.to_radians().cos();
        let sin_theta = |i: usize| -> f64 {
            let c = (invariant / self.bend[i]).clamp(-1.0, 1.0);
            (1.0 - c * c).sqrt()
        };
        // integrand g(u) = 2 u gamma(h(u)) / sin theta(h(u))
        let g = |i: usize| -> f64 {
            let u = i as f64 * self.du;
            let s = sin_theta(i);
            if i == 0 && s < 1e-9 {
                // horizon launch: lim_{u->0} 2 u / sin theta = 2 / sqrt(k)
                // with k = d(sin^2 theta)/dh at the ground
                let s1 = sin_theta(1);
                let k = (s1 * s1 - s * s) / (self.du * self.du);
                return 2.0 * self.gamma_db_km[0] / k.sqrt();
            }
            if s < 1e-12 {
                return 0.0;
            }
            2.0 * u * self.gamma_db_km[i] / s
        };
        // composite Simpson; fall back to one trapezoid for a degenerate grid
        if last < 2 {
            return 0.5 * (g(0) + g(last)) * self.du;
        }
        let even_last = last - (last % 2);
        let mut acc = g(0) + g(even_last);
        for i in 1..even_last {
            acc += g(i) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let mut total = acc * self.du / 3.0;
        if last != even_last {
            total += 0.5 * (g(even_last) + g(last)) * self.du;
        }
        total
    }
}

/// Gaseous absorption along the slant path from `ground_height_km` up to
/// min(satellite altitude, 100 km), dB.
pub fn slant_absorption(
    frequency_ghz: f64,
    geometry: &SlantGeometry,
    ground_height_km: f64,
) -> Result<f64, PropagationError> {
    if !(0.0..=90.0).contains(&geometry.elevation_deg) {
        return Err(PropagationError::ElevationOutOfRange {
            elevation_deg: geometry.elevation_deg,
        });
    }
    let profile =
        AbsorptionProfile::with_top(frequency_ghz, ground_height_km, geometry.satellite_altitude_km)?;
    Ok(profile.slant_absorption(geometry.elevation_deg))
}

/// Total Earth-space path loss: spreading over the slant distance plus the
/// integrated absorption.
pub fn total_slant_loss(
    frequency_ghz: f64,
    geometry: &SlantGeometry,
    ground_height_km: f64,
) -> Result<PathLoss, PropagationError> {
    let absorption = slant_absorption(frequency_ghz, geometry, ground_height_km)?;
    let spread = spreading_loss(frequency_ghz, slant_distance(geometry))?;
    Ok(PathLoss::new(spread, absorption))
}

/// Search ceiling for [`absorption_crossover_distance`], km.
pub const CROSSOVER_CAP_KM: f64 = 500.0;

/// Smallest distance (1 m resolution, capped at 500 km) where the linear
/// absorption loss of a terrestrial link at `altitude_km` overtakes its
/// spreading loss; `None` when no crossover exists below the cap.
pub fn absorption_crossover_distance(
    frequency_ghz: f64,
    altitude_km: f64,
) -> Result<Option<f64>, PropagationError> {
    let sample = standard_profile(altitude_km)?;
    let gamma = specific_attenuation(frequency_ghz, &sample)?.total_db_km();
    let excess = |d: f64| gamma * d - (92.45 + 20.0 * (frequency_ghz * d).log10());

    // gamma d - L_spr is decreasing then increasing; geometric coarse scan
    // from 1 m finds the first sign change past the minimum.
    let mut lo = 1e-3;
    if excess(lo) > 0.0 {
        return Ok(Some(lo));
    }
    let growth = 1.01_f64;
    let mut hi = lo;
    loop {
        hi = (hi * growth).min(CROSSOVER_CAP_KM);
        if excess(hi) > 0.0 {
            break;
        }
        if hi >= CROSSOVER_CAP_KM {
            return Ok(None);
        }
        lo = hi;
    }
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}
