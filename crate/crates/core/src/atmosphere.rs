//! Reference atmosphere, gaseous specific attenuation, and refractive bending.
//!
//! Three models live here:
//!
//! 1. the ITU-R P.835 mean annual global reference atmosphere (temperature,
//!    pressure, and water-vapour density vs. geometric height, 0-100 km);
//! 2. the ITU-R P.676 line-by-line specific attenuation, split into dry-air
//!    and water-vapour components, from the embedded spectroscopic tables;
//! 3. the local apparent elevation angle of a ray launched from the ground,
//!    under an exponential refractivity profile N(h) = 315 exp(-h / 7.35 km)
//!    and Snell's law in spherically stratified media.

use thiserror::Error;

use crate::tables;
use crate::EARTH_RADIUS_KM;

/// Top of the modelled atmosphere in km; vacuum above.
pub const PROFILE_TOP_KM: f64 = 100.0;

/// Surface refractivity (N units) of the exponential refraction model.
pub const SURFACE_REFRACTIVITY: f64 = 315.0;

/// Scale height (km) of the exponential refraction model.
pub const REFRACTIVITY_SCALE_KM: f64 = 7.35;

/// Default surface water-vapour density in g/m^3.
pub const SURFACE_WATER_VAPOR_G_M3: f64 = 7.5;

#[derive(Debug, Error, PartialEq)]
pub enum AtmosphereError {
    #[error("height {height_km} km outside profile range [0, 100] km")]
    HeightOutOfRange { height_km: f64 },
    #[error("frequency {frequency_ghz} GHz outside line-table validity [1, 350] GHz")]
    FrequencyOutOfRange { frequency_ghz: f64 },
    #[error("elevation {elevation_deg} deg outside [0, 90] deg")]
    ElevationOutOfRange { elevation_deg: f64 },
    #[error("non-physical atmosphere sample: {reason}")]
    InvalidSample { reason: &'static str },
}

/// Thermodynamic state of the atmosphere at one height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtmosphereSample {
    /// Geometric height above mean sea level, km.
    pub height_km: f64,
    /// Temperature, K.
    pub temperature_k: f64,
    /// Air pressure, hPa (used directly as the dry-air pressure term of the
    /// line-shape model).
    pub pressure_hpa: f64,
    /// Water-vapour density, g/m^3.
    pub water_vapor_density_g_m3: f64,
}

impl AtmosphereSample {
    /// Water-vapour partial pressure e = rho T / 216.7, hPa.
    pub fn vapor_pressure_hpa(&self) -> f64 {
        self.water_vapor_density_g_m3 * self.temperature_k / 216.7
    }
}

/// Gaseous specific attenuation split into its two constituents, dB/km.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecificAttenuation {
    pub gamma_oxygen_db_km: f64,
    pub gamma_water_db_km: f64,
}

impl SpecificAttenuation {
    /// Total specific attenuation gamma = gamma_o + gamma_w, dB/km.
    pub fn total_db_km(&self) -> f64 {
        self.gamma_oxygen_db_km + self.gamma_water_db_km
    }
}

/// Geometric height -> geopotential height, km (valid below 86 km geometric).
fn geopotential_km(h_geometric_km: f64) -> f64 {
    6356.766 * h_geometric_km / (6356.766 + h_geometric_km)
}

/// ITU-R P.835 mean annual global reference atmosphere.
///
/// Valid for geometric heights in [0, 100] km. Surface state is
/// (288.15 K, 1013.25 hPa, 7.5 g/m^3); the vapour profile decays with a 2 km
/// scale height until the 2e-6 mixing-ratio floor takes over.
pub fn standard_profile(height_km: f64) -> Result<AtmosphereSample, AtmosphereError> {
    if !(0.0..=PROFILE_TOP_KM).contains(&height_km) || !height_km.is_finite() {
        return Err(AtmosphereError::HeightOutOfRange { height_km });
    }

    let (temperature_k, pressure_hpa) = if height_km <= 86.0 {
        let hp = geopotential_km(height_km);
        if hp <= 11.0 {
            let t = 288.15 - 6.5 * hp;
            (t, 1013.25 * (288.15 / t).powf(-34.1632 / 6.5))
        } else if hp <= 20.0 {
            (216.65, 226.3226 * (-34.1632 * (hp - 11.0) / 216.65).exp())
        } else if hp <= 32.0 {
            let t = 216.65 + (hp - 20.0);
            (t, 54.749_80 * (216.65 / t).powf(34.1632))
        } else if hp <= 47.0 {
            let t = 228.65 + 2.8 * (hp - 32.0);
            (t, 8.680_422 * (228.65 / t).powf(34.1632 / 2.8))
        } else if hp <= 51.0 {
            (270.65, 1.109_106 * (-34.1632 * (hp - 47.0) / 270.65).exp())
        } else if hp <= 71.0 {
            let t = 270.65 - 2.8 * (hp - 51.0);
            (t, 0.669_416_7 * (270.65 / t).powf(-34.1632 / 2.8))
        } else {
            let t = 214.65 - 2.0 * (hp - 71.0);
            (t, 0.039_566_49 * (214.65 / t).powf(-34.1632 / 2.0))
        }
    } else {
        let t = if height_km <= 91.0 {
            186.8673
        } else {
            let x = (height_km - 91.0) / 19.9429;
            263.1905 - 76.3232 * (1.0 - x * x).sqrt()
        };
        let h = height_km;
        let p = (95.571_899 - 4.011_801 * h + 6.424_731e-2 * h * h - 4.789_660e-4 * h.powi(3)
            + 1.340_543e-6 * h.powi(4))
        .exp();
        (t, p)
    };

    // Exponential vapour profile with the low-stratosphere mixing-ratio floor.
    let mut rho = SURFACE_WATER_VAPOR_G_M3 * (-height_km / 2.0).exp();
    let e_floor = 2e-6 * pressure_hpa;
    if rho * temperature_k / 216.7 < e_floor {
        rho = 216.7 * e_floor / temperature_k;
    }

    Ok(AtmosphereSample {
        height_km,
        temperature_k,
        pressure_hpa,
        water_vapor_density_g_m3: rho,
    })
}

/// ITU-R P.676 line-by-line specific attenuation at `frequency_ghz`.
///
/// Sums the 44 oxygen and 35 water-vapour resonances plus the dry continuum.
/// Valid for 1-350 GHz.
pub fn specific_attenuation(
    frequency_ghz: f64,
    sample: &AtmosphereSample,
) -> Result<SpecificAttenuation, AtmosphereError> {
    if !(1.0..=350.0).contains(&frequency_ghz) || !frequency_ghz.is_finite() {
        return Err(AtmosphereError::FrequencyOutOfRange { frequency_ghz });
    }
    if sample.temperature_k <= 0.0 {
        return Err(AtmosphereError::InvalidSample { reason: "temperature must be positive" });
    }
    if sample.pressure_hpa <= 0.0 {
        return Err(AtmosphereError::InvalidSample { reason: "pressure must be positive" });
    }
    if sample.water_vapor_density_g_m3 < 0.0 {
        return Err(AtmosphereError::InvalidSample { reason: "vapour density must be >= 0" });
    }

    let f = frequency_ghz;
    let theta = 300.0 / sample.temperature_k;
    let p = sample.pressure_hpa;
    let e = sample.vapor_pressure_hpa();

    let mut n_oxygen = 0.0;
    for line in tables::oxygen_lines() {
        let [a1, a2, a3, a4, a5, a6] = line.a;
        let f0 = line.f0_ghz;
        let strength = a1 * 1e-7 * p * theta.powi(3) * (a2 * (1.0 - theta)).exp();
        let mut width = a3 * 1e-4 * (p * theta.powf(0.8 - a4) + 1.1 * e * theta);
        width = (width * width + 2.25e-6).sqrt(); // Zeeman/Doppler floor
        let delta = (a5 + a6 * theta) * 1e-4 * (p + e) * theta.powf(0.8);
        let shape = f / f0
            * ((width - delta * (f0 - f)) / ((f0 - f).powi(2) + width * width)
                + (width - delta * (f0 + f)) / ((f0 + f).powi(2) + width * width));
        n_oxygen += strength * shape;
    }
    // dry-air (Debye + pressure-induced N2) continuum
    let d = 5.6e-4 * (p + e) * theta.powf(0.8);
    let n_dry = f
        * p
        * theta.powi(2)
        * (6.14e-5 / (d * (1.0 + (f / d).powi(2)))
            + 1.4e-12 * p * theta.powf(1.5) / (1.0 + 1.9e-5 * f.powf(1.5)));

    let mut n_water = 0.0;
    for line in tables::water_lines() {
        let [b1, b2, b3, b4, b5, b6] = line.b;
        let f0 = line.f0_ghz;
        let strength = b1 * 1e-1 * e * theta.powf(3.5) * (b2 * (1.0 - theta)).exp();
        let mut width = b3 * 1e-4 * (p * theta.powf(b4) + b5 * e * theta.powf(b6));
        width = 0.535 * width + (0.217 * width * width + 2.1316e-12 * f0 * f0 / theta).sqrt();
        let shape = f / f0
            * (width / ((f0 - f).powi(2) + width * width)
                + width / ((f0 + f).powi(2) + width * width));
        n_water += strength * shape;
    }

    Ok(SpecificAttenuation {
        gamma_oxygen_db_km: 0.1820 * f * (n_oxygen + n_dry),
        gamma_water_db_km: 0.1820 * f * n_water,
    })
}

/// Refractive index n(h) of the exponential reference profile.
pub fn refractive_index(height_km: f64) -> f64 {
    1.0 + SURFACE_REFRACTIVITY * 1e-6 * (-height_km / REFRACTIVITY_SCALE_KM).exp()
}

/// Bouguer invariant n(h) (R + h), the conserved quantity of a spherically
/// stratified ray.
pub(crate) fn bending_radius_product(height_km: f64) -> f64 {
    refractive_index(height_km) * (EARTH_RADIUS_KM + height_km)
}

/// Apparent elevation of a ray at `height_km`, launched from `ground_height_km`
/// with elevation `ground_elevation_deg`. No validation; callers guarantee the
/// ranges.
pub(crate) fn apparent_elevation_from(
    ground_height_km: f64,
    height_km: f64,
    ground_elevation_deg: f64,
) -> f64 {
    let invariant =
        bending_radius_product(ground_height_km) * ground_elevation_deg.to_radians().cos();
    let cos_theta = (invariant / bending_radius_product(height_km)).clamp(-1.0, 1.0);
    cos_theta.acos().to_degrees()
}

/// Local apparent elevation angle theta(h) of a ray launched at sea level.
///
/// Equals the ground elevation exactly at h = 0 and for a zenith ray; grows
/// with height as refraction and Earth curvature tilt the ray upward relative
/// to the local horizontal.
pub fn apparent_elevation(
    height_km: f64,
    ground_elevation_deg: f64,
) -> Result<f64, AtmosphereError> {
    if !(0.0..=PROFILE_TOP_KM).contains(&height_km) {
        return Err(AtmosphereError::HeightOutOfRange { height_km });
    }
    if !(0.0..=90.0).contains(&ground_elevation_deg) {
        return Err(AtmosphereError::ElevationOutOfRange { elevation_deg: ground_elevation_deg });
    }
    Ok(apparent_elevation_from(0.0, height_km, ground_elevation_deg))
}
