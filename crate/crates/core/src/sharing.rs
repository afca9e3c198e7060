//! Satellite pass prediction and sharing-policy simulation.
//!
//! A two-body circular orbit over a rotating spherical Earth is enough to
//! reproduce pass statistics at minute granularity: the models here predict
//! when a sensing satellite is above a ground deployment, replay a
//! band-switching policy against those passes, and estimate the availability
//! left to active users under coordination-database blanking.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::EARTH_RADIUS_KM;

/// Earth gravitational parameter, km^3/s^2.
pub const MU_EARTH_KM3_S2: f64 = 398_600.4418;

/// Earth rotation rate: one revolution per sidereal day, deg/s.
pub const EARTH_ROTATION_DEG_S: f64 = 360.0 / 86_164.0905;

#[derive(Debug, Error, PartialEq)]
pub enum SharingError {
    #[error("orbit altitude must be positive, got {altitude_km} km")]
    NonPositiveAltitude { altitude_km: f64 },
    #[error("time {t_s} precedes the orbit epoch {epoch_s}")]
    BeforeEpoch { t_s: f64, epoch_s: f64 },
    #[error("window must be positive")]
    EmptyWindow,
    #[error("bands of a switch policy must differ")]
    IdenticalBands,
    #[error("switch latency must be >= 0")]
    NegativeLatency,
    #[error("footprint diameter must be positive")]
    NonPositiveFootprint,
    #[error("at least one Monte-Carlo trial required")]
    NoTrials,
}

/// Circular two-body orbit, angles in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularOrbit {
    pub altitude_km: f64,
    pub inclination_deg: f64,
    /// Right ascension of the ascending node at `epoch_s`, measured in the
    /// frame that coincides with the Earth-fixed frame at t = 0.
    pub raan_deg: f64,
    /// In-plane phase angle from the ascending node at `epoch_s`.
    pub initial_phase_deg: f64,
    pub epoch_s: f64,
}

impl CircularOrbit {
    pub fn new(
        altitude_km: f64,
        inclination_deg: f64,
        raan_deg: f64,
        initial_phase_deg: f64,
        epoch_s: f64,
    ) -> Result<Self, SharingError> {
        if !(altitude_km > 0.0) {
            return Err(SharingError::NonPositiveAltitude { altitude_km });
        }
        Ok(Self { altitude_km, inclination_deg, raan_deg, initial_phase_deg, epoch_s })
    }

    /// Orbital period 2 pi sqrt(a^3 / mu), s.
    pub fn period_s(&self) -> f64 {
        let a = EARTH_RADIUS_KM + self.altitude_km;
        2.0 * std::f64::consts::PI * (a.powi(3) / MU_EARTH_KM3_S2).sqrt()
    }

    /// Unit vector of the sub-satellite point in the Earth-fixed frame.
    fn subpoint_unit(&self, t_s: f64) -> [f64; 3] {
        let n_deg_s = 360.0 / self.period_s();
        let u = (self.initial_phase_deg + n_deg_s * (t_s - self.epoch_s)).to_radians();
        let (sin_u, cos_u) = u.sin_cos();
        let (sin_i, cos_i) = self.inclination_deg.to_radians().sin_cos();
        // rotate the in-plane position by inclination about x, then RAAN
        // about z, then spin the Earth-fixed frame backwards
        let raan = self.raan_deg.to_radians();
        let lon_rot = raan - (EARTH_ROTATION_DEG_S * t_s).to_radians();
        let (sin_o, cos_o) = lon_rot.sin_cos();
        let x_orb = cos_u;
        let y_orb = sin_u * cos_i;
        let z = sin_u * sin_i;
        [cos_o * x_orb - sin_o * y_orb, sin_o * x_orb + cos_o * y_orb, z]
    }
}

/// Ground track point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubPoint {
    pub sub_latitude_deg: f64,
    pub sub_longitude_deg: f64,
    pub altitude_km: f64,
}

/// Sub-satellite point at time `t_s` (>= epoch).
pub fn propagate(orbit: &CircularOrbit, t_s: f64) -> Result<SubPoint, SharingError> {
    if t_s < orbit.epoch_s {
        return Err(SharingError::BeforeEpoch { t_s, epoch_s: orbit.epoch_s });
    }
    let [x, y, z] = orbit.subpoint_unit(t_s);
    Ok(SubPoint {
        sub_latitude_deg: z.clamp(-1.0, 1.0).asin().to_degrees(),
        sub_longitude_deg: y.atan2(x).to_degrees(),
        altitude_km: orbit.altitude_km,
    })
}

/// Ground station location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Station {
    pub latitude_deg: f64,
    pub longitude_deg: f64,
}

impl Station {
    fn unit(&self) -> [f64; 3] {
        let (sin_lat, cos_lat) = self.latitude_deg.to_radians().sin_cos();
        let (sin_lon, cos_lon) = self.longitude_deg.to_radians().sin_cos();
        [cos_lat * cos_lon, cos_lat * sin_lon, sin_lat]
    }
}

fn elevation_of_unit(station_unit: &[f64; 3], sat_unit: &[f64; 3], sat_radius_km: f64) -> f64 {
    let rho = [
        sat_radius_km * sat_unit[0] - EARTH_RADIUS_KM * station_unit[0],
        sat_radius_km * sat_unit[1] - EARTH_RADIUS_KM * station_unit[1],
        sat_radius_km * sat_unit[2] - EARTH_RADIUS_KM * station_unit[2],
    ];
    let norm = (rho[0] * rho[0] + rho[1] * rho[1] + rho[2] * rho[2]).sqrt();
    let dot = rho[0] * station_unit[0] + rho[1] * station_unit[1] + rho[2] * station_unit[2];
    (dot / norm).clamp(-1.0, 1.0).asin().to_degrees()
}

/// Topocentric elevation of the satellite above the station's horizon, deg
/// (negative below the horizon).
pub fn elevation_from(
    station_lat_deg: f64,
    station_lon_deg: f64,
    orbit: &CircularOrbit,
    t_s: f64,
) -> Result<f64, SharingError> {
    if t_s < orbit.epoch_s {
        return Err(SharingError::BeforeEpoch { t_s, epoch_s: orbit.epoch_s });
    }
    let station = Station { latitude_deg: station_lat_deg, longitude_deg: station_lon_deg };
    Ok(elevation_of_unit(
        &station.unit(),
        &orbit.subpoint_unit(t_s),
        EARTH_RADIUS_KM + orbit.altitude_km,
    ))
}

/// Time window when a satellite stays above the visibility threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct PassInterval {
    /// First whole second with elevation >= threshold.
    pub start_s: f64,
    /// First whole second after `start_s` below the threshold (half-open).
    pub end_s: f64,
    pub max_elevation_deg: f64,
    pub satellite_id: u32,
}

const PASS_COARSE_STEP_S: u64 = 5;

/// Passes over `[orbit.epoch_s, orbit.epoch_s + window_s)`.
pub fn predict_passes(
    station: &Station,
    orbit: &CircularOrbit,
    window_s: f64,
    min_elevation_deg: f64,
) -> Result<Vec<PassInterval>, SharingError> {
    predict_passes_between(
        station,
        orbit,
        orbit.epoch_s,
        orbit.epoch_s + window_s,
        min_elevation_deg,
    )
}

/// Passes over an explicit `[t_start, t_end)` window; boundaries are resolved
/// to whole seconds so adjoining windows stitch exactly.
pub fn predict_passes_between(
    station: &Station,
    orbit: &CircularOrbit,
    t_start_s: f64,
    t_end_s: f64,
    min_elevation_deg: f64,
) -> Result<Vec<PassInterval>, SharingError> {
    if !(t_end_s > t_start_s) {
        return Err(SharingError::EmptyWindow);
    }
    if t_start_s < orbit.epoch_s {
        return Err(SharingError::BeforeEpoch { t_s: t_start_s, epoch_s: orbit.epoch_s });
    }
    let station_unit = station.unit();
    let radius = EARTH_RADIUS_KM + orbit.altitude_km;
    let n_seconds = (t_end_s - t_start_s).floor() as u64;
    if n_seconds == 0 {
        return Ok(vec![]);
    }
    let above = |offset: u64| {
        elevation_of_unit(&station_unit, &orbit.subpoint_unit(t_start_s + offset as f64), radius)
            >= min_elevation_deg
    };
    // first offset in (lo, hi] whose state differs from state(lo)
    let first_flip = |mut lo: u64, mut hi: u64, lo_state: bool| {
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if above(mid) == lo_state {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    };

    let mut passes = Vec::new();
    let mut open: Option<u64> = above(0).then_some(0);
    let mut prev = 0u64;
    let mut prev_state = open.is_some();
    let mut cursor = PASS_COARSE_STEP_S;
    loop {
        let offset = cursor.min(n_seconds - 1);
        let state = above(offset);
        if state != prev_state {
            let flip = first_flip(prev, offset, prev_state);
            if prev_state {
                let start = open.take().unwrap();
                passes.push(make_pass(start, flip, t_start_s, &station_unit, orbit));
            } else {
                open = Some(flip);
            }
            prev_state = state;
        }
        prev = offset;
        if offset == n_seconds - 1 {
            break;
        }
        cursor += PASS_COARSE_STEP_S;
    }
    if let Some(start) = open {
        passes.push(make_pass(start, n_seconds, t_start_s, &station_unit, orbit));
    }
    Ok(passes)
}

fn make_pass(
    start: u64,
    end: u64,
    t_start_s: f64,
    station_unit: &[f64; 3],
    orbit: &CircularOrbit,
) -> PassInterval {
    let radius = EARTH_RADIUS_KM + orbit.altitude_km;
    let mut max_elevation = f64::NEG_INFINITY;
    for offset in start..end {
        let e =
            elevation_of_unit(station_unit, &orbit.subpoint_unit(t_start_s + offset as f64), radius);
        max_elevation = max_elevation.max(e);
    }
    PassInterval {
        start_s: t_start_s + start as f64,
        end_s: t_start_s + end as f64,
        max_elevation_deg: max_elevation,
        satellite_id: 0,
    }
}

/// Band-switching policy driven by predicted passes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchPolicy {
    pub primary_band_ghz: f64,
    pub fallback_band_ghz: f64,
    /// A pass triggers a switch when its peak elevation reaches this value.
    pub trigger_elevation_deg: f64,
    pub switch_latency_s: f64,
}

impl SwitchPolicy {
    pub fn validate(&self) -> Result<(), SharingError> {
        if self.primary_band_ghz == self.fallback_band_ghz {
            return Err(SharingError::IdenticalBands);
        }
        if self.switch_latency_s < 0.0 {
            return Err(SharingError::NegativeLatency);
        }
        Ok(())
    }

    /// Coordinated switching through a central controller: ~5 ms.
    pub fn centralized(primary_band_ghz: f64, fallback_band_ghz: f64, trigger: f64) -> Self {
        Self {
            primary_band_ghz,
            fallback_band_ghz,
            trigger_elevation_deg: trigger,
            switch_latency_s: 0.005,
        }
    }

    /// Independent per-endpoint switching: ~100 ms.
    pub fn distributed(primary_band_ghz: f64, fallback_band_ghz: f64, trigger: f64) -> Self {
        Self {
            primary_band_ghz,
            fallback_band_ghz,
            trigger_elevation_deg: trigger,
            switch_latency_s: 0.1,
        }
    }
}

/// Radio state over one timeline segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkState {
    Primary,
    /// Retuning; the radio still occupies the primary band but carries no
    /// traffic.
    Switching,
    Fallback,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimelineSegment {
    pub start_s: f64,
    pub end_s: f64,
    pub band_ghz: f64,
    pub state: LinkState,
}

/// One commanded band change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchEvent {
    pub at_s: f64,
    pub from_band_ghz: f64,
    pub to_band_ghz: f64,
    pub completed_s: f64,
}

/// Deterministic replay results.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchReport {
    pub time_in_primary_s: f64,
    pub time_in_fallback_s: f64,
    pub downtime_s: f64,
    /// Time the radio occupied the primary band while a pass was active.
    pub violation_s: f64,
    pub events: Vec<SwitchEvent>,
    pub timeline: Vec<TimelineSegment>,
}

/// Replay a switching policy over `window = (start_s, end_s)`.
///
/// Passes whose peak elevation reaches the trigger are merged into disjoint
/// avoidance intervals. Each interval starts a switch: the radio is down (and
/// still on the primary band) for the switch latency, then carries traffic in
/// the fallback band until the pass ends; the return to primary is immediate.
pub fn simulate_switching(
    passes: &[PassInterval],
    policy: &SwitchPolicy,
    window: (f64, f64),
) -> Result<SwitchReport, SharingError> {
    policy.validate()?;
    let (w0, w1) = window;
    if !(w1 > w0) {
        return Err(SharingError::EmptyWindow);
    }

    // merge triggering passes into disjoint intervals, clipped to the window
    let mut spans: Vec<(f64, f64)> = passes
        .iter()
        .filter(|p| p.max_elevation_deg >= policy.trigger_elevation_deg)
        .map(|p| (p.start_s.max(w0), p.end_s.min(w1)))
        .filter(|(a, b)| b > a)
        .collect();
    spans.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (a, b) in spans {
        match merged.last_mut() {
            Some((_, end)) if a <= *end => *end = end.max(b),
            _ => merged.push((a, b)),
        }
    }

    let mut timeline = Vec::new();
    let mut events = Vec::new();
    let mut cursor = w0;
    for &(p0, p1) in &merged {
        if p0 > cursor {
            timeline.push(TimelineSegment {
                start_s: cursor,
                end_s: p0,
                band_ghz: policy.primary_band_ghz,
                state: LinkState::Primary,
            });
        }
        let switch_end = (p0 + policy.switch_latency_s).min(p1);
        events.push(SwitchEvent {
            at_s: p0,
            from_band_ghz: policy.primary_band_ghz,
            to_band_ghz: policy.fallback_band_ghz,
            completed_s: switch_end,
        });
        if switch_end > p0 {
            timeline.push(TimelineSegment {
                start_s: p0,
                end_s: switch_end,
                band_ghz: policy.primary_band_ghz,
                state: LinkState::Switching,
            });
        }
        if p1 > switch_end {
            timeline.push(TimelineSegment {
                start_s: switch_end,
                end_s: p1,
                band_ghz: policy.fallback_band_ghz,
                state: LinkState::Fallback,
            });
        }
        events.push(SwitchEvent {
            at_s: p1,
            from_band_ghz: policy.fallback_band_ghz,
            to_band_ghz: policy.primary_band_ghz,
            completed_s: p1,
        });
        cursor = p1;
    }
    if cursor < w1 {
        timeline.push(TimelineSegment {
            start_s: cursor,
            end_s: w1,
            band_ghz: policy.primary_band_ghz,
            state: LinkState::Primary,
        });
    }

    let sum_state = |state: LinkState| {
        timeline
            .iter()
            .filter(|s| s.state == state)
            .map(|s| s.end_s - s.start_s)
            .sum::<f64>()
    };

    // violation: radio occupies the primary band (Primary or Switching state)
    // while any pass is active, whether or not that pass triggered a switch
    let mut all_spans: Vec<(f64, f64)> = passes
        .iter()
        .map(|p| (p.start_s.max(w0), p.end_s.min(w1)))
        .filter(|(a, b)| b > a)
        .collect();
    all_spans.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut pass_union: Vec<(f64, f64)> = Vec::new();
    for (a, b) in all_spans {
        match pass_union.last_mut() {
            Some((_, end)) if a <= *end => *end = end.max(b),
            _ => pass_union.push((a, b)),
        }
    }
    let mut violation_s = 0.0;
    for seg in timeline.iter().filter(|s| s.state != LinkState::Fallback) {
        for &(a, b) in &pass_union {
            let overlap = seg.end_s.min(b) - seg.start_s.max(a);
            if overlap > 0.0 {
                violation_s += overlap;
            }
        }
    }

    Ok(SwitchReport {
        time_in_primary_s: sum_state(LinkState::Primary),
        time_in_fallback_s: sum_state(LinkState::Fallback),
        downtime_s: sum_state(LinkState::Switching),
        violation_s,
        events,
        timeline,
    })
}

/// Coordination-blanking Monte-Carlo configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlankingScenario {
    pub num_satellites: u32,
    pub footprint_diameter_km: f64,
    pub orbit_altitude_km: f64,
    pub inclination_deg: f64,
    pub window_s: f64,
    pub station: Station,
    pub seed: u64,
    pub trials: u32,
}

impl BlankingScenario {
    /// The 30-satellite, 30-km-footprint coordination study configuration.
    pub fn nrc_preset(station: Station, seed: u64) -> Self {
        Self {
            num_satellites: 30,
            footprint_diameter_km: 30.0,
            orbit_altitude_km: 705.0,
            inclination_deg: 98.0,
            window_s: 86_400.0,
            station,
            seed,
            trials: 8,
        }
    }
}

fn mix_seed(seed: u64, trial: u32, satellite: u32) -> u64 {
    let mut x = seed
        ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (satellite as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
    x ^= x >> 30;
    x = x.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x ^= x >> 27;
    x
}

/// Fraction of the window during which the station lies inside no satellite
/// footprint (hard-edged ground disk under each satellite).
///
/// Satellites occupy distinct planes with RAAN and phase drawn uniformly;
/// each (trial, satellite) pair has its own random stream, so enlarging the
/// constellation keeps earlier draws fixed and availability is monotone
/// non-increasing in the constellation size for a given seed.
pub fn blanking_availability(scenario: &BlankingScenario) -> Result<f64, SharingError> {
    if !(scenario.footprint_diameter_km > 0.0) {
        return Err(SharingError::NonPositiveFootprint);
    }
    if scenario.trials == 0 {
        return Err(SharingError::NoTrials);
    }
    if !(scenario.window_s >= 1.0) {
        return Err(SharingError::EmptyWindow);
    }
    if scenario.num_satellites == 0 {
        return Ok(1.0);
    }

    let station_unit = scenario.station.unit();
    // station inside the footprint <=> central angle <= radius / R
    let cos_cap = (scenario.footprint_diameter_km / 2.0 / EARTH_RADIUS_KM).cos();
    let n_seconds = scenario.window_s.floor() as u64;

    let mut availability_sum = 0.0;
    for trial in 0..scenario.trials {
        let orbits: Vec<CircularOrbit> = (0..scenario.num_satellites)
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(scenario.seed, trial, k));
                CircularOrbit {
                    altitude_km: scenario.orbit_altitude_km,
                    inclination_deg: scenario.inclination_deg,
                    raan_deg: rng.gen_range(0.0..360.0),
                    initial_phase_deg: rng.gen_range(0.0..360.0),
                    epoch_s: 0.0,
                }
            })
            .collect();
        let mut blanked = 0u64;
        for t in 0..n_seconds {
            let t_s = t as f64;
            let covered = orbits.iter().any(|orbit| {
                let u = orbit.subpoint_unit(t_s);
                u[0] * station_unit[0] + u[1] * station_unit[1] + u[2] * station_unit[2] >= cos_cap
            });
            if covered {
                blanked += 1;
            }
        }
        availability_sum += 1.0 - blanked as f64 / n_seconds as f64;
    }
    Ok(availability_sum / scenario.trials as f64)
}
