//! Coexistence analysis for the spectrum above 100 GHz.
//!
//! The crate models the physical layer of active/passive spectrum sharing
//! between terrestrial sub-THz links and passive sensing satellites:
//!
//! - [`atmosphere`]: ITU-R P.835 reference atmosphere, P.676 line-by-line
//!   gaseous attenuation, and refractive ray bending;
//! - [`antenna`]: the ITU piecewise reference antenna pattern used on both
//!   link ends;
//! - [`propagation`]: spreading loss, Earth-space slant geometry, and the
//!   slant absorption integral;
//! - [`linkbudget`]: Tbps bandwidth/power sizing, QAM error rates, RFI
//!   received at satellites, and protection-threshold checks;
//! - [`sharing`]: satellite pass prediction and band-switch / coordination
//!   blanking simulation;
//! - [`waveforms`]: DSSS spreading, Gram-Schmidt symbol orthogonalization,
//!   and OFDM subcarrier nulling;
//! - [`arrays`]: planar array synthesis with sidelobe measurement and null
//!   steering.
//!
//! All models are pure functions over immutable data and are safe to call
//! concurrently. Spectroscopic line tables and protection thresholds ship as
//! versioned CSV files embedded at build time (see [`tables`]); set
//! `COEX_DATA_DIR` to load them from disk instead.

pub mod antenna;
pub mod arrays;
pub mod atmosphere;
pub mod linkbudget;
pub mod propagation;
pub mod sharing;
pub mod tables;
pub mod waveforms;

/// Mean Earth radius in km, shared by slant geometry, refraction, and orbits.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;
