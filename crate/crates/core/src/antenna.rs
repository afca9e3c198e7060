//! ITU reference antenna gain pattern for high-frequency directional links.
//!
//! The model derives an equivalent aperture diameter from the maximum gain,
//! then evaluates the piecewise off-axis envelope (mainlobe parabola, first
//! sidelobe plateau, log-slope skirt, far-sidelobe floor). Two branch sets
//! apply depending on whether D/lambda exceeds 100, as in the F.699-style
//! recommendation for frequencies above 70 GHz.

use thiserror::Error;

use crate::SPEED_OF_LIGHT_M_S;

#[derive(Debug, Error, PartialEq)]
pub enum AntennaError {
    #[error("max gain {g_max_dbi} dBi below 7.7 dBi implies a sub-wavelength aperture")]
    GainTooLow { g_max_dbi: f64 },
    #[error("frequency must be positive, got {frequency_ghz} GHz")]
    NonPositiveFrequency { frequency_ghz: f64 },
}

/// Directional antenna with its derived pattern parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaModel {
    /// Boresight gain, dBi.
    pub g_max_dbi: f64,
    /// Carrier frequency, GHz.
    pub frequency_ghz: f64,
    /// Equivalent aperture diameter, m.
    pub diameter_m: f64,
    /// Diameter in wavelengths; selects the pattern branch set.
    pub d_over_lambda: f64,
    /// First-sidelobe plateau gain G1, dBi.
    pub g1_dbi: f64,
    /// End of the mainlobe parabola, deg.
    pub theta_m_deg: f64,
    /// End of the G1 plateau, deg.
    pub theta_r_deg: f64,
}

/// Build the pattern parameters for a given boresight gain and frequency.
///
/// D = lambda 10^((G_max - 7.7) / 20), G1 = 2 + 15 log10(D/lambda),
/// theta_m = (20 lambda / D) sqrt(G_max - G1), and the plateau ends at
/// theta_r = 15.85 (D/lambda)^-0.6 when D/lambda > 100, else at
/// 100 lambda / D.
pub fn build_antenna(g_max_dbi: f64, frequency_ghz: f64) -> Result<AntennaModel, AntennaError> {
    if !(frequency_ghz > 0.0) {
        return Err(AntennaError::NonPositiveFrequency { frequency_ghz });
    }
    if !(g_max_dbi >= 7.7) {
        return Err(AntennaError::GainTooLow { g_max_dbi });
    }
    let lambda_m = SPEED_OF_LIGHT_M_S / (frequency_ghz * 1e9);
    let d_over_lambda = 10f64.powf((g_max_dbi - 7.7) / 20.0);
    let g1_dbi = 2.0 + 15.0 * d_over_lambda.log10();
    let theta_m_deg = 20.0 / d_over_lambda * (g_max_dbi - g1_dbi).sqrt();
    let theta_r_deg = if d_over_lambda > 100.0 {
        15.85 * d_over_lambda.powf(-0.6)
    } else {
        100.0 / d_over_lambda
    };
    Ok(AntennaModel {
        g_max_dbi,
        frequency_ghz,
        diameter_m: lambda_m * d_over_lambda,
        d_over_lambda,
        g1_dbi,
        theta_m_deg,
        theta_r_deg,
    })
}

impl AntennaModel {
    /// Gain at `off_axis_deg` degrees from boresight, dBi.
    ///
    /// `off_axis_deg` must lie in [0, 180].
    pub fn gain_at(&self, off_axis_deg: f64) -> f64 {
        assert!(
            (0.0..=180.0).contains(&off_axis_deg),
            "off-axis angle {off_axis_deg} outside [0, 180] deg"
        );
        let theta = off_axis_deg;
        let dl = self.d_over_lambda;
        if theta < self.theta_m_deg {
            return self.g_max_dbi - 2.5e-3 * (dl * theta).powi(2);
        }
        if theta < self.theta_r_deg {
            return self.g1_dbi;
        }
        if dl > 100.0 {
            if theta < 120.0 {
                32.0 - 25.0 * theta.log10()
            } else {
                -20.0
            }
        } else if theta < 120.0 {
            52.0 - 10.0 * dl.log10() - 25.0 * theta.log10()
        } else {
            -10.0 * dl.log10()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Table-IV ground antenna: 40 dBi at 230 GHz.
    fn ground() -> AntennaModel {
        build_antenna(40.0, 230.0).unwrap()
    }

    #[test]
    fn aperture_in_wavelengths_from_closed_form() {
        // D/lambda = 10^(32.3/20) = 41.2098
        let a = ground();
        assert!((a.d_over_lambda - 41.2098).abs() < 1e-3, "{}", a.d_over_lambda);
        assert!(a.d_over_lambda <= 100.0, "must use the small-aperture branch set");
    }

    #[test]
    fn branch_boundary_at_47_7_dbi() {
        let a = build_antenna(47.7, 150.0).unwrap();
        assert!((a.d_over_lambda - 100.0).abs() < 1e-9);
    }

    #[test]
    fn first_lobe_gain_from_closed_form() {
        // G1 = 2 + 15 log10(41.2098) = 26.225
        let a = ground();
        assert!((a.g1_dbi - 26.225).abs() < 1e-9, "{}", a.g1_dbi);
    }

    #[test]
    fn boresight_gain_is_exact() {
        assert_eq!(ground().gain_at(0.0), 40.0);
        let big = build_antenna(50.0, 230.0).unwrap();
        assert_eq!(big.gain_at(0.0), 50.0);
    }

    #[test]
    fn far_sidelobe_floor_small_aperture() {
        // -10 log10(D/lambda) = -16.15 dBi past 120 deg
        let a = ground();
        assert!((a.gain_at(150.0) + 16.15).abs() < 1e-9, "{}", a.gain_at(150.0));
        assert_eq!(a.gain_at(150.0), a.gain_at(180.0));
    }

    #[test]
    fn skirt_value_at_10_degrees() {
        // 52 - 10 log10(41.2098) - 25 log10(10) = 10.85 dBi
        let a = ground();
        assert!((a.gain_at(10.0) - 10.85).abs() < 1e-9, "{}", a.gain_at(10.0));
    }

    #[test]
    fn sub_wavelength_gain_rejected() {
        assert!(matches!(
            build_antenna(7.0, 230.0),
            Err(AntennaError::GainTooLow { .. })
        ));
        assert!(build_antenna(7.7, 230.0).is_ok());
        assert!(matches!(
            build_antenna(40.0, 0.0),
            Err(AntennaError::NonPositiveFrequency { .. })
        ));
    }

    #[test]
    fn pattern_never_exceeds_boresight_and_never_jumps_up() {
        for (g_max, f) in [(40.0, 230.0), (50.0, 230.0), (47.7, 150.0), (8.0, 100.0)] {
            let a = build_antenna(g_max, f).unwrap();
            let mut prev = a.gain_at(0.0);
            let mut i = 1u32;
            while (i as f64) * 0.01 <= 180.0 {
                let theta = i as f64 * 0.01;
                let g = a.gain_at(theta);
                assert!(g <= g_max + 1e-12, "gain above boresight at {theta} deg");
                assert!(
                    g <= prev + 1e-9,
                    "upward jump at {theta} deg for g_max={g_max}: {prev} -> {g}"
                );
                prev = g;
                i += 1;
            }
        }
    }

    #[test]
    fn plateau_breakpoints_ordered_and_continuous() {
        let a = ground();
        assert!(0.0 < a.theta_m_deg && a.theta_m_deg <= a.theta_r_deg);
        // mainlobe parabola lands exactly on G1 at theta_m
        let at_m = a.g_max_dbi - 2.5e-3 * (a.d_over_lambda * a.theta_m_deg).powi(2);
        assert!((at_m - a.g1_dbi).abs() < 1e-9);
        // plateau meets the skirt at theta_r within rounding of the 15.85 constant
        let skirt = a.gain_at(a.theta_r_deg);
        assert!((skirt - a.g1_dbi).abs() < 1e-3, "skirt={skirt} g1={}", a.g1_dbi);

        let big = build_antenna(50.0, 230.0).unwrap();
        assert!(big.d_over_lambda > 100.0);
        assert!(0.0 < big.theta_m_deg && big.theta_m_deg <= big.theta_r_deg);
        let skirt = 32.0 - 25.0 * big.theta_r_deg.log10();
        assert!((skirt - big.g1_dbi).abs() < 1e-3);
    }
}
