//! Planar array synthesis: conventional steering, zero-forcing null
//! steering toward protected directions, and sidelobe-level measurement.
//!
//! Elements sit on a rectangular lattice (nx columns along the horizontal
//! axis, ny rows along the vertical axis, `spacing_wavelengths` apart) with
//! isotropic element patterns; the boresight normal is the horizon
//! direction. A direction is (azimuth, elevation) in degrees; the visible
//! region is the front hemisphere, azimuth and elevation in [-90, 90].

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ArrayError {
    #[error("array must have at least one element per axis")]
    EmptyArray,
    #[error("{got} weights supplied for {expected} elements")]
    WeightCountMismatch { expected: usize, got: usize },
    #[error("at most n_elements - 1 = {max} nulls supported, got {got}")]
    TooManyNulls { max: usize, got: usize },
    #[error("null direction coincides with the steering direction")]
    NullAtSteerDirection,
    #[error("grid resolution must be positive")]
    NonPositiveResolution,
    #[error("mainlobe exclusion must exceed the grid resolution")]
    ExclusionTooSmall,
    #[error("mainlobe exclusion covers the whole visible region")]
    ExclusionCoversGrid,
}

/// Rectangular lattice geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    pub nx: usize,
    pub ny: usize,
    /// Element pitch in wavelengths (0.5 = half-wavelength lattice).
    pub spacing_wavelengths: f64,
}

impl ArrayGeometry {
    pub fn new(nx: usize, ny: usize, spacing_wavelengths: f64) -> Result<Self, ArrayError> {
        if nx == 0 || ny == 0 {
            return Err(ArrayError::EmptyArray);
        }
        Ok(Self { nx, ny, spacing_wavelengths })
    }

    pub fn elements(&self) -> usize {
        self.nx * self.ny
    }
}

/// Look direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub azimuth_deg: f64,
    pub elevation_deg: f64,
}

impl Direction {
    /// Direction cosines (u along the horizontal lattice axis, v along the
    /// vertical one).
    fn cosines(&self) -> (f64, f64) {
        let el = self.elevation_deg.to_radians();
        let az = self.azimuth_deg.to_radians();
        (el.cos() * az.sin(), el.sin())
    }

    fn unit(&self) -> [f64; 3] {
        let el = self.elevation_deg.to_radians();
        let az = self.azimuth_deg.to_radians();
        [el.cos() * az.sin(), el.cos() * az.cos(), el.sin()]
    }
}

/// Geometry plus complex excitation per element (row-major: index = n*nx + m).
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarArray {
    pub geometry: ArrayGeometry,
    pub weights: Vec<Complex64>,
}

impl PlanarArray {
    pub fn new(geometry: ArrayGeometry, weights: Vec<Complex64>) -> Result<Self, ArrayError> {
        if weights.len() != geometry.elements() {
            return Err(ArrayError::WeightCountMismatch {
                expected: geometry.elements(),
                got: weights.len(),
            });
        }
        Ok(Self { geometry, weights })
    }

    /// Uniformly excited array (all weights 1).
    pub fn uniform(geometry: ArrayGeometry) -> Self {
        Self { geometry, weights: vec![Complex64::new(1.0, 0.0); geometry.elements()] }
    }
}

/// Element-m,n phase term exp(j 2 pi s (m u + n v)) accumulated over the
/// weight vector: the raw (unnormalized) array factor.
pub fn array_factor(array: &PlanarArray, direction: &Direction) -> Complex64 {
    let (u, v) = direction.cosines();
    let s = array.geometry.spacing_wavelengths;
    let step_x = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * s * u);
    let step_y = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * s * v);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut phase_y = Complex64::new(1.0, 0.0);
    for n in 0..array.geometry.ny {
        let mut phase = phase_y;
        for m in 0..array.geometry.nx {
            sum += array.weights[n * array.geometry.nx + m] * phase;
            phase *= step_x;
        }
        phase_y *= step_y;
    }
    sum
}

/// Steering vector conjugate: unit-magnitude progressive phases that align
/// every element toward `steer`.
pub fn steer_weights(geometry: &ArrayGeometry, steer: &Direction) -> Vec<Complex64> {
    let (u, v) = steer.cosines();
    let s = geometry.spacing_wavelengths;
    let mut weights = Vec::with_capacity(geometry.elements());
    for n in 0..geometry.ny {
        for m in 0..geometry.nx {
            let phase = 2.0 * std::f64::consts::PI * s * (m as f64 * u + n as f64 * v);
            weights.push(Complex64::from_polar(1.0, -phase));
        }
    }
    weights
}

/// Sampled magnitude pattern over the front hemisphere, dB normalized to the
/// peak.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamPattern {
    pub resolution_deg: f64,
    /// Azimuth of column j: -90 + j * resolution.
    pub n_azimuth: usize,
    /// Elevation of row i: -90 + i * resolution.
    pub n_elevation: usize,
    /// Row-major values, dB relative to the peak.
    pub values_db: Vec<f64>,
    pub peak_azimuth_deg: f64,
    pub peak_elevation_deg: f64,
}

impl BeamPattern {
    pub fn value_at(&self, i_elevation: usize, j_azimuth: usize) -> f64 {
        self.values_db[i_elevation * self.n_azimuth + j_azimuth]
    }

    fn direction_of(&self, i_elevation: usize, j_azimuth: usize) -> Direction {
        Direction {
            azimuth_deg: -90.0 + j_azimuth as f64 * self.resolution_deg,
            elevation_deg: -90.0 + i_elevation as f64 * self.resolution_deg,
        }
    }
}

/// Evaluate the normalized array-factor magnitude on an
/// azimuth x elevation grid of the given resolution.
pub fn pattern(array: &PlanarArray, grid_resolution_deg: f64) -> Result<BeamPattern, ArrayError> {
    if !(grid_resolution_deg > 0.0) {
        return Err(ArrayError::NonPositiveResolution);
    }
    let n = (180.0 / grid_resolution_deg).round() as usize + 1;
    let mut linear = vec![0.0f64; n * n];
    let mut peak = f64::MIN;
    let mut peak_idx = (0usize, 0usize);
    for i in 0..n {
        let elevation = -90.0 + i as f64 * grid_resolution_deg;
        for j in 0..n {
            let azimuth = -90.0 + j as f64 * grid_resolution_deg;
            let mag =
                array_factor(array, &Direction { azimuth_deg: azimuth, elevation_deg: elevation })
                    .norm();
            linear[i * n + j] = mag;
            if mag > peak {
                peak = mag;
                peak_idx = (i, j);
            }
        }
    }
    let floor_db = -400.0;
    let values_db = linear
        .iter()
        .map(|&m| if m > 0.0 { 20.0 * (m / peak).log10() } else { floor_db })
        .collect();
    Ok(BeamPattern {
        resolution_deg: grid_resolution_deg,
        n_azimuth: n,
        n_elevation: n,
        values_db,
        peak_azimuth_deg: -90.0 + peak_idx.1 as f64 * grid_resolution_deg,
        peak_elevation_deg: -90.0 + peak_idx.0 as f64 * grid_resolution_deg,
    })
}

fn project_out(v: &mut [Complex64], q: &[Complex64]) {
    let c: Complex64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
    for (vi, qi) in v.iter_mut().zip(q) {
        *vi -= c * qi;
    }
}

/// Zero-forcing weights: the conventional steering weights projected onto
/// the orthogonal complement of the null-direction steering vectors, so the
/// pattern is exactly zero (to round-off) toward every null.
pub fn null_steering_weights(
    geometry: &ArrayGeometry,
    steer: &Direction,
    null_directions: &[Direction],
) -> Result<Vec<Complex64>, ArrayError> {
    if null_directions.len() >= geometry.elements() {
        return Err(ArrayError::TooManyNulls {
            max: geometry.elements() - 1,
            got: null_directions.len(),
        });
    }
    let steer_u = steer.cosines();
    for null in null_directions {
        let (nu, nv) = null.cosines();
        if (nu - steer_u.0).abs() < 1e-12 && (nv - steer_u.1).abs() < 1e-12 {
            return Err(ArrayError::NullAtSteerDirection);
        }
    }

    // orthonormal basis of the null steering-vector conjugates
    let mut null_basis: Vec<Vec<Complex64>> = Vec::new();
    for null in null_directions {
        let mut b = steer_weights(geometry, null);
        for _ in 0..2 {
            for q in &null_basis {
                project_out(&mut b, q);
            }
        }
        let norm: f64 = b.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-9 * (geometry.elements() as f64).sqrt() {
            for bi in b.iter_mut() {
                *bi /= norm;
            }
            null_basis.push(b);
        }
    }

    let mut weights = steer_weights(geometry, steer);
    for _ in 0..2 {
        for q in &null_basis {
            project_out(&mut weights, q);
        }
    }
    Ok(weights)
}

/// Peak sidelobe level: the strongest local pattern maximum outside the
/// mainlobe exclusion cap, dB relative to the peak.
///
/// Working on local maxima keeps the mainlobe skirt (which is not a
/// sidelobe) from dominating when the exclusion cap is smaller than the
/// first-null radius.
pub fn measure_sll(pattern: &BeamPattern, mainlobe_exclusion_deg: f64) -> Result<f64, ArrayError> {
    if mainlobe_exclusion_deg <= pattern.resolution_deg {
        return Err(ArrayError::ExclusionTooSmall);
    }
    if mainlobe_exclusion_deg >= 180.0 {
        return Err(ArrayError::ExclusionCoversGrid);
    }
    let peak_dir = Direction {
        azimuth_deg: pattern.peak_azimuth_deg,
        elevation_deg: pattern.peak_elevation_deg,
    }
    .unit();
    let cos_cap = mainlobe_exclusion_deg.to_radians().cos();

    let (rows, cols) = (pattern.n_elevation, pattern.n_azimuth);
    let mut best: Option<f64> = None;
    for i in 1..rows - 1 {
        for j in 1..cols - 1 {
            let v = pattern.value_at(i, j);
            let mut is_local_max = true;
            'neigh: for di in -1isize..=1 {
                for dj in -1isize..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let w = pattern.value_at((i as isize + di) as usize, (j as isize + dj) as usize);
                    if w >= v {
                        is_local_max = false;
                        break 'neigh;
                    }
                }
            }
            if !is_local_max {
                continue;
            }
            let d = pattern.direction_of(i, j).unit();
            let cos_angle = d[0] * peak_dir[0] + d[1] * peak_dir[1] + d[2] * peak_dir[2];
            if cos_angle >= cos_cap {
                continue; // inside the mainlobe cap
            }
            if best.map_or(true, |b| v > b) {
                best = Some(v);
            }
        }
    }
    best.ok_or(ArrayError::ExclusionCoversGrid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn geom8() -> ArrayGeometry {
        ArrayGeometry::new(8, 8, 0.5).unwrap()
    }

    #[test]
    fn broadside_steering_has_equal_phases() {
        let w = steer_weights(&geom8(), &Direction { azimuth_deg: 0.0, elevation_deg: 0.0 });
        for c in &w {
            assert!((c - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn steering_weights_have_unit_magnitude() {
        let w = steer_weights(&geom8(), &Direction { azimuth_deg: 17.0, elevation_deg: -42.0 });
        for c in &w {
            assert!((c.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_broadside_factor_counts_elements() {
        let a = PlanarArray::uniform(geom8());
        let af = array_factor(&a, &Direction { azimuth_deg: 0.0, elevation_deg: 0.0 });
        assert!((af.re - 64.0).abs() < 1e-12 && af.im.abs() < 1e-12);
    }

    #[test]
    fn single_element_pattern_is_flat() {
        let a = PlanarArray::uniform(ArrayGeometry::new(1, 1, 0.5).unwrap());
        let p = pattern(&a, 1.0).unwrap();
        for v in &p.values_db {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn steered_pattern_peaks_at_steer_direction() {
        let steer = Direction { azimuth_deg: 0.0, elevation_deg: 30.0 };
        let a = PlanarArray::new(geom8(), steer_weights(&geom8(), &steer)).unwrap();
        let p = pattern(&a, 0.25).unwrap();
        assert!((p.peak_elevation_deg - 30.0).abs() <= 0.25);
        assert!(p.peak_azimuth_deg.abs() <= 0.25);
    }

    #[test]
    fn random_steer_directions_land_within_a_grid_cell() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xA88A);
        let res = 0.5;
        for _ in 0..50 {
            let steer = Direction {
                azimuth_deg: rng.gen_range(-60.0..60.0),
                elevation_deg: rng.gen_range(-60.0..60.0),
            };
            let a = PlanarArray::new(geom8(), steer_weights(&geom8(), &steer)).unwrap();
            let p = pattern(&a, res).unwrap();
            assert!(
                (p.peak_azimuth_deg - steer.azimuth_deg).abs() <= res + 1e-9,
                "az {} vs {}",
                p.peak_azimuth_deg,
                steer.azimuth_deg
            );
            assert!(
                (p.peak_elevation_deg - steer.elevation_deg).abs() <= res + 1e-9,
                "el {} vs {}",
                p.peak_elevation_deg,
                steer.elevation_deg
            );
        }
    }

    #[test]
    fn conjugate_weights_mirror_the_pattern() {
        let steer = Direction { azimuth_deg: 25.0, elevation_deg: -10.0 };
        let w = steer_weights(&geom8(), &steer);
        let wc: Vec<Complex64> = w.iter().map(|c| c.conj()).collect();
        let a = PlanarArray::new(geom8(), w).unwrap();
        let ac = PlanarArray::new(geom8(), wc).unwrap();
        for (az, el) in [(10.0, 5.0), (-30.0, 40.0), (55.0, -25.0)] {
            let d = Direction { azimuth_deg: az, elevation_deg: el };
            let dm = Direction { azimuth_deg: -az, elevation_deg: -el };
            let m1 = array_factor(&a, &d).norm();
            let m2 = array_factor(&ac, &dm).norm();
            assert!((m1 - m2).abs() < 1e-9);
        }
    }

    #[test]
    fn uniform_8x8_sll_is_minus_13_db() {
        let a = PlanarArray::uniform(geom8());
        let p = pattern(&a, 0.1).unwrap();
        let sll = measure_sll(&p, 10.0).unwrap();
        // Dirichlet first sidelobe of an 8-element uniform line: -12.80 dB
        assert!((sll - -12.80).abs() < 0.1, "sll={sll}");
    }

    #[test]
    fn sll_is_invariant_under_global_phase() {
        let rot = Complex64::from_polar(1.0, 1.234);
        let a = PlanarArray::uniform(geom8());
        let b = PlanarArray::new(geom8(), a.weights.iter().map(|w| w * rot).collect()).unwrap();
        let pa = pattern(&a, 0.25).unwrap();
        let pb = pattern(&b, 0.25).unwrap();
        let sa = measure_sll(&pa, 10.0).unwrap();
        let sb = measure_sll(&pb, 10.0).unwrap();
        assert!((sa - sb).abs() < 1e-9);
    }

    #[test]
    fn sll_validates_exclusion() {
        let p = pattern(&PlanarArray::uniform(geom8()), 0.5).unwrap();
        assert_eq!(measure_sll(&p, 0.25), Err(ArrayError::ExclusionTooSmall));
        assert_eq!(measure_sll(&p, 200.0), Err(ArrayError::ExclusionCoversGrid));
    }

    #[test]
    fn empty_null_list_reduces_to_conventional_steering() {
        let steer = Direction { azimuth_deg: 12.0, elevation_deg: -30.0 };
        let w0 = steer_weights(&geom8(), &steer);
        let w = null_steering_weights(&geom8(), &steer, &[]).unwrap();
        for (a, b) in w.iter().zip(&w0) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn nulls_are_deep_and_mainlobe_survives() {
        let steer = Direction { azimuth_deg: 0.0, elevation_deg: -30.0 };
        let nulls = [
            Direction { azimuth_deg: 0.0, elevation_deg: 10.0 },
            Direction { azimuth_deg: 0.0, elevation_deg: 30.0 },
            Direction { azimuth_deg: 0.0, elevation_deg: 60.0 },
        ];
        let w = null_steering_weights(&geom8(), &steer, &nulls).unwrap();
        let a = PlanarArray::new(geom8(), w).unwrap();
        let conventional =
            PlanarArray::new(geom8(), steer_weights(&geom8(), &steer)).unwrap();

        let peak = array_factor(&a, &steer).norm();
        let peak_conv = array_factor(&conventional, &steer).norm();
        assert!(20.0 * (peak / peak_conv).log10() > -1.0, "mainlobe loss too high");
        for null in &nulls {
            let depth = 20.0 * (array_factor(&a, null).norm() / peak).log10();
            assert!(depth < -80.0, "null at {null:?} only {depth} dB");
        }
    }

    #[test]
    fn eight_random_nulls_stay_deep() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x9F11);
        let steer = Direction { azimuth_deg: 5.0, elevation_deg: -20.0 };
        let nulls: Vec<Direction> = (0..8)
            .map(|_| Direction {
                azimuth_deg: rng.gen_range(-60.0..60.0),
                elevation_deg: rng.gen_range(5.0..70.0),
            })
            .collect();
        let w = null_steering_weights(&geom8(), &steer, &nulls).unwrap();
        let a = PlanarArray::new(geom8(), w).unwrap();
        let peak = array_factor(&a, &steer).norm();
        for null in &nulls {
            let depth = 20.0 * (array_factor(&a, null).norm() / peak).log10();
            assert!(depth < -80.0, "depth {depth}");
        }
    }

    #[test]
    fn symmetric_null_pairs_give_real_weights_at_broadside() {
        let steer = Direction { azimuth_deg: 0.0, elevation_deg: 0.0 };
        let nulls = [
            Direction { azimuth_deg: 0.0, elevation_deg: 30.0 },
            Direction { azimuth_deg: 0.0, elevation_deg: -30.0 },
        ];
        let w = null_steering_weights(&geom8(), &steer, &nulls).unwrap();
        for c in &w {
            assert!(c.im.abs() < 1e-10, "weights should be conjugate-symmetric: {c}");
        }
        // and the pattern is mirror-symmetric in elevation
        let a = PlanarArray::new(geom8(), w).unwrap();
        for el in [10.0, 20.0, 45.0] {
            let up = array_factor(&a, &Direction { azimuth_deg: 0.0, elevation_deg: el }).norm();
            let down =
                array_factor(&a, &Direction { azimuth_deg: 0.0, elevation_deg: -el }).norm();
            assert!((up - down).abs() < 1e-9);
        }
    }

    #[test]
    fn null_at_steer_direction_is_infeasible() {
        let steer = Direction { azimuth_deg: 10.0, elevation_deg: 10.0 };
        let err = null_steering_weights(&geom8(), &steer, &[steer]);
        assert_eq!(err, Err(ArrayError::NullAtSteerDirection));
    }

    #[test]
    fn too_many_nulls_rejected() {
        let steer = Direction { azimuth_deg: 0.0, elevation_deg: 0.0 };
        let nulls: Vec<Direction> = (0..64)
            .map(|i| Direction { azimuth_deg: i as f64 - 32.0, elevation_deg: 20.0 })
            .collect();
        assert!(matches!(
            null_steering_weights(&geom8(), &steer, &nulls),
            Err(ArrayError::TooManyNulls { max: 63, got: 64 })
        ));
    }
}
