//! Waveform-level sharing tools: DSSS spectral spreading, Gram-Schmidt
//! orthogonalization of symbol sets, and OFDM subcarrier nulling masks.

use num_complex::Complex64;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::linkbudget::ProtectedBand;

#[derive(Debug, Error, PartialEq)]
pub enum WaveformError {
    #[error("spreading factor must be >= 1")]
    ZeroSpreadingFactor,
    #[error("data symbol sequence is empty")]
    EmptyData,
    #[error("fft size {0} is not a power of two")]
    FftSizeNotPowerOfTwo(usize),
    #[error("fft size {got} below the required 4 * SF * len(data) = {required}")]
    FftTooSmall { required: usize, got: usize },
    #[error("symbol set is empty")]
    EmptySymbolSet,
    #[error("symbols must share a common length")]
    MismatchedSymbolLengths,
    #[error("symbol {index} has zero energy")]
    DegenerateSymbol { index: usize },
    #[error("cannot exclude the only basis function")]
    BasisTooSmall,
    #[error("reserved index {index} outside basis of size {basis_size}")]
    ReservedIndexOutOfRange { index: usize, basis_size: usize },
    #[error("subcarrier grid invalid: {0}")]
    InvalidSubcarrierGrid(&'static str),
}

/// DSSS chipping configuration. The chip stream is a maximal-length
/// shift-register sequence (degree 20, taps 20/3) mapped to +/-1; the seed
/// selects the register's initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadConfig {
    pub spreading_factor: u32,
    pub chip_rate_hz: f64,
    pub seed: u64,
}

/// +/-1 chips from the LFSR, `count` of them.
fn m_sequence(seed: u64, count: usize) -> Vec<f64> {
    const DEGREE: u32 = 20;
    const MASK: u32 = (1 << DEGREE) - 1;
    // nonzero initial state derived from the seed
    let mut state: u32 = ((seed % MASK as u64) as u32) + 1;
    (0..count)
        .map(|_| {
            let out = state & 1;
            // x^20 + x^3 + 1
            let feedback = (state ^ (state >> 3)) & 1;
            state = (state >> 1) | (feedback << (DEGREE - 1));
            if out == 1 {
                1.0
            } else {
                -1.0
            }
        })
        .collect()
}

/// Power spectral density of a chipped sequence plus the peak-PSD reduction
/// relative to the unspread signal.
#[derive(Debug, Clone, PartialEq)]
pub struct DsssPsd {
    /// Baseband frequency of each bin, Hz (chip-rate sampling, fftshifted).
    pub frequency_hz: Vec<f64>,
    /// Smoothed periodogram of the spread signal, dB.
    pub psd_db: Vec<f64>,
    /// peak(unspread PSD) - peak(spread PSD), dB; ~10 log10(SF).
    pub peak_reduction_db: f64,
}

/// Spread `data_symbols` by the configured factor and estimate both PSDs.
///
/// Each data symbol is held for SF chip intervals; the spread signal
/// multiplies that sample stream by the +/-1 chip sequence (SF = 1 is the
/// identity: no chipping). Both signals are Hann-windowed, zero-padded to
/// `fft_size`, and their periodograms smoothed with a moving average so the
/// peak estimate is stable.
pub fn dsss_psd(
    config: &SpreadConfig,
    data_symbols: &[Complex64],
    fft_size: usize,
) -> Result<DsssPsd, WaveformError> {
    if config.spreading_factor == 0 {
        return Err(WaveformError::ZeroSpreadingFactor);
    }
    if data_symbols.is_empty() {
        return Err(WaveformError::EmptyData);
    }
    if !fft_size.is_power_of_two() {
        return Err(WaveformError::FftSizeNotPowerOfTwo(fft_size));
    }
    let sf = config.spreading_factor as usize;
    let n = sf * data_symbols.len();
    let required = 4 * n;
    if fft_size < required {
        return Err(WaveformError::FftTooSmall { required, got: fft_size });
    }

    let mut unspread = Vec::with_capacity(n);
    for &d in data_symbols {
        for _ in 0..sf {
            unspread.push(d);
        }
    }
    let spread: Vec<Complex64> = if sf == 1 {
        unspread.clone()
    } else {
        let chips = m_sequence(config.seed, n);
        unspread.iter().zip(&chips).map(|(&x, &c)| x * c).collect()
    };

    let psd_spread = smoothed_periodogram(&spread, fft_size);
    let psd_unspread = smoothed_periodogram(&unspread, fft_size);
    let peak = |psd: &[f64]| psd.iter().cloned().fold(f64::MIN, f64::max);
    let peak_reduction_db =
        10.0 * (peak(&psd_unspread) / peak(&psd_spread)).log10();

    let df = config.chip_rate_hz / fft_size as f64;
    let half = fft_size / 2;
    let mut frequency_hz = Vec::with_capacity(fft_size);
    let mut psd_db = Vec::with_capacity(fft_size);
    for i in 0..fft_size {
        // fftshift: negative frequencies first
        let k = (i + half) % fft_size;
        frequency_hz.push((i as f64 - half as f64) * df);
        psd_db.push(10.0 * psd_spread[k].log10());
    }
    Ok(DsssPsd { frequency_hz, psd_db, peak_reduction_db })
}

/// Hann-windowed, zero-padded periodogram with circular moving-average
/// smoothing (span fft/256, floored at 5 bins).
fn smoothed_periodogram(signal: &[Complex64], fft_size: usize) -> Vec<f64> {
    let n = signal.len();
    let mut buf = vec![Complex64::new(0.0, 0.0); fft_size];
    for (i, &x) in signal.iter().enumerate() {
        let w = 0.5
            - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / (n - 1).max(1) as f64).cos();
        buf[i] = x * w;
    }
    FftPlanner::new().plan_fft_forward(fft_size).process(&mut buf);
    let raw: Vec<f64> = buf.iter().map(|c| c.norm_sqr()).collect();

    let span = (fft_size / 256).max(5) | 1;
    let half = span / 2;
    // circular prefix sums, padded by one window on each side
    let padded = 2 * fft_size + span;
    let mut prefix = Vec::with_capacity(padded + 1);
    prefix.push(0.0);
    for i in 0..padded {
        prefix.push(prefix[i] + raw[i % fft_size]);
    }
    (0..fft_size)
        .map(|i| {
            let lo = i + fft_size - half;
            let hi = i + fft_size + half + 1;
            (prefix[hi] - prefix[lo]) / span as f64
        })
        .collect()
}

/// A set of discrete-time finite-energy symbols (complex samples, common
/// length).
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolSet {
    pub symbols: Vec<Vec<Complex64>>,
}

impl SymbolSet {
    pub fn new(symbols: Vec<Vec<Complex64>>) -> Result<Self, WaveformError> {
        let set = Self { symbols };
        set.validate()?;
        Ok(set)
    }

    fn validate(&self) -> Result<(), WaveformError> {
        if self.symbols.is_empty() {
            return Err(WaveformError::EmptySymbolSet);
        }
        let len = self.symbols[0].len();
        for (index, s) in self.symbols.iter().enumerate() {
            if s.len() != len {
                return Err(WaveformError::MismatchedSymbolLengths);
            }
            let energy: f64 = s.iter().map(|c| c.norm_sqr()).sum();
            if !(energy > 0.0) || !energy.is_finite() {
                return Err(WaveformError::DegenerateSymbol { index });
            }
        }
        Ok(())
    }
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Numerical-rank threshold, relative to each symbol's own norm.
const RANK_TOLERANCE: f64 = 1e-9;

/// Orthonormal basis of a symbol set plus the coordinates of every input
/// symbol in that basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalBasis {
    /// N <= M orthonormal waveforms.
    pub basis: Vec<Vec<Complex64>>,
    /// coordinates[i][k] = <phi_k, s_i>; reconstructs s_i = sum_k c_ik phi_k.
    pub coordinates: Vec<Vec<Complex64>>,
}

/// Gram-Schmidt orthogonalization with a second projection pass for
/// numerical stability. Symbols that lie in the span of their predecessors
/// (residual below 1e-9 of their norm) contribute no basis function.
pub fn gram_schmidt(set: &SymbolSet) -> Result<OrthogonalBasis, WaveformError> {
    set.validate()?;
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for s in &set.symbols {
        let mut v = s.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = inner(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let residual = norm(&v);
        if residual > RANK_TOLERANCE * norm(s) {
            for vi in v.iter_mut() {
                *vi /= residual;
            }
            basis.push(v);
        }
    }
    let coordinates = set
        .symbols
        .iter()
        .map(|s| basis.iter().map(|q| inner(q, s)).collect())
        .collect();
    Ok(OrthogonalBasis { basis, coordinates })
}

/// Capacity bookkeeping when one basis function is ceded to sensing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CapacityNote {
    /// Representable bits with the full basis (N).
    pub bits_before: u32,
    /// Representable bits without the reserved function (N - 1).
    pub bits_after: u32,
}

impl CapacityNote {
    /// 2^bits symbols representable before/after the exclusion.
    pub fn symbols_before(&self) -> u64 {
        1 << self.bits_before
    }
    pub fn symbols_after(&self) -> u64 {
        1 << self.bits_after
    }
}

/// Symbols that survive the exclusion of one basis function.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcludedSet {
    pub survivors: SymbolSet,
    /// Indices of the survivors in the input set.
    pub surviving_indices: Vec<usize>,
    pub capacity: CapacityNote,
}

/// Drop every symbol with a nonzero component on the reserved basis function
/// of the set's Gram-Schmidt basis.
pub fn exclude_basis(
    set: &SymbolSet,
    reserved_index: usize,
) -> Result<ExcludedSet, WaveformError> {
    let gs = gram_schmidt(set)?;
    let n = gs.basis.len();
    if n < 2 {
        return Err(WaveformError::BasisTooSmall);
    }
    if reserved_index >= n {
        return Err(WaveformError::ReservedIndexOutOfRange { index: reserved_index, basis_size: n });
    }
    let mut survivors = Vec::new();
    let mut surviving_indices = Vec::new();
    for (i, s) in set.symbols.iter().enumerate() {
        if gs.coordinates[i][reserved_index].norm() <= RANK_TOLERANCE * norm(s) {
            survivors.push(s.clone());
            surviving_indices.push(i);
        }
    }
    Ok(ExcludedSet {
        survivors: SymbolSet { symbols: survivors },
        surviving_indices,
        capacity: CapacityNote { bits_before: n as u32, bits_after: (n - 1) as u32 },
    })
}

/// Per-subcarrier on/off mask against protected bands.
#[derive(Debug, Clone, PartialEq)]
pub struct NullMask {
    /// Center frequency of each subcarrier, GHz.
    pub subcarrier_frequency_ghz: Vec<f64>,
    /// true = transmit, false = nulled.
    pub on: Vec<bool>,
    /// Nulled fraction of the grid.
    pub capacity_loss_fraction: f64,
}

/// Null every subcarrier whose center frequency falls inside a protected
/// band, widened by `guard_band_hz` on each side.
///
/// Subcarrier k sits at f_c + (k - N/2) * spacing, the usual FFT-bin layout
/// around the carrier.
pub fn ofdm_null_mask(
    num_subcarriers: usize,
    subcarrier_spacing_hz: f64,
    center_frequency_ghz: f64,
    protected_bands: &[ProtectedBand],
    guard_band_hz: f64,
) -> Result<NullMask, WaveformError> {
    if num_subcarriers == 0 {
        return Err(WaveformError::InvalidSubcarrierGrid("no subcarriers"));
    }
    if !(subcarrier_spacing_hz > 0.0) {
        return Err(WaveformError::InvalidSubcarrierGrid("spacing must be positive"));
    }
    if guard_band_hz < 0.0 {
        return Err(WaveformError::InvalidSubcarrierGrid("guard band must be >= 0"));
    }
    let guard_ghz = guard_band_hz / 1e9;
    let spacing_ghz = subcarrier_spacing_hz / 1e9;
    let half = num_subcarriers as f64 / 2.0;
    let mut subcarrier_frequency_ghz = Vec::with_capacity(num_subcarriers);
    let mut on = Vec::with_capacity(num_subcarriers);
    let mut off_count = 0usize;
    for k in 0..num_subcarriers {
        let f = center_frequency_ghz + (k as f64 - half) * spacing_ghz;
        let blocked = protected_bands.iter().any(|b| {
            f >= b.band_low_ghz - guard_ghz && f <= b.band_high_ghz + guard_ghz
        });
        if blocked {
            off_count += 1;
        }
        subcarrier_frequency_ghz.push(f);
        on.push(!blocked);
    }
    Ok(NullMask {
        subcarrier_frequency_ghz,
        on,
        capacity_loss_fraction: off_count as f64 / num_subcarriers as f64,
    })
}
