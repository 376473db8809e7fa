//! Spectrum of the collective state, two independent ways.
//!
//! The exact route expands `2^-n * prod_j (1 + x^(a_j))` by iterated
//! integer-coefficient convolution (the pseudo-polynomial counting
//! recurrence), so every amplitude is an exact multiple of `2^-n`. The
//! numeric route takes a discrete Fourier transform of a sampled waveform.
//! At the exact rate `N >= 2A+1` the two must agree to rounding error.
//!
//! DFT convention used throughout: `X(f) = N^-1 * sum_k g_k e^(-2*pi*i*f*k/N)`
//! evaluated per harmonic on the signed range `[-neg_extent, pos_extent]`,
//! which corresponds to reading DFT bin `k` as frequency `k - N` for
//! `k > N/2`. With that normalization `X(f)` equals `2^-n` times the subset
//! count at sum `f` (plus the empty set at f = 0).

use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::network::CollectiveState;
use crate::oracle::subset_count_coefficients;
use crate::problem::SubsetSumInstance;

/// One spectral line on the normalized integer frequency grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Harmonic {
    /// Normalized frequency, an integer subset sum.
    pub f: i64,
    /// Real amplitude in volts.
    pub amplitude: f64,
    /// Subset count at this sum: exact for exact spectra, nearest integer of
    /// `2^n * amplitude` for DFT estimates. Includes the empty set at f = 0.
    pub count: u64,
}

#[derive(Debug, Clone)]
enum SpectrumData {
    /// Exact integer subset counts; amplitude is `count * 2^-n`, converted to
    /// floating point only when queried.
    Exact { counts: Vec<u64> },
    /// Real parts of the DFT bins; the largest imaginary residue is kept as
    /// a diagnostic.
    Estimated { amplitudes: Vec<f64>, max_imag: f64 },
}

/// Amplitude per normalized integer frequency over `[-neg_extent,
/// pos_extent]`, zero outside.
#[derive(Debug, Clone)]
pub struct Spectrum {
    n: u32,
    neg_extent: u64,
    pos_extent: u64,
    data: SpectrumData,
}

impl Spectrum {
    pub fn n(&self) -> u32 {
        self.n
    }

    /// The DC amplitude keeps the empty-set term: `amplitude(0)` is
    /// `2^-n * (1 + #zero-sum subsets)`. Every consumer that wants pure
    /// subset counts at zero must subtract `2^-n` (the readout does).
    pub fn includes_empty_set_at_dc(&self) -> bool {
        true
    }

    pub fn neg_extent(&self) -> u64 {
        self.neg_extent
    }

    pub fn pos_extent(&self) -> u64 {
        self.pos_extent
    }

    /// Band limit `A = max(neg_extent, pos_extent)`.
    pub fn capacity(&self) -> u64 {
        self.neg_extent.max(self.pos_extent)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.data, SpectrumData::Exact { .. })
    }

    /// Largest imaginary residue left by the DFT; `None` for exact spectra.
    pub fn max_imag(&self) -> Option<f64> {
        match &self.data {
            SpectrumData::Exact { .. } => None,
            SpectrumData::Estimated { max_imag, .. } => Some(*max_imag),
        }
    }

    fn index(&self, f: i64) -> Option<usize> {
        if f < -(self.neg_extent as i64) || f > self.pos_extent as i64 {
            None
        } else {
            Some((f + self.neg_extent as i64) as usize)
        }
    }

    /// Amplitude at normalized frequency `f`; zero outside the band.
    pub fn amplitude(&self, f: i64) -> f64 {
        let Some(idx) = self.index(f) else {
            return 0.0;
        };
        match &self.data {
            SpectrumData::Exact { counts } => counts[idx] as f64 * (self.n as f64).exp2().recip(),
            SpectrumData::Estimated { amplitudes, .. } => amplitudes[idx],
        }
    }

    /// Subset count at sum `f` (empty set included at zero); exact spectra
    /// report the true integer, estimates round `2^n * amplitude`.
    pub fn count(&self, f: i64) -> u64 {
        let Some(idx) = self.index(f) else {
            return 0;
        };
        match &self.data {
            SpectrumData::Exact { counts } => counts[idx],
            SpectrumData::Estimated { amplitudes, .. } => {
                (amplitudes[idx] * (self.n as f64).exp2()).round().max(0.0) as u64
            }
        }
    }

    /// All harmonics in the band, ascending by frequency.
    pub fn harmonics(&self) -> impl Iterator<Item = Harmonic> + '_ {
        let neg = self.neg_extent as i64;
        (-neg..=self.pos_extent as i64).map(move |f| Harmonic {
            f,
            amplitude: self.amplitude(f),
            count: self.count(f),
        })
    }
}

/// Exact spectrum from subset-sum combinatorics: `amplitude(f)` is `2^-n`
/// times the number of subsets summing to `f`, empty set included at DC.
/// O(n*A) time and O(A) space; refuses instances whose counts overflow u64.
///
/// ```
/// use memssp::{exact_spectrum, SubsetSumInstance};
///
/// let g = SubsetSumInstance::new(vec![1, 2])?;
/// let spectrum = exact_spectrum(&g)?;
/// // every sum 0..=3 is reached by exactly one subset
/// assert_eq!(spectrum.amplitude(3), 0.25);
/// assert_eq!(spectrum.count(0), 1); // the empty set
/// assert_eq!(spectrum.amplitude(4), 0.0); // out of band
/// # Ok::<(), memssp::Error>(())
/// ```
pub fn exact_spectrum(instance: &SubsetSumInstance) -> Result<Spectrum> {
    let counts = subset_count_coefficients(instance)?;
    Ok(Spectrum {
        n: instance.n() as u32,
        neg_extent: instance.neg_extent(),
        pos_extent: instance.pos_extent(),
        data: SpectrumData::Exact { counts },
    })
}

/// Spectrum of a sampled collective state by direct per-harmonic DFT.
///
/// Requires the exact rate `N >= 2A+1`; anything less would alias
/// negative-band harmonics onto positive ones and the result would be wrong
/// rather than approximate, so it is refused.
pub fn dft_spectrum(state: &CollectiveState) -> Result<Spectrum> {
    let samples = state.samples().ok_or(Error::NotSampled)?;
    let assignment = state.assignment();
    let n_samples = samples.len();
    let required = (2 * assignment.capacity() + 1) as usize;
    if n_samples < required {
        return Err(Error::Aliasing {
            required,
            actual: n_samples,
        });
    }

    // e^(-2*pi*i*p/N) for every residue p; harmonic phases are integer
    // residues into this table, which keeps the transform exact-period.
    let twiddle: Vec<Complex64> = (0..n_samples)
        .map(|p| Complex64::from_polar(1.0, -std::f64::consts::TAU * p as f64 / n_samples as f64))
        .collect();

    let neg = assignment.neg_extent() as i64;
    let pos = assignment.pos_extent() as i64;
    let mut amplitudes = Vec::with_capacity((neg + pos + 1) as usize);
    let mut max_imag: f64 = 0.0;
    for f in -neg..=pos {
        let residue = f.rem_euclid(n_samples as i64) as u128;
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, g) in samples.iter().enumerate() {
            let p = (residue * k as u128 % n_samples as u128) as usize;
            acc += g * twiddle[p];
        }
        acc /= n_samples as f64;
        max_imag = max_imag.max(acc.im.abs());
        amplitudes.push(acc.re);
    }

    Ok(Spectrum {
        n: assignment.n() as u32,
        neg_extent: assignment.neg_extent(),
        pos_extent: assignment.pos_extent(),
        data: SpectrumData::Estimated {
            amplitudes,
            max_imag,
        },
    })
}

/// One DFT bin of an arbitrary complex buffer under the module's
/// normalization, `N^-1 * sum_k x_k e^(-2*pi*i*f*k/N)`.
pub(crate) fn dft_bin(samples: &[Complex64], f: i64) -> Complex64 {
    let n_samples = samples.len();
    let residue = f.rem_euclid(n_samples as i64) as u128;
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, x) in samples.iter().enumerate() {
        let p = (residue * k as u128 % n_samples as u128) as f64;
        acc += x * Complex64::from_polar(1.0, -std::f64::consts::TAU * p / n_samples as f64);
    }
    acc / n_samples as f64
}

/// CSV export: `f_normalized,amplitude,count`, one row per in-band harmonic.
pub fn write_spectrum_csv<W: Write>(spectrum: &Spectrum, out: &mut W) -> Result<()> {
    writeln!(out, "f_normalized,amplitude,count")?;
    for h in spectrum.harmonics() {
        writeln!(out, "{},{},{}", h.f, h.amplitude, h.count)?;
    }
    Ok(())
}

/// JSON export: the CSV fields plus `n`, `f0_hz` and the DC convention flag.
pub fn write_spectrum_json<W: Write>(spectrum: &Spectrum, f0_hz: f64, out: &mut W) -> Result<()> {
    #[derive(serde::Serialize)]
    struct HarmonicRow {
        f_normalized: i64,
        amplitude: f64,
        count: u64,
    }
    #[derive(serde::Serialize)]
    struct SpectrumDoc {
        n: u32,
        f0_hz: f64,
        includes_empty_set_at_dc: bool,
        harmonics: Vec<HarmonicRow>,
    }
    let doc = SpectrumDoc {
        n: spectrum.n(),
        f0_hz,
        includes_empty_set_at_dc: spectrum.includes_empty_set_at_dc(),
        harmonics: spectrum
            .harmonics()
            .map(|h| HarmonicRow {
                f_normalized: h.f,
                amplitude: h.amplitude,
                count: h.count,
            })
            .collect(),
    };
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)?;
    Ok(())
}
