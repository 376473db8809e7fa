//! Per-memprocessor noise injection, the first-order decomposition of the
//! noisy cascade, signal-to-noise measurement against the `1/(n*var)`
//! scaling law, and the Shannon-Hartley capacity bound.
//!
//! The noise model: each memprocessor's complex drive becomes
//! `0.5*(1 + exp(i*w_j*t)) + eps_j(t)` with independent realizations per
//! module, and the cascade propagates the full product including all cross
//! terms. "White" means i.i.d. complex Gaussian per sample with per-sample
//! power `E[|eps|^2]` equal to the spec variance — band-limited white noise
//! on the simulation grid, since true continuous white noise has infinite
//! power. Terminal-swapped modules conjugate their injected noise along with
//! the drive, mirroring the rail swap.

use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::{compensated_sum, factor_samples, CollectiveState};
use crate::problem::{capacity, encode, FrequencyAssignment, MachineConfig, SubsetSumInstance};
use crate::spectrum::{dft_bin, exact_spectrum};

/// Shape of the injected noise.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseKind {
    /// Flat spectrum: i.i.d. complex Gaussian samples.
    WhiteGaussian,
    /// Power spectral density proportional to `1/max(|f|, 1)` on the
    /// normalized harmonic grid; the cutoff at one harmonic spacing avoids
    /// the divergence at DC.
    OneOverF,
    /// Tabulated one-sided power spectral density over normalized frequency
    /// `|f| = 0, 1, 2, ...`; frequencies beyond the table reuse its last
    /// entry.
    CustomPsd(Vec<f64>),
}

/// Reproducible description of the injected noise. Identical spec and grid
/// always produce the identical realization.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    /// Per-sample noise power `E[|eps|^2]` in volt^2.
    pub variance: f64,
    /// RNG seed; runs derive independent streams from it.
    pub seed: u64,
}

impl NoiseSpec {
    pub fn white(variance: f64, seed: u64) -> Self {
        Self {
            kind: NoiseKind::WhiteGaussian,
            variance,
            seed,
        }
    }

    pub fn one_over_f(variance: f64, seed: u64) -> Self {
        Self {
            kind: NoiseKind::OneOverF,
            variance,
            seed,
        }
    }

    pub fn custom_psd(psd: Vec<f64>, variance: f64, seed: u64) -> Self {
        Self {
            kind: NoiseKind::CustomPsd(psd),
            variance,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.variance < 0.0 || self.variance.is_nan() {
            return Err(Error::NegativeVariance {
                value: self.variance,
            });
        }
        if let NoiseKind::CustomPsd(psd) = &self.kind {
            for (f, &p) in psd.iter().enumerate() {
                if p < 0.0 || p.is_nan() {
                    return Err(Error::NonPositivePsd {
                        value: p,
                        freq_hz: f as f64,
                    });
                }
            }
            // a table with no positive entry has nowhere to put the power
            if !psd.iter().any(|&p| p > 0.0) {
                return Err(Error::NonPositivePsd {
                    value: 0.0,
                    freq_hz: 0.0,
                });
            }
        }
        Ok(())
    }

    /// Draws the per-memprocessor noise buffers for one Monte-Carlo run.
    /// Memprocessors and runs get disjoint RNG streams, so realizations are
    /// independent across both and reproducible from (seed, run_index).
    pub fn realize(
        &self,
        n_memprocessors: usize,
        n_samples: usize,
        run_index: u64,
    ) -> Result<NoiseRealization> {
        self.validate()?;
        if n_samples == 0 {
            return Err(Error::EmptyGrid);
        }
        let per_memprocessor = (0..n_memprocessors)
            .map(|j| {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream((run_index << 32) | j as u64);
                self.draw(&mut rng, n_samples)
            })
            .collect();
        Ok(NoiseRealization { per_memprocessor })
    }

    fn draw(&self, rng: &mut ChaCha8Rng, n_samples: usize) -> Vec<Complex64> {
        if self.variance == 0.0 {
            return vec![Complex64::new(0.0, 0.0); n_samples];
        }
        match &self.kind {
            NoiseKind::WhiteGaussian => {
                let component = Normal::new(0.0, (self.variance / 2.0).sqrt()).unwrap();
                (0..n_samples)
                    .map(|_| Complex64::new(component.sample(rng), component.sample(rng)))
                    .collect()
            }
            NoiseKind::OneOverF => {
                self.shaped(rng, n_samples, |f| 1.0 / (f.unsigned_abs().max(1)) as f64)
            }
            NoiseKind::CustomPsd(psd) => self.shaped(rng, n_samples, |f| {
                let idx = (f.unsigned_abs() as usize).min(psd.len() - 1);
                psd[idx]
            }),
        }
    }

    /// Colored noise by frequency-domain shaping: independent complex
    /// Gaussians per DFT bin, weighted by the PSD shape and rescaled so the
    /// per-sample power is exactly `variance`, then synthesized in time.
    fn shaped(
        &self,
        rng: &mut ChaCha8Rng,
        n_samples: usize,
        shape: impl Fn(i64) -> f64,
    ) -> Vec<Complex64> {
        let n = n_samples as i64;
        let weights: Vec<f64> = (0..n)
            .map(|m| {
                let f = if m > n / 2 { m - n } else { m };
                shape(f)
            })
            .collect();
        let total: f64 = weights.iter().sum();
        let component = Normal::new(0.0, 1.0_f64).unwrap();
        let bins: Vec<Complex64> = weights
            .iter()
            .map(|&w| {
                let sigma = (self.variance * w / total / 2.0).sqrt();
                Complex64::new(sigma * component.sample(rng), sigma * component.sample(rng))
            })
            .collect();
        // direct synthesis keeps the phase grid exact
        let tau = std::f64::consts::TAU;
        (0..n_samples)
            .map(|k| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (m, c) in bins.iter().enumerate() {
                    let p = (m * k % n_samples) as f64;
                    acc += c * Complex64::from_polar(1.0, tau * p / n_samples as f64);
                }
                acc
            })
            .collect()
    }
}

/// One draw of every memprocessor's noise buffer on a common grid.
#[derive(Debug, Clone)]
pub struct NoiseRealization {
    pub per_memprocessor: Vec<Vec<Complex64>>,
}

impl NoiseRealization {
    pub fn n_memprocessors(&self) -> usize {
        self.per_memprocessor.len()
    }

    pub fn n_samples(&self) -> usize {
        self.per_memprocessor.first().map_or(0, Vec::len)
    }

    fn check_shape(&self, assignment: &FrequencyAssignment) -> Result<usize> {
        if self.n_memprocessors() != assignment.n() {
            return Err(Error::GridMismatch {
                left: self.n_memprocessors(),
                right: assignment.n(),
            });
        }
        let n_samples = self.n_samples();
        for buf in &self.per_memprocessor {
            if buf.len() != n_samples {
                return Err(Error::GridMismatch {
                    left: buf.len(),
                    right: n_samples,
                });
            }
        }
        if n_samples == 0 {
            return Err(Error::EmptyGrid);
        }
        Ok(n_samples)
    }

    /// Noise as seen by module `j`: terminal-swapped modules conjugate it.
    fn effective(&self, assignment: &FrequencyAssignment, j: usize, k: usize) -> Complex64 {
        let eps = self.per_memprocessor[j][k];
        if assignment.tones()[j].negated {
            eps.conj()
        } else {
            eps
        }
    }
}

/// Runs the cascade with each module's drive perturbed by its own noise
/// buffer; the full product with all cross terms is propagated. Requires at
/// least the exact rate `2A+1` so downstream analysis stays alias-free.
pub fn noisy_cascade(
    instance: &SubsetSumInstance,
    config: &MachineConfig,
    spec: &NoiseSpec,
    sample_count: usize,
) -> Result<CollectiveState> {
    let assignment = encode(instance, config);
    let required = (2 * capacity(instance) + 1) as usize;
    if sample_count < required {
        return Err(Error::Aliasing {
            required,
            actual: sample_count,
        });
    }
    let realization = spec.realize(assignment.n(), sample_count, 0)?;
    noisy_cascade_with(&assignment, &realization)
}

/// [`noisy_cascade`] against an explicit realization (for Monte-Carlo runs
/// that must share noise buffers with other analyses).
pub fn noisy_cascade_with(
    assignment: &FrequencyAssignment,
    realization: &NoiseRealization,
) -> Result<CollectiveState> {
    let n_samples = realization.check_shape(assignment)?;
    let mut running = vec![Complex64::new(1.0, 0.0); n_samples];
    for (j, tone) in assignment.tones().iter().enumerate() {
        let factor = factor_samples(tone, n_samples);
        for (k, f) in factor.into_iter().enumerate() {
            let noisy = f + realization.effective(assignment, j, k);
            running[k] = noisy * running[k];
        }
    }
    Ok(CollectiveState::from_samples(assignment.clone(), running))
}

/// The first-order split of the noisy collective state: the clean signal
/// term `g_S = 2^-n * prod_j (1 + e^(i*w_j*t))` and the linear noise term
/// `g_N = 2^(-n+1) * sum_k eps_k * prod_{j != k} (1 + e^(i*w_j*t))`,
/// returned separately so the approximation can be validated against the
/// full product.
pub fn lownoise_decomposition(
    assignment: &FrequencyAssignment,
    realization: &NoiseRealization,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let n_samples = realization.check_shape(assignment)?;
    let n = assignment.n();
    let factors: Vec<Vec<Complex64>> = assignment
        .tones()
        .iter()
        .map(|tone| factor_samples(tone, n_samples))
        .collect();

    let mut g_signal = Vec::with_capacity(n_samples);
    let mut g_noise = Vec::with_capacity(n_samples);
    let mut prefix = vec![Complex64::new(1.0, 0.0); n + 1];
    let mut suffix = vec![Complex64::new(1.0, 0.0); n + 1];
    for k in 0..n_samples {
        // prefix[j] = prod_{m<j} F_m[k], suffix[j] = prod_{m>=j} F_m[k]
        prefix[0] = Complex64::new(1.0, 0.0);
        for (j, factor) in factors.iter().enumerate() {
            prefix[j + 1] = prefix[j] * factor[k];
        }
        suffix[n] = Complex64::new(1.0, 0.0);
        for (j, factor) in factors.iter().enumerate().rev() {
            suffix[j] = factor[k] * suffix[j + 1];
        }
        let mut linear = Complex64::new(0.0, 0.0);
        for j in 0..n {
            linear += realization.effective(assignment, j, k) * prefix[j] * suffix[j + 1];
        }
        g_signal.push(prefix[n]);
        g_noise.push(linear);
    }
    Ok((g_signal, g_noise))
}

/// The scaling-law prediction `S/N = 1/(n * E[|eps|^2])`. Zero variance is
/// the distinguished infinite-SNR case, reported as `None` rather than a
/// number.
pub fn snr_predicted(n: usize, variance: f64) -> Result<Option<f64>> {
    if variance < 0.0 || variance.is_nan() {
        return Err(Error::NegativeVariance { value: variance });
    }
    if variance == 0.0 {
        return Ok(None);
    }
    Ok(Some(1.0 / (n as f64 * variance)))
}

/// Measured signal-to-noise ratios for one instance under one noise spec.
#[derive(Debug, Clone, Serialize)]
pub struct SnrReport {
    pub n: usize,
    /// The `1/(n*var)` prediction; `None` means infinite (zero variance).
    pub predicted_snr: Option<f64>,
    /// Signal power over mean residual power, whole band.
    pub measured_total_snr: f64,
    /// Per-harmonic SNR on every harmonic with a nonzero exact amplitude.
    pub per_harmonic_snr: BTreeMap<i64, f64>,
    pub runs: usize,
}

/// Monte-Carlo SNR measurement: signal power is `(T/N)*sum |g_S|^2`, noise
/// power is the mean over runs of `(T/N)*sum |g_noisy - g_S|^2`, and the
/// per-harmonic map compares DFT bin energies of signal versus residue.
pub fn snr_measured(
    instance: &SubsetSumInstance,
    config: &MachineConfig,
    spec: &NoiseSpec,
    runs: usize,
) -> Result<SnrReport> {
    if runs == 0 {
        return Err(Error::ZeroRuns);
    }
    let assignment = encode(instance, config);
    let n_samples = (2 * capacity(instance) + 1) as usize;
    let n = assignment.n();

    let silent = spec.realize(n, n_samples, 0).map(|mut r| {
        for buf in &mut r.per_memprocessor {
            buf.fill(Complex64::new(0.0, 0.0));
        }
        r
    })?;
    let (g_signal, _) = lownoise_decomposition(&assignment, &silent)?;
    let signal_power = compensated_sum(g_signal.iter().map(|g| g.norm_sqr())) / n_samples as f64;

    let exact = exact_spectrum(instance)?;
    let in_band: Vec<i64> = exact
        .harmonics()
        .filter(|h| h.count > 0)
        .map(|h| h.f)
        .collect();
    let harmonic_signal: Vec<f64> = in_band
        .iter()
        .map(|&f| exact.amplitude(f) * exact.amplitude(f))
        .collect();

    let mut run_powers = Vec::with_capacity(runs);
    let mut harmonic_noise = vec![0.0f64; in_band.len()];
    let mut residual = vec![Complex64::new(0.0, 0.0); n_samples];
    for run in 0..runs {
        let realization = spec.realize(n, n_samples, run as u64)?;
        let noisy = noisy_cascade_with(&assignment, &realization)?;
        let samples = noisy.samples().expect("sampled by construction");
        for k in 0..n_samples {
            residual[k] = samples[k] - g_signal[k];
        }
        run_powers.push(compensated_sum(residual.iter().map(|r| r.norm_sqr())) / n_samples as f64);
        for (i, &f) in in_band.iter().enumerate() {
            harmonic_noise[i] += dft_bin(&residual, f).norm_sqr();
        }
    }
    let noise_power = compensated_sum(run_powers.into_iter()) / runs as f64;

    let per_harmonic_snr = in_band
        .iter()
        .zip(harmonic_signal.iter().zip(&harmonic_noise))
        .map(|(&f, (&sig, &noise))| (f, sig / (noise / runs as f64)))
        .collect();

    Ok(SnrReport {
        n,
        predicted_snr: snr_predicted(n, spec.variance)?,
        measured_total_snr: signal_power / noise_power,
        per_harmonic_snr,
        runs,
    })
}

/// Numeric Shannon-Hartley capacity of the machine viewed as a noisy
/// channel.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CapacityReport {
    /// Trapezoid value of `integral_0^B log2(1 + 1/(n*psd(f))) df`.
    pub bits_per_second: f64,
    /// The flat-noise large-n limit `B0 / (E_mean * ln 2)` with `E_mean` the
    /// harmonic mean of the PSD over the band, for comparison.
    pub flat_limit_bits_per_second: f64,
    /// Channel bandwidth `B = B0 * n` in hertz.
    pub bandwidth_hz: f64,
    pub panels: usize,
}

/// Integrates the capacity bound over the band `B = B0 * n` with a composite
/// trapezoid rule of at least 1000 panels. The PSD must be positive
/// (infinite is allowed: those frequencies simply carry nothing).
pub fn channel_capacity(
    b0_hz: f64,
    n: usize,
    psd: impl Fn(f64) -> f64,
    panels: usize,
) -> Result<CapacityReport> {
    if b0_hz <= 0.0 || b0_hz.is_nan() {
        return Err(Error::NonPositiveBandwidth { value: b0_hz });
    }
    if n == 0 {
        return Err(Error::NonPositiveConfig {
            field: "n",
            value: 0.0,
        });
    }
    let panels = panels.max(1000);
    let bandwidth = b0_hz * n as f64;
    let step = bandwidth / panels as f64;

    let node = |f: f64| -> Result<(f64, f64)> {
        let e = psd(f);
        if e <= 0.0 || e.is_nan() {
            return Err(Error::NonPositivePsd {
                value: e,
                freq_hz: f,
            });
        }
        Ok(((1.0 + (n as f64 * e).recip()).log2(), e.recip()))
    };

    let mut cap_terms = Vec::with_capacity(panels + 1);
    let mut inv_terms = Vec::with_capacity(panels + 1);
    for i in 0..=panels {
        let f = i as f64 / panels as f64 * bandwidth;
        let (cap, inv) = node(f)?;
        let weight = if i == 0 || i == panels { 0.5 } else { 1.0 };
        cap_terms.push(weight * cap);
        inv_terms.push(weight * inv);
    }
    let bits_per_second = step * compensated_sum(cap_terms.into_iter());
    let inv_mean = step * compensated_sum(inv_terms.into_iter()) / bandwidth;
    let flat_limit_bits_per_second = b0_hz * inv_mean / std::f64::consts::LN_2;

    Ok(CapacityReport {
        bits_per_second,
        flat_limit_bits_per_second,
        bandwidth_hz: bandwidth,
        panels,
    })
}

/// One row of a noise sweep: predicted versus measured SNR at a given size
/// and variance.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub variance: f64,
    pub snr_predicted: f64,
    pub snr_measured: f64,
    pub runs: usize,
}

/// CSV export: `n,variance,snr_predicted,snr_measured,runs`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: &mut W) -> Result<()> {
    writeln!(out, "n,variance,snr_predicted,snr_measured,runs")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            row.n, row.variance, row.snr_predicted, row.snr_measured, row.runs
        )?;
    }
    Ok(())
}

/// JSON export of a full report including the per-harmonic map.
pub fn write_snr_report_json<W: Write>(report: &SnrReport, out: &mut W) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, report)?;
    writeln!(out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::sample_collective_state;
    use approx::assert_abs_diff_eq;

    fn table_set() -> SubsetSumInstance {
        SubsetSumInstance::new(vec![130, -130, -146, -166, -44, 118]).unwrap()
    }

    fn bench100() -> MachineConfig {
        MachineConfig::bench(100.0)
    }

    #[test]
    fn zero_variance_is_bitwise_noiseless() {
        let instance = table_set();
        let config = bench100();
        let spec = NoiseSpec::white(0.0, 1234);
        let noisy = noisy_cascade(&instance, &config, &spec, 973).unwrap();
        let clean = sample_collective_state(&encode(&instance, &config), 973).unwrap();
        for (a, b) in noisy
            .samples()
            .unwrap()
            .iter()
            .zip(clean.samples().unwrap())
        {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn fixed_seed_reproduces_buffers() {
        let instance = table_set();
        let spec = NoiseSpec::white(1e-4, 77);
        let a = noisy_cascade(&instance, &bench100(), &spec, 973).unwrap();
        let b = noisy_cascade(&instance, &bench100(), &spec, 973).unwrap();
        assert_eq!(a.samples().unwrap(), b.samples().unwrap());
    }

    #[test]
    fn runs_and_memprocessors_get_distinct_streams() {
        let spec = NoiseSpec::white(1.0, 9);
        let r0 = spec.realize(3, 64, 0).unwrap();
        let r1 = spec.realize(3, 64, 1).unwrap();
        assert_ne!(r0.per_memprocessor[0], r1.per_memprocessor[0]);
        assert_ne!(r0.per_memprocessor[0], r0.per_memprocessor[1]);
    }

    #[test]
    fn realizations_are_uncorrelated() {
        // cross-correlation below 5/sqrt(N) for independent streams
        let n_samples = 4096;
        let spec = NoiseSpec::white(1.0, 31);
        let r = spec.realize(4, n_samples, 0).unwrap();
        for i in 0..4 {
            for j in (i + 1)..4 {
                let dot: Complex64 = r.per_memprocessor[i]
                    .iter()
                    .zip(&r.per_memprocessor[j])
                    .map(|(a, b)| a * b.conj())
                    .sum();
                let correlation = dot.norm() / n_samples as f64;
                assert!(
                    correlation < 5.0 / (n_samples as f64).sqrt(),
                    "memprocessors {i},{j}: {correlation}"
                );
            }
        }
    }

    #[test]
    fn white_noise_power_matches_variance() {
        let n_samples = 8192;
        let variance = 3e-3;
        let r = NoiseSpec::white(variance, 5)
            .realize(1, n_samples, 0)
            .unwrap();
        let power = r.per_memprocessor[0]
            .iter()
            .map(|e| e.norm_sqr())
            .sum::<f64>()
            / n_samples as f64;
        assert!((power / variance - 1.0).abs() < 0.1, "power {power}");
    }

    #[test]
    fn one_over_f_noise_power_matches_variance_and_slopes_down() {
        let n_samples = 513;
        let variance = 1e-2;
        let spec = NoiseSpec::one_over_f(variance, 11);
        let mut low = 0.0;
        let mut high = 0.0;
        let runs = 40;
        let mut power = 0.0;
        for run in 0..runs {
            let r = spec.realize(1, n_samples, run).unwrap();
            let buf = &r.per_memprocessor[0];
            power += buf.iter().map(|e| e.norm_sqr()).sum::<f64>() / n_samples as f64;
            low += dft_bin(buf, 1).norm_sqr();
            high += dft_bin(buf, 200).norm_sqr();
        }
        power /= runs as f64;
        assert!((power / variance - 1.0).abs() < 0.15, "power {power}");
        assert!(low > 10.0 * high, "low {low} vs high {high}");
    }

    #[test]
    fn decomposition_zero_noise_has_no_linear_term() {
        let assignment = encode(&table_set(), &bench100());
        let silent = NoiseSpec::white(0.0, 1).realize(6, 973, 0).unwrap();
        let (g_signal, g_noise) = lownoise_decomposition(&assignment, &silent).unwrap();
        assert!(g_noise.iter().all(|z| z.norm() == 0.0));
        let clean = sample_collective_state(&assignment, 973).unwrap();
        for (a, b) in g_signal.iter().zip(clean.samples().unwrap()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn single_module_linear_term_is_the_noise_itself() {
        let instance = SubsetSumInstance::new(vec![3]).unwrap();
        let assignment = encode(&instance, &bench100());
        let realization = NoiseSpec::white(1e-2, 8).realize(1, 7, 0).unwrap();
        let (_, g_noise) = lownoise_decomposition(&assignment, &realization).unwrap();
        for (a, b) in g_noise.iter().zip(&realization.per_memprocessor[0]) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn linearization_error_is_second_order() {
        // residual of the first-order split shrinks like the variance itself
        let instance = SubsetSumInstance::new(vec![3, -4]).unwrap();
        let assignment = encode(&instance, &bench100());
        let n_samples = 15;
        let mut norms = Vec::new();
        for &variance in &[1e-2, 1e-4] {
            let spec = NoiseSpec::white(variance, 21);
            let realization = spec.realize(2, n_samples, 0).unwrap();
            let noisy = noisy_cascade_with(&assignment, &realization).unwrap();
            let (g_signal, g_noise) = lownoise_decomposition(&assignment, &realization).unwrap();
            let residual: f64 = noisy
                .samples()
                .unwrap()
                .iter()
                .enumerate()
                .map(|(k, g)| (g - g_signal[k] - g_noise[k]).norm_sqr())
                .sum::<f64>()
                .sqrt();
            norms.push(residual);
        }
        // variance dropped 100x; the residual norm must drop ~100x too
        let ratio = norms[0] / norms[1];
        assert!(
            (20.0..500.0).contains(&ratio),
            "residual ratio {ratio}, norms {norms:?}"
        );
    }

    #[test]
    fn relative_linearization_error_small_at_low_noise() {
        let assignment = encode(&table_set(), &bench100());
        let realization = NoiseSpec::white(1e-6, 3).realize(6, 973, 0).unwrap();
        let noisy = noisy_cascade_with(&assignment, &realization).unwrap();
        let (g_signal, g_noise) = lownoise_decomposition(&assignment, &realization).unwrap();
        let mut err = 0.0f64;
        let mut noise_norm = 0.0f64;
        for (k, g) in noisy.samples().unwrap().iter().enumerate() {
            err += (g - g_signal[k] - g_noise[k]).norm_sqr();
            noise_norm += g_noise[k].norm_sqr();
        }
        assert!(
            err.sqrt() / noise_norm.sqrt() < 1e-2,
            "relative error {}",
            err.sqrt() / noise_norm.sqrt()
        );
    }

    #[test]
    fn predicted_snr_values() {
        assert_abs_diff_eq!(
            snr_predicted(6, 1e-4).unwrap().unwrap(),
            1_666.666_666_666_666_7,
            epsilon = 1e-9
        );
        assert_eq!(snr_predicted(1, 1.0).unwrap(), Some(1.0));
        assert_eq!(snr_predicted(4, 0.0).unwrap(), None);
        let single = snr_predicted(3, 2e-3).unwrap().unwrap();
        let doubled = snr_predicted(6, 2e-3).unwrap().unwrap();
        assert_abs_diff_eq!(doubled, single / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn negative_variance_rejected() {
        assert!(matches!(
            snr_predicted(2, -1.0),
            Err(Error::NegativeVariance { .. })
        ));
        assert!(NoiseSpec::white(-1.0, 0).validate().is_err());
    }

    #[test]
    fn measured_snr_tracks_prediction_within_factor_three() {
        let report =
            snr_measured(&table_set(), &bench100(), &NoiseSpec::white(1e-4, 17), 100).unwrap();
        let predicted = report.predicted_snr.unwrap();
        let ratio = report.measured_total_snr / predicted;
        assert!(
            (1.0 / 3.0..=3.0).contains(&ratio),
            "measured {} vs predicted {predicted}",
            report.measured_total_snr
        );
        assert!(report.measured_total_snr.is_finite() && report.measured_total_snr > 0.0);
    }

    #[test]
    fn measured_snr_scales_inversely_with_variance() {
        let instance = SubsetSumInstance::alternating_odd(4).unwrap();
        let low = snr_measured(&instance, &bench100(), &NoiseSpec::white(1e-4, 23), 100).unwrap();
        let high = snr_measured(&instance, &bench100(), &NoiseSpec::white(4e-4, 23), 100).unwrap();
        let ratio = low.measured_total_snr / high.measured_total_snr;
        assert!((ratio / 4.0 - 1.0).abs() < 0.25, "ratio {ratio}");
    }

    #[test]
    fn per_harmonic_snr_spread_stays_moderate() {
        let instance = SubsetSumInstance::alternating_odd(6).unwrap();
        let report =
            snr_measured(&instance, &bench100(), &NoiseSpec::white(1e-4, 29), 100).unwrap();
        let min = report
            .per_harmonic_snr
            .values()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        let max = report
            .per_harmonic_snr
            .values()
            .cloned()
            .fold(0.0, f64::max);
        assert!(min > 0.0);
        assert!(max / min <= 1e2, "spread {}", max / min);
    }

    #[test]
    fn capacity_flat_unit_psd_approaches_inverse_ln2() {
        let report = channel_capacity(1.0, 1000, |_| 1.0, 1000).unwrap();
        let limit = 1.0 / std::f64::consts::LN_2;
        assert!(
            (report.bits_per_second / limit - 1.0).abs() < 0.01,
            "numeric {} vs limit {limit}",
            report.bits_per_second
        );
        assert_abs_diff_eq!(report.flat_limit_bits_per_second, limit, epsilon = 1e-9);
    }

    #[test]
    fn capacity_halves_when_psd_doubles() {
        let a = channel_capacity(1.0, 1000, |_| 1.0, 2000).unwrap();
        let b = channel_capacity(1.0, 1000, |_| 2.0, 2000).unwrap();
        assert!((a.flat_limit_bits_per_second / b.flat_limit_bits_per_second - 2.0).abs() < 1e-9);
        assert!((a.bits_per_second / b.bits_per_second - 2.0).abs() < 2e-3);
    }

    #[test]
    fn capacity_rejects_nonpositive_psd() {
        assert!(matches!(
            channel_capacity(1.0, 10, |_| 0.0, 1000),
            Err(Error::NonPositivePsd { .. })
        ));
        assert!(matches!(
            channel_capacity(0.0, 10, |_| 1.0, 1000),
            Err(Error::NonPositiveBandwidth { .. })
        ));
    }

    #[test]
    fn readout_robust_under_weak_noise() {
        // counts survive variance 1e-6 on the bench set for >= 95 of 100 seeds
        let instance = table_set();
        let config = bench100();
        let table = crate::oracle::full_count_table(&instance).unwrap();
        let targets = [0i64, 74, 130, 146, 248, 485, 486];
        let rate = (2 * (486 + 486) + 1) as usize;
        let assignment = encode(&instance, &config);
        let mut good = 0;
        for seed in 0..100u64 {
            let spec = NoiseSpec::white(1e-6, seed);
            let realization = spec.realize(6, rate, 0).unwrap();
            let state = noisy_cascade_with(&assignment, &realization).unwrap();
            let all_match = targets.iter().all(|&s| {
                let r = crate::readout::read_pair_from_state(&state, s).unwrap();
                r.count_s == table.count(s) && r.count_minus_s == table.count(-s)
            });
            if all_match {
                good += 1;
            }
        }
        assert!(good >= 95, "only {good} of 100 seeds recovered all counts");
    }

    #[test]
    fn zero_runs_rejected() {
        assert!(matches!(
            snr_measured(&table_set(), &bench100(), &NoiseSpec::white(1e-4, 1), 0),
            Err(Error::ZeroRuns)
        ));
    }

    #[test]
    fn sweep_csv_shape() {
        let rows = [SweepRow {
            n: 6,
            variance: 1e-4,
            snr_predicted: 1666.0,
            snr_measured: 800.0,
            runs: 100,
        }];
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "n,variance,snr_predicted,snr_measured,runs\n6,0.0001,1666,800,100\n"
        );
    }

    #[test]
    fn snr_report_json_carries_per_harmonic_map() {
        let instance = SubsetSumInstance::alternating_odd(2).unwrap();
        let report = snr_measured(&instance, &bench100(), &NoiseSpec::white(1e-3, 3), 10).unwrap();
        let mut buf = Vec::new();
        write_snr_report_json(&report, &mut buf).unwrap();
        let doc: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(doc["n"], 2);
        assert_eq!(doc["runs"], 10);
        assert!(doc["per_harmonic_snr"]["0"].as_f64().unwrap() > 0.0);
        assert!(doc["per_harmonic_snr"]["-3"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn custom_psd_concentrates_power_where_told() {
        // all weight on |f| >= 2: DC and |f| = 1 bins stay empty
        let psd = vec![0.0, 0.0, 1.0];
        let spec = NoiseSpec::custom_psd(psd, 1e-2, 13);
        let n_samples = 257;
        let mut power = 0.0;
        let mut blocked = 0.0;
        let mut open = 0.0;
        let runs = 30;
        for run in 0..runs {
            let r = spec.realize(1, n_samples, run).unwrap();
            let buf = &r.per_memprocessor[0];
            power += buf.iter().map(|e| e.norm_sqr()).sum::<f64>() / n_samples as f64;
            blocked += dft_bin(buf, 0).norm_sqr() + dft_bin(buf, 1).norm_sqr();
            open += dft_bin(buf, 5).norm_sqr();
        }
        power /= runs as f64;
        assert!((power / 1e-2 - 1.0).abs() < 0.2, "power {power}");
        assert!(blocked < 1e-20 * open, "blocked {blocked} open {open}");
    }

    #[test]
    fn degenerate_psd_tables_rejected() {
        for psd in [vec![1.0, -0.5], vec![], vec![0.0, 0.0]] {
            let spec = NoiseSpec::custom_psd(psd.clone(), 1.0, 0);
            assert!(
                matches!(spec.validate(), Err(Error::NonPositivePsd { .. })),
                "psd {psd:?} accepted"
            );
            assert!(spec.realize(1, 8, 0).is_err());
        }
    }
}
