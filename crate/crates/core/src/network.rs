//! The memprocessor cascade and its collective state.
//!
//! Each memprocessor multiplies a running complex signal, carried on two real
//! rails (the "up" and "down" terminals), by the factor
//! `0.5 * (1 + exp(i*w*t))`. Chaining n of them from the constant input
//! (1, 0) produces the collective state
//!
//! ```text
//! g(t) = 2^-n * prod_j (1 + exp(i*w_j*t))
//! ```
//!
//! whose spectrum holds every subset sum of the encoded set at once.
//!
//! Two evaluation paths exist on purpose: the analytic factor product is the
//! ground truth, the sampled cascade mirrors the hardware signal path
//! (four multiplications, one sum, one difference per module, and a literal
//! terminal swap for negative elements). Tests cross-check them.
//!
//! Sample grids are uniform over one period with time handled as the index
//! `k mod N`, so phases are computed from exact integer residues and never
//! drift, no matter how large the band is.

use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::problem::{FrequencyAssignment, SubsetSumInstance, Tone};
use crate::spectrum;

/// In-phase and quadrature components of one memprocessor's drive on an
/// N-sample grid: `v[k] = 0.5*(1 + cos(2*pi*m*k/N))`, `q[k] = 0.5*sin(...)`.
///
/// The phase argument is reduced as an integer residue `(m*k) mod N` before
/// any floating-point work.
pub(crate) fn quadrature_components(magnitude: u64, n_samples: usize) -> Vec<(f64, f64)> {
    let n = n_samples as u128;
    let m = magnitude as u128 % n;
    (0..n_samples)
        .map(|k| {
            let p = (m * k as u128 % n) as f64;
            let (sin, cos) = (TAU * p / n_samples as f64).sin_cos();
            (0.5 * (1.0 + cos), 0.5 * sin)
        })
        .collect()
}

/// The complex factor a memprocessor applies to the running signal, sampled
/// on an N-point grid. Terminal-swapped (negated) modules act as the
/// conjugate factor.
pub(crate) fn factor_samples(tone: &Tone, n_samples: usize) -> Vec<Complex64> {
    quadrature_components(tone.magnitude, n_samples)
        .into_iter()
        .map(|(v, q)| Complex64::new(v, if tone.negated { -q } else { q }))
        .collect()
}

/// Runs one memprocessor over a sampled input signal.
///
/// The module multiplies the running complex signal by `0.5*(1 + exp(i*w*t))`
/// using the hardware decomposition: with `v = 0.5*(1+cos(w*t))` and
/// `q = 0.5*sin(w*t)`,
///
/// ```text
/// out_re = v*in_re - q*in_im
/// out_im = v*in_im + q*in_re
/// ```
///
/// For a negated tone the real and imaginary rails are swapped at both the
/// input and the output, which is how the hardware realizes a negative
/// frequency; algebraically this conjugates the factor.
pub fn memprocessor_step(
    in_real: &[f64],
    in_imag: &[f64],
    tone: &Tone,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = in_real.len();
    if in_imag.len() != n {
        return Err(Error::GridMismatch {
            left: n,
            right: in_imag.len(),
        });
    }
    if n == 0 {
        return Err(Error::EmptyGrid);
    }
    let components = quadrature_components(tone.magnitude, n);
    let (a_in, b_in) = if tone.negated {
        (in_imag, in_real)
    } else {
        (in_real, in_imag)
    };
    let mut a_out = vec![0.0; n];
    let mut b_out = vec![0.0; n];
    for k in 0..n {
        let (v, q) = components[k];
        a_out[k] = v * a_in[k] - q * b_in[k];
        b_out[k] = v * b_in[k] + q * a_in[k];
    }
    if tone.negated {
        Ok((b_out, a_out))
    } else {
        Ok((a_out, b_out))
    }
}

/// Evaluates the collective state at time `t` (seconds) by sequential factor
/// multiplication, exactly as the cascade orders it.
pub fn collective_state_analytic(assignment: &FrequencyAssignment, t: f64) -> Complex64 {
    let f0 = assignment.f0_hz();
    let mut g = Complex64::new(1.0, 0.0);
    for tone in assignment.tones() {
        let omega_t = TAU * tone.signed() as f64 * f0 * t;
        g *= 0.5 * (Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, omega_t));
    }
    g
}

/// The collective state of one memprocessor network: the frequency
/// assignment it realizes plus, optionally, a uniform complex sample buffer
/// over one period.
#[derive(Debug, Clone)]
pub struct CollectiveState {
    assignment: FrequencyAssignment,
    samples: Option<Vec<Complex64>>,
}

impl CollectiveState {
    /// Closed-form state; carries no sample buffer.
    pub fn analytic(assignment: FrequencyAssignment) -> Self {
        Self {
            assignment,
            samples: None,
        }
    }

    pub(crate) fn from_samples(assignment: FrequencyAssignment, samples: Vec<Complex64>) -> Self {
        Self {
            assignment,
            samples: Some(samples),
        }
    }

    pub fn assignment(&self) -> &FrequencyAssignment {
        &self.assignment
    }

    pub fn n(&self) -> usize {
        self.assignment.n()
    }

    pub fn samples(&self) -> Option<&[Complex64]> {
        self.samples.as_deref()
    }

    pub fn sample_count(&self) -> Option<usize> {
        self.samples.as_ref().map(Vec::len)
    }

    /// True when the buffer meets the exact-spectrum rate `2A+1` for the
    /// band `[-A, A]`.
    pub fn is_nyquist_exact(&self) -> bool {
        let required = 2 * self.assignment.capacity() + 1;
        match self.sample_count() {
            Some(n) => n as u64 >= required,
            None => false,
        }
    }

    /// Analytic evaluation at time `t` in seconds.
    pub fn evaluate(&self, t: f64) -> Complex64 {
        collective_state_analytic(&self.assignment, t)
    }
}

/// Samples `g(k*T/N)` for `k = 0..N-1` by running the memprocessor cascade on
/// the discrete grid. Undersampled buffers are allowed here; the spectrum
/// module refuses them.
pub fn sample_collective_state(
    assignment: &FrequencyAssignment,
    sample_count: usize,
) -> Result<CollectiveState> {
    if sample_count == 0 {
        return Err(Error::EmptyGrid);
    }
    let mut re = vec![1.0; sample_count];
    let mut im = vec![0.0; sample_count];
    for tone in assignment.tones() {
        let (next_re, next_im) = memprocessor_step(&re, &im, tone)?;
        re = next_re;
        im = next_im;
    }
    let samples = re
        .into_iter()
        .zip(im)
        .map(|(r, i)| Complex64::new(r, i))
        .collect();
    Ok(CollectiveState::from_samples(assignment.clone(), samples))
}

/// Kahan-compensated sum; keeps aggregation independent of length at the
/// 1e-12 level the invariants demand.
pub(crate) fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for x in values {
        let y = x - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Energy of the collective state over one period, `E = integral |g|^2 dt`.
///
/// Sampled states use the discrete mean `(T/N) * sum |g_k|^2`, which is the
/// exact integral for band-limited periodic signals at or above the exact
/// rate. Analytic states integrate through the exact spectrum instead
/// (Parseval). Always `E <= T`.
pub fn signal_energy(state: &CollectiveState) -> Result<f64> {
    let period = state.assignment().period_s();
    match state.samples() {
        Some(samples) => {
            let sum = compensated_sum(samples.iter().map(|g| g.norm_sqr()));
            Ok(period * sum / samples.len() as f64)
        }
        None => {
            let elements: Vec<i64> = state
                .assignment()
                .tones()
                .iter()
                .map(Tone::signed)
                .collect();
            let instance = SubsetSumInstance::new(elements)?;
            let spec = spectrum::exact_spectrum(&instance)?;
            let sum = compensated_sum(spec.harmonics().map(|h| h.amplitude * h.amplitude));
            Ok(period * sum)
        }
    }
}

/// Writes a sampled state as CSV with columns `t_seconds,re_g,im_g`, one row
/// per sample. Floats are shortest-roundtrip formatted so files are
/// byte-stable across runs.
pub fn write_waveform_csv<W: Write>(state: &CollectiveState, out: &mut W) -> Result<()> {
    let samples = state.samples().ok_or(Error::NotSampled)?;
    let period = state.assignment().period_s();
    let n = samples.len();
    writeln!(out, "t_seconds,re_g,im_g")?;
    for (k, g) in samples.iter().enumerate() {
        writeln!(out, "{},{},{}", k as f64 * period / n as f64, g.re, g.im)?;
    }
    Ok(())
}
