//! The read-out unit: two multipliers driven at the query frequency, DC
//! extraction over one period, and the sum/difference recovery
//!
//! ```text
//! V_s  = 2^n * (V_DC_up + V_DC_down)
//! V_-s = 2^n * (V_DC_up - V_DC_down)
//! ```
//!
//! which answers a single subset-sum query without touching the rest of the
//! spectrum. Shifting by `s` widens the band to `A + |s|`, so sampled
//! read-outs need `N >= 2*(A+|s|) + 1` points for the discrete mean to be the
//! exact integral.
//!
//! DC convention at s = 0: the raw `2^n * V_DC_up` includes the empty set, so
//! the reported count is `round(2^n * V_DC_up - 1)`, the same for +0 and -0.
//! The stored `v_s`/`v_minus_s` fields stay raw (pre-adjustment).

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::{compensated_sum, sample_collective_state, CollectiveState};
use crate::problem::{capacity, encode, MachineConfig, SubsetSumInstance};
use crate::spectrum::{exact_spectrum, Spectrum};

/// How a read-out query is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReadoutMode {
    /// Through the exact spectrum; DC values are exact integrals.
    Exact,
    /// Through the simulated signal path: cascade, multipliers, sample mean.
    Sampled,
}

/// Result of one read-out query at target sum `s`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReadoutResult {
    pub target_s: i64,
    /// DC of the up-terminal multiplier output, volts.
    pub v_dc_up: f64,
    /// DC of the down-terminal multiplier output, volts.
    pub v_dc_down: f64,
    /// `2^n * (v_dc_up + v_dc_down)`, before any s = 0 adjustment.
    pub v_s: f64,
    /// `2^n * (v_dc_up - v_dc_down)`, before any s = 0 adjustment.
    pub v_minus_s: f64,
    /// Recovered number of subsets summing to `s`.
    pub count_s: u64,
    /// Recovered number of subsets summing to `-s`.
    pub count_minus_s: u64,
    pub exists_s: bool,
    pub exists_minus_s: bool,
}

fn round_count(v: f64) -> u64 {
    v.round().max(0.0) as u64
}

fn assemble(n: usize, s: i64, v_dc_up: f64, v_dc_down: f64) -> ReadoutResult {
    let scale = (n as f64).exp2();
    let v_s = scale * (v_dc_up + v_dc_down);
    let v_minus_s = scale * (v_dc_up - v_dc_down);
    let (count_s, count_minus_s) = if s == 0 {
        // drop the empty-set contribution; +0 and -0 are the same question
        let c = round_count(scale * v_dc_up - 1.0);
        (c, c)
    } else {
        (round_count(v_s), round_count(v_minus_s))
    };
    ReadoutResult {
        target_s: s,
        v_dc_up,
        v_dc_down,
        v_s,
        v_minus_s,
        count_s,
        count_minus_s,
        exists_s: count_s >= 1,
        exists_minus_s: count_minus_s >= 1,
    }
}

/// Multiplies a sampled collective state with the shift oscillators:
/// `v_up(t) = Re[g(t)] * cos(w_s t)`, `v_down(t) = Im[g(t)] * sin(w_s t)`.
///
/// `shift_rad_per_s` must sit on the harmonic grid, `w_s = 2*pi*s*f0` for
/// integer `s`; anything else is refused. The state must carry enough
/// samples for the widened band, `N >= 2*(A+|s|) + 1`, or the later DC
/// average would alias.
pub fn frequency_shift(
    state: &CollectiveState,
    shift_rad_per_s: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let f0 = state.assignment().f0_hz();
    let s_real = shift_rad_per_s / (TAU * f0);
    let s = s_real.round();
    if (s_real - s).abs() > 1e-9 * s_real.abs().max(1.0) {
        return Err(Error::OffHarmonicShift {
            shift_hz: shift_rad_per_s / TAU,
            f0_hz: f0,
        });
    }
    frequency_shift_harmonic(state, s as i64)
}

/// Exact sampling rate for reading harmonic `s` out of a state with band
/// limit `capacity`: `2*(A+|s|) + 1`, since the shift widens the band.
pub fn widened_rate(capacity: u64, s: i64) -> Result<usize> {
    capacity
        .checked_add(s.unsigned_abs())
        .and_then(|band| band.checked_mul(2))
        .and_then(|band| band.checked_add(1))
        .and_then(|rate| usize::try_from(rate).ok())
        .ok_or(Error::CapacityOverflow)
}

/// [`frequency_shift`] with the shift given directly as the integer harmonic
/// `s`.
pub fn frequency_shift_harmonic(state: &CollectiveState, s: i64) -> Result<(Vec<f64>, Vec<f64>)> {
    let samples = state.samples().ok_or(Error::NotSampled)?;
    let n_samples = samples.len();
    let required = widened_rate(state.assignment().capacity(), s)?;
    if n_samples < required {
        return Err(Error::Aliasing {
            required,
            actual: n_samples,
        });
    }
    let residue = s.rem_euclid(n_samples as i64) as u128;
    let mut v_up = Vec::with_capacity(n_samples);
    let mut v_down = Vec::with_capacity(n_samples);
    for (k, g) in samples.iter().enumerate() {
        let p = (residue * k as u128 % n_samples as u128) as f64;
        let (sin, cos) = (TAU * p / n_samples as f64).sin_cos();
        v_up.push(g.re * cos);
        v_down.push(g.im * sin);
    }
    Ok((v_up, v_down))
}

/// Mean of one period of uniform samples; for a band-limited periodic signal
/// sampled at or above `2*band + 1` points this is the exact integral
/// `T^-1 * integral_0^T v(t) dt`.
pub fn dc_average(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    compensated_sum(samples.iter().copied()) / samples.len() as f64
}

/// Answers the subset-sum query at `s` (and `-s` for free) with the chosen
/// evaluation mode.
///
/// Out-of-band targets are legal and report zero counts; in sampled mode
/// they are still simulated end to end on the widened grid.
pub fn read_pair(
    instance: &SubsetSumInstance,
    config: &MachineConfig,
    s: i64,
    mode: ReadoutMode,
) -> Result<ReadoutResult> {
    match mode {
        ReadoutMode::Exact => {
            let spectrum = exact_spectrum(instance)?;
            Ok(read_pair_from_spectrum(&spectrum, s))
        }
        ReadoutMode::Sampled => {
            let assignment = encode(instance, config);
            let rate = widened_rate(capacity(instance), s)?;
            let state = sample_collective_state(&assignment, rate)?;
            read_pair_from_state(&state, s)
        }
    }
}

/// Read-out from an exact spectrum: the DC integrals have the closed forms
/// `V_DC_up = (c_s + c_-s)/2` and `V_DC_down = (c_s - c_-s)/2` (for s != 0),
/// with `c_f` the amplitude at harmonic `f`.
pub fn read_pair_from_spectrum(spectrum: &Spectrum, s: i64) -> ReadoutResult {
    let c_pos = spectrum.amplitude(s);
    // -i64::MIN is not representable, but it is out of band anyway
    let c_neg = s.checked_neg().map_or(0.0, |neg| spectrum.amplitude(neg));
    let (up, down) = if s == 0 {
        (c_pos, 0.0)
    } else {
        (0.5 * (c_pos + c_neg), 0.5 * (c_pos - c_neg))
    };
    assemble(spectrum.n() as usize, s, up, down)
}

/// Read-out against an already sampled state (possibly noisy). The state
/// must satisfy the widened rate for this target.
pub fn read_pair_from_state(state: &CollectiveState, s: i64) -> Result<ReadoutResult> {
    let (v_up, v_down) = frequency_shift_harmonic(state, s)?;
    Ok(assemble(
        state.n(),
        s,
        dc_average(&v_up),
        dc_average(&v_down),
    ))
}
