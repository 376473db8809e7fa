//! Simulator of an analog memprocessor network for the subset-sum problem.
//!
//! A set G of nonzero signed integers is encoded into the drive frequencies
//! of a chain of memprocessors; the chain's collective state
//! `g(t) = 2^-n * prod_j (1 + exp(i*2*pi*a_j*f0*t))` carries every subset sum
//! of G as one harmonic whose amplitude counts the subsets reaching that sum.
//! This crate builds that state (analytically and as a simulated sampled
//! cascade), recovers counts either from the full spectrum or through the
//! frequency-shift read-out unit, quantifies what additive noise does to the
//! read-out, and checks everything against exact combinatorial oracles.
//!
//! Modules:
//!
//! - [`problem`]: instances, machine configuration, frequency encoding,
//!   hardware feasibility checks
//! - [`network`]: the memprocessor cascade and its collective state
//! - [`spectrum`]: exact and DFT spectra of the collective state
//! - [`readout`]: the frequency-shift read-out unit
//! - [`noise`]: noise injection, SNR scaling, channel capacity
//! - [`oracle`]: brute-force and dynamic-programming subset counters
//! - [`cli`]: the `memssp` command-line front end
//!
//! # Example
//!
//! Ask the simulated read-out unit how many subsets of
//! `{130, -130, -146, -166, -44, 118}` sum to -146:
//!
//! ```
//! use memssp::{read_pair, MachineConfig, ReadoutMode, SubsetSumInstance};
//!
//! let g = SubsetSumInstance::new(vec![130, -130, -146, -166, -44, 118])?;
//! let config = MachineConfig::bench(100.0);
//! let result = read_pair(&g, &config, 146, ReadoutMode::Sampled)?;
//! assert_eq!(result.count_s, 0); // nothing sums to +146
//! assert_eq!(result.count_minus_s, 2); // {-146} and {130, -130, -146}
//! assert!(result.exists_minus_s);
//! # Ok::<(), memssp::Error>(())
//! ```

pub mod cli;
pub mod error;
pub mod network;
pub mod noise;
pub mod oracle;
pub mod problem;
pub mod readout;
pub mod spectrum;

pub use error::{Error, Result};
pub use network::{
    collective_state_analytic, memprocessor_step, sample_collective_state, signal_energy,
    CollectiveState,
};
pub use noise::{
    channel_capacity, lownoise_decomposition, noisy_cascade, snr_measured, snr_predicted,
    NoiseKind, NoiseSpec, SnrReport,
};
pub use oracle::{count_subsets_bruteforce, count_subsets_dp, full_count_table, CountTable};
pub use problem::{
    capacity, encode, validate, FrequencyAssignment, InstanceFile, MachineConfig,
    SubsetSumInstance, Tone, ValidationReport,
};
pub use readout::{dc_average, frequency_shift, read_pair, ReadoutMode, ReadoutResult};
pub use spectrum::{dft_spectrum, exact_spectrum, Spectrum};
