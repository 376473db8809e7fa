//! Problem representation, frequency encoding, and hardware feasibility checks.
//!
//! A subset-sum instance is a multiset of nonzero signed integers. The machine
//! encodes each element into one memprocessor driven at `|a_j| * f0`, with
//! negative elements realized by swapping the two signal terminals, so all
//! spectral bookkeeping happens on the normalized integer grid and hertz only
//! appear at the physical boundary (validation, reporting, export).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A subset-sum instance: the multiset G of nonzero signed integers.
///
/// Duplicates are allowed and count as distinct memprocessors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSumInstance {
    elements: Vec<i64>,
    neg_extent: u64,
    pos_extent: u64,
}

impl SubsetSumInstance {
    /// Builds an instance, rejecting empty sets, zero elements, and element
    /// sums that overflow the widest native integer.
    pub fn new(elements: Vec<i64>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptyInstance);
        }
        let mut neg: i128 = 0;
        let mut pos: i128 = 0;
        for (index, &a) in elements.iter().enumerate() {
            if a == 0 {
                return Err(Error::ZeroElement { index });
            }
            if a > 0 {
                pos += a as i128;
            } else {
                neg += -(a as i128);
            }
        }
        // The spectrum spans [-neg_extent, pos_extent]; both ends must index
        // into native integers.
        if neg > i64::MAX as i128 || pos > i64::MAX as i128 {
            return Err(Error::CapacityOverflow);
        }
        Ok(Self {
            elements,
            neg_extent: neg as u64,
            pos_extent: pos as u64,
        })
    }

    /// The synthetic instance used by noise sweeps when no file is given:
    /// the first `n` odd magnitudes with alternating signs,
    /// {+1, -3, +5, -7, ...}.
    pub fn alternating_odd(n: usize) -> Result<Self> {
        let elements = (0..n as i64)
            .map(|j| {
                let magnitude = 2 * j + 1;
                if j % 2 == 0 {
                    magnitude
                } else {
                    -magnitude
                }
            })
            .collect();
        Self::new(elements)
    }

    pub fn elements(&self) -> &[i64] {
        &self.elements
    }

    /// Number of memprocessors (cardinality of G).
    pub fn n(&self) -> usize {
        self.elements.len()
    }

    /// Bit length of the largest-magnitude element.
    pub fn precision_bits(&self) -> u32 {
        self.elements
            .iter()
            .map(|&a| 64 - a.unsigned_abs().leading_zeros())
            .max()
            .unwrap_or(0)
    }

    /// Sum of the magnitudes of the negative elements.
    pub fn neg_extent(&self) -> u64 {
        self.neg_extent
    }

    /// Sum of the positive elements.
    pub fn pos_extent(&self) -> u64 {
        self.pos_extent
    }

    /// Largest element magnitude.
    pub fn max_magnitude(&self) -> u64 {
        self.elements
            .iter()
            .map(|&a| a.unsigned_abs())
            .max()
            .unwrap_or(0)
    }
}

/// Capacity of the instance: `A = max(sum of positives, -(sum of negatives))`.
///
/// The collective state of the machine is band-limited to the normalized
/// frequency range `[-A, A]`, so `A * f0` is the highest physical frequency
/// the hardware must pass.
pub fn capacity(instance: &SubsetSumInstance) -> u64 {
    instance.neg_extent.max(instance.pos_extent)
}

/// Hardware description: fundamental frequency plus generator, amplifier and
/// acquisition limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MachineConfig {
    /// Fundamental frequency in hertz. One period `T = 1/f0` is the machine's
    /// computation time.
    pub f0_hz: f64,
    /// Minimum frequency the generators can synthesize (resolution).
    pub gen_resolution_hz: f64,
    /// Maximum frequency the generators can synthesize (bandwidth).
    pub gen_bandwidth_hz: f64,
    /// Maximum operating frequency of the amplifier stages.
    pub amp_max_freq_hz: f64,
    /// Maximum number of samples the acquisition instrument can store.
    pub max_samples: u64,
}

impl MachineConfig {
    /// Limits of the bench instruments used throughout the examples:
    /// 1 uHz generator resolution, 20 MHz generator bandwidth, 10 MHz
    /// multiplier bandwidth, 1e5 oscilloscope samples.
    pub fn bench(f0_hz: f64) -> Self {
        Self {
            f0_hz,
            gen_resolution_hz: 1e-6,
            gen_bandwidth_hz: 20e6,
            amp_max_freq_hz: 10e6,
            max_samples: 100_000,
        }
    }

    pub fn validate_fields(&self) -> Result<()> {
        for (field, value) in [
            ("f0_hz", self.f0_hz),
            ("gen_resolution_hz", self.gen_resolution_hz),
            ("gen_bandwidth_hz", self.gen_bandwidth_hz),
            ("amp_max_freq_hz", self.amp_max_freq_hz),
            ("max_samples", self.max_samples as f64),
        ] {
            if value <= 0.0 || value.is_nan() {
                return Err(Error::NonPositiveConfig { field, value });
            }
        }
        if self.gen_resolution_hz > self.gen_bandwidth_hz {
            return Err(Error::ResolutionAboveBandwidth {
                resolution: self.gen_resolution_hz,
                bandwidth: self.gen_bandwidth_hz,
            });
        }
        Ok(())
    }

    /// Computation time `T = 1/f0` in seconds.
    pub fn period_s(&self) -> f64 {
        1.0 / self.f0_hz
    }
}

/// One memprocessor's drive: a positive normalized frequency magnitude and a
/// flag marking that the element was negative (its terminals are swapped).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Tone {
    /// `|a_j|`, the generator frequency in units of f0.
    pub magnitude: u64,
    /// True when `a_j < 0`: input and output terminals are inverted.
    pub negated: bool,
}

impl Tone {
    /// The signed normalized frequency `a_j`.
    pub fn signed(&self) -> i64 {
        if self.negated {
            -(self.magnitude as i64)
        } else {
            self.magnitude as i64
        }
    }
}

/// Per-memprocessor generator settings for one instance.
///
/// Frequencies are stored as normalized integer multiples of f0; hertz values
/// are derived on demand so the spectral index never drifts.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyAssignment {
    tones: Vec<Tone>,
    f0_hz: f64,
    neg_extent: u64,
    pos_extent: u64,
}

impl FrequencyAssignment {
    pub fn tones(&self) -> &[Tone] {
        &self.tones
    }

    pub fn n(&self) -> usize {
        self.tones.len()
    }

    pub fn f0_hz(&self) -> f64 {
        self.f0_hz
    }

    pub fn period_s(&self) -> f64 {
        1.0 / self.f0_hz
    }

    /// Generator frequency of memprocessor `j` in hertz.
    pub fn frequency_hz(&self, j: usize) -> f64 {
        self.tones[j].magnitude as f64 * self.f0_hz
    }

    pub fn neg_extent(&self) -> u64 {
        self.neg_extent
    }

    pub fn pos_extent(&self) -> u64 {
        self.pos_extent
    }

    /// Band limit of the collective state in normalized frequency units.
    pub fn capacity(&self) -> u64 {
        self.neg_extent.max(self.pos_extent)
    }

    /// Assignment with the memprocessor order permuted; the collective state
    /// must not depend on this.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            tones: order.iter().map(|&j| self.tones[j]).collect(),
            ..*self
        }
    }
}

/// Maps instance elements onto memprocessor drives: entry `j` carries
/// magnitude `|a_j|` and the terminal-swap flag for `a_j < 0`, in element
/// order.
pub fn encode(instance: &SubsetSumInstance, config: &MachineConfig) -> FrequencyAssignment {
    FrequencyAssignment {
        tones: instance
            .elements()
            .iter()
            .map(|&a| Tone {
                magnitude: a.unsigned_abs(),
                negated: a < 0,
            })
            .collect(),
        f0_hz: config.f0_hz,
        neg_extent: instance.neg_extent(),
        pos_extent: instance.pos_extent(),
    }
}

/// Outcome of one hardware feasibility inequality.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    /// Human-readable form of the inequality with numbers substituted.
    pub constraint: String,
    pub pass: bool,
    /// Slack in hertz; nonnegative when the check passes.
    pub margin_hz: f64,
}

/// Feasibility report for one instance on one machine.
///
/// Advisory only: a failing report never blocks simulation, it just says the
/// bench hardware could not run this configuration.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub all_pass: bool,
}

/// Checks the four hardware inequalities:
///
/// 1. generator resolution:   gen_resolution <= f0
/// 2. generator bandwidth:    gen_bandwidth  >= f0 * max|a_j|
/// 3. amplifier bandwidth:    amp_max_freq   >  A * f0
/// 4. acquisition samples:    A * f0         <= (f0/2) * (max_samples - 1)
pub fn validate(instance: &SubsetSumInstance, config: &MachineConfig) -> ValidationReport {
    let f0 = config.f0_hz;
    let f_gen_max = instance.max_magnitude() as f64 * f0;
    let f_max = capacity(instance) as f64 * f0;
    let f_nyquist = 0.5 * f0 * (config.max_samples.saturating_sub(1)) as f64;

    let checks = vec![
        Check {
            name: "generator_resolution",
            constraint: format!("{} Hz <= f0 = {} Hz", config.gen_resolution_hz, f0),
            pass: config.gen_resolution_hz <= f0,
            margin_hz: f0 - config.gen_resolution_hz,
        },
        Check {
            name: "generator_bandwidth",
            constraint: format!(
                "{} Hz >= f0*max|a| = {} Hz",
                config.gen_bandwidth_hz, f_gen_max
            ),
            pass: config.gen_bandwidth_hz >= f_gen_max,
            margin_hz: config.gen_bandwidth_hz - f_gen_max,
        },
        Check {
            name: "amplifier_bandwidth",
            constraint: format!("{} Hz > A*f0 = {} Hz", config.amp_max_freq_hz, f_max),
            pass: config.amp_max_freq_hz > f_max,
            margin_hz: config.amp_max_freq_hz - f_max,
        },
        Check {
            name: "acquisition_samples",
            constraint: format!(
                "A*f0 = {} Hz <= (f0/2)*(max_samples-1) = {} Hz",
                f_max, f_nyquist
            ),
            pass: f_max <= f_nyquist,
            margin_hz: f_nyquist - f_max,
        },
    ];
    let all_pass = checks.iter().all(|c| c.pass);
    ValidationReport { checks, all_pass }
}

/// On-disk instance description consumed by the CLI.
///
/// Unknown keys are rejected so typos never silently change a run.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub elements: Vec<i64>,
    pub f0_hz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<i64>>,
}

impl InstanceFile {
    pub fn parse(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn instance(&self) -> Result<SubsetSumInstance> {
        SubsetSumInstance::new(self.elements.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn table_set() -> SubsetSumInstance {
        SubsetSumInstance::new(vec![130, -130, -146, -166, -44, 118]).unwrap()
    }

    fn elements_strategy() -> impl Strategy<Value = Vec<i64>> {
        prop::collection::vec(
            (1i64..=300).prop_flat_map(|m| prop_oneof![Just(m), Just(-m)]),
            1..=10,
        )
    }

    #[test]
    fn capacity_of_bench_set() {
        assert_eq!(capacity(&table_set()), 486);
    }

    #[test]
    fn capacity_single_element() {
        let g = SubsetSumInstance::new(vec![5]).unwrap();
        assert_eq!(capacity(&g), 5);
    }

    #[test]
    fn capacity_takes_max_of_both_sides() {
        let g = SubsetSumInstance::new(vec![3, -4, 2]).unwrap();
        assert_eq!(capacity(&g), 5);
        assert_eq!(g.pos_extent(), 5);
        assert_eq!(g.neg_extent(), 4);
    }

    #[test]
    fn zero_elements_rejected() {
        let err = SubsetSumInstance::new(vec![1, 0, 3]).unwrap_err();
        assert!(matches!(err, Error::ZeroElement { index: 1 }));
    }

    #[test]
    fn empty_instance_rejected() {
        assert!(matches!(
            SubsetSumInstance::new(vec![]),
            Err(Error::EmptyInstance)
        ));
    }

    #[test]
    fn capacity_overflow_rejected() {
        let err = SubsetSumInstance::new(vec![i64::MAX, i64::MAX]).unwrap_err();
        assert!(matches!(err, Error::CapacityOverflow));
    }

    #[test]
    fn duplicates_allowed() {
        let g = SubsetSumInstance::new(vec![2, 2]).unwrap();
        assert_eq!(capacity(&g), 4);
    }

    #[test]
    fn precision_bits_of_bench_set() {
        // max magnitude 166 needs 8 bits
        assert_eq!(table_set().precision_bits(), 8);
        assert_eq!(SubsetSumInstance::new(vec![1]).unwrap().precision_bits(), 1);
    }

    #[test]
    fn encode_bench_pair() {
        let g = SubsetSumInstance::new(vec![130, -130]).unwrap();
        let asg = encode(&g, &MachineConfig::bench(100.0));
        assert_eq!(asg.n(), 2);
        assert_eq!(asg.frequency_hz(0), 13_000.0);
        assert!(!asg.tones()[0].negated);
        assert_eq!(asg.frequency_hz(1), 13_000.0);
        assert!(asg.tones()[1].negated);
    }

    #[test]
    fn encode_unit_element() {
        let g = SubsetSumInstance::new(vec![1]).unwrap();
        let asg = encode(&g, &MachineConfig::bench(1.0));
        assert_eq!(asg.frequency_hz(0), 1.0);
        assert!(!asg.tones()[0].negated);
    }

    #[test]
    fn encode_preserves_order_and_signs() {
        let g = SubsetSumInstance::new(vec![-44, 118]).unwrap();
        let asg = encode(&g, &MachineConfig::bench(100.0));
        assert_eq!(asg.frequency_hz(0), 4_400.0);
        assert!(asg.tones()[0].negated);
        assert_eq!(asg.frequency_hz(1), 11_800.0);
        assert!(!asg.tones()[1].negated);
        assert_eq!(asg.tones()[0].signed(), -44);
        assert_eq!(asg.tones()[1].signed(), 118);
    }

    #[test]
    fn bench_configuration_validates() {
        let report = validate(&table_set(), &MachineConfig::bench(100.0));
        assert!(report.all_pass, "{report:?}");
        assert_eq!(report.checks.len(), 4);
    }

    #[test]
    fn resolution_check_fails_below_resolution() {
        let mut config = MachineConfig::bench(100.0);
        config.f0_hz = 1e-9; // below the 1 uHz resolution
        let report = validate(&table_set(), &config);
        assert!(!report.all_pass);
        let check = &report.checks[0];
        assert_eq!(check.name, "generator_resolution");
        assert!(!check.pass);
        assert!(check.margin_hz < 0.0);
    }

    #[test]
    fn sampling_check_passes_with_zero_margin() {
        // A=486, f0=100 Hz, max_samples=973: 48600 = 50 * 972 exactly.
        let mut config = MachineConfig::bench(100.0);
        config.max_samples = 973;
        let report = validate(&table_set(), &config);
        let check = &report.checks[3];
        assert_eq!(check.name, "acquisition_samples");
        assert!(check.pass);
        assert_eq!(check.margin_hz, 0.0);
    }

    #[test]
    fn instance_file_rejects_unknown_keys() {
        let err = InstanceFile::parse(r#"{"elements":[1],"f0_hz":1.0,"bogus":2}"#);
        assert!(err.is_err());
        let ok = InstanceFile::parse(r#"{"elements":[1,-2],"f0_hz":100.0,"targets":[3]}"#).unwrap();
        assert_eq!(ok.elements, vec![1, -2]);
        assert_eq!(ok.targets, Some(vec![3]));
    }

    #[test]
    fn alternating_odd_generator() {
        let g = SubsetSumInstance::alternating_odd(4).unwrap();
        assert_eq!(g.elements(), &[1, -3, 5, -7]);
    }

    proptest! {
        #[test]
        fn capacity_invariant_under_permutation(elements in elements_strategy(), seed in 0u64..100) {
            let base = SubsetSumInstance::new(elements.clone()).unwrap();
            let mut permuted = elements;
            let mut s = seed.wrapping_add(1);
            for i in (1..permuted.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                permuted.swap(i, (s >> 33) as usize % (i + 1));
            }
            let shuffled = SubsetSumInstance::new(permuted).unwrap();
            prop_assert_eq!(capacity(&base), capacity(&shuffled));
        }

        #[test]
        fn capacity_monotone_under_extension(elements in elements_strategy(), extra in 1i64..=300, negate in any::<bool>()) {
            let base = SubsetSumInstance::new(elements.clone()).unwrap();
            let mut extended = elements;
            extended.push(if negate { -extra } else { extra });
            let bigger = SubsetSumInstance::new(extended).unwrap();
            prop_assert!(capacity(&bigger) >= capacity(&base));
        }

        #[test]
        fn encode_preserves_length_and_sign_pattern(elements in elements_strategy()) {
            let g = SubsetSumInstance::new(elements.clone()).unwrap();
            let assignment = encode(&g, &MachineConfig::bench(100.0));
            prop_assert_eq!(assignment.n(), elements.len());
            for (tone, &a) in assignment.tones().iter().zip(&elements) {
                prop_assert_eq!(tone.negated, a < 0);
                prop_assert_eq!(tone.magnitude, a.unsigned_abs());
                prop_assert_eq!(tone.signed(), a);
            }
        }

        #[test]
        fn validate_is_monotone_in_every_limit(
            elements in elements_strategy(),
            f0 in 1.0f64..1e4,
            resolution in 1e-6f64..1e3,
            bandwidth in 1.0f64..1e8,
            amp in 1.0f64..1e8,
            samples in 2u64..1_000_000,
            factor in 1.0f64..100.0,
        ) {
            let g = SubsetSumInstance::new(elements).unwrap();
            let base = MachineConfig {
                f0_hz: f0,
                gen_resolution_hz: resolution.min(bandwidth),
                gen_bandwidth_hz: bandwidth,
                amp_max_freq_hz: amp,
                max_samples: samples,
            };
            let before = validate(&g, &base);
            // relaxing one limit at a time never flips a pass to a fail
            let relaxed = [
                MachineConfig { gen_resolution_hz: base.gen_resolution_hz / factor, ..base },
                MachineConfig { gen_bandwidth_hz: base.gen_bandwidth_hz * factor, ..base },
                MachineConfig { amp_max_freq_hz: base.amp_max_freq_hz * factor, ..base },
                MachineConfig { max_samples: base.max_samples.saturating_mul(2), ..base },
            ];
            for config in relaxed {
                let after = validate(&g, &config);
                for (check_before, check_after) in before.checks.iter().zip(&after.checks) {
                    prop_assert!(
                        !check_before.pass || check_after.pass,
                        "{} flipped pass -> fail", check_before.name
                    );
                }
            }
        }
    }
}
