//! C ABI for the memssp simulator.
//!
//! Conventions: objects are opaque handles created by `*_new` functions and
//! released by the matching `*_free`; every fallible call returns an
//! [`MsspStatus`] and writes its result through an out-pointer, which is left
//! untouched on failure. Handles are immutable after construction and safe
//! to share across threads. `mssp_status_message` maps any status to a
//! static description string.
//!
//! The C header is generated into `include/memssp.h` at build time.

use std::ffi::{c_char, CStr};

use memssp::problem::{capacity, validate, MachineConfig, SubsetSumInstance};
use memssp::readout::{read_pair, ReadoutMode};
use memssp::spectrum::{exact_spectrum, Spectrum};
use memssp::Error;

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsspStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Instance JSON failed to parse.
    InvalidJson = 3,
    /// The element list violates an instance invariant (empty, zero element,
    /// capacity overflow).
    InvalidInstance = 4,
    /// A machine-config field is out of range.
    InvalidConfig = 5,
    /// The instance is too large for exact counting.
    TooLarge = 6,
    /// A sampled operation was asked to run below its exact rate.
    Aliasing = 7,
    /// Any other library failure.
    Internal = 8,
}

fn status_of(err: &Error) -> MsspStatus {
    match err {
        Error::Json(_) => MsspStatus::InvalidJson,
        Error::EmptyInstance | Error::ZeroElement { .. } | Error::CapacityOverflow => {
            MsspStatus::InvalidInstance
        }
        Error::NonPositiveConfig { .. } | Error::ResolutionAboveBandwidth { .. } => {
            MsspStatus::InvalidConfig
        }
        Error::TooManyElements { .. } | Error::BruteForceTooLarge { .. } => MsspStatus::TooLarge,
        Error::Aliasing { .. } => MsspStatus::Aliasing,
        _ => MsspStatus::Internal,
    }
}

/// Opaque subset-sum instance handle.
pub struct MsspInstance(SubsetSumInstance);

/// Opaque exact-spectrum handle.
pub struct MsspSpectrum(Spectrum);

/// Machine configuration mirrored across the ABI.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MsspMachineConfig {
    pub f0_hz: f64,
    pub gen_resolution_hz: f64,
    pub gen_bandwidth_hz: f64,
    pub amp_max_freq_hz: f64,
    pub max_samples: u64,
}

/// Outcome of the four hardware feasibility checks.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MsspValidation {
    pub resolution_ok: bool,
    pub bandwidth_ok: bool,
    pub amplifier_ok: bool,
    pub sampling_ok: bool,
    pub all_ok: bool,
    pub resolution_margin_hz: f64,
    pub bandwidth_margin_hz: f64,
    pub amplifier_margin_hz: f64,
    pub sampling_margin_hz: f64,
}

/// How a read-out query is evaluated.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsspReadoutMode {
    /// Through the exact spectrum.
    Exact = 0,
    /// Through the simulated sampled signal path.
    Sampled = 1,
}

/// One read-out measurement: DC voltages, recovered amplitudes and counts
/// for the target sum and its negative.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MsspReadout {
    pub target_s: i64,
    pub v_dc_up: f64,
    pub v_dc_down: f64,
    pub v_s: f64,
    pub v_minus_s: f64,
    pub count_s: u64,
    pub count_minus_s: u64,
    pub exists_s: bool,
    pub exists_minus_s: bool,
}

/// Builds an instance from `len` signed elements.
///
/// # Safety
/// `elements` must point to `len` readable `int64_t` values and `out` must be
/// a valid pointer. On success `*out` owns the handle; free it with
/// [`mssp_instance_free`].
#[no_mangle]
pub unsafe extern "C" fn mssp_instance_new(
    elements: *const i64,
    len: usize,
    out: *mut *mut MsspInstance,
) -> MsspStatus {
    if elements.is_null() || out.is_null() {
        return MsspStatus::NullPointer;
    }
    let slice = std::slice::from_raw_parts(elements, len);
    match SubsetSumInstance::new(slice.to_vec()) {
        Ok(instance) => {
            *out = Box::into_raw(Box::new(MsspInstance(instance)));
            MsspStatus::Ok
        }
        Err(err) => status_of(&err),
    }
}

/// Parses the instance-file JSON shape `{"elements": [...], "f0_hz": ...}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid. See
/// [`mssp_instance_new`] for ownership.
#[no_mangle]
pub unsafe extern "C" fn mssp_instance_from_json(
    json: *const c_char,
    out: *mut *mut MsspInstance,
) -> MsspStatus {
    if json.is_null() || out.is_null() {
        return MsspStatus::NullPointer;
    }
    let Ok(text) = CStr::from_ptr(json).to_str() else {
        return MsspStatus::InvalidUtf8;
    };
    let file = match memssp::InstanceFile::parse(text) {
        Ok(file) => file,
        Err(err) => return status_of(&err),
    };
    match file.instance() {
        Ok(instance) => {
            *out = Box::into_raw(Box::new(MsspInstance(instance)));
            MsspStatus::Ok
        }
        Err(err) => status_of(&err),
    }
}

/// Releases an instance handle. Null is a no-op.
///
/// # Safety
/// `instance` must be null or a pointer returned by an `mssp_instance_*`
/// constructor that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn mssp_instance_free(instance: *mut MsspInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Number of elements (memprocessors).
///
/// # Safety
/// `instance` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mssp_instance_len(
    instance: *const MsspInstance,
    out: *mut usize,
) -> MsspStatus {
    let (Some(instance), false) = (instance.as_ref(), out.is_null()) else {
        return MsspStatus::NullPointer;
    };
    *out = instance.0.n();
    MsspStatus::Ok
}

/// The capacity `A = max(sum of positives, -(sum of negatives))`.
///
/// # Safety
/// `instance` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mssp_capacity(instance: *const MsspInstance, out: *mut u64) -> MsspStatus {
    let (Some(instance), false) = (instance.as_ref(), out.is_null()) else {
        return MsspStatus::NullPointer;
    };
    *out = capacity(&instance.0);
    MsspStatus::Ok
}

/// Exact number of non-empty subsets summing to `s` (dynamic programming).
///
/// # Safety
/// `instance` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mssp_subset_count(
    instance: *const MsspInstance,
    s: i64,
    out: *mut u64,
) -> MsspStatus {
    let (Some(instance), false) = (instance.as_ref(), out.is_null()) else {
        return MsspStatus::NullPointer;
    };
    match memssp::count_subsets_dp(&instance.0, s) {
        Ok(count) => {
            *out = count;
            MsspStatus::Ok
        }
        Err(err) => status_of(&err),
    }
}

/// Runs the four hardware feasibility checks.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn mssp_validate(
    instance: *const MsspInstance,
    config: *const MsspMachineConfig,
    out: *mut MsspValidation,
) -> MsspStatus {
    let (Some(instance), Some(config), false) = (instance.as_ref(), config.as_ref(), out.is_null())
    else {
        return MsspStatus::NullPointer;
    };
    let machine = MachineConfig {
        f0_hz: config.f0_hz,
        gen_resolution_hz: config.gen_resolution_hz,
        gen_bandwidth_hz: config.gen_bandwidth_hz,
        amp_max_freq_hz: config.amp_max_freq_hz,
        max_samples: config.max_samples,
    };
    if let Err(err) = machine.validate_fields() {
        return status_of(&err);
    }
    let report = validate(&instance.0, &machine);
    let margin = |i: usize| report.checks[i].margin_hz;
    *out = MsspValidation {
        resolution_ok: report.checks[0].pass,
        bandwidth_ok: report.checks[1].pass,
        amplifier_ok: report.checks[2].pass,
        sampling_ok: report.checks[3].pass,
        all_ok: report.all_pass,
        resolution_margin_hz: margin(0),
        bandwidth_margin_hz: margin(1),
        amplifier_margin_hz: margin(2),
        sampling_margin_hz: margin(3),
    };
    MsspStatus::Ok
}

/// Computes the exact spectrum once; query it with the `mssp_spectrum_*`
/// accessors.
///
/// # Safety
/// `instance` and `out` must be valid; free the result with
/// [`mssp_spectrum_free`].
#[no_mangle]
pub unsafe extern "C" fn mssp_spectrum_new(
    instance: *const MsspInstance,
    out: *mut *mut MsspSpectrum,
) -> MsspStatus {
    let (Some(instance), false) = (instance.as_ref(), out.is_null()) else {
        return MsspStatus::NullPointer;
    };
    match exact_spectrum(&instance.0) {
        Ok(spectrum) => {
            *out = Box::into_raw(Box::new(MsspSpectrum(spectrum)));
            MsspStatus::Ok
        }
        Err(err) => status_of(&err),
    }
}

/// Releases a spectrum handle. Null is a no-op.
///
/// # Safety
/// `spectrum` must be null or an unfreed pointer from [`mssp_spectrum_new`].
#[no_mangle]
pub unsafe extern "C" fn mssp_spectrum_free(spectrum: *mut MsspSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

/// Amplitude at normalized frequency `f`; zero outside the band. The DC
/// amplitude includes the empty-set term.
///
/// # Safety
/// `spectrum` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mssp_spectrum_amplitude(
    spectrum: *const MsspSpectrum,
    f: i64,
    out: *mut f64,
) -> MsspStatus {
    let (Some(spectrum), false) = (spectrum.as_ref(), out.is_null()) else {
        return MsspStatus::NullPointer;
    };
    *out = spectrum.0.amplitude(f);
    MsspStatus::Ok
}

/// Subset count at sum `f` (empty set included at zero).
///
/// # Safety
/// `spectrum` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mssp_spectrum_count(
    spectrum: *const MsspSpectrum,
    f: i64,
    out: *mut u64,
) -> MsspStatus {
    let (Some(spectrum), false) = (spectrum.as_ref(), out.is_null()) else {
        return MsspStatus::NullPointer;
    };
    *out = spectrum.0.count(f);
    MsspStatus::Ok
}

/// One read-out query at target `s` with fundamental frequency `f0_hz`.
///
/// # Safety
/// `instance` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mssp_read_pair(
    instance: *const MsspInstance,
    f0_hz: f64,
    s: i64,
    mode: MsspReadoutMode,
    out: *mut MsspReadout,
) -> MsspStatus {
    let (Some(instance), false) = (instance.as_ref(), out.is_null()) else {
        return MsspStatus::NullPointer;
    };
    if f0_hz <= 0.0 || f0_hz.is_nan() {
        return MsspStatus::InvalidConfig;
    }
    let config = MachineConfig::bench(f0_hz);
    let mode = match mode {
        MsspReadoutMode::Exact => ReadoutMode::Exact,
        MsspReadoutMode::Sampled => ReadoutMode::Sampled,
    };
    match read_pair(&instance.0, &config, s, mode) {
        Ok(result) => {
            *out = MsspReadout {
                target_s: result.target_s,
                v_dc_up: result.v_dc_up,
                v_dc_down: result.v_dc_down,
                v_s: result.v_s,
                v_minus_s: result.v_minus_s,
                count_s: result.count_s,
                count_minus_s: result.count_minus_s,
                exists_s: result.exists_s,
                exists_minus_s: result.exists_minus_s,
            };
            MsspStatus::Ok
        }
        Err(err) => status_of(&err),
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn mssp_status_message(status: MsspStatus) -> *const c_char {
    let message: &CStr = match status {
        MsspStatus::Ok => c"ok",
        MsspStatus::NullPointer => c"a required pointer argument was null",
        MsspStatus::InvalidUtf8 => c"string argument was not valid UTF-8",
        MsspStatus::InvalidJson => c"instance JSON failed to parse",
        MsspStatus::InvalidInstance => c"element list violates an instance invariant",
        MsspStatus::InvalidConfig => c"machine configuration field out of range",
        MsspStatus::TooLarge => c"instance too large for exact counting",
        MsspStatus::Aliasing => c"sample rate below the exact-spectrum requirement",
        MsspStatus::Internal => c"internal error",
    };
    message.as_ptr()
}
