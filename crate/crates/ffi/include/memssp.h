/* C interface to the memssp memprocessor-network subset-sum simulator. */

#ifndef MEMSSP_H
#define MEMSSP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// How a read-out query is evaluated.
typedef enum MsspReadoutMode {
  // Through the exact spectrum.
  MSSP_READOUT_MODE_EXACT = 0,
  // Through the simulated sampled signal path.
  MSSP_READOUT_MODE_SAMPLED = 1,
} MsspReadoutMode;

// Status code returned by every fallible call.
typedef enum MsspStatus {
  MSSP_STATUS_OK = 0,
  // A required pointer argument was null.
  MSSP_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  MSSP_STATUS_INVALID_UTF8 = 2,
  // Instance JSON failed to parse.
  MSSP_STATUS_INVALID_JSON = 3,
  // The element list violates an instance invariant (empty, zero element,
  // capacity overflow).
  MSSP_STATUS_INVALID_INSTANCE = 4,
  // A machine-config field is out of range.
  MSSP_STATUS_INVALID_CONFIG = 5,
  // The instance is too large for exact counting.
  MSSP_STATUS_TOO_LARGE = 6,
  // A sampled operation was asked to run below its exact rate.
  MSSP_STATUS_ALIASING = 7,
  // Any other library failure.
  MSSP_STATUS_INTERNAL = 8,
} MsspStatus;

// Opaque subset-sum instance handle.
typedef struct MsspInstance MsspInstance;

// Opaque exact-spectrum handle.
typedef struct MsspSpectrum MsspSpectrum;

// Machine configuration mirrored across the ABI.
typedef struct MsspMachineConfig {
  double f0_hz;
  double gen_resolution_hz;
  double gen_bandwidth_hz;
  double amp_max_freq_hz;
  uint64_t max_samples;
} MsspMachineConfig;

// Outcome of the four hardware feasibility checks.
typedef struct MsspValidation {
  bool resolution_ok;
  bool bandwidth_ok;
  bool amplifier_ok;
  bool sampling_ok;
  bool all_ok;
  double resolution_margin_hz;
  double bandwidth_margin_hz;
  double amplifier_margin_hz;
  double sampling_margin_hz;
} MsspValidation;

// One read-out measurement: DC voltages, recovered amplitudes and counts
// for the target sum and its negative.
typedef struct MsspReadout {
  int64_t target_s;
  double v_dc_up;
  double v_dc_down;
  double v_s;
  double v_minus_s;
  uint64_t count_s;
  uint64_t count_minus_s;
  bool exists_s;
  bool exists_minus_s;
} MsspReadout;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Builds an instance from `len` signed elements.
//
// # Safety
// `elements` must point to `len` readable `int64_t` values and `out` must be
// a valid pointer. On success `*out` owns the handle; free it with
// [`mssp_instance_free`].
enum MsspStatus mssp_instance_new(const int64_t *elements, size_t len, struct MsspInstance **out);

// Parses the instance-file JSON shape `{"elements": [...], "f0_hz": ...}`.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be valid. See
// [`mssp_instance_new`] for ownership.
enum MsspStatus mssp_instance_from_json(const char *json, struct MsspInstance **out);

// Releases an instance handle. Null is a no-op.
//
// # Safety
// `instance` must be null or a pointer returned by an `mssp_instance_*`
// constructor that has not been freed yet.
void mssp_instance_free(struct MsspInstance *instance);

// Number of elements (memprocessors).
//
// # Safety
// `instance` and `out` must be valid pointers.
enum MsspStatus mssp_instance_len(const struct MsspInstance *instance, size_t *out);

// The capacity `A = max(sum of positives, -(sum of negatives))`.
//
// # Safety
// `instance` and `out` must be valid pointers.
enum MsspStatus mssp_capacity(const struct MsspInstance *instance, uint64_t *out);

// Exact number of non-empty subsets summing to `s` (dynamic programming).
//
// # Safety
// `instance` and `out` must be valid pointers.
enum MsspStatus mssp_subset_count(const struct MsspInstance *instance, int64_t s, uint64_t *out);

// Runs the four hardware feasibility checks.
//
// # Safety
// All pointers must be valid.
enum MsspStatus mssp_validate(const struct MsspInstance *instance,
                              const struct MsspMachineConfig *config,
                              struct MsspValidation *out);

// Computes the exact spectrum once; query it with the `mssp_spectrum_*`
// accessors.
//
// # Safety
// `instance` and `out` must be valid; free the result with
// [`mssp_spectrum_free`].
enum MsspStatus mssp_spectrum_new(const struct MsspInstance *instance, struct MsspSpectrum **out);

// Releases a spectrum handle. Null is a no-op.
//
// # Safety
// `spectrum` must be null or an unfreed pointer from [`mssp_spectrum_new`].
void mssp_spectrum_free(struct MsspSpectrum *spectrum);

// Amplitude at normalized frequency `f`; zero outside the band. The DC
// amplitude includes the empty-set term.
//
// # Safety
// `spectrum` and `out` must be valid pointers.
enum MsspStatus mssp_spectrum_amplitude(const struct MsspSpectrum *spectrum,
                                        int64_t f,
                                        double *out);

// Subset count at sum `f` (empty set included at zero).
//
// # Safety
// `spectrum` and `out` must be valid pointers.
enum MsspStatus mssp_spectrum_count(const struct MsspSpectrum *spectrum, int64_t f, uint64_t *out);

// One read-out query at target `s` with fundamental frequency `f0_hz`.
//
// # Safety
// `instance` and `out` must be valid pointers.
enum MsspStatus mssp_read_pair(const struct MsspInstance *instance,
                               double f0_hz,
                               int64_t s,
                               enum MsspReadoutMode mode,
                               struct MsspReadout *out);

// Static description of a status code.
const char *mssp_status_message(enum MsspStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MEMSSP_H */
