/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef QUILT_H
#define QUILT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QuiltStatus {
  QUILT_STATUS_OK = 0,
  QUILT_STATUS_NULL_POINTER = 1,
  QUILT_STATUS_INVALID_UTF8 = 2,
  QUILT_STATUS_PARSE = 3,
  QUILT_STATUS_LOAD = 4,
  QUILT_STATUS_LAYOUT = 5,
  QUILT_STATUS_SIMULATION = 6,
  QUILT_STATUS_OUT_OF_RANGE = 7,
  QUILT_STATUS_PANIC = 8,
} QuiltStatus;

// Parsed circuit.
typedef struct QuiltCircuit QuiltCircuit;

// Device model with calibration.
typedef struct QuiltDevice QuiltDevice;

// Compiled plan together with the inputs it was compiled from.
typedef struct QuiltPlan QuiltPlan;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on this thread.
const char *quilt_last_error(void);

// # Safety
// `s` must come from this library or be null.
void quilt_string_free(char *s);

// Parses OpenQASM 2.0 text. `origin` names the source in diagnostics and
// may be null.
//
// # Safety
// `text` and `origin` must be NUL-terminated or null; `out` must be
// writable.
enum QuiltStatus quilt_circuit_parse(const char *text,
                                     const char *origin,
                                     struct QuiltCircuit **out);

// # Safety
// `c` must come from [`quilt_circuit_parse`] or be null.
void quilt_circuit_free(struct QuiltCircuit *c);

// Zero for a null handle.
//
// # Safety
// `c` must be a live handle or null.
size_t quilt_circuit_num_qubits(const struct QuiltCircuit *c);

// # Safety
// `c` must be a live handle or null.
size_t quilt_circuit_cx_count(const struct QuiltCircuit *c);

// # Safety
// `c` must be a live handle or null.
size_t quilt_circuit_cx_depth(const struct QuiltCircuit *c);

// Loads a calibration document.
//
// # Safety
// `json` must be NUL-terminated or null; `out` must be writable.
enum QuiltStatus quilt_device_load_json(const char *json, struct QuiltDevice **out);

// Bundled device by name, e.g. `falcon27`.
//
// # Safety
// `name` must be NUL-terminated or null; `out` must be writable.
enum QuiltStatus quilt_device_preset(const char *name, struct QuiltDevice **out);

// # Safety
// `d` must come from this library or be null.
void quilt_device_free(struct QuiltDevice *d);

// # Safety
// `d` must be a live handle or null.
size_t quilt_device_num_qubits(const struct QuiltDevice *d);

// Allocates `n` circuits to rounds with buffer distance `buffer`. The
// plan keeps its own copies of the device and circuits.
//
// # Safety
// `device` must be live; `circuits` must point to `n` live handles;
// `out` must be writable.
enum QuiltStatus quilt_plan_compile(const struct QuiltDevice *device,
                                    const struct QuiltCircuit *const *circuits,
                                    size_t n,
                                    size_t buffer,
                                    bool allow_exact_fit,
                                    struct QuiltPlan **out);

// # Safety
// `p` must come from this library or be null.
void quilt_plan_free(struct QuiltPlan *p);

// # Safety
// `p` must be a live handle or null.
size_t quilt_plan_num_rounds(const struct QuiltPlan *p);

// Circuits that could not be placed.
//
// # Safety
// `p` must be a live handle or null.
size_t quilt_plan_num_leftover(const struct QuiltPlan *p);

// Members in `round`; zero when out of range.
//
// # Safety
// `p` must be a live handle or null.
size_t quilt_plan_round_len(const struct QuiltPlan *p, size_t round);

// Input index of a member.
//
// # Safety
// `p` must be live; `circuit_index` must be writable.
enum QuiltStatus quilt_plan_member(const struct QuiltPlan *p,
                                   size_t round,
                                   size_t member,
                                   size_t *circuit_index);

// Copies a member's layout (program qubit `i` sits on `buf[i]`). `len`
// receives the layout length even when `cap` is too small, in which case
// nothing is copied and `OutOfRange` is returned.
//
// # Safety
// `p` must be live; `buf` must hold `cap` values; `len` must be writable.
enum QuiltStatus quilt_plan_layout(const struct QuiltPlan *p,
                                   size_t round,
                                   size_t member,
                                   size_t *buf,
                                   size_t cap,
                                   size_t *len);

// The plan as JSON.
//
// # Safety
// `p` must be live; `out` must be writable.
enum QuiltStatus quilt_plan_to_json(const struct QuiltPlan *p, char **out);

// Simulates every round and returns the member results as a JSON array.
// `gamma` scales cx errors per overlapping nearby cx; pairs at most
// `hop_threshold` hops apart couple.
//
// # Safety
// `p` must be live; `out` must be writable.
enum QuiltStatus quilt_plan_simulate_json(const struct QuiltPlan *p,
                                          double gamma,
                                          size_t hop_threshold,
                                          uint64_t shots,
                                          uint64_t seed,
                                          char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUILT_H */
