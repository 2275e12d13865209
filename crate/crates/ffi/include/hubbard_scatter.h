#ifndef HUBBARD_SCATTER_H
#define HUBBARD_SCATTER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>
#include <stdbool.h>

typedef enum HsSpin {
  HS_SPIN_UP = 0,
  HS_SPIN_DOWN = 1,
} HsSpin;

// Result of every fallible call.
typedef enum HsStatus {
  HS_STATUS_OK = 0,
  HS_STATUS_NULL_POINTER = 1,
  HS_STATUS_INVALID_ARGUMENT = 2,
  HS_STATUS_NUMERIC_CONTRACT = 3,
  HS_STATUS_BUFFER_TOO_SMALL = 4,
  HS_STATUS_PANIC = 5,
} HsStatus;

// Two packets on a Hubbard ring, evolved in place.
typedef struct HsCollision HsCollision;

// Spin content of a left and a right train of spin-1/2 carriers.
typedef struct HsSpinTrain HsSpinTrain;

// Gaussian packet `exp(-α²(j-center)² + i·momentum·j)` carrying one spin.
typedef struct HsPacket {
  double center;
  double alpha;
  double momentum;
  enum HsSpin spin;
} HsPacket;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copy the calling thread's last error message, NUL-terminated, into `buf`.
//
// Returns the number of bytes needed including the terminator; nothing is
// written when `buf` is null or `len` is smaller than that.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t hs_last_error_message(char *buf, size_t len);

// Library version as a static NUL-terminated string.
const char *hs_version(void);

// Collision angle `θ = 2·atan(U / v_rel)`.
//
// # Safety
// `theta` must be null or valid for writes.
enum HsStatus hs_collision_angle(double interaction, double relative_velocity, double *theta);

// Two-body reflection phase for interaction `U` and spectral parameter `λ`.
//
// # Safety
// `delta` must be null or valid for writes.
enum HsStatus hs_reflection_phase(double interaction, double lambda, double *delta);

// Heisenberg pulse area equivalent to one collision.
//
// # Safety
// `t` must be null or valid for writes.
enum HsStatus hs_gate_time(double interaction, double relative_velocity, double *t);

// Interaction that fully flips a single spin crossing a train of `n`.
//
// # Safety
// `exact` and `approximate` must be null or valid for writes.
enum HsStatus hs_resonance_interaction(size_t n,
                                       double relative_velocity,
                                       double *exact,
                                       double *approximate);

// Build two packets of opposite spin on a ring of `sites` sites.
//
// # Safety
// `left` and `right` must point to valid packets; `collision` must be valid
// for writes. The handle written there must be released with
// [`hs_collision_free`].
enum HsStatus hs_collision_new(size_t sites,
                               double hopping,
                               double interaction,
                               const struct HsPacket *left,
                               const struct HsPacket *right,
                               struct HsCollision **collision);

// # Safety
// `collision` must be null or a handle from [`hs_collision_new`] that has
// not been freed.
void hs_collision_free(struct HsCollision *collision);

// Advance the state by `dt`.
//
// # Safety
// `collision` must be a live handle.
enum HsStatus hs_collision_evolve(struct HsCollision *collision, double dt);

// Elapsed time, state norm and collision angle of the handle.
//
// # Safety
// `collision` must be a live handle; each output must be null or valid for
// writes. Null outputs are skipped.
enum HsStatus hs_collision_info(const struct HsCollision *collision,
                                double *time,
                                double *norm,
                                double *theta);

// Overlap modulus with the factorized outgoing state whose packets sit at
// `left_center` (the packet now on the left) and `right_center`.
//
// # Safety
// `collision` must be a live handle; `value` must be valid for writes.
enum HsStatus hs_collision_fidelity(const struct HsCollision *collision,
                                    double left_center,
                                    double right_center,
                                    double *value);

// Spin concurrence of the two particles, cut midway between the expected
// centers `first` and `second`.
//
// # Safety
// `collision` must be a live handle; `value` must be valid for writes.
enum HsStatus hs_collision_concurrence(const struct HsCollision *collision,
                                       double first,
                                       double second,
                                       double *value);

// Product state of two spin trains.
//
// # Safety
// `left` and `right` must point to `left_len` and `right_len` spins;
// `train` must be valid for writes. Release with [`hs_spin_train_free`].
enum HsStatus hs_spin_train_new(const enum HsSpin *left,
                                size_t left_len,
                                const enum HsSpin *right,
                                size_t right_len,
                                struct HsSpinTrain **train);

// # Safety
// `train` must be null or a handle from [`hs_spin_train_new`] that has not
// been freed.
void hs_spin_train_free(struct HsSpinTrain *train);

// Let the trains pass through each other with equal spacing, every
// collision having angle `theta`.
//
// # Safety
// `train` must be a live handle.
enum HsStatus hs_spin_train_cascade(struct HsSpinTrain *train, double theta);

// Number of slots and amplitudes (`2^slots`).
//
// # Safety
// `train` must be a live handle; outputs must be null or valid for writes.
enum HsStatus hs_spin_train_shape(const struct HsSpinTrain *train,
                                  size_t *slots,
                                  size_t *amplitudes);

// Copy the amplitudes into `re` and `im`, each of length `len`. Index `i`
// has slot `s` down when bit `slots-1-s` of `i` is set.
//
// # Safety
// `train` must be a live handle; `re` and `im` must point to `len` writable
// doubles.
enum HsStatus hs_spin_train_amplitudes(const struct HsSpinTrain *train,
                                       double *re,
                                       double *im,
                                       size_t len);

// Purity of the reduced spin state in `slot`.
//
// # Safety
// `train` must be a live handle; `value` must be valid for writes.
enum HsStatus hs_spin_train_purity(const struct HsSpinTrain *train, size_t slot, double *value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HUBBARD_SCATTER_H */
