#ifndef NNVQE_H
#define NNVQE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NnvqeStatus {
  NNVQE_STATUS_OK = 0,
  NNVQE_STATUS_NULL_POINTER = 1,
  NNVQE_STATUS_CONFIG = 2,
  NNVQE_STATUS_STRUCTURAL = 3,
  NNVQE_STATUS_USAGE = 4,
  NNVQE_STATUS_DOMAIN = 5,
  NNVQE_STATUS_RESOURCE = 6,
  NNVQE_STATUS_NUMERICAL = 7,
  NNVQE_STATUS_CONSISTENCY = 8,
  NNVQE_STATUS_PARSE = 9,
  NNVQE_STATUS_IO = 10,
  NNVQE_STATUS_BUFFER_TOO_SMALL = 11,
  NNVQE_STATUS_PANIC = 12,
} NnvqeStatus;

typedef enum NnvqeEncoderKind {
  NNVQE_ENCODER_KIND_MLP = 0,
  NNVQE_ENCODER_KIND_AFFINE = 1,
  NNVQE_ENCODER_KIND_DIRECT = 2,
} NnvqeEncoderKind;

typedef struct NnvqeCircuit NnvqeCircuit;

typedef struct NnvqeEncoder NnvqeEncoder;

/**
 * XXZ Hamiltonian (or any Pauli sum) on a fixed register.
 */
typedef struct NnvqeHamiltonian NnvqeHamiltonian;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *nnvqe_version(void);

/**
 * Copies the calling thread's last error message (NUL-terminated,
 * truncated to `len`) into `buf` and returns its full length in bytes,
 * excluding the terminator. `buf` may be null to query the length.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t nnvqe_last_error_message(char *buf, size_t len);

/**
 * Periodic XXZ chain `Σ XX + YY + Δ ZZ + λ Σ Z` on `n_qubits` sites.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum NnvqeStatus nnvqe_hamiltonian_xxz(size_t n_qubits,
                                       double delta,
                                       double lambda,
                                       struct NnvqeHamiltonian **out);

/**
 * # Safety
 * `h` must be null or a handle from `nnvqe_hamiltonian_xxz` not yet freed.
 */
void nnvqe_hamiltonian_free(struct NnvqeHamiltonian *h);

/**
 * Lowest eigenvalue by exact diagonalization.
 *
 * # Safety
 * `h` must be a live handle and `energy_out` writable.
 */
enum NnvqeStatus nnvqe_exact_ground_energy(const struct NnvqeHamiltonian *h, double *energy_out);

/**
 * Ladder hardware-efficient ansatz with `3n + 5n·depth` parameters.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum NnvqeStatus nnvqe_circuit_hea(size_t n_qubits, size_t depth, struct NnvqeCircuit **out);

/**
 * MERA-style circuit; `n_qubits` must be a power of two.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum NnvqeStatus nnvqe_circuit_mera(size_t n_qubits, size_t depth, struct NnvqeCircuit **out);

/**
 * # Safety
 * `c` must be null or a live circuit handle.
 */
void nnvqe_circuit_free(struct NnvqeCircuit *c);

/**
 * Number of rotation angles; 0 for a null handle.
 *
 * # Safety
 * `c` must be null or a live circuit handle.
 */
size_t nnvqe_circuit_n_params(const struct NnvqeCircuit *c);

/**
 * `⟨ψ(θ)|H|ψ(θ)⟩`.
 *
 * # Safety
 * Handles must be live, `theta` must hold `theta_len` values and
 * `energy_out` must be writable.
 */
enum NnvqeStatus nnvqe_energy(const struct NnvqeCircuit *c,
                              const struct NnvqeHamiltonian *h,
                              const double *theta,
                              size_t theta_len,
                              double *energy_out);

/**
 * Energy and its gradient with respect to every angle.
 *
 * # Safety
 * Handles must be live, `theta` must hold `theta_len` values, `grad_out`
 * must have room for `grad_len` values and `energy_out` must be writable.
 */
enum NnvqeStatus nnvqe_gradient(const struct NnvqeCircuit *c,
                                const struct NnvqeHamiltonian *h,
                                const double *theta,
                                size_t theta_len,
                                double *energy_out,
                                double *grad_out,
                                size_t grad_len);

/**
 * Freshly initialized encoder. `hidden_dim` and `dropout` are ignored
 * for the affine and direct kinds.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum NnvqeStatus nnvqe_encoder_new(enum NnvqeEncoderKind kind,
                                   size_t input_dim,
                                   size_t hidden_dim,
                                   size_t output_dim,
                                   double dropout,
                                   uint64_t seed,
                                   struct NnvqeEncoder **out);

/**
 * Reads a checkpoint written by `nnvqe_encoder_save` or the CLI.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid handle slot.
 */
enum NnvqeStatus nnvqe_encoder_load(const char *path, struct NnvqeEncoder **out);

/**
 * # Safety
 * `e` must be a live handle and `path` a NUL-terminated string.
 */
enum NnvqeStatus nnvqe_encoder_save(const struct NnvqeEncoder *e, const char *path);

/**
 * # Safety
 * `e` must be null or a live encoder handle.
 */
void nnvqe_encoder_free(struct NnvqeEncoder *e);

/**
 * Length of the encoder's output; 0 for a null handle.
 *
 * # Safety
 * `e` must be null or a live encoder handle.
 */
size_t nnvqe_encoder_output_dim(const struct NnvqeEncoder *e);

/**
 * Eval-mode circuit angles for the Hamiltonian parameters `lambda`.
 *
 * # Safety
 * `e` must be a live handle, `lambda` must hold `lambda_len` values and
 * `theta_out` must have room for `theta_len` values.
 */
enum NnvqeStatus nnvqe_encoder_predict(const struct NnvqeEncoder *e,
                                       const double *lambda,
                                       size_t lambda_len,
                                       double *theta_out,
                                       size_t theta_len);

/**
 * Saturation-field boundary `1 + Δ`.
 */
double nnvqe_phase_boundary_hs(double delta);

/**
 * Lower critical field for `Δ ≥ 1`.
 *
 * # Safety
 * `out` must be writable.
 */
enum NnvqeStatus nnvqe_phase_boundary_hc(double delta, double *out);

/**
 * Runs an experiment config file. `out_dir` may be null to use the
 * config's own output location.
 *
 * # Safety
 * `config_path` must be a NUL-terminated string; `out_dir` must be null or
 * NUL-terminated.
 */
enum NnvqeStatus nnvqe_run_config(const char *config_path, const char *out_dir);

/**
 * Exit-status convention of the command-line tool for a status code.
 */
int32_t nnvqe_exit_code(enum NnvqeStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NNVQE_H */
