#ifndef QUANTUM_BERTRAND_H
#define QUANTUM_BERTRAND_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum QbStatus {
  QB_STATUS_OK = 0,
  QB_STATUS_NULL_POINTER = 1,
  QB_STATUS_INVALID_PARAMETER = 2,
  QB_STATUS_NEGATIVE_DISCRIMINANT = 3,
  QB_STATUS_NOT_NORMALIZABLE = 4,
  QB_STATUS_DIVERGENT_NORM = 5,
  QB_STATUS_GRID_TOO_COARSE = 6,
  QB_STATUS_NO_SIGN_CHANGE = 7,
  QB_STATUS_WRONG_ALPHA = 8,
  QB_STATUS_DEGENERATE_COEFFICIENT = 9,
  QB_STATUS_COMPLEX_ROOTS = 10,
  QB_STATUS_TURNING_POINT_ON_GRID = 11,
  QB_STATUS_BUFFER_TOO_SMALL = 12,
  QB_STATUS_PANIC = 13,
} QbStatus;

typedef enum QbBranch {
  QB_BRANCH_PLUS = 0,
  QB_BRANCH_MINUS = 1,
} QbBranch;

typedef enum QbAlphaClass {
  QB_ALPHA_CLASS_COULOMB = 0,
  QB_ALPHA_CLASS_OSCILLATOR = 1,
  QB_ALPHA_CLASS_NOT_CONSTANT_INDEPENDENT = 2,
} QbAlphaClass;

/**
 * Opaque family member.
 */
typedef struct QbFamily QbFamily;

/**
 * Opaque radial wavefunction.
 */
typedef struct QbWavefunction QbWavefunction;

/**
 * hbar, mass, Coulomb strength and oscillator frequency.
 */
typedef struct QbConstants {
  double hbar;
  double mass;
  double coulomb_strength;
  double omega;
} QbConstants;

/**
 * Couplings of `V(r) = E + g1 r^e1 + g2 r^e2 + g3 r^e3`.
 */
typedef struct QbCouplings {
  double g1;
  double g2;
  double g3;
  double e1;
  double e2;
  double e3;
} QbCouplings;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Natural units: all constants 1.
 */
struct QbConstants qb_constants_natural(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qb_version(void);

/**
 * Length in bytes of the last error message on this thread, excluding the
 * terminating NUL; 0 when there is none.
 */
size_t qb_last_error_length(void);

/**
 * Copies the last error message into `buf` (NUL-terminated). Returns
 * `BufferTooSmall` when `len` cannot hold it.
 *
 * # Safety
 * `buf` must be valid for `len` bytes of writes.
 */
enum QbStatus qb_last_error_message(char *buf, size_t len);

/**
 * Builds a family member. `constants` may be null for natural units.
 *
 * # Safety
 * `constants` is null or valid; `out` is valid for a write.
 */
enum QbStatus qb_family_new(double alpha,
                            double a,
                            double b,
                            double c,
                            double epsilon,
                            double lambda,
                            double l,
                            const struct QbConstants *constants_ptr,
                            struct QbFamily **out);

/**
 * Coulomb member for level (n, l) with epsilon on the decaying branch.
 *
 * # Safety
 * As for [`qb_family_new`].
 */
enum QbStatus qb_family_coulomb(uint32_t n,
                                uint32_t l,
                                const struct QbConstants *constants_ptr,
                                double lambda,
                                struct QbFamily **out);

/**
 * Oscillator member for level (n, l).
 *
 * # Safety
 * As for [`qb_family_new`].
 */
enum QbStatus qb_family_oscillator(uint32_t n,
                                   uint32_t l,
                                   const struct QbConstants *constants_ptr,
                                   double lambda,
                                   struct QbFamily **out);

/**
 * Releases a family handle; null is ignored.
 *
 * # Safety
 * `family` is null or a live handle, not used afterwards.
 */
void qb_family_free(struct QbFamily *family);

/**
 * Replaces epsilon by `eps_n` on the given branch.
 *
 * # Safety
 * `family` is a live handle.
 */
enum QbStatus qb_family_set_level(struct QbFamily *family, uint32_t n, enum QbBranch br);

/**
 * # Safety
 * `family` is a live handle; `out` is valid for a write.
 */
enum QbStatus qb_family_epsilon(const struct QbFamily *family, double *out);

/**
 * # Safety
 * `family` is a live handle; `out` is valid for a write.
 */
enum QbStatus qb_family_couplings(const struct QbFamily *family, struct QbCouplings *out);

/**
 * `V(r)` at the given energy.
 *
 * # Safety
 * `family` is a live handle; `out` is valid for a write.
 */
enum QbStatus qb_family_potential(const struct QbFamily *family,
                                  double energy,
                                  double r,
                                  double *out);

/**
 * Energy of the exponential-map potential built from this member.
 *
 * # Safety
 * `family` is a live handle; `out` is valid for a write.
 */
enum QbStatus qb_family_pct_energy(const struct QbFamily *family, double *out);

/**
 * # Safety
 * `constants` is null or valid; `out` is valid for a write.
 */
enum QbStatus qb_energy_coulomb(uint32_t n,
                                uint32_t l,
                                const struct QbConstants *constants_ptr,
                                double lambda,
                                double *out);

/**
 * # Safety
 * `constants` is null or valid; `out` is valid for a write.
 */
enum QbStatus qb_energy_oscillator(uint32_t n,
                                   uint32_t l,
                                   const struct QbConstants *constants_ptr,
                                   double *out);

enum QbAlphaClass qb_classify_alpha(double alpha);

/**
 * Wavefunction of level `n` for the family's current parameters.
 *
 * # Safety
 * `family` is a live handle; `out` is valid for a write.
 */
enum QbStatus qb_wavefunction_new(const struct QbFamily *family,
                                  uint32_t n,
                                  struct QbWavefunction **out);

/**
 * Normalizes in place over `[r_min, r_max]` with `n_points` nodes.
 *
 * # Safety
 * `wf` is a live handle.
 */
enum QbStatus qb_wavefunction_normalize(struct QbWavefunction *wf,
                                        double r_min,
                                        double r_max,
                                        size_t n_points);

/**
 * `psi(r)`.
 *
 * # Safety
 * `wf` is a live handle; `out` is valid for a write.
 */
enum QbStatus qb_wavefunction_eval(const struct QbWavefunction *wf, double r, double *out);

/**
 * # Safety
 * `wf` is null or a live handle, not used afterwards.
 */
void qb_wavefunction_free(struct QbWavefunction *wf);

/**
 * Lowest `count` finite-difference levels of `V` into `energies[0..count]`.
 * `potential(r, user_data)` returns `V(r)` in natural units.
 *
 * # Safety
 * `energies` is valid for `count` writes; `potential` is safe to call with
 * `user_data`.
 */
enum QbStatus qb_fd_spectrum(double (*potential)(double, void*),
                             void *user_data,
                             uint32_t l,
                             double r_min,
                             double r_max,
                             size_t n_points,
                             size_t count,
                             double *energies);

/**
 * Numerov shooting for the single level inside `[e_lo, e_hi]`.
 *
 * # Safety
 * `out` is valid for a write; `potential` is safe to call with `user_data`.
 */
enum QbStatus qb_numerov_eigen(double (*potential)(double, void*),
                               void *user_data,
                               uint32_t l,
                               double r_min,
                               double r_max,
                               size_t n_points,
                               double e_lo,
                               double e_hi,
                               double *out);

/**
 * Runs the verification checks (`only` may be null for all groups) and
 * reports how many passed.
 *
 * # Safety
 * `only` is null or a NUL-terminated string; outputs are valid for writes.
 */
enum QbStatus qb_run_checks(uint64_t seed, const char *only, size_t *passed, size_t *total);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUANTUM_BERTRAND_H */
