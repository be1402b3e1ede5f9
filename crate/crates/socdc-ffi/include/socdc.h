#ifndef SOCDC_H
#define SOCDC_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SocdcStatus {
  SOCDC_STATUS_OK = 0,
  SOCDC_STATUS_NULL_POINTER = 1,
  SOCDC_STATUS_INVALID_INPUT = 2,
  /**
   * A sufficient condition failed or a precondition was not met.
   */
  SOCDC_STATUS_CONDITION_FAILED = 3,
  SOCDC_STATUS_INDETERMINATE = 4,
  SOCDC_STATUS_NUMERICAL = 5,
  SOCDC_STATUS_BUFFER_TOO_SMALL = 6,
  SOCDC_STATUS_PANIC = 7,
} SocdcStatus;

typedef enum SocdcVerdict {
  SOCDC_VERDICT_VERIFIED = 0,
  SOCDC_VERDICT_INDETERMINATE = 1,
  SOCDC_VERDICT_FAILED = 2,
} SocdcVerdict;

/**
 * Opaque cut handle.
 */
typedef struct SocdcCut SocdcCut;

/**
 * Opaque instance handle.
 */
typedef struct SocdcInstance SocdcInstance;

typedef struct SocdcOptions {
  double tol;
  uint64_t seed;
  size_t budget;
  size_t samples;
} SocdcOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call into the library on the same thread.
 */
const char *socdc_last_error_message(void);

/**
 * Static, NUL-terminated version string.
 */
const char *socdc_version(void);

struct SocdcOptions socdc_options_default(void);

/**
 * Build an instance from row-major `n × n` matrices `a0` and `a1`. `h` may
 * be null (homogeneous instance) or point to `n` doubles; `opts` may be
 * null for defaults.
 *
 * # Safety
 * Non-null pointers must be valid for the stated number of elements.
 */
enum SocdcStatus socdc_instance_new(size_t n,
                                    const double *a0,
                                    const double *a1,
                                    const double *h,
                                    const struct SocdcOptions *opts,
                                    struct SocdcInstance **out);

/**
 * Build an instance from the JSON instance format used by the CLI.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SocdcStatus socdc_instance_from_json(const char *json, struct SocdcInstance **out);

/**
 * Dimension of the instance, 0 for a null handle.
 *
 * # Safety
 * `inst` must be null or a live handle.
 */
size_t socdc_instance_dim(const struct SocdcInstance *inst);

/**
 * # Safety
 * `inst` must be null or a handle not yet freed.
 */
void socdc_instance_free(struct SocdcInstance *inst);

/**
 * Run the condition checks and compute the cut. A cut is returned even
 * when a later condition fails; inspect [`socdc_cut_verdict`].
 *
 * # Safety
 * `inst` must be a live handle and `out` a valid pointer.
 */
enum SocdcStatus socdc_build_cut(const struct SocdcInstance *inst, struct SocdcCut **out);

/**
 * # Safety
 * `cut` must be null or a handle not yet freed.
 */
void socdc_cut_free(struct SocdcCut *cut);

/**
 * The pencil parameter `s`, NaN for a null handle.
 *
 * # Safety
 * `cut` must be null or a live handle.
 */
double socdc_cut_s(const struct SocdcCut *cut);

/**
 * # Safety
 * `cut` must be null or a live handle.
 */
size_t socdc_cut_dim(const struct SocdcCut *cut);

/**
 * Whether the cut degenerated to the halfspace `b_sᵀx ≥ 0`.
 *
 * # Safety
 * `cut` must be null or a live handle.
 */
bool socdc_cut_is_halfspace(const struct SocdcCut *cut);

/**
 * # Safety
 * `cut` must be null or a live handle.
 */
enum SocdcVerdict socdc_cut_verdict(const struct SocdcCut *cut);

/**
 * Number of columns of `B_s`.
 *
 * # Safety
 * `cut` must be null or a live handle.
 */
size_t socdc_cut_bs_cols(const struct SocdcCut *cut);

/**
 * Copy `A_s` (row-major, `n²` doubles) into `out`.
 *
 * # Safety
 * `out` must be valid for `len` doubles.
 */
enum SocdcStatus socdc_cut_as(const struct SocdcCut *cut, double *out, size_t len);

/**
 * Copy `b_s` (`n` doubles) into `out`.
 *
 * # Safety
 * `out` must be valid for `len` doubles.
 */
enum SocdcStatus socdc_cut_bs(const struct SocdcCut *cut, double *out, size_t len);

/**
 * Copy `B_s` (row-major, `n × socdc_cut_bs_cols` doubles) into `out`.
 *
 * # Safety
 * `out` must be valid for `len` doubles.
 */
enum SocdcStatus socdc_cut_big_bs(const struct SocdcCut *cut, double *out, size_t len);

/**
 * Whether `x` satisfies the cut within `tol`, written to `inside`.
 *
 * # Safety
 * `x` must be valid for `n` doubles, `inside` for one bool.
 */
enum SocdcStatus socdc_cut_contains(const struct SocdcCut *cut,
                                    const double *x,
                                    size_t n,
                                    double tol,
                                    bool *inside);

/**
 * The cut as a JSON document, same layout as `socdc cut`. Release with
 * [`socdc_string_free`].
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SocdcStatus socdc_cut_to_json(const struct SocdcCut *cut, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void socdc_string_free(char *s);

/**
 * Minimize `yᵀQy + 2gᵀy` over `‖y‖ ≤ 1`. `q` is row-major `m × m`, `g`
 * and `y` have `m` entries. `opts` may be null.
 *
 * # Safety
 * Pointers must be valid for the stated number of elements.
 */
enum SocdcStatus socdc_trs_solve(size_t m,
                                 const double *q,
                                 const double *g,
                                 const struct SocdcOptions *opts,
                                 double *value,
                                 double *y);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SOCDC_H */
