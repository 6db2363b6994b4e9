#ifndef RANKONE_H
#define RANKONE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RoField {
  RO_FIELD_REAL = 0,
  RO_FIELD_COMPLEX = 1,
} RoField;

typedef enum RoStatus {
  RO_STATUS_OK = 0,
  RO_STATUS_NULL_POINTER = 1,
  RO_STATUS_INVALID_ARGUMENT = 2,
  RO_STATUS_SHAPE = 3,
  RO_STATUS_DOMAIN = 4,
  RO_STATUS_ZERO_INPUT = 5,
  RO_STATUS_UNSUPPORTED_FIELD = 6,
  RO_STATUS_BUDGET = 7,
  RO_STATUS_PANIC = 8,
} RoStatus;

// Opaque homogeneous polynomial.
typedef struct RoPoly RoPoly;

// Opaque dense tensor.
typedef struct RoTensor RoTensor;

// Lower and upper bound of the best rank-one approximation ratio.
typedef struct RoBounds {
  double lower;
  double upper;
  // Smallest upper bound among all components.
  double sharpest_upper;
  // Nonzero when `upper >= 1`.
  int32_t vacuous;
} RoBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` (NUL-terminated,
// truncated to `len`) and returns the full message length without the NUL.
// Returns 0 when the last call succeeded.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t ro_last_error_message(char *buf, size_t len);

// Library version as a static NUL-terminated string.
const char *ro_version(void);

// Builds a real tensor from row-major `data` of `prod(shape)` entries.
//
// # Safety
// `shape` must point to `order` values and `data` to `len` values.
enum RoStatus ro_tensor_new_real(const size_t *shape,
                                 size_t order,
                                 const double *data,
                                 size_t len,
                                 struct RoTensor **out);

// Builds a complex tensor from row-major real and imaginary parts.
//
// # Safety
// `shape` must point to `order` values, `re` and `im` to `len` values each.
enum RoStatus ro_tensor_new_complex(const size_t *shape,
                                    size_t order,
                                    const double *re,
                                    const double *im,
                                    size_t len,
                                    struct RoTensor **out);

// The `n × n` identity matrix.
//
// # Safety
// `out` must be a valid pointer.
enum RoStatus ro_tensor_identity(size_t n, struct RoTensor **out);

// # Safety
// `t` must be null or a handle from this library not yet freed.
void ro_tensor_free(struct RoTensor *t);

// Writes the order of `t` to `out`.
//
// # Safety
// `t` must be a live handle and `out` a valid pointer.
enum RoStatus ro_tensor_order(const struct RoTensor *t, size_t *out);

// # Safety
// `t` must be a live handle and `out` a valid pointer.
enum RoStatus ro_tensor_frobenius_norm(const struct RoTensor *t, double *out);

// Multi-start estimate of the spectral norm; `starts == 0` keeps the default.
//
// # Safety
// `t` must be a live handle and `out` a valid pointer.
enum RoStatus ro_tensor_spectral_norm(const struct RoTensor *t,
                                      size_t starts,
                                      uint64_t seed,
                                      double *out);

// Spectral over Frobenius norm.
//
// # Safety
// `t` must be a live handle and `out` a valid pointer.
enum RoStatus ro_tensor_ratio(const struct RoTensor *t, size_t starts, uint64_t seed, double *out);

// Builds a real form in `n` variables of degree `d`; `coeffs` lists the
// monomial coefficients in graded lexicographic order.
//
// # Safety
// `coeffs` must point to `len` values and `out` be a valid pointer.
enum RoStatus ro_poly_new_real(size_t n,
                               uint32_t d,
                               const double *coeffs,
                               size_t len,
                               struct RoPoly **out);

// Draws a Kostlan form from the stream `(seed, index)`.
//
// # Safety
// `out` must be a valid pointer.
enum RoStatus ro_poly_kostlan(uint32_t d,
                              size_t n,
                              enum RoField field,
                              uint64_t seed,
                              uint64_t index,
                              struct RoPoly **out);

// # Safety
// `f` must be null or a handle from this library not yet freed.
void ro_poly_free(struct RoPoly *f);

// Bombieri–Weyl norm.
//
// # Safety
// `f` must be a live handle and `out` a valid pointer.
enum RoStatus ro_poly_bw_norm(const struct RoPoly *f, double *out);

// Multi-start estimate of `max |f|` on the unit sphere of the form's field.
//
// # Safety
// `f` must be a live handle and `out` a valid pointer.
enum RoStatus ro_poly_uniform_norm(const struct RoPoly *f,
                                   size_t starts,
                                   uint64_t seed,
                                   double *out);

// # Safety
// `f` must be a live handle and `out` a valid pointer.
enum RoStatus ro_poly_ratio(const struct RoPoly *f, size_t starts, uint64_t seed, double *out);

// Bounds for symmetric tensors of order `d` over `K^n`.
//
// # Safety
// `out` must be a valid pointer.
enum RoStatus ro_bounds_symmetric(uint32_t d, uint32_t n, enum RoField field, struct RoBounds *out);

// Bounds for general tensors of the given shape.
//
// # Safety
// `shape` must point to `order` values and `out` be a valid pointer.
enum RoStatus ro_bounds_general(const size_t *shape,
                                size_t order,
                                enum RoField field,
                                struct RoBounds *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RANKONE_H */
