/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef CMCURVE_H
#define CMCURVE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Version of this C interface; bumped on incompatible changes.
 */
#define CM_ABI_VERSION 1

/*
 Status codes returned by every fallible function.
 */
typedef enum CmStatus {
  CM_STATUS_OK = 0,
  /*
   A required pointer argument was null.
   */
  CM_STATUS_NULL_POINTER = 1,
  /*
   Malformed JSON, schema violation or invalid value.
   */
  CM_STATUS_INVALID_INPUT = 2,
  /*
   A rational part is not invertible at a prime of the level.
   */
  CM_STATUS_PRECISION_OBSTRUCTION = 3,
  /*
   The level is not coprime to 2 times the product of the support.
   */
  CM_STATUS_LEVEL_OBSTRUCTION = 4,
  /*
   A rational is not a norm.
   */
  CM_STATUS_NORM_OBSTRUCTION = 5,
  /*
   A point's orbit is not in the shadow's support.
   */
  CM_STATUS_UNSUPPORTED_ORBIT = 6,
  /*
   A lift table violates the relation R.
   */
  CM_STATUS_RELATION_VIOLATION = 7,
  /*
   A subgroup is not subdirect.
   */
  CM_STATUS_NOT_SUBDIRECT = 8,
  /*
   The library panicked; this is a bug.
   */
  CM_STATUS_PANIC = 9,
} CmStatus;

/*
 Opaque point `[τ, a]` at level N.
 */
typedef struct CmPoint CmPoint;

/*
 Opaque Galois shadow.
 */
typedef struct CmShadow CmShadow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Version of the C interface.
 */
uint32_t cm_abi_version(void);

/*
 Message of the last failed call on this thread ("" after a success).
 The pointer stays valid until the next call on the same thread.
 */
const char *cm_last_error(void);

/*
 Release a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not have been freed.
 */
void cm_string_free(char *s);

/*
 Parse a point from its JSON encoding.

 # Safety
 `json` is a nul-terminated string; `out` is writable.
 */
enum CmStatus cm_point_from_json(const char *json, struct CmPoint **out_point);

/*
 JSON encoding of the canonical representative of a point.

 # Safety
 `p` is a live handle; `out` is writable.
 */
enum CmStatus cm_point_to_json(const struct CmPoint *p, char **out_json);

/*
 Release a point. Null is ignored.

 # Safety
 `p` comes from this library and has not been freed.
 */
void cm_point_free(struct CmPoint *p);

/*
 Exact equality of points.

 # Safety
 Handles are live; `out` is writable.
 */
enum CmStatus cm_point_eq(const struct CmPoint *a, const struct CmPoint *b, bool *out_eq);

/*
 Equality in the approximate quotient.

 # Safety
 Handles are live; `out` is writable.
 */
enum CmStatus cm_point_approx_eq(const struct CmPoint *a, const struct CmPoint *b, bool *out_eq);

/*
 Component of a point, a unit mod N.

 # Safety
 `p` is live; `out` is writable.
 */
enum CmStatus cm_point_component(const struct CmPoint *p, uint64_t *out_mu);

/*
 Level of a point.

 # Safety
 `p` is live; `out` is writable.
 */
enum CmStatus cm_point_level(const struct CmPoint *p, uint64_t *out_level);

/*
 `g * P` for a unit matrix `g = (g[0] g[1]; g[2] g[3])` mod N.

 # Safety
 `p` is live; `g` points to 4 integers; `out` is writable.
 */
enum CmStatus cm_point_act_unit(const struct CmPoint *p,
                                const int64_t *g,
                                struct CmPoint **out_point);

/*
 Whether the unit matrix `g` fixes the point.

 # Safety
 `p` is live; `g` points to 4 integers; `out` is writable.
 */
enum CmStatus cm_point_is_fixed(const struct CmPoint *p, const int64_t *g, bool *out_fixed);

/*
 Image of a point at a level dividing its own.

 # Safety
 `p` is live; `out` is writable.
 */
enum CmStatus cm_point_project(const struct CmPoint *p, uint64_t level, struct CmPoint **out_point);

/*
 Parse a shadow from its JSON encoding.

 # Safety
 `json` is a nul-terminated string; `out` is writable.
 */
enum CmStatus cm_shadow_from_json(const char *json, struct CmShadow **out_shadow);

/*
 JSON encoding of a shadow.

 # Safety
 `s` is live; `out` is writable.
 */
enum CmStatus cm_shadow_to_json(const struct CmShadow *s, char **out_json);

/*
 Release a shadow. Null is ignored.

 # Safety
 `s` comes from this library and has not been freed.
 */
void cm_shadow_free(struct CmShadow *s);

/*
 Equality of shadows modulo the torus.

 # Safety
 Handles are live; `out` is writable.
 */
enum CmStatus cm_shadow_eq(const struct CmShadow *a, const struct CmShadow *b, bool *out_eq);

/*
 Branch of a shadow, +1 or -1.

 # Safety
 `s` is live; `out` is writable.
 */
enum CmStatus cm_shadow_branch(const struct CmShadow *s, int8_t *out_branch);

/*
 Action of a shadow on a point.

 # Safety
 Handles are live; `out` is writable.
 */
enum CmStatus cm_shadow_act(const struct CmShadow *s,
                            const struct CmPoint *p,
                            struct CmPoint **out_point);

/*
 The relation R on `(s1, s2, t1, t2)`; on success `*out_lambda` is the
 witness determinant, or 0 when R fails.

 # Safety
 Handles are live; out-pointers are writable.
 */
enum CmStatus cm_relation(const struct CmPoint *s1,
                          const struct CmPoint *s2,
                          const struct CmPoint *t1,
                          const struct CmPoint *t2,
                          bool *out_holds,
                          uint64_t *out_lambda);

/*
 Run a JSON command (`point-eq`, `orbit`, `fixed`, `act`, `relation`,
 `lift`) exactly as the command-line tool does.

 # Safety
 Strings are nul-terminated; `out` is writable.
 */
enum CmStatus cm_command(const char *command, const char *input_json, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CMCURVE_H */
