#ifndef EIKONAL_H
#define EIKONAL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EkStatus {
  EK_OK = 0,
  EK_ERR_NULL = 1,
  EK_ERR_UTF8 = 2,
  EK_ERR_SYNTAX = 3,
  EK_ERR_UNDECLARED = 4,
  EK_ERR_CONSTRAINT = 5,
  EK_ERR_INCONCLUSIVE = 6,
  EK_ERR_DOMAIN = 7,
  EK_ERR_INTERNAL = 8,
} EkStatus;

typedef enum EkVerdict {
  EK_ZERO = 0,
  EK_NONZERO = 1,
  EK_UNKNOWN = 2,
} EkVerdict;

/**
 * A parsed right-hand side bound to the session it was parsed in.
 */
typedef struct EkExpr EkExpr;

/**
 * Declarations plus the last error message.
 */
typedef struct EkSession EkSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

struct EkSession *ek_session_new(void);

/**
 * # Safety
 * `s` must come from `ek_session_new` and not be used afterwards.
 */
void ek_session_free(struct EkSession *s);

/**
 * Applies declaration lines such as `opaque h(ut)` or `param m positive`.
 *
 * # Safety
 * `s` must be a live session and `text` a NUL-terminated string.
 */
enum EkStatus ek_declare(struct EkSession *s, const char *text);

/**
 * Parses a right-hand side; on success `*out` holds a handle to release
 * with `ek_expr_free`.
 *
 * # Safety
 * `s` must be a live session, `text` a NUL-terminated string and `out`
 * writable.
 */
enum EkStatus ek_parse(struct EkSession *s, const char *text, struct EkExpr **out);

/**
 * # Safety
 * `e` must come from `ek_parse` and not be used afterwards.
 */
void ek_expr_free(struct EkExpr *e);

/**
 * Canonical text of an expression, or null for a null handle.
 *
 * # Safety
 * `e` must be a live expression handle.
 */
char *ek_print(const struct EkExpr *e);

/**
 * Classifies a right-hand side; `*json_out` receives the classification
 * as JSON.
 *
 * # Safety
 * `s` must be a live session, `e` a live expression and `json_out`
 * writable.
 */
enum EkStatus ek_classify(struct EkSession *s, const struct EkExpr *e, char **json_out);

/**
 * Decides whether the operator `field` (surface syntax, `n` spatial
 * variables) is a symmetry of `u_a u_a = F`.
 *
 * # Safety
 * `s` must be a live session, `field` a NUL-terminated string, `rhs` a
 * live expression and `verdict` writable.
 */
enum EkStatus ek_verify_symmetry(struct EkSession *s,
                                 const char *field,
                                 const struct EkExpr *rhs,
                                 uint32_t n,
                                 enum EkVerdict *verdict);

/**
 * # Safety
 * `p` must come from this library and not be used afterwards.
 */
void ek_string_free(char *p);

/**
 * Message of the last failed call on `s`; empty after a success. The
 * pointer stays valid until the next call on the same session.
 *
 * # Safety
 * `s` must be a live session or null.
 */
const char *ek_last_error(const struct EkSession *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EIKONAL_H */
