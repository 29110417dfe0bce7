#ifndef BILLIARDS_H
#define BILLIARDS_H

/* Generated by cbindgen from the billiards-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Dirichlet boundary condition selector.
#define BL_BC_DIRICHLET 0

// Neumann boundary condition selector.
#define BL_BC_NEUMANN 1

// Opaque domain handle.
typedef struct bl_domain_t bl_domain_t;

// Error codes returned by every fallible call.
typedef int32_t bl_error_t;

#define BL_OK 0

// A required pointer argument was NULL.
#define BL_ERR_NULL_ARGUMENT 1

// The domain name is not in the catalog.
#define BL_ERR_UNKNOWN_DOMAIN 2

// Label length does not match the domain dimension.
#define BL_ERR_ARITY 3

// Label violates the boundary-condition index rule.
#define BL_ERR_INDEX_RULE 4

// The trajectory hit a corner/edge and was annihilated.
#define BL_ERR_TERMINAL_ORBIT 5

// The ray-tracing oracle disagrees with the lattice construction.
#define BL_ERR_ORACLE_DISAGREEMENT 6

// The tracer ran out of its collision budget before closing.
#define BL_ERR_BUDGET_EXHAUSTED 7

// An output buffer is too small for the requested data.
#define BL_ERR_BUFFER_TOO_SMALL 8

// Any other invalid input or internal failure (see the error message).
#define BL_ERR_INVALID_INPUT 9

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Returns the thread-local message describing the most recent failure on
// this thread.  The pointer stays valid until the next failing call.
const char *bl_last_error_message(void);

// Looks up a catalog domain by name (e.g. "square", "k-tetra") and returns
// an owned handle through `out`.  Free it with `bl_domain_free`.
//
// # Safety
// `name` must be a NUL-terminated string; `out` must be a valid pointer.
bl_error_t bl_domain_new(const char *name, bl_domain_t **out);

// Releases a handle from `bl_domain_new`.  NULL is a no-op.
//
// # Safety
// `domain` must be NULL or a pointer previously returned by
// `bl_domain_new` that has not been freed.
void bl_domain_free(bl_domain_t *domain);

// Spatial dimension of the domain (2 or 3).
//
// # Safety
// `domain` and `out` must be valid pointers.
bl_error_t bl_domain_dimension(const bl_domain_t *domain, uint32_t *out);

// Amplitude squared of the orbit family `label`: the integer bilinear form
// of the label, equal to |V|^2/4 for the unfolded lattice vector V.
//
// # Safety
// `domain`, `label` (length `label_len`), and `out` must be valid.
bl_error_t bl_amplitude_squared(const bl_domain_t *domain,
                                const int64_t *label,
                                uintptr_t label_len,
                                int64_t *out);

// Number of boundary collisions of the orbit family `label` (2-D domains).
//
// # Safety
// `domain`, `label` (length `label_len`), and `out` must be valid.
bl_error_t bl_collision_count(const bl_domain_t *domain,
                              const int64_t *label,
                              uintptr_t label_len,
                              int64_t *out);

// Quantum energy of `label` under the given boundary condition, in the
// domain's dimensionless integer convention.
//
// # Safety
// `domain`, `label` (length `label_len`), and `out` must be valid.
bl_error_t bl_energy(const bl_domain_t *domain,
                     const int64_t *label,
                     uintptr_t label_len,
                     int32_t bc,
                     int64_t *out);

// Writes the first `count` energy levels (with multiplicity) into
// `out_values`, which must hold at least `count` entries.
//
// # Safety
// `domain` must be valid; `out_values` must point to `capacity` writable
// `int64_t` slots.
bl_error_t bl_spectrum(const bl_domain_t *domain,
                       int32_t bc,
                       uintptr_t count,
                       int64_t *out_values,
                       uintptr_t capacity);

// Replays `label` through the ray-tracing oracle.  On success the traced
// collision count and path length are written to the out parameters and the
// trace agreed with the lattice construction; disagreements map to
// `BL_ERR_ORACLE_DISAGREEMENT`.
//
// # Safety
// `domain` and `label` must be valid; `out_collisions` and
// `out_path_length` may be NULL when the caller only wants the verdict.
bl_error_t bl_verify_label(const bl_domain_t *domain,
                           const int64_t *label,
                           uintptr_t label_len,
                           uint64_t *out_collisions,
                           double *out_path_length);

// Genus of the invariant surface of a rational polygon whose interior
// angles are `numerators[i]/denominators[i] * pi`.  A genus of 1 marks the
// integrable domains.
//
// # Safety
// `numerators` and `denominators` must point to `count` entries; `out`
// must be valid.
bl_error_t bl_genus(const uint64_t *numerators,
                    const uint64_t *denominators,
                    uintptr_t count,
                    uint64_t *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* BILLIARDS_H */
