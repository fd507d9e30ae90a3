/* C interface for the plofc fault localization pipeline.
 *
 * Every function returns a PlofcStatus. On any non-zero status,
 * plofc_last_error_message() describes the failure; the pointer stays valid
 * until the next library call on the same thread. Strings returned through
 * out-parameters belong to the caller and must be released with
 * plofc_string_free(); program handles with plofc_program_free().
 *
 * This header is maintained by hand alongside src/lib.rs; a test checks that
 * it names every exported symbol.
 */

#ifndef PLOFC_H
#define PLOFC_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum PlofcStatus {
    PLOFC_OK = 0,
    PLOFC_NULL_POINTER = 1,
    PLOFC_INVALID_UTF8 = 2,
    PLOFC_PARSE_ERROR = 3,
    PLOFC_RUNTIME_ERROR = 4,
    PLOFC_ANALYSIS_ERROR = 5,
    PLOFC_INVALID_ARGUMENT = 6,
} PlofcStatus;

/* Opaque handle around a parsed program. */
typedef struct PlofcProgram PlofcProgram;

/* Parses MiniImp source into a program handle. */
PlofcStatus plofc_program_parse(const char *src, PlofcProgram **out);

/* Releases a program handle. Null is a no-op. */
void plofc_program_free(PlofcProgram *p);

/* Renders the program back to source text. */
PlofcStatus plofc_program_emit(const PlofcProgram *p, char **out);

/* Executes the program with inputs given as a JSON object of integers,
 * e.g. {"a": 3, "b": 4}, and returns the trace as JSON. */
PlofcStatus plofc_trace_json(const PlofcProgram *p, const char *inputs_json,
                             char **out);

/* Returns the block partition, the all-path formula, and every enumerated
 * path as JSON. Enumeration fails once the program holds more than path_cap
 * branch clauses. */
PlofcStatus plofc_blocks_json(const PlofcProgram *p, uint32_t path_cap,
                              char **out);

/* Returns the constant table and the dependence sets along the executed
 * path as JSON. */
PlofcStatus plofc_deps_json(const PlofcProgram *p, const char *inputs_json,
                            const char *target, char **out);

/* Runs the full diagnosis against the desired target value and returns the
 * report as JSON: observed and desired values, the od distance, the
 * suspected lines, the surviving and removed dependences, and any constant
 * repairs that reproduce the desired output. */
PlofcStatus plofc_diagnose_json(const PlofcProgram *p, const char *inputs_json,
                                const char *target, int64_t desired,
                                char **out);

/* Releases a string returned by this library. Null is a no-op. */
void plofc_string_free(char *s);

/* The message of the last error on this thread, or null. */
const char *plofc_last_error_message(void);

#ifdef __cplusplus
}
#endif

#endif /* PLOFC_H */
