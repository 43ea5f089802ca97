/* cryptoscope — TLS configuration inventory and policy analysis.
 *
 * C API for the shared library. All handles are opaque; functions that
 * return char* allocate with malloc-compatible storage and the caller
 * releases them with cs_string_free(). Functions returning cs_status set a
 * human-readable message retrievable with cs_engine_last_error() on
 * failure.
 */
#ifndef CRYPTOSCOPE_H
#define CRYPTOSCOPE_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cs_status {
    CS_OK = 0,
    CS_ERR_INVALID_ARGUMENT = 1,
    CS_ERR_IO = 2,
    CS_ERR_CONFIG = 3, /* malformed mapping/policy/manifest */
    CS_ERR_EMPTY = 4,  /* no candidate files above the confidence threshold */
    CS_ERR_INTERNAL = 5
} cs_status;

typedef struct cs_engine cs_engine;
typedef struct cs_inventory cs_inventory;

unsigned int cs_abi_version(void);

/* ── Engine lifecycle ──────────────────────────────────────────────────── */

cs_engine *cs_engine_new(void);
void cs_engine_free(cs_engine *engine);
const char *cs_engine_last_error(const cs_engine *engine);

/* Loads <dir>/{nginx,apache,springboot}.json mapping files. */
cs_status cs_engine_load_mappings(cs_engine *engine, const char *mappings_dir);
/* Loads one policy file; repeatable. */
cs_status cs_engine_load_policy(cs_engine *engine, const char *policy_path);
/* Options: "reference-date" (YYYY-MM-DD), "confidence-threshold" (0..1),
 * "jobs" (>= 1). */
cs_status cs_engine_set_option(cs_engine *engine, const char *key, const char *value);

/* ── Inventory construction ────────────────────────────────────────────── */

cs_status cs_engine_discover(cs_engine *engine, const char *root,
                             const char *manifest_path /* nullable */,
                             cs_inventory **out_inventory);
cs_status cs_inventory_read_json(cs_engine *engine, const char *json_text,
                                 cs_inventory **out_inventory);
void cs_inventory_free(cs_inventory *inventory);

/* ── Reports (JSON text unless noted) ──────────────────────────────────── */

char *cs_inventory_to_json(const cs_inventory *inventory);
char *cs_inventory_utm_json(const cs_inventory *inventory);
char *cs_inventory_intermediate_json(const cs_inventory *inventory);
/* One line per run warning (for the run log). */
char *cs_inventory_warnings_text(const cs_inventory *inventory);

/* Policy evaluation + quantum readiness over an inventory. */
char *cs_engine_assess(cs_engine *engine, const cs_inventory *inventory);
char *cs_engine_prioritize(cs_engine *engine, const cs_inventory *inventory);
char *cs_engine_metrics(cs_engine *engine, const cs_inventory *inventory);
char *cs_engine_metrics_text(cs_engine *engine, const cs_inventory *inventory);
/* JSON object mapping csv file name -> csv content. */
char *cs_engine_metrics_csv(cs_engine *engine, const cs_inventory *inventory);
/* Assessment diff: baseline vs current. */
char *cs_engine_verify(cs_engine *engine, const cs_inventory *baseline,
                       const cs_inventory *current);

void cs_string_free(char *text);

#ifdef __cplusplus
}
#endif

#endif /* CRYPTOSCOPE_H */
