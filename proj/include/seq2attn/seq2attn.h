/* C interface to the seq2attn lab: configuration handles plus the six
 * commands (generate, train, eval, ablate, grid, overgen). Every function
 * returns a status code; the failure message for the calling thread is
 * available from s2a_last_error(). */
#ifndef SEQ2ATTN_H
#define SEQ2ATTN_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum s2a_status {
  S2A_OK = 0,
  S2A_CONFIG_ERROR = 1, /* bad key, value, or combination thereof */
  S2A_RUNTIME_ERROR = 2 /* I/O failures and anything else */
} s2a_status;

/* Opaque run configuration (flat key=value store with a fixed schema). */
typedef struct s2a_config s2a_config;

/* Message from the calling thread's most recent failure; never NULL. */
const char* s2a_last_error(void);

/* Fresh configuration with every key at its default. */
s2a_status s2a_config_create(s2a_config** out);
/* Configuration parsed from a key = value file. */
s2a_status s2a_config_load(const char* path, s2a_config** out);
/* Applies one "key=value" assignment; unknown keys are rejected. */
s2a_status s2a_config_set(s2a_config* cfg, const char* assignment);
/* Copies the key's value into buf, NUL-terminated and truncated to fit. */
s2a_status s2a_config_get(const s2a_config* cfg, const char* key, char* buf,
                          size_t buf_size);
/* Cross-key validation of the merged configuration. */
s2a_status s2a_config_validate(const s2a_config* cfg);
void s2a_config_free(s2a_config* cfg);

/* Writes the configured task/condition/mode datasets plus a manifest into
 * the data directory. */
s2a_status s2a_generate(const s2a_config* cfg);

/* Trains per the configuration and fills a run directory with the config
 * snapshot, metrics.csv, overgen.csv (overgen mode) and the checkpoint.
 * The run directory path is copied into run_dir_buf when given. */
s2a_status s2a_train(const s2a_config* cfg, char* run_dir_buf,
                     size_t buf_size);

/* Scores a checkpoint on a TSV dataset. With dump_attention nonzero, writes
 * per-example attention trace CSV/PGM pairs under the output directory. */
s2a_status s2a_eval(const s2a_config* cfg, const char* checkpoint_path,
                    const char* dataset_path, int dump_attention,
                    double* sequence_accuracy, double* loss);

/* 16-combination ablation sweep; writes ablation.csv in the run dir. */
s2a_status s2a_ablate(const s2a_config* cfg, char* run_dir_buf,
                      size_t buf_size);

/* Grid search over the config's grid_* ranges; writes ranked grid.csv. */
s2a_status s2a_grid(const s2a_config* cfg, char* run_dir_buf,
                    size_t buf_size);

/* Exception-learning run: training with the overgeneralization monitor;
 * writes overgen.csv alongside the usual artifacts. */
s2a_status s2a_overgen(const s2a_config* cfg, char* run_dir_buf,
                       size_t buf_size);

#ifdef __cplusplus
}
#endif

#endif /* SEQ2ATTN_H */
