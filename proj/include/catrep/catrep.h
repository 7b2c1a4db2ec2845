// Copyright 2026 The catrep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the catrep library.
 *
 * Every function returns a catrep_status. On failure, catrep_last_error()
 * returns a description that stays valid on the calling thread until the
 * next call into the library. Strings returned through char** outputs are
 * owned by the caller and released with catrep_string_free(). Handles are
 * released with their matching *_free function, which accepts NULL.
 */
#ifndef CATREP_CATREP_H
#define CATREP_CATREP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(CATREP_BUILDING_LIBRARY)
#define CATREP_API __declspec(dllexport)
#else
#define CATREP_API __declspec(dllimport)
#endif
#else
#define CATREP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum catrep_status {
  CATREP_OK = 0,
  CATREP_ERR_INVALID_ARGUMENT = 1,
  CATREP_ERR_DOMAIN = 2,
  CATREP_ERR_CONFIG = 3,
  CATREP_ERR_NUMERIC = 4,
  CATREP_ERR_IO = 5,
  CATREP_ERR_INTERNAL = 6
} catrep_status;

typedef enum catrep_basis { CATREP_BASIS_X = 0, CATREP_BASIS_Z = 1 } catrep_basis;

typedef enum catrep_decoder {
  CATREP_DECODER_NONE = 0,
  CATREP_DECODER_NAIVE = 1,
  CATREP_DECODER_MERGED = 2
} catrep_decoder;

typedef struct catrep_noise_model catrep_noise_model;
typedef struct catrep_batch catrep_batch;
typedef struct catrep_graph catrep_graph;

CATREP_API const char *catrep_version(void);
CATREP_API const char *catrep_last_error(void);
CATREP_API const char *catrep_status_name(catrep_status status);
CATREP_API void catrep_string_free(char *s);

/* Noise models. */
CATREP_API catrep_status catrep_noise_model_uniform(uint32_t d, double p_z, double p_meas, double p_erase,
                                                    double t_cycle, double alpha_sq, catrep_noise_model **out);
CATREP_API catrep_status catrep_noise_model_from_json(const char *text, catrep_noise_model **out);
/* The model a configuration document implies for distance d at alpha_sq. */
CATREP_API catrep_status catrep_noise_model_from_config(const char *config_text, uint32_t d, double alpha_sq,
                                                        catrep_noise_model **out);
CATREP_API catrep_status catrep_noise_model_to_json(const catrep_noise_model *model, char **out);
CATREP_API void catrep_noise_model_free(catrep_noise_model *model);

/* Shot batches. */
CATREP_API catrep_status catrep_sample(const catrep_noise_model *model, uint32_t cycles, catrep_basis basis,
                                       uint64_t shots, uint64_t seed, unsigned workers, catrep_batch **out);
CATREP_API catrep_status catrep_batch_read(const char *path, catrep_batch **out);
CATREP_API catrep_status catrep_batch_write(const catrep_batch *batch, const char *path);
CATREP_API catrep_status catrep_batch_write_text(const catrep_batch *batch, const char *path);
CATREP_API catrep_status catrep_batch_info(const catrep_batch *batch, uint32_t *d, uint32_t *cycles,
                                           catrep_basis *basis, uint64_t *shots);
/* Fills (cycles + 1) * (d - 1) detection probabilities. */
CATREP_API catrep_status catrep_batch_detection_probabilities(const catrep_batch *batch, double *out, size_t len);
CATREP_API void catrep_batch_free(catrep_batch *batch);

/* Decoding graphs. With conditioned != 0 edges are estimated from shots with
 * no erasure near either endpoint. */
CATREP_API catrep_status catrep_weigh(const catrep_batch *batch, double fraction, double p_floor, int conditioned,
                                      catrep_graph **out);
CATREP_API catrep_status catrep_graph_from_text(const char *text, catrep_graph **out);
CATREP_API catrep_status catrep_graph_to_text(const catrep_graph *graph, char **out);
CATREP_API catrep_status catrep_graph_num_edges(const catrep_graph *graph, size_t *out);
CATREP_API void catrep_graph_free(catrep_graph *graph);

/* Decodes a batch and writes a JSON summary. When `graph` is NULL the first
 * `calibration_fraction` of the batch weighs the graph and is not scored;
 * otherwise every shot is scored. When `matchings` is not NULL it receives
 * the matched pairs of every scored shot in text form. */
CATREP_API catrep_status catrep_decode_batch(const catrep_batch *batch, const catrep_graph *graph,
                                             catrep_decoder decoder, double calibration_fraction,
                                             char **summary_json, char **matchings);

/* Closed forms. */
CATREP_API catrep_status catrep_phase_flip_rates(double alpha_sq, double kappa1, double *plus_to_minus,
                                                 double *minus_to_plus);
CATREP_API catrep_status catrep_p_odd(const double *ps, size_t n, double *out);
CATREP_API catrep_status catrep_project_overhead(uint32_t d, double t_cycle, double t1, double alpha_sq,
                                                 double t_z, double *eps_phase, double *eps_bit,
                                                 double *eps_total);

/* Fits A exp(-t/T) (+ B) to JSON [{"t":..,"value":..,"sigma":..}, ...]. */
CATREP_API catrep_status catrep_fit_decay(const char *points_json, int with_offset, char **out);

/* Configuration-driven runners. Each returns a JSON document. */
CATREP_API catrep_status catrep_config_check(const char *config_text, char **normalized);
CATREP_API catrep_status catrep_run_memory_experiment(const char *config_text, char **out);
CATREP_API catrep_status catrep_run_budget(const char *config_text, char **out);
CATREP_API catrep_status catrep_run_lindblad_sweep(const char *config_text, char **out);

#ifdef __cplusplus
}
#endif

#endif
