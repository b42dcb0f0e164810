/*
 * Copyright 2026 The pumsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the pumsim simulator.
 *
 * Every function returns a pumsim_status. On failure the message is available
 * from pumsim_last_error() on the calling thread until the next call.
 * Strings returned through char** are owned by the caller; release them with
 * pumsim_string_free. A caller buffer of the wrong size gives PUMSIM_OUT_OF_RANGE.
 * Handles are not thread-safe; distinct handles are independent. */

#ifndef PUMSIM_PUMSIM_H
#define PUMSIM_PUMSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(PUMSIM_BUILDING)
#define PUMSIM_API __declspec(dllexport)
#else
#define PUMSIM_API __declspec(dllimport)
#endif
#else
#define PUMSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pumsim_status {
  PUMSIM_OK = 0,
  PUMSIM_INVALID_ARGUMENT,
  PUMSIM_INVALID_GEOMETRY,
  PUMSIM_OUT_OF_RANGE,
  PUMSIM_BANK_OPEN,
  PUMSIM_ROW_CLOSED,
  PUMSIM_ROW_MISMATCH,
  PUMSIM_ILLEGAL_ROW_SET,
  PUMSIM_PROTECTED_ROW,
  PUMSIM_CROSS_SUBARRAY,
  PUMSIM_SAME_BANK,
  PUMSIM_MISSING_OPERAND,
  PUMSIM_CYCLIC_NETWORK,
  PUMSIM_INSUFFICIENT_ROWS,
  PUMSIM_WIDTH_OUT_OF_RANGE,
  PUMSIM_TOO_MANY_LANES,
  PUMSIM_UNSUPPORTED_PATTERN,
  PUMSIM_MISALIGNED_BASE,
  PUMSIM_ROW_SPAN,
  PUMSIM_BAD_FRACTIONS,
  PUMSIM_EMPTY_REGION,
  PUMSIM_NO_TRNG_CELLS,
  PUMSIM_UNKNOWN_BENCHMARK,
  PUMSIM_CORRECTNESS_MISMATCH,
  PUMSIM_PARSE_ERROR,
  PUMSIM_CONFIG_ERROR,
  PUMSIM_INTERNAL
} pumsim_status;

typedef struct pumsim_config pumsim_config;
typedef struct pumsim_device pumsim_device;

PUMSIM_API const char* pumsim_version(void);
PUMSIM_API const char* pumsim_status_name(pumsim_status status);
PUMSIM_API const char* pumsim_last_error(void);
PUMSIM_API void pumsim_string_free(char* s);

/* Configuration. */
PUMSIM_API pumsim_status pumsim_config_default(pumsim_config** out);
PUMSIM_API pumsim_status pumsim_config_load(const char* path, pumsim_config** out);
PUMSIM_API pumsim_status pumsim_config_parse(const char* ini_text, pumsim_config** out);
PUMSIM_API void pumsim_config_free(pumsim_config* cfg);
PUMSIM_API pumsim_status pumsim_config_set_seed(pumsim_config* cfg, uint64_t seed);
/* 16 hex digits plus NUL. */
PUMSIM_API pumsim_status pumsim_config_digest(const pumsim_config* cfg, char out[17]);
PUMSIM_API pumsim_status pumsim_config_to_ini(const pumsim_config* cfg, char** out);

/* Device. The cell reliability profile derived from the config seed is attached. */
PUMSIM_API pumsim_status pumsim_device_create(const pumsim_config* cfg, pumsim_device** out);
PUMSIM_API void pumsim_device_destroy(pumsim_device* dev);
PUMSIM_API pumsim_status pumsim_device_row_bytes(const pumsim_device* dev, size_t* out);
PUMSIM_API pumsim_status pumsim_device_digest(const pumsim_device* dev, uint64_t* out);
PUMSIM_API pumsim_status pumsim_device_trace_length(const pumsim_device* dev, size_t* out);
PUMSIM_API pumsim_status pumsim_device_trace_text(const pumsim_device* dev, char** out);
/* Latency (ns) and energy (pJ) of trace entries [from, trace length). */
PUMSIM_API pumsim_status pumsim_device_cost(const pumsim_device* dev, size_t from, double* latency_ns,
                                            double* energy_pj);

/* Row I/O: one ACT, a full-row RD or WR, PRE. Bit i of the row is bit (i % 8) of byte i / 8. */
PUMSIM_API pumsim_status pumsim_write_row(pumsim_device* dev, uint32_t bank, uint32_t subarray, uint32_t row,
                                          const uint8_t* bytes, size_t len);
PUMSIM_API pumsim_status pumsim_read_row(pumsim_device* dev, uint32_t bank, uint32_t subarray, uint32_t row,
                                         uint8_t* out, size_t len);

/* Bulk operations. */
PUMSIM_API pumsim_status pumsim_rowclone_fpm(pumsim_device* dev, uint32_t bank, uint32_t subarray, uint32_t src_row,
                                             uint32_t dst_row);
PUMSIM_API pumsim_status pumsim_rowclone_psm(pumsim_device* dev, uint32_t src_bank, uint32_t src_subarray,
                                             uint32_t src_row, uint32_t dst_bank, uint32_t dst_subarray,
                                             uint32_t dst_row, uint64_t bytes);
PUMSIM_API pumsim_status pumsim_row_init(pumsim_device* dev, uint32_t bank, uint32_t subarray, uint32_t row,
                                         int value);
/* op: not, and, or, nand, nor, xor, xnor. b_row < 0 means no second operand. */
PUMSIM_API pumsim_status pumsim_bitwise(pumsim_device* dev, uint32_t bank, uint32_t subarray, const char* op,
                                        uint32_t a_row, int64_t b_row, uint32_t dst_row);

/* Bit-serial SIMD: op is add, sub, mul, relu or gt. b may be NULL for relu.
 * Rows from 0 of the subarray are used. out receives `lanes` values. */
PUMSIM_API pumsim_status pumsim_simd_run(pumsim_device* dev, const char* op, uint32_t width, uint32_t bank,
                                         uint32_t subarray, const uint64_t* a, const uint64_t* b, size_t lanes,
                                         uint64_t* out);
/* Microprogram text for op at width. */
PUMSIM_API pumsim_status pumsim_compile(const pumsim_config* cfg, const char* op, uint32_t width, char** out);

/* GS-DRAM: a shuffled array of `elements` values starting at first_row. */
PUMSIM_API pumsim_status pumsim_gs_store(pumsim_device* dev, uint32_t bank, uint32_t subarray, uint32_t first_row,
                                         const uint64_t* values, size_t elements);
/* out needs room for chips_per_rank values; *count receives that number. */
PUMSIM_API pumsim_status pumsim_gs_gather(pumsim_device* dev, uint32_t bank, uint32_t subarray, uint32_t first_row,
                                          size_t elements, uint64_t stride, uint64_t base, uint64_t* out,
                                          size_t capacity, size_t* count);

/* Security primitives. */
PUMSIM_API pumsim_status pumsim_puf(pumsim_device* dev, uint32_t bank, uint32_t subarray, uint32_t first_row,
                                    uint32_t rows, uint32_t reads, char** hex);
/* mode "drange" or "quac"; whiten applies only to quac. Writes ceil(bits / 8) bytes. */
PUMSIM_API pumsim_status pumsim_trng(pumsim_device* dev, const char* mode, uint64_t bits, int whiten, uint8_t* out,
                                     size_t len);

/* Benchmarks. */
typedef struct pumsim_bench_options {
  uint32_t width;
  uint32_t banks;
  uint32_t stride;
  int corrupt_oracle;
} pumsim_bench_options;

PUMSIM_API void pumsim_bench_options_default(pumsim_bench_options* opts);
/* Any of json, table, trace may be NULL. On PUMSIM_CORRECTNESS_MISMATCH nothing is returned. */
PUMSIM_API pumsim_status pumsim_bench_run(const pumsim_config* cfg, const char* name, uint64_t size,
                                          const pumsim_bench_options* opts, char** json, char** table,
                                          char** trace);
PUMSIM_API pumsim_status pumsim_parse_size(const char* text, uint64_t* out);

/* Replays trace text on a fresh device built from cfg; *digest gets the final state digest. */
PUMSIM_API pumsim_status pumsim_trace_replay(const pumsim_config* cfg, const char* trace_text, uint64_t* digest);

#ifdef __cplusplus
}
#endif

#endif /* PUMSIM_PUMSIM_H */
