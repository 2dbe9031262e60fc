#ifndef MEVFORGE_H
#define MEVFORGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum MfStatus {
  MF_STATUS_OK = 0,
  MF_STATUS_NULL_ARGUMENT = 1,
  MF_STATUS_INVALID_UTF8 = 2,
  MF_STATUS_PARSE = 3,
  MF_STATUS_INVALID_INPUT = 4,
  MF_STATUS_INTERNAL = 5,
} MfStatus;

/**
 * Opaque finished simulation campaign.
 */
typedef struct MfCampaign MfCampaign;

/**
 * Opaque set of parsed transactions.
 */
typedef struct MfTraceSet MfTraceSet;

/**
 * Mann-Kendall result. `direction` is -1 (decreasing), 0 (no trend) or 1 (increasing).
 */
typedef struct MfTrend {
  uint64_t n;
  int64_t s;
  double variance;
  double z;
  double tau;
  double p_value;
  int32_t direction;
} MfTrend;

/**
 * Message for the last failed call on this thread, or null. Valid until the next call into
 * this library on the same thread; do not free.
 */
const char *mf_last_error_message(void);

/**
 * Library version, statically allocated.
 */
const char *mf_version(void);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void mf_string_free(char *s);

/**
 * Output of an exact-input constant-product swap selling into `reserve_in`.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` must be writable.
 */
enum MfStatus mf_swap_v2(const char *reserve_in,
                         const char *reserve_out,
                         const char *amount_in,
                         uint32_t fee_ppm,
                         char **out);

/**
 * Contestable window in whole milliseconds. `protocol` is 0 for direct BSC delivery and 1 for
 * an Ethereum relay.
 *
 * # Safety
 * `out_ms` must be writable.
 */
enum MfStatus mf_contestable_window(int32_t protocol,
                                    int64_t horizon_ms,
                                    int64_t delay_ms,
                                    int64_t *out_ms);

/**
 * `eth_ms − bsc_ms`; fails when the BSC horizon is not shorter.
 *
 * # Safety
 * `out_ms` must be writable.
 */
enum MfStatus mf_missing_horizon(int64_t eth_ms, int64_t bsc_ms, int64_t *out_ms);

/**
 * Market-share table as CSV for `n` brands with their block counts.
 *
 * # Safety
 * `brands` and `counts` must each point to `n` valid elements.
 */
enum MfStatus mf_market_share_csv(const char *const *brands,
                                  const uint64_t *counts,
                                  size_t n,
                                  char **out_csv);

/**
 * Mann-Kendall trend test over `n` finite values.
 *
 * # Safety
 * `values` must point to `n` doubles; `out` must be writable.
 */
enum MfStatus mf_mann_kendall(const double *values, size_t n, double alpha, struct MfTrend *out);

/**
 * Parses NDJSON traces, stopping at the first malformed line.
 *
 * # Safety
 * `ndjson` must be NUL-terminated; `out` must be writable.
 */
enum MfStatus mf_traces_parse(const char *ndjson, struct MfTraceSet **out);

/**
 * Number of transactions in the set; 0 for null.
 *
 * # Safety
 * `set` must be null or a live handle.
 */
size_t mf_traces_len(const struct MfTraceSet *set);

/**
 * Events dropped during parsing because their kind was not recognised.
 *
 * # Safety
 * `set` must be null or a live handle.
 */
size_t mf_traces_skipped_events(const struct MfTraceSet *set);

/**
 * Extracts arbitrage records as a record-file CSV. `config_toml` may be null for defaults.
 * Builders are labelled from the bundled BSC list. The first failing transaction aborts the
 * call with `InvalidInput`.
 *
 * # Safety
 * `set` must be a live handle; `config_toml` null or NUL-terminated; `out_csv` writable.
 */
enum MfStatus mf_traces_extract_csv(const struct MfTraceSet *set,
                                    const char *config_toml,
                                    char **out_csv);

/**
 * # Safety
 * `set` must be null or a handle not yet freed.
 */
void mf_traces_free(struct MfTraceSet *set);

/**
 * Runs a campaign. `scenario` is a bundled name (`bsc_duopoly`, `eth_duopoly`) or a path.
 *
 * # Safety
 * `scenario` must be NUL-terminated; `out` writable.
 */
enum MfStatus mf_campaign_run(const char *scenario,
                              uint64_t slots,
                              uint64_t seed,
                              struct MfCampaign **out);

/**
 * Slots won by `builder_id`.
 *
 * # Safety
 * `campaign` must be a live handle; `builder_id` NUL-terminated; `out_wins` writable.
 */
enum MfStatus mf_campaign_wins(const struct MfCampaign *campaign,
                               const char *builder_id,
                               uint64_t *out_wins);

/**
 * Slots that fell back to a locally built block.
 *
 * # Safety
 * `campaign` must be null or a live handle.
 */
uint64_t mf_campaign_fallback_slots(const struct MfCampaign *campaign);

/**
 * Campaign summary CSV.
 *
 * # Safety
 * `campaign` must be a live handle; `out_csv` writable.
 */
enum MfStatus mf_campaign_summary_csv(const struct MfCampaign *campaign, char **out_csv);

/**
 * # Safety
 * `campaign` must be null or a handle not yet freed.
 */
void mf_campaign_free(struct MfCampaign *campaign);

#endif  /* MEVFORGE_H */
