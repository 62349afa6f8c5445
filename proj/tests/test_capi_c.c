/* Copyright (c) 2026 The irb Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Compiled as plain C: proves the public header is C-clean and the shared
 * library links without any C++ runtime in the consumer.
 */

#include <math.h>
#include <stdio.h>
#include <string.h>

#include "irb.h"

static int failures = 0;

#define EXPECT(cond, what)                                     \
  do {                                                         \
    if (!(cond)) {                                             \
      fprintf(stderr, "FAIL: %s (%s)\n", what, irb_last_error()); \
      failures++;                                              \
    }                                                          \
  } while (0)

int main(void) {
  irb_synth_params params;
  irb_dataset* ds = NULL;
  irb_bias_report* report = NULL;
  uint32_t cutoffs[2];
  double delta = 0.0;

  memset(&params, 0, sizeof(params));
  params.num_queries = 30;
  params.dim = 16;
  params.sigma_q = 0.5;
  params.lambda = 0.15;
  params.gamma = 1.0;
  params.seed = 3;

  EXPECT(irb_dataset_synth(&params, &ds) == IRB_OK, "synth");
  EXPECT(irb_dataset_num_queries(ds) == 30, "query count");
  EXPECT(irb_dataset_num_items(ds) == 60, "item count");

  cutoffs[0] = 1;
  cutoffs[1] = 5;
  EXPECT(irb_eval_bias(ds, NULL, cutoffs, 2, &report) == IRB_OK, "eval");
  EXPECT(irb_bias_report_metric(report, IRB_METRIC_NDCG, 1, NULL, NULL,
                                &delta) == IRB_OK,
         "metric lookup");
  EXPECT(isfinite(delta), "finite delta");

  EXPECT(irb_dataset_load("/definitely/not/here", &ds) == IRB_ERR_IO,
         "io error surfaces");
  EXPECT(strlen(irb_last_error()) > 0, "error message populated");

  irb_bias_report_free(report);
  irb_dataset_free(ds);

  if (failures == 0) {
    printf("c smoke test passed\n");
    return 0;
  }
  return 1;
}
