/*
 * Copyright 2026 The egoflow Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* The public header compiles as C99 and the library links from C. */

#include <stdio.h>
#include <string.h>

#include "egoflow/egoflow.h"

#define CHECK(cond)                                          \
  do {                                                       \
    if (!(cond)) {                                           \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
      return 1;                                              \
    }                                                        \
  } while (0)

int main(void) {
  egf_match_params mp;
  egf_flow_stream* s = NULL;
  egf_flow_stream* back = NULL;
  egf_motion_vector mv;
  uint8_t* bytes = NULL;
  size_t size = 0;
  int32_t truncated = 1;
  double lo = 0.0, hi = 0.0;

  egf_match_params_default(&mp);
  CHECK(egf_velocity_envelope(640.0, 1.0, 30.0, &mp, &lo, &hi) == EGF_OK);
  CHECK(lo == 0.09375 && hi == 3.0);

  CHECK(egf_flow_stream_create(&s) == EGF_OK);
  CHECK(egf_flow_stream_append_zero(s, 3, 2, 16, 0.0, 0) == EGF_OK);
  CHECK(egf_flow_stream_encode(s, &bytes, &size) == EGF_OK);
  CHECK(size == 4 + 20 + 4 * 6);
  CHECK(memcmp(bytes, "MVS1", 4) == 0);
  CHECK(egf_flow_stream_decode(bytes, size, &back, &truncated) == EGF_OK);
  CHECK(truncated == 0);
  CHECK(egf_flow_stream_vector(back, 0, 2, 1, &mv) == EGF_OK);
  CHECK(mv.du == 0 && mv.dv == 0 && mv.sad == 0);
  egf_free(bytes);
  egf_flow_stream_destroy(back);
  egf_flow_stream_destroy(s);

  CHECK(egf_flow_stream_decode((const uint8_t*)"XXXX", 4, &back, &truncated) ==
        EGF_ERR_FORMAT);
  CHECK(strlen(egf_last_error()) > 0);
  puts("c smoke ok");
  return 0;
}
