#include <math.h>
#include <stdio.h>
#include <string.h>

#include "h1diff/h1diff.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond);  \
      ++failures;                                                 \
    }                                                             \
  } while (0)

int main(void) {
  h1diff_config* cfg = NULL;
  h1diff_field* f = NULL;
  h1diff_field* p = NULL;
  h1diff_curvature k;
  double inner = 0.0, div = 1.0;
  size_t need = 0;
  char small[8];

  EXPECT(h1diff_preset_count() == 6);
  EXPECT(strcmp(h1diff_preset_name(1), "geodesic1d") == 0);

  EXPECT(h1diff_config_parse("{\"preset\": \"curvature-table\"}", &cfg) == H1DIFF_OK);
  EXPECT(h1diff_config_to_json(cfg, small, sizeof small, &need) == H1DIFF_ERR_BUFFER_TOO_SMALL);
  EXPECT(need > sizeof small);
  h1diff_config_free(cfg);

  EXPECT(h1diff_config_parse("{\"preset\": \"nope\"}", &cfg) == H1DIFF_ERR_INVALID_CONFIG);
  EXPECT(strstr(h1diff_last_error(), "preset") != NULL);

  EXPECT(h1diff_field_random(2, 16, 2, 3, 3, 1.0, &f) == H1DIFF_OK);
  EXPECT(h1diff_field_leray_project(f, &p) == H1DIFF_OK);
  EXPECT(h1diff_field_max_divergence(p, &div) == H1DIFF_OK);
  EXPECT(div < 1e-12);
  EXPECT(h1diff_field_h1_inner(p, p, 1.0, &inner) == H1DIFF_OK);
  EXPECT(inner > 0.0);
  h1diff_field_free(p);
  h1diff_field_free(f);
  h1diff_field_free(NULL);

  EXPECT(h1diff_sectional(32, "0: 1*sin(1,0)", "0: 1*cos(1,0)", "two_term", 1.0, 0, &k) == H1DIFF_OK);
  EXPECT(fabs(k.numerator + 2.0 * 3.14159265358979323846 * 3.14159265358979323846) < 1e-10);
  EXPECT(h1diff_sectional(32, NULL, "0: 1*cos(1,0)", "two_term", 1.0, 0, &k) == H1DIFF_ERR_INVALID_ARGUMENT);

  if (failures) fprintf(stderr, "%d failure(s)\n", failures);
  return failures ? 1 : 0;
}
