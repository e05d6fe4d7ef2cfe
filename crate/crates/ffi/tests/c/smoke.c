#include <math.h>
#include <stdio.h>

#include "zsgame.h"

#define CHECK(cond)                                               \
  do {                                                            \
    if (!(cond)) {                                                \
      const char *msg = zs_last_error();                          \
      fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__,    \
              #cond, msg ? msg : "no error");                     \
      return 1;                                                   \
    }                                                             \
  } while (0)

int main(void) {
  const double costs[3] = {1.0, 2.0, 3.0};
  ZsGame *game = NULL;
  CHECK(zs_cournot_new(10.0, 0.5, costs, 0.0, 4.0, 0.0, 8.0, &game) == ZS_STATUS_OK);

  size_t n = 0;
  CHECK(zs_game_num_players(game, &n) == ZS_STATUS_OK && n == 3);

  double x[3];
  double f = 0.0;
  size_t iterations = 0;
  CHECK(zs_solve(game, NULL, x, 3, &f, &iterations) == ZS_STATUS_OK);
  CHECK(fabs(x[0] - 10.0 / 3.0) < 1e-6);
  CHECK(fabs(x[1] - 8.0 / 3.0) < 1e-6);
  CHECK(fabs(x[2] - 2.0) < 1e-6);
  CHECK(fabs(f - 4.0) < 1e-6);

  ZsVerifyResult verdict;
  const double zero[3] = {0.0, 0.0, 0.0};
  CHECK(zs_verify(game, zero, 3, &verdict) == ZS_STATUS_VERIFICATION_FAILED);
  CHECK(zs_last_error() != NULL);

  CHECK(zs_cournot_new(10.0, 1.5, costs, 0.0, 4.0, 0.0, 8.0, &game) == ZS_STATUS_INVALID_ARGUMENT);
  zs_game_free(game);
  printf("ok %zu iterations\n", iterations);
  return 0;
}
