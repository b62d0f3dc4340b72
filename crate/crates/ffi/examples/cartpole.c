/* SPDX-License-Identifier: Apache-2.0 */
/* Plays one Cart-Pole episode with an all-zero policy. */
#include <stdio.h>
#include "qevo.h"

int main(void) {
  double params[26] = {0};
  double obs[4], reward;
  bool done = false;
  size_t action;
  QevoEnv *env = NULL;
  QevoPolicy *policy = NULL;
  if (qevo_env_new("cartpole", &env) != QEVO_STATUS_OK ||
      qevo_policy_new(QEVO_ARCHITECTURE_CART_POLE, 0, params, 26, &policy) != QEVO_STATUS_OK) {
    fprintf(stderr, "%s\n", qevo_last_error());
    return 1;
  }
  double total = 0;
  qevo_env_reset(env, 1, obs, 4);
  while (!done) {
    qevo_policy_act(policy, obs, 4, &action);
    qevo_env_step(env, action, obs, 4, &reward, &done);
    total += reward;
  }
  printf("score %.0f\n", total);
  qevo_policy_free(policy);
  qevo_env_free(env);
  return 0;
}
