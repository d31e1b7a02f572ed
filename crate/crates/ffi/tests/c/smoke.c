#include <stdio.h>
#include <string.h>

#include "orlc.h"

int main(void) {
    OrlcMdp *mdp = NULL;
    if (orlc_mdp_random_tabular(4, 2, 3, 7, &mdp) != ORLC_STATUS_OK) return 10;

    OrlcRunner *runner = NULL;
    if (orlc_runner_new(mdp, 0.1, 1, 7, &runner) != ORLC_STATUS_OK) return 11;

    OrlcEpisode ep;
    double first = -1.0;
    for (int i = 0; i < 2000; i++) {
        if (orlc_runner_next_episode(runner, &ep) != ORLC_STATUS_OK) return 12;
        if (ep.violation) return 13;
        if (i == 0) first = ep.certificate.epsilon;
    }
    if (first != 3.0 || ep.certificate.epsilon >= first) return 14;

    double p[3] = {0.2, 0.5, 0.3}, v[3] = {1.0, 0.0, 2.0}, out = 0.0;
    if (orlc_prob_est_norm(p, v, 3, 0.1, &out) != ORLC_STATUS_OK) return 15;

    if (orlc_mdp_from_tables(1, 1, 1, NULL, NULL, &mdp) != ORLC_STATUS_NULL_POINTER) return 16;
    char msg[128];
    if (orlc_last_error_message(msg, sizeof msg) == 0 || strstr(msg, "null") == NULL) return 17;

    printf("%s %.6f %.6f\n", orlc_version(), ep.certificate.epsilon, out);
    orlc_runner_free(runner);
    orlc_mdp_free(mdp);
    return 0;
}
