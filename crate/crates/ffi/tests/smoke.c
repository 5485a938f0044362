#include <stdio.h>
#include <string.h>

#include "grid_rendezvous.h"

static int check(RdvStatus got, RdvStatus want, const char *what) {
    if (got != want) {
        fprintf(stderr, "%s: got %s, want %s (%s)\n", what, rdv_status_name(got),
                rdv_status_name(want), rdv_last_error());
        return 1;
    }
    return 0;
}

int main(void) {
    RdvSimConfig cfg = {
        .m = 5, .n = 5, .t_f = 1,
        .has_g0 = true, .g0_x = 4, .g0_y = 4,
        .adversary = RDV_ADVERSARY_GREEDY, .seed = 3, .max_rounds = 0,
        .entry = RDV_ENTRY_DEFAULT, .corner_guard = RDV_CORNER_GUARD_ANY_CORNER,
    };
    RdvSim *sim = NULL;
    int bad = check(rdv_sim_new(&cfg, &sim), RDV_STATUS_OK, "new");
    if (bad) return 1;

    RdvProgress p = RDV_PROGRESS_RUNNING;
    bad |= check(rdv_sim_run(sim, &p), RDV_STATUS_OK, "run");
    RdvState s;
    bad |= check(rdv_sim_state(sim, &s), RDV_STATUS_OK, "state");
    if (p != RDV_PROGRESS_RENDEZVOUS || !s.res_fixed) {
        fprintf(stderr, "no rendezvous\n");
        bad = 1;
    }
    char *trace = NULL;
    bad |= check(rdv_sim_trace_jsonl(sim, &trace), RDV_STATUS_OK, "trace");
    if (trace && strncmp(trace, "{\"kind\":\"header\"", 16) != 0) {
        fprintf(stderr, "unexpected trace start\n");
        bad = 1;
    }
    rdv_string_free(trace);
    rdv_sim_free(sim);

    cfg.m = 2;
    bad |= check(rdv_sim_new(&cfg, &sim), RDV_STATUS_INVALID_GRID, "small grid");

    RdvWorstCase w;
    bad |= check(rdv_worst_case(3, 3, 1, true, RDV_CORNER_GUARD_ANY_CORNER, &w), RDV_STATUS_OK, "worst");
    if (w.kind != RDV_WORST_KIND_FINITE) bad = 1;

    printf("rendezvous after %llu rounds; 3x3 worst case %llu\n",
           (unsigned long long)s.round, (unsigned long long)w.rounds);
    return bad;
}
