#include <stdio.h>
#include <string.h>

#include "contagion.h"

int main(int argc, char **argv) {
    if (argc < 2) {
        return 2;
    }
    ContagionScenario *scenario = NULL;
    if (contagion_scenario_from_file(argv[1], &scenario) != CONTAGION_STATUS_OK) {
        fprintf(stderr, "%s\n", contagion_last_error());
        return 1;
    }
    ContagionTrace *trace = NULL;
    if (contagion_run(scenario, &trace) != CONTAGION_STATUS_OK) {
        fprintf(stderr, "%s\n", contagion_last_error());
        return 1;
    }
    size_t steps = contagion_trace_step_count(trace);
    double mean = 0.0;
    contagion_trace_mean_valence(trace, steps - 1, &mean);

    ContagionScenario *bad = NULL;
    ContagionStatus st = contagion_scenario_from_json("{\"topology\": 1}", NULL, &bad);

    ContagionLexicon *lex = contagion_lexicon_builtin();
    double score = 0.0;
    contagion_score_sentiment(lex, "i love this", &score);

    printf("steps=%zu mean=%.6f status=%d score=%.2f version=%s\n", steps, mean, (int)st, score, contagion_version());

    contagion_lexicon_free(lex);
    contagion_trace_free(trace);
    contagion_scenario_free(scenario);
    return 0;
}
