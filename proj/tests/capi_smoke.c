/* Plain C consumer of the public header. */
#include <stdio.h>
#include <string.h>

#include "ctxscope/ctxscope.h"

int main(void) {
    ctxs_dist* dist = NULL;
    ctxs_options* options = NULL;
    ctxs_report* report = NULL;
    char* text = NULL;
    int ok = 0;

    if (ctxs_dist_table2(&dist) != CTXS_OK || ctxs_options_new(&options) != CTXS_OK) {
        fprintf(stderr, "setup failed: %s\n", ctxs_last_error());
        return 1;
    }
    if (ctxs_analyze_dist(dist, options, &report) == CTXS_OK &&
        ctxs_report_render(report, "text", &text) == CTXS_OK) {
        ok = strstr(text, "contextual") != NULL;
        fputs(text, stdout);
    } else {
        fprintf(stderr, "analysis failed: %s\n", ctxs_last_error());
    }
    ctxs_string_free(text);
    ctxs_report_free(report);
    ctxs_options_free(options);
    ctxs_dist_free(dist);
    return ok ? 0 : 1;
}
