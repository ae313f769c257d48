#include <math.h>
#include <stdio.h>
#include <string.h>

#include "idgap.h"

static const char *IDENTITY =
    "{\"ingredients\":["
    "{\"id\":\"name\",\"kind\":\"context\",\"context_pattern\":[\"Alice\"]},"
    "{\"id\":\"role\",\"kind\":\"memory\",\"memory_key\":\"role\",\"memory_value\":\"analyst\"},"
    "{\"id\":\"constraint\",\"kind\":\"policy\",\"flag_index\":0}]}";

static const char *TRACE =
    "{\"u\":0,\"F\":[\"name\"]}\n"
    "{\"u\":1,\"F\":[\"role\"]}\n"
    "{\"u\":2,\"F\":[\"constraint\"]}\n";

static int check(IdgapStatus s, const char *what) {
    if (s == IDGAP_STATUS_OK) return 0;
    char *msg = idgap_last_error();
    fprintf(stderr, "%s failed (%d): %s\n", what, (int)s, msg ? msg : "?");
    idgap_string_free(msg);
    return 1;
}

int main(void) {
    IdgapIdentity *id = NULL;
    IdgapTrace *trace = NULL;
    IdgapReport *report = NULL;
    size_t eval[] = {0};
    IdgapWindow w = {2, 1, 8, eval, 1};
    IdgapParams params = idgap_default_params();
    double weak, strong, gap;

    if (check(idgap_identity_parse(IDENTITY, &id), "identity")) return 1;
    if (check(idgap_trace_parse(TRACE, id, &trace), "trace")) return 1;
    if (check(idgap_persistence(trace, id, &w, &weak, &strong), "persistence")) return 1;
    if (check(idgap_analyze(trace, id, &w, &params, &report), "analyze")) return 1;
    if (check(idgap_report_gap_ratio(report, &gap), "gap")) return 1;

    char *json = idgap_report_json(report);
    printf("p_weak %.6f\np_strong %.6f\ngap %s\n", weak, strong, isinf(gap) ? "inf" : "finite");
    int ok = weak == 1.0 && strong == 0.0 && isinf(gap) && json && strstr(json, "\"k\": 3");
    idgap_string_free(json);

    IdgapIdentity *bad = NULL;
    if (idgap_identity_parse("not json", &bad) != IDGAP_STATUS_PARSE || bad) ok = 0;

    idgap_report_free(report);
    idgap_trace_free(trace);
    idgap_identity_free(id);
    return ok ? 0 : 1;
}
