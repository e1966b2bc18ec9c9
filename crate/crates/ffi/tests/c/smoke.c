#include <stdio.h>
#include <string.h>
#include "cmcurve.h"

#define CHECK(x) do { if (!(x)) { fprintf(stderr, "failed: %s (%s)\n", #x, cm_last_error()); return 1; } } while (0)

int main(void) {
    CmPoint *p = NULL, *q = NULL, *r = NULL;
    bool eq = false;
    uint64_t mu = 0;
    const int64_t t[4] = {1, 1, 0, 1};

    CHECK(cm_abi_version() == CM_ABI_VERSION);
    CHECK(cm_point_from_json("{\"tau\":{\"m\":1,\"p\":[0,1],\"q\":[1,1]},\"level\":5}", &p) == CM_STATUS_OK);
    CHECK(cm_point_from_json("{\"tau\":{\"m\":1,\"p\":[1,1],\"q\":[1,1]},\"u\":[1,1,0,1],\"level\":5}", &q) == CM_STATUS_OK);
    CHECK(cm_point_eq(p, q, &eq) == CM_STATUS_OK && eq);
    CHECK(cm_point_act_unit(p, t, &r) == CM_STATUS_OK);
    CHECK(cm_point_component(r, &mu) == CM_STATUS_OK && mu == 1);

    char *out = NULL;
    CHECK(cm_command("orbit", "{\"tau\":{\"m\":5,\"p\":[1,1],\"q\":[2,1]}}", &out) == CM_STATUS_OK);
    CHECK(strstr(out, "\"n\":5") != NULL);
    cm_string_free(out);

    CHECK(cm_point_from_json("{\"tau\":{}}", &r) == CM_STATUS_INVALID_INPUT);
    CHECK(strlen(cm_last_error()) > 0);
    CHECK(cm_point_eq(NULL, q, &eq) == CM_STATUS_NULL_POINTER);

    cm_point_free(p);
    cm_point_free(q);
    cm_point_free(r);
    puts("ok");
    return 0;
}
