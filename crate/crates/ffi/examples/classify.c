#include <stdio.h>

#include "mdres.h"

int main(int argc, char **argv) {
    if (argc != 2) {
        fprintf(stderr, "usage: %s BUNDLE_DIR\n", argv[0]);
        return 64;
    }
    MdresSession *s = NULL;
    MdresStatus st = mdres_session_load_dir(argv[1], &s);
    if (st != MDRES_STATUS_OK) {
        fprintf(stderr, "load failed (%d): %s\n", (int)st, mdres_last_error());
        return 1;
    }
    char *json = NULL;
    st = mdres_resolve_json(s, 0, &json);
    if (st == MDRES_STATUS_INELIGIBLE) {
        st = mdres_classify_json(s, &json);
    }
    if (st != MDRES_STATUS_OK) {
        fprintf(stderr, "failed (%d): %s\n", (int)st, mdres_last_error());
        mdres_session_free(s);
        return 1;
    }
    printf("%s\n", json);
    mdres_string_free(json);
    mdres_session_free(s);
    return 0;
}
