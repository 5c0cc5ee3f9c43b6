#include <stdio.h>
#include <string.h>
#include "ideals.h"

static int fail(const char *what) {
    const char *e = ideals_last_error();
    fprintf(stderr, "%s: %s\n", what, e ? e : "(no message)");
    return 1;
}

int main(void) {
    IdealsSet *evens = NULL;
    if (ideals_set_from_json("{\"kind\": \"evens\"}", &evens) != IDEALS_STATUS_OK) return fail("set");
    char *d = NULL;
    if (ideals_set_density(evens, "d*", 0, &d) != IDEALS_STATUS_OK) return fail("density");
    printf("%s\n", d);
    ideals_string_free(d);
    bool in_z = true;
    if (ideals_set_member(evens, "z", &in_z) != IDEALS_STATUS_OK || in_z) return fail("member");
    ideals_set_free(evens);

    IdealsSequence *x = NULL;
    const char *seq = "{\"pieces\": ["
                      "{\"support\": {\"kind\": \"squares\"}, \"term\": {\"const\": \"1\"}},"
                      "{\"support\": {\"kind\": \"not\", \"of\": {\"kind\": \"squares\"}}, \"term\": {\"const\": \"0\"}}]}";
    if (ideals_seq_from_json(seq, &x) != IDEALS_STATUS_OK) return fail("sequence");
    char *l = NULL;
    if (ideals_seq_limit(x, "z", &l) != IDEALS_STATUS_OK) return fail("limit");
    printf("%s\n", l);
    ideals_string_free(l);
    if (ideals_seq_limit(x, "fin", &l) != IDEALS_STATUS_NOT_CONVERGENT) return fail("fin limit");
    ideals_seq_free(x);
    return 0;
}
