#include <stdio.h>
#include <string.h>
#include "gatecomm.h"

int main(void) {
    gc_expr *e = NULL, *r = NULL;
    char *text = NULL;
    if (gc_expr_parse("2[q->qq] - [qq]", &e) != GC_STATUS_OK) return 1;
    if (gc_expr_reverse(e, &r) != GC_STATUS_OK) return 2;
    if (gc_expr_to_string(r, &text) != GC_STATUS_OK) return 3;
    printf("%s\n", text);
    gc_string_free(text);
    gc_expr_free(r);
    gc_expr_free(e);

    if (gc_expr_parse("[q->", &e) != GC_STATUS_PARSE) return 4;
    if (gc_last_error() == NULL || strstr(gc_last_error(), "parse") == NULL) return 5;
    return 0;
}
