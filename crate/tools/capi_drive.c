#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include "plofc.h"

static char *slurp(const char *path) {
    FILE *f = fopen(path, "rb");
    if (!f) { perror(path); exit(1); }
    fseek(f, 0, SEEK_END);
    long n = ftell(f);
    fseek(f, 0, SEEK_SET);
    char *buf = malloc((size_t)n + 1);
    if (fread(buf, 1, (size_t)n, f) != (size_t)n) { perror("read"); exit(1); }
    buf[n] = '\0';
    fclose(f);
    return buf;
}

int main(void) {
    char *src = slurp("programs/ex1_buggy.mimp");
    PlofcProgram *p = NULL;
    char *out = NULL;

    PlofcStatus st = plofc_program_parse(src, &p);
    if (st != PLOFC_OK) { fprintf(stderr, "parse: %s\n", plofc_last_error_message()); return 1; }

    st = plofc_diagnose_json(p, "{\"a\": 3, \"b\": 4}", "z1", 17, &out);
    if (st != PLOFC_OK) { fprintf(stderr, "diagnose: %s\n", plofc_last_error_message()); return 1; }
    if (!strstr(out, "\"od\": 2")) { fprintf(stderr, "missing od\n"); return 1; }
    if (!strstr(out, "\"plofc\": [")) { fprintf(stderr, "missing plofc\n"); return 1; }
    puts("diagnose ok");
    plofc_string_free(out);

    st = plofc_trace_json(p, "{}", &out);
    if (st != PLOFC_RUNTIME_ERROR) { fprintf(stderr, "expected runtime error\n"); return 1; }
    printf("error path ok: %s\n", plofc_last_error_message());

    plofc_program_free(p);
    free(src);
    return 0;
}
