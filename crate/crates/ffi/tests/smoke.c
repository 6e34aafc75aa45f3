#include <stdio.h>
#include <string.h>

#include "cm2.h"

static int fail(const char *what) {
    fprintf(stderr, "%s: %s\n", what, cm2_last_error());
    return 1;
}

static unsigned char *slurp(const char *path, size_t *len) {
    FILE *f = fopen(path, "rb");
    if (!f) return NULL;
    fseek(f, 0, SEEK_END);
    long n = ftell(f);
    fseek(f, 0, SEEK_SET);
    unsigned char *buf = malloc(n > 0 ? (size_t)n : 1);
    *len = fread(buf, 1, (size_t)n, f);
    fclose(f);
    return buf;
}

static int add(struct Cm2Registry *reg, const char *dir, const char *cls, const char *doc_name,
               const char *kw_name) {
    char path[4096];
    struct Cm2Document *doc = NULL;
    snprintf(path, sizeof path, "%s/%s", dir, doc_name);
    if (cm2_document_load_file(path, &doc) != CM2_STATUS_OK) return fail("load sample");
    size_t len = 0;
    snprintf(path, sizeof path, "%s/%s", dir, kw_name);
    unsigned char *csv = slurp(path, &len);
    if (!csv) return fail("read keywords");
    enum Cm2Status st = cm2_registry_add_template(reg, cls, doc, csv, len, NULL);
    free(csv);
    cm2_document_free(doc);
    return st == CM2_STATUS_OK ? 0 : fail("add template");
}

int main(int argc, char **argv) {
    if (argc != 2) return 2;
    const char *dir = argv[1];
    struct Cm2Registry *reg = NULL;
    if (cm2_registry_new(&reg) != CM2_STATUS_OK) return fail("new");
    if (add(reg, dir, "Statement A", "statement_a.xml", "statement_a.csv")) return 1;
    if (add(reg, dir, "Statement B", "statement_b.xml", "statement_b.csv")) return 1;

    char path[4096];
    snprintf(path, sizeof path, "%s/test_case.xml", dir);
    struct Cm2Document *doc = NULL;
    if (cm2_document_load_file(path, &doc) != CM2_STATUS_OK) return fail("load test");

    struct Cm2Config cfg = cm2_config_default();
    struct Cm2Result *res = NULL;
    if (cm2_classify(reg, doc, &cfg, &res) != CM2_STATUS_OK) return fail("classify");
    uint64_t num = 0, den = 0;
    cm2_result_score(res, &num, &den);
    printf("%s %llu/%llu %zu\n", cm2_result_predicted(res), (unsigned long long)num,
           (unsigned long long)den, cm2_registry_row_count(reg));

    cm2_result_free(res);
    cm2_document_free(doc);
    cm2_registry_free(reg);
    return 0;
}
