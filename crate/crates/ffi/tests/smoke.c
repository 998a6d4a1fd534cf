#include <stdio.h>
#include "pda_workbench.h"

int main(void) {
    PdaHandle *h = NULL;
    if (pda_construct_partition(3, 2, &h) != PDA_STATUS_OK) {
        fprintf(stderr, "construct: %s\n", pda_last_error());
        return 1;
    }
    PdaParams p;
    pda_params(h, &p);
    PdaBound b;
    size_t witness[9];
    PdaStatus s = pda_bound_exact(h, 20, 100000000, &b, witness, 9);
    printf("%zu %zu %zu %zu %s bound=%llu exact=%d\n", p.users, p.rows, p.stars, p.symbols,
           pda_verify(h) == PDA_STATUS_OK ? "valid" : "invalid", (unsigned long long)b.value,
           (int)b.exact);
    if (s != PDA_STATUS_OK || b.value < 15 || b.value > p.symbols) {
        return 1;
    }
    PdaHandle *bad = NULL;
    if (pda_parse("PDA 1 1\n", &bad) != PDA_STATUS_PARSE_ERROR || pda_last_error() == NULL) {
        return 1;
    }
    pda_free(h);
    return 0;
}
