/* Build: cargo build -p pragma-ffi
 *        cc translate.c -I../include ../../../target/debug/libpragma_ffi.a -lpthread -ldl -lm
 * Run:   ./a.out fwd.tab bwd.tab "A"
 */
#include <stdio.h>

#include "pragma.h"

static int fail(PragmaStatus status) {
    const char *msg = pragma_last_error_message();
    fprintf(stderr, "error %d: %s\n", (int)status, msg ? msg : "");
    return 1;
}

int main(int argc, char **argv) {
    if (argc != 4) {
        fprintf(stderr, "usage: %s FWD BWD SOURCE\n", argv[0]);
        return 2;
    }
    PragmaModel *fwd = NULL;
    PragmaModel *bwd = NULL;
    PragmaStatus status = pragma_model_load(argv[1], &fwd);
    if (status != PRAGMA_STATUS_OK) return fail(status);
    status = pragma_model_load(argv[2], &bwd);
    if (status != PRAGMA_STATUS_OK) {
        pragma_model_free(fwd);
        return fail(status);
    }

    PragmaConfig config = pragma_config_default();
    config.alpha = 1.0;
    char *out = NULL;
    status = pragma_translate(PRAGMA_MODE_S1_CIP, fwd, bwd, &config, argv[3], &out);
    pragma_model_free(fwd);
    pragma_model_free(bwd);
    if (status != PRAGMA_STATUS_OK) return fail(status);
    printf("%s\n", out);
    pragma_string_free(out);
    return 0;
}
