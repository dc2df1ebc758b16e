#include <stdio.h>
#include <string.h>

#include "quilt.h"

static const char *BELL =
    "OPENQASM 2.0;\n"
    "include \"qelib1.inc\";\n"
    "qreg q[2];\n"
    "creg c[2];\n"
    "h q[0];\n"
    "cx q[0],q[1];\n"
    "measure q -> c;\n";

int main(void) {
    QuiltDevice *dev = NULL;
    QuiltCircuit *circ[3] = {NULL, NULL, NULL};
    QuiltPlan *plan = NULL;
    char *json = NULL;

    if (quilt_device_preset("falcon27", &dev) != QUILT_STATUS_OK) {
        fprintf(stderr, "device: %s\n", quilt_last_error());
        return 1;
    }
    for (int i = 0; i < 3; i++) {
        if (quilt_circuit_parse(BELL, "bell.qasm", &circ[i]) != QUILT_STATUS_OK) {
            fprintf(stderr, "parse: %s\n", quilt_last_error());
            return 1;
        }
    }
    if (quilt_plan_compile(dev, (const QuiltCircuit *const *)circ, 3, 1, false, &plan) != QUILT_STATUS_OK) {
        fprintf(stderr, "compile: %s\n", quilt_last_error());
        return 1;
    }
    size_t placed = 0;
    for (size_t r = 0; r < quilt_plan_num_rounds(plan); r++) {
        placed += quilt_plan_round_len(plan, r);
    }
    size_t layout[8];
    size_t len = 0;
    if (quilt_plan_layout(plan, 0, 0, layout, 8, &len) != QUILT_STATUS_OK || len != 2) {
        fprintf(stderr, "layout: %s\n", quilt_last_error());
        return 1;
    }
    if (quilt_plan_simulate_json(plan, 3.0, 1, 256, 7, &json) != QUILT_STATUS_OK) {
        fprintf(stderr, "simulate: %s\n", quilt_last_error());
        return 1;
    }
    QuiltCircuit *bad = NULL;
    QuiltStatus s = quilt_circuit_parse("OPENQASM 2.0;\nqreg q[1];\nfoo q[0];\n", "bad.qasm", &bad);
    printf("placed=%zu json_ok=%d bad=%d err=%s\n", placed, strstr(json, "\"pst\"") != NULL, (int)s,
           quilt_last_error());
    quilt_string_free(json);
    quilt_plan_free(plan);
    for (int i = 0; i < 3; i++) quilt_circuit_free(circ[i]);
    quilt_device_free(dev);
    return 0;
}
