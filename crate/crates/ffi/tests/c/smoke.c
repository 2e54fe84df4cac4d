#include <stdio.h>
#include "nnvqe.h"

int main(void) {
    NnvqeHamiltonian *h = NULL;
    NnvqeCircuit *c = NULL;
    double theta[64] = {0};
    double grad[64];
    double e = 0.0;
    char msg[256];

    if (nnvqe_hamiltonian_xxz(8, 1.5, 0.75, &h) != NNVQE_STATUS_OK) return 1;
    if (nnvqe_circuit_hea(8, 1, &c) != NNVQE_STATUS_OK) return 1;
    if (nnvqe_gradient(c, h, theta, nnvqe_circuit_n_params(c), &e, grad, 64) != NNVQE_STATUS_OK) {
        nnvqe_last_error_message(msg, sizeof msg);
        fprintf(stderr, "%s\n", msg);
        return 1;
    }
    printf("%s %f\n", nnvqe_version(), e);
    nnvqe_circuit_free(c);
    nnvqe_hamiltonian_free(h);
    return 0;
}
