"""Independent reference computations shared by the tests."""

import mpmath
import numpy as np
from scipy.linalg import expm


def ladder_generator(N, g):
    """``i (g S+ + conj(g) S-)`` on the (N+1)-dimensional ladder."""
    m = np.arange(N)
    up = np.sqrt((m + 1.0) * (N - m))
    S = np.zeros((N + 1, N + 1), dtype=complex)
    S[m + 1, m] = g * up
    S[m, m + 1] = np.conj(g) * up
    return 1j * S


def ladder_expm(N, g):
    return expm(ladder_generator(N, g))


def ladder_expm_mp(N, g, dps=50):
    with mpmath.workdps(dps):
        G = mpmath.matrix(ladder_generator(N, g).tolist())
        E = mpmath.expm(G)
        return np.array([[complex(E[i, j]) for j in range(N + 1)] for i in range(N + 1)])
