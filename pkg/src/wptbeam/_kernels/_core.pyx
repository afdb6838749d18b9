# cython: language_level=3
"""Compiled hot kernels: per-assignment energies and exhaustive code search.

Must stay semantically and floating-point identical to fallback.py.
"""

from libc.stdlib cimport free, malloc


def assignment_energies(const double[:, :, ::1] gains, codes, double transfer_time):
    """Per-receiver energies for one full code assignment; see fallback."""
    cdef Py_ssize_t n_rx = gains.shape[0]
    cdef Py_ssize_t n_tx = gains.shape[1]
    cdef Py_ssize_t j, p
    cdef double acc
    cdef Py_ssize_t* c = <Py_ssize_t*> malloc(n_tx * sizeof(Py_ssize_t))
    if c == NULL:
        raise MemoryError()
    try:
        for p in range(n_tx):
            c[p] = codes[p]
        out = []
        for j in range(n_rx):
            acc = 0.0
            for p in range(n_tx):
                acc += gains[j, p, c[p]]
            out.append(transfer_time * acc)
        return out
    finally:
        free(c)


def search_exhaustive(const double[:, :, ::1] gains, double transfer_time, double e_min):
    """Enumerate every joint assignment in lexicographic order; see fallback."""
    cdef Py_ssize_t n_rx = gains.shape[0]
    cdef Py_ssize_t n_tx = gains.shape[1]
    cdef Py_ssize_t n_codes = gains.shape[2]
    cdef Py_ssize_t j, p, pos
    cdef double acc, ej, total
    cdef double best_any_total = -1e308
    cdef double best_feas_total = -1e308
    cdef bint feasible, have_any = False, have_feas = False, running = True
    cdef Py_ssize_t* combo = <Py_ssize_t*> malloc(n_tx * sizeof(Py_ssize_t))
    cdef Py_ssize_t* best_any = <Py_ssize_t*> malloc(n_tx * sizeof(Py_ssize_t))
    cdef Py_ssize_t* best_feas = <Py_ssize_t*> malloc(n_tx * sizeof(Py_ssize_t))
    if combo == NULL or best_any == NULL or best_feas == NULL:
        free(combo); free(best_any); free(best_feas)
        raise MemoryError()
    try:
        for p in range(n_tx):
            combo[p] = 0
        while running:
            total = 0.0
            feasible = True
            for j in range(n_rx):
                acc = 0.0
                for p in range(n_tx):
                    acc += gains[j, p, combo[p]]
                ej = transfer_time * acc
                if ej < e_min:
                    feasible = False
                total += ej
            if not have_any or total > best_any_total:
                best_any_total = total
                have_any = True
                for p in range(n_tx):
                    best_any[p] = combo[p]
            if feasible and (not have_feas or total > best_feas_total):
                best_feas_total = total
                have_feas = True
                for p in range(n_tx):
                    best_feas[p] = combo[p]
            # advance the odometer, rightmost digit fastest (lexicographic order)
            pos = n_tx - 1
            while True:
                combo[pos] += 1
                if combo[pos] < n_codes:
                    break
                combo[pos] = 0
                pos -= 1
                if pos < 0:
                    running = False
                    break
        any_list = [best_any[p] for p in range(n_tx)]
        if not have_feas:
            return None, None, any_list, best_any_total
        feas_list = [best_feas[p] for p in range(n_tx)]
        return feas_list, best_feas_total, any_list, best_any_total
    finally:
        free(combo)
        free(best_any)
        free(best_feas)
