# cython: language_level=3
"""Compiled hot kernels: replacement-process stepping and pair counting.

Semantics match ``_pykernels`` exactly; see there for the contract.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def evolve_slots(parent, uniforms, double prob, long long next_id):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] par = np.ascontiguousarray(parent, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] u = np.ascontiguousarray(uniforms, dtype=np.float64)
    cdef Py_ssize_t n = par.shape[0]
    if u.shape[0] != n:
        raise ValueError("uniforms and parent must have equal length")
    cdef cnp.ndarray[cnp.int64_t, ndim=1] child = par.copy()
    cdef Py_ssize_t i
    cdef long long nid = next_id
    for i in range(n):
        if u[i] < prob:
            child[i] = nid
            nid += 1
    return child, nid


def pair_shared_counts(classes):
    cdef cnp.ndarray[cnp.int64_t, ndim=2] cls = np.ascontiguousarray(classes, dtype=np.int64)
    cdef Py_ssize_t k = cls.shape[0]
    cdef Py_ssize_t n = cls.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=2] out = np.zeros((k, k), dtype=np.int64)
    cdef Py_ssize_t i, j, s
    cdef long long c
    for i in range(k):
        for j in range(i + 1, k):
            c = 0
            for s in range(n):
                if cls[i, s] == cls[j, s]:
                    c += 1
            out[i, j] = c
            out[j, i] = c
    return out
