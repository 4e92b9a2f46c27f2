# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled quantifier kernels; same contract as ``_pykernels``."""

from libc.stdint cimport int64_t

cdef enum:
    CONV, DEC, CAUT, WMON, MON, SMON, NU, SNU, SDEC, WB


cdef inline bint pair_ok(int code, Py_ssize_t s, Py_ssize_t t, const int64_t[:] sem,
                         const int64_t[:] hid, const int64_t[:] cnt, int64_t total) nogil:
    cdef int64_t a = sem[s]
    cdef int64_t b = sem[t]
    if code == CONV:
        return (cnt[t] & ~a) != 0 or hid[s] == hid[t]
    if code == CAUT:
        return not ((b & ~a) == 0 and a != b)
    if code == WMON:
        return (cnt[t] & ~a) != 0 or (a & ~b) == 0
    if code == MON:
        return ((a & total) & ~(b & total)) == 0
    if code == SMON:
        return (a & ~b) == 0
    return True


cdef inline bint triple_ok(int code, Py_ssize_t r, Py_ssize_t s, Py_ssize_t t, const int64_t[:] sem,
                           const int64_t[:] hid, const int64_t[:] cnt, int64_t total) nogil:
    if code == DEC:
        return sem[r] != sem[t] or sem[r] == sem[s]
    if code == NU:
        return not (sem[r] == sem[t] and sem[t] == total) or sem[r] == sem[s]
    if code == SNU:
        return not (sem[r] == sem[t] and sem[t] == total) or hid[r] == hid[s]
    if code == SDEC:
        return sem[r] != sem[t] or hid[r] == hid[s]
    if code == WB:
        return r == s or hid[r] == hid[s] or (cnt[s] & sem[t] & ~sem[r]) != 0
    return True


def first_violation(int code, const int64_t[:] sem, const int64_t[:] hid, const int64_t[:] cnt, int64_t total):
    cdef Py_ssize_t n = sem.shape[0]
    cdef Py_ssize_t t, s, r
    if code == CONV or code == CAUT or code == WMON or code == MON or code == SMON:
        for t in range(n):
            for s in range(t + 1):
                if not pair_ok(code, s, t, sem, hid, cnt, total):
                    return (t, s, -1)
        return None
    if code not in (DEC, NU, SNU, SDEC, WB):
        raise ValueError(code)
    for t in range(n):
        for s in range(1, t):
            for r in range(s):
                if not triple_ok(code, r, s, t, sem, hid, cnt, total):
                    return (t, s, r)
    for t in range(n):
        for s in range(t + 1):
            for r in range(s + 1):
                if (r == s or s == t) and not triple_ok(code, r, s, t, sem, hid, cnt, total):
                    return (t, s, r)
    return None
