"""Pure-Python quantifier kernels (reference and fallback).

All arrays are indexed by effective position. ``sem`` and ``cnt`` are
bitmask-encoded sets (language of the hypothesis, content of the data read
so far), ``hid`` is the interned structural identity of the hypothesis and
``total`` the content of the whole text. A kernel returns the least
violating ``(t, s, r)`` (``r = -1`` for two-index predicates) or None.
"""

CONV, DEC, CAUT, WMON, MON, SMON, NU, SNU, SDEC, WB = range(10)
PAIR_CODES = frozenset({CONV, CAUT, WMON, MON, SMON})


def _pair_ok(code, s, t, sem, hid, cnt, total):
    a, b = sem[s], sem[t]
    if code == CONV:
        return cnt[t] & ~a != 0 or hid[s] == hid[t]
    if code == CAUT:
        return not (b & ~a == 0 and a != b)
    if code == WMON:
        return cnt[t] & ~a != 0 or a & ~b == 0
    if code == MON:
        return (a & total) & ~(b & total) == 0
    if code == SMON:
        return a & ~b == 0
    raise ValueError(code)


def _triple_ok(code, r, s, t, sem, hid, cnt, total):
    if code == DEC:
        return sem[r] != sem[t] or sem[r] == sem[s]
    if code == NU:
        return not (sem[r] == sem[t] == total) or sem[r] == sem[s]
    if code == SNU:
        return not (sem[r] == sem[t] == total) or hid[r] == hid[s]
    if code == SDEC:
        return sem[r] != sem[t] or hid[r] == hid[s]
    if code == WB:
        return r == s or hid[r] == hid[s] or cnt[s] & sem[t] & ~sem[r] != 0
    raise ValueError(code)


def first_violation(code, sem, hid, cnt, total):
    n = len(sem)
    if code in PAIR_CODES:
        for t in range(n):
            for s in range(t + 1):
                if not _pair_ok(code, s, t, sem, hid, cnt, total):
                    return (t, s, -1)
        return None
    # strict triples r < s < t first, then degenerate ones
    for t in range(n):
        for s in range(1, t):
            for r in range(s):
                if not _triple_ok(code, r, s, t, sem, hid, cnt, total):
                    return (t, s, r)
    for t in range(n):
        for s in range(t + 1):
            for r in range(s + 1):
                if (r == s or s == t) and not _triple_ok(code, r, s, t, sem, hid, cnt, total):
                    return (t, s, r)
    return None
