import pytest
from hypothesis import given
from hypothesis import strategies as st

from limitlab import _pykernels, kernels
from limitlab.restrictions import RESTRICTIONS

import reference

CODES = {p.value: getattr(kernels, p.value) for p in RESTRICTIONS}


@st.composite
def instances(draw, bits=4, max_len=7):
    n = draw(st.integers(0, max_len))
    sem = draw(st.lists(st.integers(0, 2**bits - 1), min_size=n, max_size=n))
    hid = draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))
    steps = draw(st.lists(st.integers(0, 2**bits - 1), min_size=n, max_size=n))
    cnt, acc = [], 0
    for m in steps:
        acc |= m if draw(st.booleans()) else 0
        cnt.append(acc)
    total = acc | draw(st.integers(0, 2**bits - 1))
    return sem, hid, cnt, total


def as_sets(mask):
    return frozenset(i for i in range(64) if mask >> i & 1)


@given(instances(), st.sampled_from(sorted(CODES)))
def test_python_kernel_matches_reference(inst, pred):
    sem, hid, cnt, total = inst
    expected = reference.first_violation(
        pred, hid, [as_sets(m) for m in sem], [as_sets(m) for m in cnt], as_sets(total)
    )
    assert _pykernels.first_violation(CODES[pred], sem, hid, cnt, total) == expected


@pytest.mark.skipif(kernels.BACKEND != "cython", reason="compiled kernels not built")
@given(instances(bits=62, max_len=9), st.sampled_from(sorted(CODES)))
def test_backends_agree(inst, pred):
    sem, hid, cnt, total = inst
    code = CODES[pred]
    assert kernels.first_violation(code, sem, hid, cnt, total, backend="cython") == _pykernels.first_violation(
        code, sem, hid, cnt, total
    )


def test_wide_masks_fall_back_to_python():
    sem = [1 << 70, 1 << 3]
    got = kernels.first_violation(kernels.SMON, sem, [0, 1], [0, 0], 0, backend="cython")
    assert got == (1, 0, -1)


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.first_violation(kernels.SMON, [], [], [], 0, backend="fortran")
