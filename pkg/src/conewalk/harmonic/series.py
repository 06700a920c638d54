"""Tail extrapolation for series whose terms decay like a power of k.

Terms a_k for k >= N are modelled as c1 k^-s + c2 k^-(s+1/2) + c3 k^-(s+1), fitted
by least squares on the last half of the computed terms. Even and odd k are fitted
separately because lattice walks often charge only one parity at a time. The
fitted tail is summed exactly through the Hurwitz zeta function:

    sum over even k >= N of k^-t = 2^-t zeta(t, ceil(N/2))
    sum over odd  k >= N of k^-t = 2^-t zeta(t, j + 1/2),  j = ceil((N-1)/2)
"""

import logging
import math
from collections.abc import Sequence

import numpy as np
import numpy.typing as npt
from scipy.special import zeta

logger = logging.getLogger(__name__)

MIN_FIT_POINTS = 4
_OFFSETS = (0.0, 0.5, 1.0)


def _parity_tail(
    ks: npt.NDArray[np.float64], terms: npt.NDArray[np.float64], s: float, start: int, parity: int
) -> float:
    mask = ks % 2 == parity
    k, a = ks[mask], terms[mask]
    if len(k) < MIN_FIT_POINTS or not np.any(a != 0.0):
        return 0.0

    exponents = [s + o for o in _OFFSETS]
    basis = np.column_stack([k ** (-t) for t in exponents])
    # scale columns so lstsq is not dominated by the fastest-decaying one
    norms = np.linalg.norm(basis, axis=0)
    coef, *_ = np.linalg.lstsq(basis / norms, a, rcond=None)
    coef = coef / norms

    first = start if start % 2 == parity else start + 1
    shift = first / 2.0  # k = 2 (i + shift), i >= 0
    tail = 0.0
    for c, t in zip(coef, exponents, strict=True):
        tail += c * 2.0 ** (-t) * float(zeta(t, shift))
    return tail


def extrapolate_tail(
    terms: Sequence[float] | npt.NDArray[np.float64], s: float, first_k: int = 0
) -> float:
    """
    Estimated sum of the terms beyond the computed ones.

    Args:
        terms: a_k for k = first_k, ..., first_k + len(terms) - 1
        s: leading decay exponent, must exceed 1
        first_k: index of the first term

    Returns:
        Extrapolated sum of a_k over k >= first_k + len(terms); 0 when too few terms
    """
    if s <= 1.0:
        raise ValueError(f"decay exponent must exceed 1 for a summable tail, got {s}")
    a = np.asarray(terms, dtype=np.float64)
    total = len(a)
    end = first_k + total
    half = total // 2
    ks = np.arange(first_k + half, end, dtype=np.float64)
    window = a[half:]
    # k = 0 has no power-law meaning
    keep = ks >= 1
    ks, window = ks[keep], window[keep]
    if len(ks) < 2 * MIN_FIT_POINTS:
        return 0.0
    tail = _parity_tail(ks, window, s, end, 0) + _parity_tail(ks, window, s, end, 1)
    if not math.isfinite(tail):
        logger.warning(f"Tail extrapolation diverged (s={s}, {total} terms); using 0")
        return 0.0
    return tail
