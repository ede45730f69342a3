"""Hand-built code for the binary erasure MAC ``Z = X + Y``.

User 1 sends a weight-1 word ``e_m`` and user 2 its complement.  The
decoder only looks at the sum of the received symbols and at which of the
extreme symbols 0 and 2 occur.
"""

from __future__ import annotations

import numpy as np

from ..errors import InvalidParams
from .codebook import Codebook
from .decoders import Decoder, blame, pair


def erasure_example_decode(z):
    z = np.asarray(z, dtype=np.int64)
    n = z.size
    total = int(z.sum())
    twos = np.flatnonzero(z == 2)
    zeros = np.flatnonzero(z == 0)
    if total >= n + 2:
        return blame(1)
    if total <= n - 2:
        return blame(2)
    if total == n + 1:
        # one excess 1 from user 1 leaves a 0 where user 2's word has its 0
        return blame(1) if zeros.size else blame(2)
    if total == n - 1:
        return blame(2) if twos.size else blame(1)
    if twos.size == 1 and zeros.size == 1:
        m1, m2 = int(twos[0]) + 1, int(zeros[0]) + 1
        return pair(m1, m2, (m1,), (m2,))
    return pair(1, 1, fallback="ambiguous")


def build_erasure_example_code(n):
    """Weight-1 / weight-(n-1) code with its sum-threshold decoder.

    Returns
    -------
    (Codebook, Decoder)
    """
    if n < 3:
        raise InvalidParams("the erasure example needs n >= 3")
    eye = np.eye(n, dtype=np.int64)
    comp1 = np.array([n - 1, 1]) / n
    code = Codebook(eye, 1 - eye, comp1, comp1[::-1])
    return code, Decoder(erasure_example_decode, "erasure-example")
