"""Equal-weight averages over point sets with certified error bounds.

For a trigonometric-polynomial integrand the average minus the true
integral (the constant coefficient) equals (1/N) sum over nonzero
frequencies of c_k S(k), so any certified exponential-sum bound B yields
the certificate |mean - c_0| <= (sum_{k != 0} |c_k|) * B / N.  Arbitrary
callables get a plain mean with no certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DimensionMismatchError, FrequencyOutOfBoxError
from .pointsets import PointSet
from .sensing import SparseTrigPoly, evaluate


@dataclass(frozen=True)
class QmcEstimate:
    mean: complex
    n: int
    error_bound: float | None

    def to_json(self) -> dict:
        return {
            "mean": [self.mean.real, self.mean.imag],
            "n": self.n,
            "error_bound": self.error_bound,
        }


def certified_sum_bound(X: PointSet) -> tuple[float, int] | None:
    """(bound B, box halfwidth) for the set, or None when uncertified."""
    prov = X.provenance
    d = X.d
    if prov.family in ("pset", "param-pset"):
        if prov.weil_certified:
            return (d - 1) * math.sqrt(prov.p), prov.p - 1
    elif prov.family == "pq":
        if prov.cardinality_certified and prov.weil_certified:
            m = prov.p + prov.q
            return (d - 1) * math.sqrt(2 * m) + 1.0, min(prov.p, prov.q) - 1
    elif prov.family in ("qsquare", "rsquare"):
        if prov.weil_certified:
            return (d - 1) * float(prov.p), prov.p - 1
    return None


def _kahan_mean(values) -> complex:
    sr = si = cr = ci = 0.0
    n = 0
    for v in values:
        v = complex(v)
        y = v.real - cr
        s = sr + y
        cr = (s - sr) - y
        sr = s
        y = v.imag - ci
        s = si + y
        ci = (s - si) - y
        si = s
        n += 1
    return complex(sr / n, si / n)


def qmc_mean(f, X: PointSet) -> QmcEstimate:
    """Equal-weight average of f over the stored entries of X.

    A SparseTrigPoly integrand over a certified set gets an error bound;
    its support must then lie inside the certified frequency box.  The
    mean is computed as c_0 plus the average of the nonconstant part, so
    an integrand with no nonzero frequencies integrates exactly.
    """
    n = len(X.points)
    if not isinstance(f, SparseTrigPoly):
        return QmcEstimate(_kahan_mean(f(pt.as_floats()) for pt in X.points), n, None)

    if f.d != X.d:
        raise DimensionMismatchError(f"integrand is {f.d}-dim, set is {X.d}-dim")
    cert = certified_sum_bound(X)
    bound = None
    residual = {k: c for k, c in f.coeffs.items() if any(k)}
    if cert is not None:
        B, halfwidth = cert
        for k in residual:
            if any(abs(v) > halfwidth for v in k):
                raise FrequencyOutOfBoxError(
                    f"frequency {k} outside certified box [-{halfwidth},{halfwidth}]^{X.d}"
                )
        bound = sum(abs(c) for c in residual.values()) * B / n
    g = SparseTrigPoly(f.d, f.s, residual)
    mean = f.c0 + _kahan_mean(evaluate(g, pt) for pt in X.points)
    return QmcEstimate(mean, n, bound)
