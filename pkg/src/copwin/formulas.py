"""Closed-form quantities for k-domination in G(n, 1/2).

Everything with a power-of-two denominator is returned as an exact
:class:`fractions.Fraction`; quantities that overflow floats are returned as
base-2 logarithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


def _half_pow(e: int) -> Fraction:
    return Fraction(1, 1 << e)


def _check_kl(k: int, l: int) -> None:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not 0 <= l < k:
        raise ValueError(f"need 0 <= l < k, got k={k}, l={l}")


@dataclass(frozen=True)
class FirstMoment:
    exact: Fraction
    value: float
    log2: float


def kdom_first_moment(n: int, k: int) -> FirstMoment:
    """``C(n,k) (1 - 2^-k)^(n-k)``: expected number of dominating ``k``-sets.

    Same number as ``(1-2^-k)^-k C(n,k) (1-2^-k)^n``. ``value`` is the exact
    rational correctly rounded to a float, ``log2`` is computed in log space.
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
    base = 1 - _half_pow(k)
    exact = math.comb(n, k) * base ** (n - k)
    log2 = math.log2(math.comb(n, k)) + (n - k) * math.log2(base)
    try:
        value = float(exact)
    except OverflowError:
        value = math.inf
    return FirstMoment(exact, value, log2)


def labelled_count_formula(n: int, k: int) -> float:
    """log2 of ``(1-2^-k)^-k C(n,k) 2^(n^2/2 - (1/2 - log2(1-2^-k)) n)``.

    The asymptotic number of labelled ``k``-cop-win graphs on ``n`` vertices,
    evaluated term by term from the displayed expression.
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
    lb = math.log2(1 - 2.0 ** -k)
    return -k * lb + math.log2(math.comb(n, k)) + n * n / 2 - (0.5 - lb) * n


def pair_domination_probability(k: int, l: int) -> Fraction:
    """P(a vertex outside ``S ∪ T`` is dominated by both ``S`` and ``T``).

    ``|S| = |T| = k`` and ``|S ∩ T| = l``. Both forms of the closed expression
    are evaluated and must agree.
    """
    _check_kl(k, l)
    lhs = (1 - _half_pow(l)) + (1 - _half_pow(k - l)) ** 2 * _half_pow(l)
    rhs = 1 - _half_pow(k) - _half_pow(k) * (1 - _half_pow(k - l))
    if lhs != rhs:
        raise ArithmeticError(f"pair-domination forms disagree: {lhs} != {rhs}")
    return lhs


def pair_domination_bound(k: int) -> Fraction:
    return 1 - Fraction(3, 2) * _half_pow(k)


def eta(k: int, l: int) -> Fraction:
    """P(u has no neighbour in ``T`` | u is dominated by ``S``), ``|T| = l < |S| = k``."""
    _check_kl(k, l)
    return _half_pow(l) * (1 - _half_pow(k - l)) / (1 - _half_pow(k))


def chernoff_bound(mean: float, eps: float, as_probability: bool = False) -> float:
    """``2 exp(-eps^2 mean / 3)`` bounding ``P(|X - EX| >= eps EX)`` for binomial X."""
    if mean < 0:
        raise ValueError(f"mean must be non-negative, got {mean}")
    if not 0 < eps < 1.5:
        raise ValueError(f"eps must lie in (0, 3/2), got {eps}")
    bound = 2.0 * math.exp(-eps * eps * mean / 3.0)
    return min(bound, 1.0) if as_probability else bound
