"""Gamma-family and hypergeometric special functions.

Every series is summed with an explicit error estimate and returned as an
:class:`EvalResult`.  Series whose terms can overflow (large Pochhammer
symbols, large arguments) are evaluated in log-magnitude + sign form; the
``_log_*`` helpers expose that representation to the distribution code so
prefactors can be combined before exponentiating.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy import special as sc

from .errors import ConvergenceError, DomainError

_EPS = np.finfo(float).eps
_PHI2_MAX_DIAGONALS = 2048
_RESCALE = 1e250


def _env_float(name, default):
    raw = os.environ.get(name)
    return float(raw) if raw else default


def _env_int(name, default):
    raw = os.environ.get(name)
    return int(raw) if raw else default


@dataclass(frozen=True)
class EvalResult:
    value: float
    abs_err_estimate: float

    def __post_init__(self):
        err = np.asarray(self.abs_err_estimate)
        if np.any(err < 0):
            raise ValueError("abs_err_estimate must be non-negative")


@dataclass(frozen=True)
class Tolerance:
    """Stopping rule for the series in this module.

    The defaults can be overridden process-wide through the ``AKMS_TOL`` and
    ``AKMS_MAX_TERMS`` environment variables (read at construction time).
    """

    rel: float = field(default_factory=lambda: _env_float("AKMS_TOL", 1e-12))
    abs: float = 1e-300
    max_terms: int = field(default_factory=lambda: _env_int("AKMS_MAX_TERMS", 100_000))

    def __post_init__(self):
        if not 0.0 < self.rel < 1.0:
            raise DomainError(f"relative tolerance must lie in (0, 1), got {self.rel}")
        if self.abs < 0:
            raise DomainError("absolute tolerance must be non-negative")
        if self.max_terms < 1:
            raise DomainError("max_terms must be a positive integer")


def _tol(tol):
    return Tolerance() if tol is None else tol


# -- gamma family -----------------------------------------------------------


def ln_gamma(x: float) -> float:
    """Natural log of the gamma function for real ``x > 0``."""
    x = float(x)
    if not math.isfinite(x) or x <= 0:
        raise DomainError(f"ln_gamma requires a finite positive argument, got {x}")
    return float(sc.gammaln(x))


def digamma(x: float) -> float:
    x = float(x)
    if not math.isfinite(x) or x <= 0:
        raise DomainError(f"digamma requires a finite positive argument, got {x}")
    return float(sc.psi(x))


def ln_pochhammer(a: float, n: int) -> float:
    """``ln((a)_n)`` for ``a > 0``; exactly zero when ``n == 0``."""
    if a <= 0:
        raise DomainError(f"ln_pochhammer requires a > 0, got {a}")
    if n < 0 or int(n) != n:
        raise DomainError(f"ln_pochhammer requires a non-negative integer n, got {n}")
    if n == 0:
        return 0.0
    return ln_gamma(a + n) - ln_gamma(a)


def _log_poch_table(a, n):
    """``(ln|(a)_j|, sign((a)_j))`` for ``j = 0 .. n-1``; valid for any real ``a``."""
    steps = a + np.arange(n - 1, dtype=float)
    with np.errstate(divide="ignore"):
        logs = np.concatenate(([0.0], np.cumsum(np.log(np.abs(steps)))))
    signs = np.concatenate(([1.0], np.cumprod(np.sign(steps))))
    return logs, signs


# -- generic scalar pFq engine ---------------------------------------------


def _pfq_scalar(upper, lower, x, tol):
    """Sum ``pFq(upper; lower; x)`` term by term.

    Returns ``(ln|F|, sign(F), relative error estimate)``.  Terms come from the
    ratio recurrence, accumulated with Neumaier compensation and rescaled when
    the partial sum approaches overflow.
    """
    if any(b <= 0 and float(b).is_integer() for b in lower):
        raise DomainError("lower parameters must not be non-positive integers")
    term = 1.0
    total, comp = 1.0, 0.0
    abs_sum = 1.0
    weighted = 0.0  # sum of |t_k| * k, tracks recurrence rounding growth
    log_scale = 0.0
    # below this index some upper parameter may still flip the term sign
    settle = max([0.0] + [-a for a in upper if a < 0] + [-b for b in lower if b < 0])
    limit_ratio = abs(x) if len(upper) == len(lower) + 1 else 0.0
    tail = math.inf
    calm = 0
    for k in range(tol.max_terms):
        num = x / (k + 1)
        for a in upper:
            num *= a + k
        for b in lower:
            num /= b + k
        term *= num
        if term == 0.0:
            tail = 0.0
            break
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
        abs_sum += abs(term)
        weighted += abs(term) * (k + 1)
        if abs_sum > _RESCALE:
            term /= _RESCALE
            total /= _RESCALE
            comp /= _RESCALE
            abs_sum /= _RESCALE
            weighted /= _RESCALE
            log_scale += math.log(_RESCALE)
        if k + 1 <= settle:
            continue
        nxt = abs(x) / (k + 2)
        for a in upper:
            nxt *= abs(a + k + 1)
        for b in lower:
            nxt /= abs(b + k + 1)
        rho = max(nxt, limit_ratio)
        if rho < 1.0:
            tail = abs(term) * rho / (1.0 - rho)
            s = abs(total + comp)
            if tail <= tol.rel * s or tail * math.exp(log_scale) <= tol.abs:
                calm += 1
                if calm >= 2:
                    break
            else:
                calm = 0
    else:
        s = total + comp
        raise ConvergenceError(
            f"series did not converge within {tol.max_terms} terms",
            partial_value=s * math.exp(log_scale),
        )
    s = total + comp
    if s == 0.0:
        return -math.inf, 0.0, math.inf
    rel = (tail + 4.0 * _EPS * (abs_sum + weighted)) / abs(s)
    return math.log(abs(s)) + log_scale, math.copysign(1.0, s), rel


def _result_from_log(log_abs, sign, rel):
    if sign == 0.0:
        return EvalResult(0.0, 0.0)
    with np.errstate(over="ignore"):
        value = sign * math.exp(log_abs) if log_abs < 709.78 else sign * math.inf
    err = abs(value) * float(rel) if math.isfinite(value) else math.inf
    return EvalResult(value, err)


# -- 1F1 --------------------------------------------------------------------


def _hyp1f1_peak(a, b, z):
    """Index of the largest term of the positive-parameter 1F1 series."""
    # (a + k) z = (b + k)(k + 1)  =>  k^2 + (b + 1 - z) k + (b - a z) = 0
    p = b + 1.0 - z
    disc = p * p - 4.0 * (b - a * z)
    root = 0.5 * (-p + np.sqrt(np.maximum(disc, 0.0)))
    return np.maximum(root, 0.0)


_ASYMP_Z = 1e6


def _log_hyp1f1_asymptotic(a, b, z):
    """Large-``z`` expansion ``e^z z^(a-b) Gamma(b)/Gamma(a) sum (b-a)_s (1-a)_s / (s! z^s)``."""
    lead = z + (a - b) * np.log(z) + sc.gammaln(b) - sc.gammaln(a)
    total = np.ones_like(z)
    term = np.ones_like(z)
    for s in range(30):
        term = term * (b - a + s) * (1.0 - a + s) / ((s + 1.0) * z)
        total += term
        if np.all(np.abs(term) < _EPS * np.abs(total)):
            break
    rel = np.abs(term) / np.abs(total) + _EPS * (np.abs(lead) + 8.0)
    return lead + np.log(total), rel


def _log_hyp1f1_pos(a, b, z, tol=None):
    """``ln 1F1(a; b; z)`` for ``a >= 0``, ``b > 0`` and array ``z >= 0``.

    All terms are non-negative, so only a window of terms around the peak is
    summed; the first term of the window is seeded with log-gamma values.
    Returns ``(log_value, relative_error)`` arrays.
    """
    tol = _tol(tol)
    z = np.atleast_1d(np.asarray(z, dtype=float))
    out = np.zeros_like(z)
    rel = np.zeros_like(z)
    live = z > 0
    if a == 0 or not np.any(live):
        return out, rel
    big = live & (z >= _ASYMP_Z) & (z >= 100.0 * (abs(a) + abs(b) + 1.0) ** 2)
    if np.any(big):
        out[big], rel[big] = _log_hyp1f1_asymptotic(a, b, z[big])
        live &= ~big
        if not np.any(live):
            return out, rel
    zz = z[live]
    ln_tol = math.log(tol.rel)
    peak = _hyp1f1_peak(a, b, zz)
    half = 10.0 * np.sqrt(peak + 1.0) + 30.0
    for _ in range(12):
        k0 = np.floor(np.maximum(peak - half, 0.0))
        length = int(np.max(np.ceil(peak + half) - k0)) + 1
        if length > tol.max_terms:
            raise ConvergenceError(f"1F1({a}, {b}; z) needs more than {tol.max_terms} terms")
        lt0 = (
            sc.gammaln(a + k0) - sc.gammaln(a)
            - sc.gammaln(b + k0) + sc.gammaln(b)
            + k0 * np.log(zz) - sc.gammaln(k0 + 1.0)
        )
        ks = k0[:, None] + np.arange(length - 1, dtype=float)[None, :]
        steps = np.log(a + ks) - np.log(b + ks) - np.log(ks + 1.0) + np.log(zz)[:, None]
        logs = np.empty((zz.size, length))
        logs[:, 0] = lt0
        np.cumsum(steps, axis=1, out=logs[:, 1:])
        logs[:, 1:] += lt0[:, None]
        top = logs.max(axis=1)
        total = top + np.log(np.exp(logs - top[:, None]).sum(axis=1))
        tail_ok = logs[:, -1] - total < ln_tol - 5.0
        # terms before the window increase monotonically, so k0 * t_k0 bounds them
        head = np.where(k0 > 0, np.log(np.maximum(k0, 1.0)) + logs[:, 0] - total, -np.inf)
        head_ok = head < ln_tol - 5.0
        if np.all(tail_ok & head_ok):
            break
        half = half * 2.0
    else:
        raise ConvergenceError(f"1F1({a}, {b}; z) window did not cover the series")
    err = (
        np.exp(logs[:, -1] - total) + np.exp(head)
        + _EPS * (length + np.abs(lt0) + np.abs(total) + 8.0)
    )
    out[live] = total
    rel[live] = err
    return out, rel


def _hyp1f1_any(a, b, x, tol=None):
    """Direct series for any real ``x`` (negative included), scalar only.

    For negative ``x`` the series alternates; the returned error estimate grows
    with the cancellation, so callers can tell when the value is meaningless.
    """
    log_abs, sign, rel = _pfq_scalar((a,), (b,), float(x), _tol(tol))
    return _result_from_log(log_abs, sign, rel)


def hyp1f1(a: float, b: float, x, tol: Tolerance | None = None) -> EvalResult:
    """Kummer's confluent hypergeometric function ``1F1(a; b; x)`` for ``x >= 0``.

    ``x`` may be an array, in which case both fields of the result are arrays.
    """
    tol = _tol(tol)
    if b <= 0 and float(b).is_integer():
        raise DomainError(f"1F1 lower parameter must not be a non-positive integer, got {b}")
    xs = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(xs)) or np.any(xs < 0):
        raise DomainError("hyp1f1 is defined here for finite x >= 0")
    if a >= 0 and b > 0:
        log_val, rel = _log_hyp1f1_pos(a, b, xs, tol)
        with np.errstate(over="ignore"):
            val = np.exp(log_val)
        err = np.where(np.isfinite(val), val * rel, np.inf)
        if xs.ndim == 0:
            return EvalResult(float(val[0]), float(err[0]))
        return EvalResult(val.reshape(xs.shape), err.reshape(xs.shape))
    flat = [_hyp1f1_any(a, b, v, tol) for v in np.atleast_1d(xs).ravel()]
    if xs.ndim == 0:
        return flat[0]
    return EvalResult(
        np.array([r.value for r in flat]).reshape(xs.shape),
        np.array([r.abs_err_estimate for r in flat]).reshape(xs.shape),
    )


# -- 2F1 and 3F2 ------------------------------------------------------------


def _log_hyp2f1(a, b, c, x, tol=None):
    tol = _tol(tol)
    x = float(x)
    if not 0.0 <= x < 1.0:
        raise DomainError(f"hyp2f1 requires 0 <= x < 1, got {x}")
    if c <= 0:
        raise DomainError(f"hyp2f1 requires c > 0, got {c}")
    if x > 0.5:
        # Euler: F(a, b; c; x) = (1 - x)^(c - a - b) F(c - a, c - b; c; x)
        log_abs, sign, rel = _pfq_scalar((c - a, c - b), (c,), x, tol)
        return log_abs + (c - a - b) * math.log1p(-x), sign, rel
    return _pfq_scalar((a, b), (c,), x, tol)


def hyp2f1(a: float, b: float, c: float, x: float, tol: Tolerance | None = None) -> EvalResult:
    """Gauss hypergeometric function on ``0 <= x < 1``."""
    return _result_from_log(*_log_hyp2f1(a, b, c, x, tol))


def hyp3f2(a1, a2, a3, b1, b2, x, tol: Tolerance | None = None) -> EvalResult:
    x = float(x)
    if not 0.0 <= x < 1.0:
        raise DomainError(f"hyp3f2 requires 0 <= x < 1, got {x}")
    if b1 <= 0 or b2 <= 0:
        raise DomainError("hyp3f2 lower parameters must be positive")
    return _result_from_log(*_pfq_scalar((a1, a2, a3), (b1, b2), x, _tol(tol)))


# -- Humbert Phi2 -----------------------------------------------------------


def _phi2_peak(b1, b2, c, x, y):
    """Location of the largest term of a positive-term Phi2 series (coordinate ascent)."""

    def best(b, arg, other):
        # (b + j) arg = (j + 1)(c + other + j)
        if arg == 0.0 or b == 0.0:
            return 0.0
        p = 1.0 + c + other - arg
        q = c + other - b * arg
        return max(0.0, 0.5 * (-p + math.sqrt(max(p * p - 4.0 * q, 0.0))))

    j = k = 0.0
    for _ in range(200):
        j_new = best(b1, x, k)
        k_new = best(b2, y, j_new)
        if abs(j_new - j) < 0.5 and abs(k_new - k) < 0.5:
            return j_new, k_new
        j, k = j_new, k_new
    return j, k


def _phi2_window(b1, b2, c, x, y, tol):
    """Positive-term Phi2 summed over a box around its peak term.

    Box edges are widened until the boundary terms are negligible; terms
    outside the box are bounded by the (log-concave) decay from the edge.
    """
    jp, kp = _phi2_peak(b1, b2, c, x, y)
    wj = 10.0 * math.sqrt(jp + 1.0) + 40.0
    wk = 10.0 * math.sqrt(kp + 1.0) + 40.0
    ln_tol = math.log(tol.rel)
    cap = min(4 * _PHI2_MAX_DIAGONALS, tol.max_terms)

    def axis(b, arg, peak, width):
        if arg == 0.0 or b == 0.0:
            return np.zeros(1), np.zeros(1)
        lo = math.floor(max(peak - width, 0.0))
        idx = np.arange(lo, math.ceil(peak + width) + 1, dtype=float)
        logs = sc.gammaln(b + idx) - sc.gammaln(b) + idx * math.log(arg) - sc.gammaln(idx + 1.0)
        return idx, logs

    for _ in range(10):
        jj, la = axis(b1, x, jp, wj)
        kk, lb = axis(b2, y, kp, wk)
        if jj.size > cap or kk.size > cap:
            raise ConvergenceError(f"Phi2 window exceeds {cap} terms per axis")
        n = jj[:, None] + kk[None, :]
        logs = la[:, None] + lb[None, :] - (sc.gammaln(c + n) - sc.gammaln(c))
        top = float(np.max(logs))
        w = np.exp(logs - top)
        diag = (n - n.min()).astype(np.int64).ravel()
        total = math.fsum(np.bincount(diag, weights=w.ravel()))
        log_total = math.log(total)
        edges = [-math.inf]
        if jj.size > 1:
            edges.append(logs[-1, :].max())
            if jj[0] > 0:
                edges.append(logs[0, :].max() + math.log(jj[0]))
        if kk.size > 1:
            edges.append(logs[:, -1].max())
            if kk[0] > 0:
                edges.append(logs[:, 0].max() + math.log(kk[0]))
        worst = max(edges) - log_total
        if worst < ln_tol - 5.0:
            break
        wj *= 2.0
        wk *= 2.0
    else:
        raise ConvergenceError("Phi2 window did not cover the series")
    scale = float(np.max(np.abs(logs))) + top
    rel = 4.0 * math.exp(worst) + _EPS * (w.size + 4.0 * abs(scale))
    return top + log_total, 1.0, rel


def _phi2_nonneg(b1, b2, c, x, y, tol):
    """Double series for ``x, y >= 0`` summed along anti-diagonals ``j + k = n``."""
    if x == 0.0 and y == 0.0:
        return 0.0, 1.0, 0.0
    if b1 >= 0.0 and b2 >= 0.0:
        return _phi2_window(b1, b2, c, x, y, tol)
    s = x + y
    n_diag = int(32 + s + 6.0 * math.sqrt(s) + abs(b1) * x ** 0.5 + abs(b2) * y ** 0.5)
    cap = min(_PHI2_MAX_DIAGONALS, tol.max_terms)
    while True:
        n_diag = min(n_diag, cap)
        j = np.arange(n_diag, dtype=float)
        lp1, s1 = _log_poch_table(b1, n_diag)
        lp2, s2 = _log_poch_table(b2, n_diag)
        lfact = sc.gammaln(j + 1.0)
        with np.errstate(divide="ignore"):
            ra = lp1 - lfact + (j * math.log(x) if x > 0 else np.where(j == 0, 0.0, -np.inf))
            rb = lp2 - lfact + (j * math.log(y) if y > 0 else np.where(j == 0, 0.0, -np.inf))
        lc = sc.gammaln(c + j) - sc.gammaln(c)
        jj, kk = np.indices((n_diag, n_diag))
        diag = jj + kk
        inside = diag < n_diag
        logs = np.where(inside, ra[:, None] + rb[None, :], -np.inf)
        logs[inside] -= lc[diag[inside]]
        top = np.max(logs)
        w = s1[:, None] * s2[None, :] * np.exp(logs - top)
        d_sum = np.bincount(diag[inside], weights=w[inside], minlength=n_diag)
        d_abs = np.bincount(diag[inside], weights=np.abs(w[inside]), minlength=n_diag)
        total = math.fsum(d_sum)
        last = d_abs[-3:]
        settled = (
            np.all(last <= tol.rel * abs(total))
            and d_abs[-1] <= d_abs[-2] <= d_abs[-3]
        )
        if settled:
            break
        if n_diag >= cap:
            partial = total * math.exp(top) if top < 700 else math.inf
            raise ConvergenceError(
                f"Phi2 series needs more than {cap} diagonals", partial_value=partial
            )
        n_diag *= 2
    if total == 0.0:
        return -math.inf, 0.0, math.inf
    rel = (3.0 * d_abs[-1] + 8.0 * _EPS * n_diag * d_abs.sum()) / abs(total)
    return top + math.log(abs(total)), math.copysign(1.0, total), rel


def _log_phi2(b1, b2, c, x, y, tol=None):
    """``(ln|Phi2|, sign, rel_err)`` with negative arguments moved to the exponent.

    Uses ``Phi2(b1, b2; c; x, y) = e^x Phi2(c - b1 - b2, b2; c; -x, y - x)`` (and
    its mirror in ``y``) so the series that is actually summed always has
    non-negative arguments.
    """
    tol = _tol(tol)
    x, y = float(x), float(y)
    if not (math.isfinite(x) and math.isfinite(y)):
        raise DomainError("Phi2 arguments must be finite")
    if c <= 0:
        raise DomainError(f"Phi2 requires c > 0, got {c}")
    if x >= 0.0 and y >= 0.0:
        return _phi2_nonneg(b1, b2, c, x, y, tol)
    if x <= y:
        log_abs, sign, rel = _phi2_nonneg(c - b1 - b2, b2, c, -x, y - x, tol)
        return log_abs + x, sign, rel
    log_abs, sign, rel = _phi2_nonneg(b1, c - b1 - b2, c, x - y, -y, tol)
    return log_abs + y, sign, rel


def phi2(b1: float, b2: float, c: float, x: float, y: float, tol: Tolerance | None = None) -> EvalResult:
    """Humbert's confluent bivariate function ``Phi2(b1, b2; c; x, y)``.

    Raises :class:`ConvergenceError` when the truncated double series cannot
    meet ``tol``; the CDF code catches it and integrates the density instead.
    """
    return _result_from_log(*_log_phi2(b1, b2, c, x, y, tol))
