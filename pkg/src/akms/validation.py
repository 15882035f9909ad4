"""Self-check suite behind ``akms validate``.

Each check compares a library result against an independent route
(quadrature, a closed form, Monte Carlo, a finite difference) and returns a
:class:`CheckResult`.  Thresholds live in :class:`Thresholds` so the command
line can scale them all at once; scaling them down far enough must make the
suite fail, which is how the suite is sanity-checked.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import special as sc
from scipy import stats
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from . import core, metrics, mixture, numerics, sampler, zoo
from .errors import AkmsError

EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class Thresholds:
    normalization: float = 1e-8
    mean_rel: float = 1e-12
    mixture_rel: float = 1e-9
    weight_sum: float = 1e-9
    cdf_abs: float = 1e-8
    derivative_rel: float = 1e-6
    moment_rel: float = 1e-7
    ks_factor: float = 1.95
    reduction_rel: float = 1e-8
    limit_gap: float = 1e-4
    diversity_rel: float = 0.02
    outage_asymptote_rel: float = 0.05
    mc_sigmas: float = 3.0
    capacity_gap_bits: float = 0.02
    g_prime_rel: float = 1e-5

    def scaled(self, factor: float) -> "Thresholds":
        """Every tolerance multiplied by ``factor`` (the KS factor and sigma counts included)."""
        return Thresholds(**{f.name: getattr(self, f.name) * factor for f in dataclasses.fields(self)})


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    threshold: float
    detail: str = ""

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.passed))
        object.__setattr__(self, "measured", float(self.measured))
        object.__setattr__(self, "threshold", float(self.threshold))


# -- parameter sets -------------------------------------------------------------

NORMALIZATION_GRID = tuple(
    core.AkmsParams(a, k, mu, m)
    for a, k, mu, m in itertools.product((0.8, 2.0, 3.5), (0.0, 1.0, 10.0), (0.6, 1.0, 3.2), (0.5, 2.0, 50.0))
)
MIXTURE_GRID = tuple(
    core.AkmsParams(a, k, mu, m)
    for mu, m in itertools.product(range(1, 7), repeat=2)
    for k in (0.1, 1.0, 10.0)
    for a in (0.9, 2.0, 3.1)
)

# figure parameter families, named by what they vary
PDF_ALPHA_SET = tuple(core.AkmsParams(a, 3.0, 3.2, 7.3) for a in (1.5, 2.0, 3.0))
PDF_KAPPA_SETS = {
    "m>mu": tuple(core.AkmsParams(2.3, k, 1.8, 5.5, 1.0) for k in (0.5, 2.0, 5.0, 10.0)),
    "m<mu": tuple(core.AkmsParams(2.3, k, 5.5, 1.8, 2.0) for k in (0.5, 2.0, 5.0, 10.0)),
}
PDF_MU_SET = tuple(core.AkmsParams(1.8, 4.0, mu, 6.0) for mu in (1.0, 2.0, 3.0))
PDF_M_SET = tuple(core.AkmsParams(2.1, 5.0, 3.0, m) for m in (0.5, 2.0, 10.0, 100.0))
PERFORMANCE_SET = tuple(core.AkmsParams(a, 3.1, 3.0, 2.0) for a in (1.5, 2.5, 3.5))
DIVERSITY_SET = tuple(core.AkmsParams(a, 3.1, mu, 2.0) for a in (1.3, 2.0, 2.8) for mu in (1.0, 3.0))
KS_SET = PDF_ALPHA_SET + PDF_MU_SET + PERFORMANCE_SET
CAPACITY_SNR_DB = (0.0, 10.0, 20.0, 30.0)
OUTAGE_THRESHOLDS = (0.1, 0.5)


def _label(p: core.AkmsParams) -> str:
    return f"(alpha={p.alpha:g}, kappa={p.kappa:g}, mu={p.mu:g}, m={p.m:g}, mean={p.mean_snr:g})"


def _worst(pairs):
    """``(value, label)`` with the largest value; NaN counts as worst."""
    best = (-math.inf, "")
    for v, lab in pairs:
        if math.isnan(v):
            return math.inf, lab
        if v > best[0]:
            best = (v, lab)
    return best


# -- analytic checks --------------------------------------------------------------


def check_normalization(params: Sequence[core.AkmsParams], th: Thresholds) -> CheckResult:
    worst, lab = _worst((abs(core.integrate_against_pdf(p).value - 1.0), _label(p)) for p in params)
    return CheckResult("normalization", worst <= th.normalization, worst, th.normalization, lab)


def check_mean(params, th: Thresholds) -> CheckResult:
    worst, lab = _worst((abs(core.moment(p, 1.0) / p.mean_snr - 1.0), _label(p)) for p in params)
    return CheckResult("mean-anchoring", worst <= th.mean_rel, worst, th.mean_rel, lab)


def check_moments(params, th: Thresholds, orders=(0.5, 1.0, 2.0, 3.0)) -> CheckResult:
    rows = []
    for p in params:
        for n in orders:
            quad = core.integrate_against_pdf(p, lambda x, n=n: x**n, tol=1e-12, g_power=n).value
            rows.append((abs(core.moment(p, n) / quad - 1.0), f"{_label(p)} n={n:g}"))
    worst, lab = _worst(rows)
    return CheckResult("moments-vs-quadrature", worst <= th.moment_rel, worst, th.moment_rel, lab)


EVAL_FRACTIONS = (0.1, 0.5, 1.0, 2.0, 5.0)


def check_cdf_quadrature(params, th: Thresholds) -> CheckResult:
    rows = []
    n_phi2 = 0
    for p in params:
        for u in EVAL_FRACTIONS:
            g = u * p.mean_snr
            quad = core.integrate_against_pdf(p, upper=g, tol=1e-12).value
            rows.append((abs(core.cdf(p, g) - quad), f"{_label(p)} snr={g:g}"))
            closed = core.phi2_cdf(p, g)
            if closed is not None:
                n_phi2 += 1
                rows.append((abs(closed.value - quad), f"{_label(p)} snr={g:g} (phi2)"))
    worst, lab = _worst(rows)
    detail = f"{lab}; phi2 form certified at {n_phi2}/{len(params) * len(EVAL_FRACTIONS)} points"
    return CheckResult("cdf-vs-quadrature", worst <= th.cdf_abs, worst, th.cdf_abs, detail)


def check_cdf_derivative(params, th: Thresholds, h_rel: float = 1e-5) -> CheckResult:
    """Central difference of the CDF against the density.

    A point is skipped when even correctly rounded CDF values could not
    resolve the tolerance there: ``eps * F / (2 h pdf) > tol``.
    """
    rows = []
    skipped = 0
    for p in params:
        h = h_rel * p.mean_snr
        for u in EVAL_FRACTIONS:
            g = u * p.mean_snr
            f = core.pdf(p, g)
            hi = core.cdf(p, g + h)
            floor = EPS * hi / (2.0 * h * f) if f > 0 else math.inf
            if floor > th.derivative_rel:
                skipped += 1
                continue
            d = (hi - core.cdf(p, g - h)) / (2.0 * h)
            rows.append((abs(d / f - 1.0), f"{_label(p)} snr={g:g}"))
    worst, lab = _worst(rows) if rows else (0.0, "")
    detail = f"{lab}; {len(rows)} points checked, {skipped} below double-precision resolution"
    return CheckResult("cdf-derivative", bool(rows) and worst <= th.derivative_rel, worst, th.derivative_rel, detail)


def _quantile(p, q):
    f = lambda x: core.cdf(p, x) - q  # noqa: E731
    lo, hi = p.mean_snr * 1e-3, p.mean_snr
    while f(lo) > 0:
        lo *= 1e-3
    while f(hi) < 0:
        hi *= 10.0
    return brentq(f, lo, hi, rtol=1e-6)


def check_mixture(params, th: Thresholds, points: int = 20) -> CheckResult:
    """Signed alpha-mu mixture against the general density between the 1% and 99% quantiles."""
    rows = []
    sums = []
    used = 0
    for p in params:
        if p.mu != int(p.mu) or p.m != int(p.m) or (p.kappa == 0 and p.mu > p.m):
            continue
        d = mixture.MixtureDist.from_params(p)
        if d.ill_conditioned:
            continue
        used += 1
        sums.append((abs(d.spec.weight_sum() - 1.0), _label(p)))
        g = np.geomspace(_quantile(p, 0.01), _quantile(p, 0.99), points)
        ref = core.pdf(p, g)
        rel = np.max(np.abs(mixture.mixture_pdf(d, g) / ref - 1.0))
        rows.append((float(rel), _label(p)))
    if not used:
        return CheckResult("mixture-equivalence", True, 0.0, th.mixture_rel, "not applicable (non-integer mu or m)")
    worst, lab = _worst(rows)
    wsum, wlab = _worst(sums)
    ok = worst <= th.mixture_rel and wsum <= th.weight_sum
    return CheckResult(
        "mixture-equivalence", ok, worst, th.mixture_rel,
        f"{lab}; worst |sum C_i - 1| = {wsum:.3g} at {wlab}; {used} parameter sets",
    )


# -- special cases ---------------------------------------------------------------


def _closed_forms(mean):
    """``(model, independent density)`` pairs for the reductions with classical closed forms."""
    q = 0.5
    eta, mu_eta = 0.5, 1.0
    ks_kappa, ks_mu, ks_m = 3.0, 2.0, 1.5
    w_alpha = 2.5

    def rayleigh(g):
        return np.exp(-g / mean) / mean

    def nakagami(g):
        return stats.gamma.pdf(g, 2.0, scale=mean / 2.0)

    def weibull(g):
        d = math.gamma(1.0 + 2.0 / w_alpha) / mean
        half = w_alpha / 2.0
        return half * d**half * g ** (half - 1.0) * np.exp(-((d * g) ** half))

    def hoyt(g):
        a = (1.0 + q * q) ** 2 / (4.0 * q * q * mean)
        b = (1.0 - q**4) / (4.0 * q * q * mean)
        return (1.0 + q * q) / (2.0 * q * mean) * np.exp(-(a - b) * g) * sc.i0e(b * g)

    def eta_mu(g):
        h = (2.0 + 1.0 / eta + eta) / 4.0
        big_h = (1.0 / eta - eta) / 4.0
        mu = mu_eta
        pref = 2.0 * math.sqrt(math.pi) * mu ** (mu + 0.5) * h**mu / (
            math.gamma(mu) * big_h ** (mu - 0.5) * mean ** (mu + 0.5)
        )
        arg = 2.0 * mu * big_h * g / mean
        return pref * g ** (mu - 0.5) * np.exp(-2.0 * mu * h * g / mean + arg) * sc.ive(mu - 0.5, arg)

    def kms(g):
        k, mu, m = ks_kappa, ks_mu, ks_m
        t = g / mean
        pref = mu**mu * m**m * (1.0 + k) ** mu / (math.gamma(mu) * mean * (mu * k + m) ** m)
        return pref * t ** (mu - 1.0) * np.exp(-mu * (1.0 + k) * t) * sc.hyp1f1(
            m, mu, mu * mu * k * (1.0 + k) / (mu * k + m) * t
        )

    return [
        (zoo.NamedModel(zoo.ModelName.RAYLEIGH, {}), rayleigh),
        (zoo.NamedModel(zoo.ModelName.NAKAGAMI_M, {"m": 2.0}), nakagami),
        (zoo.NamedModel(zoo.ModelName.WEIBULL, {"alpha": w_alpha}), weibull),
        (zoo.NamedModel(zoo.ModelName.HOYT, {"q": q}), hoyt),
        (zoo.NamedModel(zoo.ModelName.ETA_MU, {"eta": eta, "mu": mu_eta}), eta_mu),
        (zoo.NamedModel(zoo.ModelName.KAPPA_MU_SHADOWED, {"kappa": ks_kappa, "mu": ks_mu, "m": ks_m}), kms),
    ]


def check_reductions(th: Thresholds, mean: float = 1.0) -> CheckResult:
    grid = np.geomspace(0.01, 5.0, 40) * mean
    rows = []
    for model, ref in _closed_forms(mean):
        img = zoo.to_akms(model, mean).params
        rows.append((float(np.max(np.abs(core.pdf(img, grid) / ref(grid) - 1.0))), model.name.value))
    worst, lab = _worst(rows)
    return CheckResult("special-cases", worst <= th.reduction_rel, worst, th.reduction_rel, lab)


def check_limit_rows(th: Thresholds, mean: float = 1.0) -> CheckResult:
    """Convergence of the large-``m`` surrogates (not part of the suites: the gap decays like ``1/M_LIMIT``)."""
    grid = np.geomspace(0.1, 5.0, 20) * mean
    rows = [
        (zoo.limit_gap(zoo.NamedModel.with_defaults(n), mean, grid), n.value)
        for n in sorted(zoo.LIMIT_MODELS, key=lambda n: n.value)
    ]
    worst, lab = _worst(rows)
    return CheckResult("limit-rows", worst <= th.limit_gap, worst, th.limit_gap, f"{lab} at M_LIMIT={zoo.M_LIMIT:g}")


# -- performance metrics ---------------------------------------------------------


def check_diversity(params, th: Thresholds) -> CheckResult:
    rows = []
    for p in params:
        lo = metrics.outage_probability(metrics.OutageQuery(p.with_mean(1e5), 1.0))
        hi = metrics.outage_probability(metrics.OutageQuery(p.with_mean(1e6), 1.0))
        slope = math.log10(lo) - math.log10(hi)
        rows.append((abs(slope / metrics.diversity_order(p) - 1.0), _label(p)))
    worst, lab = _worst(rows)
    return CheckResult("diversity-slope", worst <= th.diversity_rel, worst, th.diversity_rel, lab)


def check_outage_asymptote(params, th: Thresholds, snr_db: float = 40.0) -> CheckResult:
    rows = []
    for p in params:
        q = metrics.OutageQuery(p.with_mean(10.0 ** (snr_db / 10.0)), 1.0)
        rows.append((abs(metrics.outage_probability(q) / metrics.asymptotic_outage(q) - 1.0), _label(p)))
    worst, lab = _worst(rows)
    return CheckResult("outage-asymptote", worst <= th.outage_asymptote_rel, worst, th.outage_asymptote_rel, lab)


def check_jensen(params, th: Thresholds, snr_db=CAPACITY_SNR_DB + (40.0, 60.0)) -> CheckResult:
    rows = []
    for p in params:
        for s in snr_db:
            pp = p.with_mean(10.0 ** (s / 10.0))
            cap = metrics.ergodic_capacity(pp)
            excess = cap.bits_per_hz - cap.abs_err_estimate - metrics.awgn_capacity(pp.mean_snr)
            rows.append((excess, _label(pp)))
    worst, lab = _worst(rows)
    return CheckResult("jensen-bound", worst <= 0.0, worst, 0.0, f"largest capacity minus awgn at {lab}")


def check_capacity_asymptote(params, th: Thresholds, snr_db: float = 60.0) -> CheckResult:
    rows = []
    for p in params:
        pp = p.with_mean(10.0 ** (snr_db / 10.0))
        gap = metrics.ergodic_capacity(pp).bits_per_hz - metrics.asymptotic_capacity(pp)
        rows.append((abs(gap), _label(pp)))
    worst, lab = _worst(rows)
    return CheckResult("capacity-asymptote", worst <= th.capacity_gap_bits, worst, th.capacity_gap_bits, lab)


def check_g_prime(params, th: Thresholds) -> CheckResult:
    rows = []
    for p in params:
        closed = metrics.mean_log_snr_ratio(p)
        fd = metrics.moment_derivative_fd(p)
        rows.append((abs(fd / closed - 1.0), _label(p)))
    worst, lab = _worst(rows)
    return CheckResult("moment-derivative", worst <= th.g_prime_rel, worst, th.g_prime_rel, lab)


# -- Monte Carlo -----------------------------------------------------------------


def ks_against_cdf(p: core.AkmsParams, samples, points: int = 2001) -> tuple[float, float]:
    """KS distance between samples and the analytic CDF.

    The CDF is evaluated exactly on ``points`` sample quantiles and
    interpolated (monotone cubic) in between; the second return value is the
    interpolation error measured at the interval midpoints, which callers add
    to the statistic.
    """
    e = numerics.Ecdf.from_samples(samples)
    grid = np.unique(np.quantile(e.sorted_samples, np.linspace(0.0, 1.0, points)))
    f = PchipInterpolator(grid, core.cdf(p, grid))
    mid = 0.5 * (grid[:-1] + grid[1:])
    interp_err = float(np.max(np.abs(f(mid) - core.cdf(p, mid)))) if mid.size else 0.0
    return numerics.ks_statistic(e, f), interp_err


@lru_cache(maxsize=16)
def _batch(p: core.AkmsParams, n: int, seed: int, method: str) -> np.ndarray:
    return sampler.sample(p, n, seed, method).samples


def check_ks(params, th: Thresholds, n: int, seed: int = 2024) -> CheckResult:
    rows = []
    limit = numerics.dkw_threshold(n, th.ks_factor)
    for p in params:
        methods = ["conditional"] + (["physical"] if p.mu == int(p.mu) else [])
        for meth in methods:
            stat, err = ks_against_cdf(p, _batch(p, n, seed, meth))
            rows.append((stat + err, f"{_label(p)} {meth}"))
    worst, lab = _worst(rows)
    return CheckResult("sampler-ks", worst < limit, worst, limit, f"{lab}; n={n}; {len(rows)} batches")


def check_outage_mc(params, th: Thresholds, n: int, seed: int = 2025) -> CheckResult:
    rows = []
    for p in params:
        s = _batch(p.with_mean(1.0), n, seed, "conditional")
        for t in OUTAGE_THRESHOLDS:
            exact = metrics.outage_probability(metrics.OutageQuery(p.with_mean(1.0), t))
            freq = np.count_nonzero(s <= t) / n
            se = math.sqrt(exact * (1.0 - exact) / n)
            rows.append((abs(freq - exact) / se if se > 0 else math.inf, f"{_label(p)} threshold={t:g}"))
    worst, lab = _worst(rows)
    return CheckResult("outage-vs-monte-carlo", worst <= th.mc_sigmas, worst, th.mc_sigmas, f"{lab} (in standard errors)")


def check_capacity_mc(params, th: Thresholds, n: int, seed: int = 2025) -> CheckResult:
    rows = []
    for p in params:
        s = _batch(p.with_mean(1.0), n, seed, "conditional")
        for db in CAPACITY_SNR_DB:
            mean = 10.0 ** (db / 10.0)
            bits = np.log2(1.0 + mean * s)
            se = float(np.std(bits, ddof=1)) / math.sqrt(n)
            exact = metrics.ergodic_capacity(p.with_mean(mean)).bits_per_hz
            rows.append((abs(float(np.mean(bits)) - exact) / se, f"{_label(p.with_mean(mean))}"))
    worst, lab = _worst(rows)
    return CheckResult("capacity-vs-monte-carlo", worst <= th.mc_sigmas, worst, th.mc_sigmas, f"{lab} (in standard errors)")


# -- qualitative figure behaviour -----------------------------------------------


def _low_mass(ps, frac=0.1):
    return [core.cdf(p, frac * p.mean_snr) for p in ps]


def figure_orderings() -> dict[str, bool]:
    """Qualitative trends of the figure families, as CDF comparisons at ``0.1 * mean``."""

    def dec(v):
        return all(b < a for a, b in zip(v, v[1:]))

    def inc(v):
        return all(b > a for a, b in zip(v, v[1:]))

    out = {
        "alpha-up-less-low-snr": dec(_low_mass(PDF_ALPHA_SET)),
        "kappa-up-less-low-snr-when-m>mu": dec(_low_mass(PDF_KAPPA_SETS["m>mu"])),
        "kappa-up-more-low-snr-when-m<mu": inc(_low_mass(PDF_KAPPA_SETS["m<mu"])),
        "mu-up-less-low-snr": dec(_low_mass(PDF_MU_SET)),
        "m-up-less-low-snr": dec(_low_mass(PDF_M_SET)),
    }
    at = metrics.OutageQuery
    hi_snr = [metrics.outage_probability(at(p.with_mean(1e3), 1.0)) for p in PERFORMANCE_SET]
    out["alpha-up-lower-outage"] = dec(hi_snr)
    caps = [metrics.ergodic_capacity(p.with_mean(1e2)).bits_per_hz for p in PERFORMANCE_SET]
    out["alpha-up-higher-capacity"] = inc(caps) and caps[-1] < metrics.awgn_capacity(1e2)
    return out


def check_figures(th: Thresholds) -> CheckResult:
    res = figure_orderings()
    bad = [k for k, ok in res.items() if not ok]
    return CheckResult("figure-orderings", not bad, float(len(bad)), 0.0, ", ".join(bad) or f"{len(res)} trends hold")


# -- suites ----------------------------------------------------------------------


@dataclass(frozen=True)
class SuiteConfig:
    ks_n: int
    mc_n: int


QUICK = SuiteConfig(ks_n=100_000, mc_n=1_000_000)
FULL = SuiteConfig(ks_n=1_000_000, mc_n=10_000_000)
SUITES = {"quick": QUICK, "full": FULL}


def _guard(name, fn):
    try:
        return fn()
    except (AkmsError, ArithmeticError, ValueError) as exc:
        return CheckResult(name, False, math.nan, math.nan, f"raised {type(exc).__name__}: {exc}")


def plan(suite: str, params: Sequence[core.AkmsParams] | None, th: Thresholds) -> list[tuple[str, Callable]]:
    """The named checks of a suite.

    With ``params`` every check runs on that parameter list only; without
    it, ``quick`` uses the Rayleigh case and ``full`` the reference grids.
    """
    cfg = SUITES[suite]
    if params is not None or suite == "quick":
        ps = list(params) if params is not None else [zoo.to_akms(zoo.NamedModel.with_defaults("rayleigh")).params]
        return [
            ("normalization", lambda: check_normalization(ps, th)),
            ("mean-anchoring", lambda: check_mean(ps, th)),
            ("moments-vs-quadrature", lambda: check_moments(ps, th)),
            ("cdf-vs-quadrature", lambda: check_cdf_quadrature(ps, th)),
            ("cdf-derivative", lambda: check_cdf_derivative(ps, th)),
            ("mixture-equivalence", lambda: check_mixture(ps, th)),
            ("sampler-ks", lambda: check_ks(ps, th, cfg.ks_n)),
            ("jensen-bound", lambda: check_jensen(ps, th)),
            ("outage-asymptote", lambda: check_outage_asymptote(ps, th)),
            ("diversity-slope", lambda: check_diversity(ps, th)),
            ("capacity-asymptote", lambda: check_capacity_asymptote(ps, th)),
            ("moment-derivative", lambda: check_g_prime(ps, th)),
        ]
    figure_params = list(PDF_ALPHA_SET + PDF_MU_SET + PDF_M_SET + PERFORMANCE_SET)
    figure_params += list(PDF_KAPPA_SETS["m>mu"] + PDF_KAPPA_SETS["m<mu"])
    return [
        ("normalization", lambda: check_normalization(NORMALIZATION_GRID, th)),
        ("mean-anchoring", lambda: check_mean(NORMALIZATION_GRID, th)),
        ("moments-vs-quadrature", lambda: check_moments(figure_params, th)),
        ("cdf-vs-quadrature", lambda: check_cdf_quadrature(NORMALIZATION_GRID, th)),
        ("cdf-derivative", lambda: check_cdf_derivative(NORMALIZATION_GRID, th)),
        ("mixture-equivalence", lambda: check_mixture(MIXTURE_GRID, th)),
        ("special-cases", lambda: check_reductions(th)),
        ("sampler-ks", lambda: check_ks(KS_SET, th, cfg.ks_n)),
        ("diversity-slope", lambda: check_diversity(DIVERSITY_SET, th)),
        ("outage-asymptote", lambda: check_outage_asymptote(PERFORMANCE_SET, th)),
        ("outage-vs-monte-carlo", lambda: check_outage_mc(PERFORMANCE_SET, th, cfg.mc_n)),
        ("jensen-bound", lambda: check_jensen(PERFORMANCE_SET, th)),
        ("capacity-vs-monte-carlo", lambda: check_capacity_mc(PERFORMANCE_SET, th, cfg.mc_n)),
        ("capacity-asymptote", lambda: check_capacity_asymptote(PERFORMANCE_SET, th)),
        ("moment-derivative", lambda: check_g_prime(PERFORMANCE_SET + DIVERSITY_SET, th)),
        ("figure-orderings", lambda: check_figures(th)),
    ]


def run_suite(
    suite: str = "quick",
    params: Sequence[core.AkmsParams] | None = None,
    tol_scale: float = 1.0,
    workers: int | None = None,
) -> list[CheckResult]:
    """Run a suite; results come back in plan order whatever the thread count."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    th = Thresholds().scaled(tol_scale)
    jobs = plan(suite, params, th)
    if workers == 1:
        return [_guard(name, fn) for name, fn in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: _guard(*job), jobs))
