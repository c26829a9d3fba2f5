"""Parameter matching for the growth models.

All searches evaluate ensembles with common random numbers: member ``i``
uses the same seed at every probed parameter value, which keeps the
response curves smooth enough for bisection.  Crossings are re-checked on
an ensemble with fresh seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from sklearn.base import clone

from .ensemble import map_members, mean_sem
from .exceptions import NotConverged, Unbracketable
from .network import NetStats, build_network, net_stats

LIGHT_FIELDS = ("gc", "L0", "L", "k_max")
MAX_BISECTIONS = 40


@dataclass(frozen=True)
class CalibrationTarget:
    gc_target: int
    L0_target: int
    L_target: int
    source: Optional[NetStats] = None

    def __post_init__(self):
        if self.L0_target > self.L_target:
            raise ValueError("L0_target exceeds L_target")
        if self.source is not None and self.gc_target > self.source.n_nodes:
            raise ValueError("gc_target exceeds the node count")

    @classmethod
    def from_stats(cls, stats: NetStats) -> "CalibrationTarget":
        return cls(int(stats.gc), int(stats.L0), int(stats.L), stats)

    @classmethod
    def from_lexicon(cls, lexicon) -> "CalibrationTarget":
        stats, _ = net_stats(build_network(lexicon), with_geodesics=False)
        return cls.from_stats(stats)


def _light_member(model, seed):
    res = model.sample(seed)
    stats, dist = net_stats(res.network, with_geodesics=False)
    return {"gc": stats.gc, "L0": stats.L0, "L": stats.L, "k_max": stats.k_max,
            "degree_histogram": dist.degree_histogram}


def fresh_seed(seed: int) -> list:
    """Master seed for verification ensembles, disjoint from ``seed``'s members."""
    return [seed, 1]


class _Evaluator:
    """Caches member results per parameter setting so ensembles can grow."""

    def __init__(self, template, seed, jobs):
        self.template = template
        self.seed = seed
        self.jobs = jobs
        self._cache = {}

    def __call__(self, n: int, **params):
        key = tuple(sorted(params.items()))
        members = self._cache.setdefault(key, [])
        if len(members) < n:
            model = clone(self.template).set_params(**params)
            model.fit(self.template.reference_)
            members += [r[0] for r in map_members(
                _light_member, model, range(len(members), n), self.seed, self.jobs)]
        return summarize(members[:n])


@dataclass
class Summary:
    n: int
    mean: dict
    sem: dict
    members: list = field(repr=False, default_factory=list)

    def degree_distribution(self) -> dict:
        return mean_histogram_normalised(m["degree_histogram"] for m in self.members)


def summarize(members) -> Summary:
    mean, sem = {}, {}
    for name in LIGHT_FIELDS:
        mean[name], sem[name] = mean_sem(m[name] for m in members)
    return Summary(len(members), mean, sem, list(members))


def mean_histogram_normalised(histograms) -> dict:
    histograms = list(histograms)
    out = {}
    for h in histograms:
        total = sum(h.values())
        for k, c in h.items():
            out[k] = out.get(k, 0.0) + c / total / len(histograms)
    return dict(sorted(out.items()))


def low_degree_tv(p: dict, q: dict, max_degree: int = 5) -> float:
    """Total-variation distance of two degree distributions restricted to k <= max_degree."""
    def norm(h):
        total = sum(h.values())
        return {k: v / total for k, v in h.items()}
    p, q = norm(p), norm(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in range(max_degree + 1))


def _within(mean, sem, target, tol, n_sem=2.0) -> bool:
    sem = 0.0 if sem is None or math.isnan(sem) else sem
    return abs(mean - target) <= tol * target + n_sem * sem


def verify(template, params: dict, targets: dict, tol: float, ensemble: int,
           seed: int, jobs: int = 1) -> dict:
    """Fresh-seed ensemble at ``params``; each target must lie within tol + 2 SE."""
    evaluator = _Evaluator(template, fresh_seed(seed), jobs)
    summ = evaluator(ensemble, **params)
    checks = {}
    for name, target in targets.items():
        checks[name] = dict(target=target, mean=summ.mean[name], sem=summ.sem[name],
                            passed=_within(summ.mean[name], summ.sem[name], target, tol))
    return dict(params=dict(params), ensemble=ensemble, checks=checks,
                passed=all(c["passed"] for c in checks.values()))


@dataclass
class CrossingResult:
    param: str
    value: float
    mean: float
    sem: float
    target: float
    iterations: int
    ensemble: int
    bracket: tuple
    value_sem: float
    stats_mean: dict
    stats_sem: dict
    probes: list = field(default_factory=list)
    verification: Optional[dict] = None
    degree_distribution: dict = field(default_factory=dict, repr=False)

    def to_dict(self) -> dict:
        d = {k: v for k, v in self.__dict__.items() if k != "degree_distribution"}
        d["bracket"] = list(self.bracket)
        return d


def _prepare(template, reference):
    template = clone(template)
    template.reference_ = reference
    return template


def calibrate_f(template, reference, gc_target: float, tol: float = 0.02,
                ensemble: int = 10, seed: int = 0, jobs: int = 1, *,
                f_bounds=(0.0, 0.999), max_ensemble: Optional[int] = None,
                max_iter: int = MAX_BISECTIONS, check: bool = True,
                fixed: Optional[dict] = None, _evaluator=None) -> CrossingResult:
    """Bisection on ``f`` until the ensemble mean giant component is within
    ``tol`` (relative) of ``gc_target``.

    ``template`` is an unfitted growth estimator; ``reference`` the lexicon it
    is fitted to.  When the midpoint mean lies within one standard error of
    the target the ensemble is doubled, up to ``max_ensemble``.  Raises
    :class:`Unbracketable` if the target lies outside the response at the
    bracket ends and :class:`NotConverged` after ``max_iter`` bisections.
    """
    fixed = dict(fixed or {})
    max_ensemble = max_ensemble or 8 * ensemble
    ev = _evaluator or _Evaluator(_prepare(template, reference), seed, jobs)
    probes = []

    def probe(f, n):
        s = ev(n, f=float(f), **fixed)
        probes.append(dict(f=float(f), n=s.n, gc=s.mean["gc"], gc_sem=s.sem["gc"],
                           L0=s.mean["L0"], L=s.mean["L"]))
        return s

    def done(f, s, it, lo, hi, slo, shi):
        slope = (shi.mean["gc"] - slo.mean["gc"]) / (hi - lo) if hi > lo else float("nan")
        sem = s.sem["gc"]
        vsem = abs(sem / slope) if slope and not math.isnan(slope) and not math.isnan(sem) \
            else float("nan")
        res = CrossingResult("f", float(f), s.mean["gc"], sem, gc_target, it, s.n,
                             (lo, hi), vsem, dict(s.mean), dict(s.sem), probes,
                             degree_distribution=s.degree_distribution())
        if check:
            res.verification = verify(ev.template, dict(f=float(f), **fixed),
                                      {"gc": gc_target}, tol, s.n, seed, jobs)
        return res

    lo, hi = f_bounds
    s_lo = probe(lo, ensemble)
    if abs(s_lo.mean["gc"] - gc_target) < tol * gc_target:
        return done(lo, s_lo, 0, lo, hi, s_lo, s_lo)
    if s_lo.mean["gc"] > gc_target:
        raise Unbracketable(f"mean gc {s_lo.mean['gc']:.1f} at f={lo} already exceeds "
                            f"the target {gc_target}")
    s_hi = probe(hi, ensemble)
    if abs(s_hi.mean["gc"] - gc_target) < tol * gc_target:
        return done(hi, s_hi, 0, lo, hi, s_lo, s_hi)
    if s_hi.mean["gc"] < gc_target:
        raise Unbracketable(f"mean gc {s_hi.mean['gc']:.1f} at f={hi} stays below "
                            f"the target {gc_target}")

    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        n = ensemble
        s = probe(mid, n)
        while (abs(s.mean["gc"] - gc_target) <= s.sem["gc"] and n < max_ensemble
               and abs(s.mean["gc"] - gc_target) >= tol * gc_target):
            n = min(2 * n, max_ensemble)
            s = probe(mid, n)
        if abs(s.mean["gc"] - gc_target) < tol * gc_target:
            return done(mid, s, it, lo, hi, s_lo, s_hi)
        if s.mean["gc"] < gc_target:
            lo, s_lo = mid, s
        else:
            hi, s_hi = mid, s
    raise NotConverged(f"f bisection did not reach tol={tol} in {max_iter} steps "
                       f"(bracket [{lo}, {hi}])")


@dataclass
class CoreScan:
    W_C: int
    eps: float
    L0_target: float
    points: list
    crossings: list
    crossing_f: list
    crossing_L: list
    directions: list
    degree_report: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.crossings)

    def __len__(self):
        return len(self.crossings)

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def default_core_grid(reference, W_C: int, step: float = 0.2) -> list:
    """``0, step, ...`` up to twice the mean degree of core words in ``reference``."""
    net = build_network(reference)
    core = net.lengths < W_C
    mean_deg = float(net.degrees[core].mean()) if core.any() else 0.0
    top = max(2 * mean_deg, step)
    return [round(float(x), 10) for x in np.arange(0.0, top + step / 2, step)]


def _interp(x1, y1, x2, y2, y):
    if y2 == y1:
        return x1
    return x1 + (y - y1) * (x2 - x1) / (y2 - y1)


def scan_core_density(template, reference, W_C: int, eps: float, gc_target: float,
                      L0_target: float, grid=None, tol: float = 0.02, ensemble: int = 10,
                      seed: int = 0, jobs: int = 1, *, f_bounds=(0.0, 0.999),
                      max_crossings: Optional[int] = None,
                      degree_reference: Optional[dict] = None,
                      low_degree: int = 5, tv_threshold: float = 0.1) -> CoreScan:
    """Giant-component link count versus core density ``m_C``.

    At each grid point ``f`` is calibrated to ``gc_target`` and the mean
    ``L0`` recorded; crossings of ``L0_target`` are located by linear
    interpolation between neighbouring feasible points.  Points where ``f``
    cannot be calibrated are kept in ``points`` with ``feasible=False``.
    """
    if grid is None:
        grid = default_core_grid(reference, W_C)
    mode = "cp_eps" if eps > 0 else getattr(template, "mode", "cp")
    if mode == "gc":
        mode = "cp"
    base = _prepare(clone(template).set_params(mode=mode, W_C=W_C, eps=eps), reference)
    ev = _Evaluator(base, seed, jobs)
    points, crossings, cf, cl, dirs = [], [], [], [], []
    prev = None
    for m in grid:
        try:
            res = calibrate_f(base, reference, gc_target, tol, ensemble, seed, jobs,
                              f_bounds=f_bounds, check=False, fixed={"m_C": float(m)},
                              _evaluator=ev)
        except (Unbracketable, NotConverged) as exc:
            points.append(dict(m_C=float(m), feasible=False, reason=str(exc)))
            prev = None
            continue
        pt = dict(m_C=float(m), feasible=True, f=res.value, gc=res.mean,
                  L0=res.stats_mean["L0"], L0_sem=res.stats_sem["L0"],
                  L=res.stats_mean["L"], L_sem=res.stats_sem["L"], ensemble=res.ensemble,
                  degree_distribution=res.degree_distribution)
        points.append(pt)
        y = pt["L0"] - L0_target
        if y == 0:
            crossings.append(pt["m_C"])
            cf.append(pt["f"])
            cl.append(pt["L"])
            dirs.append("touch")
        elif prev is not None:
            y_prev = prev["L0"] - L0_target
            if y_prev != 0 and (y_prev < 0) != (y < 0):
                crossings.append(_interp(prev["m_C"], prev["L0"], m, pt["L0"], L0_target))
                t = (crossings[-1] - prev["m_C"]) / (m - prev["m_C"])
                cf.append(prev["f"] + t * (pt["f"] - prev["f"]))
                cl.append(prev["L"] + t * (pt["L"] - prev["L"]))
                dirs.append("up" if y > 0 else "down")
        prev = pt
        if max_crossings and len(crossings) >= max_crossings:
            break

    report = []
    if degree_reference is not None:
        for pt in points:
            if pt.get("feasible"):
                tv = low_degree_tv(pt["degree_distribution"], degree_reference, low_degree)
                report.append(dict(m_C=pt["m_C"], low_degree_tv=tv,
                                   flagged=tv > tv_threshold))
    for pt in points:
        pt.pop("degree_distribution", None)
    return CoreScan(W_C, eps, L0_target, points, crossings, cf, cl, dirs, report)


@dataclass
class EpsilonResult:
    eps: float
    m_C: float
    f: float
    L: float
    iterations: int
    probes: list
    verification: Optional[dict] = None

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def calibrate_epsilon(template, reference, W_C: int, target: CalibrationTarget,
                      tol: float = 0.02, ensemble: int = 10, seed: int = 0, jobs: int = 1, *,
                      grid=None, eps_bounds=(0.0, 0.95), f_bounds=(0.0, 0.999),
                      max_iter: int = MAX_BISECTIONS, check: bool = True) -> EpsilonResult:
    """Outer bisection on ``eps`` so the total link count meets ``L_target``.

    For each probed ``eps`` the low-``m_C`` crossing of the giant-component
    link count (with its calibrated ``f``) is located and its total link
    count read off by interpolation.
    """
    if grid is None:
        grid = default_core_grid(reference, W_C)
    probes = []

    def probe(eps):
        scan = scan_core_density(template, reference, W_C, eps, target.gc_target,
                                 target.L0_target, grid, tol, ensemble, seed, jobs,
                                 f_bounds=f_bounds, max_crossings=1)
        if not scan.crossings:
            probes.append(dict(eps=eps, feasible=False))
            raise Unbracketable(f"no core density matches L0 at eps={eps}")
        p = dict(eps=eps, feasible=True, m_C=scan.crossings[0], f=scan.crossing_f[0],
                 L=scan.crossing_L[0])
        probes.append(p)
        return p

    def done(p, it):
        res = EpsilonResult(p["eps"], p["m_C"], p["f"], p["L"], it, probes)
        if check:
            params = dict(mode="cp_eps", W_C=W_C, eps=p["eps"], m_C=p["m_C"], f=p["f"])
            res.verification = verify(_prepare(template, reference), params,
                                      {"gc": target.gc_target, "L0": target.L0_target,
                                       "L": target.L_target}, tol, ensemble, seed, jobs)
        return res

    L_t = target.L_target
    lo, hi = eps_bounds
    p_lo = probe(lo)
    if abs(p_lo["L"] - L_t) < tol * L_t:
        return done(p_lo, 0)
    if p_lo["L"] > L_t:
        raise Unbracketable(f"total links {p_lo['L']:.1f} at eps={lo} exceed the target")
    p_hi = probe(hi)
    if abs(p_hi["L"] - L_t) < tol * L_t:
        return done(p_hi, 0)
    if p_hi["L"] < L_t:
        raise Unbracketable(f"total links {p_hi['L']:.1f} at eps={hi} stay below the target")
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        try:
            p = probe(mid)
        except Unbracketable:
            # no L0 match in the middle of the bracket: shrink towards the feasible end
            hi = mid
            continue
        if abs(p["L"] - L_t) < tol * L_t:
            return done(p, it)
        if p["L"] < L_t:
            lo = mid
        else:
            hi = mid
    raise NotConverged(f"eps bisection did not reach tol={tol} in {max_iter} steps")
