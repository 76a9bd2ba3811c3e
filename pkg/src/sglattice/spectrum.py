"""Membership in the lattice spectrum, the point/continuous/residual
classification, the products ``P_m`` and the orbit witnesses that drive
their divergence."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from .decimation import R
from .exact import as_scalar, format_scalar, is_exact, is_zero
from .julia import IN, INDETERMINATE, OUT, CodingWord, is_in_julia, julia_cloud, orbit_along, sigma_family
from .lattice import WordSpec, address
from .operators import VertexFunction

SNAP_TOL = 1e-10
SINGULAR_TOL = 1e-9
ESCAPE_RADIUS = 8

POINT, CONTINUOUS, RESIDUAL, RESOLVENT, OPEN = "point", "continuous", "residual", "resolvent", "open"
S4, S5, S6, GENERIC, EXCEPTIONAL, NONE = "Σ4", "Σ5", "Σ6", "julia-generic", "exceptional", "none"
VERDICTS = (POINT, CONTINUOUS, RESIDUAL, RESOLVENT, OPEN)
SERIES = (S4, S5, S6, GENERIC, EXCEPTIONAL, NONE)


class IndeterminateMembershipError(ValueError):
    def __init__(self, lam, certificate: str):
        super().__init__(f"membership of {lam} is undecided: {certificate}")
        self.lam = lam
        self.certificate = certificate


class SingularProductError(ArithmeticError):
    pass


# -- membership and series -----------------------------------------------


@lru_cache(maxsize=None)
def _family_array(series: int, depth: int) -> np.ndarray:
    return sigma_family(series, depth).array()


@lru_cache(maxsize=None)
def _family_words(series: int, depth: int) -> dict:
    return {round(complex(v).real, 9): w for v, w in sigma_family(series, depth).points}


def _snap(x: float, series: int, depth: int) -> Optional[str]:
    """Branch word of the family member within ``SNAP_TOL`` of ``x``."""
    arr = _family_array(series, depth)
    i = int(np.searchsorted(arr, x))
    for j in (i - 1, i):
        if 0 <= j < len(arr) and abs(arr[j] - x) <= SNAP_TOL:
            return _family_words(series, depth).get(round(float(arr[j]), 9), "")
    return None


@dataclass(frozen=True)
class SeriesMatch:
    series: str
    certificate: str


def _exact_series(lam, depth: int) -> Optional[SeriesMatch]:
    if lam == 6:
        return SeriesMatch(S6, "seed 6")
    if lam == 0:
        return SeriesMatch(EXCEPTIONAL, "fixed point 0")
    x = lam
    for k in range(depth + 1):
        if x == 3:
            return SeriesMatch(S6, f"R^{k}(lambda)=3")
        if x == 5:
            return SeriesMatch(S5, f"R^{k}(lambda)=5")
        if x == 4:
            return SeriesMatch(S4, f"R^{k}(lambda)=4")
        if abs(complex(x)) > ESCAPE_RADIUS:
            return None
        x = R(x)
    return None


def _float_series(x, depth: int) -> Optional[SeriesMatch]:
    z = complex(x)
    if abs(z.imag) > SNAP_TOL:
        return None
    x = z.real
    if abs(x) <= SNAP_TOL:
        return SeriesMatch(EXCEPTIONAL, "within 1e-10 of 0")
    for key, label in ((6, S6), (5, S5), (4, S4)):
        w = _snap(x, key, depth)
        if w is not None:
            return SeriesMatch(label, f"within 1e-10 of branch word '{w}' over {key}")
    return None


def series_match(lam, depth: int = 12) -> Optional[SeriesMatch]:
    lam = as_scalar(lam)
    if is_exact(lam):
        return _exact_series(lam, max(depth, 64))
    return _float_series(lam, depth)


@dataclass(frozen=True)
class Membership:
    status: str
    certificate: str
    series: str


def membership(lam, depth: int = 12) -> Membership:
    """Spectrum membership with its evidence and the series label."""
    lam = as_scalar(lam)
    match = series_match(lam, depth)
    if match is not None:
        return Membership(IN, match.certificate, match.series)
    verdict = is_in_julia(lam, max_iter=max(64, depth))
    if verdict.status == IN:
        return Membership(IN, verdict.note, GENERIC)
    if verdict.status == OUT:
        return Membership(OUT, f"escape at iterate {verdict.iterations}", NONE)
    return Membership(INDETERMINATE, f"bounded for {verdict.iterations} iterates", NONE)


def in_spectrum(lam, depth: int = 12) -> str:
    """``in``, ``out`` or ``indeterminate``; the answer does not depend on p."""
    return membership(lam, depth).status


def series_of(lam, depth: int = 12) -> str:
    return membership(lam, depth).series


# -- classification ------------------------------------------------------


def parse_space(space) -> str:
    """Normalise to ``"1"``, ``"p"`` (1 < p < inf), ``"inf"`` or ``"c0"``."""
    s = str(space).strip().lower().replace("ℓ", "").replace("l^", "")
    if s in ("c0", "c_0", "c₀"):
        return "c0"
    if s in ("inf", "infinity", "∞"):
        return "inf"
    try:
        p = float(s)
    except ValueError:
        raise ValueError(f"unknown space {space!r}") from None
    if p == 1:
        return "1"
    if math.isinf(p):
        return "inf"
    if p > 1:
        return "p"
    raise ValueError("p must lie in [1, inf]")


def _rule(space: str, boundary: bool, series: str) -> tuple[str, str]:
    """Verdict and rule tag for a spectral point."""
    eigen = series in (S5, S6)
    if eigen:
        return POINT, "localized eigenfunctions"
    special = series in (S4, EXCEPTIONAL)
    if space == "p":
        return CONTINUOUS, "no residual spectrum for 1<p<inf"
    if space == "c0":
        return CONTINUOUS, "c0 eigenvalues are only the 5- and 6-series"
    if not boundary:
        return OPEN, "l1/l-inf without boundary: eigenvalues may depend on the word"
    if space == "1":
        if special:
            return RESIDUAL, "l1 residual points are 0 and the 4-series"
        return CONTINUOUS, "l1 with boundary: remaining Julia points"
    if special:
        return POINT, "bounded 4-series and constant eigenfunctions"
    return OPEN, "l-inf with boundary: only the point spectrum is determined"


@dataclass(frozen=True)
class SpectralClassification:
    lam: object
    space: str
    boundary: bool
    verdict: str
    series: str
    certificate: str

    def row(self) -> list[str]:
        return [
            format_scalar(self.lam),
            self.space,
            "true" if self.boundary else "false",
            self.verdict,
            self.series,
            self.certificate,
        ]


def classify(lam, space="2", boundary: bool = True, depth: int = 12) -> SpectralClassification:
    lam = as_scalar(lam)
    sp = parse_space(space)
    label = str(space).strip() if sp == "p" else sp
    mem = membership(lam, depth)
    if mem.status == INDETERMINATE:
        raise IndeterminateMembershipError(lam, mem.certificate)
    if mem.status == OUT:
        return SpectralClassification(lam, label, boundary, RESOLVENT, NONE, mem.certificate)
    verdict, tag = _rule(sp, boundary, mem.series)
    return SpectralClassification(lam, label, boundary, verdict, mem.series, f"{tag}; {mem.certificate}")


CSV_HEADER = ("lambda", "space", "boundary", "verdict", "series", "certificate")


def classification_table(
    lams: Iterable, spaces: Sequence = ("1", "2", "inf", "c0"), boundaries=(True, False), depth: int = 12
) -> list[SpectralClassification]:
    rows = []
    for lam in lams:
        for sp in spaces:
            for b in boundaries:
                rows.append(classify(lam, sp, b, depth))
    return rows


def table_to_csv(rows: Iterable[SpectralClassification]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.row())
    return buf.getvalue()


def table_from_csv(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))


# -- P_m products ----------------------------------------------------------


def _factor(x):
    return (6 - x) / ((2 - x) * (5 - x))


@dataclass
class ProductTrace:
    lam: object
    m: int
    P_m: object
    telescoped: object
    orbit: list
    a_m: object = None
    b_m: object = None

    def relative_gap(self) -> float:
        p, t = abs(complex(self.P_m)), abs(complex(self.telescoped))
        return abs(p - t) / max(p, t, 1e-300)


def _near(x, values, tol) -> bool:
    return any(abs(complex(x) - v) <= tol for v in values)


def pm_product(lam, m: int, orbit: Optional[Sequence] = None) -> ProductTrace:
    """``P_m(lam)`` directly and in telescoped form.

    ``orbit`` may supply ``R^l(lam)`` for ``l = 0..m`` (e.g. a backward
    orbit, which is numerically stable); otherwise it is iterated forward.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    lam = as_scalar(lam)
    if orbit is None:
        orbit = [lam]
        for _ in range(m):
            orbit.append(R(orbit[-1]))
    else:
        orbit = [as_scalar(x) for x in orbit[: m + 1]]
        if len(orbit) < m + 1:
            raise ValueError(f"orbit needs {m + 1} points")
        lam = orbit[0]
    for x in orbit[:m]:
        if _near(x, (2, 5), SINGULAR_TOL):
            raise SingularProductError(f"orbit point {x} is within 1e-9 of 2 or 5")
    direct = Fraction(1)
    for x in orbit[:m]:
        direct = direct * _factor(x)
    if m == 0:
        tele = Fraction(1)
    else:
        rm, rm1 = orbit[m], orbit[m - 1]
        if is_zero(rm, SINGULAR_TOL):
            raise SingularProductError("R^m(lambda) vanishes")
        tele = lam * (6 - lam) / (rm * (2 - rm1))
        for x in orbit[: m - 1]:
            tele = tele * (3 - x)
    rm = orbit[m]
    a_m = b_m = None
    if not _near(rm, (4,), SINGULAR_TOL):
        a_m = 2 / (4 - rm) - 2 + rm / 2
        b_m = 2 / (4 - rm) + 1
    return ProductTrace(lam, m, direct, tele, list(orbit), a_m, b_m)


# -- orbit witnesses --------------------------------------------------------


@dataclass
class Witness:
    m_k: list
    n_k: list
    diagnostic: str = ""


def subsequence_witness(word: CodingWord | str, horizon: int) -> Witness:
    """Positions where the shifted word starts with ``+-`` or ``-+`` (orbit
    bounded away from 0 and 4) and where it starts with ``-``."""
    if isinstance(word, str):
        word = CodingWord(word)
    if not word.periodic and len(word) < horizon:
        raise ValueError(f"word has {len(word)} symbols, horizon is {horizon}")
    if word.eventually_constant():
        tail = word.symbol(0) if (word.periodic or len(word)) else ""
        return Witness([], [], f"eventually constant word (tail '{tail}'): orbit tends to a fixed point")
    n_sym = word.available(horizon + 1)
    m_k = [k for k in range(horizon) if k + 1 < n_sym and word.symbol(k) != word.symbol(k + 1)]
    n_k = [k for k in range(horizon) if word.symbol(k) == "-"]
    return Witness(m_k, n_k)


@lru_cache(maxsize=None)
def cloud_gap_from_three(depth: int = 12) -> float:
    """``min |x - 3|`` over the depth-refined Julia cloud."""
    return float(np.min(np.abs(julia_cloud(depth).values - 3.0)))


@dataclass
class Checkpoint:
    m: int
    count_a: int
    lower_bound: float
    three_product: float
    abs_P: float


@dataclass
class DivergenceReport:
    m_reached: Optional[int]
    abs_P: float
    checkpoints: list = field(default_factory=list)
    constant: float = 0.0

    @property
    def bound_monotone(self) -> bool:
        b = [c.lower_bound for c in self.checkpoints]
        return all(x <= y for x, y in zip(b, b[1:]))

    @property
    def bound_holds(self) -> bool:
        return all(c.lower_bound <= c.three_product * (1 + 1e-12) for c in self.checkpoints)


def divergence_check(
    word: CodingWord | str, depth: int = 64, threshold=1e3, seed=4.0, gap_depth: int = 12
) -> DivergenceReport:
    """Follow ``|P_m|`` along the subsequence of positions where the coding
    word switches symbol.

    The orbit of ``pi(word)`` is taken from backward iteration of ``seed``
    along the first ``depth`` symbols.  At each checkpoint the count of orbit
    points in the left region (symbol ``-``), the bound
    ``c * 1.5**count`` and ``prod_{l<=m} |3 - R^l|`` are recorded.
    """
    if isinstance(word, str):
        word = CodingWord(word)
    depth = word.available(depth)
    orbit = orbit_along(word, depth, seed)
    c = cloud_gap_from_three(gap_depth)
    wit = subsequence_witness(word, depth)
    marks = set(wit.m_k)
    report = DivergenceReport(None, 0.0, [], c)
    log_p = 0.0
    log3 = 0.0
    count_a = 0
    for m in range(0, depth):
        x = orbit[m]
        if word.symbol(m) == "-":
            count_a += 1
        log3 += math.log(abs(3.0 - x))
        if m in marks:
            abs_p = math.exp(log_p)
            report.checkpoints.append(
                Checkpoint(m, count_a, c * 1.5**count_a, math.exp(log3), abs_p)
            )
            report.abs_P = abs_p
            if report.m_reached is None and abs_p > threshold:
                report.m_reached = m
        if _near(x, (2, 5), SINGULAR_TOL):
            break
        # log|P_{m+1}| for the next checkpoint
        log_p += math.log(abs(_factor(x)))
    return report


# -- boundary recursions ---------------------------------------------------


@dataclass
class RecursionReport:
    residuals: dict  # identity -> list of (scale j, residual)
    skipped: list = field(default_factory=list)

    def max_residual(self) -> float:
        vals = [abs(complex(r)) for rs in self.residuals.values() for _, r in rs]
        return max(vals, default=0.0)

    def ok(self, tol: float = 1e-9) -> bool:
        return all(is_zero(r, tol) for rs in self.residuals.values() for _, r in rs)


def recursion_check(f: VertexFunction, lam, m: int, word: Optional[WordSpec] = None) -> RecursionReport:
    """Residuals of the scale-to-scale identities near the boundary vertex
    for a ``lam``-eigenfunction ``f`` on a truncation of the lattice with a
    constant-0 word (boundary vertex ``q0``).

    ``q_i^(j)`` denotes ``F_0^{-j} q_i``; the identities checked are

    * ``cell_extension``: corner values of ``F_0^{-j}V_0`` from those of
      ``F_0^{-j-1}V_0`` by the midpoint extension rule at ``R^j(lam)``,
    * ``cell_decomposition``: the same vector split into the symmetric,
      antisymmetric and boundary-defect parts,
    * ``boundary_relation``: ``f(q_1^(j)) + f(q_2^(j)) = (2 - R^j(lam)/2) f(q_0)``,
    * ``antisymmetric_transport``: ``f(q_i)`` through ``f(q_1^(j)) - f(q_2^(j))``,
    * ``corner_transport`` and ``corner_sum``: the values next to
      ``q_1^(j)`` in terms of ``f(q_0)``, ``f(q_1^(j))``, ``f(q_2^(j))``
      and ``P_j``.
    """
    g = f.graph
    word = word or g.word
    if word is None or word.eventual_digit() != 0 or word.prefix:
        raise ValueError("recursion identities are stated for the constant-0 word")
    lam = as_scalar(lam)
    if m + 1 > g.level:
        raise ValueError(f"scale {m} needs a truncation of level >= {m + 1}")

    def val(v):
        if v not in g:
            raise KeyError(f"addressed vertex {v} is outside the truncation")
        return f[v]

    def q(j, i):
        return val(address(word, j, i))

    res: dict = {k: [] for k in (
        "cell_extension", "cell_decomposition", "boundary_relation",
        "antisymmetric_transport", "corner_transport", "corner_sum",
    )}
    skipped = []
    f0 = q(0, 0)
    lj = lam
    for j in range(m + 1):
        res["boundary_relation"].append((j, q(j, 1) + q(j, 2) - (2 - lj / 2) * f0))
        if is_zero(lj, SINGULAR_TOL):
            skipped.append((j, "R^j(lambda)=0"))
        else:
            anti = lam * (q(j, 1) - q(j, 2)) / (2 * lj)
            res["antisymmetric_transport"].append(
                (j, max((abs(x) for x in (q(0, 1) - (1 - lam / 4) * f0 - anti,
                                          q(0, 2) - (1 - lam / 4) * f0 + anti)), key=lambda z: abs(complex(z)))))
            try:
                pj = pm_product(lam, j).P_m
            except SingularProductError:
                pj = None
            if pj is None:
                skipped.append((j, "P_j singular"))
            else:
                inner0 = val(address(word, j, 0, (1,) * j))
                inner2 = val(address(word, j, 2, (1,) * j))
                f1, f2 = q(j, 1), q(j, 2)
                anti1 = lam * (f0 - f2) / (2 * lj)
                defect = ((f0 + f2) / 2 - (1 - lj / 4) * f1) * pj
                e0 = inner0 - ((1 - lam / 4) * f1 + anti1 + defect)
                e2 = inner2 - ((1 - lam / 4) * f1 - anti1 + defect)
                res["corner_transport"].append((j, max((e0, e2), key=lambda z: abs(complex(z)))))
                if _near(lj, (4,), SINGULAR_TOL):
                    skipped.append((j, "R^j(lambda)=4"))
                else:
                    a = 2 / (4 - lj) - 2 + lj / 2
                    b = 2 / (4 - lj) + 1
                    res["corner_sum"].append((j, inner0 + inner2 - (2 - lam / 2) * f1 - pj * (a * f1 + b * f2)))
        if j < m:
            if _near(lj, (2, 5), SINGULAR_TOL):
                skipped.append((j, "extension singular"))
            else:
                den = (2 - lj) * (5 - lj)
                near, far = (4 - lj) / den, 2 / den
                g0, g1, g2 = q(j + 1, 0), q(j + 1, 1), q(j + 1, 2)
                e1 = q(j, 1) - (near * (g0 + g1) + far * g2)
                e2 = q(j, 2) - (near * (g0 + g2) + far * g1)
                res["cell_extension"].append((j, max((e1, e2), key=lambda z: abs(complex(z)))))
                lnext = R(lj)
                if is_zero(lnext, SINGULAR_TOL):
                    skipped.append((j, "R^{j+1}(lambda)=0"))
                else:
                    sym = (g1 + g2) / 2 - (1 - lnext / 4) * g0
                    anti = lj * (g1 - g2) / (2 * lnext)
                    w = (6 - lj) / den
                    d1 = q(j, 1) - ((1 - lj / 4) * g0 + anti + sym * w)
                    d2 = q(j, 2) - ((1 - lj / 4) * g0 - anti + sym * w)
                    res["cell_decomposition"].append((j, max((d1, d2), key=lambda z: abs(complex(z)))))
        lj = R(lj)
    return RecursionReport({k: v for k, v in res.items()}, skipped)
