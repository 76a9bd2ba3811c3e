"""The Julia set of ``R(x) = x(5 - x)``: membership, inverse-iteration clouds,
the A/B/C regions, the backward-orbit families and a Bowen-function
dimension estimate."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np
from scipy.optimize import bisect
from scipy.special import logsumexp

from .decimation import R, phi, preimages
from .exact import as_scalar, in_set, is_exact

ESCAPE_RADIUS = 8
IN, OUT, INDETERMINATE = "in", "out", "indeterminate"
JULIA_FIXED = (Fraction(0), Fraction(4))


@dataclass(frozen=True)
class CodingWord:
    """A word over ``{-, +}``; ``periodic`` repeats ``symbols`` forever."""

    symbols: str
    periodic: bool = False

    def __post_init__(self):
        s = self.symbols.replace("−", "-")
        if any(c not in "-+" for c in s):
            raise ValueError("coding words use the symbols '-' and '+'")
        if self.periodic and not s:
            raise ValueError("periodic word must be nonempty")
        object.__setattr__(self, "symbols", s)

    def __len__(self):
        if self.periodic:
            raise TypeError("periodic word is infinite")
        return len(self.symbols)

    def __str__(self):
        return f"({self.symbols})^inf" if self.periodic else self.symbols

    def symbol(self, i: int) -> str:
        """0-based symbol."""
        if self.periodic:
            return self.symbols[i % len(self.symbols)]
        return self.symbols[i]

    def prefix(self, n: int) -> str:
        if not self.periodic and n > len(self.symbols):
            raise ValueError(f"word has only {len(self.symbols)} symbols")
        return "".join(self.symbol(i) for i in range(n))

    def available(self, n: int) -> int:
        return n if self.periodic else min(n, len(self.symbols))

    def shift(self, k: int = 1) -> "CodingWord":
        if self.periodic:
            k %= len(self.symbols)
            return CodingWord(self.symbols[k:] + self.symbols[:k], True)
        return CodingWord(self.symbols[k:])

    def eventually_constant(self) -> bool:
        if self.periodic:
            return len(set(self.symbols)) == 1
        # a finite word says nothing about its tail; only a constant word counts
        return len(set(self.symbols)) <= 1


@dataclass(frozen=True)
class JuliaVerdict:
    status: str
    iterations: int
    note: str = ""


def is_in_julia(lam, max_iter: int = 64, escape_radius=ESCAPE_RADIUS) -> JuliaVerdict:
    """Decide ``lam`` in the Julia set where that can be certified.

    ``out`` means some iterate left the disc of radius ``escape_radius``
    (beyond 5 the orbit provably diverges).  ``in`` is only returned for
    exact inputs whose orbit lands on a fixed point or closes a cycle.  A
    float orbit is reported ``indeterminate`` once the propagated rounding
    error exceeds 0.1, since escape after that point proves nothing.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if escape_radius < 8:
        raise ValueError("escape_radius must be >= 8")
    x = as_scalar(lam)
    exact = is_exact(x)
    seen = set()
    # forward float iteration loses about log10|R'| digits per step
    err = 0.0 if exact else 1e-16 * max(1.0, abs(complex(x)))
    for k in range(max_iter + 1):
        if exact or isinstance(x, float):
            if x == 0 or x == 4:
                return JuliaVerdict(IN, k, "orbit reaches a fixed point")
        if exact:
            if x in seen:
                return JuliaVerdict(IN, k, "orbit is periodic")
            seen.add(x)
        if abs(complex(x)) > escape_radius:
            return JuliaVerdict(OUT, k, f"|R^{k}| > {escape_radius}")
        if err > 0.1:
            return JuliaVerdict(INDETERMINATE, k, "float precision exhausted before escape")
        if k < max_iter:
            if not exact:
                err = err * abs(complex(5 - 2 * x)) + 1e-16 * abs(complex(R(x)))
            x = R(x)
    return JuliaVerdict(INDETERMINATE, max_iter, "bounded for max_iter steps")


def certified_member(lam) -> bool:
    return is_in_julia(lam).status == IN


def _phi_arrays(vals: np.ndarray):
    root = np.sqrt(25.0 - 4.0 * vals)
    return (5.0 - root) / 2.0, (5.0 + root) / 2.0


@dataclass
class JuliaCloud:
    """All ``2**depth`` points ``phi_{w1} o ... o phi_{wd}(seed)``.

    Index ``i`` encodes the word in binary, ``w1`` most significant,
    ``1`` meaning ``+``.  ``log_derivative[i]`` is ``log|(R^d)'(point)|``.
    """

    depth: int
    seed: float
    values: np.ndarray
    log_derivative: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.values)

    def word(self, i: int) -> CodingWord:
        bits = format(i, f"0{self.depth}b") if self.depth else ""
        return CodingWord(bits.replace("0", "-").replace("1", "+"))

    def index(self, word: str) -> int:
        return int(word.replace("-", "0").replace("+", "1"), 2) if word else 0

    def __iter__(self) -> Iterator[tuple[float, CodingWord]]:
        for i, v in enumerate(self.values):
            yield float(v), self.word(i)


def julia_cloud(depth: int, seed=0) -> JuliaCloud:
    """Inverse-iteration cloud of the Julia set."""
    if not 0 <= depth <= 30:
        raise ValueError("depth must be in [0, 30]")
    if not certified_member(seed):
        raise ValueError(f"seed {seed} is not certified to lie in the Julia set")
    vals = np.array([float(seed)])
    logd = np.zeros(1)
    for _ in range(depth):
        lo, hi = _phi_arrays(vals)
        new = np.concatenate([lo, hi])
        logd = np.concatenate([logd, logd]) + np.log(np.abs(5.0 - 2.0 * new))
        vals = new
    return JuliaCloud(depth, float(seed), vals, logd)


def pi_approx(word: CodingWord | str, depth: int, seed=0.0) -> float:
    """Approximation of the coding map at ``word`` using its first ``depth``
    symbols, evaluated in floating point."""
    if isinstance(word, str):
        word = CodingWord(word)
    x = float(seed)
    for s in reversed(word.prefix(depth)):
        x = phi(s, x)
    return float(x)


def orbit_along(word: CodingWord | str, depth: int, seed=0.0) -> list[float]:
    """``[R^l(x) for l in 0..depth]`` for ``x = pi_approx(word, depth)``,
    computed by backward iteration so no expansion error accumulates."""
    if isinstance(word, str):
        word = CodingWord(word)
    pref = word.prefix(depth)
    x = float(seed)
    out = [x]
    for s in reversed(pref):
        x = float(phi(s, x))
        out.append(x)
    return out[::-1]


def region_of(lam, depth: int = 12, tol: float = 1e-7) -> str:
    """``A``, ``B`` or ``C`` for points of the depth-refined cover of the
    Julia set; ``indeterminate`` if the orbit leaves ``[0, 5]``."""
    x = as_scalar(lam)
    if isinstance(x, complex):
        if abs(x.imag) > tol:
            return INDETERMINATE
        x = x.real
    exact = is_exact(x)
    lo, hi = (0, 5) if exact else (-tol, 5 + tol)
    y = x
    for _ in range(depth + 1):
        if not (lo <= y <= hi):
            return INDETERMINATE
        y = R(y)
    if x <= Fraction(5, 2):
        return "A"
    if x <= 4:
        return "B"
    return "C"


_SERIES_SEEDS = {4: Fraction(4), 5: Fraction(5), 6: Fraction(6)}


def _series_key(series) -> int:
    s = str(series).replace("Σ", "").replace("S", "").replace("Sigma", "").strip()
    key = int(s)
    if key not in _SERIES_SEEDS:
        raise ValueError(f"unknown series {series!r}")
    return key


@dataclass
class SigmaFamily:
    """Finite truncation of a backward-orbit family.

    ``points`` holds ``(value, branch word)``; applying ``R`` once per
    symbol maps a value back to the family seed (6 for the word of 3 is
    ``"+"``).
    """

    series: int
    depth: int
    points: list

    @property
    def values(self) -> list:
        return [p[0] for p in self.points]

    def array(self) -> np.ndarray:
        return np.sort(np.array([complex(v).real for v in self.values]))

    def __len__(self):
        return len(self.points)

    def contains(self, lam, tol: float = 1e-10) -> bool:
        return in_set(lam, self.values, tol)


def _key(v):
    return v if is_exact(v) else round(complex(v).real, 11)


def sigma_family(series, depth: int) -> SigmaFamily:
    """Backward orbits of 4, of 5, or ``{6}`` plus the tree above 3.

    For the 6-series the preimage 2 of 6 is pruned; every other preimage
    is kept.  Values stay exact as long as the radicand is rational.
    """
    key = _series_key(series)
    if not 0 <= depth <= 20:
        raise ValueError("depth must be in [0, 20]")
    if key == 6:
        points = [(Fraction(6), "")]
        frontier = [(Fraction(3), "+")]
    else:
        points = []
        frontier = [(_SERIES_SEEDS[key], "")]
    seen = {_key(v) for v, _ in points + frontier}
    points += frontier
    for _ in range(depth):
        nxt = []
        if all(not is_exact(v) for v, _ in frontier):
            vals = np.array([complex(v).real for v, _ in frontier])
            lo, hi = _phi_arrays(vals)
            cand = [(float(a), "-" + w) for a, (_, w) in zip(lo, frontier)]
            cand += [(float(b), "+" + w) for b, (_, w) in zip(hi, frontier)]
        else:
            cand = []
            for v, w in frontier:
                m, p = preimages(v)
                cand += [(m, "-" + w), (p, "+" + w)]
        for v, w in cand:
            k = _key(v)
            if k not in seen:
                seen.add(k)
                nxt.append((v, w))
        points += nxt
        frontier = nxt
    return SigmaFamily(key, depth, points)


class CriticalOrbitError(ArithmeticError):
    pass


@dataclass
class BowenResult:
    dimension: float
    bracket: tuple[float, float]
    k: int
    seed: float
    retries: int = 0


def _cloud_for_bowen(k: int, seed):
    x = float(seed)
    for retries in range(4):
        cloud = julia_cloud(k, x) if certified_member(x) else None
        if cloud is None:
            # perturbed seed: a point of the backward tree, not exactly known
            vals = np.array([x])
            logd = np.zeros(1)
            for _ in range(k):
                lo, hi = _phi_arrays(vals)
                vals = np.concatenate([lo, hi])
                logd = np.concatenate([logd, logd]) + np.log(np.abs(5.0 - 2.0 * vals))
            cloud = JuliaCloud(k, x, vals, logd)
        if np.all(np.isfinite(cloud.log_derivative)):
            return cloud, retries
        x = float(phi("+", x))
    raise CriticalOrbitError("derivative vanished along a branch after 3 retries")


def bowen_function(t: float, k: int, seed=0) -> float:
    """``B_k(t) = (1/k) log sum_w |(R^k)'(w)|^{-t}`` over ``w`` in
    ``R^{-k}(seed)``."""
    if not 1 <= k <= 18:
        raise ValueError("k must be in [1, 18]")
    cloud, _ = _cloud_for_bowen(k, seed)
    return float(logsumexp(-t * cloud.log_derivative) / k)


def bowen_dimension(k: int, seed=0, tol: float = 1e-10) -> BowenResult:
    """Root of ``B_k`` on ``[0, 1]`` by bisection."""
    if not 1 <= k <= 18:
        raise ValueError("k must be in [1, 18]")
    cloud, retries = _cloud_for_bowen(k, seed)
    logd = cloud.log_derivative

    def b(t):
        return float(logsumexp(-t * logd) / k)

    lo, hi = 0.0, 1.0
    if not (b(lo) > 0 > b(hi)):
        raise ArithmeticError("B_k does not change sign on [0, 1]")
    root = bisect(b, lo, hi, xtol=tol)
    return BowenResult(float(root), (lo, hi), k, cloud.seed, retries)
