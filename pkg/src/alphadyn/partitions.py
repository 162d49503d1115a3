"""Countable interval partitions with analytic atom and tail laws.

A partition alpha of (0, 1] is a sequence of half-open intervals
A_n = (t_{n+1}, t_n], ordered right to left and accumulating only at the
origin.  Here a_n = lambda(A_n) is the n-th atom measure and
t_n = sum_{k >= n} a_k the n-th tail, so t_1 = 1 and a_n = t_n - t_{n+1}.

Every family below is described analytically: classification (finite or
infinite type, expansive exponent, expansion ratio) is declared metadata,
never inferred from finitely many terms.  Families whose atoms are rational
support an exact Fraction backend; the rest use binary floats with
compensated summation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np
from scipy.special import zeta as _zeta

from ._util import INF, SymbolicInfinity

Real = Union[Fraction, float]

# digits above this are not representable in the int64 arrays downstream;
# scalar locate raises, vector locate clamps (mass beyond is ~ tail(2^62))
DIGIT_CAP = 1 << 62


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class RangeError(ArithmeticError):
    """A closed form under- or overflowed; positive values never become 0."""


class SpecParseError(ValueError):
    """Malformed partition description (file or inline JSON)."""


# ---------------------------------------------------------------------------
# Classification metadata
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Classification:
    """Declared tail behaviour of a partition.

    type_class: "finite" when sum t_n converges, else "infinite".
    tail_kind:  "expansive" (t_n = psi(n) n^-theta, psi slowly varying,
                so t_n/t_{n+1} -> 1) or "expanding" (t_n/t_{n+1} -> rho > 1).
    rho:        the limit t_n/t_{n+1} (1 for expansive families).
    """

    type_class: str
    tail_kind: str
    rho: float
    eventually_decreasing: bool
    theta: Optional[float] = None
    psi: Optional[str] = None

    def __post_init__(self):
        if self.type_class not in ("finite", "infinite"):
            raise ValueError(f"bad type_class {self.type_class!r}")
        if self.tail_kind == "expanding":
            # expanding tails force a finite invariant measure
            if self.type_class != "finite":
                raise ValueError("expanding partitions are of finite type")
            if not self.rho > 1.0:
                raise ValueError("expanding requires rho > 1")
        elif self.tail_kind == "expansive":
            if self.rho != 1.0:
                raise ValueError("expansive requires rho = 1")
            if self.theta is None or self.theta < 0.0:
                raise ValueError("expansive requires an exponent theta >= 0")
        elif self.tail_kind != "other":
            raise ValueError(f"bad tail_kind {self.tail_kind!r}")

    @property
    def finite_type(self) -> bool:
        return self.type_class == "finite"


# ---------------------------------------------------------------------------
# Base class
# ---------------------------------------------------------------------------

class PartitionSpec:
    """Common interface of all partition families.

    Instances are immutable after construction and safe to share across
    threads.  Scalar accessors honour the numeric backend ("exact" returns
    Fractions, "float" returns binary floats); the vector accessors used by
    series code always work in float64.
    """

    family: str = "?"
    exact_capable: bool = False

    def __init__(self, backend: Optional[str] = None):
        if backend is None:
            backend = "exact" if self.exact_capable else "float"
        if backend == "exact" and not self.exact_capable:
            raise SpecParseError(
                f"family {self.family!r} has no exact rational backend")
        if backend not in ("exact", "float"):
            raise SpecParseError(f"unknown backend {backend!r}")
        self.backend = backend
        self.normalization: Real = 1

    # -- scalar accessors ---------------------------------------------------

    def atom(self, n: int):
        """Measure a_n of the n-th atom."""
        if n < 1:
            raise DomainError(f"atom index must be >= 1, got {n}")
        if self.backend == "exact":
            return self._atom_exact(n)
        return self.atom_float(n)

    def tail(self, n: int):
        """Tail t_n = sum_{k >= n} a_k."""
        if n < 1:
            raise DomainError(f"tail index must be >= 1, got {n}")
        if self.backend == "exact":
            return self._tail_exact(n)
        return self.tail_float(n)

    def atom_float(self, n: int) -> float:
        if n < 1:
            raise DomainError(f"atom index must be >= 1, got {n}")
        a = self._atom_float(n)
        if a <= 0.0 or not math.isfinite(a):
            raise RangeError(f"atom({n}) left the float range for {self}")
        return a

    def tail_float(self, n: int) -> float:
        if n < 1:
            raise DomainError(f"tail index must be >= 1, got {n}")
        t = self._tail_float(n)
        if t <= 0.0 or not math.isfinite(t):
            raise RangeError(f"tail({n}) left the float range for {self}")
        return t

    # -- vector accessors (always float64) ----------------------------------

    def atoms(self, n_max: int) -> np.ndarray:
        """a_1..a_{n_max} as float64.

        Unlike atom(), entries past the float underflow point are clamped to
        0.0: series consumers drop mass below 1e-300 knowingly, while the
        scalar accessor refuses to return a silent zero.
        """
        return self._atoms_array(n_max)

    def tails(self, n_max: int) -> np.ndarray:
        """t_1..t_{n_max} as float64 (same underflow convention as atoms)."""
        return self._tails_array(n_max)

    def log_atoms(self, ns: np.ndarray) -> np.ndarray:
        """log a_n evaluated stably (no underflow) for an integer array."""
        return self._log_atoms(np.asarray(ns, dtype=np.float64))

    def log_atom(self, n: int) -> float:
        return float(self._log_atoms(np.asarray([n], dtype=np.float64))[0])

    def smooth_log_atom(self, x):
        """log a(x) along the family's smooth interpolation of n -> a_n.

        Used by tail integrals; valid for real x >= 1 (Explicit: beyond the
        prefix).
        """
        return self._log_atoms(x)

    # -- membership ---------------------------------------------------------

    def locate(self, x):
        """Index n of the atom A_n = (t_{n+1}, t_n] containing x.

        Exact when x is a Fraction (or int) and the backend is exact.
        """
        if isinstance(x, (Fraction, int)) and self.backend == "exact":
            x = Fraction(x)
            if x <= 0 or x > 1:
                raise DomainError(f"locate needs 0 < x <= 1, got {x}")
            return self._locate_exact(x)
        x = float(x)
        if not 0.0 < x <= 1.0:
            raise DomainError(f"locate needs 0 < x <= 1, got {x}")
        return self._locate_float(x)

    def locate_array(self, xs: np.ndarray) -> np.ndarray:
        """Vectorised locate for float64 samples in (0, 1]."""
        xs = np.asarray(xs, dtype=np.float64)
        if xs.size and (xs.min() <= 0.0 or xs.max() > 1.0):
            raise DomainError("locate needs samples in (0, 1]")
        return self._locate_array(xs)

    # -- tail sums ----------------------------------------------------------

    def partial_tail_sum(self, n: int):
        """(sum_{k=1}^{n} t_k, bound on sum_{k>n} t_k or None).

        The remainder bound exists for finite-type families only.  Exact
        backend sums exactly up to n = 1000, then falls back to compensated
        floats (harmonic-style denominators grow like e^n).
        """
        if n < 1:
            raise DomainError(f"partial_tail_sum needs n >= 1, got {n}")
        if self.backend == "exact" and n <= 1000:
            s = sum(self._tail_exact(k) for k in range(1, n + 1))
        else:
            s = math.fsum(self.tails(n))
        return s, self._tail_sum_remainder(n)

    def tail_sum_total(self):
        """sum_{k>=1} t_k, or symbolic infinity for infinite type."""
        raise NotImplementedError

    # -- analytic thermo metadata -------------------------------------------

    def classify(self) -> Classification:
        raise NotImplementedError

    def t_infinity(self) -> float:
        """inf{r > 0 : sum a_n^r < infinity}."""
        raise NotImplementedError

    def pressure_finite_at_boundary(self) -> bool:
        """Whether sum a_n^{t_infinity} converges."""
        raise NotImplementedError

    def luroth_no_transition(self):
        """(verdict, criterion) for smoothness of the induced-map pressure.

        verdict True means no phase transition for the digit map; None means
        the family carries no analytic criterion and callers must report
        "undetermined".
        """
        cls = self.classify()
        if cls.tail_kind == "expanding":
            return True, "expanding tails: no transition, boundary exponent 0"
        return None, "no analytic criterion declared for this family"

    def poly_decay_order(self) -> Optional[float]:
        """b with a_n comparable to n^-b up to slowly varying factors.

        None for geometrically decaying families (their series tails close
        in exact form instead).
        """
        return None

    @property
    def geometric_like(self) -> bool:
        """True when a_n = c r^n exactly (Dyadic, Geometric)."""
        return False

    def geo_log_params(self):
        """(log c, log r) for geometric_like families."""
        raise NotImplementedError(f"{self.family} is not geometric")

    # -- plumbing -----------------------------------------------------------

    def with_backend(self, backend: str) -> "PartitionSpec":
        """Copy of this spec under another numeric backend."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def __repr__(self) -> str:
        payload = {k: v for k, v in self.to_dict().items() if k != "family"}
        inner = ", ".join(f"{k}={v}" for k, v in payload.items())
        return f"{type(self).__name__}({inner})"

    # -- helpers shared by subclasses ---------------------------------------

    def _atoms_array(self, n_max: int) -> np.ndarray:
        n = np.arange(1, n_max + 1, dtype=np.float64)
        with np.errstate(under="ignore"):
            return np.exp(self._log_atoms(n))

    def _tails_array(self, n_max: int) -> np.ndarray:
        raise NotImplementedError

    def _log_atoms(self, x):
        raise NotImplementedError

    def _tail_sum_remainder(self, n: int):
        return None

    def _locate_adjust_float(self, x: float, n: int) -> int:
        """Fix an approximate inverse so that t_{n+1} < x <= t_n.

        Far out, consecutive tails can round to the same float ("plateau");
        a strict bracket then does not exist and any plateau index is
        accepted, since the digit is not float-determined there anyway.
        """
        n = max(1, n)
        for _ in range(128):
            t_n = self._tail_float(n)
            if n > 1 and x > t_n:
                n -= 1
                continue
            t_next = self._tail_float(n + 1)
            if x <= t_next and t_next < t_n:
                n += 1
                continue
            return n
        raise RangeError(f"locate failed to bracket x={x} (stuck at n={n})")

    def _locate_adjust_exact(self, x: Fraction, n: int) -> int:
        n = max(1, n)
        for _ in range(64):
            if n > 1 and x > self._tail_exact(n):
                n -= 1
            elif x <= self._tail_exact(n + 1):
                n += 1
            else:
                return n
        raise RangeError(f"locate failed to bracket x={x} (stuck at n={n})")

    def _locate_array_bisect(self, xs: np.ndarray, n0: np.ndarray,
                             tail_vec) -> np.ndarray:
        """Vectorised +-k fix-up of an approximate inverse n0."""
        n = np.maximum(n0.astype(np.int64), 1)
        for _ in range(128):
            t_n = tail_vec(n)
            too_high = (n > 1) & (xs > t_n)
            if too_high.any():
                n[too_high] -= 1
                continue
            t_next = tail_vec(n + 1)
            too_low = (xs <= t_next) & (t_next < t_n) & (n < DIGIT_CAP)
            if not too_low.any():
                return n
            n[too_low] += 1
        raise RangeError("vectorised locate failed to converge")


# ---------------------------------------------------------------------------
# Concrete families
# ---------------------------------------------------------------------------

class Harmonic(PartitionSpec):
    """a_n = 1/(n(n+1)), t_n = 1/n; expansive of exponent 1, infinite type."""

    family = "harmonic"
    exact_capable = True

    def _atom_exact(self, n: int) -> Fraction:
        return Fraction(1, n * (n + 1))

    def _tail_exact(self, n: int) -> Fraction:
        return Fraction(1, n)

    def _atom_float(self, n: int) -> float:
        return 1.0 / n / (n + 1.0)

    def _tail_float(self, n: int) -> float:
        return 1.0 / n

    def _tails_array(self, n_max: int) -> np.ndarray:
        return 1.0 / np.arange(1, n_max + 1, dtype=np.float64)

    def _log_atoms(self, x):
        return -(np.log(x) + np.log(x + 1.0))

    def _locate_exact(self, x: Fraction) -> int:
        return self._locate_adjust_exact(x, math.floor(1 / x))

    def _locate_float(self, x: float) -> int:
        if x < 2.0 ** -62:
            raise RangeError(f"digit at x={x} exceeds the int64-safe range")
        return self._locate_adjust_float(x, int(1.0 / x))

    def _locate_array(self, xs: np.ndarray) -> np.ndarray:
        n0 = np.minimum(np.floor(1.0 / xs), float(DIGIT_CAP))
        return self._locate_array_bisect(xs, n0, lambda n: 1.0 / n)

    def classify(self) -> Classification:
        return Classification("infinite", "expansive", 1.0, True,
                              theta=1.0, psi="1")

    def t_infinity(self) -> float:
        return 0.5

    def pressure_finite_at_boundary(self) -> bool:
        return False          # sum (n(n+1))^{-1/2} diverges like sum 1/n

    def luroth_no_transition(self):
        return True, "constant psi: sum (log n)/n diverges"

    def poly_decay_order(self) -> float:
        return 2.0

    def tail_sum_total(self):
        return INF

    def with_backend(self, backend):
        return Harmonic(backend=backend)

    def to_dict(self):
        return {"family": "harmonic"}


class _GeometricBase(PartitionSpec):
    """Shared machinery for a_n = c r^n families."""

    exact_capable = True

    def __init__(self, c: Real, r: Real, backend: Optional[str] = None):
        self._c = c
        self._r = r
        if isinstance(c, Fraction) and isinstance(r, Fraction):
            if c * r != (1 - r):
                raise SpecParseError(
                    f"geometric atoms must sum to 1: c r/(1-r) = {c * r / (1 - r)}")
        else:
            self.exact_capable = False
            if abs(float(c) * float(r) / (1.0 - float(r)) - 1.0) > 1e-12:
                raise SpecParseError("geometric atoms must sum to 1")
        if not 0 < float(r) < 1:
            raise SpecParseError(f"geometric ratio must lie in (0,1), got {r}")
        super().__init__(backend)
        self._log_c = math.log(float(c))
        self._log_r = math.log(float(r))

    def _atom_exact(self, n: int) -> Fraction:
        return Fraction(self._c) * Fraction(self._r) ** n

    def _tail_exact(self, n: int) -> Fraction:
        # t_n = c r^n / (1-r) = r^{n-1} under the normalization constraint
        return Fraction(self._r) ** (n - 1)

    # direct powers: exp(log) costs |n log r| * eps relative and would break
    # the atom/tail difference identity far out

    def _atom_float(self, n: int) -> float:
        return float(self._c) * float(self._r) ** n

    def _tail_float(self, n: int) -> float:
        return float(self._r) ** (n - 1)

    def _tails_array(self, n_max: int) -> np.ndarray:
        n = np.arange(1, n_max + 1, dtype=np.float64)
        with np.errstate(under="ignore"):
            return float(self._r) ** (n - 1.0)

    def _log_atoms(self, x):
        return self._log_c + x * self._log_r

    def _locate_exact(self, x: Fraction) -> int:
        n0 = int(1.0 + math.log(float(x)) / self._log_r) if x < 1 else 1
        return self._locate_adjust_exact(x, n0)

    def _locate_float(self, x: float) -> int:
        n0 = int(1.0 + math.log(x) / self._log_r) if x < 1.0 else 1
        return self._locate_adjust_float(x, n0)

    def _locate_array(self, xs: np.ndarray) -> np.ndarray:
        n0 = np.floor(1.0 + np.log(xs) / self._log_r)
        with np.errstate(under="ignore"):
            return self._locate_array_bisect(
                xs, n0, lambda n: float(self._r) ** (n - 1.0))

    def classify(self) -> Classification:
        return Classification("finite", "expanding", 1.0 / float(self._r), True)

    def t_infinity(self) -> float:
        return 0.0

    def pressure_finite_at_boundary(self) -> bool:
        return False          # sum a_n^0 counts the atoms

    def luroth_no_transition(self):
        return True, "expanding tails: no transition, boundary exponent 0"

    @property
    def geometric_like(self) -> bool:
        return True

    def geo_log_params(self):
        return self._log_c, self._log_r

    def tail_sum_total(self):
        if self.backend == "exact":
            return 1 / (1 - Fraction(self._r))
        return 1.0 / (1.0 - float(self._r))

    def _tail_sum_remainder(self, n: int):
        # sum_{k>n} r^{k-1} = r^n/(1-r), exact
        if self.backend == "exact":
            return Fraction(self._r) ** n / (1 - Fraction(self._r))
        return math.exp(n * self._log_r) / (1.0 - float(self._r))


class Dyadic(_GeometricBase):
    """a_n = 2^-n: the self-conjugate partition whose map is the tent map."""

    family = "dyadic"

    def __init__(self, backend: Optional[str] = None):
        super().__init__(Fraction(1), Fraction(1, 2), backend)

    def with_backend(self, backend):
        return Dyadic(backend=backend)

    def to_dict(self):
        return {"family": "dyadic"}


class Geometric(_GeometricBase):
    """a_n = c r^n with c r/(1-r) = 1; expanding with ratio 1/r."""

    family = "geometric"

    def __init__(self, c: Real, r: Real, backend: Optional[str] = None):
        super().__init__(c, r, backend)

    def with_backend(self, backend):
        return Geometric(self._c, self._r, backend=backend)

    def to_dict(self):
        return {"family": "geometric", "c": _num_out(self._c),
                "r": _num_out(self._r)}


class PowerAtoms(PartitionSpec):
    """a_n = n^-s / zeta(s); tails are Hurwitz zeta values.

    Expansive of exponent s-1; finite type exactly when s > 2.
    """

    family = "power_atoms"

    def __init__(self, s: float, backend: Optional[str] = None):
        s = float(s)
        if not s > 1.0:
            raise SpecParseError(f"power_atoms needs s > 1, got {s}")
        self._s = s
        super().__init__(backend)
        self._table = self._build_tail_table(1 << 17)
        self._zeta_s = float(self._table[0])
        self.normalization = self._zeta_s
        self._table = np.asarray(self._table / self._table[0], dtype=np.float64)

    def _build_tail_table(self, n_max: int) -> np.ndarray:
        """Unnormalised Hurwitz tails sum_{k>=n} k^-s for n <= n_max + 1.

        Extended precision throughout so that rounding to float64 keeps the
        atom/tail difference identity inside a couple of ulp; scipy's Hurwitz
        zeta alone wobbles by 5-6.
        """
        s = np.longdouble(self._s)
        n = np.arange(1, n_max + 1, dtype=np.longdouble)
        atoms = n ** -s
        a = np.longdouble(n_max + 1)
        # Euler-Maclaurin through the a^-s-3 term; the next one is ~(s/a)^5
        seed = (a ** (1 - s) / (s - 1) + a ** -s / 2 + s * a ** (-s - 1) / 12
                - s * (s + 1) * (s + 2) * a ** (-s - 3) / 720)
        table = np.empty(n_max + 1, dtype=np.longdouble)
        table[n_max] = seed
        table[:n_max] = np.cumsum(atoms[::-1])[::-1] + seed
        return table

    def _atom_float(self, n: int) -> float:
        return n ** (-self._s) / self._zeta_s

    def _tail_float(self, n: int) -> float:
        if n <= len(self._table):
            return float(self._table[n - 1])
        return float(_zeta(self._s, n)) / self._zeta_s

    def _tails_array(self, n_max: int) -> np.ndarray:
        m = len(self._table)
        if n_max <= m:
            return self._table[:n_max].copy()
        n = np.arange(m + 1, n_max + 1, dtype=np.float64)
        rest = _zeta(self._s, n) / self._zeta_s
        return np.concatenate([self._table, rest])

    def _log_atoms(self, x):
        return -self._s * np.log(x) - math.log(self._zeta_s)

    def _locate_float(self, x: float) -> int:
        if x >= self._table[-1]:
            # table is decreasing; find first index with t <= x
            n0 = int(np.searchsorted(-self._table, -x, side="left")) + 1
        else:
            # t_n ~ n^{1-s}/((s-1) zeta(s)) far out
            s = self._s
            log_n0 = math.log(x * (s - 1.0) * self._zeta_s) / (1.0 - s)
            if log_n0 > 62.0 * math.log(2.0):
                raise RangeError(f"digit at x={x} exceeds the int64-safe range")
            n0 = int(math.exp(log_n0))
        return self._locate_adjust_float(x, n0)

    def _locate_exact(self, x):
        raise NotImplementedError

    def _locate_array(self, xs: np.ndarray) -> np.ndarray:
        s = self._s
        t = self._table
        small = xs >= t[-1]
        n0 = np.empty(xs.shape, dtype=np.float64)
        n0[small] = np.searchsorted(-t, -xs[small], side="left") + 1
        big = ~small
        log_n0 = np.log(xs[big] * (s - 1.0) * self._zeta_s) / (1.0 - s)
        with np.errstate(over="ignore"):
            n0[big] = np.minimum(np.floor(np.exp(log_n0)), float(DIGIT_CAP))

        def tail_vec(n):
            out = np.empty(n.shape)
            inside = n <= len(t)
            out[inside] = t[n[inside] - 1]
            if (~inside).any():
                out[~inside] = _zeta(s, n[~inside].astype(np.float64)) / self._zeta_s
            return out

        return self._locate_array_bisect(xs, n0, tail_vec)

    def classify(self) -> Classification:
        s = self._s
        return Classification("finite" if s > 2.0 else "infinite",
                              "expansive", 1.0, True, theta=s - 1.0,
                              psi=f"1/((s-1) zeta(s)), s={s:g}")

    def t_infinity(self) -> float:
        return 1.0 / self._s

    def pressure_finite_at_boundary(self) -> bool:
        return False          # sum n^-1 / zeta(s)^{1/s} diverges

    def luroth_no_transition(self):
        return True, "constant psi: sum (log n)/n diverges"

    def poly_decay_order(self) -> float:
        return self._s

    def tail_sum_total(self):
        if self._s > 2.0:
            return float(_zeta(self._s - 1.0)) / self._zeta_s
        return INF

    def _tail_sum_remainder(self, n: int):
        s = self._s
        if s <= 2.0:
            return None
        # t_k <= (k^-s + k^{1-s}/(s-1))/zeta(s), then sum the bound over k > n
        z = self._zeta_s
        first = n ** (1.0 - s) / (s - 1.0) + n ** -s
        second = (n ** (2.0 - s) / (s - 2.0) + n ** (1.0 - s)) / (s - 1.0)
        return (first + second) / z

    def with_backend(self, backend):
        return PowerAtoms(self._s, backend=backend)

    def to_dict(self):
        return {"family": "power_atoms", "s": self._s}


class PowerTail(PartitionSpec):
    """t_n = n^-theta exactly; a_n = n^-theta - (n+1)^-theta.

    Expansive of exponent theta; finite type exactly when theta > 1.
    """

    family = "power_tail"

    def __init__(self, theta: float, backend: Optional[str] = None):
        theta = float(theta)
        if not theta > 0.0:
            raise SpecParseError(f"power_tail needs theta > 0, got {theta}")
        self._theta = theta
        super().__init__(backend)

    def _atom_float(self, n: int) -> float:
        th = self._theta
        return n ** -th * -math.expm1(-th * math.log1p(1.0 / n))

    def _tail_float(self, n: int) -> float:
        return n ** -self._theta

    def _tails_array(self, n_max: int) -> np.ndarray:
        n = np.arange(1, n_max + 1, dtype=np.float64)
        with np.errstate(under="ignore"):
            return n ** -self._theta

    def _log_atoms(self, x):
        th = self._theta
        return -th * np.log(x) + np.log(-np.expm1(-th * np.log1p(1.0 / x)))

    def _locate_float(self, x: float) -> int:
        log_n0 = -math.log(x) / self._theta
        if log_n0 > 62.0 * math.log(2.0):
            raise RangeError(f"digit at x={x} exceeds the int64-safe range")
        n0 = int(x ** (-1.0 / self._theta))
        return self._locate_adjust_float(x, n0)

    def _locate_exact(self, x):
        raise NotImplementedError

    def _locate_array(self, xs: np.ndarray) -> np.ndarray:
        th = self._theta
        with np.errstate(over="ignore"):
            n0f = np.minimum(np.floor(xs ** (-1.0 / th)), float(DIGIT_CAP))
        with np.errstate(under="ignore"):
            return self._locate_array_bisect(xs, n0f, lambda n: n ** -th)

    def classify(self) -> Classification:
        th = self._theta
        return Classification("finite" if th > 1.0 else "infinite",
                              "expansive", 1.0, True, theta=th, psi="1")

    def t_infinity(self) -> float:
        return 1.0 / (1.0 + self._theta)

    def pressure_finite_at_boundary(self) -> bool:
        return False          # a_n^{1/(1+theta)} ~ theta^... n^-1

    def luroth_no_transition(self):
        return True, "constant psi: sum (log n)/n diverges"

    def poly_decay_order(self) -> float:
        return self._theta + 1.0

    def tail_sum_total(self):
        if self._theta > 1.0:
            return float(_zeta(self._theta))
        return INF

    def _tail_sum_remainder(self, n: int):
        th = self._theta
        if th <= 1.0:
            return None
        return n ** (1.0 - th) / (th - 1.0) + n ** -th

    def with_backend(self, backend):
        return PowerTail(self._theta, backend=backend)

    def to_dict(self):
        return {"family": "power_tail", "theta": self._theta}


def _lpa_constants(k: float, shift: int):
    """(normalization C, sum of tails or None) for LogPowerAtoms.

    Partial sum to N plus an Euler-Maclaurin tail in 40-digit arithmetic;
    the two quantities stabilise to far better than 1e-14 relative (checked
    against doubled N in tests).  Cached per (k, shift).
    """
    import mpmath as mp

    key = (float(k), int(shift))
    if key in _LPA_CACHE:
        return _LPA_CACHE[key]
    with mp.workdps(40):
        f = lambda x: x ** -2 * mp.log(x + shift) ** -k
        N = 20_000
        c = mp.fsum(f(mp.mpf(n)) for n in range(1, N + 1))
        a = mp.mpf(N + 1)
        c += (mp.quad(f, [a, mp.inf]) + f(a) / 2 - mp.diff(f, a) / 12
              + mp.diff(f, a, 3) / 720)
        total = None
        if k > 1:
            # sum of tails = sum n a_n = (1/C) sum n^-1 log(n+shift)^-k
            g = lambda x: x ** -1 * mp.log(x + shift) ** -k
            t = mp.fsum(g(mp.mpf(n)) for n in range(1, N + 1))
            t += (mp.quad(g, [a, mp.inf]) + g(a) / 2 - mp.diff(g, a) / 12
                  + mp.diff(g, a, 3) / 720)
            total = float(t / c)
        out = (float(c), total)
    _LPA_CACHE[key] = out
    return out


_LPA_CACHE: dict = {}


class LogPowerAtoms(PartitionSpec):
    """a_n = n^-2 (log(n+shift))^-k / C; expansive of exponent 1.

    The slowly varying tail factor is asymptotically (log n)^-k / C, so the
    family is of finite type exactly when k > 1, and it is the only built-in
    whose digit-map pressure can lose smoothness (k > 4).
    """

    family = "log_power_atoms"

    def __init__(self, k: float, shift: int, backend: Optional[str] = None):
        k = float(k)
        shift = int(shift)
        if shift < 1:
            raise SpecParseError(f"log_power_atoms needs shift >= 1, got {shift}")
        self._k = k
        self._shift = shift
        super().__init__(backend)
        self.normalization, self._tail_total = _lpa_constants(k, shift)
        self._log_C = math.log(self.normalization)
        self._table = self._build_tail_table(1 << 17)

    def _build_tail_table(self, n_max: int) -> np.ndarray:
        # seed t_{N+1} by Euler-Maclaurin, then walk backwards adding atoms
        # so that a_n = t_n - t_{n+1} holds to the last float place
        k, sh, C = self._k, self._shift, self.normalization
        f = lambda x: x ** -2.0 * np.log(x + sh) ** -k / C
        a = float(n_max + 1)
        from scipy.integrate import quad
        integral = quad(lambda y: f(math.exp(y)) * math.exp(y),
                        math.log(a), 710.0, limit=200,
                        epsabs=0.0, epsrel=1e-13)[0]
        d1 = (f(a + 1e-3) - f(a - 1e-3)) / 2e-3
        seed = integral + f(a) / 2.0 - d1 / 12.0
        atoms = self._atoms_array(n_max)
        table = np.empty(n_max + 1)
        table[n_max] = seed
        table[:n_max] = np.cumsum(atoms[::-1])[::-1] + seed
        return table / table[0]     # table[i] = t_{i+1}, pinned to t_1 = 1

    def _atom_float(self, n: int) -> float:
        return math.exp(self._log_atom_scalar(n))

    def _log_atom_scalar(self, n) -> float:
        return (-2.0 * math.log(n) - self._k * math.log(math.log(n + self._shift))
                - self._log_C)

    def _tail_float(self, n: int) -> float:
        if n <= len(self._table):
            return float(self._table[n - 1])
        # beyond the cached range: one-sided Euler-Maclaurin on the spot
        from scipy.integrate import quad
        f = lambda x: math.exp(self._log_atom_scalar(x))
        integral = quad(lambda y: f(math.exp(y)) * math.exp(y),
                        math.log(n), 710.0, limit=200,
                        epsabs=0.0, epsrel=1e-13)[0]
        return integral + f(n) / 2.0

    def _tails_array(self, n_max: int) -> np.ndarray:
        if n_max > len(self._table):
            self._table = self._build_tail_table(2 * n_max)
        return self._table[:n_max].copy()

    def _log_atoms(self, x):
        return (-2.0 * np.log(x)
                - self._k * np.log(np.log(x + float(self._shift)))
                - self._log_C)

    def _locate_float(self, x: float) -> int:
        t = self._table
        if x < t[-1]:
            return self._locate_far(x)
        i = int(np.searchsorted(-t, -x, side="left"))
        return self._locate_adjust_float(x, i + 1)

    def _locate_far(self, x: float) -> int:
        # beyond the cached table each tail costs a quadrature; integer
        # bisection keeps that to ~2 log2(n) evaluations
        lo = len(self._table)              # t(lo) >= x here
        hi = 2 * lo
        while self._tail_float(hi) >= x:
            lo, hi = hi, 4 * hi
            if hi > DIGIT_CAP:
                raise RangeError(f"digit at x={x} exceeds the int64-safe range")
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self._tail_float(mid) >= x:
                lo = mid
            else:
                hi = mid
        return self._locate_adjust_float(x, lo)

    def _locate_exact(self, x):
        raise NotImplementedError

    def _locate_array(self, xs: np.ndarray) -> np.ndarray:
        while xs.min() < self._table[-1] and len(self._table) < (1 << 22):
            self._table = self._build_tail_table(2 * len(self._table))
        t = self._table
        deep = xs < t[-1]
        n0 = np.empty(xs.shape, dtype=np.int64)
        n0[~deep] = np.searchsorted(-t, -xs[~deep], side="left") + 1
        if deep.any():
            for i in np.flatnonzero(deep):
                n0[i] = self._locate_far(float(xs[i]))
        tail_vec = lambda n: t[np.minimum(n, len(t)) - 1]
        out = self._locate_array_bisect(np.where(deep, t[-1], xs), n0, tail_vec)
        out[deep] = n0[deep]
        return out

    def classify(self) -> Classification:
        k = self._k
        return Classification("finite" if k > 1.0 else "infinite",
                              "expansive", 1.0, True, theta=1.0,
                              psi=f"(log n)^-{k:g} / C asymptotically")

    def t_infinity(self) -> float:
        return 0.5

    def pressure_finite_at_boundary(self) -> bool:
        # sum a_n^{1/2} ~ sum n^-1 (log n)^{-k/2}
        return self._k > 2.0

    def luroth_no_transition(self):
        k = self._k
        text = (f"psi^{{1/2}} log-criterion: sum (log n)^{{1 - {k:g}/2}}/n "
                + ("diverges" if k <= 4.0 else "converges"))
        return k <= 4.0, text

    def poly_decay_order(self) -> float:
        return 2.0

    def tail_sum_total(self):
        return INF if self._tail_total is None else self._tail_total

    def _tail_sum_remainder(self, n: int):
        # t_j <= 2 (log(j+shift))^-k / (j C); sum the bound over j > n
        k, sh, C = self._k, self._shift, self.normalization
        if k <= 1.0:
            return None
        head = math.log(n + 1 + sh) ** -k / (n + 1)
        integral = math.log(n + 1) ** (1.0 - k) / (k - 1.0)
        return 2.0 * (head + integral) / C

    def with_backend(self, backend):
        return LogPowerAtoms(self._k, self._shift, backend=backend)

    def to_dict(self):
        return {"family": "log_power_atoms", "k": self._k, "shift": self._shift}


class Explicit(PartitionSpec):
    """Finitely many hand-picked atoms, then a scaled copy of another family.

    a_1..a_p are the prefix entries; the remaining mass 1 - sum(prefix) is
    distributed as that multiple of the tail family's atoms.  Classification
    and all tail asymptotics are inherited from the tail family.
    """

    family = "explicit"

    def __init__(self, prefix, tail_family: PartitionSpec,
                 backend: Optional[str] = None):
        prefix = list(prefix)
        if not prefix:
            raise SpecParseError("explicit prefix must be non-empty")
        exact = (tail_family.exact_capable
                 and all(isinstance(a, (Fraction, int)) for a in prefix))
        if exact:
            prefix = [Fraction(a) for a in prefix]
            total = sum(prefix)
        else:
            prefix = [float(a) for a in prefix]
            total = math.fsum(prefix)
        if any(a <= 0 for a in prefix):
            raise SpecParseError("explicit prefix atoms must be positive")
        if total >= 1:
            raise SpecParseError(
                f"explicit prefix must leave mass for the tail, sums to {total}")
        self.exact_capable = exact
        self._prefix = prefix
        self._scale = (1 - total) if exact else (1.0 - total)
        self._tail_spec = (tail_family if tail_family.backend ==
                           ("exact" if exact else "float")
                           else tail_family.with_backend("exact" if exact else "float"))
        super().__init__(backend)
        # exact tails over the prefix: t_j = 1 - sum_{i<j} prefix_i
        acc = [Fraction(1) if exact else 1.0]
        for a in prefix:
            acc.append(acc[-1] - a)
        self._prefix_tails = acc      # length p+1; last equals the scale

    @property
    def _p(self) -> int:
        return len(self._prefix)

    def _atom_exact(self, n: int) -> Fraction:
        if n <= self._p:
            return self._prefix[n - 1]
        return self._scale * self._tail_spec._atom_exact(n - self._p)

    def _tail_exact(self, n: int) -> Fraction:
        if n <= self._p:
            return self._prefix_tails[n - 1]
        return self._scale * self._tail_spec._tail_exact(n - self._p)

    def _atom_float(self, n: int) -> float:
        if n <= self._p:
            return float(self._prefix[n - 1])
        return float(self._scale) * self._tail_spec._atom_float(n - self._p)

    def _tail_float(self, n: int) -> float:
        if n <= self._p:
            return float(self._prefix_tails[n - 1])
        return float(self._scale) * self._tail_spec._tail_float(n - self._p)

    def _tails_array(self, n_max: int) -> np.ndarray:
        p = self._p
        head = np.asarray([float(t) for t in self._prefix_tails[:-1]])[:n_max]
        if n_max <= p:
            return head
        rest = float(self._scale) * self._tail_spec._tails_array(n_max - p)
        return np.concatenate([head, rest])

    def _log_atoms(self, x):
        # smooth continuation only meaningful past the prefix
        return (math.log(float(self._scale))
                + self._tail_spec._log_atoms(np.asarray(x, dtype=np.float64)
                                             - self._p))

    def log_atoms(self, ns) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.float64)
        out = np.empty(ns.shape)
        pre = ns <= self._p
        if pre.any():
            vals = np.asarray([math.log(float(a)) for a in self._prefix])
            out[pre] = vals[ns[pre].astype(np.int64) - 1]
        if (~pre).any():
            out[~pre] = self._log_atoms(ns[~pre])
        return out

    def log_atom(self, n: int) -> float:
        return float(self.log_atoms(np.asarray([n]))[0])

    def _locate_exact(self, x: Fraction) -> int:
        for j in range(1, self._p + 1):
            if x > self._prefix_tails[j]:
                return j
        return self._p + self._tail_spec._locate_exact(x / self._scale)

    def _locate_float(self, x: float) -> int:
        for j in range(1, self._p + 1):
            if x > float(self._prefix_tails[j]):
                return j
        return self._p + self._tail_spec._locate_float(x / float(self._scale))

    def _locate_array(self, xs: np.ndarray) -> np.ndarray:
        out = np.empty(xs.shape, dtype=np.int64)
        edges = np.asarray([float(t) for t in self._prefix_tails])
        pre = xs > edges[-1]
        out[pre] = np.searchsorted(-edges, -xs[pre], side="left")
        rest = ~pre
        if rest.any():
            out[rest] = self._p + self._tail_spec._locate_array(
                xs[rest] / float(self._scale))
        return out

    def classify(self) -> Classification:
        inner = self._tail_spec.classify()
        return Classification(inner.type_class, inner.tail_kind, inner.rho,
                              inner.eventually_decreasing, theta=inner.theta,
                              psi=(None if inner.psi is None
                                   else f"{float(self._scale):g} * ({inner.psi})"))

    def t_infinity(self) -> float:
        return self._tail_spec.t_infinity()

    def pressure_finite_at_boundary(self) -> bool:
        return self._tail_spec.pressure_finite_at_boundary()

    def luroth_no_transition(self):
        return self._tail_spec.luroth_no_transition()

    def poly_decay_order(self):
        return self._tail_spec.poly_decay_order()

    def tail_sum_total(self):
        inner = self._tail_spec.tail_sum_total()
        if isinstance(inner, SymbolicInfinity):
            return INF
        head = sum(j * a for j, a in enumerate(self._prefix, start=1))
        if self.backend == "exact" and isinstance(inner, Fraction):
            return head + self._scale * (self._p + inner)
        return float(head) + float(self._scale) * (self._p + float(inner))

    def _tail_sum_remainder(self, n: int):
        if n >= self._p:
            inner = self._tail_spec._tail_sum_remainder(n - self._p)
            return None if inner is None else float(self._scale) * float(inner)
        inner = self._tail_spec._tail_sum_remainder(1)
        if inner is None:
            return None
        rest = math.fsum(float(t) for t in self._prefix_tails[n:-1])
        return rest + float(self._scale) * (1.0 + float(inner))

    def with_backend(self, backend):
        return Explicit(self._prefix, self._tail_spec, backend=backend)

    def to_dict(self):
        return {"family": "explicit",
                "prefix": [_num_out(a) for a in self._prefix],
                "tail_family": self._tail_spec.to_dict()}


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def _num_out(x):
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"
    return x


def _num_in(value, field: str):
    """Numbers in spec files: rational strings "p/q" keep exactness."""
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as e:
            raise SpecParseError(f"field {field!r}: bad rational {value!r}") from e
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecParseError(f"field {field!r}: expected a number, got {value!r}")
    return value


_NAMED = {
    "harmonic": lambda: Harmonic(),
    "dyadic": lambda: Dyadic(),
}


def spec_from_dict(data: dict) -> PartitionSpec:
    if not isinstance(data, dict):
        raise SpecParseError(f"partition spec must be an object, got {type(data).__name__}")
    family = data.get("family")
    if family is None:
        raise SpecParseError("field 'family' is required")
    try:
        if family == "harmonic":
            return Harmonic()
        if family == "dyadic":
            return Dyadic()
        if family == "geometric":
            if "r" not in data:
                raise SpecParseError("field 'r' is required for geometric")
            r = _num_in(data["r"], "r")
            if "c" in data:
                c = _num_in(data["c"], "c")
            elif isinstance(r, Fraction):
                c = (1 - r) / r
            else:
                c = (1.0 - r) / r
            if isinstance(c, Fraction) != isinstance(r, Fraction):
                c, r = float(c), float(r)
            return Geometric(c, r)
        if family == "power_atoms":
            if "s" not in data:
                raise SpecParseError("field 's' is required for power_atoms")
            return PowerAtoms(float(_num_in(data["s"], "s")))
        if family == "power_tail":
            if "theta" not in data:
                raise SpecParseError("field 'theta' is required for power_tail")
            return PowerTail(float(_num_in(data["theta"], "theta")))
        if family == "log_power_atoms":
            for f in ("k", "shift"):
                if f not in data:
                    raise SpecParseError(f"field {f!r} is required for log_power_atoms")
            return LogPowerAtoms(float(_num_in(data["k"], "k")),
                                 int(data["shift"]))
        if family == "explicit":
            for f in ("prefix", "tail_family"):
                if f not in data:
                    raise SpecParseError(f"field {f!r} is required for explicit")
            prefix = [_num_in(a, "prefix") for a in data["prefix"]]
            return Explicit(prefix, spec_from_dict(data["tail_family"]))
    except SpecParseError:
        raise
    except (TypeError, ValueError) as e:
        raise SpecParseError(f"family {family!r}: {e}") from e
    raise SpecParseError(f"unknown family {family!r}")


def parse_spec(text: str) -> PartitionSpec:
    """Build a spec from JSON text or a bare family shorthand ("harmonic")."""
    text = text.strip()
    if text in _NAMED:
        return _NAMED[text]()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecParseError(f"not valid JSON and not a named family: {e}") from e
    return spec_from_dict(data)
