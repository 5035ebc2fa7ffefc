"""Pinching constants of the rigidity theorems and a hypothesis evaluator.

Theorem identifiers
-------------------
``zero-scalar-lp``            zero scalar curvature, noncompact, L^{n+1} pinching with decay exponent sigma
``zero-scalar-conformal``     zero scalar curvature, noncompact, conformally invariant case sigma = n+1
``negative-scalar-lp``        negative scalar curvature, noncompact, 2 <= sigma < n-1
``positive-scalar-compact``   positive scalar curvature, compactness conclusion, piecewise C_{n sigma}
``positive-scalar-conformal`` positive scalar curvature, compact pseudo-Einstein conclusion
``positive-scalar-sup``       positive scalar curvature, sup-norm pinching
``flat-space-form-lp``        pseudo-Einstein, zero scalar curvature, Chern-Moser L^{n+1} pinching
``negative-space-form-lp``    pseudo-Einstein, negative scalar curvature, n >= 4
``heisenberg-lp``             combined Chern-Moser and Ricci pinching, Heisenberg characterisation
``positive-space-form-lp``    compact pseudo-Einstein, positive scalar curvature, constant C_1
``sphere-lp``                 combined pinching with C_1, sphere characterisation
``positive-space-form-sup``   compact pseudo-Einstein, sup-norm Chern-Moser pinching
``sphere-sup``                combined sup-norm pinching, sphere characterisation
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

from .errors import DomainError
from .tensor import SlackRecord

FORMAT_VERSION = "1"
SQRT2 = math.sqrt(2.0)


# -- constants of the gap proposition ------------------------------------------

def _gap_checks(sigma: float, B: float, delta: float, eps: float) -> float:
    if not delta > 0:
        raise DomainError("constraint delta > 0 violated")
    room = sigma - B - 1.0
    if not room > 0:
        raise DomainError("constraint sigma - B - 1 > 0 violated")
    if not 0 < eps < room:
        raise DomainError("constraint 0 < epsilon < sigma - B - 1 violated")
    if sigma < 2:
        raise DomainError("constraint sigma >= 2 violated")
    return room


def gap_constant(sigma: float, B: float, delta: float, eps: float) -> float:
    """``4 sigma^-2 (1+delta)^-1 (sigma - B - 1 - eps)``."""
    room = _gap_checks(sigma, B, delta, eps)
    return 4.0 * (room - eps) / (sigma**2 * (1.0 + delta))


def yamabe_gap_constant(n: int, sigma: float, B: float, delta: float, eps: float) -> float:
    """``(2n/(n+1)) (sigma - B - 1 - eps) / (sigma^2 (1+delta))``."""
    _check_n(n)
    room = _gap_checks(sigma, B, delta, eps)
    return 2.0 * n / (n + 1) * (room - eps) / (sigma**2 * (1.0 + delta))


# -- thresholds --------------------------------------------------------------------

def _check_n(n: int, floor: int = 2) -> None:
    if int(n) != n or n < floor:
        raise DomainError(f"n must be an integer >= {floor}")


def _check_sigma(sigma) -> float:
    if sigma is None:
        raise DomainError("this theorem needs sigma")
    if not sigma >= 2:
        raise DomainError("sigma must be at least 2")
    return float(sigma)


def _radical_e(n: int) -> float:
    return math.sqrt((n + 2) / (2 * n * n + 4 * n + 3))


def ricci_lp_coefficient(n: int, sigma: float) -> float:
    return (2 * n * sigma - 2 * n + 2) / (sigma**2 * math.sqrt(n + 1)) * _radical_e(n)


def c_n_sigma(n: int, sigma: float) -> float:
    """Piecewise constant of the compactness theorem; the last branch starts at ``sigma = n - 1``."""
    _check_n(n)
    sigma = _check_sigma(sigma)
    if n >= 4 and sigma < n - 1:
        return 2.0 / (n + 1)
    return (2 * n * sigma - 2 * n + 2) / ((n + 1) * sigma**2)


def c_one(n: int) -> float:
    _check_n(n)
    if n == 2:
        return 5.0 / (9.0 * math.sqrt(3.0))
    if n == 3:
        return 9.0 * SQRT2 / 56.0
    return 2.0 * math.sqrt(n * n - 1) / (3.0 * (n * n - 2))


def sup_cm_coefficient(n: int) -> float:
    return 2.0 * math.sqrt(n * n - 1) / (3.0 * (n * n - 2))


def sup_ricci_coefficient(n: int) -> float:
    return math.sqrt(8.0 * (n + 2) / ((n + 1) * (2 * n * n + 4 * n + 3)))


def cm_lp_coefficient(n: int, sigma: float) -> float:
    return 2.0 * n * n / (3.0 * (n * n - 2)) * math.sqrt((n - 1) / (n + 1)) * (sigma + 2.0 / (n + 1) - 1.0) / sigma**2


def negative_cm_window(n: int) -> float:
    """Upper end of the sigma window for the negative space-form theorem: ``n(n-1)/(n+1)``."""
    return (n * n + math.sqrt(n**4 - 4 * n**3 + 4 * n * n)) / (2.0 * (n + 1))


@dataclass(frozen=True)
class Threshold:
    theorem: str
    n: int
    sigma: float | None
    coefficient: float
    multiplier: str  # "yamabe" or "rho"

    def value(self, multiplier_value: float) -> float:
        return self.coefficient * multiplier_value


@dataclass(frozen=True)
class TheoremSpec:
    coefficient: Callable
    multiplier: str
    uses_sigma: bool = False
    n_floor: int = 2
    sigma_window: Callable | None = None  # n -> exclusive upper bound


def _fixed(f):
    return lambda n, sigma: f(n)


THEOREMS: dict[str, TheoremSpec] = {
    "zero-scalar-lp": TheoremSpec(ricci_lp_coefficient, "yamabe", True),
    "zero-scalar-conformal": TheoremSpec(
        _fixed(lambda n: (2 * n * n + 2) / (n + 1) ** 2.5 * _radical_e(n)), "yamabe"
    ),
    "negative-scalar-lp": TheoremSpec(ricci_lp_coefficient, "yamabe", True, 2, lambda n: n - 1.0),
    "positive-scalar-compact": TheoremSpec(
        lambda n, s: c_n_sigma(n, s) * math.sqrt((n + 1) * (n + 2) / (2 * n * n + 4 * n + 3)), "yamabe", True
    ),
    "positive-scalar-conformal": TheoremSpec(
        _fixed(lambda n: (2 * n * n + 2) / (n + 1) ** 2.5 * _radical_e(n)), "yamabe"
    ),
    "positive-scalar-sup": TheoremSpec(_fixed(sup_ricci_coefficient), "rho"),
    "flat-space-form-lp": TheoremSpec(cm_lp_coefficient, "yamabe", True),
    "negative-space-form-lp": TheoremSpec(cm_lp_coefficient, "yamabe", True, 4, negative_cm_window),
    "heisenberg-lp": TheoremSpec(
        _fixed(
            lambda n: 2.0 * n * n * (n * n + n + 2) / (3.0 * (n + 1) ** 3 * (n * n - 2)) * math.sqrt((n - 1) / (n + 1))
        ),
        "yamabe",
    ),
    "positive-space-form-lp": TheoremSpec(_fixed(c_one), "yamabe"),
    "sphere-lp": TheoremSpec(_fixed(c_one), "yamabe"),
    "positive-space-form-sup": TheoremSpec(_fixed(sup_cm_coefficient), "rho"),
    "sphere-sup": TheoremSpec(_fixed(sup_cm_coefficient), "rho"),
}


def threshold(theorem: str, n: int, sigma: float | None = None) -> Threshold:
    """Coefficient of the pinching bound; multiply by ``lambda(M)`` or ``rho`` per ``multiplier``."""
    if theorem not in THEOREMS:
        raise DomainError(f"unknown theorem {theorem!r}; choose from {sorted(THEOREMS)}")
    info = THEOREMS[theorem]
    _check_n(n, info.n_floor)
    if info.uses_sigma:
        sigma = _check_sigma(sigma)
        if info.sigma_window is not None and not sigma < info.sigma_window(n):
            raise DomainError(f"sigma must lie in [2, {info.sigma_window(n):.6g}) for n={n}")
    else:
        sigma = None
    return Threshold(theorem, int(n), sigma, float(info.coefficient(n, sigma)), info.multiplier)


def critical_sigma(theorem: str, n: int) -> float:
    """Unconstrained maximiser of the sigma-dependent coefficient."""
    if theorem in ("zero-scalar-lp", "negative-scalar-lp"):
        return 2.0 * (n - 1) / n
    if theorem in ("flat-space-form-lp", "negative-space-form-lp"):
        return 2.0 * (n - 1) / (n + 1)
    if theorem == "positive-scalar-compact":
        return 2.0 * (n - 1) / n
    raise DomainError(f"{theorem!r} has no sigma dependence")


def best_sigma(theorem: str, n: int, upper: float = 1e3) -> tuple[float, float]:
    """``(sigma, coefficient)`` maximising the threshold over the admissible ``sigma >= 2``.

    The unconstrained critical point lies below 2 for every theorem, so the
    admissible maximum sits at ``sigma = 2``; a bracketing scan confirms that
    the derivative has no sign change above it.
    """
    info = THEOREMS[theorem]
    if not info.uses_sigma:
        raise DomainError(f"{theorem!r} has no sigma dependence")
    hi = info.sigma_window(n) if info.sigma_window else upper
    f = lambda s: info.coefficient(n, s)
    grid = [2.0 + (hi - 2.0) * k / 2000.0 for k in range(2000)]
    vals = [f(s) for s in grid]
    k = max(range(len(vals)), key=vals.__getitem__)
    if 0 < k < len(vals) - 1:
        lo_s, hi_s = grid[k - 1], grid[k + 1]
        inv = (math.sqrt(5) - 1) / 2
        for _ in range(80):
            a, b = hi_s - inv * (hi_s - lo_s), lo_s + inv * (hi_s - lo_s)
            if f(a) > f(b):
                hi_s = b
            else:
                lo_s = a
        s = 0.5 * (lo_s + hi_s)
        return s, f(s)
    return grid[k], vals[k]


def comparison_check(n: int) -> SlackRecord:
    """The sup-norm Chern-Moser coefficient does not exceed the sup-norm Ricci coefficient."""
    _check_n(n)
    lhs = sup_cm_coefficient(n)
    rhs = sup_ricci_coefficient(n)
    return SlackRecord.of(lhs, rhs, {"n": int(n)}, rhs)


# -- evaluator ------------------------------------------------------------------------

@dataclass
class ManifoldSummary:
    n: int
    rho: float | None = None
    yamabe: float | None = None
    normC: float | None = None
    normE: float | None = None
    supC: float | None = None
    supE: float | None = None
    sigma: float | None = None
    compact: bool | None = None
    simply_connected: bool | None = None
    pseudo_einstein: bool | None = None

    def __post_init__(self):
        _check_n(self.n)
        for name in ("normC", "normE", "supC", "supE"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise DomainError(f"{name} must be nonnegative")

    @classmethod
    def from_dict(cls, doc: dict) -> "ManifoldSummary":
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise DomainError(f"unknown summary fields: {sorted(unknown)}")
        if "n" not in doc:
            raise DomainError("summary needs n")
        return cls(**doc)

    @property
    def is_pseudo_einstein(self) -> bool:
        return bool(self.pseudo_einstein) or self.normE == 0 or self.supE == 0


@dataclass
class PinchReport:
    theorem: str
    status: str  # satisfied | not-satisfied | not-applicable
    lhs: float | None = None
    threshold: float | None = None
    multiplier: str | None = None
    conclusion: list = field(default_factory=list)
    statement: str = ""
    reason: str = ""
    assumed: list = field(default_factory=list)
    version: str = FORMAT_VERSION

    @property
    def satisfied(self) -> bool:
        return self.status == "satisfied"

    def to_dict(self) -> dict:
        out = asdict(self)
        out["satisfied"] = self.satisfied
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


class _NA(Exception):
    pass


def _need(cond: bool, reason: str) -> None:
    if not cond:
        raise _NA(reason)


def _value(s: ManifoldSummary, name: str):
    v = getattr(s, name)
    _need(v is not None, f"{name} not supplied")
    return v


def _scalar_sign(s: ManifoldSummary, sign: int) -> None:
    rho = _value(s, "rho")
    labels = {0: "zero", 1: "positive", -1: "negative"}
    _need((rho > 0) - (rho < 0) == sign, f"needs {labels[sign]} scalar curvature")


def _positive_yamabe(s: ManifoldSummary) -> float:
    lam = _value(s, "yamabe")
    _need(lam > 0, "needs positive CR Yamabe constant")
    return lam


def _noncompact(s: ManifoldSummary, assumed: list) -> None:
    _need(s.compact is not True, "needs a noncompact manifold")
    if s.compact is None:
        assumed.append("noncompact")


def _compact(s: ManifoldSummary) -> None:
    _need(s.compact is True, "needs a compact manifold")


def _pseudo_einstein(s: ManifoldSummary) -> None:
    _need(s.is_pseudo_einstein, "needs a pseudo-Einstein manifold")


def _simply_connected(s: ManifoldSummary) -> None:
    _need(s.simply_connected is True, "needs a simply connected manifold")


def _decay(assumed: list, what: str, sigma: float) -> None:
    assumed.append(f"integral of |{what}|^{sigma:g} over balls of radius r is o(r^2)")


def _ricci_lp_lhs(s):
    return _value(s, "normC") / SQRT2 + _value(s, "normE")


def _combined_lp_lhs(s):
    return _value(s, "normC") + SQRT2 * _value(s, "normE")


def _rule(theorem: str, s: ManifoldSummary, assumed: list):
    """Returns (lhs, threshold Threshold, multiplier value, conclusion labels, statement)."""
    n = s.n
    if theorem == "zero-scalar-lp":
        _scalar_sign(s, 0)
        _noncompact(s, assumed)
        lam = _positive_yamabe(s)
        sigma = _check_sigma_na(s)
        _decay(assumed, "E", sigma)
        return _ricci_lp_lhs(s), threshold(theorem, n, sigma), lam, ["pseudo-Einstein", "Ricci-flat"], "pseudo-Hermitian Ricci-flat"
    if theorem == "zero-scalar-conformal":
        _scalar_sign(s, 0)
        _noncompact(s, assumed)
        lam = _positive_yamabe(s)
        return _ricci_lp_lhs(s), threshold(theorem, n), lam, ["pseudo-Einstein", "Ricci-flat"], "pseudo-Hermitian Ricci-flat"
    if theorem == "negative-scalar-lp":
        _scalar_sign(s, -1)
        _noncompact(s, assumed)
        lam = _positive_yamabe(s)
        sigma = _check_sigma_na(s)
        _need(sigma < n - 1, f"sigma window [2, {n - 1}) is empty or excludes sigma")
        _decay(assumed, "E", sigma)
        return _ricci_lp_lhs(s), threshold(theorem, n, sigma), lam, ["pseudo-Einstein"], "pseudo-Einstein"
    if theorem == "positive-scalar-compact":
        _scalar_sign(s, 1)
        lam = _positive_yamabe(s)
        sigma = _check_sigma_na(s)
        if n >= 4 and sigma == n - 1:
            assumed.append("sigma = n - 1 evaluated on the branch starting at n - 1")
        _decay(assumed, "E", sigma)
        return _ricci_lp_lhs(s), threshold(theorem, n, sigma), lam, ["compact"], "compact"
    if theorem == "positive-scalar-conformal":
        _scalar_sign(s, 1)
        lam = _positive_yamabe(s)
        return _ricci_lp_lhs(s), threshold(theorem, n), lam, ["compact", "pseudo-Einstein"], "compact pseudo-Einstein, real first Chern class of HM vanishes"
    if theorem == "positive-scalar-sup":
        _scalar_sign(s, 1)
        lhs = SQRT2 * _value(s, "supE") + _value(s, "supC")
        assumed.append("sup(sqrt2|E| + |C|) bounded by sqrt2 supE + supC")
        return lhs, threshold(theorem, n), s.rho, ["pseudo-Einstein", "compact"], "pseudo-Einstein and compact, real first Chern class of HM vanishes"
    if theorem == "flat-space-form-lp":
        _pseudo_einstein(s)
        _scalar_sign(s, 0)
        _noncompact(s, assumed)
        lam = _positive_yamabe(s)
        sigma = _check_sigma_na(s)
        _decay(assumed, "C", sigma)
        labels = ["space-form-κ"] + (["heisenberg"] if s.simply_connected else [])
        text = "zero pseudo-Hermitian sectional curvature" + ("; D-homothetic to the Heisenberg group" if s.simply_connected else "")
        return _value(s, "normC"), threshold(theorem, n, sigma), lam, labels, text
    if theorem == "negative-space-form-lp":
        _need(n >= 4, "needs dimension 2n+1 >= 9")
        _pseudo_einstein(s)
        _scalar_sign(s, -1)
        _noncompact(s, assumed)
        lam = _positive_yamabe(s)
        sigma = _check_sigma_na(s)
        _need(sigma < negative_cm_window(n), "sigma outside the admissible window")
        _decay(assumed, "C", sigma)
        return _value(s, "normC"), threshold(theorem, n, sigma), lam, ["space-form-κ"], "constant negative pseudo-Hermitian sectional curvature"
    if theorem == "heisenberg-lp":
        _simply_connected(s)
        _scalar_sign(s, 0)
        _noncompact(s, assumed)
        lam = _positive_yamabe(s)
        return _combined_lp_lhs(s), threshold(theorem, n), lam, ["heisenberg"], "D-homothetic to the Heisenberg group"
    if theorem == "positive-space-form-lp":
        _compact(s)
        _pseudo_einstein(s)
        _scalar_sign(s, 1)
        lam = _positive_yamabe(s)
        labels = ["space-form-κ"] + (["sphere"] if s.simply_connected else [])
        text = "constant positive pseudo-Hermitian sectional curvature" + ("; D-homothetic to S^{2n+1}" if s.simply_connected else "")
        return _value(s, "normC"), threshold(theorem, n), lam, labels, text
    if theorem == "sphere-lp":
        _simply_connected(s)
        _scalar_sign(s, 1)
        lam = _positive_yamabe(s)
        return _combined_lp_lhs(s), threshold(theorem, n), lam, ["sphere"], "D-homothetic to S^{2n+1}"
    if theorem == "positive-space-form-sup":
        _compact(s)
        _pseudo_einstein(s)
        _scalar_sign(s, 1)
        labels = ["space-form-κ"] + (["sphere"] if s.simply_connected else [])
        text = "constant positive pseudo-Hermitian sectional curvature" + ("; D-homothetic to S^{2n+1}" if s.simply_connected else "")
        return _value(s, "supC"), threshold(theorem, n), s.rho, labels, text
    if theorem == "sphere-sup":
        _simply_connected(s)
        _scalar_sign(s, 1)
        lhs = _value(s, "supC") + SQRT2 * _value(s, "supE")
        assumed.append("sup(|C| + sqrt2|E|) bounded by supC + sqrt2 supE")
        return lhs, threshold(theorem, n), s.rho, ["sphere"], "D-homothetic to S^{2n+1}"
    raise DomainError(f"unknown theorem {theorem!r}")


def _check_sigma_na(s: ManifoldSummary) -> float:
    sigma = _value(s, "sigma")
    _need(sigma >= 2, "needs sigma >= 2")
    return float(sigma)


def evaluate_theorem(theorem: str, summary: ManifoldSummary) -> PinchReport:
    assumed: list = []
    try:
        lhs, thr, mult, labels, text = _rule(theorem, summary, assumed)
    except _NA as exc:
        return PinchReport(theorem, "not-applicable", reason=str(exc))
    except DomainError as exc:
        return PinchReport(theorem, "not-applicable", reason=str(exc))
    bound = thr.value(mult)
    ok = lhs < bound
    return PinchReport(
        theorem,
        "satisfied" if ok else "not-satisfied",
        lhs=float(lhs),
        threshold=float(bound),
        multiplier=thr.multiplier,
        conclusion=labels if ok else [],
        statement=text if ok else "",
        assumed=assumed,
    )


def evaluate(summary: ManifoldSummary) -> list[PinchReport]:
    """One report per theorem, in a fixed order."""
    return [evaluate_theorem(t, summary) for t in THEOREMS]
