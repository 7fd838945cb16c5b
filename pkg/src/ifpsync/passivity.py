"""Rational transfer functions and input-feedforward passivity (IFP) indices.

A SISO transfer function W(s) = num(s)/den(s) with no poles in the open right
half plane and only simple imaginary-axis poles with non-negative real
residues is IFP(alpha) for

    alpha = max(0, -inf_w Re W(iw)),

i.e. W shifted by the feedforward alpha*u is passive. ``ifp_index`` computes
the infimum by a logarithmic frequency sweep with golden-section refinement;
``prl_conditions`` reports the underlying positive-real-lemma conditions.

Pole and residue classification works on the num/den pair as given; callers
are expected to supply transfer functions in lowest terms (common factors
cancelled to ~1e-9), since a hidden unstable cancellation cannot be detected
numerically from the coefficients alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    BOutOfRange,
    DimensionMismatch,
    IfpSyncError,
    NotCertifiable,
    PoleOnAxis,
    ZeroPolynomial,
)

__all__ = [
    "Polynomial",
    "RationalTF",
    "IfpCertificate",
    "PrlReport",
    "IfpShift",
    "eval_freq",
    "routh_hurwitz",
    "ifp_index",
    "prl_conditions",
    "ifp_shift",
    "ifp_shift_identity_check",
]

#: |den(iw)| below this fraction of sum_k |den_k| |w|^k counts as a pole hit
_POLE_RTOL = 1e-14

#: pole classification: |Re| <= _AXIS_RTOL*(1+|Im|) is "on the imaginary axis"
_AXIS_RTOL = 1e-9

#: minimum distance between imaginary-axis poles to count as simple
_SIMPLE_TOL = 1e-6

#: grid for the frequency sweep
_GRID_LO, _GRID_HI, _GRID_POINTS = 1e-6, 1e6, 2000

#: relative tolerance (in omega) of the golden-section refinement
_REFINE_RTOL = 1e-10


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial with ascending coefficients, c[k] * x^k.

    High-order zero coefficients are trimmed on construction, so the leading
    coefficient is nonzero unless the polynomial is identically zero.
    """

    coeffs: tuple[float, ...]

    def __init__(self, coeffs: Sequence[float]):
        c = [float(x) for x in coeffs]
        while len(c) > 1 and c[-1] == 0.0:
            c.pop()
        if not c:
            c = [0.0]
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        if self.is_zero:
            return -1
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return self.coeffs == (0.0,)

    def __call__(self, x):
        r = 0.0 * x  # promotes to complex when x is complex
        for c in reversed(self.coeffs):
            r = r * x + c
        return r

    def descending(self) -> np.ndarray:
        """Coefficients in highest-first order (np.roots/np.polyval layout)."""
        return np.array(self.coeffs[::-1], dtype=float)

    def magnitude_at(self, w: float) -> float:
        """sum_k |c_k| |w|^k — the natural magnitude scale of an evaluation."""
        aw = abs(w)
        return float(sum(abs(c) * aw**k for k, c in enumerate(self.coeffs)))


@dataclass(frozen=True)
class RationalTF:
    """Proper SISO rational transfer function num/den (ascending coeffs)."""

    num: Polynomial
    den: Polynomial

    def __post_init__(self):
        if self.den.is_zero:
            raise ZeroPolynomial("denominator is identically zero")
        if self.num.degree > self.den.degree:
            raise IfpSyncError(
                f"improper transfer function: deg num {self.num.degree} > "
                f"deg den {self.den.degree}"
            )

    @classmethod
    def from_coeffs(cls, num: Sequence[float], den: Sequence[float]) -> "RationalTF":
        return cls(Polynomial(num), Polynomial(den))

    @property
    def strictly_proper(self) -> bool:
        return self.num.degree < self.den.degree

    def poles(self) -> np.ndarray:
        """Denominator roots (companion-matrix eigenvalues)."""
        if self.den.degree < 1:
            return np.array([], dtype=complex)
        return np.roots(self.den.descending())


@dataclass(frozen=True)
class IfpCertificate:
    """Result of ifp_index: W is IFP(alpha).

    omega_star is the frequency attaining (or approaching) the infimum of
    Re W(iw); math.inf flags the limit w -> infinity. raw_infimum keeps the
    unclamped infimum for diagnostics (alpha clamps it at zero).
    """

    alpha: float
    omega_star: float
    method: str  # "grid_refined" | "closed_form"
    raw_infimum: float

    def to_json_dict(self) -> dict:
        ws = "inf" if math.isinf(self.omega_star) else self.omega_star
        return {
            "alpha": self.alpha,
            "omega_star": ws,
            "method": self.method,
            "raw_infimum": self.raw_infimum,
        }


@dataclass(frozen=True)
class PrlReport:
    """Positive-real-lemma conditions for W(s) + alpha."""

    no_unstable_poles: bool
    imaginary_poles_ok: bool
    freq_condition_ok: bool

    @property
    def all_ok(self) -> bool:
        return self.no_unstable_poles and self.imaginary_poles_ok and self.freq_condition_ok

    def to_json_dict(self) -> dict:
        return {
            "no_unstable_poles": self.no_unstable_poles,
            "imaginary_poles_ok": self.imaginary_poles_ok,
            "freq_condition_ok": self.freq_condition_ok,
        }


@dataclass(frozen=True)
class IfpShift:
    """Output-feedback shift u -> u + b*y of an IFP(alpha) system.

    The shifted system is IFP(alpha_hat) with surplus output passivity gamma:

        alpha_hat = alpha / (1 - 2*alpha*b)
        gamma     = b * (1 - alpha*b) / (1 - 2*alpha*b)
    """

    alpha: float
    b: float
    alpha_hat: float
    gamma: float


def eval_freq(tf: RationalTF, omega: float) -> complex:
    """Evaluate W(i*omega).

    Raises PoleOnAxis when |den(i*omega)| is below 1e-14 of the denominator's
    own magnitude scale at that frequency.
    """
    s = 1j * float(omega)
    d = tf.den(s)
    scale = tf.den.magnitude_at(omega)
    if abs(d) < _POLE_RTOL * scale:
        raise PoleOnAxis(f"denominator vanishes at omega = {omega}")
    return tf.num(s) / d


def routh_hurwitz(p: Polynomial) -> bool:
    """True iff every root of p has strictly negative real part.

    Standard Routh table; any non-positive first-column entry (including an
    exact zero pivot) declares the polynomial non-Hurwitz, which is the
    correct strict verdict and avoids epsilon bookkeeping.
    """
    if p.is_zero:
        raise ZeroPolynomial("routh_hurwitz of the zero polynomial")
    if p.degree == 0:
        return True  # no roots
    a = list(p.descending())
    if a[0] < 0.0:
        a = [-x for x in a]
    row_prev = a[0::2]
    row_cur = a[1::2]
    if row_prev[0] <= 0.0:
        return False
    while row_cur:
        pivot = row_cur[0]
        if pivot <= 0.0:
            return False
        width = len(row_prev) - 1
        nxt = []
        for i in range(width):
            up = row_prev[i + 1]
            left = row_cur[i + 1] if i + 1 < len(row_cur) else 0.0
            nxt.append((pivot * up - row_prev[0] * left) / pivot)
        row_prev, row_cur = row_cur, nxt
    return True


def _classify_poles(tf: RationalTF):
    """Denominator roots plus index lists of unstable / imaginary-axis ones."""
    roots = tf.poles()
    unstable_idx = [
        i for i, r in enumerate(roots) if r.real > _AXIS_RTOL * (1.0 + abs(r.imag))
    ]
    imaginary_idx = [
        i for i, r in enumerate(roots) if abs(r.real) <= _AXIS_RTOL * (1.0 + abs(r.imag))
    ]
    return unstable_idx, imaginary_idx, roots


def _imaginary_pole_ok(tf: RationalTF, idx: int, roots: np.ndarray) -> bool:
    """Simple imaginary pole with (numerically) real non-negative residue."""
    pole = roots[idx]
    others = np.delete(roots, idx)
    if len(others) and np.abs(others - pole).min() <= _SIMPLE_TOL:
        return False
    w0 = pole.imag
    lam0 = 1j * w0

    def shifted(h: float) -> complex:
        lam = lam0 + h
        return tf.num(lam) / tf.den(lam) * (lam - lam0)

    h = 1e-6 * (1.0 + abs(w0))
    res = 2.0 * shifted(h / 2.0) - shifted(h)  # one Richardson step
    tol = 1e-6 * (1.0 + abs(res))
    return res.real >= -tol and abs(res.imag) <= tol


def _freq_samples(tf: RationalTF):
    """Sampled Re W(iw) on the certification grid.

    Returns (omegas, values, limit) where the grid drops samples that land on
    (or numerically graze) a pole, omega = 0 is included when den(0) != 0, and
    limit is Re W(i*inf).
    """
    omegas = np.logspace(
        math.log10(_GRID_LO), math.log10(_GRID_HI), _GRID_POINTS
    )
    s = 1j * omegas
    num_v = np.polyval(tf.num.descending(), s)
    den_v = np.polyval(tf.den.descending(), s)
    scale = np.polyval(np.abs(tf.den.descending()), omegas)
    keep = np.abs(den_v) > 1e-12 * scale
    omegas = omegas[keep]
    vals = (num_v[keep] / den_v[keep]).real
    if tf.den.coeffs[0] != 0.0:
        omegas = np.concatenate(([0.0], omegas))
        vals = np.concatenate(([tf.num.coeffs[0] / tf.den.coeffs[0]], vals))
    if tf.num.degree == tf.den.degree:
        limit = tf.num.coeffs[-1] / tf.den.coeffs[-1]
    else:
        limit = 0.0
    return omegas, vals, float(limit)


def _golden_min(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Golden-section minimum of f on [lo, hi] to absolute x-tolerance tol."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def _refine_minimum(tf: RationalTF, omegas: np.ndarray, vals: np.ndarray):
    """Golden-section refinement around the grid argmin (log scale in omega)."""

    def re_w(w: float) -> float:
        sw = 1j * w
        return (tf.num(sw) / tf.den(sw)).real

    k = int(np.argmin(vals))
    if omegas[k] == 0.0:
        # boundary at omega = 0: refine linearly toward the first grid point
        hi = omegas[k + 1] if k + 1 < len(omegas) else _GRID_LO
        w, v = _golden_min(re_w, 0.0, hi, _REFINE_RTOL * max(hi, 1.0))
        probe0 = vals[k]
        return (0.0, probe0) if probe0 <= v else (w, v)
    lo = omegas[k - 1] if k > 0 and omegas[k - 1] > 0.0 else omegas[k] / 100.0
    hi = omegas[k + 1] if k + 1 < len(omegas) else omegas[k] * 100.0
    ulo, uhi = math.log(lo), math.log(hi)
    w_log, v = _golden_min(lambda u: re_w(math.exp(u)), ulo, uhi, _REFINE_RTOL)
    w = math.exp(w_log)
    if vals[k] <= v:
        return float(omegas[k]), float(vals[k])
    return w, v


def _check_pole_conditions(tf: RationalTF) -> tuple[bool, bool]:
    unstable_idx, imaginary_idx, roots = _classify_poles(tf)
    no_unstable = not unstable_idx
    imag_ok = all(_imaginary_pole_ok(tf, i, roots) for i in imaginary_idx)
    return no_unstable, imag_ok


def ifp_index(tf: RationalTF) -> IfpCertificate:
    """IFP index alpha = max(0, -inf_w Re W(iw)) of a certifiable W.

    The infimum is located on a 2000-point log grid over [1e-6, 1e6] rad/s
    (plus omega = 0 when finite and the w -> inf limit) and refined by
    golden section to 1e-10 relative tolerance in omega.

    Raises
    ------
    NotCertifiable
        If W has a pole with positive real part, or an imaginary-axis pole
        that is repeated or has a residue that is not non-negative real.
    """
    no_unstable, imag_ok = _check_pole_conditions(tf)
    if not no_unstable:
        raise NotCertifiable("transfer function has a pole with positive real part")
    if not imag_ok:
        raise NotCertifiable(
            "imaginary-axis pole is repeated or has a non-real/negative residue"
        )
    omegas, vals, limit = _freq_samples(tf)
    w_min, v_min = _refine_minimum(tf, omegas, vals)
    omega_star: float = w_min
    infimum = v_min
    if limit < infimum:
        infimum = limit
        omega_star = math.inf
    return IfpCertificate(
        alpha=max(0.0, -infimum),
        omega_star=omega_star,
        method="grid_refined",
        raw_infimum=infimum,
    )


def prl_conditions(tf: RationalTF, alpha: float) -> PrlReport:
    """Positive-real-lemma conditions for W(s) + alpha.

    (1) no poles with positive real part; (2) imaginary-axis poles simple
    with non-negative real residues; (3) Re W(iw) + alpha >= -1e-9 on the
    certification grid.
    """
    no_unstable, imag_ok = _check_pole_conditions(tf)
    omegas, vals, limit = _freq_samples(tf)
    lowest = min(float(vals.min()) if len(vals) else math.inf, limit)
    freq_ok = lowest + float(alpha) >= -1e-9
    return PrlReport(
        no_unstable_poles=no_unstable,
        imaginary_poles_ok=imag_ok,
        freq_condition_ok=freq_ok,
    )


def ifp_shift(alpha: float, b: float) -> IfpShift:
    """Shift an IFP(alpha) system by output feedback u -> u + b*y.

    Requires 0 < b (and b < 1/(2*alpha) when alpha > 0).
    """
    alpha = float(alpha)
    b = float(b)
    if alpha < 0.0:
        raise BOutOfRange(f"alpha must be non-negative, got {alpha}")
    if b <= 0.0 or (alpha > 0.0 and b >= 0.5 / alpha):
        hi = math.inf if alpha == 0.0 else 0.5 / alpha
        raise BOutOfRange(f"b must lie in (0, {hi}), got {b}")
    denom = 1.0 - 2.0 * alpha * b
    return IfpShift(
        alpha=alpha,
        b=b,
        alpha_hat=alpha / denom,
        gamma=b * (1.0 - alpha * b) / denom,
    )


def ifp_shift_identity_check(alpha: float, b: float, y, u) -> float:
    """Residual of the exact shift identity on one sample pair (y, u).

    With u_hat = u + b*y the identity

        y.u + alpha|u|^2
          = (1 - 2 alpha b) (y.u_hat + alpha_hat|u_hat|^2 - gamma|y|^2)

    holds algebraically; the returned |lhs - rhs| is pure rounding noise.
    """
    y = np.asarray(y, dtype=float)
    u = np.asarray(u, dtype=float)
    if y.shape != u.shape:
        raise DimensionMismatch(f"y shape {y.shape} != u shape {u.shape}")
    sh = ifp_shift(alpha, b)
    u_hat = u + b * y
    lhs = float(y @ u + alpha * (u @ u))
    rhs = (1.0 - 2.0 * alpha * b) * float(
        y @ u_hat + sh.alpha_hat * (u_hat @ u_hat) - sh.gamma * (y @ y)
    )
    return abs(lhs - rhs)
