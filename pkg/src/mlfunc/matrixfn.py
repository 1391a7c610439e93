"""Matrix arguments E_{alpha,beta}(t^alpha A) through Jordan structure.

A matrix argument is specified either by an explicit Jordan form (blocks
(lambda, size) plus an optional similarity transform) or by a plain ndarray,
which is eigendecomposed on the fly when that is numerically safe.  For a
single block J = lambda I + N the function value is the upper-triangular
Toeplitz matrix

    E(t^alpha J)[r, r+j] = (1/j!) d^j/dlambda^j E_{alpha,beta}(lambda t^alpha)

so everything reduces to the scalar lambda-derivatives, evaluated by the
series or path route depending on |lambda| t^alpha.

``decay_check`` and ``integral_check`` validate the two stability
statements: under the sector condition |arg lambda_i| > alpha*pi/2 for all
eigenvalues, ||E_alpha(t^alpha A)|| decays like t^(-alpha), and

    integral_0^infinity tau^(alpha-1) ||E_{alpha,alpha}(tau^alpha A)|| dtau

is finite.  The integral is certified by quadrature up to a cutoff plus a
closed-form tail bound assembled from the derivative envelope constants:
entry (r, r+l) of a block is bounded by (1/l!) M_hat_l / tau^(2 alpha), the
nilpotent shifts have unit norm, so the tau-tail integrates to
sum_l (1/l!) M_hat_l / (alpha T^alpha), inflated by cond(T) when a
transform is present.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

from .bounds import (
    SectorContextError,
    _deriv_value,
    lemma4_constants,
    sector_context,
)
from .numcore import (
    DomainError,
    QuadratureControls,
    integrate_path,
    line_segment,
    principal_arg,
    recip_gamma,
)
from .series import MLParams, ml_series_deriv

__all__ = [
    "JordanSpec",
    "SpectralReport",
    "spectral_condition",
    "ml_jordan_block",
    "ml_matrix",
    "DecayReport",
    "decay_check",
    "IntegralReport",
    "integral_check",
]


@dataclass(frozen=True)
class JordanSpec:
    """Jordan data: ((lambda, size), ...) and an optional transform pair.

    When ``transform`` is given the represented matrix is
    T @ blockdiag(J_1, ..., J_k) @ T_inv; both T and T_inv must be supplied
    and multiply to the identity within 1e-10.
    """

    blocks: tuple[tuple[complex, int], ...]
    transform: np.ndarray | None = None
    transform_inv: np.ndarray | None = None

    def __post_init__(self):
        if not self.blocks:
            raise DomainError("at least one Jordan block is required")
        norm_blocks = []
        for lam, size in self.blocks:
            lam = complex(lam)
            if not (math.isfinite(lam.real) and math.isfinite(lam.imag)):
                raise DomainError("block eigenvalues must be finite")
            if size != int(size) or int(size) < 1:
                raise DomainError("block sizes must be positive integers")
            norm_blocks.append((lam, int(size)))
        object.__setattr__(self, "blocks", tuple(norm_blocks))
        if (self.transform is None) != (self.transform_inv is None):
            raise DomainError("give both transform and transform_inv or neither")
        if self.transform is not None:
            t = np.asarray(self.transform, dtype=complex)
            ti = np.asarray(self.transform_inv, dtype=complex)
            n = self.dimension
            if t.shape != (n, n) or ti.shape != (n, n):
                raise DomainError(
                    f"transform must be {n}x{n} to match the blocks")
            resid = np.abs(t @ ti - np.eye(n)).max()
            if resid > 1e-10:
                raise DomainError(
                    f"transform_inv is not an inverse of transform "
                    f"(max residual {resid:.2e})")
            object.__setattr__(self, "transform", t)
            object.__setattr__(self, "transform_inv", ti)

    @property
    def dimension(self) -> int:
        return sum(size for _, size in self.blocks)

    @classmethod
    def from_matrix(cls, a) -> "JordanSpec":
        """Eigendecompose a diagonalizable matrix into 1x1 blocks.

        Rejected when the eigenvector basis is ill-conditioned; defective
        or near-defective matrices need an explicit Jordan structure.
        """
        a = np.asarray(a, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DomainError("matrix must be square")
        w, v = np.linalg.eig(a)
        cond = np.linalg.cond(v)
        if not np.isfinite(cond) or cond > 1e8:
            raise DomainError(
                "eigenvector basis too ill-conditioned (cond "
                f"{cond:.2e}); supply an explicit Jordan structure")
        return cls(
            blocks=tuple((complex(lam), 1) for lam in w),
            transform=v,
            transform_inv=np.linalg.inv(v),
        )


def _coerce_spec(a) -> JordanSpec:
    return a if isinstance(a, JordanSpec) else JordanSpec.from_matrix(a)


@dataclass(frozen=True)
class SpectralReport:
    eigenvalues: tuple[complex, ...]
    sector_margin: float  # min over eigenvalues of |arg lambda| - alpha*pi/2
    satisfied: bool
    notes: tuple[str, ...] = ()


def spectral_condition(a, alpha: float) -> SpectralReport:
    """Check |arg lambda| > alpha*pi/2 and lambda != 0 for every eigenvalue."""
    if not (0.0 < alpha <= 1.0):
        raise DomainError("alpha must lie in (0, 1]")
    if isinstance(a, JordanSpec):
        eigs = [lam for lam, size in a.blocks for _ in range(size)]
    else:
        a = np.asarray(a, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DomainError("matrix must be square")
        eigs = [complex(w) for w in np.linalg.eigvals(a)]
    notes = []
    satisfied = True
    margin = math.inf
    for lam in eigs:
        if lam == 0:
            satisfied = False
            notes.append("zero eigenvalue violates the sector condition")
            continue
        margin = min(margin, abs(principal_arg(lam)) - alpha * math.pi / 2.0)
    if not math.isfinite(margin):
        margin = math.nan
    elif margin <= 0.0:
        satisfied = False
    return SpectralReport(tuple(eigs), margin, satisfied, tuple(notes))


def _entry_derivative(p: MLParams, lam: complex, t: float, l: int,
                      controls: QuadratureControls) -> complex:
    if p.alpha >= 1.0:
        return ml_series_deriv(p, lam, t, l).value
    res, _ = _deriv_value(p, lam, t, l, controls)
    return res.value


def ml_jordan_block(p: MLParams, lam: complex, size: int, t: float,
                    controls: QuadratureControls | None = None) -> np.ndarray:
    """E_{alpha,beta}(t^alpha J) for one Jordan block J = lambda I + N."""
    if size != int(size) or int(size) < 1:
        raise DomainError("block size must be a positive integer")
    if t < 0.0:
        raise DomainError("t must be nonnegative")
    size = int(size)
    lam = complex(lam)
    controls = controls or QuadratureControls()
    out = np.zeros((size, size), dtype=complex)
    if t == 0.0:
        np.fill_diagonal(out, complex(recip_gamma(p.beta)))
        return out
    for j in range(size):
        entry = _entry_derivative(p, lam, t, j, controls) / math.factorial(j)
        for r in range(size - j):
            out[r, r + j] = entry
    return out


def ml_matrix(p: MLParams, a, t: float,
              controls: QuadratureControls | None = None) -> np.ndarray:
    """E_{alpha,beta}(t^alpha A) for a JordanSpec or a diagonalizable ndarray."""
    spec = _coerce_spec(a)
    parts = [ml_jordan_block(p, lam, size, t, controls)
             for lam, size in spec.blocks]
    m = parts[0] if len(parts) == 1 else block_diag(*parts)
    if spec.transform is not None:
        cond = np.linalg.cond(spec.transform)
        if cond > 1e12:
            warnings.warn(
                f"transform condition number {cond:.2e}; matrix values may "
                "lose that many digits", stacklevel=2)
        m = spec.transform @ m @ spec.transform_inv
    return np.asarray(m, dtype=complex)


# --------------------------------------------------------------------------
# stability checks

@dataclass(frozen=True)
class DecayReport:
    spectral: SpectralReport
    t_grid: tuple[float, ...]
    norm2: tuple[float, ...]
    norm_inf: tuple[float, ...]
    strictly_decreasing: bool
    tail_slope: float
    final_norm2: float


def _exterior_contexts(alpha: float, spec: JordanSpec):
    return [sector_context(alpha, lam, side="exterior") for lam, _ in spec.blocks]


def decay_check(alpha: float, a, t_grid=None,
                controls: QuadratureControls | None = None) -> DecayReport:
    """Norm decay of E_alpha(t^alpha A) under the sector condition.

    Records 2- and inf-norms on a geometric grid, whether the 2-norm is
    strictly decreasing, and the fitted log-log slope over the last decade
    (the envelopes predict an eventual slope of -alpha).
    """
    spec = _coerce_spec(a)
    report = spectral_condition(spec, alpha)
    if not report.satisfied:
        raise SectorContextError(
            "hypothesis violated: every eigenvalue must be nonzero with "
            "|arg lambda| > alpha*pi/2")
    ctxs = _exterior_contexts(alpha, spec)
    if t_grid is None:
        t_start = 2.0 * max(ctx.t0 for ctx in ctxs)
        t_grid = np.geomspace(t_start, 1e4 * t_start, 28)
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 3 or np.any(np.diff(t_grid) <= 0.0):
        raise DomainError("t_grid must be increasing with at least 3 entries")
    p1 = MLParams(alpha, 1.0)
    controls = controls or QuadratureControls()
    norm2 = []
    norm_inf = []
    for t in t_grid:
        m = ml_matrix(p1, spec, float(t), controls)
        norm2.append(float(np.linalg.norm(m, 2)))
        norm_inf.append(float(np.linalg.norm(m, np.inf)))
    decreasing = bool(np.all(np.diff(norm2) < 0.0))
    tail = t_grid >= t_grid[-1] / 10.0
    slope = float(np.polyfit(np.log(t_grid[tail]), np.log(np.array(norm2)[tail]), 1)[0])
    return DecayReport(
        spectral=report,
        t_grid=tuple(float(t) for t in t_grid),
        norm2=tuple(norm2),
        norm_inf=tuple(norm_inf),
        strictly_decreasing=decreasing,
        tail_slope=slope,
        final_norm2=norm2[-1],
    )


@dataclass(frozen=True)
class IntegralReport:
    spectral: SpectralReport
    t_max: float
    numeric: float
    numeric_err: float
    tail_bound: float
    total: float
    tail_fraction: float


def integral_check(alpha: float, a, t_max: float = 200.0,
                   controls: QuadratureControls | None = None) -> IntegralReport:
    """Finiteness certificate for the tau^(alpha-1)-weighted norm integral.

    The [0, t_max] part is integrated numerically after the substitution
    v = tau^alpha (which removes the endpoint singularity):
    (1/alpha) integral_0^{t_max^alpha} ||E_{alpha,alpha}(v A)|| dv.  The
    rest is covered by the closed-form envelope tail, valid once
    t_max exceeds every block threshold t0.
    """
    spec = _coerce_spec(a)
    report = spectral_condition(spec, alpha)
    if not report.satisfied:
        raise SectorContextError(
            "hypothesis violated: every eigenvalue must be nonzero with "
            "|arg lambda| > alpha*pi/2")
    ctxs = _exterior_contexts(alpha, spec)
    t0_max = max(ctx.t0 for ctx in ctxs)
    if t_max <= t0_max:
        raise DomainError(
            f"t_max must exceed the envelope threshold t0 = {t0_max:.6g}")
    controls = controls or QuadratureControls(rel_tol=1e-8, abs_tol=1e-12,
                                              max_panels=512)
    paa = MLParams(alpha, complex(alpha))
    inv_alpha = 1.0 / alpha

    def f(vs: np.ndarray) -> np.ndarray:
        out = np.empty(len(vs), dtype=complex)
        for i, v in enumerate(vs):
            vr = float(np.real(v))
            m = ml_matrix(paa, spec, vr ** inv_alpha, controls)
            out[i] = np.linalg.norm(m, 2)
        return out

    num, num_err = integrate_path(f, [line_segment(0.0, t_max ** alpha)], controls)
    numeric = num.real / alpha
    numeric_err = num_err / alpha

    tail_worst = 0.0
    for ctx, (lam, size) in zip(ctxs, spec.blocks):
        consts = lemma4_constants(ctx, size - 1, controls)
        block_tail = sum(
            consts.m_hat_l[l] / math.factorial(l) for l in range(size)
        ) / (alpha * t_max ** alpha)
        tail_worst = max(tail_worst, block_tail)
    if spec.transform is not None:
        tail_worst *= float(np.linalg.cond(spec.transform))
    total = numeric + tail_worst
    return IntegralReport(
        spectral=report,
        t_max=float(t_max),
        numeric=numeric,
        numeric_err=numeric_err,
        tail_bound=tail_worst,
        total=total,
        tail_fraction=tail_worst / total if total > 0.0 else math.nan,
    )
