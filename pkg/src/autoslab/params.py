"""Model parameters, hyperparameters, and the map to unconstrained space.

Engines work on a real vector zeta; the blocks are, in order:
probit-scaled eta, beta (identity), log tau2, probit w, then for
multi-donor studies U (identity), log sigma2, probit-scaled rho, and
finally gamma (identity) when the missingness model is fitted. eta and w
can be frozen (dropped from zeta), which is how the naive no-spatial
comparator and slab-only fits are expressed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import ConfigError, InputError

logger = logging.getLogger(__name__)

_LOG_2PI = float(np.log(2.0 * np.pi))
_PROBIT_CLAMP = 8.0  # probit image of support boundaries
_EXP_CAP = 700.0  # exp() overflow guard for log-scale coordinates

__all__ = [
    "Hyperparams",
    "ModelParams",
    "ParamLayout",
    "transform",
    "untransform",
    "untransform_matrix",
    "log_abs_det_jacobian",
    "infer_layout",
]


@dataclass(frozen=True)
class Hyperparams:
    """Prior constants. Defaults follow the simulation settings."""

    c1: float = 8.0  # eta ~ Uniform(0, c1)
    v0: float = 1e-6  # spike variance factor
    b1: float = 5.0  # Gamma shape on tau_k^-2
    b2: float = 50.0  # Gamma rate on tau_k^-2
    b3: float = 5.0  # Gamma shape on sigma_c^-2
    b4: float = 50.0  # Gamma rate on sigma_c^-2
    b5: float = 0.0  # rho ~ Uniform(b5, b6)
    b6: float = 1.0
    delta: float = 1.0  # neighbor radius
    gamma_sd: float = 10.0  # Normal prior sd on each gamma coordinate

    def __post_init__(self):
        if not self.c1 > 0:
            raise ConfigError("c1 must be positive")
        if not 0 < self.v0 < 1:
            raise ConfigError("v0 must lie in (0, 1)")
        for name in ("b1", "b2", "b3", "b4"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if not self.b5 < self.b6:
            raise ConfigError("rho bounds must satisfy b5 < b6")
        if not self.delta > 0:
            raise ConfigError("neighbor radius delta must be positive")
        if not self.gamma_sd > 0:
            raise ConfigError("gamma_sd must be positive")


@dataclass
class ModelParams:
    """One point in parameter space. Optional blocks are None when absent."""

    eta: float
    beta: np.ndarray
    tau2: np.ndarray
    w: float
    u: np.ndarray | None = None  # (C, G) random effects
    sigma2: np.ndarray | None = None  # (C,)
    rho: float | None = None
    gamma: np.ndarray | None = None  # (gamma0, gamma1, gamma2)

    def __post_init__(self):
        self.beta = np.atleast_1d(np.asarray(self.beta, dtype=float))
        self.tau2 = np.atleast_1d(np.asarray(self.tau2, dtype=float))
        if self.beta.shape != self.tau2.shape:
            raise InputError("beta and tau2 must have equal length")
        if self.u is not None:
            self.u = np.atleast_2d(np.asarray(self.u, dtype=float))
        if self.sigma2 is not None:
            self.sigma2 = np.atleast_1d(np.asarray(self.sigma2, dtype=float))
        if self.gamma is not None:
            self.gamma = np.asarray(self.gamma, dtype=float)
            if self.gamma.shape != (3,):
                raise InputError("gamma must have exactly 3 coordinates")

    @property
    def d(self) -> int:
        return self.beta.shape[0]


@dataclass(frozen=True)
class ParamLayout:
    """Which blocks are free, and where each lands in the zeta vector."""

    d: int
    fixed_eta: float | None = None  # None: eta is sampled
    fixed_w: float | None = None  # None: w is sampled
    n_donors: int = 0  # C > 0 switches the multi-donor blocks on
    n_slices: int = 0  # G
    with_gamma: bool = False

    dim: int = field(init=False)

    def __post_init__(self):
        if self.d < 1:
            raise ConfigError("layout needs at least one covariate")
        if (self.n_donors > 0) != (self.n_slices > 0):
            raise ConfigError("n_donors and n_slices must be set together")
        pos = 0
        idx: dict[str, object] = {}
        if self.fixed_eta is None:
            idx["eta"] = pos
            pos += 1
        idx["beta"] = slice(pos, pos + self.d)
        pos += self.d
        idx["tau2"] = slice(pos, pos + self.d)
        pos += self.d
        if self.fixed_w is None:
            idx["w"] = pos
            pos += 1
        if self.multislice:
            cg = self.n_donors * self.n_slices
            idx["u"] = slice(pos, pos + cg)
            pos += cg
            idx["sigma2"] = slice(pos, pos + self.n_donors)
            pos += self.n_donors
            idx["rho"] = pos
            pos += 1
        if self.with_gamma:
            idx["gamma"] = slice(pos, pos + 3)
            pos += 3
        object.__setattr__(self, "_index", idx)
        object.__setattr__(self, "dim", pos)

    @property
    def multislice(self) -> bool:
        return self.n_donors > 0

    def index(self, block: str):
        """Position of a block in zeta (int for scalars, slice for vectors)."""
        try:
            return self._index[block]
        except KeyError:
            raise KeyError(f"block {block!r} not present in this layout") from None

    def has(self, block: str) -> bool:
        return block in self._index

    def param_names(self, gene_names: list[str] | None = None) -> list[str]:
        """Column names for draw matrices, aligned with zeta block order."""
        if gene_names is not None and len(gene_names) != self.d:
            raise InputError("gene_names length must match d")
        beta_tags = gene_names or [str(k + 1) for k in range(self.d)]
        names: list[str] = []
        if self.fixed_eta is None:
            names.append("eta")
        names += [f"beta_{t}" for t in beta_tags]
        names += [f"tau2_{t}" for t in beta_tags]
        if self.fixed_w is None:
            names.append("w")
        if self.multislice:
            for c in range(self.n_donors):
                names += [f"u_{c + 1}_{g + 1}" for g in range(self.n_slices)]
            names += [f"sigma2_{c + 1}" for c in range(self.n_donors)]
            names.append("rho")
        if self.with_gamma:
            names += ["gamma_0", "gamma_1", "gamma_2"]
        return names


def infer_layout(params: ModelParams) -> ParamLayout:
    """Layout with every block present in params treated as free."""
    n_donors = params.u.shape[0] if params.u is not None else 0
    n_slices = params.u.shape[1] if params.u is not None else 0
    return ParamLayout(
        d=params.d,
        n_donors=n_donors,
        n_slices=n_slices,
        with_gamma=params.gamma is not None,
    )


def _probit(value: float, lo: float, hi: float, what: str) -> float:
    z = ndtri((value - lo) / (hi - lo))
    if not np.isfinite(z):
        clamped = _PROBIT_CLAMP if z > 0 else -_PROBIT_CLAMP
        logger.warning(
            "%s=%g sits on the boundary of (%g, %g); clamping probit value to %g",
            what, value, lo, hi, clamped,
        )
        return clamped
    return float(z)


def transform(params: ModelParams, hyper: Hyperparams, layout: ParamLayout | None = None) -> np.ndarray:
    """theta -> zeta. Boundary values of bounded parameters clamp to +-8 probit units."""
    if layout is None:
        layout = infer_layout(params)
    zeta = np.empty(layout.dim)
    if layout.has("eta"):
        if not 0.0 <= params.eta <= hyper.c1:
            raise InputError(f"eta={params.eta} outside [0, c1={hyper.c1}]")
        zeta[layout.index("eta")] = _probit(params.eta, 0.0, hyper.c1, "eta")
    if np.any(params.tau2 <= 0):
        raise InputError("tau2 must be positive")
    zeta[layout.index("beta")] = params.beta
    zeta[layout.index("tau2")] = np.log(params.tau2)
    if layout.has("w"):
        if not 0.0 <= params.w <= 1.0:
            raise InputError(f"w={params.w} outside [0, 1]")
        zeta[layout.index("w")] = _probit(params.w, 0.0, 1.0, "w")
    if layout.multislice:
        if params.u is None or params.sigma2 is None or params.rho is None:
            raise InputError("layout expects multi-donor blocks (u, sigma2, rho)")
        if params.u.shape != (layout.n_donors, layout.n_slices):
            raise InputError("u has the wrong shape for this layout")
        if np.any(params.sigma2 <= 0):
            raise InputError("sigma2 must be positive")
        if not hyper.b5 <= params.rho <= hyper.b6:
            raise InputError(f"rho={params.rho} outside [{hyper.b5}, {hyper.b6}]")
        zeta[layout.index("u")] = params.u.ravel()
        zeta[layout.index("sigma2")] = np.log(params.sigma2)
        zeta[layout.index("rho")] = _probit(params.rho, hyper.b5, hyper.b6, "rho")
    if layout.with_gamma:
        if params.gamma is None:
            raise InputError("layout expects gamma")
        zeta[layout.index("gamma")] = params.gamma
    return zeta


def untransform(zeta: np.ndarray, hyper: Hyperparams, layout: ParamLayout) -> ModelParams:
    """zeta -> theta; always lands inside the support."""
    zeta = np.asarray(zeta, dtype=float)
    if zeta.shape != (layout.dim,):
        raise InputError(f"zeta must have shape ({layout.dim},), got {zeta.shape}")
    eta = hyper.c1 * float(ndtr(zeta[layout.index("eta")])) if layout.has("eta") else float(layout.fixed_eta)
    beta = zeta[layout.index("beta")].copy()
    tau2 = np.exp(np.minimum(zeta[layout.index("tau2")], _EXP_CAP))
    w = float(ndtr(zeta[layout.index("w")])) if layout.has("w") else float(layout.fixed_w)
    u = sigma2 = rho = gamma = None
    if layout.multislice:
        u = zeta[layout.index("u")].reshape(layout.n_donors, layout.n_slices).copy()
        sigma2 = np.exp(np.minimum(zeta[layout.index("sigma2")], _EXP_CAP))
        rho = hyper.b5 + (hyper.b6 - hyper.b5) * float(ndtr(zeta[layout.index("rho")]))
    if layout.with_gamma:
        gamma = zeta[layout.index("gamma")].copy()
    return ModelParams(eta=eta, beta=beta, tau2=tau2, w=w, u=u, sigma2=sigma2, rho=rho, gamma=gamma)


def untransform_matrix(zetas: np.ndarray, hyper: Hyperparams, layout: ParamLayout) -> np.ndarray:
    """Map an (S, dim) matrix of zeta draws to theta coordinates, columnwise."""
    zetas = np.atleast_2d(np.asarray(zetas, dtype=float))
    if zetas.shape[1] != layout.dim:
        raise InputError(f"draw matrix must have {layout.dim} columns")
    out = zetas.copy()
    if layout.has("eta"):
        i = layout.index("eta")
        out[:, i] = hyper.c1 * ndtr(zetas[:, i])
    sl = layout.index("tau2")
    out[:, sl] = np.exp(np.minimum(zetas[:, sl], _EXP_CAP))
    if layout.has("w"):
        i = layout.index("w")
        out[:, i] = ndtr(zetas[:, i])
    if layout.multislice:
        sl = layout.index("sigma2")
        out[:, sl] = np.exp(np.minimum(zetas[:, sl], _EXP_CAP))
        i = layout.index("rho")
        out[:, i] = hyper.b5 + (hyper.b6 - hyper.b5) * ndtr(zetas[:, i])
    return out


def _log_normal_pdf(z):
    return -0.5 * z * z - 0.5 * _LOG_2PI


def log_abs_det_jacobian(zeta: np.ndarray, hyper: Hyperparams, layout: ParamLayout) -> float:
    """log|det d(theta)/d(zeta)| for the diagonal transform above."""
    zeta = np.asarray(zeta, dtype=float)
    total = 0.0
    if layout.has("eta"):
        z = zeta[layout.index("eta")]
        total += np.log(hyper.c1) + _log_normal_pdf(z)
    total += float(np.sum(np.minimum(zeta[layout.index("tau2")], _EXP_CAP)))
    if layout.has("w"):
        total += _log_normal_pdf(zeta[layout.index("w")])
    if layout.multislice:
        total += float(np.sum(np.minimum(zeta[layout.index("sigma2")], _EXP_CAP)))
        total += np.log(hyper.b6 - hyper.b5) + _log_normal_pdf(zeta[layout.index("rho")])
    return float(total)


def decode_zeta(zeta: np.ndarray, hyper: Hyperparams, layout: ParamLayout):
    """One-pass untransform with everything gradient assembly needs.

    Returns (params, dtheta_dzeta, logjac, dlogjac_dzeta): coordinate-wise
    derivative of the inverse transform, the log |Jacobian| and its own
    gradient in zeta. Used by log_joint/grad_log_joint so the transform is
    evaluated once per posterior call.
    """
    zeta = np.asarray(zeta, dtype=float)
    dtheta = np.ones(layout.dim)
    djac = np.zeros(layout.dim)
    logjac = 0.0
    if layout.has("eta"):
        i = layout.index("eta")
        z = zeta[i]
        dtheta[i] = hyper.c1 * np.exp(_log_normal_pdf(z))
        logjac += np.log(hyper.c1) + _log_normal_pdf(z)
        djac[i] = -z
    sl = layout.index("tau2")
    zt = np.minimum(zeta[sl], _EXP_CAP)
    dtheta[sl] = np.exp(zt)
    logjac += float(np.sum(zt))
    djac[sl] = 1.0
    if layout.has("w"):
        i = layout.index("w")
        z = zeta[i]
        dtheta[i] = np.exp(_log_normal_pdf(z))
        logjac += _log_normal_pdf(z)
        djac[i] = -z
    if layout.multislice:
        sl = layout.index("sigma2")
        zs = np.minimum(zeta[sl], _EXP_CAP)
        dtheta[sl] = np.exp(zs)
        logjac += float(np.sum(zs))
        djac[sl] = 1.0
        i = layout.index("rho")
        z = zeta[i]
        dtheta[i] = (hyper.b6 - hyper.b5) * np.exp(_log_normal_pdf(z))
        logjac += np.log(hyper.b6 - hyper.b5) + _log_normal_pdf(z)
        djac[i] = -z
    params = untransform(zeta, hyper, layout)
    return params, dtheta, float(logjac), djac


def with_block(layout: ParamLayout, **changes) -> ParamLayout:
    """Convenience wrapper over dataclasses.replace for layouts."""
    return replace(layout, **changes)
