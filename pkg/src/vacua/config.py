"""Exact energies of explicit dipole configurations.

The vacuum energy of N dipoles is the log-determinant of the 3N x 3N
coupled-dipole matrix, integrated over imaginary frequency.  Each dipole's
coincident self-interaction is folded into its free-space polarizability
alpha = alpha0/(1 + alpha0 phi0), so the remaining matrix is
1 + k^2 alpha G_off with vanishing diagonal blocks.  On the imaginary axis
that matrix is real and symmetric.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (DivergentRenormalization, InvalidParameter, MatrixSingular, PackingTooDense)
from .lamb import TWO_PI, EnergyResult, free_space_lamb_energy, free_space_lamb_shift
from .params import DipoleSpecies, MediumSpec
from .polarizability import alpha_free_iu
from .quadrature import DEFAULT_SPEC, IntegralSpec, integrate_semi_infinite, semi_infinite_gauss

N_MAX = 512
MAX_PACKING = 0.3
FOUR_PI = 4.0 * math.pi


@dataclass
class DipoleConfiguration:
    """N identical dipoles at fixed positions (units of c/omega0).

    ``box`` is the edge of a periodic cube; pair separations then use the
    minimum image.  With ``box=None`` the boundaries are open.
    """

    positions: np.ndarray
    species: DipoleSpecies
    xi: float
    box: Optional[float] = None
    n_max: int = N_MAX
    _sep: tuple = field(init=False, repr=False, default=None)

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.size == 0:
            pos = pos.reshape(0, 3)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise InvalidParameter("positions", "expected an (N, 3) array")
        if not np.all(np.isfinite(pos)):
            raise InvalidParameter("positions", "positions must be finite")
        if len(pos) > self.n_max:
            raise InvalidParameter("positions", f"N={len(pos)} exceeds N_max={self.n_max}")
        if not (math.isfinite(self.xi) and self.xi > 0):
            raise InvalidParameter("xi", "must be positive")
        if self.box is not None and not (self.box > 0 and self.box >= 2 * self.xi):
            raise InvalidParameter("box", "periodic box must exceed twice the exclusion length")
        self.positions = pos
        if self.n > 1:
            r = self.separations()[1]
            iu = np.triu_indices(self.n, 1)
            dmin = float(r[iu].min())
            if dmin < self.xi * (1 - 1e-12):
                raise InvalidParameter("positions", f"pair closer than xi ({dmin:.6g} < {self.xi:.6g})")

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def volume(self) -> float:
        """Normalization volume: the periodic cube, or 1 for open boundaries."""
        return self.box**3 if self.box is not None else 1.0

    def separations(self):
        """Displacements R_i - R_j (minimum image), distances, unit vectors."""
        if self._sep is None:
            d = self.positions[:, None, :] - self.positions[None, :, :]
            if self.box is not None:
                d = d - self.box * np.round(d / self.box)
            r = np.linalg.norm(d, axis=-1)
            rs = np.where(r > 0, r, 1.0)
            self._sep = (d, r, d / rs[..., None])
        return self._sep

    @property
    def min_distance(self) -> float:
        if self.n < 2:
            return math.inf
        r = self.separations()[1]
        return float(r[np.triu_indices(self.n, 1)].min())

    def moved(self, shift=(0.0, 0.0, 0.0), rotation=None) -> "DipoleConfiguration":
        pos = self.positions if rotation is None else self.positions @ np.asarray(rotation).T
        return DipoleConfiguration(pos + np.asarray(shift, float), self.species, self.xi, self.box, self.n_max)


# --- matrices -------------------------------------------------------------------

def _alpha(species: DipoleSpecies, u, dmin: float):
    """Free-space alpha(iu), set to zero above half the runaway frequency."""
    g = species.g
    u_top = 0.5 / g
    if math.isfinite(dmin) and 2 * dmin * u_top < 40:
        raise DivergentRenormalization(
            f"runaway pole of alpha is not screened by the pair decay (d_min/g = {dmin / g:.3g} < 40)")
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    ok = u < u_top
    out[ok] = alpha_free_iu(u[ok], g)
    return out


def propagator_blocks(config: DipoleConfiguration, u: float) -> np.ndarray:
    """k^2 G(R_i - R_j, k = iu) for i != j as a real 3N x 3N matrix; zero diagonal blocks."""
    n = config.n
    if u <= 0:
        raise InvalidParameter("u", "imaginary frequency must be positive")
    _, r, rhat = config.separations()
    off = ~np.eye(n, dtype=bool)
    rs = np.where(off, r, 1.0)
    x = u * rs
    pre = -np.exp(-x) / (FOUR_PI * rs)
    P = pre * (1 + 1 / x + 1 / x**2)
    Q = -2 * pre * (1 / x + 1 / x**2)
    rr = rhat[..., :, None] * rhat[..., None, :]
    blocks = (-u * u) * (P[..., None, None] * (np.eye(3) - rr) + Q[..., None, None] * rr)
    blocks[~off] = 0.0
    return blocks.transpose(0, 2, 1, 3).reshape(3 * n, 3 * n)


def normalized_matrix(config: DipoleConfiguration, u: float) -> np.ndarray:
    """A = alpha(iu) k^2 G_off; the coupled-dipole matrix is 1 + A."""
    a = float(_alpha(config.species, u, config.min_distance))
    return a * propagator_blocks(config, u)


def _log1p_minus(lam):
    """log(1 + lam) - lam without cancellation for small lam."""
    lam = np.asarray(lam, dtype=float)
    small = np.abs(lam) < 1e-3
    out = np.empty_like(lam)
    ls = lam[small]
    acc = np.zeros_like(ls)
    for k in range(8, 1, -1):
        acc = acc * ls + (-1.0) ** (k + 1) / k
    out[small] = acc * ls * ls
    out[~small] = np.log1p(lam[~small]) - lam[~small]
    return out


def logdet_normalized(A: np.ndarray) -> float:
    """ln det(1 + A) for real symmetric A with zero trace."""
    if A.size == 0:
        return 0.0
    lam = np.linalg.eigvalsh(0.5 * (A + A.T))
    if np.any(lam <= -1.0):
        raise MatrixSingular(f"1 + A has a non-positive eigenvalue (min {lam.min() + 1:.3e})")
    return float(np.sum(_log1p_minus(lam)))


def _energy_integrand(config):
    def f(u):
        if u <= 0:
            return 0.0
        return logdet_normalized(normalized_matrix(config, u))
    return f


def _u_scale(config):
    d = config.min_distance
    return min(1.0, 1.0 / d), [1.0, 1.0 / d, 10.0 / d]


def _tight(spec: IntegralSpec) -> IntegralSpec:
    # energies scale like g^2, so only the relative tolerance is meaningful
    return IntegralSpec(spec.rel_tol, 1e-300, spec.max_subdivisions, spec.tail_map)


# --- energies -------------------------------------------------------------------

def config_vacuum_energy(config: DipoleConfiguration, spec: IntegralSpec = DEFAULT_SPEC) -> EnergyResult:
    """Vacuum energy per volume of one configuration.

    ``free`` is N times the single-dipole Lamb energy (omitted when the
    species carries no cutoff); ``interaction`` is the u-integral of
    ln det(1 + A) over 2 pi V.
    """
    n, vol = config.n, config.volume
    parts, err = {}, 0.0
    prov = {"route": "logdet", "n": n, "volume": vol, "periodic": config.box is not None}
    if n and config.species.cutoff is not None:
        fr = free_space_lamb_energy(n / vol, config.species, spec=spec)
        parts["free"] = fr.value
        err += fr.error_estimate
    else:
        prov["free"] = "omitted (no cutoff)" if n else "empty"
    if n > 1:
        scale, br = _u_scale(config)
        res = integrate_semi_infinite(_energy_integrand(config), 0.0, _tight(spec), scale,
                                      is_complex=False, breakpoints=br)
        parts["interaction"] = float(np.real(res.value)) / (TWO_PI * vol)
        err += res.error / (TWO_PI * vol)
    else:
        parts["interaction"] = 0.0
    return EnergyResult.from_parts(parts, err, provenance=prov, units="density", density=n / vol)


def pair_energy_leading(config: DipoleConfiguration, spec: IntegralSpec = DEFAULT_SPEC) -> float:
    """Two-scattering term -(1/2) Tr A^2 integrated directly (leading order in alpha0)."""
    if config.n < 2:
        return 0.0

    def f(u):
        if u <= 0:
            return 0.0
        A = normalized_matrix(config, u)
        return -0.5 * float(np.sum(A * A.T))

    scale, br = _u_scale(config)
    res = integrate_semi_infinite(f, 0.0, _tight(spec), scale, is_complex=False, breakpoints=br)
    return float(np.real(res.value)) / (TWO_PI * config.volume)


def config_lamb_shift(config: DipoleConfiguration, i: int, spec: IntegralSpec = DEFAULT_SPEC) -> EnergyResult:
    """Lamb shift of dipole i inside the configuration.

    With pi = alpha (1 + A)^-1 the shift integrand is
    Tr[k^2 G' pi]_ii - alpha phi0, which reduces to
    -(alpha phi0/3) Tr Y_ii - Tr (A Y)_ii with Y = (1 + A)^-1 A; this form
    keeps the interaction part free of cancellation.
    """
    n = config.n
    if not (0 <= i < n):
        raise InvalidParameter("i", f"dipole index must lie in [0, {n})")
    parts, err = {}, 0.0
    prov = {"route": "inverse", "n": n, "index": i}
    if config.species.cutoff is not None:
        fr = free_space_lamb_shift(config.species, spec=spec)
        parts["free"] = fr.value
        err += fr.error_estimate
    else:
        prov["free"] = "omitted (no cutoff)"
    if n > 1:
        sl = slice(3 * i, 3 * i + 3)
        dmin = config.min_distance

        def f(u):
            if u <= 0:
                return 0.0
            a = float(_alpha(config.species, u, dmin))
            A = a * propagator_blocks(config, u)
            M = np.eye(3 * n) + A
            try:
                Y = np.linalg.solve(M, A)
            except np.linalg.LinAlgError as exc:
                raise MatrixSingular(str(exc)) from None
            if np.linalg.eigvalsh(0.5 * (A + A.T)).min() <= -1.0:
                raise MatrixSingular("1 + A has a non-positive eigenvalue")
            phi0 = -u**3 / TWO_PI
            return -(a * phi0 / 3) * np.trace(Y[sl, sl]) - float(np.sum(A[sl, :] * Y[:, sl].T))

        scale, br = _u_scale(config)
        res = integrate_semi_infinite(f, 0.0, _tight(spec), scale, is_complex=False, breakpoints=br)
        parts["interaction"] = float(np.real(res.value)) / TWO_PI
        err += res.error / TWO_PI
    else:
        parts["interaction"] = 0.0
    return EnergyResult.from_parts(parts, err, provenance=prov, units="shift")


# --- sampling -------------------------------------------------------------------

def packing_fraction(rho_bar: float) -> float:
    """Volume fraction of spheres of diameter xi at packing rho xi^3."""
    return math.pi * rho_bar / 6.0


def sample_hard_sphere(n: int, rho_bar: float, xi: float, seed=None, species: Optional[DipoleSpecies] = None,
                       max_attempts: int = 10000) -> DipoleConfiguration:
    """Random sequential addition of n spheres of diameter xi in a periodic cube of volume n/rho."""
    if n < 0 or int(n) != n:
        raise InvalidParameter("n", "must be a non-negative integer")
    if not (rho_bar > 0 and xi > 0):
        raise InvalidParameter("rho_bar", "rho_bar and xi must be positive")
    eta = packing_fraction(rho_bar)
    if eta > MAX_PACKING:
        raise PackingTooDense(f"packing fraction {eta:.3f} exceeds {MAX_PACKING}")
    species = species or DipoleSpecies(1e-6)
    rng = np.random.default_rng(seed)
    n = int(n)
    box = (n * xi**3 / rho_bar) ** (1 / 3) if n else 1.0
    box = max(box, 2 * xi)
    pos = np.empty((n, 3))
    xi2 = xi * xi
    for k in range(n):
        for _ in range(max_attempts):
            trial = rng.uniform(0.0, box, 3)
            d = pos[:k] - trial
            d -= box * np.round(d / box)
            if k == 0 or np.min(np.einsum("ij,ij->i", d, d)) >= xi2:
                pos[k] = trial
                break
        else:
            raise PackingTooDense(f"could not place sphere {k + 1} of {n} after {max_attempts} attempts")
    return DipoleConfiguration(pos, species, xi, box=box)


# --- ensembles ------------------------------------------------------------------

def max_threads() -> int:
    try:
        return max(1, int(os.environ.get("VACUA_THREADS", "1")))
    except ValueError:
        raise InvalidParameter("VACUA_THREADS", "must be an integer") from None


@dataclass
class EnsembleResult:
    mean: EnergyResult
    stderr: float
    ln_avg_vs_avg_ln: tuple
    samples: np.ndarray
    ineq_error: float = 0.0

    def __getitem__(self, key):
        return getattr(self, key)


def _sample_task(args):
    k, ss, n, medium, species, u, periodic = args
    cfg = sample_hard_sphere(n, medium.rho_bar, medium.xi, ss, species)
    if not periodic:
        cfg = DipoleConfiguration(cfg.positions, species, cfg.xi, box=None)
    mats = np.array([normalized_matrix(cfg, x) for x in u])
    ld = np.array([logdet_normalized(A) for A in mats])
    return ld, mats


def ensemble_average(n: int, medium: MediumSpec, species: DipoleSpecies, n_samples: int, seed=0,
                     n_u: int = 64, periodic: bool = True, threads: Optional[int] = None) -> EnsembleResult:
    """Monte Carlo mean of the interaction energy density over RSA configurations.

    All samples share one mapped Gauss grid in u.  The pair
    ``ln_avg_vs_avg_ln`` holds the sample mean of the log-determinant energy
    and the energy of the log-determinant of the sample-averaged matrix.
    The normalization volume is always the sampling cube n/rho.
    """
    if n_samples < 16:
        raise InvalidParameter("n_samples", "need at least 16 samples for a standard error")
    if n < 2:
        raise InvalidParameter("n", "need at least two dipoles")
    xi = medium.xi
    u, w = semi_infinite_gauss(n_u, scale=1.0 / xi)
    _, w_half = semi_infinite_gauss(n_u // 2, scale=1.0 / xi)
    u_half = semi_infinite_gauss(n_u // 2, scale=1.0 / xi)[0]
    vol = n / medium.rho
    seqs = np.random.SeedSequence(seed).spawn(n_samples)
    tasks = [(k, s, n, medium, species, u, periodic) for k, s in enumerate(seqs)]
    nt = threads or max_threads()
    lds = np.empty((n_samples, n_u))
    mat_sum = np.zeros((n_u, 3 * n, 3 * n))
    with ThreadPoolExecutor(nt) as ex:
        # results arrive in sample order, so the reduction is deterministic
        for k, (ld, mats) in enumerate(ex.map(_sample_task, tasks)):
            lds[k] = ld
            mat_sum += mats
    energies = lds @ w / (TWO_PI * vol)
    mean = float(np.mean(energies))
    stderr = float(np.std(energies, ddof=1) / math.sqrt(n_samples))
    ld_of_avg = np.array([logdet_normalized(M / n_samples) for M in mat_sum])
    ln_avg = float(ld_of_avg @ w) / (TWO_PI * vol)
    avg_ln = mean
    # quadrature error of the gap from the interpolated half-order rule
    gap_u = lds.mean(axis=0) - ld_of_avg
    gap_half = float(np.interp(u_half, u, gap_u) @ w_half) / (TWO_PI * vol)
    gap_full = avg_ln - ln_avg
    ineq_err = abs(gap_full - gap_half)
    res = EnergyResult.from_parts(
        {"interaction": mean}, stderr,
        provenance={"route": "monte_carlo", "n": n, "n_samples": n_samples, "seed": seed, "n_u": n_u,
                    "periodic": periodic, "volume": vol, "threads": nt},
        units="density", density=medium.rho)
    return EnsembleResult(res, stderr, (avg_ln, ln_avg), energies, ineq_err)


# --- position tables --------------------------------------------------------------

def save_positions(config: DipoleConfiguration, path) -> None:
    header = f"xi={config.xi!r} n={config.n}"
    if config.box is not None:
        header += f" box={config.box!r}"
    np.savetxt(path, config.positions.reshape(-1, 3), header=header, fmt="%.17g")


def load_positions(path, species: DipoleSpecies) -> DipoleConfiguration:
    with open(path) as fh:
        first = fh.readline()
    if not first.startswith("#"):
        raise InvalidParameter("positions", "missing '# xi=<value> n=<N>' header")
    meta = dict(tok.split("=", 1) for tok in first[1:].split() if "=" in tok)
    try:
        xi, n = float(meta["xi"]), int(meta["n"])
    except (KeyError, ValueError):
        raise InvalidParameter("positions", "header must define xi and n") from None
    pos = np.loadtxt(path, ndmin=2) if n else np.empty((0, 3))
    if pos.shape != (n, 3):
        raise InvalidParameter("positions", f"header says n={n} but table has shape {pos.shape}")
    box = float(meta["box"]) if "box" in meta else None
    return DipoleConfiguration(pos, species, xi, box=box)
