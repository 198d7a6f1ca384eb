"""1D discontinuous-Galerkin solver for variable-coefficient advection.

Solves du/dt + d/dx(kappa(x,t) u) = rho(x,t) on a uniform mesh with
periodic or Dirichlet-inflow boundary conditions, upwind flux (kappa > 0),
and classical RK4 in time.  Elements carry Legendre modal coefficients
internally; filtering converts to the Bernstein element basis.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from math import ceil, comb
from typing import Callable

import numpy as np

from .exact import RatMatrix, RatPoly, invert_exact
from .spline import bernstein_poly


class UnstableBlowupError(RuntimeError):
    """Solution magnitude exploded; the CFL number is too large."""


@dataclass(frozen=True)
class Mesh:
    """Uniform mesh of n elements on [a, b]."""

    a: float
    b: float
    n: int

    def __post_init__(self):
        if self.n < 1 or not self.b > self.a:
            raise ValueError("need b > a and at least one element")

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n

    def breakpoints(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.n + 1)


@dataclass
class DGField:
    """Element-wise polynomial data: coeffs[i, l] for element i, basis l."""

    d: int
    mesh: Mesh
    coeffs: np.ndarray
    basis: str = "legendre"
    time: float = 0.0

    def copy(self) -> "DGField":
        return replace(self, coeffs=self.coeffs.copy())

    def evaluate(self, x) -> np.ndarray:
        """Field values at physical points (clamped into the domain)."""
        x = np.asarray(x, dtype=float)
        sigma = (x - self.mesh.a) / self.mesh.h
        e = np.clip(np.floor(sigma).astype(int), 0, self.mesh.n - 1)
        u = sigma - e
        vals = _basis_values(self.d, self.basis, u)
        out = np.einsum("pl,pl->p", self.coeffs[e.ravel()], vals.reshape(-1, self.d + 1))
        return out.reshape(x.shape) if x.shape else float(out[0])

    def cell_average_integral(self) -> float:
        """Exact integral of the field over the domain."""
        if self.basis == "legendre":
            return float(self.mesh.h * self.coeffs[:, 0].sum())
        return float(self.mesh.h * self.coeffs.mean(axis=1).sum())


def _basis_values(d: int, basis: str, u: np.ndarray) -> np.ndarray:
    """Values of all element basis functions at local coordinates u in [0,1]."""
    u = np.asarray(u, dtype=float)
    if basis == "legendre":
        return np.polynomial.legendre.legvander(2.0 * u - 1.0, d)
    if basis == "bernstein":
        cols = [comb(d, l) * u ** l * (1 - u) ** (d - l) for l in range(d + 1)]
        return np.stack(cols, axis=-1)
    raise ValueError(f"unknown basis {basis!r}")


@dataclass(frozen=True)
class TestProblem:
    """One instance of the canonical advection equation."""

    __test__ = False  # not a pytest class, despite the name

    name: str
    a: float
    b: float
    kappa: Callable[[np.ndarray, float], np.ndarray]
    rho: Callable[[np.ndarray, float], np.ndarray]
    u0: Callable[[np.ndarray], np.ndarray]
    bc: str  # "periodic" | "dirichlet"
    exact: Callable[[np.ndarray, float], np.ndarray]
    kappa_max: float

    def inflow(self, t: float) -> float:
        """Prescribed value at the inflow end (kappa > 0: the left end)."""
        return float(self.exact(np.array(self.a), t))


PROBLEMS = {
    "tp1": TestProblem(
        name="tp1", a=0.0, b=1.0,
        kappa=lambda x, t: np.ones_like(x),
        rho=lambda x, t: np.zeros_like(x),
        u0=lambda x: np.sin(2 * np.pi * x),
        bc="periodic",
        exact=lambda x, t: np.sin(2 * np.pi * (x - t)),
        kappa_max=1.0),
    "tp2": TestProblem(
        name="tp2", a=0.0, b=2 * np.pi,
        kappa=lambda x, t: np.ones_like(x),
        rho=lambda x, t: np.zeros_like(x),
        u0=np.sin,
        bc="dirichlet",
        exact=lambda x, t: np.sin(x - t),
        kappa_max=1.0),
    "tp3": TestProblem(
        name="tp3", a=0.0, b=2 * np.pi,
        kappa=lambda x, t: 2.0 + np.sin(x + t),
        rho=lambda x, t: np.cos(x - t) + np.sin(2 * x),
        u0=np.sin,
        bc="periodic",
        exact=lambda x, t: np.sin(x - t),
        kappa_max=3.0),
}


def get_problem(name: str) -> TestProblem:
    key = name.strip().lower()
    if key not in PROBLEMS:
        raise KeyError(f"unknown problem {name!r}; choose from {sorted(PROBLEMS)}")
    return PROBLEMS[key]


# ---------------------------------------------------------------------------
# projection


def l2_project(u0: Callable, mesh: Mesh, d: int) -> DGField:
    """Element-wise L2 projection onto Legendre modal coefficients.

    Gauss-Legendre with d+2 points per element: exact for polynomial data
    up to degree d (and beyond).
    """
    gx, gw = np.polynomial.legendre.leggauss(d + 2)
    mids = mesh.a + (np.arange(mesh.n) + 0.5) * mesh.h
    x = mids[:, None] + 0.5 * mesh.h * gx[None, :]
    p = np.polynomial.legendre.legvander(gx, d)
    vals = u0(x)
    scale = (2 * np.arange(d + 1) + 1) / 2.0
    coeffs = (vals * gw[None, :]) @ p * scale[None, :]
    return DGField(d=d, mesh=mesh, coeffs=coeffs, basis="legendre", time=0.0)


# ---------------------------------------------------------------------------
# semi-discrete operator


class _RhsWorkspace:
    """Precomputed quadrature and basis tables for one (mesh, d)."""

    def __init__(self, mesh: Mesh, d: int):
        self.mesh = mesh
        self.d = d
        q = max(2 * d + 2, d + 4)
        gx, gw = np.polynomial.legendre.leggauss(q)
        self.gw = gw
        mids = mesh.a + (np.arange(mesh.n) + 0.5) * mesh.h
        self.xq = mids[:, None] + 0.5 * mesh.h * gx[None, :]
        self.p = np.polynomial.legendre.legvander(gx, d)
        pd = np.zeros_like(self.p)
        for n in range(1, d + 1):
            c = np.zeros(n + 1)
            c[n] = 1.0
            pd[:, n] = np.polynomial.legendre.legval(gx, np.polynomial.legendre.legder(c))
        self.pd = pd  # dP_n/dxi at quad nodes
        self.par = (-1.0) ** np.arange(d + 1)  # P_n(-1)
        self.faces = mesh.breakpoints()
        self.mass_inv = (2 * np.arange(d + 1) + 1) / mesh.h


def dg_rhs(field: DGField, t: float, problem: TestProblem,
           workspace: _RhsWorkspace | None = None) -> np.ndarray:
    """Time derivative of the Legendre modal coefficients (weak form).

    Volume term integrates kappa*u against test-function derivatives;
    interfaces use the upwind flux kappa(x_f, t) * u^- (trace from the
    left, valid for kappa > 0).  Dirichlet inflow takes the prescribed
    boundary value; periodic wraps the last trace around.
    """
    ws = workspace or _RhsWorkspace(field.mesh, field.d)
    c = field.coeffs
    u_q = c @ ws.p.T
    kap = problem.kappa(ws.xq, t)
    vol = (kap * u_q * ws.gw[None, :]) @ ws.pd  # dxi/dx and h/2 cancel
    src = (problem.rho(ws.xq, t) * ws.gw[None, :]) @ ws.p * (ws.mesh.h / 2.0)
    u_right = c.sum(axis=1)  # P_n(1) = 1
    kap_faces = problem.kappa(ws.faces, t)
    flux_right = kap_faces[1:] * u_right
    flux_left = np.empty_like(flux_right)
    flux_left[1:] = flux_right[:-1]
    if problem.bc == "periodic":
        flux_left[0] = flux_right[-1]
    else:
        flux_left[0] = kap_faces[0] * problem.inflow(t)
    rhs = vol - flux_right[:, None] + flux_left[:, None] * ws.par[None, :] + src
    return rhs * ws.mass_inv[None, :]


# ---------------------------------------------------------------------------
# time stepping


def default_cfl(d: int) -> float:
    return 0.1 / (2 * d + 1)


def advance(field: DGField, problem: TestProblem, t_end: float,
            cfl: float | None = None) -> DGField:
    """March the field to t_end with classical RK4 (integer step count)."""
    if t_end < field.time - 1e-14:
        raise ValueError("cannot integrate backwards")
    span = t_end - field.time
    out = field.copy()
    if span <= 0:
        out.time = t_end
        return out
    c = cfl if cfl is not None else default_cfl(field.d)
    dt_max = c * field.mesh.h / problem.kappa_max
    steps = max(1, ceil(span / dt_max))
    dt = span / steps
    ws = _RhsWorkspace(field.mesh, field.d)
    u = out.coeffs
    t = field.time
    for step in range(steps):
        k1 = dg_rhs(DGField(field.d, field.mesh, u, "legendre", t), t, problem, ws)
        k2 = dg_rhs(DGField(field.d, field.mesh, u + 0.5 * dt * k1, "legendre", t), t + 0.5 * dt, problem, ws)
        k3 = dg_rhs(DGField(field.d, field.mesh, u + 0.5 * dt * k2, "legendre", t), t + 0.5 * dt, problem, ws)
        k4 = dg_rhs(DGField(field.d, field.mesh, u + dt * k3, "legendre", t), t + dt, problem, ws)
        u += (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t = field.time + (step + 1) * dt
        if step % 64 == 0 and np.abs(u).max() > 1e10:
            raise UnstableBlowupError("coefficients exceeded 1e10; reduce the CFL number")
    if np.abs(u).max() > 1e10:
        raise UnstableBlowupError("coefficients exceeded 1e10; reduce the CFL number")
    out.coeffs = u
    out.time = t_end
    return out


def dg_solve(problem: TestProblem, mesh: Mesh, d: int, t_end: float,
             cfl: float | None = None) -> DGField:
    """Project the initial condition and march to the final time."""
    if t_end < 0:
        raise ValueError("final time must be nonnegative")
    if not (np.isclose(mesh.a, problem.a) and np.isclose(mesh.b, problem.b)):
        raise ValueError("mesh does not match the problem domain")
    field = l2_project(problem.u0, mesh, d)
    return advance(field, problem, t_end, cfl)


# ---------------------------------------------------------------------------
# element-basis conversion


@lru_cache(maxsize=None)
def _legendre_shifted_polys(d: int) -> tuple:
    """P_n(2u - 1) as exact polynomials in u on [0, 1]."""
    polys = [RatPoly([1]), RatPoly([-1, 2])]
    for n in range(1, d):
        nxt = (RatPoly([-1, 2]) * polys[n] * Fraction(2 * n + 1) -
               polys[n - 1] * Fraction(n)) * Fraction(1, n + 1)
        polys.append(nxt)
    return tuple(polys[:d + 1])


@lru_cache(maxsize=None)
def _conversion_matrices(d: int) -> tuple[np.ndarray, np.ndarray]:
    """(legendre->bernstein, bernstein->legendre) exact, as float arrays."""
    # monomial coefficients of each basis, columns = basis functions
    leg = RatMatrix.from_rows([[_pad(p.coeffs, d + 1)[i] for p in _legendre_shifted_polys(d)]
                               for i in range(d + 1)])
    bern = RatMatrix.from_rows([[_pad(bernstein_poly(d, l).coeffs, d + 1)[i]
                                 for l in range(d + 1)]
                                for i in range(d + 1)])
    l2b = invert_exact(bern) @ leg
    b2l = invert_exact(leg) @ bern
    return np.array(l2b.to_float()), np.array(b2l.to_float())


def _pad(coeffs, n):
    return list(coeffs) + [Fraction(0)] * (n - len(coeffs))


def to_bernstein(field: DGField) -> DGField:
    """Change of element basis to Bernstein coefficients."""
    if field.basis == "bernstein":
        return field
    l2b, _ = _conversion_matrices(field.d)
    return DGField(d=field.d, mesh=field.mesh, coeffs=field.coeffs @ l2b.T,
                   basis="bernstein", time=field.time)


def to_legendre(field: DGField) -> DGField:
    """Change of element basis to Legendre modal coefficients."""
    if field.basis == "legendre":
        return field
    _, b2l = _conversion_matrices(field.d)
    return DGField(d=field.d, mesh=field.mesh, coeffs=field.coeffs @ b2l.T,
                   basis="legendre", time=field.time)


def bernstein_coeffs_of_poly(poly: RatPoly, mesh_a: Fraction, h: Fraction,
                             n: int, d: int) -> list[list[Fraction]]:
    """Exact Bernstein element coefficients of a global polynomial.

    The polynomial degree must not exceed d.  Used to build exact
    polynomial fields for reproduction checks.
    """
    if poly.degree > d:
        raise ValueError("polynomial degree exceeds the element degree")
    rows = []
    for i in range(n):
        local = poly.compose_affine(h, mesh_a + i * h)  # p(a + (i+u)h) in u
        mono = _pad(local.monomial_coeffs(), d + 1)
        row = []
        for l in range(d + 1):
            acc = Fraction(0)
            for p in range(l + 1):
                acc += mono[p] * Fraction(comb(l, p), comb(d, p))
            row.append(acc)
        rows.append(row)
    return rows
