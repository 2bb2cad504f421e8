"""Nonlinear discrete-time quantum walk on a one-dimensional open chain.

The walker is a qubit whose internal state (right/left handed, amplitudes
``a`` and ``b``) conditions the direction of motion on the lattice.  Each
time step applies a Kerr-like intensity-dependent phase to every amplitude
and then a coin mixing with a conditional shift, fused into a single
amplitude update::

    a'[n] = cos(theta) * T(a[n+1]) + sin(theta) * T(b[n+1])
    b'[n] = sin(theta) * T(a[n-1]) - cos(theta) * T(b[n-1])

with the intensity twist ``T(z) = exp(i * 2*pi*chi * |z|**2) * z``.
Out-of-range neighbours are taken as zero (open chain).  The update is
exactly norm preserving as long as no amplitude is pushed off the lattice
edge, which the default lattice sizing rules out by a light-cone argument.

Setting ``chi = 0`` recovers the linear walk; ``linear_oracle_step`` provides
an independent dense-matrix reference for that limit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

TWO_PI = 2.0 * math.pi
SQRT_HALF = math.sqrt(0.5)

#: tolerance on the state normalization invariant
NORM_TOL = 1e-10
#: amplitude magnitude above which a shift off the lattice edge is an error
EDGE_TOL = 1e-14
#: denormal guard: amplitudes with |z|^2 below this are flushed to exact zero
#: after each step.  Long trapped runs otherwise fill their wake with
#: subnormal floats, which cost 10-100x per operation on x86; the removed
#: probability is below 1e-300 per site and invisible at every tolerance
#: this package states.
FLUSH_P = 1e-300

__all__ = [
    "InitialState",
    "LightConeError",
    "SpinorField",
    "WalkParams",
    "coin_entries",
    "evolve",
    "linear_oracle_step",
    "new_state",
    "nonlinear_phase",
    "step",
    "walk_matrix",
]


class InitialState(enum.Enum):
    """Point-source initial conditions at the origin site."""

    #: (|R> + i|L>)/sqrt(2), a balanced circular superposition
    SYMMETRIC_CIRCULAR = "symmetric"
    #: |R> only
    RIGHT_ONLY = "right"


class LightConeError(RuntimeError):
    """Raised when a step would shift non-negligible amplitude off the chain."""


@dataclass(frozen=True)
class WalkParams:
    """Parameters of a single walk.

    Parameters
    ----------
    theta:
        Coin angle in radians, within [0, 2*pi].  Controls the balance
        between transmission and reflection of the two spinor components.
    chi:
        Dimensionless Kerr strength, >= 0.  The per-site phase is
        ``2*pi*chi*|amplitude|**2``; 0 gives the linear walk.
    steps:
        Number of time steps, >= 1.
    initial:
        Initial condition tag, see :class:`InitialState`.
    margin:
        Extra empty sites kept beyond the light cone on each side.
    """

    theta: float
    chi: float
    steps: int
    initial: InitialState = InitialState.SYMMETRIC_CIRCULAR
    margin: int = 2

    def __post_init__(self) -> None:
        if not 0.0 <= self.theta <= TWO_PI:
            raise ValueError(f"theta: must be within [0, 2*pi], got {self.theta}")
        if not self.chi >= 0.0:
            raise ValueError(f"chi: must be >= 0, got {self.chi}")
        if not (isinstance(self.steps, int) and self.steps >= 1):
            raise ValueError(f"steps: must be a positive integer, got {self.steps}")
        if not (isinstance(self.margin, int) and self.margin >= 0):
            raise ValueError(f"margin: must be a non-negative integer, got {self.margin}")
        if not isinstance(self.initial, InitialState):
            raise ValueError(f"initial: expected InitialState, got {self.initial!r}")
        # lattice allocation must stay within the platform index type
        if 2 * self.steps + 2 * self.margin + 1 > np.iinfo(np.intp).max:
            raise ValueError("steps/margin: lattice size overflows the site-index type")

    @property
    def lattice_size(self) -> int:
        """Number of sites: light cone of `steps` plus `margin` on each side."""
        return 2 * self.steps + 2 * self.margin + 1

    @property
    def origin(self) -> int:
        """Central site index."""
        return self.steps + self.margin


@dataclass(eq=False)
class SpinorField:
    """Walker state at one time step: two complex amplitude arrays.

    ``a[n]`` and ``b[n]`` are the right- and left-handed amplitudes at site
    ``n``; ``origin`` records the starting site for survival-probability
    readout.  Arrays are coerced to complex128.
    """

    a: np.ndarray
    b: np.ndarray
    origin: int

    def __post_init__(self) -> None:
        self.a = np.asarray(self.a, dtype=np.complex128)
        self.b = np.asarray(self.b, dtype=np.complex128)
        if self.a.ndim != 1 or self.b.ndim != 1:
            raise ValueError("amplitude arrays must be one-dimensional")
        if self.a.size != self.b.size:
            raise ValueError(
                f"component length mismatch: {self.a.size} vs {self.b.size}"
            )
        if self.a.size < 3:
            raise ValueError(f"lattice needs at least 3 sites, got {self.a.size}")
        if not 0 <= self.origin < self.a.size:
            raise ValueError(f"origin {self.origin} outside [0, {self.a.size})")

    @property
    def size(self) -> int:
        return self.a.size

    def norm(self) -> float:
        """Total probability, sum of |a|^2 + |b|^2 over all sites."""
        return float(
            np.sum(self.a.real**2 + self.a.imag**2)
            + np.sum(self.b.real**2 + self.b.imag**2)
        )

    def copy(self) -> "SpinorField":
        return SpinorField(self.a.copy(), self.b.copy(), self.origin)


def coin_entries(theta: float) -> tuple[float, float]:
    """Cosine/sine pair of the coin matrix [[c, s], [s, -c]]."""
    return math.cos(theta), math.sin(theta)


def _twist(z: np.ndarray, k: float) -> np.ndarray:
    """Apply the intensity-dependent phase: exp(i*k*|z|^2) * z.

    Spelled out in real arithmetic: the phase angle is k*|z|^2, and the
    rotated amplitude is (cos*re - sin*im) + i*(cos*im + sin*re).  Real
    cos/sin vectorize much better than complex exp, and keeping one explicit
    rounding sequence here lets the buffered engine reproduce the public
    operations bit for bit.
    """
    zr, zi = z.real, z.imag
    g = zr * zr + zi * zi
    g *= k
    cr = np.cos(g)
    sr = np.sin(g)
    out = np.empty(z.shape, dtype=np.complex128)
    out.real = cr * zr - sr * zi
    out.imag = cr * zi + sr * zr
    return out


def new_state(params: WalkParams) -> SpinorField:
    """Point-source state at the central site of a freshly sized lattice.

    The lattice has ``2*steps + 2*margin + 1`` sites so the light cone of a
    `steps`-long walk never reaches the edges.
    """
    n = params.lattice_size
    a = np.zeros(n, dtype=np.complex128)
    b = np.zeros(n, dtype=np.complex128)
    if params.initial is InitialState.SYMMETRIC_CIRCULAR:
        a[params.origin] = SQRT_HALF
        b[params.origin] = 1j * SQRT_HALF
    else:
        a[params.origin] = 1.0
    return SpinorField(a, b, params.origin)


def nonlinear_phase(field: SpinorField, chi: float) -> SpinorField:
    """Intensity-dependent phase alone, without coin or shift.

    Each amplitude z picks up exp(i*2*pi*chi*|z|^2); site probabilities are
    unchanged (up to rounding of the unit-modulus multiply).  Exists mainly
    so the phase can be tested in isolation from the full step.
    """
    k = TWO_PI * chi
    if k == 0.0:
        return field.copy()
    return SpinorField(_twist(field.a, k), _twist(field.b, k), field.origin)


def _flush_tiny(z: np.ndarray, p: np.ndarray) -> None:
    """Zero amplitudes (and their cached probabilities) below the guard."""
    mask = p < FLUSH_P
    z[mask] = 0.0
    p[mask] = 0.0


def _step_arrays(
    a: np.ndarray, b: np.ndarray, c: float, s: float, k: float
) -> tuple[np.ndarray, np.ndarray]:
    """One amplitude update on full-lattice arrays; returns fresh arrays.

    Raises LightConeError if the amplitude that would land outside the chain
    (left edge through the right-moving row, right edge through the
    left-moving row) exceeds EDGE_TOL.
    """
    n = a.size
    if k != 0.0:
        fa = _twist(a, k)
        fb = _twist(b, k)
    else:
        fa, fb = a, b
    ra = c * fa + s * fb
    rb = s * fa - c * fb
    if abs(ra[0]) > EDGE_TOL or abs(rb[-1]) > EDGE_TOL:
        raise LightConeError(
            "non-zero amplitude would be shifted off the lattice edge "
            f"(|left|={abs(ra[0]):.3e}, |right|={abs(rb[-1]):.3e})"
        )
    a2 = np.zeros_like(a)
    b2 = np.zeros_like(b)
    a2[: n - 1] = ra[1:]
    b2[1:] = rb[: n - 1]
    _flush_tiny(a2, a2.real * a2.real + a2.imag * a2.imag)
    _flush_tiny(b2, b2.real * b2.real + b2.imag * b2.imag)
    return a2, b2


def step(field: SpinorField, params: WalkParams) -> SpinorField:
    """Advance the state by one time step.

    Uses ``theta`` and ``chi`` from `params`; the caller is responsible for
    the light-cone precondition (amplitude at the edge sites raises
    :class:`LightConeError`).
    """
    c, s = coin_entries(params.theta)
    a2, b2 = _step_arrays(field.a, field.b, c, s, TWO_PI * params.chi)
    return SpinorField(a2, b2, field.origin)


class _Engine:
    """Walk integrator restricted to the occupied parity sublattice.

    From a point source the recursion only ever populates sites with
    ``n - origin = t (mod 2)``, so the state at time t is held in two
    contiguous arrays of length t+1 over sites ``origin - t + 2*j``.  On the
    compact arrays the update needs no index shifts at all: the right-moving
    row lands on the same compact index, the left-moving row on index+1.

    All scratch is preallocated and the per-element rounding sequence is the
    one of ``_twist`` and the public coin mix, so trajectories agree bitwise
    with repeated application of :func:`step` (asserted in the tests).  The
    per-component probabilities of the current state are kept alongside the
    amplitudes: the next step's phase angles are just ``k * p``, the flush
    guard reads them directly, and the observables reduce them.
    """

    __slots__ = ("params", "c", "s", "k", "t", "_m",
                 "_za", "_zb", "_za2", "_zb2", "_pa", "_pb", "_pa2", "_pb2",
                 "_fa", "_fb", "_u", "_g", "_cr", "_sr", "_p", "_w1", "_w2")

    def __init__(self, params: WalkParams, coin: Optional[tuple[float, float]] = None):
        self.params = params
        self.c, self.s = coin if coin is not None else coin_entries(params.theta)
        self.k = TWO_PI * params.chi
        cap = params.steps + 1
        self._za = np.zeros(cap, dtype=np.complex128)
        self._zb = np.zeros(cap, dtype=np.complex128)
        self._za2 = np.empty(cap, dtype=np.complex128)
        self._zb2 = np.empty(cap, dtype=np.complex128)
        self._pa = np.zeros(cap, dtype=np.float64)
        self._pb = np.zeros(cap, dtype=np.float64)
        self._pa2 = np.empty(cap, dtype=np.float64)
        self._pb2 = np.empty(cap, dtype=np.float64)
        self._fa = np.empty(cap, dtype=np.complex128)
        self._fb = np.empty(cap, dtype=np.complex128)
        self._u = np.empty(cap, dtype=np.complex128)
        self._g = np.empty(cap, dtype=np.float64)
        self._cr = np.empty(cap, dtype=np.float64)
        self._sr = np.empty(cap, dtype=np.float64)
        self._p = np.empty(cap, dtype=np.float64)
        self._w1 = np.empty(cap, dtype=np.float64)
        self._w2 = np.empty(cap, dtype=np.float64)
        if params.initial is InitialState.SYMMETRIC_CIRCULAR:
            self._za[0] = SQRT_HALF
            self._zb[0] = 1j * SQRT_HALF
        else:
            self._za[0] = 1.0
        a0, b0 = complex(self._za[0]), complex(self._zb[0])
        self._pa[0] = a0.real * a0.real + a0.imag * a0.imag
        self._pb[0] = b0.real * b0.real + b0.imag * b0.imag
        self.t = 0
        self._m = 1

    def _twist_cached(self, z: np.ndarray, p: np.ndarray, out: np.ndarray) -> None:
        # buffered _twist reusing the cached |z|^2; identical rounding order
        m = z.size
        g, w1, w2 = self._g[:m], self._w1[:m], self._w2[:m]
        cr, sr = self._cr[:m], self._sr[:m]
        zr, zi = z.real, z.imag
        np.multiply(p, self.k, out=g)
        np.cos(g, out=cr)
        np.sin(g, out=sr)
        np.multiply(cr, zr, out=w1)
        np.multiply(sr, zi, out=w2)
        np.subtract(w1, w2, out=out.real)
        np.multiply(cr, zi, out=w1)
        np.multiply(sr, zr, out=w2)
        np.add(w1, w2, out=out.imag)

    def advance(self) -> None:
        """One time step; grows the occupied window by one site."""
        if self.t >= self.params.steps:
            raise RuntimeError("engine already ran its configured number of steps")
        m = self._m
        za, zb = self._za[:m], self._zb[:m]
        if self.k != 0.0:
            fa, fb = self._fa[:m], self._fb[:m]
            self._twist_cached(za, self._pa[:m], fa)
            self._twist_cached(zb, self._pb[:m], fb)
        else:
            fa, fb = za, zb
        # za2[:m] = c*fa + s*fb ; zb2[1:m+1] = s*fa - c*fb
        u = self._u[:m]
        out_a = self._za2[:m]
        np.multiply(fa, self.c, out=out_a)
        np.multiply(fb, self.s, out=u)
        np.add(out_a, u, out=out_a)
        self._za2[m] = 0.0
        out_b = self._zb2[1 : m + 1]
        np.multiply(fa, self.s, out=out_b)
        np.multiply(fb, self.c, out=u)
        np.subtract(out_b, u, out=out_b)
        self._zb2[0] = 0.0
        # refresh the probability caches and flush the denormal guard
        grown = m + 1
        w1 = self._w1[:grown]
        for z2, p2 in ((self._za2[:grown], self._pa2[:grown]),
                       (self._zb2[:grown], self._pb2[:grown])):
            np.multiply(z2.real, z2.real, out=p2)
            np.multiply(z2.imag, z2.imag, out=w1)
            np.add(p2, w1, out=p2)
            _flush_tiny(z2, p2)
        self._za, self._za2 = self._za2, self._za
        self._zb, self._zb2 = self._zb2, self._zb
        self._pa, self._pa2 = self._pa2, self._pa
        self._pb, self._pb2 = self._pb2, self._pb
        self.t += 1
        self._m = grown

    def site_probabilities(self) -> np.ndarray:
        """Spin-summed probabilities on the occupied sites (length t+1)."""
        m = self._m
        p = self._p[:m]
        np.add(self._pa[:m], self._pb[:m], out=p)
        return p

    def observables(self) -> tuple[float, float, float]:
        """(ipr, sp, norm) of the current state."""
        p = self.site_probabilities()
        norm = float(np.sum(p))
        ipr = 1.0 / float(np.dot(p, p))
        sp = float(p[self.t // 2]) if self.t % 2 == 0 else 0.0
        return ipr, sp, norm

    def cone_profile(self) -> tuple[int, np.ndarray]:
        """(leftmost cone site, probabilities over the cone, zeros included)."""
        p = self.site_probabilities()
        full = np.zeros(2 * self.t + 1, dtype=np.float64)
        full[::2] = p
        return self.params.origin - self.t, full

    def field(self) -> SpinorField:
        """Materialize the full-lattice state (read-only arrays)."""
        n = self.params.lattice_size
        n0 = self.params.origin
        a = np.zeros(n, dtype=np.complex128)
        b = np.zeros(n, dtype=np.complex128)
        lo = n0 - self.t
        hi = n0 + self.t
        a[lo : hi + 1 : 2] = self._za[: self._m]
        b[lo : hi + 1 : 2] = self._zb[: self._m]
        a.setflags(write=False)
        b.setflags(write=False)
        return SpinorField(a, b, n0)


def evolve(
    params: WalkParams,
    observer: Optional[Callable[[int, SpinorField], object]] = None,
) -> SpinorField:
    """Run a full walk from the point source.

    Builds the initial state, applies the step `params.steps` times and
    calls ``observer(t, field)`` after each step with the 1-based step index
    and a read-only snapshot of the state.  An observer returning ``False``
    stops the evolution early.  The trajectory is a pure function of
    `params`: repeated calls produce identical amplitudes bit for bit.
    """
    eng = _Engine(params)
    for t in range(1, params.steps + 1):
        eng.advance()
        if observer is not None and observer(t, eng.field()) is False:
            break
    return eng.field()


def walk_matrix(n_sites: int, theta: float) -> np.ndarray:
    """Dense 2N x 2N one-step matrix of the linear walk (chi = 0).

    Built entry by entry from the coin [[c, s], [s, -c]] and a cyclic
    conditional shift, acting on the flattened state ``concat(a, b)``.  The
    wrap-around makes the matrix exactly unitary; it coincides with the
    open-chain update whenever the edge sites carry no amplitude.  O(N^2)
    reference for tests only.
    """
    c, s = coin_entries(theta)
    m = np.zeros((2 * n_sites, 2 * n_sites), dtype=np.complex128)
    for n in range(n_sites):
        right = (n + 1) % n_sites
        left = (n - 1) % n_sites
        m[n, right] = c                    # a'[n] <- a[n+1]
        m[n, n_sites + right] = s          # a'[n] <- b[n+1]
        m[n_sites + n, left] = s           # b'[n] <- a[n-1]
        m[n_sites + n, n_sites + left] = -c
    return m


def linear_oracle_step(field: SpinorField, theta: float) -> SpinorField:
    """Reference one-step evolution by dense matrix multiplication."""
    n = field.size
    vec = np.concatenate([field.a, field.b])
    out = walk_matrix(n, theta) @ vec
    return SpinorField(out[:n], out[n:], field.origin)
