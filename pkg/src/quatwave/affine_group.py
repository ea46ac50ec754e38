"""The quaternionic affine group H x| H*: group law, Haar measures and
quadrature rules over truncated regions.

A group element g = (b, a) consists of a translation quaternion b and an
invertible dilation-rotation quaternion a; it acts on H by x -> a*x + b and
composes as (b1, a1)(b2, a2) = (b1 + a1*b2, a1*a2).

Measures (densities with respect to Lebesgue measure db da on R^4 x R^4,
components ordered as in :func:`quatwave.quaternion.vec4`):

    left Haar   density 1/det(A)^2 = 1/|a|^8
    right Haar  density 1/det(A)   = 1/|a|^4
    modular     Delta(g) = left/right = 1/det(A)

with det(A) = |a|^4 the determinant of the 4x4 real matrix of a.

Quadrature nodes live on a product grid in the chart
(b in R^4, lam1, theta1, lam2, theta2), where (lam_i, theta_i) are the polar
coordinates of the two complex components of a.  The chart Jacobian is
da = lam1*lam2 dlam1 dtheta1 dlam2 dtheta2 (two independent polar maps), so a
node's weight is

    cell_volume * lam1*lam2 * haar_density(node).

Node weights fold in the left Haar density; downstream code just sums
w * F(g).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .errors import EmptyRegion, SingularQuaternion
from .quaternion import (
    ONE, Quaternion, RotationDilation, quat_det, quat_inverse, quat_mul,
    mul_arrays, rot_dil_decompose, to_real4x4, vec4,
)

__all__ = [
    "AffineElement", "TruncationSpec", "GroupQuadrature", "HStarQuadrature",
    "identity", "compose", "inverse", "act", "haar_densities",
    "build_quadrature", "build_hstar_quadrature",
]


@dataclass(frozen=True)
class AffineElement:
    """Group element (b, a) with invertible a.

    Equivalent to the 3x3 complex matrix [[a, b], [0, 1]] under composition,
    or to the 5x5 real matrix [[A, vec4(b)], [0, 1]].
    """

    b: Quaternion
    a: Quaternion

    def __post_init__(self):
        if not quat_det(self.a) > 0.0:
            raise SingularQuaternion("dilation part of an affine element must be invertible")

    @cached_property
    def decomp(self) -> RotationDilation:
        """Cached rotation-dilation decomposition of the a part."""
        return rot_dil_decompose(self.a)

    def matrix3(self) -> np.ndarray:
        """3x3 complex matrix [[a, b], [0^T, 1]], b entering as the column
        (z1, z2) that determines it."""
        out = np.zeros((3, 3), dtype=complex)
        out[:2, :2] = self.a.matrix
        out[0, 2] = self.b.z1
        out[1, 2] = self.b.z2
        out[2, 2] = 1.0
        return out

    def matrix5(self) -> np.ndarray:
        """5x5 real matrix [[A, b], [0^T, 1]] acting on (x0, x3, x2, x1, 1)."""
        out = np.zeros((5, 5))
        out[:4, :4] = to_real4x4(self.a)
        out[:4, 4] = vec4(self.b)
        out[4, 4] = 1.0
        return out

    def act(self, x: Quaternion) -> Quaternion:
        return act(self, x)

    def __matmul__(self, other: "AffineElement") -> "AffineElement":
        return compose(self, other)


def identity() -> AffineElement:
    return AffineElement(Quaternion(0j, 0j), ONE)


def compose(g1: AffineElement, g2: AffineElement) -> AffineElement:
    """(b1 + a1*b2, a1*a2); matches the 3x3 matrix product."""
    return AffineElement(g1.b + quat_mul(g1.a, g2.b), quat_mul(g1.a, g2.a))


def inverse(g: AffineElement) -> AffineElement:
    """(-a^{-1} b, a^{-1}); compose(g, inverse(g)) is the identity."""
    ainv = quat_inverse(g.a)
    return AffineElement(-quat_mul(ainv, g.b), ainv)


def act(g: AffineElement, x: Quaternion) -> Quaternion:
    """Affine action x -> a*x + b."""
    return quat_mul(g.a, x) + g.b


def haar_densities(g: AffineElement) -> tuple[float, float, float]:
    """(left, right, delta) densities at g; delta * right = left identically."""
    det_a = quat_det(g.a)       # |a|^2
    det_A = det_a * det_a       # det of the 4x4 matrix, |a|^4
    left = 1.0 / (det_A * det_A)
    right = 1.0 / det_A
    return left, right, left / right


# ---------------------------------------------------------------------------
# truncation regions and quadrature


@dataclass(frozen=True)
class TruncationSpec:
    """Bounds and per-axis counts for a truncated group region.

    b nodes sit at integer multiples of db = 2*b_halfwidth/b_count (cell
    midpoints for odd counts, shifted by half a cell for even counts, which
    keeps them aligned with centered field lattices).  lam nodes are midpoints
    of uniform cells on [lambda_min, lambda_max]; theta nodes are the uniform
    circle grid j*2*pi/theta_count, whose trapezoidal weights coincide with
    midpoint weights.

    epsilon0 > 0 excludes nodes with lam1^2 + lam2^2 < epsilon0^2 where the
    left Haar density diverges; the default (lambda_min/8, or an eighth of the
    first cell midpoint when lambda_min = 0) admits every node of a valid grid.
    """

    b_halfwidth: float
    b_count: int
    lambda_min: float
    lambda_max: float
    lambda_count: int
    theta_count: int
    epsilon0: float | None = None

    def resolved_epsilon0(self) -> float:
        if self.epsilon0 is not None:
            return self.epsilon0
        if self.lambda_min > 0.0:
            return self.lambda_min / 8.0
        dlam = (self.lambda_max - self.lambda_min) / max(self.lambda_count, 1)
        return dlam / 16.0

    def refined(self, factor: int = 2, axes: str = "blam") -> "TruncationSpec":
        """Spec with cell sizes divided by ``factor`` on the chosen axes
        ('b', 'lam', 'theta' substrings of ``axes``)."""
        kw = {}
        if "b" in axes:
            kw["b_count"] = self.b_count * factor
        if "lam" in axes:
            kw["lambda_count"] = self.lambda_count * factor
        if "theta" in axes:
            kw["theta_count"] = self.theta_count * factor
        return replace(self, **kw)

    def to_json(self) -> str:
        keys = ("b_halfwidth", "b_count", "lambda_min", "lambda_max",
                "lambda_count", "theta_count", "epsilon0")
        return json.dumps({k: getattr(self, k) for k in keys}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "TruncationSpec":
        data = json.loads(text)
        return cls(
            b_halfwidth=float(data["b_halfwidth"]),
            b_count=int(data["b_count"]),
            lambda_min=float(data["lambda_min"]),
            lambda_max=float(data["lambda_max"]),
            lambda_count=int(data["lambda_count"]),
            theta_count=int(data["theta_count"]),
            epsilon0=None if data.get("epsilon0") is None else float(data["epsilon0"]),
        )

    def _validate(self):
        vals = (self.b_halfwidth, self.lambda_min, self.lambda_max)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("truncation bounds must be finite")
        if self.lambda_min < 0.0:
            raise ValueError("lambda_min must be >= 0")
        if not self.resolved_epsilon0() > 0.0:
            raise ValueError("epsilon0 must be positive")
        if (self.b_halfwidth <= 0 or self.b_count < 1 or self.lambda_count < 1
                or self.theta_count < 1 or self.lambda_max <= self.lambda_min):
            raise EmptyRegion(f"truncation region is empty: {self}")


def _centered_indices(n: int) -> np.ndarray:
    # odd n: symmetric -m..m; even n: -n/2..n/2-1 (fft-style)
    return np.arange(n) - (n // 2)


def _a_grid(spec: TruncationSpec):
    """Midpoint lam nodes, uniform theta nodes and the per-cell volume."""
    dlam = (spec.lambda_max - spec.lambda_min) / spec.lambda_count
    lam = spec.lambda_min + (np.arange(spec.lambda_count) + 0.5) * dlam
    dth = 2.0 * np.pi / spec.theta_count
    th = np.arange(spec.theta_count) * dth
    return lam, th, dlam, dth


def _a_nodes(spec: TruncationSpec):
    """Flattened (lam1, th1, lam2, th2) product grid with the exclusion ball
    removed.  Returns the chart arrays and the cell volume element."""
    lam, th, dlam, dth = _a_grid(spec)
    L1, T1, L2, T2 = np.meshgrid(lam, th, lam, th, indexing="ij")
    lam1, th1, lam2, th2 = (arr.ravel() for arr in (L1, T1, L2, T2))
    keep = lam1 ** 2 + lam2 ** 2 >= spec.resolved_epsilon0() ** 2
    if not np.any(keep):
        raise EmptyRegion("all dilation nodes fall inside the epsilon0 ball")
    cell = dlam * dth * dlam * dth
    return lam1[keep], th1[keep], lam2[keep], th2[keep], cell


class HStarQuadrature:
    """Weighted nodes approximating the invariant measure of the dilation
    group H*: d(mu) = da / |a|^4 in the (lam, theta) chart.

    Attributes are flat arrays of length ``n_nodes``:  lam1, th1, lam2, th2
    (chart coordinates), z1, z2 (the quaternion components) and weights
    (cell volume x chart Jacobian lam1*lam2 x density 1/rho^4).
    """

    def __init__(self, lam1, th1, lam2, th2, weights):
        self.lam1, self.th1, self.lam2, self.th2 = lam1, th1, lam2, th2
        self.weights = weights
        self.z1 = lam1 * np.exp(1j * th1)
        self.z2 = lam2 * np.exp(1j * th2)

    @property
    def n_nodes(self) -> int:
        return self.lam1.size

    @property
    def rho2(self) -> np.ndarray:
        """|a|^2 per node."""
        return self.lam1 ** 2 + self.lam2 ** 2


def build_hstar_quadrature(spec: TruncationSpec) -> HStarQuadrature:
    """Quadrature for integrals over H* alone (the b part of ``spec`` is
    ignored)."""
    spec._validate()
    lam1, th1, lam2, th2, cell = _a_nodes(spec)
    rho2 = lam1 ** 2 + lam2 ** 2
    weights = cell * lam1 * lam2 / rho2 ** 2
    return HStarQuadrature(lam1, th1, lam2, th2, weights)


class GroupQuadrature:
    """Finite weighted node set approximating the left Haar integral over a
    truncated region of the group.

    The node set is the product of a 4-D cubic b grid with the dilation grid;
    nodes are enumerated dilation-major, with the b index varying fastest in
    C order over the four axes.  Flattened per-node arrays are materialized
    lazily; the factored form (``b_axis``, ``a_*`` arrays) is what transform
    code should use.
    """

    def __init__(self, spec: TruncationSpec, b_axis: np.ndarray, b_cell: float,
                 a_lam1, a_th1, a_lam2, a_th2, a_weights):
        self.spec = spec
        self.b_axis = b_axis          # shared 1-D grid for all four b axes
        self.b_cell = b_cell          # db^4
        self.a_lam1, self.a_th1 = a_lam1, a_th1
        self.a_lam2, self.a_th2 = a_lam2, a_th2
        self.a_weights = a_weights    # left-Haar a-part weights (incl. Jacobian)
        self.a_z1 = a_lam1 * np.exp(1j * a_th1)
        self.a_z2 = a_lam2 * np.exp(1j * a_th2)

    # -- sizes ---------------------------------------------------------
    @property
    def n_b(self) -> int:
        return self.b_axis.size ** 4

    @property
    def n_a(self) -> int:
        return self.a_lam1.size

    @property
    def n_nodes(self) -> int:
        return self.n_b * self.n_a

    # -- flattened node arrays (dilation-major order) -------------------
    @cached_property
    def b_vectors(self) -> np.ndarray:
        """(n_b, 4) array of b nodes in vec4 order."""
        g = np.meshgrid(self.b_axis, self.b_axis, self.b_axis, self.b_axis,
                        indexing="ij")
        return np.stack([ax.ravel() for ax in g], axis=1)

    @cached_property
    def weights(self) -> np.ndarray:
        """(n_nodes,) left-Haar weights, dilation-major."""
        return np.repeat(self.a_weights * self.b_cell, self.n_b)

    def node_chart(self):
        """Flattened (b (N,4), lam1, th1, lam2, th2) arrays, dilation-major."""
        nb, na = self.n_b, self.n_a
        b = np.tile(self.b_vectors, (na, 1))
        rep = lambda arr: np.repeat(arr, nb)
        return b, rep(self.a_lam1), rep(self.a_th1), rep(self.a_lam2), rep(self.a_th2)

    def element(self, i: int) -> AffineElement:
        ai, bi = divmod(int(i), self.n_b)
        bvec = self.b_vectors[bi]
        return AffineElement(
            Quaternion(complex(bvec[0], bvec[1]), complex(bvec[2], bvec[3])),
            Quaternion(self.a_z1[ai], self.a_z2[ai]),
        )

    @property
    def hstar(self) -> HStarQuadrature:
        """The dilation part reweighted for the H* measure (density 1/rho^4
        instead of the group's 1/rho^8)."""
        rho2 = self.a_lam1 ** 2 + self.a_lam2 ** 2
        return HStarQuadrature(self.a_lam1, self.a_th1, self.a_lam2, self.a_th2,
                               self.a_weights * rho2 ** 2)

    @cached_property
    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(self.spec.to_json().encode())
        for arr in (self.b_axis, self.a_lam1, self.a_th1, self.a_lam2,
                    self.a_th2, self.a_weights):
            h.update(np.ascontiguousarray(arr).tobytes())
        return h.hexdigest()[:16]


def build_quadrature(spec: TruncationSpec) -> GroupQuadrature:
    """Product-grid quadrature with left-Haar weights folded into the nodes.

    Node weight = db^4 * dlam^2 dtheta^2 * lam1*lam2 / (lam1^2+lam2^2)^4.
    """
    spec._validate()
    db = 2.0 * spec.b_halfwidth / spec.b_count
    b_axis = _centered_indices(spec.b_count) * db
    lam1, th1, lam2, th2, cell = _a_nodes(spec)
    rho2 = lam1 ** 2 + lam2 ** 2
    a_weights = cell * lam1 * lam2 / rho2 ** 4
    return GroupQuadrature(spec, b_axis, db ** 4, lam1, th1, lam2, th2, a_weights)


# ---------------------------------------------------------------------------
# batched node transforms used by the measure-invariance tests


def translate_chart(g0: AffineElement, b, z1, z2, side: str):
    """Chart coordinates of g0*g ('left') or g*g0 ('right') for node arrays.

    b is (N, 4) in vec4 order; z1, z2 are the complex dilation components.
    Returns (b', lam1', th1', lam2', th2').
    """
    bz1 = b[:, 0] + 1j * b[:, 1]
    bz2 = b[:, 2] + 1j * b[:, 3]
    if side == "left":
        # (b0 + a0*b, a0*a)
        nz1, nz2 = mul_arrays(g0.a.z1, g0.a.z2, bz1, bz2)
        bz1n, bz2n = g0.b.z1 + nz1, g0.b.z2 + nz2
        az1n, az2n = mul_arrays(g0.a.z1, g0.a.z2, z1, z2)
    elif side == "right":
        # (b + a*b0, a*a0)
        nz1, nz2 = mul_arrays(z1, z2, g0.b.z1, g0.b.z2)
        bz1n, bz2n = bz1 + nz1, bz2 + nz2
        az1n, az2n = mul_arrays(z1, z2, g0.a.z1, g0.a.z2)
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    bn = np.stack([bz1n.real, bz1n.imag, bz2n.real, bz2n.imag], axis=1)
    lam1, th1 = np.abs(az1n), np.mod(np.angle(az1n), 2.0 * np.pi)
    lam2, th2 = np.abs(az2n), np.mod(np.angle(az2n), 2.0 * np.pi)
    return bn, lam1, th1, lam2, th2


def scale_chart(a0: Quaternion, z1, z2, side: str):
    """Polar chart coordinates of a0*a ('left') or a*a0 ('right') on H*."""
    if side == "left":
        nz1, nz2 = mul_arrays(a0.z1, a0.z2, z1, z2)
    elif side == "right":
        nz1, nz2 = mul_arrays(z1, z2, a0.z1, a0.z2)
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return (np.abs(nz1), np.mod(np.angle(nz1), 2.0 * np.pi),
            np.abs(nz2), np.mod(np.angle(nz2), 2.0 * np.pi))


def _node_chunks(quad: GroupQuadrature, max_nodes: int):
    """Yield (b (n,4), z1, z2, left_weights) blocks of at most ~max_nodes
    nodes, dilation-major, so large quadratures never materialize fully."""
    nb = quad.n_b
    bvec = quad.b_vectors
    step = max(1, max_nodes // nb)
    for i0 in range(0, quad.n_a, step):
        i1 = min(quad.n_a, i0 + step)
        na = i1 - i0
        b = np.tile(bvec, (na, 1))
        z1 = np.repeat(quad.a_z1[i0:i1], nb)
        z2 = np.repeat(quad.a_z2[i0:i1], nb)
        w = np.repeat(quad.a_weights[i0:i1] * quad.b_cell, nb)
        yield b, z1, z2, w


def _polar_chart(b, z1, z2):
    return (b, np.abs(z1), np.mod(np.angle(z1), 2.0 * np.pi),
            np.abs(z2), np.mod(np.angle(z2), 2.0 * np.pi))


def invariance_defect(quad: GroupQuadrature, g0: AffineElement, fn,
                      side: str = "left", max_chunk: int = 4_000_000) -> float:
    """Relative change of the quadrature sum of ``fn`` under translation by
    g0: left translation tested against the left Haar weights, right
    translation against the right Haar weights.

    ``fn(b, lam1, th1, lam2, th2)`` must be vectorized and effectively
    supported inside the truncation region.
    """
    base = 0.0
    shifted = 0.0
    for b, z1, z2, w in _node_chunks(quad, max_chunk):
        if side == "right":
            w = w * (np.abs(z1) ** 2 + np.abs(z2) ** 2) ** 2  # fold det(A)
        base += float(np.sum(w * fn(*_polar_chart(b, z1, z2))))
        shifted += float(np.sum(w * fn(*translate_chart(g0, b, z1, z2, side))))
    return abs(shifted - base) / abs(base)


def hstar_invariance_defect(hq: HStarQuadrature, a0: Quaternion, fn,
                            side: str = "left") -> float:
    """Same protocol for the invariant measure on H* (both-sided)."""
    base = float(np.sum(hq.weights * fn(hq.lam1, hq.th1, hq.lam2, hq.th2)))
    shifted = float(np.sum(hq.weights * fn(*scale_chart(a0, hq.z1, hq.z2, side))))
    return abs(shifted - base) / abs(base)


def make_group_bump(b_center, b_sigma, lam_center, lam_sigma,
                    th_phase=(0.0, 0.0), th_amp=0.3):
    """Smooth, rapidly decaying test integrand on the group for the measure
    suite.  Gaussian in b and in each lam, trigonometric in each theta."""
    b_center = np.asarray(b_center, dtype=float)

    def fn(b, lam1, th1, lam2, th2):
        db2 = np.sum((b - b_center) ** 2, axis=-1)
        out = np.exp(-db2 / b_sigma ** 2)
        out *= np.exp(-((lam1 - lam_center) ** 2 + (lam2 - lam_center) ** 2)
                      / lam_sigma ** 2)
        out *= (1.0 + th_amp * np.cos(th1 - th_phase[0]))
        out *= (1.0 + th_amp * np.cos(th2 - th_phase[1]))
        return out

    return fn


def make_hstar_bump(lam_center, lam_sigma, th_phase=(0.0, 0.0), th_amp=0.3):
    """Dilation-only version of :func:`make_group_bump`."""

    def fn(lam1, th1, lam2, th2):
        out = np.exp(-((lam1 - lam_center) ** 2 + (lam2 - lam_center) ** 2)
                     / lam_sigma ** 2)
        out *= (1.0 + th_amp * np.cos(th1 - th_phase[0]))
        out *= (1.0 + th_amp * np.cos(th2 - th_phase[1]))
        return out

    return fn


def default_measure_spec() -> TruncationSpec:
    """Desk-scale truncation used by the measure self-tests."""
    return TruncationSpec(b_halfwidth=3.2, b_count=4, lambda_min=0.4,
                          lambda_max=2.2, lambda_count=5, theta_count=6)


def random_small_element(rng: np.random.Generator,
                         b_scale: float = 0.15,
                         log_lam_scale: float = 0.08,
                         angle_scale: float = 0.15,
                         z2_scale: float = 0.08) -> AffineElement:
    """Random group element near the identity, used to probe invariance
    without pushing test integrands outside the truncation region."""
    b = Quaternion.from_components(*(rng.standard_normal(4) * b_scale))
    lam = np.exp(rng.standard_normal() * log_lam_scale)
    th = rng.standard_normal() * angle_scale
    z2 = (rng.standard_normal() + 1j * rng.standard_normal()) * z2_scale
    return AffineElement(b, Quaternion(lam * np.exp(1j * th), complex(z2)))
