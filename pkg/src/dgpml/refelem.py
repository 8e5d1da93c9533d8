"""Reference-tetrahedron operators for the nodal DG discretization.

Builds, for a polynomial order N, the interpolation node set, the modal
Vandermonde matrix of an orthonormal basis on the simplex, the nodal
differentiation matrices, the face node index lists and the surface-to-volume
lift operator. All operators act on nodal values; elements are straight-sided
so every physical operator is this reference operator combined with constant
per-element metric factors.
"""

from dataclasses import dataclass, field
from math import lgamma

import numpy as np
from scipy.special import eval_jacobi, roots_jacobi

from .errors import ConfigError

MAX_ORDER = 9
NODE_TOL = 1e-10

# Blend parameter per order for the warped simplex node family; beyond the
# table the warp is used with alpha = 1.
_WARP_ALPHA = [
    0.0, 0.0, 0.0, 0.1002, 1.1332, 1.5608, 1.3413, 1.2577, 1.1603,
    1.10153, 0.6080, 0.4523, 0.8856, 0.8717, 0.9655,
]

# Vertices of the equilateral tetrahedron used while constructing nodes.
_EQUI_V1 = np.array([-1.0, -1.0 / np.sqrt(3.0), -1.0 / np.sqrt(6.0)])
_EQUI_V2 = np.array([1.0, -1.0 / np.sqrt(3.0), -1.0 / np.sqrt(6.0)])
_EQUI_V3 = np.array([0.0, 2.0 / np.sqrt(3.0), -1.0 / np.sqrt(6.0)])
_EQUI_V4 = np.array([0.0, 0.0, 3.0 / np.sqrt(6.0)])


def num_volume_nodes(order):
    return (order + 1) * (order + 2) * (order + 3) // 6


def num_face_nodes(order):
    return (order + 1) * (order + 2) // 2


def jacobi_p(x, alpha, beta, n):
    """Jacobi polynomial of degree n, orthonormal on [-1, 1] with weight
    (1-x)^alpha (1+x)^beta."""
    x = np.asarray(x, dtype=float)
    log_h2 = (
        (alpha + beta + 1.0) * np.log(2.0)
        + lgamma(n + alpha + 1.0)
        + lgamma(n + beta + 1.0)
        - np.log(2.0 * n + alpha + beta + 1.0)
        - lgamma(n + alpha + beta + 1.0)
        - lgamma(n + 1.0)
    )
    return eval_jacobi(n, alpha, beta, x) * np.exp(-0.5 * log_h2)


def grad_jacobi_p(x, alpha, beta, n):
    """Derivative of the orthonormal Jacobi polynomial."""
    x = np.asarray(x, dtype=float)
    if n == 0:
        return np.zeros_like(x)
    return np.sqrt(n * (n + alpha + beta + 1.0)) * jacobi_p(x, alpha + 1.0, beta + 1.0, n - 1)


def gauss_lobatto(n):
    """n+1 Gauss-Lobatto points on [-1, 1] for the Legendre weight."""
    if n == 1:
        return np.array([-1.0, 1.0])
    interior, _ = roots_jacobi(n - 1, 1.0, 1.0)
    return np.concatenate(([-1.0], interior, [1.0]))


def _rst_to_abc(r, s, t):
    """Collapsed coordinates on the tetrahedron."""
    a = np.full_like(r, -1.0)
    denom = -(s + t)
    ok = np.abs(denom) > 1e-14
    a[ok] = 2.0 * (1.0 + r[ok]) / denom[ok] - 1.0
    b = np.full_like(r, -1.0)
    ok = np.abs(1.0 - t) > 1e-14
    b[ok] = 2.0 * (1.0 + s[ok]) / (1.0 - t[ok]) - 1.0
    return a, b, t.copy()


def _rs_to_ab(r, s):
    """Collapsed coordinates on the triangle."""
    a = np.full_like(r, -1.0)
    ok = np.abs(1.0 - s) > 1e-14
    a[ok] = 2.0 * (1.0 + r[ok]) / (1.0 - s[ok]) - 1.0
    return a, s.copy()


def _basis_index_triples(order):
    return [
        (i, j, k)
        for i in range(order + 1)
        for j in range(order - i + 1)
        for k in range(order - i - j + 1)
    ]


def _simplex_basis_3d(a, b, c, i, j, k):
    h1 = jacobi_p(a, 0.0, 0.0, i)
    h2 = jacobi_p(b, 2.0 * i + 1.0, 0.0, j)
    h3 = jacobi_p(c, 2.0 * (i + j) + 2.0, 0.0, k)
    return 2.0 * np.sqrt(2.0) * h1 * h2 * ((1.0 - b) ** i) * h3 * ((1.0 - c) ** (i + j))


def _grad_simplex_basis_3d(a, b, c, i, j, k):
    fa = jacobi_p(a, 0.0, 0.0, i)
    dfa = grad_jacobi_p(a, 0.0, 0.0, i)
    gb = jacobi_p(b, 2.0 * i + 1.0, 0.0, j)
    dgb = grad_jacobi_p(b, 2.0 * i + 1.0, 0.0, j)
    hc = jacobi_p(c, 2.0 * (i + j) + 2.0, 0.0, k)
    dhc = grad_jacobi_p(c, 2.0 * (i + j) + 2.0, 0.0, k)

    half_1mb = 0.5 * (1.0 - b)
    half_1mc = 0.5 * (1.0 - c)

    dr = dfa * gb * hc
    if i > 0:
        dr = dr * (half_1mb ** (i - 1))
    if i + j > 0:
        dr = dr * (half_1mc ** (i + j - 1))

    ds = 0.5 * (1.0 + a) * dr
    tmp = dgb * (half_1mb ** i)
    if i > 0:
        tmp = tmp + (-0.5 * i) * gb * (half_1mb ** (i - 1))
    if i + j > 0:
        tmp = tmp * (half_1mc ** (i + j - 1))
    tmp = fa * tmp * hc
    ds = ds + tmp

    dt = 0.5 * (1.0 + a) * dr + 0.5 * (1.0 + b) * tmp
    tmp = dhc * (half_1mc ** (i + j))
    if i + j > 0:
        tmp = tmp - 0.5 * (i + j) * hc * (half_1mc ** (i + j - 1))
    tmp = fa * gb * tmp * (half_1mb ** i)
    dt = dt + tmp

    scale = 2.0 ** (2.0 * i + j + 1.5)
    return dr * scale, ds * scale, dt * scale


def _simplex_basis_2d(a, b, i, j):
    h1 = jacobi_p(a, 0.0, 0.0, i)
    h2 = jacobi_p(b, 2.0 * i + 1.0, 0.0, j)
    return np.sqrt(2.0) * h1 * h2 * ((1.0 - b) ** i)


def vandermonde_3d(order, r, s, t):
    """V[m, n] = psi_n(r_m, s_m, t_m) for the orthonormal tetrahedron basis."""
    a, b, c = _rst_to_abc(r, s, t)
    cols = [_simplex_basis_3d(a, b, c, i, j, k) for i, j, k in _basis_index_triples(order)]
    return np.column_stack(cols)


def grad_vandermonde_3d(order, r, s, t):
    a, b, c = _rst_to_abc(r, s, t)
    vr, vs, vt = [], [], []
    for i, j, k in _basis_index_triples(order):
        dr, ds, dt = _grad_simplex_basis_3d(a, b, c, i, j, k)
        vr.append(dr)
        vs.append(ds)
        vt.append(dt)
    return np.column_stack(vr), np.column_stack(vs), np.column_stack(vt)


def vandermonde_2d(order, r, s):
    a, b = _rs_to_ab(r, s)
    cols = [
        _simplex_basis_2d(a, b, i, j)
        for i in range(order + 1)
        for j in range(order - i + 1)
    ]
    return np.column_stack(cols)


def _equispaced_nodes(order):
    pts = []
    for n in range(order + 1):
        for m in range(order + 1 - n):
            for q in range(order + 1 - n - m):
                pts.append(
                    (-1.0 + 2.0 * q / order, -1.0 + 2.0 * m / order, -1.0 + 2.0 * n / order)
                )
    return np.array(pts)


def _eval_edge_warp(order, gl_nodes, x):
    """1D warp pulling equispaced nodes onto the Gauss-Lobatto set."""
    xeq = np.array([-1.0 + 2.0 * (order - i) / order for i in range(order + 1)])
    warp = np.zeros_like(x)
    for i in range(order + 1):
        d = np.full_like(x, gl_nodes[i] - xeq[i])
        for j in range(1, order):
            if i != j:
                d = d * (x - xeq[j]) / (xeq[i] - xeq[j])
        if i != 0:
            d = -d / (xeq[i] - xeq[0])
        if i != order:
            d = d / (xeq[i] - xeq[order])
        warp = warp + d
    return warp


def _eval_face_shift(order, alpha, l1, l2, l3):
    """Tangential warp of one triangular face, in its own 2D frame."""
    gl = -gauss_lobatto(order)
    blend1 = l2 * l3
    blend2 = l1 * l3
    blend3 = l1 * l2
    warp1 = 4.0 * _eval_edge_warp(order, gl, l3 - l2)
    warp2 = 4.0 * _eval_edge_warp(order, gl, l1 - l3)
    warp3 = 4.0 * _eval_edge_warp(order, gl, l2 - l1)
    warp1 = blend1 * warp1 * (1.0 + (alpha * l1) ** 2)
    warp2 = blend2 * warp2 * (1.0 + (alpha * l2) ** 2)
    warp3 = blend3 * warp3 * (1.0 + (alpha * l3) ** 2)
    dx = warp1 + np.cos(2.0 * np.pi / 3.0) * warp2 + np.cos(4.0 * np.pi / 3.0) * warp3
    dy = np.sin(2.0 * np.pi / 3.0) * warp2 + np.sin(4.0 * np.pi / 3.0) * warp3
    return dx, dy


def warped_nodes(order):
    """Well-conditioned interpolation nodes (r, s, t) on the reference
    tetrahedron, from equispaced nodes warped face by face."""
    if order == 0:
        raise ConfigError("order must be >= 1")
    alpha = _WARP_ALPHA[order] if order <= 14 else 1.0
    tol = 1e-10

    rst = _equispaced_nodes(order)
    r, s, t = rst[:, 0], rst[:, 1], rst[:, 2]
    l1 = (1.0 + t) / 2.0
    l2 = (1.0 + s) / 2.0
    l3 = -(1.0 + r + s + t) / 2.0
    l4 = (1.0 + r) / 2.0

    v1, v2, v3, v4 = _EQUI_V1, _EQUI_V2, _EQUI_V3, _EQUI_V4
    # per-face orthogonal tangent frames
    t1 = np.array([v2 - v1, v2 - v1, v3 - v2, v3 - v1])
    t2 = np.array(
        [v3 - 0.5 * (v1 + v2), v4 - 0.5 * (v1 + v2), v4 - 0.5 * (v2 + v3), v4 - 0.5 * (v1 + v3)]
    )
    t1 /= np.linalg.norm(t1, axis=1)[:, None]
    t2 /= np.linalg.norm(t2, axis=1)[:, None]

    xyz = np.outer(l3, v1) + np.outer(l4, v2) + np.outer(l2, v3) + np.outer(l1, v4)
    shift = np.zeros_like(xyz)
    face_bary = [
        (l1, l2, l3, l4),
        (l2, l1, l3, l4),
        (l3, l1, l4, l2),
        (l4, l1, l3, l2),
    ]
    for f, (la, lb, lc, ld) in enumerate(face_bary):
        warp1, warp2 = _eval_face_shift(order, alpha, lb, lc, ld)
        blend = lb * lc * ld
        denom = (lb + 0.5 * la) * (lc + 0.5 * la) * (ld + 0.5 * la)
        ok = denom > tol
        blend[ok] = (1.0 + (alpha * la[ok]) ** 2) * blend[ok] / denom[ok]
        shift += (blend * warp1)[:, None] * t1[f] + (blend * warp2)[:, None] * t2[f]
        # nodes on this face's edges take the pure tangential warp
        on_edge = (la < tol) & ((lb > tol).astype(int) + (lc > tol) + (ld > tol) < 3)
        shift[on_edge] = (
            warp1[on_edge, None] * t1[f] + warp2[on_edge, None] * t2[f]
        )
    xyz = xyz + shift

    # back from the equilateral frame to (r, s, t)
    rhs = xyz.T - 0.5 * (v2 + v3 + v4 - v1)[:, None]
    mat = np.column_stack([0.5 * (v2 - v1), 0.5 * (v3 - v1), 0.5 * (v4 - v1)])
    rst = np.linalg.solve(mat, rhs).T
    return rst[:, 0], rst[:, 1], rst[:, 2]


def _face_masks(order, r, s, t):
    """Volume-node indices on each reference face, in a fixed face order:
    t=-1, s=-1, r+s+t=-1, r=-1."""
    nfp = num_face_nodes(order)
    masks = [
        np.flatnonzero(np.abs(1.0 + t) < NODE_TOL),
        np.flatnonzero(np.abs(1.0 + s) < NODE_TOL),
        np.flatnonzero(np.abs(1.0 + r + s + t) < NODE_TOL),
        np.flatnonzero(np.abs(1.0 + r) < NODE_TOL),
    ]
    for f, m in enumerate(masks):
        if m.size != nfp:
            raise ConfigError(f"face {f} captured {m.size} nodes, expected {nfp}")
    return masks


@dataclass(frozen=True)
class ReferenceElement:
    """Operators of one order-N reference tetrahedron."""

    order: int
    num_nodes: int
    nodes: np.ndarray            # (Np, 3) nodal (r, s, t)
    vandermonde: np.ndarray      # (Np, Np)
    inv_vandermonde: np.ndarray  # (Np, Np)
    diff_r: np.ndarray           # (Np, Np)
    diff_s: np.ndarray
    diff_t: np.ndarray
    lift: np.ndarray             # (Np, 4*Nfp)
    face_node_ids: tuple         # 4 index arrays of length Nfp
    face_vandermonde: np.ndarray = field(repr=False, default=None)  # (Nfp, Nfp)

    @property
    def num_face_nodes(self):
        return num_face_nodes(self.order)

    @property
    def r(self):
        return self.nodes[:, 0]

    @property
    def s(self):
        return self.nodes[:, 1]

    @property
    def t(self):
        return self.nodes[:, 2]


def _build_lift(order, r, s, t, v3d, face_masks):
    """Surface-to-volume lift: inverse mass matrix times the four face mass
    matrices, each face parameterized by two of (r, s, t)."""
    np_nodes = v3d.shape[0]
    nfp = num_face_nodes(order)
    face_params = [(r, s), (r, t), (s, t), (s, t)]
    emat = np.zeros((np_nodes, 4 * nfp))
    vface0 = None
    for f, mask in enumerate(face_masks):
        fr = face_params[f][0][mask]
        fs = face_params[f][1][mask]
        vface = vandermonde_2d(order, fr, fs)
        mass_face = np.linalg.inv(vface @ vface.T)
        emat[np.ix_(mask, np.arange(f * nfp, (f + 1) * nfp))] += mass_face
        if f == 0:
            vface0 = vface
    return v3d @ (v3d.T @ emat), vface0


def build_reference_element(order):
    """Assemble all reference operators for one polynomial order."""
    if not isinstance(order, (int, np.integer)) or not 1 <= order <= MAX_ORDER:
        raise ConfigError(f"polynomial order must be an integer in [1, {MAX_ORDER}], got {order!r}")
    order = int(order)

    r, s, t = warped_nodes(order)
    v = vandermonde_3d(order, r, s, t)
    cond = np.linalg.cond(v)
    if not np.isfinite(cond) or cond > 1e10:
        raise ConfigError(f"degenerate node set at order {order}: cond(V) = {cond:.3e}")
    inv_v = np.linalg.inv(v)
    vr, vs, vt = grad_vandermonde_3d(order, r, s, t)
    diff_r = vr @ inv_v
    diff_s = vs @ inv_v
    diff_t = vt @ inv_v

    masks = _face_masks(order, r, s, t)
    lift, vface = _build_lift(order, r, s, t, v, masks)

    return ReferenceElement(
        order=order,
        num_nodes=num_volume_nodes(order),
        nodes=np.column_stack([r, s, t]),
        vandermonde=v,
        inv_vandermonde=inv_v,
        diff_r=diff_r,
        diff_s=diff_s,
        diff_t=diff_t,
        lift=lift,
        face_node_ids=tuple(masks),
        face_vandermonde=vface,
    )


def mass_matrix(elem):
    """Reference mass matrix, (V V^T)^{-1}; physical mass = J * this."""
    return np.linalg.inv(elem.vandermonde @ elem.vandermonde.T)


def face_mass_matrix(elem):
    """Mass matrix of one reference face (all faces share it up to the
    surface Jacobian)."""
    vf = elem.face_vandermonde
    return np.linalg.inv(vf @ vf.T)


def lift_matrix(elem):
    """Surface-to-volume lifting operator, shape (Np, 4*Nfp)."""
    return elem.lift
