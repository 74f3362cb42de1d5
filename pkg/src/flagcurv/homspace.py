"""Reductive homogeneous spaces G/H from subalgebra specifications.

A space stores the orthogonal splitting g = h + m for the invariant form,
a maximal torus of h with its integer weight data when available, and an
m-basis adapted to the root planes of g whenever the isotropy is spanned by
torus directions and whole root planes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .liealg import (
    LieAlgebra,
    _complex_to_real,
    _orthonormal_rows,
    _quat_to_real,
    _refine_invariant_planes,
    subalgebra_from_matrices,
    subalgebra_rank,
)


# ---------------------------------------------------------------------------
# subalgebra specifications
# ---------------------------------------------------------------------------


@dataclass
class SubalgebraSpec:
    """Isotropy specification: a list of generator pieces.

    Pieces: ("block", indices), ("circle", weights), ("sp1_block", index),
    ("explicit", matrices).  Indices are 1-based to match the usual
    block-subgroup notation.
    """

    pieces: list

    @staticmethod
    def block(*indices):
        return ("block", tuple(int(i) for i in indices))

    @staticmethod
    def circle(*weights):
        return ("circle", tuple(int(w) for w in weights))

    @staticmethod
    def sp1_block(index):
        return ("sp1_block", int(index))

    @staticmethod
    def explicit(matrices):
        return ("explicit", [np.asarray(m, dtype=float) for m in matrices])


def _block_generators(L, indices):
    """Sub-block of the same family on the given 1-based coordinates."""
    fam, n = L.family, L.n
    idx = [i - 1 for i in indices]
    if any(i < 0 or i >= n for i in idx) or len(set(idx)) != len(idx):
        raise ValueError("block indices out of range")
    mats = []
    if fam == "su":
        for a in range(len(idx)):
            for b in range(a + 1, len(idx)):
                i, j = idx[a], idx[b]
                A = np.zeros((n, n), dtype=complex)
                A[i, j] = 1.0
                A[j, i] = -1.0
                mats.append(_complex_to_real(A))
                B = np.zeros((n, n), dtype=complex)
                B[i, j] = 1j
                B[j, i] = 1j
                mats.append(_complex_to_real(B))
        for a in range(len(idx) - 1):
            D = np.zeros((n, n), dtype=complex)
            D[idx[a], idx[a]] = 1j
            D[idx[a + 1], idx[a + 1]] = -1j
            mats.append(_complex_to_real(D))
    elif fam == "sp":
        zero = np.zeros((n, n), dtype=complex)
        for a in range(len(idx)):
            for b in range(a + 1, len(idx)):
                i, j = idx[a], idx[b]
                for (A, B) in _sp_pair_units(n, i, j):
                    mats.append(_quat_to_real(A, B))
            i = idx[a]
            for (A, B) in _sp_diag_units(n, i):
                mats.append(_quat_to_real(A, B))
    elif fam == "so":
        for a in range(len(idx)):
            for b in range(a + 1, len(idx)):
                i, j = idx[a], idx[b]
                A = np.zeros((n, n))
                A[i, j] = 1.0
                A[j, i] = -1.0
                mats.append(A)
    else:
        raise ValueError("block pieces are only defined for su/sp/so")
    return mats


def _sp_pair_units(n, i, j):
    zero = np.zeros((n, n), dtype=complex)
    out = []
    A = zero.copy(); A[i, j] = 1.0; A[j, i] = -1.0
    out.append((A, zero))
    A = zero.copy(); A[i, j] = 1j; A[j, i] = 1j
    out.append((A, zero))
    B = zero.copy(); B[i, j] = 1.0; B[j, i] = 1.0
    out.append((zero, B))
    B = zero.copy(); B[i, j] = 1j; B[j, i] = 1j
    out.append((zero, B))
    return out


def _sp_diag_units(n, i):
    zero = np.zeros((n, n), dtype=complex)
    A = zero.copy(); A[i, i] = 1j
    B1 = zero.copy(); B1[i, i] = 1.0
    B2 = zero.copy(); B2[i, i] = 1j
    return [(A, zero), (zero, B1), (zero, B2)]


def _circle_generator(L, weights):
    """Torus generator of the circle with the given integer weights.

    Returns (matrix, weight vector, note).  su weights with nonzero sum are
    projected to the traceless part; the shift is recorded in the note.
    """
    fam, n = L.family, L.n
    weights = np.asarray(weights, dtype=float)
    if np.abs(weights - np.round(weights)).max() > 1e-9:
        raise ValueError("circle weights must be integers")
    w = np.round(weights).astype(int)
    note = None
    if fam == "su":
        if len(w) != n:
            raise ValueError("circle weights must have length %d for su(%d)" % (n, n))
        D = np.diag(1j * w.astype(float))
        tr = np.trace(D) / n
        if abs(tr.imag) > 0:
            note = "circle weights sum to %d; projected to the traceless part" % int(w.sum())
        D = D - tr * np.eye(n)
        return _complex_to_real(D), w, note
    if fam == "sp":
        if len(w) != n:
            raise ValueError("circle weights must have length %d for sp(%d)" % (n, n))
        A = np.diag(1j * w.astype(float))
        return _quat_to_real(A, np.zeros((n, n), dtype=complex)), w, note
    if fam == "so":
        r = n // 2
        if len(w) != r:
            raise ValueError("circle weights must have length %d for so(%d)" % (r, n))
        J = np.zeros((n, n))
        for k in range(r):
            J[2 * k, 2 * k + 1] = w[k]
            J[2 * k + 1, 2 * k] = -w[k]
        return J, w, note
    raise ValueError("circle pieces are only defined for su/sp/so")


def _intersect_spans(A, B, tol=1e-9):
    """Orthonormal basis of span(A) cap span(B) (rows)."""
    A = _orthonormal_rows(A)
    B = _orthonormal_rows(B)
    if A.shape[0] == 0 or B.shape[0] == 0:
        return np.zeros((0, A.shape[1] if A.size else B.shape[1]))
    M = A @ B.T
    U, S, Vt = np.linalg.svd(M, full_matrices=False)
    keep = S > 1.0 - tol
    if not keep.any():
        return np.zeros((0, A.shape[1]))
    return _orthonormal_rows(U[:, keep].T @ A)


# ---------------------------------------------------------------------------
# homogeneous space
# ---------------------------------------------------------------------------


@dataclass
class HomogeneousSpace:
    g: LieAlgebra
    h_basis: np.ndarray
    m_basis: np.ndarray
    rank_g: int
    rank_h: int
    t_h: np.ndarray
    t_h_raw: np.ndarray
    t_h_weights: list
    plane_slices: dict
    tm_slice: tuple
    adapted: bool
    notes: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim_h(self):
        return self.h_basis.shape[0]

    @property
    def dim_m(self):
        return self.m_basis.shape[0]

    # -- coordinates ---------------------------------------------------------

    def lift(self, u):
        """m-coordinates -> algebra coordinates."""
        return np.asarray(u, dtype=float) @ self.m_basis

    def project_m(self, x):
        return self.m_basis @ np.asarray(x, dtype=float)

    def project_h(self, x):
        return self.h_basis @ np.asarray(x, dtype=float)

    def m_bracket_tensor(self):
        """bm[i,j,k] with [m_i, m_j]_m = sum_k bm[i,j,k] m_k."""
        if "bm" not in self._cache:
            bg = self.full_bracket_tensor()
            self._cache["bm"] = np.einsum("ije,ke->ijk", bg, self.m_basis)
        return self._cache["bm"]

    def full_bracket_tensor(self):
        """bg[i,j,:] = algebra coordinates of [m_i, m_j]."""
        if "bg" not in self._cache:
            c = self.g.structure_constants
            M = self.m_basis
            self._cache["bg"] = np.einsum("abe,ia,jb->ije", c, M, M)
        return self._cache["bg"]

    def bracket_m(self, u, v):
        return np.einsum("ijk,i,j->k", self.m_bracket_tensor(), u, v)

    def bracket_full(self, u, v):
        return np.einsum("ije,i,j->e", self.full_bracket_tensor(), u, v)

    def m_vector(self, root=None, xy=(1.0, 0.0), vector=None):
        """Build an m-coordinate vector, either raw or as root-plane data."""
        if vector is not None:
            v = np.asarray(vector, dtype=float)
            if v.shape != (self.dim_m,):
                raise ValueError("raw vector must have length %d" % self.dim_m)
            return v
        if root is None:
            raise ValueError("either root or vector must be given")
        sl = self.root_plane_slice(root)
        v = np.zeros(self.dim_m)
        v[sl[0]] = xy[0]
        v[sl[0] + 1] = xy[1]
        return v

    def root_plane_slice(self, root):
        if not self.plane_slices:
            raise ValueError("space basis is not adapted to root planes")
        key = tuple(int(r) for r in root)
        if key in self.plane_slices:
            return self.plane_slices[key]
        neg = tuple(-r for r in key)
        if neg in self.plane_slices:
            return self.plane_slices[neg]
        raise KeyError("root plane %s is not contained in m" % (key,))

    def tm_basis(self):
        """Rows of the m-basis lying in the torus (adapted bases only)."""
        if self.tm_slice is None:
            raise ValueError("space basis is not adapted to root planes")
        s, k = self.tm_slice
        return self.m_basis[s : s + k]

    # -- group action ----------------------------------------------------------

    def ad_matrix(self, elt):
        """Ad(elt) acting on algebra coordinates, for a realized group matrix."""
        g = self.g
        conj = np.einsum("ij,ajk,kl->ail", elt, g.basis, elt.T)
        R = -g.kappa * np.einsum("aij,bji->ba", conj, g.basis)
        recon = np.einsum("ba,bjk->ajk", R, g.basis)
        res = np.abs(recon - conj).max()
        if res > 1e-8:
            raise ValueError("element does not act on the algebra (residual %.3e)" % res)
        return R

    def ad_on_m(self, elt):
        R = self.ad_matrix(elt)
        res = np.abs(self.h_basis @ R.T @ self.m_basis.T).max()
        if res > 1e-8:
            raise ValueError("element does not preserve the splitting (residual %.3e)" % res)
        return self.m_basis @ R @ self.m_basis.T

    def exp_isotropy(self, xi_h):
        """Ad(exp xi) on m-coordinates for xi given in h-coordinates."""
        xi = np.asarray(xi_h, dtype=float) @ self.h_basis
        A = self.g.ad(xi)
        return self.m_basis @ sla.expm(A) @ self.m_basis.T

    def sample_isotropy(self, count, seed=0):
        """Orthogonal matrices Ad(h)|_m for h sampled from H.

        Half the samples are torus points, half exponentials of generic
        isotropy directions.
        """
        rng = np.random.default_rng(seed)
        out = []
        nh = self.dim_h
        rt = self.t_h.shape[0]
        for k in range(count):
            if rt > 0 and k % 2 == 0:
                xi = (rng.integers(-3, 4, size=rt) + rng.random(rt)) @ self.t_h
            else:
                xi = rng.standard_normal(nh) @ self.h_basis
                xi *= rng.random() * np.pi / max(np.linalg.norm(xi), 1e-12)
            out.append(self.m_basis @ sla.expm(self.g.ad(xi)) @ self.m_basis.T)
        return out


def build_space(g, spec, name=None):
    """Assemble G/H data from an isotropy specification.

    Raises ValueError("not a subalgebra") when the generated span fails to
    close under the bracket.
    """
    if isinstance(spec, SubalgebraSpec):
        pieces = spec.pieces
    else:
        pieces = list(spec)
    notes = {}
    if name:
        notes["name"] = name
    gen_rows = []
    torus_rows = []
    torus_weights = []
    has_explicit = False
    for piece in pieces:
        kind = piece[0]
        if kind == "block":
            idx = piece[1]
            mats = _block_generators(g, idx)
            gen_rows.extend(g.from_matrix(m) for m in mats)
            torus_rows.extend(_block_torus(g, idx, torus_weights))
        elif kind == "circle":
            mat, w, note = _circle_generator(g, piece[1])
            row = g.from_matrix(mat)
            gen_rows.append(row)
            torus_rows.append(row)
            torus_weights.append(np.asarray(w, dtype=int))
            if note:
                notes.setdefault("circle", []).append(note)
        elif kind == "sp1_block":
            if g.family != "sp":
                raise ValueError("sp1_block pieces require an sp algebra")
            i = piece[1] - 1
            if i < 0 or i >= g.n:
                raise ValueError("sp1_block index out of range")
            units = _sp_diag_units(g.n, i)
            rows = [g.from_matrix(_quat_to_real(A, B)) for (A, B) in units]
            gen_rows.extend(rows)
            torus_rows.append(rows[0])  # the i-unit direction
            w = np.zeros(g.n, dtype=int)
            w[i] = 1
            torus_weights.append(w)
        elif kind == "explicit":
            has_explicit = True
            for m in piece[1]:
                gen_rows.append(g.from_matrix(np.asarray(m, dtype=float)))
        else:
            raise ValueError("unknown isotropy piece %r" % (kind,))

    if gen_rows:
        h_rows = _orthonormal_rows(np.stack(gen_rows))
    else:
        h_rows = np.zeros((0, g.dim))

    # closure under bracket
    for i in range(h_rows.shape[0]):
        for j in range(i + 1, h_rows.shape[0]):
            b = g.bracket(h_rows[i], h_rows[j])
            res = np.linalg.norm(b - h_rows.T @ (h_rows @ b))
            if res > 1e-8:
                raise ValueError("not a subalgebra (closure residual %.3e)" % res)

    rank_h = subalgebra_rank(g, h_rows) if h_rows.shape[0] else 0

    # maximal torus of h
    if torus_rows and not has_explicit:
        t_raw = np.stack(torus_rows)
        t_on = _orthonormal_rows(t_raw)
        weights = list(torus_weights)
    else:
        t_on = _numeric_torus(g, h_rows)
        t_raw = t_on.copy()
        weights = None
    if t_on.shape[0] != rank_h:
        t_on = _numeric_torus(g, h_rows)
        t_raw = t_on.copy()
        weights = None
        if t_on.shape[0] != rank_h:
            raise RuntimeError("failed to construct a maximal torus of the isotropy")

    space = _assemble_space(g, h_rows, rank_h, t_on, t_raw, weights, notes)
    return space


def _block_torus(g, idx, weights_out):
    """Torus generators of a block piece, appending their weight vectors."""
    fam, n = g.family, g.n
    rows = []
    if fam == "su":
        for a in range(len(idx) - 1):
            i, j = idx[a] - 1, idx[a + 1] - 1
            D = np.zeros((n, n), dtype=complex)
            D[i, i] = 1j
            D[j, j] = -1j
            rows.append(g.from_matrix(_complex_to_real(D)))
            w = np.zeros(n, dtype=int)
            w[i] = 1
            w[j] = -1
            weights_out.append(w)
    elif fam == "sp":
        for a in range(len(idx)):
            i = idx[a] - 1
            A = np.zeros((n, n), dtype=complex)
            A[i, i] = 1j
            rows.append(g.from_matrix(_quat_to_real(A, np.zeros((n, n), dtype=complex))))
            w = np.zeros(n, dtype=int)
            w[i] = 1
            weights_out.append(w)
    elif fam == "so":
        used = sorted(i - 1 for i in idx)
        k = 0
        while k + 1 < len(used):
            i, j = used[k], used[k + 1]
            if j == i + 1 and i % 2 == 0:
                J = np.zeros((n, n))
                J[i, j] = 1.0
                J[j, i] = -1.0
                rows.append(g.from_matrix(J))
                w = np.zeros(n // 2, dtype=int)
                w[i // 2] = 1
                weights_out.append(w)
                k += 2
            else:
                k += 1
    return rows


def _numeric_torus(g, h_rows, seed=97):
    from .liealg import _nested_centralizer_torus

    if h_rows.shape[0] == 0:
        return np.zeros((0, g.dim))
    return _nested_centralizer_torus(g, h_rows, seed=seed)


def _assemble_space(g, h_rows, rank_h, t_on, t_raw, weights, notes):
    dim = g.dim
    P_h = h_rows.T @ h_rows if h_rows.size else np.zeros((dim, dim))
    comp = _orthonormal_rows(np.eye(dim) - P_h, tol=1e-9)
    if comp.shape[0] != dim - h_rows.shape[0]:
        raise RuntimeError("complement dimension mismatch")

    plane_slices = {}
    tm_slice = None
    adapted = False
    m_rows = comp
    try:
        datum = g.root_datum()
    except (ValueError, RuntimeError):
        datum = None  # derived algebras carry no canonical torus
    if datum is not None:
        rows = []
        t_space = np.vstack([datum.zero_space]) if len(datum.zero_space) else np.zeros((0, dim))
        t_in_h = _intersect_spans(t_space, h_rows) if h_rows.size else np.zeros((0, dim))
        tm = _orthonormal_rows(t_space - (t_space @ t_in_h.T) @ t_in_h, tol=1e-9) if t_space.size else t_space
        ok = True
        slices = {}
        for k in range(datum.n_pairs):
            plane = datum.planes[k]
            in_h = np.linalg.norm(P_h @ plane)
            if in_h < 1e-9:
                continue
            if np.linalg.norm(plane - P_h @ plane) > 1e-9:
                ok = False
                break
        if ok:
            rows.extend(tm)
            tm_slice = (0, tm.shape[0])
            pos = tm.shape[0]
            for k in range(datum.n_pairs):
                plane = datum.planes[k]
                if np.linalg.norm(P_h @ plane) < 1e-9:
                    rows.append(plane[:, 0])
                    rows.append(plane[:, 1])
                    slices[tuple(int(r) for r in datum.roots[k])] = (pos, 2)
                    pos += 2
            if rows and len(rows) == dim - h_rows.shape[0]:
                m_rows = np.stack(rows)
                plane_slices = slices
                adapted = True
            else:
                tm_slice = None

    # invariance of the complement
    for i in range(h_rows.shape[0]):
        res = np.abs(m_rows @ g.ad(h_rows[i]).T @ h_rows.T).max() if h_rows.size else 0.0
        if res > 1e-8:
            raise RuntimeError("[h, m] is not contained in m (residual %.3e)" % res)

    space = HomogeneousSpace(
        g=g,
        h_basis=h_rows,
        m_basis=m_rows,
        rank_g=g.rank,
        rank_h=rank_h,
        t_h=t_on,
        t_h_raw=t_raw,
        t_h_weights=weights,
        plane_slices=plane_slices,
        tm_slice=tm_slice,
        adapted=adapted,
        notes=notes,
    )
    return space


# ---------------------------------------------------------------------------
# centralizers and fixed-point spaces
# ---------------------------------------------------------------------------


def diag_element(L, entries):
    """Realized diagonal group element from complex unit entries."""
    fam, n = L.family, L.n
    entries = [complex(z) for z in entries]
    if len(entries) != n:
        raise ValueError("expected %d diagonal entries" % n)
    if any(abs(abs(z) - 1.0) > 1e-12 for z in entries):
        raise ValueError("diagonal entries must have unit modulus")
    D = np.diag(np.asarray(entries, dtype=complex))
    if fam == "su":
        return _complex_to_real(D)
    if fam == "sp":
        return _quat_to_real(D, np.zeros((n, n), dtype=complex))
    if fam == "so":
        if any(abs(z.imag) > 1e-12 for z in entries):
            raise ValueError("so diagonal elements must be real +-1")
        return np.diag([z.real for z in entries])
    raise ValueError("diagonal elements are not defined for %r" % fam)


def centralizer_subalgebra(g, elt):
    """Basis of the fixed algebra of Ad(elt), as coordinate rows.

    elt must be orthogonal in the real realization and act on the algebra.
    """
    elt = np.asarray(elt, dtype=float)
    if elt.shape != g.basis[0].shape:
        raise ValueError("element has the wrong realization size")
    if np.abs(elt @ elt.T - np.eye(elt.shape[0])).max() > 1e-9:
        raise ValueError("element is not in the group (orthogonality check failed)")
    conj = np.einsum("ij,ajk,kl->ail", elt, g.basis, elt.T)
    R = -g.kappa * np.einsum("aij,bji->ba", conj, g.basis)
    recon = np.einsum("ba,bjk->ajk", R, g.basis)
    if np.abs(recon - conj).max() > 1e-8:
        raise ValueError("element is not in the group (the algebra is not preserved)")
    return _null_space_abs(R - np.eye(g.dim), tol=1e-9)


def _null_space_abs(A, tol=1e-9):
    """Null space rows with an absolute singular value cutoff."""
    U, S, Vt = np.linalg.svd(A, full_matrices=True)
    svals = np.zeros(Vt.shape[0])
    svals[: len(S)] = S
    return Vt[svals < tol]


def fixed_point_space(X, iota):
    """Homogeneous space carried by the fixed-point set of Ad(iota).

    The total algebra is the centralizer c(iota), the isotropy c(iota) cap h.
    Rank equalities and the parity of the codimension are recorded in the
    notes of the returned space.
    """
    g = X.g
    c_rows = centralizer_subalgebra(g, iota)
    R = X.ad_matrix(iota)
    pres = np.abs(X.m_basis @ R.T @ X.h_basis.T).max() if X.dim_h else 0.0
    if pres > 1e-8:
        raise ValueError("element does not normalize the isotropy (residual %.3e)" % pres)

    hi_rows = _intersect_spans(c_rows, X.h_basis) if X.dim_h else np.zeros((0, g.dim))

    mats = [g.to_matrix(r) for r in c_rows]
    Lc = subalgebra_from_matrices(g, mats, family="fix(%s)" % g.family)

    h_sub = [g.to_matrix(r) for r in hi_rows]
    spec = SubalgebraSpec(pieces=[SubalgebraSpec.explicit(h_sub)] if h_sub else [])
    sub = build_space(Lc, spec)

    rank_c = subalgebra_rank(g, c_rows)
    rank_hi = subalgebra_rank(g, hi_rows) if hi_rows.shape[0] else 0
    codim = X.dim_m - sub.dim_m
    sub.notes.update(
        {
            "fixed_point_of": "involution" if np.abs(iota @ iota - np.eye(iota.shape[0])).max() < 1e-9 else "element",
            "rank_total": rank_c,
            "rank_total_equals_rank_g": bool(rank_c == X.rank_g),
            "rank_isotropy": rank_hi,
            "rank_isotropy_equals_rank_h": bool(rank_hi == X.rank_h),
            "codimension": int(codim),
            "codimension_even": bool(codim % 2 == 0),
        }
    )
    return sub


# ---------------------------------------------------------------------------
# regularity
# ---------------------------------------------------------------------------


def _planes_for_torus(L, torus_rows, domain_rows):
    """Rotation planes of ad(torus) acting on the given invariant domain."""
    primes = [2, 3, 5, 7, 11, 13, 17, 19]
    torus_rows = np.atleast_2d(torus_rows)
    r = torus_rows.shape[0]
    if r == 0:
        return [], _orthonormal_rows(domain_rows)
    lam = np.sqrt(primes[:r])
    lam /= np.linalg.norm(lam)
    ops = [L.ad(lam @ torus_rows)] + [L.ad(t) for t in torus_rows]
    blocks = _refine_invariant_planes(ops, _orthonormal_rows(domain_rows))
    planes, zeros = [], []
    for blk in blocks:
        speed = max(np.abs(blk @ A @ blk.T).max() for A in ops)
        if speed < 1e-8:
            zeros.extend(blk)
        elif blk.shape[0] == 2:
            planes.append(blk)
        else:
            raise RuntimeError("torus refinement left a block of dimension %d" % blk.shape[0])
    zeros = np.stack(zeros) if zeros else np.zeros((0, L.dim))
    return planes, zeros


def is_regular_subalgebra(X):
    """Whether every root of h restricts from a root of g.

    Equivalent formulation used here: h is regular exactly when some
    maximal torus of g normalizes it.  The normalizer of h inside the
    centralizer of t_H is a subalgebra containing t_H; h is regular iff
    that normalizer has full rank.  When it does, a Cartan subalgebra of
    the normalizer aligns the root planes of g with those of h and the
    covector matching is listed in the report.  Returns (verdict, report).
    """
    g = X.g
    report = {}
    if X.dim_h == 0:
        report["matching"] = []
        report["vacuous"] = True
        return True, report

    # centralizer of t_H and the normalizer of h inside it
    if X.t_h.shape[0]:
        A = np.vstack([g.ad(t) for t in X.t_h])
        z_rows = _null_space_abs(A, tol=1e-9)
    else:
        z_rows = np.eye(g.dim)
    P_off = np.eye(g.dim) - X.h_basis.T @ X.h_basis
    cols = []
    for za in z_rows:
        img = np.concatenate([P_off @ g.bracket(za, hb) for hb in X.h_basis])
        cols.append(img)
    M = np.stack(cols, axis=1)
    null = _null_space_abs(M, tol=1e-8)
    n_rows = _orthonormal_rows(null @ z_rows) if null.shape[0] else np.zeros((0, g.dim))
    rank_norm = subalgebra_rank(g, n_rows) if n_rows.shape[0] else 0
    regular = rank_norm == g.rank
    report["normalizer_rank"] = int(rank_norm)
    report["rank_required"] = int(g.rank)

    h_planes, _ = _planes_for_torus(g, X.t_h, X.h_basis)
    if not h_planes:
        report["matching"] = []
        report["vacuous"] = True
        return regular, report
    report["vacuous"] = False

    matching = []
    if regular:
        t_g = _cartan_within(g, n_rows, X.t_h)
        report["torus_extension_dim"] = int(t_g.shape[0])
        g_planes, _ = _planes_for_torus(g, t_g, np.eye(g.dim))
        for hp in h_planes:
            beta = [float(hp[1] @ g.ad(t) @ hp[0]) for t in X.t_h]
            best = None
            for gp in g_planes:
                s = np.linalg.svd(hp @ gp.T, compute_uv=False)
                if s.min() > 1.0 - 1e-8:
                    best = [float(gp[1] @ g.ad(t) @ gp[0]) for t in X.t_h]
                    break
            matching.append({"h_root": beta, "g_restriction": best})
        if any(m["g_restriction"] is None for m in matching):
            regular = False
    else:
        for hp in h_planes:
            beta = [float(hp[1] @ g.ad(t) @ hp[0]) for t in X.t_h]
            matching.append({"h_root": beta, "g_restriction": None})
    report["matching"] = matching
    return regular, report


def _cartan_within(g, span_rows, start_rows, seed=311):
    """Maximal torus of the subalgebra spanned by span_rows, containing the
    abelian start_rows."""
    rng = np.random.default_rng(seed)
    torus = _orthonormal_rows(start_rows)
    for _ in range(g.dim):
        A = np.vstack([g.ad(t) for t in torus]) if torus.shape[0] else np.zeros((1, g.dim))
        cent = _null_space_abs(A, tol=1e-9)
        cand = _intersect_spans(cent, span_rows)
        cand = _orthonormal_rows(cand - (cand @ torus.T) @ torus, tol=1e-9) if cand.size else cand
        if cand.shape[0] == 0:
            break
        x = rng.standard_normal(cand.shape[0]) @ cand
        x /= np.linalg.norm(x)
        B = cand @ g.ad(x) @ cand.T
        inner = _orthonormal_rows(_null_space_abs(B, tol=1e-9) @ cand)
        pick = inner[0] if inner.shape[0] else x
        torus = _orthonormal_rows(np.vstack([torus, pick]))
    return torus


# ---------------------------------------------------------------------------
# isotropy decompositions and invariant blocks
# ---------------------------------------------------------------------------


@dataclass
class InvariantDecomposition:
    summands: list
    signatures: list
    labels: list

    def dims(self):
        return [s.shape[0] for s in self.summands]


def isotropy_invariant_decomposition(X):
    """Split m into ad(t_H)-weight subspaces merged by equal signature.

    Signatures are integer vectors of rotation speeds against the raw torus
    generators of H (exact integers when the isotropy carries lattice data);
    summands are m-coordinate row bases, the zero summand first, the rest in
    ascending signature order.
    """
    g = X.g
    rt = X.t_h_raw.shape[0]
    nm = X.dim_m
    if rt == 0:
        return InvariantDecomposition([np.eye(nm)], [tuple([0] * 0)], ["m0"])
    ops = [X.m_basis @ g.ad(t) @ X.m_basis.T for t in X.t_h_raw]
    primes = [2, 3, 5, 7, 11, 13, 17, 19]
    lam = np.sqrt(primes[:rt])
    lam /= np.linalg.norm(lam)
    lead = np.einsum("i,ijk->jk", lam, np.stack(ops))
    blocks = _refine_invariant_planes([lead] + ops, np.eye(nm))

    entries = []
    zero_rows = []
    for blk in blocks:
        rest = [blk @ A @ blk.T for A in ops]
        if max(np.abs(R).max() for R in rest) < 1e-8:
            zero_rows.extend(blk)
            continue
        # all planes in the block share one signature up to global sign;
        # measure it coherently on a single invariant plane inside
        Rl = blk @ lead @ blk.T
        T, Z = sla.schur(Rl, output="real")
        x, y = Z[:, 0], Z[:, 1]
        speeds = np.array([float(y @ R @ x) for R in rest])
        entries.append((speeds, blk))

    # integer signatures; weights from lattice-backed generators are already
    # integral, otherwise rescale globally by the smallest nonzero speed
    all_speeds = np.concatenate([np.abs(sig) for sig, _ in entries]) if entries else np.array([1.0])
    raw = np.abs(np.concatenate([sig for sig, _ in entries])) if entries else np.array([1.0])
    if np.abs(raw - np.round(raw)).max() > 1e-6:
        scale = all_speeds[all_speeds > 1e-8].min()
    else:
        scale = 1.0

    def canonical(sig):
        ints = np.round(sig / scale)
        if np.abs(sig / scale - ints).max() > 1e-6:
            raise RuntimeError("non-integral weight signature %s" % sig)
        ints = ints.astype(int)
        nz = ints[ints != 0]
        if len(nz) and nz[0] < 0:
            ints = -ints
        return tuple(ints)

    groups = {}
    for sig, blk in entries:
        key = canonical(sig)
        groups.setdefault(key, []).append(blk)

    summands = []
    signatures = []
    if zero_rows:
        summands.append(_orthonormal_rows(np.stack(zero_rows)))
        signatures.append(tuple([0] * rt))
    for key in sorted(groups):
        summands.append(_orthonormal_rows(np.vstack(groups[key])))
        signatures.append(key)
    labels = ["m%d" % k for k in range(len(summands))]
    return InvariantDecomposition(summands, signatures, labels)


def ad_rotation_speeds(X, torus_weights, datum=None):
    """Integer rotation speeds of Ad of a weighted circle on the m root planes.

    torus_weights is an integer vector in the lattice of the canonical torus
    of g; the speed on the plane of root alpha is |alpha . w|, computed in
    integer arithmetic.  Returns (root tuple, label, speed) triples in
    canonical root order.
    """
    if datum is None:
        datum = X.g.root_datum()
    w = np.asarray(torus_weights, dtype=float)
    if np.abs(w - np.round(w)).max() > 1e-9:
        raise ValueError("torus element is outside the integer lattice")
    w = np.round(w).astype(int)
    if w.shape != (datum.lattice.shape[0],):
        raise ValueError("expected %d weights" % datum.lattice.shape[0])
    P_h = X.h_basis.T @ X.h_basis if X.dim_h else np.zeros((X.g.dim, X.g.dim))
    out = []
    for k in range(datum.n_pairs):
        plane = datum.planes[k]
        if np.linalg.norm(P_h @ plane) > 1e-9:
            if np.linalg.norm(plane - P_h @ plane) > 1e-9:
                raise ValueError("root plane %s straddles the splitting" % (tuple(datum.roots[k]),))
            continue
        speed = int(abs(int(datum.roots[k] @ w)))
        out.append((tuple(int(r) for r in datum.roots[k]), datum.label(k), speed))
    return out


def invariant_blocks(X, seed=0):
    """Finest Ad(H)-invariant orthogonal splitting of m, via the commutant.

    Solves for all symmetric matrices commuting with every ad(h)|_m and
    takes eigenspaces of a seeded generic element; each returned block is an
    exactly invariant subspace (rows in m-coordinates).
    """
    nm = X.dim_m
    if X.dim_h == 0:
        return [np.eye(nm)]
    ops = [X.m_basis @ X.g.ad(h) @ X.m_basis.T for h in X.h_basis]
    iu = np.triu_indices(nm)
    k = len(iu[0])

    def unpack(vec):
        S = np.zeros((nm, nm))
        S[iu] = vec
        S = S + S.T - np.diag(np.diag(S))
        return S

    # commutator [S, A] as a linear map of the packed symmetric vector
    mat = np.zeros((len(ops) * nm * nm, k))
    for col in range(k):
        e = np.zeros(k)
        e[col] = 1.0
        S = unpack(e)
        block = np.concatenate([(S @ A - A @ S).ravel() for A in ops])
        mat[:, col] = block
    null = sla.null_space(mat, rcond=1e-10)
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal(null.shape[1])
    S = unpack(null @ coeffs)
    S = 0.5 * (S + S.T)
    vals, vecs = np.linalg.eigh(S)
    spread = max(vals.max() - vals.min(), 1.0)
    blocks = []
    start = 0
    for i in range(1, nm + 1):
        if i == nm or vals[i] - vals[i - 1] > 1e-6 * spread:
            blocks.append(vecs[:, start:i].T.copy())
            start = i
    for blk in blocks:
        for A in ops:
            off = np.abs((np.eye(nm) - blk.T @ blk) @ (A @ blk.T)).max()
            if off > 1e-9:
                raise RuntimeError("commutant block is not invariant (residual %.3e)" % off)
    return blocks
