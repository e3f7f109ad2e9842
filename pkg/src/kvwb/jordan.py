"""Euclidean Jordan algebras: catalog, symmetric-cone checks, and recovery.

The catalog covers the classical families at desk scale — real symmetric,
complex hermitian, quaternionic hermitian (as doubled complex blocks), spin
factors, and direct sums — with exact rational product tensors.  The
recovery solver goes the other way: given a cone, a positive-definite
orthogonalizing form, a unit, and symmetry generators, it solves the linear
constraints a Jordan product must satisfy and then polishes the quadratic
Jordan identity by Gauss-Newton from several seeds.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .linalg import (ONE, ZERO, Mat, Vec, frac, is_positive_definite)


# ---------------------------------------------------------------------------
# exact complex matrices as (real, imaginary) rational pairs

def _zmat(n):
    z = [[Fraction(0)] * n for _ in range(n)]
    return z


def _cm(re=None, im=None, n=None):
    if re is None:
        re = _zmat(n)
    if im is None:
        im = _zmat(len(re))
    return (re, im)


def _cm_add(A, B):
    n = len(A[0])
    return ([[A[0][i][j] + B[0][i][j] for j in range(n)] for i in range(n)],
            [[A[1][i][j] + B[1][i][j] for j in range(n)] for i in range(n)])


def _cm_scale(c, A):
    n = len(A[0])
    return ([[c * A[0][i][j] for j in range(n)] for i in range(n)],
            [[c * A[1][i][j] for j in range(n)] for i in range(n)])


def _cm_mul(A, B):
    n = len(A[0])
    re = [[sum(A[0][i][k] * B[0][k][j] - A[1][i][k] * B[1][k][j]
               for k in range(n)) for j in range(n)] for i in range(n)]
    im = [[sum(A[0][i][k] * B[1][k][j] + A[1][i][k] * B[0][k][j]
               for k in range(n)) for j in range(n)] for i in range(n)]
    return (re, im)


def _cm_dagger(A):
    n = len(A[0])
    return ([[A[0][j][i] for j in range(n)] for i in range(n)],
            [[-A[1][j][i] for j in range(n)] for i in range(n)])


def _cm_hs(A, B):
    """Real Hilbert-Schmidt pairing Re tr(A^dagger B) — exact."""
    n = len(A[0])
    Ad = _cm_dagger(A)
    tot = Fraction(0)
    for i in range(n):
        for k in range(n):
            tot += Ad[0][i][k] * B[0][k][i] - Ad[1][i][k] * B[1][k][i]
    return tot


def _cm_to_numpy(A) -> np.ndarray:
    return (np.array(A[0], dtype=float) + 1j * np.array(A[1], dtype=float))


# ---------------------------------------------------------------------------
# the algebra type

@dataclass(eq=False)
class JordanAlgebra:
    """Product tensor T[i][j] = coordinates of e_i ∘ e_j."""

    kind: str
    dim: int
    unit: list
    tensor: object                       # nested Fractions or np (d,d,d)
    exact: bool
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self._np_tensor = None

    @property
    def np_tensor(self) -> np.ndarray:
        if self._np_tensor is None:
            if self.exact:
                d = self.dim
                self._np_tensor = np.array(
                    [[[float(self.tensor[i][j][k]) for k in range(d)]
                      for j in range(d)] for i in range(d)])
            else:
                self._np_tensor = np.asarray(self.tensor, dtype=float)
        return self._np_tensor

    def product(self, a, b):
        if self.exact and all(isinstance(v, (Fraction, int)) for v in a) \
                and all(isinstance(v, (Fraction, int)) for v in b):
            d = self.dim
            out = [Fraction(0)] * d
            for i in range(d):
                if a[i] == 0:
                    continue
                for j in range(d):
                    if b[j] == 0:
                        continue
                    c = frac(a[i]) * frac(b[j])
                    row = self.tensor[i][j]
                    for k in range(d):
                        if row[k]:
                            out[k] += c * row[k]
            return out
        return np.einsum("i,j,ijk->k", np.asarray(a, float),
                         np.asarray(b, float), self.np_tensor)

    def left_mult(self, a) -> np.ndarray:
        """Matrix of b -> a∘b (float)."""
        return np.einsum("i,ijk->kj", np.asarray(a, float), self.np_tensor)

    def unit_float(self) -> np.ndarray:
        return np.asarray([float(v) for v in self.unit])


def jordan_product(J: JordanAlgebra, a, b):
    return J.product(a, b)


def quadratic_rep(J: JordanAlgebra, a) -> np.ndarray:
    """P(a) = 2 L_a^2 - L_{a∘a}."""
    La = J.left_mult(a)
    La2 = J.left_mult(J.product(a, a))
    return 2 * (La @ La) - La2


def trace_form_gram(J: JordanAlgebra):
    """Gram matrix of (a,b) -> tr L_{a∘b} on the coordinate basis."""
    d = J.dim
    if J.exact:
        G = [[Fraction(0)] * d for _ in range(d)]
        for i in range(d):
            for j in range(i, d):
                prod = J.tensor[i][j]
                # trace of L_prod: sum_k (e_prod ∘ e_k)_k
                tot = Fraction(0)
                for m in range(d):
                    if prod[m] == 0:
                        continue
                    for k in range(d):
                        tot += prod[m] * J.tensor[m][k][k]
                G[i][j] = G[j][i] = tot
        return G
    T = J.np_tensor
    tr_L = np.einsum("mkk->m", T)       # trace of L_{e_m}
    G = np.einsum("ijm,m->ij", T, tr_L)
    return (G + G.T) / 2


# ---------------------------------------------------------------------------
# catalog constructors

def _matrix_kind(kind: str, n: int, basis_cm: list, labels: list
                 ) -> JordanAlgebra:
    """Common path: exact tensor from symmetrized products over a basis
    orthogonal under the real Hilbert-Schmidt pairing."""
    d = len(basis_cm)
    norms = [_cm_hs(B, B) for B in basis_cm]
    half = Fraction(1, 2)

    def expand(X):
        return [_cm_hs(basis_cm[k], X) / norms[k] for k in range(d)]

    tensor = []
    for i in range(d):
        row = []
        for j in range(d):
            prod = _cm_scale(half, _cm_add(_cm_mul(basis_cm[i], basis_cm[j]),
                                           _cm_mul(basis_cm[j], basis_cm[i])))
            row.append(expand(prod))
        tensor.append(row)
    ident = _cm(re=[[ONE if i == j else ZERO for j in range(len(basis_cm[0][0]))]
                    for i in range(len(basis_cm[0][0]))])
    unit = expand(ident)
    return JordanAlgebra(kind, d, unit, tensor, True,
                         params={"n": n, "basis": basis_cm, "labels": labels})


def real_symmetric(n: int) -> JordanAlgebra:
    """Symmetric n x n real matrices with the symmetrized product."""
    basis, labels = [], []
    for i in range(n):
        re = _zmat(n)
        re[i][i] = ONE
        basis.append(_cm(re=re))
        labels.append(f"E{i}{i}")
    for i in range(n):
        for j in range(i + 1, n):
            re = _zmat(n)
            re[i][j] = re[j][i] = ONE
            basis.append(_cm(re=re))
            labels.append(f"S{i}{j}")
    return _matrix_kind(f"RealSym({n})", n, basis, labels)


def complex_hermitian(n: int) -> JordanAlgebra:
    """Hermitian n x n complex matrices with the symmetrized product."""
    basis, labels = [], []
    for i in range(n):
        re = _zmat(n)
        re[i][i] = ONE
        basis.append(_cm(re=re))
        labels.append(f"E{i}{i}")
    for i in range(n):
        for j in range(i + 1, n):
            re = _zmat(n)
            re[i][j] = re[j][i] = ONE
            basis.append(_cm(re=re))
            labels.append(f"S{i}{j}")
            im = _zmat(n)
            im[i][j] = ONE
            im[j][i] = -ONE
            basis.append(_cm(im=im, n=n))
            labels.append(f"A{i}{j}")
    return _matrix_kind(f"ComplexHerm({n})", n, basis, labels)


def _quat_block(q: str, n: int, i: int, j: int):
    """Hermitian matrix with quaternion unit q at (i,j), conjugate at (j,i),
    embedded as a 2n x 2n complex matrix."""
    re, im = _zmat(2 * n), _zmat(2 * n)
    # block (i,j) gets the 2x2 image of q; block (j,i) its conjugate-transpose
    r, c = 2 * i, 2 * j
    if q == "1":
        re[r][c] = re[r + 1][c + 1] = ONE
        re[c][r] = re[c + 1][r + 1] = ONE
    elif q == "i":
        im[r][c] = ONE
        im[r + 1][c + 1] = -ONE
        im[c][r] = -ONE
        im[c + 1][r + 1] = ONE
    elif q == "j":
        re[r][c + 1] = ONE
        re[r + 1][c] = -ONE
        re[c + 1][r] = ONE
        re[c][r + 1] = -ONE
    elif q == "k":
        im[r][c + 1] = ONE
        im[r + 1][c] = ONE
        im[c + 1][r] = -ONE
        im[c][r + 1] = -ONE
    return (re, im)


def quaternionic_hermitian(n: int) -> JordanAlgebra:
    """Hermitian n x n quaternionic matrices, doubled into complex blocks."""
    basis, labels = [], []
    for i in range(n):
        re = _zmat(2 * n)
        re[2 * i][2 * i] = re[2 * i + 1][2 * i + 1] = ONE
        basis.append(_cm(re=re))
        labels.append(f"E{i}{i}")
    for i in range(n):
        for j in range(i + 1, n):
            for q in "1ijk":
                basis.append(_quat_block(q, n, i, j))
                labels.append(f"Q{q}{i}{j}")
    return _matrix_kind(f"QuatHerm({n})", n, basis, labels)


def spin_factor(n: int) -> JordanAlgebra:
    """R^n + R with (x,s)∘(y,t) = (t x + s y, <x,y> + s t); unit (0,1)."""
    d = n + 1
    tensor = []
    for i in range(d):
        row = []
        for j in range(d):
            out = [Fraction(0)] * d
            if i < n and j < n:
                out[n] = ONE if i == j else ZERO
            elif i == n and j == n:
                out[n] = ONE
            elif i == n:
                out[j] = ONE
            else:
                out[i] = ONE
            row.append(out)
        tensor.append(row)
    unit = [Fraction(0)] * n + [ONE]
    return JordanAlgebra(f"SpinFactor({n})", d, unit, tensor, True,
                         params={"n": n})


def real_line() -> JordanAlgebra:
    return JordanAlgebra("RealSym(1)", 1, [ONE], [[[ONE]]], True,
                         params={"n": 1})


def direct_sum(parts: list[JordanAlgebra]) -> JordanAlgebra:
    if not all(p.exact for p in parts):
        raise ValueError("direct sums are built from exact catalog algebras")
    offs, d = [], 0
    for p in parts:
        offs.append(d)
        d += p.dim
    tensor = [[[Fraction(0)] * d for _ in range(d)] for _ in range(d)]
    unit = [Fraction(0)] * d
    for p, o in zip(parts, offs):
        for i in range(p.dim):
            unit[o + i] = p.unit[i]
            for j in range(p.dim):
                for k in range(p.dim):
                    tensor[o + i][o + j][o + k] = p.tensor[i][j][k]
    kind = "DirectSum(" + ", ".join(p.kind for p in parts) + ")"
    return JordanAlgebra(kind, d, unit, tensor, True,
                         params={"parts": parts, "offsets": offs})


def classical_algebra(n: int) -> JordanAlgebra:
    """R^n with the componentwise product."""
    return direct_sum([real_line() for _ in range(n)])


CATALOG = {
    "RealSym": real_symmetric,
    "ComplexHerm": complex_hermitian,
    "QuatHerm": quaternionic_hermitian,
    "SpinFactor": spin_factor,
}


# ---------------------------------------------------------------------------
# cone of squares membership

def cone_of_squares_membership(J: JordanAlgebra, a, tol: float = 1e-9) -> bool:
    if J.kind.startswith("DirectSum"):
        parts, offs = J.params["parts"], J.params["offsets"]
        return all(cone_of_squares_membership(
            p, list(a)[o:o + p.dim], tol) for p, o in zip(parts, offs))
    if J.kind.startswith("SpinFactor"):
        n = J.params["n"]
        x, s = list(a)[:n], a[n]
        if all(isinstance(v, (Fraction, int)) for v in a):
            return frac(s) >= 0 and frac(s) ** 2 >= sum(frac(v) ** 2 for v in x)
        return float(s) >= -tol and float(s) ** 2 + tol >= sum(
            float(v) ** 2 for v in x)
    if J.kind == "RealSym(1)":
        return (frac(a[0]) >= 0 if isinstance(a[0], (Fraction, int))
                else float(a[0]) >= -tol)
    if "basis" in J.params:
        M = _reconstruct(J, a)
        return float(np.linalg.eigvalsh(M).min()) >= -tol
    # No structural description (e.g. a recovered product): fall back to the
    # spectral test — an element lies in the closed cone of squares exactly
    # when its eigenvalues are nonnegative.
    eigs, _ = spectral_decomposition(J, np.asarray(a, dtype=float))
    return min(eigs) >= -max(tol, 1e-7)


def _reconstruct(J: JordanAlgebra, a) -> np.ndarray:
    mats = J.params.setdefault(
        "np_basis", [_cm_to_numpy(B) for B in J.params["basis"]])
    M = sum(float(c) * B for c, B in zip(a, mats))
    return (M + M.conj().T) / 2


# ---------------------------------------------------------------------------
# spectral machinery (tensor-only, works for any kind)

def jordan_powers(J: JordanAlgebra, a, upto: int) -> list[np.ndarray]:
    out = [J.unit_float(), np.asarray(a, float)]
    for _ in range(upto - 1):
        out.append(np.einsum("i,j,ijk->k", np.asarray(a, float), out[-1],
                             J.np_tensor))
    return out


def minimal_polynomial_degree(J: JordanAlgebra, a, tol: float = 1e-8) -> int:
    pows = jordan_powers(J, a, J.dim)
    for k in range(1, J.dim + 1):
        M = np.array(pows[:k + 1])
        if np.linalg.matrix_rank(M, tol=tol * max(1.0, np.abs(M).max())) <= k:
            return k
    return J.dim


def generic_rank(J: JordanAlgebra, seed: int = 42, trials: int = 5) -> int:
    """Degree of the minimal polynomial of a generic element.

    For a Euclidean Jordan algebra this is the rank; several random draws
    guard against an unlucky non-generic sample (the max is generic).
    """
    rng = np.random.default_rng(seed)
    best = 0
    for _ in range(trials):
        a = rng.standard_normal(J.dim)
        best = max(best, minimal_polynomial_degree(J, a))
    return best


def spectral_decomposition(J: JordanAlgebra, w, tol: float = 1e-8):
    """Eigenvalues and spectral idempotents of w via its minimal polynomial.

    Power associativity makes the subalgebra generated by w commutative and
    associative, so Lagrange interpolation on Jordan powers produces the
    spectral projections.
    """
    w = np.asarray(w, float)
    deg = minimal_polynomial_degree(J, w)
    pows = jordan_powers(J, w, deg)
    M = np.array(pows[:deg]).T
    coeffs, *_ = np.linalg.lstsq(M, pows[deg], rcond=None)
    poly = np.concatenate([[1.0], -coeffs[::-1]])     # monic, high power first
    roots = np.roots(poly)
    if np.abs(roots.imag).max(initial=0.0) > 1e-6:
        raise ArithmeticError("complex eigenvalues in a formally real algebra "
                              f"(imag {np.abs(roots.imag).max():.2e})")
    lams = np.sort(roots.real)
    # Lagrange interpolation is badly conditioned when eigenvalues are close,
    # so nearly coincident roots are merged into one node first, and every
    # projector is then purified with f <- 3f^2 - 2f^3 (quadratic convergence
    # to the idempotent with the same spectral support).
    scale = max(1.0, float(np.abs(lams).max()))
    clusters: list[list[float]] = []
    for l in lams:
        if clusters and l - clusters[-1][-1] <= 1e-6 * scale:
            clusters[-1].append(float(l))
        else:
            clusters.append([float(l)])
    reps = np.array([sum(c) / len(c) for c in clusters])
    idems = []
    for i, li in enumerate(reps):
        f = J.unit_float()
        for j, lj in enumerate(reps):
            if i == j:
                continue
            f = (np.einsum("i,j,ijk->k", f, w - lj * J.unit_float(),
                           J.np_tensor)) / (li - lj)
        for _ in range(2):
            f2 = np.einsum("i,j,ijk->k", f, f, J.np_tensor)
            f3 = np.einsum("i,j,ijk->k", f, f2, J.np_tensor)
            f = 3.0 * f2 - 2.0 * f3
        idems.append(f)
    return reps, idems


def jordan_sqrt(J: JordanAlgebra, w, tol: float = 1e-9) -> np.ndarray:
    """Square root of an interior element.

    Babylonian iteration s <- (s + L_s^{-1} w) / 2, seeded at sqrt(lam_max)
    times the unit.  The iterates stay in the associative subalgebra
    generated by w, where the recursion is the scalar one per eigenvalue,
    so convergence needs no spectral projectors — only the (possibly
    ill-conditioned) eigenvalues themselves, used for the seed and the
    negativity screen.
    """
    w = np.asarray(w, float)
    lams, _ = spectral_decomposition(J, w)
    if lams.min() < -1e-6:
        raise ArithmeticError(f"element not in the cone (eig {lams.min():.2e})")
    scale = max(1.0, float(np.abs(w).max()))
    s = np.sqrt(max(float(lams.max()), 1e-12)) * J.unit_float()
    err = np.inf
    for _ in range(80):
        s = 0.5 * (s + np.linalg.solve(J.left_mult(s), w))
        err = float(np.abs(np.einsum("i,j,ijk->k", s, s, J.np_tensor)
                           - w).max())
        if err <= 1e-12 * scale:
            break
    if err > 1e-7 * scale:
        raise ArithmeticError(f"square root iteration stalled (error {err:.2e})")
    return s


# ---------------------------------------------------------------------------
# forward verification: is the cone of squares a symmetric cone?

@dataclass
class SymmetricConeReport:
    ok: bool
    identity_ok: Optional[bool] = None
    commutative_ok: Optional[bool] = None
    unit_ok: Optional[bool] = None
    trace_form_pd: Optional[bool] = None
    self_duality_ok: Optional[bool] = None
    homogeneity_ok: Optional[bool] = None
    max_homogeneity_error: Optional[float] = None
    min_pairing: Optional[float] = None
    failures: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    seed: int = 42


def _random_rational_vec(rng, d) -> list:
    return [Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4)))
            for _ in range(d)]


def _identity_residual(J: JordanAlgebra, a, b):
    a2 = J.product(a, a)
    lhs = J.product(a2, J.product(b, a))
    rhs = J.product(J.product(a2, b), a)
    if J.exact and isinstance(lhs[0], Fraction):
        return max(abs(x - y) for x, y in zip(lhs, rhs))
    return float(np.abs(np.asarray(lhs, float) - np.asarray(rhs, float)).max())


def verify_symmetric_cone(J: JordanAlgebra, sample_count: int = 50,
                          seed: int = 42, tol: float = 1e-9
                          ) -> SymmetricConeReport:
    """Gate order: Jordan axioms, formal reality, self-duality samples,
    homogeneity witnesses.  A failed axiom gate stops the later checks."""
    rep = SymmetricConeReport(ok=False, seed=seed)
    rng = np.random.default_rng(seed)
    d = J.dim

    # gate 1: axioms (exact where the tensor is exact)
    if J.exact:
        comm = all(J.tensor[i][j] == J.tensor[j][i]
                   for i in range(d) for j in range(d))
        unit_ok = all(J.product(J.unit, [ONE if t == j else ZERO
                                         for t in range(d)])
                      == [ONE if t == j else ZERO for t in range(d)]
                      for j in range(d))
        worst = max(_identity_residual(J, _random_rational_vec(rng, d),
                                       _random_rational_vec(rng, d))
                    for _ in range(max(10, sample_count // 5)))
        ident = worst == 0
    else:
        T = J.np_tensor
        comm = float(np.abs(T - T.transpose(1, 0, 2)).max()) <= tol
        u = J.unit_float()
        unit_ok = float(np.abs(J.left_mult(u) - np.eye(d)).max()) <= 1e-8
        worst = max(_identity_residual(J, rng.standard_normal(d),
                                       rng.standard_normal(d))
                    for _ in range(max(10, sample_count // 5)))
        ident = worst <= 1e-8
    rep.commutative_ok, rep.unit_ok, rep.identity_ok = comm, unit_ok, ident
    if not (comm and unit_ok and ident):
        rep.failures.append({"gate": "jordan-axioms",
                             "identity_residual": (str(worst) if J.exact
                                                   else float(worst))})
        return rep

    # gate 2: formal reality via the trace form
    G = trace_form_gram(J)
    if J.exact:
        rep.trace_form_pd = is_positive_definite(G)
    else:
        rep.trace_form_pd = bool(np.linalg.eigvalsh(np.asarray(G)).min() > tol)
    if not rep.trace_form_pd:
        rep.failures.append({"gate": "trace-form-pd"})
        return rep
    Gf = np.array([[float(G[i][j]) for j in range(d)] for i in range(d)]) \
        if J.exact else np.asarray(G)

    # gate 3: self-duality samples — squares pair non-negatively, and the
    # spectral idempotents of random elements pair non-negatively too
    min_pair = np.inf
    for _ in range(sample_count):
        x = rng.standard_normal(d)
        y = rng.standard_normal(d)
        x2 = np.einsum("i,j,ijk->k", x, x, J.np_tensor)
        y2 = np.einsum("i,j,ijk->k", y, y, J.np_tensor)
        min_pair = min(min_pair, float(x2 @ Gf @ y2))
        if _ % 10 == 0:
            _, idems = spectral_decomposition(J, x2 + 0.1 * J.unit_float())
            for p, q in itertools.combinations(idems, 2):
                min_pair = min(min_pair, float(p @ Gf @ q))
    rep.min_pairing = min_pair
    rep.self_duality_ok = min_pair >= -tol
    if not rep.self_duality_ok:
        rep.failures.append({"gate": "self-duality", "min_pairing": min_pair})
        return rep

    # gate 4: homogeneity witnesses P(w^{1/2}) e = w on random interior w
    worst_h = 0.0
    u = J.unit_float()
    try:
        for _ in range(sample_count):
            x = rng.standard_normal(d)
            w = np.einsum("i,j,ijk->k", x, x, J.np_tensor) + \
                (0.2 + rng.random()) * u
            s = jordan_sqrt(J, w)
            got = quadratic_rep(J, s) @ u
            worst_h = max(worst_h, float(np.abs(got - w).max()))
            y = rng.standard_normal(d)
            y2 = np.einsum("i,j,ijk->k", y, y, J.np_tensor)
            mapped = quadratic_rep(J, s) @ y2
            if not cone_of_squares_membership(J, mapped, tol=1e-7):
                rep.failures.append({"gate": "homogeneity-cone-preservation"})
    except ArithmeticError as e:
        rep.failures.append({"gate": "homogeneity-spectral", "error": str(e)})
        rep.homogeneity_ok = False
        return rep
    rep.max_homogeneity_error = worst_h
    rep.homogeneity_ok = worst_h <= 1e-9 and not any(
        f.get("gate") == "homogeneity-cone-preservation"
        for f in rep.failures)
    rep.ok = bool(rep.homogeneity_ok)
    return rep


# ---------------------------------------------------------------------------
# recovery: from (cone, form, unit, symmetries) back to the product

@dataclass
class RecoveryProblem:
    dim: int
    B: np.ndarray                        # PD orthogonalizing form (float)
    u: np.ndarray
    cone_generators: list
    actions: list = field(default_factory=list)
    outcome_vectors: list = field(default_factory=list)
    cone_membership: Optional[Callable] = None
    exact: bool = False                  # inputs rational -> exact linear stage
    B_exact: Optional[Mat] = None
    u_exact: Optional[Vec] = None
    actions_exact: Optional[list] = None
    outcome_vectors_exact: Optional[list] = None


@dataclass
class RecoveryResult:
    algebra: Optional[JordanAlgebra]
    linear_solution_dim: int
    residual: float
    seeds_agree: Optional[bool]
    seed_residuals: list
    gates: dict
    notes: list = field(default_factory=list)
    seed: int = 42


def _pair_index(d: int):
    pairs = [(i, j) for i in range(d) for j in range(i, d)]
    where = {p: k for k, p in enumerate(pairs)}

    def at(i, j):
        return where[(i, j) if i <= j else (j, i)]
    return pairs, at


def _linear_rows_float(p: RecoveryProblem, idempotence: bool):
    d = p.dim
    pairs, at = _pair_index(d)
    P = len(pairs)
    nvar = P * d
    rows, rhs = [], []

    def var(pk, k):
        return pk * d + k

    u = np.asarray(p.u, float)
    for j in range(d):                                   # unit: u ∘ e_j = e_j
        for k in range(d):
            row = np.zeros(nvar)
            for i in range(d):
                row[var(at(i, j), k)] += u[i]
            rows.append(row)
            rhs.append(1.0 if j == k else 0.0)
    B = np.asarray(p.B, float)
    for i in range(d):                                   # B-associativity
        for j in range(d):
            for k in range(j, d):
                row = np.zeros(nvar)
                for m in range(d):
                    row[var(at(i, j), m)] += B[m][k]
                    row[var(at(i, k), m)] -= B[m][j]
                rows.append(row)
                rhs.append(0.0)
    for M in p.actions:                                  # G-equivariance
        M = np.asarray(M, float)
        for i in range(d):
            for j in range(i, d):
                for k in range(d):
                    row = np.zeros(nvar)
                    for m in range(d):
                        row[var(at(i, j), m)] += M[k][m]
                    for a in range(d):
                        for b in range(d):
                            row[var(at(a, b), k)] -= M[a][i] * M[b][j]
                    rows.append(row)
                    rhs.append(0.0)
    if idempotence:
        for g in p.outcome_vectors:                      # g ∘ g = g
            g = np.asarray(g, float)
            for k in range(d):
                row = np.zeros(nvar)
                for i in range(d):
                    for j in range(i, d):
                        coeff = g[i] * g[j]
                        if i != j:
                            coeff *= 2
                        row[var(at(i, j), k)] += coeff
                rows.append(row)
                rhs.append(g[k])
    return np.array(rows), np.array(rhs), pairs


def _tensor_from_packed(t, d: int, pairs) -> np.ndarray:
    T = np.zeros((d, d, d))
    for pk, (i, j) in enumerate(pairs):
        T[i, j] = t[pk * d:(pk + 1) * d]
        T[j, i] = T[i, j]
    return T


def _np_nullspace(A: np.ndarray, rtol: float = 1e-9) -> np.ndarray:
    if A.size == 0:
        return np.eye(A.shape[1])
    _, s, vt = np.linalg.svd(A, full_matrices=True)
    nz = (s > rtol * (s[0] if len(s) else 1.0)).sum()
    return vt[nz:].T


def _exact_linear_stage(p: RecoveryProblem, idempotence: bool):
    """Rational solve of the same rows; returns (t0, nullspace columns)."""
    from .linalg import nullspace, solve
    d = p.dim
    pairs, at = _pair_index(d)
    P = len(pairs)
    nvar = P * d
    rows, rhs = [], []

    def var(pk, k):
        return pk * d + k

    u = [frac(x) for x in (p.u_exact if p.u_exact is not None else p.u)]
    B = ([[frac(x) for x in r] for r in p.B_exact]
         if p.B_exact is not None else [[frac(x) for x in r] for r in p.B])
    for j in range(d):
        for k in range(d):
            row = [ZERO] * nvar
            for i in range(d):
                row[var(at(i, j), k)] += u[i]
            rows.append(row)
            rhs.append(ONE if j == k else ZERO)
    for i in range(d):
        for j in range(d):
            for k in range(j, d):
                row = [ZERO] * nvar
                for m in range(d):
                    row[var(at(i, j), m)] += B[m][k]
                    row[var(at(i, k), m)] -= B[m][j]
                rows.append(row)
                rhs.append(ZERO)
    for M in (p.actions_exact if p.actions_exact is not None else p.actions):
        M = [[frac(x) for x in r] for r in M]
        for i in range(d):
            for j in range(i, d):
                for k in range(d):
                    row = [ZERO] * nvar
                    for m in range(d):
                        row[var(at(i, j), m)] += M[k][m]
                    for a in range(d):
                        for b in range(d):
                            row[var(at(a, b), k)] -= M[a][i] * M[b][j]
                    rows.append(row)
                    rhs.append(ZERO)
    if idempotence:
        for g in (p.outcome_vectors_exact
                  if p.outcome_vectors_exact is not None
                  else p.outcome_vectors):
            g = [frac(x) for x in g]
            for k in range(d):
                row = [ZERO] * nvar
                for i in range(d):
                    for j in range(i, d):
                        c = g[i] * g[j]
                        if i != j:
                            c *= 2
                        row[var(at(i, j), k)] += c
                rows.append(row)
                rhs.append(g[k])
    t0 = solve(rows, rhs)
    if t0 is None:
        return None, None, pairs
    null = nullspace(rows)
    return t0, null, pairs


def _identity_residual_vec(T: np.ndarray, samples) -> np.ndarray:
    out = []
    for a, b in samples:
        a2 = np.einsum("i,j,ijk->k", a, a, T)
        lhs = np.einsum("i,j,ijk->k", a2, np.einsum("i,j,ijk->k", b, a, T), T)
        rhs = np.einsum("i,j,ijk->k", np.einsum("i,j,ijk->k", a2, b, T), a, T)
        out.append(lhs - rhs)
    return np.concatenate(out)


def recover_jordan_product(p: RecoveryProblem, seed: int = 42,
                           seeds: int = 8,
                           enforce_outcome_idempotence: bool = True,
                           tol: float = 1e-8) -> RecoveryResult:
    """Solve the linear Jordan-product constraints, then polish the identity.

    Linear stage: commutativity (built into the parametrization), the unit
    law, associativity of the given form, equivariance under the given
    symmetry actions, and — by default — idempotence of the supplied
    outcome/cone generators (sharp extreme effects can only be primitive
    idempotents in a compatible algebra; without this the linear stage can
    stay underdetermined).  Quadratic stage: Gauss-Newton on the Jordan
    identity residual from several seeds; agreement of all seeds is the
    desk-scale uniqueness certificate.
    """
    gates: dict = {}
    notes: list = []
    d = p.dim
    B = np.asarray(p.B, float)
    eig = np.linalg.eigvalsh((B + B.T) / 2)
    gates["form_pd"] = bool(eig.min() > 0)
    if not gates["form_pd"]:
        return RecoveryResult(None, -1, np.inf, None, [], gates,
                              ["form not positive definite"], seed)
    u = np.asarray(p.u, float)
    gates["unit_interior_heuristic"] = all(
        float(np.asarray(g, float) @ B @ u) > 1e-12 for g in p.cone_generators)

    if p.exact:
        t0x, nullx, pairs = _exact_linear_stage(p, enforce_outcome_idempotence)
        if t0x is None:
            gates["linear_stage"] = False
            return RecoveryResult(None, -1, np.inf, None, [], gates,
                                  ["linear constraints inconsistent"], seed)
        nullity = len(nullx)
        t0 = np.array([float(v) for v in t0x])
        N = (np.array([[float(v) for v in col] for col in nullx]).T
             if nullity else np.zeros((len(t0), 0)))
        exact_solution = t0x if nullity == 0 else None
    else:
        A, b, pairs = _linear_rows_float(p, enforce_outcome_idempotence)
        t0, res, rk, _ = np.linalg.lstsq(A, b, rcond=None)
        if float(np.abs(A @ t0 - b).max()) > 1e-7:
            gates["linear_stage"] = False
            return RecoveryResult(None, -1, np.inf, None, [], gates,
                                  ["linear constraints inconsistent"], seed)
        N = _np_nullspace(A)
        nullity = N.shape[1]
        exact_solution = None
    gates["linear_stage"] = True

    rng = np.random.default_rng(seed)
    probe = [(rng.standard_normal(d), rng.standard_normal(d))
             for _ in range(3 * d)]

    def tensor_at(theta):
        return _tensor_from_packed(t0 + (N @ theta if nullity else 0.0),
                                   d, pairs)

    def residual(theta):
        return _identity_residual_vec(tensor_at(theta), probe)

    solutions, seed_residuals = [], []
    if nullity == 0:
        r = float(np.abs(residual(np.zeros(0))).max())
        solutions.append(np.zeros(0))
        seed_residuals.append(r)
        notes.append("linear stage already determined the tensor; uniqueness "
                     "certified by the rank of the constraint system")
    else:
        for s in range(seeds):
            srng = np.random.default_rng(seed + 1000 * (s + 1))
            theta = srng.standard_normal(nullity) * 0.5
            for _ in range(60):
                r = residual(theta)
                Jac = np.empty((len(r), nullity))
                h = 1e-6
                for k in range(nullity):
                    dtheta = np.zeros(nullity)
                    dtheta[k] = h
                    Jac[:, k] = (residual(theta + dtheta) - r) / h
                step, *_ = np.linalg.lstsq(Jac, -r, rcond=None)
                lam = 1.0
                base = float(r @ r)
                while lam > 1e-6:
                    cand = theta + lam * step
                    rc = residual(cand)
                    if float(rc @ rc) < base:
                        break
                    lam /= 2
                theta = theta + lam * step
                if float(np.linalg.norm(lam * step)) <= 1e-12:
                    break
            solutions.append(theta)
            seed_residuals.append(float(np.abs(residual(theta)).max()))

    best = int(np.argmin(seed_residuals))
    theta_star = solutions[best]
    residual_star = seed_residuals[best]
    T_star = tensor_at(theta_star)
    if nullity == 0:
        seeds_agree = True       # every seed collapses to the same full-rank solution
    else:
        good = [sol for sol, r in zip(solutions, seed_residuals) if r <= tol]
        tensors = [tensor_at(sol) for sol in good]
        seeds_agree = len(good) == len(solutions) and all(
            float(np.abs(t - T_star).max()) <= tol for t in tensors)
        if good and not seeds_agree:
            notes.append("seeds reached distinct low-residual tensors: "
                         "non-uniqueness witness against the hypotheses")

    gates["identity_residual"] = residual_star
    gates["identity_ok"] = residual_star <= tol
    if not gates["identity_ok"]:
        return RecoveryResult(None, nullity, residual_star, seeds_agree,
                              seed_residuals, gates,
                              notes + ["no PD-trace Jordan solution found; "
                                       "hypotheses likely unmet"], seed)

    # acceptance gates on the polished tensor
    G = np.einsum("ijm,m->ij", T_star, np.einsum("mkk->m", T_star))
    gates["trace_form_pd"] = bool(
        np.linalg.eigvalsh((G + G.T) / 2).min() > 1e-10)
    sq_ok = True
    if p.cone_membership is not None:
        for _ in range(20):
            x = rng.standard_normal(d)
            x2 = np.einsum("i,j,ijk->k", x, x, T_star)
            if not p.cone_membership(x2):
                sq_ok = False
                break
        gates["squares_in_cone"] = sq_ok
    else:
        notes.append("no cone membership oracle supplied; square gate skipped")

    unit = ([frac(x) for x in (p.u_exact if p.u_exact is not None else p.u)]
            if exact_solution is not None else list(u))
    if exact_solution is not None:
        tensor = [[[exact_solution[_pk_at(pairs, i, j) * d + k]
                    for k in range(d)] for j in range(d)] for i in range(d)]
        J = JordanAlgebra("Recovered", d, unit, tensor, True)
        notes.append("tensor is exact (rational linear stage, zero nullity)")
    else:
        J = JordanAlgebra("Recovered", d, list(u), T_star, False)
    ok = gates["trace_form_pd"] and sq_ok
    if not ok:
        notes.append("recovered tensor failed an acceptance gate")
    return RecoveryResult(J if ok else None, nullity, residual_star,
                          seeds_agree, seed_residuals, gates, notes, seed)


def _pk_at(pairs, i, j):
    if i > j:
        i, j = j, i
    return pairs.index((i, j))


# ---------------------------------------------------------------------------
# identification by (dim, rank)

_SPIN_ALIASES = {2: "RealSym(2)", 3: "ComplexHerm(2)", 5: "QuatHerm(2)"}


def _simple_classes(max_dim: int):
    """Simple Euclidean Jordan algebras with dim ≤ max_dim, as
    (dim, rank, canonical name) — low spin factors folded into their matrix
    aliases, the exceptional algebra out of scope."""
    out = []
    for n in range(1, max_dim + 1):
        dims = {"RealSym": n * (n + 1) // 2, "ComplexHerm": n * n,
                "QuatHerm": 2 * n * n - n}
        for fam, dd in dims.items():
            if dd <= max_dim and (n >= 3 or (fam == "RealSym" and n <= 2)):
                out.append((dd, n, f"{fam}({n})"))
    for n in range(4, max_dim):
        if n + 1 <= max_dim and n not in _SPIN_ALIASES:
            out.append((n + 1, 2, f"SpinFactor({n})"))
    if 4 <= max_dim:
        out.append((4, 2, "ComplexHerm(2)~SpinFactor(3)"))
    if 6 <= max_dim:
        out.append((6, 2, "QuatHerm(2)~SpinFactor(5)"))
    return sorted(set(out))


def identify_algebra(J: JordanAlgebra, seed: int = 42) -> list[str]:
    """Candidate catalog kinds matching (dim, rank); ambiguities all listed.

    Rank is the minimal-polynomial degree of a generic element; candidates
    are direct sums of simple classes whose dimensions and ranks add up.
    """
    d = J.dim
    r = generic_rank(J, seed=seed)
    simples = _simple_classes(d)
    found: set = set()

    def rec(rem_d, rem_r, start, acc):
        if rem_d == 0 and rem_r == 0:
            found.add(" + ".join(sorted(acc)) if acc else "0")
            return
        if rem_d <= 0 or rem_r <= 0:
            return
        for k in range(start, len(simples)):
            dd, rr, name = simples[k]
            if dd <= rem_d and rr <= rem_r:
                rec(rem_d - dd, rem_r - rr, k, acc + [name])

    rec(d, r, 0, [])
    return sorted(found)
