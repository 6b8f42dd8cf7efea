"""Symmetry-constrained effective Hamiltonians around high-symmetry points.

Given an irreducible co-rep M and a real probe action D (momentum components,
an electric or magnetic field, or a channel of homogeneous polynomials), this
module counts and constructs the Hermitian coupling tuples (gamma^1..gamma^q)
obeying

    M(h)  gamma^m M(h)^dag  = sum_n dual(D)(h)_{nm}  gamma^n        (h unitary)
    M(t0) conj(gamma^m) M(t0)^dag = sum_n gamma^n dual(D)(t0)_{nm}  (anti-unitary)

The count comes from a character formula; the matrices come from projecting
the triple product D x M x F onto its symmetric fixed space and rebasing so
the anti-unitary generator acts as plain conjugation.  A brute-force null
space solver over the real parametrization of Hermitian tuples ships
alongside as the independent ground truth for both the count and the span.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .coreps import CoRep, character, f_of_h, restrict_corep
from .errors import (
    DimensionMismatch,
    EmptyChannel,
    GaugeFixFailed,
    InvalidAction,
    NonIntegerMultiplicity,
    NoT0,
    SingularAction,
)
from .groups import FactorSystem, MagneticGroup, verify_embedding
from .linalg import _cluster_slices, eigenspace_of_one, symmetric_unitary_sqrt, twist_matrix
from .reduction import irreducibility_index

ACTION_TOL = 1e-9


def _null_space(a: np.ndarray, atol: float = 1e-8) -> np.ndarray:
    """Null space with an absolute singular-value cutoff.

    The constraint systems here have nonzero singular values of order one,
    while float noise sits at 1e-15; a relative cutoff would misread an
    almost-zero system as full rank.
    """
    if a.size == 0:
        return np.eye(a.shape[1])
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    rank = int((s > atol).sum())
    return vh[rank:].conj().T


# -- probe actions --------------------------------------------------------------

@dataclass
class ProbeRepAction:
    """Real linear action of the group on a probe channel (no cocycle).

    ``d_h[k]`` is the matrix of the k-th unitary element (ordered as
    ``group.h_elements``); ``d_t0`` is the matrix of the distinguished
    anti-unitary element when the group is magnetic.
    """

    group: MagneticGroup
    d_h: np.ndarray          # (|H|, q, q) real
    d_t0: Optional[np.ndarray]
    kind: str = "momentum"

    def __post_init__(self):
        self.d_h = np.asarray(self.d_h, dtype=float)
        if self.d_h.ndim != 3 or self.d_h.shape[0] != len(self.group.h_elements):
            raise DimensionMismatch("need one real matrix per unitary element")
        if self.d_h.shape[1] != self.d_h.shape[2]:
            raise DimensionMismatch("probe matrices must be square")
        if self.d_t0 is not None:
            self.d_t0 = np.asarray(self.d_t0, dtype=float)
            if self.d_t0.shape != self.d_h.shape[1:]:
                raise DimensionMismatch("t0 matrix shape mismatch")
        elif self.group.is_magnetic:
            raise InvalidAction("magnetic group needs the t0 probe matrix")
        self._h_index = {int(h): k for k, h in enumerate(self.group.h_elements)}

    @property
    def dim_q(self) -> int:
        return self.d_h.shape[1]

    def d(self, g: int) -> np.ndarray:
        """Matrix of an arbitrary element; the coset uses D(h t0) = D(h) D(t0)."""
        grp = self.group
        if grp.s(g) == 0:
            return self.d_h[self._h_index[int(g)]]
        h = grp.mul(int(g), grp.inv(grp.t0))
        return self.d_h[self._h_index[h]] @ self.d_t0

    def character_h(self) -> np.ndarray:
        return np.einsum("gii->g", self.d_h)


def validate_action(action: ProbeRepAction, tol: float = ACTION_TOL) -> float:
    """Max residual of the representation property over the full group.

    Checks D(h1) D(h2) = D(h1 h2), D(t0)^2 = D(t0^2), and
    D(t0) D(h) D(t0)^-1 = D(t0 h t0^-1); the probe channel carries a linear
    rep, so no factor system appears.
    """
    g = action.group
    resid = 0.0
    for a in g.h_elements:
        for b in g.h_elements:
            prod = action.d(int(a)) @ action.d(int(b))
            resid = max(resid, float(np.abs(prod - action.d(g.mul(int(a), int(b)))).max()))
    if g.is_magnetic:
        t0 = g.t0
        resid = max(resid, float(np.abs(
            action.d_t0 @ action.d_t0 - action.d(g.sigma)).max()))
        t0i = g.inv(t0)
        d_t0_inv = np.linalg.inv(action.d_t0)
        for h in g.h_elements:
            conj_h = g.mul(g.mul(t0, int(h)), t0i)
            lhs = action.d_t0 @ action.d(int(h)) @ d_t0_inv
            resid = max(resid, float(np.abs(lhs - action.d(conj_h)).max()))
    if resid > tol:
        raise InvalidAction(f"probe matrices violate the group law by {resid:.3e}")
    return resid


def dual_rep(action: ProbeRepAction) -> ProbeRepAction:
    """Elementwise inverse-transpose; equals the input for orthogonal actions."""
    try:
        d_h = np.stack([np.linalg.inv(m).T for m in action.d_h])
        d_t0 = None if action.d_t0 is None else np.linalg.inv(action.d_t0).T
    except np.linalg.LinAlgError as err:
        raise SingularAction(str(err)) from None
    return ProbeRepAction(group=action.group, d_h=d_h, d_t0=d_t0, kind=action.kind)


# -- multiplicity criterion ------------------------------------------------------

def multiplicity_value(rep: CoRep, action: ProbeRepAction) -> float:
    """Raw (unrounded) count of independent Hermitian coupling tuples.

    Anti-unitary groups:
        (1/2|H|) sum_h [ |chi(h)|^2 chi_v(h)
                         + chi_v(h t0) omega(h t0, h t0) chi((h t0)^2) ]
    with chi_v(h t0) = Tr[D(h) D(t0)].  Purely unitary groups drop the coset
    term and the 1/2.
    """
    g = rep.group
    chi = character(rep)
    chi_v = action.character_h()
    unitary_part = 0.0
    for k, h in enumerate(g.h_elements):
        unitary_part += abs(chi.values[k]) ** 2 * chi_v[k]
    if not g.is_magnetic:
        return float(unitary_part / g.halving_order)
    coset_part = 0.0 + 0.0j
    for h in g.h_elements:
        u = g.mul(int(h), g.t0)
        chi_v_u = float(np.trace(action.d(u)))
        coset_part += chi_v_u * rep.omega(u, u) * np.trace(rep.m(g.mul(u, u)))
    value = (unitary_part + coset_part) / (2 * g.halving_order)
    if abs(value.imag) > 1e-8 * max(1.0, abs(value)):
        raise NonIntegerMultiplicity(f"criterion came out non-real: {value}")
    return float(value.real)


def multiplicity_value_trace_form(rep: CoRep, action: ProbeRepAction) -> float:
    """Coset term written as Tr[M(u) conj(M(u))]; must agree with the
    factor-system form."""
    g = rep.group
    chi = character(rep)
    chi_v = action.character_h()
    unitary_part = sum(abs(chi.values[k]) ** 2 * chi_v[k]
                       for k in range(len(chi_v)))
    if not g.is_magnetic:
        return float(unitary_part / g.halving_order)
    coset_part = 0.0 + 0.0j
    for h in g.h_elements:
        u = g.mul(int(h), g.t0)
        coset_part += float(np.trace(action.d(u))) * np.trace(
            rep.m(u) @ np.conj(rep.m(u)))
    return float(((unitary_part + coset_part) / (2 * g.halving_order)).real)


def multiplicity_value_diagonal_t0(rep: CoRep, action: ProbeRepAction,
                                   sign: int) -> float:
    """Specialized criterion valid only when D(t0) = sign * identity:
    the probe character factors out of the coset term."""
    g = rep.group
    if not g.is_magnetic:
        raise NoT0("specialized path needs an anti-unitary group")
    if not np.allclose(action.d_t0, sign * np.eye(action.dim_q), atol=1e-12):
        raise InvalidAction(f"D(t0) is not {sign:+d} * identity")
    chi = character(rep)
    chi_v = action.character_h()
    total = 0.0 + 0.0j
    for k, h in enumerate(g.h_elements):
        u = g.mul(int(h), g.t0)
        total += (abs(chi.values[k]) ** 2
                  + sign * rep.omega(u, u) * np.trace(rep.m(g.mul(u, u)))) * chi_v[k]
    return float((total / (2 * g.halving_order)).real)


def linear_multiplicity(rep: CoRep, action: ProbeRepAction,
                        tol: float = 1e-6) -> int:
    """Integer multiplicity of the probe channel; > 0 means a coupling exists."""
    value = multiplicity_value(rep, action)
    nearest = round(value)
    if abs(value - nearest) > tol:
        raise NonIntegerMultiplicity(f"criterion value {value} is not an integer")
    return int(nearest)


def trivial_multiplicity(action: ProbeRepAction) -> int:
    """Number of identity-matrix coupling tuples: the dimension of the real
    vectors fixed by D(g) for every group element.  These shift all levels
    together and never split a degeneracy."""
    g = action.group
    q = action.dim_q
    rows = [action.d(int(h)) - np.eye(q) for h in g.h_elements]
    if g.is_magnetic:
        rows.append(action.d_t0 - np.eye(q))
    ns = _null_space(np.vstack(rows))
    return ns.shape[1]


# -- explicit construction -------------------------------------------------------

def build_W(rep: CoRep, action: ProbeRepAction, g_id: int) -> np.ndarray:
    """Triple product D(h) x M(h) x F(h) on the (q d^2)-dimensional space.

    On the coset the group law W(h t0) = W(h) W(t0) applies, with
    W(t0) = D(t0) x M(t0) x M(t0); a stacked vector indexed as
    n*d^2 + i*d + j then transforms with no leftover phase.
    """
    g = rep.group
    if g.s(g_id) == 0:
        return np.kron(action.d(g_id), np.kron(rep.m(g_id), f_of_h(rep, g_id)))
    if g.t0 is None:
        raise NoT0("anti-unitary element in a purely unitary group")
    h = g.mul(g_id, g.inv(g.t0))
    w_h = np.kron(action.d(h), np.kron(rep.m(h), f_of_h(rep, h)))
    w_t0 = np.kron(action.d_t0, np.kron(rep.m(g.t0), rep.m(g.t0)))
    return w_h @ w_t0


@dataclass
class KpModel:
    """Hermitian basis tuples gamma[i, m] for one probe channel.

    The physical coupling is sum_i r_i sum_m field_m gamma[i, m] with free
    real coefficients r_i left to the user.
    """

    rep: CoRep
    action: ProbeRepAction
    multiplicity: int
    gammas: np.ndarray          # (p, q, d, d) complex, each slice Hermitian
    residuals: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.gammas.shape[2]

    def evaluate(self, coefficients, fields) -> np.ndarray:
        r = np.asarray(coefficients, dtype=float)
        k = np.asarray(fields, dtype=float)
        if r.shape != (self.multiplicity,) or k.shape != (self.action.dim_q,):
            raise DimensionMismatch("coefficient/field lengths do not match the model")
        return np.einsum("i,m,imab->ab", r, k, self.gammas)


def _covariance_residuals(rep: CoRep, action: ProbeRepAction,
                          gammas: np.ndarray) -> dict:
    g = rep.group
    dual = dual_rep(action)
    res_h = 0.0
    for k, h in enumerate(g.h_elements):
        dh = dual.d_h[k]
        for gam in gammas:
            lhs = np.stack([rep.m(int(h)) @ gam[m] @ rep.m(int(h)).conj().T
                            for m in range(gam.shape[0])])
            rhs = np.einsum("nm,nab->mab", dh, gam)
            res_h = max(res_h, float(np.abs(lhs - rhs).max()))
    out = {"subgroup_covariance": res_h}
    if g.is_magnetic:
        mt = rep.m(g.t0)
        dt = dual.d_t0
        res_t = 0.0
        for gam in gammas:
            lhs = np.stack([mt @ np.conj(gam[m]) @ mt.conj().T
                            for m in range(gam.shape[0])])
            rhs = np.einsum("nab,nm->mab", gam, dt)
            res_t = max(res_t, float(np.abs(lhs - rhs).max()))
        out["t0_covariance"] = res_t
    out["hermiticity"] = float(max(
        np.abs(gam[m] - gam[m].conj().T).max()
        for gam in gammas for m in range(gam.shape[0])) if len(gammas) else 0.0)
    return out


def build_gamma_matrices(rep: CoRep, action: ProbeRepAction,
                         tol: float = 1e-9) -> KpModel:
    """Construct the Hermitian coupling tuples for one probe channel.

    Three steps: (1) take the eigenvalue-1 space of the product of the
    subgroup-average projector with the symmetrized-twist projector; (2)
    rebase that space with the square root of the anti-unitary generator's
    compressed matrix so it acts as plain conjugation, making real
    combinations self-consistent; (3) cut each basis vector into its q
    slices and untwist by conj(M(t0)).  Raises EmptyChannel when the
    multiplicity is zero.
    """
    g = rep.group
    d = rep.dim
    q = action.dim_q
    if g.is_magnetic:
        zeta, proj_resid = _fixed_space_magnetic(rep, action, tol)
    else:
        zeta, proj_resid = _fixed_space_unitary(rep, action, tol)
    p = zeta.shape[1]
    if p == 0:
        raise EmptyChannel("channel multiplicity is zero at this order")

    # antilinear generator compressed onto the fixed space
    if g.is_magnetic:
        w_t0 = build_W(rep, action, g.t0)
        theta = lambda v: w_t0 @ np.conj(v)
    else:
        tw = np.kron(np.eye(q), twist_matrix(d))
        theta = lambda v: tw @ np.conj(v)
    image = theta(zeta)
    m_t0 = zeta.conj().T @ image
    closure = float(np.linalg.norm(image - zeta @ m_t0, ord=2))
    gauge = float(np.linalg.norm(m_t0 @ np.conj(m_t0) - np.eye(p), ord=2))
    if closure > max(100 * tol, 1e-7) or gauge > max(100 * tol, 1e-7):
        raise GaugeFixFailed(
            f"anti-unitary generator leaves the fixed space (closure {closure:.3e}, "
            f"square {gauge:.3e})")
    root = symmetric_unitary_sqrt(m_t0, tol=max(tol, 1e-10))
    delta = zeta @ root

    gammas = np.empty((p, q, d, d), dtype=complex)
    if g.is_magnetic:
        m_conj = np.conj(rep.m(g.t0))
        for i in range(p):
            slices = delta[:, i].reshape(q, d, d)
            gammas[i] = slices @ m_conj
    else:
        for i in range(p):
            gammas[i] = delta[:, i].reshape(q, d, d)

    residuals = _covariance_residuals(rep, action, gammas)
    residuals["projector_idempotency"] = proj_resid
    residuals["gauge_closure"] = closure
    expected = linear_multiplicity(rep, action)
    if p != expected:
        raise NonIntegerMultiplicity(
            f"fixed space dimension {p} disagrees with the criterion {expected}")
    return KpModel(rep=rep, action=action, multiplicity=p, gammas=gammas,
                   residuals=residuals)


def _fixed_space_magnetic(rep: CoRep, action: ProbeRepAction, tol: float):
    g = rep.group
    d = rep.dim
    q = action.dim_q
    size = q * d * d
    p_ident = np.zeros((size, size), dtype=complex)
    for h in g.h_elements:
        p_ident += build_W(rep, action, int(h))
    p_ident /= g.halving_order
    # symmetrized twist: eta0 * (D(t0) x T [M(sigma) x I]) on the stacked index
    eta0 = rep.eta0
    tw = twist_matrix(d) @ np.kron(rep.m(g.sigma), np.eye(d))
    t_eta = eta0 * np.kron(action.d_t0, tw)
    q_proj = 0.5 * (p_ident + p_ident @ t_eta)
    resid = float(np.linalg.norm(q_proj @ q_proj - q_proj, ord=2))
    basis = eigenspace_of_one(q_proj, tol=max(tol, 1e-9))
    return basis, resid


def _fixed_space_unitary(rep: CoRep, action: ProbeRepAction, tol: float):
    g = rep.group
    d = rep.dim
    q = action.dim_q
    size = q * d * d
    p_ident = np.zeros((size, size), dtype=complex)
    for h in g.h_elements:
        p_ident += np.kron(action.d(int(h)),
                           np.kron(rep.m(int(h)), np.conj(rep.m(int(h)))))
    p_ident /= g.halving_order
    resid = float(np.linalg.norm(p_ident @ p_ident - p_ident, ord=2))
    basis = eigenspace_of_one(p_ident, tol=max(tol, 1e-9))
    return basis, resid


# -- brute-force oracle ----------------------------------------------------------

def hermitian_basis(d: int) -> np.ndarray:
    """d^2 Hermitian matrices spanning the space over the reals."""
    out = []
    for i in range(d):
        m = np.zeros((d, d), dtype=complex)
        m[i, i] = 1.0
        out.append(m)
    for i in range(d):
        for j in range(i + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[i, j] = m[j, i] = 1.0
            out.append(m)
            m = np.zeros((d, d), dtype=complex)
            m[i, j] = -1j
            m[j, i] = 1j
            out.append(m)
    return np.stack(out)


def covariant_tuple_basis(rep: CoRep, action: ProbeRepAction,
                          atol: float = 1e-8) -> np.ndarray:
    """Null-space oracle: all Hermitian tuples satisfying both covariances.

    Stacks the real-linear constraint system over the q * d^2 real parameters
    of a Hermitian q-tuple and returns an orthonormal basis of solutions with
    shape (n_solutions, q, d, d).  Independent of the projector construction;
    used as ground truth for multiplicities and spans.
    """
    g = rep.group
    d = rep.dim
    q = action.dim_q
    dual = dual_rep(action)
    basis = hermitian_basis(d)
    n_par = q * d * d

    def constraint_images(gamma_tuple):
        rows = []
        for k, h in enumerate(g.h_elements):
            mh = rep.m(int(h))
            dh = dual.d_h[k]
            lhs = np.einsum("ab,mbc,dc->mad", mh, gamma_tuple, np.conj(mh))
            rhs = np.einsum("nm,nab->mab", dh, gamma_tuple)
            rows.append((lhs - rhs).ravel())
        if g.is_magnetic:
            mt = rep.m(g.t0)
            lhs = np.einsum("ab,mbc,dc->mad", mt, np.conj(gamma_tuple), np.conj(mt))
            rhs = np.einsum("nab,nm->mab", gamma_tuple, dual.d_t0)
            rows.append((lhs - rhs).ravel())
        stacked = np.concatenate(rows)
        return np.concatenate([stacked.real, stacked.imag])

    columns = []
    for m in range(q):
        for b in basis:
            tup = np.zeros((q, d, d), dtype=complex)
            tup[m] = b
            columns.append(constraint_images(tup))
    system = np.stack(columns, axis=1)
    sols = _null_space(system, atol=atol)
    tuples = np.zeros((sols.shape[1], q, d, d), dtype=complex)
    for s in range(sols.shape[1]):
        coeff = sols[:, s].reshape(q, d * d)
        tuples[s] = np.einsum("mk,kab->mab", coeff, basis)
    return tuples


def tuple_span_residual(a: np.ndarray, b: np.ndarray) -> float:
    """Distance between the real spans of two sets of Hermitian tuples.

    Embeds each tuple as a real vector (re, im stacked), orthonormalizes both
    sets, and returns the norm of the difference of the two orthogonal
    projectors.
    """
    def embed(tuples):
        if len(tuples) == 0:
            return np.zeros((0, 0))
        flat = tuples.reshape(tuples.shape[0], -1)
        return np.concatenate([flat.real, flat.imag], axis=1).T  # (2qd^2, n)

    va, vb = embed(a), embed(b)
    if va.shape[1] != vb.shape[1]:
        return float("inf")
    if va.shape[1] == 0:
        return 0.0
    qa, _ = np.linalg.qr(va)
    qb, _ = np.linalg.qr(vb)
    return float(np.linalg.norm(qa @ qa.T - qb @ qb.T, ord=2))


# -- polynomial channels -----------------------------------------------------------

def monomial_exponents(n: int, n_vars: int = 3) -> list:
    """Degree-n exponent tuples in deterministic (descending lex) order."""
    out = []
    if n_vars == 3:
        for a in range(n, -1, -1):
            for b in range(n - a, -1, -1):
                out.append((a, b, n - a - b))
        return out
    raise ValueError("only 3 momentum components are supported")


def evaluate_monomials(exponents, dk: np.ndarray) -> np.ndarray:
    return np.array([np.prod(dk ** np.asarray(e)) for e in exponents])


def _substitution_matrix(exponents, lin: np.ndarray) -> np.ndarray:
    """Matrix R with mono_a(lin @ k) = sum_b R[a, b] mono_b(k).

    Expands each transformed monomial by multiplying out the linear forms;
    exact in the coefficients of ``lin``.
    """
    n_mono = len(exponents)
    index = {e: k for k, e in enumerate(exponents)}
    r = np.zeros((n_mono, n_mono))
    for row, expo in enumerate(exponents):
        # polynomial as dict exponent -> coefficient, built factor by factor
        poly = {(0, 0, 0): 1.0}
        for var in range(3):
            for _ in range(expo[var]):
                new = {}
                for mono, c in poly.items():
                    for var2 in range(3):
                        if lin[var, var2] == 0.0:
                            continue
                        key = list(mono)
                        key[var2] += 1
                        key = tuple(key)
                        new[key] = new.get(key, 0.0) + c * lin[var, var2]
                poly = new
        for mono, c in poly.items():
            r[row, index[mono]] = c
    return r


@dataclass
class PolynomialChannel:
    """One G-closed real channel of order-N polynomials."""

    action: ProbeRepAction
    coefficients: np.ndarray     # (q_c, n_monomials) rows are the polynomials
    exponents: list
    order: int

    def evaluate(self, dk: np.ndarray) -> np.ndarray:
        return self.coefficients @ evaluate_monomials(self.exponents, np.asarray(dk))


@dataclass
class PolynomialChannelSet:
    order: int
    exponents: list
    full_action: ProbeRepAction
    channels: list


def polynomial_channel(action: ProbeRepAction, n: int,
                       seed: int = 0) -> PolynomialChannelSet:
    """Induced action on degree-n polynomials, split into minimal real channels.

    The momentum components transform with the dual matrices; substituting
    them into the monomials induces a real linear rep of the full group on
    the (n+1)(n+2)/2 monomial coefficients.  A random symmetric matrix
    averaged over the whole group (the same commutant trick the reduction
    engine uses, run in real arithmetic) splits that rep into minimal
    invariant channels; each eigenspace is returned as a ProbeRepAction with
    explicit polynomial bases.  n = 1 reproduces the input action.
    """
    if n < 1:
        raise ValueError("polynomial order must be >= 1")
    g = action.group
    if action.dim_q != 3:
        raise InvalidAction("polynomial channels are induced from a 3-dim momentum action")
    validate_action(action)
    exponents = monomial_exponents(n)
    n_mono = len(exponents)
    dual = dual_rep(action)

    elements = [int(h) for h in g.h_elements]
    subs = {}
    for h in elements:
        subs[h] = _substitution_matrix(exponents, dual.d(h))
    sub_t0 = None
    if g.is_magnetic:
        sub_t0 = _substitution_matrix(exponents, dual.d_t0)

    def sub_of(e):
        if g.s(e) == 0:
            return subs[e]
        h = g.mul(e, g.inv(g.t0))
        return subs[h] @ sub_t0

    all_elements = list(range(g.order)) if g.is_magnetic else elements

    # orthogonalize the substitution rep, then average a random symmetric seed
    s_metric = np.zeros((n_mono, n_mono))
    for e in all_elements:
        r = sub_of(e)
        s_metric += r.T @ r
    s_metric /= len(all_elements)
    vals, vecs = np.linalg.eigh(s_metric)
    if vals.min() <= 1e-12:
        raise SingularAction("substitution metric is singular")
    s_half = vecs @ np.diag(np.sqrt(vals)) @ vecs.T
    s_half_inv = vecs @ np.diag(1.0 / np.sqrt(vals)) @ vecs.T
    ortho = {e: s_half @ sub_of(e) @ s_half_inv for e in all_elements}

    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n_mono, n_mono))
    a = (a + a.T) / 2
    lam = np.zeros((n_mono, n_mono))
    for e in all_elements:
        lam += ortho[e] @ a @ ortho[e].T
    lam /= len(all_elements)
    lam = (lam + lam.T) / 2
    evals, evecs = np.linalg.eigh(lam)
    gap = 1e-7 * max(1.0, np.linalg.norm(lam, ord=2))

    channels = []
    for sl in _cluster_slices(evals, gap):
        basis = evecs[:, sl]                       # (n_mono, q_c) real orthonormal
        d_h = np.stack([basis.T @ ortho[h] @ basis for h in elements])
        d_t0 = basis.T @ ortho[g.t0] @ basis if g.is_magnetic else None
        chan_action = ProbeRepAction(group=g, d_h=d_h, d_t0=d_t0,
                                     kind=f"polynomial({n})")
        validate_action(chan_action, tol=1e-7)
        channels.append(PolynomialChannel(
            action=chan_action,
            coefficients=basis.T @ s_half,
            exponents=exponents,
            order=n,
        ))

    if n == 1:
        full = action
    else:
        d_h_full = np.stack([np.linalg.inv(subs[h]).T for h in elements])
        d_t0_full = None if sub_t0 is None else np.linalg.inv(sub_t0).T
        full = ProbeRepAction(group=g, d_h=d_h_full, d_t0=d_t0_full,
                              kind=f"polynomial({n})")
    return PolynomialChannelSet(order=n, exponents=exponents,
                                full_action=full, channels=channels)


# -- dispersion order and probe stability -----------------------------------------

def dispersion_order(rep: CoRep, action: ProbeRepAction, n_max: int,
                     seed: int = 0, tol: float = 1e-6) -> dict:
    """Channel-by-channel multiplicity table for orders 1..n_max.

    The leading dispersion order is the smallest order whose full induced
    action has positive multiplicity; per-channel entries expose which
    direction couples (splitting counts exclude identity-tuple couplings).
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    orders = []
    leading = None
    for n in range(1, n_max + 1):
        chans = polynomial_channel(action, n, seed=seed)
        full_mult = linear_multiplicity(rep, chans.full_action, tol=tol)
        entry = {
            "order": n,
            "full": {
                "multiplicity": full_mult,
                "trivial_multiplicity": trivial_multiplicity(chans.full_action),
            },
            "channels": [],
        }
        entry["full"]["splitting_multiplicity"] = (
            entry["full"]["multiplicity"] - entry["full"]["trivial_multiplicity"])
        for ch in chans.channels:
            mult = linear_multiplicity(rep, ch.action, tol=tol)
            triv = trivial_multiplicity(ch.action)
            entry["channels"].append({
                "dim": ch.action.dim_q,
                "multiplicity": mult,
                "trivial_multiplicity": triv,
                "splitting_multiplicity": mult - triv,
                "polynomials": ch.coefficients,
                "exponents": ch.exponents,
            })
        if leading is None and full_mult > 0:
            leading = n
        orders.append(entry)
    return {"orders": orders, "leading_order": leading, "seed": seed}


def probe_stability(rep: CoRep, embedding, g_sub: Optional[MagneticGroup] = None,
                    probes: Optional[dict] = None, seed: int = 0,
                    tol: float = 1e-8) -> dict:
    """Robustness of a degeneracy against a symmetry-lowering perturbation.

    ``embedding`` lists the parent-group element ids that remain symmetries.
    The restricted co-rep's irreducibility index decides protection; = 1
    keeps the degeneracy, > 1 allows splitting at some order.  Each probe
    channel (a ProbeRepAction of the *full* group) is additionally checked
    for a linear coupling; its splitting multiplicity excludes pure
    identity couplings, which shift but never split.
    """
    ids = [int(x) for x in embedding]
    if g_sub is not None:
        emb = verify_embedding(rep.group, g_sub, ids)
        omega = FactorSystem(rep.omega.values[np.ix_(emb, emb)])
        sub_rep = CoRep(group=g_sub, omega=omega, matrices=rep.matrices[emb])
    else:
        sub_rep, emb = restrict_corep(rep, ids)

    index = irreducibility_index(sub_rep)
    protected = abs(index - 1.0) <= max(tol, 1e-8)
    report = {
        "subgroup_order": sub_rep.group.order,
        "subgroup_is_magnetic": sub_rep.group.is_magnetic,
        "restricted_index": index,
        "protected": protected,
        "tol": tol,
        "seed": seed,
        "probes": {},
    }
    for name, act in (probes or {}).items():
        mult = linear_multiplicity(rep, act)
        triv = trivial_multiplicity(act)
        entry = {
            "multiplicity": mult,
            "trivial_multiplicity": triv,
            "splitting_multiplicity": mult - triv,
            "kind": act.kind,
        }
        if mult > 0:
            model = build_gamma_matrices(rep, act, tol=max(tol, 1e-9))
            entry["gammas"] = model.gammas
            entry["residuals"] = model.residuals
        report["probes"][name] = entry
    return report
