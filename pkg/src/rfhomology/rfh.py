"""The Rabinowitz Floer pipeline.

Generators carry a base critical point, a covering number l of the fiber
Reeb orbit, a sphere class k, and a max/min flag.  All of their invariants
are exact:

    winding        w        = l - m*k*nu
    Lagrange mult. eta      = -l/m
    index (min)    mu       = -2l - 2*(lam - m)*k*nu + morse_index - dim/2
    index (max)    mu + 1
    action         A        = -k*nu - (tau/m)*l

The zero-winding complex is the cone of the cap chain map under the
relabeling l = m*k*nu; the full boundary splits as d0 + d1 + d2 where d0
raises the covering number inside a fiber, d1 is the Morse part, and d2 is
the cap part with its sphere-class shift.  The full homology is computed
through the structural short exact sequence 0 -> sum -> sum -> RFH -> 0
with the middle map id + cap-shift, never by diagonalizing the literal
infinite complex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .basemodel import (BaseModel, build_fc, cap_lambda_matrix, cap_map,
                        primitivity_report)
from .chaincplx import (ChainMap, GradedComplex, HomologyBasis,
                        LongExactSequence, cone_les, homology_basis,
                        homology_table, induced_matrix)
from .errors import (ConsecutiveIndexModel, EmptyWindow, TruncationTooNarrow,
                     UnstabilizedTruncation, WindowMismatch)
from .exactlin import (IntMatrix, ZModulePresentation, kernel_basis,
                       kernel_basis_mod_p, presentation_from_relations,
                       rank_mod_p, smith_normal_form, solve)
from .novikov import (CompletionRegime, l_is_unit, lm_det, lm_is_zero,
                      lm_power, regime_for)


# ---------------------------------------------------------------------------
# Generators and their exact invariants
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class RFHGenerator:
    label: str
    morse_index: int
    cov: int          # covering number l of the fiber orbit
    k: int            # sphere class coordinate
    hat: bool         # max (hat) or min (check) of the fiberwise Morse function

    def flag(self) -> str:
        return "hat" if self.hat else "check"

    def __str__(self) -> str:
        mark = "^" if self.hat else "v"
        return f"{mark}({self.label}, l={self.cov}, k={self.k})"


def winding(gen: RFHGenerator, model: BaseModel, m: int) -> int:
    return gen.cov - m * gen.k * model.nu


def eta(gen: RFHGenerator, m: int) -> Fraction:
    return -Fraction(gen.cov, m)


def fh_index(gen: RFHGenerator, model: BaseModel) -> int:
    """Index of the projected generator in the base."""
    return model.fh_degree(gen.morse_index, gen.k)


def rfh_index(gen: RFHGenerator, model: BaseModel, m: int) -> int:
    mu = (-2 * gen.cov
          - 2 * (model.lambda_nu - m * model.nu) * gen.k
          + gen.morse_index - model.half_dim)
    return mu + (1 if gen.hat else 0)


def action(gen: RFHGenerator, model: BaseModel, m: int, tau: Fraction) -> Fraction:
    return -Fraction(gen.k * model.nu) - Fraction(tau, m) * gen.cov


def base_action(gen: RFHGenerator, model: BaseModel) -> Fraction:
    """Action of the projected generator (f-values normalized to 0)."""
    return -Fraction(gen.k * model.nu)


def _sort_key(model: BaseModel, m: int):
    def key(g: RFHGenerator):
        return (rfh_index(g, model, m), g.k, g.cov, 0 if not g.hat else 1)
    return key


def enumerate_generators(model: BaseModel, m: int, tau: Fraction, *,
                         window: Optional[tuple[Fraction, Fraction]] = None,
                         winding_filter: Optional[int] = None,
                         degrees: Optional[tuple[int, int]] = None,
                         k_bound: Optional[int] = None,
                         l_bound: Optional[int] = None) -> list[RFHGenerator]:
    """All generators satisfying the given constraints, one hat and one
    check per circle family, in (degree, k, l, flag) order.  The constraints
    must pin down a finite set: a winding filter, a finite window (off the
    regime boundary), a degree range, or explicit k/l truncations."""
    tau = Fraction(tau)
    if tau <= 0:
        raise EmptyWindow(f"tau = {tau} must be positive")
    if window is not None:
        a, b = window
        if a is not None and b is not None and not a < b:
            raise EmptyWindow(f"window ({a}, {b}) is empty")

    nu = model.nu
    ln = model.lambda_nu

    def k_interval_from(lo_val: Fraction, hi_val: Fraction, coef: Fraction,
                        off: Fraction) -> range:
        """Integers k with lo_val < coef*k + off < hi_val, coef != 0."""
        x1 = (lo_val - off) / coef
        x2 = (hi_val - off) / coef
        if x1 > x2:
            x1, x2 = x2, x1
        return range(math.floor(x1) - 1, math.ceil(x2) + 2)

    families: set[tuple[str, int, int, int]] = set()  # (label, idx, l, k)

    def consider(label: str, idx: int, l: int, k: int) -> None:
        families.add((label, idx, l, k))

    if model.aspherical:
        for label, idx in model.crit:
            ls: Optional[Iterable[int]] = None
            if winding_filter is not None:
                ls = [winding_filter]
            elif l_bound is not None:
                ls = range(-l_bound, l_bound + 1)
            elif window is not None and window[0] is not None and window[1] is not None:
                a, b = window
                ls = k_interval_from(a, b, Fraction(-tau, m), Fraction(0))
            elif degrees is not None:
                lo, hi = degrees
                # mu(check) = -2l + idx - half_dim in [lo-1, hi]
                base = idx - model.half_dim
                ls = range((base - hi - 1) // 2 - 1, (base - (lo - 1)) // 2 + 2)
            else:
                raise TruncationTooNarrow(
                    "aspherical enumeration needs a winding filter, window, "
                    "degree range, or l truncation")
            for l in ls:
                consider(label, idx, l, 0)
    else:
        for label, idx in model.crit:
            if winding_filter is not None:
                w = winding_filter
                # l = w + m*k*nu; pick the k range from whatever bound exists
                if window is not None and window[0] is not None and window[1] is not None:
                    a, b = window
                    coef = Fraction(-nu) * (1 + tau)
                    off = Fraction(-tau * w, m)
                    ks: Iterable[int] = k_interval_from(a, b, coef, off)
                elif degrees is not None:
                    lo, hi = degrees
                    # mu(check) = -2w + idx - half_dim - 2*ln*k, solved for k;
                    # the interval helper keeps this right for negative ln too
                    base = -2 * w + idx - model.half_dim
                    ks = k_interval_from(Fraction(lo - 1), Fraction(hi + 1),
                                         Fraction(-2 * ln), Fraction(base))
                elif k_bound is not None:
                    ks = range(-k_bound, k_bound + 1)
                else:
                    raise TruncationTooNarrow(
                        "winding-filtered enumeration needs a window, degree "
                        "range, or k truncation")
                for k in ks:
                    consider(label, idx, w + m * k * nu, k)
            elif k_bound is not None and l_bound is not None:
                for k in range(-k_bound, k_bound + 1):
                    for l in range(-l_bound, l_bound + 1):
                        consider(label, idx, l, k)
            elif degrees is not None:
                lo, hi = degrees
                if window is not None and window[0] is not None and window[1] is not None:
                    a, b = window
                    # on a fixed degree, action is linear in k with slope
                    # -nu*(m - tau*(lam - m))/m, nonzero off the boundary
                    slope = -Fraction(nu) * (m - tau * (Fraction(model.lam) - m)) / m
                    if slope == 0:
                        if k_bound is None:
                            raise TruncationTooNarrow(
                                "at the regime boundary a k truncation is required")
                        ks = range(-k_bound, k_bound + 1)
                        for d in range(lo - 1, hi + 1):
                            for k in ks:
                                l2 = idx - model.half_dim - d - 2 * (ln - m * nu) * k
                                if l2 % 2 == 0:
                                    consider(label, idx, l2 // 2, k)
                        continue
                    for d in range(lo - 1, hi + 1):
                        # mu(check) = d: l = (idx - half_dim - d)/2 - (ln - m nu) k
                        num = idx - model.half_dim - d
                        if num % 2 != 0:
                            continue
                        off = Fraction(-tau, m) * Fraction(num, 2)
                        for k in k_interval_from(a, b, slope, off):
                            l = num // 2 - (ln - m * nu) * k
                            consider(label, idx, l, k)
                elif k_bound is not None:
                    for d in range(lo - 1, hi + 1):
                        num = idx - model.half_dim - d
                        if num % 2 != 0:
                            continue
                        for k in range(-k_bound, k_bound + 1):
                            consider(label, idx, num // 2 - (ln - m * nu) * k, k)
                else:
                    raise TruncationTooNarrow(
                        "degree-ranged enumeration needs a window or k truncation")
            else:
                raise TruncationTooNarrow(
                    "enumeration needs a winding filter, k and l truncations, "
                    "or a degree range")

    out: list[RFHGenerator] = []
    for label, idx, l, k in families:
        for hat in (False, True):
            g = RFHGenerator(label, idx, l, k, hat)
            if winding_filter is not None and winding(g, model, m) != winding_filter:
                continue
            if window is not None:
                a, b = window
                act = action(g, model, m, tau)
                if (a is not None and not a < act) or (b is not None and not act < b):
                    continue
            if degrees is not None:
                lo, hi = degrees
                if not lo <= rfh_index(g, model, m) <= hi:
                    continue
            if k_bound is not None and abs(g.k) > k_bound:
                continue
            if l_bound is not None and abs(g.cov) > l_bound:
                continue
            out.append(g)
    out.sort(key=_sort_key(model, m))
    return out


# ---------------------------------------------------------------------------
# Zero-winding complex and Gysin sequence
# ---------------------------------------------------------------------------

def _rfc_label(g: RFHGenerator) -> str:
    return ("hat" if g.hat else "chk") + f"({g.label},l={g.cov},k={g.k})"


def rfc_w0(model: BaseModel, m: int, tau: Fraction,
           degrees: tuple[int, int],
           window: Optional[tuple[Fraction, Fraction]] = None) -> GradedComplex:
    """Complex on the zero-winding generators, assembled from the generator
    bookkeeping: hat->hat is minus the Morse part, check->check the Morse
    part, check->hat the cap part.  Under l = m*k*nu this is the cone of the
    cap chain map, which the tests verify through an independent code path.

    An action window, when given, keeps only generators with
    -(1+tau)*k*nu strictly inside it (image terms escaping the window are
    truncated, as in the windowed cap)."""
    lo, hi = degrees
    nu = model.nu
    tau = Fraction(tau)
    L = cap_lambda_matrix(model, m)
    order = {label: i for i, (label, _) in enumerate(model.crit)}
    idx_of = dict(model.crit)

    def admitted(k: int) -> bool:
        if window is None:
            return True
        a, b = window
        act = -(1 + tau) * Fraction(k * nu)
        return (a is None or a < act) and (b is None or act < b)

    def fams(d: int) -> list[tuple[str, int, int]]:
        # (label, l, k) with check index d
        return [(label, m * k * nu, k) for label, k in model.generators_in_degree(d)
                if admitted(k)]

    morse: dict[tuple[str, str], int] = {}
    if model.morse_boundary:
        by_index: dict[int, list[str]] = {}
        for label, idx in model.crit:
            by_index.setdefault(idx, []).append(label)
        for idx, mat in model.morse_boundary.items():
            for i, t in enumerate(by_index.get(idx - 1, [])):
                for j, s in enumerate(by_index.get(idx, [])):
                    if mat.get(i, j):
                        morse[(t, s)] = mat.get(i, j)

    basis: dict[int, tuple[str, ...]] = {}
    layout: dict[int, list[RFHGenerator]] = {}
    for d in range(lo, hi + 1):
        hats = [RFHGenerator(lb, idx_of[lb], l, k, True) for lb, l, k in fams(d - 1)]
        checks = [RFHGenerator(lb, idx_of[lb], l, k, False) for lb, l, k in fams(d)]
        layout[d] = hats + checks
        basis[d] = tuple(_rfc_label(g) for g in layout[d])

    boundary: dict[int, IntMatrix] = {}
    for d in range(lo + 1, hi + 1):
        tgt_pos = {g: i for i, g in enumerate(layout[d - 1])}
        rows = [[0] * len(layout[d]) for _ in layout[d - 1]]
        for j, g in enumerate(layout[d]):
            if g.hat:
                for (tl, sl), c in morse.items():
                    if sl == g.label:
                        t = RFHGenerator(tl, idx_of[tl], m * g.k * nu, g.k, True)
                        if t in tgt_pos:
                            rows[tgt_pos[t]][j] -= c
            else:
                for (tl, sl), c in morse.items():
                    if sl == g.label:
                        t = RFHGenerator(tl, idx_of[tl], m * g.k * nu, g.k, False)
                        if t in tgt_pos:
                            rows[tgt_pos[t]][j] += c
                col = order[g.label]
                for ti, (tlab, _) in enumerate(model.crit):
                    for s, c in L[ti][col].items():
                        t = RFHGenerator(tlab, idx_of[tlab],
                                         g.cov + m * nu * s, g.k + s, True)
                        if t in tgt_pos:
                            rows[tgt_pos[t]][j] += c
        boundary[d] = IntMatrix.from_rows(rows, cols=len(layout[d]))
    return GradedComplex(degrees, basis, boundary)


def rfh_w0_table(model: BaseModel, m: int, tau: Fraction,
                 degrees: tuple[int, int]) -> dict[int, ZModulePresentation]:
    lo, hi = degrees
    C = rfc_w0(model, m, tau, (lo - 3, hi + 3))
    return homology_table(C, range(lo, hi + 1))


def gysin(model: BaseModel, m: int, degrees: tuple[int, int],
          tau: Fraction = Fraction(1)) -> LongExactSequence:
    """The Floer Gysin long exact sequence
    ... -> RFH^w0_d -> FH_d -> FH_{d-2} -> RFH^w0_{d-1} -> ... on the
    requested degrees, built over a window wide enough for them."""
    dlo, dhi = degrees
    fc = build_fc(model, degrees=(dlo - 6, dhi + 3))
    psi = cap_map(model, m, fc=fc)
    return cone_les(psi, degrees=(dlo, dhi), label_cone="RFH^w0", label_base="FH")


# ---------------------------------------------------------------------------
# Full boundary operator and the explicit primitives
# ---------------------------------------------------------------------------

def _require_index_gaps(model: BaseModel) -> None:
    idxs = sorted(idx for _, idx in model.crit)
    for a, b in zip(idxs, idxs[1:]):
        if b - a == 1:
            raise ConsecutiveIndexModel(
                f"model {model.name} has critical points of consecutive Morse index")


def boundary_full(gen: RFHGenerator, model: BaseModel, m: int) -> dict[RFHGenerator, int]:
    """d = d0 + d1 + d2 on a generator: d0 raises the covering number of a
    check, d1 vanishes (no consecutive Morse indices), and d2 is the cap
    term with its sphere-class and fiber shift.  Hats are cycles."""
    _require_index_gaps(model)
    if gen.hat:
        return {}
    out: dict[RFHGenerator, int] = {}
    idx_of = dict(model.crit)
    # d0
    t0 = RFHGenerator(gen.label, gen.morse_index, gen.cov + 1, gen.k, True)
    out[t0] = out.get(t0, 0) + 1
    # d2
    L = cap_lambda_matrix(model, m)
    order = {label: i for i, (label, _) in enumerate(model.crit)}
    col = order[gen.label]
    for ti, (tlab, _) in enumerate(model.crit):
        for s, c in L[ti][col].items():
            t = RFHGenerator(tlab, idx_of[tlab], gen.cov + m * model.nu * s,
                             gen.k + s, True)
            out[t] = out.get(t, 0) + c
    return {g: c for g, c in out.items() if c != 0}


def boundary_full_chain(chain: Mapping[RFHGenerator, int], model: BaseModel,
                        m: int) -> dict[RFHGenerator, int]:
    out: dict[RFHGenerator, int] = {}
    for g, c in chain.items():
        for t, ct in boundary_full(g, model, m).items():
            out[t] = out.get(t, 0) + c * ct
    return {g: c for g, c in out.items() if c != 0}


def full_complex(model: BaseModel, m: int, tau: Fraction,
                 degrees: tuple[int, int], k_bound: int) -> GradedComplex:
    """The literal full complex assembled on a truncation: every generator
    in the degree range with |k| <= k_bound, boundary from the d0 + d2
    rules with targets outside the truncation dropped.  The composite
    vanishes on any truncation because boundary images consist of fiberwise
    maxima, which are cycles."""
    lo, hi = degrees
    gens = enumerate_generators(model, m, tau, degrees=degrees, k_bound=k_bound)
    layout: dict[int, list[RFHGenerator]] = {d: [] for d in range(lo, hi + 1)}
    for g in gens:
        layout[rfh_index(g, model, m)].append(g)
    basis = {d: tuple(_rfc_label(g) for g in layout[d]) for d in layout}
    boundary: dict[int, IntMatrix] = {}
    for d in range(lo + 1, hi + 1):
        tgt_pos = {g: i for i, g in enumerate(layout[d - 1])}
        rows = [[0] * len(layout[d]) for _ in layout[d - 1]]
        for j, g in enumerate(layout[d]):
            for t, c in boundary_full(g, model, m).items():
                if t in tgt_pos:
                    rows[tgt_pos[t]][j] += c
        boundary[d] = IntMatrix.from_rows(rows, cols=len(layout[d]))
    return GradedComplex(degrees, basis, boundary)


def _cap_monomial(model: BaseModel, m: int):
    """For permutation-pattern caps: maps source column -> (target row,
    sphere shift, coefficient), and the inverse."""
    L = cap_lambda_matrix(model, m)
    fwd: dict[int, tuple[int, int, int]] = {}
    inv: dict[int, tuple[int, int, int]] = {}
    n = len(L)
    for j in range(n):
        entries = [(i, s, c) for i in range(n) for s, c in L[i][j].items()]
        if len(entries) != 1:
            raise UnstabilizedTruncation(
                "explicit primitives need a permutation-pattern cap")
        i, s, c = entries[0]
        fwd[j] = (i, s, c)
        if i in inv:
            raise UnstabilizedTruncation(
                "explicit primitives need a permutation-pattern cap")
        inv[i] = (j, s, c)
    return fwd, inv


def primitive_partial_sum(model: BaseModel, m: int, target: RFHGenerator,
                          n_terms: int, direction: str = "lower") -> dict[RFHGenerator, int]:
    """First n_terms of the explicit primitive of a hat cycle.  In the
    "lower" direction each residual is cancelled through its d0-preimage
    (valid in the low-radius regimes for any m); in the "upper" direction
    through its d2-preimage (integral only for m = 1)."""
    _require_index_gaps(model)
    if not target.hat:
        raise ValueError("primitives are built for hat generators")
    fwd, inv = _cap_monomial(model, m)
    order = {label: i for i, (label, _) in enumerate(model.crit)}
    labels = [label for label, _ in model.crit]
    idx_of = dict(model.crit)
    x: dict[RFHGenerator, int] = {}
    need: tuple[RFHGenerator, int] = (target, 1)
    for _ in range(n_terms):
        h, c = need
        if direction == "lower":
            p = RFHGenerator(h.label, h.morse_index, h.cov - 1, h.k, False)
            x[p] = x.get(p, 0) + c
            i, s, cc = fwd[order[p.label]]
            extra = RFHGenerator(labels[i], idx_of[labels[i]],
                                 p.cov + m * model.nu * s, p.k + s, True)
            need = (extra, -c * cc)
        elif direction == "upper":
            j, s, cc = inv[order[h.label]]
            if abs(cc) != 1:
                raise UnstabilizedTruncation(
                    "upper-direction primitives need unit cap coefficients (m = 1)")
            p = RFHGenerator(labels[j], idx_of[labels[j]],
                             h.cov - m * model.nu * s, h.k - s, False)
            x[p] = x.get(p, 0) + c * cc
            extra = RFHGenerator(p.label, p.morse_index, p.cov + 1, p.k, True)
            need = (extra, -c * cc)
        else:
            raise ValueError(f"unknown direction {direction!r}")
    return x


# ---------------------------------------------------------------------------
# Full Rabinowitz Floer homology
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroupValue:
    kind: str                                   # zero | presentation | qm | qm_tilde | relations
    presentation: Optional[ZModulePresentation] = None
    m: Optional[int] = None
    relations: Optional[dict] = None

    @classmethod
    def zero(cls) -> "GroupValue":
        return cls("zero")

    @classmethod
    def of(cls, p: ZModulePresentation) -> "GroupValue":
        return cls("zero") if p.is_zero() else cls("presentation", presentation=p)

    @classmethod
    def qm(cls, m: int) -> "GroupValue":
        return cls("qm", m=m)

    @classmethod
    def qm_tilde(cls, m: int) -> "GroupValue":
        return cls("qm_tilde", m=m)

    @classmethod
    def relations_form(cls, desc: dict) -> "GroupValue":
        return cls("relations", relations=desc)

    def to_json(self):
        if self.kind == "zero":
            return "0"
        if self.kind == "presentation":
            return {"free": self.presentation.free_rank,
                    "torsion": list(self.presentation.torsion)}
        if self.kind == "qm":
            return {"Qm": self.m}
        if self.kind == "qm_tilde":
            return {"QmTilde": self.m}
        return {"relations": self.relations}

    def __str__(self) -> str:
        if self.kind == "zero":
            return "0"
        if self.kind == "presentation":
            return str(self.presentation)
        if self.kind == "qm":
            return f"Q_{self.m}"
        if self.kind == "qm_tilde":
            return f"Q~_{self.m}"
        return "relations(...)"


@dataclass(frozen=True)
class FullRFHResult:
    model: str
    m: int
    tau: Fraction
    regime: CompletionRegime
    coeff: str
    table: dict[int, GroupValue]

    def to_json(self) -> dict:
        return {
            "model": self.model, "m": self.m, "tau": str(self.tau),
            "regime": self.regime.value, "coeff": self.coeff,
            "table": [{"degree": d, "group": self.table[d].to_json()}
                      for d in sorted(self.table)],
        }


class _SectorData:
    """Homology of the base per degree with the induced cap map, over a
    window wide enough for the requested sectors."""

    def __init__(self, model: BaseModel, m: int, lo: int, hi: int):
        self.model = model
        self.fc = build_fc(model, degrees=(lo - 3, hi + 3))
        self.psi = cap_map(model, m, fc=self.fc)
        self._bases: dict[int, HomologyBasis] = {}

    def basis(self, e: int) -> HomologyBasis:
        if e not in self._bases:
            self._bases[e] = homology_basis(self.fc, e)
        return self._bases[e]

    def group(self, e: int) -> ZModulePresentation:
        return self.basis(e).presentation

    def psi_induced(self, e: int) -> IntMatrix:
        return induced_matrix(self.psi.at(e), self.basis(e), self.basis(e - 2))


def _field_total_betti(model: BaseModel, p: int) -> int:
    if not model.morse_boundary:
        return len(model.crit)
    fc = build_fc(model, degrees=(-model.half_dim - 1, model.half_dim + 1))
    total = 0
    for e in range(-model.half_dim, model.half_dim + 1):
        d_out = fc.boundary_at(e)
        d_in = fc.boundary_at(e + 1)
        total += (fc.rank(e) - rank_mod_p(d_out, p)) - rank_mod_p(d_in, p)
    return total


def _field_quotient_dim(sect: _SectorData, e: int, b: int, p: int) -> int:
    """dim over F_p of FH_e / ker(psi^b) = rank of the induced psi^b."""
    fc = sect.fc
    K = kernel_basis_mod_p(fc.boundary_at(e), p)
    if not K:
        return 0
    Kmat = IntMatrix.from_rows([[K[j][i] for j in range(len(K))]
                                for i in range(len(K[0]))], cols=len(K))
    chain = Kmat
    for i in range(b):
        chain = sect.psi.at(e - 2 * i) @ chain
    B = fc.boundary_at(e - 2 * b + 1)
    aug = chain.hstack(B)
    return rank_mod_p(aug, p) - rank_mod_p(B, p)


def _truncated_coker(sect: _SectorData, star: int,
                     sectors: Sequence[int]) -> ZModulePresentation:
    """Smith-normal-form cokernel of id + cap-shift on finitely supported
    sums; exact whenever the listed sectors cover all nonzero groups."""
    dims = {k: sect.basis(star + 2 * k).cycles.cols for k in sectors}
    offs = {}
    total = 0
    for k in sectors:
        offs[k] = total
        total += dims[k]
    cols: list[list[int]] = []
    for k in sectors:
        for j in range(dims[k]):
            col = [0] * total
            col[offs[k] + j] = 1
            if k - 1 in offs:
                M = sect.psi_induced(star + 2 * k)
                for i in range(M.rows):
                    col[offs[k - 1] + i] += M.get(i, j)
            cols.append(col)
    # torsion relations of the sector groups enter as extra columns
    for k in sectors:
        R = sect.basis(star + 2 * k).relations
        for j in range(R.cols):
            col = [0] * total
            for i in range(R.rows):
                col[offs[k] + i] = R.get(i, j)
            cols.append(col)
    rel = IntMatrix.from_rows([[c[i] for c in cols] for i in range(total)],
                              cols=len(cols))
    return presentation_from_relations(total, rel)


def full_rfh(model: BaseModel, m: int, tau: Fraction,
             degrees: tuple[int, int], coeff: str = "z") -> FullRFHResult:
    """Per-degree full Rabinowitz Floer homology through the short exact
    sequence with middle map id + cap-shift on the regime-completed sum of
    base homologies."""
    tau = Fraction(tau)
    coeff = coeff.lower()
    field: Optional[int] = None
    if coeff.startswith("fp:"):
        field = int(coeff.split(":", 1)[1])
    elif coeff not in ("z",):
        raise ValueError(f"unknown coefficient spec {coeff!r}")

    regime = (CompletionRegime.FINITE if model.aspherical
              else regime_for(tau, model.lam, m))
    L = cap_lambda_matrix(model, m)
    n_crit = len(model.crit)
    nilpotent = lm_is_zero(lm_power(L, n_crit)) if n_crit else True
    iso_over_z = l_is_unit(lm_det(L)) if n_crit else True
    if field is not None:
        # over F_p a cap divisible by p dies: nilpotency can only improve
        nilpotent = nilpotent or lm_is_zero(
            [[{e: c % field for e, c in x.items() if c % field} for x in row]
             for row in lm_power(L, n_crit)])

    dlo, dhi = degrees
    period = model.c_min if not model.aspherical else 0
    span = 2 * max(period + 2, model.dim + 3, model.betti_total() + 2)
    sect = _SectorData(model, m, dlo + 1 - span - 2, dhi + 1 + span + 2)

    def sector_list(star: int) -> list[int]:
        if model.aspherical:
            ks = []
            for k in range(-(model.dim + 2), model.dim + 3):
                e = star + 2 * k
                if -model.half_dim <= e <= model.half_dim and not sect.group(e).is_zero():
                    ks.append(k)
            return ks
        return list(range(period))

    def value_for(d: int) -> GroupValue:
        star = d + 1
        if not model.aspherical and regime == CompletionRegime.ALL_LOWER:
            return GroupValue.zero()
        if nilpotent:
            # every class reduces to zero through the relation x ~ -cap(x)
            if not model.aspherical:
                return GroupValue.zero()
        if regime == CompletionRegime.ALL_UPPER:
            if field is not None or iso_over_z:
                return GroupValue.zero()
        if model.aspherical:
            ks = sector_list(star)
            if not ks:
                return GroupValue.zero()
            if field is not None:
                b = _field_total_betti(model, field)
                return GroupValue.of(ZModulePresentation(
                    _field_quotient_dim(sect, star, b, field), ()))
            ks_full = list(range(min(ks), max(ks) + 1))
            return GroupValue.of(_truncated_coker(sect, star, ks_full))
        # monotone
        groups = {k: sect.group(star + 2 * k) for k in range(period)}
        if all(g.is_zero() for g in groups.values()):
            return GroupValue.zero()
        if any(g.is_zero() for g in groups.values()):
            # a zero sector in the period chops every relation chain
            return GroupValue.zero()
        if field is not None:
            if regime == CompletionRegime.FINITE:
                b = _field_total_betti(model, field)
                return GroupValue.of(ZModulePresentation(
                    _field_quotient_dim(sect, star, b, field), ()))
            return GroupValue.zero()  # ALL_UPPER handled above; defensive
        # pattern detection: rank-one torsion-free sectors, cap = +-m
        pattern = True
        for k in range(period):
            g = groups[k]
            if g.free_rank != 1 or g.torsion:
                pattern = False
                break
            M = sect.psi_induced(star + 2 * k)
            if (M.rows, M.cols) != (1, 1) or abs(M.get(0, 0)) != m:
                pattern = False
                break
        if pattern:
            if regime == CompletionRegime.FINITE:
                return GroupValue.of(ZModulePresentation(1, ())) if m == 1 \
                    else GroupValue.qm_tilde(m)
            # upper regime: a unit chain is an isomorphism, so only m >= 2
            # leaves anything behind
            return GroupValue.zero() if m == 1 else GroupValue.qm(m)
        desc = {
            "note": "cokernel of id + cap-shift on the regime-completed sum",
            "regime": regime.value,
            "period": period,
            "sectors": [{"degree": star + 2 * k,
                         "group": GroupValue.of(groups[k]).to_json(),
                         "cap_to_previous": sect.psi_induced(star + 2 * k).to_lists()}
                        for k in range(period)],
        }
        return GroupValue.relations_form(desc)

    table = {d: value_for(d) for d in range(dlo, dhi + 1)}
    return FullRFHResult(model.name, m, tau, regime,
                         coeff if field is None else f"fp:{field}", table)


# ---------------------------------------------------------------------------
# Injectivity of id + cap-shift on truncations
# ---------------------------------------------------------------------------

def delta_injectivity(model: BaseModel, m: int, tau: Fraction,
                      k_range: int, degrees: tuple[int, int]) -> dict:
    """Check per degree that id + cap-shift has trivial kernel on the
    truncation |k| <= k_range of the completed sum, torsion relations
    accounted for.  The overflow row below the truncation is kept so that
    escaping cap terms are not silently dropped."""
    if k_range < 1:
        raise TruncationTooNarrow("need k_range >= 1")
    tau = Fraction(tau)
    regime = (CompletionRegime.FINITE if model.aspherical
              else regime_for(tau, model.lam, m))
    dlo, dhi = degrees
    span = 2 * (k_range + 2)
    results: dict[int, bool] = {}
    sect = _SectorData(model, m, dlo - span - 2, dhi + span + 2)
    for star in range(dlo, dhi + 1):
        in_sectors = list(range(-k_range, k_range + 1))
        out_sectors = list(range(-k_range - 1, k_range + 1))
        in_dims = {k: sect.basis(star + 2 * k).cycles.cols for k in in_sectors}
        out_dims = {j: sect.basis(star + 2 * j).cycles.cols for j in out_sectors}
        in_off, total_in = {}, 0
        for k in in_sectors:
            in_off[k] = total_in
            total_in += in_dims[k]
        out_off, total_out = {}, 0
        for j in out_sectors:
            out_off[j] = total_out
            total_out += out_dims[j]
        rows = [[0] * total_in for _ in range(total_out)]
        for k in in_sectors:
            for j in range(in_dims[k]):
                rows[out_off[k] + j][in_off[k] + j] += 1
            M = sect.psi_induced(star + 2 * k)
            for i in range(M.rows):
                for j in range(M.cols):
                    if M.get(i, j):
                        rows[out_off[k - 1] + i][in_off[k] + j] += M.get(i, j)
        delta = IntMatrix.from_rows(rows, cols=total_in)
        # group-level kernel: delta(x) in output relations => x in input relations
        def rel_block(sectors, offs, total):
            cols = []
            for k in sectors:
                R = sect.basis(star + 2 * k).relations
                for j in range(R.cols):
                    col = [0] * total
                    for i in range(R.rows):
                        col[offs[k] + i] = R.get(i, j)
                    cols.append(col)
            return IntMatrix.from_rows([[c[i] for c in cols] for i in range(total)],
                                       cols=len(cols))
        R_out = rel_block(out_sectors, out_off, total_out)
        R_in = rel_block(in_sectors, in_off, total_in)
        aug = delta.hstack(R_out)
        kb = kernel_basis(aug)
        proj = kb.submatrix(range(total_in), range(kb.cols))
        snf_in = smith_normal_form(R_in)
        injective = all(solve(R_in, proj.col(j), snf=snf_in) is not None
                        for j in range(proj.cols))
        results[star] = injective
    return {"regime": regime.value, "k_range": k_range,
            "degrees": results, "all": all(results.values())}


# ---------------------------------------------------------------------------
# Transfer and projection
# ---------------------------------------------------------------------------

def transfer_maps(model: BaseModel, tau: Fraction, degrees: tuple[int, int],
                  m: int) -> tuple[ChainMap, ChainMap]:
    """T from the degree-m complex to the degree-1 complex (hat, check) ->
    (hat, m*check) and P back with (hat, check) -> (m*hat, check); both are
    chain maps because the degree-m cap is m times the unit cap."""
    C_m = rfc_w0(model, m, tau, degrees)
    C_1 = rfc_w0(model, 1, tau, degrees)
    lo, hi = degrees
    t_maps: dict[int, IntMatrix] = {}
    p_maps: dict[int, IntMatrix] = {}
    for d in range(lo, hi + 1):
        if C_m.rank(d) != C_1.rank(d):
            raise WindowMismatch(f"generator counts differ at degree {d}")
        n_hat = len([b for b in C_m.basis[d] if b.startswith("hat")])
        n = C_m.rank(d)
        t_rows = [[(1 if i < n_hat else m) if i == j else 0 for j in range(n)]
                  for i in range(n)]
        p_rows = [[(m if i < n_hat else 1) if i == j else 0 for j in range(n)]
                  for i in range(n)]
        t_maps[d] = IntMatrix.from_rows(t_rows, cols=n)
        p_maps[d] = IntMatrix.from_rows(p_rows, cols=n)
    T = ChainMap(C_m, C_1, 0, t_maps)
    P = ChainMap(C_1, C_m, 0, p_maps)
    T.check()
    P.check()
    return T, P


# ---------------------------------------------------------------------------
# Orderability
# ---------------------------------------------------------------------------

def orderability_report(model: BaseModel, m: int,
                        tau: Fraction = Fraction(1)) -> dict:
    """Nonvanishing of the zero-winding homology on the stabilized window
    implies orderability and the existence of translated points; vanishing
    leaves both questions open."""
    dlo, dhi = -model.dim - 2, model.dim + 2
    table = rfh_w0_table(model, m, tau, (dlo, dhi))
    nonzero = any(not p.is_zero() for p in table.values())
    sect = _SectorData(model, m, dlo - 4, dhi + 4)
    surjective = True
    for e in range(dlo, dhi + 1):
        tgt = sect.basis(e - 2)
        if tgt.presentation.is_zero():
            continue
        induced = sect.psi_induced(e)
        coker = presentation_from_relations(
            tgt.cycles.cols, induced.hstack(tgt.relations))
        if not coker.is_zero():
            surjective = False
            break
    return {
        "rfh_w0_nonzero": nonzero,
        "cap_surjective": surjective,
        "c1_primitive": primitivity_report(model, m)["primitive"],
        "orderable": True if nonzero else "unknown",
        "translated_points": True if nonzero else "unknown",
    }
