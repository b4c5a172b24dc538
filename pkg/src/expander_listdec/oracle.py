"""Exhaustive ground truth and empirical checks of the decoding analysis."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .csp import (
    AEL,
    Assignment,
    CSPError,
    CSPInstance,
    ael_agreement_sets,
    csp_value,
    tanner_agreement_sets,
)
from .graphs import BipartiteExpander
from .regularity import CutDecomposition, Factor, build_factor, min_concentration
from .tanner import right_views

ORACLE_CAP = 1 << 20
EDGE = "edge"
FOLDED = "folded"


class OracleCapExceeded(RuntimeError):
    pass


def brute_force_list_decode(codewords, ytilde, radius: float, distance_mode: str = EDGE,
                            graph: BipartiteExpander | None = None) -> list[np.ndarray]:
    """Every codeword within ``radius`` of ``ytilde``, in the order given.

    ``folded`` counts right vertices whose views differ and needs ``graph``.
    """
    C = np.atleast_2d(np.asarray(codewords, dtype=np.int64))
    if len(C) > ORACLE_CAP:
        raise OracleCapExceeded(f"{len(C)} codewords exceed oracle cap {ORACLE_CAP}")
    y = np.asarray(ytilde, dtype=np.int64)
    if distance_mode == EDGE:
        dist = np.count_nonzero(C != y, axis=1)
    elif distance_mode == FOLDED:
        if graph is None:
            raise ValueError("folded distance needs the graph")
        diff = (C != y)[:, graph.right_edges]
        dist = np.count_nonzero(diff.any(axis=2), axis=1)
    else:
        raise ValueError(f"unknown distance mode {distance_mode!r}")
    return [c.copy() for c in C[dist <= radius + 1e-9]]


def _keys(words) -> set[tuple[int, ...]]:
    return {tuple(int(s) for s in w) for w in words}


@dataclass
class OracleReport:
    oracle: list[np.ndarray]
    decoder: list[np.ndarray]
    missing: list[tuple[int, ...]] = field(init=False)
    spurious: list[tuple[int, ...]] = field(init=False)
    claims: dict[str, bool] = field(default_factory=dict)

    def __post_init__(self):
        o, d = _keys(self.oracle), _keys(self.decoder)
        self.missing = sorted(o - d)
        self.spurious = sorted(d - o)

    @property
    def sound(self) -> bool:
        return not self.spurious

    @property
    def complete(self) -> bool:
        return not self.missing

    def to_dict(self) -> dict:
        return {
            "oracle_size": len(self.oracle),
            "decoder_size": len(self.decoder),
            "missing": [list(m) for m in self.missing],
            "spurious": [list(s) for s in self.spurious],
            "claims": self.claims,
        }


def compare(oracle, decoder) -> OracleReport:
    return OracleReport(list(oracle), list(decoder))


# concentration ----------------------------------------------------------------


@dataclass(frozen=True)
class ConcentrationCheck:
    eta_measured: float | None
    eta_bound: float | None
    passed: bool
    precondition_ok: bool
    reason: str = ""


def side_factor(decs: list[CutDecomposition], n: int, side: str) -> Factor:
    """Factor from the left (``S``) or right (``T``) cut sets of all decompositions."""
    pick = 1 if side == "left" else 2
    return build_factor(n, [term[pick] for dec in decs for term in dec.terms])


def check_concentration(inst: CSPInstance, decs: list[CutDecomposition], z, ytilde, eps: float,
                        gamma: float, is_codeword: bool = True) -> ConcentrationCheck:
    """Measure how far ``x_z`` is from measurable on the restricted factor.

    AEL: left values on ``B_L`` restricted to ``S_z``; Tanner: right values on
    ``B_R`` restricted to ``T_z``.  The bound is ``(5 l^2 gamma / eps) n / |W|``.
    """
    if not is_codeword:
        return ConcentrationCheck(None, None, False, False, "z is not a codeword")
    g = inst.graph
    try:
        if inst.flavor == AEL:
            sets = ael_agreement_sets(inst, z, ytilde, eps)
            W, values, side = sets.S, sets.x.left, "left"
        else:
            sets = tanner_agreement_sets(inst, z, ytilde, eps)
            W, values, side = sets.T, sets.x.right, "right"
    except CSPError as exc:
        return ConcentrationCheck(None, None, False, False, str(exc))
    size = int(W.sum())
    if size == 0:
        return ConcentrationCheck(None, None, False, False, "agreement set is empty")
    factor = side_factor(decs, g.n, side).restrict(W)
    eta, _ = min_concentration(values, factor)
    bound = 5 * inst.ell**2 * gamma / eps * g.n / size
    return ConcentrationCheck(eta, bound, bool(eta <= bound + 1e-12), True)


def full_agreement_value(inst: CSPInstance, z, ytilde, eps: float) -> tuple[int, int]:
    """``(val_{S_z,T_z}(x_z), |E(S_z, T_z)|)``; the two should coincide."""
    sets = (ael_agreement_sets if inst.flavor == AEL else tanner_agreement_sets)(inst, z, ytilde, eps)
    S = sets.S
    T = sets.T
    return csp_value(inst, sets.x, S, T), inst.graph.edge_count(S, T)


# value invariance ------------------------------------------------------------------


def permute_within(values: np.ndarray, groups: list[np.ndarray], rng: np.random.Generator) -> np.ndarray:
    out = values.copy()
    for grp in groups:
        if grp.size > 1:
            out[grp] = values[rng.permutation(grp)]
    return out


def check_value_invariance(inst: CSPInstance, decs: list[CutDecomposition], trials: int, seed: int) -> float:
    """Fraction of trials with ``|val_{S,T}(x) - val_{S,T}(x')| <= 2 l^2 * residual``.

    ``x'`` permutes the values of ``x`` inside each atom of the left factor
    restricted to ``S`` and each atom of the right factor restricted to ``T``,
    so the two assignments induce the same distribution on every atom.
    """
    g = inst.graph
    rng = np.random.default_rng(seed)
    residual = max((d.certified_residual for d in decs), default=0.0)
    bound = 2 * inst.ell**2 * residual
    BL, BR = side_factor(decs, g.n, "left"), side_factor(decs, g.n, "right")
    ok = 0
    for _ in range(trials):
        S = rng.random(g.n) < rng.random()
        T = rng.random(g.n) < rng.random()
        x = Assignment(rng.integers(0, inst.ell, g.n), rng.integers(0, inst.ell, g.n))
        xp = Assignment(permute_within(x.left, BL.restrict(S).atoms, rng),
                        permute_within(x.right, BR.restrict(T).atoms, rng))
        diff = abs(csp_value(inst, x, S, T) - csp_value(inst, xp, S, T))
        ok += diff <= bound + 1e-9
    return ok / trials if trials else 1.0


# adversarial reassignment ------------------------------------------------------


def rank_shift(values: np.ndarray, atoms: list[np.ndarray], plurality: dict[int, int], ell: int) -> np.ndarray:
    """Stress construction for concentration tests.

    Inside each atom every non-plurality value moves to the next value
    (mod ``ell``) that is not the plurality value, so each minority class
    shifts one rank while the plurality class stays put.
    """
    out = np.asarray(values).copy()
    for a, atom in enumerate(atoms):
        top = plurality[a]
        vals = out[atom]
        for i in np.nonzero(vals != top)[0]:
            nxt = (vals[i] + 1) % ell
            vals[i] = nxt if nxt != top else (nxt + 1) % ell
        out[atom] = vals
    return out


def folded_mismatch(graph: BipartiteExpander, a, b) -> np.ndarray:
    return np.any(right_views(graph, a) != right_views(graph, b), axis=1)
