"""Randomized checks of the structural facts the decoders rely on.

Each ``check_*`` returns a :class:`ClaimResult`.  The ``verify`` subcommand
runs them at reduced counts; the acceptance tests run them at full size.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .ael import measured_distance as ael_measured_distance
from .codes import make_linear_code, make_rs_code, rs_encode, rs_unique_decode
from .csp import build_ael_csp, build_tanner_csp
from .graphs import mixing_discrepancy, random_regular_bipartite, robust_neighbor_set, robust_size_bound
from .harness import Instance, ael_instance, corrupt, run_decode, tanner_instance
from .listdec import DecodeParams
from .oracle import check_value_invariance, full_agreement_value
from .regularity import (
    build_factor,
    conditional_average,
    cut_norm_residual,
    default_p_max,
    weak_regularity_decompose,
)
from .tanner import build_tanner, measured_distance as tanner_measured_distance


@dataclass
class ClaimResult:
    name: str
    passed: int
    total: int
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.total > 0 and self.passed == self.total

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        extra = " ".join(f"{k}={v}" for k, v in self.detail.items())
        return f"{status} {self.name}: {self.passed}/{self.total} {extra}".rstrip()


def _timed(fn):
    def run(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res

    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


# small instance families ------------------------------------------------------------

C5 = [[1, 1, 0, 0, 0], [0, 0, 1, 1, 1]]  # 4 codewords, every radius-2 ball holds at most 2


def c5_code():
    return make_linear_code(2, C5)


def tiny_ael_instances(seed: int) -> list[Instance]:
    """AEL codes small enough for exhaustive oracles and full enumeration."""
    par3 = make_linear_code(2, [[1, 0, 1], [0, 1, 1]])
    rep5 = make_linear_code(5, [[1, 1, 1]])
    out = []
    for n, q, k, inner in ((4, 4, 2, par3), (5, 5, 1, rep5), (5, 5, 2, rep5)):
        g = random_regular_bipartite(n, 3, seed + n + k)
        out.append(ael_instance(g, inner, make_rs_code(q, n, k)))
    return out


def tiny_tanner_instances(seed: int) -> list[Instance]:
    return [tanner_instance(random_regular_bipartite(n, 5, seed + n), c5_code()) for n in (5, 6)]


def finisher_radius(inst: Instance) -> int:
    """Corruption budget in edges that the finishing decoder always absorbs."""
    if inst.family == "ael":
        return inst.code.outer.radius
    return (tanner_measured_distance(inst.code) - 1) // 2


# graphs -------------------------------------------------------------------------------


@_timed
def check_mixing(seed: int = 0, graphs: int = 6, pairs: int = 200) -> ClaimResult:
    rng = np.random.default_rng(seed)
    ok = total = 0
    worst = -math.inf
    for i in range(graphs):
        n = int(rng.integers(8, 65))
        d = int(rng.integers(2, min(n, 9) + 1))
        g = random_regular_bipartite(n, d, seed + i)
        for _ in range(pairs):
            S = rng.random(n) < rng.random()
            T = rng.random(n) < rng.random()
            disc, bound = mixing_discrepancy(g, S, T)
            ok += disc <= bound + 1e-9
            total += 1
            worst = max(worst, disc - bound)
    return ClaimResult("expander mixing lemma", ok, total, {"max_excess": round(worst, 6)})


@_timed
def check_robust_neighbors(seed: int = 0, instances: int = 100) -> ClaimResult:
    rng = np.random.default_rng(seed)
    ok = 0
    for i in range(instances):
        n = int(rng.integers(6, 49))
        d = int(rng.integers(2, min(n - 1, 8) + 1))
        g = random_regular_bipartite(n, d, seed + 1000 + i)
        alpha = float(rng.uniform(0.2, 1.0))
        eps = float(rng.uniform(0.05, alpha))
        T = rng.permutation(n)[: math.ceil(alpha * n)]
        S = robust_neighbor_set(g, T, alpha, eps)
        ok += len(S) > robust_size_bound(g, eps)
    return ClaimResult("robust neighbor set size", ok, instances)


# regularity ------------------------------------------------------------------------------


def _random_edge_function(g, rng) -> sp.csr_matrix:
    keep = rng.random(g.num_edges) < rng.uniform(0.2, 0.9)
    return sp.csr_matrix((np.ones(int(keep.sum())), (g.edge_left[keep], g.edge_right[keep])), shape=(g.n, g.n))


@_timed
def check_regularity_residual(seed: int = 0, instances: int = 100) -> ClaimResult:
    rng = np.random.default_rng(seed)
    ok = 0
    ps = []
    for i in range(instances):
        n = int(rng.integers(4, 13))
        d = int(rng.integers(2, min(n, 4) + 1))
        gamma = float(rng.uniform(0.1, 0.5))
        g = random_regular_bipartite(n, d, seed + 2000 + i)
        gm = _random_edge_function(g, rng)
        dec = weak_regularity_decompose(gm, gamma, g.num_edges, oracle="heuristic", seed=i)
        res = cut_norm_residual(gm, dec)
        ok += dec.certified_exact and res <= gamma * g.num_edges + 1e-9
        ps.append((dec.p, default_p_max(gamma)))
    return ClaimResult("weak regularity residual", ok, instances,
                       {"max_p": max(p for p, _ in ps), "min_p_cap": min(c for _, c in ps)})


@_timed
def check_measurable_inner_product(seed: int = 0, trials: int = 1000) -> ClaimResult:
    rng = np.random.default_rng(seed)
    ok = 0
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, 40))
        cuts = [rng.random(n) < 0.5 for _ in range(int(rng.integers(0, 5)))]
        B = build_factor(n, cuts)
        per_atom = rng.normal(size=B.num_atoms)
        h = per_atom[B.atom_of]
        f = rng.normal(size=n)
        diff = abs(h @ f - h @ conditional_average(f, B))
        worst = max(worst, diff)
        ok += diff <= 1e-9
    return ClaimResult("measurable inner product", ok, trials, {"max_diff": f"{worst:.2e}"})


# CSP facts ---------------------------------------------------------------------------


@_timed
def check_full_satisfaction(seed: int = 0, pairs: int = 100) -> ClaimResult:
    """``val_{S_z,T_z}(x_z) = |E(S_z, T_z)|`` for codewords near a corrupted word."""
    rng = np.random.default_rng(seed)
    insts = tiny_ael_instances(seed) + tiny_tanner_instances(seed)
    ok = 0
    for i in range(pairs):
        inst = insts[i % len(insts)]
        z = inst.random_codeword(rng)
        y, _ = corrupt(z, int(rng.integers(0, finisher_radius(inst) + 1)), inst.q, rng)
        if inst.family == "ael":
            csp = build_ael_csp(inst.code.inner, inst.graph, y, inst.code.inner.size)
            eps = inst.code.inner.rel_distance / 2
        else:
            csp = build_tanner_csp(inst.code.local, inst.graph, y, 2)
            eps = inst.code.local.rel_distance / 2
        val, edges = full_agreement_value(csp, z, y, eps)
        ok += val == edges
    return ClaimResult("full satisfaction on agreement sets", ok, pairs)


@_timed
def check_distribution_invariance(seed: int = 0, pairs: int = 100) -> ClaimResult:
    rng = np.random.default_rng(seed)
    ok = 0
    for i in range(pairs):
        tanner = i % 2 == 1
        n = int(rng.integers(6, 11))
        if tanner:
            g = random_regular_bipartite(n, 5, seed + 3000 + i)
            z = np.zeros(g.num_edges, dtype=np.int64)
            y, _ = corrupt(z, int(rng.integers(0, g.num_edges // 3)), 2, rng)
            csp = build_tanner_csp(c5_code(), g, y, 2)
        else:
            g = random_regular_bipartite(n, 3, seed + 3000 + i)
            inner = make_linear_code(2, [[1, 0, 1], [0, 1, 1]])
            y = rng.integers(0, 2, g.num_edges)
            csp = build_ael_csp(inner, g, y, inner.size)
        decs = [weak_regularity_decompose(csp.g_alpha(a, b), 0.2, g.num_edges, seed=i)
                for a in range(csp.ell) for b in range(csp.ell)]
        ok += check_value_invariance(csp, decs, 1, seed + i) == 1.0
    return ClaimResult("value invariance under within-atom permutation", ok, pairs)


# codes -----------------------------------------------------------------------------------


@_timed
def check_design_distance(seed: int = 0) -> ClaimResult:
    """Measured distance of every small instance against its design distance."""
    ok = total = 0
    rows = []
    for inst in tiny_ael_instances(seed) + tiny_tanner_instances(seed):
        if inst.family == "ael":
            meas = ael_measured_distance(inst.code) / inst.graph.n
        else:
            meas = tanner_measured_distance(inst.code) / inst.code.length
        design = inst.code.design_distance
        rows.append(f"{inst.family}{inst.graph.n}:{meas:.3f}>={design:.3f}")
        ok += meas >= design - 1e-12
        total += 1
    # a Tanner code with a positive design distance
    g = random_regular_bipartite(6, 6, seed)
    tc = build_tanner(g, make_linear_code(2, [[1, 1, 1, 1, 1, 1]]))
    meas = tanner_measured_distance(tc) / tc.length
    ok += meas >= tc.design_distance - 1e-12
    total += 1
    return ClaimResult("measured distance >= design distance", ok, total)


@_timed
def check_berlekamp_welch(seed: int = 0, trials: int = 1000) -> ClaimResult:
    rng = np.random.default_rng(seed)
    configs = [(16, 12, 4), (16, 15, 5), (13, 13, 3), (8, 7, 2), (32, 20, 6), (5, 5, 1)]
    ok = 0
    for i in range(trials):
        q, n, k = configs[i % len(configs)]
        rs = make_rs_code(q, n, k)
        msg = rng.integers(0, q, k)
        y, _ = corrupt(rs_encode(rs, msg), int(rng.integers(0, rs.radius + 1)), q, rng)
        got = rs_unique_decode(rs, y)
        ok += got is not None and np.array_equal(got, msg)
    return ClaimResult("Berlekamp-Welch within radius", ok, trials)


# decoding ---------------------------------------------------------------------------------


def soundness_instances(seed: int) -> list[tuple[Instance, DecodeParams]]:
    """Moderate instances for randomized soundness runs."""
    out = []
    c5 = c5_code()
    for n in (8, 12, 16, 24, 32, 48, 64):
        g = random_regular_bipartite(n, 5, seed + n)
        out.append((tanner_instance(g, c5),
                    DecodeParams(eps=0.2, ell=2, gamma=0.2, p_max=3, enum_cap=64, restarts=4, seed=seed)))
    inner8 = make_linear_code(2, [[1, 0, 0, 1], [0, 1, 0, 1], [0, 0, 1, 1]])
    for n, k in ((8, 2), (8, 4)):
        g = random_regular_bipartite(n, 4, seed + n + k)
        out.append((ael_instance(g, inner8, make_rs_code(8, n, k)),
                    DecodeParams(eps=0.25, ell=8, gamma=0.2, p_max=2, enum_cap=256, restarts=4, seed=seed)))
    inner16 = make_linear_code(16, [[1, 1, 1, 1]])
    for n, k in ((16, 4), (12, 3)):
        g = random_regular_bipartite(n, 4, seed + n + k)
        out.append((ael_instance(g, inner16, make_rs_code(16, n, k)),
                    DecodeParams(eps=0.5, ell=16, gamma=0.25, p_max=1, enum_cap=128, restarts=2, seed=seed)))
    return out


@_timed
def check_soundness(seed: int = 0, runs: int = 500) -> ClaimResult:
    """Every emitted word is a codeword within the radius; list sizes stay under the ceiling."""
    rng = np.random.default_rng(seed)
    insts = soundness_instances(seed)
    ok = 0
    ceiling_ok = 0
    families = {"tanner": 0, "ael": 0}
    for i in range(runs):
        inst, params = insts[i % len(insts)]
        families[inst.family] += 1
        count = int(rng.integers(0, inst.graph.num_edges // 3 + 1))
        res = run_decode(inst, params, count, seed + i)
        ok += not res.unsound
        ceiling_ok += len(res.report.words) <= res.report.list_bound
    return ClaimResult("soundness", ok, runs, {"list_ceiling_ok": ceiling_ok, **families})


@_timed
def check_completeness(seed: int = 0, trials: int = 200) -> ClaimResult:
    """Decoder list contains the exhaustive list when corruption is within the finisher radius."""
    rng = np.random.default_rng(seed)
    insts = tiny_ael_instances(seed) + tiny_tanner_instances(seed)
    ok = nonempty = ceiling_ok = 0
    for i in range(trials):
        inst = insts[i % len(insts)]
        if inst.family == "ael":
            eps = inst.code.inner.rel_distance / 2
            params = DecodeParams(eps=eps, ell=inst.code.inner.size, oracle="exact", seed=seed + i)
        else:
            eps = inst.code.local.rel_distance / 2
            params = DecodeParams(eps=eps, ell=2, gamma=0.05, oracle="exact", seed=seed + i)
        count = int(rng.integers(0, finisher_radius(inst) + 1))
        res = run_decode(inst, params, count, seed + i, oracle_check=True)
        ok += res.oracle is not None and res.oracle.complete and res.oracle.sound and not res.unsound
        nonempty += bool(res.oracle is not None and res.oracle.oracle)
        ceiling_ok += len(res.report.words) <= res.report.list_bound
    return ClaimResult("oracle completeness within finisher radius", ok, trials,
                       {"nonempty_oracle_lists": nonempty, "list_ceiling_ok": ceiling_ok})


def bench_instance(n: int, seed: int = 0) -> Instance:
    return tanner_instance(random_regular_bipartite(n, 5, seed + n), c5_code())


BENCH_PARAMS = dict(eps=0.2, ell=2, gamma=0.1, oracle="heuristic", p_max=1, enum_cap=4, restarts=4)


def all_quick(seed: int = 0) -> list[ClaimResult]:
    """Reduced-count versions of every check, for the ``verify`` subcommand."""
    return [
        check_mixing(seed, graphs=2, pairs=50),
        check_robust_neighbors(seed, instances=20),
        check_regularity_residual(seed, instances=10),
        check_measurable_inner_product(seed, trials=100),
        check_full_satisfaction(seed, pairs=10),
        check_distribution_invariance(seed, pairs=10),
        check_design_distance(seed),
        check_berlekamp_welch(seed, trials=100),
        check_soundness(seed, runs=22),
        check_completeness(seed, trials=10),
    ]


__all__ = [name for name in dir() if name.startswith("check_")] + ["ClaimResult", "all_quick"]
