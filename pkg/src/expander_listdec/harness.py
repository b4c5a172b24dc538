"""Experiment plumbing: instance specs, the corruption channel, decode runs, sweeps and benchmarks."""

from __future__ import annotations

import csv
import io
import json
import statistics
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ael import AELCode, ael_encode, ael_enumerate, build_ael, folded_distance, load_ael_config
from .codes import (
    LocalCode,
    RSCode,
    gv_search,
    make_linear_code,
    make_rs_code,
    read_code,
    rs_encode,
    rs_is_codeword,
)
from .graphs import BipartiteExpander, random_regular_bipartite, read_graph
from .listdec import DecodeParams, DecodeReport, ael_list_decode, tanner_list_decode
from .oracle import EDGE, FOLDED, OracleReport, brute_force_list_decode, compare
from .tanner import EnumerationTooLarge, TannerCode, build_tanner, is_enumerable, tanner_enumerate, tanner_membership

ORACLE_MAX_CODEWORDS = 1 << 16

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNSOUND = 2
EXIT_CAP = 3


class SpecError(ValueError):
    pass


# specs ----------------------------------------------------------------------------


def parse_spec(spec: str) -> tuple[str, dict[str, str]]:
    """``"kind:a=1,b=2"`` -> ``("kind", {"a": "1", "b": "2"})``."""
    kind, _, rest = spec.partition(":")
    fields = {}
    for item in filter(None, rest.split(",")):
        key, eq, val = item.partition("=")
        if not eq:
            raise SpecError(f"malformed field {item!r} in {spec!r}")
        fields[key.strip()] = val.strip()
    return kind.strip(), fields


def _need(fields: dict[str, str], spec: str, *names: str) -> list[str]:
    missing = [n for n in names if n not in fields]
    if missing:
        raise SpecError(f"{spec!r} is missing {', '.join(missing)}")
    return [fields[n] for n in names]


def load_graph(spec: str) -> BipartiteExpander:
    """``random:n=..,d=..,seed=..`` or a graph file."""
    kind, f = parse_spec(spec)
    if kind == "random":
        n, d = (int(v) for v in _need(f, spec, "n", "d"))
        return random_regular_bipartite(n, d, int(f.get("seed", 0)))
    if Path(spec).is_file():
        return read_graph(spec)
    raise SpecError(f"unknown graph spec {spec!r}")


def load_local_code(spec: str) -> LocalCode:
    """``gv:q,d,delta0,ell,seed[,trials]``, ``rep:q,d``, ``rows:q=2,g=11000/00111`` or a code file."""
    kind, f = parse_spec(spec)
    if kind == "gv":
        q, d = int(f.get("q", 0)), int(f.get("d", 0))
        _need(f, spec, "q", "d", "delta0", "ell")
        return gv_search(q, d, float(f["delta0"]), int(f["ell"]), int(f.get("trials", 200)),
                         int(f.get("seed", 0)))
    if kind == "rep":
        q, d = (int(v) for v in _need(f, spec, "q", "d"))
        return make_linear_code(q, [[1] * d])
    if kind == "rows":
        q, rows = _need(f, spec, "q", "g")
        return make_linear_code(int(q), [[int(c) for c in r] for r in rows.split("/")])
    if Path(spec).is_file():
        code = read_code(spec)
        if not isinstance(code, LocalCode):
            raise SpecError(f"{spec} holds an RS code, expected a local code")
        return code
    raise SpecError(f"unknown code spec {spec!r}")


def load_rs(spec: str) -> RSCode:
    """``q,n,k``."""
    try:
        q, n, k = (int(v) for v in spec.split(","))
    except ValueError as exc:
        raise SpecError(f"RS spec must be q,n,k, got {spec!r}") from exc
    return make_rs_code(q, n, k)


# channel ------------------------------------------------------------------------------


def corrupt(word, count: int, q: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Replace ``count`` uniformly chosen positions by a uniformly random different symbol."""
    word = np.asarray(word, dtype=np.int64)
    if not (0 <= count <= word.size):
        raise ValueError(f"cannot corrupt {count} of {word.size} positions")
    pos = np.sort(rng.choice(word.size, size=count, replace=False))
    out = word.copy()
    out[pos] = (word[pos] + rng.integers(1, q, size=count)) % q
    return out, pos


def corruption_count(length: int, count: int | None, rate: float | None) -> int:
    if count is not None:
        return count
    return int(round((rate or 0.0) * length))


# decode runs ------------------------------------------------------------------------------


@dataclass
class Instance:
    family: str
    code: TannerCode | AELCode

    @property
    def graph(self) -> BipartiteExpander:
        return self.code.graph

    @property
    def q(self) -> int:
        return self.code.local.q if self.family == "tanner" else self.code.inner.q

    def random_codeword(self, rng: np.random.Generator) -> np.ndarray:
        """Uniform codeword; the zero word when a Tanner basis is out of reach."""
        if self.family == "ael":
            rs = self.code.outer
            word, _ = ael_encode(self.code, rs_encode(rs, rng.integers(0, rs.q, rs.k)))
            return word
        try:
            B = self.code.basis()
        except EnumerationTooLarge:
            return np.zeros(self.code.length, dtype=np.int64)
        coeffs = rng.integers(0, self.q, B.shape[0])
        return self.code.local.gf.matmul(coeffs[None, :], B)[0] if B.shape[0] else np.zeros(self.code.length, np.int64)

    def decode(self, y, params: DecodeParams) -> DecodeReport:
        if self.family == "tanner":
            return tanner_list_decode(self.code, y, params)
        return ael_list_decode(self.code, y, params)

    def codewords(self) -> np.ndarray | None:
        """All codewords when there are at most ``ORACLE_MAX_CODEWORDS``."""
        if self.family == "tanner":
            if not is_enumerable(self.code, ORACLE_MAX_CODEWORDS):
                return None
            return tanner_enumerate(self.code, ORACLE_MAX_CODEWORDS)
        rs = self.code.outer
        if rs.q**rs.k > ORACLE_MAX_CODEWORDS:
            return None
        return ael_enumerate(self.code, ORACLE_MAX_CODEWORDS)

    def oracle(self, y, radius: float) -> list[np.ndarray] | None:
        words = self.codewords()
        if words is None:
            return None
        mode = EDGE if self.family == "tanner" else FOLDED
        return brute_force_list_decode(words, y, radius, mode, self.graph)


def tanner_instance(graph: BipartiteExpander, local: LocalCode) -> Instance:
    return Instance("tanner", build_tanner(graph, local))


def ael_instance(graph: BipartiteExpander, inner: LocalCode, outer: RSCode) -> Instance:
    return Instance("ael", build_ael(inner, outer, graph))


def load_instance(family: str, graph: str | None = None, local: str | None = None,
                  rs: str | None = None, config: str | None = None) -> Instance:
    if family == "ael" and config:
        return Instance("ael", load_ael_config(config))
    if graph is None or local is None:
        raise SpecError("need --graph and --local (or --config for AEL)")
    g, c = load_graph(graph), load_local_code(local)
    if family == "tanner":
        return tanner_instance(g, c)
    if family == "ael":
        if rs is None:
            raise SpecError("AEL needs --rs q,n,k")
        return ael_instance(g, c, load_rs(rs))
    raise SpecError(f"unknown family {family!r}")


@dataclass
class RunResult:
    transmitted: np.ndarray
    received: np.ndarray
    corrupted: np.ndarray
    report: DecodeReport
    oracle: OracleReport | None
    unsound: list[list[int]]

    @property
    def contains_transmitted(self) -> bool:
        return any(np.array_equal(w, self.transmitted) for w in self.report.words)

    def exit_code(self) -> int:
        if self.unsound or (self.oracle is not None and self.oracle.spurious):
            return EXIT_UNSOUND
        if self.report.enum_truncated or self.report.lists_truncated:
            return EXIT_CAP
        return EXIT_OK

    def to_dict(self, timings: bool = True) -> dict:
        out = {
            "transmitted": self.transmitted.tolist(),
            "received": self.received.tolist(),
            "corrupted_positions": self.corrupted.tolist(),
            "contains_transmitted": self.contains_transmitted,
            "decode": self.report.to_dict(timings=timings),
            "soundness_violations": self.unsound,
        }
        out["oracle"] = self.oracle.to_dict() if self.oracle is not None else None
        return out


def check_soundness(inst: Instance, y, report: DecodeReport) -> list[list[int]]:
    """Words that are not codewords or lie outside the decoding radius."""
    bad = []
    for w in report.words:
        if inst.family == "tanner":
            ok = tanner_membership(inst.code, w) and np.count_nonzero(w != y) <= report.radius + 1e-9
        else:
            ok = _is_ael_codeword(inst.code, w) and folded_distance(inst.graph, w, y) <= report.radius + 1e-9
        if not ok:
            bad.append(w.tolist())
    return bad


def _is_ael_codeword(code: AELCode, word) -> bool:
    ranks = code.ranks(np.asarray(word).reshape(code.graph.n, code.graph.d))
    return bool(np.all(ranks >= 0)) and rs_is_codeword(code.outer, ranks)


def run_decode(inst: Instance, params: DecodeParams, count: int, seed: int,
               oracle_check: bool = False, message: np.ndarray | None = None) -> RunResult:
    rng = np.random.default_rng(seed)
    z = inst.random_codeword(rng) if message is None else np.asarray(message, dtype=np.int64)
    y, pos = corrupt(z, count, inst.q, rng)
    report = inst.decode(y, params)
    oracle = None
    if oracle_check:
        words = inst.oracle(y, report.radius)
        if words is not None:
            oracle = compare(words, report.words)
    return RunResult(z, y, pos, report, oracle, check_soundness(inst, y, report))


# sweeps and benchmarks ----------------------------------------------------------------------

SWEEP_FIELDS = ["n", "corruption", "seed", "list_size", "contains_transmitted", "completeness",
                "sound", "atoms_left", "atoms_right", "enumeration_size", "t_csp", "t_decompose", "t_enumerate"]
BENCH_FIELDS = ["n", "runs", "median_seconds", "ratio_to_previous"]


def sweep(inst: Instance, params: DecodeParams, counts: list[int], seeds: list[int]) -> list[dict]:
    rows = []
    for count in counts:
        for seed in seeds:
            res = run_decode(inst, params, count, seed, oracle_check=True)
            if res.oracle is not None:
                total = len(res.oracle.oracle)
                completeness = 1.0 if total == 0 else 1 - len(res.oracle.missing) / total
            else:
                completeness = float(res.contains_transmitted)
            t = res.report.timings
            rows.append({
                "n": inst.graph.n, "corruption": count, "seed": seed,
                "list_size": len(res.report.words), "contains_transmitted": int(res.contains_transmitted),
                "completeness": completeness, "sound": int(not res.unsound),
                "atoms_left": res.report.atoms_left, "atoms_right": res.report.atoms_right,
                "enumeration_size": res.report.enumeration_size,
                "t_csp": t.get("csp"), "t_decompose": t.get("decompose"), "t_enumerate": t.get("enumerate"),
            })
    return rows


def bench(make_instance, ns: list[int], params: DecodeParams, rate: float, runs: int = 5,
          seed: int = 0) -> list[dict]:
    """Median wall time of one decode per ``n``; ``make_instance(n)`` builds the instance."""
    rows = []
    prev = None
    for n in ns:
        inst = make_instance(n)
        times = []
        for r in range(runs):
            rng = np.random.default_rng(seed + r)
            z = inst.random_codeword(rng)
            y, _ = corrupt(z, corruption_count(z.size, None, rate), inst.q, rng)
            t0 = time.perf_counter()
            inst.decode(y, params)
            times.append(time.perf_counter() - t0)
        med = statistics.median(times)
        rows.append({"n": n, "runs": runs, "median_seconds": med,
                     "ratio_to_previous": None if prev is None else med / prev})
        prev = med
    return rows


def to_csv(rows: list[dict], fields: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=True, default=_jsonable)
    if path:
        Path(path).write_text(text + "\n")
    return text


def _jsonable(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serializable: {type(o).__name__}")

