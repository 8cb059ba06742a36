"""Exhaustive search over triples u2 = a, u3 = b, u4 = a*g with a in S+ and
b, g in S, where

    S  = {x + y w : max(|x|, |y|) <= c, (x, y) != (0, 0)}
    S+ = {x + y w : 1 <= x <= c, |y| <= c}  u  {y w : 1 <= y <= c}.

Triples whose gcd estimate at n = 2^(I+1) lies strictly between 0 and H are
passed to recovery and verification.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import logging
import multiprocessing
import os
import time
from dataclasses import asdict, dataclass, field as dc_field
from typing import Callable, Iterator

from .eds import DoublingContext, EDSTuple, conj_tuple, negate_tuple
from .heights import (
    FullEstimate,
    GcdEstimate,
    IncompleteFactorization,
    TorsionSuspected,
    estimate_from_norms,
    full_estimate,
    gcd_estimate,
)
from .quadring import RingElem, field
from .recovery import RecoveredPair, RecoveryFailed, recover

log = logging.getLogger(__name__)

__all__ = [
    "CHECKPOINT_VERSION",
    "ConfigError",
    "CorruptCheckpoint",
    "Hit",
    "JsonlSink",
    "SearchConfig",
    "SearchReport",
    "count_S",
    "count_S_plus",
    "count_tuples",
    "enum_S",
    "enum_S_plus",
    "iter_tuple_coords",
    "partition_work",
    "resume",
    "run_search",
]

CHECKPOINT_VERSION = 1


class ConfigError(ValueError):
    pass


class CorruptCheckpoint(ValueError):
    pass


# -- search spaces ---------------------------------------------------------


def _s_coords(c: int) -> Iterator[tuple[int, int]]:
    for x in range(-c, c + 1):
        for y in range(-c, c + 1):
            if x or y:
                yield x, y


def _s_plus_coords(c: int) -> Iterator[tuple[int, int]]:
    for y in range(1, c + 1):
        yield 0, y
    for x in range(1, c + 1):
        for y in range(-c, c + 1):
            yield x, y


def enum_S(c: int, F) -> Iterator[RingElem]:
    if c < 1:
        raise ConfigError("c must be at least 1")
    F = field(F) if isinstance(F, int) else F
    return (F(x, y) for x, y in _s_coords(c))


def enum_S_plus(c: int, F) -> Iterator[RingElem]:
    if c < 1:
        raise ConfigError("c must be at least 1")
    F = field(F) if isinstance(F, int) else F
    return (F(x, y) for x, y in _s_plus_coords(c))


def count_S(c: int) -> int:
    return (2 * c + 1) ** 2 - 1


def count_S_plus(c: int) -> int:
    return 2 * c * (c + 1)


def count_tuples(c: int) -> int:
    return count_S_plus(c) * count_S(c) ** 2


def iter_tuple_coords(c: int) -> Iterator[tuple]:
    """Lazy (alpha, beta, gamma) coordinate triples in search order."""
    return itertools.product(_s_plus_coords(c), _s_coords(c), _s_coords(c))


# -- configuration ---------------------------------------------------------


@dataclass(frozen=True)
class SearchConfig:
    fields: tuple[int, ...]
    c: int
    H: float = 0.01
    I: int = 6
    refine_I: int = 7
    shard_index: int = 0
    shard_count: int = 1
    early_abort_at: int | None = None
    full_check: bool = False

    def __post_init__(self):
        object.__setattr__(self, "fields", tuple(int(D) for D in self.fields))
        if not self.fields:
            raise ConfigError("at least one field is required")
        for D in self.fields:
            try:
                field(D)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        if self.c < 1:
            raise ConfigError("c must be at least 1")
        if not self.H > 0:
            raise ConfigError("height bound must be positive")
        if self.I < 1 or self.refine_I < 1:
            raise ConfigError("iteration counts must be at least 1")
        if not 0 <= self.shard_index < self.shard_count:
            raise ConfigError(f"bad shard {self.shard_index}/{self.shard_count}")
        if self.early_abort_at is not None:
            n = self.early_abort_at
            if n < 4 or n & (n - 1) or n >= 2 ** (self.I + 1):
                raise ConfigError("early abort index must be a power of two in [4, n)")

    @property
    def n(self) -> int:
        return 2 ** (self.I + 1)

    def digest(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()

    @classmethod
    def from_dict(cls, d: dict) -> SearchConfig:
        d = dict(d)
        d["fields"] = tuple(d["fields"])
        return cls(**d)


def partition_work(cfg: SearchConfig) -> list[range]:
    """Contiguous, disjoint chunks of S+ indices, one per shard."""
    total = count_S_plus(cfg.c)
    k = cfg.shard_count
    q, r = divmod(total, k)
    out, start = [], 0
    for i in range(k):
        stop = start + q + (1 if i < r else 0)
        out.append(range(start, stop))
        start = stop
    return out


# -- per-alpha scan --------------------------------------------------------


@dataclass
class AlphaResult:
    D: int
    index: int
    tested: int = 0
    torsion: int = 0
    zero_height: int = 0
    pruned: int = 0
    cpu: float = 0.0
    errors: list = dc_field(default_factory=list)
    candidates: list = dc_field(default_factory=list)


def _scan_alpha(args) -> AlphaResult:
    D, index, ax, ay, c, I, H, early = args
    cpu0 = time.process_time()
    F = field(D)
    alpha = F(ax, ay)
    ctx = DoublingContext(alpha)
    S = list(enum_S(c, F))
    products = [alpha * g for g in S]
    n = 2 ** (I + 1)
    res = AlphaResult(D, index)
    if early is not None:
        I_early = early.bit_length() - 2
    for beta in S:
        for u4 in products:
            res.tested += 1
            try:
                if early is not None:
                    e = _norms_or_none(ctx, beta, u4, I_early)
                    if e is not None and estimate_from_norms(*e, early).value > 10 * H:
                        res.pruned += 1
                        continue
                En, En1 = ctx.norms(beta, u4, I)
                if En == 0 or En1 == 0:
                    res.torsion += 1
                    continue
                value = estimate_from_norms(En, En1, n).value
            except Exception as exc:  # recorded, never fatal
                res.errors.append([_coords(alpha, beta, u4), repr(exc)])
                continue
            if value == 0.0:
                res.zero_height += 1
            elif value < H:
                res.candidates.append(_coords(alpha, beta, u4))
    res.cpu = time.process_time() - cpu0
    return res


def _norms_or_none(ctx, beta, u4, I):
    En, En1 = ctx.norms(beta, u4, I)
    if En == 0 or En1 == 0:
        return None
    return En, En1


def _coords(*elems) -> list:
    return [[e.x, e.y] for e in elems]


# -- hits ------------------------------------------------------------------


def fmt_height(v: float) -> float:
    """Heights are reported to 9 significant digits."""
    return float(f"{v:.9g}")


def orbit_key(t: EDSTuple) -> tuple:
    """Smallest coordinate triple among t, conj(t), -t, -conj(t)."""
    orbit = (t, conj_tuple(t), negate_tuple(t), negate_tuple(conj_tuple(t)))
    return min(o.coords() for o in orbit)


@dataclass
class Hit:
    tuple: EDSTuple
    estimate_primary: GcdEstimate
    estimate_refined: GcdEstimate
    recovered: RecoveredPair
    full: FullEstimate | None = None
    seconds: float = 0.0
    members: list = dc_field(default_factory=list)

    @property
    def D(self) -> int:
        return self.tuple.field.D

    @property
    def j(self) -> str:
        return str(self.recovered.curve.j_invariant())

    @property
    def dedup_key(self) -> tuple:
        return self.D, self.j, float(f"{self.estimate_refined.value:.6g}")

    def sort_key(self):
        return self.estimate_refined.value, self.D, self.tuple.coords()

    def to_record(self) -> dict:
        """Flat OutputRecord; every value is a JSON scalar or list of strings."""
        rec = {
            "D": self.D,
            "u2": str(self.tuple.u2),
            "u3": str(self.tuple.u3),
            "u4": str(self.tuple.u4),
        }
        for est in (self.estimate_primary, self.estimate_refined):
            rec[f"h_tilde_{est.n}"] = fmt_height(est.value)
            rec[f"log10_E_{est.n}"] = round(est.log10_En, 6)
            rec[f"bits_E_{est.n}"] = est.En.bit_length()
            rec[f"bits_gcd_{est.n}"] = est.gcd.bit_length()
        if self.full is not None:
            rec[f"h_full_{self.full.n}"] = fmt_height(self.full.value)
            rec["bad_primes"] = [str(p) for p in self.full.T]
        rp = self.recovered.to_dict()
        rec["route"] = rp["route"]
        rec["curve"] = rp["curve"]
        rec["point"] = rp["point"] if isinstance(rp["point"], list) else [rp["point"]]
        rec["j"] = rp["j"]
        rec["delta"] = rp["delta"]
        rec["integral_model"] = rp["integral"]
        for k, v in rp["verified"].items():
            rec[f"verified_{k}"] = v
        rec["members"] = [";".join(m) for m in self.members]
        rec["seconds"] = round(self.seconds, 6)
        return rec


def secondary(t: EDSTuple, cfg: SearchConfig) -> Hit:
    """Recovery, torsion screen and refined estimates for one candidate."""
    t0 = time.process_time()
    primary = gcd_estimate(t, cfg.I)
    refined = gcd_estimate(t, cfg.refine_I)
    rp = recover(t, refine_I=cfg.refine_I)
    full = None
    if cfg.full_check and rp.verified.nonsingular:
        try:
            full = full_estimate(t, rp.curve, cfg.refine_I, point=rp.point)
        except IncompleteFactorization as exc:
            log.warning("full estimate skipped for %s: %s", t, exc)
    return Hit(t, primary, refined, rp, full, time.process_time() - t0)


def dedup(hits: list[Hit]) -> list[Hit]:
    """Merge conjugate/sign orbits, then equal (D, j, height) classes.

    Hits are visited in report order; the first of each class is kept and
    collects the others' triples in ``members``.
    """
    kept: list[Hit] = []
    by_orbit: dict = {}
    by_key: dict = {}
    for h in sorted(hits, key=Hit.sort_key):
        member = list(h.tuple.as_strings())
        ok = (h.D, orbit_key(h.tuple))
        rep = by_orbit.get(ok) or by_key.get(h.dedup_key)
        if rep is None:
            h.members = [member]
            kept.append(h)
            rep = h
        else:
            rep.members.append(member)
        by_orbit.setdefault(ok, rep)
        by_key.setdefault(h.dedup_key, rep)
    return kept


# -- checkpointing ---------------------------------------------------------


def _empty_state(cfg: SearchConfig) -> dict:
    return {
        "version": CHECKPOINT_VERSION,
        "cfg_hash": cfg.digest(),
        "config": asdict(cfg),
        "completed": {str(D): [] for D in cfg.fields},
        "candidates": {str(D): [] for D in cfg.fields},
        "counts": {"tested": 0, "torsion": 0, "zero_height": 0, "pruned": 0},
        "errors": [],
    }


def checkpoint(state: dict, path: str) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump(state, fh)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def resume(path: str, cfg: SearchConfig | None = None) -> tuple[SearchConfig, dict]:
    """Load a checkpoint; with ``cfg`` given, it must match the recorded hash."""
    try:
        with open(path) as fh:
            state = json.load(fh)
        if state.get("version") != CHECKPOINT_VERSION:
            raise CorruptCheckpoint(f"unsupported checkpoint version {state.get('version')!r}")
        saved = SearchConfig.from_dict(state["config"])
        if saved.digest() != state["cfg_hash"]:
            raise CorruptCheckpoint("checkpoint config does not match its hash")
        for key in ("completed", "candidates", "counts", "errors"):
            state[key]
    except CorruptCheckpoint:
        raise
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise CorruptCheckpoint(f"{path}: {exc}") from exc
    if cfg is not None and cfg.digest() != state["cfg_hash"]:
        raise CorruptCheckpoint(f"{path} was written for a different configuration")
    return saved, state


# -- driver ----------------------------------------------------------------


class JsonlSink:
    """Append-only JSON-lines writer."""

    def __init__(self, path: str, mode: str = "a"):
        self.fh = open(path, mode)

    def __call__(self, record: dict) -> None:
        self.fh.write(json.dumps(record, sort_keys=True) + "\n")
        self.fh.flush()

    def close(self) -> None:
        self.fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


@dataclass
class SearchReport:
    config: SearchConfig
    hits: list[Hit]
    raw_hits: list[Hit]
    rejected: list[dict]
    tested: int
    torsion: int
    zero_height: int
    pruned: int
    candidates: int
    errors: list
    wall_seconds: float
    cpu_seconds: float

    def summary(self) -> dict:
        return {
            "fields": list(self.config.fields),
            "c": self.config.c,
            "H": self.config.H,
            "n": self.config.n,
            "shard": f"{self.config.shard_index}/{self.config.shard_count}",
            "tested": self.tested,
            "discarded_torsion": self.torsion,
            "discarded_zero_height": self.zero_height,
            "pruned_early": self.pruned,
            "candidates": self.candidates,
            "verified_hits": len(self.raw_hits),
            "dedup_hits": len(self.hits),
            "rejected": len(self.rejected),
            "errors": len(self.errors),
            "wall_seconds": round(self.wall_seconds, 3),
            "cpu_seconds": round(self.cpu_seconds, 3),
        }


def _resolve_threads(threads) -> int:
    if threads in (None, "auto", 0):
        return os.cpu_count() or 1
    return max(1, int(threads))


def run_search(
    cfg: SearchConfig,
    sink: Callable[[dict], None] | None = None,
    checkpoint_path: str | None = None,
    threads: int | str = 1,
    progress: Callable[[int, int, int], None] | None = None,
) -> SearchReport:
    """Run the configured shard of the search.

    ``sink`` receives raw candidate records as each alpha completes and the
    deduplicated hit records at the end. With ``checkpoint_path`` progress is
    saved after every alpha and an existing file is resumed.
    """
    wall0, cpu0 = time.perf_counter(), time.process_time()
    if checkpoint_path and os.path.exists(checkpoint_path):
        _, state = resume(checkpoint_path, cfg)
        log.info("resuming from %s", checkpoint_path)
    else:
        state = _empty_state(cfg)

    chunk = partition_work(cfg)[cfg.shard_index]
    units = []
    for D in cfg.fields:
        done = set(state["completed"][str(D)])
        alphas = list(_s_plus_coords(cfg.c))
        for idx in chunk:
            if idx not in done:
                ax, ay = alphas[idx]
                units.append((D, idx, ax, ay, cfg.c, cfg.I, cfg.H, cfg.early_abort_at))

    nthreads = _resolve_threads(threads)
    pool = None
    if nthreads > 1 and len(units) > 1:
        pool = multiprocessing.get_context("spawn").Pool(nthreads)
        results = pool.imap(_scan_alpha, units)
    else:
        results = map(_scan_alpha, units)
    cpu_workers = 0.0
    try:
        for k, res in enumerate(results, 1):
            counts = state["counts"]
            counts["tested"] += res.tested
            counts["torsion"] += res.torsion
            counts["zero_height"] += res.zero_height
            counts["pruned"] += res.pruned
            if pool is not None:
                cpu_workers += res.cpu
            state["errors"].extend(res.errors)
            state["candidates"][str(res.D)].extend(res.candidates)
            state["completed"][str(res.D)].append(res.index)
            if sink is not None:
                for cand in res.candidates:
                    sink({"kind": "candidate", "D": res.D, "tuple": _coord_strings(res.D, cand)})
            if checkpoint_path:
                checkpoint(state, checkpoint_path)
            if progress is not None:
                progress(k, len(units), res.tested)
    finally:
        if pool is not None:
            pool.terminate()
            pool.join()

    raw_hits, rejected = [], []
    for D in cfg.fields:
        F = field(D)
        for cand in state["candidates"][str(D)]:
            t = EDSTuple(*(F(x, y) for x, y in cand))
            try:
                hit = secondary(t, cfg)
            except (RecoveryFailed, TorsionSuspected, ArithmeticError) as exc:
                rejected.append({"D": D, "tuple": t.as_strings(), "reason": repr(exc)})
                continue
            if hit.recovered.verified.all():
                raw_hits.append(hit)
            else:
                rejected.append(
                    {"D": D, "tuple": t.as_strings(), "reason": "verification", **asdict(hit.recovered.verified)}
                )
    hits = dedup(raw_hits)
    if sink is not None:
        for rec in rejected:
            sink({"kind": "rejected", **rec})
        for h in hits:
            sink({"kind": "hit", **h.to_record()})
    ncand = sum(len(v) for v in state["candidates"].values())
    counts = state["counts"]
    return SearchReport(
        cfg,
        hits,
        sorted(raw_hits, key=Hit.sort_key),
        rejected,
        counts["tested"],
        counts["torsion"],
        counts["zero_height"],
        counts["pruned"],
        ncand,
        state["errors"],
        time.perf_counter() - wall0,
        time.process_time() - cpu0 + cpu_workers,
    )


def _coord_strings(D: int, cand) -> list[str]:
    F = field(D)
    return [str(F(x, y)) for x, y in cand]
