"""Experiment sweeps over primes: configs, per-member metrics, caching, reports.

Configs are INI files (``configparser`` with ``#``/``;`` comments):

    [family]
    catalog = gamma2-legendre      # catalog id from esperantist.algebra
    ells = 3, 5, 7                 # or: ell_range = 3-31 (primes only)
    action = cayley                # cayley | projective-line | nonzero-vectors | diagonal-quotient
    basepoint = default
    monodromy_generators = 0, 1    # optional: genus via Riemann-Hurwitz

    [solver]
    tol = 1e-9
    max_iter = 50000
    dense_threshold = 3000
    cap = 2000000

    [chain]
    c_B = 1.0
    A_grid = 0, 0.5, 1, 1.5, 2, 2.5, 3, 3.5, 4, 4.5, 5, 5.5, 6

    [checks]
    diameter = true
    interlacing = true
    predicates = true

    [output]
    record = results/record.json
    cache_dir = .esperantist-cache     # overridden by $ESPERANTIST_CACHE_DIR
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import (
    CATALOG_KINDS,
    DEFAULT_CAP,
    catalog_generators,
    enumerate_group,
    generated_by_order_ell,
    is_perfect,
    is_prime,
)
from .errors import CapExceededError, ConfigError, EsperantistError
from .graphs import GroupAction, RegularMultigraph, cayley_graph, schreier_graph
from .metrics import (
    DEFAULT_A_GRID,
    EXACT_DIAMETER_LIMIT,
    FamilyMember,
    FamilyRecord,
    diameter,
    diameter_bracket,
    diameter_growth,
    dsc_check,
    esperantist_fit,
    interlacing_check,
    kelner_ratio,
)
from .spectral import DEFAULT_MAX_ITER, DEFAULT_TOL, DENSE_THRESHOLD, lambda1
from .surfaces import cover_from_generators, genus_from_monodromy, genus_growth, gonality_chain

SCHEMA_VERSION = 1
CACHE_ENV = "ESPERANTIST_CACHE_DIR"
ACTIONS = ("cayley", "projective-line", "nonzero-vectors", "diagonal-quotient")
TABULAR_COLUMNS = ("ell", "n", "r", "lambda1", "residual", "diam", "perfect",
                   "order_ell_gen", "genus", "dsc_pass", "interlace_pass")
REPORT_FORMATS = ("tabular", "structured", "plotdata")


@dataclass
class ExperimentConfig:
    catalog: str
    ells: list
    action: str = "cayley"
    basepoint: str = "default"
    catalog_params: dict = field(default_factory=dict)
    monodromy_generators: tuple = ()
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    dense_threshold: int = DENSE_THRESHOLD
    cap: int = DEFAULT_CAP
    c_B: float = 1.0
    A_grid: tuple = DEFAULT_A_GRID
    diameter: bool = True
    interlacing: bool = True
    predicates: bool = True
    record: str = "record.json"
    cache_dir: str | None = None
    name: str = "experiment"

    def validate(self):
        if self.catalog not in CATALOG_KINDS:
            raise ConfigError(f"unknown catalog {self.catalog!r}")
        if not self.ells:
            raise ConfigError("the list of primes is empty")
        bad = [p for p in self.ells if not is_prime(p)]
        if bad:
            raise ConfigError(f"non-prime ell values: {bad}")
        if self.action not in ACTIONS:
            raise ConfigError(f"unknown action {self.action!r}; expected one of {ACTIONS}")
        if self.basepoint != "default":
            raise ConfigError("only the 'default' basepoint rule is supported")
        if not (self.tol > 0):
            raise ConfigError("tol must be positive")
        if self.max_iter < 1 or self.dense_threshold < 1 or self.cap < 1:
            raise ConfigError("max_iter, dense_threshold and cap must be positive")
        if not (self.c_B > 0):
            raise ConfigError("c_B must be positive")
        if not self.A_grid or any(a < 0 for a in self.A_grid):
            raise ConfigError("A_grid must be nonempty and nonnegative")
        return self

    def settings(self) -> dict:
        """Everything that can change a member's metrics (part of the cache key)."""
        d = asdict(self)
        for k in ("ells", "record", "cache_dir", "name", "A_grid", "c_B"):
            d.pop(k)
        return d

    def as_dict(self) -> dict:
        d = asdict(self)
        d.pop("cache_dir")
        d.pop("record")
        d["A_grid"] = list(self.A_grid)
        d["monodromy_generators"] = list(self.monodromy_generators)
        return d


def _split_list(text: str) -> list:
    return [t.strip() for t in text.replace("\n", ",").split(",") if t.strip()]


def _parse_ells(section) -> list:
    if "ells" in section and "ell_range" in section:
        raise ConfigError("give either 'ells' or 'ell_range', not both")
    try:
        if "ells" in section:
            return sorted({int(t) for t in _split_list(section["ells"])})
        if "ell_range" in section:
            lo, _, hi = section["ell_range"].partition("-")
            return [p for p in range(int(lo), int(hi) + 1) if is_prime(p)]
    except ValueError as exc:
        raise ConfigError(f"cannot parse primes: {exc}") from exc
    raise ConfigError("config needs 'ells' or 'ell_range' in [family]")


def parse_config(text: str, name: str = "experiment") -> ExperimentConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    if "family" not in cp:
        raise ConfigError("config needs a [family] section")
    fam = cp["family"]
    try:
        params = {}
        if "g" in fam:
            params["g"] = fam.getint("g")
        if "matrices" in fam:
            params["matrices"] = json.loads(fam["matrices"])
        if "pairs" in fam:
            params["pairs"] = json.loads(fam["pairs"])
        mono = tuple(int(t) for t in _split_list(fam.get("monodromy_generators", "")))
        cfg = ExperimentConfig(
            catalog=fam.get("catalog", "").strip(),
            ells=_parse_ells(fam),
            action=fam.get("action", "cayley").strip(),
            basepoint=fam.get("basepoint", "default").strip(),
            catalog_params=params,
            monodromy_generators=mono,
            name=name,
        )
        if "solver" in cp:
            s = cp["solver"]
            cfg.tol = s.getfloat("tol", cfg.tol)
            cfg.max_iter = s.getint("max_iter", cfg.max_iter)
            cfg.dense_threshold = s.getint("dense_threshold", cfg.dense_threshold)
            cfg.cap = s.getint("cap", cfg.cap)
        if "chain" in cp:
            c = cp["chain"]
            cfg.c_B = c.getfloat("c_B", cfg.c_B)
            if "A_grid" in c:
                cfg.A_grid = tuple(float(t) for t in _split_list(c["A_grid"]))
        if "checks" in cp:
            k = cp["checks"]
            cfg.diameter = k.getboolean("diameter", cfg.diameter)
            cfg.interlacing = k.getboolean("interlacing", cfg.interlacing)
            cfg.predicates = k.getboolean("predicates", cfg.predicates)
        if "output" in cp:
            o = cp["output"]
            cfg.record = o.get("record", cfg.record)
            cfg.cache_dir = o.get("cache_dir", cfg.cache_dir)
    except (ValueError, json.JSONDecodeError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    cfg = parse_config(text, name=path.stem)
    rec = Path(cfg.record)
    if not rec.is_absolute():
        cfg.record = os.path.normpath(path.parent / rec)
    if cfg.cache_dir and not Path(cfg.cache_dir).is_absolute():
        cfg.cache_dir = os.path.normpath(path.parent / cfg.cache_dir)
    return cfg


class ResultCache:
    """One JSON file per key. All writes go through the caller's thread."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    @classmethod
    def default(cls, configured=None) -> "ResultCache":
        where = os.environ.get(CACHE_ENV) or configured
        if not where:
            where = Path.home() / ".cache" / "esperantist"
        return cls(where)

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def get(self, key: str):
        try:
            data = json.loads(self._path(key).read_text())
        except (OSError, json.JSONDecodeError):
            return None
        if data.get("schema_version") != SCHEMA_VERSION or data.get("key") != key:
            return None
        return data["value"]

    def put(self, key: str, value) -> None:
        payload = json.dumps({"schema_version": SCHEMA_VERSION, "key": key, "value": value},
                             sort_keys=True)
        tmp = self._path(key).with_suffix(".tmp")
        tmp.write_text(payload)
        os.replace(tmp, self._path(key))

    def gc(self, max_age_days: float | None = None, remove_all: bool = False) -> int:
        """Delete unreadable, stale-schema, or (optionally) old entries."""
        removed = 0
        now = time.time()
        for p in self.directory.glob("*.json"):
            drop = remove_all
            if not drop:
                try:
                    data = json.loads(p.read_text())
                    drop = data.get("schema_version") != SCHEMA_VERSION
                except (OSError, json.JSONDecodeError):
                    drop = True
            if not drop and max_age_days is not None:
                drop = now - p.stat().st_mtime > max_age_days * 86400
            if drop:
                p.unlink(missing_ok=True)
                removed += 1
        for p in self.directory.glob("*.tmp"):
            p.unlink(missing_ok=True)
            removed += 1
        return removed


def cache_key(graph: RegularMultigraph, settings: dict, extra: str = "") -> str:
    h = hashlib.sha256()
    h.update(graph.export().encode())
    h.update(json.dumps(settings, sort_keys=True, default=str).encode())
    h.update(extra.encode())
    return h.hexdigest()


def build_member_graph(cfg: ExperimentConfig, ell: int):
    gens = catalog_generators(cfg.catalog, ell=ell, **cfg.catalog_params)
    if cfg.action == "cayley":
        return gens, cayley_graph(gens, cfg.cap)
    return gens, schreier_graph(gens, GroupAction(cfg.action), cap=cfg.cap)


def _spectral(graph, cfg):
    rep = lambda1(graph, cfg.tol, cfg.max_iter, cfg.dense_threshold)
    return {"lambda1": rep.lambda1, "method": rep.method, "residual": rep.residual,
            "iterations": rep.iterations, "tolerance": rep.tolerance,
            "loop_convention": rep.loop_convention}


def _diameter(graph):
    if graph.vertex_transitive or graph.n <= EXACT_DIAMETER_LIMIT:
        d = diameter(graph)
        return {"diam": d, "diam_lower": d, "diam_upper": d}
    b = diameter_bracket(graph)
    return {"diam": b.upper, "diam_lower": b.lower, "diam_upper": b.upper}


def _predicates(gens, ell, cap):
    try:
        table = enumerate_group(gens, cap)
    except CapExceededError as exc:
        return {"perfect": None, "order_ell_gen": None,
                "predicate_note": f"group larger than cap ({exc.cap})"}
    out = {"group_order": len(table), "perfect": is_perfect(table)}
    if ell >= table.dim - 1:
        out["order_ell_gen"] = generated_by_order_ell(table, ell)
    else:
        out["order_ell_gen"] = None
        out["predicate_note"] = "ell < dim - 1"
    return out


def compute_member(cfg: ExperimentConfig, ell: int, cache: ResultCache | None):
    """Metrics for one prime. Returns (member, timings, cache_events)."""
    t0 = time.perf_counter()
    gens, graph = build_member_graph(cfg, ell)
    timings = {"build": time.perf_counter() - t0}
    settings = cfg.settings()
    key = cache_key(graph, settings, gens.fingerprint())
    events = []
    member = cache.get(key) if cache is not None else None
    if member is not None:
        events.append(("hit", key))
    else:
        events.append(("miss", key))
        t1 = time.perf_counter()
        member = {"ell": ell, "n": graph.n, "r": graph.r, "cache_key": key,
                  "action": graph.action, "connected": graph.connected}
        member.update(_spectral(graph, cfg))
        if cfg.diameter:
            member.update(_diameter(graph))
        if cfg.predicates:
            member.update(_predicates(gens, ell, cfg.cap))
        if cfg.monodromy_generators:
            gr = genus_from_monodromy(cover_from_generators(graph.nbr, cfg.monodromy_generators))
            member.update({"genus": gr.genus, "chi_open": gr.chi_open,
                           "chi_closed": gr.chi_closed})
        if cfg.interlacing and cfg.action != "cayley":
            parent = cayley_graph(gens, cfg.cap)
            pkey = cache_key(parent, settings, gens.fingerprint())
            pspec = cache.get(pkey) if cache is not None else None
            if pspec is None:
                pspec = _spectral(parent, cfg)
                events.append(("put", pkey, pspec))
            else:
                events.append(("hit", pkey))
            member["parent_n"] = parent.n
            member["parent_lambda1"] = pspec["lambda1"]
            member["interlace_pass"] = interlacing_check(
                pspec["lambda1"], member["lambda1"], 1e-8, parent, graph)
        timings["compute"] = time.perf_counter() - t1
        events.append(("put", key, member))
    return member, timings, events


def _dsc(member, tol):
    if member.get("diam_upper") is None:
        return
    bound, ok = dsc_check(member["lambda1"], member["r"], member["diam_upper"], tol)
    member["dsc_bound"] = bound
    member["dsc_pass"] = ok


@dataclass
class ResultRecord:
    body: dict
    timings: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def body_json(self) -> str:
        return json.dumps(self.body, sort_keys=True, indent=1, allow_nan=False)

    def to_json(self) -> str:
        return json.dumps({"body": self.body, "timings": self.timings,
                           "provenance": self.provenance}, sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "ResultRecord":
        d = json.loads(text)
        return cls(d["body"], d.get("timings", {}), d.get("provenance", {}))

    @property
    def members(self) -> list:
        return self.body.get("members", [])

    @property
    def failed(self) -> list:
        return [m for m in self.members if "error" in m]

    def save(self, path) -> Path:
        """Write the record and append it to ``records.jsonl`` beside it."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json())
        with open(path.parent / "records.jsonl", "a") as fh:
            fh.write(json.dumps({"body": self.body, "timings": self.timings,
                                 "provenance": self.provenance}, sort_keys=True) + "\n")
        return path


def family_summary(members: list, c_B: float, A_grid) -> dict:
    """Fits, Kelner ratios and certificates over the successful members."""
    ok = [m for m in members if "error" not in m and m.get("lambda1", 0) > 0]
    fam = FamilyRecord("family", [
        FamilyMember(m["ell"], m["n"], m["lambda1"], m.get("diam"), m.get("genus")) for m in ok])
    out = {"log_base": "natural", "sizes_increasing": fam.sizes_increasing(),
           "member_count": len(ok)}
    fit = None
    if len(ok) >= 3:
        fit = esperantist_fit(fam, A_grid)
        out["fit"] = fit.as_dict()
    if ok and all(m.get("diam") is not None for m in ok):
        out["diameter_growth"] = {str(p): v for p, v in diameter_growth(fam).items()}
    if ok and all(m.get("genus") is not None for m in ok):
        kr = kelner_ratio(fam)
        out["kelner"] = asdict(kr)
        if fit is not None:
            out["genus_growth"] = genus_growth([m["n"] for m in ok], [m["genus"] for m in ok],
                                               fit.A)
        certs = [gonality_chain(m["lambda1"], c_B, m["genus"], m["n"], m["chi_open"])
                 for m in ok]
        c_prime = None
        if fit is not None:
            # largest c' with c' n / (log 2n)^2A below every nonvacuous chain bound
            vals = [c.genus_gonality * math.log(2 * m["n"]) ** (2 * fit.A) / m["n"]
                    for c, m in zip(certs, ok) if not c.vacuous and c.genus_gonality > 0]
            c_prime = min(vals) if vals else None
        if c_prime is not None:
            certs = [gonality_chain(m["lambda1"], c_B, m["genus"], m["n"], m["chi_open"],
                                    c_prime, fit.A) for m in ok]
        out["certificates"] = [dict(c.as_dict(), ell=m["ell"]) for c, m in zip(certs, ok)]
        out["c_prime"] = c_prime
    return out


def run_experiment(cfg: ExperimentConfig, cache: ResultCache | None = None,
                   workers: int = 1) -> ResultRecord:
    """Run every member of the sweep, then the family-level fits.

    Member failures are recorded in the member entry and do not stop the
    sweep. Members are reported in increasing ell.
    """
    cfg.validate()
    t0 = time.perf_counter()

    def one(ell):
        try:
            return compute_member(cfg, ell, cache)
        except (EsperantistError, ValueError, ArithmeticError) as exc:
            return {"ell": ell, "error": f"{type(exc).__name__}: {exc}"}, {}, []

    ells = sorted(cfg.ells)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, ells))
    else:
        results = [one(ell) for ell in ells]

    members, timings, hits, misses = [], {}, 0, 0
    for ell, (member, tms, events) in zip(ells, results):
        for ev in events:
            if ev[0] == "put" and cache is not None:
                cache.put(ev[1], ev[2])
            elif ev[0] == "hit":
                hits += 1
            elif ev[0] == "miss":
                misses += 1
        member = dict(member)
        if "error" not in member:
            _dsc(member, 1e-12)
        members.append(member)
        timings[str(ell)] = tms
    body = {
        "schema_version": SCHEMA_VERSION,
        "artifact_version": __version__,
        "config": cfg.as_dict(),
        "conventions": {"log_base": "natural",
                        "loop": "one incidence per generator per vertex",
                        "permutation": "right-to-left composition"},
        "members": members,
        "family": family_summary(members, cfg.c_B, cfg.A_grid),
    }
    timings["total"] = time.perf_counter() - t0
    return ResultRecord(_clean(body), timings, {"cache_hits": hits, "cache_misses": misses})


def _clean(obj):
    """Convert numpy scalars and tuples to plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_report(rec: ResultRecord, fmt: str, path) -> Path:
    """Write the record in one of ``tabular``, ``structured``, ``plotdata``."""
    if fmt not in REPORT_FORMATS:
        raise ValueError(f"unknown report format {fmt!r}")
    path = Path(path)
    if fmt == "structured":
        text = rec.to_json()
    elif fmt == "tabular":
        buf = io.StringIO()
        buf.write(f"# schema_version={SCHEMA_VERSION}\n")
        w = csv.writer(buf, delimiter="\t", lineterminator="\n")
        w.writerow(TABULAR_COLUMNS)
        for m in rec.members:
            w.writerow([_fmt(m.get(c)) for c in TABULAR_COLUMNS])
        text = buf.getvalue()
    else:
        text = _plotdata(rec)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
    return path


def _plotdata(rec: ResultRecord) -> str:
    buf = io.StringIO()
    buf.write(f"# schema_version={SCHEMA_VERSION}\n")
    buf.write("# x = log(2n), y = log(lambda1); ref rows: y = log(c) - A log(x)\n")
    w = csv.writer(buf, delimiter="\t", lineterminator="\n")
    w.writerow(("kind", "ell", "x", "y", "A", "c"))
    pts = [m for m in rec.members if "error" not in m and m.get("lambda1", 0) > 0]
    for m in pts:
        w.writerow(("point", m["ell"], repr(math.log(2 * m["n"])), repr(math.log(m["lambda1"])),
                    "", ""))
    fit = rec.body.get("family", {}).get("fit")
    if fit and pts:
        curves = [(fit["A"], fit["c"]), (0.0, fit["expander_c"])]
        for A, c in curves:
            for m in pts:
                x = math.log(2 * m["n"])
                w.writerow(("ref", m["ell"], repr(x), repr(math.log(c) - A * math.log(x)),
                            repr(A), repr(c)))
    return buf.getvalue()


def record_from_family(fam: FamilyRecord, A_grid=DEFAULT_A_GRID) -> ResultRecord:
    """Wrap externally computed members (index as ell) into a record."""
    members = [{"ell": m.index, "n": m.n, "lambda1": m.lambda1, "diam": m.diameter,
                "genus": m.genus} for m in fam.members]
    body = {"schema_version": SCHEMA_VERSION, "artifact_version": __version__,
            "members": members, "family": {}}
    if len(members) >= 3:
        body["family"]["fit"] = esperantist_fit(fam, A_grid).as_dict()
    return ResultRecord(_clean(body))
