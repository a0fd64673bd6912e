"""Command-line entry point.

    esperantist run <config> [--workers N] [--no-cache]
    esperantist report <record> --format {tabular,structured,plotdata} [--out PATH]
    esperantist check <config>
    esperantist cache gc [--max-age-days D] [--all] [--dir DIR]

Exit codes: 0 success, 1 config error, 2 partial member failures,
3 internal error. The cache directory defaults to ~/.cache/esperantist and
is overridden by $ESPERANTIST_CACHE_DIR.
"""

import argparse
import logging
import sys
from pathlib import Path

from .errors import ConfigError
from .pipeline import REPORT_FORMATS, ResultCache, ResultRecord, emit_report, load_config, run_experiment

log = logging.getLogger("esperantist")

EXIT_OK, EXIT_CONFIG, EXIT_PARTIAL, EXIT_INTERNAL = 0, 1, 2, 3

_SUFFIX = {"tabular": ".tsv", "structured": ".json", "plotdata": ".plot.tsv"}


def _cmd_run(args):
    cfg = load_config(args.config)
    cache = None if args.no_cache else ResultCache.default(cfg.cache_dir)
    rec = run_experiment(cfg, cache, workers=args.workers)
    path = rec.save(cfg.record)
    for m in rec.members:
        if "error" in m:
            log.warning("ell=%s failed: %s", m["ell"], m["error"])
        else:
            log.info("ell=%s n=%s lambda1=%.6g", m["ell"], m["n"], m["lambda1"])
    print(f"record written to {path} "
          f"(cache hits {rec.provenance['cache_hits']}, misses {rec.provenance['cache_misses']})")
    return EXIT_PARTIAL if rec.failed else EXIT_OK


def _cmd_report(args):
    rec = ResultRecord.from_json(Path(args.record).read_text())
    out = args.out or str(Path(args.record).with_suffix("")) + _SUFFIX[args.format]
    print(emit_report(rec, args.format, out))
    return EXIT_OK


def _cmd_check(args):
    cfg = load_config(args.config)
    print(f"ok: catalog={cfg.catalog} action={cfg.action} ells={cfg.ells}")
    return EXIT_OK


def _cmd_cache(args):
    cache = ResultCache(args.dir) if args.dir else ResultCache.default()
    removed = cache.gc(args.max_age_days, args.all)
    print(f"removed {removed} cache entries from {cache.directory}")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="esperantist", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a sweep described by a config file")
    r.add_argument("config")
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--no-cache", action="store_true")
    r.set_defaults(func=_cmd_run)

    rep = sub.add_parser("report", help="render a saved record")
    rep.add_argument("record")
    rep.add_argument("--format", choices=REPORT_FORMATS, default="tabular")
    rep.add_argument("--out")
    rep.set_defaults(func=_cmd_report)

    c = sub.add_parser("check", help="validate a config without running it")
    c.add_argument("config")
    c.set_defaults(func=_cmd_check)

    ca = sub.add_parser("cache", help="cache maintenance")
    ca_sub = ca.add_subparsers(dest="cache_command", required=True)
    gc = ca_sub.add_parser("gc", help="drop stale or unreadable entries")
    gc.add_argument("--max-age-days", type=float)
    gc.add_argument("--all", action="store_true")
    gc.add_argument("--dir")
    gc.set_defaults(func=_cmd_cache)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
