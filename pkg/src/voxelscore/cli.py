"""Command-line client for the scoring service.

Every subcommand builds a JSON request and posts it to the service: by
default an in-process instance (no network, same filesystem), or a remote
one via --server URL, in which case paths in arguments must be visible to
the server. Exit codes: 0 ok, 1 computation/server failure, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import load_config_file
from .errors import InputError

CONFIG_KEYS = (
    "k",
    "penalty_grid",
    "outer_folds_pooled",
    "outer_folds_subject",
    "inner_folds",
    "eps",
    "n_ceiling_splits",
    "seed",
    "workers",
)


def _add_config_flags(parser):
    parser.add_argument("--config", metavar="FILE",
                        help="key=value config file (flags override it)")
    parser.add_argument("--k", type=int, help="FIR lag count")
    parser.add_argument("--penalty-grid", metavar="A,B,...",
                        help="comma-separated ridge penalties")
    parser.add_argument("--outer-folds-pooled", type=int)
    parser.add_argument("--outer-folds-subject", type=int)
    parser.add_argument("--inner-folds", type=int)
    parser.add_argument("--eps", type=float,
                        help="baseline magnitude mask for tuning gains")
    parser.add_argument("--n-ceiling-splits", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--workers", type=int,
                        help="worker threads; 0 = one per CPU")


def _config_payload(args) -> dict:
    values = dict(load_config_file(args.config)) if args.config else {}
    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is None:
            continue
        if key == "penalty_grid":
            try:
                flag = [float(x) for x in flag.split(",") if x.strip()]
            except ValueError:
                raise InputError(
                    f"bad --penalty-grid value {flag!r}"
                ) from None
        values[key] = flag
    if "penalty_grid" in values:
        values["penalty_grid"] = list(values["penalty_grid"])
    return values


class Client:
    """Minimal POST client over either an in-process app or a remote URL."""

    def __init__(self, server: str | None):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=None)
        else:
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service import create_app

            self._client = TestClient(
                create_app(), raise_server_exceptions=False
            )

    def post(self, path: str, payload: dict):
        return self._client.post(path, json=payload)


def _run(server, path, payload) -> int:
    try:
        client = Client(server)
        resp = client.post(path, payload)
    except Exception as exc:  # connection refused, bad URL, ...
        print(f"error: cannot reach service: {exc}", file=sys.stderr)
        return 1
    if resp.status_code == 200:
        print(json.dumps(resp.json(), indent=2, sort_keys=True))
        return 0
    try:
        detail = resp.json().get("detail", resp.text)
    except ValueError:
        detail = resp.text
    print(f"error: {detail}", file=sys.stderr)
    return 2 if 400 <= resp.status_code < 500 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="voxelscore",
        description="Voxelwise encoding scores for language-model features.",
    )
    parser.add_argument("--server", metavar="URL",
                        help="remote service URL (default: run in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="held-out encoding scores per voxel")
    p.add_argument("transcript")
    p.add_argument("features")
    p.add_argument("bold_dir")
    p.add_argument("-o", "--out", required=True, metavar="CSV")
    p.add_argument("--per-subject", action="store_true",
                   help="also write one map per subject")
    _add_config_flags(p)

    p = sub.add_parser("ceiling", help="split-half noise ceiling per voxel")
    p.add_argument("bold_dir")
    p.add_argument("-o", "--out", required=True, metavar="CSV")
    _add_config_flags(p)

    p = sub.add_parser("diff", help="compare two score maps voxelwise")
    p.add_argument("map_a", help="augmented/tuned map CSV")
    p.add_argument("map_b", help="baseline map CSV")
    p.add_argument("--mode", required=True, choices=("memory", "tuning"))
    p.add_argument("-o", "--out", required=True, metavar="CSV")
    _add_config_flags(p)

    p = sub.add_parser("roi", help="aggregate maps over atlas regions")
    p.add_argument("maps", nargs="+", help="score map CSVs (one per subject)")
    p.add_argument("--atlas", required=True)
    p.add_argument("--labels", metavar="FILE",
                   help="restrict to labels listed in FILE (one per line)")
    p.add_argument("--level", type=float, default=0.95,
                   help="confidence level for multi-map tables")
    p.add_argument("-o", "--out", required=True, metavar="CSV")

    p = sub.add_parser("layers", help="score several layers, summarize per hemisphere")
    p.add_argument("features", nargs="+", help="one FEAT file per layer")
    p.add_argument("--transcript", required=True)
    p.add_argument("--bold-dir", required=True)
    p.add_argument("--atlas", required=True)
    p.add_argument("-o", "--out", required=True, metavar="CSV")
    _add_config_flags(p)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("out_dir")
    p.add_argument("--words", type=int, default=1200)
    p.add_argument("--dims", type=int, default=12)
    p.add_argument("--frames", type=int, default=600)
    p.add_argument("--tr", type=float, default=1.5)
    p.add_argument("--voxels", type=int, default=120)
    p.add_argument("--subjects", type=int, default=4)
    p.add_argument("--lags", type=int, default=5)
    p.add_argument("--signal-scale", type=float, default=1.0)
    p.add_argument("--subject-noise", type=float, default=1.0)
    p.add_argument("--shared-noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--augment-dims", type=int, default=0,
                   help="latent feature columns on inserted tokens")
    p.add_argument("--decoy", action="store_true",
                   help="replace latent augmentation rows with noise")
    p.add_argument("--mem-scale", type=float,
                   help="std of the augmentation signal component")

    p = sub.add_parser("augment", help="merge annotations into a transcript")
    p.add_argument("transcript")
    p.add_argument("annotations")
    p.add_argument("-o", "--out", required=True, metavar="TSV")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .service import create_app

        uvicorn.run(create_app(), host=args.host, port=args.port)
        return 0

    try:
        if args.command == "score":
            payload = {
                "transcript": args.transcript,
                "features": args.features,
                "bold_dir": args.bold_dir,
                "out": args.out,
                "per_subject": args.per_subject,
                "config": _config_payload(args),
            }
            return _run(args.server, "/score", payload)
        if args.command == "ceiling":
            payload = {
                "bold_dir": args.bold_dir,
                "out": args.out,
                "config": _config_payload(args),
            }
            return _run(args.server, "/ceiling", payload)
        if args.command == "diff":
            payload = {
                "map_a": args.map_a,
                "map_b": args.map_b,
                "mode": args.mode,
                "out": args.out,
                "config": _config_payload(args),
            }
            return _run(args.server, "/diff", payload)
        if args.command == "roi":
            payload = {
                "maps": args.maps,
                "atlas": args.atlas,
                "labels": args.labels,
                "level": args.level,
                "out": args.out,
            }
            return _run(args.server, "/roi", payload)
        if args.command == "layers":
            payload = {
                "transcript": args.transcript,
                "features": args.features,
                "bold_dir": args.bold_dir,
                "atlas": args.atlas,
                "out": args.out,
                "config": _config_payload(args),
            }
            return _run(args.server, "/layers", payload)
        if args.command == "synth":
            payload = {
                "out_dir": args.out_dir,
                "words": args.words,
                "dims": args.dims,
                "frames": args.frames,
                "tr": args.tr,
                "voxels": args.voxels,
                "subjects": args.subjects,
                "lags": args.lags,
                "signal_scale": args.signal_scale,
                "subject_noise": args.subject_noise,
                "shared_noise": args.shared_noise,
                "seed": args.seed,
                "augment_dims": args.augment_dims,
                "informative": not args.decoy,
                "mem_scale": args.mem_scale,
            }
            return _run(args.server, "/synth", payload)
        if args.command == "augment":
            payload = {
                "transcript": args.transcript,
                "annotations": args.annotations,
                "out": args.out,
            }
            return _run(args.server, "/augment", payload)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
