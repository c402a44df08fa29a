"""Command-line front end for the extraction adapters.

Exit codes mirror the main pipeline's CLI so shell harnesses can assert
failure classes uniformly:

    0 success
    1 usage error (bad flags or arguments)
    2 data error (undecodable media, empty transcript, face rejection)

A face-detection rejection additionally writes a JSON report next to the
intended output (or to --report) before exiting.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .audio import emit_wav
from .embeddings import emit_embeddings
from .errors import AdapterError, NoFaceFound
from .fixture import make_fixture
from .landmarks import emit_landmarks

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would sys.exit(2)
        raise UsageError(message)


def cmd_emit_wav(args: argparse.Namespace) -> int:
    r = emit_wav(args.source, args.out)
    print(
        f"{r.out}: {r.samples_out} samples @ 16000 Hz mono "
        f"(from {r.source_rate} Hz x{r.source_channels}, {r.duration_s:.3f} s)"
    )
    return EXIT_OK


def cmd_emit_landmarks(args: argparse.Namespace) -> int:
    try:
        r = emit_landmarks(args.clip, args.out, backend=args.backend, min_rate=args.min_rate)
    except NoFaceFound as e:
        report = Path(args.report) if args.report else Path(str(args.out) + ".rejected.json")
        report.write_text(
            json.dumps(
                {
                    "rejected": str(e.clip),
                    "reason": "no-face-found",
                    "frames": e.n_frames,
                    "detected": e.n_detected,
                    "detection_rate": round(e.rate, 6),
                    "min_rate": e.min_rate,
                },
                indent=2,
            )
            + "\n"
        )
        print(f"rejection report written to {report}", file=sys.stderr)
        raise
    filled = f", {len(r.fills)} filled" if r.fills else ""
    print(f"{r.out}: {r.n_frames} frames @ {r.fps:g} fps via {r.backend}{filled}")
    return EXIT_OK


def cmd_emit_embeddings(args: argparse.Namespace) -> int:
    r = emit_embeddings(args.transcript, args.out, backend=args.backend)
    print(f"{r.out}: {r.tokens} tokens x {r.dim} dims via {r.backend}")
    return EXIT_OK


def cmd_make_fixture(args: argparse.Namespace) -> int:
    p = make_fixture(args.out_dir, seed=args.seed, duration_s=args.duration)
    print(f"clip: {p.clip}")
    print(f"audio: {p.audio}")
    print(f"transcript: {p.transcript}")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="veracity-adapters", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("emit-wav", help="convert source audio to 16 kHz mono 16-bit WAV")
    p.add_argument("source")
    p.add_argument("out")
    p.set_defaults(func=cmd_emit_wav)

    p = sub.add_parser("emit-landmarks", help="extract per-frame 68-point landmark CSV")
    p.add_argument("clip")
    p.add_argument("out")
    p.add_argument("--backend", default="auto", choices=["auto", "tracker", "dlib"])
    p.add_argument(
        "--min-detection-rate",
        dest="min_rate",
        type=float,
        default=0.95,
        help="reject the clip below this fraction of detected frames",
    )
    p.add_argument("--report", default=None, help="rejection report path")
    p.set_defaults(func=cmd_emit_landmarks)

    p = sub.add_parser("emit-embeddings", help="encode a transcript to token embeddings")
    p.add_argument("transcript")
    p.add_argument("out")
    p.add_argument("--backend", default="auto", choices=["auto", "hashed", "bert"])
    p.set_defaults(func=cmd_emit_embeddings)

    p = sub.add_parser("make-fixture", help="generate a raw-media test fixture")
    p.add_argument("out_dir")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--duration", type=float, default=10.0)
    p.set_defaults(func=cmd_make_fixture)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except AdapterError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
