"""Command-line entry point.

    embedextract --encoder mock --modality audio --space joint \
        --dim 16 --out clips.emb1 clips/
    embedextract --encoder mock --modality text --space joint \
        --dim 16 --out prompts.emb1 manifest.csv

Exit codes: 0 all inputs embedded, 1 any error (per-file failures
included; whatever could be embedded is still written).
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .emb1 import Emb1Error
from .encoders import DEFAULT_DIM, EncoderSpec, ExtractError
from .extract import collect_audio_paths, embed_audio, embed_text


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="embedextract", description=__doc__)
    parser.add_argument("--version", action="version", version=f"embedextract {__version__}")
    parser.add_argument("--encoder", default="mock", help="encoder id (default: mock)")
    parser.add_argument("--modality", choices=("audio", "text"), required=True)
    parser.add_argument("--space", choices=("joint", "prejoint"), default="joint")
    parser.add_argument("--sample-rate", type=int, default=None,
                        help="audio resample target in Hz (encoder default when omitted)")
    parser.add_argument("--dim", type=int, default=DEFAULT_DIM,
                        help="joint-space dimension (mock encoder only)")
    parser.add_argument("--list", dest="list_file", default=None,
                        help="file with one audio path per line")
    parser.add_argument("--out", required=True, help="EMB1 destination")
    parser.add_argument("inputs", nargs="*",
                        help="audio files/directories, or one prompt manifest for --modality text")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    spec = EncoderSpec(
        encoder=args.encoder,
        modality=args.modality,
        space=args.space,
        sample_rate=args.sample_rate,
        dim=args.dim,
    )
    try:
        if args.modality == "text":
            if args.list_file or len(args.inputs) != 1:
                raise ExtractError("--modality text takes exactly one prompt manifest file")
            result = embed_text(args.inputs[0], spec, args.out)
        else:
            paths = collect_audio_paths(args.inputs, args.list_file)
            result = embed_audio(paths, spec, args.out)
    except (ExtractError, Emb1Error, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path, reason in result.failures:
        print(f"error: {path}: {reason}", file=sys.stderr)
    print(f"{result.written} records ({result.dim}-d) written to {args.out}")
    return 0 if result.ok else 1


if __name__ == "__main__":
    sys.exit(main())
