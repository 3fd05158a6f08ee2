import argparse
import json
import sys

from .adapter import DEVICE_ORDER, AdapterConfig, resolve_device, run_adapter
from .errors import AdapterError
from .sample import make_sample_clip


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seg-adapter",
        description="Run a detector with tracking over a video and write "
                    "the detection-log JSON that `seg extract` reads.")
    parser.add_argument("--video", help="input video file")
    parser.add_argument("--out", help="detection-log JSON output path")
    parser.add_argument("--model", default="color-blob",
                        help="detector identifier (default: color-blob)")
    parser.add_argument("--stride", type=int, default=1,
                        help="process every Nth frame (default: 1)")
    parser.add_argument("--confidence", type=float, default=0.25,
                        help="detection confidence threshold (default: 0.25)")
    parser.add_argument("--device", default=",".join(DEVICE_ORDER),
                        help="device preference order, comma separated "
                             "(default: cuda,mps,cpu)")
    parser.add_argument("--annotate", default=None,
                        help="also write an annotated video here")
    parser.add_argument("--write-sample", default=None, metavar="PATH",
                        help="generate the bundled 12s sample clip and exit")
    parser.add_argument("--json", action="store_true",
                        help="machine-readable summary on stdout")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.write_sample is not None:
        make_sample_clip(args.write_sample)
        print(args.write_sample if not args.json
              else json.dumps({"sample": args.write_sample}))
        return 0

    if args.video is None or args.out is None:
        parser.print_usage(sys.stderr)
        print("seg-adapter: --video and --out are required", file=sys.stderr)
        return 1

    try:
        cfg = AdapterConfig(video=args.video, model=args.model,
                            device_preference=tuple(args.device.split(",")),
                            stride=args.stride, confidence=args.confidence)
    except ValueError as exc:
        print(f"seg-adapter: invalid arguments: {exc}", file=sys.stderr)
        return 1

    try:
        doc = run_adapter(cfg, out=args.out, annotate=args.annotate)
    except (AdapterError, OSError) as exc:
        print(f"seg-adapter: {exc}", file=sys.stderr)
        return 2

    n_dets = sum(len(f["detections"]) for f in doc["frames"])
    summary = {"frames": len(doc["frames"]), "detections": n_dets,
               "device": resolve_device(cfg.device_preference),
               "out": args.out}
    print(json.dumps(summary) if args.json else
          f"{summary['frames']} frames, {n_dets} detections "
          f"(device {summary['device']}) -> {args.out}")
    return 0


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
