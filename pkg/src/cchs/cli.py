"""Command-line surface: synth, detect, noise, evaluate, flow.

stdout carries exactly one JSON report per run; logs go to stderr. Every
command also writes the same report next to its outputs as a sidecar, so a
run is reproducible from the sidecar alone. Exit codes: 0 success, 2
parameter error, 3 I/O error, 4 numerical failure.
"""

import os


def _cap_threads() -> None:
    """Honor CCHS_THREADS before any numerical library spins up its pools."""
    raw = os.environ.get("CCHS_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        return
    if n > 0:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
            os.environ.setdefault(var, str(n))


_cap_threads()

import functools
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import detectors, flow as flow_mod, image_io, metrics, noise as noise_mod, synth
from .exceptions import CCHSError, NumericalError, ParameterError
from .scalespace import ScalePair

SCHEMA = "cchs-report/1"

_COLORSPACE_CHOICES = ("lab", "raw-rgb")


def _working_image(img, colorspace):
    if colorspace == "lab":
        return image_io.to_lab(img)
    return img


def _working_nu(color, colorspace):
    mode = image_io.COLORSPACE_LAB if colorspace == "lab" else image_io.COLORSPACE_SRGB
    return image_io.color_to_nu(color, mode)


def _parse_color(text):
    parts = text.split(",")
    if len(parts) != 3:
        raise ParameterError(f"expected a color as R,G,B in [0, 1], got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ParameterError(f"malformed color {text!r}") from exc


def _emit(report: dict, sidecar: Path | None = None) -> None:
    text = json.dumps(report, sort_keys=True, indent=2)
    if sidecar is not None:
        sidecar.write_text(text + "\n")
    click.echo(text)


def _check_finite(name: str, arr: np.ndarray) -> None:
    if not np.isfinite(arr).all():
        raise NumericalError(f"{name} contains non-finite values")


def _run(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            fn(*args, **kwargs)
        except CCHSError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(exc.exit_code)
        except OSError as exc:
            click.echo(f"i/o error: {exc}", err=True)
            sys.exit(3)
    return wrapper


@click.group()
def main():
    """Color-selective edge detection and optical flow."""


@main.command()
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("out_dir", type=click.Path(file_okay=False))
@click.option("--method", type=click.Choice(detectors.METHODS), default="ched",
              show_default=True)
@click.option("--color", default="1,0,0", show_default=True,
              help="Target color as R,G,B in [0, 1] (sRGB).")
@click.option("--y1", type=float, default=None, help="Horizontal scale (method default).")
@click.option("--y2", type=float, default=None, help="Vertical scale (method default).")
@click.option("--nms-radius", type=float, default=detectors.DEFAULT_NMS_RADIUS,
              show_default=True)
@click.option("--threshold-percentile", type=float,
              default=detectors.DEFAULT_THRESHOLD_PERCENTILE, show_default=True)
@click.option("--colorspace", type=click.Choice(_COLORSPACE_CHOICES), default="lab",
              show_default=True)
@_run
def detect(input_path, out_dir, method, color, y1, y2, nms_radius,
           threshold_percentile, colorspace):
    """Detect edges of a given color; writes gradient, edge map and report."""
    defaults = detectors.DEFAULT_SCALES[method]
    scales = ScalePair(y1 if y1 is not None else defaults.y1,
                       y2 if y2 is not None else defaults.y2)
    rgb = _parse_color(color)
    img = image_io.load(input_path)
    work = _working_image(img, colorspace)
    nu = _working_nu(rgb, colorspace)

    gm = detectors.detect(work, method, nu, scales)
    _check_finite("gradient map", gm.magnitude)
    edge = detectors.nms(gm, radius=nms_radius,
                         threshold_percentile=threshold_percentile)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    peak = gm.magnitude.max()
    norm = gm.magnitude / peak if peak > 0 else gm.magnitude
    image_io.save_gray(norm, out / "gradient.png", bitdepth=16)
    image_io.save_gray(edge.edges.astype(np.float64), out / "edges.png", bitdepth=8)

    report = {
        "schema": SCHEMA,
        "command": "detect",
        "params": {
            "input": str(input_path), "method": method, "color": list(rgb),
            "y1": scales.y1, "y2": scales.y2, "nms_radius": nms_radius,
            "threshold_percentile": threshold_percentile, "colorspace": colorspace,
        },
        "outputs": {
            "gradient": str(out / "gradient.png"),
            "edges": str(out / "edges.png"),
            "gradient_peak": float(peak),
            "edge_pixels": int(edge.edges.sum()),
            "threshold": edge.threshold,
        },
    }
    _emit(report, out / "report.json")


@main.command()
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("output_path", type=click.Path(dir_okay=False))
@click.option("--noise", "kind", type=click.Choice(noise_mod.KINDS), required=True)
@click.option("--noise-param", type=float, default=None,
              help="Variance (gaussian/speckle) or density (salt_pepper).")
@click.option("--seed", type=int, default=0, show_default=True)
@_run
def noise(input_path, output_path, kind, noise_param, seed):
    """Corrupt an image with seeded noise."""
    spec = noise_mod.NoiseSpec(kind, noise_param, seed)
    img = image_io.load(input_path)
    out = noise_mod.corrupt(img, spec)
    image_io.save(out, output_path, bitdepth=16)
    report = {
        "schema": SCHEMA,
        "command": "noise",
        "params": {"input": str(input_path), "noise": kind,
                   "noise_param": noise_param, "seed": seed},
        "outputs": {"image": str(output_path),
                    "snr_db": noise_mod.snr(img, out)},
    }
    _emit(report, Path(output_path).with_suffix(".json"))


@main.command()
@click.option("--detected", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--reference", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--reference-kind", type=click.Choice(("ground-truth", "clean-detection")),
              default="ground-truth", show_default=True,
              help="What the reference map is, recorded in the report.")
@click.option("--image", default="", help="Source image label for the report.")
@click.option("--method", default="", help="Detector label for the report.")
@click.option("--noise", "noise_kind", default="", help="Noise label for the report.")
@click.option("--param", type=float, default=None, help="Noise parameter label.")
@click.option("--seed", type=int, default=None, help="Noise seed label.")
@click.option("--snr", type=float, default=None, help="Measured SNR label (dB).")
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None,
              help="Append the report as a CSV row (header written if new).")
@_run
def evaluate(detected, reference, reference_kind, image, method, noise_kind,
             param, seed, snr, csv_path):
    """Score a detected edge map against a reference map."""
    det = image_io.load_gray(detected)
    ref = image_io.load_gray(reference)
    if det.shape != ref.shape:
        raise ParameterError("detected and reference maps differ in shape")
    scores = {
        "psnr": metrics.psnr(det, ref),
        "ssim": metrics.ssim(det, ref),
        "fsim": metrics.fsim(det, ref),
        "f": metrics.pratt_f(det > 0.5, ref > 0.5),
    }
    report = {
        "schema": SCHEMA,
        "command": "evaluate",
        "params": {
            "detected": str(detected), "reference": str(reference),
            "reference_kind": reference_kind, "image": image, "method": method,
            "noise": noise_kind, "param": param, "seed": seed, "snr": snr,
        },
        "outputs": scores,
    }
    if csv_path:
        columns = ("image", "method", "noise", "param", "seed",
                   "psnr", "ssim", "fsim", "f", "snr")
        row = {"image": image, "method": method, "noise": noise_kind,
               "param": param, "seed": seed, "snr": snr, **scores}
        path = Path(csv_path)
        line = ",".join("" if row[c] is None else str(row[c]) for c in columns)
        if not path.exists():
            path.write_text(",".join(columns) + "\n" + line + "\n")
        else:
            with path.open("a") as fh:
                fh.write(line + "\n")
    _emit(report)


@main.command()
@click.argument("inputs", nargs=-1, required=True,
                type=click.Path(exists=True))
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
@click.option("--method", type=click.Choice(detectors.METHODS), default="ched",
              show_default=True)
@click.option("--color", default="1,0,0", show_default=True)
@click.option("--y1", type=float, default=None)
@click.option("--y2", type=float, default=None)
@click.option("--window", type=int, default=flow_mod.DEFAULT_WINDOW, show_default=True)
@click.option("--colorspace", type=click.Choice(_COLORSPACE_CHOICES), default="lab",
              show_default=True)
@click.option("--pretreat/--raw", "use_pretreat", default=True, show_default=True,
              help="Edge-strength pretreatment vs raw luminance input.")
@_run
def flow(inputs, out_dir, method, color, y1, y2, window, colorspace, use_pretreat):
    """Optical flow over consecutive frames (two files or one directory)."""
    frames = _collect_frames(inputs)
    defaults = detectors.DEFAULT_SCALES[method]
    scales = ScalePair(y1 if y1 is not None else defaults.y1,
                       y2 if y2 is not None else defaults.y2)
    rgb = _parse_color(color)
    nu = _working_nu(rgb, colorspace)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    planes = []
    for path in frames:
        img = _working_image(image_io.load(path), colorspace)
        if use_pretreat:
            planes.append(flow_mod.pretreat(img, method, nu, scales))
        else:
            planes.append(img.channels.mean(axis=2))

    pairs = []
    for i in range(len(planes) - 1):
        field = flow_mod.lk_flow(planes[i], planes[i + 1], window=window)
        _check_finite("flow", np.where(field.valid, np.hypot(field.u, field.v), 0.0))
        flo_path = out / f"flow_{i:04d}.flo"
        png_path = out / f"flow_{i:04d}.png"
        image_io.write_flo(field.u, field.v, flo_path, valid=field.valid)
        image_io.save(flow_mod.flow_to_color(field), png_path, bitdepth=8)
        pairs.append({
            "frames": [str(frames[i]), str(frames[i + 1])],
            "flo": str(flo_path), "png": str(png_path),
            "valid_fraction": float(field.valid.mean()),
        })

    report = {
        "schema": SCHEMA,
        "command": "flow",
        "params": {"inputs": [str(f) for f in frames], "method": method,
                   "color": list(rgb), "y1": scales.y1, "y2": scales.y2,
                   "window": window, "colorspace": colorspace,
                   "pretreat": use_pretreat},
        "outputs": {"pairs": pairs},
    }
    _emit(report, out / "report.json")


def _collect_frames(inputs):
    paths = [Path(p) for p in inputs]
    if len(paths) == 1 and paths[0].is_dir():
        frames = sorted(p for p in paths[0].iterdir()
                        if p.suffix.lower() in (".png", ".ppm", ".pnm"))
    else:
        frames = paths
    if len(frames) < 2:
        raise ParameterError("flow needs at least two frames")
    for f in frames:
        if f.is_dir():
            raise ParameterError(f"{f} is a directory; pass files or one directory")
    return frames


@main.group("synth")
def synth_cmd():
    """Generate deterministic fixtures with ground truth."""


@synth_cmd.command("rectangles")
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
@click.option("--width", type=int, default=256, show_default=True)
@click.option("--height", type=int, default=256, show_default=True)
@_run
def synth_rectangles(out_dir, width, height):
    """Three rounded rectangles plus per-color boundary maps."""
    img, truths, shapes = synth.rectangles(width, height)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    image_io.save(img, out / "rectangles.png", bitdepth=8)
    truth_files = {}
    for name, truth in truths.items():
        path = out / f"truth_{name}.png"
        image_io.save_gray(truth.astype(np.float64), path, bitdepth=8)
        truth_files[name] = str(path)
    report = {
        "schema": SCHEMA,
        "command": "synth rectangles",
        "params": {"width": width, "height": height},
        "outputs": {
            "image": str(out / "rectangles.png"),
            "truths": truth_files,
            "perimeters": {n: shapes[n].perimeter() for n in shapes},
        },
    }
    _emit(report, out / "report.json")


@synth_cmd.command("step-edge")
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
@click.option("--width", type=int, default=128, show_default=True)
@click.option("--height", type=int, default=128, show_default=True)
@click.option("--color-left", default="0.3,0.3,0.3", show_default=True)
@click.option("--color-right", default="1,0,0", show_default=True)
@click.option("--column", type=int, default=None, help="Defaults to width // 2.")
@click.option("--antialias", is_flag=True, default=False)
@_run
def synth_step_edge(out_dir, width, height, color_left, color_right, column, antialias):
    """A vertical color step with single-column ground truth."""
    col = column if column is not None else width // 2
    img, truth = synth.step_edge(width, height, _parse_color(color_left),
                                 _parse_color(color_right), col, antialias)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    image_io.save(img, out / "step.png", bitdepth=8)
    image_io.save_gray(truth.astype(np.float64), out / "truth.png", bitdepth=8)
    report = {
        "schema": SCHEMA,
        "command": "synth step-edge",
        "params": {"width": width, "height": height, "color_left": color_left,
                   "color_right": color_right, "column": col, "antialias": antialias},
        "outputs": {"image": str(out / "step.png"), "truth": str(out / "truth.png")},
    }
    _emit(report, out / "report.json")


@synth_cmd.command("square-pair")
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
@click.option("--shift", default="2,0", show_default=True, help="dx,dy in pixels.")
@click.option("--size", type=int, default=96, show_default=True)
@_run
def synth_square_pair(out_dir, shift, size):
    """Two frames of a translated colored square (flow fixture)."""
    parts = shift.split(",")
    if len(parts) != 2:
        raise ParameterError(f"expected shift as dx,dy, got {shift!r}")
    try:
        dx, dy = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise ParameterError(f"malformed shift {shift!r}") from exc
    f1, f2 = synth.translated_square_pair((dx, dy), size=size)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    image_io.save(f1, out / "frame_0000.png", bitdepth=8)
    image_io.save(f2, out / "frame_0001.png", bitdepth=8)
    report = {
        "schema": SCHEMA,
        "command": "synth square-pair",
        "params": {"shift": [dx, dy], "size": size},
        "outputs": {"frames": [str(out / "frame_0000.png"),
                               str(out / "frame_0001.png")]},
    }
    _emit(report, out / "report.json")


if __name__ == "__main__":
    main()
