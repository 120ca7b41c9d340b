"""Dataset generation, analysis and validation."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, svg
from .analytics import (FeatureMatrix, correlation_matrix, cluster_summary, kmeans_fit,
                        pca_fit_transform, relabel_by_size, standardize)
from .colormaps import get_colormap
from .features import FeatureError, extract_features
from .params import C_IMAG_RANGE, C_REAL_RANGE, PALETTE, derive_julia_params
from .png import read_png, write_png
from .quantum import (DEFAULT_SHOTS, MAX_DEPTH, MAX_QUBITS, build_random_circuit, probs_digest,
                      sample_shots, simulate)
from .render import RenderSpec, colorize, render_field
from .rng import CHOICE_CONST, MASK64, SHOT_CONST, SplitMix64, splitmix64

log = logging.getLogger(__name__)

BASE_COLUMNS = ("filename", "seed", "num_qubits", "depth", "c_real", "c_imag", "power", "cmap",
                "probs_sha1")
ANALYSIS_COLUMNS = ("fractal_dimension", "lacunarity", "energy", "cluster", "pc1", "pc2")
FEATURE_COLUMNS = ("fractal_dimension", "lacunarity", "energy")
CORRELATION_COLUMNS = ("c_real", "c_imag", "power", "depth", "fractal_dimension", "lacunarity")

CSV_NAME = "metadata.csv"
MANIFEST_NAME = "manifest.json"
ENRICHED_NAME = "metadata_enriched.csv"
SUMMARY_NAME = "summary.json"
PLOT_NAMES = ("fd_vs_lacunarity.svg", "correlation.svg", "clusters.svg")

FILENAME_RE = re.compile(r"^quantum_julia_(\d+)\.png$")
SHA1_RE = re.compile(r"^[0-9a-f]{40}$")
MAX_MISSING_FRACTION = 0.10
THREADS_ENV = "FRAQTAL_THREADS"


class GenerationError(RuntimeError):
    def __init__(self, index: int, message: str):
        super().__init__(f"image {index}: {message}")
        self.index = index


class AnalysisError(RuntimeError):
    def __init__(self, message: str, report: dict | None = None):
        super().__init__(message)
        self.report = report or {}


class CsvParseError(ValueError):
    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.line = line


def resolve_workers(workers: int | None = None) -> int:
    """Explicit count, else $FRAQTAL_THREADS; 0 means one per CPU."""
    if workers is None:
        raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
        try:
            workers = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if workers < 0:
        raise ValueError("worker count must be >= 0")
    return workers or (os.cpu_count() or 1)


def image_filename(index: int) -> str:
    return f"quantum_julia_{index:04d}.png"


def format_float(v: float) -> str:
    # shortest round-trip repr keeps CSV bytes identical across runs
    return repr(float(v))


def sha1_file(path) -> str:
    h = hashlib.sha1()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def _write_csv(path: Path, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    path.write_text(buf.getvalue(), encoding="utf-8", newline="")


# -------------------------------------------------------------- generation

@dataclass(frozen=True)
class GenerationConfig:
    master_seed: int
    count: int
    output_dir: str = "fraqtal_out"
    width: int = 512
    height: int = 512
    shots: int = DEFAULT_SHOTS
    qubit_choices: tuple[int, ...] = (3, 4, 5)
    depth_choices: tuple[int, ...] = (2, 3, 4)
    normalization: str = "log"
    viewport: tuple[float, float, float, float] = (-1.2, 1.2, -1.2, 1.2)

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if not 0 <= self.master_seed <= MASK64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")
        if not self.qubit_choices or not self.depth_choices:
            raise ValueError("qubit and depth choices must be nonempty")
        object.__setattr__(self, "qubit_choices", tuple(sorted(set(self.qubit_choices))))
        object.__setattr__(self, "depth_choices", tuple(sorted(set(self.depth_choices))))
        if not all(3 <= q <= MAX_QUBITS for q in self.qubit_choices):
            raise ValueError(f"qubit choices must lie in [3, {MAX_QUBITS}]")
        if not all(0 <= d <= MAX_DEPTH for d in self.depth_choices):
            raise ValueError(f"depth choices must lie in [0, {MAX_DEPTH}]")
        if self.shots < 1:
            raise ValueError("shots must be positive")
        # RenderSpec enforces size and normalization
        object.__setattr__(self, "viewport", tuple(float(v) for v in self.viewport))
        RenderSpec(self.width, self.height, 0j, viewport=self.viewport,
                   normalization=self.normalization)


def image_seed(master_seed: int, index: int) -> int:
    return splitmix64((master_seed + index) & MASK64)


def generate_record(cfg: GenerationConfig, index: int, out_dir: Path | None = None) -> dict:
    """Build, simulate, map and render image ``index`` (1-based); write its PNG if ``out_dir`` is set."""
    seed = image_seed(cfg.master_seed, index)
    pick = SplitMix64(seed ^ CHOICE_CONST)
    num_qubits = cfg.qubit_choices[pick.randbelow(len(cfg.qubit_choices))]
    depth = cfg.depth_choices[pick.randbelow(len(cfg.depth_choices))]
    sv = simulate(build_random_circuit(seed, num_qubits, depth))
    hist = sample_shots(sv, cfg.shots, seed ^ SHOT_CONST)
    params = derive_julia_params(hist, seed)
    name = image_filename(index)
    if out_dir is not None:
        spec = RenderSpec(cfg.width, cfg.height, params.c, params.power,
                          viewport=cfg.viewport, normalization=cfg.normalization)
        image = colorize(render_field(spec), get_colormap(params.cmap_name))
        write_png(image, out_dir / name)
    return {
        "filename": name,
        "seed": seed,
        "num_qubits": num_qubits,
        "depth": depth,
        "c_real": params.c_real,
        "c_imag": params.c_imag,
        "power": params.power,
        "cmap": params.cmap_name,
        "probs_sha1": probs_digest(hist),
    }


def _record_row(rec: dict) -> list[str]:
    return [rec["filename"], str(rec["seed"]), str(rec["num_qubits"]), str(rec["depth"]),
            format_float(rec["c_real"]), format_float(rec["c_imag"]), str(rec["power"]),
            rec["cmap"], rec["probs_sha1"]]


@dataclass
class GenerationResult:
    csv_path: Path
    manifest_path: Path
    records: list
    manifest: dict


def generate_dataset(cfg: GenerationConfig, workers: int | None = None) -> GenerationResult:
    """Write PNGs, ``metadata.csv`` (index order) and ``manifest.json`` under ``cfg.output_dir``."""
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    n_workers = min(resolve_workers(workers), cfg.count)
    indices = range(1, cfg.count + 1)
    records, failure = [], None

    def job(i):
        try:
            return generate_record(cfg, i, out_dir)
        except OSError as exc:
            raise GenerationError(i, str(exc)) from exc

    if n_workers == 1:
        try:
            for i in indices:
                records.append(job(i))
        except GenerationError as exc:
            failure = exc
    else:
        with ThreadPoolExecutor(n_workers) as pool:
            futures = [pool.submit(job, i) for i in indices]
            for fut in futures:
                try:
                    records.append(fut.result())
                except GenerationError as exc:
                    failure = exc
                    break
    csv_path = out_dir / CSV_NAME
    _write_csv(csv_path, BASE_COLUMNS, (_record_row(r) for r in records))
    manifest = {
        "config": {**asdict(cfg), "qubit_choices": list(cfg.qubit_choices),
                   "depth_choices": list(cfg.depth_choices), "viewport": list(cfg.viewport)},
        "code_version": __version__,
        "counts": {"requested": cfg.count, "written": len(records)},
        "csv_sha1": sha1_file(csv_path),
        "partial": failure is not None,
        "failed_index": failure.index if failure else None,
    }
    manifest_path = out_dir / MANIFEST_NAME
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    if failure is not None:
        raise failure
    log.info("generated %d images in %s", len(records), out_dir)
    return GenerationResult(csv_path, manifest_path, records, manifest)


# -------------------------------------------------------------- validation

@dataclass(frozen=True)
class Finding:
    kind: str
    line: int
    column: str
    detail: str

    def __str__(self):
        where = f"line {self.line}" + (f", {self.column}" if self.column else "")
        return f"{self.kind}: {where}: {self.detail}"


@dataclass
class ValidationReport:
    rows: int = 0
    findings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.findings

    @property
    def missing_files(self) -> list[str]:
        return [f.detail for f in self.findings if f.kind == "missing-file"]

    def format(self) -> str:
        if self.ok:
            return f"OK: {self.rows} rows, no findings"
        return "\n".join(str(f) for f in self.findings)


def read_metadata(csv_path) -> tuple[list[str], list[tuple[int, list[str]]]]:
    """Header plus ``(line_number, fields)`` for every data row."""
    path = Path(csv_path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        line = path.read_bytes()[:exc.start].count(b"\n") + 1
        raise CsvParseError(path, line, "not valid UTF-8") from None
    reader = csv.reader(io.StringIO(text, newline=""), strict=True)
    rows = []
    try:
        header = next(reader, None)
        if header is None:
            raise CsvParseError(path, 1, "empty file")
        for fields in reader:
            if fields:
                rows.append((reader.line_num, fields))
    except csv.Error as exc:
        raise CsvParseError(path, reader.line_num, str(exc)) from None
    missing = [c for c in BASE_COLUMNS if c not in header]
    if missing:
        raise CsvParseError(path, 1, f"header lacks columns {', '.join(missing)}")
    return header, rows


def _int_in(text: str, lo: int, hi: int) -> bool:
    try:
        v = int(text)
    except ValueError:
        return False
    return lo <= v <= hi


def _float_in(text: str, lo: float, hi: float) -> bool:
    try:
        v = float(text)
    except ValueError:
        return False
    return lo <= v <= hi


def validate_dataset(csv_path, images_dir) -> ValidationReport:
    header, rows = read_metadata(csv_path)
    images_dir = Path(images_dir)
    report = ValidationReport(rows=len(rows))
    add = report.findings.append
    seen = {}
    checks = {
        "seed": lambda v: _int_in(v, 0, MASK64),
        "num_qubits": lambda v: _int_in(v, 1, MAX_QUBITS),
        "depth": lambda v: _int_in(v, 0, MAX_DEPTH),
        "c_real": lambda v: _float_in(v, *C_REAL_RANGE),
        "c_imag": lambda v: _float_in(v, *C_IMAG_RANGE),
        "power": lambda v: v in ("2", "3", "4"),
        "cmap": lambda v: v in PALETTE,
        "probs_sha1": lambda v: bool(SHA1_RE.match(v)),
    }
    for line, fields in rows:
        if len(fields) != len(header):
            add(Finding("malformed-row", line, "", f"expected {len(header)} fields, got {len(fields)}"))
            continue
        rec = dict(zip(header, fields))
        name = rec["filename"]
        if not FILENAME_RE.match(name):
            add(Finding("bad-filename", line, "filename", name))
        if name in seen:
            add(Finding("duplicate-filename", line, "filename", f"{name} (first on line {seen[name]})"))
        else:
            seen[name] = line
            if not (images_dir / name).is_file():
                add(Finding("missing-file", line, "filename", name))
        for col, ok in checks.items():
            if not ok(rec[col]):
                add(Finding("out-of-range", line, col, repr(rec[col])))
        for col in ANALYSIS_COLUMNS:
            value = rec.get(col, "")
            if value and not _is_finite(value):
                add(Finding("out-of-range", line, col, repr(value)))
    return report


def _is_finite(text: str) -> bool:
    try:
        return math.isfinite(float(text))
    except ValueError:
        return False


# ---------------------------------------------------------------- analysis

@dataclass
class AnalysisResult:
    enriched_csv: Path
    summary_path: Path
    plot_paths: list
    summary: dict


def _features_for(path: Path):
    try:
        return extract_features(read_png(path))
    except FeatureError as exc:
        return exc


def analyze_dataset(csv_path, images_dir, out_dir=None, k: int = 3, seed: int = 0,
                    cluster_space: str = "features", workers: int | None = None) -> AnalysisResult:
    """Extract features for every referenced image, then correlate, project and cluster.

    ``cluster_space`` selects what k-means sees: the standardized feature
    columns ("features") or the two PCA scores ("pca").
    """
    if cluster_space not in ("features", "pca"):
        raise ValueError("cluster_space must be 'features' or 'pca'")
    csv_path, images_dir = Path(csv_path), Path(images_dir)
    out_dir = Path(out_dir) if out_dir is not None else csv_path.parent
    out_dir.mkdir(parents=True, exist_ok=True)
    header, rows = read_metadata(csv_path)
    warnings: list[str] = []

    records = []
    for line, fields in rows:
        if len(fields) != len(header):
            warnings.append(f"line {line}: malformed row skipped")
            continue
        records.append(dict(zip(header, fields)))
    missing = [r["filename"] for r in records if not (images_dir / r["filename"]).is_file()]
    if records and len(missing) > MAX_MISSING_FRACTION * len(records):
        raise AnalysisError(f"{len(missing)} of {len(records)} referenced images are missing",
                            {"missing": missing})
    if missing:
        warnings.append(f"{len(missing)} missing images excluded: {', '.join(missing)}")
    present = [r for r in records if r["filename"] not in set(missing)]

    n_workers = resolve_workers(workers)
    paths = [images_dir / r["filename"] for r in present]
    if n_workers > 1 and len(paths) > 1:
        with ThreadPoolExecutor(min(n_workers, len(paths))) as pool:
            feats = list(pool.map(_features_for, paths))
    else:
        feats = [_features_for(p) for p in paths]

    analyzed = []
    for rec, fv in zip(present, feats):
        if isinstance(fv, FeatureError):
            warnings.append(f"{rec['filename']}: {fv}; row flagged")
            continue
        rec.update(fractal_dimension=fv.fractal_dimension, lacunarity=fv.lacunarity,
                   energy=fv.energy)
        analyzed.append(rec)

    summary = {
        "config": {"input_csv": str(csv_path), "input_csv_sha1": sha1_file(csv_path),
                   "images_dir": str(images_dir), "k": k, "seed": seed,
                   "cluster_space": cluster_space, "features": list(FEATURE_COLUMNS)},
        "counts": {"rows": len(records), "missing_images": len(missing),
                   "feature_errors": len(present) - len(analyzed), "analyzed": len(analyzed)},
        "cluster_means": {},
        "cluster_counts": {},
        "correlation_matrix": None,
        "explained_variance_ratio": None,
        "warnings": warnings,
    }

    labels = scores = None
    feats_matrix = FeatureMatrix.from_records(
        FEATURE_COLUMNS, ([r[c] for c in FEATURE_COLUMNS] for r in analyzed))
    corr_matrix = FeatureMatrix.from_records(
        CORRELATION_COLUMNS, ([r[c] for c in CORRELATION_COLUMNS] for r in analyzed))

    if len(analyzed) >= 2:
        corr, flat = correlation_matrix(corr_matrix)
        summary["correlation_matrix"] = {"columns": list(CORRELATION_COLUMNS),
                                         "values": corr.round(12).tolist()}
        if flat:
            warnings.append(f"zero-variance columns in correlation: {', '.join(flat)}")
        st = standardize(feats_matrix)
        if st.flagged:
            warnings.append(f"zero-variance features: {', '.join(st.flagged)}")
    if len(analyzed) >= 3:
        pca, scores = pca_fit_transform(feats_matrix)
        summary["explained_variance_ratio"] = pca.explained_variance_ratio.tolist()
        summary["pca_components"] = pca.components.tolist()
        space = st.matrix.rows if cluster_space == "features" else scores
        distinct = len(np.unique(space, axis=0))
        if distinct < k:
            warnings.append(f"degenerate feature space: {distinct} distinct points for k={k}; "
                            "clustering skipped")
        else:
            model = relabel_by_size(kmeans_fit(space, k, seed))
            labels = model.labels
            for s in cluster_summary(feats_matrix, labels):
                summary["cluster_counts"][str(s.cluster)] = s.count
                summary["cluster_means"][str(s.cluster)] = s.means
            summary["inertia"] = model.inertia
            largest = max(summary["cluster_counts"].values()) / len(analyzed)
            summary["largest_cluster_fraction"] = largest
    elif analyzed:
        warnings.append("fewer than 3 analyzed images; PCA and clustering skipped")

    for i, rec in enumerate(analyzed):
        rec["cluster"] = int(labels[i]) if labels is not None else ""
        rec["pc1"] = float(scores[i, 0]) if scores is not None else ""
        rec["pc2"] = float(scores[i, 1]) if scores is not None else ""

    out_header = list(header) + [c for c in ANALYSIS_COLUMNS if c not in header]
    out_rows = []
    for rec in records:
        row = []
        for col in out_header:
            v = rec.get(col, "")
            row.append(format_float(v) if isinstance(v, float) else str(v))
        out_rows.append(row)
    enriched = out_dir / ENRICHED_NAME
    _write_csv(enriched, out_header, out_rows)
    summary["csv_sha1"] = sha1_file(enriched)

    plot_paths = []
    if analyzed:
        plot_paths = _emit_plots(out_dir, analyzed, summary)
    summary_path = out_dir / SUMMARY_NAME
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return AnalysisResult(enriched, summary_path, plot_paths, summary)


def _emit_plots(out_dir: Path, analyzed: list, summary: dict) -> list[Path]:
    paths = []
    scatter = svg.SvgPlot(
        kind="scatter", title="Fractal dimension vs lacunarity",
        x_label="fractal_dimension", y_label="lacunarity",
        x=[r["fractal_dimension"] for r in analyzed],
        y=[r["lacunarity"] for r in analyzed],
        groups=[f"power {r['power']}" for r in analyzed])
    paths.append(out_dir / PLOT_NAMES[0])
    svg.emit_svg(scatter, paths[-1])
    corr = summary["correlation_matrix"]
    if corr is not None:
        heat = svg.SvgPlot(kind="heatmap", title="Correlation of parameters and features",
                           matrix=corr["values"], labels=corr["columns"])
        paths.append(out_dir / PLOT_NAMES[1])
        svg.emit_svg(heat, paths[-1])
    if summary["cluster_counts"]:
        ids = sorted(summary["cluster_counts"], key=int)
        bars = svg.SvgPlot(kind="bars", title="Images per cluster", x_label="cluster",
                           y_label="images", labels=[f"Cluster {i}" for i in ids],
                           y=[summary["cluster_counts"][i] for i in ids])
        paths.append(out_dir / PLOT_NAMES[2])
        svg.emit_svg(bars, paths[-1])
    return paths
