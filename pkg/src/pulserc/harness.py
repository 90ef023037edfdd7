"""Experiment runner: wires tasks, reservoir, and readout together.

An :class:`ExperimentSpec` describes one benchmark configuration; it can
be built in code or parsed from a spec file, a flat ``key = value`` text
format with '#' comments and a mandatory ``schema`` field (see
``SPEC_KEYS`` for the vocabulary). :func:`run_experiment` executes the
spec over its replications; :func:`run_sweep` runs a Cartesian grid of
field overrides and streams records to a results file whose content is a
pure function of the spec, so reruns are byte-identical.
"""

from __future__ import annotations

import hashlib
import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .errors import PulseRcError, SpecError
from .readout import evaluate, fit_ridge, nrmse, predict
from .reservoir import ReservoirParams, generate_mask, run
from .tasks import NarmaConfig, TaskDataset, gen_narma, gen_surrogate_laser, load_csv_task, standardize

SCHEMA_VERSION = 1

# stream tags keeping the per-replication task / noise / mask draws apart
_STREAM_TASK = 0
_STREAM_NOISE = 1
_STREAM_MASK = 2

# spec fields a sweep axis may override
SWEEPABLE_FIELDS = frozenset({
    "order", "num_nodes", "alpha", "beta", "gain_c", "pulse_period",
    "bandwidth_time", "noise_sigma", "mask_seed", "washout", "train_len",
    "test_len", "ridge_lambda", "replications", "seed",
})

_TASKS = ("narma", "surrogate", "csv")


@dataclass(frozen=True)
class ExperimentSpec:
    """One benchmark configuration, flat enough to echo into files."""

    schema: int = SCHEMA_VERSION
    task: str = "narma"
    order: int = 2
    compat_narma_sum: bool = False
    csv_input: str = ""
    csv_target: str = ""
    standardize: bool = False
    num_nodes: int = 35
    alpha: float = 0.7
    beta: float = 1.0
    gain_c: float = 1.0
    pulse_period: float = 6.4e-9
    bandwidth_time: float = 21e-9
    noise_sigma: float = 0.0
    mask_kind: str = "uniform"
    mask_seed: int = 1
    washout: int = 50
    train_len: int = 2250
    test_len: int = 600
    ridge_lambda: float = 1e-6
    lambda_grid: tuple[float, ...] = ()
    replications: int = 10
    seed: int = 42
    out: str = "results.tsv"

    def validate(self) -> None:
        """Raise SpecError on anything inconsistent, before any run."""
        if self.schema != SCHEMA_VERSION:
            raise SpecError(
                f"unsupported schema {self.schema!r}; this build reads "
                f"schema {SCHEMA_VERSION}")
        if self.task not in _TASKS:
            raise SpecError(f"task must be one of {_TASKS}, got {self.task!r}")
        if self.task == "csv" and not (self.csv_input and self.csv_target):
            raise SpecError("task 'csv' needs csv_input and csv_target")
        if self.replications < 1:
            raise SpecError(f"replications must be >= 1, got {self.replications}")
        if self.train_len < 1 or self.test_len < 1:
            raise SpecError("train_len and test_len must be >= 1")
        if self.washout < 0:
            raise SpecError(f"washout must be >= 0, got {self.washout}")
        if self.lambda_grid and self.train_len < 2:
            raise SpecError("lambda_grid selection needs train_len >= 2")
        for lam in self.lambda_grid or (self.ridge_lambda,):
            if lam < 0:
                raise SpecError(f"ridge strength must be >= 0, got {lam}")
        try:
            self.reservoir_params(noise_seed=0)
            if self.task == "narma":
                NarmaConfig(self.order, self.total_len, self.seed)
        except PulseRcError as exc:
            raise SpecError(str(exc)) from exc

    @property
    def total_len(self) -> int:
        """Samples a generated task must provide."""
        return self.washout + self.train_len + self.test_len

    def reservoir_params(self, noise_seed: int) -> ReservoirParams:
        return ReservoirParams(
            num_nodes=self.num_nodes, alpha=self.alpha, beta=self.beta,
            gain_c=self.gain_c, pulse_period=self.pulse_period,
            bandwidth_time=self.bandwidth_time, noise_sigma=self.noise_sigma,
            seed=noise_seed)

    def to_dict(self) -> dict:
        """Experiment-defining fields, in declaration order. The output
        path is a runtime knob and is left out."""
        d = {}
        for f in fields(self):
            if f.name == "out":
                continue
            d[f.name] = getattr(self, f.name)
        return d

    def spec_hash(self) -> str:
        """Digest of the experiment-defining fields, independent of field
        order."""
        items = sorted((k, _fmt_value(v)) for k, v in self.to_dict().items())
        blob = ";".join(f"{k}={v}" for k, v in items)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


@dataclass
class ResultRecord:
    """Outcome of one experiment: spec echo, per-replication metrics,
    aggregates, and the first replication's test trace."""

    spec_fields: dict
    spec_hash: str
    pearson_reps: list[float]
    nrmse_reps: list[float]
    lambda_reps: list[float]
    pearson_mean: float
    pearson_std: float
    nrmse_mean: float
    nrmse_std: float
    duration_s: float
    trace_targets: np.ndarray | None = None
    trace_predictions: np.ndarray | None = None
    readout_first: np.ndarray | None = None


def derive_seed(base: int, replication: int, stream: int) -> int:
    """Deterministic per-replication seed, collision-resistant across
    the task / noise / mask streams."""
    ss = np.random.SeedSequence([int(base), int(replication), int(stream)])
    return int(ss.generate_state(1)[0])


def run_experiment(spec: ExperimentSpec) -> ResultRecord:
    """Execute one spec over all its replications and aggregate.

    Each replication draws its own task, mask, and noise seeds from the
    spec's base seeds, so replication r of a long series equals
    replication r of a short one.
    """
    spec.validate()
    t0 = time.perf_counter()
    reps = []
    for r in range(spec.replications):
        try:
            reps.append(_run_replication(spec, r))
        except PulseRcError as exc:
            raise type(exc)(f"replication {r}: {exc}") from exc
    pearsons = [rep["pearson"] for rep in reps]
    nrmses = [rep["nrmse"] for rep in reps]
    return ResultRecord(
        spec_fields=spec.to_dict(),
        spec_hash=spec.spec_hash(),
        pearson_reps=pearsons,
        nrmse_reps=nrmses,
        lambda_reps=[rep["ridge_lambda"] for rep in reps],
        pearson_mean=float(np.mean(pearsons)),
        pearson_std=_spread(pearsons),
        nrmse_mean=float(np.mean(nrmses)),
        nrmse_std=_spread(nrmses),
        duration_s=time.perf_counter() - t0,
        trace_targets=reps[0]["targets"],
        trace_predictions=reps[0]["predictions"],
        readout_first=reps[0]["weights"],
    )


def run_sweep(
    base: ExperimentSpec,
    axes: list[tuple[str, list]],
    out_path=None,
    threads: int = 1,
) -> list[ResultRecord]:
    """Run the Cartesian product of axis values over the base spec.

    Records come back in lexicographic order over the axes as given and
    are streamed to ``out_path`` (when set) as they complete. Points are
    independent, so ``threads > 1`` runs them concurrently without
    changing any result.
    """
    base.validate()
    if not axes:
        axes = []
    for name, values in axes:
        if name not in SWEEPABLE_FIELDS:
            raise SpecError(
                f"unknown sweep field {name!r}; sweepable fields: "
                f"{', '.join(sorted(SWEEPABLE_FIELDS))}")
        if not values:
            raise SpecError(f"sweep axis {name!r} has no values")
    specs = []
    for combo in itertools.product(*(values for _, values in axes)):
        overrides = {name: _coerce_field(base, name, value)
                     for (name, _), value in zip(axes, combo)}
        specs.append(replace(base, **overrides))
    for s in specs:
        s.validate()

    writer = _RecordWriter(out_path, base, axes) if out_path else None
    records: list[ResultRecord] = []
    try:
        if threads <= 1 or len(specs) <= 1:
            results = map(run_experiment, specs)
            for rec in results:
                records.append(rec)
                if writer:
                    writer.write(rec)
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                for rec in pool.map(run_experiment, specs):
                    records.append(rec)
                    if writer:
                        writer.write(rec)
    finally:
        if writer:
            writer.close()
    return records


def emit_figure_data(records: list[ResultRecord], figure: str, out) -> None:
    """Write plot-ready tabular text for one of the two figure kinds.

    ``pearson_vs_N``: one row per record with columns
    (N, V, pearson_mean, pearson_std). ``prediction_trace``: columns
    (step, target, prediction) from the first record's stored test trace.
    """
    if figure == "pearson_vs_N":
        lines = ["N\tV\tpearson_mean\tpearson_std"]
        for rec in records:
            missing = [k for k in ("order", "num_nodes") if k not in rec.spec_fields]
            if missing:
                raise SpecError(
                    f"record lacks field(s) {missing}; available: "
                    f"{', '.join(sorted(rec.spec_fields))}")
            lines.append("\t".join((
                _fmt_value(rec.spec_fields["order"]),
                _fmt_value(rec.spec_fields["num_nodes"]),
                _fmt_value(rec.pearson_mean),
                _fmt_value(rec.pearson_std),
            )))
    elif figure == "prediction_trace":
        if not records:
            raise SpecError("no records to trace")
        rec = records[0]
        if rec.trace_targets is None or rec.trace_predictions is None:
            raise SpecError("record carries no stored test trace")
        lines = ["step\ttarget\tprediction"]
        for i, (t, p) in enumerate(zip(rec.trace_targets, rec.trace_predictions)):
            lines.append(f"{i}\t{_fmt_value(float(t))}\t{_fmt_value(float(p))}")
    else:
        raise SpecError(
            f"unknown figure {figure!r}; choose pearson_vs_N or prediction_trace")
    _write_text(out, "\n".join(lines) + "\n")


def emit_pearson_table_from_file(records_path, out) -> None:
    """CLI variant of ``pearson_vs_N`` working from a results file."""
    names, rows = read_records_table(records_path)
    needed = ("order", "num_nodes", "pearson_mean", "pearson_std")
    missing = [k for k in needed if k not in names]
    if missing:
        raise SpecError(
            f"{records_path}: missing column(s) {missing}; available: "
            f"{', '.join(names)}")
    idx = [names.index(k) for k in needed]
    lines = ["N\tV\tpearson_mean\tpearson_std"]
    for row in rows:
        lines.append("\t".join(row[i] for i in idx))
    _write_text(out, "\n".join(lines) + "\n")


def read_records_table(path) -> tuple[list[str], list[list[str]]]:
    """Read a results file back: (column names, rows of strings)."""
    names: list[str] | None = None
    rows: list[list[str]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if names is None:
                names = parts
            else:
                rows.append(parts)
    if names is None:
        raise SpecError(f"{path}: no table header found")
    return names, rows


# ---------------------------------------------------------------------------
# spec files

SPEC_KEYS = {f.name for f in fields(ExperimentSpec)}

_INT_KEYS = {"schema", "order", "num_nodes", "mask_seed", "washout",
             "train_len", "test_len", "replications", "seed"}
_FLOAT_KEYS = {"alpha", "beta", "gain_c", "pulse_period", "bandwidth_time",
               "noise_sigma", "ridge_lambda"}
_BOOL_KEYS = {"compat_narma_sum", "standardize"}


def parse_spec_file(path) -> ExperimentSpec:
    """Parse the ``key = value`` spec format into an ExperimentSpec.

    Unknown keys and malformed values fail fast; the ``schema`` field is
    mandatory so old files cannot be misread silently.
    """
    values: dict = {}
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"cannot open spec {path}: {exc}") from exc
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise SpecError(f"{path}:{lineno}: expected 'key = value'")
            key, _, text = line.partition("=")
            key = key.strip()
            text = text.strip()
            if key not in SPEC_KEYS:
                raise SpecError(
                    f"{path}:{lineno}: unknown key {key!r}; known keys: "
                    f"{', '.join(sorted(SPEC_KEYS))}")
            if key in values:
                raise SpecError(f"{path}:{lineno}: duplicate key {key!r}")
            try:
                values[key] = _parse_value(key, text)
            except ValueError as exc:
                raise SpecError(f"{path}:{lineno}: {exc}") from exc
    if "schema" not in values:
        raise SpecError(f"{path}: missing mandatory 'schema' field")
    spec = ExperimentSpec(**values)
    spec.validate()
    return spec


def write_spec_file(spec: ExperimentSpec, path) -> None:
    """Inverse of :func:`parse_spec_file`."""
    lines = []
    for f in fields(spec):
        lines.append(f"{f.name} = {_fmt_value(getattr(spec, f.name))}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_value(key: str, text: str):
    if key in _INT_KEYS:
        return int(text)
    if key in _FLOAT_KEYS:
        return float(text)
    if key in _BOOL_KEYS:
        if text.lower() in ("true", "1", "yes"):
            return True
        if text.lower() in ("false", "0", "no"):
            return False
        raise ValueError(f"expected a boolean, got {text!r}")
    if key == "lambda_grid":
        if not text:
            return ()
        return tuple(float(p) for p in text.split(",") if p.strip())
    return text


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".12g")
    if isinstance(v, tuple):
        return ",".join(format(x, ".12g") for x in v)
    return str(v)


# ---------------------------------------------------------------------------
# single-replication pipeline

def _run_replication(spec: ExperimentSpec, rep: int) -> dict:
    task_seed = derive_seed(spec.seed, rep, _STREAM_TASK)
    noise_seed = derive_seed(spec.seed, rep, _STREAM_NOISE)
    mask_seed = derive_seed(spec.mask_seed, rep, _STREAM_MASK)

    ds = _build_dataset(spec, task_seed)
    needed = spec.total_len
    if ds.length < needed:
        raise SpecError(
            f"task {ds.name!r} provides {ds.length} samples but "
            f"washout+train+test needs {needed}")
    ds = ds.with_split(spec.washout + spec.train_len, spec.test_len)
    if spec.standardize:
        ds = standardize(ds)

    mask = generate_mask(spec.num_nodes, mask_seed, spec.mask_kind)
    params = spec.reservoir_params(noise_seed=noise_seed)
    states = run(ds.inputs[:needed], mask, params, washout=spec.washout)

    r_train = states[: spec.train_len]
    y_train = ds.targets[spec.washout: spec.washout + spec.train_len]
    r_test = states[spec.train_len: spec.train_len + spec.test_len]
    y_test = ds.targets[spec.washout + spec.train_len: needed]

    lam = spec.ridge_lambda
    if spec.lambda_grid:
        lam = _select_lambda(r_train, y_train, spec.lambda_grid)
    w = fit_ridge(r_train, y_train, lam)
    yhat = predict(r_test, w)
    report = evaluate(y_test, yhat)
    return {
        "pearson": report.pearson,
        "nrmse": report.nrmse,
        "ridge_lambda": lam,
        "targets": np.asarray(y_test, dtype=float),
        "predictions": yhat,
        "weights": w.weights,
    }


def _build_dataset(spec: ExperimentSpec, task_seed: int) -> TaskDataset:
    if spec.task == "narma":
        cfg = NarmaConfig(spec.order, spec.total_len, task_seed)
        return gen_narma(cfg, compat_sum=spec.compat_narma_sum)
    if spec.task == "surrogate":
        return gen_surrogate_laser(max(100, spec.total_len), task_seed)
    return load_csv_task(spec.csv_input, spec.csv_target)


def _select_lambda(r_train, y_train, grid) -> float:
    """Grid search on a held-out slice: fit on the first 80% of the
    training rows, score NRMSE on the last 20%, keep the best (ties go to
    the earlier grid entry)."""
    n = r_train.shape[0]
    n_fit = max(1, min(n - 1, int(0.8 * n)))
    best_lam, best_err = None, None
    for lam in grid:
        w = fit_ridge(r_train[:n_fit], y_train[:n_fit], lam)
        err = nrmse(y_train[n_fit:], predict(r_train[n_fit:], w))
        if best_err is None or err < best_err:
            best_lam, best_err = lam, err
    return float(best_lam)


def _spread(values) -> float:
    if len(values) <= 1:
        return 0.0
    return float(np.std(values, ddof=1))


# ---------------------------------------------------------------------------
# results files

_RECORD_COLUMNS = (
    "task", "order", "compat_narma_sum", "csv_input", "csv_target",
    "standardize", "num_nodes", "alpha", "beta", "gain_c", "pulse_period",
    "bandwidth_time", "noise_sigma", "mask_kind", "mask_seed", "washout",
    "train_len", "test_len", "ridge_lambda", "lambda_grid", "replications",
    "seed", "spec_hash", "pearson_mean", "pearson_std", "nrmse_mean",
    "nrmse_std", "pearson_reps", "nrmse_reps", "lambda_reps",
)


class _RecordWriter:
    """Streams records to a results file in completion order.

    Everything written is a pure function of the spec (no timestamps and
    no durations), so a rerun produces a byte-identical file.
    """

    def __init__(self, path, base: ExperimentSpec, axes) -> None:
        self._fh = open(path, "w", encoding="utf-8")
        self._fh.write("# pulserc results\n")
        self._fh.write(f"# schema = {SCHEMA_VERSION}\n")
        for key, value in base.to_dict().items():
            self._fh.write(f"# spec: {key} = {_fmt_value(value)}\n")
        for name, values in axes:
            joined = ",".join(_fmt_value(v) for v in values)
            self._fh.write(f"# axis: {name} = {joined}\n")
        self._fh.write("\t".join(_RECORD_COLUMNS) + "\n")

    def write(self, rec: ResultRecord) -> None:
        self._fh.write(format_record_row(rec) + "\n")
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()


def format_record_row(rec: ResultRecord) -> str:
    cells = []
    for col in _RECORD_COLUMNS:
        if col in rec.spec_fields:
            cells.append(_fmt_value(rec.spec_fields[col]))
        elif col == "spec_hash":
            cells.append(rec.spec_hash)
        elif col in ("pearson_mean", "pearson_std", "nrmse_mean", "nrmse_std"):
            cells.append(_fmt_value(getattr(rec, col)))
        elif col == "pearson_reps":
            cells.append(";".join(_fmt_value(v) for v in rec.pearson_reps))
        elif col == "nrmse_reps":
            cells.append(";".join(_fmt_value(v) for v in rec.nrmse_reps))
        elif col == "lambda_reps":
            cells.append(";".join(_fmt_value(v) for v in rec.lambda_reps))
        else:
            raise SpecError(f"unmapped record column {col!r}")
    return "\t".join(cells)


def write_records(path, base: ExperimentSpec, axes, records) -> None:
    """Write a complete results file in one go."""
    writer = _RecordWriter(path, base, axes)
    try:
        for rec in records:
            writer.write(rec)
    finally:
        writer.close()


def _coerce_field(base: ExperimentSpec, name: str, value):
    current = getattr(base, name)
    if isinstance(current, bool):
        raise SpecError(f"field {name!r} is not sweepable")
    if isinstance(current, int):
        as_int = int(round(float(value)))
        if abs(float(value) - as_int) > 1e-9:
            raise SpecError(f"field {name!r} needs an integer, got {value!r}")
        return as_int
    if isinstance(current, float):
        return float(value)
    raise SpecError(f"field {name!r} is not numeric")


def _write_text(out, text: str) -> None:
    if hasattr(out, "write"):
        out.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")
