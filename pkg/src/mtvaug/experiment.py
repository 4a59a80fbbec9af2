"""Multi-seed runs, strength x weighting sweeps and report files.

A sweep trains one no-augmentation baseline plus one run per
``(operator, alpha, gamma_o)`` cell, each over the same seed list, and
reports accuracy boosts in percentage points over the baseline.

Report files written by :func:`emit_report`:

``runs.csv``
    ``operator,alpha,gamma_o,seed,accuracy,baseline_accuracy,boost_pp``, one
    row per cell and seed. Baseline rows use operator ``none``, alpha 0 and
    gamma_o 1. ``baseline_accuracy`` is the baseline for the same seed.
``summary.json``
    Per operator: best alpha and its boost under the traditional
    (gamma_o = 0) and MTV (gamma_o = 0.5) weightings, and their difference.
``curves.csv``
    ``operator,alpha,framework,mean_boost_pp`` for boost-vs-alpha lines.
``heatmap.csv``
    gamma_o rows by alpha columns of the boost averaged over operators.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from .augment import AugmentationConfig, Operator
from .classifier import DEFAULT_DIM, MixWeights, TrainConfig, evaluate, train_mtv
from .errors import (EmptyDataset, EmptyInput, InvalidGrid, MalformedLine, MissingBaseline,
                     MissingLexicon, SchemaError)
from .rng import hash64, mix64
from .textcore import Dataset, tokenize

DEFAULT_ALPHAS = (0.05, 0.1, 0.2, 0.3, 0.4, 0.5)
DEFAULT_GAMMAS = (0.0, 0.5)
FULL_GAMMAS = tuple(i / 10 for i in range(11))

# Desk-scale training for sweeps on the synthetic corpus. The library
# defaults target long runs; unit-norm sparse rows need a large step to learn
# much in a handful of epochs.
DESK_TRAIN = TrainConfig(epochs=5, learning_rate=4.0)
DESK_DIM = 1 << 12
TRADITIONAL_GAMMA = 0.0
MTV_GAMMA = 0.5

RUNS_HEADER = ("operator", "alpha", "gamma_o", "seed", "accuracy", "baseline_accuracy",
               "boost_pp")
CURVES_HEADER = ("operator", "alpha", "framework", "mean_boost_pp")
BASELINE_NAME = "none"

CellKey = tuple  # (Operator | None, alpha, gamma_o)


def read_pairs(path: str | Path) -> list[tuple[str, str]]:
    """``(label, text)`` pairs from ``label<TAB>text`` lines.

    Blank lines are skipped. The text may itself contain tabs; only the
    first one separates the label.
    """
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            if "\t" not in line:
                raise MalformedLine(lineno, "expected label<TAB>text")
            label, text = line.split("\t", 1)
            if not label.strip():
                raise MalformedLine(lineno, "empty label")
            try:
                tokenize(text)
            except EmptyInput:
                raise MalformedLine(lineno, "empty text") from None
            pairs.append((label.strip(), text))
    return pairs


def load_dataset(path: str | Path, label_names: Sequence[str] | None = None) -> Dataset:
    """Read a dataset TSV; label ids follow first appearance unless
    ``label_names`` fixes them (use the training labels for a test file)."""
    pairs = read_pairs(path)
    if not pairs:
        raise EmptyDataset(f"{path}: no examples")
    return Dataset.from_pairs(pairs, label_names)


@dataclass(frozen=True)
class RunSpec:
    operator: Operator | None
    alpha: float
    gamma_o: float
    seeds: tuple[int, ...]
    train_cfg: TrainConfig = field(default_factory=TrainConfig)
    dim: int = DEFAULT_DIM

    def __post_init__(self):
        if self.operator is not None:
            object.__setattr__(self, "operator", Operator(self.operator))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        if not self.seeds or len(set(self.seeds)) != len(self.seeds):
            raise ValueError("seeds must be non-empty and distinct")
        if not 0.0 <= self.alpha <= 1.0 or not 0.0 <= self.gamma_o <= 1.0:
            raise ValueError("alpha and gamma_o must lie in [0, 1]")

    @property
    def key(self) -> CellKey:
        return (self.operator, self.alpha, self.gamma_o)

    @classmethod
    def baseline(cls, seeds, train_cfg=None, dim=DEFAULT_DIM) -> "RunSpec":
        return cls(None, 0.0, 1.0, seeds, train_cfg or TrainConfig(), dim)


@dataclass(frozen=True)
class RunResult:
    operator: Operator | None
    alpha: float
    gamma_o: float
    seeds: tuple[int, ...]
    per_seed_accuracy: tuple[float, ...]
    spec: RunSpec | None = None

    @property
    def key(self) -> CellKey:
        return (self.operator, self.alpha, self.gamma_o)

    @property
    def mean_accuracy(self) -> float:
        return sum(self.per_seed_accuracy) / len(self.per_seed_accuracy)


def _millis(x: float) -> int:
    return int(round(x * 1000))


def cell_tag(operator: Operator | None, alpha: float, gamma_o: float) -> int:
    """Stable 64-bit hash of a cell key (alpha and gamma_o in fixed-point millis)."""
    name = operator.value if operator is not None else BASELINE_NAME
    return hash64(f"{name}|{_millis(alpha)}|{_millis(gamma_o)}")


def run(spec: RunSpec, train: Dataset, test: Dataset,
        lexicon: Mapping[str, Sequence[str]] | None = None) -> RunResult:
    """Train and evaluate once per seed.

    The order stream of each run is seeded by the seed alone, so the
    ``gamma_o = 1`` and ``alpha = 0`` cells reproduce the baseline exactly.
    The augmentation stream is seeded by ``mix64(seed, cell_tag(...))``.
    """
    op = spec.operator
    if op is not None and op.needs_lexicon and not lexicon:
        raise MissingLexicon(f"operator {op.value!r} needs a synonym lexicon")
    aug = AugmentationConfig(op, spec.alpha) if op is not None else None
    weights = MixWeights(spec.gamma_o) if op is not None else MixWeights.vanilla()
    tag = cell_tag(*spec.key)
    accuracies = []
    for seed in spec.seeds:
        cfg = replace(spec.train_cfg, seed=seed)
        model = train_mtv(train, cfg, aug, lexicon, weights, spec.dim,
                          aug_seed=mix64(seed, tag))
        accuracies.append(evaluate(model, test))
    return RunResult(op, spec.alpha, spec.gamma_o, spec.seeds, tuple(accuracies), spec)


def compute_boost(mean_accuracy: float, baseline_accuracy: float) -> float:
    """Accuracy difference in percentage points."""
    return 100.0 * (mean_accuracy - baseline_accuracy)


def average_boost(per_dataset_boosts: Sequence[float]) -> float:
    if not per_dataset_boosts:
        raise ValueError("no boosts to average")
    return sum(per_dataset_boosts) / len(per_dataset_boosts)


def _sort_key(key: CellKey):
    op, alpha, gamma = key
    return (list(Operator).index(op), alpha, gamma)


@dataclass
class SweepResult:
    baseline: RunResult
    cells: dict[CellKey, RunResult]

    @property
    def boosts(self) -> dict[CellKey, float]:
        base = self.baseline.mean_accuracy
        return {k: compute_boost(r.mean_accuracy, base) for k, r in self.cells.items()}

    @property
    def operators(self) -> list[Operator]:
        return [op for op in Operator if any(k[0] is op for k in self.cells)]

    @property
    def alphas(self) -> list[float]:
        return sorted({k[1] for k in self.cells})

    @property
    def gammas(self) -> list[float]:
        return sorted({k[2] for k in self.cells})

    def best(self, operator: Operator, gamma_o: float) -> tuple[float, float] | None:
        """``(alpha, boost)`` with the highest boost on one row; ties go to the smaller alpha."""
        boosts = self.boosts
        row = [(a, boosts[(operator, a, gamma_o)]) for a in self.alphas
               if (operator, a, gamma_o) in boosts]
        if not row:
            return None
        return max(row, key=lambda ab: (ab[1], -ab[0]))

    def summary(self) -> dict:
        out = {}
        for op in self.operators:
            trad = self.best(op, TRADITIONAL_GAMMA)
            mtv = self.best(op, MTV_GAMMA)
            out[op.value] = {
                "best_alpha_traditional": trad[0] if trad else None,
                "boost_traditional": _round1(trad[1]) if trad else None,
                "best_alpha_mtv": mtv[0] if mtv else None,
                "boost_mtv": _round1(mtv[1]) if mtv else None,
                "delta_mtv": _round1(mtv[1] - trad[1]) if trad and mtv else None,
            }
        return out

    def curves(self) -> list[tuple[str, float, str, float]]:
        boosts = self.boosts
        rows = []
        for op in self.operators:
            for alpha in self.alphas:
                for framework, gamma in (("traditional", TRADITIONAL_GAMMA), ("mtv", MTV_GAMMA)):
                    if (op, alpha, gamma) in boosts:
                        rows.append((op.value, alpha, framework, boosts[(op, alpha, gamma)]))
        return rows

    def heatmap(self) -> list[list[float]]:
        """Boost averaged over operators, ``gammas`` rows by ``alphas`` columns."""
        boosts = self.boosts
        grid = []
        for gamma in self.gammas:
            row = []
            for alpha in self.alphas:
                vals = [boosts[(op, alpha, gamma)] for op in self.operators
                        if (op, alpha, gamma) in boosts]
                row.append(average_boost(vals) if vals else math.nan)
            grid.append(row)
        return grid


def _round1(x: float) -> float:
    return round(x, 1) + 0.0  # + 0.0 turns -0.0 into 0.0


# Worker-process state for parallel sweeps.
_shared: dict = {}


def _init_worker(train, test, lexicon):
    _shared.update(train=train, test=test, lexicon=lexicon)


def _run_shared(spec: RunSpec) -> RunResult:
    return run(spec, _shared["train"], _shared["test"], _shared["lexicon"])


def sweep_specs(base: RunSpec, alphas: Sequence[float], gammas: Sequence[float],
                operators: Sequence[Operator]) -> list[RunSpec]:
    """All cell specs in canonical order (operator, alpha, gamma_o)."""
    if not alphas or not gammas or not operators:
        raise InvalidGrid("alpha, gamma and operator grids must be non-empty")
    for name, grid in (("alpha", alphas), ("gamma", gammas)):
        if len(set(grid)) != len(grid):
            raise InvalidGrid(f"duplicate values in the {name} grid")
        if any(not 0.0 <= v <= 1.0 for v in grid):
            raise InvalidGrid(f"{name} values must lie in [0, 1]")
    ops = [Operator(o) for o in operators]
    if len(set(ops)) != len(ops):
        raise InvalidGrid("duplicate operators")
    specs = [replace(base, operator=op, alpha=float(a), gamma_o=float(g))
             for op in ops for a in sorted(alphas) for g in sorted(gammas)]
    return sorted(specs, key=lambda s: _sort_key(s.key))


def sweep(base: RunSpec, alphas: Sequence[float], gammas: Sequence[float],
          operators: Sequence[Operator], train: Dataset, test: Dataset,
          lexicon: Mapping[str, Sequence[str]] | None = None, *, jobs: int = 1,
          completed: Mapping[CellKey, RunResult] | None = None,
          on_cell: Callable[[RunResult, RunResult], None] | None = None) -> SweepResult:
    """Run the baseline and every grid cell.

    ``completed`` holds results to reuse by key (resuming an interrupted
    sweep). ``on_cell(result, baseline)`` fires after the baseline and after
    each cell, in completion order. Results never depend on ``jobs``.
    """
    specs = sweep_specs(base, alphas, gammas, operators)
    if any(s.operator.needs_lexicon for s in specs) and not lexicon:
        raise MissingLexicon("substitution and injection need a synonym lexicon")
    completed = dict(completed or {})
    base_spec = RunSpec.baseline(base.seeds, base.train_cfg, base.dim)
    baseline = completed.get(base_spec.key)
    if baseline is None or baseline.seeds != base.seeds:
        baseline = run(base_spec, train, test, lexicon)
    if on_cell:
        on_cell(baseline, baseline)

    cells: dict[CellKey, RunResult] = {}
    todo = []
    for spec in specs:
        done = completed.get(spec.key)
        if done is not None and done.seeds == spec.seeds:
            cells[spec.key] = done
            if on_cell:
                on_cell(done, baseline)
        else:
            todo.append(spec)

    if jobs > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker,
                                 initargs=(train, test, lexicon)) as pool:
            for result in pool.map(_run_shared, todo):
                cells[result.key] = result
                if on_cell:
                    on_cell(result, baseline)
    else:
        for spec in todo:
            result = run(spec, train, test, lexicon)
            cells[result.key] = result
            if on_cell:
                on_cell(result, baseline)
    ordered = {s.key: cells[s.key] for s in specs}
    return SweepResult(baseline, ordered)


# ---------------------------------------------------------------- report files

def _fmt(x: float) -> str:
    return repr(float(x))


def run_rows(result: RunResult, baseline: RunResult) -> list[list[str]]:
    """runs.csv rows for one cell, paired with the baseline seed by seed."""
    base_by_seed = dict(zip(baseline.seeds, baseline.per_seed_accuracy))
    name = result.operator.value if result.operator is not None else BASELINE_NAME
    rows = []
    for seed, acc in zip(result.seeds, result.per_seed_accuracy):
        base = base_by_seed[seed]
        rows.append([name, _fmt(result.alpha), _fmt(result.gamma_o), str(seed), _fmt(acc),
                     _fmt(base), _fmt(compute_boost(acc, base))])
    return rows


def _csv_text(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def runs_csv(result: SweepResult) -> str:
    rows = run_rows(result.baseline, result.baseline)
    for cell in result.cells.values():
        rows += run_rows(cell, result.baseline)
    return _csv_text(RUNS_HEADER, rows)


def emit_report(result: SweepResult, out_dir: str | Path, *,
                include_runs: bool = True) -> dict[str, Path]:
    """Write the report files; output bytes depend only on ``result``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    if include_runs:
        paths["runs"] = _write(out / "runs.csv", runs_csv(result))
    paths["summary"] = _write(out / "summary.json",
                              json.dumps(result.summary(), indent=2) + "\n")
    curves = [(op, _fmt(a), fw, _fmt(b)) for op, a, fw, b in result.curves()]
    paths["curves"] = _write(out / "curves.csv", _csv_text(CURVES_HEADER, curves))
    heat_header = ["gamma_o\\alpha"] + [_fmt(a) for a in result.alphas]
    heat_rows = [[_fmt(g)] + [_fmt(v) for v in row]
                 for g, row in zip(result.gammas, result.heatmap())]
    paths["heatmap"] = _write(out / "heatmap.csv", _csv_text(heat_header, heat_rows))
    return paths


def _write(path: Path, text: str) -> Path:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)
    return path


def read_runs(path: str | Path, *, allow_partial: bool = False) -> SweepResult | dict:
    """Parse runs.csv back into a :class:`SweepResult`.

    With ``allow_partial`` the file may be an interrupted sweep: an
    unterminated trailing line is ignored and the raw ``{key: RunResult}`` map is returned
    (baseline included under its key) instead of a SweepResult.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    if allow_partial and not text.endswith("\n"):
        # an unterminated last row may be torn even if it parses
        text = text[:text.rfind("\n") + 1]
    reader = csv.reader(text.split("\n"))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError(f"{path}: empty file") from None
    if tuple(header) != RUNS_HEADER:
        raise SchemaError(f"{path}: expected header {','.join(RUNS_HEADER)}")
    grouped: dict[CellKey, tuple[list[int], list[float]]] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            if len(row) != len(RUNS_HEADER):
                raise ValueError("wrong field count")
            name, alpha, gamma, seed, acc = row[0], float(row[1]), float(row[2]), int(row[3]), float(row[4])
            op = None if name == BASELINE_NAME else Operator(name)
        except ValueError as exc:
            raise SchemaError(f"{path}: line {lineno}: {exc}") from None
        seeds, accs = grouped.setdefault((op, alpha, gamma), ([], []))
        seeds.append(seed)
        accs.append(acc)
    results = {key: RunResult(*key, tuple(seeds), tuple(accs))
               for key, (seeds, accs) in grouped.items()}
    if allow_partial:
        return results
    base_key = (None, 0.0, 1.0)
    baseline = results.pop(base_key, None)
    if baseline is None:
        raise MissingBaseline(f"{path}: no baseline rows (operator={BASELINE_NAME})")
    for key, res in results.items():
        if res.seeds != baseline.seeds:
            raise SchemaError(f"{path}: cell {key} seeds differ from the baseline seeds")
    ordered = dict(sorted(results.items(), key=lambda kv: _sort_key(kv[0])))
    return SweepResult(baseline, ordered)


def report_from_runs(runs_path: str | Path, out_dir: str | Path) -> dict[str, Path]:
    """Regenerate summary, curves and heatmap from an existing runs.csv."""
    return emit_report(read_runs(runs_path), out_dir, include_runs=False)

