import csv
import json
import math

import pytest

from mtvaug.augment import Operator
from mtvaug.classifier import TrainConfig
from mtvaug.errors import (EmptyDataset, InvalidGrid, MalformedLine, MissingBaseline,
                           MissingLexicon, SchemaError, SingleClassDataset)
from mtvaug.experiment import (FULL_GAMMAS, RUNS_HEADER, RunResult, RunSpec, SweepResult,
                               average_boost, cell_tag, compute_boost, emit_report, load_dataset,
                               read_runs, report_from_runs, run, runs_csv, sweep)

TRAIN = TrainConfig(epochs=2, learning_rate=2.0)
DIM = 512


def test_load_dataset(tmp_path):
    path = tmp_path / "d.tsv"
    path.write_text("pos\tgreat movie\nneg\tawful plot\n")
    ds = load_dataset(path)
    assert len(ds) == 2 and ds.label_names == ("pos", "neg")
    path.write_text("pos\tgreat\npos\tfine\n")
    with pytest.raises(SingleClassDataset):
        load_dataset(path)
    path.write_text("pos\tgreat\nno tab here\n")
    with pytest.raises(MalformedLine, match="line 2"):
        load_dataset(path)
    path.write_text("\n\n")
    with pytest.raises(EmptyDataset):
        load_dataset(path)
    test = tmp_path / "t.tsv"
    test.write_text("neg\tbad\npos\tgood\n")
    assert load_dataset(test, ("pos", "neg")).labels == [1, 0]


def test_run_spec_validation():
    with pytest.raises(ValueError):
        RunSpec(None, 0, 1, ())
    with pytest.raises(ValueError):
        RunSpec(None, 0, 1, (1, 1))
    with pytest.raises(ValueError):
        RunSpec("dropout", 1.5, 0.5, (1,))


def test_mean_accuracy():
    r = RunResult(None, 0, 1, (1, 2, 3, 4, 5), (0.84, 0.85, 0.86, 0.84, 0.85))
    assert abs(r.mean_accuracy - 0.848) < 1e-12


def test_boost_arithmetic():
    assert compute_boost(0.866, 0.845) == pytest.approx(2.1)
    assert compute_boost(0.7, 0.7) == 0.0
    assert compute_boost(0.82, 0.845) == pytest.approx(-2.5)
    assert average_boost([1.0, 0.0, 5.3]) == pytest.approx(2.1)
    assert average_boost([4.2]) == 4.2
    assert average_boost([1.1, 1.2, 2.9]) == pytest.approx(1.7333333333)
    with pytest.raises(ValueError):
        average_boost([])


def test_cell_tag_stable():
    assert cell_tag(Operator.DROPOUT, 0.1, 0.5) == cell_tag(Operator.DROPOUT, 0.1000000001, 0.5)
    assert cell_tag(Operator.DROPOUT, 0.1, 0.5) != cell_tag(Operator.SHUFFLING, 0.1, 0.5)


def test_run_equivalences(small_corpus):
    c = small_corpus
    base = RunSpec.baseline((0, 1), TRAIN, DIM)
    r1 = run(base, c.train, c.test, c.lexicon)
    assert r1 == run(base, c.train, c.test, c.lexicon)
    vanilla = RunSpec("substitution", 0.3, 1.0, (0, 1), TRAIN, DIM)
    assert run(vanilla, c.train, c.test, c.lexicon).per_seed_accuracy == r1.per_seed_accuracy
    reversed_seeds = run(RunSpec.baseline((1, 0), TRAIN, DIM), c.train, c.test)
    assert reversed_seeds.per_seed_accuracy == r1.per_seed_accuracy[::-1]
    with pytest.raises(MissingLexicon):
        run(RunSpec("injection", 0.3, 0.5, (0,), TRAIN, DIM), c.train, c.test, None)


@pytest.fixture(scope="module")
def swept(small_corpus):
    c = small_corpus
    base = RunSpec(None, 0, 1, (0, 1), TRAIN, DIM)
    return sweep(base, [0.0, 0.2, 0.5], [0.0, 0.5, 1.0], list(Operator), c.train, c.test,
                 c.lexicon)


def test_sweep_shape_and_identities(swept):
    assert len(swept.cells) == 4 * 3 * 3
    for (op, alpha, gamma), boost in swept.boosts.items():
        if gamma == 1.0 or alpha == 0.0:
            assert boost == 0.0
        res = swept.cells[(op, alpha, gamma)]
        assert abs(boost - 100 * (res.mean_accuracy - swept.baseline.mean_accuracy)) < 1e-9


def test_sweep_order_independence(small_corpus, swept):
    c = small_corpus
    base = RunSpec(None, 0, 1, (0, 1), TRAIN, DIM)
    part = sweep(base, [0.5], [0.5], [Operator.SHUFFLING, Operator.DROPOUT], c.train, c.test,
                 c.lexicon)
    for key, res in part.cells.items():
        assert res.per_seed_accuracy == swept.cells[key].per_seed_accuracy


def test_sweep_rejects_bad_grids(small_corpus):
    c = small_corpus
    base = RunSpec(None, 0, 1, (0,), TRAIN, DIM)
    for alphas, gammas, ops in [([], [0.5], ["dropout"]), ([0.1], [], ["dropout"]),
                                ([0.1], [0.5], []), ([0.1, 0.1], [0.5], ["dropout"])]:
        with pytest.raises(InvalidGrid):
            sweep(base, alphas, gammas, ops, c.train, c.test, c.lexicon)


def test_report_files(swept, tmp_path):
    paths = emit_report(swept, tmp_path)
    rows = list(csv.reader(open(paths["runs"])))
    assert tuple(rows[0]) == RUNS_HEADER and len(rows) == 1 + 2 * (1 + 36)
    for row in rows[1:]:
        acc, base, boost = float(row[4]), float(row[5]), float(row[6])
        assert abs(boost - 100 * (acc - base)) < 1e-9
    summary = json.loads(open(paths["summary"]).read())
    assert set(summary) == {op.value for op in Operator}
    for op, entry in summary.items():
        trad = max(swept.boosts[(Operator(op), a, 0.0)] for a in swept.alphas)
        mtv = max(swept.boosts[(Operator(op), a, 0.5)] for a in swept.alphas)
        assert entry["delta_mtv"] == round(mtv - trad, 1) + 0.0
    heat = list(csv.reader(open(paths["heatmap"])))
    assert len(heat) == 1 + 3 and all(len(r) == 1 + 3 for r in heat)
    curves = list(csv.reader(open(paths["curves"])))
    assert curves[0] == ["operator", "alpha", "framework", "mean_boost_pp"]
    assert len(curves) == 1 + 4 * 3 * 2
    first = open(paths["summary"], "rb").read()
    emit_report(swept, tmp_path)
    assert open(paths["summary"], "rb").read() == first


def test_report_round_trip(swept, tmp_path):
    emit_report(swept, tmp_path / "a")
    report_from_runs(tmp_path / "a" / "runs.csv", tmp_path / "b")
    for name in ("summary.json", "curves.csv", "heatmap.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    again = read_runs(tmp_path / "a" / "runs.csv")
    assert runs_csv(again) == runs_csv(swept)


def test_read_runs_errors(tmp_path):
    path = tmp_path / "runs.csv"
    path.write_text("operator,alpha\nnone,0\n")
    with pytest.raises(SchemaError):
        read_runs(path)
    path.write_text(",".join(RUNS_HEADER) + "\ndropout,0.1,0.5,0,0.8,0.8,0.0\n")
    with pytest.raises(MissingBaseline):
        read_runs(path)


def _hand_result(trad_accs, mtv_accs, gammas=(0.0, 0.5), alphas=(0.05, 0.3)):
    seeds = (0, 1)
    baseline = RunResult(None, 0.0, 1.0, seeds, (0.845, 0.845))
    cells = {}
    for ai, alpha in enumerate(alphas):
        for gamma in gammas:
            acc = {0.0: trad_accs[ai], 0.5: mtv_accs[ai]}.get(gamma, 0.845)
            key = (Operator.SUBSTITUTION, alpha, gamma)
            cells[key] = RunResult(*key, seeds, (acc, acc))
    return SweepResult(baseline, cells)


def test_summary_arithmetic():
    result = _hand_result([0.858, 0.850], [0.855, 0.866])
    entry = result.summary()["substitution"]
    assert entry == {"best_alpha_traditional": 0.05, "boost_traditional": 1.3,
                     "best_alpha_mtv": 0.3, "boost_mtv": 2.1, "delta_mtv": 0.8}


def test_heatmap_shape():
    alphas = (0.05, 0.1, 0.2, 0.3, 0.4, 0.5)
    result = _hand_result([0.85] * 6, [0.85] * 6, gammas=FULL_GAMMAS, alphas=alphas)
    grid = result.heatmap()
    assert len(grid) == 11 and all(len(row) == 6 for row in grid)
    assert not any(math.isnan(v) for row in grid for v in row)
