"""Paired experiment harness.

Every compared algorithm sees, for a given ``(instance, run)`` pair, the
same dataset, the same initial partition and the same permutation stream,
so Hartigan and Smartigan differ only in their acceptance multiplier.

Seed layout (all labels are integer tuples passed to
:meth:`RandomStream.derive` on the master stream)::

    dataset instance   (0, d, n, k_true, instance)    synthetic sources only
    run                (1, n, k, instance, run)
      initialization     run.derive((0,))
      permutations       run.derive((1,))

None of the labels mention the algorithm, which is what makes the
streams shared.  Every job is a pure function of its labels, so results do
not depend on the worker count.
"""

from __future__ import annotations

import configparser
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .algorithms import EMPTY_POLICIES, LocalSearchConfig, run_lloyd, run_local_search
from .core import ContractError, Dataset, RunReport, ScheduleSpec
from .dataio import DatasetManifest, ReportRow, builtin_manifest, load_dataset
from .init import INIT_KINDS, InitSpec, initialize
from .metrics import nmi, percent_difference
from .rng import RandomStream
from .synth import REGIMES, MixtureSpec, generate

__all__ = [
    "ALGORITHMS",
    "SyntheticGrid",
    "ExperimentSpec",
    "RunRecord",
    "AlgorithmStats",
    "PairedComparison",
    "RunError",
    "run_experiment",
    "replay_run",
    "load_experiment",
    "parse_experiment",
]

ALGORITHMS = ("lloyd", "hartigan", "smartigan", "smartigan_star")
BASELINE = "hartigan"
TIE_RTOL = 1e-9


class RunError(RuntimeError):
    """An individual run failed; carries the coordinates needed to replay it."""

    def __init__(self, instance, run, seed, cause):
        super().__init__(f"run failed at instance={instance} run={run} seed={seed}: {cause!r}")
        self.instance, self.run, self.seed = instance, run, seed


@dataclass(frozen=True)
class SyntheticGrid:
    """Gaussian-mixture source; one cell per ``(n, k)`` combination.

    ``k_true=None`` generates as many components as clusters are fitted.
    """

    regime: str
    d: int
    n_values: tuple
    k_true: Optional[int] = None

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ContractError(f"unknown regime {self.regime!r}")
        object.__setattr__(self, "n_values", tuple(int(v) for v in self.n_values))


@dataclass(frozen=True)
class ExperimentSpec:
    source: Union[str, DatasetManifest, SyntheticGrid]
    k_values: tuple
    algorithms: tuple = ("hartigan", "smartigan")
    init: str = "random_assignment"
    runs_per_instance: int = 20
    instances: int = 1
    master_seed: int = 0
    n_iter: int = 100
    finish_with_hartigan: bool = True
    lloyd_empty: str = "reseed"
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "k_values", tuple(int(k) for k in self.k_values))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad or not self.algorithms:
            raise ContractError(f"algorithms must be a non-empty subset of {ALGORITHMS}, got {bad}")
        if self.init not in INIT_KINDS:
            raise ContractError(f"unknown init {self.init!r}")
        if self.runs_per_instance < 1 or self.instances < 1:
            raise ContractError("runs_per_instance and instances must be >= 1")
        if not isinstance(self.source, SyntheticGrid) and self.instances != 1:
            raise ContractError("a fixed dataset has exactly one instance")
        if self.n_iter < 0:
            raise ContractError("n_iter must be >= 0")
        if self.lloyd_empty not in EMPTY_POLICIES:
            raise ContractError(f"lloyd_empty must be one of {EMPTY_POLICIES}")
        if not self.k_values:
            raise ContractError("k_values must not be empty")

    @property
    def synthetic(self) -> bool:
        return isinstance(self.source, SyntheticGrid)

    def manifest(self) -> DatasetManifest:
        if isinstance(self.source, DatasetManifest):
            return self.source
        return builtin_manifest(self.source)

    def cells(self, n_real: Optional[int] = None) -> list:
        """``(n, k)`` pairs in report order."""
        if self.synthetic:
            return [(n, k) for n in self.source.n_values for k in self.k_values]
        return [(n_real, k) for k in self.k_values]


@dataclass
class RunRecord:
    instance: int
    run: int
    seed: int
    algorithm: str
    initial_loss: float
    final_loss: float
    nmi: Optional[float]
    iterations: int
    finish_iterations: int
    converged: bool
    first_epoch_moves: int
    wall_time: float


@dataclass
class AlgorithmStats:
    mean_loss: float
    std_loss: float
    min_loss: float
    mean_nmi: Optional[float]
    pct_vs_baseline: Optional[float]
    wins: int = 0
    ties: int = 0
    losses: int = 0
    instance_means: list = field(default_factory=list)
    instance_medians: list = field(default_factory=list)


@dataclass
class PairedComparison:
    """Aggregated outcome of one ``(dataset or n, k)`` cell."""

    dataset: str
    n: int
    d: int
    k: int
    instances: int
    runs_per_instance: int
    master_seed: int
    algorithms: tuple
    stats: dict
    records: list

    def report_rows(self) -> list:
        return [
            ReportRow(
                self.dataset, a, self.k, self.instances * self.runs_per_instance,
                s.mean_loss, s.std_loss, s.min_loss, s.mean_nmi, s.pct_vs_baseline,
            )
            for a, s in self.stats.items()
        ]

    def record(self, instance: int, run: int, algorithm: str) -> RunRecord:
        for r in self.records:
            if (r.instance, r.run, r.algorithm) == (instance, run, algorithm):
                return r
        raise KeyError((instance, run, algorithm))

    def losses(self, algorithm: str) -> np.ndarray:
        return np.array([r.final_loss for r in self.records if r.algorithm == algorithm])


def _dataset_for(spec: ExperimentSpec, root: RandomStream, n: int, k: int, instance: int, real: Optional[Dataset]):
    if not spec.synthetic:
        return real
    g = spec.source
    k_true = g.k_true if g.k_true is not None else k
    mix = MixtureSpec(g.regime, g.d, k_true, n)
    return generate(mix, root.derive((0, g.d, n, k_true, instance)))


def _run_one(spec: ExperimentSpec, algorithm: str, data: Dataset, initial, perm_stream: RandomStream) -> RunReport:
    if algorithm == "lloyd":
        state, rep = run_lloyd(data, initial, spec.n_iter, empty=spec.lloyd_empty)
    else:
        if algorithm == "hartigan":
            cfg = LocalSearchConfig(ScheduleSpec.hartigan(spec.n_iter))
        else:
            finish = True if algorithm == "smartigan_star" else spec.finish_with_hartigan
            cfg = LocalSearchConfig(ScheduleSpec.smartigan(spec.n_iter), finish)
        state, rep = run_local_search(data, initial, cfg, perm_stream)
        rep.algorithm = algorithm
    if data.labels is not None:
        rep.nmi = nmi(state.assignment, data.labels)
    return rep


def _run_pair(spec: ExperimentSpec, root: RandomStream, data: Dataset, n: int, k: int, instance: int, run: int) -> dict:
    run_stream = root.derive((1, n, k, instance, run))
    seed = run_stream.key
    try:
        initial = initialize(data, InitSpec(spec.init, k), run_stream.derive((0,)))
        out = {}
        for a in spec.algorithms:
            rep = _run_one(spec, a, data, initial, run_stream.derive((1,)))
            rep.seed = seed
            out[a] = rep
        return out
    except Exception as exc:
        raise RunError(instance, run, seed, exc) from exc


def _job(spec, root, real, n, k, instance):
    data = _dataset_for(spec, root, n, k, instance, real)
    recs = []
    for run in range(spec.runs_per_instance):
        for a, rep in _run_pair(spec, root, data, n, k, instance, run).items():
            recs.append(
                RunRecord(
                    instance, run, rep.seed, a, rep.initial_loss, rep.final_loss, rep.nmi,
                    rep.iterations_used, rep.finish_iterations, rep.converged,
                    rep.moves_trace[0] if rep.moves_trace else 0, rep.wall_time,
                )
            )
    return data, recs


def _aggregate(spec: ExperimentSpec, name: str, n: int, d: int, k: int, records: list) -> PairedComparison:
    stats = {}
    by_alg = {a: [r for r in records if r.algorithm == a] for a in spec.algorithms}

    def inst_means(a):
        return [
            float(np.mean([r.final_loss for r in by_alg[a] if r.instance == i]))
            for i in range(spec.instances)
        ]

    base = inst_means(BASELINE) if BASELINE in by_alg else None
    base_runs = {(r.instance, r.run): r.final_loss for r in by_alg.get(BASELINE, [])}
    for a, recs in by_alg.items():
        losses = np.array([r.final_loss for r in recs])
        means = inst_means(a)
        medians = [
            float(np.median([r.final_loss for r in recs if r.instance == i]))
            for i in range(spec.instances)
        ]
        nmis = [r.nmi for r in recs if r.nmi is not None]
        pct = None
        wins = ties = lost = 0
        if base is not None:
            pct = float(np.mean([percent_difference(b, m) for b, m in zip(base, means)]))
            for r in recs:
                b = base_runs[(r.instance, r.run)]
                if abs(r.final_loss - b) <= TIE_RTOL * max(abs(b), 1e-300):
                    ties += 1
                elif r.final_loss < b:
                    wins += 1
                else:
                    lost += 1
        stats[a] = AlgorithmStats(
            mean_loss=float(np.mean(means)),
            std_loss=float(losses.std()),
            min_loss=float(losses.min()),
            mean_nmi=float(np.mean(nmis)) if nmis else None,
            pct_vs_baseline=pct,
            wins=wins,
            ties=ties,
            losses=lost,
            instance_means=means,
            instance_medians=medians,
        )
    return PairedComparison(
        name, n, d, k, spec.instances, spec.runs_per_instance, spec.master_seed,
        spec.algorithms, stats, records,
    )


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> list:
    """Run every cell of ``spec``; returns one :class:`PairedComparison` per cell.

    Cells are ordered by ``n`` then ``k`` (real datasets: by ``k``).
    ``workers > 1`` runs ``(cell, instance)`` jobs on a thread pool; the
    result is identical to the serial run.
    """
    root = RandomStream(spec.master_seed)
    real = None if spec.synthetic else load_dataset(spec.manifest())
    cells = spec.cells(None if real is None else real.n)
    jobs = [(n, k, i) for (n, k) in cells for i in range(spec.instances)]

    def work(job):
        n, k, i = job
        return _job(spec, root, real, n, k, i)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, jobs))
    else:
        results = [work(j) for j in jobs]

    out = []
    for n, k in cells:
        recs, name, d = [], None, None
        for (jn, jk, _), (data, r) in zip(jobs, results):
            if (jn, jk) == (n, k):
                recs.extend(r)
                d = data.d
                name = data.name if not spec.synthetic else _cell_name(spec, n, k)
        out.append(_aggregate(spec, name, n, d, k, recs))
    return out


def _cell_name(spec: ExperimentSpec, n: int, k: int) -> str:
    g = spec.source
    short = "small" if g.regime == "small_distance" else "large"
    k_true = g.k_true if g.k_true is not None else k
    return f"gmm-{short}-d{g.d}-k{k_true}-n{n}"


def replay_run(spec: ExperimentSpec, instance: int, run: int, k: Optional[int] = None, n: Optional[int] = None) -> dict:
    """Re-execute one ``(instance, run)`` cell entry; returns ``{algorithm: RunReport}``.

    ``k`` and ``n`` default to the first value of the grid.
    """
    if not 0 <= instance < spec.instances:
        raise IndexError(f"instance {instance} out of range [0, {spec.instances})")
    if not 0 <= run < spec.runs_per_instance:
        raise IndexError(f"run {run} out of range [0, {spec.runs_per_instance})")
    root = RandomStream(spec.master_seed)
    real = None if spec.synthetic else load_dataset(spec.manifest())
    k = spec.k_values[0] if k is None else int(k)
    if spec.synthetic:
        n = spec.source.n_values[0] if n is None else int(n)
    else:
        n = real.n
    data = _dataset_for(spec, root, n, k, instance, real)
    return _run_pair(spec, root, data, n, k, instance, run)


# --- experiment description files -------------------------------------------

_BOOL = {"on": True, "off": False, "true": True, "false": False, "yes": True, "no": False, "1": True, "0": False}


def _ints(text: str) -> tuple:
    return tuple(int(v) for v in text.replace(",", " ").split())


def parse_experiment(text: str) -> ExperimentSpec:
    """Build an :class:`ExperimentSpec` from key = value sections.

    ``[experiment]`` holds the run settings; exactly one of ``[dataset]``
    (``builtin = iris`` or an explicit file manifest) and ``[synthetic]``
    describes the data.  See ``experiments/`` for complete files.
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ContractError(f"malformed experiment file: {exc}") from exc
    if "experiment" not in cp:
        raise ContractError("missing [experiment] section")
    e = cp["experiment"]
    has_ds, has_syn = "dataset" in cp, "synthetic" in cp
    if has_ds == has_syn:
        raise ContractError("need exactly one of [dataset] or [synthetic]")
    try:
        if has_syn:
            s = cp["synthetic"]
            source = SyntheticGrid(
                s.get("regime"), int(s.get("d")), _ints(s.get("n_values")),
                int(s["k_true"]) if "k_true" in s else None,
            )
        else:
            s = cp["dataset"]
            if "builtin" in s:
                source = s["builtin"]
            else:
                label = s.get("label_column")
                source = DatasetManifest(
                    s["path"], _ints(s["feature_columns"]),
                    int(label) if label not in (None, "") else None,
                    s.get("delimiter", ","), _BOOL[s.get("has_header", "yes").lower()],
                    s.get("name", ""),
                )
        return ExperimentSpec(
            source=source,
            k_values=_ints(e["k_values"]),
            algorithms=tuple(a.strip() for a in e.get("algorithms", "hartigan, smartigan").split(",") if a.strip()),
            init=e.get("init", "random_assignment").strip(),
            runs_per_instance=int(e.get("runs_per_instance", "20")),
            instances=int(e.get("instances", "1")),
            master_seed=int(e.get("master_seed", "0")),
            n_iter=int(e.get("n_iter", "100")),
            finish_with_hartigan=_BOOL[e.get("finish_with_hartigan", "on").lower()],
            lloyd_empty=e.get("lloyd_empty", "reseed").strip(),
            name=e.get("name", ""),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise ContractError(f"invalid experiment file: {exc!r}") from exc


def load_experiment(path: str) -> ExperimentSpec:
    try:
        with open(path, encoding="utf-8") as f:
            return parse_experiment(f.read())
    except OSError as exc:
        raise ContractError(f"cannot read experiment file {path}: {exc}") from exc
