"""k-means local search: Lloyd, Hartigan and Smartigan.

Smartigan is Hartigan's single-point method with the acceptance test
relaxed by a factor that decays linearly from 3/2 to 1 over the run, which
lets early epochs explore before settling at a Hartigan-stable partition.

>>> from smartigan import load_builtin, init_random_assignment, run_hartigan
>>> iris = load_builtin("iris")
>>> state, report = run_hartigan(iris, init_random_assignment(iris, 3, seed=1), seed=1)
"""

from .algorithms import (
    LocalSearchConfig,
    is_hartigan_stable,
    is_lloyd_stable,
    run_hartigan,
    run_lloyd,
    run_local_search,
    run_smartigan,
)
from .bench import ExperimentSpec, PairedComparison, SyntheticGrid, replay_run, run_experiment
from .core import (
    ClusteringState,
    ContractError,
    Dataset,
    RunReport,
    ScheduleSpec,
    delta_decrease,
    insertion_cost,
    move_point,
    phi,
    removal_gain,
    total_loss,
)
from .dataio import DatasetManifest, load_builtin, load_dataset, write_report
from .init import InitSpec, init_kmeans_pp, init_random_assignment, init_random_centroids, initialize
from .metrics import nmi, percent_difference
from .rng import RandomStream, derive
from .synth import MixtureSpec, generate

__version__ = "0.1.0"
