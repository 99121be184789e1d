"""miokit: information measures and maximally informative observables over
finite discrete grids, with categorical-perception experiment tooling.

Conventions used throughout:

* entropies follow the information-deficit sign (E = sum p ln p <= 0),
* all quantities are in nats, with 0 ln 0 = 0,
* every object is immutable after construction and every operation is pure.
"""

from ._kernels import active_backend
from .errors import (InternalConsistencyError, InvariantError, MiokitError,
                     NotMioError)
from .tables import (Axis, CategorySpace, Distribution, IdentificationFunction,
                     JointTable, ObservableGrid, SampleSet,
                     condition_on_observable, condition_on_target,
                     estimate_joint, fine_grain, marginal_observable,
                     marginal_target)
from .measures import (InfoReport, entropy, expected_residual_entropy,
                       info_report, information_gain_at, joint_entropy,
                       mutual_information, residual_entropy_at)
from .mio import (DEFAULT_MIO_TOL, MioVerdict, RegionSet, check_mio,
                  identification_function, model_distributions, reprior,
                  support_regions, verify_mass_matching)
from .partitions import (CategoryPartition, SubMioFamilyReport, check_sub_mio,
                         coarse_grain_target, enumerate_partitions,
                         join_partitions, joint_submio_information,
                         one_block_partition, singleton_partition)
from .decoding import (BoundarySet, Decoder, boundary_search_1d,
                       decoder_accuracy, decoder_information, map_decoder,
                       project_axis, segment_decoder, segment_information_gain)
from .simulate import (CategoryModel, ExperimentConfig, ExperimentResult,
                       build_true_joint, categoricality_index, run_experiment,
                       sample_experiment)

__version__ = "0.1.0"

__all__ = [
    "Axis",
    "BoundarySet",
    "CategoryModel",
    "CategoryPartition",
    "CategorySpace",
    "DEFAULT_MIO_TOL",
    "Decoder",
    "Distribution",
    "ExperimentConfig",
    "ExperimentResult",
    "IdentificationFunction",
    "InfoReport",
    "InternalConsistencyError",
    "InvariantError",
    "JointTable",
    "MioVerdict",
    "MiokitError",
    "NotMioError",
    "ObservableGrid",
    "RegionSet",
    "SampleSet",
    "SubMioFamilyReport",
    "active_backend",
    "boundary_search_1d",
    "build_true_joint",
    "categoricality_index",
    "check_mio",
    "check_sub_mio",
    "coarse_grain_target",
    "condition_on_observable",
    "condition_on_target",
    "decoder_accuracy",
    "decoder_information",
    "entropy",
    "enumerate_partitions",
    "estimate_joint",
    "expected_residual_entropy",
    "fine_grain",
    "identification_function",
    "info_report",
    "information_gain_at",
    "join_partitions",
    "joint_entropy",
    "joint_submio_information",
    "map_decoder",
    "marginal_observable",
    "marginal_target",
    "model_distributions",
    "mutual_information",
    "one_block_partition",
    "project_axis",
    "reprior",
    "residual_entropy_at",
    "run_experiment",
    "sample_experiment",
    "segment_decoder",
    "segment_information_gain",
    "singleton_partition",
    "support_regions",
    "verify_mass_matching",
]
