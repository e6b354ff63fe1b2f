"""Classification of matrix degeneracies (exceptional points) and their hierarchies.

Subpackages by topic:

* :mod:`ephier.partitions`: unsigned degeneracy types and dominance hierarchies
* :mod:`ephier.signed`: signed types under pseudo-Hermitian symmetry
* :mod:`ephier.matrixcore`: numerical classification of concrete matrices
* :mod:`ephier.conversion`: representatives and explicit conversion witnesses
* :mod:`ephier.liouville`: vectorized Lindblad generators and effective models
* :mod:`ephier.lieb`: the non-Hermitian Lieb-lattice example
"""
from __future__ import annotations

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ArgumentError,
    BoundsError,
    DegenerateRestrictionError,
    EPHError,
    InconsistencyError,
    NumericalError,
    OrderError,
    SingularMetricError,
)
from .partitions import Partition, HierarchyDag, dominates, hierarchy_dag, partitions_of  # noqa: E402
from .signed import SignedDiagram, Pseudometric, enumerate_signed, signed_dominates, signed_hierarchy_dag  # noqa: E402
from .matrixcore import Tolerances, char_poly, classify, classify_signed_type, jordan_type  # noqa: E402

__all__ = [
    "__version__",
    "EPHError",
    "ArgumentError",
    "BoundsError",
    "OrderError",
    "NumericalError",
    "SingularMetricError",
    "DegenerateRestrictionError",
    "InconsistencyError",
    "Partition",
    "HierarchyDag",
    "partitions_of",
    "dominates",
    "hierarchy_dag",
    "SignedDiagram",
    "Pseudometric",
    "enumerate_signed",
    "signed_dominates",
    "signed_hierarchy_dag",
    "Tolerances",
    "char_poly",
    "jordan_type",
    "classify",
    "classify_signed_type",
]
