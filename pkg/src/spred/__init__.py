"""Topology-preserving linear dimensionality reduction of point clouds."""

from .core import (coordinate_frame, diameter, eta_bounds, is_stiefel, pairwise_distances,
                   principal_angles, project)
from .diagram_distance import bottleneck, wasserstein
from .equivalence import (SimilarityReport, canonical_embedding, classify_intervals,
                          mu_quasi_iso, mu_quasi_iso_barcode, similarity)
from .errors import (ConfigError, CutLocusError, DegenerateQRError, DimensionMismatch, InputError,
                     NumericalError, SpredError, WellDefinednessError)
from .filtration import FilteredComplex, SimplicialComplex, rips_filtration
from .grassmann import distributed_reduce, exp_map, extrinsic_mean, log_map, weiszfeld_median
from .groups import GroupPresentation, Verdict, is_trivial
from .optimizer import AnnealingConfig, anneal, anneal_chains, cost, pca_projection
from .persistence import Barcode, PersistenceDiagram, compute_persistence, rips_diagrams

__version__ = "0.1.0"
