from .bees import BeesOptimizer, BeesParams, bees_optimize
from .benchmarks import schwefel, schwefel_space, sphere
from .core import Candidate, OptimizationReport, Site
from .ga import GaParams, GeneticOptimizer, ga_optimize
from .spaces import BoxSpace, GraphSpace, neighborhood_sample

__all__ = [
    "BeesOptimizer",
    "BeesParams",
    "BoxSpace",
    "Candidate",
    "GaParams",
    "GeneticOptimizer",
    "GraphSpace",
    "OptimizationReport",
    "Site",
    "bees_optimize",
    "ga_optimize",
    "neighborhood_sample",
    "schwefel",
    "schwefel_space",
    "sphere",
]
