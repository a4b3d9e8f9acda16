"""Cluster-first route-second solver for the multiple vehicle routing problem.

k-means splits the customers among the vehicles, then each vehicle's tour is
optimized on its own by a genetic algorithm (PMX crossover), simulated
annealing, tabu search, or exhaustive enumeration for small clusters.
"""
from .baselines import AnnealParams, TabuParams, simulated_annealing, tabu_search, two_opt_neighbor
from .clustering import ClusterAssignment, kmeans
from .errors import ClusterTooLarge, IncompleteTour, InvalidParameter, MvrpError, ParseError, UnknownCityId
from .exact import ExactResult, brute_force_tsp
from .ga import GaParams, GaTrace, pmx_crossover, run_ga
from .instance import (
    City,
    DistanceMatrix,
    Instance,
    build_distance_matrix,
    euclidean_distance,
    generate_random_instance,
    read_instance,
    tour_length,
    write_instance,
)
from .milp import IlpModel, build_model, check_feasibility, export_lp, tour_to_indicators

__version__ = "0.1.0"
