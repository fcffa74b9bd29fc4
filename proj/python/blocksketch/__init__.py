"""Sketched SDP community detection for the two-community SBM."""

from blocksketch._core import (
    CapacityError,
    DomainError,
    EmptyGraphError,
    Error,
    Graph,
    ParameterError,
    ParseError,
    SbmParams,
    SdpSolution,
    binom_diff_tail_exact,
    brute_force_mle,
    chernoff_grid_min,
    edge_count_between,
    exact_recovery_possible,
    gamma_star,
    induced_subgraph,
    lambda_star,
    lambda_star_from_rates,
    lemma2_bound,
    lemma2_exponent,
    majority_vote,
    oracle_vote_trial,
    partitions_equal,
    read_graph,
    round_solution,
    run_sweep,
    run_trial,
    sample_sbm,
    sketch_and_recover,
    solve_sdp,
    subsample_nodes,
    write_graph,
)

__version__ = "0.1.0"
