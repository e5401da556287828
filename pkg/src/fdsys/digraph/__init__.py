"""Digraphs on ``1..n`` and the structural algorithms the constructions need."""
from .algorithms import (
    INFINITE,
    add_loops,
    closed_in_neighbourhood,
    feedback_number,
    girth,
    is_cofunctional,
    is_weakly_connected,
    remove_loops,
    sigma,
    sources,
    subgraph_leq,
    weak_components,
)
from .biclique import NearBicliqueWitness, check_near_biclique, is_near_biclique
from .cofunctional import (
    Branch,
    BuildPlan,
    Fork,
    OutCycleShape,
    branch,
    cofunctional_spanning_subgraph,
    decompose_cofunctional,
    fork,
    initial_strong_components,
    recognize_out_cycle,
    replay,
)
from .graph import (
    Digraph,
    complete_bipartite,
    complete_graph,
    cycle_graph,
    disjoint_union,
    empty_graph,
    generate_small_digraphs,
    out_star,
    parse_text,
    path_graph,
    random_digraph,
    read_graph,
    to_text,
    write_graph,
)
