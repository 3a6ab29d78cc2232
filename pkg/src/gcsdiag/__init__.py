"""Exact arithmetic for generalized cluster scattering diagrams."""

from .ring import (
    CoeffPoly,
    ExchangeSymbol,
    Grading,
    TruncatedLaurent,
    canonical_string,
    j_degree,
    pairing,
    parse_canonical,
    series_mul,
    series_pow_int,
)
from .seed import (
    ClusterState,
    FixedData,
    GeneralizedTorusSeed,
    c_vectors,
    epsilon,
    g_vectors,
    langlands_dual,
    laurent_check,
    laurent_dict,
    left_companion,
    make_initial_seed,
    mutate_cluster,
    mutate_seed,
    mutate_word,
    parse_seed_file,
    principal_data,
    right_companion,
    serialize_seed_file,
)
from .scatter import (
    ScatteringDiagram,
    Wall,
    apply_Tk,
    chambers,
    check_consistency,
    cone_contains,
    complete_rank2,
    dump_diagram,
    equivalence_check,
    initial_diagram,
    initial_diagram_prin,
    loop_product,
    path_between,
    path_ordered_product,
    project_to_A,
    slice_to_X,
    wall_cross,
)
from .theta import (
    BrokenLine,
    ThetaResult,
    enumerate_broken_lines,
    g_vector,
    product_expansion_check,
    sign_coherence_check,
    structure_constant,
    theta,
    theta_Tk_transport,
    theta_report,
    theta_via_path,
    validate_broken_line,
)

__version__ = "0.1.0"
