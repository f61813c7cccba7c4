"""Functorial moralisation and triangulation of discrete graphical models."""
from .errors import (
    DegenerateNetworkError,
    GraphError,
    LimitExceededError,
    NetworkFileError,
    PGMError,
    ShapeMismatchError,
    StochasticityError,
    UnknownVertexError,
)
from .graphs import (
    GraphHom,
    OrderedDag,
    OrderedUGraph,
    Vertex,
    enumerate_cliques,
    hom_compose,
    is_chordal,
    is_valid_hom,
    moralise_graph,
    parents,
    satisfies_triangulated_property,
    to_dot,
    triangulate_graph,
)
from .semantics import (
    DEGENERATE,
    Distribution,
    FiniteSet,
    StochasticKernel,
    Tensor,
    kernel_compose,
    kernel_tensor,
    marginalize,
    normalize_tensor,
    proportional_eq,
    structural_tensor,
)
from .diagram import (
    Diagram,
    Flavor,
    GeneratorMap,
    Signature,
    cdsyn_hom,
    compare_composition,
    copy_composition,
    dag_signature,
    evaluate,
    graph_of,
    semantically_equal,
    substitute,
    syn_hom,
    ugraph_signature,
)
from .network import (
    BayesianNetwork,
    MarkovNetwork,
    NetworkMorphism,
    bn_joint,
    check_morphism,
    compose_morphisms,
    identity_morphism,
    marginalization_morphism,
    mn_joint,
    reveal_variable,
    verify_factorization,
)
from .transform import (
    moralisation_map,
    moralise_bn,
    mor_tr,
    mor_tr_embedding,
    normalize_family,
    tr_mor,
    tr_mor_embedding,
    triangulate_mn,
    triangulation_map,
)

__version__ = "0.1.0"
