from ._version import __version__
from .utils import (
    Config,
    BohrtopError,
    CapExceeded,
    DegenerateIntersection,
    NotUpperSet,
    SchemaError,
)
from .order import (
    FinPoset,
    FinLattice,
    BoolAlg,
    FrameElems,
    CoverRel,
    FrameMap,
    alx_opens,
    down_sets,
    free_frame,
    ideals,
    regular_ideals,
    distributive_ideals,
    frame_morphism_from_continuous,
)
from .oml import (
    Oml,
    BlockFamily,
    MonoHeyting,
    validate_oml,
    blocks,
    amalgamate,
    example_x,
    example_x_family,
    horizontal_sum,
    mono_heyting,
    mono_implies,
    inject,
)
from .cstar import (
    MatrixAlg,
    HermObs,
    Projection,
    Context,
    ContextPoset,
    herm_eig,
    proj_pos,
    trivial_context,
    context_from_obs,
    bloch_context,
    diagonal_contexts,
    young_sequences,
    young_context,
    meet_contexts,
    context_poset,
    gelfand_frame,
)
from .bohr import (
    BohrOpen,
    BohrFrame,
    bohr_frame,
    bohr_meet,
    bohr_join,
    bohr_implies,
    bohr_neg,
    inject_proj,
    external_basic_open,
    is_boolean_frame,
)
from .dasein import (
    RatInterval,
    inner_support,
    outer_support,
    dasein_open,
    dasein_order_check,
    dasein_push,
)
from .state import (
    DensityState,
    ProjMeasure,
    QuasiState,
    expectation,
    exact_expectation,
    measure_from_state,
    quasistate_from_measure,
    truth_value,
    ks_search,
    cabello_family,
    validate_ks_family,
)
from .fixtures import (
    register_fixture,
    register_aliases,
    clear_fixtures_and_aliases,
    get_registered_fixtures,
    get_fixture,
)

__all__ = (
    "__version__",
    "Config",
    "BohrtopError",
    "CapExceeded",
    "DegenerateIntersection",
    "NotUpperSet",
    "SchemaError",
    "FinPoset",
    "FinLattice",
    "BoolAlg",
    "FrameElems",
    "CoverRel",
    "FrameMap",
    "alx_opens",
    "down_sets",
    "free_frame",
    "ideals",
    "regular_ideals",
    "distributive_ideals",
    "frame_morphism_from_continuous",
    "Oml",
    "BlockFamily",
    "MonoHeyting",
    "validate_oml",
    "blocks",
    "amalgamate",
    "example_x",
    "example_x_family",
    "horizontal_sum",
    "mono_heyting",
    "mono_implies",
    "inject",
    "MatrixAlg",
    "HermObs",
    "Projection",
    "Context",
    "ContextPoset",
    "herm_eig",
    "proj_pos",
    "trivial_context",
    "context_from_obs",
    "bloch_context",
    "diagonal_contexts",
    "young_sequences",
    "young_context",
    "meet_contexts",
    "context_poset",
    "gelfand_frame",
    "BohrOpen",
    "BohrFrame",
    "bohr_frame",
    "bohr_meet",
    "bohr_join",
    "bohr_implies",
    "bohr_neg",
    "inject_proj",
    "external_basic_open",
    "is_boolean_frame",
    "RatInterval",
    "inner_support",
    "outer_support",
    "dasein_open",
    "dasein_order_check",
    "dasein_push",
    "DensityState",
    "ProjMeasure",
    "QuasiState",
    "expectation",
    "exact_expectation",
    "measure_from_state",
    "quasistate_from_measure",
    "truth_value",
    "ks_search",
    "cabello_family",
    "validate_ks_family",
    "register_fixture",
    "register_aliases",
    "clear_fixtures_and_aliases",
    "get_registered_fixtures",
    "get_fixture",
)
