"""Exact-arithmetic toolkit for mixed Tsirelson space combinatorics.

Submodules:

* :mod:`tsirkit.ordinals`       Cantor-normal-form ordinal arithmetic
* :mod:`tsirkit.families`       regular families of finite subsets of N
* :mod:`tsirkit.parsing`        the family-expression grammar
* :mod:`tsirkit.norms`          the implicitly defined norm and certificates
* :mod:`tsirkit.indices`        Cantor-Bendixson indices and tree orders
* :mod:`tsirkit.constructions`  lower-bound witness builders
* :mod:`tsirkit.serialize`      JSON codecs for all exchange formats
* :mod:`tsirkit.cli`            the command-line front end
"""

from .ordinals import (
    OMEGA,
    ONE,
    ZERO,
    Ordinal,
    compare,
    format_ordinal,
    from_int,
    fund_seq,
    log_leading,
    omega_pow,
    parse_ordinal,
)
from .families import (
    S0,
    Bounded,
    Bracket,
    CanonicalR,
    Concat,
    FamilyExpr,
    GrowthFn,
    Schreier,
    SpreadHull,
    Tail,
    Union,
    as_finset,
    enumerate_restriction,
    family_subset_upto,
    format_family,
    greedy_decompose,
    is_admissible,
    spreading_of,
    tail_restrict,
)
from .parsing import parse_family, parse_finset
from .norms import (
    CertNode,
    CertificateError,
    NormResult,
    SparseVector,
    SpaceSpec,
    derived_spec,
    norm,
    norm_certificate,
    p_n,
    pi_n,
    seminorm,
    verify_certificate,
)
from .indices import (
    BlockTree,
    IotaResult,
    cb_derivative,
    cb_rank_oracle,
    gamma,
    iota_symbolic,
    is_l1k_tree,
    tree_derive,
    tree_families,
    tree_order,
)
from .constructions import (
    TailSet,
    bracket_power_family,
    bracket_power_tree,
    condense,
    flat_vector,
    l1_block_sequence,
    repeated_average,
    small_vector_search,
)

__version__ = "0.1.0"
