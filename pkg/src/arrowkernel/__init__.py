"""Arrow diagrams on circles: enumeration, move relators, integer invariants.

The pipeline runs words -> diagrams -> relators -> zkernel: oriented Gauss
words are classed into arrow diagrams, Reidemeister-style relator families
are evaluated against a diagram table, and the exact integer left kernel of
that matrix yields invariant coefficient vectors.  counting evaluates them
on words and moves rewrites words to test invariance.
"""

from .counting import (
    Functional,
    LinearCombination,
    count_occurrences,
    count_vector,
    evaluate_functional,
    subset_expansion,
)
from .diagrams import (
    ArrowDiagram,
    DiagramTable,
    MirrorReport,
    TableFilter,
    diagram_of,
    enumerate_diagrams,
    mirror_diagram,
    mirror_pairs,
    read_table_jsonl,
    write_table_jsonl,
)
from .moves import (
    Direction,
    InvalidSiteError,
    MoveKind,
    MoveSite,
    Variant,
    apply_move,
    find_sites,
    random_walk,
)
from .relators import (
    EvaluationMatrix,
    Placement,
    RelatorColumn,
    RelatorFamily,
    build_matrix,
    generate_relators,
    read_relators_jsonl,
    write_matrix_csv,
    write_relators_jsonl,
)
from .words import (
    OrientedGaussWord,
    canonical_form,
    concatenate,
    format_word,
    normalize_word,
    parse_word,
    reverse_word,
    rotate_word,
    subword,
)
from .zkernel import (
    IntMatrix,
    KernelBasis,
    add_mirror_constraints,
    contains_vector,
    left_kernel,
    rank,
    read_basis_csv,
    write_basis_csv,
)

__version__ = "0.1.0"
