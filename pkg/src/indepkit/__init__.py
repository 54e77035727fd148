"""indepkit: solver and model-checking toolkit for independence atoms.

Submodules:

* ``atoms``    — canonical atoms, parsing/printing, atom sets
* ``calculus`` — marginal (complete) and conditional (sound, depth-bounded)
  derivation engines with replayable proofs
* ``teams``    — team-semantics evaluation and brute-force countermodel search
* ``pregeom``  — exact-rational pregeometric closure models, axiom harness,
  federation machinery
* ``synth``    — vector-space semantics and the counterexample synthesizer
* ``cli``      — command-line front end
"""

from .atoms import (
    Atom,
    AtomSet,
    AtomSyntaxError,
    CONDITIONAL,
    MARGINAL,
    canonicalize,
    conditional,
    format_atom,
    marginal,
    parse_atom,
    parse_atom_file,
    parse_atom_list,
)
from .calculus import (
    Proof,
    Verdict,
    derives_conditional,
    derives_marginal,
    is_derivable_conditional,
    is_derivable_marginal,
    minimal_nonderivable,
    replay_proof,
    saturate_conditional,
    saturate_marginal,
)
from .teams import (
    Team,
    find_counterexample_team,
    satisfies_atom,
    satisfies_conditional,
    satisfies_marginal,
    satisfies_set,
    team_from_csv,
    team_to_csv,
)
from .pregeom import (
    ClosureModel,
    axiom_suite,
    basis_vector,
    check_federation_witness,
    federation_index_lower_bound,
    format_vector,
    hyttinen_chain,
    in_closure,
    indep,
    integer_lattice,
    is_algebraic,
    is_independent_sequence,
    ones_vector,
    parse_model,
    parse_vector,
    rank,
    vector_space,
    vector_sum,
    zero_vector,
)
from .synth import (
    AirAssignment,
    Counterexample,
    GoalDerivableError,
    air_satisfies,
    air_satisfies_set,
    algebraic_point_fixture,
    build_federation_gap_instance,
    soundness_fuzz,
    synthesize_counterexample,
)

__version__ = "0.1.0"
