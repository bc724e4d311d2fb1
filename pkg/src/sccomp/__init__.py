"""High-order integrators built from linear combinations of
symmetric-conjugate compositions with complex coefficients.

The package splits into coefficient-table construction (`coefficients`),
the table evaluation engine (`engine`), benchmark systems (`problems`),
convergence and efficiency measurement (`analysis`), and the command-line
interface (`cli`).
"""

from .coefficients import (
    CompositionRow,
    CompositionTable,
    OrderConditionReport,
    basic_table,
    build_table,
    combination_table,
    conjugate_fraction,
    cost_model,
    order_condition_sums,
    recursion_table,
    table_from_json,
    table_to_json,
    triple_jump_complex,
    triple_jump_real,
    triple_jump_table,
    verify_fraction_root,
)
from .engine import (
    BasicMethod,
    EvaluationCounter,
    SplitSystem,
    StepFailure,
    apply_basic,
    apply_recursion,
    apply_recursion_complex,
    apply_row,
    apply_table,
    fourth_order_complex_splitting,
    integrate,
    propagate_basic_tangent,
    propagate_tangent,
    strang_splitting,
)
from .problems import (
    DftPlan,
    ParabolicGrid,
    dft,
    dft_plan,
    idft,
    kepler_energy,
    kepler_init,
    kepler_system,
    parabolic_flow_a,
    parabolic_flow_b,
    parabolic_grid,
    parabolic_reference,
    parabolic_system,
)
from .analysis import (
    DriftSummary,
    SlopeEstimate,
    WorkPrecisionRecord,
    efficiency_sweep,
    energy_drift,
    equal_cost_steps,
    estimate_order,
    kepler_record,
    parabolic_record,
    symmetry_defect,
    symplecticity_defect,
    write_energy_csv,
    write_records_csv,
)

__version__ = "0.1.0"
