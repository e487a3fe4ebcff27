//! Exact arithmetic in multiquadratic fields, the square sieve for unit
//! indices, Hasse's unit index of CM fields and the explicit square roots of
//! the quadratic units `eps_q`, `eps_2q`, `eps_{q1 q2}`, `eps_{2 q1 q2}`.

mod decompose;
mod field;
mod units;

pub use decompose::{
    check_hypotheses, decompose_exploratory, decompose_unit, non_square_violations, orient, proposition_determinant, proposition_fsu, DecompCase,
    Decomposition, IdentityCheck, NormCheck, TriquadraticUnits,
};
pub use field::{ElementView, FieldElement, MultiQuadField, SquareTest, DEFAULT_BIT_BUDGET, MAX_GENS};
pub use units::{
    any_unit_index, cm_unit_index, determinant, hasse_index, pell_element, torsion_defect, two_power_roots, unit_index, unit_index_with,
    BaseUnits, CmUnitIndex, HasseCriterion, HasseReport, UnitIndex, UnitSymbol,
};
