//! Names and reference numbers shared by the acceptance suite and the CLI reports.
//!
//! A report's `check` field always holds one of these names, so a failing
//! command can be traced to the criterion it belongs to.

pub const CLASSICAL_VALUES: &str = "classical_values";
pub const QUANTUM_LOWER_BOUND: &str = "quantum_lower_bound_formula";
pub const BIAS_EIGEN_CLAIM: &str = "bias_eigen_claim";
pub const VALUE_FORMULA_EQUIVALENCE: &str = "value_formula_equivalence";
pub const ROOT_OF_UNITY_IDENTITIES: &str = "root_of_unity_identities";
pub const ENTROPY: &str = "entropy";
pub const GROUP_ORDERS: &str = "group_orders";
pub const SOS_CERTIFICATES: &str = "sos_certificates";
pub const RELATION_SUITE: &str = "relation_suite";
pub const G3_IRREPS: &str = "g3_irreps";
pub const PSI_REPRESENTATION: &str = "psi_representation";
pub const GLUED_MAGIC_SQUARE: &str = "glued_magic_square";
pub const NPA_STRUCTURE: &str = "npa_structure";
pub const SELF_TESTING_PROPERTIES: &str = "self_testing_property_checks";

/// Criterion number and check name, in order.
pub const CRITERIA: [(u8, &str); 14] = [
    (1, CLASSICAL_VALUES),
    (2, QUANTUM_LOWER_BOUND),
    (3, BIAS_EIGEN_CLAIM),
    (4, VALUE_FORMULA_EQUIVALENCE),
    (5, ROOT_OF_UNITY_IDENTITIES),
    (6, ENTROPY),
    (7, GROUP_ORDERS),
    (8, SOS_CERTIFICATES),
    (9, RELATION_SUITE),
    (10, G3_IRREPS),
    (11, PSI_REPRESENTATION),
    (12, GLUED_MAGIC_SQUARE),
    (13, NPA_STRUCTURE),
    (14, SELF_TESTING_PROPERTIES),
];

/// Published winning probabilities of the canonical strategies, to six decimals.
pub const REFERENCE_VALUES: [(u32, f64); 6] = [
    (2, 0.853553),
    (3, 0.833333),
    (4, 0.826641),
    (5, 0.823607),
    (10, 0.819623),
    (40, 0.818392),
];

/// Published entanglement-entropy ratios `H(ψ_n)/log₂ n`, to six decimals.
pub const REFERENCE_ENTROPY_RATIOS: [(u32, f64); 4] = [(2, 1.0), (3, 0.991159), (4, 0.990294), (40, 0.995008)];

pub fn criterion_number(name: &str) -> Option<u8> {
    CRITERIA.iter().find(|(_, n)| *n == name).map(|(k, _)| *k)
}
