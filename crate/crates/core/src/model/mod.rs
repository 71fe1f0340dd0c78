//! Instances, utility oracles and the function-class axioms.

mod axioms;
mod instance;
mod json;
mod utility;

pub use axioms::{
    check_axioms, check_axioms_with, check_lb00_axioms, check_submodular, is_self_bounding,
    self_bounding_constant, AxiomCheck, AxiomReport, CheckBudget, SelfBoundingCheck,
    SubmodularCheck, DEFAULT_EXHAUSTIVE_LIMIT,
};
pub use instance::{default_labels, AxiomPolicy, Instance, Mode};
pub use json::{ConstraintJson, InstanceJson, RowJson, TableEntryJson, UtilityJson};
pub use utility::{lb00_z, Coverage, Lb00, UtilityFunction};
