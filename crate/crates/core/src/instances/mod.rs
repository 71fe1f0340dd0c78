//! Generators for the worked constructions, plus random instance fuzzers.

mod basic;
mod endow2;
mod lb00;
mod lb1;
pub mod random;

pub use basic::{gen_rest1, gen_tight_2alpha, gen_xos_example, tight_2alpha_sizes, Rest1, Tight2Alpha};
pub use endow2::{endow2_bound, Endow2Bound};
pub use lb00::{
    gen_lb00, lb00_claimed_ratio, lb00_committee, lb00_deviation, lb00_party_compositions, Lb00Deviation,
    LB00_VOTERS,
};
pub use lb1::{
    check_lb1_constraints, gen_lb_16_15, lb1_deviation, search_lb1_restrained, search_party_restrained,
    uti_lower_bound_deviation, Lb1Case, Lb1Deviation, Lb1Search, LemmaDeviation, PartyChecker, PartyShape, LB1_PARTIES,
};
