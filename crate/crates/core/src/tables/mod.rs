//! Reduced-form witness data: file format, the bundled dataset, claim
//! verification and the composition planner built on top of it.

mod claims;
mod dataset;
mod format;
mod listed;
mod plan;

pub use claims::{claim_list, verify_appendix, Claim, ClaimGroup, ClaimReport, BASE_CLAIMS};
pub use dataset::{Dataset, WitnessSource};
pub use format::{decode_block, emit_blocks, emit_reduced_form, parse_reduced_form, ReducedFormBlock};
pub use listed::{listed_row, listed_rows, parse_listed, ListedRow};
pub use plan::{build_plan, closed_form, compose_from_dataset, construct_family, plan_composition, BaseChoice, CompositionPlan, Construction, Provenance};
