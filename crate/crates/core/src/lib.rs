//! Stably intersecting transversals of the back circulant latin square `B_n`.
//!
//! `B_n` has symbol `(r + c) mod n` in cell `(r, c)` for odd `n`. A family of
//! `mu` transversals is stable when all pairwise intersections coincide; its
//! size `t` is the number of shared cells. The crate searches small orders,
//! composes large orders from subsquare witnesses, evaluates the known
//! spectra with interval arithmetic, and converts families into circulant
//! latin trades.

pub mod construct;
pub mod error;
pub mod model;
pub mod partial;
pub mod search;
pub mod setalg;
pub mod tables;
pub mod trades;

pub use error::{Error, Result};
pub use model::{check_stable, is_transversal, symbol_of, Cell, StableCheck, StableFamily, SubsquareSpec, Transversal};
pub use partial::{OmegaInstance, PartialFamily};
pub use search::{
    compute_spectrum_small, enumerate_transversals, search_omega_member, search_stable_family, Pruning, SearchBudget,
    SearchConfig, SearchMode, SearchOutcome, SearchReport,
};
pub use setalg::{theorem_spectrum, IntervalSet, SpectrumReport};
pub use tables::{compose_from_dataset, construct_family, verify_appendix, BaseChoice, Construction, Dataset, Provenance};
pub use trades::{family_to_trade, verify_trade, CirculantTrade, VerificationReport};
