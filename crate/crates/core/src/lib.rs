//! Extension of monoid-invariant rankings to invariant weak orders.
//!
//! Given finitely many rankings over a window of a ground set and a family of
//! transformations acting on it, this crate decides whether the rankings
//! extend to a complete preorder that every transformation preserves, and
//! computes which comparisons all such extensions share.
//!
//! * [`model`]: windows, partial generator tables, words, validation.
//! * [`closure`]: least forcing relations under transitivity and coherency.
//! * [`solver`]: three-way pair classification, backtracking completion,
//!   exact forcing and extension auditing.
//! * [`oracle`]: brute-force enumeration of weak orders on small windows.
//! * [`scenarios`]: worked-example generators and random corpora.
//! * [`dot`]: Graphviz output.

pub mod bitmatrix;
pub mod closure;
pub mod dot;
pub mod error;
pub mod model;
pub mod oracle;
pub mod scenarios;
pub mod solver;

pub use closure::{is_consistent, novel_pairs, saturate, seed, Fact, RelationState, Rules};
pub use error::{Error, Result};
pub use model::{apply_word, check_commutativity, load_scenario, ElementId, Scenario, Word};
pub use oracle::{enumerate_weak_orders, oracle_extensions, oracle_forced_set, WeakOrder};
pub use scenarios::GeneratorSpec;
pub use solver::{
    classify_pair, complete_extension, forced_relation, forced_set_exact, verify_extension,
    ExtensionResult, ForcedMap, PairOption, PairStatus, PairVerdict, Solver,
};
