//! Exact base size `b(n, k)` of the symmetric group Sym(n) acting on the
//! k-subsets of `{1..n}`, equivalently the determining number of the Kneser
//! graph K(n, k).
//!
//! The engine ([`base_size`]) computes, for each `l`, the number of l-tuples
//! of k-subsets fixed only by the identity as a signed sum over the cycle
//! types of Sym(n), and returns the first `l` for which that number is
//! nonzero. The [`oracle`] module recomputes the same quantities by
//! brute-force enumeration at small degree.

pub mod basesize;
pub mod checkpoint;
mod error;
pub mod fixcount;
pub mod oracle;
pub mod partitions;
pub mod pass;
mod store;
pub mod verify;

pub use basesize::{
    base_size, base_size_with, closed_form_threshold, h_value, halasi_formula, scan,
    scan_lower_bound, scan_timed, weight_table, BaseSizeResult, ClosedForm, Method, WeightTable,
};
pub use checkpoint::{Checkpoint, ChunkId};
pub use error::{Error, Result};
pub use fixcount::{fixed_subsets, fixed_subsets_reference, FixCount};
pub use partitions::{class_size, partitions_of, sign, CycleType, Partitions};
pub use pass::{weight_table_with, weight_tables_with, PassOptions, PassReport};
