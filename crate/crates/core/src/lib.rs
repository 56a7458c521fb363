//! Escalator trees and representability for universal m-gonal forms.

pub mod bitset;
pub mod cache;
pub mod cli;
pub mod error;
pub mod form;
pub mod identity;
pub mod lab;
pub mod polygonal;
pub mod report;
pub mod table;
pub mod tree;

pub use error::{Error, Result};
pub use form::MGonalForm;
pub use polygonal::{enumerate_values, eval_polygonal, polygonal_index_of, ValueList};
pub use table::{build_table, decompose, extend_table, truant_of, RepTable, TruantResult};
pub use tree::{build_tree, stabilize_gamma, Escalator, SearchConfig, TreeReport};
