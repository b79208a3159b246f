//! Static analysis of spreadsheet workbooks: how many UI steps separate a
//! reader from every value's sources and labels.
//!
//! The pipeline: load an XLSX file into an immutable [`workbook`] model,
//! parse each formula with [`formula`], classify values and resolve labels
//! with [`labeling`], grade function parameters via the [`catalog`], and
//! score cells, chains, and the whole model with [`scorer`]. The [`audit`]
//! module drives the pipeline and emits reports and lint findings.

pub mod audit;
pub mod catalog;
pub mod formula;
pub mod labeling;
pub mod score;
pub mod scorer;
pub mod workbook;

pub use score::{score_add, Score};
