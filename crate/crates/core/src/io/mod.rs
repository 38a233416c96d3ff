//! File formats: suites, run records and summaries, network files, DOT
//! export and review annotations.

pub mod annotate;
pub mod dot;
pub mod network_file;
pub mod records;
pub mod suite;
pub mod summary;

pub use annotate::{export_annotations, import_annotations, AnnotationFile, Disposition};
pub use dot::{export_dot, to_dot};
pub use network_file::{network_from_str, network_to_string, read_network, write_network};
pub use records::{read_records, read_records_file, write_records, write_records_file};
pub use suite::{parse_suite, parse_suite_str, NamedCondition, Suite, SuiteError};
pub use summary::{run_suite, summary_csv, summary_table, SummaryRow, SUMMARY_COLUMNS};
