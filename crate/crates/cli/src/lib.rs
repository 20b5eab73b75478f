//! File formats, reports, graph exports and the command line for the
//! `pomreal` checker.

pub mod commands;
pub mod dot;
pub mod report;
pub mod spec_doc;

pub use commands::{run, Cli, CliError};
pub use dot::{export_graph, ExportError, GraphFormat, GraphObject};
pub use report::{run_checks, CheckOutcome, CheckProfile, Report, Status};
pub use spec_doc::{parse_spec, parse_spec_str, serialize, IntegrityError, ParseError, SpecDocument, SpecError};
