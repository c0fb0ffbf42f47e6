//! Parsers for ODD and COD documents written in a YAML subset.

mod cod;
mod diagnostic;
mod odd;
mod print;
mod stream;
mod value;
pub mod yaml;

pub use cod::parse_cod;
pub use diagnostic::{Diagnostic, DiagnosticKind, Severity, SourceDoc};
pub use odd::parse_odd;
pub use print::{cod_to_yaml, odd_to_yaml};
pub use stream::{parse_cod_stream, split_cod_stream, StreamChunk};
pub use value::{is_identifier, parse_constraint_value, parse_list_element, ValueError};
