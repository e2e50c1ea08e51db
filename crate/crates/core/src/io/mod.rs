//! Text formats for rewrite systems and certificates.

pub mod cert;
pub mod trs;

pub use cert::{parse_certificate, write_certificate, CertError};
pub use trs::{parse_trs, print_trs, NameTable, ParseError};
