pub mod bench;
pub mod commands;
pub mod doc;
pub mod sexp;
