//! Concrete textual syntax: tokenizer, recursive-descent parser and the
//! canonical printer.

pub mod lexer;
mod parser;
mod printer;

pub use parser::{
    decode_keyword, model_diagnostic, parse_declarations, parse_schema, parse_statement, Spanned,
    TransitionKeyword,
};
pub use printer::{serialize_schema, serialize_with, transition_keyword, KeywordStyle};
