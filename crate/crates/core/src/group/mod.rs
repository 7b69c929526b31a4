//! Finitely presented groups, their finite quotients and multiplication tables.

mod abelian;
mod enumerate;
mod fixture;
mod identify;
mod table;
mod word;

use thiserror::Error;

pub use abelian::{abelian_invariants, smith_diagonal, AbelianInvariants};
pub use enumerate::{
    add_branching_relators, enumerate, order_two_quotient, EnumeratedGroup, DEFAULT_MAX_COSETS,
};
pub use fixture::{compare_fixture, CellMismatch, FixtureReport};
pub use identify::{cyclic_table, dihedral_table, identify, isomorphism, klein_four_table, GroupName};
pub use table::{parse_grid, parse_table, GroupElement, GroupTable, Violation};
pub use word::{is_valid_name, parse_word, Letter, Presentation, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("a presentation needs at least one generator")]
    EmptyGenerators,
    #[error("invalid generator name {0:?}")]
    BadGeneratorName(String),
    #[error("duplicate generator {0:?}")]
    DuplicateGenerator(String),
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("cannot parse word {word:?} at {position}: {message}")]
    WordSyntax {
        word: String,
        position: usize,
        message: String,
    },
    #[error("empty multiplication table")]
    EmptyTable,
    #[error("table is not square: {rows} rows, {columns} columns, {names} distinct names")]
    NotSquare {
        rows: usize,
        columns: usize,
        names: usize,
    },
    #[error("table cell out of range")]
    CellOutOfRange,
    #[error("table is not a group: {}", .0.join("; "))]
    InvalidTable(Vec<String>),
    #[error("coset enumeration exceeded {0} cosets (the group may be infinite)")]
    CosetLimit(usize),
}
