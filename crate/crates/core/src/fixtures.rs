//! Reference codes used by tests, docs, and the CLI.

use alloc::vec::Vec;

use crate::error::Result;
use crate::gf2::PartVector;
use crate::model::{ArrayCode, Column};

const INTRO_COLUMNS: [[&[usize]; 7]; 4] = [
    [&[1], &[2], &[4], &[5], &[7], &[8], &[10, 11, 12]],
    [&[2], &[3], &[5], &[6], &[7, 8, 9], &[10], &[11]],
    [&[3], &[1], &[4, 5, 6], &[8], &[9], &[11], &[12]],
    [&[1, 2, 3], &[6], &[4], &[9], &[7], &[12], &[10]],
];

/// The binary `[7 x 4, 12]` 3-PIR array code that is the standard small
/// example of the model.
pub fn intro_code() -> ArrayCode {
    let columns = INTRO_COLUMNS
        .iter()
        .map(|cells| {
            Column::new(
                cells
                    .iter()
                    .map(|parts| PartVector::from_indices(12, parts.iter().map(|i| i - 1)).unwrap())
                    .collect(),
            )
        })
        .collect::<Vec<_>>();
    ArrayCode::new(12, 7, columns).expect("reference code is valid")
}

/// `copies` columns, each storing all of `x_1..x_t` as singletons.
pub fn replication_code(t: usize, copies: usize) -> ArrayCode {
    let column = Column::new((0..t).map(|i| PartVector::unit(t, i)).collect());
    ArrayCode::new(t, t, alloc::vec![column; copies]).expect("replication code is valid")
}

/// Builds a code from 0-based part lists, one list of cells per column.
pub fn from_index_lists(p: usize, t: usize, columns: &[Vec<Vec<usize>>]) -> Result<ArrayCode> {
    let columns = columns
        .iter()
        .map(|cells| {
            cells
                .iter()
                .map(|parts| PartVector::from_indices(p, parts.iter().copied()))
                .collect::<Result<Vec<_>>>()
                .map(Column::new)
        })
        .collect::<Result<Vec<_>>>()?;
    ArrayCode::new(p, t, columns)
}
