//! Cluster evaluation: confusion against ground-truth classes, adjusted Rand
//! index, block-ordered crossed matrices, and per-co-cluster mutual
//! information.

mod confusion;
mod crossed;
mod mi;

pub use confusion::{adjusted_rand_index, confusion, contingency, ContingencyReport};
pub use crossed::{crossed_matrix, Block, CrossedMatrix};
pub use mi::{mutual_information, mutual_information_table, InfoUnit, MiCell, MiReport};
