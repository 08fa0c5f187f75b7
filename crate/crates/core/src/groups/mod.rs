//! Free groups, integer Heisenberg groups and matrix groups, with the
//! enumeration primitives the counting engines consume.

pub mod free;
pub mod heisenberg;
pub mod matrix;

pub use free::{
    cyclic_data, free_conj_count_bfs, free_conj_count_closed, free_conj_count_literal, reduce, FreeClassSpec, Word,
};
pub use heisenberg::{HeisenbergElt, HeisenbergSpec};
pub use matrix::{matrix_ball_enumerate, orbit_distance, Ball, BallConfig, BallElement, GroupSpec, LatticeData};

use crate::error::{Error, Result};

/// A group addressed by preset name.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupPreset {
    Free { rank: usize },
    Heisenberg(HeisenbergSpec),
    Matrix(GroupSpec),
}

impl GroupPreset {
    /// `"free:k"`, `"heisenberg:k"` or `"gamma2"`.
    pub fn parse(name: &str) -> Result<Self> {
        let rank = |s: &str| {
            s.parse::<usize>().map_err(|_| Error::InvalidGroup(format!("bad rank {s:?} in group preset {name:?}")))
        };
        match name.split_once(':') {
            Some(("free", k)) => {
                let rank = rank(k)?;
                if rank < 2 {
                    return Err(Error::InvalidGroup(format!("free group rank must be at least 2, got {rank}")));
                }
                Ok(GroupPreset::Free { rank })
            }
            Some(("heisenberg", k)) => Ok(GroupPreset::Heisenberg(HeisenbergSpec::standard(rank(k)?)?)),
            None if name == "gamma2" => Ok(GroupPreset::Matrix(GroupSpec::gamma2())),
            _ => Err(Error::InvalidGroup(format!(
                "unknown group preset {name:?} (expected free:k, heisenberg:k or gamma2)"
            ))),
        }
    }
}
