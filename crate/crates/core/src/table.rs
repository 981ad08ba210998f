use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ordinal::{Ordinal, OrdinalGrid};
use crate::par::Exec;
use crate::walk::Walker;

/// Largest grid accepted by [`RhoTable::build`] (the matrix is dense).
pub const MAX_TABLE_POINTS: usize = 20_000;

/// `ρ` on every pair `α < β` of a grid. Values are stored as ranks into the
/// sorted list of distinct values, so comparisons between cells are integer
/// comparisons.
#[derive(Debug, Clone)]
pub struct RhoTable {
    grid: OrdinalGrid,
    values: Vec<Ordinal>,
    ranks: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RhoRecord {
    pub alpha: Ordinal,
    pub beta: Ordinal,
    pub rho: Ordinal,
}

impl RhoTable {
    pub fn build(walker: &Walker, grid: OrdinalGrid, exec: Exec) -> Result<Self> {
        let n = grid.len();
        if n > MAX_TABLE_POINTS {
            return Err(Error::EnumerationCap {
                cap: MAX_TABLE_POINTS,
            });
        }
        let points = grid.points();
        let rows: Vec<Vec<Ordinal>> = exec.try_map_range(n, |i| {
            points[i + 1..]
                .iter()
                .map(|b| walker.rho(&points[i], b))
                .collect::<Result<Vec<_>>>()
        })?;

        let mut distinct: BTreeSet<Ordinal> = rows.iter().flatten().cloned().collect();
        distinct.insert(Ordinal::zero());
        let values: Vec<Ordinal> = distinct.into_iter().collect();
        let mut ranks = vec![0u32; n * n];
        for (i, row) in rows.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                let r = values.binary_search(v).expect("collected above") as u32;
                ranks[i * n + i + 1 + k] = r;
            }
        }
        Ok(RhoTable {
            grid,
            values,
            ranks,
        })
    }

    pub fn grid(&self) -> &OrdinalGrid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn pair_count(&self) -> usize {
        let n = self.len();
        n * n.saturating_sub(1) / 2
    }

    /// Distinct values, increasing.
    pub fn values(&self) -> &[Ordinal] {
        &self.values
    }

    /// Rank of `ρ(points[i], points[j])` for `i ≤ j`.
    pub fn rank(&self, i: usize, j: usize) -> u32 {
        debug_assert!(i <= j);
        self.ranks[i * self.len() + j]
    }

    /// `ρ(points[i], points[j])` for `i ≤ j`.
    pub fn value(&self, i: usize, j: usize) -> &Ordinal {
        &self.values[self.rank(i, j) as usize]
    }

    pub fn get(&self, alpha: &Ordinal, beta: &Ordinal) -> Option<&Ordinal> {
        let i = self.grid.index_of(alpha)?;
        let j = self.grid.index_of(beta)?;
        (i <= j).then(|| self.value(i, j))
    }

    /// Rank of an arbitrary ordinal among the table values: the number of
    /// values strictly below it.
    pub fn rank_floor(&self, v: &Ordinal) -> u32 {
        self.values.partition_point(|x| x < v) as u32
    }

    /// All pairs `α < β`, ordered by `α` then `β`.
    pub fn records(&self) -> impl Iterator<Item = RhoRecord> + '_ {
        let points = self.grid.points();
        let n = points.len();
        (0..n).flat_map(move |i| {
            (i + 1..n).map(move |j| RhoRecord {
                alpha: points[i].clone(),
                beta: points[j].clone(),
                rho: self.value(i, j).clone(),
            })
        })
    }
}
