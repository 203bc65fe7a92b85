//! Exact nearest-neighbor search by blocked linear scan.
//!
//! Points are stored SoA in blocks of [`NN_LANES`]; a query computes a whole
//! block of distances per pass. Distances are accumulated joint by joint in
//! the same order as [`l2_distance`](crate::vector::l2_distance), so reported
//! distances equal it bitwise.

use std::collections::HashSet;

use crate::error::{check_dim, Error, Result};
use crate::vector::Configuration;

pub const NN_LANES: usize = 8;

#[derive(Debug, Clone)]
pub struct NNIndex {
    dim: usize,
    /// Block `b`, joint `j` lives at `b * dim + j`.
    blocks: Vec<[f32; NN_LANES]>,
    payloads: Vec<usize>,
    seen: HashSet<usize>,
}

impl NNIndex {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            blocks: Vec::new(),
            payloads: Vec::new(),
            seen: HashSet::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.payloads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.payloads.is_empty()
    }

    /// Payloads in insertion order.
    pub fn payloads(&self) -> &[usize] {
        &self.payloads
    }

    pub fn insert(&mut self, q: &Configuration, payload: usize) -> Result<()> {
        check_dim(self.dim, q.dim())?;
        if !self.seen.insert(payload) {
            return Err(Error::DuplicatePayload(payload));
        }
        let slot = self.payloads.len() % NN_LANES;
        if slot == 0 {
            self.blocks
                .extend(std::iter::repeat([0.0; NN_LANES]).take(self.dim));
        }
        let base = self.blocks.len() - self.dim;
        for (j, &v) in q.values().iter().enumerate() {
            self.blocks[base + j][slot] = v;
        }
        self.payloads.push(payload);
        Ok(())
    }

    /// Calls `visit(insertion_index, distance)` for every point, in order.
    fn scan(&self, q: &Configuration, mut visit: impl FnMut(usize, f32)) -> Result<()> {
        check_dim(self.dim, q.dim())?;
        let n = self.payloads.len();
        for (b, rows) in self.blocks.chunks_exact(self.dim.max(1)).enumerate() {
            let mut acc = [0.0f32; NN_LANES];
            for (row, &x) in rows.iter().zip(q.values()) {
                for k in 0..NN_LANES {
                    let d = row[k] - x;
                    acc[k] += d * d;
                }
            }
            let first = b * NN_LANES;
            for (k, &d2) in acc.iter().enumerate().take(n - first) {
                visit(first + k, d2.sqrt());
            }
        }
        if self.dim == 0 {
            (0..n).for_each(|i| visit(i, 0.0));
        }
        Ok(())
    }

    /// Closest point as `(payload, distance)`; ties go to the earliest insert.
    pub fn nearest(&self, q: &Configuration) -> Result<(usize, f32)> {
        if self.is_empty() {
            return Err(Error::EmptyIndex);
        }
        let mut best = (usize::MAX, f32::INFINITY);
        self.scan(q, |i, d| {
            if d < best.1 || best.0 == usize::MAX {
                best = (i, d);
            }
        })?;
        Ok((self.payloads[best.0], best.1))
    }

    /// Up to `k` closest points, ascending by `(distance, insertion order)`.
    pub fn k_nearest(&self, q: &Configuration, k: usize) -> Result<Vec<(usize, f32)>> {
        if k == 0 {
            return Err(Error::ZeroK);
        }
        if self.is_empty() {
            return Err(Error::EmptyIndex);
        }
        let mut best: Vec<(f32, usize)> = Vec::with_capacity(k + 1);
        self.scan(q, |i, d| {
            if best.len() == k && d >= best[k - 1].0 {
                return;
            }
            // Later inserts go after equal distances, keeping the tie-break.
            let at = best.partition_point(|&(bd, _)| bd <= d);
            best.insert(at, (d, i));
            best.truncate(k);
        })?;
        Ok(best
            .into_iter()
            .map(|(d, i)| (self.payloads[i], d))
            .collect())
    }
}
