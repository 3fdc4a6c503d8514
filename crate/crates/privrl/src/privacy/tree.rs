use std::collections::HashMap;

use rand_chacha::ChaCha8Rng;

use super::{tree_depth, NoiseDist, PrivacyError};
use crate::linalg::{SymmetricMatrix, Vector};
use crate::rng::{stream, Role};

/// Node `(level, index)` covering leaves `index·2^level + 1 ..= (index + 1)·2^level`.
pub type NodeId = (u32, usize);

/// Payload stored in a tree node.
pub trait TreePayload: Clone {
    fn zero(dim: usize) -> Self;
    fn sample(dim: usize, scale: f64, dist: NoiseDist, rng: &mut ChaCha8Rng) -> Self;
    fn accumulate(&mut self, other: &Self);
}

impl TreePayload for SymmetricMatrix {
    fn zero(dim: usize) -> Self {
        SymmetricMatrix::zeros(dim)
    }

    fn sample(dim: usize, scale: f64, dist: NoiseDist, rng: &mut ChaCha8Rng) -> Self {
        super::sample_symmetric(dim, scale, dist, rng)
    }

    fn accumulate(&mut self, other: &Self) {
        self.add_assign(other);
    }
}

impl TreePayload for Vector {
    fn zero(dim: usize) -> Self {
        Vector::zeros(dim)
    }

    fn sample(dim: usize, scale: f64, dist: NoiseDist, rng: &mut ChaCha8Rng) -> Self {
        super::sample_vector(dim, scale, dist, rng)
    }

    fn accumulate(&mut self, other: &Self) {
        *self += other;
    }
}

/// Dyadic decomposition of `[1, k]`, largest node first.
pub fn dyadic_nodes(k: usize) -> Vec<NodeId> {
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    let top = usize::BITS - 1 - k.leading_zeros();
    for level in (0..=top).rev() {
        if (k >> level) & 1 == 1 {
            out.push((level, (k >> level) - 1));
        }
    }
    out
}

/// Upper bound `⌈log₂ n⌉ + 1` on the nodes summed for any prefix of `n` leaves.
pub fn max_nodes(n: usize) -> usize {
    tree_depth(n)
}

/// Binary-tree mechanism over `num_leaves` releases.
///
/// Node payloads are drawn lazily from the stream keyed by
/// `(seed, tree_id, node)`, so a payload never changes once observed and the
/// cache only holds the nodes of the latest query.
#[derive(Debug, Clone)]
pub struct NoiseTree<P: TreePayload> {
    num_leaves: usize,
    dim: usize,
    scale: f64,
    dist: NoiseDist,
    seed: u64,
    tree_id: u64,
    cache: HashMap<NodeId, P>,
}

impl<P: TreePayload> NoiseTree<P> {
    pub fn new(num_leaves: usize, dim: usize, scale: f64, dist: NoiseDist, seed: u64, tree_id: u64) -> Self {
        Self { num_leaves: num_leaves.max(1), dim, scale, dist, seed, tree_id, cache: HashMap::new() }
    }

    pub fn num_leaves(&self) -> usize {
        self.num_leaves
    }

    pub fn levels(&self) -> usize {
        tree_depth(self.num_leaves)
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Payload of one node.
    pub fn node(&mut self, id: NodeId) -> P {
        if let Some(p) = self.cache.get(&id) {
            return p.clone();
        }
        self.draw(id)
    }

    fn draw(&self, id: NodeId) -> P {
        let node_key = ((id.0 as u64) << 48) ^ id.1 as u64;
        let mut rng = stream(self.seed, Role::TreeNode, self.tree_id, node_key);
        P::sample(self.dim, self.scale, self.dist, &mut rng)
    }

    /// Sum of node payloads on the dyadic decomposition of `[1, k]`, and the
    /// number of nodes used. `k = 0` yields the zero payload.
    pub fn prefix_with_count(&mut self, k: usize) -> Result<(P, usize), PrivacyError> {
        if k > self.num_leaves {
            return Err(PrivacyError::OutOfRange { k, n: self.num_leaves });
        }
        let nodes = dyadic_nodes(k);
        let mut acc = P::zero(self.dim);
        let mut fresh = HashMap::with_capacity(nodes.len());
        for id in &nodes {
            let payload = match self.cache.remove(id) {
                Some(p) => p,
                None => self.draw(*id),
            };
            acc.accumulate(&payload);
            fresh.insert(*id, payload);
        }
        self.cache = fresh;
        Ok((acc, nodes.len()))
    }

    pub fn prefix(&mut self, k: usize) -> Result<P, PrivacyError> {
        self.prefix_with_count(k).map(|(p, _)| p)
    }
}
