//! Static kd-tree over a point set.
//!
//! The tree is built once over a copy of the points and never mutated, so a
//! single index can be shared by any number of query threads. Radius queries
//! use the closed ball (`‖q − p‖ ≤ r`, compared on squared distances) and all
//! results are returned in a deterministic order: ascending point index for
//! radius queries, ascending `(distance, index)` for k-NN.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::Vec3;

const LEAF_SIZE: usize = 12;

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        dim: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

/// Exact radius and k-nearest-neighbor queries over a fixed point set.
#[derive(Debug, Clone)]
pub struct SpatialIndex {
    points: Vec<Vec3>,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

/// Heap entry ordered by `(squared distance, index)`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    dist2: f64,
    index: usize,
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist2
            .total_cmp(&other.dist2)
            .then(self.index.cmp(&other.index))
    }
}

impl SpatialIndex {
    pub fn build(points: &[Vec3]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("cannot index an empty point set"));
        }
        let mut index = SpatialIndex {
            points: points.to_vec(),
            order: (0..points.len()).collect(),
            nodes: Vec::with_capacity(2 * points.len() / LEAF_SIZE + 1),
        };
        index.build_node(0, points.len());
        Ok(index)
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }

        // Split along the axis of widest spread.
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for &i in &self.order[start..end] {
            lo = lo.inf(&self.points[i]);
            hi = hi.sup(&self.points[i]);
        }
        let dim = (hi - lo).imax();
        let mid = start + (end - start) / 2;
        let points = &self.points;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            points[a][dim].total_cmp(&points[b][dim])
        });
        let value = self.points[self.order[mid]][dim];

        self.nodes.push(Node::Leaf { start, end });
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        self.nodes[id] = Node::Split {
            dim,
            value,
            left,
            right,
        };
        id
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    /// Indices of all points with `‖p − query‖ ≤ radius`, ascending.
    pub fn radius(&self, query: &Vec3, radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        if radius >= 0.0 {
            self.radius_rec(0, query, radius * radius, &mut out);
        }
        out.sort_unstable();
        out
    }

    /// Number of points with `‖p − query‖ ≤ radius`.
    pub fn count_within(&self, query: &Vec3, radius: f64) -> usize {
        let mut out = Vec::new();
        if radius >= 0.0 {
            self.radius_rec(0, query, radius * radius, &mut out);
        }
        out.len()
    }

    fn radius_rec(&self, node: usize, query: &Vec3, r2: f64, out: &mut Vec<usize>) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    if (self.points[i] - query).norm_squared() <= r2 {
                        out.push(i);
                    }
                }
            }
            Node::Split {
                dim,
                value,
                left,
                right,
            } => {
                let delta = query[dim] - value;
                let (near, far) = if delta < 0.0 {
                    (left, right)
                } else {
                    (right, left)
                };
                self.radius_rec(near, query, r2, out);
                if delta * delta <= r2 {
                    self.radius_rec(far, query, r2, out);
                }
            }
        }
    }

    /// The `k` nearest points as `(index, distance)`, ordered by distance then index.
    pub fn knn(&self, query: &Vec3, k: usize) -> Vec<(usize, f64)> {
        let k = k.min(self.points.len());
        if k == 0 {
            return Vec::new();
        }
        let mut heap = BinaryHeap::with_capacity(k + 1);
        self.knn_rec(0, query, k, &mut heap);
        heap.into_sorted_vec()
            .into_iter()
            .map(|c| (c.index, c.dist2.sqrt()))
            .collect()
    }

    /// Nearest point to `query`; ties resolve to the lowest index.
    pub fn nearest(&self, query: &Vec3) -> (usize, f64) {
        self.knn(query, 1)[0]
    }

    fn knn_rec(&self, node: usize, query: &Vec3, k: usize, heap: &mut BinaryHeap<Candidate>) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    let cand = Candidate {
                        dist2: (self.points[i] - query).norm_squared(),
                        index: i,
                    };
                    if heap.len() < k {
                        heap.push(cand);
                    } else if cand < *heap.peek().expect("heap holds k items") {
                        heap.pop();
                        heap.push(cand);
                    }
                }
            }
            Node::Split {
                dim,
                value,
                left,
                right,
            } => {
                let delta = query[dim] - value;
                let (near, far) = if delta < 0.0 {
                    (left, right)
                } else {
                    (right, left)
                };
                self.knn_rec(near, query, k, heap);
                let worst = heap.peek().map_or(f64::INFINITY, |c| c.dist2);
                if heap.len() < k || delta * delta <= worst {
                    self.knn_rec(far, query, k, heap);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<Vec3> {
        let mut pts = Vec::new();
        for i in 0..10 {
            for j in 0..10 {
                pts.push(Vec3::new(i as f64, j as f64, 0.0));
            }
        }
        pts
    }

    #[test]
    fn empty_is_rejected() {
        assert!(matches!(
            SpatialIndex::build(&[]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn zero_radius_returns_the_point_itself() {
        let pts = grid();
        let index = SpatialIndex::build(&pts).unwrap();
        assert_eq!(index.radius(&pts[37], 0.0), vec![37]);
    }

    #[test]
    fn knn_with_k_equal_n_returns_everything() {
        let pts = grid();
        let index = SpatialIndex::build(&pts).unwrap();
        let mut all: Vec<usize> = index
            .knn(&Vec3::new(3.3, 4.1, 0.2), pts.len())
            .into_iter()
            .map(|(i, _)| i)
            .collect();
        all.sort_unstable();
        assert_eq!(all, (0..pts.len()).collect::<Vec<_>>());
    }

    #[test]
    fn nearest_tie_breaks_to_lowest_index() {
        let pts = vec![
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(-1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        ];
        let index = SpatialIndex::build(&pts).unwrap();
        assert_eq!(index.nearest(&Vec3::zeros()).0, 0);
    }
}
