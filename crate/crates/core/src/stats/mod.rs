//! Random-graph and tree-percolation statistics with analytic gradients.

pub mod degrees;
pub mod er;
pub mod subgraphs;
pub mod trees;
pub mod triangles;

pub use degrees::{degree_statistic, DegreeCount};
pub use er::{edge_tuple_orbits, Adjacency, ErdosRenyiModel};
pub use subgraphs::{subgraph_statistic, SubgraphCount, SubgraphPattern};
pub use trees::{percolation_statistic, ComponentCount, TreeModel, UnionFind};
pub use triangles::{triangle_statistic, TriangleCount};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatisticKind {
    Triangles,
    Subgraph,
    Degree(usize),
    TreePercolation,
}

/// Exponent `β` of the known rate `d_K = O(size^β)`; the size is `n` for
/// graph statistics and the edge count for trees.
pub fn theoretical_rate(kind: StatisticKind, alpha: f64) -> Result<f64> {
    match kind {
        StatisticKind::Triangles => {
            if !(0.0..1.0).contains(&alpha) {
                return Err(Error::OutOfRange(format!("triangle rates need alpha in [0, 1), got {alpha}")));
            }
            Ok(if alpha <= 0.5 {
                -1.0 + alpha
            } else if alpha <= 2.0 / 3.0 {
                -0.75 + alpha / 2.0
            } else {
                -5.0 * (1.0 - alpha) / 4.0
            })
        }
        StatisticKind::Subgraph => {
            if alpha != 0.0 {
                return Err(Error::OutOfRange("subgraph rates need a fixed p (alpha = 0)".into()));
            }
            Ok(-1.0)
        }
        StatisticKind::Degree(0) => {
            if !(1.0..2.0).contains(&alpha) {
                return Err(Error::OutOfRange(format!("isolated-vertex rates need alpha in [1, 2), got {alpha}")));
            }
            Ok(-1.0 + alpha / 2.0)
        }
        StatisticKind::Degree(d) => {
            let d = d as f64;
            let upper = (3.0 * d - 1.0) / (3.0 * d - 2.0);
            if !(alpha >= 1.0 && alpha < upper) {
                return Err(Error::OutOfRange(format!(
                    "degree-{d} rates need alpha in [1, {upper}), got {alpha}"
                )));
            }
            Ok(0.5 - 1.5 * d - alpha + 1.5 * alpha * d)
        }
        StatisticKind::TreePercolation => Ok(-0.5),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_examples() {
        assert_eq!(theoretical_rate(StatisticKind::Triangles, 0.0).unwrap(), -1.0);
        assert_eq!(theoretical_rate(StatisticKind::Degree(0), 1.0).unwrap(), -0.5);
        assert_eq!(theoretical_rate(StatisticKind::Triangles, 0.5).unwrap(), -0.5);
        assert_eq!(-0.75 + 0.25, -0.5);
        assert!((theoretical_rate(StatisticKind::Triangles, 0.6).unwrap() + 0.45).abs() < 1e-12);
        assert!((theoretical_rate(StatisticKind::Triangles, 0.8).unwrap() + 0.25).abs() < 1e-12);
        assert_eq!(theoretical_rate(StatisticKind::Degree(1), 1.0).unwrap(), -0.5);
        assert!(theoretical_rate(StatisticKind::Degree(1), 2.0).is_err());
        assert!(theoretical_rate(StatisticKind::Triangles, 1.0).is_err());
        assert_eq!(theoretical_rate(StatisticKind::TreePercolation, 0.0).unwrap(), -0.5);
        assert_eq!(theoretical_rate(StatisticKind::Subgraph, 0.0).unwrap(), -1.0);
    }
}
