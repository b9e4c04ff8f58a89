//! Distance matrices between series and the tools to audit them: matrix
//! norms, the empirical triangle-inequality test and agglomerative
//! clustering.

mod cluster;
mod distance;
mod norms;
mod triangle;

pub use cluster::{hierarchical_cluster, Dendrogram, Linkage, Merge};
pub use distance::{distance_matrix, distance_matrix_with, DistanceMatrix};
pub use norms::{matrix_norm, MatrixNorm, NormSummary};
pub use triangle::{
    classify, triangle_test, triangle_test_with, TriangleClass, TriangleCounts, TriangleReport,
    TriangleTestSummary, TriangleTriple,
};
