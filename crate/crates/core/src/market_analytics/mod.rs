//! Equity-panel analytics: log returns, windowed correlation, the rolling
//! PCA spectrum and normalized price-trajectory distances.

mod correlation;
mod panel;
mod pca;
mod trajectory;

pub use correlation::{
    correlation_histogram, correlation_matrix, CorrelationHistogram, CorrelationMatrix,
};
pub use panel::{log_returns, PricePanel, ReturnPanel, WindowSpec};
pub use pca::{rolling_pca, rolling_pca_with, spectrum, NegativeEigenvalue, PcaSpectrum};
pub use trajectory::{
    flat_trajectory, normalized_trajectory, rolling_trajectory_norm,
    rolling_trajectory_norm_with, trajectory_dispersion, trajectory_distance_matrix,
    TrajectoryNorms,
};
