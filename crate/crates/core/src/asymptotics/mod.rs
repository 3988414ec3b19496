//! Limiting objects: the correlated GFF kernel, contour quadrature for the
//! covariances, positive-definiteness and Gaussian joint moments.

mod covariance;
mod kernel;
pub mod quadrature;

pub use covariance::{
    contour_integral, covariance_csv, covariance_table, gaussian_joint_prediction, pd_check,
    prop1_moment_covariance, theorem2_covariance, CovarianceResult, CovarianceRow, PdReport, RegularFamilyLimit,
    COVARIANCE_CSV_HEADER, ROUTE_AGREEMENT,
};
pub use kernel::{contour_kernel, gff_kernel, kernel_cij};
