//! Applications built on extended convolution: pattern detection by
//! optimal voting filters, the ECD descriptor, complementary contour
//! matching and line integral convolution.

pub mod contour;
pub mod ecd;
pub mod filters;
pub mod lic;
pub mod vote;

pub use contour::{match_contours, ContourMatch, ContourScene, Placement};
pub use ecd::{ecd, ecd_batch, match_descriptors, Descriptor, PrCurves};
pub use lic::{lic, lic_with, LicParams};
pub use vote::{build_optimal_filter, detect_pattern, find_peaks, Detection, Peak, Splat, VoteFilter};
