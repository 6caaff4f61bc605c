//! Control balls of the metric `ds² = dx₁² + f(x₁)⁻² dx₂²`.

pub mod annulus;
pub mod ball;
pub mod cone;
pub mod geodesic;
pub mod kernel;
pub mod oracle;
pub mod sequence;
pub mod straight;

pub use annulus::{annulus_measures, AnnulusMeasure};
pub use ball::{
    ball_volume, cross_section, d_hat, height, r_star, regime, rstar_and_height, threshold, volume_branches,
    BallModel, HeightProfile, Regime,
};
pub use cone::{annulus_area, in_annulus, in_cone, in_dual_cone, Point};
pub use geodesic::{
    cone_distance, geodesic_radius, height_hstar, solve_lambda, solve_turning, turning_radius, Turning,
};
pub use kernel::{kernel_k, kernel_size, KernelForm};
pub use oracle::GridOracle;
pub use sequence::{first_halving_index, radius_sequence, radius_sequence_until};
pub use straight::{dual_cone_integral, forward_cone_integral, straight_across_n, StraightAcross};
