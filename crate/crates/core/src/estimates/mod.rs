//! Discrete modulation-frequency boxes, multilinear convolution bounds and
//! the quadrilinear functional `S_φ`.

mod box_function;
mod convolution;
mod s_phi;

pub use box_function::{BoxFunction, BoxGrid, Row};
pub use convolution::{
    convolution_at_origin, majorant_factor, multi_convolution_at_origin, ratio_scan,
    scale_ladder, BoundVariant, BoxConfig, ConfigStat, ConvolutionReport, RatioScan,
};
pub use s_phi::{s_phi, s_phi_multi, Trajectory};
