//! Fuzzy-interval consensus analysis for repeated measurements.
//!
//! Every measurement `v ± e` is treated as a trapezoidal membership function
//! (full membership on `[v-e, v+e]`, linear ramps down to zero at `v±2e`)
//! instead of a point. Summing the trapezoids of a sample gives an exact
//! piecewise-linear aggregate curve; the region where that curve is maximal
//! is the *consensus* — the location the largest subset of measurements can
//! agree on — and measurements whose plausible interval misses the consensus
//! zone are flagged as erroneous rather than averaged in.
//!
//! The crate provides:
//!
//! - [`Trapezoid`] / [`Measurement`]: fuzzy representation of `v ± e` data,
//!   in one or more dimensions;
//! - [`build_curve`] / [`Curve`]: exact aggregate membership curves, plus
//!   histogram and time-series smoothing helpers built on them;
//! - [`consensus_crisp`] / [`consensus_fuzzy_1d`] / [`consensus_grid`]: the
//!   max-overlap consensus estimator with erroneous-measurement detection
//!   (exact sweep for 1D/2D, grid search for higher dimensions);
//! - [`estimators`]: mean, median, and Huber/Tukey/Hampel/Andrews
//!   M-estimators with a before/after contamination comparison report;
//! - [`survey`]: grade-survey screening — flags respondents who disagree
//!   with the per-question consensus on most of their answers;
//! - [`io`] / [`svg`] / [`gen`]: deterministic CSV and SVG emission and a
//!   seeded normal generator for the CLI.
//!
//! # Example
//!
//! ```
//! use fuzzy_consensus::{classify, consensus_crisp, Measurement, DEFAULT_MIN_DEPTH};
//!
//! let sample = vec![
//!     Measurement::scalar("S1", 1.9, 0.2).unwrap(),
//!     Measurement::scalar("S2", 2.0, 0.2).unwrap(),
//!     Measurement::scalar("S3", 2.1, 0.2).unwrap(),
//!     Measurement::scalar("S4", 4.0, 0.2).unwrap(),
//! ];
//! let result = consensus_crisp(&sample).unwrap();
//! assert_eq!(result.depth, 3.0);
//! assert_eq!(result.point_estimate, vec![2.0]);
//!
//! let verdict = classify(&sample, &result, DEFAULT_MIN_DEPTH);
//! assert_eq!(verdict.erroneous, vec!["S4".to_string()]);
//! ```

pub mod consensus;
pub mod curve;
pub mod error;
pub mod estimators;
pub mod gen;
pub mod interval;
pub mod io;
pub mod measurement;
pub mod survey;
pub mod svg;
pub mod trapezoid;

pub use consensus::{
    classify, consensus_crisp, consensus_fuzzy_1d, consensus_grid, Bounds, Classification,
    ConsensusResult, DepthMode, DEFAULT_MEMBERSHIP_THRESHOLD, DEFAULT_MIN_DEPTH,
};
pub use curve::{
    build_curve, build_curve_with, histogram, smooth_timeseries, Curve, Histogram, HistogramSpec,
    Normalization, TimeSeriesPoint,
};
pub use error::{Error, Result};
pub use estimators::{m_estimate, mad_scale, mean, median, robustness_report, Psi};
pub use interval::Interval;
pub use measurement::Measurement;
pub use survey::{analyze_survey, survey_estimator_comparison, SurveyOptions, SurveyTable};
pub use trapezoid::Trapezoid;
