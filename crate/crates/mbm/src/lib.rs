//! Media-based modulation (MBM) link-level simulation and analysis.
//!
//! Transmitting through selectable channel states gives a constellation
//! of i.i.d. Gaussian receive-gain vectors; this crate estimates its
//! error rates by reproducible parallel Monte Carlo and evaluates every
//! closed form needed to study the diversity–multiplexing trade-off,
//! uncoded and under MDS coding, plus the gain from pruning low-energy
//! constellation points.
//!
//! Module map:
//! - [`specfun`]: Q, gamma family, chi-squared, hypergeometrics, quadrature
//! - [`constellation`] + [`sim`]: channel model, ML detection, uncoded SER
//! - [`analysis`]: pairwise error probability closed forms, bounds, DMT curves
//! - [`gf`] + [`mds`]: finite fields and Reed–Solomon structure
//! - [`coded`]: codeword mapping, exhaustive ML decoding, word-error bounds
//! - [`selection`]: low-energy pruning analytics and simulation
//! - [`rng`]: the substream scheme behind bit-identical parallel runs

// `!(x > 0)`-style guards deliberately reject NaN on the same branch,
// and the tabulated rational-approximation coefficients keep their
// reference guard digits.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]
#![allow(clippy::manual_is_multiple_of)]

pub mod analysis;
pub mod coded;
pub mod constellation;
pub mod gf;
pub mod mds;
pub mod rng;
pub mod selection;
pub mod sim;
pub mod specfun;
