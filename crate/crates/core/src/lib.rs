//! Self-inverse random variables: laws with `Z =d 1/Z`.
//!
//! The crate provides a catalog of laws, ratio laws of bivariate joints
//! (densities by quadrature, exact pmfs for tables), the exchangeable-pair
//! construction `(W Z^I, W Z^(1-I))`, and tests that verify or refute
//! self-inverseness, exchangeability and iid-ratio decomposability.

pub mod construction;
pub mod dist;
pub mod error;
pub mod experiments;
pub mod grammar;
pub mod inference;
pub mod io;
pub mod joint;
pub mod quadrature;
pub mod ratio;
pub mod rng;
pub mod sample;
pub mod special;

pub use construction::{build_pair, exchangeability_certificate, ConstructedPair};
pub use dist::{DistKind, DistSpec};
pub use error::{Error, Result};
pub use grammar::{parse_dist, parse_joint, parse_spec, Spec};
pub use joint::{DiscreteTable, JointSpec, RegionUniform};
pub use rng::{new_stream, RandomStream, StreamKey};
pub use sample::{PairSample, Provenance, Sample};
