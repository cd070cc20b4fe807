//! Descriptive proximity approximations over feature-described grids, and
//! classification of regions as approximate groupoids, semigroups, monoids
//! and groups under a binary operation.
//!
//! ```
//! use descriptive_proximity::{approx, fixtures, space::Region};
//!
//! let space = fixtures::table2();
//! let b = Region::new(&space, fixtures::EXAMPLE2_REGION).unwrap();
//! assert_eq!(approx::upper_approximation(&b).len(), 5);
//! ```

pub mod algebra;
pub mod approx;
pub mod audit;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod report;
pub mod space;

pub use error::{Error, Result};
