//! Exact recursions for genus-one enumerative invariants with fixed
//! j-invariant in `P^n` (`n ≤ 4`), and the genus-zero machinery under them.
//!
//! The stack, bottom up:
//!
//! - [`constraints`]: constraint multisets, dimension counts, splits
//! - [`sigma`]: genus-zero counts `σ_d`
//! - [`intersections`]: `c1(L*)^i ev*(H^j)` on 1-pointed curves, and the
//!   blown-up versions
//! - [`tau`]: `τ_d` by the general formula and the `P^2`/`P^3` closed forms
//! - [`cache`]: memo tables and their on-disk format
//!
//! ```
//! use fixedj::{ConstraintMultiset, Engine, JClass};
//!
//! let mut engine = Engine::new(3).unwrap();
//! let lines = ConstraintMultiset::parse("l:7", 3).unwrap();
//! let tau = engine.tau_general(2, &lines, JClass::Generic).unwrap();
//! assert_eq!(tau.value, 0.into());
//! ```

pub mod arith;
pub mod cache;
pub mod constraints;
mod engine;
pub mod error;
pub mod intersections;
pub mod sigma;
pub mod tau;

pub use arith::Rational;
pub use cache::{Cache, CacheError};
pub use constraints::{ConstraintMultiset, Distribution};
pub use engine::{Engine, Stats};
pub use error::{Error, Result};
pub use intersections::{PhiKey, TildeKey};
pub use sigma::{sigma_p2_oracle, SigmaKey};
pub use tau::{tau_rescale, FormulaPath, JClass, TauResult};
