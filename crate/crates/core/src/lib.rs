//! Exact computations with coherent systems `(E, V)` on the projective line.
//!
//! ```
//! use linstab_core::coherent::CoherentSystemP1;
//! use linstab_core::fields_poly::{parse_form, FieldSpec};
//! use linstab_core::stability::{linstab_exhaustive, slope_stability_p1, SearchConfig, VerdictKind};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let f = FieldSpec::prime(5)?;
//! let form = |s: &str, d| parse_form(s, d, f).unwrap();
//! let sys = CoherentSystemP1::new(
//!     f,
//!     vec![1, 2],
//!     vec![
//!         vec![form("s", 1), form("0", 2)],
//!         vec![form("t", 1), form("s^2", 2)],
//!         vec![form("0", 1), form("t^2", 2)],
//!         vec![form("0", 1), form("s*t", 2)],
//!     ],
//! )?;
//! let m = sys.dual_span()?;
//! assert_eq!((m.kernel.rank(), m.kernel.degree()), (2, -3));
//! let _ = slope_stability_p1(&m.kernel);
//! let verdict = linstab_exhaustive(&sys, &SearchConfig::default())?;
//! assert_ne!(verdict.kind, VerdictKind::EvidenceOnly);
//! # Ok(())
//! # }
//! ```

pub mod butler;
pub mod coherent;
pub mod fields_poly;
pub mod hyperelliptic;
pub mod linalg;
pub mod numerology;
pub mod p1_sheaves;
pub mod seed;
pub mod stability;
