//! Exact truncated arithmetic in towers of quadratic extensions of `Q_p`.

mod field;
mod galois;
mod number;
mod symbols;
mod units;

pub use field::{FieldElement, LocalField, DEFAULT_BUDGET};
pub use galois::{norm_to, trace_to, Embedding, GaloisElement};
pub use number::{Padic, PrimeContext, ValBound, EXACT};
pub use symbols::{hilbert_symbol, square_class, SquareClass};
pub use units::{BasisElement, UnitGroup};
