//! Square classes and the tame Hilbert symbol.

use super::field::FieldElement;
use crate::error::Result;

/// Class of an element in `E^*/E^{*2}` for odd residue characteristic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SquareClass {
    pub parity: u8,
    pub residue_is_square: bool,
}

impl SquareClass {
    pub const TRIVIAL: SquareClass = SquareClass { parity: 0, residue_is_square: true };

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: SquareClass) -> SquareClass {
        SquareClass {
            parity: self.parity ^ other.parity,
            residue_is_square: self.residue_is_square == other.residue_is_square,
        }
    }

    pub fn is_trivial(self) -> bool {
        self == Self::TRIVIAL
    }

    /// Position among the representatives `1, u, pi, u*pi`.
    pub fn rep_index(self) -> usize {
        (self.parity as usize) * 2 + usize::from(!self.residue_is_square)
    }
}

pub fn square_class(x: &FieldElement) -> Result<SquareClass> {
    let v = x.valuation()?;
    let u = x.unit_part()?;
    Ok(SquareClass { parity: v.rem_euclid(2) as u8, residue_is_square: u.legendre_unit()? == 1 })
}

/// Tame Hilbert symbol `(a, b)` over the common field of `a` and `b`.
pub fn hilbert_symbol(a: &FieldElement, b: &FieldElement) -> Result<i32> {
    let alpha = a.valuation()?;
    let beta = b.valuation()?;
    let mut c = a.pow(beta)?.mul(&b.pow(-alpha)?);
    if (alpha * beta).rem_euclid(2) == 1 {
        c = c.neg();
    }
    c.legendre_unit()
}
