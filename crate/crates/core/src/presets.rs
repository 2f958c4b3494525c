//! Worked example: a nilpotent algebra with a G₂* form, in exact arithmetic.
//!
//! Brackets `[f3,f7] = f1`, `[f4,f7] = f3`, `[f5,f7] = f2`, `[f6,f7] = f5`,
//! 3-form `-f^156 - f^236 + f^245 - 1/2 f^127 - f^347` and volume
//! `-1/4 f^1234567`.

use crate::error::Result;
use crate::exterior::{KForm, Vector};
use crate::g2::{volume_form, G2Bundle, Mode};
use crate::liealg::LieAlgebra;
use crate::scalar::{QuadExt, Ring};

pub fn example_algebra<S: Ring>() -> LieAlgebra<S> {
    LieAlgebra::from_brackets([
        (3, 7, Vector::f(1)),
        (4, 7, Vector::f(3)),
        (5, 7, Vector::f(2)),
        (6, 7, Vector::f(5)),
    ])
    .expect("valid brackets")
}

pub fn example_phi<S: Ring>() -> KForm<S> {
    KForm::from_terms(
        3,
        [
            (&[1usize, 5, 6][..], S::from_int(-1)),
            (&[2, 3, 6][..], S::from_int(-1)),
            (&[2, 4, 5][..], S::from_int(1)),
            (&[1, 2, 7][..], S::from_ratio(-1, 2)),
            (&[3, 4, 7][..], S::from_int(-1)),
        ],
    )
}

pub fn example_vol<S: Ring>() -> KForm<S> {
    volume_form(S::from_ratio(-1, 4))
}

/// Literal mode uses the volume above; normalized mode uses orientation -1.
pub fn example_bundle(mode: Mode) -> Result<G2Bundle<QuadExt>> {
    match mode {
        Mode::Literal => G2Bundle::literal(example_phi(), example_vol()),
        Mode::Normalized => G2Bundle::normalized(example_phi(), -1),
    }
}

/// The unit timelike `ξ` of each mode: `(1/√2) f2` literal, `f2` normalized.
pub fn example_xi(mode: Mode) -> Vector<QuadExt> {
    match mode {
        Mode::Literal => Vector::f(2).scale(&(QuadExt::sqrt_of(2) * QuadExt::ratio(1, 2))),
        Mode::Normalized => Vector::f(2),
    }
}
