//! Exact rational divisor-class arithmetic on Pic (x) Q of the partial,
//! Igusa, and second Voronoi compactifications of A_4.
//!
//! The class groups are Q L + Q D (partial and Igusa; the inclusion of the
//! partial compactification induces an isomorphism) and Q L + Q D + Q E
//! (Voronoi), where L is the weight-1 modular-form bundle, D the closure of
//! the rank-1 boundary, and E the exceptional divisor of the blow-down
//! Voronoi -> Igusa. The pullback acts by L -> L and D -> D + 4E.

use num_rational::Rational64;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Space {
    Partial,
    Igusa,
    Voronoi,
}

impl Space {
    pub fn name(self) -> &'static str {
        match self {
            Space::Partial => "partial",
            Space::Igusa => "igusa",
            Space::Voronoi => "voronoi",
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PicardError {
    #[error("divisor classes live on different spaces ({0:?} vs {1:?})")]
    SpaceMismatch(Space, Space),
    #[error("the exceptional divisor E exists only on the Voronoi compactification")]
    NoExceptionalDivisor,
    #[error("pullback is defined on Igusa classes only")]
    NotAnIgusaClass,
}

/// A class q_L L + q_D D + q_E E with exact rational coefficients; q_E is
/// zero away from the Voronoi compactification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DivisorClass {
    space: Space,
    pub coeff_l: Rational64,
    pub coeff_d: Rational64,
    pub coeff_e: Rational64,
}

fn q(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

impl DivisorClass {
    pub fn new(
        space: Space,
        coeff_l: Rational64,
        coeff_d: Rational64,
        coeff_e: Rational64,
    ) -> Result<Self, PicardError> {
        if space != Space::Voronoi && coeff_e != q(0) {
            return Err(PicardError::NoExceptionalDivisor);
        }
        Ok(DivisorClass {
            space,
            coeff_l,
            coeff_d,
            coeff_e,
        })
    }

    pub fn zero(space: Space) -> DivisorClass {
        DivisorClass {
            space,
            coeff_l: q(0),
            coeff_d: q(0),
            coeff_e: q(0),
        }
    }

    pub fn line_bundle(space: Space) -> DivisorClass {
        DivisorClass {
            coeff_l: q(1),
            ..DivisorClass::zero(space)
        }
    }

    pub fn boundary(space: Space) -> DivisorClass {
        DivisorClass {
            coeff_d: q(1),
            ..DivisorClass::zero(space)
        }
    }

    pub fn exceptional() -> DivisorClass {
        DivisorClass {
            coeff_e: q(1),
            ..DivisorClass::zero(Space::Voronoi)
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn add(&self, other: &DivisorClass) -> Result<DivisorClass, PicardError> {
        if self.space != other.space {
            return Err(PicardError::SpaceMismatch(self.space, other.space));
        }
        Ok(DivisorClass {
            space: self.space,
            coeff_l: self.coeff_l + other.coeff_l,
            coeff_d: self.coeff_d + other.coeff_d,
            coeff_e: self.coeff_e + other.coeff_e,
        })
    }

    pub fn scale(&self, by: Rational64) -> DivisorClass {
        DivisorClass {
            space: self.space,
            coeff_l: self.coeff_l * by,
            coeff_d: self.coeff_d * by,
            coeff_e: self.coeff_e * by,
        }
    }

    pub fn equal(&self, other: &DivisorClass) -> Result<bool, PicardError> {
        if self.space != other.space {
            return Err(PicardError::SpaceMismatch(self.space, other.space));
        }
        Ok(self == other)
    }

    pub fn is_zero(&self) -> bool {
        self.coeff_l == q(0) && self.coeff_d == q(0) && self.coeff_e == q(0)
    }

    /// Canonical pretty form like "8L - D - 4E".
    pub fn display(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (coeff, sym) in [(self.coeff_l, "L"), (self.coeff_d, "D"), (self.coeff_e, "E")] {
            if coeff == q(0) {
                continue;
            }
            let sign = if coeff < q(0) { "-" } else { "+" };
            let a = if coeff < q(0) { -coeff } else { coeff };
            let mag = if a == q(1) {
                sym.to_string()
            } else if a.is_integer() {
                format!("{}{}", a.numer(), sym)
            } else {
                format!("({}/{}){}", a.numer(), a.denom(), sym)
            };
            if parts.is_empty() {
                parts.push(if sign == "-" { format!("-{mag}") } else { mag });
            } else {
                parts.push(format!("{sign} {mag}"));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" ")
        }
    }
}

/// Pullback along the blow-down Voronoi -> Igusa: L -> L, D -> D + 4E.
pub fn pullback(class: &DivisorClass) -> Result<DivisorClass, PicardError> {
    if class.space != Space::Igusa {
        return Err(PicardError::NotAnIgusaClass);
    }
    Ok(DivisorClass {
        space: Space::Voronoi,
        coeff_l: class.coeff_l,
        coeff_d: class.coeff_d,
        coeff_e: class.coeff_d * q(4),
    })
}

/// The class of the Schottky locus: 8L - D on the partial and Igusa
/// compactifications, 8L - D - 4E on the Voronoi one.
pub fn schottky_locus_class(space: Space) -> DivisorClass {
    match space {
        Space::Partial | Space::Igusa => DivisorClass {
            space,
            coeff_l: q(8),
            coeff_d: q(-1),
            coeff_e: q(0),
        },
        Space::Voronoi => DivisorClass {
            space,
            coeff_l: q(8),
            coeff_d: q(-1),
            coeff_e: q(-4),
        },
    }
}

/// Divisor of the weight-8 form: the Schottky locus plus the boundary (plus
/// 4E on Voronoi); equal to 8L in every space.
pub fn schottky_form_divisor(space: Space) -> DivisorClass {
    let boundary_part = match space {
        Space::Partial | Space::Igusa => DivisorClass::boundary(space),
        Space::Voronoi => DivisorClass::boundary(space)
            .add(&DivisorClass::exceptional().scale(q(4)))
            .expect("same space"),
    };
    schottky_locus_class(space)
        .add(&boundary_part)
        .expect("same space")
}
