//! Exact rational and integer-matrix arithmetic, lattice quotients,
//! continued fractions and the numeric comparison protocol.

mod cfrac;
mod cosets;
mod matrix;
mod precision;
mod random;
mod snf;

use std::fmt;

use rug::{Integer, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use cfrac::continued_fraction;
pub use cosets::torsion_cosets;
pub use matrix::{gamma0_membership, IntMatrix, RatMatrix};
pub use precision::{
    dist_to_integers, dist_to_lattice, random_samples, ComplexJson, PrecisionContext, POLE_DELTA,
};
pub use random::{random_gamma0, random_gamma0_2};
pub use snf::{snf, SmithDecomposition};

/// Exact rational scalar; always stored in lowest terms with positive denominator.
pub type BigRat = Rational;

pub fn parse_rat(s: &str) -> Result<BigRat> {
    s.trim()
        .parse::<Rational>()
        .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
}

/// "p/q", or "p" when q = 1.
pub fn format_rat(x: &BigRat) -> String {
    x.to_string()
}

/// Fractional part in [0, 1).
pub fn frac(x: &Rational) -> Rational {
    let fl = x.clone().floor();
    Rational::from(x - fl)
}

pub mod rat_serde {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigRat, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

pub mod rat_vec_serde {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[BigRat], s: S) -> std::result::Result<S::Ok, S::Error> {
        xs.iter().map(format_rat).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<BigRat>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rat(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// A point of Q^n, usually read modulo Z^n.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RatPoint {
    #[serde(with = "rat_vec_serde")]
    coords: Vec<BigRat>,
}

impl RatPoint {
    pub fn new(coords: Vec<BigRat>) -> Self {
        RatPoint { coords }
    }

    /// Coordinates reduced into [0,1).
    pub fn reduced(coords: Vec<BigRat>) -> Self {
        RatPoint {
            coords: coords.iter().map(frac).collect(),
        }
    }

    pub fn zero(n: usize) -> Self {
        RatPoint {
            coords: vec![Rational::new(); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[BigRat] {
        &self.coords
    }

    pub fn is_reduced(&self) -> bool {
        self.coords.iter().all(|x| *x >= 0 && *x < 1)
    }

    pub fn scaled(&self, s: &Integer) -> RatPoint {
        RatPoint::reduced(self.coords.iter().map(|x| Rational::from(x * s)).collect())
    }

    /// h·self reduced mod Z^n.
    pub fn image(&self, h: &IntMatrix) -> RatPoint {
        RatPoint::reduced(h.to_rational().mul_vec(&self.coords))
    }

    /// Lowest common denominator of the coordinates.
    pub fn order(&self) -> Integer {
        self.coords
            .iter()
            .fold(Integer::from(1), |acc, x| acc.lcm(x.denom()))
    }
}

impl fmt::Display for RatPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}
