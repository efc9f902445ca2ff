//! Exact half-integer arithmetic for spins and projections.
//!
//! Spin quantum numbers j and projections m take values in ½ℤ. Storing
//! twice the value as an `i64` keeps every j, m and every sum/difference
//! exact; no floating-point representation of j or m appears in any
//! interface of this crate.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Error;

/// A value in ½ℤ stored as twice itself: `HalfInteger::from_twice(3)` is 3/2.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct HalfInteger {
    twice: i64,
}

impl HalfInteger {
    pub const ZERO: HalfInteger = HalfInteger { twice: 0 };

    /// Builds the half-integer t/2 from t.
    pub const fn from_twice(twice: i64) -> Self {
        HalfInteger { twice }
    }

    pub const fn from_int(value: i64) -> Self {
        HalfInteger { twice: 2 * value }
    }

    /// Twice the value (always exact).
    pub const fn twice(self) -> i64 {
        self.twice
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    pub const fn is_negative(self) -> bool {
        self.twice < 0
    }

    pub fn to_f64(self) -> f64 {
        self.twice as f64 / 2.0
    }

    /// Multiplicity 2j+1 of a spin-j representation.
    ///
    /// Panics if `self` is negative; callers validate spins first.
    pub fn multiplicity(self) -> usize {
        assert!(self.twice >= 0, "multiplicity of a negative spin");
        self.twice as usize + 1
    }

    /// Checks that `self` is a valid spin (j >= 0).
    pub fn check_spin(self) -> Result<(), Error> {
        if self.twice < 0 {
            return Err(Error::NegativeSpin(self));
        }
        Ok(())
    }

    /// Checks that `m` is a valid projection for spin `self`:
    /// |m| <= j and j - m integral.
    pub fn check_projection(self, m: HalfInteger) -> Result<(), Error> {
        let valid = m.twice.abs() <= self.twice && (self.twice - m.twice) % 2 == 0;
        if !valid {
            return Err(Error::InvalidProjection { j: self, m });
        }
        Ok(())
    }

    /// Projections m = j, j-1, ..., -j in descending order.
    ///
    /// Row/column index k of every matrix in this crate corresponds to
    /// m = j - k; index 0 is m = +j.
    pub fn projections_desc(self) -> impl Iterator<Item = HalfInteger> {
        let tj = self.twice;
        (0..self.multiplicity()).map(move |k| HalfInteger::from_twice(tj - 2 * k as i64))
    }

    /// Index of projection `m` in the descending ordering, i.e. j - m.
    pub fn projection_index(self, m: HalfInteger) -> usize {
        debug_assert!(self.check_projection(m).is_ok());
        ((self.twice - m.twice) / 2) as usize
    }

    /// Projection at descending index k, i.e. j - k.
    pub fn projection_at(self, index: usize) -> HalfInteger {
        HalfInteger::from_twice(self.twice - 2 * index as i64)
    }

    /// (-1)^self for integer-valued `self`.
    pub fn parity_sign(self) -> f64 {
        assert!(self.is_integer(), "(-1)^x needs integer x, got {self}");
        if (self.twice / 2) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// exp(iπ·self), exact on ½ℤ: cycles through 1, i, -1, -i.
    pub fn unit_phase(self) -> Complex64 {
        match self.twice.rem_euclid(4) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl Add for HalfInteger {
    type Output = HalfInteger;
    fn add(self, rhs: Self) -> Self {
        HalfInteger::from_twice(self.twice + rhs.twice)
    }
}

impl Sub for HalfInteger {
    type Output = HalfInteger;
    fn sub(self, rhs: Self) -> Self {
        HalfInteger::from_twice(self.twice - rhs.twice)
    }
}

impl Neg for HalfInteger {
    type Output = HalfInteger;
    fn neg(self) -> Self {
        HalfInteger::from_twice(-self.twice)
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl FromStr for HalfInteger {
    type Err = Error;

    /// Parses "2", "-1", "1/2", "-3/2". Fractions must have denominator 2.
    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::ParseHalfInteger(s.to_string());
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            if den.trim() != "2" {
                return Err(bad());
            }
            let twice: i64 = num.trim().parse().map_err(|_| bad())?;
            if twice % 2 == 0 {
                return Err(bad()); // "2/2" must be written "1"
            }
            Ok(HalfInteger::from_twice(twice))
        } else {
            let value: i64 = s.parse().map_err(|_| bad())?;
            Ok(HalfInteger::from_int(value))
        }
    }
}

impl Serialize for HalfInteger {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for HalfInteger {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Str(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Int(v) => Ok(HalfInteger::from_int(v)),
            Repr::Str(s) => s.parse().map_err(|_| {
                D::Error::custom(format!("cannot parse {s:?} as a half-integer"))
            }),
        }
    }
}
