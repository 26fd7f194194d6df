use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};

/// Largest `2s` for which factorial-based formulas are evaluated.
pub const MAX_TWICE_SPIN: i32 = 10;

/// A half-integer stored as twice its value, used for spin magnitudes `s`
/// and spin components `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfSpin {
    twice: i32,
}

impl HalfSpin {
    pub const ZERO: HalfSpin = HalfSpin { twice: 0 };
    pub const HALF: HalfSpin = HalfSpin { twice: 1 };
    pub const ONE: HalfSpin = HalfSpin { twice: 2 };

    pub const fn from_twice(twice: i32) -> Self {
        HalfSpin { twice }
    }

    /// A spin magnitude; rejects negative values and values above the
    /// factorial cap.
    pub fn spin(twice: i32) -> Result<Self> {
        if twice < 0 {
            return Err(domain(format!("spin magnitude 2s = {twice} is negative")));
        }
        if twice > MAX_TWICE_SPIN {
            return Err(domain(format!(
                "spin magnitude 2s = {twice} exceeds the supported maximum {MAX_TWICE_SPIN}"
            )));
        }
        Ok(HalfSpin { twice })
    }

    pub const fn twice(self) -> i32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// `(-1)^{2s}`: `-1` for fermions, `+1` for bosons.
    pub fn statistics_sign(self) -> f64 {
        if self.twice.rem_euclid(2) == 1 {
            -1.0
        } else {
            1.0
        }
    }

    /// Whether `m` is an allowed component of `self` taken as a magnitude.
    pub fn admits(self, m: HalfSpin) -> bool {
        self.twice >= 0 && m.twice.abs() <= self.twice && (self.twice - m.twice) % 2 == 0
    }

    pub fn check_component(self, m: HalfSpin) -> Result<()> {
        if self.admits(m) {
            Ok(())
        } else {
            Err(domain(format!("m = {m} is not a component of s = {self}")))
        }
    }

    /// Components `s, s-1, ..., -s`, the fixed row/column order of every
    /// spin matrix in this crate.
    pub fn components(self) -> impl Iterator<Item = HalfSpin> {
        let s = self.twice;
        (0..=s.max(-1)).map(move |k| HalfSpin::from_twice(s - 2 * k))
    }

    /// Row index of component `m` in the descending order.
    pub fn index_of(self, m: HalfSpin) -> usize {
        ((self.twice - m.twice) / 2) as usize
    }

    pub fn dim(self) -> usize {
        (self.twice + 1) as usize
    }
}

impl std::ops::Add for HalfSpin {
    type Output = HalfSpin;
    fn add(self, rhs: HalfSpin) -> HalfSpin {
        HalfSpin::from_twice(self.twice + rhs.twice)
    }
}

impl std::ops::Sub for HalfSpin {
    type Output = HalfSpin;
    fn sub(self, rhs: HalfSpin) -> HalfSpin {
        HalfSpin::from_twice(self.twice - rhs.twice)
    }
}

impl std::ops::Neg for HalfSpin {
    type Output = HalfSpin;
    fn neg(self) -> HalfSpin {
        HalfSpin::from_twice(-self.twice)
    }
}

impl fmt::Display for HalfSpin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl FromStr for HalfSpin {
    type Err = Error;

    /// Accepts `"1"`, `"-2"`, `"3/2"`, `"-1/2"`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::ParseSpin(s.to_string());
        match t.split_once('/') {
            None => {
                let n: i32 = t.parse().map_err(|_| bad())?;
                n.checked_mul(2).map(HalfSpin::from_twice).ok_or_else(bad)
            }
            Some((num, den)) => {
                let n: i32 = num.trim().parse().map_err(|_| bad())?;
                match den.trim() {
                    "2" => Ok(HalfSpin::from_twice(n)),
                    "1" => n.checked_mul(2).map(HalfSpin::from_twice).ok_or_else(bad),
                    _ => Err(bad()),
                }
            }
        }
    }
}

impl Serialize for HalfSpin {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for HalfSpin {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
