use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign};

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A non-negative integer cost or infinity.
///
/// Addition saturates: anything plus infinity is infinity, and a finite sum
/// too large to represent becomes infinity. Infinity compares greater than
/// every finite cost.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cost(u64);

impl Cost {
    pub const ZERO: Cost = Cost(0);
    pub const INFINITY: Cost = Cost(u64::MAX);

    pub const fn finite(value: u64) -> Cost {
        Cost(value)
    }

    pub fn is_finite(self) -> bool {
        self != Cost::INFINITY
    }

    pub fn is_infinite(self) -> bool {
        self == Cost::INFINITY
    }

    pub fn value(self) -> Option<u64> {
        self.is_finite().then_some(self.0)
    }

    /// `self - other` for `other <= self`, both finite.
    pub(crate) fn minus_finite(self, other: Cost) -> Cost {
        debug_assert!(self.is_finite() && other.is_finite() && other <= self);
        Cost(self.0 - other.0)
    }
}

impl From<u64> for Cost {
    fn from(v: u64) -> Cost {
        Cost(v)
    }
}

impl Add for Cost {
    type Output = Cost;

    fn add(self, rhs: Cost) -> Cost {
        Cost(self.0.saturating_add(rhs.0))
    }
}

impl AddAssign for Cost {
    fn add_assign(&mut self, rhs: Cost) {
        *self = *self + rhs;
    }
}

impl Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        iter.fold(Cost::ZERO, Add::add)
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{v}"),
            None => f.write_str("inf"),
        }
    }
}

impl Serialize for Cost {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.value() {
            Some(v) => serializer.serialize_u64(v),
            None => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Cost {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Cost, D::Error> {
        struct CostVisitor;

        impl Visitor<'_> for CostVisitor {
            type Value = Cost;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a non-negative integer or \"inf\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Cost, E> {
                Ok(Cost(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Cost, E> {
                u64::try_from(v).map(Cost).map_err(|_| E::custom("costs must be non-negative"))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Cost, E> {
                match v.to_ascii_lowercase().as_str() {
                    "inf" | "infinity" => Ok(Cost::INFINITY),
                    _ => v.parse::<u64>().map(Cost).map_err(|_| E::custom(format!("bad cost `{v}`"))),
                }
            }
        }

        deserializer.deserialize_any(CostVisitor)
    }
}
