//! Exact rational arithmetic for density / exponent computations.
//!
//! All structural quantities (m2, a(F), b(F), thresholds) are small-numerator
//! rationals, so `Ratio<i64>` is plenty. Never compare these through floats.

use num_rational::Ratio;

pub type Rat = Ratio<i64>;

pub fn rat(p: i64, q: i64) -> Rat {
    Ratio::new(p, q)
}

/// Canonical "p/q" rendering (reduced, denominator positive).
pub fn rat_str(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rat_f64(r: &Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// serde helper: serialize `Rat` as the string "p/q".
pub mod serde_rat {
    use super::*;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rat_str(r))
    }
}

/// serde helper: serialize `Option<Rat>` as "p/q" or null.
pub mod serde_opt_rat {
    use super::*;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(r: &Option<Rat>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_str(&rat_str(r)),
            None => s.serialize_none(),
        }
    }
}
