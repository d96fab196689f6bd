//! Sparse model of the square-summable sequence space.
//!
//! A [`SparseVec`] stores finitely many nonzero coordinates of a sequence,
//! indexed from 1 with no upper bound on the index. Vectors are immutable
//! after construction and always canonical: no stored coefficient is zero,
//! so two vectors are equal exactly when their entry maps are equal.
//!
//! The operator experiments in this crate drive nonzero support toward
//! arbitrarily high indices, which is why there is no ambient dimension:
//! truncating to a fixed dimension would silently break the support
//! diagnostics downstream.
//!
//! Coefficients are plain `f64`. The test corpus prefers dyadic rationals
//! (`k * 2^-j`) so that comparisons against the piecewise-linear breakpoints
//! elsewhere in the crate are exact.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Finitely supported vector with 1-based coordinate indices.
///
/// Canonical form invariant: no entry has coefficient 0, every index is >= 1,
/// all coefficients are finite. Iteration is always in ascending index order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseVec {
    entries: BTreeMap<u32, f64>,
}

impl SparseVec {
    /// The zero vector.
    pub fn zero() -> Self {
        Self::default()
    }

    /// `c` times the canonical unit vector at index `n`; the zero vector when
    /// `c == 0`.
    pub fn basis(n: u32, c: f64) -> Result<Self, Error> {
        Self::from_entries([(n, c)])
    }

    /// Builds a vector from `(index, coefficient)` pairs.
    ///
    /// Rejects index 0, duplicate indices, and non-finite coefficients.
    /// Zero coefficients are dropped (canonicalization).
    pub fn from_entries<I>(it: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (u32, f64)>,
    {
        let mut entries = BTreeMap::new();
        for (n, c) in it {
            if n == 0 {
                return Err(Error::ZeroIndex);
            }
            if !c.is_finite() {
                return Err(Error::NonFiniteCoefficient { index: n, value: c });
            }
            if entries.contains_key(&n) {
                return Err(Error::DuplicateIndex(n));
            }
            if c != 0.0 {
                entries.insert(n, c);
            }
        }
        Ok(Self { entries })
    }

    /// Coefficient at index `n` (0 when the index is not stored).
    pub fn get(&self, n: u32) -> f64 {
        self.entries.get(&n).copied().unwrap_or(0.0)
    }

    /// Entries in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.entries.iter().map(|(&n, &c)| (n, c))
    }

    /// Number of nonzero coordinates.
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    /// True iff this is the zero vector.
    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Smallest index with a nonzero coefficient.
    pub fn min_index(&self) -> Option<u32> {
        self.entries.keys().next().copied()
    }

    /// Largest index with a nonzero coefficient.
    pub fn max_index(&self) -> Option<u32> {
        self.entries.keys().next_back().copied()
    }

    /// Sum of squared coefficients, accumulated in ascending index order.
    /// Folds from +0.0 so the empty sum is +0.0, not the -0.0 of `Sum`.
    pub fn norm_sq(&self) -> f64 {
        self.entries.values().fold(0.0, |acc, c| acc + c * c)
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Inner product, accumulated over the common support in ascending index
    /// order.
    pub fn inner(&self, other: &Self) -> f64 {
        // Walk the shorter support and probe the other map.
        let (small, big) = if self.entries.len() <= other.entries.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = 0.0;
        for (&n, &c) in &small.entries {
            if let Some(&d) = big.entries.get(&n) {
                acc += c * d;
            }
        }
        acc
    }

    /// `a * u + v`, canonicalized: entries that cancel exactly are removed.
    ///
    /// Each output coefficient is computed as `fl(fl(a * u_n) + v_n)`, one
    /// product rounding and one sum rounding.
    pub fn axpy(a: f64, u: &Self, v: &Self) -> Self {
        if a == 0.0 {
            return v.clone();
        }
        let mut entries = v.entries.clone();
        for (&n, &un) in &u.entries {
            let c = match entries.get(&n) {
                Some(&vn) => a * un + vn,
                None => a * un,
            };
            if c == 0.0 {
                entries.remove(&n);
            } else {
                entries.insert(n, c);
            }
        }
        Self { entries }
    }

    /// `self + other`.
    pub fn add(&self, other: &Self) -> Self {
        Self::axpy(1.0, other, self)
    }

    /// `self - other`.
    pub fn sub(&self, other: &Self) -> Self {
        Self::axpy(-1.0, other, self)
    }

    /// `a * self`, canonicalized.
    pub fn scale(&self, a: f64) -> Self {
        let mut entries = BTreeMap::new();
        if a != 0.0 {
            for (&n, &c) in &self.entries {
                let d = a * c;
                if d != 0.0 {
                    entries.insert(n, d);
                }
            }
        }
        Self { entries }
    }

    /// Entrywise `self / d`, canonicalized.
    pub fn scale_div(&self, d: f64) -> Self {
        let mut entries = BTreeMap::new();
        for (&n, &c) in &self.entries {
            let q = c / d;
            if q != 0.0 {
                entries.insert(n, q);
            }
        }
        Self { entries }
    }
}

impl fmt::Display for SparseVec {
    /// Compact `{index: coefficient, ...}` rendering in ascending index order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (n, c)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}: {c}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for SparseVec {
    /// JSON object with decimal-string keys in ascending numeric order,
    /// e.g. `{"2": 0.25, "3": 0.125}`.
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.entries.len()))?;
        for (&n, &c) in &self.entries {
            map.serialize_entry(&n.to_string(), &c)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for SparseVec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct VecVisitor;

        impl<'de> Visitor<'de> for VecVisitor {
            type Value = SparseVec;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map from positive-integer index strings to numbers")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<SparseVec, A::Error> {
                let mut pairs = Vec::new();
                let mut seen = std::collections::BTreeSet::new();
                while let Some((key, value)) = access.next_entry::<String, f64>()? {
                    let n: u32 = key
                        .parse()
                        .map_err(|_| serde::de::Error::custom(Error::MalformedIndex(key.clone())))?;
                    if !seen.insert(n) {
                        return Err(serde::de::Error::custom(Error::DuplicateIndex(n)));
                    }
                    pairs.push((n, value));
                }
                SparseVec::from_entries(pairs).map_err(serde::de::Error::custom)
            }
        }

        deserializer.deserialize_map(VecVisitor)
    }
}
