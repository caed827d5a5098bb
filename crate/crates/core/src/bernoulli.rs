//! Exact Bernoulli numbers and the classical fraction convention used for the
//! Euler-Maclaurin tail.
//!
//! Entries are generated from the defining recurrence
//! `sum_{j=0}^{m} C(m+1, j) B_j = 0` in exact big-integer rationals. The
//! convention is `B_1 = -1/2`; only the even entries enter the summation
//! formula, so the sign of `B_1` never reaches a numerical result.
//!
//! The older literature writes the tail with the fractions
//! `1/2, 1/6, 1/6, 3/10, 5/6, ...`, which are `f_k = (2k+1) |B_2k|`; see
//! [`euler_fraction`].

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::real::Real;

/// Largest order a table may be built to unless a different cap is requested.
pub const DEFAULT_ORDER_CAP: usize = 60;

/// Exact rational Bernoulli numbers `B_0 ..= B_max_order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BernoulliTable {
    max_order: usize,
    entries: Vec<BigRational>,
}

impl BernoulliTable {
    /// Builds the table up to `max_order` (even, `2 ..= DEFAULT_ORDER_CAP`).
    pub fn new(max_order: usize) -> Result<Self> {
        Self::with_cap(max_order, DEFAULT_ORDER_CAP)
    }

    pub fn with_cap(max_order: usize, cap: usize) -> Result<Self> {
        if max_order < 2 || !max_order.is_multiple_of(2) {
            return Err(Error::invalid(
                "max_order",
                format!("must be an even integer >= 2, got {max_order}"),
            ));
        }
        if max_order > cap {
            return Err(Error::invalid(
                "max_order",
                format!("{max_order} exceeds the configured cap {cap}"),
            ));
        }

        let mut entries: Vec<BigRational> = Vec::with_capacity(max_order + 1);
        entries.push(BigRational::one());
        // Pascal row for m + 1, updated in place as m grows.
        let mut row: Vec<BigInt> = vec![BigInt::one(), BigInt::one()];
        for m in 1..=max_order {
            row = next_pascal_row(&row);
            let mut acc = BigRational::zero();
            for (j, b) in entries.iter().enumerate() {
                if !b.is_zero() {
                    acc += BigRational::from_integer(row[j].clone()) * b;
                }
            }
            let bm = -acc / BigRational::from_integer(row[m].clone());
            entries.push(bm);
        }
        Ok(Self { max_order, entries })
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.entries
    }

    /// `B_n`, or `None` beyond the table.
    pub fn get(&self, n: usize) -> Option<&BigRational> {
        self.entries.get(n)
    }

    /// `B_2k` converted to the working scalar.
    pub fn even_as<T: Real>(&self, k: usize) -> Option<T> {
        self.entries
            .get(2 * k)
            .and_then(|b| b.to_f64())
            .map(T::lit)
    }

    /// `f_k = (2k+1) |B_2k|` for `k >= 1`.
    pub fn euler_fraction(&self, k: usize) -> Result<BigRational> {
        if k == 0 || 2 * k > self.max_order {
            return Err(Error::invalid(
                "k",
                format!("must lie in 1..={}, got {k}", self.max_order / 2),
            ));
        }
        let b = self.entries[2 * k].abs();
        Ok(b * BigRational::from_integer(BigInt::from(2 * k + 1)))
    }

    /// Residual of the defining recurrence at `m`; exactly zero for a valid table.
    pub fn recurrence_residual(&self, m: usize) -> Option<BigRational> {
        if m == 0 || m > self.max_order {
            return None;
        }
        let mut acc = BigRational::zero();
        for j in 0..=m {
            acc += BigRational::from_integer(binomial(m + 1, j)) * &self.entries[j];
        }
        Some(acc)
    }
}

fn next_pascal_row(row: &[BigInt]) -> Vec<BigInt> {
    let mut next = Vec::with_capacity(row.len() + 1);
    next.push(BigInt::one());
    for w in row.windows(2) {
        next.push(&w[0] + &w[1]);
    }
    next.push(BigInt::one());
    next
}

/// Exact binomial coefficient `C(n, k)`.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Builds a table up to `max_order`.
pub fn bernoulli_table(max_order: usize) -> Result<BernoulliTable> {
    BernoulliTable::new(max_order)
}

/// Classical Euler-Maclaurin fraction `f_k = (2k+1) |B_2k|`.
pub fn euler_fraction(k: usize) -> Result<BigRational> {
    shared_table().euler_fraction(k)
}

/// Process-wide table at the default cap, built once.
pub fn shared_table() -> &'static BernoulliTable {
    static TABLE: OnceLock<BernoulliTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        BernoulliTable::new(DEFAULT_ORDER_CAP).expect("default cap is a valid order")
    })
}

/// Formats a rational as `n/d` (or `n` when the denominator is one).
pub fn format_fraction(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// Akiyama-Tanigawa algorithm; independent of the recurrence. Yields the
    /// `B_1 = +1/2` convention.
    fn akiyama_tanigawa(n: usize) -> BigRational {
        let mut a: Vec<BigRational> = (0..=n).map(|m| q(1, m as i64 + 1)).collect();
        for m in 0..=n {
            a[m] = q(1, m as i64 + 1);
            for j in (1..=m).rev() {
                a[j - 1] = BigRational::from_usize(j).unwrap() * (&a[j - 1] - &a[j]);
            }
        }
        a[0].clone()
    }

    #[test]
    fn base_cases() {
        let t = bernoulli_table(2).unwrap();
        assert_eq!(t.entries(), &[q(1, 1), q(-1, 2), q(1, 6)]);
    }

    #[test]
    fn order_four() {
        let t = bernoulli_table(4).unwrap();
        assert_eq!(t.get(2), Some(&q(1, 6)));
        assert_eq!(t.get(4), Some(&q(-1, 30)));
        assert_eq!(t.get(3), Some(&q(0, 1)));
    }

    #[test]
    fn order_twelve() {
        let t = bernoulli_table(12).unwrap();
        assert_eq!(t.get(12), Some(&q(-691, 2730)));
    }

    #[test]
    fn matches_akiyama_tanigawa_to_cap() {
        let t = shared_table();
        for n in 0..=DEFAULT_ORDER_CAP {
            let oracle = akiyama_tanigawa(n);
            if n == 1 {
                assert_eq!(oracle, q(1, 2));
                assert_eq!(t.get(1), Some(&q(-1, 2)));
            } else {
                assert_eq!(t.get(n), Some(&oracle), "B_{n}");
            }
        }
    }

    #[test]
    fn invariants_hold() {
        let t = shared_table();
        for m in 1..=t.max_order() {
            assert!(t.recurrence_residual(m).unwrap().is_zero(), "m = {m}");
        }
        for n in (3..=t.max_order()).step_by(2) {
            assert!(t.get(n).unwrap().is_zero());
        }
        for k in 1..=t.max_order() / 2 {
            let b = t.get(2 * k).unwrap();
            assert_eq!(b.is_positive(), k % 2 == 1, "sign of B_{}", 2 * k);
        }
    }

    #[test]
    fn classical_fractions() {
        let expected = [q(1, 2), q(1, 6), q(1, 6), q(3, 10), q(5, 6)];
        for (k, f) in expected.iter().enumerate() {
            assert_eq!(&euler_fraction(k + 1).unwrap(), f);
        }
        assert_eq!(euler_fraction(6).unwrap(), q(691, 210));
    }

    #[test]
    fn fraction_matches_tail_coefficient() {
        // f_k / (2k+1)! == |B_2k| / (2k)!
        let t = shared_table();
        let mut fact = BigInt::one(); // (2k)!
        for k in 1..=t.max_order() / 2 {
            fact = fact * BigInt::from(2 * k - 1) * BigInt::from(2 * k);
            let lhs = t.euler_fraction(k).unwrap()
                / BigRational::from_integer(&fact * BigInt::from(2 * k + 1));
            let rhs = t.get(2 * k).unwrap().abs() / BigRational::from_integer(fact.clone());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn rejects_bad_orders() {
        assert!(bernoulli_table(0).is_err());
        assert!(bernoulli_table(5).is_err());
        assert!(bernoulli_table(62).is_err());
        assert!(BernoulliTable::with_cap(62, 80).is_ok());
        assert!(euler_fraction(0).is_err());
        assert!(euler_fraction(31).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(13, 0), BigInt::from(1));
        assert_eq!(binomial(3, 4), BigInt::from(0));
    }

    #[test]
    fn float_conversion() {
        let t = shared_table();
        assert_eq!(t.even_as::<f64>(1), Some(1.0 / 6.0));
        assert!((t.even_as::<f32>(2).unwrap() + 1.0 / 30.0).abs() < 1e-8);
    }
}
