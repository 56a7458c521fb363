//! Generalized m-gonal numbers.
//!
//! `P_m(x) = ((m-2)x^2 - (m-4)x) / 2` for any integer `x`. The value set over
//! all of ℤ starts `0, 1, m-3, m, ...` for `m >= 5`.

use crate::error::{Error, Result};

/// Largest `|x|` accepted by [`eval_polygonal`].
pub const MAX_INDEX: i64 = 1 << 30;

/// Largest representability bound accepted anywhere in the crate.
pub const MAX_BOUND: u64 = 1 << 32;

pub fn check_gonality(m: u32) -> Result<()> {
    if m < 3 {
        return Err(Error::InvalidGonality(m as u64));
    }
    Ok(())
}

pub fn check_bound(bound: u64) -> Result<()> {
    if bound > MAX_BOUND {
        return Err(Error::BoundTooLarge {
            bound,
            cap: MAX_BOUND,
        });
    }
    Ok(())
}

/// Evaluates the generalized m-gonal number `P_m(x)`.
pub fn eval_polygonal(m: u32, x: i64) -> Result<u64> {
    check_gonality(m)?;
    if x.unsigned_abs() > MAX_INDEX as u64 {
        return Err(Error::ArithmeticRange(format!(
            "index {x} outside [-2^30, 2^30]"
        )));
    }
    let (m, x) = (m as i128, x as i128);
    let twice = (m - 2) * x * x - (m - 4) * x;
    debug_assert!(twice >= 0 && twice % 2 == 0);
    u64::try_from(twice / 2)
        .map_err(|_| Error::ArithmeticRange(format!("P_{m}({x}) does not fit in 64 bits")))
}

/// `P_3(x - 1) = x(x-1)/2`, the coefficient of `(m-2)` in `P_m(x) = (m-2)P_3(x-1) + x`.
pub fn shifted_triangular(x: i64) -> i64 {
    x * (x - 1) / 2
}

/// All distinct generalized m-gonal numbers in `[0, bound]`, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueList {
    m: u32,
    bound: u64,
    values: Vec<u64>,
}

impl ValueList {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, v: u64) -> bool {
        self.values.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.values.iter().copied()
    }
}

/// Walks `x = 0, 1, -1, 2, -2, ...` until both directions pass `bound`.
pub fn enumerate_values(m: u32, bound: u64) -> Result<ValueList> {
    check_gonality(m)?;
    check_bound(bound)?;
    let mut values = vec![0u64];
    let mut x: i64 = 1;
    loop {
        let pos = eval_polygonal(m, x)?;
        let neg = eval_polygonal(m, -x)?;
        if pos > bound && neg > bound {
            break;
        }
        values.extend([pos, neg].into_iter().filter(|&v| v <= bound));
        x += 1;
    }
    values.sort_unstable();
    values.dedup();
    Ok(ValueList { m, bound, values })
}

/// Returns an index `x` with `P_m(x) = n`, preferring the smallest `|x|` and
/// the positive one on a tie.
pub fn polygonal_index_of(m: u32, n: u64) -> Result<Option<i64>> {
    check_gonality(m)?;
    // (m-2)x^2 - (m-4)x - 2n = 0
    let a = m as i128 - 2;
    let b = m as i128 - 4;
    let disc = b * b + 8 * a * n as i128;
    let root = (disc as u128).isqrt() as i128;
    if root * root != disc {
        return Ok(None);
    }
    let mut found: Vec<i64> = [b + root, b - root]
        .into_iter()
        .filter(|num| num % (2 * a) == 0)
        .filter_map(|num| i64::try_from(num / (2 * a)).ok())
        .filter(|&x| x.unsigned_abs() <= MAX_INDEX as u64)
        .filter(|&x| eval_polygonal(m, x).ok() == Some(n))
        .collect();
    found.sort_by_key(|&x| (x.unsigned_abs(), x < 0));
    Ok(found.first().copied())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        assert_eq!(eval_polygonal(7, 0).unwrap(), 0);
        assert_eq!(eval_polygonal(7, 1).unwrap(), 1);
        assert_eq!(eval_polygonal(35, -1).unwrap(), 32);
        assert_eq!(eval_polygonal(12, 2).unwrap(), 12);
        // (3*4 + 1*2) / 2
        assert_eq!(eval_polygonal(5, -2).unwrap(), 7);
    }

    #[test]
    fn eval_rejects_bad_input() {
        assert!(matches!(eval_polygonal(2, 1), Err(Error::InvalidGonality(2))));
        assert!(matches!(
            eval_polygonal(5, MAX_INDEX + 1),
            Err(Error::ArithmeticRange(_))
        ));
        assert!(eval_polygonal(5, -MAX_INDEX).is_ok());
        // 2^30 squared times ~2^32 does not fit
        assert!(matches!(
            eval_polygonal(u32::MAX, MAX_INDEX),
            Err(Error::ArithmeticRange(_))
        ));
    }

    #[test]
    fn values_examples() {
        assert_eq!(enumerate_values(3, 10).unwrap().values(), &[0, 1, 3, 6, 10]);
        assert_eq!(enumerate_values(4, 9).unwrap().values(), &[0, 1, 4, 9]);
        assert_eq!(enumerate_values(10, 10).unwrap().values(), &[0, 1, 7, 10]);
        assert_eq!(enumerate_values(10, 0).unwrap().values(), &[0]);
    }

    #[test]
    fn values_contain_small_landmarks() {
        for m in 5..40u32 {
            let v = enumerate_values(m, 2 * m as u64).unwrap();
            assert!(v.contains(0) && v.contains(1));
            assert!(v.contains(m as u64 - 3) && v.contains(m as u64));
            // nothing strictly between 1 and m-3
            assert!(v.iter().all(|x| x <= 1 || x >= m as u64 - 3));
        }
    }

    #[test]
    fn index_examples() {
        assert_eq!(polygonal_index_of(3, 6).unwrap(), Some(3));
        assert_eq!(polygonal_index_of(9, 1).unwrap(), Some(1));
        assert_eq!(polygonal_index_of(9, 2).unwrap(), None);
        assert_eq!(polygonal_index_of(4, 9).unwrap(), Some(3));
        assert_eq!(polygonal_index_of(35, 32).unwrap(), Some(-1));
        assert_eq!(polygonal_index_of(7, 0).unwrap(), Some(0));
    }

    #[test]
    fn bound_cap() {
        assert!(enumerate_values(5, MAX_BOUND + 1).is_err());
    }
}
