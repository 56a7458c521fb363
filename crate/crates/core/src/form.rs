use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polygonal::check_gonality;

/// `a_1 P_m(x_1) + ... + a_n P_m(x_n)` with `1 <= a_1 <= ... <= a_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MGonalForm {
    m: u32,
    coeffs: Vec<u64>,
}

impl MGonalForm {
    pub fn new(m: u32, coeffs: Vec<u64>) -> Result<Self> {
        check_gonality(m)?;
        if let Some(&c) = coeffs.iter().find(|&&c| c == 0) {
            return Err(Error::Contract(format!("coefficient {c} is not positive")));
        }
        if let Some(w) = coeffs.windows(2).find(|w| w[0] > w[1]) {
            return Err(Error::Contract(format!(
                "coefficients must be non-decreasing, found {} before {}",
                w[0], w[1]
            )));
        }
        Ok(MGonalForm { m, coeffs })
    }

    pub fn empty(m: u32) -> Result<Self> {
        Self::new(m, Vec::new())
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff_sum(&self) -> u64 {
        self.coeffs.iter().sum()
    }

    pub fn last(&self) -> Option<u64> {
        self.coeffs.last().copied()
    }

    /// The form with `a` appended; `a` must not be below the current last coefficient.
    pub fn escalate(&self, a: u64) -> Result<Self> {
        if a == 0 {
            return Err(Error::Contract("coefficient 0 is not positive".into()));
        }
        if let Some(last) = self.last() {
            if a < last {
                return Err(Error::Contract(format!(
                    "appended coefficient {a} is below last coefficient {last}"
                )));
            }
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.push(a);
        Ok(MGonalForm { m: self.m, coeffs })
    }

    /// Drop-last-coefficient parent, `None` for the empty form.
    pub fn parent(&self) -> Option<Self> {
        let (_, rest) = self.coeffs.split_last()?;
        Some(MGonalForm {
            m: self.m,
            coeffs: rest.to_vec(),
        })
    }

    pub fn coeffs_string(&self) -> String {
        join_coeffs(&self.coeffs)
    }
}

pub fn join_coeffs(coeffs: &[u64]) -> String {
    coeffs
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// Parses `"1,2,4"`; the empty string is the empty tuple.
pub fn parse_coeffs(s: &str) -> Result<Vec<u64>> {
    let s = s.trim().trim_start_matches('[').trim_end_matches(']');
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|e| Error::Parse(format!("coefficient {t:?}: {e}")))
        })
        .collect()
}

impl fmt::Display for MGonalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m={} [{}]", self.m, self.coeffs_string())
    }
}

impl FromStr for MGonalForm {
    type Err = Error;

    /// Accepts the `Display` output, `m=<m> [a,b,...]`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let rest = s
            .strip_prefix("m=")
            .ok_or_else(|| Error::Parse(format!("expected `m=<m> [..]`, got {s:?}")))?;
        let (m, coeffs) = rest
            .split_once(' ')
            .ok_or_else(|| Error::Parse(format!("missing coefficient list in {s:?}")))?;
        let m = m
            .parse()
            .map_err(|e| Error::Parse(format!("gonality {m:?}: {e}")))?;
        MGonalForm::new(m, parse_coeffs(coeffs)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(MGonalForm::new(5, vec![1, 2, 2, 7]).is_ok());
        assert!(matches!(
            MGonalForm::new(5, vec![1, 3, 2]),
            Err(Error::Contract(_))
        ));
        assert!(matches!(MGonalForm::new(5, vec![0, 1]), Err(Error::Contract(_))));
        assert!(matches!(MGonalForm::new(2, vec![1]), Err(Error::InvalidGonality(2))));
    }

    #[test]
    fn escalate_and_parent() {
        let f = MGonalForm::new(8, vec![1]).unwrap();
        let g = f.escalate(2).unwrap();
        assert_eq!(g.coeffs(), &[1, 2]);
        assert_eq!(g.parent().unwrap(), f);
        assert!(g.escalate(1).is_err());
        assert_eq!(MGonalForm::empty(8).unwrap().parent(), None);
    }

    #[test]
    fn display_parses_back() {
        let f = MGonalForm::new(12, vec![1, 2, 3, 3]).unwrap();
        assert_eq!(f.to_string().parse::<MGonalForm>().unwrap(), f);
        let e = MGonalForm::empty(3).unwrap();
        assert_eq!(e.to_string(), "m=3 []");
        assert_eq!(e.to_string().parse::<MGonalForm>().unwrap(), e);
    }
}
