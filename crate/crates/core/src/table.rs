//! Representability tables.
//!
//! A [`RepTable`] records which integers in `[0, B]` a form represents. It is
//! built by an iterated sumset: start from `{0}` and, for each coefficient `a`,
//! OR in the current set shifted by every `a * v` with `v` a generalized
//! m-gonal number. Tables are immutable; escalation produces a new table from
//! its parent.
//!
//! # Cache file layout
//!
//! All integers little-endian.
//!
//! | offset | size | field                                   |
//! |--------|------|-----------------------------------------|
//! | 0      | 4    | magic `PFRT`                            |
//! | 4      | 2    | format version (currently 1)            |
//! | 6      | 2    | reserved, zero                          |
//! | 8      | 4    | m                                       |
//! | 12     | 8    | bound B                                 |
//! | 20     | 4    | n, number of coefficients               |
//! | 24     | 8n   | coefficients                            |
//! | 24+8n  | 8    | w, number of 64-bit words (`B/64 + 1`)  |
//! | 32+8n  | 8w   | bit words; bit `N` is bit `N%64` of word `N/64` |
//! | end    | 4    | CRC-32 (IEEE) of every preceding byte   |

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::bitset::{word_count, BitSet};
use crate::error::{Error, Result};
use crate::form::MGonalForm;
use crate::polygonal::{check_bound, enumerate_values, eval_polygonal, ValueList, MAX_INDEX};

pub const CACHE_MAGIC: &[u8; 4] = b"PFRT";
pub const CACHE_VERSION: u16 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepTable {
    form: MGonalForm,
    bits: BitSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TruantStatus {
    Truant { value: u64 },
    BUniversal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruantResult {
    #[serde(flatten)]
    pub status: TruantStatus,
    pub bound: u64,
}

impl TruantResult {
    pub fn truant(&self) -> Option<u64> {
        match self.status {
            TruantStatus::Truant { value } => Some(value),
            TruantStatus::BUniversal => None,
        }
    }

    pub fn is_b_universal(&self) -> bool {
        self.status == TruantStatus::BUniversal
    }
}

/// Builds the table of `form` over `[0, bound]`.
pub fn build_table(form: &MGonalForm, bound: u64) -> Result<RepTable> {
    if bound < 1 {
        return Err(Error::Contract("bound must be at least 1".into()));
    }
    check_bound(bound)?;
    let values = enumerate_values(form.m(), bound)?;
    let mut table = RepTable::empty_with(form.m(), bound)?;
    for &a in form.coeffs() {
        table = table.extend_with_values(a, &values)?;
    }
    Ok(table)
}

/// Appends coefficient `a` to the parent's form and extends its table.
pub fn extend_table(parent: &RepTable, a: u64) -> Result<RepTable> {
    let values = enumerate_values(parent.form.m(), parent.bound())?;
    parent.extend_with_values(a, &values)
}

pub fn truant_of(table: &RepTable) -> TruantResult {
    let status = match table.bits.first_zero_from(1) {
        Some(value) => TruantStatus::Truant { value },
        None => TruantStatus::BUniversal,
    };
    TruantResult {
        status,
        bound: table.bound(),
    }
}

impl RepTable {
    /// Table of the empty form: only 0 is represented.
    pub fn empty_with(m: u32, bound: u64) -> Result<Self> {
        check_bound(bound)?;
        let mut bits = BitSet::new(bound);
        bits.set(0);
        Ok(RepTable {
            form: MGonalForm::empty(m)?,
            bits,
        })
    }

    /// Like [`extend_table`] but reuses a value list already enumerated for
    /// this table's `(m, bound)`.
    pub fn extend_with_values(&self, a: u64, values: &ValueList) -> Result<RepTable> {
        if values.m() != self.form.m() || values.bound() < self.bound() {
            return Err(Error::Contract(format!(
                "value list for m={} B={} does not cover table m={} B={}",
                values.m(),
                values.bound(),
                self.form.m(),
                self.bound()
            )));
        }
        let form = self.form.escalate(a)?;
        let bound = self.bound();
        let mut bits = self.bits.clone();
        for v in values.iter().skip(1) {
            match a.checked_mul(v) {
                Some(shift) if shift <= bound => bits.or_shifted(&self.bits, shift),
                _ => break,
            }
        }
        Ok(RepTable { form, bits })
    }

    pub fn form(&self) -> &MGonalForm {
        &self.form
    }

    pub fn bound(&self) -> u64 {
        self.bits.bound()
    }

    pub fn bits(&self) -> &BitSet {
        &self.bits
    }

    pub fn represents(&self, n: u64) -> bool {
        self.bits.get(n)
    }

    pub fn truant(&self) -> TruantResult {
        truant_of(self)
    }

    /// Unrepresented integers in `[1, bound]`.
    pub fn gaps(&self) -> Vec<u64> {
        let mut out = Vec::new();
        let mut from = 1;
        while let Some(n) = self.bits.first_zero_from(from) {
            out.push(n);
            from = n + 1;
        }
        out
    }

    /// True when every integer in `[1, min(n, B)]` is represented.
    pub fn represents_all_up_to(&self, n: u64) -> bool {
        let top = n.min(self.bound());
        match self.bits.first_zero_from(1) {
            Some(z) => z > top,
            None => true,
        }
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let mut buf = Vec::with_capacity(40 + 8 * self.bits.words().len());
        buf.extend_from_slice(CACHE_MAGIC);
        buf.extend_from_slice(&CACHE_VERSION.to_le_bytes());
        buf.extend_from_slice(&0u16.to_le_bytes());
        buf.extend_from_slice(&self.form.m().to_le_bytes());
        buf.extend_from_slice(&self.bound().to_le_bytes());
        buf.extend_from_slice(&(self.form.rank() as u32).to_le_bytes());
        for c in self.form.coeffs() {
            buf.extend_from_slice(&c.to_le_bytes());
        }
        buf.extend_from_slice(&(self.bits.words().len() as u64).to_le_bytes());
        for word in self.bits.words() {
            buf.extend_from_slice(&word.to_le_bytes());
        }
        let crc = crc32fast::hash(&buf);
        buf.extend_from_slice(&crc.to_le_bytes());
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<RepTable> {
        let mut buf = Vec::new();
        r.read_to_end(&mut buf)?;
        let mut cur = Cursor { buf: &buf, pos: 0 };
        if cur.take(4)? != CACHE_MAGIC {
            return Err(Error::CacheFormat("bad magic".into()));
        }
        let version = cur.u16()?;
        if version != CACHE_VERSION {
            return Err(Error::CacheVersion {
                found: version,
                expected: CACHE_VERSION,
            });
        }
        cur.u16()?;
        let m = cur.u32()?;
        let bound = cur.u64()?;
        check_bound(bound)?;
        let n = cur.u32()? as usize;
        let coeffs = (0..n).map(|_| cur.u64()).collect::<Result<Vec<_>>>()?;
        let nwords = cur.u64()? as usize;
        if nwords != word_count(bound) {
            return Err(Error::CacheFormat(format!(
                "word count {nwords} does not match bound {bound}"
            )));
        }
        let words = (0..nwords).map(|_| cur.u64()).collect::<Result<Vec<_>>>()?;
        let body_len = cur.pos;
        let stored = cur.u32()?;
        if cur.pos != buf.len() {
            return Err(Error::CacheFormat("trailing bytes".into()));
        }
        if crc32fast::hash(&buf[..body_len]) != stored {
            return Err(Error::CacheFormat("checksum mismatch".into()));
        }
        let form = MGonalForm::new(m, coeffs)?;
        let bits = BitSet::from_words(bound, words)
            .ok_or_else(|| Error::CacheFormat("bad bit vector".into()))?;
        Ok(RepTable { form, bits })
    }
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::CacheFormat("truncated file".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Outcome of a bounded witness search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Decomposition {
    Found { witness: Vec<i64> },
    /// No witness exists at all: the search box covered every value `<= N`.
    Absent,
    /// No witness with `|x_i| <= radius`, and the box did not cover every value.
    Inconclusive,
}

/// Searches for `(x_1..x_n)` with `|x_i| <= radius` and `sum a_i P_m(x_i) = n`.
///
/// Each variable is tried in the order `0, 1, ..., radius, -1, ..., -radius`,
/// and the first coordinate is fixed before the next. Feasibility of the
/// remainder is read off suffix tables, so the search never backtracks.
pub fn decompose(form: &MGonalForm, n: u64, radius: u64) -> Result<Decomposition> {
    check_bound(n)?;
    let m = form.m();
    let radius = radius.min(MAX_INDEX as u64) as i64;
    let full = enumerate_values(m, n)?;

    // values reachable per index inside the box, and whether the box is exhaustive
    let mut exhaustive = true;
    let mut boxed: Vec<Vec<(i64, u64)>> = Vec::with_capacity(form.rank());
    let order: Vec<i64> = (0..=radius).chain((1..=radius).map(|x| -x)).collect();
    for &a in form.coeffs() {
        let cap = n / a;
        let mut cands = Vec::new();
        for &x in &order {
            let v = eval_polygonal(m, x)?;
            if v <= cap {
                cands.push((x, v * a));
            }
        }
        let mut distinct: Vec<u64> = cands.iter().map(|&(_, av)| av / a).collect();
        distinct.sort_unstable();
        distinct.dedup();
        let covering = full.iter().take_while(|&v| v <= cap).count();
        if distinct.len() < covering {
            exhaustive = false;
        }
        boxed.push(cands);
    }

    // suffix[i]: sums reachable by variables i.. inside the box
    let k = form.rank();
    let mut suffix = vec![BitSet::new(n); k + 1];
    suffix[k].set(0);
    for i in (0..k).rev() {
        let (head, tail) = suffix.split_at_mut(i + 1);
        let next = &tail[0];
        let cur = &mut head[i];
        let mut shifts: Vec<u64> = boxed[i].iter().map(|&(_, s)| s).collect();
        shifts.sort_unstable();
        shifts.dedup();
        for s in shifts {
            cur.or_shifted(next, s);
        }
    }

    if !suffix[0].get(n) {
        return Ok(if exhaustive {
            Decomposition::Absent
        } else {
            Decomposition::Inconclusive
        });
    }
    let mut rem = n;
    let mut witness = Vec::with_capacity(k);
    for i in 0..k {
        let &(x, s) = boxed[i]
            .iter()
            .find(|&&(_, s)| s <= rem && suffix[i + 1].get(rem - s))
            .expect("suffix table guarantees a feasible choice");
        witness.push(x);
        rem -= s;
    }
    debug_assert_eq!(rem, 0);
    Ok(Decomposition::Found { witness })
}

/// Evaluates `sum a_i P_m(x_i)`.
pub fn evaluate_form(form: &MGonalForm, xs: &[i64]) -> Result<u64> {
    if xs.len() != form.rank() {
        return Err(Error::Contract(format!(
            "{} arguments for a form of rank {}",
            xs.len(),
            form.rank()
        )));
    }
    let mut total: u64 = 0;
    for (&a, &x) in form.coeffs().iter().zip(xs) {
        let term = a
            .checked_mul(eval_polygonal(form.m(), x)?)
            .ok_or_else(|| Error::ArithmeticRange("term overflow".into()))?;
        total = total
            .checked_add(term)
            .ok_or_else(|| Error::ArithmeticRange("sum overflow".into()))?;
    }
    Ok(total)
}
