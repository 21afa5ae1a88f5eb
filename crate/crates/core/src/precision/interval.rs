use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::Delta;
use crate::digits::{endpoints_of_stream_digits, DigitStream};
use crate::error::{Error, Result};

/// Canonical expansion of an endpoint with a lazily grown digit cache.
pub(crate) struct Expansion {
    stream: DigitStream,
    cache: Vec<u8>,
    lookahead: usize,
}

impl Expansion {
    pub(crate) fn new(stream: DigitStream, lookahead: usize) -> Self {
        Expansion {
            stream,
            cache: Vec::new(),
            lookahead,
        }
    }

    #[inline]
    pub(crate) fn digit(&mut self, i: usize) -> Result<u8> {
        if i >= self.cache.len() {
            self.grow(i)?;
        }
        Ok(self.cache[i])
    }

    #[cold]
    fn grow(&mut self, i: usize) -> Result<()> {
        let mut want = (i + 1).max(self.cache.len() * 2).max(256);
        if let Some(n) = self.stream.available() {
            if i >= n {
                return Err(Error::InsufficientDigits { needed: i });
            }
            want = want.min(n);
        }
        let more = self.stream.range(self.cache.len(), want)?;
        self.cache.extend(more);
        Ok(())
    }

    pub(crate) fn prefix(&mut self, m: usize) -> Result<Vec<u8>> {
        if m > 0 {
            self.digit(m - 1)?;
        }
        Ok(self.cache[..m].to_vec())
    }

    /// Compares `w·0^∞` with this expansion, where `w = self[..offset] ++ rest`;
    /// the caller guarantees the shared prefix.
    pub(crate) fn cmp_tail(&mut self, offset: usize, rest: &[u8]) -> Result<Ordering> {
        self.cmp_with(offset, rest.len(), |k| Ok(rest[k]))
    }

    /// As [`Self::cmp_tail`] with the `len` remaining digits produced lazily.
    pub(crate) fn cmp_with(&mut self, offset: usize, len: usize, mut rest: impl FnMut(usize) -> Result<u8>) -> Result<Ordering> {
        for k in 0..len {
            let d = rest(k)?;
            let e = self.digit(offset + k)?;
            if d != e {
                return Ok(d.cmp(&e));
            }
        }
        if self.stream.has_nonzero_from(offset + len, self.lookahead)? {
            Ok(Ordering::Less)
        } else {
            Ok(Ordering::Equal)
        }
    }
}

/// Outcome of appending output to a configuration whose output so far is a
/// prefix of the lower endpoint's expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Step {
    /// Still a prefix of the lower endpoint's expansion, now of this length.
    Continue(usize),
    Accept,
    Prune,
}

/// The open interval `(x-δ, x+δ)` intersected with `[0, 1)`, described by
/// the canonical expansions of its endpoints.
pub(crate) struct Interval {
    /// `None` when `x-δ < 0`.
    lower: Option<Expansion>,
    /// `None` when `x+δ >= 1`.
    upper: Option<Expansion>,
    /// Length of the common prefix of the two expansions.
    common: usize,
}

impl Interval {
    pub(crate) fn new(x: &DigitStream, delta: &Delta, lookahead: usize) -> Result<Self> {
        let base = x.base();
        // For δ = b^-n the endpoints are x's own digits with one unit
        // borrowed from or carried into position n, which stays cheap even
        // when x - δ has a huge denominator.
        let (lower, upper) = match delta.as_inverse_power(base) {
            Some(n) => {
                let e = endpoints_of_stream_digits(x, n)?;
                ((!e.lower_clamped).then_some(e.lower_stream), e.upper_stream)
            }
            None => {
                let v = x.exact_value().ok_or_else(|| {
                    Error::InvalidPrecision(format!(
                        "reals without an exact value need a precision of the form {base}^-n"
                    ))
                })?;
                let d = delta.value(base);
                let lo = &v - &d;
                let hi = &v + &d;
                let lower = if lo < BigRational::zero() {
                    None
                } else {
                    Some(DigitStream::from_rational(lo, base)?)
                };
                let upper = if hi >= BigRational::one() {
                    None
                } else {
                    Some(DigitStream::from_rational(hi, base)?)
                };
                (lower, upper)
            }
        };
        let mut iv = Interval {
            lower: lower.map(|s| Expansion::new(s, lookahead)),
            upper: upper.map(|s| Expansion::new(s, lookahead)),
            common: 0,
        };
        if let (Some(l), Some(u)) = (iv.lower.as_mut(), iv.upper.as_mut()) {
            // L < U, both canonical: they differ at some finite position
            while l.digit(iv.common)? == u.digit(iv.common)? {
                iv.common += 1;
            }
        }
        Ok(iv)
    }

    pub(crate) fn has_lower(&self) -> bool {
        self.lower.is_some()
    }

    /// Exact test `x-δ < real_b(w) < x+δ`.
    pub(crate) fn contains(&mut self, w: &[u8]) -> Result<bool> {
        self.contains_with(w.len(), |k| Ok(w[k]))
    }

    /// Membership of a word of length `len` whose digits are produced lazily.
    pub(crate) fn contains_with(&mut self, len: usize, mut w: impl FnMut(usize) -> Result<u8>) -> Result<bool> {
        let above = match self.lower.as_mut() {
            None => true,
            Some(l) => l.cmp_with(0, len, &mut w)? == Ordering::Greater,
        };
        Ok(above
            && match self.upper.as_mut() {
                None => true,
                Some(u) => u.cmp_with(0, len, &mut w)? == Ordering::Less,
            })
    }

    /// Classifies `w' = L[..i] ++ v`.
    ///
    /// If `w'` is still a prefix of `L`'s expansion it lies at or below `L`
    /// and some extension may enter the interval. If it departs downward
    /// every extension stays below `L`. If it departs upward it exceeds `L`
    /// and is accepted exactly when it is below `U`.
    pub(crate) fn step(&mut self, i: usize, v: &[u8]) -> Result<Step> {
        let lower = self.lower.as_mut().expect("step requires a lower endpoint");
        for (j, &d) in v.iter().enumerate() {
            let e = lower.digit(i + j)?;
            match d.cmp(&e) {
                Ordering::Equal => continue,
                Ordering::Less => return Ok(Step::Prune),
                Ordering::Greater => {
                    let pos = i + j;
                    let below = match self.upper.as_mut() {
                        None => true,
                        // w'[common] = L[common] < U[common]
                        Some(_) if pos > self.common => true,
                        Some(u) => u.cmp_tail(pos, &v[j..])? == Ordering::Less,
                    };
                    return Ok(if below { Step::Accept } else { Step::Prune });
                }
            }
        }
        Ok(Step::Continue(i + v.len()))
    }

    pub(crate) fn lower_prefix(&mut self, m: usize) -> Result<Vec<u8>> {
        self.lower.as_mut().expect("lower endpoint").prefix(m)
    }
}
