use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{real_value_unchecked, Base};
use crate::error::{Error, Result};

/// An infinite (or, for digit files, finite) base-b digit sequence with
/// random access by position.
///
/// Every accessor is a pure function of the position; clones share their
/// backing data.
#[derive(Debug, Clone)]
pub struct DigitStream {
    base: Base,
    source: Source,
}

#[derive(Debug, Clone)]
enum Source {
    /// Long division of `num/den`, `0 <= num < den`, reduced.
    Rational {
        num: BigInt,
        den: BigInt,
        /// Number of digits after which the expansion is all zeros, if finite.
        terminates_at: Option<usize>,
    },
    Champernowne,
    /// Digits read from a file; positions past the end are unavailable.
    Finite(Arc<[u8]>),
    /// `head` replaces the first `head.len()` digits of `tail`.
    Patched {
        head: Arc<[u8]>,
        tail: Arc<DigitStream>,
    },
    Complement(Arc<DigitStream>),
}

impl DigitStream {
    pub fn from_rational(value: BigRational, base: Base) -> Result<Self> {
        if value.is_negative() || value >= BigRational::one() {
            return Err(Error::SpecOutOfRange(value.to_string()));
        }
        let (num, den) = value.into_raw();
        let terminates_at = termination_length(&den, base);
        Ok(DigitStream {
            base,
            source: Source::Rational {
                num,
                den,
                terminates_at,
            },
        })
    }

    pub fn zero(base: Base) -> Self {
        DigitStream {
            base,
            source: Source::Rational {
                num: BigInt::zero(),
                den: BigInt::one(),
                terminates_at: Some(0),
            },
        }
    }

    /// Concatenation of the base-b numerals 1, 2, 3, ...
    pub fn champernowne(base: Base) -> Self {
        DigitStream {
            base,
            source: Source::Champernowne,
        }
    }

    pub fn finite(digits: Vec<u8>, base: Base) -> Result<Self> {
        super::check_word(&digits, base)?;
        Ok(DigitStream {
            base,
            source: Source::Finite(digits.into()),
        })
    }

    /// Reads a digit file: ASCII digits, whitespace ignored, `#` starts a
    /// comment that runs to the end of the line.
    pub fn from_digit_file(path: &Path, base: Base) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::finite(parse_digit_text(&text, base)?, base)
    }

    pub(crate) fn patched(head: Vec<u8>, tail: DigitStream) -> Self {
        DigitStream {
            base: tail.base,
            source: Source::Patched {
                head: head.into(),
                tail: Arc::new(tail),
            },
        }
    }

    /// Positionwise complement `b-1-S[i]`. The result need not be canonical.
    pub fn complement(&self) -> Self {
        DigitStream {
            base: self.base,
            source: Source::Complement(Arc::new(self.clone())),
        }
    }

    #[inline]
    pub fn base(&self) -> Base {
        self.base
    }

    /// Number of available digits; `None` for infinite streams.
    pub fn available(&self) -> Option<usize> {
        match &self.source {
            Source::Rational { .. } | Source::Champernowne => None,
            Source::Finite(d) => Some(d.len()),
            Source::Patched { tail, .. } => tail.available(),
            Source::Complement(inner) => inner.available(),
        }
    }

    pub fn digit(&self, i: usize) -> Result<u8> {
        Ok(self.range(i, i + 1)?[0])
    }

    pub fn prefix(&self, m: usize) -> Result<Vec<u8>> {
        self.range(0, m)
    }

    /// Digits at positions `start..end`.
    pub fn range(&self, start: usize, end: usize) -> Result<Vec<u8>> {
        if end <= start {
            return Ok(Vec::new());
        }
        match &self.source {
            Source::Rational { num, den, .. } => Ok(rational_digits(num, den, self.base, start, end)),
            Source::Champernowne => Ok(champernowne_digits(self.base, start, end)),
            Source::Finite(d) => {
                if end > d.len() {
                    Err(Error::InsufficientDigits { needed: end - 1 })
                } else {
                    Ok(d[start..end].to_vec())
                }
            }
            Source::Patched { head, tail } => {
                let h = head.len();
                let mut out = Vec::with_capacity(end - start);
                if start < h {
                    out.extend_from_slice(&head[start..end.min(h)]);
                }
                if end > h {
                    out.extend(tail.range(start.max(h), end)?);
                }
                Ok(out)
            }
            Source::Complement(inner) => {
                let top = self.base.max_digit();
                Ok(inner.range(start, end)?.into_iter().map(|d| top - d).collect())
            }
        }
    }

    /// Exact value of the first `m` digits.
    pub fn exact_value_up_to(&self, m: usize) -> Result<BigRational> {
        Ok(real_value_unchecked(&self.prefix(m)?, self.base))
    }

    /// Exact value of the whole sequence, when it is known to be rational.
    pub fn exact_value(&self) -> Option<BigRational> {
        match &self.source {
            Source::Rational { num, den, .. } => Some(BigRational::new(num.clone(), den.clone())),
            Source::Champernowne | Source::Finite(_) => None,
            Source::Patched { head, tail } => {
                let v = tail.exact_value()?;
                let replaced = tail.exact_value_up_to(head.len()).ok()?;
                Some(v - replaced + real_value_unchecked(head, self.base))
            }
            Source::Complement(inner) => Some(BigRational::one() - inner.exact_value()?),
        }
    }

    /// Whether some digit at position `>= p` is nonzero.
    ///
    /// Streams without structural knowledge of their tail scan at most
    /// `lookahead` digits; a longer run of zeros is `InsufficientDigits`.
    pub fn has_nonzero_from(&self, p: usize, lookahead: usize) -> Result<bool> {
        match &self.source {
            Source::Rational { terminates_at, .. } => Ok(terminates_at.is_none_or(|t| p < t)),
            // every numeral begins with a nonzero digit
            Source::Champernowne => Ok(true),
            Source::Finite(d) => {
                let stop = d.len().min(p.saturating_add(lookahead));
                if p < stop && d[p..stop].iter().any(|&x| x != 0) {
                    Ok(true)
                } else {
                    Err(Error::InsufficientDigits { needed: stop.max(p) })
                }
            }
            Source::Patched { head, tail } => {
                if p < head.len() && head[p..].iter().any(|&x| x != 0) {
                    return Ok(true);
                }
                tail.has_nonzero_from(p.max(head.len()), lookahead)
            }
            Source::Complement(inner) => {
                if matches!(inner.source, Source::Rational { .. }) {
                    // canonical expansions never end in all (b-1)s
                    return Ok(true);
                }
                let top = self.base.max_digit();
                let mut stop = p.saturating_add(lookahead);
                if let Some(n) = inner.available() {
                    stop = stop.min(n);
                }
                if p < stop && inner.range(p, stop)?.iter().any(|&d| d != top) {
                    Ok(true)
                } else {
                    Err(Error::InsufficientDigits { needed: stop.max(p) })
                }
            }
        }
    }
}

/// Parses digit-file text.
pub(crate) fn parse_digit_text(text: &str, base: Base) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for line in text.lines() {
        let body = line.split('#').next().unwrap_or("");
        for c in body.chars().filter(|c| !c.is_whitespace()) {
            match c.to_digit(10) {
                Some(d) if d < base.get() as u32 => out.push(d as u8),
                _ => {
                    return Err(Error::InvalidDigit {
                        digit: c,
                        base: base.get(),
                    })
                }
            }
        }
    }
    Ok(out)
}

/// Smallest `k` with `den | b^k`, or `None` if the expansion never terminates.
fn termination_length(den: &BigInt, base: Base) -> Option<usize> {
    let b = BigInt::from(base.get());
    let mut rest = den.clone();
    let mut k = 0;
    while !rest.is_one() {
        let g = rest.gcd(&b);
        if g.is_one() {
            return None;
        }
        rest /= g;
        k += 1;
    }
    Some(k)
}

fn rational_digits(num: &BigInt, den: &BigInt, base: Base, start: usize, end: usize) -> Vec<u8> {
    let b = BigInt::from(base.get());
    let first = (num * b.modpow(&BigInt::from(start), den)) % den;
    let mut out = Vec::with_capacity(end - start);
    if let (Some(r0), Some(d)) = (first.to_u64(), den.to_u64()) {
        let (b, d) = (base.get() as u128, d as u128);
        let mut r = r0 as u128;
        for _ in start..end {
            r *= b;
            out.push((r / d) as u8);
            r %= d;
        }
    } else {
        let mut r = first;
        for _ in start..end {
            r *= &b;
            let (q, rem) = r.div_rem(den);
            out.push(q.to_u8().expect("digit below base"));
            r = rem;
        }
    }
    out
}

/// Champernowne digits `start..end` in base `b`: numerals of length `L`
/// occupy a block of `L·(b-1)·b^(L-1)` digits.
fn champernowne_digits(base: Base, start: usize, end: usize) -> Vec<u8> {
    let b = base.get() as u128;
    let mut offset = start as u128;
    let mut len: u32 = 1;
    let mut first: u128 = 1;
    loop {
        let block = len as u128 * (b - 1) * first;
        if offset < block {
            break;
        }
        offset -= block;
        len += 1;
        first *= b;
    }
    let mut numeral = first + offset / len as u128;
    let mut skip = (offset % len as u128) as usize;
    let mut out = Vec::with_capacity(end - start);
    let mut buf = Vec::with_capacity(64);
    while out.len() < end - start {
        buf.clear();
        let mut v = numeral;
        while v > 0 {
            buf.push((v % b) as u8);
            v /= b;
        }
        for &d in buf.iter().rev().skip(skip) {
            if out.len() == end - start {
                break;
            }
            out.push(d);
        }
        skip = 0;
        numeral += 1;
    }
    out
}
