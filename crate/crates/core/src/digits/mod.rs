//! Digit strings, base-b values, and canonical expansions of reals in [0, 1).
//!
//! A word is a `[u8]` of digit values (not ASCII). Position `i` carries
//! place value `b^-(i+1)`, so `real_value(w) = Σ w[i]·b^-(i+1)` and the
//! empty word has value 0.

mod spec;
mod stream;

pub use spec::RealSpec;
pub use stream::DigitStream;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Digit alphabet size, restricted to 2..=10 so every digit is one character.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Base(u8);

impl Base {
    pub const BINARY: Base = Base(2);

    pub fn new(b: u32) -> Result<Self> {
        if (2..=10).contains(&b) {
            Ok(Base(b as u8))
        } else {
            Err(Error::InvalidBase(b))
        }
    }

    #[inline]
    pub fn get(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn size(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn max_digit(self) -> u8 {
        self.0 - 1
    }

    /// `b^-n` as an exact rational.
    pub fn inverse_power(self, n: u32) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(self.0).pow(n))
    }

    pub(crate) fn check_digit(self, d: u8) -> Result<()> {
        if d < self.0 {
            Ok(())
        } else {
            Err(Error::InvalidDigit {
                digit: digit_char(d),
                base: self.0,
            })
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn digit_char(d: u8) -> char {
    char::from_digit(d as u32, 36).unwrap_or('?')
}

/// Parses a string of ASCII digits. The empty string and `-` both denote λ.
pub fn parse_word(s: &str, base: Base) -> Result<Vec<u8>> {
    if s == "-" {
        return Ok(Vec::new());
    }
    s.chars()
        .map(|c| match c.to_digit(10) {
            Some(d) if d < base.get() as u32 => Ok(d as u8),
            _ => Err(Error::InvalidDigit {
                digit: c,
                base: base.get(),
            }),
        })
        .collect()
}

/// Renders a word as ASCII digits (λ renders as the empty string).
pub fn format_word(w: &[u8]) -> String {
    w.iter().map(|&d| digit_char(d)).collect()
}

pub fn check_word(w: &[u8], base: Base) -> Result<()> {
    w.iter().try_for_each(|&d| base.check_digit(d))
}

/// `real_b(w)`: the exact value of `w` read as a base-b fraction.
pub fn real_value(w: &[u8], base: Base) -> Result<BigRational> {
    check_word(w, base)?;
    Ok(real_value_unchecked(w, base))
}

pub(crate) fn real_value_unchecked(w: &[u8], base: Base) -> BigRational {
    let b = BigInt::from(base.get());
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for &d in w {
        num = num * &b + BigInt::from(d);
        den *= &b;
    }
    BigRational::new(num, den)
}

/// Positionwise complement `b-1-w[i]`.
pub fn comp(w: &[u8], base: Base) -> Result<Vec<u8>> {
    check_word(w, base)?;
    Ok(w.iter().map(|&d| base.max_digit() - d).collect())
}

/// Clamped interval `[max(0, x-b^-n), min(1, x+b^-n)]` around a real.
///
/// For reals without an exact value (Champernowne, digit files) the rational
/// endpoints are `None`; the digit expansions are still available, obtained
/// by borrowing from / carrying into the first `n` digits.
#[derive(Debug, Clone)]
pub struct Endpoints {
    pub lower: Option<BigRational>,
    pub upper: Option<BigRational>,
    /// Canonical expansion of the (clamped) lower endpoint.
    pub lower_stream: DigitStream,
    /// Canonical expansion of the upper endpoint; `None` when it clamps to 1.
    pub upper_stream: Option<DigitStream>,
    pub lower_clamped: bool,
    pub upper_clamped: bool,
}

pub fn interval_endpoints(spec: &RealSpec, base: Base, n: u32) -> Result<Endpoints> {
    let x = spec.stream(base)?;
    endpoints_of_stream(&x, n)
}

pub(crate) fn endpoints_of_stream(x: &DigitStream, n: u32) -> Result<Endpoints> {
    let base = x.base();
    if let Some(value) = x.exact_value() {
        let delta = base.inverse_power(n);
        let lo = &value - &delta;
        let hi = &value + &delta;
        let lower_clamped = lo < BigRational::zero();
        let upper_clamped = hi >= BigRational::one();
        let lower = if lower_clamped { BigRational::zero() } else { lo };
        let upper = if upper_clamped { BigRational::one() } else { hi };
        let lower_stream = DigitStream::from_rational(lower.clone(), base)?;
        let upper_stream = if upper_clamped {
            None
        } else {
            Some(DigitStream::from_rational(upper.clone(), base)?)
        };
        return Ok(Endpoints {
            lower: Some(lower),
            upper: Some(upper),
            lower_stream,
            upper_stream,
            lower_clamped,
            upper_clamped,
        });
    }

    endpoints_of_stream_digits(x, n)
}

/// Endpoints of `(x - b^-n, x + b^-n)` by borrow and carry on the first `n`
/// digits; exact for any canonical expansion, with only `lower`/`upper` set
/// when clamped to 0 or 1.
pub(crate) fn endpoints_of_stream_digits(x: &DigitStream, n: u32) -> Result<Endpoints> {
    let base = x.base();
    let n = n as usize;
    let head = x.prefix(n)?;
    let lower_stream = decrement(&head, base).map(|dec| DigitStream::patched(dec, x.clone()));
    let upper_stream = increment(&head, base).map(|inc| DigitStream::patched(inc, x.clone()));
    Ok(Endpoints {
        lower: if lower_stream.is_none() {
            Some(BigRational::zero())
        } else {
            None
        },
        upper: if upper_stream.is_none() {
            Some(BigRational::one())
        } else {
            None
        },
        lower_clamped: lower_stream.is_none(),
        upper_clamped: upper_stream.is_none(),
        lower_stream: lower_stream.unwrap_or_else(|| DigitStream::zero(base)),
        upper_stream,
    })
}

/// Subtracts one unit in the last place; `None` on underflow (all zeros).
pub(crate) fn decrement(head: &[u8], base: Base) -> Option<Vec<u8>> {
    let mut out = head.to_vec();
    for d in out.iter_mut().rev() {
        if *d > 0 {
            *d -= 1;
            return Some(out);
        }
        *d = base.max_digit();
    }
    None
}

/// Adds one unit in the last place; `None` on overflow (all `b-1`).
pub(crate) fn increment(head: &[u8], base: Base) -> Option<Vec<u8>> {
    let mut out = head.to_vec();
    for d in out.iter_mut().rev() {
        if *d < base.max_digit() {
            *d += 1;
            return Some(out);
        }
        *d = 0;
    }
    None
}

/// First `count` digits of the canonical base-b expansion of `spec`.
pub fn seq_digits(spec: &RealSpec, base: Base, count: usize) -> Result<Vec<u8>> {
    spec.stream(base)?.prefix(count)
}
