use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{parse_word, real_value_unchecked, Base, DigitStream};
use crate::error::{Error, Result};

/// A real number in [0, 1), as written on the command line.
///
/// Grammar: `rat:P/Q`, `periodic:W`, `dyadic:W`, `champernowne`,
/// `digitfile:PATH`. Digit patterns are interpreted in the base supplied
/// when the spec is turned into a stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RealSpec {
    Rational(BigRational),
    /// `real_b(WWW...)`.
    Periodic(String),
    /// `real_b(W)`, a finite expansion.
    Dyadic(String),
    Champernowne,
    DigitFile(PathBuf),
}

impl RealSpec {
    pub fn rational(p: i64, q: i64) -> Result<Self> {
        if q <= 0 || p < 0 || p >= q {
            return Err(Error::SpecOutOfRange(format!("{p}/{q}")));
        }
        Ok(RealSpec::Rational(BigRational::new(p.into(), q.into())))
    }

    /// Exact value, when the spec has one.
    pub fn exact_value(&self, base: Base) -> Result<Option<BigRational>> {
        match self {
            RealSpec::Rational(r) => Ok(Some(r.clone())),
            RealSpec::Periodic(pattern) => {
                let w = parse_word(pattern, base)?;
                if w.is_empty() {
                    return Err(Error::EmptyPattern);
                }
                // real_b(W^∞) = real_b(W) · b^|W| / (b^|W| - 1)
                let scale = BigInt::from(base.get()).pow(w.len() as u32);
                let value = real_value_unchecked(&w, base) * BigRational::from_integer(scale.clone())
                    / BigRational::from_integer(scale - BigInt::one());
                if value >= BigRational::one() {
                    return Err(Error::SpecOutOfRange(self.to_string()));
                }
                Ok(Some(value))
            }
            RealSpec::Dyadic(digits) => {
                let w = parse_word(digits, base)?;
                Ok(Some(real_value_unchecked(&w, base)))
            }
            RealSpec::Champernowne | RealSpec::DigitFile(_) => Ok(None),
        }
    }

    /// Canonical base-b expansion of this real.
    pub fn stream(&self, base: Base) -> Result<DigitStream> {
        match self {
            RealSpec::Champernowne => Ok(DigitStream::champernowne(base)),
            RealSpec::DigitFile(path) => DigitStream::from_digit_file(path, base),
            _ => {
                let value = self.exact_value(base)?.expect("exact spec");
                DigitStream::from_rational(value, base)
            }
        }
    }
}

impl FromStr for RealSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::BadRealSpec {
            spec: s.to_string(),
            reason: reason.to_string(),
        };
        if s == "champernowne" {
            return Ok(RealSpec::Champernowne);
        }
        let (kind, payload) = s
            .split_once(':')
            .ok_or_else(|| bad("expected KIND:VALUE or `champernowne`"))?;
        match kind {
            "rat" => {
                let (p, q) = payload
                    .split_once('/')
                    .ok_or_else(|| bad("expected rat:P/Q"))?;
                let p: BigInt = p.trim().parse().map_err(|_| bad("numerator is not an integer"))?;
                let q: BigInt = q.trim().parse().map_err(|_| bad("denominator is not an integer"))?;
                if !q.is_positive() {
                    return Err(bad("denominator must be positive"));
                }
                if p.is_negative() || p >= q {
                    return Err(Error::SpecOutOfRange(payload.to_string()));
                }
                Ok(RealSpec::Rational(BigRational::new(p, q)))
            }
            "periodic" | "dyadic" => {
                if !payload.chars().all(|c| c.is_ascii_digit()) {
                    return Err(bad("pattern must consist of ASCII digits"));
                }
                if kind == "periodic" {
                    if payload.is_empty() {
                        return Err(Error::EmptyPattern);
                    }
                    Ok(RealSpec::Periodic(payload.to_string()))
                } else {
                    Ok(RealSpec::Dyadic(payload.to_string()))
                }
            }
            "digitfile" => {
                if payload.is_empty() {
                    return Err(bad("missing path"));
                }
                Ok(RealSpec::DigitFile(PathBuf::from(payload)))
            }
            _ => Err(bad("unknown kind")),
        }
    }
}

impl fmt::Display for RealSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealSpec::Rational(r) => {
                if r.is_zero() {
                    write!(f, "rat:0/1")
                } else {
                    write!(f, "rat:{}/{}", r.numer(), r.denom())
                }
            }
            RealSpec::Periodic(w) => write!(f, "periodic:{w}"),
            RealSpec::Dyadic(w) => write!(f, "dyadic:{w}"),
            RealSpec::Champernowne => write!(f, "champernowne"),
            RealSpec::DigitFile(p) => write!(f, "digitfile:{}", p.display()),
        }
    }
}
