//! Upper-bound estimates of finite-state dimension.
//!
//! The dimension of a point is an infimum over all transducers of a liminf
//! of normalized costs. Here the infimum runs over a finite family and the
//! liminf is replaced by the minimum ratio over a tail window
//! `[ceil(frac·nMax), nMax]` of precisions. Adding machines or widening the
//! window can only lower an estimate, so every number reported is an upper
//! bound on what the family can witness, never a lower bound on dimension.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::digits::{Base, DigitStream};
use crate::error::{Error, Result};
use crate::fst::{build_block_huffman, make_identity, make_lead_in_decoder, NamedFst};
use crate::infocontent::{kt, CostResult};
use crate::precision::{cost_series, profile_rows, Caps, ProfileRow};

/// Precisions `lo..=hi` over which the liminf proxy is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub lo: usize,
    pub hi: usize,
}

impl Window {
    /// `[max(1, ceil(frac·n_max)), n_max]`.
    pub fn tail(n_max: usize, frac: &BigRational) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::InvalidParameter("nmax must be at least 2".into()));
        }
        if *frac < BigRational::zero() || *frac > BigRational::one() {
            return Err(Error::InvalidParameter(format!("window fraction {frac} is not in [0, 1]")));
        }
        let scaled = frac * BigRational::from_integer(BigInt::from(n_max));
        let lo: BigInt = scaled.numer().div_ceil(scaled.denom());
        let lo = usize::try_from(lo).expect("bounded by n_max").max(1);
        Ok(Window { lo, hi: n_max })
    }

    pub fn range(&self) -> std::ops::RangeInclusive<usize> {
        self.lo..=self.hi
    }
}

pub fn default_window_frac() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransducerEstimate {
    pub id: String,
    /// Liminf proxy; `None` when no row in the window was usable.
    pub proxy: Option<BigRational>,
    /// Precision at which the proxy was attained (point and sequence estimates).
    pub best_n: Option<usize>,
    /// Rows in the window that hit a cap or had no answer.
    pub flagged_rows: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EstimateReport {
    pub estimate: BigRational,
    pub per_transducer: Vec<TransducerEstimate>,
    pub window: Window,
    pub verdict: String,
}

impl EstimateReport {
    pub fn flagged_rows(&self) -> usize {
        self.per_transducer.iter().map(|t| t.flagged_rows).sum()
    }
}

/// Full profile rows alongside the family they were computed over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionProfile {
    pub rows: Vec<ProfileRow>,
    pub family: Vec<String>,
    pub window: Window,
}

pub(crate) fn proxy_of(id: &str, rows: &[(usize, CostResult)]) -> TransducerEstimate {
    let mut best: Option<(BigRational, usize)> = None;
    let mut flagged = 0;
    for (n, r) in rows {
        match r.cost() {
            Some(c) => {
                let ratio = BigRational::new(c.into(), (*n).into());
                if best.as_ref().is_none_or(|(b, _)| ratio < *b) {
                    best = Some((ratio, *n));
                }
            }
            None => flagged += 1,
        }
    }
    TransducerEstimate {
        id: id.to_string(),
        proxy: best.as_ref().map(|(r, _)| r.clone()),
        best_n: best.map(|(_, n)| n),
        flagged_rows: flagged,
    }
}

pub(crate) fn min_report(per_transducer: Vec<TransducerEstimate>, window: Window, what: &str) -> Result<EstimateReport> {
    let estimate = per_transducer
        .iter()
        .filter_map(|t| t.proxy.clone())
        .min()
        .ok_or(Error::AllRowsFlagged)?;
    let verdict = format!(
        "upper-bound estimate of the {what} finite-state dimension over {} transducer(s)",
        per_transducer.len()
    );
    Ok(EstimateReport {
        estimate,
        per_transducer,
        window,
        verdict,
    })
}

pub(crate) fn check_family(family: &[NamedFst], base: Base) -> Result<()> {
    if family.is_empty() {
        return Err(Error::InvalidParameter("transducer family is empty".into()));
    }
    for t in family {
        if t.fst.base() != base {
            return Err(Error::BaseMismatch {
                expected: base.get(),
                found: t.fst.base().get(),
            });
        }
    }
    Ok(())
}

/// Point estimate: per machine, the minimum of `K^T_{b^-n}(x)/n` over the
/// window; the estimate is the minimum over machines.
pub fn dim_point_estimate(family: &[NamedFst], x: &DigitStream, n_max: usize, window_frac: &BigRational, caps: Caps) -> Result<EstimateReport> {
    let window = Window::tail(n_max, window_frac)?;
    check_family(family, x.base())?;
    let per = family
        .iter()
        .map(|t| Ok(proxy_of(&t.id, &cost_series(&t.fst, x, window.range(), caps)?)))
        .collect::<Result<Vec<_>>>()?;
    min_report(per, window, "point")
}

/// Computes every row `n = 1..=n_max` once and derives both the profile and
/// the windowed estimate from it.
pub fn dim_point_profile(
    family: &[NamedFst],
    x: &DigitStream,
    n_max: usize,
    window_frac: &BigRational,
    caps: Caps,
) -> Result<(DimensionProfile, EstimateReport)> {
    let window = Window::tail(n_max, window_frac)?;
    check_family(family, x.base())?;
    let series = family
        .iter()
        .map(|t| cost_series(&t.fst, x, 1..=n_max, caps))
        .collect::<Result<Vec<_>>>()?;
    let per = family
        .iter()
        .zip(&series)
        .map(|(t, s)| proxy_of(&t.id, &s[window.lo - 1..]))
        .collect();
    let report = min_report(per, window, "point")?;
    let profile = DimensionProfile {
        rows: profile_rows(&series, n_max),
        family: family.iter().map(|t| t.id.clone()).collect(),
        window,
    };
    Ok((profile, report))
}

/// Sequence estimate: per machine, the minimum of `K^T(S↾n)/n` over the
/// window. `cap` bounds each search; by default `4·(n+2)`.
pub fn dim_seq_estimate(family: &[NamedFst], s: &DigitStream, n_max: usize, window_frac: &BigRational, cap: Option<usize>) -> Result<EstimateReport> {
    let window = Window::tail(n_max, window_frac)?;
    check_family(family, s.base())?;
    let prefix = s.prefix(n_max)?;
    let per = family
        .iter()
        .map(|t| {
            let rows = window
                .range()
                .map(|n| Ok((n, kt(&t.fst, &prefix[..n], cap.unwrap_or(4 * (n + 2)))?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(proxy_of(&t.id, &rows))
        })
        .collect::<Result<Vec<_>>>()?;
    min_report(per, window, "sequence")
}

/// Finite-set estimate: `min_T max_{x ∈ xs} proxy_T(x)`. A machine without a
/// usable proxy for some point bounds nothing and is skipped.
pub fn dim_set_estimate(family: &[NamedFst], xs: &[DigitStream], n_max: usize, window_frac: &BigRational, caps: Caps) -> Result<EstimateReport> {
    if xs.is_empty() {
        return Err(Error::InvalidParameter("point set is empty".into()));
    }
    let window = Window::tail(n_max, window_frac)?;
    for x in xs {
        check_family(family, x.base())?;
    }
    let per = family
        .iter()
        .map(|t| {
            let mut flagged = 0;
            let mut worst: Option<Option<BigRational>> = None;
            for x in xs {
                let est = proxy_of(&t.id, &cost_series(&t.fst, x, window.range(), caps)?);
                flagged += est.flagged_rows;
                worst = Some(match (worst, est.proxy) {
                    (None, p) => p,
                    (Some(Some(a)), Some(b)) => Some(a.max(b)),
                    _ => None,
                });
            }
            Ok(TransducerEstimate {
                id: t.id.clone(),
                proxy: worst.flatten(),
                best_n: None,
                flagged_rows: flagged,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    min_report(per, window, "set")
}

/// Options for [`normality_report`].
#[derive(Debug, Clone)]
pub struct NormalityOptions {
    /// Block-Huffman decoders for block lengths `1..=max_block`.
    pub max_block: usize,
    /// Training prefix length; defaults to `max(n_max, 256)`.
    pub train_len: Option<usize>,
    /// Estimates below this are reported as compressible.
    pub threshold: BigRational,
    pub window_frac: BigRational,
    pub caps: Caps,
}

impl Default for NormalityOptions {
    fn default() -> Self {
        NormalityOptions {
            max_block: 4,
            train_len: None,
            threshold: BigRational::new(95.into(), 100.into()),
            window_frac: default_window_frac(),
            caps: Caps::default(),
        }
    }
}

pub const VERDICT_COMPRESSIBLE: &str = "compressible (not normal)";
pub const VERDICT_NO_COMPRESSION: &str = "no compression found (consistent with normality)";

/// Searches the first `window` digits for an eventually periodic pattern:
/// the smallest lead-in `s <= 32`, then the smallest period `p <= 32`, such
/// that `d[i] = d[i+p]` for all `s <= i < window-p`.
pub fn detect_repetition(digits: &[u8]) -> Option<(Vec<u8>, Vec<u8>)> {
    const MAX: usize = 32;
    let len = digits.len();
    for s in 0..=MAX {
        for p in 1..=MAX {
            // demand at least two full periods of evidence past the lead-in
            if s + 2 * p > len {
                break;
            }
            if (s..len - p).all(|i| digits[i] == digits[i + p]) {
                return Some((digits[..s].to_vec(), digits[s..s + p].to_vec()));
            }
        }
    }
    None
}

/// The built-in witness family for a point: identity, block-Huffman
/// decoders trained on the point's own prefix, and periodic decoders for a
/// repetition detected in the first 256 digits (copies 1, 2, 4, 8, 16).
pub fn builtin_family(x: &DigitStream, n_max: usize, opts: &NormalityOptions) -> Result<Vec<NamedFst>> {
    let base = x.base();
    let mut family = vec![NamedFst::new("identity", make_identity(base))];
    let mut train_len = opts.train_len.unwrap_or(n_max.max(256));
    if let Some(avail) = x.available() {
        train_len = train_len.min(avail);
    }
    for k in 1..=opts.max_block {
        let usable = train_len / k * k;
        if usable == 0 {
            continue;
        }
        let h = build_block_huffman(x, usable, k, base)?;
        family.push(NamedFst::new(format!("huffman_k{k}"), h.fst));
    }
    let window = x.available().map_or(256, |n| n.min(256));
    if let Some((lead, pattern)) = detect_repetition(&x.prefix(window)?) {
        for copies in [1, 2, 4, 8, 16] {
            let t = make_lead_in_decoder(&lead, &pattern, copies, base)?;
            family.push(NamedFst::new(format!("periodic_x{copies}"), t));
        }
    }
    Ok(family)
}

#[derive(Debug, Clone)]
pub struct NormalityReport {
    pub report: EstimateReport,
    pub compressible: bool,
}

/// Dimension upper bound over the built-in family, with a verdict. A low
/// estimate proves the point is not normal in this base; a high one is only
/// evidence, since the infimum ranges over all transducers.
pub fn normality_report(x: &DigitStream, n_max: usize, opts: &NormalityOptions) -> Result<NormalityReport> {
    let family = builtin_family(x, n_max, opts)?;
    let mut report = dim_point_estimate(&family, x, n_max, &opts.window_frac, opts.caps)?;
    let compressible = report.estimate < opts.threshold;
    report.verdict = if compressible {
        VERDICT_COMPRESSIBLE.to_string()
    } else {
        VERDICT_NO_COMPRESSION.to_string()
    };
    Ok(NormalityReport { report, compressible })
}
