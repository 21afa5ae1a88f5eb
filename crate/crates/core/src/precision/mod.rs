//! `K^T_δ(x)`: the fewest input symbols on which `T` prints a string whose
//! base-b value lies strictly within δ of `x`.

mod interval;

pub(crate) use interval::{Expansion, Interval};
use interval::Step;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::digits::{real_value_unchecked, Base, DigitStream, RealSpec};
use crate::error::{Error, Result};
use crate::fst::Fst;
use crate::infocontent::{enumerate_inputs, CostResult, InputTable, Trail};

/// Zero-run lookahead for digit streams without an exact value.
pub const DEFAULT_LOOKAHEAD: usize = 64;

/// Precision δ, either `b^-n` or an exact rational in (0, 1].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Delta {
    InversePower(u32),
    Exact(BigRational),
}

impl Delta {
    pub fn exact(value: BigRational) -> Result<Self> {
        if !value.is_positive() || value > BigRational::one() {
            return Err(Error::InvalidPrecision(format!("{value} is not in (0, 1]")));
        }
        Ok(Delta::Exact(value))
    }

    pub fn value(&self, base: Base) -> BigRational {
        match self {
            Delta::InversePower(n) => base.inverse_power(*n),
            Delta::Exact(v) => v.clone(),
        }
    }

    /// `n` when δ is exactly `b^-n`.
    pub fn as_inverse_power(&self, base: Base) -> Option<u32> {
        match self {
            Delta::InversePower(n) => Some(*n),
            Delta::Exact(v) => {
                if !v.numer().is_one() {
                    return None;
                }
                let b = BigInt::from(base.get());
                let mut p = BigInt::one();
                let mut n = 0;
                while &p < v.denom() {
                    p *= &b;
                    n += 1;
                }
                (&p == v.denom()).then_some(n)
            }
        }
    }

    /// Smallest `n` with `b^-n <= δ`, the precision in digits.
    pub fn digits(&self, base: Base) -> u32 {
        match self {
            Delta::InversePower(n) => *n,
            Delta::Exact(v) => {
                let mut n = 0;
                while base.inverse_power(n) > *v {
                    n += 1;
                }
                n
            }
        }
    }
}

impl FromStr for Delta {
    type Err = Error;

    /// `P/Q`, or `B^-N` for an inverse power of the base.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidPrecision(format!("{s:?} is neither P/Q nor B^-N"));
        if let Some((_, n)) = s.split_once("^-") {
            return n.parse().map(Delta::InversePower).map_err(|_| bad());
        }
        let (p, q) = s.split_once('/').ok_or_else(bad)?;
        let p: BigInt = p.parse().map_err(|_| bad())?;
        let q: BigInt = q.parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        Delta::exact(BigRational::new(p, q))
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Delta::InversePower(n) => write!(f, "b^-{n}"),
            Delta::Exact(v) => write!(f, "{v}"),
        }
    }
}

/// Search limits. Unset caps default to `input = 4·(n+2)` and
/// `output = maxBurst·input`, where `n` is the precision in digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub input: Option<usize>,
    pub output: Option<usize>,
    pub lookahead: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            input: None,
            output: None,
            lookahead: DEFAULT_LOOKAHEAD,
        }
    }
}

impl Caps {
    pub fn with_input(input: usize) -> Self {
        Caps {
            input: Some(input),
            ..Caps::default()
        }
    }

    pub fn input_for(&self, n: u32) -> usize {
        self.input.unwrap_or(4 * (n as usize + 2))
    }

    pub fn output_for(&self, n: u32, t: &Fst) -> usize {
        self.output
            .unwrap_or_else(|| t.max_burst().max(1) * self.input_for(n))
    }
}

#[derive(Debug, Clone)]
pub struct PrecisionQuery {
    pub x: DigitStream,
    pub delta: Delta,
    pub caps: Caps,
}

impl PrecisionQuery {
    pub fn new(x: DigitStream, delta: Delta) -> Self {
        PrecisionQuery {
            x,
            delta,
            caps: Caps::default(),
        }
    }

    pub fn from_spec(spec: &RealSpec, base: Base, delta: Delta) -> Result<Self> {
        Ok(Self::new(spec.stream(base)?, delta))
    }

    pub fn with_caps(mut self, caps: Caps) -> Self {
        self.caps = caps;
        self
    }

    pub fn base(&self) -> Base {
        self.x.base()
    }
}

/// Visited set over `(state, output length)`, grown on demand.
struct Visited {
    states: usize,
    bits: Vec<u64>,
}

impl Visited {
    fn new(states: usize) -> Self {
        Visited { states, bits: Vec::new() }
    }

    fn insert(&mut self, q: usize, len: usize) -> bool {
        let k = len * self.states + q;
        let (word, bit) = (k / 64, k % 64);
        if word >= self.bits.len() {
            self.bits.resize((word + 1).max(self.bits.len() * 2), 0);
        }
        let fresh = self.bits[word] & (1 << bit) == 0;
        self.bits[word] |= 1 << bit;
        fresh
    }
}

fn check_bases(t: &Fst, x: &DigitStream) -> Result<()> {
    if t.base() != x.base() {
        return Err(Error::BaseMismatch {
            expected: t.base().get(),
            found: x.base().get(),
        });
    }
    Ok(())
}

/// Boundary-guided breadth-first search for `K^T_δ(x)`.
///
/// Let `L = x-δ`. An output that will ever extend into the interval is
/// either already inside it or a prefix of the canonical expansion of `L`
/// (otherwise its whole cylinder lies below `L`, or it starts at or above
/// `x+δ`). So live configurations are `(state, k)` with output `L[..k]`, and
/// each transition is classified exactly as accept, continue or prune.
///
/// `Unreachable` is reported when the live configurations run out, which
/// proves that no input of any length works; `CapExceeded` when the input or
/// output cap cut the search short.
pub fn kdelta(t: &Fst, q: &PrecisionQuery) -> Result<CostResult> {
    check_bases(t, &q.x)?;
    let n = q.delta.digits(q.base());
    let cap_input = q.caps.input_for(n);
    let cap_output = q.caps.output_for(n, t);
    let mut iv = Interval::new(&q.x, &q.delta, q.caps.lookahead)?;

    if iv.contains(&[])? {
        return Ok(CostResult::found(Vec::new(), Vec::new()));
    }
    debug_assert!(iv.has_lower(), "λ is accepted whenever x < δ");

    let mut seen = Visited::new(t.state_count());
    seen.insert(t.start(), 0);
    let mut trail = Trail::default();
    let mut frontier = vec![(Trail::ROOT, t.start(), 0usize)];
    let mut truncated = false;

    for _depth in 1..=cap_input {
        let mut next = Vec::new();
        for &(id, state, i) in &frontier {
            for a in 0..t.base().get() {
                let out = t.output(state, a);
                match iv.step(i, out)? {
                    Step::Prune => {}
                    Step::Accept => {
                        let child = trail.push(id, a);
                        let mut w = iv.lower_prefix(i)?;
                        w.extend_from_slice(out);
                        return Ok(CostResult::found(trail.input(child), w));
                    }
                    Step::Continue(j) => {
                        if j > cap_output {
                            truncated = true;
                        } else {
                            let to = t.next_state(state, a);
                            if seen.insert(to, j) {
                                next.push((trail.push(id, a), to, j));
                            }
                        }
                    }
                }
            }
        }
        if next.is_empty() {
            return Ok(if truncated {
                CostResult::cap_exceeded()
            } else {
                CostResult::unreachable()
            });
        }
        frontier = next;
    }
    Ok(CostResult::cap_exceeded())
}

fn exact_target(q: &PrecisionQuery) -> Result<(BigRational, BigRational)> {
    let x = q
        .x
        .exact_value()
        .ok_or_else(|| Error::ExactValueRequired("the query point".into()))?;
    Ok((x, q.delta.value(q.base())))
}

fn within(v: &BigRational, x: &BigRational, delta: &BigRational) -> bool {
    let d = v - x;
    d.abs() < *delta
}

/// Exhaustive check of every input up to `max_len`, with exact rational
/// distances. Needs a point with an exact value.
pub fn kdelta_oracle(t: &Fst, q: &PrecisionQuery, max_len: usize) -> Result<CostResult> {
    check_bases(t, &q.x)?;
    let (x, delta) = exact_target(q)?;
    let base = t.base();
    let mut output = Vec::new();
    let hit = enumerate_inputs(base, max_len, |pi| {
        output = t.run(pi)?;
        Ok(within(&real_value_unchecked(&output, base), &x, &delta))
    })?;
    Ok(match hit {
        Some(pi) => CostResult::found(pi, output),
        None => CostResult::cap_exceeded(),
    })
}

/// Inputs, outputs and output values of one machine, for answering many
/// oracle queries from a single enumeration.
pub struct ValueTable {
    base: Base,
    entries: Vec<(Vec<u8>, Vec<u8>, BigRational)>,
}

impl ValueTable {
    pub fn new(table: &InputTable, base: Base) -> Self {
        let entries = table
            .entries()
            .iter()
            .map(|(pi, w)| (pi.clone(), w.clone(), real_value_unchecked(w, base)))
            .collect();
        ValueTable { base, entries }
    }

    pub fn kdelta(&self, q: &PrecisionQuery) -> Result<CostResult> {
        if q.base() != self.base {
            return Err(Error::BaseMismatch {
                expected: self.base.get(),
                found: q.base().get(),
            });
        }
        let (x, delta) = exact_target(q)?;
        Ok(self
            .entries
            .iter()
            .find(|(_, _, v)| within(v, &x, &delta))
            .map_or_else(CostResult::cap_exceeded, |(pi, w, _)| CostResult::found(pi.clone(), w.clone())))
    }
}

/// One precision level of a profile over a family of machines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileRow {
    pub n: usize,
    /// Minimum found cost over the family.
    pub cost: Option<usize>,
    /// `cost / n`.
    pub ratio: Option<BigRational>,
    /// Minimum ratio over unflagged rows so far.
    pub running_inf: Option<BigRational>,
    /// Some machine hit a cap at this level.
    pub cap_exceeded: bool,
}

impl ProfileRow {
    pub fn flagged(&self) -> bool {
        self.cap_exceeded || self.cost.is_none()
    }
}

/// `K^T_{b^-n}(x)` for each machine at each `n` in `ns`.
pub fn cost_series(t: &Fst, x: &DigitStream, ns: impl IntoIterator<Item = usize>, caps: Caps) -> Result<Vec<(usize, CostResult)>> {
    ns.into_iter()
        .map(|n| {
            let q = PrecisionQuery::new(x.clone(), Delta::InversePower(n as u32)).with_caps(caps);
            Ok((n, kdelta(t, &q)?))
        })
        .collect()
}

/// Rows `n = 1..=n_max` of `min_T K^T_{b^-n}(x)`, its ratio to `n`, and the
/// running infimum of ratios over rows no machine flagged.
pub fn kdelta_profile(ts: &[Fst], x: &DigitStream, n_max: usize, caps: Caps) -> Result<Vec<ProfileRow>> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("nmax must be at least 1".into()));
    }
    let series = ts
        .iter()
        .map(|t| cost_series(t, x, 1..=n_max, caps))
        .collect::<Result<Vec<_>>>()?;
    Ok(profile_rows(&series, n_max))
}

pub(crate) fn profile_rows(series: &[Vec<(usize, CostResult)>], n_max: usize) -> Vec<ProfileRow> {
    let mut rows = Vec::with_capacity(n_max);
    let mut running: Option<BigRational> = None;
    for (k, n) in (1..=n_max).enumerate() {
        let results = series.iter().map(|s| &s[k].1);
        let cap_exceeded = results.clone().any(|r| r.status == crate::infocontent::Status::CapExceeded);
        let cost = results.filter_map(CostResult::cost).min();
        let ratio = cost.map(|c| BigRational::new(c.into(), n.into()));
        if !cap_exceeded {
            if let Some(r) = &ratio {
                if running.as_ref().is_none_or(|m| r < m) {
                    running = Some(r.clone());
                }
            }
        }
        rows.push(ProfileRow {
            n,
            cost,
            ratio,
            running_inf: running.clone(),
            cap_exceeded,
        });
    }
    rows
}
