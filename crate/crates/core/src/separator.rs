//! Separator enumerators: computable maps from strings onto a dense subset
//! of `[0, 1)`, and information content measured through them.
//!
//! With an enumerator `f`, a machine's output `w` stands for the point
//! `f(w)` instead of `real_b(w)`. The canonical enumerator recovers the plain
//! costs; a targeted enumerator shows how far the choice of `f` can move the
//! dimension of a single point.

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};

use num_rational::BigRational;

use crate::digits::{check_word, format_word, parse_word, real_value_unchecked, Base, DigitStream, RealSpec};
use crate::dimension::{check_family, min_report, proxy_of, EstimateReport, TransducerEstimate, Window};
use crate::error::{Error, Result};
use crate::fst::{Fst, NamedFst};
use crate::infocontent::{enumerate_inputs, CostResult, Trail};
use crate::precision::{Delta, Expansion, Interval, DEFAULT_LOOKAHEAD};

/// Longest image materialized by [`SeparatorEnumerator::eval_digits`].
pub const MAX_MATERIALIZED: usize = 1 << 20;

#[derive(Debug, Clone)]
pub enum EnumeratorKind {
    /// `f(w) = real_b(w)`.
    Canonical,
    /// Pads `w` with trailing zeros to a multiple of `m` and maps each
    /// `m`-block through a permutation. `table[i]` is the image of the block
    /// whose base-b numeral is `i`.
    BlockPermuted { m: usize, table: Vec<Vec<u8>> },
    /// `f(0^k) = real_b(x↾2^k)` for `k >= 1`, canonical elsewhere.
    Targeted { spec: String, target: DigitStream },
}

#[derive(Debug, Clone)]
pub struct SeparatorEnumerator {
    base: Base,
    kind: EnumeratorKind,
}

/// Image of a word: either explicit digits or a prefix of the target.
enum Image {
    Digits(Vec<u8>),
    TargetPrefix(usize),
}

impl SeparatorEnumerator {
    pub fn canonical(base: Base) -> Self {
        SeparatorEnumerator {
            base,
            kind: EnumeratorKind::Canonical,
        }
    }

    pub fn block_permuted(base: Base, m: usize, pairs: &[(Vec<u8>, Vec<u8>)]) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidPermutation("block length must be at least 1".into()));
        }
        let count = block_count(base, m)?;
        let mut table: Vec<Option<Vec<u8>>> = vec![None; count];
        let mut hit = vec![false; count];
        for (from, to) in pairs {
            for w in [from, to] {
                check_word(w, base)?;
                if w.len() != m {
                    return Err(Error::InvalidPermutation(format!(
                        "block \"{}\" does not have length {m}",
                        format_word(w)
                    )));
                }
            }
            let i = block_index(from, base);
            if table[i].is_some() {
                return Err(Error::InvalidPermutation(format!("block \"{}\" is mapped twice", format_word(from))));
            }
            let j = block_index(to, base);
            if hit[j] {
                return Err(Error::InvalidPermutation(format!("block \"{}\" is hit twice", format_word(to))));
            }
            hit[j] = true;
            table[i] = Some(to.clone());
        }
        let table = table
            .into_iter()
            .enumerate()
            .map(|(i, t)| {
                t.ok_or_else(|| {
                    Error::InvalidPermutation(format!("block \"{}\" is not mapped", format_word(&block_of(i, m, base))))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SeparatorEnumerator {
            base,
            kind: EnumeratorKind::BlockPermuted { m, table },
        })
    }

    pub fn targeted(spec: &RealSpec, base: Base) -> Result<Self> {
        Ok(SeparatorEnumerator {
            base,
            kind: EnumeratorKind::Targeted {
                spec: spec.to_string(),
                target: spec.stream(base)?,
            },
        })
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn kind(&self) -> &EnumeratorKind {
        &self.kind
    }

    fn image(&self, w: &[u8]) -> Result<Image> {
        check_word(w, self.base)?;
        Ok(match &self.kind {
            EnumeratorKind::Canonical => Image::Digits(w.to_vec()),
            EnumeratorKind::BlockPermuted { m, table } => {
                let mut out = Vec::with_capacity(w.len().div_ceil(*m) * m);
                for chunk in w.chunks(*m) {
                    let mut block = chunk.to_vec();
                    block.resize(*m, 0);
                    out.extend_from_slice(&table[block_index(&block, self.base)]);
                }
                Image::Digits(out)
            }
            EnumeratorKind::Targeted { .. } => {
                if !w.is_empty() && w.iter().all(|&d| d == 0) {
                    Image::TargetPrefix(1usize.checked_shl(w.len() as u32).unwrap_or(usize::MAX))
                } else {
                    Image::Digits(w.to_vec())
                }
            }
        })
    }

    /// A digit string whose value is `f(w)`.
    pub fn eval_digits(&self, w: &[u8]) -> Result<Vec<u8>> {
        match self.image(w)? {
            Image::Digits(d) => Ok(d),
            Image::TargetPrefix(len) => {
                if len > MAX_MATERIALIZED {
                    return Err(Error::InvalidParameter(format!(
                        "image of a {}-digit word is too long to materialize",
                        w.len()
                    )));
                }
                let EnumeratorKind::Targeted { target, .. } = &self.kind else {
                    unreachable!("only targeted enumerators have target images")
                };
                target.prefix(len)
            }
        }
    }

    /// `f(w)` exactly.
    pub fn eval(&self, w: &[u8]) -> Result<BigRational> {
        Ok(real_value_unchecked(&self.eval_digits(w)?, self.base))
    }
}

impl fmt::Display for SeparatorEnumerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            EnumeratorKind::Canonical => write!(f, "canonical"),
            EnumeratorKind::BlockPermuted { m, .. } => write!(f, "blockperm(m={m})"),
            EnumeratorKind::Targeted { spec, .. } => write!(f, "targeted({spec})"),
        }
    }
}

fn block_count(base: Base, m: usize) -> Result<usize> {
    u32::try_from(m)
        .ok()
        .and_then(|m| base.size().checked_pow(m))
        .filter(|&c| c <= MAX_MATERIALIZED)
        .ok_or_else(|| Error::InvalidPermutation(format!("block length {m} is too large")))
}

fn block_index(block: &[u8], base: Base) -> usize {
    block.iter().fold(0, |acc, &d| acc * base.size() + d as usize)
}

fn block_of(mut i: usize, m: usize, base: Base) -> Vec<u8> {
    let mut block = vec![0; m];
    for slot in block.iter_mut().rev() {
        *slot = (i % base.size()) as u8;
        i /= base.size();
    }
    block
}

/// Parses `block -> block` lines; `#` starts a comment.
pub fn parse_permutation(text: &str, base: Base) -> Result<Vec<(Vec<u8>, Vec<u8>)>> {
    let mut pairs = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (from, to) = line
            .split_once("->")
            .ok_or_else(|| Error::InvalidPermutation(format!("line {}: expected \"block -> block\"", k + 1)))?;
        let word = |s: &str| {
            parse_word(s.trim(), base).map_err(|e| Error::InvalidPermutation(format!("line {}: {e}", k + 1)))
        };
        pairs.push((word(from)?, word(to)?));
    }
    Ok(pairs)
}

/// Builds an enumerator from `canonical`, `blockperm:M:PERMFILE` or
/// `targeted:SPEC`.
pub fn make_enumerator(spec: &str, base: Base) -> Result<SeparatorEnumerator> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    match kind {
        "canonical" if rest.is_empty() => Ok(SeparatorEnumerator::canonical(base)),
        "blockperm" => {
            let (m, path) = rest
                .split_once(':')
                .ok_or_else(|| Error::InvalidParameter("expected blockperm:M:PERMFILE".into()))?;
            let m: usize = m
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("block length \"{m}\" is not a number")))?;
            let path = PathBuf::from(path);
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let pairs = parse_permutation(&text, base).map_err(|e| with_path(e, &path))?;
            SeparatorEnumerator::block_permuted(base, m, &pairs).map_err(|e| with_path(e, &path))
        }
        "targeted" => SeparatorEnumerator::targeted(&rest.parse()?, base),
        _ => Err(Error::InvalidParameter(format!(
            "unknown enumerator \"{spec}\" (expected canonical, blockperm:M:PERMFILE or targeted:SPEC)"
        ))),
    }
}

fn with_path(e: Error, path: &Path) -> Error {
    match e {
        Error::InvalidPermutation(msg) => Error::InvalidPermutation(format!("{}: {msg}", path.display())),
        other => other,
    }
}

/// Limits for [`ktf_delta`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KtfCaps {
    /// Longest input tried; by default about `2^20` inputs' worth, i.e. 20
    /// symbols in base 2.
    pub input: Option<usize>,
    /// Configurations are merged by `(state, output)` while the output is
    /// shorter than this.
    pub dedup_below: usize,
    /// Largest breadth-first level expanded.
    pub max_frontier: usize,
    pub lookahead: usize,
}

impl Default for KtfCaps {
    fn default() -> Self {
        KtfCaps {
            input: None,
            dedup_below: 64,
            max_frontier: 1 << 22,
            lookahead: DEFAULT_LOOKAHEAD,
        }
    }
}

impl KtfCaps {
    pub fn with_input(input: usize) -> Self {
        KtfCaps {
            input: Some(input),
            ..KtfCaps::default()
        }
    }

    pub fn input_for(&self, base: Base) -> usize {
        self.input.unwrap_or_else(|| default_input_len(base))
    }
}

/// Largest `L` with `b^L <= 2^20`.
pub fn default_input_len(base: Base) -> usize {
    let mut len = 0;
    let mut count = 1usize;
    while count * base.size() <= 1 << 20 {
        count *= base.size();
        len += 1;
    }
    len
}

struct Membership<'a> {
    f: &'a SeparatorEnumerator,
    iv: Interval,
    target: Option<Expansion>,
}

impl<'a> Membership<'a> {
    fn new(f: &'a SeparatorEnumerator, x: &DigitStream, delta: &Delta, lookahead: usize) -> Result<Self> {
        let target = match &f.kind {
            EnumeratorKind::Targeted { target, .. } => Some(Expansion::new(target.clone(), lookahead)),
            _ => None,
        };
        Ok(Membership {
            f,
            iv: Interval::new(x, delta, lookahead)?,
            target,
        })
    }

    /// `|f(w) - x| < δ`, reading a target image only as far as needed.
    fn test(&mut self, w: &[u8]) -> Result<bool> {
        match self.f.image(w)? {
            Image::Digits(d) => self.iv.contains(&d),
            Image::TargetPrefix(len) => {
                let target = self.target.as_mut().expect("targeted enumerator");
                self.iv.contains_with(len, |k| target.digit(k))
            }
        }
    }
}

/// `K^{T,f}_δ(x)`: the shortest input whose output `w` has `|f(w) - x| < δ`.
///
/// No pruning is sound for an arbitrary `f`, so inputs are enumerated
/// breadth-first, merging configurations with the same state and output.
/// `Unreachable` means every configuration was merged away, so no longer
/// input can produce a new output.
pub fn ktf_delta(t: &Fst, f: &SeparatorEnumerator, x: &DigitStream, delta: &Delta, caps: KtfCaps) -> Result<CostResult> {
    for found in [f.base(), x.base()] {
        if found != t.base() {
            return Err(Error::BaseMismatch {
                expected: t.base().get(),
                found: found.get(),
            });
        }
    }
    let cap_input = caps.input_for(t.base());
    let mut member = Membership::new(f, x, delta, caps.lookahead)?;
    if member.test(&[])? {
        return Ok(CostResult::found(Vec::new(), Vec::new()));
    }
    let mut seen: HashSet<(usize, Vec<u8>)> = HashSet::new();
    seen.insert((t.start(), Vec::new()));
    let mut trail = Trail::default();
    let mut frontier = vec![(Trail::ROOT, t.start(), Vec::new())];

    for _depth in 1..=cap_input {
        let mut next = Vec::new();
        for (id, state, w) in &frontier {
            for a in 0..t.base().get() {
                let mut out = w.clone();
                out.extend_from_slice(t.output(*state, a));
                let to = t.next_state(*state, a);
                if out.len() < caps.dedup_below && !seen.insert((to, out.clone())) {
                    continue;
                }
                let child = trail.push(*id, a);
                if member.test(&out)? {
                    return Ok(CostResult::found(trail.input(child), out));
                }
                next.push((child, to, out));
            }
        }
        if next.is_empty() {
            return Ok(CostResult::unreachable());
        }
        if next.len() > caps.max_frontier {
            return Ok(CostResult::cap_exceeded());
        }
        frontier = next;
    }
    Ok(CostResult::cap_exceeded())
}

/// Exhaustive check of every input up to `max_len` with exact values of
/// `f(w)`; needs a point with an exact value.
pub fn ktf_oracle(t: &Fst, f: &SeparatorEnumerator, x: &BigRational, delta: &BigRational, max_len: usize) -> Result<CostResult> {
    let mut output = Vec::new();
    let hit = enumerate_inputs(t.base(), max_len, |pi| {
        output = t.run(pi)?;
        let d = f.eval(&output)? - x;
        Ok(if d < BigRational::from_integer(0.into()) { -d } else { d } < *delta)
    })?;
    Ok(match hit {
        Some(pi) => CostResult::found(pi, output),
        None => CostResult::cap_exceeded(),
    })
}

/// `K^{T,f}_{b^-n}(x)` for each `n` in `ns`.
pub fn ktf_series(t: &Fst, f: &SeparatorEnumerator, x: &DigitStream, ns: impl IntoIterator<Item = usize>, caps: KtfCaps) -> Result<Vec<(usize, CostResult)>> {
    ns.into_iter()
        .map(|n| Ok((n, ktf_delta(t, f, x, &Delta::InversePower(n as u32), caps)?)))
        .collect()
}

/// Enumerator-relative dimension estimate of a point, or of a finite set
/// with `min_T max_x` ordering.
pub fn dimf_estimate(
    family: &[NamedFst],
    f: &SeparatorEnumerator,
    xs: &[DigitStream],
    n_max: usize,
    window_frac: &BigRational,
    caps: KtfCaps,
) -> Result<EstimateReport> {
    if xs.is_empty() {
        return Err(Error::InvalidParameter("point set is empty".into()));
    }
    let window = Window::tail(n_max, window_frac)?;
    for x in xs {
        check_family(family, x.base())?;
    }
    check_family(family, f.base())?;
    let per = family
        .iter()
        .map(|t| {
            let points = xs
                .iter()
                .map(|x| Ok(proxy_of(&t.id, &ktf_series(&t.fst, f, x, window.range(), caps)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(if let [single] = points.as_slice() {
                single.clone()
            } else {
                TransducerEstimate {
                    id: t.id.clone(),
                    proxy: points
                        .iter()
                        .map(|p| p.proxy.clone())
                        .collect::<Option<Vec<_>>>()
                        .and_then(|v| v.into_iter().max()),
                    best_n: None,
                    flagged_rows: points.iter().map(|p| p.flagged_rows).sum(),
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let what = if xs.len() == 1 { "enumerator point" } else { "enumerator set" };
    min_report(per, window, what)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimension::{default_window_frac, dim_point_estimate};
    use crate::fst::make_identity;
    use crate::precision::{kdelta, Caps, PrecisionQuery};

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    fn w(s: &str) -> Vec<u8> {
        parse_word(s, Base::BINARY).unwrap()
    }

    fn point(p: i64, q: i64) -> DigitStream {
        DigitStream::from_rational(rat(p, q), Base::BINARY).unwrap()
    }

    fn swap() -> SeparatorEnumerator {
        SeparatorEnumerator::block_permuted(Base::BINARY, 1, &[(w("0"), w("1")), (w("1"), w("0"))]).unwrap()
    }

    fn third() -> SeparatorEnumerator {
        SeparatorEnumerator::targeted(&RealSpec::rational(1, 3).unwrap(), Base::BINARY).unwrap()
    }

    fn log2_ceil(n: usize) -> usize {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }

    #[test]
    fn default_input_lengths() {
        assert_eq!(default_input_len(Base::BINARY), 20);
        assert_eq!(default_input_len(Base::new(4).unwrap()), 10);
        assert_eq!(default_input_len(Base::new(10).unwrap()), 6);
    }

    #[test]
    fn eval_examples() {
        assert_eq!(swap().eval(&w("01")).unwrap(), rat(1, 2));
        assert_eq!(third().eval(&w("000")).unwrap(), rat(85, 256));
        assert_eq!(third().eval(&w("0")).unwrap(), rat(1, 4));
        assert_eq!(third().eval(&w("010")).unwrap(), rat(1, 4));
        assert_eq!(third().eval(&[]).unwrap(), rat(0, 1));
        assert_eq!(SeparatorEnumerator::canonical(Base::BINARY).eval(&w("011")).unwrap(), rat(3, 8));
    }

    #[test]
    fn block_padding() {
        // 00->11, 11->00, others fixed: "1" pads to "10"
        let f = SeparatorEnumerator::block_permuted(
            Base::BINARY,
            2,
            &[(w("00"), w("11")), (w("01"), w("01")), (w("10"), w("10")), (w("11"), w("00"))],
        )
        .unwrap();
        assert_eq!(f.eval_digits(&w("1")).unwrap(), w("10"));
        assert_eq!(f.eval_digits(&w("001")).unwrap(), w("1110"));
    }

    #[test]
    fn rejects_non_permutations() {
        let bad = |pairs: &[(&str, &str)]| {
            let pairs: Vec<_> = pairs.iter().map(|(a, b)| (w(a), w(b))).collect();
            SeparatorEnumerator::block_permuted(Base::BINARY, 1, &pairs).unwrap_err()
        };
        assert!(matches!(bad(&[("0", "1")]), Error::InvalidPermutation(_)));
        assert!(matches!(bad(&[("0", "1"), ("1", "1")]), Error::InvalidPermutation(_)));
        assert!(matches!(bad(&[("0", "1"), ("0", "0")]), Error::InvalidPermutation(_)));
        assert!(matches!(bad(&[("0", "11"), ("1", "0")]), Error::InvalidPermutation(_)));
    }

    #[test]
    fn permutation_file_format() {
        let pairs = parse_permutation("# swap\n0 -> 1\n\n1 -> 0  # back\n", Base::BINARY).unwrap();
        assert_eq!(pairs, vec![(w("0"), w("1")), (w("1"), w("0"))]);
        assert!(parse_permutation("0 1\n", Base::BINARY).is_err());
        assert!(parse_permutation("0 -> 2\n", Base::BINARY).is_err());
    }

    #[test]
    fn targeted_cost_example() {
        let id = make_identity(Base::BINARY);
        let r = ktf_delta(&id, &third(), &point(1, 3), &Delta::InversePower(6), KtfCaps::default()).unwrap();
        assert_eq!(r.cost(), Some(3));
        assert_eq!(r.witness_input, w("000"));
        let oracle = ktf_oracle(&id, &third(), &rat(1, 3), &rat(1, 64), 8).unwrap();
        assert_eq!(oracle, r);
    }

    #[test]
    fn swap_cost_example() {
        let id = make_identity(Base::BINARY);
        let r = ktf_delta(&id, &swap(), &point(1, 2), &Delta::InversePower(2), KtfCaps::default()).unwrap();
        assert_eq!(r.cost(), Some(1));
        assert_eq!(r.witness_input, w("0"));
    }

    #[test]
    fn canonical_matches_kdelta() {
        let id = make_identity(Base::BINARY);
        let f = SeparatorEnumerator::canonical(Base::BINARY);
        for (p, q) in [(0, 1), (1, 3), (1, 2), (5, 7)] {
            for n in 1..=10u32 {
                let a = ktf_delta(&id, &f, &point(p, q), &Delta::InversePower(n), KtfCaps::default()).unwrap();
                let b = kdelta(&id, &PrecisionQuery::new(point(p, q), Delta::InversePower(n))).unwrap();
                assert_eq!(a, b, "x={p}/{q} n={n}");
            }
        }
    }

    #[test]
    fn identity_permutation_is_canonical() {
        let pairs: Vec<_> = (0..8).map(|i| (block_of(i, 3, Base::BINARY), block_of(i, 3, Base::BINARY))).collect();
        let f = SeparatorEnumerator::block_permuted(Base::BINARY, 3, &pairs).unwrap();
        let c = SeparatorEnumerator::canonical(Base::BINARY);
        enumerate_inputs(Base::BINARY, 8, |v| {
            assert_eq!(f.eval(v)?, c.eval(v)?);
            Ok(false)
        })
        .unwrap();
    }

    #[test]
    fn targeted_collapse() {
        let id = make_identity(Base::BINARY);
        for n in 1..=60usize {
            let r = ktf_delta(&id, &third(), &point(1, 3), &Delta::InversePower(n as u32), KtfCaps::default()).unwrap();
            let cost = r.cost().expect("found");
            assert!(cost <= log2_ceil(n + 1) + 1, "n={n} cost={cost}");
        }
        let fam = vec![NamedFst::new("id", id)];
        let dimf = dimf_estimate(&fam, &third(), &[point(1, 3)], 60, &default_window_frac(), KtfCaps::default()).unwrap();
        assert!(dimf.estimate <= rat(15, 100));
        let plain = dim_point_estimate(&fam, &point(1, 3), 60, &default_window_frac(), Caps::default()).unwrap();
        assert!(plain.estimate >= rat(9, 10));
    }

    #[test]
    fn canonical_dimf_matches_point_estimate() {
        let fam = vec![NamedFst::new("id", make_identity(Base::BINARY))];
        let f = SeparatorEnumerator::canonical(Base::BINARY);
        let a = dimf_estimate(&fam, &f, &[point(1, 3)], 12, &default_window_frac(), KtfCaps::default()).unwrap();
        let b = dim_point_estimate(&fam, &point(1, 3), 12, &default_window_frac(), Caps::default()).unwrap();
        assert_eq!(a.estimate, b.estimate);
        assert_eq!(a.per_transducer, b.per_transducer);
    }

    #[test]
    fn make_enumerator_kinds() {
        assert!(matches!(make_enumerator("canonical", Base::BINARY).unwrap().kind(), EnumeratorKind::Canonical));
        let f = make_enumerator("targeted:rat:1/3", Base::BINARY).unwrap();
        assert_eq!(f.eval(&w("00")).unwrap(), rat(5, 16));
        let dir = std::env::temp_dir().join(format!("sep-perm-{}", std::process::id()));
        std::fs::write(&dir, "0 -> 1\n1 -> 0\n").unwrap();
        let f = make_enumerator(&format!("blockperm:1:{}", dir.display()), Base::BINARY).unwrap();
        assert_eq!(f.eval(&w("01")).unwrap(), rat(1, 2));
        std::fs::remove_file(&dir).unwrap();
        assert!(matches!(make_enumerator("blockperm:1:/nonexistent/p", Base::BINARY), Err(Error::Io { .. })));
        assert!(make_enumerator("weird", Base::BINARY).is_err());
    }
}
