//! Complete deterministic finite-state transducers over a digit alphabet.
//!
//! A machine reads one digit per step and emits a (possibly empty) digit
//! string per step. There are no final states: every input has an output,
//! `T(π) = ν(q0, π)` with `ν(q, λ) = λ` and `ν(q, wa) = ν(q, w) ν(δ(q, w), a)`.

mod families;
mod format;

pub use families::{
    build_block_huffman, make_block_huffman, make_identity, make_lead_in_decoder, make_periodic_decoder, BlockHuffman,
};
pub use format::{format, parse};

use crate::digits::{check_word, Base};
use crate::error::{Error, Result};

/// A machine with a stable identifier, e.g. its file stem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedFst {
    pub id: String,
    pub fst: Fst,
}

impl NamedFst {
    pub fn new(id: impl Into<String>, fst: Fst) -> Self {
        NamedFst { id: id.into(), fst }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fst {
    base: Base,
    start: usize,
    /// Indexed by `q * b + a`.
    next: Vec<usize>,
    out: Vec<Vec<u8>>,
}

impl Fst {
    /// Builds a machine from a total step function.
    pub fn from_fn<F>(base: Base, states: usize, start: usize, mut step: F) -> Result<Self>
    where
        F: FnMut(usize, u8) -> (usize, Vec<u8>),
    {
        let mut next = Vec::with_capacity(states * base.size());
        let mut out = Vec::with_capacity(states * base.size());
        for q in 0..states {
            for a in 0..base.get() {
                let (to, w) = step(q, a);
                next.push(to);
                out.push(w);
            }
        }
        Self::from_tables(base, start, next, out)
    }

    /// Builds a machine from flat tables indexed by `q * b + a`.
    pub fn from_tables(base: Base, start: usize, next: Vec<usize>, out: Vec<Vec<u8>>) -> Result<Self> {
        let b = base.size();
        if next.is_empty() || !next.len().is_multiple_of(b) || out.len() != next.len() {
            return Err(Error::InvalidParameter(format!(
                "transition tables must have states*{b} entries (got {} and {})",
                next.len(),
                out.len()
            )));
        }
        let states = next.len() / b;
        if start >= states {
            return Err(Error::StateOutOfRange {
                line: 0,
                state: start,
                states,
            });
        }
        if let Some(&bad) = next.iter().find(|&&q| q >= states) {
            return Err(Error::StateOutOfRange {
                line: 0,
                state: bad,
                states,
            });
        }
        for w in &out {
            check_word(w, base)?;
        }
        Ok(Fst { base, start, next, out })
    }

    #[inline]
    pub fn base(&self) -> Base {
        self.base
    }

    #[inline]
    pub fn state_count(&self) -> usize {
        self.next.len() / self.base.size()
    }

    #[inline]
    pub fn start(&self) -> usize {
        self.start
    }

    #[inline]
    pub fn next_state(&self, q: usize, a: u8) -> usize {
        self.next[q * self.base.size() + a as usize]
    }

    #[inline]
    pub fn output(&self, q: usize, a: u8) -> &[u8] {
        &self.out[q * self.base.size() + a as usize]
    }

    /// Longest single-step output.
    pub fn max_burst(&self) -> usize {
        self.out.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `T(π)`.
    pub fn run(&self, pi: &[u8]) -> Result<Vec<u8>> {
        self.run_from(self.start, pi).map(|(w, _)| w)
    }

    /// Output of `pi` started in state `q`, together with the state reached.
    pub fn run_from(&self, q: usize, pi: &[u8]) -> Result<(Vec<u8>, usize)> {
        check_word(pi, self.base)?;
        let mut state = q;
        let mut w = Vec::new();
        for &a in pi {
            w.extend_from_slice(self.output(state, a));
            state = self.next_state(state, a);
        }
        Ok((w, state))
    }

    /// The machine `T'` with `T'(π) = comp(T(π))`: same states and
    /// transitions, every output digit complemented.
    pub fn complement_lift(&self) -> Fst {
        let top = self.base.max_digit();
        Fst {
            base: self.base,
            start: self.start,
            next: self.next.clone(),
            out: self
                .out
                .iter()
                .map(|w| w.iter().map(|&d| top - d).collect())
                .collect(),
        }
    }
}
