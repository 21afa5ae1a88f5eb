//! `K^T(w)`: the length of the shortest input on which `T` prints exactly `w`.

use std::fmt;

use crate::digits::{check_word, format_word, Base};
use crate::error::Result;
use crate::fst::Fst;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status {
    Found,
    /// The search space was exhausted: no input of any length works.
    Unreachable,
    /// The search was truncated by a cap before an answer was established.
    CapExceeded,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Found => "found",
            Status::Unreachable => "unreachable",
            Status::CapExceeded => "cap_exceeded",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Answer of a shortest-input search. When `Found`,
/// `run(t, witness_input) = witness_output` and `cost = |witness_input|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostResult {
    pub status: Status,
    pub cost: usize,
    pub witness_input: Vec<u8>,
    pub witness_output: Vec<u8>,
}

impl CostResult {
    pub fn found(witness_input: Vec<u8>, witness_output: Vec<u8>) -> Self {
        CostResult {
            status: Status::Found,
            cost: witness_input.len(),
            witness_input,
            witness_output,
        }
    }

    pub fn unreachable() -> Self {
        Self::empty(Status::Unreachable)
    }

    pub fn cap_exceeded() -> Self {
        Self::empty(Status::CapExceeded)
    }

    fn empty(status: Status) -> Self {
        CostResult {
            status,
            cost: 0,
            witness_input: Vec::new(),
            witness_output: Vec::new(),
        }
    }

    pub fn is_found(&self) -> bool {
        self.status == Status::Found
    }

    /// The cost, when found.
    pub fn cost(&self) -> Option<usize> {
        self.is_found().then_some(self.cost)
    }

    /// `status,cost,witness` with empty fields when not found.
    pub fn to_csv(&self) -> String {
        match self.status {
            Status::Found => format!("{},{},{}", self.status, self.cost, format_word(&self.witness_input)),
            s => format!("{s},,"),
        }
    }
}

/// Parent-pointer arena for reconstructing witnesses of breadth-first searches.
#[derive(Default)]
pub(crate) struct Trail {
    steps: Vec<(u32, u8)>,
}

impl Trail {
    pub(crate) const ROOT: u32 = u32::MAX;

    pub(crate) fn push(&mut self, parent: u32, symbol: u8) -> u32 {
        self.steps.push((parent, symbol));
        (self.steps.len() - 1) as u32
    }

    pub(crate) fn input(&self, mut id: u32) -> Vec<u8> {
        let mut out = Vec::new();
        while id != Self::ROOT {
            let (parent, symbol) = self.steps[id as usize];
            out.push(symbol);
            id = parent;
        }
        out.reverse();
        out
    }
}

/// Breadth-first search over configurations `(state, matched prefix length)`.
///
/// An edge reads one symbol `a` from state `q` and is legal when `ν(q, a)`
/// matches `w` at the current position. Configurations are visited once, so
/// the search ends after at most `|Q|·(|w|+1)` configurations. Among
/// witnesses of minimal length the lexicographically smallest is returned.
pub fn kt(t: &Fst, w: &[u8], cap: usize) -> Result<CostResult> {
    check_word(w, t.base())?;
    if w.is_empty() {
        return Ok(CostResult::found(Vec::new(), Vec::new()));
    }
    let n = w.len();
    let width = n + 1;
    let mut seen = vec![false; t.state_count() * width];
    seen[t.start() * width] = true;
    let mut trail = Trail::default();
    let mut frontier = vec![(Trail::ROOT, t.start(), 0usize)];

    for _depth in 1..=cap {
        let mut next = Vec::new();
        for &(id, q, i) in &frontier {
            for a in 0..t.base().get() {
                let out = t.output(q, a);
                let j = i + out.len();
                if j > n || &w[i..j] != out {
                    continue;
                }
                let to = t.next_state(q, a);
                let key = to * width + j;
                if seen[key] {
                    continue;
                }
                seen[key] = true;
                let child = trail.push(id, a);
                if j == n {
                    return Ok(CostResult::found(trail.input(child), w.to_vec()));
                }
                next.push((child, to, j));
            }
        }
        if next.is_empty() {
            return Ok(CostResult::unreachable());
        }
        frontier = next;
    }
    Ok(CostResult::cap_exceeded())
}

/// Calls `visit` on every input of length `0..=max_len` in length-then-lex
/// order until it returns `true`; returns the accepted input.
pub(crate) fn enumerate_inputs(base: Base, max_len: usize, mut visit: impl FnMut(&[u8]) -> Result<bool>) -> Result<Option<Vec<u8>>> {
    let top = base.max_digit();
    for len in 0..=max_len {
        let mut pi = vec![0u8; len];
        loop {
            if visit(&pi)? {
                return Ok(Some(pi));
            }
            // odometer increment; wraps to all zeros when done
            let Some(pos) = pi.iter().rposition(|&d| d < top) else {
                break;
            };
            pi[pos] += 1;
            pi[pos + 1..].iter_mut().for_each(|d| *d = 0);
        }
    }
    Ok(None)
}

/// Visits every word of length at most `max_len` in length-then-lex order.
pub fn enumerate_all(base: Base, max_len: usize, mut visit: impl FnMut(&[u8])) {
    enumerate_inputs(base, max_len, |w| {
        visit(w);
        Ok(false)
    })
    .expect("the visitor cannot fail");
}

/// Exhaustive check of every input up to `max_len`. Never reports
/// `Unreachable`: enumeration cannot rule out longer inputs.
pub fn kt_oracle(t: &Fst, w: &[u8], max_len: usize) -> Result<CostResult> {
    check_word(w, t.base())?;
    let hit = enumerate_inputs(t.base(), max_len, |pi| Ok(t.run(pi)? == w))?;
    Ok(match hit {
        Some(pi) => CostResult::found(pi, w.to_vec()),
        None => CostResult::cap_exceeded(),
    })
}

/// All inputs up to a length with their outputs, in length-then-lex order.
/// Lets many oracle queries against one machine share a single enumeration.
pub struct InputTable {
    base: Base,
    entries: Vec<(Vec<u8>, Vec<u8>)>,
}

impl InputTable {
    pub fn new(t: &Fst, max_len: usize) -> Result<Self> {
        let mut entries = Vec::new();
        enumerate_inputs(t.base(), max_len, |pi| {
            entries.push((pi.to_vec(), t.run(pi)?));
            Ok(false)
        })?;
        Ok(InputTable { base: t.base(), entries })
    }

    pub fn entries(&self) -> &[(Vec<u8>, Vec<u8>)] {
        &self.entries
    }

    pub fn kt(&self, w: &[u8]) -> Result<CostResult> {
        check_word(w, self.base)?;
        Ok(self
            .entries
            .iter()
            .find(|(_, out)| out == w)
            .map_or_else(CostResult::cap_exceeded, |(pi, out)| CostResult::found(pi.clone(), out.clone())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digits::{comp, parse_word};
    use crate::error::Error;
    use crate::fst::{make_identity, make_periodic_decoder};
    use proptest::prelude::*;

    fn w(s: &str) -> Vec<u8> {
        parse_word(s, Base::BINARY).unwrap()
    }

    fn doubling() -> Fst {
        Fst::from_fn(Base::BINARY, 1, 0, |_, a| (0, vec![a, a])).unwrap()
    }

    #[test]
    fn kt_examples() {
        let r = kt(&make_identity(Base::BINARY), &w("0110"), 20).unwrap();
        assert_eq!((r.status, r.cost), (Status::Found, 4));

        let r = kt(&doubling(), &w("0011"), 20).unwrap();
        assert_eq!((r.status, r.cost, r.witness_input.clone()), (Status::Found, 2, w("01")));

        assert_eq!(kt(&doubling(), &w("0"), 20).unwrap().status, Status::Unreachable);
        assert!(matches!(kt(&doubling(), &[2], 20), Err(Error::InvalidDigit { .. })));
    }

    #[test]
    fn oracle_examples() {
        let r = kt_oracle(&make_identity(Base::BINARY), &w("01"), 4).unwrap();
        assert_eq!((r.status, r.cost), (Status::Found, 2));
        let r = kt_oracle(&doubling(), &w("0011"), 4).unwrap();
        assert_eq!((r.status, r.cost, r.witness_input.clone()), (Status::Found, 2, w("01")));
        assert_eq!(kt_oracle(&doubling(), &w("000"), 6).unwrap().status, Status::CapExceeded);
    }

    #[test]
    fn empty_word_costs_nothing() {
        for t in [make_identity(Base::BINARY), doubling()] {
            assert_eq!(kt(&t, &[], 0).unwrap(), CostResult::found(vec![], vec![]));
        }
    }

    #[test]
    fn silent_cycles_terminate() {
        // state 0 --0/λ--> 1 --0/λ--> 0; symbol 1 prints "1"
        let t = Fst::from_fn(Base::BINARY, 2, 0, |q, a| if a == 0 { (1 - q, vec![]) } else { (q, vec![1]) }).unwrap();
        assert_eq!(kt(&t, &w("0"), 1000).unwrap().status, Status::Unreachable);
        assert_eq!(kt(&t, &w("11"), 1000).unwrap().cost, 2);
    }

    #[test]
    fn cap_is_reported() {
        let r = kt(&make_identity(Base::BINARY), &w("010"), 2).unwrap();
        assert_eq!(r.status, Status::CapExceeded);
        assert_eq!(kt(&make_identity(Base::BINARY), &w("010"), 3).unwrap().cost, 3);
    }

    #[test]
    fn lexicographically_smallest_witness() {
        // Both symbols print "0" from state 0; the witness must use 0.
        let t = Fst::from_fn(Base::BINARY, 1, 0, |_, _| (0, vec![0])).unwrap();
        assert_eq!(kt(&t, &w("000"), 10).unwrap().witness_input, w("000"));
    }

    #[test]
    fn csv_rendering() {
        assert_eq!(kt(&make_identity(Base::BINARY), &w("0110"), 9).unwrap().to_csv(), "found,4,0110");
        assert_eq!(kt(&doubling(), &w("0"), 9).unwrap().to_csv(), "unreachable,,");
    }

    fn arb_fst() -> impl Strategy<Value = Fst> {
        (1usize..4).prop_flat_map(|states| {
            let cells = states * 2;
            (
                0..states,
                prop::collection::vec(0..states, cells),
                prop::collection::vec(prop::collection::vec(0u8..2, 0..3), cells),
            )
                .prop_map(|(start, next, out)| Fst::from_tables(Base::BINARY, start, next, out).unwrap())
        })
    }

    proptest! {
        #[test]
        fn agrees_with_oracle(t in arb_fst(), target in prop::collection::vec(0u8..2, 0..6)) {
            let fast = kt(&t, &target, 10).unwrap();
            let slow = kt_oracle(&t, &target, 10).unwrap();
            if slow.is_found() {
                prop_assert_eq!(&fast, &slow);
            } else {
                prop_assert!(!fast.is_found());
            }
            if fast.is_found() {
                prop_assert_eq!(t.run(&fast.witness_input).unwrap(), target.clone());
                let burst = t.max_burst().max(1);
                prop_assert!(fast.cost >= target.len().div_ceil(burst));
            }
        }

        #[test]
        fn complement_lift_preserves_cost(t in arb_fst(), target in prop::collection::vec(0u8..2, 0..7)) {
            let lifted = t.complement_lift();
            let a = kt(&t, &target, 14).unwrap();
            let b = kt(&lifted, &comp(&target, Base::BINARY).unwrap(), 14).unwrap();
            prop_assert_eq!(a.status, b.status);
            prop_assert_eq!(a.cost(), b.cost());
        }

        #[test]
        fn concatenation_is_subadditive(t in arb_fst(), u in prop::collection::vec(0u8..2, 0..5), v_in in prop::collection::vec(0u8..2, 0..4)) {
            let first = kt(&t, &u, 12).unwrap();
            prop_assume!(first.is_found());
            let (_, q) = t.run_from(t.start(), &first.witness_input).unwrap();
            let (v, _) = t.run_from(q, &v_in).unwrap();
            let uv: Vec<u8> = u.iter().chain(&v).copied().collect();
            let joined = kt(&t, &uv, 24).unwrap();
            prop_assert!(joined.is_found());
            prop_assert!(joined.cost <= first.cost + v_in.len());
        }
    }

    #[test]
    fn table_matches_single_queries() {
        let t = make_periodic_decoder(&[0, 1], 1, Base::BINARY).unwrap();
        let table = InputTable::new(&t, 6).unwrap();
        assert_eq!(table.entries().len(), 127);
        for target in ["", "01", "0101", "010", "1"] {
            assert_eq!(table.kt(&w(target)).unwrap(), kt_oracle(&t, &w(target), 6).unwrap());
        }
    }
}
