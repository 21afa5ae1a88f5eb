//! Generated transducer families used as dimension witnesses.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use super::Fst;
use crate::digits::{check_word, Base, DigitStream};
use crate::error::{Error, Result};

/// One state, `ν(q, a) = a`.
pub fn make_identity(base: Base) -> Fst {
    Fst::from_fn(base, 1, 0, |_, a| (0, vec![a])).expect("identity is well formed")
}

/// One state; every symbol emits `pattern` repeated `copies` times.
pub fn make_periodic_decoder(pattern: &[u8], copies: usize, base: Base) -> Result<Fst> {
    if pattern.is_empty() {
        return Err(Error::EmptyPattern);
    }
    if copies == 0 {
        return Err(Error::InvalidParameter("copies must be at least 1".into()));
    }
    check_word(pattern, base)?;
    let burst = pattern.repeat(copies);
    Fst::from_fn(base, 1, 0, |_, _| (0, burst.clone()))
}

/// Two states: the first symbol emits `lead · pattern^copies`, every later
/// symbol emits `pattern^copies`. Witnesses eventually periodic expansions.
pub fn make_lead_in_decoder(lead: &[u8], pattern: &[u8], copies: usize, base: Base) -> Result<Fst> {
    if lead.is_empty() {
        return make_periodic_decoder(pattern, copies, base);
    }
    check_word(lead, base)?;
    let body = make_periodic_decoder(pattern, copies, base)?.output(0, 0).to_vec();
    let mut first = lead.to_vec();
    first.extend_from_slice(&body);
    Fst::from_fn(base, 2, 0, |q, _| (1, if q == 0 { first.clone() } else { body.clone() }))
}

/// A block code and the decoder machine that inverts it.
#[derive(Debug, Clone)]
pub struct BlockHuffman {
    /// `(block, codeword)` pairs, ordered by block.
    pub code: Vec<(Vec<u8>, Vec<u8>)>,
    pub fst: Fst,
}

pub fn make_block_huffman(train: &DigitStream, prefix_len: usize, block_len: usize, base: Base) -> Result<Fst> {
    build_block_huffman(train, prefix_len, block_len, base).map(|h| h.fst)
}

enum Node {
    Leaf(Vec<u8>),
    Dummy,
    Internal(Vec<usize>),
}

/// Counts the non-overlapping `block_len`-blocks of the first `prefix_len`
/// training digits, builds a b-ary Huffman code over the observed blocks and
/// returns its decoder.
///
/// Decoder states are the internal nodes of the code tree (root = 0). A
/// digit leading to an internal node moves there silently; one completing a
/// codeword emits its block and returns to the root; one leading to a
/// padding leaf self-loops with empty output.
pub fn build_block_huffman(train: &DigitStream, prefix_len: usize, block_len: usize, base: Base) -> Result<BlockHuffman> {
    if train.base() != base {
        return Err(Error::BaseMismatch {
            expected: base.get(),
            found: train.base().get(),
        });
    }
    if block_len == 0 {
        return Err(Error::InvalidParameter("block length must be at least 1".into()));
    }
    if prefix_len < block_len {
        return Err(Error::InsufficientTraining {
            needed: block_len,
            available: prefix_len,
        });
    }
    if !prefix_len.is_multiple_of(block_len) {
        return Err(Error::InvalidParameter(format!(
            "training prefix {prefix_len} is not a multiple of block length {block_len}"
        )));
    }
    let digits = train.prefix(prefix_len).map_err(|_| Error::InsufficientTraining {
        needed: prefix_len,
        available: train.available().unwrap_or(0),
    })?;

    let mut counts: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
    for block in digits.chunks_exact(block_len) {
        *counts.entry(block.to_vec()).or_default() += 1;
    }

    let b = base.size();
    let mut nodes: Vec<Node> = Vec::new();
    // (weight, tiebreak) min-heap; tiebreak follows creation order
    let mut heap = BinaryHeap::new();
    let leaves = counts.len();
    let padding = if leaves == 1 {
        b - 1
    } else {
        (b - 1 - (leaves - 1) % (b - 1)) % (b - 1)
    };
    for _ in 0..padding {
        heap.push(Reverse((0u64, nodes.len())));
        nodes.push(Node::Dummy);
    }
    for (block, count) in counts {
        heap.push(Reverse((count, nodes.len())));
        nodes.push(Node::Leaf(block));
    }
    while heap.len() > 1 {
        let mut children = Vec::with_capacity(b);
        let mut weight = 0;
        for _ in 0..b {
            let Reverse((w, id)) = heap.pop().expect("full tree has b-1 | n-1");
            weight += w;
            children.push(id);
        }
        // padding leaves take the highest digits
        children.sort_by_key(|&c| matches!(nodes[c], Node::Dummy));
        heap.push(Reverse((weight, nodes.len())));
        nodes.push(Node::Internal(children));
    }
    let root = heap.pop().expect("nonempty").0 .1;

    // Number internal nodes breadth-first from the root.
    let mut state_of = vec![usize::MAX; nodes.len()];
    let mut order = vec![root];
    state_of[root] = 0;
    let mut i = 0;
    while i < order.len() {
        if let Node::Internal(children) = &nodes[order[i]] {
            for &c in children {
                if matches!(nodes[c], Node::Internal(_)) {
                    state_of[c] = order.len();
                    order.push(c);
                }
            }
        }
        i += 1;
    }

    let mut code = Vec::new();
    collect_codewords(&nodes, root, &mut Vec::new(), &mut code);
    code.sort();

    let fst = Fst::from_fn(base, order.len(), 0, |q, a| {
        let Node::Internal(children) = &nodes[order[q]] else {
            unreachable!("states are internal nodes")
        };
        match &nodes[children[a as usize]] {
            Node::Internal(_) => (state_of[children[a as usize]], Vec::new()),
            Node::Leaf(block) => (0, block.clone()),
            Node::Dummy => (q, Vec::new()),
        }
    })?;
    Ok(BlockHuffman { code, fst })
}

fn collect_codewords(nodes: &[Node], at: usize, path: &mut Vec<u8>, out: &mut Vec<(Vec<u8>, Vec<u8>)>) {
    match &nodes[at] {
        Node::Leaf(block) => out.push((block.clone(), path.clone())),
        Node::Dummy => {}
        Node::Internal(children) => {
            for (digit, &c) in children.iter().enumerate() {
                path.push(digit as u8);
                collect_codewords(nodes, c, path, out);
                path.pop();
            }
        }
    }
}
