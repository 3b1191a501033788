//! The prefix code used to number constructors by flag bits.

/// The `n` codewords, sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixCode {
    pub words: Vec<Vec<bool>>,
}

impl PrefixCode {
    pub fn new(n: usize) -> Option<PrefixCode> {
        (n > 0).then(|| PrefixCode { words: build(n) })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Length of the longest codeword; enough flags to name any constructor.
    pub fn max_len(&self) -> usize {
        self.words.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// 0-based index of the codeword that is a prefix of `bits`.
    pub fn index_of(&self, bits: &[bool]) -> Option<usize> {
        self.words
            .iter()
            .position(|w| w.len() <= bits.len() && bits[..w.len()] == w[..])
    }
}

fn build(n: usize) -> Vec<Vec<bool>> {
    if n == 1 {
        return vec![Vec::new()];
    }
    let mut out = Vec::with_capacity(n);
    for (bit, m) in [(false, n.div_ceil(2)), (true, n / 2)] {
        for w in build(m) {
            let mut v = Vec::with_capacity(w.len() + 1);
            v.push(bit);
            v.extend(w);
            out.push(v);
        }
    }
    out
}

/// Codewords of `S_n`; `None` for `n = 0`.
pub fn prefix_code(n: usize) -> Option<PrefixCode> {
    PrefixCode::new(n)
}

/// 1-based constructor number named by `bits` among `c` constructors, or
/// `None` if `bits` is too short. Bits after the codeword are ignored.
pub fn numeric(c: usize, bits: &[bool]) -> Option<usize> {
    prefix_code(c)?.index_of(bits).map(|i| i + 1)
}

/// The codeword of the 1-based constructor number `i` among `c`.
pub fn numeric_inverse(c: usize, i: usize) -> Option<Vec<bool>> {
    prefix_code(c)?.words.get(i.checked_sub(1)?).cloned()
}
