//! Brute-force reference implementation on plain byte strings.
//!
//! Moves are enumerated as intervals `[i, j]` of identical characters and
//! applied by slicing, so merging happens implicitly. Memoization is keyed
//! on the literal string: no run-length encoding, relabelling or reversal.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

pub fn successors(s: &[u8]) -> BTreeSet<Vec<u8>> {
    let mut out = BTreeSet::new();
    for i in 0..s.len() {
        for j in i..s.len() {
            if s[j] != s[i] {
                break;
            }
            let mut t = s[..i].to_vec();
            t.extend_from_slice(&s[j + 1..]);
            out.insert(t);
        }
    }
    out
}

fn mex(values: &BTreeSet<u32>) -> u32 {
    (0..).find(|v| !values.contains(v)).expect("finite set")
}

#[derive(Default)]
pub struct Oracle {
    memo: HashMap<Vec<u8>, u32>,
}

impl Oracle {
    pub fn new() -> Oracle {
        Oracle::default()
    }

    pub fn grundy(&mut self, s: &[u8]) -> u32 {
        if let Some(&g) = self.memo.get(s) {
            return g;
        }
        let values: BTreeSet<u32> = successors(s).iter().map(|t| self.grundy(t)).collect();
        let g = mex(&values);
        self.memo.insert(s.to_vec(), g);
        g
    }

    pub fn is_p(&mut self, s: &[u8]) -> bool {
        self.grundy(s) == 0
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }
}

/// Every word over `alphabet` with length at most `max_len`.
pub fn words(alphabet: &[u8], max_len: usize) -> Vec<Vec<u8>> {
    let mut all = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * alphabet.len());
        for w in &layer {
            for &c in alphabet {
                let mut v = w.clone();
                v.push(c);
                next.push(v);
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

pub fn repeat(c: u8, n: usize) -> Vec<u8> {
    vec![c; n]
}

pub fn text(s: &[u8]) -> String {
    String::from_utf8(s.to_vec()).expect("ascii")
}

/// No two adjacent characters equal.
pub fn alternating(s: &[u8]) -> bool {
    s.windows(2).all(|w| w[0] != w[1])
}

/// `s = t · f(reverse t)` for some injective `f` without fixed points,
/// found by trying every split-consistent letter pairing.
pub fn complementary_palindrome(s: &[u8]) -> bool {
    let n = s.len();
    if n % 2 == 1 {
        return false;
    }
    let mut f: HashMap<u8, u8> = HashMap::new();
    for i in 0..n / 2 {
        let (x, y) = (s[i], s[n - 1 - i]);
        if x == y || *f.entry(x).or_insert(y) != y {
            return false;
        }
    }
    let images: BTreeSet<u8> = f.values().copied().collect();
    images.len() == f.len()
}

/// Membership in `({a^k b^k : k >= 1} ∪ {ba})*` by naive recursion over
/// every possible first factor.
pub fn in_lstar(s: &[u8]) -> bool {
    if s.is_empty() {
        return true;
    }
    if s.starts_with(b"ba") && in_lstar(&s[2..]) {
        return true;
    }
    (1..=s.len() / 2)
        .any(|k| s[..k].iter().all(|&c| c == b'a') && s[k..2 * k].iter().all(|&c| c == b'b') && in_lstar(&s[2 * k..]))
}

/// Thue–Morse prefix via the bit-count definition.
pub fn thue_morse(len: usize) -> Vec<u8> {
    (0..len as u32)
        .map(|i| if i.count_ones() % 2 == 0 { b'a' } else { b'b' })
        .collect()
}
