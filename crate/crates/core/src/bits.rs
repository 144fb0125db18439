//! Word-level helpers for the flat `u64` bitsets used by `Graph` and the solver.

pub const WORD_BITS: usize = 64;

#[inline]
pub fn words_for(nbits: usize) -> usize {
    nbits.div_ceil(WORD_BITS)
}

#[inline]
pub fn get(words: &[u64], i: usize) -> bool {
    words[i / WORD_BITS] >> (i % WORD_BITS) & 1 != 0
}

#[inline]
pub fn set(words: &mut [u64], i: usize) {
    words[i / WORD_BITS] |= 1u64 << (i % WORD_BITS);
}

#[inline]
pub fn clear(words: &mut [u64], i: usize) {
    words[i / WORD_BITS] &= !(1u64 << (i % WORD_BITS));
}

#[inline]
pub fn count(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

#[inline]
pub fn intersection_count(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

/// Iterates set bit positions in ascending order.
pub fn for_each(words: &[u64], mut f: impl FnMut(usize)) {
    for (wi, &w) in words.iter().enumerate() {
        let mut t = w;
        while t != 0 {
            f(wi * WORD_BITS + t.trailing_zeros() as usize);
            t &= t - 1;
        }
    }
}

pub fn to_vec(words: &[u64]) -> Vec<usize> {
    let mut out = Vec::with_capacity(count(words));
    for_each(words, |i| out.push(i));
    out
}
