//! Mixed-radix indexing of fixed-length words.
//!
//! A word `x^n` over an alphabet of size `base` is identified with its
//! lexicographic index, first letter most significant.

pub fn word_count(base: usize, n: usize) -> Option<usize> {
    base.checked_pow(n as u32)
}

pub fn decode(mut index: usize, base: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    decode_into(&mut index, base, &mut out);
    out
}

pub fn decode_into(index: &mut usize, base: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = *index % base;
        *index /= base;
    }
}

pub fn encode(word: &[usize], base: usize) -> usize {
    word.iter().fold(0, |acc, &s| acc * base + s)
}

/// Iterates all words of length `n` in lexicographic order.
pub fn all_words(base: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = word_count(base, n).expect("word space fits in usize");
    (0..total).map(move |i| decode(i, base, n))
}

pub(crate) fn label(symbols: &[String], word: &[usize]) -> String {
    let single = word.iter().all(|&s| symbols[s].chars().count() == 1);
    let parts: Vec<&str> = word.iter().map(|&s| symbols[s].as_str()).collect();
    if single {
        parts.concat()
    } else {
        parts.join("|")
    }
}
