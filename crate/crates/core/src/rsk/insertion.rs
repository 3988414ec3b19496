//! Row insertion for words over a finite ordered alphabet.

use crate::gt::Signature;

/// Insertion tableau of the RSK correspondence, tracking only the
/// multiplicity of each letter in each row. Row `r` occupies
/// `counts[r * alphabet ..]` and `mask[r * words ..]`, where the mask marks
/// letters with nonzero count.
#[derive(Clone, Debug)]
pub struct RskTableau {
    alphabet: usize,
    words: usize,
    counts: Vec<u32>,
    mask: Vec<u64>,
    lengths: Vec<u64>,
}

impl RskTableau {
    pub fn new(alphabet: usize) -> Self {
        Self {
            alphabet,
            words: alphabet.div_ceil(64),
            counts: Vec::new(),
            mask: Vec::new(),
            lengths: Vec::new(),
        }
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    /// Smallest letter in row `r` strictly greater than `a`.
    fn next_above(&self, r: usize, a: usize) -> Option<usize> {
        let start = a + 1;
        let row = &self.mask[r * self.words..(r + 1) * self.words];
        let mut block = start / 64;
        if block >= row.len() {
            return None;
        }
        let mut bits = row[block] & (!0u64).checked_shl((start % 64) as u32).unwrap_or(0);
        loop {
            if bits != 0 {
                return Some(block * 64 + bits.trailing_zeros() as usize);
            }
            block += 1;
            if block == row.len() {
                return None;
            }
            bits = row[block];
        }
    }

    fn add(&mut self, r: usize, a: usize) {
        self.counts[r * self.alphabet + a] += 1;
        self.mask[r * self.words + a / 64] |= 1 << (a % 64);
    }

    fn remove(&mut self, r: usize, a: usize) {
        let c = &mut self.counts[r * self.alphabet + a];
        *c -= 1;
        if *c == 0 {
            self.mask[r * self.words + a / 64] &= !(1 << (a % 64));
        }
    }

    /// Inserts letter `a` (`0 ≤ a < alphabet`).
    pub fn insert(&mut self, mut a: usize) {
        assert!(a < self.alphabet, "letter {a} outside alphabet of size {}", self.alphabet);
        let mut r = 0;
        loop {
            if r == self.lengths.len() {
                self.lengths.push(0);
                self.counts.resize(self.counts.len() + self.alphabet, 0);
                self.mask.resize(self.mask.len() + self.words, 0);
            }
            match self.next_above(r, a) {
                None => {
                    self.add(r, a);
                    self.lengths[r] += 1;
                    return;
                }
                Some(b) => {
                    self.remove(r, b);
                    self.add(r, a);
                    a = b;
                    r += 1;
                }
            }
        }
    }

    /// Row lengths padded with zeros to the alphabet size.
    pub fn shape(&self) -> Signature {
        let mut parts: Vec<i64> = self.lengths.iter().map(|&l| l as i64).collect();
        parts.resize(self.alphabet.max(parts.len()), 0);
        Signature::new(parts).expect("RSK rows are weakly decreasing")
    }

    /// Multiplicity of each letter in each row.
    pub fn row_contents(&self) -> Vec<Vec<u32>> {
        self.counts.chunks(self.alphabet.max(1)).map(<[u32]>::to_vec).collect()
    }
}

/// Shape of the RSK insertion tableau of `word` over `0..alphabet`.
pub fn rsk_shape(word: &[usize], alphabet: usize) -> Signature {
    let mut t = RskTableau::new(alphabet);
    for &a in word {
        t.insert(a);
    }
    t.shape()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Textbook row insertion on explicit rows.
    fn naive_shape(word: &[usize], alphabet: usize) -> Vec<i64> {
        let mut rows: Vec<Vec<usize>> = Vec::new();
        for &x in word {
            let mut a = x;
            let mut r = 0;
            loop {
                if r == rows.len() {
                    rows.push(vec![a]);
                    break;
                }
                match rows[r].iter().position(|&b| b > a) {
                    None => {
                        rows[r].push(a);
                        break;
                    }
                    Some(p) => {
                        std::mem::swap(&mut rows[r][p], &mut a);
                        r += 1;
                    }
                }
            }
        }
        let mut s: Vec<i64> = rows.iter().map(|r| r.len() as i64).collect();
        s.resize(alphabet.max(s.len()), 0);
        s
    }

    /// Greene: λ_1 is the longest weakly increasing subsequence.
    fn longest_weakly_increasing(word: &[usize]) -> i64 {
        let mut best = vec![0i64; word.len()];
        for i in 0..word.len() {
            best[i] = 1 + (0..i).filter(|&j| word[j] <= word[i]).map(|j| best[j]).max().unwrap_or(0);
        }
        best.into_iter().max().unwrap_or(0)
    }

    #[test]
    fn small_examples() {
        // letters 1 < 2 < 3 as 0, 1, 2
        assert_eq!(rsk_shape(&[1, 0, 2], 3).parts(), &[2, 1, 0]);
        assert_eq!(rsk_shape(&[], 2).parts(), &[0, 0]);
        assert_eq!(rsk_shape(&[2, 1, 0], 3).parts(), &[1, 1, 1]);
        assert_eq!(rsk_shape(&[0, 0, 1, 1], 2).parts(), &[4, 0]);
    }

    #[test]
    fn wide_alphabets_cross_mask_blocks() {
        let word: Vec<usize> = (0..300).map(|i| (i * 97) % 150).collect();
        assert_eq!(rsk_shape(&word, 150).parts(), naive_shape(&word, 150).as_slice());
    }

    proptest! {
        #[test]
        fn matches_naive_insertion(word in proptest::collection::vec(0usize..5, 0..40)) {
            let s = rsk_shape(&word, 5);
            let naive = naive_shape(&word, 5);
            prop_assert_eq!(s.parts(), naive.as_slice());
            prop_assert_eq!(s.size(), word.len() as i64);
            prop_assert_eq!(s.parts()[0], longest_weakly_increasing(&word));
        }
    }
}
