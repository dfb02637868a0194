//! Row-span membership over GF(2) with combination tracking.

/// Dense bit vector packed into `u64` words.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        let mask = 1u64 << (i & 63);
        if value {
            self.words[i >> 6] |= mask;
        } else {
            self.words[i >> 6] &= !mask;
        }
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }
}

/// Echelon basis of the row span of a set of generator vectors. Each basis
/// row remembers which generators were XOR-ed together to produce it.
#[derive(Debug, Clone)]
pub struct RowSpan {
    generators: usize,
    rows: Vec<(usize, BitVec, BitVec)>,
}

impl RowSpan {
    pub fn new<'a>(vectors: impl IntoIterator<Item = &'a BitVec>) -> Self {
        let vectors: Vec<&BitVec> = vectors.into_iter().collect();
        let generators = vectors.len();
        let mut rows: Vec<(usize, BitVec, BitVec)> = Vec::new();
        for (g, v) in vectors.into_iter().enumerate() {
            let mut v = v.clone();
            let mut combo = BitVec::zeros(generators);
            combo.set(g, true);
            for (pivot, row, row_combo) in &rows {
                if v.get(*pivot) {
                    v.xor_assign(row);
                    combo.xor_assign(row_combo);
                }
            }
            if let Some(pivot) = v.first_one() {
                // keep the basis fully reduced on pivot columns
                for (_, row, row_combo) in rows.iter_mut() {
                    if row.get(pivot) {
                        row.xor_assign(&v);
                        row_combo.xor_assign(&combo);
                    }
                }
                rows.push((pivot, v, combo));
            }
        }
        RowSpan { generators, rows }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Generator subset whose XOR equals `target`, if `target` lies in the span.
    pub fn solve(&self, target: &BitVec) -> Option<Vec<usize>> {
        let mut v = target.clone();
        let mut combo = BitVec::zeros(self.generators);
        for (pivot, row, row_combo) in &self.rows {
            if v.get(*pivot) {
                v.xor_assign(row);
                combo.xor_assign(row_combo);
            }
        }
        if v.is_zero() {
            Some(combo.ones().collect())
        } else {
            None
        }
    }

    pub fn contains(&self, target: &BitVec) -> bool {
        self.solve(target).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVec {
        BitVec::from_bools(&s.chars().map(|c| c == '1').collect::<Vec<_>>())
    }

    #[test]
    fn span_membership_and_combination() {
        let gens = [bv("1100"), bv("0110"), bv("1010"), bv("0001")];
        let span = RowSpan::new(&gens);
        assert_eq!(span.rank(), 3);
        let target = bv("1011");
        let combo = span.solve(&target).unwrap();
        let mut acc = BitVec::zeros(4);
        for g in combo {
            acc.xor_assign(&gens[g]);
        }
        assert_eq!(acc, target);
        assert!(!span.contains(&bv("1000")));
        assert!(span.contains(&BitVec::zeros(4)));
    }

    #[test]
    fn empty_span() {
        let span = RowSpan::new(std::iter::empty::<&BitVec>());
        assert_eq!(span.rank(), 0);
        assert!(span.contains(&BitVec::zeros(0)));
    }
}
