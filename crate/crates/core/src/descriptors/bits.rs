/// Fixed-length bit string backed by 64-bit words. Bits past `len` are always zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn set(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn hamming(&self, other: &BitVector) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn complement(&self) -> BitVector {
        let mut out = BitVector {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.clear_tail();
        out
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    /// Pack 8 bits per byte, bit `i` at position `i % 8` (LSB first) of byte `i / 8`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len.div_ceil(8)];
        for (b, byte) in out.iter_mut().enumerate() {
            *byte = (self.words[b / 8] >> (8 * (b % 8))) as u8;
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], len: usize) -> Option<Self> {
        if bytes.len() != len.div_ceil(8) {
            return None;
        }
        let mut out = BitVector::zeros(len);
        for (b, byte) in bytes.iter().enumerate() {
            out.words[b / 8] |= (*byte as u64) << (8 * (b % 8));
        }
        let before = out.words.clone();
        out.clear_tail();
        // Padding bits must be zero.
        (before == out.words).then_some(out)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn byte_roundtrip() {
        let mut b = BitVector::zeros(13);
        b.set(0);
        b.set(9);
        b.set(12);
        let bytes = b.to_bytes();
        assert_eq!(bytes, vec![0b0000_0001, 0b0001_0010]);
        assert_eq!(BitVector::from_bytes(&bytes, 13).unwrap(), b);
        assert!(BitVector::from_bytes(&[0, 0xff], 13).is_none());
    }

    #[test]
    fn complement_respects_length() {
        let b = BitVector::zeros(70);
        assert_eq!(b.complement().count_ones(), 70);
    }
}
