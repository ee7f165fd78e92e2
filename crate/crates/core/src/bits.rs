//! Bit-vector helpers. Assignments to ordered edge lists are bit vectors;
//! their integer index is the big-endian value (first edge = most
//! significant bit), matching the table layout used throughout.

use alloc::vec::Vec;

/// Hamming weight of a bit vector.
pub fn hw(bits: &[bool]) -> usize {
    bits.iter().filter(|&&b| b).count()
}

/// Parity of the Hamming weight.
pub fn parity(bits: &[bool]) -> bool {
    hw(bits) % 2 == 1
}

/// Big-endian index of a bit vector.
pub fn index_of(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b))
}

/// Bit vector of length `len` for a big-endian index.
pub fn bits_of(index: usize, len: usize) -> Vec<bool> {
    (0..len).map(|i| (index >> (len - 1 - i)) & 1 == 1).collect()
}

/// Position of the unique set bit, if exactly one bit is set.
pub fn one_hot_position(bits: &[bool]) -> Option<usize> {
    let mut pos = None;
    for (i, &b) in bits.iter().enumerate() {
        if b {
            if pos.is_some() {
                return None;
            }
            pos = Some(i);
        }
    }
    pos
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for len in 0..8 {
            for idx in 0..(1usize << len) {
                let b = bits_of(idx, len);
                assert_eq!(index_of(&b), idx);
            }
        }
    }

    #[test]
    fn big_endian_convention() {
        // First edge is the most significant bit: 1000 -> 8.
        assert_eq!(index_of(&[true, false, false, false]), 8);
        assert_eq!(one_hot_position(&[false, true, false]), Some(1));
        assert_eq!(one_hot_position(&[true, true, false]), None);
        assert_eq!(one_hot_position(&[false, false]), None);
    }
}
