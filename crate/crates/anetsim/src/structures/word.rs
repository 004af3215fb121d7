use std::fmt;
use std::str::FromStr;

use super::StructureError;

/// A finite binary word over the alphabet {0,1}.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    /// Build a word from bits; every value must be 0 or 1.
    pub fn from_bits(bits: impl IntoIterator<Item = u8>) -> Result<Self, StructureError> {
        let bits: Vec<u8> = bits.into_iter().collect();
        if let Some(&bad) = bits.iter().find(|&&b| b > 1) {
            return Err(StructureError::BadWordSymbol((b'0' + bad) as char));
        }
        Ok(Word(bits))
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bit(&self, i: usize) -> u8 {
        self.0[i]
    }

    /// A new word with `bit` prepended.
    pub fn prepend(&self, bit: u8) -> Word {
        debug_assert!(bit <= 1);
        let mut bits = Vec::with_capacity(self.0.len() + 1);
        bits.push(bit);
        bits.extend_from_slice(&self.0);
        Word(bits)
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = StructureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(StructureError::BadWordSymbol(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }
}

/// The first `k` symbols of the Thue-Morse word: bit `i` is the parity of the
/// number of ones in the binary expansion of `i`. Computed by the bit-parity
/// closed form rather than iterated doubling, so each symbol is O(1) and
/// independently checkable.
pub fn thue_morse_prefix(k: usize) -> Result<Word, StructureError> {
    if k == 0 {
        return Err(StructureError::ZeroLength);
    }
    Ok(Word(
        (0..k).map(|i| (i.count_ones() & 1) as u8).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: grow the Thue-Morse word by the doubling rule
    /// s -> s . complement(s), starting from "0".
    fn thue_morse_by_doubling(k: usize) -> Vec<u8> {
        let mut s = vec![0u8];
        while s.len() < k {
            let flipped: Vec<u8> = s.iter().map(|&b| 1 - b).collect();
            s.extend(flipped);
        }
        s.truncate(k);
        s
    }

    #[test]
    fn thue_morse_first_symbols() {
        assert_eq!(thue_morse_prefix(1).unwrap().to_string(), "0");
        assert_eq!(thue_morse_prefix(4).unwrap().to_string(), "0110");
        assert_eq!(
            thue_morse_prefix(16).unwrap().to_string(),
            "0110100110010110"
        );
    }

    #[test]
    fn thue_morse_matches_doubling_oracle() {
        for k in 1..=1024 {
            assert_eq!(
                thue_morse_prefix(k).unwrap().bits(),
                &thue_morse_by_doubling(k)[..],
                "prefix length {k}"
            );
        }
    }

    #[test]
    fn thue_morse_rejects_zero() {
        assert!(thue_morse_prefix(0).is_err());
    }

    #[test]
    fn prefix_monotone() {
        let long = thue_morse_prefix(200).unwrap();
        for k in 1..=200 {
            assert!(thue_morse_prefix(k).unwrap().is_prefix_of(&long));
        }
    }

    #[test]
    fn word_parsing() {
        let w: Word = "0110".parse().unwrap();
        assert_eq!(w.bits(), &[0, 1, 1, 0]);
        assert!("01a".parse::<Word>().is_err());
        assert!(Word::from_bits([0, 2]).is_err());
    }

    #[test]
    fn prepend_shifts_bits() {
        let w: Word = "10".parse().unwrap();
        assert_eq!(w.prepend(0).to_string(), "010");
    }
}
