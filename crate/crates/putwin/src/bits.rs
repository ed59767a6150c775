//! Small bitset helpers: `u64` masks for alternative sets (capping the
//! solvers at 64 alternatives) and a word-vector bitset for edge sets.

/// Iterate the set bit positions of a `u64` mask, ascending.
pub fn iter_bits(mask: u64) -> impl Iterator<Item = usize> {
    let mut rest = mask;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(i)
        }
    })
}

/// Mask with the low `n` bits set.
pub fn full_mask(n: usize) -> u64 {
    debug_assert!(n <= 64);
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Fixed-capacity bitset keyed by small integer ids (edge ids).
///
/// `Ord`/`Hash` derive from the word vector, so equal-capacity sets
/// compare deterministically; the lexicographic order on words matches
/// "smallest id first" only loosely but is stable, which is all the
/// solvers need for reproducible tie-breaking.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeBits {
    words: Vec<u64>,
}

impl EdgeBits {
    pub fn new(capacity: usize) -> Self {
        EdgeBits {
            words: vec![0; capacity.div_ceil(64)],
        }
    }

    pub fn set(&mut self, id: usize) {
        self.words[id / 64] |= 1u64 << (id % 64);
    }

    pub fn clear(&mut self, id: usize) {
        self.words[id / 64] &= !(1u64 << (id % 64));
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn first(&self) -> Option<usize> {
        for (i, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(i * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            iter_bits(w).map(move |b| i * 64 + b)
        })
    }
}

impl std::fmt::Debug for EdgeBits {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_iteration() {
        assert_eq!(iter_bits(0b1011).collect::<Vec<_>>(), vec![0, 1, 3]);
        assert_eq!(full_mask(3), 0b111);
        assert_eq!(full_mask(64), u64::MAX);
    }

    #[test]
    fn edge_bits_roundtrip() {
        let mut b = EdgeBits::new(130);
        for id in [0, 63, 64, 129] {
            b.set(id);
        }
        assert_eq!(b.first(), Some(0));
        assert_eq!(b.iter().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
        b.clear(0);
        assert_eq!(b.first(), Some(63));
        assert!(!b.is_empty());
    }
}
