use std::fmt;

/// A set of player indices, stored as a little-endian bitset.
///
/// Indices refer to positions in the owning game's player list.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Coalition {
    words: Vec<u64>,
}

impl Coalition {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Coalition of all players `0..n`.
    pub fn full(n: usize) -> Self {
        let mut c = Self::empty();
        for i in 0..n {
            c.insert(i);
        }
        c
    }

    /// Builds a coalition from the low bits of `mask`.
    pub fn from_mask(mask: u64) -> Self {
        let mut c = Self { words: vec![mask] };
        c.trim();
        c
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut c = Self::empty();
        for i in indices {
            c.insert(i);
        }
        c
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words
            .get(i / 64)
            .is_some_and(|w| w & (1u64 << (i % 64)) != 0)
    }

    pub fn insert(&mut self, i: usize) {
        let w = i / 64;
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1u64 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        if let Some(w) = self.words.get_mut(i / 64) {
            *w &= !(1u64 << (i % 64));
        }
        self.trim();
    }

    pub fn with(&self, i: usize) -> Self {
        let mut c = self.clone();
        c.insert(i);
        c
    }

    pub fn without(&self, i: usize) -> Self {
        let mut c = self.clone();
        c.remove(i);
        c
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_subset(&self, other: &Coalition) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    /// Member indices in ascending order.
    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + bit)
            })
        })
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members()).finish()
    }
}

impl FromIterator<usize> for Coalition {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::from_indices(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_remove_across_words() {
        let mut c = Coalition::empty();
        c.insert(3);
        c.insert(70);
        assert!(c.contains(3) && c.contains(70) && !c.contains(64));
        assert_eq!(c.len(), 2);
        assert_eq!(c.members().collect::<Vec<_>>(), vec![3, 70]);
        c.remove(70);
        assert_eq!(c, Coalition::from_mask(1 << 3));
        c.remove(3);
        assert!(c.is_empty());
        assert_eq!(c, Coalition::empty());
    }

    #[test]
    fn subset() {
        let a = Coalition::from_indices([1, 65]);
        let b = Coalition::from_indices([0, 1, 65, 90]);
        assert!(a.is_subset(&b));
        assert!(!b.is_subset(&a));
        assert!(Coalition::empty().is_subset(&a));
    }
}
