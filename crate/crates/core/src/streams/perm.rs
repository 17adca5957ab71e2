//! Finite permutations of the naturals: bijections of `[1, N]` extended by the identity.

use std::fmt;

use super::StreamError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinitePermutation {
    /// `map[i] = π(i + 1)`.
    map: Vec<u64>,
}

impl FinitePermutation {
    pub fn identity(bound: u64) -> Self {
        FinitePermutation {
            map: (1..=bound).collect(),
        }
    }

    /// Builds `π` from its values `π(1), ..., π(N)`.
    pub fn from_images(map: Vec<u64>) -> Result<Self, StreamError> {
        let n = map.len();
        let mut seen = vec![false; n + 1];
        for (i, &image) in map.iter().enumerate() {
            let slot = usize::try_from(image).ok().filter(|&s| s >= 1 && s <= n);
            let Some(slot) = slot else {
                return Err(StreamError::Permutation(format!(
                    "image {image} of {} lies outside [1, {n}]",
                    i + 1
                )));
            };
            if seen[slot] {
                return Err(StreamError::Permutation(format!("{image} is hit twice")));
            }
            seen[slot] = true;
        }
        Ok(FinitePermutation { map })
    }

    /// Builds `π` on `[1, bound]` from explicit pairs `t -> π(t)`; unlisted points are fixed.
    pub fn from_pairs(bound: u64, pairs: &[(u64, u64)]) -> Result<Self, StreamError> {
        let mut map: Vec<u64> = (1..=bound).collect();
        let mut assigned = vec![false; bound as usize + 1];
        for &(from, to) in pairs {
            if from == 0 || from > bound {
                return Err(StreamError::Permutation(format!(
                    "{from} lies outside [1, {bound}]"
                )));
            }
            if assigned[from as usize] {
                return Err(StreamError::Permutation(format!("{from} is mapped twice")));
            }
            assigned[from as usize] = true;
            map[from as usize - 1] = to;
        }
        Self::from_images(map)
    }

    pub fn swap(bound: u64, i: u64, j: u64) -> Result<Self, StreamError> {
        Self::from_pairs(bound, &[(i, j), (j, i)])
    }

    /// Every `t > bound` is fixed.
    pub fn bound(&self) -> u64 {
        self.map.len() as u64
    }

    pub fn apply(&self, t: u64) -> u64 {
        match t.checked_sub(1).and_then(|i| self.map.get(i as usize)) {
            Some(&image) => image,
            None => t,
        }
    }

    pub fn images(&self) -> &[u64] {
        &self.map
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u64; self.map.len()];
        for (i, &image) in self.map.iter().enumerate() {
            inv[image as usize - 1] = i as u64 + 1;
        }
        FinitePermutation { map: inv }
    }

    /// `(self ∘ other)(t) = self(other(t))`.
    pub fn compose(&self, other: &FinitePermutation) -> Self {
        let bound = self.bound().max(other.bound());
        FinitePermutation {
            map: (1..=bound).map(|t| self.apply(other.apply(t))).collect(),
        }
    }

    /// Points moved by the permutation, as `(t, π(t))`.
    pub fn moved(&self) -> Vec<(u64, u64)> {
        self.map
            .iter()
            .enumerate()
            .filter(|(i, &image)| *i as u64 + 1 != image)
            .map(|(i, &image)| (i as u64 + 1, image))
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.moved().is_empty()
    }
}

impl fmt::Display for FinitePermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "perm[{}](", self.bound())?;
        for (i, (from, to)) in self.moved().into_iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{from}->{to}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_non_bijections() {
        assert!(FinitePermutation::from_images(vec![1, 1, 3]).is_err());
        assert!(FinitePermutation::from_images(vec![1, 4, 3]).is_err());
        assert!(FinitePermutation::from_pairs(3, &[(1, 2)]).is_err());
        assert!(FinitePermutation::from_pairs(3, &[(1, 2), (2, 1)]).is_ok());
    }

    #[test]
    fn identity_beyond_bound() {
        let p =
            FinitePermutation::from_pairs(6, &[(1, 6), (3, 1), (4, 3), (5, 4), (6, 5)]).unwrap();
        assert_eq!(p.apply(1), 6);
        assert_eq!(p.apply(2), 2);
        assert_eq!(p.apply(7), 7);
        assert_eq!(p.apply(1_000_000), 1_000_000);
        assert_eq!(p.to_string(), "perm[6](1->6,3->1,4->3,5->4,6->5)");
    }

    proptest! {
        #[test]
        fn inverse_composes_to_identity(images in Just((1..=9u64).collect::<Vec<_>>()).prop_shuffle()) {
            let p = FinitePermutation::from_images(images).unwrap();
            prop_assert!(p.compose(&p.inverse()).is_identity());
            prop_assert!(p.inverse().compose(&p).is_identity());
        }
    }
}
