use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bijection on `{0, …, n-1}`; `images[i]` is where point `i` goes.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn new(images: Vec<u32>) -> Result<Self> {
        if images.is_empty() {
            return Err(Error::ZeroDegree);
        }
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n {
                return Err(Error::InvalidPermutation(format!(
                    "image {x} out of range for degree {n}"
                )));
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidPermutation(format!("image {x} repeated")));
            }
        }
        Ok(Self { images })
    }

    pub fn from_usize(images: &[usize]) -> Result<Self> {
        let images = images
            .iter()
            .map(|&x| u32::try_from(x).map_err(|_| Error::InvalidPermutation("image too large".into())))
            .collect::<Result<Vec<_>>>()?;
        Self::new(images)
    }

    /// Builds a permutation from disjoint cycles, e.g. `&[&[0, 1, 2]]`.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..degree).collect();
        for cycle in cycles {
            for (k, &p) in cycle.iter().enumerate() {
                if p >= degree {
                    return Err(Error::PointOutOfRange { point: p, count: degree });
                }
                images[p] = cycle[(k + 1) % cycle.len()];
            }
        }
        Self::from_usize(&images)
    }

    pub fn identity(degree: usize) -> Self {
        assert!(degree > 0, "degree-0 permutation");
        Self { images: (0..degree as u32).collect() }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `p.compose(q)[i] = p[q[i]]`: apply `q` first, then `p`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch { left: self.degree(), right: other.degree() });
        }
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &Self) -> Self {
        Self { images: other.images.iter().map(|&q| self.images[q as usize]).collect() }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Self { images: inv }
    }
}

impl TryFrom<Vec<u32>> for Permutation {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Permutation> for Vec<u32> {
    fn from(p: Permutation) -> Self {
        p.images
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.images)
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.degree()];
        let mut any = false;
        for start in 0..self.degree() {
            if seen[start] || self.apply(start) == start {
                continue;
            }
            any = true;
            write!(f, "(")?;
            let mut p = start;
            let mut first = true;
            while !seen[p] {
                seen[p] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{p}")?;
                first = false;
                p = self.apply(p);
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cyc3() -> Permutation {
        Permutation::from_cycles(3, &[&[0, 1, 2]]).unwrap()
    }

    #[test]
    fn compose_identity() {
        let id = Permutation::identity(3);
        assert_eq!(id.compose(&cyc3()).unwrap(), cyc3());
    }

    #[test]
    fn compose_involution() {
        let t = Permutation::from_cycles(2, &[&[0, 1]]).unwrap();
        assert!(t.compose(&t).unwrap().is_identity());
    }

    #[test]
    fn compose_three_cycle_squared_is_inverse() {
        let c = cyc3();
        let sq = c.compose(&c).unwrap();
        // p[q[i]] with p = q = [1, 2, 0]
        assert_eq!(sq.images(), &[2, 0, 1]);
        assert_eq!(sq, c.inverse());
        assert_eq!(sq.to_string(), "(0 2 1)");
    }

    #[test]
    fn degree_mismatch_is_an_error() {
        let err = Permutation::identity(2).compose(&Permutation::identity(3)).unwrap_err();
        assert_eq!(err, Error::DegreeMismatch { left: 2, right: 3 });
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
        assert_eq!(Permutation::new(vec![]).unwrap_err(), Error::ZeroDegree);
        assert!(serde_json::from_str::<Permutation>("[1,1]").is_err());
    }

    fn arb_perm(n: usize) -> impl Strategy<Value = Permutation> {
        Just((0..n as u32).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn group_axioms(p in arb_perm(7), q in arb_perm(7), r in arb_perm(7)) {
            let pq_r = p.compose(&q).unwrap().compose(&r).unwrap();
            let p_qr = p.compose(&q.compose(&r).unwrap()).unwrap();
            prop_assert_eq!(pq_r, p_qr);
            prop_assert!(p.compose(&p.inverse()).unwrap().is_identity());
            prop_assert!(p.inverse().compose(&p).unwrap().is_identity());
        }
    }
}
