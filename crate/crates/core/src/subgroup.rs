//! Subgroups as sets of element indices, plus cores and normalizers.

use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;

/// A subgroup of a [`FiniteGroup`], stored as sorted element indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subgroup {
    members: Vec<usize>,
    mask: FixedBitSet,
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup{:?}", self.members)
    }
}

impl Subgroup {
    fn from_mask(mask: FixedBitSet) -> Self {
        Self { members: mask.ones().collect(), mask }
    }

    /// Checks closure (and the identity) before accepting `members`.
    pub fn from_members(group: &FiniteGroup, members: &[usize]) -> Result<Self> {
        let n = group.order();
        let mut mask = FixedBitSet::with_capacity(n);
        for &m in members {
            if m >= n {
                return Err(Error::NotASubgroup(format!("element index {m} out of range")));
            }
            mask.insert(m);
        }
        if !mask.contains(0) {
            return Err(Error::NotASubgroup("identity missing".into()));
        }
        let sub = Self::from_mask(mask);
        for &a in &sub.members {
            for &b in &sub.members {
                if !sub.mask.contains(group.mul(a, b)) {
                    return Err(Error::NotASubgroup("not closed under composition".into()));
                }
            }
        }
        Ok(sub)
    }

    pub fn trivial(group: &FiniteGroup) -> Self {
        let mut mask = FixedBitSet::with_capacity(group.order());
        mask.insert(0);
        Self::from_mask(mask)
    }

    pub fn whole(group: &FiniteGroup) -> Self {
        let mut mask = FixedBitSet::with_capacity(group.order());
        mask.insert_range(..);
        Self::from_mask(mask)
    }

    /// Smallest subgroup containing `gens` (element indices).
    pub fn generated_by(group: &FiniteGroup, gens: &[usize]) -> Self {
        let mut mask = FixedBitSet::with_capacity(group.order());
        mask.insert(0);
        let mut queue = vec![0usize];
        while let Some(x) = queue.pop() {
            for &s in gens {
                let y = group.mul(x, s);
                if !mask.put(y) {
                    queue.push(y);
                }
            }
        }
        Self::from_mask(mask)
    }

    /// `⟨self, x⟩`, reusing the known members as a starting set.
    pub fn extended_by(&self, group: &FiniteGroup, x: usize, gens: &[usize]) -> Self {
        let mut mask = self.mask.clone();
        let mut queue: Vec<usize> = self.members.clone();
        let all_gens: Vec<usize> = gens.iter().copied().chain(std::iter::once(x)).collect();
        while let Some(a) = queue.pop() {
            for &s in &all_gens {
                let y = group.mul(a, s);
                if !mask.put(y) {
                    queue.push(y);
                }
            }
        }
        Self::from_mask(mask)
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn mask(&self) -> &FixedBitSet {
        &self.mask
    }

    #[inline]
    pub fn contains(&self, k: usize) -> bool {
        self.mask.contains(k)
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.mask.is_subset(&other.mask)
    }

    /// `g H g⁻¹`.
    pub fn conjugate(&self, group: &FiniteGroup, g: usize) -> Self {
        let mut mask = FixedBitSet::with_capacity(group.order());
        for &h in &self.members {
            mask.insert(group.conj(g, h));
        }
        Self::from_mask(mask)
    }

    /// A small generating set, built greedily in member order.
    pub fn generators(&self, group: &FiniteGroup) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = Subgroup::trivial(group);
        for &m in &self.members {
            if !span.contains(m) {
                span = span.extended_by(group, m, &gens);
                gens.push(m);
                if span.order() == self.order() {
                    break;
                }
            }
        }
        gens
    }

    pub(crate) fn check_in(&self, group: &FiniteGroup) -> Result<()> {
        if self.mask.len() != group.order() || self.members.last().is_some_and(|&m| m >= group.order()) {
            return Err(Error::NotASubgroup("subgroup belongs to a different group".into()));
        }
        Ok(())
    }
}

/// `∩_g g⁻¹ H g`, the largest normal subgroup of `group` inside `sub`.
pub fn core(group: &FiniteGroup, sub: &Subgroup) -> Result<Subgroup> {
    sub.check_in(group)?;
    let mut mask = FixedBitSet::with_capacity(group.order());
    for &h in sub.members() {
        if (0..group.order()).all(|g| sub.contains(group.conj(g, h))) {
            mask.insert(h);
        }
    }
    Ok(Subgroup::from_mask(mask))
}

/// `{g : g H g⁻¹ = H}`.
pub fn normalizer(group: &FiniteGroup, sub: &Subgroup) -> Result<Subgroup> {
    sub.check_in(group)?;
    let gens = sub.generators(group);
    let mut mask = FixedBitSet::with_capacity(group.order());
    for g in 0..group.order() {
        if gens.iter().all(|&h| sub.contains(group.conj(g, h))) {
            mask.insert(g);
        }
    }
    Ok(Subgroup::from_mask(mask))
}

pub fn is_normal(group: &FiniteGroup, sub: &Subgroup) -> Result<bool> {
    Ok(normalizer(group, sub)?.order() == group.order())
}
