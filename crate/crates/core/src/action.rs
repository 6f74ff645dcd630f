//! Group actions on finite point sets.
//!
//! Actions are stored as left actions: `act(g, i) = image(g)[i]` and
//! `act(g∘h, i) = act(g, act(h, i))`. The coset action sends `Hx` to
//! `H x g⁻¹`, which is the right action on right cosets rewritten as a left
//! action; the stabilizer of the coset `H` is `H` itself.

use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::subgroup::Subgroup;

/// Exhaustive homomorphism checks run up to this group order.
pub const EXHAUSTIVE_HOM_CHECK_MAX_ORDER: usize = 200;

/// A homomorphism from a group into the permutations of `point_count` points.
#[derive(Clone)]
pub struct GroupAction {
    group: Arc<FiniteGroup>,
    point_count: usize,
    // row-major: images[g * point_count + i]
    images: Vec<u32>,
}

impl std::fmt::Debug for GroupAction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GroupAction")
            .field("group_order", &self.group.order())
            .field("point_count", &self.point_count)
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ActionProperties {
    pub transitive: bool,
    pub regular: bool,
    pub faithful: bool,
}

impl GroupAction {
    /// The defining action of a permutation group on its `degree` points.
    pub fn natural(group: Arc<FiniteGroup>) -> Self {
        let n = group.degree();
        let mut images = Vec::with_capacity(group.order() * n);
        for p in group.elements() {
            images.extend_from_slice(p.images());
        }
        Self { group, point_count: n, images }
    }

    /// Every element acts as the identity.
    pub fn trivial(group: Arc<FiniteGroup>, point_count: usize) -> Self {
        let row: Vec<u32> = (0..point_count as u32).collect();
        let images = row.repeat(group.order());
        Self { group, point_count, images }
    }

    /// Extends images of the group's generators to every element and checks
    /// that the result is a homomorphism.
    pub fn from_generator_images(
        group: Arc<FiniteGroup>,
        point_count: usize,
        generator_images: &[Vec<u32>],
    ) -> Result<Self> {
        if generator_images.len() != group.generators().len() {
            return Err(Error::LengthMismatch {
                what: "generator images",
                expected: group.generators().len(),
                got: generator_images.len(),
            });
        }
        for img in generator_images {
            if img.len() != point_count {
                return Err(Error::LengthMismatch { what: "generator image", expected: point_count, got: img.len() });
            }
            if point_count > 0 {
                crate::perm::Permutation::new(img.clone())?;
            }
        }
        let n = point_count;
        let mut images = vec![0u32; group.order() * n];
        for i in 0..n {
            images[i] = i as u32;
        }
        for k in 1..group.order() {
            let (parent, s) = group.word(k);
            for i in 0..n {
                let mid = images[parent * n + i] as usize;
                images[k * n + i] = generator_images[s][mid];
            }
        }
        let action = Self { group, point_count, images };
        // image(s∘k) = image(s)∘image(k) for every generator s and element k
        // implies a homomorphism by induction on word length.
        let g = &action.group;
        for (s, &gs) in g.generator_indices().iter().enumerate() {
            for k in 0..g.order() {
                let sk = g.mul(gs, k);
                for i in 0..n {
                    if action.act(sk, i) != generator_images[s][action.act(k, i)] as usize {
                        return Err(Error::NotAHomomorphism);
                    }
                }
            }
        }
        Ok(action)
    }

    /// Builds the action pointwise from `f(element, point)`. The caller is
    /// responsible for `f` being an action; generator pairs are checked.
    pub fn from_fn<F>(group: Arc<FiniteGroup>, point_count: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> usize,
    {
        let n = point_count;
        let mut images = Vec::with_capacity(group.order() * n);
        for g in 0..group.order() {
            for i in 0..n {
                let j = f(g, i);
                if j >= n {
                    return Err(Error::PointOutOfRange { point: j, count: n });
                }
                images.push(j as u32);
            }
        }
        let action = Self { group, point_count, images };
        if !action.is_homomorphism(false) {
            return Err(Error::NotAHomomorphism);
        }
        Ok(action)
    }

    pub(crate) fn from_raw(group: Arc<FiniteGroup>, point_count: usize, images: Vec<u32>) -> Self {
        debug_assert_eq!(images.len(), group.order() * point_count);
        Self { group, point_count, images }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn point_count(&self) -> usize {
        self.point_count
    }

    #[inline]
    pub fn act(&self, g: usize, i: usize) -> usize {
        self.images[g * self.point_count + i] as usize
    }

    /// Image of element `g` as a slice of point indices.
    pub fn image(&self, g: usize) -> &[u32] {
        &self.images[g * self.point_count..(g + 1) * self.point_count]
    }

    pub(crate) fn raw_images(&self) -> &[u32] {
        &self.images
    }

    pub fn same_group(&self, other: &GroupAction) -> bool {
        self.group.same_as(&other.group)
    }

    /// Checks `image(g∘h) = image(g)∘image(h)` over generator pairs, or over
    /// all element pairs when `exhaustive` is set.
    pub fn is_homomorphism(&self, exhaustive: bool) -> bool {
        let g = &self.group;
        let check = |a: usize, b: usize| {
            let ab = g.mul(a, b);
            (0..self.point_count).all(|i| self.act(ab, i) == self.act(a, self.act(b, i)))
        };
        if exhaustive {
            (0..g.order()).all(|a| (0..g.order()).all(|b| check(a, b)))
        } else {
            let gens = g.generator_indices();
            self.image(0).iter().enumerate().all(|(i, &x)| i as u32 == x)
                && gens.iter().all(|&a| gens.iter().all(|&b| check(a, b)))
        }
    }

    fn check_point(&self, point: usize) -> Result<()> {
        if point >= self.point_count {
            return Err(Error::PointOutOfRange { point, count: self.point_count });
        }
        Ok(())
    }

    /// Sorted orbit of `point` under the generators.
    pub fn orbit(&self, point: usize) -> Result<Vec<usize>> {
        self.check_point(point)?;
        let mut seen = FixedBitSet::with_capacity(self.point_count);
        seen.insert(point);
        let mut stack = vec![point];
        let gens = self.group.generator_indices();
        while let Some(p) = stack.pop() {
            for &s in gens {
                let q = self.act(s, p);
                if !seen.put(q) {
                    stack.push(q);
                }
            }
        }
        Ok(seen.ones().collect())
    }

    /// Orbit id per point, with ids numbered by smallest member.
    pub fn orbit_ids(&self) -> (Vec<usize>, usize) {
        let n = self.point_count;
        let mut id = vec![usize::MAX; n];
        let mut count = 0;
        let gens = self.group.generator_indices();
        let mut stack = Vec::new();
        for start in 0..n {
            if id[start] != usize::MAX {
                continue;
            }
            id[start] = count;
            stack.push(start);
            while let Some(p) = stack.pop() {
                for &s in gens {
                    let q = self.act(s, p);
                    if id[q] == usize::MAX {
                        id[q] = count;
                        stack.push(q);
                    }
                }
            }
            count += 1;
        }
        (id, count)
    }

    /// All orbits, each sorted, ordered by smallest member.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let (id, count) = self.orbit_ids();
        let mut out = vec![Vec::new(); count];
        for (p, &o) in id.iter().enumerate() {
            out[o].push(p);
        }
        out
    }

    pub fn stabilizer(&self, point: usize) -> Result<Subgroup> {
        self.check_point(point)?;
        let members: Vec<usize> = (0..self.group.order()).filter(|&g| self.act(g, point) == point).collect();
        Ok(subgroup_unchecked(&self.group, &members))
    }

    /// Elements acting as the identity permutation.
    pub fn kernel(&self) -> Subgroup {
        let members: Vec<usize> = (0..self.group.order())
            .filter(|&g| self.image(g).iter().enumerate().all(|(i, &x)| i as u32 == x))
            .collect();
        subgroup_unchecked(&self.group, &members)
    }

    pub fn is_faithful(&self) -> bool {
        self.kernel().is_trivial()
    }

    pub fn properties(&self) -> ActionProperties {
        let transitive = self.point_count > 0 && self.orbit(0).map(|o| o.len() == self.point_count).unwrap_or(false);
        let faithful = self.is_faithful();
        let regular = transitive && faithful && self.group.order() == self.point_count;
        ActionProperties { transitive, regular, faithful }
    }

    /// Number of points fixed by every element of `sub`.
    pub fn fixed_point_count(&self, sub: &Subgroup) -> usize {
        let gens = sub.generators(&self.group);
        (0..self.point_count).filter(|&i| gens.iter().all(|&g| self.act(g, i) == i)).count()
    }
}

fn subgroup_unchecked(group: &FiniteGroup, members: &[usize]) -> Subgroup {
    Subgroup::from_members(group, members).expect("stabilizers and kernels are subgroups")
}

/// Right cosets `H x` of `sub`, labelled by their minimal element index.
#[derive(Debug, Clone)]
pub struct CosetDecomposition {
    /// Coset index of every group element.
    pub coset_of: Vec<usize>,
    /// Minimal element index in each coset, ascending.
    pub representatives: Vec<usize>,
}

pub fn right_cosets(group: &FiniteGroup, sub: &Subgroup) -> Result<CosetDecomposition> {
    sub.check_in(group)?;
    let mut coset_of = vec![usize::MAX; group.order()];
    let mut representatives = Vec::with_capacity(group.order() / sub.order());
    for x in 0..group.order() {
        if coset_of[x] != usize::MAX {
            continue;
        }
        let c = representatives.len();
        representatives.push(x);
        for &h in sub.members() {
            coset_of[group.mul(h, x)] = c;
        }
    }
    Ok(CosetDecomposition { coset_of, representatives })
}

/// The transitive action of `group` on the right cosets of `sub`.
pub fn coset_space(group: &Arc<FiniteGroup>, sub: &Subgroup) -> Result<GroupAction> {
    let cosets = right_cosets(group, sub)?;
    let n = cosets.representatives.len();
    let mut images = Vec::with_capacity(group.order() * n);
    for g in 0..group.order() {
        let ginv = group.inv(g);
        for &x in &cosets.representatives {
            images.push(cosets.coset_of[group.mul(x, ginv)] as u32);
        }
    }
    Ok(GroupAction::from_raw(group.clone(), n, images))
}

/// The regular action, i.e. the coset space of the trivial subgroup. Point
/// `r` corresponds to element `r` and `g` sends it to `r g⁻¹`.
pub fn regular_action(group: &Arc<FiniteGroup>) -> GroupAction {
    coset_space(group, &Subgroup::trivial(group)).expect("trivial subgroup belongs to its group")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Builtin;
    use crate::subgroup::core;

    fn g(b: Builtin) -> Arc<FiniteGroup> {
        Arc::new(b.build().unwrap())
    }

    #[test]
    fn orbit_examples() {
        let c4 = GroupAction::natural(g(Builtin::Cyclic(4)));
        assert_eq!(c4.orbit(0).unwrap(), vec![0, 1, 2, 3]);
        let triv = GroupAction::natural(Arc::new(crate::group::closure(3, &[]).unwrap()));
        assert_eq!(triv.orbit(1).unwrap(), vec![1]);
        assert_eq!(triv.orbit(3).unwrap_err(), Error::PointOutOfRange { point: 3, count: 3 });
    }

    #[test]
    fn diagonal_pairs_orbit_under_s3() {
        // pairs (a, b) encoded as 3a + b; brute force over all 6 elements
        let s3 = g(Builtin::Symmetric(3));
        let pairs = GroupAction::from_fn(s3.clone(), 9, |e, p| {
            let perm = s3.element(e);
            3 * perm.apply(p / 3) + perm.apply(p % 3)
        })
        .unwrap();
        let mut images: Vec<usize> = (0..6).map(|e| pairs.act(e, 0)).collect();
        images.sort();
        images.dedup();
        assert_eq!(images, vec![0, 4, 8]);
        assert_eq!(pairs.orbit(0).unwrap(), vec![0, 4, 8]);
    }

    #[test]
    fn stabilizer_examples() {
        let s3 = g(Builtin::Symmetric(3));
        let nat = GroupAction::natural(s3.clone());
        let st = nat.stabilizer(2).unwrap();
        assert_eq!(st.order(), 2);
        let t = st.members()[1];
        assert_eq!(s3.element(t).images(), &[1, 0, 2]);

        let c4 = g(Builtin::Cyclic(4));
        let reg = regular_action(&c4);
        for p in 0..4 {
            assert!(reg.stabilizer(p).unwrap().is_trivial());
        }

        let a5 = g(Builtin::Alternating(5));
        let st = GroupAction::natural(a5).stabilizer(4).unwrap();
        assert_eq!(st.order(), 12);
    }

    #[test]
    fn kernel_examples() {
        let s3 = g(Builtin::Symmetric(3));
        assert!(GroupAction::natural(s3).kernel().is_trivial());

        // C4 on 2 points via g -> g mod 2
        let c4 = g(Builtin::Cyclic(4));
        let mod2 = GroupAction::from_generator_images(c4.clone(), 2, &[vec![1, 0]]).unwrap();
        assert_eq!(mod2.kernel().order(), 2);

        let one = GroupAction::trivial(c4.clone(), 1);
        assert_eq!(one.kernel().order(), 4);
    }

    #[test]
    fn bad_generator_images_rejected() {
        // a transposition image for a 3-cycle generator is not a homomorphism
        let c3 = g(Builtin::Cyclic(3));
        let err = GroupAction::from_generator_images(c3, 2, &[vec![1, 0]]).unwrap_err();
        assert_eq!(err, Error::NotAHomomorphism);
    }

    #[test]
    fn coset_space_examples() {
        let a5 = g(Builtin::Alternating(5));
        let reg = coset_space(&a5, &Subgroup::trivial(&a5)).unwrap();
        assert!(reg.properties().regular);
        assert_eq!(reg.point_count(), 60);
        let one = coset_space(&a5, &Subgroup::whole(&a5)).unwrap();
        assert_eq!(one.point_count(), 1);

        let a4 = GroupAction::natural(a5.clone()).stabilizer(4).unwrap();
        let cs = coset_space(&a5, &a4).unwrap();
        assert_eq!(cs.point_count(), 5);
        assert!(cs.properties().transitive);
        assert!(cs.is_homomorphism(true));
        assert_eq!(cs.stabilizer(0).unwrap(), a4);
        assert!(core(&a5, &a4).unwrap().is_trivial());
        assert!(cs.is_faithful());
    }

    #[test]
    fn properties_examples() {
        let c4 = GroupAction::natural(g(Builtin::Cyclic(4)));
        assert_eq!(c4.properties(), ActionProperties { transitive: true, regular: true, faithful: true });
        let s3 = GroupAction::natural(g(Builtin::Symmetric(3)));
        assert_eq!(s3.properties(), ActionProperties { transitive: true, regular: false, faithful: true });
        let c2 = GroupAction::trivial(g(Builtin::Cyclic(2)), 3);
        assert_eq!(c2.properties(), ActionProperties { transitive: false, regular: false, faithful: false });
    }
}
