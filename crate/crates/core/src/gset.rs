//! Explicit G-sets: unions, Cartesian powers with the diagonal action, and
//! brute-force orbit decomposition. This is the ground-truth path that the
//! mark-based arithmetic in [`crate::burnside`] is checked against.


use crate::burnside::{GSetExpr, MarkVector};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::action::GroupAction;
use crate::lattice::SubgroupLattice;
use crate::subgroup::Subgroup;

/// A materialized G-set, optionally a `D`-fold power of a base set whose
/// points carry tuple labels in mixed-radix encoding.
#[derive(Debug, Clone)]
pub struct ExplicitGSet {
    pub action: GroupAction,
    radix: Option<(usize, usize)>,
}

impl ExplicitGSet {
    pub fn new(action: GroupAction) -> Self {
        Self { action, radix: None }
    }

    /// Component tuple of a point of a diagonal power (first component most significant).
    pub fn label(&self, point: usize) -> Option<Vec<usize>> {
        let (base, d) = self.radix?;
        let mut out = vec![0; d];
        let mut x = point;
        for slot in out.iter_mut().rev() {
            *slot = x % base;
            x /= base;
        }
        Some(out)
    }

    /// Point index of a tuple.
    pub fn encode(&self, tuple: &[usize]) -> Option<usize> {
        let (base, d) = self.radix?;
        if tuple.len() != d || tuple.iter().any(|&t| t >= base) {
            return None;
        }
        Some(tuple.iter().fold(0, |acc, &t| acc * base + t))
    }
}

pub fn disjoint_union(a: &GroupAction, b: &GroupAction) -> Result<GroupAction> {
    if !a.same_group(b) {
        return Err(Error::GroupMismatch);
    }
    let group = a.group().clone();
    let (na, nb) = (a.point_count(), b.point_count());
    let mut images = Vec::with_capacity(group.order() * (na + nb));
    for g in 0..group.order() {
        images.extend_from_slice(a.image(g));
        images.extend(b.image(g).iter().map(|&x| x + na as u32));
    }
    Ok(GroupAction::from_raw(group, na + nb, images))
}

fn check_size(points: u128, order: usize, caps: &Caps) -> Result<()> {
    // the per-element image table must also stay addressable
    if points > caps.explicit_points as u128 || points * order as u128 > u32::MAX as u128 {
        return Err(Error::SizeCapExceeded { points, cap: caps.explicit_points });
    }
    Ok(())
}

/// `a × b` with `g·(x, y) = (g·x, g·y)`; point `(x, y)` has index `x·|b| + y`.
pub fn cartesian_product(a: &GroupAction, b: &GroupAction, caps: &Caps) -> Result<GroupAction> {
    if !a.same_group(b) {
        return Err(Error::GroupMismatch);
    }
    let group = a.group().clone();
    let (na, nb) = (a.point_count(), b.point_count());
    check_size(na as u128 * nb as u128, group.order(), caps)?;
    let mut images = Vec::with_capacity(group.order() * na * nb);
    for g in 0..group.order() {
        let (ia, ib) = (a.image(g), b.image(g));
        for &x in ia {
            for &y in ib {
                images.push(x * nb as u32 + y);
            }
        }
    }
    Ok(GroupAction::from_raw(group, na * nb, images))
}

/// The `d`-fold Cartesian power with the diagonal action. `d = 0` gives the
/// one-point set.
pub fn diagonal_power(a: &GroupAction, d: usize, caps: &Caps) -> Result<ExplicitGSet> {
    let n = a.point_count();
    let points = (n as u128).checked_pow(d as u32).ok_or(Error::SizeCapExceeded { points: u128::MAX, cap: caps.explicit_points })?;
    check_size(points, a.group().order(), caps)?;
    let mut acc = GroupAction::trivial(a.group().clone(), 1);
    for _ in 0..d {
        acc = cartesian_product(&acc, a, caps)?;
    }
    Ok(ExplicitGSet { action: acc, radix: Some((n, d)) })
}

/// The action restricted to a union of orbits.
pub fn restrict(a: &GroupAction, points: &[usize]) -> Result<GroupAction> {
    let mut local = vec![u32::MAX; a.point_count()];
    for (k, &p) in points.iter().enumerate() {
        if p >= a.point_count() {
            return Err(Error::PointOutOfRange { point: p, count: a.point_count() });
        }
        local[p] = k as u32;
    }
    let group = a.group().clone();
    let mut images = Vec::with_capacity(group.order() * points.len());
    for g in 0..group.order() {
        for &p in points {
            let q = local[a.act(g, p)];
            if q == u32::MAX {
                return Err(Error::ShapeMismatch("restriction to a set that is not G-invariant".into()));
            }
            images.push(q);
        }
    }
    Ok(GroupAction::from_raw(group, points.len(), images))
}

/// Per orbit: its smallest point, size and stabilizer class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitInfo {
    pub representative: usize,
    pub size: usize,
    pub class: usize,
}

pub fn orbit_classes(a: &GroupAction, lattice: &SubgroupLattice, exec: Exec) -> Result<Vec<OrbitInfo>> {
    if !a.group().same_as(lattice.group()) {
        return Err(Error::GroupMismatch);
    }
    let orbits = a.orbits();
    let group = a.group();
    exec.map(&orbits, |orbit| {
        let rep = orbit[0];
        let members: Vec<usize> = (0..group.order()).filter(|&g| a.act(g, rep) == rep).collect();
        let stab = Subgroup::from_members(group, &members)?;
        let class = lattice.class_of(&stab).ok_or(Error::StabilizerNotInLattice)?;
        Ok(OrbitInfo { representative: rep, size: orbit.len(), class })
    })
    .into_iter()
    .collect()
}

/// Multiplicity of each subgroup class among the orbit stabilizers.
pub fn orbit_decompose(a: &GroupAction, lattice: &SubgroupLattice) -> Result<GSetExpr> {
    orbit_decompose_with(a, lattice, Exec::default())
}

pub fn orbit_decompose_with(a: &GroupAction, lattice: &SubgroupLattice, exec: Exec) -> Result<GSetExpr> {
    let mut p = GSetExpr::zero(lattice.len());
    for info in orbit_classes(a, lattice, exec)? {
        p.0[info.class] += 1;
    }
    Ok(p)
}

/// Marks by direct fixed-point counting.
pub fn explicit_mark_vector(a: &GroupAction, lattice: &SubgroupLattice) -> Result<MarkVector> {
    if !a.group().same_as(lattice.group()) {
        return Err(Error::GroupMismatch);
    }
    let n = lattice.len();
    Ok(MarkVector(Exec::default().map_range(n, |j| a.fixed_point_count(lattice.representative(j)) as i128)))
}

pub fn coset_action_of_class(lattice: &SubgroupLattice, i: usize) -> Result<GroupAction> {
    lattice.check_class(i)?;
    crate::action::coset_space(lattice.group(), lattice.representative(i))
}

const MAX_SET_PARTITION_SIZE: usize = 20;

/// Stirling number of the second kind: partitions of `n` items into `k` blocks.
pub fn stirling2(n: usize, k: usize) -> Result<u64> {
    if n > MAX_SET_PARTITION_SIZE || k > n {
        return Err(Error::RangeError(format!("stirling2({n}, {k}) needs 0 ≤ k ≤ n ≤ {MAX_SET_PARTITION_SIZE}")));
    }
    let mut row = vec![1u64];
    for m in 1..=n {
        let mut next = vec![0u64; m + 1];
        for j in 1..=m {
            let stay = if j < m { j as u64 * row[j] } else { 0 };
            next[j] = stay + row[j - 1];
        }
        row = next;
    }
    Ok(row[k])
}

/// Bell number: all partitions of `n` items.
pub fn bell(n: usize) -> Result<u64> {
    if n > MAX_SET_PARTITION_SIZE {
        return Err(Error::RangeError(format!("bell({n}) needs n ≤ {MAX_SET_PARTITION_SIZE}")));
    }
    (0..=n).map(|k| stirling2(n, k)).sum()
}
