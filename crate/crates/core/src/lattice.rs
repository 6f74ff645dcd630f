//! Subgroup enumeration and conjugacy classes of subgroups.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::group::FiniteGroup;
use crate::subgroup::{normalizer, Subgroup};

/// All subgroups of `group`, sorted by `(order, members)`.
///
/// Layered generator extension: start with every cyclic subgroup, then close
/// `⟨H, x⟩` for each newly found `H` and one `x` per right coset of `H`, until
/// no new subgroup appears.
pub fn all_subgroups(group: &FiniteGroup, caps: &Caps) -> Result<Vec<Subgroup>> {
    all_subgroups_with(group, caps, Exec::default())
}

pub fn all_subgroups_with(group: &FiniteGroup, caps: &Caps, exec: Exec) -> Result<Vec<Subgroup>> {
    let n = group.order();
    if n > caps.lattice {
        return Err(Error::LatticeCapExceeded { order: n, cap: caps.lattice });
    }
    let mut index: HashMap<FixedBitSet, usize> = HashMap::new();
    let mut found: Vec<(Subgroup, Vec<usize>)> = Vec::new();
    let mut layer = Vec::new();
    for x in 0..n {
        let h = Subgroup::generated_by(group, &[x]);
        if !index.contains_key(h.mask()) {
            index.insert(h.mask().clone(), found.len());
            layer.push(found.len());
            let gens = if x == 0 { vec![] } else { vec![x] };
            found.push((h, gens));
        }
    }
    while !layer.is_empty() {
        let candidates = exec.map(&layer, |&k| {
            let (h, gens) = &found[k];
            let mut covered = h.mask().clone();
            let mut out = Vec::new();
            for x in 0..n {
                if covered.contains(x) {
                    continue;
                }
                for &m in h.members() {
                    covered.insert(group.mul(m, x));
                }
                let ext = h.extended_by(group, x, gens);
                let mut ext_gens = gens.clone();
                ext_gens.push(x);
                out.push((ext, ext_gens));
            }
            out
        });
        layer = Vec::new();
        for (sub, gens) in candidates.into_iter().flatten() {
            if !index.contains_key(sub.mask()) {
                index.insert(sub.mask().clone(), found.len());
                layer.push(found.len());
                found.push((sub, gens));
            }
        }
    }
    let mut subs: Vec<Subgroup> = found.into_iter().map(|(s, _)| s).collect();
    subs.sort_by(|a, b| (a.order(), a.members()).cmp(&(b.order(), b.members())));
    Ok(subs)
}

/// A conjugacy class `[H] = {g H g⁻¹}` of subgroups.
#[derive(Debug, Clone)]
pub struct ConjugacyClass {
    /// The member with the lexicographically smallest sorted member list.
    pub representative: Subgroup,
    /// All conjugates, sorted by member list; `members[0] == representative`.
    pub members: Vec<Subgroup>,
    pub sub_order: usize,
}

impl ConjugacyClass {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// All subgroups of a group, grouped into conjugacy classes ordered by
/// ascending subgroup order (ties broken by representative), which is a
/// topological order of the class poset.
#[derive(Debug, Clone)]
pub struct SubgroupLattice {
    group: Arc<FiniteGroup>,
    classes: Vec<ConjugacyClass>,
    lookup: HashMap<FixedBitSet, usize>,
    leq: Vec<FixedBitSet>,
    labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeJson {
    pub classes: Vec<ClassJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassJson {
    pub order: usize,
    pub size: usize,
    pub representative: Vec<usize>,
}

impl SubgroupLattice {
    pub fn build(group: &Arc<FiniteGroup>, caps: &Caps) -> Result<Self> {
        Self::build_with(group, caps, Exec::default())
    }

    pub fn build_with(group: &Arc<FiniteGroup>, caps: &Caps, exec: Exec) -> Result<Self> {
        let subs = all_subgroups_with(group, caps, exec)?;
        conjugacy_classes_with(group, subs, exec)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn classes(&self) -> &[ConjugacyClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class(&self, i: usize) -> &ConjugacyClass {
        &self.classes[i]
    }

    pub fn representative(&self, i: usize) -> &Subgroup {
        &self.classes[i].representative
    }

    pub fn subgroup_count(&self) -> usize {
        self.classes.iter().map(|c| c.members.len()).sum()
    }

    /// Class index of an arbitrary subgroup of the group.
    pub fn class_of(&self, sub: &Subgroup) -> Option<usize> {
        self.lookup.get(sub.mask()).copied()
    }

    /// `[H_i] ≤ [H_j]`: some conjugate of class `i` lies inside class `j`'s representative.
    pub fn class_leq(&self, i: usize, j: usize) -> bool {
        self.leq[i].contains(j)
    }

    pub fn check_class(&self, i: usize) -> Result<()> {
        if i >= self.classes.len() {
            return Err(Error::ClassOutOfRange { index: i, count: self.classes.len() });
        }
        Ok(())
    }

    /// Short structural names (`e`, `C2`, `K4`, `S3`, `D10`, `A4`, …), made
    /// unique with letter suffixes when several classes share a name.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// Class index by label or by decimal index.
    pub fn find_class(&self, key: &str) -> Option<usize> {
        if let Some(i) = self.labels.iter().position(|l| l == key) {
            return Some(i);
        }
        key.parse::<usize>().ok().filter(|&i| i < self.len())
    }

    pub fn to_json(&self) -> LatticeJson {
        LatticeJson {
            classes: self
                .classes
                .iter()
                .map(|c| ClassJson {
                    order: c.sub_order,
                    size: c.members.len(),
                    representative: c.representative.members().to_vec(),
                })
                .collect(),
        }
    }
}

pub fn conjugacy_classes(group: &Arc<FiniteGroup>, subs: Vec<Subgroup>) -> Result<SubgroupLattice> {
    conjugacy_classes_with(group, subs, Exec::default())
}

pub fn conjugacy_classes_with(group: &Arc<FiniteGroup>, subs: Vec<Subgroup>, exec: Exec) -> Result<SubgroupLattice> {
    let mut by_mask: HashMap<FixedBitSet, usize> = HashMap::with_capacity(subs.len());
    for (k, s) in subs.iter().enumerate() {
        s.check_in(group)?;
        by_mask.insert(s.mask().clone(), k);
    }
    // Conjugates of each subgroup as sorted subgroup indices.
    let conjugates: Vec<Result<Vec<usize>>> = exec.map(&subs, |s| {
        let mut set = BTreeSet::new();
        for g in 0..group.order() {
            let c = s.conjugate(group, g);
            match by_mask.get(c.mask()) {
                Some(&k) => {
                    set.insert(k);
                }
                None => return Err(Error::Internal("subgroup list is not closed under conjugation".into())),
            }
        }
        Ok(set.into_iter().collect())
    });
    let mut assigned = vec![false; subs.len()];
    let mut raw: Vec<Vec<usize>> = Vec::new();
    for (k, conj) in conjugates.into_iter().enumerate() {
        let conj = conj?;
        if assigned[k] {
            continue;
        }
        for &c in &conj {
            assigned[c] = true;
        }
        raw.push(conj);
    }
    let mut classes: Vec<ConjugacyClass> = raw
        .into_iter()
        .map(|idx| {
            let mut members: Vec<Subgroup> = idx.into_iter().map(|k| subs[k].clone()).collect();
            members.sort_by(|a, b| a.members().cmp(b.members()));
            ConjugacyClass { representative: members[0].clone(), sub_order: members[0].order(), members }
        })
        .collect();
    classes.sort_by(|a, b| {
        (a.sub_order, a.representative.members()).cmp(&(b.sub_order, b.representative.members()))
    });

    let mut lookup = HashMap::with_capacity(subs.len());
    for (i, c) in classes.iter().enumerate() {
        for m in &c.members {
            lookup.insert(m.mask().clone(), i);
        }
    }
    let count = classes.len();
    let leq: Vec<FixedBitSet> = exec.map_range(count, |i| {
        let mut row = FixedBitSet::with_capacity(count);
        for j in 0..count {
            let rep = &classes[j].representative;
            if classes[i].sub_order <= rep.order()
                && rep.order() % classes[i].sub_order == 0
                && classes[i].members.iter().any(|m| m.is_subset_of(rep))
            {
                row.insert(j);
            }
        }
        row
    });
    let labels = class_labels(group, &classes);
    Ok(SubgroupLattice { group: group.clone(), classes, lookup, leq, labels })
}

fn class_labels(group: &FiniteGroup, classes: &[ConjugacyClass]) -> Vec<String> {
    let base: Vec<String> = classes.iter().map(|c| describe_subgroup(group, &c.representative)).collect();
    let mut out = base.clone();
    for (i, name) in base.iter().enumerate() {
        let same: Vec<usize> = (0..base.len()).filter(|&j| &base[j] == name).collect();
        if same.len() > 1 {
            let pos = same.iter().position(|&j| j == i).unwrap();
            out[i] = format!("{name}{}", suffix(pos));
        }
    }
    out
}

fn suffix(mut k: usize) -> String {
    let mut s = Vec::new();
    loop {
        s.push(b'a' + (k % 26) as u8);
        k /= 26;
        if k == 0 {
            break;
        }
        k -= 1;
    }
    s.reverse();
    String::from_utf8(s).unwrap()
}

/// Best-effort isomorphism-type name for small subgroups; falls back to
/// `Ab<n>` / `H<n>` when no cheap test identifies the type.
pub fn describe_subgroup(group: &FiniteGroup, sub: &Subgroup) -> String {
    let n = sub.order();
    if n == 1 {
        return "e".into();
    }
    let orders: Vec<usize> = sub.members().iter().map(|&x| group.element_order(x)).collect();
    let order_set: BTreeSet<usize> = orders.iter().copied().collect();
    if orders.contains(&n) {
        return format!("C{n}");
    }
    let gens = sub.generators(group);
    let abelian = gens.iter().all(|&a| gens.iter().all(|&b| group.mul(a, b) == group.mul(b, a)));
    if abelian {
        if order_set.iter().all(|&o| o <= 2) {
            let k = n.trailing_zeros();
            return if k == 2 { "K4".into() } else { format!("C2^{k}") };
        }
        return format!("Ab{n}");
    }
    if n % 2 == 0 {
        let m = n / 2;
        let dihedral = sub.members().iter().any(|&r| {
            if group.element_order(r) != m {
                return false;
            }
            let rot = Subgroup::generated_by(group, &[r]);
            sub.members().iter().filter(|&&x| !rot.contains(x)).all(|&x| group.element_order(x) == 2)
        });
        if dihedral {
            return if n == 6 { "S3".into() } else { format!("D{n}") };
        }
    }
    let set = |v: &[usize]| v.iter().copied().collect::<BTreeSet<usize>>();
    match n {
        8 if orders.iter().filter(|&&o| o == 4).count() == 6 => "Q8".into(),
        12 if order_set == set(&[1, 2, 3]) => "A4".into(),
        24 if order_set == set(&[1, 2, 3, 4]) => "S4".into(),
        60 if order_set == set(&[1, 2, 3, 5]) => "A5".into(),
        120 if order_set == set(&[1, 2, 3, 4, 5, 6]) => "S5".into(),
        _ => format!("H{n}"),
    }
}

/// `|N_G(H)|` for a class representative.
pub fn normalizer_order(lattice: &SubgroupLattice, i: usize) -> usize {
    normalizer(lattice.group(), lattice.representative(i)).expect("representative belongs to group").order()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Builtin;

    fn lattice(b: Builtin) -> SubgroupLattice {
        let g = Arc::new(b.build().unwrap());
        SubgroupLattice::build(&g, &Caps::default()).unwrap()
    }

    #[test]
    fn cyclic_four() {
        let g = Builtin::Cyclic(4).build().unwrap();
        let subs = all_subgroups(&g, &Caps::default()).unwrap();
        let orders: Vec<usize> = subs.iter().map(|s| s.order()).collect();
        assert_eq!(orders, vec![1, 2, 4]);
    }

    #[test]
    fn s3_subgroups_and_classes() {
        let g = Builtin::Symmetric(3).build().unwrap();
        let subs = all_subgroups(&g, &Caps::default()).unwrap();
        let orders: Vec<usize> = subs.iter().map(|s| s.order()).collect();
        assert_eq!(orders, vec![1, 2, 2, 2, 3, 6]);
        let l = lattice(Builtin::Symmetric(3));
        let sizes: Vec<(usize, usize)> = l.classes().iter().map(|c| (c.sub_order, c.size())).collect();
        assert_eq!(sizes, vec![(1, 1), (2, 3), (3, 1), (6, 1)]);
        assert_eq!(l.labels(), &["e", "C2", "C3", "S3"]);
    }

    #[test]
    fn a5_classes_match_known_types() {
        let l = lattice(Builtin::Alternating(5));
        assert_eq!(l.len(), 9);
        assert_eq!(l.labels(), &["e", "C2", "C3", "K4", "C5", "S3", "D10", "A4", "A5"]);
        assert_eq!(l.subgroup_count(), 59);
        let c5 = l.find_class("C5").unwrap();
        let c3 = l.find_class("C3").unwrap();
        let a4 = l.find_class("A4").unwrap();
        assert!(!l.class_leq(c5, a4));
        assert!(l.class_leq(c3, a4));
        for j in 0..l.len() {
            assert!(l.class_leq(0, j));
        }
    }

    #[test]
    fn abelian_classes_are_singletons() {
        for b in [Builtin::Cyclic(6), Builtin::Cyclic(8)] {
            let l = lattice(b);
            assert!(l.classes().iter().all(|c| c.size() == 1));
        }
    }

    #[test]
    fn duplicate_names_get_suffixes() {
        let l = lattice(Builtin::Symmetric(4));
        assert_eq!(l.len(), 11);
        let labels = l.labels();
        assert!(labels.contains(&"C2a".to_string()) && labels.contains(&"C2b".to_string()));
        assert!(labels.contains(&"K4a".to_string()) && labels.contains(&"K4b".to_string()));
        assert_eq!(labels.last().unwrap(), "S4");
        let uniq: BTreeSet<&String> = labels.iter().collect();
        assert_eq!(uniq.len(), labels.len());
    }

    #[test]
    fn lattice_cap() {
        let g = Builtin::Symmetric(5).build().unwrap();
        let caps = Caps { lattice: 100, ..Caps::default() };
        assert_eq!(all_subgroups(&g, &caps).unwrap_err(), Error::LatticeCapExceeded { order: 120, cap: 100 });
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let g = Arc::new(Builtin::Symmetric(4).build().unwrap());
        let a = SubgroupLattice::build_with(&g, &Caps::default(), Exec::Sequential).unwrap();
        let b = SubgroupLattice::build_with(&g, &Caps::default(), Exec::Parallel).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.labels(), b.labels());
    }

    #[test]
    fn suffixes() {
        assert_eq!(suffix(0), "a");
        assert_eq!(suffix(25), "z");
        assert_eq!(suffix(26), "aa");
    }
}
