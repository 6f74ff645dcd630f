//! Finite permutation groups enumerated from generators.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Groups up to this order get a dense multiplication table.
const MULT_TABLE_MAX_ORDER: usize = 2_048;

/// On-disk description of a group: `{"name": .., "degree": n, "generators": [[..], ..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub degree: usize,
    pub generators: Vec<Vec<u32>>,
}

impl GroupSpec {
    pub fn build(&self, caps: &Caps) -> Result<FiniteGroup> {
        let gens = self
            .generators
            .iter()
            .map(|g| Permutation::new(g.clone()))
            .collect::<Result<Vec<_>>>()?;
        let mut group = closure_with_cap(self.degree, &gens, caps.order)?;
        group.name = self.name.clone();
        Ok(group)
    }
}

/// A finite permutation group: generators plus the enumerated element list.
///
/// Element 0 is the identity. Elements are listed in breadth-first discovery
/// order from the identity, each BFS layer sorted lexicographically by images,
/// so indices are reproducible across runs.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    name: Option<String>,
    degree: usize,
    generators: Vec<Permutation>,
    generator_indices: Vec<usize>,
    elements: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
    inverse: Vec<usize>,
    // element k = generator[word[k].1] * element[word[k].0], for k > 0
    words: Vec<(usize, usize)>,
    mult: Option<Vec<u32>>,
}

pub fn closure(degree: usize, generators: &[Permutation]) -> Result<FiniteGroup> {
    closure_with_cap(degree, generators, Caps::default().order)
}

pub fn closure_with_cap(degree: usize, generators: &[Permutation], cap: usize) -> Result<FiniteGroup> {
    if degree == 0 {
        return Err(Error::ZeroDegree);
    }
    for g in generators {
        if g.degree() != degree {
            return Err(Error::DegreeMismatch { left: degree, right: g.degree() });
        }
    }
    let identity = Permutation::identity(degree);
    let mut elements = vec![identity.clone()];
    let mut index = HashMap::from([(identity, 0usize)]);
    let mut words = vec![(0usize, usize::MAX)];
    let mut layer = vec![0usize];
    while !layer.is_empty() {
        let mut found: BTreeMap<Permutation, (usize, usize)> = BTreeMap::new();
        for &e in &layer {
            for (s, g) in generators.iter().enumerate() {
                let p = g.compose_unchecked(&elements[e]);
                if !index.contains_key(&p) {
                    found.entry(p).or_insert((e, s));
                }
            }
        }
        layer = Vec::with_capacity(found.len());
        for (p, word) in found {
            if elements.len() >= cap {
                return Err(Error::OrderCapExceeded { cap });
            }
            layer.push(elements.len());
            index.insert(p.clone(), elements.len());
            elements.push(p);
            words.push(word);
        }
    }

    let inverse = elements.iter().map(|p| index[&p.inverse()]).collect();
    let generator_indices = generators.iter().map(|g| index[g]).collect();
    let mut group = FiniteGroup {
        name: None,
        degree,
        generators: generators.to_vec(),
        generator_indices,
        elements,
        index,
        inverse,
        words,
        mult: None,
    };
    if group.order() <= MULT_TABLE_MAX_ORDER {
        let n = group.order();
        let mut table = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = group.mul_slow(a, b) as u32;
            }
        }
        group.mult = Some(table);
    }
    Ok(group)
}

impl FiniteGroup {
    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn into_arc(self) -> Arc<Self> {
        Arc::new(self)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    /// Element indices of the generators, in generator order.
    pub fn generator_indices(&self) -> &[usize] {
        &self.generator_indices
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn element(&self, k: usize) -> &Permutation {
        &self.elements[k]
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn has_mult_table(&self) -> bool {
        self.mult.is_some()
    }

    /// Index of `elements[a] ∘ elements[b]`.
    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.mult {
            Some(t) => t[a * self.order() + b] as usize,
            None => self.mul_slow(a, b),
        }
    }

    fn mul_slow(&self, a: usize, b: usize) -> usize {
        self.index[&self.elements[a].compose_unchecked(&self.elements[b])]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// `g h g⁻¹`.
    #[inline]
    pub fn conj(&self, g: usize, h: usize) -> usize {
        self.mul(self.mul(g, h), self.inverse[g])
    }

    pub fn is_abelian(&self) -> bool {
        let gens = &self.generator_indices;
        gens.iter().all(|&a| gens.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut k = 1;
        let mut x = a;
        while x != 0 {
            x = self.mul(a, x);
            k += 1;
        }
        k
    }

    /// Shortest-word decomposition used to extend generator images to
    /// every element: element `k` equals `generator[s] ∘ element[parent]`.
    pub(crate) fn word(&self, k: usize) -> (usize, usize) {
        self.words[k]
    }

    pub fn same_as(&self, other: &FiniteGroup) -> bool {
        std::ptr::eq(self, other) || (self.degree == other.degree && self.elements == other.elements)
    }

    pub fn to_spec(&self) -> GroupSpec {
        GroupSpec {
            name: self.name.clone(),
            degree: self.degree,
            generators: self.generators.iter().map(|g| g.images().to_vec()).collect(),
        }
    }
}

/// Standard permutation groups, acting on `{0, …, n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Cyclic(usize),
    Dihedral(usize),
    Symmetric(usize),
    Alternating(usize),
}

impl std::str::FromStr for Builtin {
    type Err = Error;

    /// Parses `cyclic:n`, `dihedral:n`, `symmetric:n` or `alternating:n`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, n) = s
            .split_once(':')
            .ok_or_else(|| Error::RangeError(format!("expected <kind>:<n>, got {s:?}")))?;
        let n: usize = n.trim().parse().map_err(|_| Error::RangeError(format!("bad degree in {s:?}")))?;
        if n == 0 {
            return Err(Error::ZeroDegree);
        }
        match kind.trim() {
            "cyclic" => Ok(Builtin::Cyclic(n)),
            "dihedral" => Ok(Builtin::Dihedral(n)),
            "symmetric" => Ok(Builtin::Symmetric(n)),
            "alternating" => Ok(Builtin::Alternating(n)),
            other => Err(Error::RangeError(format!("unknown builtin group {other:?}"))),
        }
    }
}

impl Builtin {
    pub fn name(&self) -> String {
        match *self {
            Builtin::Cyclic(n) => format!("C{n}"),
            Builtin::Dihedral(n) => format!("D{n}"),
            Builtin::Symmetric(n) => format!("S{n}"),
            Builtin::Alternating(n) => format!("A{n}"),
        }
    }

    pub fn spec(&self) -> GroupSpec {
        let rotation = |n: usize| -> Vec<u32> { (0..n).map(|i| ((i + 1) % n) as u32).collect() };
        let (degree, generators) = match *self {
            Builtin::Cyclic(n) => (n, if n > 1 { vec![rotation(n)] } else { vec![] }),
            Builtin::Dihedral(n) => {
                let reflection: Vec<u32> = (0..n).map(|i| ((n - i) % n) as u32).collect();
                let mut gens = vec![];
                if n > 1 {
                    gens.push(rotation(n));
                }
                if n > 2 {
                    gens.push(reflection);
                }
                (n, gens)
            }
            Builtin::Symmetric(n) => {
                let mut gens = vec![];
                if n > 1 {
                    let mut swap: Vec<u32> = (0..n as u32).collect();
                    swap.swap(0, 1);
                    gens.push(swap);
                }
                if n > 2 {
                    gens.push(rotation(n));
                }
                (n, gens)
            }
            Builtin::Alternating(n) => {
                let mut gens = vec![];
                if n > 2 {
                    let mut c3: Vec<u32> = (0..n as u32).collect();
                    c3[0] = 1;
                    c3[1] = 2;
                    c3[2] = 0;
                    gens.push(c3);
                }
                if n > 3 {
                    let long: Vec<u32> = if n % 2 == 1 {
                        rotation(n)
                    } else {
                        let mut v: Vec<u32> = (0..n as u32).collect();
                        for i in 1..n {
                            v[i] = (if i + 1 < n { i + 1 } else { 1 }) as u32;
                        }
                        v
                    };
                    gens.push(long);
                }
                (n, gens)
            }
        };
        GroupSpec { name: Some(self.name()), degree, generators }
    }

    pub fn build(&self) -> Result<FiniteGroup> {
        self.spec().build(&Caps::default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(cycles: &[&[usize]], n: usize) -> Permutation {
        Permutation::from_cycles(n, cycles).unwrap()
    }

    #[test]
    fn cyclic_from_three_cycle() {
        let g = closure(3, &[perm(&[&[0, 1, 2]], 3)]).unwrap();
        assert_eq!(g.order(), 3);
        assert!(g.element(0).is_identity());
    }

    #[test]
    fn a5_from_two_generators() {
        let g = closure(5, &[perm(&[&[0, 1, 2]], 5), perm(&[&[0, 1, 2, 3, 4]], 5)]).unwrap();
        assert_eq!(g.order(), 60);
    }

    #[test]
    fn empty_generators_give_trivial_group() {
        let g = closure(4, &[]).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.mul(0, 0), 0);
        assert_eq!(g.inv(0), 0);
    }

    #[test]
    fn order_cap_is_enforced() {
        let s5 = Builtin::Symmetric(5).spec();
        let err = s5.build(&Caps { order: 100, ..Caps::default() }).unwrap_err();
        assert_eq!(err, Error::OrderCapExceeded { cap: 100 });
        assert_eq!(closure(0, &[]).unwrap_err(), Error::ZeroDegree);
    }

    #[test]
    fn enumeration_is_deterministic_and_closed() {
        let a = Builtin::Symmetric(4).build().unwrap();
        let b = Builtin::Symmetric(4).build().unwrap();
        assert_eq!(a.elements(), b.elements());
        let n = a.order();
        for x in 0..n {
            assert_eq!(a.mul(x, a.inv(x)), 0);
            for y in 0..n {
                let p = a.element(x).compose(a.element(y)).unwrap();
                assert_eq!(a.index_of(&p), Some(a.mul(x, y)));
            }
        }
        for (k, g) in a.generators().iter().enumerate() {
            assert_eq!(a.element(a.generator_indices()[k]), g);
        }
        assert_eq!(24 % n, 0);
    }

    #[test]
    fn builtin_orders() {
        let orders = [
            ("cyclic:6", 6),
            ("dihedral:4", 8),
            ("dihedral:5", 10),
            ("symmetric:3", 6),
            ("symmetric:5", 120),
            ("alternating:4", 12),
            ("alternating:5", 60),
            ("alternating:6", 360),
            ("symmetric:1", 1),
        ];
        for (s, n) in orders {
            let b: Builtin = s.parse().unwrap();
            assert_eq!(b.build().unwrap().order(), n, "{s}");
        }
        assert!("foo:3".parse::<Builtin>().is_err());
        assert!("cyclic".parse::<Builtin>().is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let json = r#"{"name":"A5","degree":5,"generators":[[1,2,0,3,4],[1,2,3,4,0]]}"#;
        let spec: GroupSpec = serde_json::from_str(json).unwrap();
        let g = spec.build(&Caps::default()).unwrap();
        assert_eq!(g.order(), 60);
        assert_eq!(g.name(), Some("A5"));
        assert_eq!(serde_json::to_string(&g.to_spec()).unwrap(), json);
        assert!(serde_json::from_str::<GroupSpec>(r#"{"degree":3,"gens":[]}"#).is_err());
    }
}
