//! Marks, the table of marks, and Burnside-ring arithmetic on G-sets.
//!
//! A G-set is represented by its multiplicities over the conjugacy classes of
//! subgroups ([`GSetExpr`]) or, equivalently, by its vector of marks
//! ([`MarkVector`]). Disjoint union adds mark vectors and the Cartesian product
//! multiplies them entrywise; the table of marks converts between the two
//! representations. All arithmetic is exact.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::group::FiniteGroup;
use crate::lattice::SubgroupLattice;
use crate::subgroup::{core, Subgroup};

/// Marks of a G-set, one entry per subgroup class in lattice order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MarkVector(pub Vec<i128>);

/// A G-set as multiplicities of the coset spaces `[G_i \ G]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GSetExpr(pub Vec<i128>);

impl MarkVector {
    pub fn entries(&self) -> &[i128] {
        &self.0
    }

    /// Marks of the disjoint union.
    pub fn add(&self, other: &Self) -> Result<Self> {
        zip_checked(&self.0, &other.0, i128::checked_add, "mark addition").map(Self)
    }

    /// Marks of the Cartesian product.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        zip_checked(&self.0, &other.0, i128::checked_mul, "mark product").map(Self)
    }
}

fn zip_checked(
    a: &[i128],
    b: &[i128],
    op: fn(i128, i128) -> Option<i128>,
    what: &'static str,
) -> Result<Vec<i128>> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    a.iter().zip(b).map(|(&x, &y)| op(x, y).ok_or(Error::Overflow(what))).collect()
}

impl GSetExpr {
    pub fn zero(classes: usize) -> Self {
        Self(vec![0; classes])
    }

    /// One copy of `[G_i \ G]`.
    pub fn indicator(classes: usize, i: usize) -> Self {
        let mut v = vec![0; classes];
        v[i] = 1;
        Self(v)
    }

    pub fn multiplicities(&self) -> &[i128] {
        &self.0
    }

    pub fn orbit_count(&self) -> i128 {
        self.0.iter().sum()
    }

    /// Disjoint union.
    pub fn union(&self, other: &Self) -> Result<Self> {
        zip_checked(&self.0, &other.0, i128::checked_add, "multiplicity addition").map(Self)
    }

    /// True when the expression contains a copy of the regular G-set.
    pub fn has_regular_orbit(&self) -> bool {
        self.0.first().is_some_and(|&p| p > 0)
    }

    /// Nonzero multiplicities keyed by class label, in lattice order.
    pub fn labeled<'a>(&'a self, lattice: &'a SubgroupLattice) -> LabeledExpr<'a> {
        LabeledExpr { expr: self, lattice }
    }
}

/// Serializes as a JSON object `{"<label>": multiplicity, ...}` in lattice order.
pub struct LabeledExpr<'a> {
    expr: &'a GSetExpr,
    lattice: &'a SubgroupLattice,
}

impl LabeledExpr<'_> {
    pub fn entries(&self) -> Vec<(&str, i128)> {
        self.expr
            .0
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != 0)
            .map(|(i, &p)| (self.lattice.label(i), p))
            .collect()
    }
}

impl Serialize for LabeledExpr<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let entries = self.entries();
        let mut map = serializer.serialize_map(Some(entries.len()))?;
        for (label, p) in entries {
            map.serialize_entry(label, &p)?;
        }
        map.end()
    }
}

impl std::fmt::Display for LabeledExpr<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let entries = self.entries();
        if entries.is_empty() {
            return write!(f, "∅");
        }
        for (k, (label, p)) in entries.iter().enumerate() {
            if k > 0 {
                write!(f, " ∪ ")?;
            }
            if *p != 1 {
                write!(f, "{p}")?;
            }
            write!(f, "[{label}]")?;
        }
        Ok(())
    }
}

/// Number of right cosets of `sub_i` fixed by every element of `sub_j`.
///
/// The coset `H x` is fixed by `k` iff `x k x⁻¹ ∈ H`, so the mark is
/// `|{x : x K x⁻¹ ⊆ H}| / |H|`; only generators of `K` need checking.
pub fn mark(group: &FiniteGroup, sub_i: &Subgroup, sub_j: &Subgroup) -> Result<i64> {
    sub_i.check_in(group)?;
    sub_j.check_in(group)?;
    let gens = sub_j.generators(group);
    Ok(mark_with_gens(group, sub_i, &gens))
}

fn mark_with_gens(group: &FiniteGroup, h: &Subgroup, k_gens: &[usize]) -> i64 {
    let fixing = (0..group.order()).filter(|&x| k_gens.iter().all(|&k| h.contains(group.conj(x, k)))).count();
    (fixing / h.order()) as i64
}

/// Square matrix of marks: row `i` is the coset space of class `i`, column
/// `j` the subgroup class `j`.
#[derive(Debug)]
pub struct TableOfMarks {
    lattice: SubgroupLattice,
    matrix: Vec<Vec<i64>>,
    inverse: OnceLock<Vec<Vec<BigRational>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarksJson {
    pub classes: Vec<String>,
    pub matrix: Vec<Vec<i64>>,
}

pub fn table_of_marks(lattice: SubgroupLattice) -> TableOfMarks {
    table_of_marks_with(lattice, Exec::default())
}

pub fn table_of_marks_with(lattice: SubgroupLattice, exec: Exec) -> TableOfMarks {
    let group = lattice.group().clone();
    let n = lattice.len();
    let col_gens: Vec<Vec<usize>> = (0..n).map(|j| lattice.representative(j).generators(&group)).collect();
    let matrix = exec.map_range(n, |i| {
        let h = lattice.representative(i);
        (0..n).map(|j| mark_with_gens(&group, h, &col_gens[j])).collect()
    });
    TableOfMarks { lattice, matrix, inverse: OnceLock::new() }
}

impl TableOfMarks {
    pub fn lattice(&self) -> &SubgroupLattice {
        &self.lattice
    }

    pub fn group(&self) -> &FiniteGroup {
        self.lattice.group()
    }

    pub fn len(&self) -> usize {
        self.matrix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.is_empty()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.matrix[i][j]
    }

    /// Marks of `[G_i \ G]`.
    pub fn row(&self, i: usize) -> MarkVector {
        MarkVector(self.matrix[i].iter().map(|&x| x as i128).collect())
    }

    pub fn to_json(&self) -> MarksJson {
        MarksJson { classes: self.lattice.labels().to_vec(), matrix: self.matrix.clone() }
    }

    /// `m = pᵀ M`.
    pub fn mark_vector(&self, expr: &GSetExpr) -> Result<MarkVector> {
        let n = self.len();
        if expr.0.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: expr.0.len() });
        }
        let mut out = vec![0i128; n];
        for (i, &p) in expr.0.iter().enumerate() {
            if p == 0 {
                continue;
            }
            for j in 0..n {
                let term = p.checked_mul(self.matrix[i][j] as i128).ok_or(Error::Overflow("mark vector"))?;
                out[j] = out[j].checked_add(term).ok_or(Error::Overflow("mark vector"))?;
            }
        }
        Ok(MarkVector(out))
    }

    /// Solves `vᵀ = pᵀ M` for `p` by substitution from the last class down.
    /// Fails when `v` is not the mark vector of an actual G-set.
    pub fn decompose(&self, v: &MarkVector) -> Result<GSetExpr> {
        let n = self.len();
        if v.0.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: v.0.len() });
        }
        let mut p = vec![0i128; n];
        for j in (0..n).rev() {
            let mut rest = v.0[j];
            for (i, &pi) in p.iter().enumerate().skip(j + 1) {
                if pi != 0 {
                    let term = pi.checked_mul(self.matrix[i][j] as i128).ok_or(Error::Overflow("decompose"))?;
                    rest = rest.checked_sub(term).ok_or(Error::Overflow("decompose"))?;
                }
            }
            let d = self.matrix[j][j] as i128;
            if rest % d != 0 {
                return Err(Error::NonIntegralDecomposition { class: j });
            }
            let q = rest / d;
            if q < 0 {
                return Err(Error::NegativeMultiplicity { class: j });
            }
            p[j] = q;
        }
        Ok(GSetExpr(p))
    }

    /// Cartesian product in the Burnside ring.
    pub fn product(&self, a: &GSetExpr, b: &GSetExpr) -> Result<GSetExpr> {
        let m = self.mark_vector(a)?.hadamard(&self.mark_vector(b)?)?;
        self.decompose(&m).map_err(|e| match e {
            Error::Overflow(_) => e,
            other => Error::Internal(format!("product of valid G-sets failed to decompose: {other}")),
        })
    }

    /// `expr^d` for `d ≥ 1`.
    pub fn power(&self, expr: &GSetExpr, d: usize) -> Result<GSetExpr> {
        if d == 0 {
            return Err(Error::RangeError("power must be at least 1".into()));
        }
        let base = self.mark_vector(expr)?;
        let mut acc = base.clone();
        for _ in 1..d {
            acc = acc.hadamard(&base)?;
        }
        self.decompose(&acc)
    }

    /// Exact inverse of the table, computed once.
    pub fn inverse(&self) -> &[Vec<BigRational>] {
        self.inverse.get_or_init(|| {
            let n = self.len();
            let m = |i: usize, j: usize| BigRational::from_integer(BigInt::from(self.matrix[i][j]));
            // M X = I with M lower triangular: forward substitution per column.
            let mut x = vec![vec![BigRational::zero(); n]; n];
            for col in 0..n {
                for i in col..n {
                    let mut acc = if i == col { BigRational::from_integer(1.into()) } else { BigRational::zero() };
                    for k in col..i {
                        if self.matrix[i][k] != 0 {
                            acc -= m(i, k) * &x[k][col];
                        }
                    }
                    x[i][col] = acc / m(i, i);
                }
            }
            x
        })
    }

    /// `δ^ℓ_{ij} = Σ_l M(i,l) M(j,l) M⁻¹(l,ℓ)`: multiplicities of the orbits of
    /// `[G_i\G] × [G_j\G]`.
    pub fn structure_coefficients(&self, i: usize, j: usize) -> Result<Vec<i128>> {
        self.lattice.check_class(i)?;
        self.lattice.check_class(j)?;
        let n = self.len();
        let inv = self.inverse();
        let mut out = Vec::with_capacity(n);
        for ell in 0..n {
            let mut acc = BigRational::zero();
            for l in 0..n {
                let w = self.matrix[i][l] * self.matrix[j][l];
                if w != 0 && !inv[l][ell].is_zero() {
                    acc += BigRational::from_integer(BigInt::from(w)) * &inv[l][ell];
                }
            }
            if !acc.is_integer() || acc.is_negative() {
                return Err(Error::Internal(format!("structure coefficient δ^{ell}_({i},{j}) = {acc}")));
            }
            out.push(acc.to_integer().to_i128().ok_or(Error::Overflow("structure coefficient"))?);
        }
        Ok(out)
    }

    /// Successive powers `[H\G]^1 … [H\G]^max_d` of the coset space of class `h`.
    pub fn power_chain(&self, h: usize, max_d: usize) -> Result<Vec<GSetExpr>> {
        self.lattice.check_class(h)?;
        let base = self.row(h);
        let mut acc = base.clone();
        let mut out = Vec::with_capacity(max_d);
        for d in 1..=max_d {
            if d > 1 {
                acc = acc.hadamard(&base)?;
            }
            out.push(self.decompose(&acc)?);
        }
        Ok(out)
    }

    /// Smallest power of `[H\G]` containing a regular orbit, with the
    /// group-agnostic bounds for comparison.
    pub fn regular_orbit_order(&self, h_class: usize) -> Result<RegularOrbitReport> {
        self.lattice.check_class(h_class)?;
        let group = self.group();
        let h = self.lattice.representative(h_class);
        if !core(group, h)?.is_trivial() {
            return Err(Error::UnfaithfulAction { class: h_class });
        }
        let index = group.order() / h.order();
        let log_bound = log2_bound(h.order());
        let base = self.row(h_class);
        let mut acc = base.clone();
        let mut d = 1;
        loop {
            if self.decompose(&acc)?.has_regular_orbit() {
                break;
            }
            if d > 64 {
                return Err(Error::Internal("no regular orbit found for a faithful action".into()));
            }
            acc = acc.hadamard(&base)?;
            d += 1;
        }
        Ok(RegularOrbitReport {
            class: h_class,
            stabilizer_order: h.order(),
            index,
            minimal_d: d,
            log_bound,
            stirling_bound: stirling_bound(index),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularOrbitReport {
    pub class: usize,
    pub stabilizer_order: usize,
    /// `N = |G : H|`, the size of the coset space.
    pub index: usize,
    pub minimal_d: usize,
    /// `⌈log₂ |H|⌉`, or 1 when `H` is trivial.
    pub log_bound: usize,
    /// `⌈(N − ½) log₂(N − 1) − (N − 2) log₂ e⌉`, or 1 for `N ≤ 2`.
    pub stirling_bound: usize,
}

/// `⌈log₂ h⌉` computed exactly, with the value 1 for `h ≤ 1`.
pub fn log2_bound(h: usize) -> usize {
    if h <= 1 {
        return 1;
    }
    (usize::BITS - (h - 1).leading_zeros()) as usize
}

/// Group-agnostic order bound from Stirling's approximation to `(N−1)!`.
pub fn stirling_bound(n: usize) -> usize {
    if n <= 2 {
        return 1;
    }
    let n = n as f64;
    let v = (n - 0.5) * (n - 1.0).log2() - (n - 2.0) * std::f64::consts::LOG2_E;
    (v.ceil() as i64).max(1) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caps::Caps;
    use crate::group::{closure, Builtin};
    use std::sync::Arc;

    fn table(b: Builtin) -> TableOfMarks {
        let g = Arc::new(b.build().unwrap());
        table_of_marks(SubgroupLattice::build(&g, &Caps::default()).unwrap())
    }

    #[test]
    fn c2_and_trivial_tables() {
        assert_eq!(table(Builtin::Cyclic(2)).matrix(), &[vec![2, 0], vec![1, 1]]);
        let g = Arc::new(closure(3, &[]).unwrap());
        let t = table_of_marks(SubgroupLattice::build(&g, &Caps::default()).unwrap());
        assert_eq!(t.matrix(), &[vec![1]]);
    }

    #[test]
    fn a5_marks() {
        let t = table(Builtin::Alternating(5));
        let l = t.lattice();
        let k4 = l.find_class("K4").unwrap();
        let c2 = l.find_class("C2").unwrap();
        let d10 = l.find_class("D10").unwrap();
        let c5 = l.find_class("C5").unwrap();
        assert_eq!(t.get(k4, c2), 3);
        assert_eq!(t.get(d10, c5), 1);
        assert_eq!(t.get(0, 0), 60);
        let g = t.group();
        assert_eq!(mark(g, l.representative(k4), l.representative(c2)).unwrap(), 3);
    }

    #[test]
    fn mark_vector_examples() {
        let t = table(Builtin::Alternating(5));
        let a4 = t.lattice().find_class("A4").unwrap();
        let n = t.len();
        assert_eq!(t.mark_vector(&GSetExpr::indicator(n, a4)).unwrap().0, vec![5, 1, 2, 1, 0, 0, 0, 1, 0]);
        assert_eq!(t.mark_vector(&GSetExpr::zero(n)).unwrap().0, vec![0; n]);
        let mut two = GSetExpr::zero(n);
        two.0[n - 1] = 2;
        assert_eq!(t.mark_vector(&two).unwrap().0, vec![2; n]);
        assert!(matches!(t.mark_vector(&GSetExpr::zero(3)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn decompose_examples() {
        let t = table(Builtin::Alternating(5));
        let l = t.lattice();
        let (a4, c3) = (l.find_class("A4").unwrap(), l.find_class("C3").unwrap());
        let row = t.row(a4);
        let sq = row.hadamard(&row).unwrap();
        let p = t.decompose(&sq).unwrap();
        let mut want = GSetExpr::zero(t.len());
        want.0[a4] = 1;
        want.0[c3] = 1;
        assert_eq!(p, want);
        for i in 0..t.len() {
            assert_eq!(t.decompose(&t.row(i)).unwrap(), GSetExpr::indicator(t.len(), i));
        }
    }

    #[test]
    fn invalid_mark_vectors_are_rejected() {
        let t = table(Builtin::Cyclic(2));
        // [1, 0]: one point not fixed by C2 is impossible
        assert_eq!(t.decompose(&MarkVector(vec![1, 0])).unwrap_err(), Error::NonIntegralDecomposition { class: 0 });
        assert_eq!(t.decompose(&MarkVector(vec![0, 2])).unwrap_err(), Error::NegativeMultiplicity { class: 0 });
    }

    #[test]
    fn cube_of_a4_cosets() {
        let t = table(Builtin::Alternating(5));
        let l = t.lattice();
        let a4 = l.find_class("A4").unwrap();
        let e = GSetExpr::indicator(t.len(), a4);
        let cube = t.product(&t.product(&e, &e).unwrap(), &e).unwrap();
        // 125 points: 60 (regular) + 3 * 20 (ordered distinct pairs) + 5 (diagonal)
        assert_eq!(cube.labeled(l).to_string(), "[e] ∪ 3[C3] ∪ [A4]");
        assert_eq!(serde_json::to_string(&cube.labeled(l)).unwrap(), r#"{"e":1,"C3":3,"A4":1}"#);
        assert_eq!(t.power(&e, 3).unwrap(), cube);
    }

    #[test]
    fn one_point_space_is_identity() {
        let t = table(Builtin::Symmetric(4));
        let n = t.len();
        let one = GSetExpr::indicator(n, n - 1);
        for i in 0..n {
            let e = GSetExpr::indicator(n, i);
            assert_eq!(t.product(&e, &one).unwrap(), e);
            assert_eq!(t.structure_coefficients(n - 1, i).unwrap(), e.0);
        }
    }

    #[test]
    fn product_with_regular_space() {
        let t = table(Builtin::Symmetric(4));
        let n = t.len();
        let reg = GSetExpr::indicator(n, 0);
        for i in 0..n {
            let idx = 24 / t.lattice().class(i).sub_order;
            let p = t.product(&GSetExpr::indicator(n, i), &reg).unwrap();
            let mut want = GSetExpr::zero(n);
            want.0[0] = idx as i128;
            assert_eq!(p, want);
        }
    }

    #[test]
    fn structure_coefficients_a4() {
        let t = table(Builtin::Alternating(5));
        let l = t.lattice();
        let a4 = l.find_class("A4").unwrap();
        let d = t.structure_coefficients(a4, a4).unwrap();
        let mut want = vec![0; t.len()];
        want[a4] = 1;
        want[l.find_class("C3").unwrap()] = 1;
        assert_eq!(d, want);
    }

    #[test]
    fn s4_natural_square_has_two_orbits() {
        let t = table(Builtin::Symmetric(4));
        let l = t.lattice();
        // natural action: point stabilizer is S3 (order 6)
        let s3 = (0..l.len()).find(|&i| l.class(i).sub_order == 6).unwrap();
        let d = t.structure_coefficients(s3, s3).unwrap();
        assert_eq!(d.iter().sum::<i128>(), 2);
        assert_eq!(d[s3], 1);
        let pair = (0..l.len()).find(|&i| d[i] == 1 && i != s3).unwrap();
        assert_eq!(l.class(pair).sub_order, 2);
    }

    #[test]
    fn regular_orbit_order_examples() {
        let t = table(Builtin::Alternating(5));
        let a4 = t.lattice().find_class("A4").unwrap();
        let r = t.regular_orbit_order(a4).unwrap();
        assert_eq!(r.minimal_d, 3);
        assert_eq!(r.index, 5);
        assert_eq!(r.stirling_bound, 5);
        assert_eq!(r.log_bound, 4);
        let r0 = t.regular_orbit_order(0).unwrap();
        assert_eq!((r0.minimal_d, r0.log_bound), (1, 1));
        assert_eq!(t.regular_orbit_order(t.len() - 1).unwrap_err(), Error::UnfaithfulAction { class: t.len() - 1 });
    }

    #[test]
    fn bounds() {
        assert_eq!(log2_bound(1), 1);
        assert_eq!(log2_bound(2), 1);
        assert_eq!(log2_bound(3), 2);
        assert_eq!(log2_bound(12), 4);
        assert_eq!(log2_bound(16), 4);
        assert_eq!(log2_bound(17), 5);
        assert_eq!(stirling_bound(1), 1);
        assert_eq!(stirling_bound(2), 1);
        assert_eq!(stirling_bound(5), 5);
    }
}
