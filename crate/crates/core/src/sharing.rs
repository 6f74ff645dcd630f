//! Parameter-sharing patterns for equivariant linear maps.
//!
//! A linear map `Φ: R^N → R^O` commutes with the group iff
//! `Φ(g·o, g·i) = Φ(o, i)` for all `g`, i.e. iff it is constant on the orbits
//! of the diagonal action on `O × N`. A bias commutes iff it is constant on the
//! orbits of `O`. A [`SharingPattern`] records those orbits; `Φ` has shape
//! `|O| × |N|` (rows are outputs).

use serde::{Deserialize, Serialize};

use crate::action::GroupAction;
use crate::error::{Error, Result};
use crate::group::FiniteGroup;

/// Orbit ids of the cells of an `|O| × |N|` matrix and of an `|O|` bias.
///
/// Ids are contiguous and canonical: orbits are numbered by their smallest
/// row-major cell index, so equal inputs give byte-identical JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharingPattern {
    pub rows: usize,
    pub cols: usize,
    pub num_orbits: usize,
    pub orbit_of: Vec<Vec<usize>>,
    pub bias_orbit_of: Vec<usize>,
    pub num_bias_orbits: usize,
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch("ragged matrix rows".into()));
        }
        Ok(Self { rows: rows.len(), cols, data: rows.concat() })
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols.max(1)).take(self.rows).map(|r| r.to_vec()).collect()
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        self.data.chunks(self.cols.max(1)).take(self.rows).map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }
}

pub fn make_pattern(out_action: &GroupAction, in_action: &GroupAction) -> Result<SharingPattern> {
    if !out_action.same_group(in_action) {
        return Err(Error::GroupMismatch);
    }
    if !in_action.is_faithful() {
        log::warn!("input action is not faithful; the layer is only equivariant to a quotient group");
    }
    let (rows, cols) = (out_action.point_count(), in_action.point_count());
    let gens = out_action.group().generator_indices();
    let mut id = vec![usize::MAX; rows * cols];
    let mut num_orbits = 0;
    let mut stack = Vec::new();
    for start in 0..rows * cols {
        if id[start] != usize::MAX {
            continue;
        }
        id[start] = num_orbits;
        stack.push(start);
        while let Some(cell) = stack.pop() {
            let (o, i) = (cell / cols, cell % cols);
            for &g in gens {
                let next = out_action.act(g, o) * cols + in_action.act(g, i);
                if id[next] == usize::MAX {
                    id[next] = num_orbits;
                    stack.push(next);
                }
            }
        }
        num_orbits += 1;
    }
    let (bias_orbit_of, num_bias_orbits) = out_action.orbit_ids();
    let orbit_of = if cols == 0 { vec![Vec::new(); rows] } else { id.chunks(cols).map(|c| c.to_vec()).collect() };
    Ok(SharingPattern { rows, cols, num_orbits, orbit_of, bias_orbit_of, num_bias_orbits })
}

impl SharingPattern {
    /// Number of cells in each weight orbit.
    pub fn orbit_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_orbits];
        for row in &self.orbit_of {
            for &k in row {
                sizes[k] += 1;
            }
        }
        sizes
    }

    /// Dense matrix and bias with `Φ[o][i] = weights[orbit_of[o][i]]`.
    pub fn instantiate(&self, weights: &[f64], biases: &[f64]) -> Result<(Matrix, Vec<f64>)> {
        if weights.len() != self.num_orbits {
            return Err(Error::LengthMismatch { what: "weights", expected: self.num_orbits, got: weights.len() });
        }
        if biases.len() != self.num_bias_orbits {
            return Err(Error::LengthMismatch { what: "biases", expected: self.num_bias_orbits, got: biases.len() });
        }
        let data = self.orbit_of.iter().flat_map(|row| row.iter().map(|&k| weights[k])).collect();
        let bias = self.bias_orbit_of.iter().map(|&k| biases[k]).collect();
        Ok((Matrix { rows: self.rows, cols: self.cols, data }, bias))
    }

    /// Orthogonal projection onto the equivariant subspace: average each orbit.
    pub fn project(&self, matrix: &Matrix) -> Result<Matrix> {
        if matrix.rows != self.rows || matrix.cols != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "matrix is {}x{}, pattern is {}x{}",
                matrix.rows, matrix.cols, self.rows, self.cols
            )));
        }
        let mut sums = vec![0.0; self.num_orbits];
        for (o, row) in self.orbit_of.iter().enumerate() {
            for (i, &k) in row.iter().enumerate() {
                sums[k] += matrix.get(o, i);
            }
        }
        let sizes = self.orbit_sizes();
        let avg: Vec<f64> = sums.iter().zip(&sizes).map(|(s, &n)| s / n as f64).collect();
        let bias = vec![0.0; self.num_bias_orbits];
        Ok(self.instantiate(&avg, &bias)?.0)
    }
}

/// Outcome of an equivariance check over the generators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivarianceReport {
    pub passed: bool,
    pub max_deviation: f64,
    /// Index into the group's generator list with the largest deviation.
    pub worst_generator: Option<usize>,
}

/// Checks `B_g Φ A_gᵀ = Φ` and `B_g b = b` entrywise for every generator.
pub fn check_equivariance(
    matrix: &Matrix,
    bias: &[f64],
    out_action: &GroupAction,
    in_action: &GroupAction,
    tol: f64,
) -> Result<EquivarianceReport> {
    if !out_action.same_group(in_action) {
        return Err(Error::GroupMismatch);
    }
    let (rows, cols) = (out_action.point_count(), in_action.point_count());
    if matrix.rows != rows || matrix.cols != cols || bias.len() != rows {
        return Err(Error::ShapeMismatch(format!(
            "expected {rows}x{cols} matrix and bias of {rows}, got {}x{} and {}",
            matrix.rows,
            matrix.cols,
            bias.len()
        )));
    }
    let mut max_deviation: f64 = 0.0;
    let mut worst_generator = None;
    for (s, &g) in out_action.group().generator_indices().iter().enumerate() {
        let mut dev: f64 = 0.0;
        for o in 0..rows {
            let go = out_action.act(g, o);
            for i in 0..cols {
                dev = dev.max((matrix.get(go, in_action.act(g, i)) - matrix.get(o, i)).abs());
            }
            dev = dev.max((bias[go] - bias[o]).abs());
        }
        if dev > max_deviation || worst_generator.is_none() && dev > 0.0 {
            max_deviation = dev;
            worst_generator = Some(s);
        }
    }
    Ok(EquivarianceReport { passed: max_deviation <= tol, max_deviation, worst_generator })
}

/// Cross-correlation form of an equivariant map between transitive G-sets.
///
/// With `s_o` the first element (by index) sending output point 0 to `o`,
/// `Φ(o, i) = Φ(0, s_o⁻¹·i)`, so the map is determined by the kernel
/// `φ(j) = Φ(0, j)` and acts as `y(o) = Σ_i φ(s_o⁻¹·i) x(i)`.
#[derive(Debug, Clone)]
pub struct KernelForm {
    /// Element index `t_i` with `t_i · 0 = i` on the input side.
    pub input_cosets: Vec<usize>,
    /// Element index `s_o` with `s_o · 0 = o` on the output side.
    pub output_cosets: Vec<usize>,
    /// Pattern orbit id of each kernel entry.
    pub kernel_orbit_of: Vec<usize>,
    /// Distinct kernel parameters; equals the pattern's `num_orbits`.
    pub num_free: usize,
    /// Double cosets `H_out \ G / H_in` of the two point stabilizers.
    pub double_cosets: usize,
    // shifted[o][i] = s_o⁻¹ · i
    shifted: Vec<Vec<u32>>,
}

fn transversal(action: &GroupAction) -> Vec<usize> {
    let mut reps = vec![usize::MAX; action.point_count()];
    for g in 0..action.group().order() {
        let p = action.act(g, 0);
        if reps[p] == usize::MAX {
            reps[p] = g;
        }
    }
    reps
}

/// Number of double cosets `A g B` for subgroups given as member lists.
pub fn double_coset_count(group: &FiniteGroup, a: &[usize], b: &[usize]) -> usize {
    let mut seen = vec![false; group.order()];
    let mut count = 0;
    for g in 0..group.order() {
        if seen[g] {
            continue;
        }
        count += 1;
        for &x in a {
            let xg = group.mul(x, g);
            for &y in b {
                seen[group.mul(xg, y)] = true;
            }
        }
    }
    count
}

pub fn kernel_form(pattern: &SharingPattern, out_action: &GroupAction, in_action: &GroupAction) -> Result<KernelForm> {
    if !out_action.same_group(in_action) {
        return Err(Error::GroupMismatch);
    }
    if !out_action.properties().transitive || !in_action.properties().transitive {
        return Err(Error::NotTransitive);
    }
    if pattern.rows != out_action.point_count() || pattern.cols != in_action.point_count() {
        return Err(Error::ShapeMismatch("pattern does not match the actions".into()));
    }
    let group = out_action.group();
    let output_cosets = transversal(out_action);
    let input_cosets = transversal(in_action);
    let shifted = output_cosets
        .iter()
        .map(|&s| {
            let inv = group.inv(s);
            (0..in_action.point_count()).map(|i| in_action.act(inv, i) as u32).collect()
        })
        .collect();
    let kernel_orbit_of = pattern.orbit_of[0].clone();
    let mut distinct = kernel_orbit_of.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let num_free = distinct.len();
    if num_free != pattern.num_orbits {
        return Err(Error::Internal(format!("kernel has {num_free} parameters, pattern {}", pattern.num_orbits)));
    }
    let h_out = out_action.stabilizer(0)?;
    let h_in = in_action.stabilizer(0)?;
    let double_cosets = double_coset_count(group, h_out.members(), h_in.members());
    if double_cosets != pattern.num_orbits {
        return Err(Error::Internal(format!(
            "{double_cosets} double cosets but {} diagonal orbits",
            pattern.num_orbits
        )));
    }
    Ok(KernelForm { input_cosets, output_cosets, kernel_orbit_of, num_free, double_cosets, shifted })
}

impl KernelForm {
    /// Kernel `φ` for a given free-weight vector.
    pub fn kernel(&self, weights: &[f64]) -> Result<Vec<f64>> {
        if weights.len() != self.num_free {
            return Err(Error::LengthMismatch { what: "weights", expected: self.num_free, got: weights.len() });
        }
        Ok(self.kernel_orbit_of.iter().map(|&k| weights[k]).collect())
    }

    /// `y(o) = Σ_i φ(s_o⁻¹·i) x(i)`.
    pub fn correlate(&self, kernel: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        let n = self.kernel_orbit_of.len();
        if kernel.len() != n || x.len() != n {
            return Err(Error::ShapeMismatch(format!("kernel and input must have length {n}")));
        }
        Ok(self
            .shifted
            .iter()
            .map(|row| row.iter().zip(x).map(|(&j, &xi)| kernel[j as usize] * xi).sum())
            .collect())
    }
}
