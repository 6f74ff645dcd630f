#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use eqv_core::mlp::{ChannelWeights, Nonlinearity};
use eqv_core::{Builtin, FiniteGroup, GroupAction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn builtin(name: &str) -> Arc<FiniteGroup> {
    Arc::new(name.parse::<Builtin>().unwrap().build().unwrap())
}

/// The groups every property is checked on.
pub fn test_groups() -> Vec<(&'static str, Arc<FiniteGroup>)> {
    ["cyclic:6", "symmetric:3", "dihedral:4", "symmetric:4", "alternating:5"]
        .into_iter()
        .map(|n| (n, builtin(n)))
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn random_channels(rng: &mut ChaCha8Rng, count: usize, n_in: usize, n_out: usize) -> Vec<ChannelWeights> {
    (0..count)
        .map(|_| ChannelWeights {
            w_in: uniform_vec(rng, n_in),
            w_out: uniform_vec(rng, n_out),
            bias: rng.gen_range(-1.0..1.0),
        })
        .collect()
}

/// The unconstrained two-layer MLP `Σ_c w_out_c σ(w_in_c · x + bias_c)`.
pub fn plain_mlp(channels: &[ChannelWeights], nl: Nonlinearity, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; channels[0].w_out.len()];
    for ch in channels {
        let h = nl.apply(ch.w_in.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + ch.bias);
        for (yo, w) in y.iter_mut().zip(&ch.w_out) {
            *yo += w * h;
        }
    }
    y
}

/// Group average `(1/|G|) Σ_g B_g⁻¹ mlp(A_g x)` by brute force.
pub fn reynolds(
    channels: &[ChannelWeights],
    nl: Nonlinearity,
    input: &GroupAction,
    output: &GroupAction,
    x: &[f64],
) -> Vec<f64> {
    let order = input.group().order();
    let mut acc = vec![0.0; output.point_count()];
    for g in 0..order {
        let mut moved = vec![0.0; x.len()];
        for (j, &v) in x.iter().enumerate() {
            moved[input.act(g, j)] = v;
        }
        let y = plain_mlp(channels, nl, &moved);
        for (o, a) in acc.iter_mut().enumerate() {
            *a += y[output.act(g, o)];
        }
    }
    acc.iter().map(|a| a / order as f64).collect()
}

/// Every subgroup, as sorted member lists, by joining cyclic subgroups
/// until nothing new appears.
pub fn brute_force_subgroups(g: &FiniteGroup) -> BTreeSet<Vec<usize>> {
    let close = |seed: &BTreeSet<usize>| -> Vec<usize> {
        let mut set = seed.clone();
        set.insert(0);
        loop {
            let mut grew = false;
            let current: Vec<usize> = set.iter().copied().collect();
            for &a in &current {
                for &b in &current {
                    grew |= set.insert(g.mul(a, b));
                }
            }
            if !grew {
                return set.into_iter().collect();
            }
        }
    };
    let mut all: BTreeSet<Vec<usize>> = (0..g.order()).map(|x| close(&BTreeSet::from([x]))).collect();
    loop {
        let list: Vec<Vec<usize>> = all.iter().cloned().collect();
        let mut grew = false;
        for a in &list {
            for b in &list {
                let joined: BTreeSet<usize> = a.iter().chain(b).copied().collect();
                grew |= all.insert(close(&joined));
            }
        }
        if !grew {
            return all;
        }
    }
}
