use crate::action::{regular_action, GroupAction};
use crate::error::{Error, Result};
use crate::sharing::SharingPattern;

use super::checkpoint::ActionDescriptor;
use super::net::{EquivariantMLP, LayerParams, LayerSpec, Nonlinearity};

/// Weights of one hidden channel of a plain two-layer MLP
/// `x ↦ Σ_c w_out_c σ(w_in_c · x + bias_c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelWeights {
    pub w_in: Vec<f64>,
    pub w_out: Vec<f64>,
    pub bias: f64,
}

fn regular_layers(
    in_action: &GroupAction,
    out_action: &GroupAction,
    channels: usize,
    nonlinearity: Nonlinearity,
) -> Result<Vec<LayerSpec>> {
    if !in_action.same_group(out_action) {
        return Err(Error::GroupMismatch);
    }
    if !in_action.is_faithful() {
        return Err(Error::UnfaithfulInput);
    }
    let hidden = regular_action(in_action.group());
    Ok(vec![
        LayerSpec::new(in_action.clone(), 1, Nonlinearity::Identity),
        LayerSpec::new(hidden, channels, nonlinearity).describe(ActionDescriptor::Regular),
        LayerSpec::new(out_action.clone(), 1, Nonlinearity::Identity),
    ])
}

/// Two-layer net with a regular hidden layer of `channels` copies of the
/// group, all weights zero. Call [`EquivariantMLP::init_uniform`] to seed it.
pub fn build_regular_net(in_action: &GroupAction, out_action: &GroupAction, channels: usize) -> Result<EquivariantMLP> {
    EquivariantMLP::new(regular_layers(in_action, out_action, channels, Nonlinearity::default())?)
}

/// Read tied weights off a dense matrix that is already constant on orbits.
fn free_weights(pattern: &SharingPattern, cell: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    let mut w = vec![f64::NAN; pattern.num_orbits];
    for (o, row) in pattern.orbit_of.iter().enumerate() {
        for (i, &k) in row.iter().enumerate() {
            if w[k].is_nan() {
                w[k] = cell(o, i);
            }
        }
    }
    w
}

/// Group-average a plain two-layer MLP into a regular-hidden-layer
/// equivariant net.
///
/// Hidden unit `(c, r)` computes `σ(Σ_i w_in_c[g_r·i] x_i + bias_c)` and the
/// output at `o` is `(1/|G|) Σ_{c,r} w_out_c[g_r·o] h_{c,r}`, which is the
/// average of `B_g⁻¹ mlp(A_g x)` over the group.
pub fn symmetrize(
    channels: &[ChannelWeights],
    in_action: &GroupAction,
    out_action: &GroupAction,
    nonlinearity: Nonlinearity,
) -> Result<EquivariantMLP> {
    if channels.is_empty() {
        return Err(Error::ShapeMismatch("symmetrize needs at least one channel".into()));
    }
    let (n_in, n_out) = (in_action.point_count(), out_action.point_count());
    for ch in channels {
        if ch.w_in.len() != n_in {
            return Err(Error::LengthMismatch { what: "input weights", expected: n_in, got: ch.w_in.len() });
        }
        if ch.w_out.len() != n_out {
            return Err(Error::LengthMismatch { what: "output weights", expected: n_out, got: ch.w_out.len() });
        }
    }
    let mut net = EquivariantMLP::new(regular_layers(in_action, out_action, channels.len(), nonlinearity)?)?;
    let order = in_action.group().order() as f64;
    let (first, second) = (net.patterns()[0].clone(), net.patterns()[1].clone());
    let mut p1 = LayerParams { weights: Vec::new(), biases: Vec::new() };
    let mut p2 = LayerParams { weights: Vec::new(), biases: vec![0.0; second.num_bias_orbits] };
    for ch in channels {
        p1.weights.extend(free_weights(&first, |r, i| ch.w_in[in_action.act(r, i)]));
        p1.biases.extend(std::iter::repeat_n(ch.bias, first.num_bias_orbits));
        p2.weights.extend(free_weights(&second, |o, r| ch.w_out[out_action.act(r, o)] / order));
    }
    net.set_params(vec![p1, p2])?;
    Ok(net)
}
