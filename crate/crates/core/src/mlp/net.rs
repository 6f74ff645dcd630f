use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::action::GroupAction;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::sharing::{make_pattern, Matrix, SharingPattern};

use super::checkpoint::ActionDescriptor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Nonlinearity {
    Identity,
    Relu,
    #[default]
    Tanh,
    Sigmoid,
}

impl Nonlinearity {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Nonlinearity::Identity => x,
            Nonlinearity::Relu => x.max(0.0),
            Nonlinearity::Tanh => x.tanh(),
            Nonlinearity::Sigmoid => 1.0 / (1.0 + (-x).exp()),
        }
    }

    /// Derivative in terms of the pre-activation `z` and output `y = σ(z)`.
    #[inline]
    fn derivative(self, z: f64, y: f64) -> f64 {
        match self {
            Nonlinearity::Identity => 1.0,
            Nonlinearity::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Nonlinearity::Tanh => 1.0 - y * y,
            Nonlinearity::Sigmoid => y * (1.0 - y),
        }
    }
}

/// Channel-major activations: `data[c * points + i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub channels: usize,
    pub points: usize,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(channels: usize, points: usize) -> Self {
        Self { channels, points, data: vec![0.0; channels * points] }
    }

    pub fn from_vec(channels: usize, points: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != channels * points {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {channels}x{points} tensor",
                data.len()
            )));
        }
        Ok(Self { channels, points, data })
    }

    /// One channel.
    pub fn vector(data: Vec<f64>) -> Self {
        Self { channels: 1, points: data.len(), data }
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        &self.data[c * self.points..(c + 1) * self.points]
    }

    /// `A_g x`: the value at point `i` moves to `g·i`, in every channel.
    pub fn permuted(&self, action: &GroupAction, g: usize) -> Tensor {
        let mut out = Tensor::zeros(self.channels, self.points);
        for c in 0..self.channels {
            for i in 0..self.points {
                out.data[c * self.points + action.act(g, i)] = self.data[c * self.points + i];
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Tensor) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct LayerSpec {
    pub action: GroupAction,
    pub channels: usize,
    /// Applied after the affine map into this layer; ignored on the input and
    /// final layers.
    pub nonlinearity: Nonlinearity,
    pub(crate) descriptor: Option<ActionDescriptor>,
}

impl LayerSpec {
    pub fn new(action: GroupAction, channels: usize, nonlinearity: Nonlinearity) -> Self {
        Self { action, channels, nonlinearity, descriptor: None }
    }

    pub fn describe(mut self, descriptor: ActionDescriptor) -> Self {
        self.descriptor = Some(descriptor);
        self
    }

    pub fn points(&self) -> usize {
        self.action.point_count()
    }

    pub fn descriptor(&self) -> Option<&ActionDescriptor> {
        self.descriptor.as_ref()
    }
}

/// Free parameters of one transition.
///
/// `weights[(c_out * c_in_count + c_in) * num_orbits + k]` and
/// `biases[c_out * num_bias_orbits + k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerParams {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl LayerParams {
    fn zeros_like(&self) -> Self {
        Self { weights: vec![0.0; self.weights.len()], biases: vec![0.0; self.biases.len()] }
    }
}

#[derive(Debug, Clone)]
pub struct EquivariantMLP {
    layers: Vec<LayerSpec>,
    patterns: Vec<SharingPattern>,
    params: Vec<LayerParams>,
}

/// Activations of every layer, kept for backpropagation.
struct Trace {
    // pre[l] / post[l] for layers 1..; index 0 holds the input in `post`
    pre: Vec<Vec<f64>>,
    post: Vec<Vec<f64>>,
}

impl EquivariantMLP {
    /// A network with all parameters zero.
    pub fn new(layers: Vec<LayerSpec>) -> Result<Self> {
        if layers.len() < 2 {
            return Err(Error::ShapeMismatch("a network needs at least an input and an output layer".into()));
        }
        if layers.iter().any(|l| l.channels == 0) {
            return Err(Error::ShapeMismatch("layers need at least one channel".into()));
        }
        let mut patterns = Vec::with_capacity(layers.len() - 1);
        let mut params = Vec::with_capacity(layers.len() - 1);
        for pair in layers.windows(2) {
            let (inp, out) = (&pair[0], &pair[1]);
            let p = make_pattern(&out.action, &inp.action)?;
            params.push(LayerParams {
                weights: vec![0.0; out.channels * inp.channels * p.num_orbits],
                biases: vec![0.0; out.channels * p.num_bias_orbits],
            });
            patterns.push(p);
        }
        Ok(Self { layers, patterns, params })
    }

    /// Uniform on `[-1/√fan_in, 1/√fan_in]`, `fan_in = c_in · |N|` (the
    /// dense fan-in of each output unit).
    pub fn init_uniform(&mut self, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (l, p) in self.params.iter_mut().enumerate() {
            let fan_in = (self.layers[l].channels * self.layers[l].points()).max(1) as f64;
            let bound = 1.0 / fan_in.sqrt();
            for w in p.weights.iter_mut().chain(p.biases.iter_mut()) {
                *w = rng.gen_range(-bound..=bound);
            }
        }
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    pub fn patterns(&self) -> &[SharingPattern] {
        &self.patterns
    }

    pub fn params(&self) -> &[LayerParams] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [LayerParams] {
        &mut self.params
    }

    pub fn set_params(&mut self, params: Vec<LayerParams>) -> Result<()> {
        if params.len() != self.params.len() {
            return Err(Error::LengthMismatch { what: "layer params", expected: self.params.len(), got: params.len() });
        }
        for (have, want) in params.iter().zip(&self.params) {
            if have.weights.len() != want.weights.len() {
                return Err(Error::LengthMismatch { what: "weights", expected: want.weights.len(), got: have.weights.len() });
            }
            if have.biases.len() != want.biases.len() {
                return Err(Error::LengthMismatch { what: "biases", expected: want.biases.len(), got: have.biases.len() });
            }
        }
        self.params = params;
        Ok(())
    }

    pub fn num_params(&self) -> usize {
        self.params.iter().map(|p| p.weights.len() + p.biases.len()).sum()
    }

    pub fn params_flat(&self) -> Vec<f64> {
        self.params.iter().flat_map(|p| p.weights.iter().chain(&p.biases).copied()).collect()
    }

    pub fn set_params_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.num_params() {
            return Err(Error::LengthMismatch { what: "parameters", expected: self.num_params(), got: flat.len() });
        }
        let mut k = 0;
        for p in &mut self.params {
            for w in p.weights.iter_mut().chain(p.biases.iter_mut()) {
                *w = flat[k];
                k += 1;
            }
        }
        Ok(())
    }

    pub fn input_action(&self) -> &GroupAction {
        &self.layers[0].action
    }

    pub fn output_action(&self) -> &GroupAction {
        &self.layers[self.layers.len() - 1].action
    }

    pub fn input_shape(&self) -> (usize, usize) {
        (self.layers[0].channels, self.layers[0].points())
    }

    pub fn output_shape(&self) -> (usize, usize) {
        let last = &self.layers[self.layers.len() - 1];
        (last.channels, last.points())
    }

    /// Dense weight matrix of transition `l` for one channel pair, with its bias.
    pub fn dense(&self, l: usize, c_out: usize, c_in: usize) -> Result<(Matrix, Vec<f64>)> {
        let p = &self.patterns[l];
        let cin = self.layers[l].channels;
        let k = p.num_orbits;
        let start = (c_out * cin + c_in) * k;
        let nb = p.num_bias_orbits;
        p.instantiate(&self.params[l].weights[start..start + k], &self.params[l].biases[c_out * nb..(c_out + 1) * nb])
    }

    fn check_input(&self, x: &Tensor) -> Result<()> {
        let (c, n) = self.input_shape();
        if x.channels != c || x.points != n || x.data.len() != c * n {
            return Err(Error::ShapeMismatch(format!(
                "input is {}x{}, network expects {c}x{n}",
                x.channels, x.points
            )));
        }
        Ok(())
    }

    fn trace(&self, x: &Tensor) -> Trace {
        let last = self.layers.len() - 1;
        let mut pre = vec![Vec::new()];
        let mut post = vec![x.data.clone()];
        for l in 0..last {
            let (inp, out) = (&self.layers[l], &self.layers[l + 1]);
            let p = &self.patterns[l];
            let params = &self.params[l];
            let (n_in, n_out, k, nb) = (inp.points(), out.points(), p.num_orbits, p.num_bias_orbits);
            let h = &post[l];
            let mut z = vec![0.0; out.channels * n_out];
            for c in 0..out.channels {
                for o in 0..n_out {
                    let mut acc = params.biases[c * nb + p.bias_orbit_of[o]];
                    let orbits = &p.orbit_of[o];
                    for ci in 0..inp.channels {
                        let w = &params.weights[(c * inp.channels + ci) * k..][..k];
                        let hin = &h[ci * n_in..(ci + 1) * n_in];
                        for (i, &orb) in orbits.iter().enumerate() {
                            acc += w[orb] * hin[i];
                        }
                    }
                    z[c * n_out + o] = acc;
                }
            }
            let y = if l + 1 == last { z.clone() } else { z.iter().map(|&v| out.nonlinearity.apply(v)).collect() };
            pre.push(z);
            post.push(y);
        }
        Trace { pre, post }
    }

    pub fn forward(&self, x: &Tensor) -> Result<Tensor> {
        self.check_input(x)?;
        let mut t = self.trace(x);
        let (c, n) = self.output_shape();
        Ok(Tensor { channels: c, points: n, data: t.post.pop().unwrap() })
    }

    pub fn forward_batch(&self, xs: &[Tensor], exec: Exec) -> Result<Vec<Tensor>> {
        exec.map(xs, |x| self.forward(x)).into_iter().collect()
    }

    /// Mean squared error over the batch and every output entry.
    pub fn mse(&self, xs: &[Tensor], targets: &[Tensor]) -> Result<f64> {
        self.mse_with(xs, targets, Exec::Sequential)
    }

    pub fn mse_with(&self, xs: &[Tensor], targets: &[Tensor], exec: Exec) -> Result<f64> {
        let ys = self.forward_batch(xs, exec)?;
        let mut total = 0.0;
        let mut count = 0usize;
        for (y, t) in ys.iter().zip(targets) {
            if y.data.len() != t.data.len() {
                return Err(Error::ShapeMismatch("target shape differs from output".into()));
            }
            total += y.data.iter().zip(&t.data).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
            count += y.data.len();
        }
        Ok(if count == 0 { 0.0 } else { total / count as f64 })
    }

    /// Mean-squared-error loss and its gradient with respect to every free
    /// parameter. A tied weight's gradient is the sum of the dense gradient
    /// entries over its orbit cells.
    pub fn gradients(&self, xs: &[Tensor], targets: &[Tensor]) -> Result<(f64, Vec<LayerParams>)> {
        if xs.len() != targets.len() {
            return Err(Error::ShapeMismatch(format!("{} inputs but {} targets", xs.len(), targets.len())));
        }
        let (oc, on) = self.output_shape();
        let mut grads: Vec<LayerParams> = self.params.iter().map(LayerParams::zeros_like).collect();
        let scale = 1.0 / (xs.len().max(1) * oc * on) as f64;
        let last = self.layers.len() - 1;
        let mut loss = 0.0;
        for (x, t) in xs.iter().zip(targets) {
            self.check_input(x)?;
            if t.data.len() != oc * on {
                return Err(Error::ShapeMismatch("target shape differs from output".into()));
            }
            let tr = self.trace(x);
            let y = &tr.post[last];
            let mut delta: Vec<f64> = y.iter().zip(&t.data).map(|(a, b)| 2.0 * (a - b) * scale).collect();
            loss += y.iter().zip(&t.data).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() * scale;
            for l in (0..last).rev() {
                let (inp, out) = (&self.layers[l], &self.layers[l + 1]);
                let p = &self.patterns[l];
                let params = &self.params[l];
                let g = &mut grads[l];
                let (n_in, n_out, k, nb) = (inp.points(), out.points(), p.num_orbits, p.num_bias_orbits);
                if l + 1 != last {
                    let (z, a) = (&tr.pre[l + 1], &tr.post[l + 1]);
                    for (d, (&zv, &av)) in delta.iter_mut().zip(z.iter().zip(a)) {
                        *d *= out.nonlinearity.derivative(zv, av);
                    }
                }
                let h = &tr.post[l];
                let mut delta_in = vec![0.0; inp.channels * n_in];
                for c in 0..out.channels {
                    for o in 0..n_out {
                        let d = delta[c * n_out + o];
                        if d == 0.0 {
                            continue;
                        }
                        g.biases[c * nb + p.bias_orbit_of[o]] += d;
                        let orbits = &p.orbit_of[o];
                        for ci in 0..inp.channels {
                            let base = (c * inp.channels + ci) * k;
                            let hin = &h[ci * n_in..(ci + 1) * n_in];
                            let w = &params.weights[base..base + k];
                            let gw = &mut g.weights[base..base + k];
                            let din = &mut delta_in[ci * n_in..(ci + 1) * n_in];
                            for (i, &orb) in orbits.iter().enumerate() {
                                gw[orb] += d * hin[i];
                                din[i] += d * w[orb];
                            }
                        }
                    }
                }
                delta = delta_in;
            }
        }
        Ok((loss, grads))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::regular_action;
    use crate::group::{closure, Builtin};
    use std::sync::Arc;

    fn c4_net(seed: u64) -> EquivariantMLP {
        let g = Arc::new(Builtin::Cyclic(4).build().unwrap());
        let nat = GroupAction::natural(g.clone());
        let mut net = EquivariantMLP::new(vec![
            LayerSpec::new(nat.clone(), 1, Nonlinearity::Identity),
            LayerSpec::new(regular_action(&g), 3, Nonlinearity::Tanh),
            LayerSpec::new(nat, 1, Nonlinearity::Identity),
        ])
        .unwrap();
        net.init_uniform(seed);
        net
    }

    fn random_inputs(n: usize, points: usize, seed: u64) -> Vec<Tensor> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| Tensor::vector((0..points).map(|_| rng.gen_range(-1.0..1.0)).collect())).collect()
    }

    #[test]
    fn zero_net_outputs_zero() {
        let mut net = c4_net(1);
        let flat = vec![0.0; net.num_params()];
        net.set_params_flat(&flat).unwrap();
        let y = net.forward(&Tensor::vector(vec![1.0, -2.0, 3.0, 0.5])).unwrap();
        assert!(y.data.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn trivial_group_identity_layer() {
        let g = Arc::new(closure(3, &[]).unwrap());
        let a = GroupAction::natural(g);
        let mut net = EquivariantMLP::new(vec![
            LayerSpec::new(a.clone(), 1, Nonlinearity::Identity),
            LayerSpec::new(a, 1, Nonlinearity::Identity),
        ])
        .unwrap();
        let p = &net.patterns()[0];
        let mut w = vec![0.0; p.num_orbits];
        for i in 0..3 {
            w[p.orbit_of[i][i]] = 1.0;
        }
        net.params_mut()[0].weights = w;
        let x = Tensor::vector(vec![0.3, -1.0, 2.0]);
        assert_eq!(net.forward(&x).unwrap(), x);
    }

    #[test]
    fn c4_forward_commutes_with_shift() {
        let net = c4_net(11);
        let act = net.input_action().clone();
        let shift = act.group().generator_indices()[0];
        for x in random_inputs(100, 4, 5) {
            let lhs = net.forward(&x.permuted(&act, shift)).unwrap();
            let rhs = net.forward(&x).unwrap().permuted(net.output_action(), shift);
            assert!(lhs.max_abs_diff(&rhs) <= 1e-10);
        }
    }

    #[test]
    fn shape_errors() {
        let net = c4_net(1);
        assert!(matches!(net.forward(&Tensor::vector(vec![1.0; 3])), Err(Error::ShapeMismatch(_))));
        assert!(net.gradients(&[Tensor::vector(vec![0.0; 4])], &[]).is_err());
        assert!(EquivariantMLP::new(vec![]).is_err());
    }

    #[test]
    fn zero_target_zero_weights_zero_gradient() {
        let mut net = c4_net(1);
        net.set_params_flat(&vec![0.0; net.num_params()]).unwrap();
        let xs = random_inputs(5, 4, 9);
        let ts = vec![Tensor::vector(vec![0.0; 4]); 5];
        let (loss, g) = net.gradients(&xs, &ts).unwrap();
        assert_eq!(loss, 0.0);
        assert!(g.iter().all(|p| p.weights.iter().chain(&p.biases).all(|&v| v == 0.0)));
    }

    #[test]
    fn gradients_match_central_differences() {
        let net = c4_net(21);
        let xs = random_inputs(4, 4, 2);
        let ts = random_inputs(4, 4, 3);
        let (_, grads) = net.gradients(&xs, &ts).unwrap();
        let analytic: Vec<f64> = grads.iter().flat_map(|p| p.weights.iter().chain(&p.biases).copied()).collect();
        let base = net.params_flat();
        let h = 1e-5;
        let mut probe = net.clone();
        for k in 0..base.len() {
            let mut plus = base.clone();
            plus[k] += h;
            probe.set_params_flat(&plus).unwrap();
            let lp = probe.mse(&xs, &ts).unwrap();
            let mut minus = base.clone();
            minus[k] -= h;
            probe.set_params_flat(&minus).unwrap();
            let lm = probe.mse(&xs, &ts).unwrap();
            let fd = (lp - lm) / (2.0 * h);
            let rel = (fd - analytic[k]).abs() / fd.abs().max(analytic[k].abs()).max(1e-8);
            assert!(rel <= 1e-4 || (fd - analytic[k]).abs() < 1e-10, "param {k}: fd {fd} vs {}", analytic[k]);
        }
    }

    #[test]
    fn tied_gradient_sums_over_orbit_cells() {
        // single linear layer, loss-free check of d(sum of outputs)/dw
        let g = Arc::new(Builtin::Cyclic(4).build().unwrap());
        let nat = GroupAction::natural(g.clone());
        let one = GroupAction::trivial(g, 1);
        let net = EquivariantMLP::new(vec![
            LayerSpec::new(nat, 1, Nonlinearity::Identity),
            LayerSpec::new(one, 1, Nonlinearity::Identity),
        ])
        .unwrap();
        // one orbit of 4 cells; with target -1/2 and all-ones input, dL/dy = 2(0 + 1/2) = 1
        let x = Tensor::vector(vec![1.0; 4]);
        let t = Tensor::vector(vec![-0.5]);
        let (_, grads) = net.gradients(&[x], &[t]).unwrap();
        assert_eq!(net.patterns()[0].orbit_sizes(), vec![4]);
        assert_eq!(grads[0].weights, vec![4.0]);
        assert_eq!(grads[0].biases, vec![1.0]);
    }

    #[test]
    fn batch_forward_strategies_agree() {
        let net = c4_net(4);
        let xs = random_inputs(64, 4, 8);
        let a = net.forward_batch(&xs, Exec::Sequential).unwrap();
        let b = net.forward_batch(&xs, Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
