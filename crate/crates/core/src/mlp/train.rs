use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::action::GroupAction;
use crate::error::{Error, Result};

use super::net::{EquivariantMLP, Tensor};

/// Builtin regression targets.
#[derive(Debug, Clone)]
pub enum Target {
    /// Another network with the same input and output shapes.
    Frozen(Box<EquivariantMLP>),
    /// `ψ(x)_i = x_i² + x_{i+1 mod n}`, equivariant for cyclic shifts.
    ShiftSquare,
    /// `ψ(x) = Σ_i x_i²` on a single output point.
    SumOfSquares,
}

impl Target {
    pub fn name(&self) -> &'static str {
        match self {
            Target::Frozen(_) => "frozen",
            Target::ShiftSquare => "shift-square",
            Target::SumOfSquares => "sum-of-squares",
        }
    }

    pub fn eval(&self, x: &Tensor) -> Result<Tensor> {
        match self {
            Target::Frozen(net) => net.forward(x),
            Target::ShiftSquare => {
                let n = x.points;
                let data = (0..x.channels)
                    .flat_map(|c| {
                        let v = x.channel(c);
                        (0..n).map(move |i| v[i] * v[i] + v[(i + 1) % n])
                    })
                    .collect();
                Tensor::from_vec(x.channels, n, data)
            }
            Target::SumOfSquares => {
                let data = (0..x.channels).map(|c| x.channel(c).iter().map(|v| v * v).sum()).collect();
                Tensor::from_vec(x.channels, 1, data)
            }
        }
    }

    /// Largest `|ψ(A_g x) − B_g ψ(x)|` over generators and a few seeded
    /// inputs from the unit box.
    pub fn equivariance_defect(&self, input: &GroupAction, output: &GroupAction, channels: usize) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let n = input.point_count();
        let mut worst = 0.0f64;
        for _ in 0..8 {
            let x = Tensor::from_vec(channels, n, (0..channels * n).map(|_| rng.gen_range(-1.0..1.0)).collect())?;
            let y = self.eval(&x)?;
            if y.points != output.point_count() {
                return Err(Error::ShapeMismatch(format!(
                    "target has {} output points, network has {}",
                    y.points,
                    output.point_count()
                )));
            }
            for &g in input.group().generator_indices() {
                let lhs = self.eval(&x.permuted(input, g))?;
                worst = worst.max(lhs.max_abs_diff(&y.permuted(output, g)));
            }
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Optimizer {
    Sgd,
    Momentum { beta: f64 },
}

/// Learning-rate schedule over epochs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    #[default]
    Constant,
    /// Half-cosine decay from the base rate to zero at the last epoch.
    Cosine,
}

impl Schedule {
    fn rate(self, base: f64, epoch: usize, epochs: usize) -> f64 {
        match self {
            Schedule::Constant => base,
            Schedule::Cosine => 0.5 * base * (1.0 + (std::f64::consts::PI * epoch as f64 / epochs as f64).cos()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub seed: u64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub train_samples: usize,
    pub test_samples: usize,
    /// Per-coordinate sampling interval; a single entry applies to every coordinate.
    pub bounds: Vec<(f64, f64)>,
    pub optimizer: Optimizer,
    #[serde(default)]
    pub schedule: Schedule,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            learning_rate: 0.05,
            epochs: 500,
            batch_size: 32,
            train_samples: 512,
            test_samples: 512,
            bounds: vec![(-1.0, 1.0)],
            optimizer: Optimizer::Momentum { beta: 0.9 },
            schedule: Schedule::Constant,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub final_mse: f64,
    pub heldout_mse: f64,
    /// Training-set MSE after each epoch.
    pub loss_curve: Vec<f64>,
}

fn sample(cfg: &TrainConfig, seed: u64, count: usize, channels: usize, points: usize) -> Result<Vec<Tensor>> {
    let dim = channels * points;
    if cfg.bounds.len() != 1 && cfg.bounds.len() != dim {
        return Err(Error::LengthMismatch { what: "bounds", expected: dim, got: cfg.bounds.len() });
    }
    if cfg.bounds.iter().any(|&(lo, hi)| !lo.is_finite() || !hi.is_finite() || lo >= hi) {
        return Err(Error::RangeError("every bound needs lo < hi".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let data = (0..dim)
                .map(|k| {
                    let (lo, hi) = cfg.bounds[if cfg.bounds.len() == 1 { 0 } else { k }];
                    rng.gen_range(lo..hi)
                })
                .collect();
            Tensor::from_vec(channels, points, data)
        })
        .collect()
}

/// Minibatch gradient descent on mean squared error. The training set is
/// drawn from `seed`, the held-out set from `seed + 1`.
pub fn train(net: &mut EquivariantMLP, target: &Target, cfg: &TrainConfig) -> Result<TrainReport> {
    let (ci, ni) = net.input_shape();
    let defect = target.equivariance_defect(net.input_action(), net.output_action(), ci)?;
    if defect > 1e-8 {
        return Err(Error::TargetNotEquivariant { deviation: defect });
    }
    if cfg.batch_size == 0 || cfg.train_samples == 0 {
        return Err(Error::RangeError("batch size and train samples must be positive".into()));
    }
    let xs = sample(cfg, cfg.seed, cfg.train_samples, ci, ni)?;
    let ts = xs.iter().map(|x| target.eval(x)).collect::<Result<Vec<_>>>()?;
    if ts.first().map(|t| (t.channels, t.points)) != Some(net.output_shape()) {
        return Err(Error::ShapeMismatch("target shape differs from network output".into()));
    }
    let hx = sample(cfg, cfg.seed.wrapping_add(1), cfg.test_samples, ci, ni)?;
    let ht = hx.iter().map(|x| target.eval(x)).collect::<Result<Vec<_>>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut order: Vec<usize> = (0..xs.len()).collect();
    let mut velocity = vec![0.0; net.num_params()];
    let mut params = net.params_flat();
    let mut curve = Vec::with_capacity(cfg.epochs);
    let mut bx = Vec::with_capacity(cfg.batch_size);
    let mut bt = Vec::with_capacity(cfg.batch_size);
    for epoch in 0..cfg.epochs {
        let lr = cfg.schedule.rate(cfg.learning_rate, epoch, cfg.epochs);
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            bx.clear();
            bt.clear();
            bx.extend(chunk.iter().map(|&k| xs[k].clone()));
            bt.extend(chunk.iter().map(|&k| ts[k].clone()));
            let (loss, grads) = net.gradients(&bx, &bt)?;
            epoch_loss += loss * chunk.len() as f64;
            let flat = grads.iter().flat_map(|p| p.weights.iter().chain(&p.biases).copied());
            match cfg.optimizer {
                Optimizer::Sgd => {
                    for (p, g) in params.iter_mut().zip(flat) {
                        *p -= lr * g;
                    }
                }
                Optimizer::Momentum { beta } => {
                    for ((p, v), g) in params.iter_mut().zip(velocity.iter_mut()).zip(flat) {
                        *v = beta * *v + g;
                        *p -= lr * *v;
                    }
                }
            }
            net.set_params_flat(&params)?;
        }
        let epoch_loss = epoch_loss / xs.len() as f64;
        if !epoch_loss.is_finite() {
            return Err(Error::RangeError("training diverged".into()));
        }
        curve.push(epoch_loss);
    }
    Ok(TrainReport { final_mse: net.mse(&xs, &ts)?, heldout_mse: net.mse(&hx, &ht)?, loss_curve: curve })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Builtin;
    use crate::mlp::build_regular_net;
    use std::sync::Arc;

    fn c3() -> GroupAction {
        GroupAction::natural(Arc::new(Builtin::Cyclic(3).build().unwrap()))
    }

    #[test]
    fn targets_equivariance() {
        let a = c3();
        assert!(Target::ShiftSquare.equivariance_defect(&a, &a, 1).unwrap() < 1e-12);
        let g = Arc::new(Builtin::Symmetric(3).build().unwrap());
        let s = GroupAction::natural(g);
        assert!(Target::ShiftSquare.equivariance_defect(&s, &s, 1).unwrap() > 1e-3);
    }

    #[test]
    fn non_equivariant_target_rejected() {
        let g = Arc::new(Builtin::Symmetric(3).build().unwrap());
        let s = GroupAction::natural(g);
        let mut net = build_regular_net(&s, &s, 2).unwrap();
        let r = train(&mut net, &Target::ShiftSquare, &TrainConfig { epochs: 1, ..TrainConfig::default() });
        assert!(matches!(r, Err(Error::TargetNotEquivariant { .. })));
    }

    #[test]
    fn deterministic_and_decreasing() {
        let a = c3();
        let cfg = TrainConfig { epochs: 30, train_samples: 64, test_samples: 64, ..TrainConfig::default() };
        let run = || {
            let mut net = build_regular_net(&a, &a, 4).unwrap();
            net.init_uniform(1);
            train(&mut net, &Target::ShiftSquare, &cfg).unwrap()
        };
        let r1 = run();
        let r2 = run();
        assert_eq!(r1, r2);
        assert!(r1.loss_curve.last().unwrap() < &r1.loss_curve[0]);
    }

    #[test]
    fn frozen_target_is_realizable() {
        let a = c3();
        let mut teacher = build_regular_net(&a, &a, 2).unwrap();
        teacher.init_uniform(99);
        let mut student = build_regular_net(&a, &a, 2).unwrap();
        student.init_uniform(5);
        let cfg = TrainConfig { epochs: 300, train_samples: 128, test_samples: 64, ..TrainConfig::default() };
        let r = train(&mut student, &Target::Frozen(Box::new(teacher)), &cfg).unwrap();
        assert!(r.heldout_mse < 1e-4, "{r:?}");
    }
}
