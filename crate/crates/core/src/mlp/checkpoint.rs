use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::action::{coset_space, regular_action, GroupAction};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::gset::diagonal_power;
use crate::perm::Permutation;
use crate::subgroup::Subgroup;

use super::net::{EquivariantMLP, LayerParams, LayerSpec, Nonlinearity};

/// How to rebuild a layer's action from its group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ActionDescriptor {
    Natural,
    Trivial { points: usize },
    Regular,
    /// Cosets of the subgroup generated by these permutations.
    Coset { generators: Vec<Vec<u32>> },
    Power { base: Box<ActionDescriptor>, d: usize },
}

impl ActionDescriptor {
    pub fn realize(&self, group: &Arc<FiniteGroup>, caps: &Caps) -> Result<GroupAction> {
        Ok(match self {
            ActionDescriptor::Natural => GroupAction::natural(group.clone()),
            ActionDescriptor::Trivial { points } => GroupAction::trivial(group.clone(), *points),
            ActionDescriptor::Regular => regular_action(group),
            ActionDescriptor::Coset { generators } => {
                let mut idx = Vec::with_capacity(generators.len());
                for g in generators {
                    let p = Permutation::new(g.clone())?;
                    idx.push(group.index_of(&p).ok_or_else(|| {
                        Error::NotASubgroup(format!("{p} is not an element of the group"))
                    })?);
                }
                coset_space(group, &Subgroup::generated_by(group, &idx))?
            }
            ActionDescriptor::Power { base, d } => diagonal_power(&base.realize(group, caps)?, *d, caps)?.action,
        })
    }

    /// Recognize the natural and trivial actions.
    fn infer(action: &GroupAction) -> Option<Self> {
        let group = action.group();
        if action.point_count() == group.degree() && action.raw_images() == GroupAction::natural(group.clone()).raw_images() {
            return Some(ActionDescriptor::Natural);
        }
        let n = action.point_count();
        let fixed = (0..group.order()).all(|g| (0..n).all(|i| action.act(g, i) == i));
        fixed.then_some(ActionDescriptor::Trivial { points: n })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerJson {
    pub action: ActionDescriptor,
    pub channels: usize,
    pub nonlinearity: Nonlinearity,
}

/// Serializable network: a group reference (a spec file path or a builtin
/// name such as `cyclic:6`), layer descriptions and free parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub group: String,
    pub layers: Vec<LayerJson>,
    pub params: Vec<LayerParams>,
}

impl Checkpoint {
    pub fn from_net(net: &EquivariantMLP, group: impl Into<String>) -> Result<Self> {
        let mut layers = Vec::with_capacity(net.layers().len());
        for (l, spec) in net.layers().iter().enumerate() {
            let action = match spec.descriptor() {
                Some(d) => d.clone(),
                None => ActionDescriptor::infer(&spec.action)
                    .ok_or_else(|| Error::Internal(format!("layer {l} has no action descriptor")))?,
            };
            layers.push(LayerJson { action, channels: spec.channels, nonlinearity: spec.nonlinearity });
        }
        Ok(Self { group: group.into(), layers, params: net.params().to_vec() })
    }

    /// Rebuild the network over an already resolved group.
    pub fn restore(&self, group: &Arc<FiniteGroup>, caps: &Caps) -> Result<EquivariantMLP> {
        let mut specs = Vec::with_capacity(self.layers.len());
        for l in &self.layers {
            let action = l.action.realize(group, caps)?;
            specs.push(LayerSpec::new(action, l.channels, l.nonlinearity).describe(l.action.clone()));
        }
        let mut net = EquivariantMLP::new(specs)?;
        net.set_params(self.params.clone())?;
        Ok(net)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Builtin;
    use crate::mlp::{build_regular_net, Tensor};

    #[test]
    fn round_trip() {
        let g = Arc::new(Builtin::Dihedral(4).build().unwrap());
        let nat = GroupAction::natural(g.clone());
        let mut net = build_regular_net(&nat, &GroupAction::trivial(g.clone(), 1), 2).unwrap();
        net.init_uniform(3);
        let ck = Checkpoint::from_net(&net, "dihedral:4").unwrap();
        assert_eq!(ck.layers[0].action, ActionDescriptor::Natural);
        assert_eq!(ck.layers[1].action, ActionDescriptor::Regular);
        assert_eq!(ck.layers[2].action, ActionDescriptor::Trivial { points: 1 });
        let json = serde_json::to_string(&ck).unwrap();
        let back: Checkpoint = serde_json::from_str(&json).unwrap();
        assert_eq!(back, ck);
        let net2 = back.restore(&g, &Caps::default()).unwrap();
        let x = Tensor::vector(vec![0.1, -0.4, 0.7, 0.2]);
        assert_eq!(net.forward(&x).unwrap(), net2.forward(&x).unwrap());
    }

    #[test]
    fn coset_and_power_descriptors() {
        let g = Arc::new(Builtin::Symmetric(3).build().unwrap());
        let caps = Caps::default();
        let c = ActionDescriptor::Coset { generators: vec![vec![1, 0, 2]] };
        assert_eq!(c.realize(&g, &caps).unwrap().point_count(), 3);
        let p = ActionDescriptor::Power { base: Box::new(ActionDescriptor::Natural), d: 2 };
        assert_eq!(p.realize(&g, &caps).unwrap().point_count(), 9);
        let bad = ActionDescriptor::Coset { generators: vec![vec![0, 1, 2, 3]] };
        assert!(bad.realize(&g, &caps).is_err());
    }
}
