use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use anyhow::{anyhow, Context, Result};
use eqv_core::gset::diagonal_power;
use eqv_core::lattice::SubgroupLattice;
use eqv_core::{coset_space, regular_action, Builtin, Caps, Error, FiniteGroup, GroupAction, GroupSpec};
use serde::de::DeserializeOwned;

use crate::GroupArg;

/// Malformed input that is not a JSON error (bad action syntax and the like).
#[derive(Debug)]
pub struct BadInput(pub String);

impl std::fmt::Display for BadInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for BadInput {}

pub fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<serde_json::Error>().is_some() || err.downcast_ref::<BadInput>().is_some() {
        return 2;
    }
    if err.downcast_ref::<std::io::Error>().is_some() {
        return 2;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::OrderCapExceeded { .. } | Error::LatticeCapExceeded { .. }) => 3,
        Some(Error::SizeCapExceeded { .. }) => 4,
        Some(Error::UnfaithfulAction { .. } | Error::UnfaithfulInput) => 5,
        Some(Error::InvalidPermutation(_) | Error::ZeroDegree | Error::DegreeMismatch { .. }) => 2,
        _ => 1,
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

pub struct LoadedGroup {
    pub group: Arc<FiniteGroup>,
    /// How to find the group again: the spec path or the builtin name.
    pub reference: String,
}

pub fn load_group(arg: &GroupArg, caps: &Caps) -> Result<LoadedGroup> {
    let (spec, reference) = match (&arg.spec, &arg.builtin) {
        (_, Some(name)) => {
            let b = Builtin::from_str(name).map_err(|e| BadInput(e.to_string()))?;
            (b.spec(), name.clone())
        }
        (Some(path), None) => (read_json::<GroupSpec>(path)?, path.display().to_string()),
        (None, None) => return Err(anyhow!(BadInput("no group given".into()))),
    };
    let group = spec.build(caps).context("building group")?;
    Ok(LoadedGroup { group: Arc::new(group), reference })
}

/// Parses `natural`, `trivial:n`, `regular`, `coset:<class>` or `power:<d>`.
pub fn parse_action(text: &str, group: &Arc<FiniteGroup>, caps: &Caps) -> Result<GroupAction> {
    let (kind, arg) = match text.split_once(':') {
        Some((k, a)) => (k.trim(), Some(a.trim())),
        None => (text.trim(), None),
    };
    let number = |a: Option<&str>| -> Result<usize> {
        a.and_then(|s| s.parse().ok()).ok_or_else(|| anyhow!(BadInput(format!("{kind} needs a number: {text:?}"))))
    };
    Ok(match kind {
        "natural" => GroupAction::natural(group.clone()),
        "regular" => regular_action(group),
        "trivial" => GroupAction::trivial(group.clone(), number(arg)?),
        "power" => diagonal_power(&GroupAction::natural(group.clone()), number(arg)?, caps)?.action,
        "coset" => {
            let key = arg.ok_or_else(|| BadInput(format!("coset needs a class: {text:?}")))?;
            let lattice = SubgroupLattice::build(group, caps)?;
            let class = lattice
                .find_class(key)
                .ok_or_else(|| BadInput(format!("no subgroup class {key:?}; classes are {:?}", lattice.labels())))?;
            coset_space(group, lattice.representative(class))?
        }
        _ => return Err(anyhow!(BadInput(format!("unknown action {text:?}")))),
    })
}
