//! Finite permutation groups, Burnside's table of marks, and parameter-sharing
//! equivariant networks.
//!
//! The crate is organised bottom-up:
//!
//! * [`perm`], [`group`], [`subgroup`], [`action`]: permutations, groups
//!   enumerated from generators, subgroups, and group actions (orbits,
//!   stabilizers, kernels, cores, normalizers, coset spaces).
//! * [`lattice`]: every subgroup, grouped into conjugacy classes.
//! * [`burnside`]: marks, the table of marks, and exact Burnside-ring
//!   arithmetic on G-sets.
//! * [`gset`]: explicit unions and diagonal powers with brute-force orbit
//!   decomposition, used to cross-check [`burnside`].
//! * [`sharing`]: parameter-sharing patterns for equivariant linear maps.
//! * [`mlp`]: tied-weight equivariant MLPs, the symmetrization construction,
//!   and a small SGD trainer.
//!
//! Data-parallel loops go through [`exec::Exec`]; with the default `parallel`
//! feature they run on rayon, otherwise sequentially.

pub mod action;
pub mod burnside;
pub mod caps;
pub mod error;
pub mod exec;
pub mod group;
pub mod gset;
pub mod lattice;
pub mod mlp;
pub mod perm;
pub mod sharing;
pub mod subgroup;

pub use action::{coset_space, regular_action, ActionProperties, GroupAction};
pub use burnside::{table_of_marks, GSetExpr, MarkVector, RegularOrbitReport, TableOfMarks};
pub use caps::Caps;
pub use error::{Error, Result};
pub use exec::Exec;
pub use group::{closure, Builtin, FiniteGroup, GroupSpec};
pub use lattice::{ConjugacyClass, SubgroupLattice};
pub use perm::Permutation;
pub use sharing::SharingPattern;
pub use subgroup::{core, normalizer, Subgroup};
