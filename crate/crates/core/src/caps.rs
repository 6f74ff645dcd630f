/// Size guards for the enumerations in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest group order `closure` will enumerate.
    pub order: usize,
    /// Largest group order for subgroup-lattice enumeration.
    pub lattice: usize,
    /// Largest point count of an explicitly materialized product G-set.
    pub explicit_points: usize,
}

pub const ORDER_CAP_ENV: &str = "EQV_ORDER_CAP";
pub const LATTICE_CAP_ENV: &str = "EQV_LATTICE_CAP";
pub const EXPLICIT_CAP_ENV: &str = "EQV_EXPLICIT_CAP";

impl Default for Caps {
    fn default() -> Self {
        Self { order: 10_080, lattice: 2_000, explicit_points: 10_000_000 }
    }
}

impl Caps {
    /// Defaults, overridden by `EQV_ORDER_CAP`, `EQV_LATTICE_CAP` and
    /// `EQV_EXPLICIT_CAP` when set to a valid integer.
    pub fn from_env() -> Self {
        fn read(var: &str, fallback: usize) -> usize {
            std::env::var(var).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(fallback)
        }
        let d = Self::default();
        Self {
            order: read(ORDER_CAP_ENV, d.order),
            lattice: read(LATTICE_CAP_ENV, d.lattice),
            explicit_points: read(EXPLICIT_CAP_ENV, d.explicit_points),
        }
    }
}
