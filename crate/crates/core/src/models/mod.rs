//! Closed-form model recipes: α-stable truncations with Hardy potentials,
//! one-dimensional diffusions, the inversion map and the cut-off energies.

pub mod diffusion;
pub mod inversion;
pub mod special;
pub mod stable;
pub mod test_function;

pub use diffusion::{
    build_diffusion_model, DiffusionRecipe, DiffusionSystem, GeometricGrid, Scale,
};
pub use inversion::{inversion_map_check, InversionReport};
pub use special::{
    critical_potential, delta_star, gamma, kappa, kappa_star, riesz_green, stable_constant,
};
pub use stable::{
    build_stable_model, build_stable_system, build_transformed_model, compare_transform,
    stable_exhaustion, RadialPower, StableRecipe, StableSystem,
};
pub use test_function::{test_function_energy, TestFunctionEnergy};
