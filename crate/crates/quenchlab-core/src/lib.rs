//! Numerical engine for domain-wall quenches in the Luttinger model:
//! renormalized dispersions, wall profiles, the oscillatory principal-value
//! quadrature they feed, and the density/current/correlator observables
//! built on top.

pub mod dispersion;
pub mod field;
pub mod finitesize;
pub mod gology;
pub mod observables;
pub mod quad;
pub mod steady;

pub use dispersion::{DispersionError, DispersionProfile, PotentialFamily, PotentialSpec};
pub use field::{FieldError, WallMode, WallProfile};
pub use finitesize::{FiniteSetup, FiniteSizeError, GroundEnergyShift, ThermoGap};
pub use gology::{GologyError, GologySpec, TestField, WindingNumbers};
pub use observables::{Chirality, CorrelatorValue, ObservableError, QuenchSetup};
pub use quad::{OscillatoryKernel, OscillatoryMethod, QuadError, QuadratureSpec};
pub use steady::{ConvergenceReport, SteadyError, SteadyState};
