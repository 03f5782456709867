//! Model parameters, reservoir laws and the two collision maps shared by the
//! particle engine and the Fourier engine.

mod collision;
mod params;
mod record;
mod thermostat;

pub use collision::{pair_collision, thermostat_collision};
pub use params::KacParams;
pub use record::MomentRecord;
pub use thermostat::{Law1d, ThermostatKind, ThermostatSpec};
