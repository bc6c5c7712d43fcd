//! Benchmark fixtures shared by the criterion benches.

use nozzleflow_core::initial::{initial_state, InitialData};
use nozzleflow_core::scheme::{SchemeParams, StepState};
use nozzleflow_core::{mu_sigma, GasConstants, Geometry, NozzleProfile};

/// Laval nozzle (`h = 2`) with a Riemann datum at `x = -0.75`, on `[-1, 1]`.
pub fn laval_riemann(dx: f64) -> (SchemeParams, NozzleProfile, StepState) {
    let c = GasConstants::new(1.4).unwrap();
    let mu = mu_sigma(&c).unwrap().mu;
    let profile = NozzleProfile::with_derived_b(Geometry::Laval { h: 2.0, x_cut: 0.5 }, mu, dx).unwrap();
    let data = InitialData::Riemann {
        x0: -0.75,
        left: (2.0, 0.0),
        right: (0.2, 1.0),
    };
    let m = data.auto_m(-1.0, 1.0, dx, &profile, &c).unwrap();
    let params = SchemeParams::new(c, dx, m, 0.2, &profile).unwrap();
    let (s0, _) = initial_state(&data, -1.0, 1.0, &params, &profile).unwrap();
    (params, profile, s0)
}
