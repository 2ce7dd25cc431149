//! Shared fixtures for the criterion benches.

use mnv_core::flows::{FlowConfig, FlowState};
use mnv_core::sample::random_smooth_field;
use mnv_core::weierstrass::clifford_torus;
use mnv_core::{GridField, PeriodicLattice, SpinCharacter};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const RESOLUTIONS: [usize; 3] = [32, 64, 128];

pub fn smooth_field(n: usize, seed: u64) -> GridField {
    let l = PeriodicLattice::square_2pi(n, n).expect("even resolution");
    random_smooth_field(
        l,
        SpinCharacter::TRIVIAL,
        n as f64 / 4.0,
        &mut ChaCha8Rng::seed_from_u64(seed),
    )
}

pub fn clifford_state(n: usize, config: &FlowConfig) -> FlowState {
    let (data, _, _) = clifford_torus(n, n).expect("even resolution");
    FlowState::new(data, config)
}
