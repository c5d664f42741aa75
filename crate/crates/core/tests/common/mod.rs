#![allow(dead_code)]

use std::f64::consts::PI;

use proptest::prelude::*;
use sqzsim_core::GaussianState;

#[derive(Debug, Clone)]
pub enum Op {
    Squeeze { mode: usize, r: f64, phase: f64 },
    Phase { mode: usize, theta: f64 },
    Couple { a: usize, b: usize, ratio: f64 },
    Loss { mode: usize, eta: f64 },
}

impl Op {
    pub fn apply(&self, state: &GaussianState) -> GaussianState {
        match *self {
            Op::Squeeze { mode, r, phase } => state.apply_squeezer(mode, r, phase),
            Op::Phase { mode, theta } => state.apply_phase_shift(mode, theta),
            Op::Couple { a, b, ratio } => state.apply_coupler(a, b, ratio),
            Op::Loss { mode, eta } => state.apply_loss(mode, eta),
        }
        .expect("generated operations are valid")
    }
}

pub fn op(n_modes: usize, max_r: f64) -> impl Strategy<Value = Op> {
    let modes = 0..n_modes;
    prop_oneof![
        (modes.clone(), 0.0..max_r, -PI..PI).prop_map(|(mode, r, phase)| Op::Squeeze {
            mode,
            r,
            phase
        }),
        (modes.clone(), -PI..PI).prop_map(|(mode, theta)| Op::Phase { mode, theta }),
        (modes.clone(), 1..n_modes.max(2), 0.0..=1.0).prop_map(move |(a, shift, ratio)| {
            if n_modes == 1 {
                Op::Phase {
                    mode: 0,
                    theta: ratio,
                }
            } else {
                Op::Couple {
                    a,
                    b: (a + shift) % n_modes,
                    ratio,
                }
            }
        }),
        (modes, 0.0..=1.0).prop_map(|(mode, eta)| Op::Loss { mode, eta }),
    ]
}

/// Random multimode states reached from vacuum by squeezers, phases, couplers and losses.
pub fn state(max_modes: usize, max_r: f64) -> impl Strategy<Value = GaussianState> {
    (1..=max_modes)
        .prop_flat_map(move |n| (Just(n), proptest::collection::vec(op(n, max_r), 0..8)))
        .prop_map(|(n, ops)| {
            ops.iter()
                .fold(GaussianState::vacuum(n).unwrap(), |s, op| op.apply(&s))
        })
}
