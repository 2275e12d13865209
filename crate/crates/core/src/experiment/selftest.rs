//! Fast invariant checks run by `hubbard-scatter selftest`.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::basis::{enumerate_sector, ManyBodyState, Spin};
use crate::bethe::{chain_amplitudes, ScatteringParams};
use crate::hamiltonian::{
    build_equivalent_chain, build_hubbard, build_k_subspace_basis, symmetry_residuals, ChainGeometry, Channel,
    HubbardParams, Momentum,
};
use crate::propagator::evolve;
use crate::sparse::hermitian_eigenvalues;
use crate::spin::{
    cascade, equal_spacing_schedule, heisenberg_gate, pair_smatrix, single_vs_train_amplitudes, SpinTrainState,
};
use crate::wavepacket::{product_state, WavepacketSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub limit: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value <= self.limit
    }
}

fn symmetries() -> f64 {
    let sector = enumerate_sector(7, 2, 2).expect("valid sector");
    symmetry_residuals(&sector, &HubbardParams::ring(1.0, 2.5)).map(|r| r.max()).unwrap_or(f64::INFINITY)
}

fn chain_blocks() -> f64 {
    let (sites, u) = (11, 1.7);
    let full = build_hubbard(&enumerate_sector(sites, 1, 1).expect("valid sector"), &HubbardParams::ring(1.0, u))
        .expect("valid operator");
    let mut worst: f64 = 0.0;
    for n in 0..sites as i64 {
        let k = Momentum::from_index(sites, n);
        for channel in [Channel::Singlet, Channel::Triplet(0)] {
            let projected = build_k_subspace_basis(sites, k, channel).and_then(|b| b.project(&full));
            let chain = build_equivalent_chain(k.value, 1.0, u, sites, channel, ChainGeometry::RingExact);
            match (projected, chain) {
                (Ok(p), Ok(c)) => {
                    let a = hermitian_eigenvalues(p);
                    let b = hermitian_eigenvalues(c.to_dense());
                    if a.len() != b.len() {
                        return f64::INFINITY;
                    }
                    worst = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(worst, f64::max);
                }
                _ => return f64::INFINITY,
            }
        }
    }
    worst
}

fn propagator_vs_dense() -> f64 {
    let basis = enumerate_sector(6, 1, 1).expect("valid sector");
    let h = build_hubbard(&basis, &HubbardParams::ring(1.0, 3.0)).expect("valid operator");
    let psi = ManyBodyState::basis_state(&basis, 7);
    let t = 2.3;
    let exact = (h.to_dense() * Complex64::new(0.0, -t)).exp() * DVector::from_column_slice(psi.amplitudes());
    let out = evolve(&h, &psi, t, 1e-12).expect("valid propagation");
    out.amplitudes().iter().zip(exact.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}

fn norm_drift() -> f64 {
    let basis = enumerate_sector(31, 1, 1).expect("valid sector");
    let h = build_hubbard(&basis, &HubbardParams::ring(1.0, 4.0)).expect("valid operator");
    let specs = [
        WavepacketSpec::new(8.0, 0.5, PI / 2.0, Spin::Up),
        WavepacketSpec::new(22.0, 0.5, -PI / 2.0, Spin::Down),
    ];
    let psi = product_state(&specs, &basis).expect("valid packets");
    let t = 10.0;
    (evolve(&h, &psi, t, 1e-10).expect("valid propagation").norm() - 1.0).abs() / t
}

fn bethe_residual() -> f64 {
    let (k, u, m) = (PI / 3.0, 1.0, 120);
    let p = ScatteringParams::new(1.0, u, 0.0, k).expect("valid parameters");
    let h = build_equivalent_chain(0.0, 1.0, u, m, Channel::Singlet, ChainGeometry::SemiInfinite).expect("valid chain");
    let f = chain_amplitudes(k, p.reflection, m).expect("valid momentum");
    let hf = h.apply(&f);
    (0..m - 1).map(|j| (hf[j] - p.energy * f[j]).norm()).fold(0.0, f64::max)
}

fn smatrix_identity() -> f64 {
    (0..100)
        .map(|i| {
            let theta = -PI + 2.0 * PI * (i as f64 + 0.5) / 100.0;
            let rhs = heisenberg_gate(theta - PI) * Complex64::from_polar(1.0, (theta - PI) / 4.0);
            (pair_smatrix(theta) - rhs).iter().map(|x| x.norm()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

fn cascade_closed_form() -> f64 {
    let mut worst: f64 = 0.0;
    for n in 1..=6 {
        let init = SpinTrainState::product(&[Spin::Up], &vec![Spin::Down; n]).expect("valid train");
        let sched = equal_spacing_schedule(1, n).expect("valid schedule");
        let out = cascade(&init, &sched, 1.1).expect("valid cascade");
        for (j, want) in single_vs_train_amplitudes(n, 1.1).expect("n ≥ 1").iter().enumerate() {
            let mut slots = vec![Spin::Down; n + 1];
            slots[j] = Spin::Up;
            worst = worst.max((out.amplitude(&slots) - want).norm());
        }
    }
    worst
}

/// Every check with its measured value and limit.
pub fn run_all() -> Vec<Check> {
    vec![
        Check { name: "symmetry commutators (L=7)", value: symmetries(), limit: 1e-12 },
        Check { name: "equivalent chains vs projected blocks (L=11)", value: chain_blocks(), limit: 1e-10 },
        Check { name: "Chebyshev vs dense exponential", value: propagator_vs_dense(), limit: 1e-8 },
        Check { name: "norm drift per unit time", value: norm_drift(), limit: 1e-10 },
        Check { name: "Bethe state residual on the chain", value: bethe_residual(), limit: 1e-10 },
        Check { name: "S-matrix vs Heisenberg gate", value: smatrix_identity(), limit: 1e-14 },
        Check { name: "cascade vs closed form", value: cascade_closed_form(), limit: 1e-12 },
    ]
}
