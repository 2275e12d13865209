#![allow(dead_code)]

use std::sync::Arc;

use hubbard_scatter::basis::{enumerate_sector, ManyBodyState, SectorBasis, Spin};
use hubbard_scatter::hamiltonian::{build_hubbard, HubbardParams};
use hubbard_scatter::propagator::{evolve_series, Observable, DEFAULT_TOL};
use hubbard_scatter::sparse::SparseOperator;
use hubbard_scatter::wavepacket::{product_state, WavepacketSpec};

pub struct Lattice {
    pub basis: Arc<SectorBasis>,
    pub h: SparseOperator,
    pub psi: ManyBodyState,
}

/// Ring of `sites` sites holding the given packets, interaction `u`, κ = 1.
pub fn ring_with_packets(sites: usize, packets: &[WavepacketSpec], u: f64) -> Lattice {
    let n_up = packets.iter().filter(|p| p.spin == Spin::Up).count();
    let basis = enumerate_sector(sites, n_up, packets.len() - n_up).unwrap();
    let h = build_hubbard(&basis, &HubbardParams::ring(1.0, u)).unwrap();
    let psi = product_state(packets, &basis).unwrap();
    Lattice { basis, h, psi }
}

/// Largest value of `f` along the trajectory, sampled on `times`.
pub fn peak_along<F>(lat: &Lattice, times: &[f64], f: F) -> (f64, f64)
where
    F: Fn(&ManyBodyState) -> f64 + Send + Sync,
{
    let obs = [Observable::new("f", f)];
    let series = evolve_series(&lat.h, &lat.psi, times, &obs, DEFAULT_TOL).unwrap();
    let col = series.column("f").unwrap();
    let (i, v) = col.iter().enumerate().fold((0, f64::MIN), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    (times[i], v)
}

pub fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step).round() as usize;
    (0..=n).map(|i| start + step * i as f64).collect()
}

pub fn report(id: u32, name: &str, pass: bool, detail: &str) {
    println!("criterion {id} [{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
}
