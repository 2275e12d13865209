//! Comparisons between lattice states and the factorized prediction, and
//! spin observables read off separated particles.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;

use crate::basis::{bits, ManyBodyState, SectorBasis, Spin};
use crate::error::{Error, Result};
use crate::spin::SpinMatrix;
use crate::wavepacket::{analytic_post_collision, WavepacketSpec};

/// Smallest separated probability accepted by [`spin_reduced_dm`].
pub const MIN_SEPARATED_PROBABILITY: f64 = 0.99;

/// Overlap modulus `|⟨a|b⟩| / (‖a‖ ‖b‖)`.
pub fn fidelity(a: &ManyBodyState, b: &ManyBodyState) -> Result<f64> {
    let ov = a.inner(b)?;
    let norms = a.norm_sqr() * b.norm_sqr();
    if norms == 0.0 {
        return Err(Error::Degenerate("fidelity of a zero state".into()));
    }
    Ok(ov.norm() / norms.sqrt())
}

/// Factorized prediction for two packets after a collision with angle `θ`.
pub fn build_target_state(
    left: &WavepacketSpec,
    right: &WavepacketSpec,
    theta: f64,
    final_centers: (f64, f64),
    basis: &Arc<SectorBasis>,
) -> Result<ManyBodyState> {
    analytic_post_collision(left, right, Complex64::from_polar(1.0, theta), final_centers, basis)
}

/// Positions on the ring measured from `origin`; sites with offset below
/// `boundary` form region A, the rest region B.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SiteCut {
    pub origin: usize,
    pub boundary: usize,
}

impl SiteCut {
    pub fn offset(&self, site: usize, sites: usize) -> usize {
        (site + sites - self.origin % sites) % sites
    }

    pub fn in_a(&self, site: usize, sites: usize) -> bool {
        self.offset(site, sites) < self.boundary
    }

    /// Cut at the two midpoints between expected centers `first` and
    /// `second`; region A is the arc around `first`.
    pub fn around(first: f64, second: f64, sites: usize) -> SiteCut {
        let l = sites as f64;
        let d = (second - first).rem_euclid(l);
        let forward = first + d / 2.0;
        let backward = first - (l - d) / 2.0;
        let start = backward.ceil();
        let boundary = (forward.ceil() - start).clamp(0.0, l) as usize;
        SiteCut { origin: start.rem_euclid(l) as usize % sites, boundary }
    }
}

/// Particles of a configuration as `(site, spin)` in creation-operator order.
fn canonical_particles(up: u128, down: u128) -> Vec<(usize, Spin)> {
    bits(up).map(|s| (s, Spin::Up)).chain(bits(down).map(|s| (s, Spin::Down))).collect()
}

fn spin_bit(s: Spin) -> usize {
    usize::from(s == Spin::Down)
}

/// Two-spin density matrix of a separated pair.
#[derive(Clone, Debug, PartialEq)]
pub struct PairSpinState {
    /// Over `|σ_A σ_B⟩`, ordered `↑↑, ↑↓, ↓↑, ↓↓`, normalized to unit trace.
    pub rho: SpinMatrix,
    /// Probability of exactly one particle in each region.
    pub separated_probability: f64,
}

/// Reduced spin state of a two-particle wavefunction, one particle per region.
pub fn spin_reduced_dm(psi: &ManyBodyState, cut: SiteCut) -> Result<PairSpinState> {
    let basis = psi.basis();
    let l = basis.sites();
    if basis.n_up() + basis.n_down() != 2 {
        return Err(Error::BasisMismatch { expected: "two-particle sector".into(), found: basis.to_string() });
    }
    // amplitude table ψ_{σ_A σ_B}(x_A, x_B)
    let mut table: BTreeMap<(usize, usize), [Complex64; 4]> = BTreeMap::new();
    let mut separated = 0.0;
    for (cfg, amp) in basis.configs().zip(psi.amplitudes()) {
        let parts = canonical_particles(cfg.mask(Spin::Up), cfg.mask(Spin::Down));
        let (p, q) = (parts[0], parts[1]);
        let (a, b, sign) = match (cut.in_a(p.0, l), cut.in_a(q.0, l)) {
            (true, false) => (p, q, 1.0),
            (false, true) => (q, p, -1.0),
            _ => continue,
        };
        separated += amp.norm_sqr();
        let entry = table.entry((a.0, b.0)).or_insert([Complex64::new(0.0, 0.0); 4]);
        entry[2 * spin_bit(a.1) + spin_bit(b.1)] += amp * sign;
    }
    if separated < MIN_SEPARATED_PROBABILITY * psi.norm_sqr() {
        return Err(Error::NumericContract(format!(
            "only {separated:.4} of the state has one particle on each side of the cut"
        )));
    }
    let mut rho = SpinMatrix::zeros();
    for amps in table.values() {
        for i in 0..4 {
            for j in 0..4 {
                rho[(i, j)] += amps[i] * amps[j].conj();
            }
        }
    }
    rho /= Complex64::new(separated, 0.0);
    Ok(PairSpinState { rho, separated_probability: separated / psi.norm_sqr() })
}

/// Probability of each spin string read in position order from `origin`,
/// `U` for `↑` and `D` for `↓`.
pub fn spin_configuration_probabilities(psi: &ManyBodyState, origin: usize) -> BTreeMap<String, f64> {
    let basis = psi.basis();
    let l = basis.sites();
    let cut = SiteCut { origin, boundary: 0 };
    let mut out = BTreeMap::new();
    for (cfg, amp) in basis.configs().zip(psi.amplitudes()) {
        let mut parts = canonical_particles(cfg.mask(Spin::Up), cfg.mask(Spin::Down));
        parts.sort_by_key(|&(site, spin)| (cut.offset(site, l), spin_bit(spin)));
        let key: String = parts.iter().map(|&(_, s)| if s == Spin::Up { 'U' } else { 'D' }).collect();
        *out.entry(key).or_insert(0.0) += amp.norm_sqr();
    }
    let total = psi.norm_sqr();
    if total > 0.0 {
        out.values_mut().for_each(|v| *v /= total);
    }
    out
}

fn sigma_yy() -> SpinMatrix {
    // σ_y ⊗ σ_y is real: anti-diagonal (−1, 1, 1, −1)
    let mut m = SpinMatrix::zeros();
    m[(0, 3)] = Complex64::new(-1.0, 0.0);
    m[(1, 2)] = Complex64::new(1.0, 0.0);
    m[(2, 1)] = Complex64::new(1.0, 0.0);
    m[(3, 0)] = Complex64::new(-1.0, 0.0);
    m
}

fn check_density(rho: &SpinMatrix) -> Result<SymmetricEigen<Complex64, nalgebra::U4>> {
    let dev = (rho - rho.adjoint()).iter().map(|x| x.norm()).fold(0.0, f64::max);
    if dev > 1e-10 {
        return Err(Error::DensityMatrix(format!("not Hermitian (deviation {dev:.2e})")));
    }
    let tr = rho.trace();
    if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
        return Err(Error::DensityMatrix(format!("trace {tr} is not 1")));
    }
    let eig = SymmetricEigen::new(*rho);
    if let Some(bad) = eig.eigenvalues.iter().find(|&&e| e < -1e-10) {
        return Err(Error::DensityMatrix(format!("negative eigenvalue {bad:.3e}")));
    }
    Ok(eig)
}

/// Eigenvalues of `√ρ ρ̃ √ρ` below this are rounding noise.
const EIGEN_FLOOR: f64 = 1e-13;

/// Wootters concurrence of a two-qubit density matrix.
pub fn concurrence(rho: &SpinMatrix) -> Result<f64> {
    let eig = check_density(rho)?;
    let roots = eig.eigenvalues.map(|e| Complex64::new(e.max(0.0).sqrt(), 0.0));
    let sqrt_rho: SpinMatrix =
        eig.eigenvectors * Matrix4::from_diagonal(&roots) * eig.eigenvectors.adjoint();
    let yy = sigma_yy();
    let tilde = yy * rho.conjugate() * yy;
    let m = sqrt_rho * tilde * sqrt_rho;
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut l: Vec<f64> = SymmetricEigen::new(herm).eigenvalues.iter().map(|&e| if e < EIGEN_FLOOR { 0.0 } else { e.sqrt() }).collect();
    l.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

/// Pure-state density matrix `|v⟩⟨v|` of a normalized two-spin vector.
pub fn pure_pair_state(v: &[Complex64; 4]) -> SpinMatrix {
    SpinMatrix::from_fn(|i, j| v[i] * v[j].conj())
}
