//! Gaussian wavepackets on the ring, antisymmetrized products, momentum
//! decomposition and the analytic post-collision state.

use std::sync::Arc;

use log::{debug, warn};
use num_complex::Complex64;

use crate::basis::{apply_translation, ManyBodyState, SectorBasis, Spin};
use crate::error::{invalid, Error, Result};
use crate::hamiltonian::Momentum;

/// Sign of `dε/dk` for `ε(k) = −2κ cos k`: a packet `∝ e^{ikj}` with
/// `0 < k < π` drifts towards larger site index.
pub const VELOCITY_SIGN: f64 = 1.0;

/// Envelope cut-off in units of `1/α`; beyond it the amplitude is below `e^{-36}`.
pub const TRUNCATION_WIDTHS: f64 = 6.0;

/// Group velocity `dε/dk = 2κ sin k`.
pub fn group_velocity(momentum: f64, hopping: f64) -> f64 {
    VELOCITY_SIGN * 2.0 * hopping * momentum.sin()
}

/// `v_rel = v_R − v_L` for a left packet with momentum `k_left` and a right
/// packet with `k_right`; negative when they approach.
pub fn relative_velocity(k_left: f64, k_right: f64, hopping: f64) -> f64 {
    group_velocity(k_right, hopping) - group_velocity(k_left, hopping)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WavepacketSpec {
    /// Center `N_γ` in site units (may be fractional).
    pub center: f64,
    /// Envelope `e^{−α²(j−N_γ)²}`.
    pub alpha: f64,
    pub momentum: f64,
    pub spin: Spin,
}

impl WavepacketSpec {
    pub fn new(center: f64, alpha: f64, momentum: f64, spin: Spin) -> Self {
        WavepacketSpec { center, alpha, momentum, spin }
    }

    /// Full width at half maximum of the envelope `e^{−α²x²}`.
    pub fn envelope_fwhm(&self) -> f64 {
        2.0 * 2f64.ln().sqrt() / self.alpha
    }

    pub fn with_spin(self, spin: Spin) -> Self {
        WavepacketSpec { spin, ..self }
    }

    pub fn with_center(self, center: f64) -> Self {
        WavepacketSpec { center, ..self }
    }

    pub fn with_momentum(self, momentum: f64) -> Self {
        WavepacketSpec { momentum, ..self }
    }

    fn validate(&self, sites: usize) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(invalid("alpha", format!("width parameter must be positive, got {}", self.alpha)));
        }
        if !self.center.is_finite() || !self.momentum.is_finite() {
            return Err(invalid("packet", "non-finite center or momentum"));
        }
        if self.alpha * (sites as f64) < TRUNCATION_WIDTHS {
            return Err(invalid(
                "alpha",
                format!("packet support 6/α = {:.1} overflows a {sites}-site ring", TRUNCATION_WIDTHS / self.alpha),
            ));
        }
        if 2.0 * TRUNCATION_WIDTHS / self.alpha > sites as f64 {
            debug!("packet support 12/α = {:.1} exceeds {sites} sites; tails wrap", 2.0 * TRUNCATION_WIDTHS / self.alpha);
        }
        Ok(())
    }
}

/// Signed minimal-image displacement `j − center` on a ring, in `(−L/2, L/2]`.
pub fn ring_displacement(site: f64, center: f64, sites: usize) -> f64 {
    let l = sites as f64;
    let mut d = (site - center).rem_euclid(l);
    if d > l / 2.0 {
        d -= l;
    }
    d
}

/// Normalized single-particle amplitudes `∝ e^{−α²d²} e^{ik(N+d)}`, `d` the
/// minimal-image displacement, zero where `|d| > 6/α`.
pub fn gaussian_wavepacket(spec: &WavepacketSpec, sites: usize) -> Result<Vec<Complex64>> {
    spec.validate(sites)?;
    let cut = TRUNCATION_WIDTHS / spec.alpha;
    let mut amps: Vec<Complex64> = (0..sites)
        .map(|j| {
            let d = ring_displacement(j as f64, spec.center, sites);
            if d.abs() > cut {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::from_polar((-(spec.alpha * d).powi(2)).exp(), spec.momentum * (spec.center + d))
            }
        })
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    Ok(amps)
}

/// Mean position of a site distribution, unwrapped around `reference`.
pub fn ring_centroid(probabilities: &[f64], reference: f64) -> f64 {
    let sites = probabilities.len();
    let total: f64 = probabilities.iter().sum();
    let mean: f64 = probabilities
        .iter()
        .enumerate()
        .map(|(j, p)| p * ring_displacement(j as f64, reference, sites))
        .sum::<f64>()
        / total;
    reference + mean
}

/// Center-of-mass and relative coordinates of two packets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompositeFrame {
    pub center: f64,
    pub separation: f64,
    pub mean_momentum: f64,
    pub momentum_difference: f64,
}

impl CompositeFrame {
    pub fn new(a: &WavepacketSpec, b: &WavepacketSpec) -> Self {
        CompositeFrame {
            center: 0.5 * (a.center + b.center),
            separation: b.center - a.center,
            mean_momentum: 0.5 * (a.momentum + b.momentum),
            momentum_difference: b.momentum - a.momentum,
        }
    }
}

fn complex_det(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let n = m.len();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n).max_by(|&a, &b| m[a][col].norm().partial_cmp(&m[b][col].norm()).unwrap()).unwrap();
        if m[pivot][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col];
        det *= p;
        for row in col + 1..n {
            let f = m[row][col] / p;
            if f.norm() == 0.0 {
                continue;
            }
            let pivot = m[col].clone();
            for (x, v) in m[row][col..].iter_mut().zip(&pivot[col..]) {
                *x -= f * v;
            }
        }
    }
    det
}

/// Unnormalized amplitudes of `c†(φ_1) c†(φ_2) … |vac⟩` in `basis`.
fn raw_product(orbitals: &[(Vec<Complex64>, Spin)], basis: &SectorBasis) -> Vec<Complex64> {
    basis
        .configs()
        .map(|cfg| {
            let modes: Vec<(usize, Spin)> = cfg
                .sites(Spin::Up)
                .into_iter()
                .map(|s| (s, Spin::Up))
                .chain(cfg.sites(Spin::Down).into_iter().map(|s| (s, Spin::Down)))
                .collect();
            let m: Vec<Vec<Complex64>> = orbitals
                .iter()
                .map(|(phi, spin)| {
                    modes
                        .iter()
                        .map(|&(site, s)| if s == *spin { phi[site] } else { Complex64::new(0.0, 0.0) })
                        .collect()
                })
                .collect();
            complex_det(m)
        })
        .collect()
}

fn check_counts(specs: &[WavepacketSpec], basis: &SectorBasis) -> Result<()> {
    let up = specs.iter().filter(|s| s.spin == Spin::Up).count();
    let down = specs.len() - up;
    if (up, down) != (basis.n_up(), basis.n_down()) {
        return Err(Error::BasisMismatch {
            expected: format!("sector with {} up and {} down", up, down),
            found: basis.to_string(),
        });
    }
    Ok(())
}

fn warn_on_overlap(orbitals: &[(Vec<Complex64>, Spin)]) {
    for i in 0..orbitals.len() {
        for j in i + 1..orbitals.len() {
            let ov: f64 = orbitals[i].0.iter().zip(&orbitals[j].0).map(|(a, b)| a.norm() * b.norm()).sum();
            if ov > 1e-3 {
                warn!("packets {i} and {j} overlap (∑|φ_i||φ_j| = {ov:.2e}); separation assumed");
            }
        }
    }
}

/// Normalized `c†(φ_1) c†(φ_2) … |vac⟩` for the given packets, creation
/// operators in list order (first packet leftmost).
pub fn product_state(specs: &[WavepacketSpec], basis: &Arc<SectorBasis>) -> Result<ManyBodyState> {
    superposition(&[(Complex64::new(1.0, 0.0), specs.to_vec())], basis)
}

/// Normalized `Σ_t c_t · c†(φ_t1) c†(φ_t2) … |vac⟩`.
pub fn superposition(terms: &[(Complex64, Vec<WavepacketSpec>)], basis: &Arc<SectorBasis>) -> Result<ManyBodyState> {
    let mut amps = vec![Complex64::new(0.0, 0.0); basis.dim()];
    for (weight, specs) in terms {
        if *weight == Complex64::new(0.0, 0.0) {
            continue;
        }
        check_counts(specs, basis)?;
        let orbitals = specs
            .iter()
            .map(|s| Ok((gaussian_wavepacket(s, basis.sites())?, s.spin)))
            .collect::<Result<Vec<_>>>()?;
        warn_on_overlap(&orbitals);
        for (a, v) in amps.iter_mut().zip(raw_product(&orbitals, basis)) {
            *a += weight * v;
        }
    }
    let mut out = ManyBodyState::from_amplitudes(basis, amps)?;
    out.normalize()?;
    Ok(out)
}

/// Predicted two-packet state after the collision: momenta exchanged, left
/// packet at `final_centers.0`, and spin amplitudes `(1−R)/2` on the
/// unchanged and `(1+R)/2` on the exchanged spin arrangement. Global phase dropped.
pub fn analytic_post_collision(
    left: &WavepacketSpec,
    right: &WavepacketSpec,
    reflection: Complex64,
    final_centers: (f64, f64),
    basis: &Arc<SectorBasis>,
) -> Result<ManyBodyState> {
    if (reflection.norm() - 1.0).abs() > 1e-9 {
        return Err(invalid("reflection", format!("|R| = {} is not 1", reflection.norm())));
    }
    let l = left.with_center(final_centers.0).with_momentum(right.momentum);
    let r = right.with_center(final_centers.1).with_momentum(left.momentum);
    let one = Complex64::new(1.0, 0.0);
    superposition(
        &[
            ((one - reflection) * 0.5, vec![l, r]),
            ((one + reflection) * 0.5, vec![l.with_spin(right.spin), r.with_spin(left.spin)]),
        ],
        basis,
    )
}

/// Weight of a state on every total-momentum sector, `K` folded into `(−π, π]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentumWeights {
    pub momenta: Vec<Momentum>,
    pub weights: Vec<f64>,
}

impl MomentumWeights {
    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn argmax(&self) -> Momentum {
        let i = (0..self.weights.len())
            .max_by(|&a, &b| self.weights[a].partial_cmp(&self.weights[b]).unwrap())
            .unwrap();
        self.momenta[i]
    }

    pub fn mean(&self) -> f64 {
        self.momenta.iter().zip(&self.weights).map(|(k, w)| k.value * w).sum::<f64>() / self.total()
    }

    pub fn std_dev(&self) -> f64 {
        let m = self.mean();
        (self.momenta.iter().zip(&self.weights).map(|(k, w)| w * (k.value - m).powi(2)).sum::<f64>() / self.total())
            .sqrt()
    }
}

/// `w(K) = ‖P_K ψ‖²` from `P_K = L⁻¹ Σ_m e^{iKm} T^m`, evaluated through the
/// overlaps `⟨ψ|T^m ψ⟩`.
pub fn k_decompose(psi: &ManyBodyState) -> Result<MomentumWeights> {
    let basis = psi.basis();
    let sites = basis.sites();
    let mut overlaps = Vec::with_capacity(sites);
    let mut shifted = psi.clone();
    for m in 0..sites {
        if m > 0 {
            shifted = apply_translation(basis, &shifted)?;
        }
        overlaps.push(psi.inner(&shifted)?);
    }
    let lo = -((sites as i64 - 1) / 2);
    let hi = sites as i64 / 2;
    let momenta: Vec<Momentum> = (lo..=hi).map(|n| Momentum::from_index(sites, n)).collect();
    let weights = momenta
        .iter()
        .map(|k| {
            let s: Complex64 = overlaps
                .iter()
                .enumerate()
                .map(|(m, c)| Complex64::from_polar(1.0, k.value * m as f64) * c)
                .sum();
            (s.re / sites as f64).max(0.0)
        })
        .collect();
    Ok(MomentumWeights { momenta, weights })
}

/// Fold `K` into `(−π, π]`.
pub fn fold_momentum(k: f64) -> f64 {
    crate::bethe::fold_angle(k)
}
