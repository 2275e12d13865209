//! `ψ(t) = e^{−iHt} ψ` by Chebyshev expansion.
//!
//! The spectrum is mapped into `[−1, 1]` using Gershgorin bounds widened by
//! [`SPECTRAL_MARGIN`]. Long times are split into equal sub-steps with
//! `a·dt ≤ MAX_STEP_PHASE` so the Bessel coefficients stay well conditioned.

use num_complex::Complex64;

use crate::basis::ManyBodyState;
use crate::error::{Error, Result};
use crate::sparse::SparseOperator;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const SPECTRAL_MARGIN: f64 = 0.05;
const MIN_TOL: f64 = 1e-14;
const MAX_STEP_PHASE: f64 = 20.0;

/// `J_0(x) … J_n_max(x)` by Miller's downward recurrence, normalized with
/// `J_0 + 2 Σ J_{2k} = 1`. Valid for `x ≥ 0`.
pub fn bessel_j_sequence(x: f64, n_max: usize) -> Vec<f64> {
    if x == 0.0 {
        let mut v = vec![0.0; n_max + 1];
        v[0] = 1.0;
        return v;
    }
    let start = n_max.max(x.ceil() as usize) + 40 + (40.0 * x.max(1.0)).sqrt() as usize;
    let mut vals = vec![0.0f64; start + 2];
    vals[start] = 1e-300;
    for n in (1..=start).rev() {
        vals[n - 1] = 2.0 * n as f64 / x * vals[n] - vals[n + 1];
        if vals[n - 1].abs() > 1e250 {
            for v in vals[n - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let norm = vals[0] + 2.0 * vals.iter().skip(2).step_by(2).sum::<f64>();
    vals.truncate(n_max + 1);
    vals.iter_mut().for_each(|v| *v /= norm);
    vals
}

/// Reusable propagator for one operator.
#[derive(Debug)]
pub struct Propagator<'a> {
    h: &'a SparseOperator,
    center: f64,
    half_width: f64,
    tol: f64,
}

impl<'a> Propagator<'a> {
    pub fn new(h: &'a SparseOperator, tol: f64) -> Result<Self> {
        if !h.is_hermitian() {
            return Err(Error::NotHermitian(h.hermitian_deviation()));
        }
        if !(tol >= MIN_TOL) {
            return Err(Error::Tolerance(tol));
        }
        let (lo, hi) = h.gershgorin_bounds();
        let center = 0.5 * (lo + hi);
        let half_width = 0.5 * (hi - lo) * (1.0 + SPECTRAL_MARGIN);
        Ok(Propagator { h, center, half_width, tol })
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// Advance `psi` by `t` (any sign).
    pub fn evolve(&self, psi: &ManyBodyState, t: f64) -> Result<ManyBodyState> {
        let amps = self.evolve_amplitudes(psi.amplitudes(), t)?;
        ManyBodyState::from_amplitudes(psi.basis(), amps)
    }

    /// Advance a bare amplitude vector, for operators without a Fock basis
    /// such as the relative-coordinate chains.
    pub fn evolve_amplitudes(&self, psi: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
        if psi.len() != self.h.dim() {
            return Err(Error::BasisMismatch {
                expected: format!("state of dimension {}", self.h.dim()),
                found: format!("dimension {}", psi.len()),
            });
        }
        if !t.is_finite() {
            return Err(Error::InvalidParameter { name: "t", reason: "non-finite time".into() });
        }
        let mut amps = psi.to_vec();
        if t == 0.0 {
            return Ok(amps);
        }
        if self.half_width == 0.0 {
            let phase = Complex64::from_polar(1.0, -self.center * t);
            amps.iter_mut().for_each(|a| *a *= phase);
            return Ok(amps);
        }
        let steps = (self.half_width * t.abs() / MAX_STEP_PHASE).ceil().max(1.0) as usize;
        let dt = t / steps as f64;
        let step_tol = self.tol / steps as f64;
        let coeffs = self.coefficients(dt, step_tol);
        let mut work = Workspace::new(amps.len());
        for _ in 0..steps {
            self.step(&mut amps, dt, &coeffs, &mut work);
        }
        Ok(amps)
    }

    /// Expansion coefficients `c_n = (2 − δ_n0)(−i)^n J_n(a·dt)`, truncated once
    /// the remaining Bessel tail is below `step_tol`.
    fn coefficients(&self, dt: f64, step_tol: f64) -> Vec<Complex64> {
        let x = (self.half_width * dt).abs();
        let n_max = (x.ceil() as usize) * 2 + 60;
        let j = bessel_j_sequence(x, n_max);
        let mut cut = n_max;
        for n in (x.ceil() as usize)..n_max {
            // tail of a super-exponentially decaying sequence is dominated by its first terms
            if 2.0 * (j[n].abs() + j[n + 1].abs()) < step_tol * 1e-2 {
                cut = n;
                break;
            }
        }
        let sign = dt.signum();
        (0..=cut)
            .map(|n| {
                let w = if n == 0 { 1.0 } else { 2.0 };
                // (−i sign)^n
                let phase = match (n % 4, sign > 0.0) {
                    (0, _) => Complex64::new(1.0, 0.0),
                    (2, _) => Complex64::new(-1.0, 0.0),
                    (1, true) | (3, false) => Complex64::new(0.0, -1.0),
                    _ => Complex64::new(0.0, 1.0),
                };
                phase * (w * j[n])
            })
            .collect()
    }

    fn step(&self, amps: &mut [Complex64], dt: f64, coeffs: &[Complex64], work: &mut Workspace) {
        let inv = 1.0 / self.half_width;
        let shift = self.center;
        let scaled = |h: &SparseOperator, x: &[Complex64], out: &mut [Complex64]| {
            h.apply_into(x, out);
            for (o, xi) in out.iter_mut().zip(x) {
                *o = (*o - xi * shift) * inv;
            }
        };
        let Workspace { prev, curr, next, acc } = work;
        prev.copy_from_slice(amps);
        for (a, p) in acc.iter_mut().zip(prev.iter()) {
            *a = coeffs[0] * p;
        }
        if coeffs.len() > 1 {
            scaled(self.h, prev, curr);
            for (a, c) in acc.iter_mut().zip(curr.iter()) {
                *a += coeffs[1] * c;
            }
        }
        for c in coeffs.iter().skip(2) {
            scaled(self.h, curr, next);
            for ((nx, p), a) in next.iter_mut().zip(prev.iter()).zip(acc.iter_mut()) {
                *nx = 2.0 * *nx - p;
                *a += c * *nx;
            }
            std::mem::swap(prev, curr);
            std::mem::swap(curr, next);
        }
        let phase = Complex64::from_polar(1.0, -shift * dt);
        for (o, a) in amps.iter_mut().zip(acc.iter()) {
            *o = a * phase;
        }
    }
}

struct Workspace {
    prev: Vec<Complex64>,
    curr: Vec<Complex64>,
    next: Vec<Complex64>,
    acc: Vec<Complex64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); n];
        Workspace { prev: z.clone(), curr: z.clone(), next: z.clone(), acc: z }
    }
}

/// `e^{−iHt} ψ` to within `tol` in the 2-norm.
pub fn evolve(h: &SparseOperator, psi: &ManyBodyState, t: f64, tol: f64) -> Result<ManyBodyState> {
    Propagator::new(h, tol)?.evolve(psi, t)
}

/// A named scalar function of the state.
pub struct Observable<'a> {
    pub name: String,
    pub eval: Box<dyn Fn(&ManyBodyState) -> f64 + Send + Sync + 'a>,
}

impl<'a> Observable<'a> {
    pub fn new(name: impl Into<String>, eval: impl Fn(&ManyBodyState) -> f64 + Send + Sync + 'a) -> Self {
        Observable { name: name.into(), eval: Box::new(eval) }
    }
}

/// Observables sampled on a time grid; `rows[i][j]` is observable `j` at `times[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl TimeSeries {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

/// Evaluate observables along `e^{−iHt}ψ` for a non-decreasing time grid
/// (times measured from `psi`). Each grid point continues from the previous one.
pub fn evolve_series(
    h: &SparseOperator,
    psi: &ManyBodyState,
    times: &[f64],
    observables: &[Observable<'_>],
    tol: f64,
) -> Result<TimeSeries> {
    if times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidParameter { name: "times", reason: "time grid must be non-decreasing".into() });
    }
    let prop = Propagator::new(h, tol)?;
    let mut state = psi.clone();
    let mut now = 0.0;
    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        state = prop.evolve(&state, t - now)?;
        now = t;
        rows.push(observables.iter().map(|o| (o.eval)(&state)).collect());
    }
    Ok(TimeSeries { times: times.to_vec(), columns: observables.iter().map(|o| o.name.clone()).collect(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_values() {
        // Reference values of J_n(x) from standard tables.
        let j = bessel_j_sequence(1.0, 3);
        assert!((j[0] - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((j[1] - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((j[2] - 0.114_903_484_931_900_5).abs() < 1e-15);
        let j = bessel_j_sequence(10.0, 12);
        assert!((j[0] + 0.245_935_764_451_348_3).abs() < 1e-14);
        assert!((j[10] - 0.207_486_106_633_358_9).abs() < 1e-14);
    }

    #[test]
    fn bessel_at_zero() {
        assert_eq!(bessel_j_sequence(0.0, 3), vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn rejects_bad_inputs() {
        use crate::basis::enumerate_sector;
        let b = enumerate_sector(2, 1, 0).unwrap();
        let psi = ManyBodyState::basis_state(&b, 0);
        let nh = SparseOperator::from_triplets(2, vec![(0, 1, Complex64::new(1.0, 0.0))]).unwrap();
        assert!(matches!(evolve(&nh, &psi, 1.0, 1e-10), Err(Error::NotHermitian(_))));
        let h = SparseOperator::from_triplets(2, vec![(0, 1, Complex64::new(1.0, 0.0)), (1, 0, Complex64::new(1.0, 0.0))])
            .unwrap();
        assert!(matches!(evolve(&h, &psi, 1.0, 1e-15), Err(Error::Tolerance(_))));
        assert!(evolve_series(&h, &psi, &[0.0, 2.0, 1.0], &[], 1e-10).is_err());
    }

    #[test]
    fn two_level_rabi() {
        use crate::basis::enumerate_sector;
        let b = enumerate_sector(2, 1, 0).unwrap();
        let h = SparseOperator::from_triplets(2, vec![(0, 1, Complex64::new(1.0, 0.0)), (1, 0, Complex64::new(1.0, 0.0))])
            .unwrap();
        let psi = ManyBodyState::basis_state(&b, 0);
        for &t in &[0.0, 0.3, 1.7, 25.0, -4.0] {
            let out = evolve(&h, &psi, t, 1e-12).unwrap();
            let a = out.amplitudes();
            assert!((a[0] - Complex64::new(t.cos(), 0.0)).norm() < 1e-11);
            assert!((a[1] - Complex64::new(0.0, -t.sin())).norm() < 1e-11);
        }
    }
}
