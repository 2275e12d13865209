//! Closed-form two-particle scattering quantities.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Relative-coordinate energy scale `λ = 4κ cos(K/2) sin k`.
pub fn lambda_param(hopping: f64, total_momentum: f64, relative_momentum: f64) -> f64 {
    4.0 * hopping * (total_momentum / 2.0).cos() * relative_momentum.sin()
}

/// `R = (iλ + U) / (iλ − U)`.
pub fn reflection(interaction: f64, lambda: f64) -> Result<Complex64> {
    if interaction == 0.0 && lambda == 0.0 {
        return Err(Error::Degenerate("reflection amplitude undefined at U = λ = 0".into()));
    }
    let i = Complex64::i();
    Ok((i * lambda + interaction) / (i * lambda - interaction))
}

/// Fold an angle into `(−π, π]`.
pub fn fold_angle(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// Reflection phase `Δ = 2 tan⁻¹(−U/λ)`, two-argument branch, in `(−π, π]`.
pub fn reflection_phase(interaction: f64, lambda: f64) -> Result<f64> {
    if interaction == 0.0 && lambda == 0.0 {
        return Err(Error::Degenerate("reflection phase undefined at U = λ = 0".into()));
    }
    Ok(fold_angle(2.0 * (-interaction).atan2(lambda)))
}

/// `θ = 2 tan⁻¹(U / v_rel)` in `(−π, π]`, where `v_rel = v_R − v_L`.
pub fn collision_angle(interaction: f64, relative_velocity: f64) -> Result<f64> {
    if relative_velocity == 0.0 || !relative_velocity.is_finite() {
        return Err(invalid("relative_velocity", "collision angle needs a finite, non-zero relative velocity"));
    }
    Ok(fold_angle(2.0 * (interaction / relative_velocity).atan()))
}

/// Relative-coordinate band energy `ε_K(k) = −4κ cos(K/2) cos k`.
pub fn dispersion(hopping: f64, total_momentum: f64, relative_momentum: f64) -> f64 {
    -4.0 * hopping * (total_momentum / 2.0).cos() * relative_momentum.cos()
}

/// Bethe amplitudes `f(j) = e^{−ikj} + R e^{ikj}`, `j = 0..len`.
pub fn scattering_state(relative_momentum: f64, r: Complex64, len: usize) -> Result<Vec<Complex64>> {
    if relative_momentum.sin().abs() < 1e-12 {
        return Err(invalid("relative_momentum", "band edge (sin k = 0) has no scattering solution"));
    }
    Ok((0..len)
        .map(|j| {
            let x = relative_momentum * j as f64;
            Complex64::from_polar(1.0, -x) + r * Complex64::from_polar(1.0, x)
        })
        .collect())
}

/// The Bethe solution written in the singlet equivalent-chain basis, where the
/// doublon amplitude carries an extra `1/√2` relative to `f(0)`.
pub fn chain_amplitudes(relative_momentum: f64, r: Complex64, len: usize) -> Result<Vec<Complex64>> {
    let mut f = scattering_state(relative_momentum, r, len)?;
    if let Some(f0) = f.first_mut() {
        *f0 /= 2f64.sqrt();
    }
    Ok(f)
}

/// Every closed-form quantity for one `(κ, U, K, k)` point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatteringParams {
    pub hopping: f64,
    pub interaction: f64,
    pub total_momentum: f64,
    pub relative_momentum: f64,
    pub lambda: f64,
    pub reflection: Complex64,
    pub phase: f64,
    pub energy: f64,
    /// Spin S-matrix angle of the collision. For packets `λ = v_L − v_R = −v_rel`,
    /// so `θ = Δ = collision_angle(U, v_rel)`.
    pub theta: f64,
}

impl ScatteringParams {
    pub fn new(hopping: f64, interaction: f64, total_momentum: f64, relative_momentum: f64) -> Result<Self> {
        let lambda = lambda_param(hopping, total_momentum, relative_momentum);
        let reflection = reflection(interaction, lambda)?;
        let phase = reflection_phase(interaction, lambda)?;
        Ok(ScatteringParams {
            hopping,
            interaction,
            total_momentum,
            relative_momentum,
            lambda,
            reflection,
            phase,
            energy: dispersion(hopping, total_momentum, relative_momentum),
            theta: phase,
        })
    }

    /// Parameters of the dominant subspace for two packets: `K = k_a + k_b`,
    /// incoming relative momentum `k = (k_a − k_b)/2` (left packet `a`).
    pub fn for_packets(hopping: f64, interaction: f64, k_left: f64, k_right: f64) -> Result<Self> {
        Self::new(hopping, interaction, k_left + k_right, (k_left - k_right) / 2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_equivalent_chain, ChainGeometry, Channel};
    use proptest::prelude::*;

    #[test]
    fn lambda_examples() {
        assert!((lambda_param(1.0, 0.0, PI / 2.0) - 4.0).abs() < 1e-15);
        assert!(lambda_param(1.3, PI, 0.7).abs() < 1e-15);
        assert_eq!(lambda_param(1.0, 0.4, 0.0), 0.0);
    }

    #[test]
    fn reflection_examples() {
        assert_eq!(reflection(0.0, 2.0).unwrap(), Complex64::new(1.0, 0.0));
        let r = reflection(4e9, 4.0).unwrap();
        assert!((r + 1.0).norm() < 1e-8);
        let r = reflection(1.5, 1.5).unwrap();
        assert!((r + Complex64::i()).norm() < 1e-15);
        assert!((reflection_phase(1.5, 1.5).unwrap() + PI / 2.0).abs() < 1e-15);
        assert!(reflection(0.0, 0.0).is_err());
    }

    #[test]
    fn angle_examples() {
        assert!((collision_angle(2.0, 2.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert_eq!(collision_angle(0.0, 3.0).unwrap(), 0.0);
        assert!((collision_angle(1e15, 1.0).unwrap() - PI).abs() < 1e-12);
        assert!(collision_angle(1.0, 0.0).is_err());
    }

    #[test]
    fn dispersion_examples() {
        assert!((dispersion(1.0, 0.0, PI / 3.0) + 2.0).abs() < 1e-15);
        assert!(dispersion(1.0, 0.0, PI / 2.0).abs() < 1e-15);
        assert_eq!(dispersion(1.0, 0.3, 0.8), dispersion(1.0, 0.3, -0.8));
    }

    #[test]
    fn free_scattering_state_is_cosine() {
        let f = scattering_state(0.9, Complex64::new(1.0, 0.0), 10).unwrap();
        for (j, v) in f.iter().enumerate() {
            assert!((v - 2.0 * (0.9 * j as f64).cos()).norm() < 1e-14);
        }
        assert!(scattering_state(0.0, Complex64::new(1.0, 0.0), 4).is_err());
        assert!(scattering_state(PI, Complex64::new(1.0, 0.0), 4).is_err());
    }

    #[test]
    fn bethe_state_solves_chain() {
        let (k, u, kappa, m) = (PI / 3.0, 1.0, 1.0, 200);
        let p = ScatteringParams::new(kappa, u, 0.0, k).unwrap();
        let h = build_equivalent_chain(0.0, kappa, u, m, Channel::Singlet, ChainGeometry::SemiInfinite).unwrap();
        let f = chain_amplitudes(k, p.reflection, m).unwrap();
        let hf = h.apply(&f);
        // the far end is a truncation, not part of the semi-infinite problem
        let worst = (0..m - 1).map(|j| (hf[j] - p.energy * f[j]).norm()).fold(0.0, f64::max);
        assert!(worst < 1e-10, "residual {worst}");
    }

    #[test]
    fn theta_matches_collision_angle() {
        use crate::wavepacket::relative_velocity;
        for &(u, ka, kb) in &[(4.0, PI / 2.0, -PI / 2.0), (-1.3, 0.9, -0.2), (0.7, 2.5, 1.0)] {
            let p = ScatteringParams::for_packets(1.0, u, ka, kb).unwrap();
            let v = relative_velocity(ka, kb, 1.0);
            assert!((p.lambda + v).abs() < 1e-14);
            assert!((p.theta - collision_angle(u, v).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn sign_symmetry_of_u() {
        let (u, l) = (1.3, 4.0);
        let r = reflection(u, l).unwrap();
        assert!((reflection(-u, l).unwrap() - r.conj()).norm() < 1e-15);
        assert!((reflection(u, -l).unwrap() - r.conj()).norm() < 1e-15);
    }

    #[test]
    fn phase_matches_reflection() {
        for &(u, l) in &[(1.0, 4.0), (-3.0, 0.5), (0.2, -2.0), (7.0, 0.0)] {
            let r = reflection(u, l).unwrap();
            let d = reflection_phase(u, l).unwrap();
            assert!((r - Complex64::from_polar(1.0, d)).norm() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn reflection_unit_modulus(u in -50.0f64..50.0, l in -8.0f64..8.0) {
            prop_assume!(u != 0.0 || l != 0.0);
            prop_assert!((reflection(u, l).unwrap().norm() - 1.0).abs() < 1e-14);
            let d = reflection_phase(u, l).unwrap();
            prop_assert!(d > -PI && d <= PI);
        }

        #[test]
        fn angle_odd_in_u(u in -50.0f64..50.0, v in 0.01f64..8.0) {
            let a = collision_angle(u, v).unwrap();
            let b = collision_angle(-u, v).unwrap();
            prop_assert!((a + b).abs() < 1e-14);
        }
    }
}
