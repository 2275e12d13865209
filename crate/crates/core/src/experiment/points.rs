//! One grid point of each experiment.

use std::sync::Arc;

use num_complex::Complex64;

use super::config::{AxisName, ConfigError, ExperimentConfig, ExperimentKind, InteractionUnits, SpinName};
use super::{PointResult, RunError, Table};
use crate::basis::{enumerate_sector, ManyBodyState, SectorBasis, Spin};
use crate::bethe::{collision_angle, lambda_param, reflection_phase};
use crate::error::Error;
use crate::hamiltonian::{build_equivalent_chain, build_hubbard, ChainGeometry, Channel, HubbardParams};
use crate::metrics::{build_target_state, concurrence, fidelity, spin_reduced_dm, SiteCut};
use crate::propagator::{evolve_series, Observable, Propagator, DEFAULT_TOL};
use crate::sparse::SparseOperator;
use crate::spin::{
    cascade, equal_spacing_schedule, purity, purity_from_lambda, resonance_interaction, resonance_theta,
    single_spin_lambda, single_vs_train_amplitudes, SpinTrainState,
};
use crate::wavepacket::{group_velocity, product_state, relative_velocity, WavepacketSpec};

/// Largest accepted `|‖ψ(t)‖ − 1|` along a trajectory.
pub const NORM_DRIFT_LIMIT: f64 = 1e-8;

pub fn run_point(cfg: &ExperimentConfig) -> Result<PointResult, RunError> {
    match cfg.experiment {
        ExperimentKind::Fig2Fidelity => fig2_fidelity(cfg),
        ExperimentKind::RegimeGallery | ExperimentKind::ResonanceSweep => final_spin_state(cfg),
        ExperimentKind::BetheCheck => bethe_check(cfg),
        ExperimentKind::Cascade1vN => cascade_single(cfg),
        ExperimentKind::Cascade2v2 => cascade_trains(cfg),
    }
}

fn tolerance(cfg: &ExperimentConfig) -> f64 {
    cfg.tolerance.unwrap_or(DEFAULT_TOL)
}

fn check_norm(norm: f64, when: f64) -> Result<(), RunError> {
    if (norm - 1.0).abs() > NORM_DRIFT_LIMIT {
        return Err(RunError::Numeric(Error::NumericContract(format!("norm {norm} at t = {when}"))));
    }
    Ok(())
}

/// Two packets on a ring with every derived collision quantity.
struct Collision {
    left: WavepacketSpec,
    right: WavepacketSpec,
    interaction: f64,
    v_rel: f64,
    theta: f64,
    basis: Arc<SectorBasis>,
    h: SparseOperator,
    psi: ManyBodyState,
}

impl Collision {
    fn new(cfg: &ExperimentConfig) -> Result<Self, RunError> {
        let alpha = cfg.scalar(AxisName::Alpha)?;
        let value = cfg.scalar(AxisName::Interaction)?;
        let specs = cfg.packet_specs(alpha)?;
        let (left, right) = (specs[0], specs[1]);
        let v_rel = relative_velocity(left.momentum, right.momentum, cfg.hopping);
        if v_rel.abs() < 1e-12 {
            return Err(ConfigError::new("packets", "packets have no relative velocity").into());
        }
        let interaction = match cfg.interaction_units {
            InteractionUnits::Absolute => value,
            InteractionUnits::RelativeVelocity => value * v_rel.abs(),
        };
        let theta = collision_angle(interaction, v_rel)?;
        let sites = cfg.sites.expect("validated");
        let n_up = specs.iter().filter(|s| s.spin == Spin::Up).count();
        let basis = enumerate_sector(sites, n_up, 2 - n_up)?;
        let h = build_hubbard(&basis, &HubbardParams::ring(cfg.hopping, interaction))?;
        let psi = product_state(&specs, &basis)?;
        Ok(Collision { left, right, interaction, v_rel, theta, basis, h, psi })
    }

    /// Free-flight centers of the two outgoing packets at `t`: left slot carries
    /// the right packet's momentum.
    fn expected_centers(&self, cfg: &ExperimentConfig, t: f64) -> (f64, f64) {
        let l = self.basis.sites() as f64;
        let q = self.right.center + group_velocity(self.right.momentum, cfg.hopping) * t;
        let p = self.left.center + group_velocity(self.left.momentum, cfg.hopping) * t;
        (q.rem_euclid(l), p.rem_euclid(l))
    }

    fn common_summary(&self) -> Vec<(String, f64)> {
        vec![
            ("v_rel".into(), self.v_rel),
            ("U".into(), self.interaction),
            ("U_over_v_rel".into(), self.interaction / self.v_rel.abs()),
            ("theta".into(), self.theta),
        ]
    }
}

fn fig2_fidelity(cfg: &ExperimentConfig) -> Result<PointResult, RunError> {
    let c = Collision::new(cfg)?;
    let centers = cfg.target_centers.map(|[a, b]| (a, b)).unwrap_or((c.left.center, c.right.center));
    let target = build_target_state(&c.left, &c.right, c.theta, centers, &c.basis)?;
    let times = cfg.time.as_ref().expect("validated").samples()?;
    let h = &c.h;
    let observables = [
        Observable::new("fidelity", |s: &ManyBodyState| fidelity(s, &target).unwrap_or(f64::NAN)),
        Observable::new("norm", |s: &ManyBodyState| s.norm()),
        Observable::new("energy", move |s: &ManyBodyState| h.expectation(s.amplitudes())),
    ];
    let series = evolve_series(&c.h, &c.psi, &times, &observables, tolerance(cfg))?;
    for (t, n) in times.iter().zip(series.column("norm").unwrap()) {
        check_norm(n, *t)?;
    }
    let f = series.column("fidelity").unwrap();
    let (best_i, best) = f.iter().enumerate().fold((0, f64::MIN), |m, (i, &v)| if v > m.1 { (i, v) } else { m });
    let mut summary = c.common_summary();
    summary.push(("peak_fidelity".into(), best));
    summary.push(("peak_time".into(), times[best_i]));
    let mut columns = vec!["t".to_string()];
    columns.extend(series.columns.iter().cloned());
    let rows = times.iter().zip(&series.rows).map(|(t, r)| std::iter::once(*t).chain(r.iter().copied()).collect()).collect();
    Ok(PointResult { summary, curve: Some(Table { columns, rows }), details: None })
}

fn spin_index(a: Spin, b: Spin) -> usize {
    2 * usize::from(a == Spin::Down) + usize::from(b == Spin::Down)
}

fn final_spin_state(cfg: &ExperimentConfig) -> Result<PointResult, RunError> {
    let c = Collision::new(cfg)?;
    let t = cfg.time.as_ref().expect("validated").stop;
    let out = Propagator::new(&c.h, tolerance(cfg))?.evolve(&c.psi, t)?;
    check_norm(out.norm(), t)?;
    let (q, p) = c.expected_centers(cfg, t);
    let pair = spin_reduced_dm(&out, SiteCut::around(q, p, c.basis.sites()))?;
    let target = build_target_state(&c.left, &c.right, c.theta, (q, p), &c.basis)?;
    let unchanged = pair.rho[(spin_index(c.left.spin, c.right.spin), spin_index(c.left.spin, c.right.spin))].re;
    let exchanged = pair.rho[(spin_index(c.right.spin, c.left.spin), spin_index(c.right.spin, c.left.spin))].re;
    let mut summary = c.common_summary();
    summary.extend([
        ("t".to_string(), t),
        ("p_unchanged".to_string(), unchanged),
        ("p_exchanged".to_string(), exchanged),
        ("p_unchanged_predicted".to_string(), (c.theta / 2.0).sin().powi(2)),
        ("concurrence".to_string(), concurrence(&pair.rho)?),
        ("concurrence_predicted".to_string(), c.theta.sin().abs()),
        ("separated_probability".to_string(), pair.separated_probability),
        ("fidelity".to_string(), fidelity(&out, &target)?),
    ]);
    Ok(PointResult { summary, curve: None, details: None })
}

fn bethe_check(cfg: &ExperimentConfig) -> Result<PointResult, RunError> {
    let len = cfg.chain_length.expect("validated");
    let big_k = cfg.total_momentum.as_ref().map(|k| k.value()).transpose().map_err(|m| ConfigError::new("total_momentum", m))?.unwrap_or(0.0);
    let k = cfg.scalar(AxisName::RelativeMomentum)?;
    let alpha = cfg.scalar(AxisName::Alpha)?;
    let u = cfg.scalar(AxisName::Interaction)?;
    let speed = 4.0 * cfg.hopping * (big_k / 2.0).cos() * k.sin();
    if !(speed > 1e-9) {
        return Err(ConfigError::new("relative_momentum", "packet must travel towards the chain end (4κ cos(K/2) sin k > 0)").into());
    }
    let center = len as f64 / 2.0;
    let mut psi: Vec<Complex64> = (0..len)
        .map(|j| Complex64::from_polar((-(alpha * (j as f64 - center)).powi(2)).exp(), -k * j as f64))
        .collect();
    let n = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    psi.iter_mut().for_each(|a| *a /= n);
    let t = 2.0 * center / speed;
    let tol = tolerance(cfg);
    let chain = |u: f64| build_equivalent_chain(big_k, cfg.hopping, u, len, Channel::Singlet, ChainGeometry::SemiInfinite);
    let free = Propagator::new(&chain(0.0)?, tol)?.evolve_amplitudes(&psi, t)?;
    let out = Propagator::new(&chain(u)?, tol)?.evolve_amplitudes(&psi, t)?;
    let norm: f64 = out.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    check_norm(norm, t)?;
    let overlap: Complex64 = free.iter().zip(&out).map(|(a, b)| a.conj() * b).sum();
    let lambda = lambda_param(cfg.hopping, big_k, k);
    let delta = reflection_phase(u, lambda)?;
    let err = Complex64::from_polar(1.0, overlap.arg() - delta).arg();
    let reflected: f64 = out[len / 8..].iter().map(|a| a.norm_sqr()).sum();
    Ok(PointResult {
        summary: vec![
            ("lambda".into(), lambda),
            ("return_time".into(), t),
            ("delta_analytic".into(), delta),
            ("delta_numeric".into(), overlap.arg()),
            ("phase_error".into(), err),
            ("reflected_modulus".into(), reflected.sqrt()),
        ],
        curve: None,
        details: None,
    })
}

fn cascade_single(cfg: &ExperimentConfig) -> Result<PointResult, RunError> {
    let n = cfg.scalar(AxisName::TrainLength)? as usize;
    let theta = cfg.scalar(AxisName::Theta)?;
    let init = SpinTrainState::product(&[Spin::Up], &vec![Spin::Down; n])?;
    let out = cascade(&init, &equal_spacing_schedule(1, n)?, theta)?;
    let closed = single_vs_train_amplitudes(n, theta)?;
    let mut details = Table {
        columns: ["j", "re", "im", "re_closed", "im_closed", "probability"].map(String::from).to_vec(),
        rows: Vec::new(),
    };
    let mut worst: f64 = 0.0;
    for (j, want) in closed.iter().enumerate() {
        let mut slots = vec![Spin::Down; n + 1];
        slots[j] = Spin::Up;
        let got = out.amplitude(&slots);
        worst = worst.max((got - want).norm());
        details.rows.push(vec![(j + 1) as f64, got.re, got.im, want.re, want.im, got.norm_sqr()]);
    }
    let rho = out.reduced_slot(n)?;
    let lambda = single_spin_lambda(n, theta);
    let mut summary = vec![
        ("lambda_closed".into(), lambda),
        ("lambda_cascade".into(), rho[(0, 0)].re),
        ("purity_closed".into(), purity_from_lambda(lambda)),
        ("purity_cascade".into(), purity(&rho)?),
        ("max_amplitude_error".into(), worst),
        ("resonance_theta".into(), resonance_theta(n)?),
    ];
    if let Some(v) = cfg.relative_velocity {
        let r = resonance_interaction(n, v)?;
        summary.push(("resonance_U_exact".into(), r.exact));
        summary.push(("resonance_U_approx".into(), r.approximate));
    }
    Ok(PointResult { summary, curve: None, details: Some(details) })
}

fn spins(names: Option<&Vec<SpinName>>, default: Spin) -> Vec<Spin> {
    names.map(|v| v.iter().map(|&s| s.into()).collect()).unwrap_or_else(|| vec![default; 2])
}

fn cascade_trains(cfg: &ExperimentConfig) -> Result<PointResult, RunError> {
    let theta = cfg.scalar(AxisName::Theta)?;
    let left = spins(cfg.left_spins.as_ref(), Spin::Up);
    let right = spins(cfg.right_spins.as_ref(), Spin::Down);
    let init = SpinTrainState::product(&left, &right)?;
    let out = cascade(&init, &equal_spacing_schedule(left.len(), right.len())?, theta)?;
    let sz = init.total_sz2();
    let mut summary = Vec::new();
    for (i, p) in out.probabilities().iter().enumerate() {
        let s = out.spins_of(i);
        let sz2: i64 = s.iter().map(|x| if *x == Spin::Up { 1 } else { -1 }).sum();
        if Some(sz2) != sz {
            continue;
        }
        let key: String = s.iter().map(|x| if *x == Spin::Up { 'U' } else { 'D' }).collect();
        summary.push((format!("P_{key}"), *p));
    }
    for slot in 0..out.slots() {
        summary.push((format!("purity_slot{slot}"), purity(&out.reduced_slot(slot)?)?));
    }
    Ok(PointResult { summary, curve: None, details: None })
}
