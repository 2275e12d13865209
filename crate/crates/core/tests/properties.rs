//! Property tests against independent oracles: projected blocks, dense
//! exponentials, Kronecker-product cascades and local-unitary invariance.

mod common;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4};
use num_complex::Complex64;
use proptest::prelude::*;

use hubbard_scatter::basis::{apply_spin_op, apply_translation, enumerate_sector, ManyBodyState, Spin, SpinOp};
use hubbard_scatter::hamiltonian::{
    build_equivalent_chain, build_hubbard, build_k_subspace_basis, ChainGeometry, Channel, HubbardParams, Momentum,
};
use hubbard_scatter::metrics::{concurrence, pure_pair_state};
use hubbard_scatter::propagator::{evolve, Propagator, DEFAULT_TOL};
use hubbard_scatter::sparse::hermitian_eigenvalues;
use hubbard_scatter::spin::{cascade, equal_spacing_schedule, pair_smatrix, SpinTrainState};
use hubbard_scatter::wavepacket::{group_velocity, product_state, ring_centroid, WavepacketSpec};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn channel_strategy() -> impl Strategy<Value = Channel> {
    prop_oneof![Just(Channel::Singlet), Just(Channel::Triplet(0)), Just(Channel::Triplet(1)), Just(Channel::Triplet(-1))]
}

fn sector_for(channel: Channel) -> (usize, usize) {
    match channel {
        Channel::Triplet(1) => (2, 0),
        Channel::Triplet(-1) => (0, 2),
        _ => (1, 1),
    }
}

/// `e^{-iHt}ψ` from the dense Padé exponential.
fn dense_evolution(h: &DMatrix<Complex64>, psi: &[Complex64], t: f64) -> DVector<Complex64> {
    (h * c(0.0, -t)).exp() * DVector::from_column_slice(psi)
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn random_state(sites: usize, n_up: usize, n_down: usize, seed: &[f64]) -> ManyBodyState {
    let basis = enumerate_sector(sites, n_up, n_down).unwrap();
    let amps = (0..basis.dim()).map(|i| c(seed[i % seed.len()] + 0.1 * i as f64, seed[(3 * i + 1) % seed.len()])).collect();
    let mut psi = ManyBodyState::from_amplitudes(&basis, amps).unwrap();
    psi.normalize().unwrap();
    psi
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn chain_spectrum_matches_projected_block(
        sites in prop_oneof![Just(7usize), Just(9), Just(11)],
        n in 0i64..11,
        u in -6.0f64..6.0,
        singlet in any::<bool>(),
    ) {
        let n = n % sites as i64;
        let channel = if singlet { Channel::Singlet } else { Channel::Triplet(0) };
        let full = build_hubbard(&enumerate_sector(sites, 1, 1).unwrap(), &HubbardParams::ring(1.0, u)).unwrap();
        let k = Momentum::from_index(sites, n);
        let block = build_k_subspace_basis(sites, k, channel).unwrap().project(&full).unwrap();
        let chain = build_equivalent_chain(k.value, 1.0, u, sites, channel, ChainGeometry::RingExact).unwrap();
        let a = hermitian_eigenvalues(block);
        let b = hermitian_eigenvalues(chain.to_dense());
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-10, "{} vs {}", x, y);
        }
    }

    #[test]
    fn k_subspace_is_invariant(
        sites in prop_oneof![Just(5usize), Just(7), Just(9)],
        n in 0i64..9,
        u in -6.0f64..6.0,
        channel in channel_strategy(),
    ) {
        let n = n % sites as i64;
        let (up, down) = sector_for(channel);
        let h = build_hubbard(&enumerate_sector(sites, up, down).unwrap(), &HubbardParams::ring(1.0, u)).unwrap();
        let basis = build_k_subspace_basis(sites, Momentum::from_index(sites, n), channel).unwrap();
        let m = basis.project(&h).unwrap();
        for (j, v) in basis.vectors.iter().enumerate() {
            let hv = h.apply(v.amplitudes());
            let col: Vec<Complex64> = (0..basis.dim()).map(|i| m[(i, j)]).collect();
            let back = basis.embed(&col).unwrap();
            prop_assert!(max_diff(&hv, back.amplitudes()) < 1e-12);
        }
    }

    #[test]
    fn translation_eigenvalue_is_minus_k(
        sites in prop_oneof![Just(5usize), Just(7), Just(9)],
        n in 0i64..9,
        channel in channel_strategy(),
    ) {
        let n = n % sites as i64;
        let k = Momentum::from_index(sites, n);
        let basis = build_k_subspace_basis(sites, k, channel).unwrap();
        let phase = Complex64::from_polar(1.0, -k.value);
        for v in &basis.vectors {
            let tv = apply_translation(v.basis(), v).unwrap();
            let want: Vec<Complex64> = v.amplitudes().iter().map(|a| a * phase).collect();
            prop_assert!(max_diff(tv.amplitudes(), &want) < 1e-12);
        }
    }

    #[test]
    fn total_spin_of_channel_vectors(
        sites in prop_oneof![Just(5usize), Just(7)],
        n in 0i64..7,
        channel in channel_strategy(),
    ) {
        let n = n % sites as i64;
        let basis = build_k_subspace_basis(sites, Momentum::from_index(sites, n), channel).unwrap();
        let s2 = if matches!(channel, Channel::Singlet) { 0.0 } else { 2.0 };
        for v in &basis.vectors {
            let out = apply_spin_op(v.basis(), v, SpinOp::Total).unwrap();
            let want: Vec<Complex64> = v.amplitudes().iter().map(|a| a * s2).collect();
            prop_assert!(max_diff(out.amplitudes(), &want) < 1e-12);
        }
    }

    #[test]
    fn triplet_block_ignores_interaction(
        n in 0i64..9,
        u in -20.0f64..20.0,
    ) {
        let k = Momentum::from_index(9, n);
        let free = build_equivalent_chain(k.value, 1.0, 0.0, 9, Channel::Triplet(0), ChainGeometry::RingExact).unwrap();
        let hard = build_equivalent_chain(k.value, 1.0, u, 9, Channel::Triplet(0), ChainGeometry::RingExact).unwrap();
        let a = hermitian_eigenvalues(free.to_dense());
        let b = hermitian_eigenvalues(hard.to_dense());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn chebyshev_matches_dense_exponential(
        sites in 3usize..7,
        u in -8.0f64..8.0,
        t in 0.0f64..6.0,
        seed in proptest::collection::vec(-1.0f64..1.0, 8),
    ) {
        let psi = random_state(sites, 1, 1, &seed);
        let h = build_hubbard(psi.basis(), &HubbardParams::ring(1.0, u)).unwrap();
        let out = evolve(&h, &psi, t, 1e-12).unwrap();
        let exact = dense_evolution(&h.to_dense(), psi.amplitudes(), t);
        prop_assert!(max_diff(out.amplitudes(), exact.as_slice()) < 1e-8);
    }

    #[test]
    fn evolution_composes_in_time(
        u in -5.0f64..5.0,
        t1 in 0.0f64..4.0,
        t2 in 0.0f64..4.0,
        seed in proptest::collection::vec(-1.0f64..1.0, 8),
    ) {
        let psi = random_state(6, 2, 1, &seed);
        let h = build_hubbard(psi.basis(), &HubbardParams::ring(1.0, u)).unwrap();
        let p = Propagator::new(&h, 1e-12).unwrap();
        let once = p.evolve(&psi, t1 + t2).unwrap();
        let twice = p.evolve(&p.evolve(&psi, t1).unwrap(), t2).unwrap();
        prop_assert!(max_diff(once.amplitudes(), twice.amplitudes()) < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn norm_and_energy_are_conserved(
        u in -8.0f64..8.0,
        k in 0.3f64..2.8,
        alpha in 0.3f64..0.6,
        t in 1.0f64..8.0,
    ) {
        let specs = [
            WavepacketSpec::new(7.0, alpha, k, Spin::Up),
            WavepacketSpec::new(20.0, alpha, -k, Spin::Down),
        ];
        let lat = common::ring_with_packets(27, &specs, u);
        let out = evolve(&lat.h, &lat.psi, t, DEFAULT_TOL).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-10 * t.max(1.0));
        let e0 = lat.h.expectation(lat.psi.amplitudes());
        let e1 = lat.h.expectation(out.amplitudes());
        prop_assert!((e0 - e1).abs() < 1e-9);
    }

    #[test]
    fn centroid_moves_at_group_velocity(k in -1.2f64..1.2, t in 1.0f64..4.0) {
        let sites = 81;
        let spec = WavepacketSpec::new(40.0, 0.12, k, Spin::Up);
        let basis = enumerate_sector(sites, 1, 0).unwrap();
        let psi = product_state(&[spec], &basis).unwrap();
        let h = build_hubbard(&basis, &HubbardParams::ring(1.0, 0.0)).unwrap();
        let out = evolve(&h, &psi, t, DEFAULT_TOL).unwrap();
        let mut probs = vec![0.0; sites];
        for (i, a) in out.amplitudes().iter().enumerate() {
            probs[basis.config(i).sites(Spin::Up)[0]] += a.norm_sqr();
        }
        let drift = ring_centroid(&probs, 40.0) - 40.0;
        let want = group_velocity(k, 1.0) * t;
        prop_assert!((drift - want).abs() < 0.03 * want.abs() + 0.02, "drift {} vs {}", drift, want);
    }
}

fn random_su2(a: f64, b: f64, g: f64) -> Matrix2<Complex64> {
    let (ca, sa) = ((a / 2.0).cos(), (a / 2.0).sin());
    Matrix2::new(
        Complex64::from_polar(ca, (b + g) / 2.0),
        Complex64::from_polar(sa, (b - g) / 2.0),
        -Complex64::from_polar(sa, -(b - g) / 2.0),
        Complex64::from_polar(ca, -(b + g) / 2.0),
    )
}

fn kron2(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

/// `M` on slots `(s, s+1)` of a four-slot register, slot 0 most significant.
fn embed_pair(m: &Matrix4<Complex64>, s: usize) -> DMatrix<Complex64> {
    let left = 1usize << s;
    let right = 1usize << (2 - s);
    let eye_l = DMatrix::<Complex64>::identity(left, left);
    let eye_r = DMatrix::<Complex64>::identity(right, right);
    let mid = DMatrix::from_fn(4, 4, |i, j| m[(i, j)]);
    eye_l.kronecker(&mid).kronecker(&eye_r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn concurrence_is_local_unitary_invariant(
        re in proptest::collection::vec(-1.0f64..1.0, 4),
        im in proptest::collection::vec(-1.0f64..1.0, 4),
        angles in proptest::collection::vec(0.0f64..2.0 * PI, 6),
    ) {
        let n = re.iter().zip(&im).map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
        prop_assume!(n > 1e-3);
        let v: [Complex64; 4] = std::array::from_fn(|i| c(re[i], im[i]) / n);
        let local = kron2(&random_su2(angles[0], angles[1], angles[2]), &random_su2(angles[3], angles[4], angles[5]));
        let w = local * nalgebra::Vector4::from_column_slice(&v);
        let before = concurrence(&pure_pair_state(&v)).unwrap();
        let after = concurrence(&pure_pair_state(&[w[0], w[1], w[2], w[3]])).unwrap();
        prop_assert!((before - after).abs() < 1e-9, "{} vs {}", before, after);
    }

    #[test]
    fn two_vs_two_cascade_matches_kronecker_oracle(
        theta in -PI..PI,
        spins in proptest::collection::vec(any::<bool>(), 4),
    ) {
        let s: Vec<Spin> = spins.iter().map(|&d| if d { Spin::Down } else { Spin::Up }).collect();
        let init = SpinTrainState::product(&s[..2], &s[2..]).unwrap();
        let out = cascade(&init, &equal_spacing_schedule(2, 2).unwrap(), theta).unwrap();

        let m = pair_smatrix(theta);
        let u = embed_pair(&m, 1) * embed_pair(&m, 2) * embed_pair(&m, 0) * embed_pair(&m, 1);
        let want = u * DVector::from_column_slice(init.amplitudes());
        prop_assert!(max_diff(out.amplitudes(), want.as_slice()) < 1e-13);
    }
}
