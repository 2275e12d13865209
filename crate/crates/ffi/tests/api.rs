use std::f64::consts::PI;
use std::ptr;

use hubbard_scatter::spin::{cascade, equal_spacing_schedule, SpinTrainState};
use hubbard_scatter::Spin;
use hubbard_scatter_ffi::*;

fn packets() -> (HsPacket, HsPacket) {
    (
        HsPacket { center: 10.0, alpha: 0.3, momentum: PI / 2.0, spin: HsSpin::Up },
        HsPacket { center: 30.0, alpha: 0.3, momentum: -PI / 2.0, spin: HsSpin::Down },
    )
}

#[test]
fn resonant_collision_entangles() {
    let (l, r) = packets();
    let mut c = ptr::null_mut();
    unsafe {
        assert_eq!(hs_collision_new(41, 1.0, 4.0, &l, &r, &mut c), HsStatus::Ok);
        for _ in 0..10 {
            assert_eq!(hs_collision_evolve(c, 1.0), HsStatus::Ok);
        }
        let (mut t, mut norm, mut theta) = (0.0, 0.0, 0.0);
        assert_eq!(hs_collision_info(c, &mut t, &mut norm, &mut theta), HsStatus::Ok);
        assert!((t - 10.0).abs() < 1e-12);
        assert!((norm - 1.0).abs() < 1e-9);
        assert!((theta.abs() - PI / 2.0).abs() < 1e-12);
        let (mut f, mut conc) = (0.0, 0.0);
        assert_eq!(hs_collision_fidelity(c, 10.0, 30.0, &mut f), HsStatus::Ok);
        assert_eq!(hs_collision_concurrence(c, 10.0, 30.0, &mut conc), HsStatus::Ok);
        assert!(f > 0.9, "fidelity {f}");
        assert!(conc > 0.95, "concurrence {conc}");
        hs_collision_free(c);
    }
}

#[test]
fn collision_rejects_bad_input() {
    let (l, mut r) = packets();
    let mut c = ptr::null_mut();
    unsafe {
        assert_eq!(hs_collision_new(31, 1.0, 4.0, &l, ptr::null(), &mut c), HsStatus::NullPointer);
        assert!(c.is_null());
        r.spin = HsSpin::Up;
        assert_eq!(hs_collision_new(31, 1.0, 4.0, &l, &r, &mut c), HsStatus::InvalidArgument);
        assert!(hs_last_error_message(ptr::null_mut(), 0) > 1);
        r.spin = HsSpin::Down;
        assert_eq!(hs_collision_new(1, 1.0, 4.0, &l, &r, &mut c), HsStatus::InvalidArgument);
        assert_eq!(hs_collision_evolve(ptr::null_mut(), 1.0), HsStatus::NullPointer);
        hs_collision_free(ptr::null_mut());
    }
}

#[test]
fn spin_train_matches_core_cascade() {
    let left = [HsSpin::Up, HsSpin::Up];
    let right = [HsSpin::Down, HsSpin::Down, HsSpin::Up];
    let theta = 0.7;
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(hs_spin_train_new(left.as_ptr(), 2, right.as_ptr(), 3, &mut t), HsStatus::Ok);
        assert_eq!(hs_spin_train_cascade(t, theta), HsStatus::Ok);
        let (mut slots, mut n) = (0, 0);
        assert_eq!(hs_spin_train_shape(t, &mut slots, &mut n), HsStatus::Ok);
        assert_eq!((slots, n), (5, 32));
        let (mut re, mut im) = (vec![0.0; n], vec![0.0; n]);
        assert_eq!(hs_spin_train_amplitudes(t, re.as_mut_ptr(), im.as_mut_ptr(), n - 1), HsStatus::BufferTooSmall);
        assert_eq!(hs_spin_train_amplitudes(t, re.as_mut_ptr(), im.as_mut_ptr(), n), HsStatus::Ok);

        let init = SpinTrainState::product(&[Spin::Up, Spin::Up], &[Spin::Down, Spin::Down, Spin::Up]).unwrap();
        let want = cascade(&init, &equal_spacing_schedule(2, 3).unwrap(), theta).unwrap();
        for (i, a) in want.amplitudes().iter().enumerate() {
            assert!((a.re - re[i]).abs() < 1e-15 && (a.im - im[i]).abs() < 1e-15);
        }
        for slot in 0..slots {
            let mut p = 0.0;
            assert_eq!(hs_spin_train_purity(t, slot, &mut p), HsStatus::Ok);
            assert!((0.5 - 1e-12..=1.0 + 1e-12).contains(&p));
        }
        let mut p = 0.0;
        assert_eq!(hs_spin_train_purity(t, slots, &mut p), HsStatus::InvalidArgument);
        hs_spin_train_free(t);
    }
}

#[test]
fn scalar_functions() {
    let (mut theta, mut gate, mut exact, mut approx, mut delta) = (0.0, 0.0, 0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(hs_collision_angle(1.0, 1.0, &mut theta), HsStatus::Ok);
        assert_eq!(hs_gate_time(1.0, 1.0, &mut gate), HsStatus::Ok);
        assert_eq!(hs_resonance_interaction(1, 2.0, &mut exact, &mut approx), HsStatus::Ok);
        assert_eq!(hs_reflection_phase(0.0, 2.0, &mut delta), HsStatus::Ok);
        assert_eq!(hs_resonance_interaction(0, 2.0, &mut exact, &mut approx), HsStatus::InvalidArgument);
    }
    assert!((theta - PI / 2.0).abs() < 1e-15);
    assert!((gate - PI / 2.0).abs() < 1e-15);
    assert!((exact - 2.0).abs() < 1e-12);
    assert_eq!(delta, 0.0);
}
