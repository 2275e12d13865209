//! Spin part of the factorized collision: the two-spin S-matrix, its
//! Heisenberg-pulse form, and cascades of pairwise collisions between
//! wavepacket trains.
//!
//! Two-spin matrices act on `|σ_L σ_R⟩` ordered `↑↑, ↑↓, ↓↑, ↓↓`.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

use crate::basis::Spin;
use crate::error::{invalid, Error, Result};

pub type SpinMatrix = Matrix4<Complex64>;

/// Largest train supported by the dense amplitude table.
pub const MAX_TRAIN_SPINS: usize = 20;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Identity on the triplet, `singlet` on the singlet.
fn exchange_form(triplet: Complex64, singlet: Complex64) -> SpinMatrix {
    let z = c(0.0, 0.0);
    let d = (triplet + singlet) * 0.5;
    let o = (triplet - singlet) * 0.5;
    Matrix4::new(
        triplet, z, z, z, //
        z, d, o, z, //
        z, o, d, z, //
        z, z, z, triplet,
    )
}

/// `S = exp[−i(θ−π)(s_L·s_R − 1/4)]`.
pub fn pair_smatrix(theta: f64) -> SpinMatrix {
    exchange_form(c(1.0, 0.0), Complex64::from_polar(1.0, theta - PI))
}

/// `U(t) = exp(−i s_L·s_R t)`.
pub fn heisenberg_gate(t: f64) -> SpinMatrix {
    exchange_form(Complex64::from_polar(1.0, -t / 4.0), Complex64::from_polar(1.0, 3.0 * t / 4.0))
}

/// Pulse length `t = 2 cot⁻¹(U/v_rel)` in `[0, 2π]`.
///
/// The gate realizes the collision up to time reversal and a phase:
/// `pair_smatrix(θ) = e^{−it/4} · heisenberg_gate(−t)` with `θ = collision_angle(U, v_rel)`.
pub fn gate_time(interaction: f64, relative_velocity: f64) -> Result<f64> {
    if interaction == 0.0 && relative_velocity == 0.0 {
        return Err(Error::Degenerate("gate time undefined at U = v_rel = 0".into()));
    }
    if !interaction.is_finite() || !relative_velocity.is_finite() {
        return Err(invalid("gate_time", "non-finite input"));
    }
    // cot⁻¹ on its continuous (0, π) branch
    Ok(PI - 2.0 * (interaction / relative_velocity).atan())
}

/// One pairwise collision: left-train particle `left` meets right-train particle `right`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Collision {
    pub left: usize,
    pub right: usize,
    pub time: f64,
    /// Per-collision angle; `None` uses the cascade's global angle.
    pub theta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct CollisionSchedule {
    pub entries: Vec<Collision>,
}

/// Relative tolerance for treating two collision times as simultaneous.
const TIME_TIE: f64 = 1e-12;

/// Straight-line kinematics of two approaching trains.
///
/// Indices are 1-based and count from the back of each train to its front:
/// `left_positions[M-1]` and `right_positions[N-1]` are the particles that meet
/// first. Collisions at the same instant must involve disjoint particles; ties
/// are ordered by `(left, right)`.
pub fn collision_schedule(
    left_positions: &[f64],
    left_velocity: f64,
    right_positions: &[f64],
    right_velocity: f64,
) -> Result<CollisionSchedule> {
    let closing = left_velocity - right_velocity;
    if !(closing.abs() > 0.0) {
        return Err(Error::Schedule("trains have zero relative velocity".into()));
    }
    if closing < 0.0 {
        return Err(Error::Schedule("trains move apart; no collisions".into()));
    }
    let mut entries = Vec::with_capacity(left_positions.len() * right_positions.len());
    for (m, &x) in left_positions.iter().enumerate() {
        for (n, &y) in right_positions.iter().enumerate() {
            let time = (y - x) / closing;
            if !(time >= 0.0) {
                return Err(Error::Schedule(format!("left {} starts right of right {}", m + 1, n + 1)));
            }
            entries.push(Collision { left: m + 1, right: n + 1, time, theta: None });
        }
    }
    let scale = entries.iter().map(|e| e.time.abs()).fold(1.0, f64::max);
    let same = |a: f64, b: f64| (a - b).abs() <= TIME_TIE * scale;
    entries.sort_by(|a, b| a.time.partial_cmp(&b.time).unwrap().then((a.left, a.right).cmp(&(b.left, b.right))));
    // canonical order within each group of simultaneous collisions
    let mut start = 0;
    while start < entries.len() {
        let mut end = start + 1;
        while end < entries.len() && same(entries[end].time, entries[start].time) {
            end += 1;
        }
        let group = &mut entries[start..end];
        group.sort_by_key(|e| (e.left, e.right));
        for i in 0..group.len() {
            for j in i + 1..group.len() {
                if group[i].left == group[j].left || group[i].right == group[j].right {
                    return Err(Error::Schedule(format!(
                        "three-body coincidence at t = {}: ({}, {}) and ({}, {})",
                        group[i].time, group[i].left, group[i].right, group[j].left, group[j].right
                    )));
                }
            }
        }
        start = end;
    }
    Ok(CollisionSchedule { entries })
}

/// Which incoming momentum a slot currently carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MomentumLabel {
    /// Right-moving, carried in by the left train.
    P,
    /// Left-moving, carried in by the right train.
    Q,
}

/// Dense spin amplitudes over spatially ordered slots.
///
/// Slot `s` is bit `(M+N−1−s)` of the table index (`0 = ↑`, `1 = ↓`). Initially
/// left-train spin `σ_m` sits in slot `m−1` and right-train spin `τ_n` in slot
/// `M+N−n`, so slot order is `σ_1 … σ_M τ_N … τ_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinTrainState {
    left: usize,
    right: usize,
    momenta: Vec<MomentumLabel>,
    amps: Vec<Complex64>,
}

impl SpinTrainState {
    pub fn product(left_spins: &[Spin], right_spins: &[Spin]) -> Result<Self> {
        let (m, n) = (left_spins.len(), right_spins.len());
        if m == 0 || n == 0 {
            return Err(invalid("train", "both trains need at least one particle"));
        }
        if m + n > MAX_TRAIN_SPINS {
            return Err(invalid("train", format!("at most {MAX_TRAIN_SPINS} spins, got {}", m + n)));
        }
        let mut slots = vec![Spin::Up; m + n];
        for (i, s) in left_spins.iter().enumerate() {
            slots[i] = *s;
        }
        for (i, s) in right_spins.iter().enumerate() {
            slots[m + n - 1 - i] = *s;
        }
        let mut amps = vec![c(0.0, 0.0); 1 << (m + n)];
        amps[Self::index_of(&slots)] = c(1.0, 0.0);
        let momenta = (0..m + n).map(|s| if s < m { MomentumLabel::P } else { MomentumLabel::Q }).collect();
        Ok(SpinTrainState { left: m, right: n, momenta, amps })
    }

    pub fn left_len(&self) -> usize {
        self.left
    }

    pub fn right_len(&self) -> usize {
        self.right
    }

    pub fn slots(&self) -> usize {
        self.left + self.right
    }

    pub fn momenta(&self) -> &[MomentumLabel] {
        &self.momenta
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn index_of(slots: &[Spin]) -> usize {
        slots.iter().fold(0usize, |acc, s| acc << 1 | usize::from(*s == Spin::Down))
    }

    pub fn spins_of(&self, index: usize) -> Vec<Spin> {
        let n = self.slots();
        (0..n).map(|s| if index >> (n - 1 - s) & 1 == 1 { Spin::Down } else { Spin::Up }).collect()
    }

    pub fn amplitude(&self, slots: &[Spin]) -> Complex64 {
        self.amps[Self::index_of(slots)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `2·Sz` of every nonzero component; `None` if they disagree.
    pub fn total_sz2(&self) -> Option<i64> {
        let mut found = None;
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() > 1e-15 {
                let downs = i.count_ones() as i64;
                let sz2 = self.slots() as i64 - 2 * downs;
                match found {
                    None => found = Some(sz2),
                    Some(v) if v != sz2 => return None,
                    _ => {}
                }
            }
        }
        found
    }

    /// Apply a two-spin matrix to adjacent slots `(slot, slot+1)`.
    pub fn apply_pair(&mut self, slot: usize, m: &SpinMatrix) -> Result<()> {
        let n = self.slots();
        if slot + 1 >= n {
            return Err(invalid("slot", format!("pair ({slot}, {}) outside {n} slots", slot + 1)));
        }
        let bl = 1usize << (n - 1 - slot);
        let br = 1usize << (n - 2 - slot);
        for i in 0..self.amps.len() {
            if i & (bl | br) != 0 {
                continue;
            }
            let idx = [i, i | br, i | bl, i | bl | br];
            let v = [self.amps[idx[0]], self.amps[idx[1]], self.amps[idx[2]], self.amps[idx[3]]];
            for (r, &target) in idx.iter().enumerate() {
                self.amps[target] = (0..4).map(|k| m[(r, k)] * v[k]).sum();
            }
        }
        Ok(())
    }

    /// Reduced 2×2 density matrix of one slot.
    pub fn reduced_slot(&self, slot: usize) -> Result<Matrix2<Complex64>> {
        let n = self.slots();
        if slot >= n {
            return Err(invalid("slot", format!("slot {slot} outside {n}")));
        }
        let b = 1usize << (n - 1 - slot);
        let mut rho = Matrix2::zeros();
        for i in 0..self.amps.len() {
            if i & b != 0 {
                continue;
            }
            let (up, down) = (self.amps[i], self.amps[i | b]);
            rho[(0, 0)] += up * up.conj();
            rho[(0, 1)] += up * down.conj();
            rho[(1, 0)] += down * up.conj();
            rho[(1, 1)] += down * down.conj();
        }
        Ok(rho)
    }

    /// Probability of every slot configuration, in table order.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Apply the schedule's pairwise S-matrices in order.
pub fn cascade(initial: &SpinTrainState, schedule: &CollisionSchedule, theta: f64) -> Result<SpinTrainState> {
    let (m, n) = (initial.left, initial.right);
    let mut state = initial.clone();
    let mut left_passed = vec![0usize; m + 1];
    let mut right_passed = vec![0usize; n + 1];
    for e in &schedule.entries {
        if e.left == 0 || e.left > m || e.right == 0 || e.right > n {
            return Err(Error::Schedule(format!("collision ({}, {}) outside a {m}x{n} train", e.left, e.right)));
        }
        let left_slot = e.left - 1 + left_passed[e.left];
        let right_slot = (m + n - e.right)
            .checked_sub(right_passed[e.right])
            .ok_or_else(|| Error::Schedule("right particle passed too many times".into()))?;
        if right_slot != left_slot + 1 {
            return Err(Error::Schedule(format!(
                "collision ({}, {}) pairs non-adjacent slots {left_slot} and {right_slot}",
                e.left, e.right
            )));
        }
        state.apply_pair(left_slot, &pair_smatrix(e.theta.unwrap_or(theta)))?;
        state.momenta.swap(left_slot, right_slot);
        left_passed[e.left] += 1;
        right_passed[e.right] += 1;
    }
    Ok(state)
}

/// Equally spaced trains on unit spacing, approaching with unit speeds.
pub fn equal_spacing_schedule(left: usize, right: usize) -> Result<CollisionSchedule> {
    let xs: Vec<f64> = (0..left).map(|i| i as f64).collect();
    let ys: Vec<f64> = (0..right).map(|i| (left + right - 1 - i) as f64).collect();
    collision_schedule(&xs, 1.0, &ys, -1.0)
}

/// Closed-form outcome of one `↑` colliding with `N` `↓`: amplitudes for the
/// `↑` ending in slot `j−1` (`j = 1..N`), then the no-flip amplitude (slot `N`).
pub fn single_vs_train_amplitudes(n: usize, theta: f64) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Err(invalid("n", "train needs at least one particle"));
    }
    let (s, co) = ((theta / 2.0).sin(), (theta / 2.0).cos());
    let mut out: Vec<Complex64> = (1..=n)
        .map(|j| c(0.0, -1.0) * Complex64::from_polar(s * co.powi(j as i32 - 1), theta * j as f64 / 2.0))
        .collect();
    out.push(Complex64::from_polar(co.powi(n as i32), theta * n as f64 / 2.0));
    Ok(out)
}

/// `Λ = cos^{2N}(θ/2)`.
pub fn single_spin_lambda(n: usize, theta: f64) -> f64 {
    (theta / 2.0).cos().powi(2 * n as i32)
}

/// `diag(Λ, 1−Λ)`.
pub fn reduced_single_spin(n: usize, theta: f64) -> Result<Matrix2<f64>> {
    if n == 0 {
        return Err(invalid("n", "train needs at least one particle"));
    }
    let l = single_spin_lambda(n, theta);
    Ok(Matrix2::new(l, 0.0, 0.0, 1.0 - l))
}

/// `Tr ρ²` of a single-spin density matrix.
pub fn purity(rho: &Matrix2<Complex64>) -> Result<f64> {
    let tr = rho.trace();
    if (tr - c(1.0, 0.0)).norm() > 1e-10 {
        return Err(Error::DensityMatrix(format!("trace {tr} is not 1")));
    }
    Ok((rho * rho).trace().re)
}

/// `P = 2(Λ−1/2)² + 1/2`.
pub fn purity_from_lambda(lambda: f64) -> f64 {
    2.0 * (lambda - 0.5).powi(2) + 0.5
}

/// Angle with `Λ = 1/2`: `θ = 2 cos⁻¹(2^{−1/(2N)})`.
pub fn resonance_theta(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n", "train needs at least one particle"));
    }
    Ok(2.0 * 2f64.powf(-1.0 / (2.0 * n as f64)).acos())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResonantInteraction {
    pub exact: f64,
    /// Large-`N` form `v_rel √(ln 2) / √N`.
    pub approximate: f64,
}

/// `U = v_rel tan[cos⁻¹(2^{−1/(2N)})]` and its large-`N` approximation.
pub fn resonance_interaction(n: usize, relative_velocity: f64) -> Result<ResonantInteraction> {
    if n == 0 {
        return Err(invalid("n", "train needs at least one particle"));
    }
    if relative_velocity == 0.0 || !relative_velocity.is_finite() {
        return Err(invalid("relative_velocity", "must be finite and non-zero"));
    }
    let half = resonance_theta(n)? / 2.0;
    Ok(ResonantInteraction {
        exact: relative_velocity * half.tan(),
        approximate: relative_velocity * 2f64.ln().sqrt() / (n as f64).sqrt(),
    })
}
