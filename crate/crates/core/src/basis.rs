//! Fixed-particle-number fermionic bases on an `L`-site ring.
//!
//! A configuration is a pair of occupation bitmasks `(up, down)`. The Fock
//! state it labels is
//!
//! ```text
//! c†_{u1↑} c†_{u2↑} … c†_{d1↓} c†_{d2↓} … |vac⟩,   u1 < u2 < …,  d1 < d2 < …
//! ```
//!
//! i.e. creation operators sorted site-ascending with every ↑ before every ↓.
//! All fermionic signs in the crate derive from this one ordering.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest supported ring; occupations are stored in `u128` masks.
pub const MAX_SITES: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn flipped(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }

    pub fn sz(self) -> f64 {
        match self {
            Spin::Up => 0.5,
            Spin::Down => -0.5,
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spin::Up => "up",
            Spin::Down => "down",
        })
    }
}

/// Occupation pattern of both spin species.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Config {
    pub up: u128,
    pub down: u128,
}

impl Config {
    pub fn mask(&self, spin: Spin) -> u128 {
        match spin {
            Spin::Up => self.up,
            Spin::Down => self.down,
        }
    }

    fn mask_mut(&mut self, spin: Spin) -> &mut u128 {
        match spin {
            Spin::Up => &mut self.up,
            Spin::Down => &mut self.down,
        }
    }

    pub fn occupied(&self, site: usize, spin: Spin) -> bool {
        self.mask(spin) >> site & 1 == 1
    }

    /// Occupied sites of one species, ascending.
    pub fn sites(&self, spin: Spin) -> Vec<usize> {
        bits(self.mask(spin)).collect()
    }

    /// Number of modes that precede `(site, spin)` in canonical order and are occupied.
    fn modes_before(&self, site: usize, spin: Spin) -> u32 {
        let below = (self.mask(spin) & low_mask(site)).count_ones();
        match spin {
            Spin::Up => below,
            Spin::Down => self.up.count_ones() + below,
        }
    }

    /// `c_{site,spin}` acting on this configuration.
    pub fn annihilate(&self, site: usize, spin: Spin) -> Option<(Config, f64)> {
        if !self.occupied(site, spin) {
            return None;
        }
        let sign = parity_sign(self.modes_before(site, spin));
        let mut out = *self;
        *out.mask_mut(spin) &= !(1u128 << site);
        Some((out, sign))
    }

    /// `c†_{site,spin}` acting on this configuration.
    pub fn create(&self, site: usize, spin: Spin) -> Option<(Config, f64)> {
        if self.occupied(site, spin) {
            return None;
        }
        let sign = parity_sign(self.modes_before(site, spin));
        let mut out = *self;
        *out.mask_mut(spin) |= 1u128 << site;
        Some((out, sign))
    }

    /// `c†_{to,s_to} c_{from,s_from}` acting on this configuration.
    pub fn hop(&self, to: (usize, Spin), from: (usize, Spin)) -> Option<(Config, f64)> {
        let (mid, s1) = self.annihilate(from.0, from.1)?;
        let (out, s2) = mid.create(to.0, to.1)?;
        Some((out, s1 * s2))
    }

    /// Express `c†_{o1} c†_{o2} … |vac⟩` (operators in the given order) as a
    /// signed canonical configuration. `None` when a mode repeats.
    pub fn from_ordered_ops(ops: &[(usize, Spin)]) -> Option<(Config, f64)> {
        let mut cfg = Config { up: 0, down: 0 };
        let mut sign = 1.0;
        // Apply right-most operator first.
        for &(site, spin) in ops.iter().rev() {
            let (next, s) = cfg.create(site, spin)?;
            cfg = next;
            sign *= s;
        }
        Some((cfg, sign))
    }
}

pub(crate) fn low_mask(site: usize) -> u128 {
    if site >= 128 {
        u128::MAX
    } else {
        (1u128 << site) - 1
    }
}

pub(crate) fn parity_sign(count: u32) -> f64 {
    if count.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Iterator over set-bit positions, ascending.
pub fn bits(mut mask: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let b = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(b)
        }
    })
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// All `k`-subsets of `0..n` as bitmasks, in lexicographic order of the
/// ascending site tuples.
fn combinations(n: usize, k: usize) -> Vec<u128> {
    let mut out = Vec::with_capacity(binomial(n, k));
    if k == 0 {
        out.push(0);
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().fold(0u128, |m, &i| m | 1u128 << i));
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Basis of the `(n_up, n_down)` sector on `L` ring sites.
///
/// Ordinal of a configuration is `rank(up) * C(L, n_down) + rank(down)`, which is
/// lexicographic on the occupied-site tuples with the ↑ tuple major.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    sites: usize,
    n_up: usize,
    n_down: usize,
    up_masks: Vec<u128>,
    down_masks: Vec<u128>,
    up_rank: HashMap<u128, usize>,
    down_rank: HashMap<u128, usize>,
}

impl PartialEq for SectorBasis {
    fn eq(&self, other: &Self) -> bool {
        self.label() == other.label()
    }
}

impl SectorBasis {
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn n_up(&self) -> usize {
        self.n_up
    }

    pub fn n_down(&self) -> usize {
        self.n_down
    }

    pub fn label(&self) -> (usize, usize, usize) {
        (self.sites, self.n_up, self.n_down)
    }

    pub fn dim(&self) -> usize {
        self.up_masks.len() * self.down_masks.len()
    }

    pub fn config(&self, index: usize) -> Config {
        let nd = self.down_masks.len();
        Config { up: self.up_masks[index / nd], down: self.down_masks[index % nd] }
    }

    pub fn index(&self, config: &Config) -> Option<usize> {
        let iu = self.up_rank.get(&config.up)?;
        let id = self.down_rank.get(&config.down)?;
        Some(iu * self.down_masks.len() + id)
    }

    pub fn configs(&self) -> impl Iterator<Item = Config> + '_ {
        self.up_masks
            .iter()
            .flat_map(move |&up| self.down_masks.iter().map(move |&down| Config { up, down }))
    }

    /// `Sz` eigenvalue shared by every state in the sector.
    pub fn sz(&self) -> f64 {
        0.5 * (self.n_up as f64 - self.n_down as f64)
    }

    fn describe(&self) -> String {
        format!("sector(L={}, n_up={}, n_down={})", self.sites, self.n_up, self.n_down)
    }
}

impl fmt::Display for SectorBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// Enumerate the `(n_up, n_down)` sector on `sites` ring sites.
pub fn enumerate_sector(sites: usize, n_up: usize, n_down: usize) -> Result<Arc<SectorBasis>> {
    if sites == 0 {
        return Err(Error::InvalidSector("ring needs at least one site".into()));
    }
    if sites > MAX_SITES {
        return Err(Error::InvalidSector(format!("at most {MAX_SITES} sites supported, got {sites}")));
    }
    if n_up > sites || n_down > sites {
        return Err(Error::InvalidSector(format!(
            "particle counts ({n_up}, {n_down}) exceed {sites} sites"
        )));
    }
    let up_masks = combinations(sites, n_up);
    let down_masks = combinations(sites, n_down);
    let up_rank = up_masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let down_rank = down_masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    Ok(Arc::new(SectorBasis { sites, n_up, n_down, up_masks, down_masks, up_rank, down_rank }))
}

/// Complex amplitudes over a [`SectorBasis`].
#[derive(Clone, Debug)]
pub struct ManyBodyState {
    basis: Arc<SectorBasis>,
    amps: Vec<Complex64>,
}

impl ManyBodyState {
    pub fn zeros(basis: &Arc<SectorBasis>) -> Self {
        ManyBodyState { basis: Arc::clone(basis), amps: vec![Complex64::new(0.0, 0.0); basis.dim()] }
    }

    pub fn from_amplitudes(basis: &Arc<SectorBasis>, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(invalid_len(basis, amps.len()));
        }
        Ok(ManyBodyState { basis: Arc::clone(basis), amps })
    }

    pub fn basis_state(basis: &Arc<SectorBasis>, index: usize) -> Self {
        let mut s = Self::zeros(basis);
        s.amps[index] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Rescale to unit norm. Fails on the zero vector.
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Degenerate("cannot normalize a zero or non-finite state".into()));
        }
        let inv = 1.0 / n;
        self.amps.iter_mut().for_each(|a| *a *= inv);
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &ManyBodyState) -> Result<Complex64> {
        self.check_same_basis(other.basis())?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn scale(&mut self, factor: Complex64) {
        self.amps.iter_mut().for_each(|a| *a *= factor);
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, factor: Complex64, other: &ManyBodyState) -> Result<()> {
        self.check_same_basis(other.basis())?;
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += factor * b;
        }
        Ok(())
    }

    pub fn check_same_basis(&self, basis: &SectorBasis) -> Result<()> {
        if *self.basis != *basis {
            return Err(Error::BasisMismatch { expected: basis.describe(), found: self.basis.describe() });
        }
        Ok(())
    }
}

fn invalid_len(basis: &SectorBasis, len: usize) -> Error {
    Error::BasisMismatch {
        expected: format!("{} amplitudes for {}", basis.dim(), basis.describe()),
        found: format!("{len} amplitudes"),
    }
}

/// Translation of one configuration by one site, `i → i+1 mod L`.
pub fn translate_config(config: &Config, sites: usize) -> (Config, f64) {
    let mut sign = 1.0;
    let mut out = Config { up: 0, down: 0 };
    for spin in [Spin::Up, Spin::Down] {
        let mask = config.mask(spin);
        let top = 1u128 << (sites - 1);
        let mut shifted = (mask & !top) << 1;
        if mask & top != 0 {
            shifted |= 1;
            // c†_{0} moves from the end of this species' string to its front.
            sign *= parity_sign(mask.count_ones() - 1);
        }
        *out.mask_mut(spin) = shifted;
    }
    (out, sign)
}

/// Shift every particle one site to the right around the ring.
pub fn apply_translation(basis: &SectorBasis, psi: &ManyBodyState) -> Result<ManyBodyState> {
    psi.check_same_basis(basis)?;
    let mut out = ManyBodyState::zeros(psi.basis());
    for (i, cfg) in basis.configs().enumerate() {
        let a = psi.amps[i];
        if a == Complex64::new(0.0, 0.0) {
            continue;
        }
        let (to, sign) = translate_config(&cfg, basis.sites);
        let j = basis.index(&to).expect("translation preserves the sector");
        out.amps[j] += a * sign;
    }
    Ok(out)
}

/// Global spin operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpinOp {
    Raise,
    Lower,
    Z,
    Total,
}

/// Apply `S+`, `S−`, `Sz` or `S²`. `S±` land in the adjacent sector.
pub fn apply_spin_op(basis: &SectorBasis, psi: &ManyBodyState, which: SpinOp) -> Result<ManyBodyState> {
    psi.check_same_basis(basis)?;
    match which {
        SpinOp::Z => {
            let mut out = psi.clone();
            out.scale(Complex64::new(basis.sz(), 0.0));
            Ok(out)
        }
        SpinOp::Raise => ladder(psi, Spin::Up),
        SpinOp::Lower => ladder(psi, Spin::Down),
        SpinOp::Total => {
            let sz = basis.sz();
            let mut out = psi.clone();
            out.scale(Complex64::new(sz * (sz + 1.0), 0.0));
            if basis.n_down > 0 && basis.n_up < basis.sites {
                let raised = ladder(psi, Spin::Up)?;
                let back = ladder(&raised, Spin::Down)?;
                out.add_scaled(Complex64::new(1.0, 0.0), &back)?;
            }
            Ok(out)
        }
    }
}

/// `Σ_i c†_{i,to} c_{i,from}` where `to` is the created species.
fn ladder(psi: &ManyBodyState, to: Spin) -> Result<ManyBodyState> {
    let basis = psi.basis();
    let (nu, nd) = match to {
        Spin::Up => {
            if basis.n_down == 0 || basis.n_up == basis.sites {
                return Err(Error::EmptySector(format!("S+ out of {}", basis.describe())));
            }
            (basis.n_up + 1, basis.n_down - 1)
        }
        Spin::Down => {
            if basis.n_up == 0 || basis.n_down == basis.sites {
                return Err(Error::EmptySector(format!("S- out of {}", basis.describe())));
            }
            (basis.n_up - 1, basis.n_down + 1)
        }
    };
    let target = enumerate_sector(basis.sites, nu, nd)?;
    let from = to.flipped();
    let mut out = ManyBodyState::zeros(&target);
    for (i, cfg) in basis.configs().enumerate() {
        let a = psi.amps[i];
        if a == Complex64::new(0.0, 0.0) {
            continue;
        }
        for site in bits(cfg.mask(from)) {
            if let Some((next, sign)) = cfg.hop((site, to), (site, from)) {
                let j = target.index(&next).expect("ladder target in sector");
                out.amps[j] += a * sign;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dimensions() {
        assert_eq!(enumerate_sector(81, 1, 1).unwrap().dim(), 6561);
        assert_eq!(enumerate_sector(5, 2, 0).unwrap().dim(), 10);
        let b = enumerate_sector(4, 1, 1).unwrap();
        assert_eq!(b.dim(), 16);
        assert_eq!(b.config(0), Config { up: 1, down: 1 });
        assert_eq!(b.config(1), Config { up: 1, down: 2 });
        assert_eq!(b.config(4), Config { up: 2, down: 1 });
    }

    #[test]
    fn lexicographic_order() {
        let b = enumerate_sector(5, 2, 0).unwrap();
        let tuples: Vec<Vec<usize>> = b.configs().map(|c| c.sites(Spin::Up)).collect();
        let mut sorted = tuples.clone();
        sorted.sort();
        assert_eq!(tuples, sorted);
        assert_eq!(tuples[0], vec![0, 1]);
        assert_eq!(tuples[9], vec![3, 4]);
    }

    #[test]
    fn rejects_bad_sectors() {
        assert!(enumerate_sector(0, 0, 0).is_err());
        assert!(enumerate_sector(3, 4, 0).is_err());
        assert!(enumerate_sector(3, 0, 4).is_err());
        assert_eq!(enumerate_sector(3, 0, 0).unwrap().dim(), 1);
    }

    #[test]
    fn roundtrip_index() {
        let b = enumerate_sector(6, 2, 3).unwrap();
        for i in 0..b.dim() {
            assert_eq!(b.index(&b.config(i)), Some(i));
        }
    }

    #[test]
    fn translation_moves_site() {
        let b = enumerate_sector(5, 1, 0).unwrap();
        let psi = ManyBodyState::basis_state(&b, b.index(&Config { up: 1 << 2, down: 0 }).unwrap());
        let out = apply_translation(&b, &psi).unwrap();
        let j = b.index(&Config { up: 1 << 3, down: 0 }).unwrap();
        assert_eq!(out.amplitudes()[j], c(1.0, 0.0));
    }

    #[test]
    fn translation_wrap_sign() {
        // c†_0 c†_4 |vac> -> c†_1 c†_0 |vac> = -c†_0 c†_1 |vac>
        let b = enumerate_sector(5, 2, 0).unwrap();
        let i = b.index(&Config { up: 0b10001, down: 0 }).unwrap();
        let out = apply_translation(&b, &ManyBodyState::basis_state(&b, i)).unwrap();
        let j = b.index(&Config { up: 0b00011, down: 0 }).unwrap();
        assert_eq!(out.amplitudes()[j], c(-1.0, 0.0));
    }

    #[test]
    fn translation_period() {
        let b = enumerate_sector(5, 2, 2).unwrap();
        let amps = (0..b.dim()).map(|i| c((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())).collect();
        let psi = ManyBodyState::from_amplitudes(&b, amps).unwrap();
        let mut phi = psi.clone();
        for _ in 0..5 {
            phi = apply_translation(&b, &phi).unwrap();
        }
        for (a, b) in psi.amplitudes().iter().zip(phi.amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn sz_eigenvalue() {
        let b = enumerate_sector(4, 2, 0).unwrap();
        let psi = ManyBodyState::basis_state(&b, 3);
        let out = apply_spin_op(&b, &psi, SpinOp::Z).unwrap();
        assert_eq!(out.amplitudes()[3], c(1.0, 0.0));
    }

    #[test]
    fn ladder_errors() {
        let b = enumerate_sector(4, 2, 0).unwrap();
        let psi = ManyBodyState::basis_state(&b, 0);
        assert!(matches!(apply_spin_op(&b, &psi, SpinOp::Raise), Err(Error::EmptySector(_))));
        assert!(apply_spin_op(&b, &psi, SpinOp::Lower).is_ok());
    }

    #[test]
    fn commutator_identity_on_random_state() {
        let b = enumerate_sector(6, 1, 1).unwrap();
        let amps = (0..b.dim()).map(|i| c((i as f64 * 1.3).sin(), (i as f64 * 0.7).cos())).collect();
        let psi = ManyBodyState::from_amplitudes(&b, amps).unwrap();
        // S+S- ψ - S-S+ ψ - 2 Sz ψ
        let down = apply_spin_op(&b, &psi, SpinOp::Lower).unwrap();
        let pm = apply_spin_op(down.basis(), &down, SpinOp::Raise).unwrap();
        let up = apply_spin_op(&b, &psi, SpinOp::Raise).unwrap();
        let mp = apply_spin_op(up.basis(), &up, SpinOp::Lower).unwrap();
        let z = apply_spin_op(&b, &psi, SpinOp::Z).unwrap();
        for i in 0..b.dim() {
            let r = pm.amplitudes()[i] - mp.amplitudes()[i] - 2.0 * z.amplitudes()[i];
            assert!(r.norm() < 1e-13);
        }
    }

    #[test]
    fn ordered_ops_sign() {
        // c†_{0↓} c†_{1↑} = - c†_{1↑} c†_{0↓}
        let (cfg, s) = Config::from_ordered_ops(&[(0, Spin::Down), (1, Spin::Up)]).unwrap();
        assert_eq!(cfg, Config { up: 2, down: 1 });
        assert_eq!(s, -1.0);
        let (_, s) = Config::from_ordered_ops(&[(1, Spin::Up), (0, Spin::Down)]).unwrap();
        assert_eq!(s, 1.0);
        assert!(Config::from_ordered_ops(&[(1, Spin::Up), (1, Spin::Up)]).is_none());
    }

    #[test]
    fn basis_mismatch() {
        let a = enumerate_sector(4, 1, 1).unwrap();
        let b = enumerate_sector(5, 1, 1).unwrap();
        let psi = ManyBodyState::basis_state(&a, 0);
        assert!(matches!(apply_translation(&b, &psi), Err(Error::BasisMismatch { .. })));
    }
}
