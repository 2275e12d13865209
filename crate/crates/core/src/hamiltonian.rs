//! Hubbard Hamiltonian on a sector, the momentum-resolved two-particle bases
//! and the equivalent single-particle chains in relative coordinates.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis::{
    apply_spin_op, apply_translation, bits, enumerate_sector, Config, ManyBodyState, SectorBasis, Spin, SpinOp,
};
use crate::error::{invalid, Error, Result};
use crate::sparse::SparseOperator;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Ring,
    Open,
}

/// Hopping `κ` and on-site repulsion `U`. `κ = 1` sets the energy unit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HubbardParams {
    pub hopping: f64,
    pub interaction: f64,
    pub boundary: Boundary,
}

impl HubbardParams {
    pub fn ring(hopping: f64, interaction: f64) -> Self {
        HubbardParams { hopping, interaction, boundary: Boundary::Ring }
    }

    fn validate(&self) -> Result<()> {
        if !self.hopping.is_finite() {
            return Err(invalid("hopping", format!("non-finite value {}", self.hopping)));
        }
        if !self.interaction.is_finite() {
            return Err(invalid("interaction", format!("non-finite value {}", self.interaction)));
        }
        Ok(())
    }
}

fn neighbours(site: usize, sites: usize, boundary: Boundary) -> impl Iterator<Item = usize> {
    let right = match boundary {
        Boundary::Ring => Some((site + 1) % sites),
        Boundary::Open => (site + 1 < sites).then_some(site + 1),
    };
    let left = match boundary {
        Boundary::Ring => Some((site + sites - 1) % sites),
        Boundary::Open => site.checked_sub(1),
    };
    right.into_iter().chain(left)
}

/// `H = −κ Σ_{iσ} (c†_{iσ} c_{i+1,σ} + h.c.) + U Σ_i n_{i↑} n_{i↓}` on `sector`.
pub fn build_hubbard(sector: &SectorBasis, params: &HubbardParams) -> Result<SparseOperator> {
    params.validate()?;
    let sites = sector.sites();
    let mut triplets = Vec::with_capacity(sector.dim() * (2 * (sector.n_up() + sector.n_down()) + 1));
    for (col, cfg) in sector.configs().enumerate() {
        let doubles = (cfg.up & cfg.down).count_ones() as f64;
        let mut diag = params.interaction * doubles;
        for spin in [Spin::Up, Spin::Down] {
            for site in bits(cfg.mask(spin)) {
                for to in neighbours(site, sites, params.boundary) {
                    if to == site {
                        diag -= params.hopping;
                        continue;
                    }
                    if let Some((next, sign)) = cfg.hop((to, spin), (site, spin)) {
                        let row = sector.index(&next).expect("hopping stays in sector");
                        triplets.push((row, col, Complex64::new(-params.hopping * sign, 0.0)));
                    }
                }
            }
        }
        if diag != 0.0 {
            triplets.push((col, col, Complex64::new(diag, 0.0)));
        }
    }
    SparseOperator::from_triplets(sector.dim(), triplets)
}

/// Spin channel of a two-fermion invariant subspace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    /// `S = 0`: spatially symmetric, includes the doublon `r = 0`.
    Singlet,
    /// `S = 1` with the given `Sz ∈ {−1, 0, 1}`.
    Triplet(i8),
}

impl Channel {
    fn is_singlet(self) -> bool {
        matches!(self, Channel::Singlet)
    }
}

/// Total momentum `K = 2πn/L` with its integer label.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Momentum {
    pub index: i64,
    pub value: f64,
}

impl Momentum {
    pub fn from_index(sites: usize, index: i64) -> Self {
        Momentum { index, value: 2.0 * PI * index as f64 / sites as f64 }
    }

    /// Snap `value` onto the grid `2πn/L`; fails if it is off-grid by more than `1e-9`.
    pub fn quantize(sites: usize, value: f64) -> Result<Self> {
        let x = value * sites as f64 / (2.0 * PI);
        let n = x.round();
        if (x - n).abs() > 1e-9 {
            return Err(invalid("momentum", format!("K = {value} is not on the 2πn/{sites} grid")));
        }
        Ok(Self::from_index(sites, n as i64))
    }
}

/// Orthonormal basis of one `(K, channel)` two-particle subspace on an odd ring,
/// indexed by relative distance.
#[derive(Clone, Debug)]
pub struct ReducedBasis {
    pub sites: usize,
    pub momentum: Momentum,
    pub channel: Channel,
    pub distances: Vec<usize>,
    pub vectors: Vec<ManyBodyState>,
}

impl ReducedBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Sector the vectors live in.
    pub fn sector(&self) -> &Arc<SectorBasis> {
        self.vectors[0].basis()
    }

    /// Dense `⟨v_i|A|v_j⟩`.
    pub fn project(&self, op: &SparseOperator) -> Result<DMatrix<Complex64>> {
        if op.dim() != self.sector().dim() {
            return Err(Error::BasisMismatch {
                expected: format!("operator of dimension {}", self.sector().dim()),
                found: format!("dimension {}", op.dim()),
            });
        }
        let images: Vec<Vec<Complex64>> = self.vectors.iter().map(|v| op.apply(v.amplitudes())).collect();
        let n = self.dim();
        Ok(DMatrix::from_fn(n, n, |i, j| {
            self.vectors[i].amplitudes().iter().zip(&images[j]).map(|(a, b)| a.conj() * b).sum()
        }))
    }

    /// Expand chain coefficients into a lattice state.
    pub fn embed(&self, coefficients: &[Complex64]) -> Result<ManyBodyState> {
        if coefficients.len() != self.dim() {
            return Err(invalid("coefficients", format!("expected {}, got {}", self.dim(), coefficients.len())));
        }
        let mut out = ManyBodyState::zeros(self.sector());
        for (c, v) in coefficients.iter().zip(&self.vectors) {
            out.add_scaled(*c, v)?;
        }
        Ok(out)
    }
}

fn check_odd(sites: usize) -> Result<usize> {
    if sites.is_multiple_of(2) || sites < 3 {
        return Err(invalid("sites", format!("momentum subspaces need an odd ring of at least 3 sites, got {sites}")));
    }
    Ok((sites - 1) / 2)
}

/// Build the `(K, channel)` basis `|φ_r(K)⟩` on an odd ring of `sites = 2N₀+1`.
///
/// ```text
/// |φ_0(K)⟩ = L^{-1/2} Σ_j e^{iKj} c†_{j↑} c†_{j↓} |vac⟩
/// |φ_r(K)⟩ = (2L)^{-1/2} e^{iKr/2} Σ_j e^{iKj} (c†_{j↑} c†_{j+r↓} ∓ c†_{j↓} c†_{j+r↑}) |vac⟩
/// ```
///
/// with `−` for the singlet, `+` for the triplet, `r = 1..N₀`. Triplet `Sz = ±1`
/// components are `S±/√2` images of the `Sz = 0` vectors.
pub fn build_k_subspace_basis(sites: usize, momentum: Momentum, channel: Channel) -> Result<ReducedBasis> {
    let n0 = check_odd(sites)?;
    let k = momentum.value;
    let pair = enumerate_sector(sites, 1, 1)?;
    let mut distances = Vec::new();
    let mut vectors = Vec::new();
    if channel.is_singlet() {
        let mut v = ManyBodyState::zeros(&pair);
        let norm = 1.0 / (sites as f64).sqrt();
        for j in 0..sites {
            let idx = pair.index(&Config { up: 1 << j, down: 1 << j }).unwrap();
            v.amplitudes_mut()[idx] += Complex64::from_polar(norm, k * j as f64);
        }
        distances.push(0);
        vectors.push(v);
    }
    let exchange = if channel.is_singlet() { -1.0 } else { 1.0 };
    for r in 1..=n0 {
        let mut v = ManyBodyState::zeros(&pair);
        let norm = 1.0 / (2.0 * sites as f64).sqrt();
        for j in 0..sites {
            let l = (j + r) % sites;
            let phase = Complex64::from_polar(norm, k * (j as f64 + r as f64 / 2.0));
            for (ops, weight) in [([(j, Spin::Up), (l, Spin::Down)], 1.0), ([(j, Spin::Down), (l, Spin::Up)], exchange)] {
                let (cfg, sign) = Config::from_ordered_ops(&ops).unwrap();
                let idx = pair.index(&cfg).unwrap();
                v.amplitudes_mut()[idx] += phase * (sign * weight);
            }
        }
        distances.push(r);
        vectors.push(v);
    }
    if let Channel::Triplet(sz) = channel {
        let op = match sz {
            0 => None,
            1 => Some(SpinOp::Raise),
            -1 => Some(SpinOp::Lower),
            _ => return Err(invalid("channel", format!("triplet Sz must be -1, 0 or 1, got {sz}"))),
        };
        if let Some(op) = op {
            vectors = vectors
                .iter()
                .map(|v| {
                    let mut w = apply_spin_op(&pair, v, op)?;
                    w.scale(Complex64::new(1.0 / 2f64.sqrt(), 0.0));
                    Ok(w)
                })
                .collect::<Result<_>>()?;
        }
    }
    Ok(ReducedBasis { sites, momentum, channel, distances, vectors })
}

/// Geometry of the relative-coordinate chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainGeometry {
    /// Exact reduction of an odd ring of `length` sites, including the far-end
    /// boundary potential.
    RingExact,
    /// `length` chain sites with an open far end; used for scattering.
    SemiInfinite,
}

/// Relative-coordinate hopping `Q_r^K`: `−2√2 κ cos(K/2)` on the bond touching
/// `r = 0`, `−2κ cos(K/2)` elsewhere.
pub fn bond_amplitude(momentum: f64, hopping: f64, r: usize) -> f64 {
    let q = -2.0 * hopping * (momentum / 2.0).cos();
    if r == 0 {
        q * 2f64.sqrt()
    } else {
        q
    }
}

/// Tridiagonal single-particle chain equivalent to one `(K, channel)` block.
///
/// Singlet sites are `r = 0..`, triplet sites `r = 1..` (the `r = 0` site
/// removed). For [`ChainGeometry::RingExact`], `length` is the ring size
/// `L = 2N₀+1`, `K` must lie on the `2πn/L` grid, and site `N₀` carries the
/// boundary potential `±(−1)^n Q` (`+` singlet, `−` triplet).
pub fn build_equivalent_chain(
    momentum: f64,
    hopping: f64,
    interaction: f64,
    length: usize,
    channel: Channel,
    geometry: ChainGeometry,
) -> Result<SparseOperator> {
    if length < 3 {
        return Err(invalid("length", format!("chain needs at least 3 sites, got {length}")));
    }
    HubbardParams::ring(hopping, interaction).validate()?;
    if !momentum.is_finite() {
        return Err(invalid("momentum", "non-finite"));
    }
    let (first_r, last_r, boundary) = match geometry {
        ChainGeometry::RingExact => {
            let n0 = check_odd(length)?;
            let k = Momentum::quantize(length, momentum)?;
            let parity = if k.index.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let channel_sign = if channel.is_singlet() { 1.0 } else { -1.0 };
            let first = if channel.is_singlet() { 0 } else { 1 };
            (first, n0, Some(channel_sign * parity * bond_amplitude(momentum, hopping, 1)))
        }
        ChainGeometry::SemiInfinite => {
            let first = if channel.is_singlet() { 0 } else { 1 };
            (first, first + length - 1, None)
        }
    };
    let dim = last_r - first_r + 1;
    let mut triplets = Vec::with_capacity(3 * dim);
    if channel.is_singlet() && interaction != 0.0 {
        triplets.push((0, 0, Complex64::new(interaction, 0.0)));
    }
    for r in first_r..last_r {
        let q = Complex64::new(bond_amplitude(momentum, hopping, r), 0.0);
        let i = r - first_r;
        triplets.push((i, i + 1, q));
        triplets.push((i + 1, i, q));
    }
    if let Some(b) = boundary {
        triplets.push((dim - 1, dim - 1, Complex64::new(b, 0.0)));
    }
    SparseOperator::from_triplets(dim, triplets)
}

/// Frobenius norms of `[H, X]` for the symmetry generators on one sector.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SymmetryResiduals {
    pub translation: f64,
    pub sz: f64,
    pub total_spin: f64,
    pub raise: f64,
    pub lower: f64,
}

impl SymmetryResiduals {
    pub fn max(&self) -> f64 {
        [self.translation, self.sz, self.total_spin, self.raise, self.lower].into_iter().fold(0.0, f64::max)
    }
}

/// Evaluate every commutator column by column. Intended for small sectors.
type StateMap = dyn Fn(&ManyBodyState) -> Result<ManyBodyState>;

pub fn symmetry_residuals(sector: &Arc<SectorBasis>, params: &HubbardParams) -> Result<SymmetryResiduals> {
    let h = build_hubbard(sector, params)?;
    let apply_h = |h: &SparseOperator, s: &ManyBodyState| -> ManyBodyState {
        ManyBodyState::from_amplitudes(s.basis(), h.apply(s.amplitudes())).unwrap()
    };
    let diff_sq = |a: &ManyBodyState, b: &ManyBodyState| -> f64 {
        a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm_sqr()).sum()
    };
    let mut out = [0.0f64; 5];
    let raise_target = (sector.n_down() > 0 && sector.n_up() < sector.sites())
        .then(|| enumerate_sector(sector.sites(), sector.n_up() + 1, sector.n_down() - 1))
        .transpose()?;
    let lower_target = (sector.n_up() > 0 && sector.n_down() < sector.sites())
        .then(|| enumerate_sector(sector.sites(), sector.n_up() - 1, sector.n_down() + 1))
        .transpose()?;
    let h_raise = raise_target.as_ref().map(|b| build_hubbard(b, params)).transpose()?;
    let h_lower = lower_target.as_ref().map(|b| build_hubbard(b, params)).transpose()?;
    for i in 0..sector.dim() {
        let e = ManyBodyState::basis_state(sector, i);
        let he = apply_h(&h, &e);
        let pairs: [(usize, Box<StateMap>, Option<&SparseOperator>); 5] = [
            (0, Box::new(|s: &ManyBodyState| apply_translation(s.basis(), s)), None),
            (1, Box::new(|s: &ManyBodyState| apply_spin_op(s.basis(), s, SpinOp::Z)), None),
            (2, Box::new(|s: &ManyBodyState| apply_spin_op(s.basis(), s, SpinOp::Total)), None),
            (3, Box::new(|s: &ManyBodyState| apply_spin_op(s.basis(), s, SpinOp::Raise)), h_raise.as_ref()),
            (4, Box::new(|s: &ManyBodyState| apply_spin_op(s.basis(), s, SpinOp::Lower)), h_lower.as_ref()),
        ];
        for (slot, x, h_target) in pairs.iter() {
            if *slot >= 3 && h_target.is_none() {
                continue;
            }
            let xe = x(&e)?;
            let h_xe = apply_h(h_target.unwrap_or(&h), &xe);
            let x_he = x(&he)?;
            out[*slot] += diff_sq(&h_xe, &x_he);
        }
    }
    Ok(SymmetryResiduals {
        translation: out[0].sqrt(),
        sz: out[1].sqrt(),
        total_spin: out[2].sqrt(),
        raise: out[3].sqrt(),
        lower: out[4].sqrt(),
    })
}
