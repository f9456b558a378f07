//! Wave packets on a periodic 1D grid and the detection statistics they induce.
//!
//! Propagation is spectral: each Fourier mode is multiplied by its exact
//! phase (or 2×2 unitary for the Dirac spinor), so norm and the group
//! property hold to rounding. Densities become grid [`SliceMeasure`]s via
//! [`born_measure`], and [`collapse_scenario`] assembles the full set of
//! conditional measures for a projective detector.

mod propagators;
mod scales;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use propagators::{
    evolve, evolve_dirac_1p1, evolve_relativistic, evolve_schrodinger_free, relativistic_cutoff_ok,
};
pub use scales::{
    analytic_ce_gaussian, evolved_width, min_violation_halfwidth, width_ratio_threshold, ScaleReport,
};

use crate::conditions::MeasurementScenario;
use crate::error::{Error, Result};
use crate::measure::{GridGeometry, SliceMeasure};
use crate::region::Region;
use crate::spacetime::CausalStructure;
use crate::weight::EPS_MASS;

/// Reduced Planck constant, J·s (CODATA 2018).
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Speed of light, m/s.
pub const C_SI: f64 = 299_792_458.0;
/// Largest density tolerated in the first and last grid cell.
pub const BOUNDARY_LIMIT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub hbar: f64,
    pub c: f64,
}

impl Constants {
    /// `ħ = c = 1`.
    pub fn natural() -> Self {
        Constants { hbar: 1.0, c: 1.0 }
    }

    pub fn si() -> Self {
        Constants {
            hbar: HBAR_SI,
            c: C_SI,
        }
    }

    pub fn causal_structure(&self) -> Result<CausalStructure> {
        CausalStructure::new(1, self.c)
    }
}

/// Uniform periodic grid; cell `i` is centred at `origin + (i + ½)·h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1d {
    pub origin: f64,
    pub cell_size: f64,
    pub n: usize,
}

impl Grid1d {
    pub fn new(origin: f64, cell_size: f64, n: usize) -> Result<Self> {
        if !n.is_power_of_two() || n < 2 {
            return Err(Error::InvalidGrid(format!("{n} points is not a power of two")));
        }
        if !(cell_size > 0.0) || !cell_size.is_finite() || !origin.is_finite() {
            return Err(Error::InvalidGrid(format!("cell size {cell_size}, origin {origin}")));
        }
        Ok(Grid1d {
            origin,
            cell_size,
            n,
        })
    }

    /// `n` cells covering `[−half_width, half_width]`.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Grid1d::new(-half_width, 2.0 * half_width / n as f64, n)
    }

    pub fn x(&self, i: usize) -> f64 {
        self.origin + (i as f64 + 0.5) * self.cell_size
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Angular wavenumber of FFT bin `j`.
    pub fn k(&self, j: usize) -> f64 {
        let n = self.n as i64;
        let j = j as i64;
        let signed = if j < n / 2 { j } else { j - n };
        2.0 * std::f64::consts::PI * signed as f64 / (n as f64 * self.cell_size)
    }

    pub fn k_max(&self) -> f64 {
        std::f64::consts::PI / self.cell_size
    }

    pub fn geometry(&self) -> GridGeometry {
        GridGeometry::new(vec![self.origin], self.cell_size, vec![self.n]).expect("validated grid")
    }
}

/// Anything with a probability density on a [`Grid1d`].
pub trait Packet: Clone + Send + Sync {
    fn grid(&self) -> &Grid1d;
    /// `|ψ_i|²`, summed over components.
    fn density(&self) -> Vec<f64>;
    /// Zeroes every cell where `keep` is false, then rescales by `factor`.
    fn mask_and_scale(&mut self, keep: &dyn Fn(f64) -> bool, factor: f64);

    fn norm(&self) -> f64 {
        self.density().iter().sum::<f64>() * self.grid().cell_size
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WavePacket {
    pub grid: Grid1d,
    pub amplitudes: Vec<Complex64>,
    pub mass: f64,
    pub consts: Constants,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiracPacket {
    pub grid: Grid1d,
    pub upper: Vec<Complex64>,
    pub lower: Vec<Complex64>,
    pub mass: f64,
    pub consts: Constants,
}

fn check_len(grid: &Grid1d, v: &[Complex64]) -> Result<()> {
    if v.len() != grid.n {
        return Err(Error::InvalidGrid(format!(
            "{} amplitudes on a {}-point grid",
            v.len(),
            grid.n
        )));
    }
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

fn check_mass(mass: f64) -> Result<()> {
    if !(mass >= 0.0) || !mass.is_finite() {
        return Err(Error::OutOfRange {
            name: "mass",
            value: mass,
        });
    }
    Ok(())
}

impl WavePacket {
    /// Normalises the given amplitudes.
    pub fn from_amplitudes(grid: Grid1d, amplitudes: Vec<Complex64>, mass: f64, consts: Constants) -> Result<Self> {
        check_len(&grid, &amplitudes)?;
        check_mass(mass)?;
        let mut p = WavePacket {
            grid,
            amplitudes,
            mass,
            consts,
        };
        let norm = p.norm();
        if !(norm > 0.0) {
            return Err(Error::NullConditioning(norm));
        }
        p.mask_and_scale(&|_| true, 1.0 / norm.sqrt());
        Ok(p)
    }
}

impl Packet for WavePacket {
    fn grid(&self) -> &Grid1d {
        &self.grid
    }

    fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    fn mask_and_scale(&mut self, keep: &dyn Fn(f64) -> bool, factor: f64) {
        let grid = self.grid;
        for (i, z) in self.amplitudes.iter_mut().enumerate() {
            *z = if keep(grid.x(i)) { *z * factor } else { Complex64::new(0.0, 0.0) };
        }
    }
}

impl DiracPacket {
    pub fn from_components(
        grid: Grid1d,
        upper: Vec<Complex64>,
        lower: Vec<Complex64>,
        mass: f64,
        consts: Constants,
    ) -> Result<Self> {
        check_len(&grid, &upper)?;
        check_len(&grid, &lower)?;
        check_mass(mass)?;
        let mut p = DiracPacket {
            grid,
            upper,
            lower,
            mass,
            consts,
        };
        let norm = p.norm();
        if !(norm > 0.0) {
            return Err(Error::NullConditioning(norm));
        }
        p.mask_and_scale(&|_| true, 1.0 / norm.sqrt());
        Ok(p)
    }
}

impl Packet for DiracPacket {
    fn grid(&self) -> &Grid1d {
        &self.grid
    }

    fn density(&self) -> Vec<f64> {
        self.upper
            .iter()
            .zip(&self.lower)
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .collect()
    }

    fn mask_and_scale(&mut self, keep: &dyn Fn(f64) -> bool, factor: f64) {
        let grid = self.grid;
        let zero = Complex64::new(0.0, 0.0);
        for (i, (a, b)) in self.upper.iter_mut().zip(self.lower.iter_mut()).enumerate() {
            if keep(grid.x(i)) {
                *a *= factor;
                *b *= factor;
            } else {
                *a = zero;
                *b = zero;
            }
        }
    }
}

/// A scalar or spinor packet.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyPacket {
    Scalar(WavePacket),
    Spinor(DiracPacket),
}

impl Packet for AnyPacket {
    fn grid(&self) -> &Grid1d {
        match self {
            AnyPacket::Scalar(p) => p.grid(),
            AnyPacket::Spinor(p) => p.grid(),
        }
    }

    fn density(&self) -> Vec<f64> {
        match self {
            AnyPacket::Scalar(p) => p.density(),
            AnyPacket::Spinor(p) => p.density(),
        }
    }

    fn mask_and_scale(&mut self, keep: &dyn Fn(f64) -> bool, factor: f64) {
        match self {
            AnyPacket::Scalar(p) => p.mask_and_scale(keep, factor),
            AnyPacket::Spinor(p) => p.mask_and_scale(keep, factor),
        }
    }
}

/// Largest density in the two outermost cells.
pub fn boundary_density<P: Packet>(psi: &P) -> f64 {
    let d = psi.density();
    d[0].max(d[d.len() - 1])
}

/// Fails when the packet has reached the periodic boundary.
pub fn guard_boundary<P: Packet>(psi: &P, limit: f64) -> Result<()> {
    let density = boundary_density(psi);
    if density > limit {
        return Err(Error::BoundaryLeak { density, limit });
    }
    Ok(())
}

/// `ψ₀(x) ∝ exp(−(x−x₀)²/(2λ²) + i k₀ x)`, normalised on the grid.
pub fn gaussian_packet(
    lambda: f64,
    x0: f64,
    k0: f64,
    grid: Grid1d,
    mass: f64,
    consts: Constants,
) -> Result<WavePacket> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::OutOfRange {
            name: "lambda",
            value: lambda,
        });
    }
    let amps = grid
        .xs()
        .into_iter()
        .map(|x| {
            let u = (x - x0) / lambda;
            Complex64::from_polar((-0.5 * u * u).exp(), k0 * x)
        })
        .collect();
    let psi = WavePacket::from_amplitudes(grid, amps, mass, consts)?;
    guard_boundary(&psi, BOUNDARY_LIMIT)?;
    Ok(psi)
}

/// Smooth bump `exp(−1/(1−u²))`, `u = (x−x₀)/w`, vanishing for `|u| ≥ 1`.
pub fn smooth_bump(grid: &Grid1d, x0: f64, half_width: f64) -> Vec<Complex64> {
    grid.xs()
        .into_iter()
        .map(|x| {
            let u = (x - x0) / half_width;
            let v = if u.abs() < 1.0 { (-1.0 / (1.0 - u * u)).exp() } else { 0.0 };
            Complex64::new(v, 0.0)
        })
        .collect()
}

/// Detection statistics `|ψ_i|²·h` as a grid measure at `time`.
pub fn born_measure<P: Packet>(psi: &P, time: f64) -> Result<SliceMeasure> {
    let h = psi.grid().cell_size;
    let weights = psi.density().into_iter().map(|d| d * h).collect();
    SliceMeasure::from_grid(time, psi.grid().geometry(), weights)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Plus,
    Minus,
}

/// Projects onto `k` (`Plus`) or its complement (`Minus`) by cell centre and
/// renormalises.
pub fn collapse<P: Packet>(psi: &P, k: &Region, outcome: Outcome) -> Result<P> {
    if k.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: k.dim(),
        });
    }
    let inside = |x: f64| k.contains(&[x]);
    let keep = |x: f64| inside(x) == (outcome == Outcome::Plus);
    let h = psi.grid().cell_size;
    let kept: f64 = psi
        .density()
        .iter()
        .enumerate()
        .filter(|(i, _)| keep(psi.grid().x(*i)))
        .map(|(_, d)| d * h)
        .sum();
    if kept <= EPS_MASS {
        return Err(Error::NullConditioning(kept));
    }
    let mut out = psi.clone();
    out.mask_and_scale(&keep, 1.0 / kept.sqrt());
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dynamics {
    Schrodinger,
    Relativistic,
    Dirac,
}

/// A projective detector on `k` at time `s`, followed by free evolution to `t`.
///
/// `μ` is the Born measure of `psi` at `s`; `ν(·|0)` evolves `psi` untouched;
/// `ν(·|±,1)` evolve the two collapsed packets. A branch whose outcome has
/// vanishing probability is replaced by `ν(·|0)`.
pub fn collapse_scenario<P, F>(psi: &P, k: &Region, s: f64, t: f64, cs: CausalStructure, evolve: F) -> Result<MeasurementScenario>
where
    P: Packet,
    F: Fn(&P, f64) -> Result<P>,
{
    if t < s {
        return Err(Error::NegativeDuration(t - s));
    }
    let dt = t - s;
    let mu = born_measure(psi, s)?;
    let free = evolve(psi, dt)?;
    guard_boundary(&free, BOUNDARY_LIMIT)?;
    let nu0 = born_measure(&free, t)?;
    let branch = |outcome| -> Result<SliceMeasure> {
        match collapse(psi, k, outcome) {
            Ok(c) => {
                let evolved = evolve(&c, dt)?;
                guard_boundary(&evolved, BOUNDARY_LIMIT)?;
                born_measure(&evolved, t)
            }
            Err(Error::NullConditioning(_)) => Ok(nu0.clone()),
            Err(e) => Err(e),
        }
    };
    let nu_plus = branch(Outcome::Plus)?;
    let nu_minus = branch(Outcome::Minus)?;
    MeasurementScenario::from_branches(cs, k.clone(), mu, nu0, nu_plus, nu_minus)
}
