//! Spectral propagators: free Schrödinger, `√(p²c² + m²c⁴)` and 1+1 Dirac.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::{AnyPacket, DiracPacket, Dynamics, Grid1d, WavePacket};
use crate::error::{Error, Result};

fn check_t(t: f64) -> Result<()> {
    if t < 0.0 {
        return Err(Error::NegativeDuration(t));
    }
    if !t.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(())
}

fn fft(data: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let plan = if inverse {
        planner.plan_fft_inverse(data.len())
    } else {
        planner.plan_fft_forward(data.len())
    };
    plan.process(data);
    if inverse {
        let scale = 1.0 / data.len() as f64;
        data.iter_mut().for_each(|z| *z *= scale);
    }
}

/// Multiplies mode `j` by `phase(k_j)`.
fn apply_phase(grid: &Grid1d, amps: &[Complex64], phase: impl Fn(f64) -> f64 + Sync) -> Vec<Complex64> {
    let mut spec = amps.to_vec();
    fft(&mut spec, false);
    spec.par_iter_mut().enumerate().for_each(|(j, z)| {
        *z *= Complex64::from_polar(1.0, -phase(grid.k(j)));
    });
    fft(&mut spec, true);
    spec
}

/// `ψ_t = exp(−i p̂² t / (2mħ)) ψ`.
pub fn evolve_schrodinger_free(psi: &WavePacket, t: f64) -> Result<WavePacket> {
    check_t(t)?;
    if !(psi.mass > 0.0) {
        return Err(Error::OutOfRange {
            name: "mass",
            value: psi.mass,
        });
    }
    let a = psi.consts.hbar * t / (2.0 * psi.mass);
    Ok(WavePacket {
        amplitudes: apply_phase(&psi.grid, &psi.amplitudes, |k| a * k * k),
        ..psi.clone()
    })
}

/// `ψ_t = exp(−i t √(k²c² + m²c⁴/ħ²)) ψ`.
pub fn evolve_relativistic(psi: &WavePacket, t: f64) -> Result<WavePacket> {
    check_t(t)?;
    let c = psi.consts.c;
    let w0 = psi.mass * c * c / psi.consts.hbar;
    Ok(WavePacket {
        amplitudes: apply_phase(&psi.grid, &psi.amplitudes, |k| t * (k * k * c * c + w0 * w0).sqrt()),
        ..psi.clone()
    })
}

/// The grid resolves momenta well above `mc`: `k_max ≥ 20·mc/ħ`.
pub fn relativistic_cutoff_ok(psi: &WavePacket) -> bool {
    psi.grid.k_max() >= 20.0 * psi.mass * psi.consts.c / psi.consts.hbar
}

/// Exact per-mode evolution under `h(k) = ħck σ₁ + mc² σ₃`:
/// `U = cos(ωt) − i sin(ωt) h/(ħω)` with `ω = √(c²k² + m²c⁴/ħ²)`.
pub fn evolve_dirac_1p1(psi: &DiracPacket, t: f64) -> Result<DiracPacket> {
    check_t(t)?;
    let (hbar, c) = (psi.consts.hbar, psi.consts.c);
    let w0 = psi.mass * c * c / hbar;
    let mut up = psi.upper.clone();
    let mut lo = psi.lower.clone();
    fft(&mut up, false);
    fft(&mut lo, false);
    let grid = psi.grid;
    up.par_iter_mut()
        .zip(lo.par_iter_mut())
        .enumerate()
        .for_each(|(j, (a, b))| {
            let ck = c * grid.k(j);
            let w = (ck * ck + w0 * w0).sqrt();
            if w == 0.0 {
                return;
            }
            let (s, co) = (w * t).sin_cos();
            // h/(ħω) = (ck σ₁ + ω₀ σ₃)/ω
            let (nx, nz) = (ck / w, w0 / w);
            let i = Complex64::i();
            let u11 = co - i * s * nz;
            let u22 = co + i * s * nz;
            let u12 = -i * s * nx;
            let (x, y) = (*a, *b);
            *a = u11 * x + u12 * y;
            *b = u12 * x + u22 * y;
        });
    fft(&mut up, true);
    fft(&mut lo, true);
    Ok(DiracPacket {
        upper: up,
        lower: lo,
        ..psi.clone()
    })
}

/// Dispatches a scalar packet to the named dynamics. `Dirac` places the
/// packet in the upper spinor component.
pub fn evolve(psi: &AnyPacket, t: f64, dynamics: Dynamics) -> Result<AnyPacket> {
    let psi = match (psi, dynamics) {
        (AnyPacket::Spinor(p), Dynamics::Dirac) => return Ok(AnyPacket::Spinor(evolve_dirac_1p1(p, t)?)),
        (AnyPacket::Spinor(_), _) => {
            return Err(Error::InvalidGrid("a spinor packet needs Dirac dynamics".into()))
        }
        (AnyPacket::Scalar(p), _) => p,
    };
    Ok(match dynamics {
        Dynamics::Schrodinger => AnyPacket::Scalar(evolve_schrodinger_free(psi, t)?),
        Dynamics::Relativistic => AnyPacket::Scalar(evolve_relativistic(psi, t)?),
        Dynamics::Dirac => {
            let spinor = DiracPacket {
                grid: psi.grid,
                upper: psi.amplitudes.clone(),
                lower: vec![Complex64::new(0.0, 0.0); psi.grid.n],
                mass: psi.mass,
                consts: psi.consts,
            };
            AnyPacket::Spinor(evolve_dirac_1p1(&spinor, t)?)
        }
    })
}
