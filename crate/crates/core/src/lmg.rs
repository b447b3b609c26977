//! The Lipkin-Meshkov-Glick Hamiltonian
//! `H = -(2(1-alpha)/S) S_x^2 + alpha (S_z + S)` and its quench partner
//! `H_f = H + lambda S_z`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::{sx, sz, Basis, OperatorMatrix, SpinSector};

/// Ground-state critical point of the control parameter.
pub const ALPHA_QPT: f64 = 0.8;

/// Energy of the excited-state critical point of `H`.
pub const CRITICAL_ENERGY: f64 = 0.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LmgParams {
    alpha: f64,
    sector: SpinSector,
}

impl LmgParams {
    pub fn new(alpha: f64, n_spins: u32) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                reason: "must lie in [0, 1]",
            });
        }
        Ok(Self {
            alpha,
            sector: SpinSector::new(n_spins)?,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sector(&self) -> SpinSector {
        self.sector
    }

    pub fn n_spins(&self) -> u32 {
        self.sector.n_spins()
    }

    pub fn dim(&self) -> usize {
        self.sector.dim()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuenchSpec {
    params: LmgParams,
    lambda: f64,
}

impl QuenchSpec {
    pub fn new(params: LmgParams, lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: lambda,
                reason: "must be finite and non-negative",
            });
        }
        Ok(Self { params, lambda })
    }

    pub fn params(&self) -> LmgParams {
        self.params
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// `H(alpha)` in the requested basis.
///
/// In the X basis the matrix is tridiagonal with
/// `<m|H|m> = -(2(1-alpha)/S) m^2 + alpha S` and
/// `<m-1|H|m> = (alpha/2) sqrt(S(S+1) - m(m-1))`.
pub fn hamiltonian(params: LmgParams, basis: Basis) -> OperatorMatrix {
    let sector = params.sector();
    let s = sector.spin();
    let alpha = params.alpha();
    sx(sector, basis)
        .squared()
        .scaled(-2.0 * (1.0 - alpha) / s)
        .add_scaled(alpha, &sz(sector, basis))
        .expect("same sector and basis")
        .shifted(alpha * s)
}

/// `H(alpha) + lambda S_z`.
pub fn postquench_hamiltonian(spec: QuenchSpec, basis: Basis) -> OperatorMatrix {
    let params = spec.params();
    hamiltonian(params, basis)
        .add_scaled(spec.lambda(), &sz(params.sector(), basis))
        .expect("same sector and basis")
}

/// Field strength that brings the quenched ground state to the excited-state
/// critical energy: `(4 - 5 alpha) / 2`, valid in the broken-symmetry phase
/// `alpha < 0.8` only.
pub fn critical_lambda(alpha: f64) -> Result<f64> {
    if !(0.0..ALPHA_QPT).contains(&alpha) {
        return Err(Error::Domain(format!(
            "critical field is defined only for 0 <= alpha < {ALPHA_QPT}, got {alpha}"
        )));
    }
    Ok((4.0 - 5.0 * alpha) / 2.0)
}

/// Mean-field ground-state energy per spin: the minimum over unit vectors
/// `u` of `(1/2)[-2(1-alpha) u_x^2 + alpha (u_z + 1)]`.
///
/// With `u_y = 0` and `c = u_z` this is the convex quadratic
/// `-(1-alpha)(1-c^2) + alpha(c+1)/2` on `[-1, 1]`.
pub fn classical_ground_energy(alpha: f64) -> f64 {
    let coupling = 1.0 - alpha;
    let c = if 4.0 * coupling > alpha {
        -alpha / (4.0 * coupling)
    } else {
        -1.0
    };
    -coupling * (1.0 - c * c) + alpha * (c + 1.0) / 2.0
}

/// Energies rescaled onto `[0, 2]` via `2(E - E_0)/(E_max - E_0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescaledEnergy(pub f64);

/// The affine map `E -> 2(E - E_0)/(E_max - E_0)` of a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyScale {
    e0: f64,
    e_max: f64,
}

impl EnergyScale {
    /// From an ascending spectrum.
    pub fn from_spectrum(spectrum: &[f64]) -> Result<Self> {
        let (&e0, &e_max) = match (spectrum.first(), spectrum.last()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::EmptySeries),
        };
        if !(e_max > e0) {
            return Err(Error::DegenerateSpectrum(e0));
        }
        Ok(Self { e0, e_max })
    }

    pub fn ground(&self) -> f64 {
        self.e0
    }

    pub fn max(&self) -> f64 {
        self.e_max
    }

    pub fn rescale(&self, e: f64) -> RescaledEnergy {
        RescaledEnergy(2.0 * (e - self.e0) / (self.e_max - self.e0))
    }

    /// Rescaled position of the critical energy `E_c = 0`.
    pub fn critical(&self) -> RescaledEnergy {
        self.rescale(CRITICAL_ENERGY)
    }
}

pub fn rescale_energies(spectrum: &[f64]) -> Result<Vec<RescaledEnergy>> {
    let scale = EnergyScale::from_spectrum(spectrum)?;
    Ok(spectrum.iter().map(|&e| scale.rescale(e)).collect())
}
