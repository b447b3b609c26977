//! Collective spin operators in the fully symmetric sector `S = N/2`.
//!
//! Basis states are ordered by magnetic quantum number `m = -S, ..., S`
//! along the quantization axis named by [`Basis`]. Spin and magnetic
//! quantum numbers are stored doubled so that odd `N` stays exact.
//!
//! Phase convention: in both bases the "transverse" operator that connects
//! neighbouring states has non-negative matrix elements. In the Z basis that
//! is `S_x`; in the X basis it is `S_z`, with
//! `<m-1| S_z |m> = (1/2) sqrt(S(S+1) - m(m-1))`.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::eigen::eigh_tridiagonal;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinSector {
    n_spins: u32,
}

impl SpinSector {
    pub fn new(n_spins: u32) -> Result<Self> {
        if n_spins == 0 {
            return Err(Error::InvalidSector("number of spins must be positive".into()));
        }
        Ok(Self { n_spins })
    }

    pub fn n_spins(&self) -> u32 {
        self.n_spins
    }

    /// `2S`, which equals `N`.
    pub fn twice_spin(&self) -> u32 {
        self.n_spins
    }

    pub fn spin(&self) -> f64 {
        f64::from(self.n_spins) / 2.0
    }

    /// Hilbert-space dimension `N + 1`.
    pub fn dim(&self) -> usize {
        self.n_spins as usize + 1
    }

    /// `2m` for basis index `k`.
    pub fn twice_m(&self, k: usize) -> i64 {
        2 * k as i64 - i64::from(self.n_spins)
    }

    pub fn m(&self, k: usize) -> f64 {
        self.twice_m(k) as f64 / 2.0
    }

    /// `sqrt(S(S+1) - m(m+1))` for the state with index `k` (value `m`),
    /// i.e. the matrix element `<m+1| S_+ |m>`.
    fn ladder(&self, k: usize) -> f64 {
        let s2 = i64::from(self.n_spins);
        let m2 = self.twice_m(k);
        // 4 [S(S+1) - m(m+1)] = s2 (s2 + 2) - m2 (m2 + 2)
        let four = s2 * (s2 + 2) - m2 * (m2 + 2);
        (four as f64).sqrt() / 2.0
    }
}

/// Quantization axis of the basis in which an operator is written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    /// Eigenbasis of `S_z`.
    Z,
    /// Eigenbasis of `S_x`.
    X,
}

impl Basis {
    pub fn other(self) -> Basis {
        match self {
            Basis::Z => Basis::X,
            Basis::X => Basis::Z,
        }
    }
}

/// Real symmetric matrix of a collective-spin operator.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    sector: SpinSector,
    basis: Basis,
    data: Array2<f64>,
}

impl OperatorMatrix {
    /// Wraps `data`, which must be square, of the sector dimension and
    /// exactly symmetric.
    pub fn from_matrix(sector: SpinSector, basis: Basis, data: Array2<f64>) -> Result<Self> {
        let d = sector.dim();
        if data.nrows() != d || data.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: data.nrows().max(data.ncols()),
            });
        }
        let asym = max_asymmetry(&data);
        if asym != 0.0 {
            return Err(Error::NotSymmetric {
                max_asymmetry: asym,
            });
        }
        Ok(Self {
            sector,
            basis,
            data,
        })
    }

    /// Like [`from_matrix`](Self::from_matrix) but symmetrizes away rounding-level
    /// asymmetry up to `1e-12 * max|a_ij|`.
    pub fn from_matrix_symmetrized(
        sector: SpinSector,
        basis: Basis,
        data: Array2<f64>,
    ) -> Result<Self> {
        let scale = data.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let asym = max_asymmetry(&data);
        if asym > 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NotSymmetric {
                max_asymmetry: asym,
            });
        }
        let sym = (&data + &data.t()) * 0.5;
        Self::from_matrix(sector, basis, sym)
    }

    pub fn sector(&self) -> SpinSector {
        self.sector
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.sector.dim()
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> Array2<f64> {
        self.data
    }

    pub fn scaled(&self, factor: f64) -> OperatorMatrix {
        OperatorMatrix {
            sector: self.sector,
            basis: self.basis,
            data: &self.data * factor,
        }
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, factor: f64, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.check_compatible(other)?;
        let mut data = self.data.clone();
        data.scaled_add(factor, &other.data);
        Ok(OperatorMatrix {
            sector: self.sector,
            basis: self.basis,
            data,
        })
    }

    /// `self + shift * I`.
    pub fn shifted(&self, shift: f64) -> OperatorMatrix {
        let mut data = self.data.clone();
        data.diag_mut().mapv_inplace(|x| x + shift);
        OperatorMatrix {
            sector: self.sector,
            basis: self.basis,
            data,
        }
    }

    /// Plain matrix product. The product of two symmetric matrices is only
    /// symmetric when they commute, so the raw array is returned.
    pub fn product(&self, other: &OperatorMatrix) -> Result<Array2<f64>> {
        self.check_compatible(other)?;
        Ok(self.data.dot(&other.data))
    }

    /// `self^2`, which is always symmetric.
    pub fn squared(&self) -> OperatorMatrix {
        let sq = self.data.dot(&self.data);
        let data = (&sq + &sq.t()) * 0.5;
        OperatorMatrix {
            sector: self.sector,
            basis: self.basis,
            data,
        }
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// The same operator written in `target`. Returns a copy when the basis
    /// already matches.
    pub fn to_basis(&self, target: Basis) -> OperatorMatrix {
        if target == self.basis {
            return self.clone();
        }
        let u = basis_rotation(self.sector);
        let rotated = match (self.basis, target) {
            (Basis::Z, Basis::X) => u.t().dot(&self.data).dot(&u),
            _ => u.dot(&self.data).dot(&u.t()),
        };
        let data = (&rotated + &rotated.t()) * 0.5;
        OperatorMatrix {
            sector: self.sector,
            basis: target,
            data,
        }
    }

    fn check_compatible(&self, other: &OperatorMatrix) -> Result<()> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch {
                left: self.basis,
                right: other.basis,
            });
        }
        if self.sector != other.sector {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }
}

/// `(-i) S_y`, a real antisymmetric matrix. The physical operator is
/// `S_y = i * matrix()`.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewOperator {
    sector: SpinSector,
    basis: Basis,
    data: Array2<f64>,
}

impl SkewOperator {
    pub fn sector(&self) -> SpinSector {
        self.sector
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn to_basis(&self, target: Basis) -> SkewOperator {
        if target == self.basis {
            return self.clone();
        }
        let u = basis_rotation(self.sector);
        let rotated = match (self.basis, target) {
            (Basis::Z, Basis::X) => u.t().dot(&self.data).dot(&u),
            _ => u.dot(&self.data).dot(&u.t()),
        };
        let data = (&rotated - &rotated.t()) * 0.5;
        SkewOperator {
            sector: self.sector,
            basis: target,
            data,
        }
    }
}

fn max_asymmetry(a: &Array2<f64>) -> f64 {
    let n = a.nrows();
    let mut asym = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            asym = asym.max((a[[i, j]] - a[[j, i]]).abs());
        }
    }
    asym
}

fn diagonal_m(sector: SpinSector) -> Array2<f64> {
    let d = sector.dim();
    Array2::from_diag(&Array1::from_iter((0..d).map(|k| sector.m(k))))
}

/// Tridiagonal matrix with `(1/2) sqrt(S(S+1) - m(m+1))` between `m` and `m+1`.
fn transverse(sector: SpinSector) -> Array2<f64> {
    let d = sector.dim();
    let mut a = Array2::zeros((d, d));
    for k in 0..d - 1 {
        let v = 0.5 * sector.ladder(k);
        a[[k, k + 1]] = v;
        a[[k + 1, k]] = v;
    }
    a
}

/// `S_z`. Diagonal in the Z basis; in the X basis it carries the
/// transverse ladder elements.
pub fn sz(sector: SpinSector, basis: Basis) -> OperatorMatrix {
    let data = match basis {
        Basis::Z => diagonal_m(sector),
        Basis::X => transverse(sector),
    };
    OperatorMatrix {
        sector,
        basis,
        data,
    }
}

/// `S_x`. Tridiagonal in the Z basis, diagonal in the X basis.
pub fn sx(sector: SpinSector, basis: Basis) -> OperatorMatrix {
    let data = match basis {
        Basis::Z => transverse(sector),
        Basis::X => diagonal_m(sector),
    };
    OperatorMatrix {
        sector,
        basis,
        data,
    }
}

/// `(-i) S_y = (S_- - S_+)/2`, built in the Z basis and rotated if needed.
pub fn minus_i_sy(sector: SpinSector, basis: Basis) -> SkewOperator {
    let d = sector.dim();
    let mut a = Array2::zeros((d, d));
    for k in 0..d - 1 {
        let v = 0.5 * sector.ladder(k);
        // <m+1| S_+ |m> sits at (k+1, k); S_- is its transpose.
        a[[k + 1, k]] = -v;
        a[[k, k + 1]] = v;
    }
    let z = SkewOperator {
        sector,
        basis: Basis::Z,
        data: a,
    };
    z.to_basis(basis)
}

/// Orthogonal `U` with `op_X = U^T op_Z U`: column `k` is the `S_x`
/// eigenvector with `m_x = -S + k`, written in the Z basis, with signs fixed
/// by the module's phase convention.
pub fn basis_rotation(sector: SpinSector) -> Array2<f64> {
    let d = sector.dim();
    let diag = vec![0.0; d];
    let off: Vec<f64> = (0..d - 1).map(|k| 0.5 * sector.ladder(k)).collect();
    let dec = eigh_tridiagonal(&diag, &off)
        .expect("S_x is tridiagonal with a simple spectrum; QL always converges");
    let mut u = dec.vectors().clone();

    // Anchor column 0 by the sign of its largest component, then make every
    // (k, k+1) element of U^T S_z U positive.
    let anchor = (0..d)
        .max_by(|&a, &b| u[[a, 0]].abs().total_cmp(&u[[b, 0]].abs()))
        .unwrap_or(0);
    if u[[anchor, 0]] < 0.0 {
        u.column_mut(0).mapv_inplace(|x| -x);
    }
    for k in 0..d.saturating_sub(1) {
        let elem: f64 = (0..d)
            .map(|j| u[[j, k]] * sector.m(j) * u[[j, k + 1]])
            .sum();
        if elem < 0.0 {
            u.column_mut(k + 1).mapv_inplace(|x| -x);
        }
    }
    u
}
