//! Fixed-size spacetime objects: four-vectors and symmetric rank-2 tensors.
//!
//! Index 0 is time, 1..3 are space. The background metric is
//! `ETA = diag(+1, -1, -1, -1)`.

use core::ops::{Add, Index};

use crate::error::{Error, Result};

/// A contravariant four-vector `x^μ`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FourVector(pub [f64; 4]);

impl FourVector {
    pub const ZERO: FourVector = FourVector([0.0; 4]);

    /// Builds a vector, rejecting NaN and infinities.
    pub fn new(components: [f64; 4]) -> Result<Self> {
        if components.iter().all(|c| c.is_finite()) {
            Ok(FourVector(components))
        } else {
            Err(Error::NonFinite("four-vector"))
        }
    }

    pub fn from_time_space(t: f64, space: [f64; 3]) -> Self {
        FourVector([t, space[0], space[1], space[2]])
    }

    pub fn time(&self) -> f64 {
        self.0[0]
    }

    pub fn space(&self) -> [f64; 3] {
        [self.0[1], self.0[2], self.0[3]]
    }

    /// Index lowered with `ETA`.
    pub fn lower(&self) -> [f64; 4] {
        let [t, x, y, z] = self.0;
        [t, -x, -y, -z]
    }

    /// `η_μν a^μ b^ν`.
    pub fn minkowski_dot(&self, other: &FourVector) -> f64 {
        let a = self.lower();
        a.iter().zip(other.0.iter()).map(|(p, q)| p * q).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        FourVector(self.0.map(|c| c * s))
    }
}

impl Add for FourVector {
    type Output = FourVector;

    fn add(self, rhs: FourVector) -> FourVector {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o += r;
        }
        FourVector(out)
    }
}

impl Index<usize> for FourVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Symmetric 4×4 tensor stored as its 10 independent entries.
///
/// Symmetry holds by construction: `get(μ, ν)` and `get(ν, μ)` read the same
/// slot.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymTensor2 {
    packed: [f64; 10],
}

/// Minkowski metric, signature (+, -, -, -).
pub const ETA: SymTensor2 = SymTensor2 {
    packed: [1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, -1.0, 0.0, -1.0],
};

const SLOT: [[usize; 4]; 4] = [[0, 1, 2, 3], [1, 4, 5, 6], [2, 5, 7, 8], [3, 6, 8, 9]];

#[inline]
fn slot(mu: usize, nu: usize) -> usize {
    SLOT[mu][nu]
}

impl SymTensor2 {
    pub const ZERO: SymTensor2 = SymTensor2 { packed: [0.0; 10] };

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut t = SymTensor2::ZERO;
        for mu in 0..4 {
            for nu in mu..4 {
                t.packed[slot(mu, nu)] = f(mu, nu);
            }
        }
        t
    }

    /// Symmetric tensor whose only nonzero entries are the spatial block.
    pub fn spatial(block: [[f64; 3]; 3]) -> Self {
        SymTensor2::from_fn(|mu, nu| {
            if mu == 0 || nu == 0 {
                0.0
            } else {
                block[mu - 1][nu - 1]
            }
        })
    }

    #[inline]
    pub fn get(&self, mu: usize, nu: usize) -> f64 {
        self.packed[slot(mu, nu)]
    }

    /// Sets both `(μ, ν)` and `(ν, μ)`.
    #[inline]
    pub fn set(&mut self, mu: usize, nu: usize, value: f64) {
        self.packed[slot(mu, nu)] = value;
    }

    pub fn scaled(&self, s: f64) -> Self {
        SymTensor2 {
            packed: self.packed.map(|v| v * s),
        }
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, other: &SymTensor2, s: f64) {
        for (a, b) in self.packed.iter_mut().zip(other.packed.iter()) {
            *a += s * b;
        }
    }

    /// Mixed trace `η^μν t_μν`.
    pub fn trace(&self) -> f64 {
        self.get(0, 0) - self.get(1, 1) - self.get(2, 2) - self.get(3, 3)
    }

    pub fn spatial_trace(&self) -> f64 {
        self.get(1, 1) + self.get(2, 2) + self.get(3, 3)
    }

    pub fn max_abs(&self) -> f64 {
        self.packed.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn to_matrix(&self) -> [[f64; 4]; 4] {
        let mut m = [[0.0; 4]; 4];
        for (mu, row) in m.iter_mut().enumerate() {
            for (nu, v) in row.iter_mut().enumerate() {
                *v = self.get(mu, nu);
            }
        }
        m
    }

    /// `t_μν a^ν` with both indices as stored (no raising).
    pub fn contract(&self, v: &[f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (mu, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|nu| self.get(mu, nu) * v[nu]).sum();
        }
        out
    }

    /// Determinant via Gaussian elimination with partial pivoting.
    pub fn det(&self) -> f64 {
        let mut a = self.to_matrix();
        let mut det = 1.0;
        for col in 0..4 {
            let pivot = (col..4)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap_or(col);
            if a[pivot][col] == 0.0 {
                return 0.0;
            }
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            det *= a[col][col];
            for row in col + 1..4 {
                let factor = a[row][col] / a[col][col];
                let pivot_row = a[col];
                for (dst, src) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                    *dst -= factor * src;
                }
            }
        }
        det
    }

    pub fn is_finite(&self) -> bool {
        self.packed.iter().all(|v| v.is_finite())
    }
}

impl Add for SymTensor2 {
    type Output = SymTensor2;

    fn add(mut self, rhs: SymTensor2) -> SymTensor2 {
        self.add_scaled(&rhs, 1.0);
        self
    }
}
