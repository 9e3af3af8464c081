//! Small dense vectors and square matrices over a [`Scalar`].

use std::array;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Vector<T, const N: usize>(pub [T; N]);

pub type Vector3<T> = Vector<T, 3>;
pub type Vector6<T> = Vector<T, 6>;

impl<T: Scalar, const N: usize> Vector<T, N> {
    pub fn zero() -> Self {
        Vector(array::from_fn(|_| T::zero()))
    }

    /// Standard basis vector `e_{index+1}`.
    pub fn basis(index: usize) -> Self {
        Vector(array::from_fn(|i| if i == index { T::one() } else { T::zero() }))
    }

    pub fn from_fn(f: impl FnMut(usize) -> T) -> Self {
        Vector(array::from_fn(f))
    }

    pub fn from_i64(values: [i64; N]) -> Self {
        Vector(values.map(T::from_i64))
    }

    pub fn scale(&self, factor: &T) -> Self {
        Vector::from_fn(|i| self.0[i].clone() * factor.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn is_negligible(&self, eps: f64) -> bool {
        self.0.iter().all(|x| x.is_negligible(eps))
    }

    /// Largest absolute coordinate.
    pub fn max_norm(&self) -> f64 {
        self.0.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    pub fn norm_squared_f64(&self) -> f64 {
        self.0.iter().map(|x| x.to_f64().powi(2)).sum()
    }

    pub fn dot(&self, other: &Self) -> T {
        self.0
            .iter()
            .zip(&other.0)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    pub fn to_f64(&self) -> Vector<f64, N> {
        Vector(array::from_fn(|i| self.0[i].to_f64()))
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.0.iter()
    }
}

impl<T: Scalar> Vector6<T> {
    /// Embeds `(g, g*)` halves into the product.
    pub fn from_halves(g: &Vector3<T>, g_star: &Vector3<T>) -> Self {
        Vector::from_fn(|i| if i < 3 { g.0[i].clone() } else { g_star.0[i - 3].clone() })
    }

    pub fn g_part(&self) -> Vector3<T> {
        Vector::from_fn(|i| self.0[i].clone())
    }

    pub fn star_part(&self) -> Vector3<T> {
        Vector::from_fn(|i| self.0[i + 3].clone())
    }
}

impl<T, const N: usize> Index<usize> for Vector<T, N> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T, const N: usize> IndexMut<usize> for Vector<T, N> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.0[i]
    }
}

impl<T: Scalar, const N: usize> Add for Vector<T, N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut lhs = self.0;
        for (a, b) in lhs.iter_mut().zip(rhs.0) {
            *a = a.clone() + b;
        }
        Vector(lhs)
    }
}

impl<T: Scalar, const N: usize> Sub for Vector<T, N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut lhs = self.0;
        for (a, b) in lhs.iter_mut().zip(rhs.0) {
            *a = a.clone() - b;
        }
        Vector(lhs)
    }
}

impl<T: Scalar, const N: usize> Neg for Vector<T, N> {
    type Output = Self;
    fn neg(self) -> Self {
        Vector(self.0.map(|x| -x))
    }
}

/// Square matrix stored row-major; `m[(r, c)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T, const N: usize>(pub [[T; N]; N]);

pub type Matrix3<T> = Matrix<T, 3>;
pub type Matrix6<T> = Matrix<T, 6>;

impl<T: Scalar, const N: usize> Matrix<T, N> {
    pub fn zero() -> Self {
        Matrix(array::from_fn(|_| array::from_fn(|_| T::zero())))
    }

    pub fn identity() -> Self {
        Self::from_fn(|r, c| if r == c { T::one() } else { T::zero() })
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> T) -> Self {
        Matrix(array::from_fn(|r| array::from_fn(|c| f(r, c))))
    }

    pub fn from_i64(rows: [[i64; N]; N]) -> Self {
        Matrix(rows.map(|row| row.map(T::from_i64)))
    }

    pub fn column(&self, c: usize) -> Vector<T, N> {
        Vector::from_fn(|r| self.0[r][c].clone())
    }

    pub fn row(&self, r: usize) -> Vector<T, N> {
        Vector(self.0[r].clone())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|r, c| self.0[c][r].clone())
    }

    pub fn scale(&self, factor: &T) -> Self {
        Self::from_fn(|r, c| self.0[r][c].clone() * factor.clone())
    }

    pub fn mul_vec(&self, v: &Vector<T, N>) -> Vector<T, N> {
        Vector::from_fn(|r| {
            let mut acc = T::zero();
            for c in 0..N {
                if !self.0[r][c].is_zero() && !v.0[c].is_zero() {
                    acc = acc + self.0[r][c].clone() * v.0[c].clone();
                }
            }
            acc
        })
    }

    pub fn mul_mat(&self, rhs: &Self) -> Self {
        Self::from_fn(|r, c| {
            let mut acc = T::zero();
            for k in 0..N {
                if !self.0[r][k].is_zero() && !rhs.0[k][c].is_zero() {
                    acc = acc + self.0[r][k].clone() * rhs.0[k][c].clone();
                }
            }
            acc
        })
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(Zero::is_zero)
    }

    pub fn max_norm(&self) -> f64 {
        self.0.iter().flatten().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    pub fn frobenius_squared_f64(&self) -> f64 {
        self.0.iter().flatten().map(|x| x.to_f64().powi(2)).sum()
    }

    pub fn to_f64(&self) -> Matrix<f64, N> {
        Matrix::from_fn(|r, c| self.0[r][c].to_f64())
    }

    /// Gauss-Jordan inverse; `None` when singular (exact zero pivot, or
    /// pivot below `1e-14` times the largest entry in float mode).
    pub fn inverse(&self) -> Option<Self> {
        let scale = self.max_norm().max(f64::MIN_POSITIVE);
        let mut a = self.clone();
        let mut inv = Self::identity();
        for col in 0..N {
            let pivot = (col..N)
                .filter(|&r| !a.0[r][col].is_negligible(1e-14 * scale))
                .max_by(|&x, &y| a.0[x][col].magnitude().total_cmp(&a.0[y][col].magnitude()))?;
            a.0.swap(col, pivot);
            inv.0.swap(col, pivot);
            let p = a.0[col][col].clone();
            for c in 0..N {
                a.0[col][c] = a.0[col][c].clone() / p.clone();
                inv.0[col][c] = inv.0[col][c].clone() / p.clone();
            }
            for r in 0..N {
                if r == col || a.0[r][col].is_zero() {
                    continue;
                }
                let f = a.0[r][col].clone();
                for c in 0..N {
                    a.0[r][c] = a.0[r][c].clone() - f.clone() * a.0[col][c].clone();
                    inv.0[r][c] = inv.0[r][c].clone() - f.clone() * inv.0[col][c].clone();
                }
            }
        }
        Some(inv)
    }

    pub fn determinant(&self) -> T {
        let mut a = self.clone();
        let mut det = T::one();
        for col in 0..N {
            let Some(pivot) = (col..N)
                .filter(|&r| !a.0[r][col].is_zero())
                .max_by(|&x, &y| a.0[x][col].magnitude().total_cmp(&a.0[y][col].magnitude()))
            else {
                return T::zero();
            };
            if pivot != col {
                a.0.swap(col, pivot);
                det = -det;
            }
            let p = a.0[col][col].clone();
            det = det * p.clone();
            for r in col + 1..N {
                if a.0[r][col].is_zero() {
                    continue;
                }
                let f = a.0[r][col].clone() / p.clone();
                for c in col..N {
                    a.0[r][c] = a.0[r][c].clone() - f.clone() * a.0[col][c].clone();
                }
            }
        }
        det
    }
}

impl<T, const N: usize> Index<(usize, usize)> for Matrix<T, N> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.0[r][c]
    }
}

impl<T, const N: usize> IndexMut<(usize, usize)> for Matrix<T, N> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.0[r][c]
    }
}

impl<T: Scalar, const N: usize> Add for Matrix<T, N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|r, c| self.0[r][c].clone() + rhs.0[r][c].clone())
    }
}

impl<T: Scalar, const N: usize> Sub for Matrix<T, N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|r, c| self.0[r][c].clone() - rhs.0[r][c].clone())
    }
}

impl<T: Scalar, const N: usize> Mul for &Matrix<T, N> {
    type Output = Matrix<T, N>;
    fn mul(self, rhs: Self) -> Matrix<T, N> {
        self.mul_mat(rhs)
    }
}

impl<T: Scalar> Matrix6<T> {
    /// Assembles `[[a, b], [c, d]]` from 3×3 blocks.
    pub fn from_blocks(a: &Matrix3<T>, b: &Matrix3<T>, c: &Matrix3<T>, d: &Matrix3<T>) -> Self {
        Self::from_fn(|r, col| {
            let block = match (r < 3, col < 3) {
                (true, true) => a,
                (true, false) => b,
                (false, true) => c,
                (false, false) => d,
            };
            block.0[r % 3][col % 3].clone()
        })
    }

    /// The 3×3 block with top-left corner at `(3*block_row, 3*block_col)`.
    pub fn block(&self, block_row: usize, block_col: usize) -> Matrix3<T> {
        Matrix::from_fn(|r, c| self.0[3 * block_row + r][3 * block_col + c].clone())
    }
}

/// Rank of a rectangular rational matrix by fraction-free (Bareiss)
/// elimination after clearing denominators row by row.
pub fn rank_exact(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            let lcm = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            row.iter().map(|q| q.numer() * (&lcm / q.denom())).collect()
        })
        .collect();
    let n_rows = m.len();
    let n_cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..n_cols {
        if rank == n_rows {
            break;
        }
        let Some(pivot) = (rank..n_rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in rank + 1..n_rows {
            for c in col + 1..n_cols {
                let v = &m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c];
                m[r][c] = v / &prev;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Numerical rank: singular values below `rel_cutoff * sigma_max` count as zero.
pub fn rank_float(rows: &[Vec<f64>], rel_cutoff: f64) -> usize {
    let n_rows = rows.len();
    let n_cols = rows.first().map_or(0, Vec::len);
    if n_rows == 0 || n_cols == 0 {
        return 0;
    }
    let m = nalgebra::DMatrix::from_fn(n_rows, n_cols, |r, c| rows[r][c]);
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_cutoff * max).count()
}

/// Rank dispatch over the scalar mode.
pub fn rank<T: Scalar>(rows: &[Vec<T>]) -> usize {
    if T::is_exact() {
        let exact: Vec<Vec<Rational>> = rows
            .iter()
            .map(|row| row.iter().map(|x| to_rational(x)).collect())
            .collect();
        rank_exact(&exact)
    } else {
        let float: Vec<Vec<f64>> = rows.iter().map(|row| row.iter().map(Scalar::to_f64).collect()).collect();
        rank_float(&float, 1e-8)
    }
}

/// Recovers the exact rational behind a scalar in rational mode.
pub(crate) fn to_rational<T: Scalar>(x: &T) -> Rational {
    let any: &dyn std::any::Any = x;
    match any.downcast_ref::<Rational>() {
        Some(q) => q.clone(),
        None => Rational::from_float(x.to_f64()).unwrap_or_else(Rational::zero),
    }
}
