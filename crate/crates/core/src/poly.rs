//! Univariate polynomials over the rationals and arithmetic in `Q[t]/(m)`.
//!
//! Eigenvalues of a rational 3×3 block are roots of its characteristic
//! cubic. Working modulo a square-free factor `m` of that cubic lets
//! eigenvectors be computed exactly even when the eigenvalue is irrational.
//! When `m` turns out reducible, an inversion hits a zero divisor and the
//! caller splits `m` along the exposed gcd.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::scalar::{rational_to_f64, Rational, Scalar};

/// Coefficients from the constant term upward, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly(Vec<Rational>);

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    /// `t - root`.
    pub fn linear(root: &Rational) -> Self {
        Poly::new(vec![-root.clone(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.0.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Rational {
        self.0.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lead = self.leading();
        Poly::new(self.0.iter().map(|c| c / &lead).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        Poly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        Poly::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn neg(&self) -> Self {
        Poly::new(self.0.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Poly::new(self.0.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let mut rem = self.0.clone();
        let d = divisor.degree();
        let lead = divisor.leading();
        if self.0.len() < divisor.0.len() {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); self.0.len() - d];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + d] / &lead;
            if !c.is_zero() {
                for (j, b) in divisor.0.iter().enumerate() {
                    rem[i + j] -= &c * b;
                }
            }
            quot[i] = c;
        }
        rem.truncate(d);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_i64(i as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + rational_to_f64(c))
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s)` with `g = gcd(self, modulus)` monic and `s*self = g (mod modulus)`.
    pub fn gcd_with_cofactor(&self, modulus: &Self) -> (Self, Self) {
        let (mut r0, mut r1) = (modulus.clone(), self.rem(modulus));
        let (mut s0, mut s1) = (Poly::zero(), Poly::constant(Rational::one()));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        let lead = r0.leading();
        if lead.is_zero() {
            return (Poly::zero(), Poly::zero());
        }
        let inv = Rational::one() / lead;
        (r0.scale(&inv), s0.scale(&inv).rem(modulus))
    }

    /// Largest square-free divisor, monic.
    pub fn squarefree(&self) -> Self {
        let g = self.gcd(&self.derivative());
        if g.degree() == 0 {
            self.monic()
        } else {
            self.div_rem(&g).0.monic()
        }
    }

    /// Discriminant for degrees 1–3.
    pub fn discriminant(&self) -> Rational {
        let c = |i| self.coeff(i);
        match self.degree() {
            0 | 1 => Rational::one(),
            2 => c(1) * c(1) - Rational::from_i64(4) * c(2) * c(0),
            3 => {
                let (a, b, cc, d) = (c(3), c(2), c(1), c(0));
                let k = Rational::from_i64;
                k(18) * &a * &b * &cc * &d - k(4) * &b * &b * &b * &d + &b * &b * &cc * &cc
                    - k(4) * &a * &cc * &cc * &cc
                    - k(27) * &a * &a * &d * &d
            }
            n => panic!("discriminant implemented for degree <= 3, got {n}"),
        }
    }

    /// Number of distinct real roots of a square-free polynomial of degree <= 3.
    pub fn real_root_count(&self) -> usize {
        match self.degree() {
            0 => 0,
            1 => 1,
            2 => {
                if Signed::is_positive(&self.discriminant()) {
                    2
                } else {
                    0
                }
            }
            3 => {
                if Signed::is_positive(&self.discriminant()) {
                    3
                } else {
                    1
                }
            }
            n => panic!("real root count implemented for degree <= 3, got {n}"),
        }
    }

    /// Real roots, ascending, refined by bisection on exact sign changes
    /// of a square-free polynomial of degree <= 3.
    pub fn real_roots_f64(&self) -> Vec<f64> {
        let want = self.real_root_count();
        let mut roots: Vec<f64> = polynomial_roots_f64(&self.0.iter().map(rational_to_f64).collect::<Vec<_>>())
            .into_iter()
            .filter(|(_, im)| im.abs() <= 1e-6)
            .map(|(re, _)| re)
            .collect();
        roots.sort_by(f64::total_cmp);
        // Keep the `want` entries with the smallest imaginary noise: the
        // filter above can only over-admit when complex roots sit near the axis.
        if roots.len() > want {
            let mut scored: Vec<(f64, f64)> = roots.iter().map(|&r| (self.eval_f64(r).abs(), r)).collect();
            scored.sort_by(|a, b| a.0.total_cmp(&b.0));
            roots = scored.into_iter().take(want).map(|(_, r)| r).collect();
            roots.sort_by(f64::total_cmp);
        }
        roots.into_iter().map(|r| self.polish(r)).collect()
    }

    fn polish(&self, x: f64) -> f64 {
        let d = self.derivative();
        let mut x = x;
        for _ in 0..3 {
            let fx = self.eval_f64(x);
            let dx = d.eval_f64(x);
            if dx == 0.0 || !fx.is_finite() {
                break;
            }
            let next = x - fx / dx;
            if !next.is_finite() {
                break;
            }
            x = next;
        }
        x
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            let show_coeff = i == 0 || !a.is_one();
            if show_coeff {
                write!(f, "{a}")?;
            }
            match i {
                0 => {}
                1 => f.write_str("t")?,
                _ => write!(f, "t^{i}")?,
            }
        }
        Ok(())
    }
}

/// All complex roots of a float polynomial (coefficients ascending) of
/// degree <= 3, via companion-matrix eigenvalues.
pub fn polynomial_roots_f64(coeffs: &[f64]) -> Vec<(f64, f64)> {
    let mut c = coeffs.to_vec();
    while c.last().is_some_and(|x| *x == 0.0) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let monic: Vec<f64> = c.iter().map(|x| x / lead).collect();
    let companion = nalgebra::DMatrix::from_fn(n, n, |r, col| {
        if col == n - 1 {
            -monic[r]
        } else if r == col + 1 {
            1.0
        } else {
            0.0
        }
    });
    match nalgebra::Schur::try_new(companion, f64::EPSILON, 500) {
        Some(schur) => schur.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect(),
        None => durand_kerner(&monic),
    }
}

/// Simultaneous iteration for the roots of a monic polynomial; used when the
/// Schur iteration stalls on a defective companion matrix.
fn durand_kerner(monic: &[f64]) -> Vec<(f64, f64)> {
    use nalgebra::Complex;
    let n = monic.len() - 1;
    let eval = |z: Complex<f64>| monic.iter().rev().fold(Complex::new(0.0, 0.0), |acc, c| acc * z + c);
    let radius = 1.0 + monic[..n].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let seed = Complex::new(0.4, 0.9);
    let mut z: Vec<Complex<f64>> = (0..n).map(|k| seed.powu(k as u32) * radius).collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let mut denom = Complex::new(1.0, 0.0);
            for k in 0..n {
                if k != i {
                    denom *= z[i] - z[k];
                }
            }
            if denom.norm() == 0.0 {
                continue;
            }
            let step = eval(z[i]) / denom;
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved <= 1e-15 * radius {
            break;
        }
    }
    z.into_iter().map(|w| (w.re, w.im)).collect()
}

/// Reconstructs a small-denominator rational near `x` by continued fractions.
pub fn rational_near(x: f64, max_denominator: i64) -> Option<Rational> {
    if !x.is_finite() || x.abs() > 1e15 {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut rest = x;
    for _ in 0..40 {
        let a = rest.floor();
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_denominator as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = rest - a;
        if frac.abs() < 1e-12 {
            break;
        }
        rest = 1.0 / frac;
    }
    if k1 == 0 {
        return None;
    }
    Some(Rational::new(h1.into(), k1.into()))
}

/// A zero divisor exposed while inverting modulo a reducible polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroDivisor(pub Poly);

/// `Q[t]/(modulus)` with a monic square-free modulus.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NumberField {
    modulus: Poly,
}

impl NumberField {
    pub fn new(modulus: &Poly) -> Self {
        assert!(modulus.degree() >= 1, "modulus must be non-constant");
        NumberField { modulus: modulus.monic() }
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.modulus.degree()
    }

    pub fn reduce(&self, p: &Poly) -> Poly {
        p.rem(&self.modulus)
    }

    pub fn generator(&self) -> Poly {
        self.reduce(&Poly::new(vec![Rational::zero(), Rational::one()]))
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        self.reduce(&a.mul(b))
    }

    pub fn inverse(&self, a: &Poly) -> Result<Poly, ZeroDivisor> {
        let (g, s) = a.gcd_with_cofactor(&self.modulus);
        if g.is_zero() {
            return Err(ZeroDivisor(self.modulus.clone()));
        }
        if g.degree() > 0 {
            return Err(ZeroDivisor(g));
        }
        Ok(s)
    }

    /// Value of an element under the embedding `t -> root`.
    pub fn embed(&self, a: &Poly, root: f64) -> f64 {
        a.eval_f64(root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Poly {
        Poly::new(c.iter().map(|&x| Rational::from_i64(x)).collect())
    }

    #[test]
    fn division_and_gcd() {
        // (t-1)(t-2)(t+3) = t^3 - 7t + 6
        let f = p(&[6, -7, 0, 1]);
        let (q, r) = f.div_rem(&p(&[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(q, p(&[-6, 1, 1]));
        assert_eq!(f.gcd(&p(&[-2, 1]).mul(&p(&[5, 1]))), p(&[-2, 1]));
    }

    #[test]
    fn squarefree_part() {
        // t^2 (t - 1)
        let f = p(&[0, 0, -1, 1]);
        assert_eq!(f.squarefree(), p(&[0, -1, 1]));
        assert_eq!(p(&[1, 0, 1]).squarefree(), p(&[1, 0, 1]));
    }

    #[test]
    fn real_root_counts() {
        assert_eq!(p(&[6, -7, 0, 1]).real_root_count(), 3);
        assert_eq!(p(&[1, 0, 1]).real_root_count(), 0);
        assert_eq!(p(&[-2, 0, 1]).real_root_count(), 2);
        assert_eq!(p(&[-2, 0, 0, 1]).real_root_count(), 1);
        let roots = p(&[6, -7, 0, 1]).real_roots_f64();
        assert_eq!(roots.len(), 3);
        for (r, want) in roots.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((r - want).abs() < 1e-12);
        }
    }

    #[test]
    fn field_inverse_and_zero_divisor() {
        let k = NumberField::new(&p(&[-2, 0, 1]));
        let t = k.generator();
        let inv = k.inverse(&t).unwrap();
        assert_eq!(k.mul(&t, &inv), p(&[1]));
        // t - 1 is a zero divisor modulo (t - 1)(t + 1).
        let r = NumberField::new(&p(&[-1, 0, 1]));
        let err = r.inverse(&p(&[-1, 1])).unwrap_err();
        assert_eq!(err.0, p(&[-1, 1]));
    }

    #[test]
    fn continued_fraction_recovery() {
        assert_eq!(rational_near(0.75, 1000), Some(Rational::from_ratio(3, 4)));
        assert_eq!(rational_near(-7.0 / 3.0, 1000), Some(Rational::from_ratio(-7, 3)));
    }

    #[test]
    fn repeated_roots_terminate() {
        for coeffs in [[0.0, 0.0, 0.0, 1.0], [-1.0, 3.0, -3.0, 1.0]] {
            let roots = polynomial_roots_f64(&coeffs);
            assert_eq!(roots.len(), 3);
            let center = -coeffs[2] / 3.0;
            assert!(roots.iter().all(|(re, im)| (re - center).abs() < 1e-4 && im.abs() < 1e-4));
        }
        let dk = durand_kerner(&[6.0, -7.0, 0.0, 1.0]);
        let mut re: Vec<f64> = dk.iter().map(|z| z.0).collect();
        re.sort_by(f64::total_cmp);
        for (r, want) in re.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((r - want).abs() < 1e-9);
        }
    }

    #[test]
    fn display() {
        assert_eq!(p(&[6, -7, 0, 1]).to_string(), "t^3 - 7t + 6");
        assert_eq!(p(&[1, 0, 1]).to_string(), "t^2 + 1");
    }
}
