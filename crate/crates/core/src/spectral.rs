//! Quasi-invariant vectors: real eigenvectors of the `g -> g` block of `J`.
//!
//! If `J v = lambda v + J* v` for `v` in `g`, then `J^2 = -I` forces
//! `J* v != 0` and `J (J* v) = (-1 - lambda^2) v - lambda J* v`. A real cubic
//! always has a real root, so every almost complex structure has at least
//! one such vector.
//!
//! In rational mode eigenvectors are computed exactly in `Q[t]/(q)` for each
//! square-free factor `q` of the characteristic polynomial, so irrational
//! eigenvalues are handled without rounding. Float mode uses a companion
//! eigensolve and a tolerance-based kernel.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::acs::{format_combination, Acs};
use crate::linalg::{Matrix3, Vector3};
use crate::poly::{polynomial_roots_f64, rational_near, NumberField, Poly, ZeroDivisor};
use crate::scalar::{format_rational, Rational, Scalar};

/// An eigenvalue of the `g -> g` block.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Eigenvalue {
    /// Exact rational value.
    Rational { value: String },
    /// Irrational real root of `minimal_polynomial`, near `approx`.
    Algebraic { minimal_polynomial: String, approx: f64 },
    Float { value: f64 },
}

impl Eigenvalue {
    pub fn approx(&self) -> f64 {
        match self {
            Eigenvalue::Rational { value } => {
                crate::scalar::rational_to_f64(&crate::scalar::parse_rational(value).expect("formatted rational"))
            }
            Eigenvalue::Algebraic { approx, .. } => *approx,
            Eigenvalue::Float { value } => *value,
        }
    }
}

/// Common read-only view of a quasi-invariant vector in either mode.
pub trait QuasiInvariantView {
    fn eigenvalue(&self) -> Eigenvalue;
    fn v_f64(&self) -> [f64; 3];
    fn jstar_v_f64(&self) -> [f64; 3];
    /// Human-readable `v`, e.g. `e3` or `e1 + 1/2 e2`.
    fn describe_v(&self) -> String;
}

/// Float-mode quasi-invariant vector.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiInvariant {
    pub v: Vector3<f64>,
    pub lambda: f64,
    pub jstar_v: Vector3<f64>,
}

/// Rational-mode quasi-invariant vector.
///
/// Coordinates live in `Q[t]/(q)`, where `q` is a square-free factor of the
/// characteristic polynomial and `t` stands for the eigenvalue. The identity
/// checks hold as polynomial identities, hence for every root of `q`.
/// `lambda_approx` selects the real root this entry represents.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactQuasiInvariant {
    pub field: NumberField,
    pub v: [Poly; 3],
    pub jstar_v: [Poly; 3],
    pub lambda_approx: f64,
}

impl ExactQuasiInvariant {
    pub fn lambda_rational(&self) -> Option<Rational> {
        (self.field.degree() == 1).then(|| -self.field.modulus().coeff(0))
    }

    /// Rational coordinates of `v` when the eigenvalue is rational.
    pub fn v_rational(&self) -> Option<Vector3<Rational>> {
        (self.field.degree() == 1).then(|| Vector3::from_fn(|i| self.v[i].coeff(0)))
    }

    pub fn jstar_v_rational(&self) -> Option<Vector3<Rational>> {
        (self.field.degree() == 1).then(|| Vector3::from_fn(|i| self.jstar_v[i].coeff(0)))
    }

    /// Exact verification of the defining properties against `j`:
    /// the g-part of `J v` is `t v`, `J* v` matches and has no common root
    /// with the modulus, and `J (J* v) = (-1 - t^2) v - t J* v`.
    pub fn verify(&self, j: &Acs<Rational>) -> bool {
        let k = &self.field;
        let t = k.generator();
        let m = j.matrix();
        let apply = |rows: std::ops::Range<usize>, cols: std::ops::Range<usize>, x: &[Poly]| -> Vec<Poly> {
            rows.map(|r| {
                let mut acc = Poly::zero();
                for (c, xc) in cols.clone().zip(x) {
                    acc = acc.add(&xc.scale(&m[(r, c)]));
                }
                k.reduce(&acc)
            })
            .collect()
        };
        let g_part = apply(0..3, 0..3, &self.v);
        let star_part = apply(3..6, 0..3, &self.v);
        let tv: Vec<Poly> = self.v.iter().map(|x| k.mul(&t, x)).collect();
        if g_part != tv || star_part != self.jstar_v {
            return false;
        }
        let common = self.jstar_v.iter().fold(k.modulus().clone(), |g, x| g.gcd(x));
        if common.degree() > 0 {
            return false;
        }
        // J applied to (0, J* v).
        let lhs_g = apply(0..3, 3..6, &self.jstar_v);
        let lhs_star = apply(3..6, 3..6, &self.jstar_v);
        let one_plus_t2 = k.reduce(&Poly::new(vec![Rational::one(), Rational::zero(), Rational::one()]));
        let rhs_g: Vec<Poly> = self.v.iter().map(|x| k.mul(&one_plus_t2, x).neg()).collect();
        let rhs_star: Vec<Poly> = self.jstar_v.iter().map(|x| k.mul(&t, x).neg()).collect();
        lhs_g == rhs_g && lhs_star == rhs_star
    }
}

impl QuasiInvariantView for ExactQuasiInvariant {
    fn eigenvalue(&self) -> Eigenvalue {
        match self.lambda_rational() {
            Some(q) => Eigenvalue::Rational { value: format_rational(&q) },
            None => Eigenvalue::Algebraic {
                minimal_polynomial: self.field.modulus().to_string(),
                approx: self.lambda_approx,
            },
        }
    }

    fn v_f64(&self) -> [f64; 3] {
        std::array::from_fn(|i| self.v[i].eval_f64(self.lambda_approx))
    }

    fn jstar_v_f64(&self) -> [f64; 3] {
        std::array::from_fn(|i| self.jstar_v[i].eval_f64(self.lambda_approx))
    }

    fn describe_v(&self) -> String {
        match self.v_rational() {
            Some(v) => format_combination(v.iter(), &["e1", "e2", "e3"]),
            None => format_combination(self.v_f64().iter(), &["e1", "e2", "e3"]),
        }
    }
}

impl QuasiInvariantView for QuasiInvariant {
    fn eigenvalue(&self) -> Eigenvalue {
        Eigenvalue::Float { value: self.lambda }
    }

    fn v_f64(&self) -> [f64; 3] {
        self.v.0
    }

    fn jstar_v_f64(&self) -> [f64; 3] {
        self.jstar_v.0
    }

    fn describe_v(&self) -> String {
        format_combination(self.v.iter(), &["e1", "e2", "e3"])
    }
}

impl QuasiInvariant {
    /// Max-norm residuals of `(M v - lambda v, J(J*v) - ((-1-lambda^2) v - lambda J*v))`.
    pub fn residuals(&self, j: &Acs<f64>) -> (f64, f64) {
        let mv = j.g_block().mul_vec(&self.v);
        let eig = (mv - self.v.scale(&self.lambda)).max_norm();
        let js = crate::linalg::Vector6::from_halves(&Vector3::zero(), &self.jstar_v);
        let lhs = j.apply(&js);
        let rhs = crate::linalg::Vector6::from_halves(
            &self.v.scale(&(-1.0 - self.lambda * self.lambda)),
            &self.jstar_v.scale(&-self.lambda),
        );
        (eig, (lhs - rhs).max_norm())
    }
}

/// Scalars for which quasi-invariant vectors can be computed.
pub trait Spectral: Scalar {
    type Quasi: QuasiInvariantView + Clone + std::fmt::Debug + Send + Sync;

    fn quasi_invariants(j: &Acs<Self>) -> Vec<Self::Quasi>;
}

/// All real eigendirections of the `g -> g` block of `j`, one representative
/// per real eigenvalue, or a basis of the eigenspace when it is degenerate.
pub fn quasi_invariant<T: Spectral>(j: &Acs<T>) -> Vec<T::Quasi> {
    T::quasi_invariants(j)
}

/// `det(t I - M)` as a monic cubic.
pub fn characteristic_polynomial(m: &Matrix3<Rational>) -> Poly {
    let a = |r: usize, c: usize| m[(r, c)].clone();
    let trace = a(0, 0) + a(1, 1) + a(2, 2);
    let minors = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) + a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0) + a(1, 1) * a(2, 2)
        - a(1, 2) * a(2, 1);
    let det = m.determinant();
    Poly::new(vec![-det, minors, -trace, Rational::one()])
}

impl Spectral for Rational {
    type Quasi = ExactQuasiInvariant;

    fn quasi_invariants(j: &Acs<Rational>) -> Vec<ExactQuasiInvariant> {
        let m = j.g_block();
        let star = j.star_block();
        let sf = characteristic_polynomial(&m).squarefree();

        let mut work = split_rational_roots(&sf);
        let mut solved: Vec<(NumberField, Vec<[Poly; 3]>)> = Vec::new();
        while let Some(q) = work.pop() {
            if q.real_root_count() == 0 {
                continue;
            }
            let field = NumberField::new(&q);
            match eigenvectors_mod(&m, &field) {
                Ok(vs) => solved.push((field, vs)),
                Err(ZeroDivisor(g)) => {
                    let g = g.monic();
                    let rest = q.div_rem(&g).0.monic();
                    work.push(g);
                    work.push(rest);
                }
            }
        }

        let mut out = Vec::new();
        for (field, vectors) in solved {
            let roots = field.modulus().real_roots_f64();
            for root in roots {
                for v in &vectors {
                    let jstar_v = std::array::from_fn(|r| {
                        let mut acc = Poly::zero();
                        for (c, x) in v.iter().enumerate() {
                            acc = acc.add(&x.scale(&star[(r, c)]));
                        }
                        field.reduce(&acc)
                    });
                    out.push(ExactQuasiInvariant { field: field.clone(), v: v.clone(), jstar_v, lambda_approx: root });
                }
            }
        }
        out.sort_by(|a, b| a.lambda_approx.total_cmp(&b.lambda_approx));
        out
    }
}

/// Splits off linear factors found by rounding float roots to nearby
/// rationals and confirming them exactly.
fn split_rational_roots(sf: &Poly) -> Vec<Poly> {
    let mut rest = sf.clone();
    let mut factors = Vec::new();
    let float_coeffs: Vec<f64> = sf.coeffs().iter().map(Scalar::to_f64).collect();
    let mut candidates: Vec<Rational> = polynomial_roots_f64(&float_coeffs)
        .into_iter()
        .filter(|(_, im)| im.abs() <= 1e-6)
        .filter_map(|(re, _)| rational_near(re, 1_000_000))
        .collect();
    candidates.push(Rational::zero());
    for r in candidates {
        if rest.degree() >= 1 && rest.eval(&r).is_zero() {
            let lin = Poly::linear(&r);
            rest = rest.div_rem(&lin).0;
            factors.push(lin);
        }
    }
    if rest.degree() >= 1 {
        factors.push(rest.monic());
    }
    factors
}

/// Kernel of `M - tI` over `Q[t]/(q)`, each vector scaled so its first
/// nonzero coordinate is 1.
fn eigenvectors_mod(m: &Matrix3<Rational>, field: &NumberField) -> Result<Vec<[Poly; 3]>, ZeroDivisor> {
    let t = field.generator();
    let mut a: Vec<Vec<Poly>> = (0..3)
        .map(|r| {
            (0..3)
                .map(|c| {
                    let entry = Poly::constant(m[(r, c)].clone());
                    field.reduce(&if r == c { entry.sub(&t) } else { entry })
                })
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..3 {
        let Some(p) = (row..3).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        let inv = field.inverse(&a[p][col])?;
        a.swap(row, p);
        for c in 0..3 {
            a[row][c] = field.mul(&a[row][c], &inv);
        }
        for r in 0..3 {
            if r == row || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..3 {
                let sub = field.mul(&f, &a[row][c]);
                a[r][c] = field.reduce(&a[r][c].sub(&sub));
            }
        }
        pivots.push(col);
        row += 1;
    }
    let mut out = Vec::new();
    for free in (0..3).filter(|c| !pivots.contains(c)) {
        let mut v: [Poly; 3] = std::array::from_fn(|_| Poly::zero());
        v[free] = Poly::constant(Rational::one());
        for (k, &pc) in pivots.iter().enumerate() {
            v[pc] = a[k][free].neg();
        }
        let lead = v.iter().find(|x| !x.is_zero()).expect("free coordinate is 1").clone();
        let inv = field.inverse(&lead)?;
        out.push(v.map(|x| field.mul(&x, &inv)));
    }
    Ok(out)
}

/// Imaginary parts at most this large count as real eigenvalues.
pub const REAL_ROOT_THRESHOLD: f64 = 1e-9;

impl Spectral for f64 {
    type Quasi = QuasiInvariant;

    fn quasi_invariants(j: &Acs<f64>) -> Vec<QuasiInvariant> {
        let m = j.g_block();
        let star = j.star_block();
        let a = |r: usize, c: usize| m[(r, c)];
        let trace = a(0, 0) + a(1, 1) + a(2, 2);
        let minors = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) + a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0) + a(1, 1) * a(2, 2)
            - a(1, 2) * a(2, 1);
        let det = m.determinant();
        let coeffs = [-det, minors, -trace, 1.0];
        let charpoly = |x: f64| ((x - trace) * x + minors) * x - det;
        let derivative = |x: f64| (3.0 * x - 2.0 * trace) * x + minors;

        let scale = m.max_norm().max(1.0);

        // Repeated roots come back as a small cloud (size ~ eps^(1/k)); its
        // mean is accurate, so cluster first and average.
        let mut raw = polynomial_roots_f64(&coeffs);
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut clusters: Vec<Vec<(f64, f64)>> = Vec::new();
        for z in raw {
            match clusters
                .iter_mut()
                .find(|c| c.iter().any(|w| (w.0 - z.0).hypot(w.1 - z.1) <= 1e-4 * scale))
            {
                Some(c) => c.push(z),
                None => clusters.push(vec![z]),
            }
        }
        let mut roots: Vec<f64> = Vec::new();
        for c in &clusters {
            let n = c.len() as f64;
            let re = c.iter().map(|z| z.0).sum::<f64>() / n;
            let im = c.iter().map(|z| z.1).sum::<f64>() / n;
            if im.abs() > REAL_ROOT_THRESHOLD * scale {
                continue;
            }
            let d = derivative(re);
            roots.push(if c.len() == 1 && d.abs() > 1e-12 { re - charpoly(re) / d } else { re });
        }
        if roots.is_empty() {
            // Rounding pushed a real root off the axis; take the most real one.
            let best = clusters
                .iter()
                .map(|c| {
                    let n = c.len() as f64;
                    (c.iter().map(|z| z.0).sum::<f64>() / n, (c.iter().map(|z| z.1).sum::<f64>() / n).abs())
                })
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .expect("cubic has roots");
            roots.push(best.0);
        }
        roots.sort_by(f64::total_cmp);

        let mut out = Vec::new();
        for lambda in roots {
            let shifted = Matrix3::from_fn(|r, c| m[(r, c)] - if r == c { lambda } else { 0.0 });
            for v in float_kernel(&shifted, scale) {
                let jstar_v = star.mul_vec(&v);
                out.push(QuasiInvariant { v, lambda, jstar_v });
            }
        }
        out
    }
}

/// Kernel basis of a nearly singular 3×3 matrix. The dimension comes from
/// the singular values (cutoff `1e-8 * scale`, at least one); the basis from
/// Gauss-Jordan elimination with full pivoting, normalized so the first
/// coordinate above `1e-9` of the largest is 1.
fn float_kernel(a: &Matrix3<f64>, scale: f64) -> Vec<Vector3<f64>> {
    let na = nalgebra::Matrix3::from_fn(|r, c| a[(r, c)]);
    let sv = na.singular_values();
    let nullity = sv.iter().filter(|&&s| s <= 1e-8 * scale).count().max(1);
    let rank = 3 - nullity;

    let mut w = a.0;
    let mut cols = [0usize, 1, 2];
    for k in 0..rank {
        let (mut br, mut bc, mut best) = (k, k, -1.0);
        for r in k..3 {
            for c in k..3 {
                if w[r][c].abs() > best {
                    (br, bc, best) = (r, c, w[r][c].abs());
                }
            }
        }
        w.swap(k, br);
        for row in w.iter_mut() {
            row.swap(k, bc);
        }
        cols.swap(k, bc);
        let p = w[k][k];
        for c in 0..3 {
            w[k][c] /= p;
        }
        for r in 0..3 {
            if r != k {
                let f = w[r][k];
                for c in 0..3 {
                    w[r][c] -= f * w[k][c];
                }
            }
        }
    }
    let mut out = Vec::new();
    for free in rank..3 {
        let mut permuted = [0.0; 3];
        permuted[free] = 1.0;
        for k in 0..rank {
            permuted[k] = -w[k][free];
        }
        let mut v = [0.0; 3];
        for (slot, &col) in cols.iter().enumerate() {
            v[col] = permuted[slot];
        }
        let big = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let lead = *v.iter().find(|x| x.abs() > 1e-9 * big).expect("nonzero kernel vector");
        out.push(crate::linalg::Vector(v.map(|x| x / lead)));
    }
    out.sort_by(|x, y| {
        let key = |v: &Vector3<f64>| v.0.iter().position(|x| *x != 0.0).unwrap_or(3);
        key(x).cmp(&key(y))
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acs::Acs;

    type Q = Rational;

    fn case2_sample() -> Acs<Q> {
        Acs::from_i64([
            [0, -1, 0, 0, 0, 0],
            [1, 0, 0, 0, 0, 0],
            [0, 0, 0, 0, 0, -1],
            [0, 0, 0, 0, -1, 0],
            [0, 0, 0, 1, 0, 0],
            [0, 0, 1, 0, 0, 0],
        ])
    }

    #[test]
    fn characteristic_polynomial_of_rotation_block() {
        let m = case2_sample().g_block();
        let p = characteristic_polynomial(&m);
        // t (t^2 + 1)
        assert_eq!(p, Poly::new(vec![Q::zero(), Q::one(), Q::zero(), Q::one()]));
    }

    #[test]
    fn split_form_has_single_direction() {
        let qi = quasi_invariant(&case2_sample());
        assert_eq!(qi.len(), 1);
        assert_eq!(qi[0].v_rational().unwrap(), Vector3::from_i64([0, 0, 1]));
        assert_eq!(qi[0].lambda_rational().unwrap(), Q::zero());
        assert!(qi[0].verify(&case2_sample()));
        assert_eq!(qi[0].describe_v(), "e3");
    }

    #[test]
    fn standard_structure_has_full_eigenspace() {
        let j = Acs::<Q>::standard();
        let qi = quasi_invariant(&j);
        assert_eq!(qi.len(), 3);
        for (k, entry) in qi.iter().enumerate() {
            assert_eq!(entry.v_rational().unwrap(), Vector3::basis(k));
            assert_eq!(entry.lambda_rational().unwrap(), Q::zero());
            assert!(entry.verify(&j));
        }
        let float = quasi_invariant(&j.to_f64());
        assert_eq!(float.len(), 3);
        for (k, entry) in float.iter().enumerate() {
            assert_eq!(entry.v, Vector3::basis(k));
        }
    }

    #[test]
    fn irrational_eigenvalues_are_exact() {
        // g-block [[0,2,0],[1,0,0],[0,0,1]] has eigenvalues +-sqrt(2), 1; complete
        // to J^2 = -I with J* = I: J = [[M, -(I+M^2)], [I, -M]].
        let m = Matrix3::<Q>::from_i64([[0, 2, 0], [1, 0, 0], [0, 0, 1]]);
        let i = Matrix3::<Q>::identity();
        let top_right = Matrix3::zero() - (i.clone() + m.mul_mat(&m));
        let j = Acs::new(crate::linalg::Matrix6::from_blocks(&m, &top_right, &i, &(Matrix3::zero() - m.clone())));
        assert!(crate::acs::is_acs(&j).is_acs);
        let qi = quasi_invariant(&j);
        assert_eq!(qi.len(), 3);
        assert!(qi.iter().all(|e| e.verify(&j)));
        let lambdas: Vec<f64> = qi.iter().map(|e| e.lambda_approx).collect();
        let s2 = 2f64.sqrt();
        for (got, want) in lambdas.iter().zip([-s2, 1.0, s2]) {
            assert!((got - want).abs() < 1e-12, "{lambdas:?}");
        }
        assert!(matches!(qi[0].eigenvalue(), Eigenvalue::Algebraic { .. }));
        assert!(matches!(qi[1].eigenvalue(), Eigenvalue::Rational { .. }));

        let float = quasi_invariant(&j.to_f64());
        assert_eq!(float.len(), 3);
        for entry in &float {
            let (a, b) = entry.residuals(&j.to_f64());
            assert!(a < 1e-9 && b < 1e-9);
        }
    }

    #[test]
    fn verify_rejects_wrong_vector() {
        let j = case2_sample();
        let mut qi = quasi_invariant(&j).remove(0);
        qi.v[0] = Poly::constant(Q::one());
        assert!(!qi.verify(&j));
    }
}
