//! Almost complex structures on `g x g` and their Nijenhuis tensor.

use serde::Serialize;

use crate::lie::ProductAlgebra;
use crate::linalg::{rank, Matrix3, Matrix6, Vector6};
use crate::scalar::{Scalar, DEFAULT_EPS};

/// Labels of the standard basis of `g x g`, in wire order.
pub const BASIS_LABELS: [&str; 6] = ["e1", "e2", "e3", "e1*", "e2*", "e3*"];

/// The 15 unordered basis pairs `(i, j)`, `i < j`.
pub fn basis_pairs() -> impl Iterator<Item = (usize, usize)> {
    (0..6).flat_map(|i| (i + 1..6).map(move |j| (i, j)))
}

/// A 6×6 matrix whose columns are the images of `e1, e2, e3, e1*, e2*, e3*`.
///
/// Nothing about `J^2 = -I` is enforced at construction so that search
/// iterates and deliberately broken candidates can be represented.
#[derive(Debug, Clone, PartialEq)]
pub struct Acs<T> {
    m: Matrix6<T>,
}

impl<T: Scalar> Acs<T> {
    pub fn new(m: Matrix6<T>) -> Self {
        Acs { m }
    }

    pub fn from_i64(rows: [[i64; 6]; 6]) -> Self {
        Acs::new(Matrix6::from_i64(rows))
    }

    /// `[[0, -I], [I, 0]]`: `J e_i = e_i*`, `J e_i* = -e_i`.
    pub fn standard() -> Self {
        let i = Matrix3::identity();
        let z = Matrix3::zero();
        Acs::new(Matrix6::from_blocks(&z, &(Matrix3::zero() - i.clone()), &i, &z))
    }

    pub fn matrix(&self) -> &Matrix6<T> {
        &self.m
    }

    pub fn into_matrix(self) -> Matrix6<T> {
        self.m
    }

    pub fn apply(&self, v: &Vector6<T>) -> Vector6<T> {
        self.m.mul_vec(v)
    }

    /// `g -> g` block.
    pub fn g_block(&self) -> Matrix3<T> {
        self.m.block(0, 0)
    }

    /// `g -> g*` block (the `J*` part on the first factor).
    pub fn star_block(&self) -> Matrix3<T> {
        self.m.block(1, 0)
    }

    /// `g* -> g` block.
    pub fn cross_block(&self) -> Matrix3<T> {
        self.m.block(0, 1)
    }

    /// `g* -> g*` block.
    pub fn star_star_block(&self) -> Matrix3<T> {
        self.m.block(1, 1)
    }

    pub fn square_plus_identity(&self) -> Matrix6<T> {
        self.m.mul_mat(&self.m) + Matrix6::identity()
    }

    pub fn to_f64(&self) -> Acs<f64> {
        Acs::new(self.m.to_f64())
    }

    /// Conjugate `P J P^{-1}`; `None` if `p` is singular.
    pub fn conjugate(&self, p: &Matrix6<T>) -> Option<Self> {
        let inv = p.inverse()?;
        Some(Acs::new(p.mul_mat(&self.m).mul_mat(&inv)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AcsCheck {
    pub is_acs: bool,
    /// Max-norm of `J^2 + I`.
    pub residual: f64,
}

pub fn is_acs<T: Scalar>(j: &Acs<T>) -> AcsCheck {
    is_acs_with(j, DEFAULT_EPS)
}

pub fn is_acs_with<T: Scalar>(j: &Acs<T>, eps: f64) -> AcsCheck {
    let r = j.square_plus_identity();
    AcsCheck {
        is_acs: r.0.iter().flatten().all(|x| x.is_negligible(eps)),
        residual: r.max_norm(),
    }
}

/// `N(v,w) = [v,w] + J[Jv,w] + J[v,Jw] - [Jv,Jw]`.
pub fn nijenhuis<T: Scalar>(palg: &ProductAlgebra<T>, j: &Acs<T>, v: &Vector6<T>, w: &Vector6<T>) -> Vector6<T> {
    let jv = j.apply(v);
    let jw = j.apply(w);
    let inner = palg.bracket(&jv, w) + palg.bracket(v, &jw);
    palg.bracket(v, w) + j.apply(&inner) - palg.bracket(&jv, &jw)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrabilityReport<T> {
    /// Nijenhuis values on the 15 basis pairs, in [`basis_pairs`] order.
    pub pair_residuals: Vec<((usize, usize), Vector6<T>)>,
    pub max_norm: f64,
    pub integrable: bool,
}

impl<T: Scalar> IntegrabilityReport<T> {
    /// Pairs with a nonzero (exact) or non-negligible (float) residual.
    pub fn failing_pairs(&self, eps: f64) -> Vec<(usize, usize)> {
        self.pair_residuals
            .iter()
            .filter(|(_, r)| !r.is_negligible(eps))
            .map(|(p, _)| *p)
            .collect()
    }

    /// Sum of squared residual coordinates.
    pub fn sum_of_squares(&self) -> f64 {
        self.pair_residuals.iter().map(|(_, r)| r.norm_squared_f64()).sum()
    }
}

pub fn integrability_report<T: Scalar>(palg: &ProductAlgebra<T>, j: &Acs<T>) -> IntegrabilityReport<T> {
    integrability_report_with(palg, j, DEFAULT_EPS)
}

/// Bilinearity makes the basis pairs sufficient for `N = 0`.
pub fn integrability_report_with<T: Scalar>(palg: &ProductAlgebra<T>, j: &Acs<T>, eps: f64) -> IntegrabilityReport<T> {
    let basis: Vec<Vector6<T>> = (0..6).map(Vector6::basis).collect();
    let pair_residuals: Vec<_> = basis_pairs()
        .map(|(a, b)| ((a, b), nijenhuis(palg, j, &basis[a], &basis[b])))
        .collect();
    let max_norm = pair_residuals.iter().map(|(_, r)| r.max_norm()).fold(0.0, f64::max);
    let integrable = pair_residuals.iter().all(|(_, r)| r.is_negligible(eps));
    IntegrabilityReport { pair_residuals, max_norm, integrable }
}

/// `J^2 = -I` and `N = 0`.
pub fn is_integrable_structure<T: Scalar>(palg: &ProductAlgebra<T>, j: &Acs<T>, eps: f64) -> bool {
    is_acs_with(j, eps).is_acs && integrability_report_with(palg, j, eps).integrable
}

/// `(rank of g -> g*, rank of g* -> g)`.
pub fn star_rank<T: Scalar>(j: &Acs<T>) -> (usize, usize) {
    let rows = |b: Matrix3<T>| b.0.iter().map(|r| r.to_vec()).collect::<Vec<_>>();
    (rank(&rows(j.star_block())), rank(&rows(j.cross_block())))
}

/// True iff `J g = g*` and `J g* = g`, i.e. both diagonal blocks vanish.
pub fn swaps_factors<T: Scalar>(j: &Acs<T>) -> bool {
    swaps_factors_with(j, DEFAULT_EPS)
}

pub fn swaps_factors_with<T: Scalar>(j: &Acs<T>, eps: f64) -> bool {
    let negligible = |b: Matrix3<T>| b.0.iter().flatten().all(|x| x.is_negligible(eps));
    negligible(j.g_block()) && negligible(j.star_star_block())
}

/// Renders a vector in the standard basis, e.g. `e1 - 1/2 e3*`.
pub fn format_vector6<T: Scalar>(v: &Vector6<T>) -> String {
    format_combination(v.iter(), &BASIS_LABELS)
}

pub(crate) fn format_combination<'a, T: Scalar>(coords: impl Iterator<Item = &'a T>, labels: &[&str]) -> String {
    let mut out = String::new();
    for (x, label) in coords.zip(labels) {
        if x.is_zero() {
            continue;
        }
        let text = match x.to_json() {
            serde_json::Value::String(s) => s.strip_suffix("/1").map(str::to_string).unwrap_or(s),
            other => other.to_string(),
        };
        let (neg, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest.to_string()),
            None => (false, text),
        };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if body != "1" {
            out.push_str(&body);
            out.push(' ');
        }
        out.push_str(label);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::bianchi;
    use crate::scalar::Rational;

    type Q = Rational;

    fn product(tag: u8, theta: Option<i64>) -> ProductAlgebra<Q> {
        ProductAlgebra::new(bianchi(tag, theta.map(Q::from_i64)).unwrap())
    }

    fn e(i: usize) -> Vector6<Q> {
        Vector6::basis(i)
    }

    fn case2_sample() -> Acs<Q> {
        // X=0, Y=1, lambda=0, kappa=kappa*=0, X*=0, Y*=1
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
    fn is_acs_examples() {
        assert!(is_acs(&Acs::<Q>::standard()).is_acs);
        let id = Acs::new(Matrix6::<Q>::identity());
        let check = is_acs(&id);
        assert!(!check.is_acs);
        assert_eq!(check.residual, 2.0);
        assert_eq!(id.square_plus_identity(), Matrix6::identity().scale(&Q::from_i64(2)));
        assert!(is_acs(&case2_sample()).is_acs);
    }

    #[test]
    fn nijenhuis_examples() {
        let p1 = product(1, None);
        let j = Acs::<Q>::from_i64([
            [1, 2, 0, -5, 0, 0],
            [0, 1, 0, 0, 0, 0],
            [0, 0, 0, 0, 0, -1],
            [1, 0, 0, -1, 0, 0],
            [0, 0, 0, 0, 0, 0],
            [0, 0, 1, 0, 0, 0],
        ]);
        for a in 0..6 {
            for b in 0..6 {
                assert!(nijenhuis(&p1, &j, &e(a), &e(b)).is_zero());
            }
        }
        let p2 = product(2, None);
        let swap = Acs::<Q>::standard();
        assert_eq!(nijenhuis(&p2, &swap, &e(0), &e(1)), e(0) - e(3));
        assert!(nijenhuis(&p2, &case2_sample(), &e(0), &e(1)).is_zero());
    }

    #[test]
    fn report_examples() {
        let abelian = integrability_report(&product(1, None), &Acs::<Q>::standard());
        assert!(abelian.integrable);
        assert_eq!(abelian.pair_residuals.len(), 15);
        let t5 = integrability_report(&product(5, None), &Acs::<Q>::standard());
        assert!(!t5.integrable);
        assert!(t5.max_norm > 0.0);
        assert!(!t5.failing_pairs(0.0).is_empty());
    }

    #[test]
    fn star_rank_and_swap() {
        assert_eq!(star_rank(&Acs::<Q>::standard()), (3, 3));
        assert!(swaps_factors(&Acs::<Q>::standard()));
        assert_eq!(star_rank(&case2_sample()), (1, 1));
        assert!(!swaps_factors(&case2_sample()));
    }

    #[test]
    fn vector_formatting() {
        let v = Vector6::<Q>::from_fn(|i| match i {
            0 => Q::from_i64(1),
            2 => Q::from_ratio(-1, 2),
            5 => Q::from_i64(-1),
            _ => Q::from_i64(0),
        });
        assert_eq!(format_vector6(&v), "e1 - 1/2 e3 - e3*");
        assert_eq!(format_vector6(&Vector6::<Q>::zero()), "0");
    }
}
