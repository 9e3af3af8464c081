//! Three-dimensional Lie algebras in Bianchi normal form and their squares.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{Vector3, Vector6};
use crate::scalar::Scalar;

/// Bianchi type of a 3-dimensional real Lie algebra, numbered 1 through 8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BianchiTag(u8);

impl BianchiTag {
    pub const ALL: [BianchiTag; 8] = [
        BianchiTag(1),
        BianchiTag(2),
        BianchiTag(3),
        BianchiTag(4),
        BianchiTag(5),
        BianchiTag(6),
        BianchiTag(7),
        BianchiTag(8),
    ];

    pub fn new(tag: i64) -> Result<Self> {
        if (1..=8).contains(&tag) {
            Ok(BianchiTag(tag as u8))
        } else {
            Err(Error::InvalidTag(tag))
        }
    }

    pub fn number(self) -> u8 {
        self.0
    }

    pub fn takes_theta(self) -> bool {
        matches!(self.0, 4 | 6)
    }
}

impl fmt::Display for BianchiTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `c[i][j][k]` with `[e_i, e_j] = sum_k c[i][j][k] e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants<T> {
    c: [[[T; 3]; 3]; 3],
    /// Nonzero `(i, j, k, c_ijk)` entries, for sparse brackets.
    terms: Vec<(usize, usize, usize, T)>,
}

impl<T: Scalar> StructureConstants<T> {
    /// Builds constants from the three brackets `[e1,e2]`, `[e1,e3]`, `[e2,e3]`.
    pub fn from_brackets(e12: [T; 3], e13: [T; 3], e23: [T; 3]) -> Self {
        let mut c: [[[T; 3]; 3]; 3] =
            std::array::from_fn(|_| std::array::from_fn(|_| std::array::from_fn(|_| T::zero())));
        for ((i, j), v) in [((0, 1), e12), ((0, 2), e13), ((1, 2), e23)] {
            for k in 0..3 {
                c[i][j][k] = v[k].clone();
                c[j][i][k] = -v[k].clone();
            }
        }
        Self::from_array(c)
    }

    /// Takes a raw table; antisymmetry is the caller's business and can be
    /// checked with [`StructureConstants::is_antisymmetric`].
    pub fn from_array(c: [[[T; 3]; 3]; 3]) -> Self {
        let mut terms = Vec::new();
        for (i, row) in c.iter().enumerate() {
            for (j, col) in row.iter().enumerate() {
                for (k, v) in col.iter().enumerate() {
                    if !v.is_zero() {
                        terms.push((i, j, k, v.clone()));
                    }
                }
            }
        }
        StructureConstants { c, terms }
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &T {
        &self.c[i][j][k]
    }

    pub fn is_antisymmetric(&self) -> bool {
        (0..3).all(|i| (0..3).all(|j| (0..3).all(|k| self.c[i][j][k] == -self.c[j][i][k].clone())))
    }

    pub fn is_abelian(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn bracket(&self, u: &Vector3<T>, v: &Vector3<T>) -> Vector3<T> {
        let mut out = Vector3::<T>::zero();
        for (i, j, k, c) in &self.terms {
            if u[*i].is_zero() || v[*j].is_zero() {
                continue;
            }
            out[*k] = out[*k].clone() + u[*i].clone() * v[*j].clone() * c.clone();
        }
        out
    }

    /// Cyclic sum `[[e1,e2],e3] + [[e2,e3],e1] + [[e3,e1],e2]`.
    ///
    /// For an antisymmetric bilinear bracket on a 3-dimensional space this
    /// single triple decides the Jacobi identity.
    pub fn jacobi_residual(&self) -> Vector3<T> {
        let e = |i| Vector3::<T>::basis(i);
        let b = |u: &Vector3<T>, v: &Vector3<T>| self.bracket(u, v);
        b(&b(&e(0), &e(1)), &e(2)) + b(&b(&e(1), &e(2)), &e(0)) + b(&b(&e(2), &e(0)), &e(1))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> StructureConstants<U> {
        StructureConstants::from_array(std::array::from_fn(|i| {
            std::array::from_fn(|j| std::array::from_fn(|k| f(&self.c[i][j][k])))
        }))
    }
}

/// Residual of the Jacobi identity; zero iff the table defines a Lie algebra.
pub fn jacobi_check<T: Scalar>(constants: &StructureConstants<T>) -> Vector3<T> {
    constants.jacobi_residual()
}

/// A Bianchi-type algebra with its structure constants in the standard basis.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra3<T> {
    tag: BianchiTag,
    theta: Option<T>,
    constants: StructureConstants<T>,
}

impl<T: Scalar> LieAlgebra3<T> {
    pub fn tag(&self) -> BianchiTag {
        self.tag
    }

    pub fn theta(&self) -> Option<&T> {
        self.theta.as_ref()
    }

    pub fn constants(&self) -> &StructureConstants<T> {
        &self.constants
    }

    pub fn bracket(&self, u: &Vector3<T>, v: &Vector3<T>) -> Vector3<T> {
        self.constants.bracket(u, v)
    }

    pub fn designator(&self) -> Designator {
        Designator {
            tag: self.tag,
            theta: self.theta.as_ref().map(|t| match t.to_json() {
                serde_json::Value::String(s) => s.strip_suffix("/1").map(str::to_string).unwrap_or(s),
                other => other.to_string(),
            }),
        }
    }

    pub fn is_theta(&self, value: i64) -> bool {
        self.theta.as_ref().is_some_and(|t| (t.clone() - T::from_i64(value)).is_negligible(crate::DEFAULT_EPS))
    }

    /// Same algebra in float arithmetic.
    /// Non-zero basis brackets, e.g. `[e1,e2] = e3`.
    pub fn bracket_table(&self) -> Vec<String> {
        [(0, 1), (0, 2), (1, 2)]
            .into_iter()
            .filter_map(|(i, j)| {
                let b = self.bracket(&Vector3::basis(i), &Vector3::basis(j));
                (!b.is_zero()).then(|| {
                    format!("[e{},e{}] = {}", i + 1, j + 1, crate::acs::format_combination(b.iter(), &["e1", "e2", "e3"]))
                })
            })
            .collect()
    }

    pub fn to_f64(&self) -> LieAlgebra3<f64> {
        LieAlgebra3 {
            tag: self.tag,
            theta: self.theta.as_ref().map(Scalar::to_f64),
            constants: self.constants.map(Scalar::to_f64),
        }
    }
}

impl<T: Scalar> fmt::Display for LieAlgebra3<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.designator())
    }
}

/// The Bianchi algebra of the given type.
///
/// `theta` must be supplied exactly for types 4 (`theta != 0`) and 6
/// (`theta > 0`).
pub fn bianchi<T: Scalar>(tag: u8, theta: Option<T>) -> Result<LieAlgebra3<T>> {
    let tag = BianchiTag::new(tag as i64)?;
    match (tag.takes_theta(), &theta) {
        (true, None) => return Err(Error::MissingTheta(tag.0)),
        (false, Some(_)) => return Err(Error::ForbiddenTheta(tag.0)),
        _ => {}
    }
    let z = T::zero;
    let o = T::one;
    let (e12, e13, e23) = match tag.0 {
        1 => ([z(), z(), z()], [z(), z(), z()], [z(), z(), z()]),
        2 => ([o(), z(), z()], [z(), z(), z()], [z(), z(), z()]),
        3 => ([z(), z(), o()], [z(), z(), z()], [z(), z(), z()]),
        4 => {
            let t = theta.clone().expect("checked above");
            if t.is_zero() {
                return Err(Error::ThetaConstraint { tag: 4, reason: "theta must be non-zero" });
            }
            ([z(), z(), z()], [o(), z(), z()], [z(), t, z()])
        }
        5 => ([z(), z(), z()], [o(), z(), z()], [o(), o(), z()]),
        6 => {
            let t = theta.clone().expect("checked above");
            if !t.is_positive() {
                return Err(Error::ThetaConstraint { tag: 6, reason: "theta must be positive" });
            }
            ([z(), z(), z()], [t.clone(), -o(), z()], [o(), t, z()])
        }
        7 => ([z(), z(), o()], [z(), o(), z()], [o(), z(), z()]),
        8 => ([z(), z(), o()], [z(), -o(), z()], [o(), z(), z()]),
        _ => unreachable!("tag validated"),
    };
    Ok(LieAlgebra3 { tag, theta, constants: StructureConstants::from_brackets(e12, e13, e23) })
}

pub fn bracket3<T: Scalar>(alg: &LieAlgebra3<T>, u: &Vector3<T>, v: &Vector3<T>) -> Vector3<T> {
    alg.bracket(u, v)
}

/// `g x g` with the componentwise bracket. Indices 0..3 are `g`, 3..6 are `g*`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductAlgebra<T> {
    base: LieAlgebra3<T>,
}

impl<T: Scalar> ProductAlgebra<T> {
    pub fn new(base: LieAlgebra3<T>) -> Self {
        ProductAlgebra { base }
    }

    pub fn base(&self) -> &LieAlgebra3<T> {
        &self.base
    }

    pub fn tag(&self) -> BianchiTag {
        self.base.tag
    }

    pub fn bracket(&self, u: &Vector6<T>, v: &Vector6<T>) -> Vector6<T> {
        let c = &self.base.constants;
        let mut out = Vector6::<T>::zero();
        for (i, j, k, coeff) in &c.terms {
            for offset in [0, 3] {
                let (a, b) = (&u[offset + i], &v[offset + j]);
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                out[offset + k] = out[offset + k].clone() + a.clone() * b.clone() * coeff.clone();
            }
        }
        out
    }

    pub fn to_f64(&self) -> ProductAlgebra<f64> {
        ProductAlgebra::new(self.base.to_f64())
    }
}

pub fn bracket6<T: Scalar>(palg: &ProductAlgebra<T>, u: &Vector6<T>, v: &Vector6<T>) -> Vector6<T> {
    palg.bracket(u, v)
}

/// Algebra designator: `<tag>` or `<tag>:<theta>`, theta decimal or `p/q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Designator {
    pub tag: BianchiTag,
    pub theta: Option<String>,
}

impl Designator {
    pub fn algebra<T: Scalar>(&self) -> Result<LieAlgebra3<T>> {
        let theta = self.theta.as_deref().map(T::parse).transpose()?;
        bianchi(self.tag.number(), theta)
    }

    pub fn product<T: Scalar>(&self) -> Result<ProductAlgebra<T>> {
        self.algebra().map(ProductAlgebra::new)
    }
}

impl FromStr for Designator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (tag, theta) = match s.split_once(':') {
            Some((tag, theta)) => {
                let theta = theta.trim();
                (tag, Some(theta.strip_suffix("/1").unwrap_or(theta).to_string()))
            }
            None => (s, None),
        };
        let tag: i64 = tag
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad algebra designator `{s}`")))?;
        let tag = BianchiTag::new(tag)?;
        match (tag.takes_theta(), &theta) {
            (true, None) => Err(Error::MissingTheta(tag.number())),
            (false, Some(_)) => Err(Error::ForbiddenTheta(tag.number())),
            _ => Ok(Designator { tag, theta }),
        }
    }
}

impl fmt::Display for Designator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.theta {
            Some(theta) => write!(f, "{}:{}", self.tag, theta.strip_suffix("/1").unwrap_or(theta)),
            None => write!(f, "{}", self.tag),
        }
    }
}
