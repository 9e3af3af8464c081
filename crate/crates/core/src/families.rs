//! Generators for the classified families of integrable complex structures.
//!
//! Every generator checks its own output: [`family`] only returns a matrix
//! that satisfies `J^2 = -I` and has a vanishing Nijenhuis tensor on all
//! basis pairs, exactly in rational arithmetic.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::acs::{integrability_report, is_acs, Acs};
use crate::error::{Error, Result};
use crate::lie::{BianchiTag, Designator, LieAlgebra3, ProductAlgebra};
use crate::linalg::{Matrix6, Vector6};
use crate::scalar::{Rational, Scalar, DEFAULT_EPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(into = "String")]
pub enum FamilyId {
    AbelianStandard,
    AbelianGeneral,
    AbelianRank1,
    Case2,
    Case3Split,
    Case3Full,
    Case4Split,
    Case6Rank1,
    Case6Theta1Lambda0a,
    Case6Theta1Lambda0b,
    Case6Theta1Lambda2,
    Case6Theta1LambdaMinus2,
    Magnin,
    Mixed,
}

impl FamilyId {
    pub const ALL: [FamilyId; 14] = [
        FamilyId::AbelianStandard,
        FamilyId::AbelianGeneral,
        FamilyId::AbelianRank1,
        FamilyId::Case2,
        FamilyId::Case3Split,
        FamilyId::Case3Full,
        FamilyId::Case4Split,
        FamilyId::Case6Rank1,
        FamilyId::Case6Theta1Lambda0a,
        FamilyId::Case6Theta1Lambda0b,
        FamilyId::Case6Theta1Lambda2,
        FamilyId::Case6Theta1LambdaMinus2,
        FamilyId::Magnin,
        FamilyId::Mixed,
    ];

    /// The ids built from a matrix template; `mixed` is produced by
    /// [`mixed_structure`] instead.
    pub const TEMPLATED: [FamilyId; 13] = [
        FamilyId::AbelianStandard,
        FamilyId::AbelianGeneral,
        FamilyId::AbelianRank1,
        FamilyId::Case2,
        FamilyId::Case3Split,
        FamilyId::Case3Full,
        FamilyId::Case4Split,
        FamilyId::Case6Rank1,
        FamilyId::Case6Theta1Lambda0a,
        FamilyId::Case6Theta1Lambda0b,
        FamilyId::Case6Theta1Lambda2,
        FamilyId::Case6Theta1LambdaMinus2,
        FamilyId::Magnin,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyId::AbelianStandard => "abelian-standard",
            FamilyId::AbelianGeneral => "abelian-general",
            FamilyId::AbelianRank1 => "abelian-rank1",
            FamilyId::Case2 => "case2",
            FamilyId::Case3Split => "case3-split",
            FamilyId::Case3Full => "case3-full",
            FamilyId::Case4Split => "case4-split",
            FamilyId::Case6Rank1 => "case6-rank1",
            FamilyId::Case6Theta1Lambda0a => "case6-theta1-lambda0a",
            FamilyId::Case6Theta1Lambda0b => "case6-theta1-lambda0b",
            FamilyId::Case6Theta1Lambda2 => "case6-theta1-lambda2",
            FamilyId::Case6Theta1LambdaMinus2 => "case6-theta1-lambda-2",
            FamilyId::Magnin => "magnin",
            FamilyId::Mixed => "mixed",
        }
    }

    /// Parameter names, in the order used by [`FamilyParams::values`].
    pub fn param_keys(self) -> &'static [&'static str] {
        match self {
            FamilyId::AbelianGeneral => &["X", "Y", "Z", "A", "B", "C", "lambda"],
            FamilyId::AbelianRank1 => &["lambda"],
            FamilyId::Case2 => &["X", "Y", "lambda", "kappa", "kappa*", "X*", "Y*"],
            FamilyId::Case3Split | FamilyId::Case4Split | FamilyId::Case6Rank1 => &["X", "Y", "lambda", "X*", "Y*"],
            FamilyId::Case3Full => &["X", "Y", "Z", "A", "B", "C"],
            FamilyId::Magnin => &["lambda", "eta"],
            _ => &[],
        }
    }

    /// Rank-one families in which `e3` is quasi-invariant.
    pub fn is_split_form(self) -> bool {
        matches!(self, FamilyId::Case2 | FamilyId::Case3Split | FamilyId::Case4Split | FamilyId::Case6Rank1)
    }

    pub fn is_constant(self) -> bool {
        matches!(
            self,
            FamilyId::AbelianStandard
                | FamilyId::Case6Theta1Lambda0a
                | FamilyId::Case6Theta1Lambda0b
                | FamilyId::Case6Theta1Lambda2
                | FamilyId::Case6Theta1LambdaMinus2
        )
    }

    pub fn admits<T: Scalar>(self, alg: &LieAlgebra3<T>) -> bool {
        let tag = alg.tag().number();
        match self {
            FamilyId::AbelianStandard | FamilyId::AbelianGeneral | FamilyId::AbelianRank1 => tag == 1,
            FamilyId::Case2 => tag == 2,
            FamilyId::Case3Split | FamilyId::Case3Full => tag == 3,
            FamilyId::Case4Split => tag == 4 && alg.is_theta(1),
            FamilyId::Case6Rank1 => tag == 6,
            FamilyId::Case6Theta1Lambda0a
            | FamilyId::Case6Theta1Lambda0b
            | FamilyId::Case6Theta1Lambda2
            | FamilyId::Case6Theta1LambdaMinus2 => tag == 6 && alg.is_theta(1),
            FamilyId::Magnin => tag == 7 || tag == 8,
            FamilyId::Mixed => admits_integrable_structure(alg),
        }
    }

    /// A fixed set of algebras on which the family is exercised.
    pub fn reference_algebras(self) -> Vec<Designator> {
        let names: &[&str] = match self {
            FamilyId::AbelianStandard | FamilyId::AbelianGeneral | FamilyId::AbelianRank1 => &["1"],
            FamilyId::Case2 => &["2"],
            FamilyId::Case3Split | FamilyId::Case3Full => &["3"],
            FamilyId::Case4Split => &["4:1"],
            FamilyId::Case6Rank1 => &["6:1", "6:1/2", "6:3/2"],
            FamilyId::Case6Theta1Lambda0a
            | FamilyId::Case6Theta1Lambda0b
            | FamilyId::Case6Theta1Lambda2
            | FamilyId::Case6Theta1LambdaMinus2 => &["6:1"],
            FamilyId::Magnin => &["7", "8"],
            FamilyId::Mixed => &["1", "2", "3", "4:1", "6:1", "6:3/2", "7", "8"],
        };
        names.iter().map(|s| s.parse().expect("valid designator")).collect()
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl From<FamilyId> for String {
    fn from(id: FamilyId) -> String {
        id.as_str().to_string()
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let normalized = s.trim().replace('λ', "lambda").replace('\u{2212}', "-");
        let normalized = match normalized.as_str() {
            "case3-split-form" => "case3-split",
            "case-3-full" => "case3-full",
            other => other,
        };
        FamilyId::ALL
            .into_iter()
            .find(|id| id.as_str() == normalized)
            .ok_or_else(|| Error::Parse(format!("unknown family `{s}`")))
    }
}

/// Whether any integrable complex structure exists on `g x g`: all types
/// except 5 and type 4 with `theta != 1`.
pub fn admits_integrable_structure<T: Scalar>(alg: &LieAlgebra3<T>) -> bool {
    match alg.tag().number() {
        5 => false,
        4 => alg.is_theta(1),
        _ => true,
    }
}

/// Parameters of a family, one variant per template shape.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyParams<T = Rational> {
    None,
    AbelianGeneral { x: T, y: T, z: T, a: T, b: T, c: T, lambda: T },
    AbelianRank1 { lambda: T },
    Case2 { x: T, y: T, lambda: T, kappa: T, kappa_star: T, x_star: T, y_star: T },
    Split { x: T, y: T, lambda: T, x_star: T, y_star: T },
    /// `lambda` is not free here; see [`case3_full_lambda`].
    Case3Full { x: T, y: T, z: T, a: T, b: T, c: T },
    Magnin { lambda: T, eta: T },
}

impl<T: Scalar> FamilyParams<T> {
    /// Builds the variant for `id` from values in [`FamilyId::param_keys`] order.
    pub fn from_values(id: FamilyId, values: Vec<T>) -> Result<Self> {
        let want = id.param_keys().len();
        if values.len() != want {
            return Err(Error::InvalidArgument(format!(
                "family {id} takes {want} parameters, got {}",
                values.len()
            )));
        }
        let mut it = values.into_iter();
        let mut next = || it.next().expect("length checked");
        Ok(match id {
            FamilyId::AbelianGeneral => FamilyParams::AbelianGeneral {
                x: next(),
                y: next(),
                z: next(),
                a: next(),
                b: next(),
                c: next(),
                lambda: next(),
            },
            FamilyId::AbelianRank1 => FamilyParams::AbelianRank1 { lambda: next() },
            FamilyId::Case2 => FamilyParams::Case2 {
                x: next(),
                y: next(),
                lambda: next(),
                kappa: next(),
                kappa_star: next(),
                x_star: next(),
                y_star: next(),
            },
            FamilyId::Case3Split | FamilyId::Case4Split | FamilyId::Case6Rank1 => FamilyParams::Split {
                x: next(),
                y: next(),
                lambda: next(),
                x_star: next(),
                y_star: next(),
            },
            FamilyId::Case3Full => FamilyParams::Case3Full {
                x: next(),
                y: next(),
                z: next(),
                a: next(),
                b: next(),
                c: next(),
            },
            FamilyId::Magnin => FamilyParams::Magnin { lambda: next(), eta: next() },
            _ => FamilyParams::None,
        })
    }

    /// Builds params from `KEY=VALUE` style pairs. Unknown or missing keys are errors.
    pub fn from_pairs<'a>(id: FamilyId, pairs: impl IntoIterator<Item = (&'a str, T)>) -> Result<Self> {
        let keys = id.param_keys();
        let mut slots: Vec<Option<T>> = vec![None; keys.len()];
        for (key, value) in pairs {
            let canonical = canonical_key(key);
            let idx = keys
                .iter()
                .position(|k| *k == canonical)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown parameter `{key}` for family {id}")))?;
            if slots[idx].replace(value).is_some() {
                return Err(Error::InvalidArgument(format!("parameter `{key}` given twice")));
            }
        }
        let missing: Vec<&str> = keys.iter().zip(&slots).filter(|(_, v)| v.is_none()).map(|(k, _)| *k).collect();
        if !missing.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "family {id} is missing parameters: {}",
                missing.join(", ")
            )));
        }
        Self::from_values(id, slots.into_iter().map(|v| v.expect("checked")).collect())
    }

    pub fn values(&self) -> Vec<T> {
        match self.clone() {
            FamilyParams::None => vec![],
            FamilyParams::AbelianGeneral { x, y, z, a, b, c, lambda } => vec![x, y, z, a, b, c, lambda],
            FamilyParams::AbelianRank1 { lambda } => vec![lambda],
            FamilyParams::Case2 { x, y, lambda, kappa, kappa_star, x_star, y_star } => {
                vec![x, y, lambda, kappa, kappa_star, x_star, y_star]
            }
            FamilyParams::Split { x, y, lambda, x_star, y_star } => vec![x, y, lambda, x_star, y_star],
            FamilyParams::Case3Full { x, y, z, a, b, c } => vec![x, y, z, a, b, c],
            FamilyParams::Magnin { lambda, eta } => vec![lambda, eta],
        }
    }

    /// `(key, value)` pairs for display and JSON.
    pub fn pairs(&self, id: FamilyId) -> Vec<(&'static str, T)> {
        id.param_keys().iter().copied().zip(self.values()).collect()
    }

    fn fits(&self, id: FamilyId) -> bool {
        matches!(
            (id, self),
            (FamilyId::AbelianGeneral, FamilyParams::AbelianGeneral { .. })
                | (FamilyId::AbelianRank1, FamilyParams::AbelianRank1 { .. })
                | (FamilyId::Case2, FamilyParams::Case2 { .. })
                | (FamilyId::Case3Split | FamilyId::Case4Split | FamilyId::Case6Rank1, FamilyParams::Split { .. })
                | (FamilyId::Case3Full, FamilyParams::Case3Full { .. })
                | (FamilyId::Magnin, FamilyParams::Magnin { .. })
        ) || (id.param_keys().is_empty() && matches!(self, FamilyParams::None))
    }
}

fn canonical_key(key: &str) -> String {
    key.trim()
        .replace('λ', "lambda")
        .replace('κ', "kappa")
        .replace('η', "eta")
        .replace("_star", "*")
}

/// The eigenvalue forced on `case3-full`: `(-1 + XB - AY) / (X + B)`.
pub fn case3_full_lambda<T: Scalar>(x: &T, y: &T, a: &T, b: &T) -> T {
    (T::from_i64(-1) + x.clone() * b.clone() - a.clone() * y.clone()) / (x.clone() + b.clone())
}

fn nonzero<T: Scalar>(value: &T, what: &str) -> Result<()> {
    if value.is_negligible(DEFAULT_EPS) {
        Err(Error::Constraint(format!("{what} must be non-zero")))
    } else {
        Ok(())
    }
}

fn rows<T: Scalar>(entries: [[T; 6]; 6]) -> Matrix6<T> {
    crate::linalg::Matrix(entries)
}

fn constant<T: Scalar>(entries: [[i64; 6]; 6]) -> Matrix6<T> {
    Matrix6::from_i64(entries)
}

const LAMBDA0A: [[i64; 6]; 6] = [
    [0, -1, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, -1],
    [0, 1, 0, 0, -1, 0],
    [1, 0, 0, 1, 0, 0],
    [0, 0, 1, 0, 0, 0],
];

// The mirror of LAMBDA0A under the factor swap: Je1* = e2, Je3 = -e3*.
const LAMBDA0B: [[i64; 6]; 6] = [
    [0, -1, 0, 0, 1, 0],
    [1, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 0, 1],
    [0, 0, 0, 0, -1, 0],
    [0, 0, 0, 1, 0, 0],
    [0, 0, -1, 0, 0, 0],
];

const LAMBDA2: [[i64; 6]; 6] = [
    [0, -1, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 0],
    [0, 0, 2, 0, 0, -5],
    [1, 0, 0, 0, 1, 0],
    [0, 1, 0, -1, 0, 0],
    [0, 0, 1, 0, 0, -2],
];

const LAMBDA_MINUS2: [[i64; 6]; 6] = [
    [0, 1, 0, 1, 0, 0],
    [-1, 0, 0, 0, 1, 0],
    [0, 0, -2, 0, 0, 1],
    [0, 0, 0, 0, -1, 0],
    [0, 0, 0, 1, 0, 0],
    [0, 0, -5, 0, 0, 2],
];

/// The matrix of family `id` at `params`, without any integrability check.
///
/// `tag` selects the basis convention of the `magnin` family: on type 8 the
/// elliptic direction is `e3`, on type 7 it is `e2`.
pub fn template<T: Scalar>(id: FamilyId, params: &FamilyParams<T>, tag: BianchiTag) -> Result<Matrix6<T>> {
    if !params.fits(id) {
        return Err(Error::InvalidArgument(format!("parameters do not belong to family {id}")));
    }
    let z = T::zero;
    let one = T::one;
    let neg = |x: T| -x;
    let m = match params.clone() {
        FamilyParams::None => match id {
            FamilyId::AbelianStandard => Acs::standard().into_matrix(),
            FamilyId::Case6Theta1Lambda0a => constant(LAMBDA0A),
            FamilyId::Case6Theta1Lambda0b => constant(LAMBDA0B),
            FamilyId::Case6Theta1Lambda2 => constant(LAMBDA2),
            FamilyId::Case6Theta1LambdaMinus2 => constant(LAMBDA_MINUS2),
            _ => return Err(Error::InvalidArgument(format!("family {id} has no fixed template"))),
        },
        FamilyParams::AbelianGeneral { x, y, z: zz, a, b, c, lambda } => {
            let l = lambda;
            rows([
                [
                    x.clone(),
                    a.clone(),
                    z(),
                    neg(one() + x.clone() * x.clone() + a.clone() * y.clone()),
                    neg(a.clone() * x.clone() + a.clone() * b.clone()),
                    z(),
                ],
                [
                    y.clone(),
                    b.clone(),
                    z(),
                    neg(x.clone() * y.clone() + b.clone() * y.clone()),
                    neg(one() + b.clone() * b.clone() + a.clone() * y.clone()),
                    z(),
                ],
                [
                    zz.clone(),
                    c.clone(),
                    l.clone(),
                    neg(x.clone() * zz.clone() + y.clone() * c.clone() + zz.clone() * l.clone()),
                    neg(a.clone() * zz.clone() + b.clone() * c.clone() + c.clone() * l.clone()),
                    neg(one() + l.clone() * l.clone()),
                ],
                [one(), z(), z(), neg(x), neg(a), z()],
                [z(), one(), z(), neg(y), neg(b), z()],
                [z(), z(), one(), neg(zz), neg(c), neg(l)],
            ])
        }
        FamilyParams::AbelianRank1 { lambda } => rows([
            [z(), neg(one()), z(), z(), z(), z()],
            [one(), z(), z(), z(), z(), z()],
            [z(), z(), lambda.clone(), z(), z(), neg(one() + lambda.clone() * lambda.clone())],
            [z(), z(), z(), z(), neg(one()), z()],
            [z(), z(), z(), one(), z(), z()],
            [z(), z(), one(), z(), z(), neg(lambda)],
        ]),
        FamilyParams::Case2 { x, y, lambda, kappa, kappa_star, x_star, y_star } => {
            nonzero(&y, "Y")?;
            nonzero(&y_star, "Y*")?;
            let l = lambda;
            let one_x2 = one() + x.clone() * x.clone();
            let one_xs2 = one() + x_star.clone() * x_star.clone();
            let one_l2 = one() + l.clone() * l.clone();
            rows([
                [x.clone(), neg(one_x2.clone()) / y.clone(), z(), z(), z(), z()],
                [y.clone(), neg(x.clone()), z(), z(), z(), z()],
                [
                    kappa.clone() * (l.clone() - x.clone()),
                    kappa.clone() * one_x2 / y,
                    l.clone(),
                    neg(kappa_star.clone() * one_l2.clone()),
                    z(),
                    neg(one_l2),
                ],
                [z(), z(), z(), x_star.clone(), neg(one_xs2.clone()) / y_star.clone(), z()],
                [z(), z(), z(), y_star.clone(), neg(x_star.clone()), z()],
                [
                    kappa,
                    z(),
                    one(),
                    kappa_star.clone() * (neg(l.clone()) - x_star),
                    kappa_star * one_xs2 / y_star,
                    neg(l),
                ],
            ])
        }
        FamilyParams::Split { x, y, lambda, x_star, y_star } => {
            nonzero(&y, "Y")?;
            nonzero(&y_star, "Y*")?;
            if id == FamilyId::Case6Rank1 {
                // ad(e3) acts on span{e1,e2} as theta + rotation; J there must
                // commute with it, which pins the 2x2 blocks to +-rotation.
                let is_rotation =
                    |p: &T, q: &T| p.is_negligible(DEFAULT_EPS) && (q.clone() * q.clone() - one()).is_negligible(DEFAULT_EPS);
                if !is_rotation(&x, &y) || !is_rotation(&x_star, &y_star) {
                    return Err(Error::Constraint(
                        "case6-rank1 requires X = X* = 0 and Y, Y* in {1, -1}".to_string(),
                    ));
                }
            }
            split_template(x, y, lambda, x_star, y_star)
        }
        FamilyParams::Case3Full { x, y, z: zz, a, b, c } => {
            let s = x.clone() + b.clone();
            nonzero(&s, "X + B")?;
            let l = case3_full_lambda(&x, &y, &a, &b);
            rows([
                [
                    x.clone(),
                    a.clone(),
                    z(),
                    neg(one() + x.clone() * x.clone() + a.clone() * y.clone()),
                    neg(a.clone()),
                    z(),
                ],
                [
                    y.clone(),
                    b.clone(),
                    z(),
                    neg(y.clone() * s.clone()),
                    neg(one() + b.clone() * b.clone() + a.clone() * y.clone()) / s.clone(),
                    z(),
                ],
                [
                    zz.clone(),
                    c.clone(),
                    l.clone(),
                    neg(x.clone() * zz.clone() + c.clone() * y.clone() + zz.clone() * l.clone()),
                    neg(a.clone() * zz.clone() + b.clone() * c.clone() + c.clone() * l.clone()) / s.clone(),
                    neg(one() + l.clone() * l.clone()),
                ],
                [one(), z(), z(), neg(x), neg(a) / s.clone(), z()],
                [z(), s.clone(), z(), neg(y * s.clone()), neg(b), z()],
                [z(), z(), one(), neg(zz), neg(c) / s, neg(l)],
            ])
        }
        FamilyParams::Magnin { lambda, eta } => {
            nonzero(&eta, "eta")?;
            let corner = neg(one() + lambda.clone() * lambda.clone()) / eta.clone();
            let form = rows([
                [z(), neg(one()), z(), z(), z(), z()],
                [one(), z(), z(), z(), z(), z()],
                [z(), z(), lambda.clone(), z(), z(), eta],
                [z(), z(), z(), z(), neg(one()), z()],
                [z(), z(), z(), one(), z(), z()],
                [z(), z(), corner, z(), z(), neg(lambda)],
            ]);
            if tag.number() == 7 {
                // Conjugate by e2 <-> e3, e2* <-> e3*.
                let perm = [0, 2, 1, 3, 5, 4];
                Matrix6::from_fn(|r, c| form[(perm[r], perm[c])].clone())
            } else {
                form
            }
        }
    };
    Ok(m)
}

fn split_template<T: Scalar>(x: T, y: T, lambda: T, x_star: T, y_star: T) -> Matrix6<T> {
    let z = T::zero;
    let one = T::one;
    let xx = x.clone() * x.clone();
    let xsxs = x_star.clone() * x_star.clone();
    rows([
        [x.clone(), -(one() + xx) / y.clone(), z(), z(), z(), z()],
        [y, -x, z(), z(), z(), z()],
        [z(), z(), lambda.clone(), z(), z(), -(one() + lambda.clone() * lambda.clone())],
        [z(), z(), z(), x_star.clone(), -(one() + xsxs) / y_star.clone(), z()],
        [z(), z(), z(), y_star, -x_star, z()],
        [z(), z(), one(), z(), z(), -lambda],
    ])
}

/// Exact construction of a family member on `alg`, verified before return.
pub fn family(id: FamilyId, params: &FamilyParams<Rational>, alg: &LieAlgebra3<Rational>) -> Result<Acs<Rational>> {
    if !id.admits(alg) {
        return Err(Error::NotAdmissible { family: id.to_string(), algebra: alg.designator().to_string() });
    }
    let palg = ProductAlgebra::new(alg.clone());
    if id == FamilyId::Mixed {
        return mixed_structure(&palg).map(|m| m.acs);
    }
    let j = Acs::new(template(id, params, alg.tag())?);
    self_verify(&palg, &j, id)?;
    Ok(j)
}

fn self_verify<T: Scalar>(palg: &ProductAlgebra<T>, j: &Acs<T>, id: FamilyId) -> Result<()> {
    let alg = palg.base().designator();
    let square = is_acs(j);
    if !square.is_acs {
        return Err(Error::SelfVerification(format!(
            "{id} on {alg}: |J^2 + I| = {:e}",
            square.residual
        )));
    }
    let report = integrability_report(palg, j);
    if !report.integrable {
        let pairs: Vec<String> = report
            .failing_pairs(DEFAULT_EPS)
            .into_iter()
            .map(|(a, b)| format!("({},{})", crate::acs::BASIS_LABELS[a], crate::acs::BASIS_LABELS[b]))
            .collect();
        return Err(Error::SelfVerification(format!(
            "{id} on {alg}: Nijenhuis tensor nonzero on {}",
            pairs.join(" ")
        )));
    }
    Ok(())
}

/// A structure with `Ju = u*`, `Jv = w`, `Jv* = w*`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedStructure<T> {
    pub acs: Acs<T>,
    /// Basis indices `(u, v, w)` in `0..3`.
    pub uvw: (usize, usize, usize),
}

/// `(u, v, w)` candidates in the order they are tried.
const MIXED_CANDIDATES: [(usize, usize, usize); 6] = [(2, 0, 1), (1, 0, 2), (0, 1, 2), (2, 1, 0), (1, 2, 0), (0, 2, 1)];

pub fn mixed_matrix<T: Scalar>(u: usize, v: usize, w: usize) -> Matrix6<T> {
    let mut m = Matrix6::<T>::zero();
    let mut set = |col: usize, image: Vector6<T>| {
        for r in 0..6 {
            m[(r, col)] = image[r].clone();
        }
    };
    let e = Vector6::<T>::basis;
    set(u, e(u + 3));
    set(u + 3, -e(u));
    set(v, e(w));
    set(w, -e(v));
    set(v + 3, e(w + 3));
    set(w + 3, -e(v + 3));
    m
}

/// The mixed structure on `g x g`, verified integrable before return.
pub fn mixed_structure<T: Scalar>(palg: &ProductAlgebra<T>) -> Result<MixedStructure<T>> {
    let alg = palg.base();
    if !admits_integrable_structure(alg) {
        return Err(Error::NotAdmissible { family: FamilyId::Mixed.to_string(), algebra: alg.designator().to_string() });
    }
    for (u, v, w) in MIXED_CANDIDATES {
        let acs = Acs::new(mixed_matrix(u, v, w));
        if self_verify(palg, &acs, FamilyId::Mixed).is_ok() {
            return Ok(MixedStructure { acs, uvw: (u, v, w) });
        }
    }
    Err(Error::SelfVerification(format!(
        "no mixed structure found on {} in the standard basis",
        alg.designator()
    )))
}

fn draw(rng: &mut ChaCha8Rng, nonzero: bool) -> Rational {
    loop {
        let numer: i64 = rng.gen_range(-9..=9);
        if nonzero && numer == 0 {
            continue;
        }
        let denom: i64 = rng.gen_range(1..=9);
        return Rational::from_ratio(numer, denom);
    }
}

fn unit_sign(rng: &mut ChaCha8Rng) -> Rational {
    Rational::from_i64(if rng.gen_bool(0.5) { 1 } else { -1 })
}

/// `count` parameter bundles for `id`, deterministic per `seed`.
///
/// Numerators are drawn from `-9..=9` and denominators from `1..=9`;
/// parameters that must be non-zero are redrawn until they are.
pub fn sample_params(id: FamilyId, seed: u64, count: usize) -> Vec<FamilyParams<Rational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let params = match id {
            FamilyId::AbelianGeneral => FamilyParams::AbelianGeneral {
                x: draw(&mut rng, false),
                y: draw(&mut rng, false),
                z: draw(&mut rng, false),
                a: draw(&mut rng, false),
                b: draw(&mut rng, false),
                c: draw(&mut rng, false),
                lambda: draw(&mut rng, false),
            },
            FamilyId::AbelianRank1 => FamilyParams::AbelianRank1 { lambda: draw(&mut rng, false) },
            FamilyId::Case2 => FamilyParams::Case2 {
                x: draw(&mut rng, false),
                y: draw(&mut rng, true),
                lambda: draw(&mut rng, false),
                kappa: draw(&mut rng, false),
                kappa_star: draw(&mut rng, false),
                x_star: draw(&mut rng, false),
                y_star: draw(&mut rng, true),
            },
            FamilyId::Case3Split | FamilyId::Case4Split => FamilyParams::Split {
                x: draw(&mut rng, false),
                y: draw(&mut rng, true),
                lambda: draw(&mut rng, false),
                x_star: draw(&mut rng, false),
                y_star: draw(&mut rng, true),
            },
            FamilyId::Case6Rank1 => FamilyParams::Split {
                x: Rational::from_i64(0),
                y: unit_sign(&mut rng),
                lambda: draw(&mut rng, false),
                x_star: Rational::from_i64(0),
                y_star: unit_sign(&mut rng),
            },
            FamilyId::Case3Full => {
                let x = draw(&mut rng, false);
                let y = draw(&mut rng, false);
                let z = draw(&mut rng, false);
                let a = draw(&mut rng, false);
                let b = draw(&mut rng, false);
                let c = draw(&mut rng, false);
                if (x.clone() + b.clone()).is_zero() {
                    continue;
                }
                FamilyParams::Case3Full { x, y, z, a, b, c }
            }
            FamilyId::Magnin => FamilyParams::Magnin { lambda: draw(&mut rng, false), eta: draw(&mut rng, true) },
            _ => FamilyParams::None,
        };
        out.push(params);
    }
    out
}
