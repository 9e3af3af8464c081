//! Automorphisms of the 3-dimensional algebras: checking, sampling by
//! least-squares descent, and the invariant subspaces they must preserve.

use nalgebra::{SMatrix, SVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::LieAlgebra3;
use crate::linalg::{Matrix3, Vector3};
use crate::scalar::{Scalar, ScalarMode};

/// A linear map of the 3-dimensional algebra; column `c` is the image of `e_{c+1}`.
pub type LinMap3<T> = Matrix3<T>;

/// Residual bound for accepting a float map as an automorphism.
pub const ACCEPT_TOL: f64 = 1e-10;
/// Smallest `|det|` of an accepted float map.
pub const DET_FLOOR: f64 = 1e-6;
/// Tolerance of the orbit invariance checks.
pub const ORBIT_TOL: f64 = 1e-8;

const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AutomorphismCheck {
    pub is_automorphism: bool,
    /// Max over basis pairs of `|phi[b_i, b_j] - [phi b_i, phi b_j]|`.
    pub residual: f64,
    pub det: f64,
}

fn homomorphism_defect<T: Scalar>(alg: &LieAlgebra3<T>, phi: &LinMap3<T>) -> f64 {
    PAIRS
        .iter()
        .map(|&(i, j)| {
            let lhs = phi.mul_vec(&alg.bracket(&Vector3::basis(i), &Vector3::basis(j)));
            let rhs = alg.bracket(&phi.column(i), &phi.column(j));
            (lhs - rhs).norm_squared_f64().sqrt()
        })
        .fold(0.0, f64::max)
}

fn exact<T: Scalar>() -> bool {
    T::MODE == ScalarMode::Rational
}

fn is_homomorphism<T: Scalar>(alg: &LieAlgebra3<T>, phi: &LinMap3<T>) -> bool {
    PAIRS.iter().all(|&(i, j)| {
        phi.mul_vec(&alg.bracket(&Vector3::basis(i), &Vector3::basis(j)))
            == alg.bracket(&phi.column(i), &phi.column(j))
    })
}

/// Exact for rational maps; float maps need residual at most [`ACCEPT_TOL`]
/// and `|det|` at least [`DET_FLOOR`].
pub fn is_automorphism<T: Scalar>(alg: &LieAlgebra3<T>, phi: &LinMap3<T>) -> AutomorphismCheck {
    is_automorphism_with(alg, phi, ACCEPT_TOL)
}

pub fn is_automorphism_with<T: Scalar>(alg: &LieAlgebra3<T>, phi: &LinMap3<T>, tol: f64) -> AutomorphismCheck {
    let residual = homomorphism_defect(alg, phi);
    let det = phi.determinant();
    let ok = if exact::<T>() {
        residual == 0.0 && is_homomorphism(alg, phi) && !det.is_zero()
    } else {
        residual <= tol && det.to_f64().abs() >= DET_FLOOR
    };
    AutomorphismCheck { is_automorphism: ok, residual, det: det.to_f64() }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AutomorphismSample {
    #[serde(serialize_with = "ser_maps")]
    pub maps: Vec<LinMap3<f64>>,
    pub residuals: Vec<f64>,
    /// `requested - maps.len()`.
    pub shortfall: usize,
    pub attempts: usize,
}

fn ser_maps<S: serde::Serializer>(maps: &[LinMap3<f64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(maps.iter().map(|m| m.0))
}

fn ser_opt_map<S: serde::Serializer>(map: &Option<LinMap3<f64>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    map.as_ref().map(|m| m.0).serialize(s)
}

type Jac9 = SMatrix<f64, 9, 9>;
type Vec9 = SVector<f64, 9>;

fn stacked(c: &[[[f64; 3]; 3]; 3], phi: &[[f64; 3]; 3]) -> Vec9 {
    // c[i][j] = [e_i, e_j]
    let col = |k: usize| -> [f64; 3] { std::array::from_fn(|r| phi[r][k]) };
    let br = |u: &[f64; 3], v: &[f64; 3]| -> [f64; 3] {
        let mut out = [0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    out[k] += u[i] * v[j] * c[i][j][k];
                }
            }
        }
        out
    };
    let mut out = Vec9::zeros();
    for (p, &(i, j)) in PAIRS.iter().enumerate() {
        let rhs = br(&col(i), &col(j));
        for r in 0..3 {
            let lhs: f64 = (0..3).map(|k| phi[r][k] * c[i][j][k]).sum();
            out[3 * p + r] = lhs - rhs[r];
        }
    }
    out
}

fn jacobian(c: &[[[f64; 3]; 3]; 3], phi: &[[f64; 3]; 3]) -> Jac9 {
    let col = |k: usize| -> [f64; 3] { std::array::from_fn(|r| phi[r][k]) };
    let mut jac = Jac9::zeros();
    for (p, &(i, j)) in PAIRS.iter().enumerate() {
        let (pi, pj) = (col(i), col(j));
        for a in 0..3 {
            for b in 0..3 {
                // E = E_ab: E x = x_b e_a
                let mut d = [0.0; 3];
                d[a] += c[i][j][b];
                if b == i {
                    // - [e_a, phi e_j]
                    for (jj, pjj) in pj.iter().enumerate() {
                        for k in 0..3 {
                            d[k] -= pjj * c[a][jj][k];
                        }
                    }
                }
                if b == j {
                    // - [phi e_i, e_a]
                    for (ii, pii) in pi.iter().enumerate() {
                        for k in 0..3 {
                            d[k] -= pii * c[ii][a][k];
                        }
                    }
                }
                for k in 0..3 {
                    jac[(3 * p + k, 3 * a + b)] = d[k];
                }
            }
        }
    }
    jac
}

/// Damped Gauss-Newton from `start`; returns the final point.
fn descend(
    residual: impl Fn(&[[f64; 3]; 3]) -> Vec<f64>,
    jac: impl Fn(&[[f64; 3]; 3]) -> Vec<[f64; 9]>,
    start: [[f64; 3]; 3],
    max_iters: usize,
) -> [[f64; 3]; 3] {
    let mut x = start;
    let sq = |v: &[f64]| v.iter().map(|r| r * r).sum::<f64>();
    let mut r = residual(&x);
    let mut f = sq(&r);
    let mut mu = 1e-3;
    for _ in 0..max_iters {
        if f < 1e-30 {
            break;
        }
        let rows = jac(&x);
        let mut jtj = Jac9::zeros();
        let mut g = Vec9::zeros();
        for (row, rv) in rows.iter().zip(&r) {
            for a in 0..9 {
                g[a] += row[a] * rv;
                for b in 0..9 {
                    jtj[(a, b)] += row[a] * row[b];
                }
            }
        }
        let mut accepted = false;
        while mu < 1e12 {
            let mut m = jtj;
            for k in 0..9 {
                m[(k, k)] += mu;
            }
            let Some(chol) = m.cholesky() else {
                mu *= 10.0;
                continue;
            };
            let step = chol.solve(&(-g));
            let cand: [[f64; 3]; 3] = std::array::from_fn(|a| std::array::from_fn(|b| x[a][b] + step[3 * a + b]));
            let rc = residual(&cand);
            let fc = sq(&rc);
            if fc.is_finite() && fc < f {
                x = cand;
                r = rc;
                f = fc;
                mu = (mu / 10.0).max(1e-15);
                accepted = true;
                break;
            }
            mu *= 10.0;
        }
        if !accepted {
            break;
        }
    }
    x
}

fn dense(alg: &LieAlgebra3<f64>) -> [[[f64; 3]; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| alg.bracket(&Vector3::basis(i), &Vector3::basis(j)).0))
}

fn rows_of(j: &Jac9) -> Vec<[f64; 9]> {
    (0..9).map(|r| std::array::from_fn(|c| j[(r, c)])).collect()
}

fn random_start(rng: &mut ChaCha8Rng) -> [[f64; 3]; 3] {
    std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-2.0..=2.0)))
}

fn attempt_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Up to `n` float automorphisms, deterministic in `seed`. At most `20 n`
/// random starts are refined; the first `n` accepted in start order are kept.
pub fn sample_automorphisms(alg: &LieAlgebra3<f64>, n: usize, seed: u64) -> Result<AutomorphismSample> {
    if n == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    let c = dense(alg);
    let budget = 20 * n;
    let mut maps = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    let mut attempts = 0;
    // batches keep the work bounded when acceptance is high
    for batch in (0..budget).collect::<Vec<_>>().chunks(n.max(8)) {
        let found: Vec<Option<(LinMap3<f64>, f64)>> = batch
            .par_iter()
            .map(|&index| {
                let mut rng = attempt_rng(seed, index);
                let start = random_start(&mut rng);
                let x = descend(|p| stacked(&c, p).iter().copied().collect(), |p| rows_of(&jacobian(&c, p)), start, 200);
                let phi = crate::linalg::Matrix(x);
                let check = is_automorphism(alg, &phi);
                check.is_automorphism.then_some((phi, check.residual))
            })
            .collect();
        for hit in found {
            attempts += 1;
            if let Some((phi, res)) = hit {
                maps.push(phi);
                residuals.push(res);
                if maps.len() == n {
                    return Ok(AutomorphismSample { maps, residuals, shortfall: 0, attempts });
                }
            }
        }
    }
    Ok(AutomorphismSample { shortfall: n - maps.len(), maps, residuals, attempts })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimResult {
    pub claim: String,
    pub passed: bool,
    /// Largest relative deviation over the maps.
    pub worst: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitReport {
    pub tag: u8,
    pub maps: usize,
    /// Empty when the type carries no invariance claim.
    pub claims: Vec<ClaimResult>,
    pub passed: bool,
}

/// How far `phi e_col` is from `span{e_k : k in keep}`, relative to its length.
fn escape<T: Scalar>(phi: &LinMap3<T>, col: usize, keep: &[usize]) -> f64 {
    let v = phi.column(col).to_f64();
    let total = v.norm_squared_f64().sqrt();
    let outside: f64 = (0..3).filter(|k| !keep.contains(k)).map(|k| v[k] * v[k]).sum::<f64>().sqrt();
    if total == 0.0 {
        f64::INFINITY
    } else {
        outside / total
    }
}

/// Checks the invariant directions each type forces on its automorphisms.
///
/// Tag 2: `e1` and `e3` are eigendirections. Tag 3: `e3` is. Tags 4 and 6:
/// `span{e1, e2}` is invariant. Other types pass vacuously.
pub fn orbit_invariance_check<T: Scalar>(alg: &LieAlgebra3<T>, maps: &[LinMap3<T>], eps: f64) -> Result<OrbitReport> {
    for (i, phi) in maps.iter().enumerate() {
        let check = is_automorphism(alg, phi);
        if !check.is_automorphism {
            return Err(Error::InvalidArgument(format!(
                "map {i} is not an automorphism (residual {:e}, det {:e})",
                check.residual, check.det
            )));
        }
    }
    let tag = alg.tag().number();
    let specs: Vec<(&str, Vec<(usize, &[usize])>)> = match tag {
        2 => vec![("phi(e1) parallel to e1", vec![(0, &[0][..])]), ("phi(e3) parallel to e3", vec![(2, &[2][..])])],
        3 => vec![("phi(e3) parallel to e3", vec![(2, &[2][..])])],
        4 | 6 => vec![("phi(span{e1,e2}) in span{e1,e2}", vec![(0, &[0, 1][..]), (1, &[0, 1][..])])],
        _ => vec![],
    };
    let claims: Vec<ClaimResult> = specs
        .into_iter()
        .map(|(claim, parts)| {
            let worst = maps
                .iter()
                .flat_map(|phi| parts.iter().map(move |(col, keep)| escape(phi, *col, keep)))
                .fold(0.0, f64::max);
            let passed = if exact::<T>() { worst == 0.0 } else { worst <= eps };
            ClaimResult { claim: claim.to_string(), passed, worst }
        })
        .collect();
    Ok(OrbitReport { tag, maps: maps.len(), passed: claims.iter().all(|c| c.passed), claims })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessVerdict {
    Found,
    /// No map found; this says nothing about whether one exists.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitivityWitness {
    pub verdict: WitnessVerdict,
    pub source: usize,
    pub target: [f64; 3],
    #[serde(serialize_with = "ser_opt_map")]
    pub map: Option<LinMap3<f64>>,
    pub residual: f64,
}

/// Searches for an automorphism carrying `e_{source+1}` to `target`.
pub fn transitivity_witness(
    alg: &LieAlgebra3<f64>,
    source: usize,
    target: [f64; 3],
    attempts: usize,
    seed: u64,
) -> Result<TransitivityWitness> {
    if source > 2 {
        return Err(Error::InvalidArgument(format!("source index {source} out of range")));
    }
    if !target.iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let c = dense(alg);
    let residual = |p: &[[f64; 3]; 3]| -> Vec<f64> {
        let mut r: Vec<f64> = stacked(&c, p).iter().copied().collect();
        r.extend((0..3).map(|k| p[k][source] - target[k]));
        r
    };
    let jac = |p: &[[f64; 3]; 3]| -> Vec<[f64; 9]> {
        let mut rows = rows_of(&jacobian(&c, p));
        rows.extend((0..3).map(|k| {
            let mut row = [0.0; 9];
            row[3 * k + source] = 1.0;
            row
        }));
        rows
    };
    let best = (0..attempts.max(1))
        .into_par_iter()
        .map(|index| {
            let mut rng = attempt_rng(seed, index);
            let x = descend(&residual, &jac, random_start(&mut rng), 300);
            let phi = crate::linalg::Matrix(x);
            let miss = residual(&x).iter().map(|r| r * r).sum::<f64>().sqrt();
            let ok = is_automorphism(alg, &phi).is_automorphism && miss <= ACCEPT_TOL.sqrt();
            (index, ok, miss, phi)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .filter(|t| t.1)
        .min_by_key(|t| t.0);
    Ok(match best {
        Some((_, _, miss, phi)) => {
            TransitivityWitness { verdict: WitnessVerdict::Found, source, target, map: Some(phi), residual: miss }
        }
        None => TransitivityWitness {
            verdict: WitnessVerdict::Inconclusive,
            source,
            target,
            map: None,
            residual: f64::NAN,
        },
    })
}

/// Spectral condition number of a float map.
pub fn condition_number(phi: &LinMap3<f64>) -> f64 {
    let m = nalgebra::Matrix3::from_fn(|r, c| phi[(r, c)]);
    let s = m.singular_values();
    let min = s.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        s.max() / min
    }
}
