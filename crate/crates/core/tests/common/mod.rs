//! A small exact oracle, written against the bracket tables directly and
//! sharing no arithmetic with the library.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nij_core::acs::Acs;
use nij_core::linalg::Matrix6;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Brackets `[e_i, e_j]` of a 3-dimensional algebra, written out per type.
#[derive(Clone, Debug)]
pub struct Table {
    pub c: Vec<Vec<Vec<Q>>>,
}

impl Table {
    pub fn new(tag: u8, theta: Option<Q>) -> Table {
        let mut c = vec![vec![vec![Q::zero(); 3]; 3]; 3];
        let mut set = |i: usize, j: usize, v: [Q; 3]| {
            for k in 0..3 {
                c[i][j][k] = v[k].clone();
                c[j][i][k] = -v[k].clone();
            }
        };
        let t = theta.unwrap_or_else(Q::zero);
        let z = Q::zero;
        match tag {
            1 => {}
            2 => set(0, 1, [q(1), z(), z()]),
            3 => set(0, 1, [z(), z(), q(1)]),
            4 => {
                set(0, 2, [q(1), z(), z()]);
                set(1, 2, [z(), t, z()]);
            }
            5 => {
                set(0, 2, [q(1), z(), z()]);
                set(1, 2, [q(1), q(1), z()]);
            }
            6 => {
                set(0, 2, [t.clone(), q(-1), z()]);
                set(1, 2, [q(1), t, z()]);
            }
            7 => {
                set(0, 2, [z(), q(1), z()]);
                set(1, 2, [q(1), z(), z()]);
                set(0, 1, [z(), z(), q(1)]);
            }
            8 => {
                set(0, 2, [z(), q(-1), z()]);
                set(1, 2, [q(1), z(), z()]);
                set(0, 1, [z(), z(), q(1)]);
            }
            _ => panic!("no type {tag}"),
        }
        Table { c }
    }

    /// Bracket on `g x g`, componentwise.
    pub fn bracket6(&self, u: &[Q], v: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); 6];
        for off in [0, 3] {
            for i in 0..3 {
                if u[off + i].is_zero() {
                    continue;
                }
                for j in 0..3 {
                    if v[off + j].is_zero() {
                        continue;
                    }
                    let w = &u[off + i] * &v[off + j];
                    for k in 0..3 {
                        out[off + k] += &w * &self.c[i][j][k];
                    }
                }
            }
        }
        out
    }
}

pub type M = Vec<Vec<Q>>;

pub fn from_library(j: &Acs<nij_core::Rational>) -> M {
    let m = j.matrix();
    (0..6).map(|r| (0..6).map(|c| m[(r, c)].clone()).collect()).collect()
}

pub fn to_library(m: &M) -> Acs<nij_core::Rational> {
    Acs::new(Matrix6::from_fn(|r, c| m[r][c].clone()))
}

pub fn from_ints(rows: [[i64; 6]; 6]) -> M {
    rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
}

pub fn apply(m: &M, v: &[Q]) -> Vec<Q> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn add(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn basis(i: usize) -> Vec<Q> {
    (0..6).map(|k| if k == i { Q::one() } else { Q::zero() }).collect()
}

pub fn square_plus_identity_is_zero(m: &M) -> bool {
    (0..6).all(|r| {
        (0..6).all(|c| {
            let s: Q = (0..6).map(|k| &m[r][k] * &m[k][c]).sum();
            (s + if r == c { Q::one() } else { Q::zero() }).is_zero()
        })
    })
}

pub fn nijenhuis(t: &Table, m: &M, v: &[Q], w: &[Q]) -> Vec<Q> {
    let (jv, jw) = (apply(m, v), apply(m, w));
    let inner = add(&t.bracket6(&jv, w), &t.bracket6(v, &jw));
    sub(&add(&t.bracket6(v, w), &apply(m, &inner)), &t.bracket6(&jv, &jw))
}

/// Basis pairs with a nonzero Nijenhuis value.
pub fn failing_pairs(t: &Table, m: &M) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..6 {
        for b in a + 1..6 {
            if nijenhuis(t, m, &basis(a), &basis(b)).iter().any(|x| !x.is_zero()) {
                out.push((a, b));
            }
        }
    }
    out
}

pub fn is_integrable(t: &Table, m: &M) -> bool {
    square_plus_identity_is_zero(m) && failing_pairs(t, m).is_empty()
}

/// A random small rational.
pub fn small(rng: &mut ChaCha8Rng) -> Q {
    qr(rng.gen_range(-4..=4), rng.gen_range(1..=3))
}

pub fn random_vector(rng: &mut ChaCha8Rng) -> Vec<Q> {
    (0..6).map(|_| small(rng)).collect()
}

/// `P J0 P^{-1}` for a random invertible rational `P`, `J0` the standard
/// block structure.
///
/// Every other draw uses `P = [[A, A L], [0, D]]` with `L` upper triangular,
/// which makes the g-block `A L A^{-1}` and its eigenvalues rational.
pub fn random_structure(rng: &mut ChaCha8Rng) -> Acs<nij_core::Rational> {
    loop {
        let p = if rng.gen_bool(0.5) {
            Matrix6::from_fn(|_, _| small(rng))
        } else {
            let a: Vec<Vec<Q>> = (0..3).map(|_| (0..3).map(|_| small(rng)).collect()).collect();
            let l: Vec<Vec<Q>> =
                (0..3).map(|r| (0..3).map(|c| if c >= r { small(rng) } else { Q::zero() }).collect()).collect();
            let d: Vec<Vec<Q>> = (0..3).map(|_| (0..3).map(|_| small(rng)).collect()).collect();
            Matrix6::from_fn(|r, c| match (r < 3, c < 3) {
                (true, true) => a[r][c].clone(),
                (true, false) => (0..3).map(|k| &a[r][k] * &l[k][c - 3]).sum(),
                (false, true) => Q::zero(),
                (false, false) => d[r - 3][c - 3].clone(),
            })
        };
        if let Some(j) = Acs::standard().conjugate(&p) {
            return j;
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Oracle table for a designator string such as `6:3/2`.
pub fn table_for(designator: &str) -> Table {
    match designator.split_once(':') {
        Some((tag, theta)) => {
            let theta = match theta.split_once('/') {
                Some((n, d)) => qr(n.parse().unwrap(), d.parse().unwrap()),
                None => q(theta.parse().unwrap()),
            };
            Table::new(tag.parse().unwrap(), Some(theta))
        }
        None => Table::new(designator.parse().unwrap(), None),
    }
}
