//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the library's linear algebra.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use cerfmorse::algebra::{parse_rational, Pid, Z2};
use cerfmorse::bifurcation::FlowCounter;
use cerfmorse::cerf::{ArcId, CerfTuple};
use cerfmorse::scenario::{parse_scenario, ScenarioFile};
use cerfmorse::Rational;
use num_traits::Zero;

pub fn q(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.scn"))
}

pub fn load(name: &str) -> ScenarioFile {
    parse_scenario(&scenario_path(name)).unwrap()
}

/// Dense ∂ with `d[row][col]`, column `j` being ∂ of basis element `j`,
/// read straight from the γ entries.
pub fn dense_boundary<R: Pid>(fc: &FlowCounter<R>) -> Vec<Vec<R>> {
    let n = fc.len();
    let pos = |c: &ArcId| fc.basis().iter().position(|b| b == c).unwrap();
    let mut d = vec![vec![R::zero(); n]; n];
    for (a, b, v) in fc.entries() {
        d[pos(&b)][pos(&a)] = v;
    }
    d
}

pub fn dense_mul<R: Pid>(a: &[Vec<R>], b: &[Vec<R>]) -> Vec<Vec<R>> {
    let n = a.len();
    let m = if b.is_empty() { 0 } else { b[0].len() };
    let mut out = vec![vec![R::zero(); m]; n];
    for i in 0..n {
        for k in 0..b.len() {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] = out[i][j].clone() + a[i][k].clone() * b[k][j].clone();
            }
        }
    }
    out
}

pub fn squares_to_zero<R: Pid>(fc: &FlowCounter<R>) -> bool {
    let d = dense_boundary(fc);
    dense_mul(&d, &d).iter().all(|row| row.iter().all(|x| x.is_zero()))
}

/// γ1 on the open interval `(lo, hi)`: every nonzero γ(a, b) has
/// F3(a) > F3(b) strictly inside, checked at every breakpoint and between
/// consecutive ones.
pub fn gamma1_holds<R: Pid>(fc: &FlowCounter<R>, t: &CerfTuple, lo: &Rational, hi: &Rational) -> bool {
    fc.entries().iter().all(|(a, b, _)| {
        let (pa, pb) = (&t.arc(a).unwrap().profile, &t.arc(b).unwrap().profile);
        let mut grid: Vec<Rational> = vec![lo.clone(), hi.clone()];
        grid.extend(pa.points().iter().chain(pb.points()).map(|(r, _)| r.clone()).filter(|r| r > lo && r < hi));
        grid.sort();
        grid.dedup();
        let two = Rational::from_integer(2.into());
        let mut probes: Vec<Rational> = grid.windows(2).map(|w| (&w[0] + &w[1]) / &two).collect();
        probes.extend(grid[1..grid.len() - 1].iter().cloned());
        probes.iter().all(|r| match (pa.eval(r), pb.eval(r)) {
            (Some(x), Some(y)) => x > y,
            _ => false,
        })
    })
}

/// Bitmask form of a Z2 boundary: `cols[j]` has bit `i` set when
/// `∂e_j` contains `e_i`.
pub fn z2_columns(fc: &FlowCounter<Z2>) -> Vec<u32> {
    let d = dense_boundary(fc);
    let n = d.len();
    (0..n).map(|j| (0..n).filter(|&i| d[i][j].bit()).fold(0u32, |m, i| m | (1 << i))).collect()
}

pub fn apply_z2(cols: &[u32], x: u32) -> u32 {
    cols.iter().enumerate().filter(|(j, _)| x >> j & 1 == 1).fold(0, |acc, (_, c)| acc ^ c)
}

/// (dim ker, dim im) by enumerating every vector.
pub fn z2_kernel_image(cols: &[u32]) -> (usize, usize) {
    let n = cols.len();
    let mut kernel = 0usize;
    let mut image = BTreeSet::new();
    for x in 0..(1u32 << n) {
        let y = apply_z2(cols, x);
        if y == 0 {
            kernel += 1;
        }
        image.insert(y);
    }
    (kernel.trailing_zeros() as usize, image.len().trailing_zeros() as usize)
}

pub fn z2_homology_rank(cols: &[u32]) -> usize {
    let (k, i) = z2_kernel_image(cols);
    k - i
}

/// Every cycle, in enumeration order.
pub fn z2_cycles(cols: &[u32]) -> Vec<u32> {
    (1..(1u32 << cols.len())).filter(|&x| apply_z2(cols, x) == 0).collect()
}

/// min over the coset `α + im ∂` of the largest action in the support;
/// `None` when α is a boundary.
pub fn z2_spectral_value(cols: &[u32], heights: &[Rational], alpha: u32) -> Option<Rational> {
    let mut best: Option<Rational> = None;
    for y in 0..(1u32 << cols.len()) {
        let v = alpha ^ apply_z2(cols, y);
        if v == 0 {
            return None;
        }
        let top = (0..cols.len()).filter(|&i| v >> i & 1 == 1).map(|i| heights[i].clone()).max().unwrap();
        if best.as_ref().is_none_or(|b| &top < b) {
            best = Some(top);
        }
    }
    best
}

pub fn z2_vector(mask: u32, n: usize) -> Vec<Z2> {
    (0..n).map(|i| Z2::new(mask >> i & 1 == 1)).collect()
}

/// Rank of a dense rational matrix by fraction-exact elimination.
pub fn rank_q(m: &[Vec<Rational>]) -> usize {
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, p);
        let pivot = a[rank][c].clone();
        for r in 0..rows {
            if r != rank && !a[r][c].is_zero() {
                let f = &a[r][c] / &pivot;
                for k in c..cols {
                    let sub = &f * &a[rank][k];
                    a[r][k] = &a[r][k] - sub;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn identity<R: Pid>(n: usize) -> Vec<Vec<R>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { R::one() } else { R::zero() }).collect()).collect()
}

pub fn dense_eq<R: Pid>(a: &[Vec<R>], b: &[Vec<R>]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x == y)
}

pub fn dense_add<R: Pid>(a: &[Vec<R>], b: &[Vec<R>]) -> Vec<Vec<R>> {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(u, v)| u.clone() + v.clone()).collect()).collect()
}

pub fn dense_sub<R: Pid>(a: &[Vec<R>], b: &[Vec<R>]) -> Vec<Vec<R>> {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(u, v)| u.clone() - v.clone()).collect()).collect()
}

pub fn one<R: Pid>() -> R {
    R::one()
}
