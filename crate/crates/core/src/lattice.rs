//! Exact integer row reduction for relation lattices.
//!
//! Everything here is generic over the integer scalar so the same code runs
//! on machine integers and on arbitrary precision integers.

use std::fmt;

use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

/// Integer scalar usable for lattice reduction.
pub trait Scalar: Integer + Signed + Clone + FromPrimitive + ToPrimitive + fmt::Debug + fmt::Display {}

impl<T> Scalar for T where T: Integer + Signed + Clone + FromPrimitive + ToPrimitive + fmt::Debug + fmt::Display {}

/// Row-style Hermite normal form `basis = transform · input`.
///
/// `basis` holds only the nonzero rows, in echelon form with positive
/// pivots and entries above each pivot reduced into `[0, pivot)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermiteForm<T> {
    pub basis: Vec<Vec<T>>,
    pub pivots: Vec<usize>,
    /// One row per basis vector, giving it as a combination of input rows.
    pub transform: Vec<Vec<T>>,
}

fn axpy<T: Scalar>(a: &T, x: &[T], b: &T, y: &[T]) -> Vec<T> {
    x.iter()
        .zip(y)
        .map(|(xi, yi)| a.clone() * xi.clone() + b.clone() * yi.clone())
        .collect()
}

fn sub_scaled<T: Scalar>(target: &mut [T], factor: &T, row: &[T]) {
    for (t, r) in target.iter_mut().zip(row) {
        *t = t.clone() - factor.clone() * r.clone();
    }
}

/// Hermite normal form of the lattice spanned by `rows` (each of length `dim`).
pub fn hermite_normal_form<T: Scalar>(rows: &[Vec<T>], dim: usize) -> HermiteForm<T> {
    let m = rows.len();
    let mut a: Vec<Vec<T>> = rows.to_vec();
    let mut u: Vec<Vec<T>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..dim {
        if row == m {
            break;
        }
        for i in row + 1..m {
            if a[i][col].is_zero() {
                continue;
            }
            if a[row][col].is_zero() {
                a.swap(row, i);
                u.swap(row, i);
                continue;
            }
            let e = a[row][col].extended_gcd(&a[i][col]);
            let p = a[row][col].clone() / e.gcd.clone();
            let q = a[i][col].clone() / e.gcd.clone();
            // [[x, y], [-q, p]] has determinant x p + y q = 1
            let new_top = axpy(&e.x, &a[row], &e.y, &a[i]);
            let new_low = axpy(&-q.clone(), &a[row], &p, &a[i]);
            let new_utop = axpy(&e.x, &u[row], &e.y, &u[i]);
            let new_ulow = axpy(&-q, &u[row], &p, &u[i]);
            a[row] = new_top;
            a[i] = new_low;
            u[row] = new_utop;
            u[i] = new_ulow;
        }
        if a[row][col].is_zero() {
            continue;
        }
        if a[row][col].is_negative() {
            for v in a[row].iter_mut().chain(u[row].iter_mut()) {
                *v = -v.clone();
            }
        }
        let pivot = a[row][col].clone();
        for i in 0..row {
            let f = a[i][col].div_floor(&pivot);
            if !f.is_zero() {
                let (pr, ur) = (a[row].clone(), u[row].clone());
                sub_scaled(&mut a[i], &f, &pr);
                sub_scaled(&mut u[i], &f, &ur);
            }
        }
        pivots.push(col);
        row += 1;
    }
    a.truncate(row);
    u.truncate(row);
    HermiteForm {
        basis: a,
        pivots,
        transform: u,
    }
}

/// Coefficients expressing `v` in an echelon basis, or `None` if `v` is not
/// in the lattice.
pub fn echelon_coordinates<T: Scalar>(basis: &[Vec<T>], pivots: &[usize], v: &[T]) -> Option<Vec<T>> {
    let mut rest = v.to_vec();
    let mut coeffs = Vec::with_capacity(basis.len());
    for (row, &col) in basis.iter().zip(pivots) {
        let (c, r) = rest[col].div_rem(&row[col]);
        if !r.is_zero() {
            return None;
        }
        sub_scaled(&mut rest, &c, row);
        coeffs.push(c);
    }
    if rest.iter().all(Zero::is_zero) {
        Some(coeffs)
    } else {
        None
    }
}

/// Nonzero Smith invariants `d_1 | d_2 | …` of the row lattice of `rows`.
/// The quotient `Z^dim / L` is `Z^{dim - len} ⊕ ⨁ Z/d_i`.
pub fn smith_invariants<T: Scalar>(rows: &[Vec<T>], dim: usize) -> Vec<T> {
    let mut a: Vec<Vec<T>> = rows.to_vec();
    let m = a.len();
    let mut out = Vec::new();
    for t in 0..m.min(dim) {
        loop {
            // smallest nonzero entry of the trailing block goes to (t, t)
            let best = (t..m)
                .flat_map(|i| (t..dim).map(move |j| (i, j)))
                .filter(|&(i, j)| !a[i][j].is_zero())
                .min_by(|&(i, j), &(k, l)| a[i][j].abs().cmp(&a[k][l].abs()));
            let Some((i, j)) = best else {
                return finish_invariants(out);
            };
            a.swap(t, i);
            for r in a.iter_mut() {
                r.swap(t, j);
            }
            let pivot = a[t][t].clone();
            let mut clean = true;
            for i in t + 1..m {
                let f = a[i][t].div_floor(&pivot);
                let pr = a[t].clone();
                sub_scaled(&mut a[i], &f, &pr);
                clean &= a[i][t].is_zero();
            }
            for j in t + 1..dim {
                let f = a[t][j].div_floor(&pivot);
                for r in a.iter_mut() {
                    let v = r[t].clone();
                    r[j] = r[j].clone() - f.clone() * v;
                }
                clean &= a[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            // pivot must divide the whole trailing block
            let bad = (t + 1..m).find(|&i| (t + 1..dim).any(|j| !a[i][j].is_multiple_of(&pivot)));
            match bad {
                Some(i) => {
                    let bad_row = a[i].clone();
                    for (x, y) in a[t].iter_mut().zip(bad_row) {
                        *x = x.clone() + y;
                    }
                }
                None => {
                    out.push(pivot.abs());
                    break;
                }
            }
        }
    }
    finish_invariants(out)
}

fn finish_invariants<T: Scalar>(mut out: Vec<T>) -> Vec<T> {
    out.sort();
    out
}
