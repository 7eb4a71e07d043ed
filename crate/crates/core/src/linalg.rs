//! Rank decisions, null spaces and orthonormalization on small dense real matrices.

use nalgebra::DMatrix;

/// Singular values below this fraction of the largest one count as zero.
pub const RANK_REL_TOL: f64 = 1e-8;

fn to_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let ncols = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(rows.len(), ncols, |r, c| rows[r][c])
}

/// Singular values of the matrix whose rows are `rows`, in decreasing order.
pub fn singular_values(rows: &[Vec<f64>]) -> Vec<f64> {
    if rows.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = to_matrix(rows).singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Numerical rank with the relative threshold [`RANK_REL_TOL`].
pub fn rank(rows: &[Vec<f64>]) -> usize {
    let sv = singular_values(rows);
    let Some(&top) = sv.first() else { return 0 };
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > RANK_REL_TOL * top).count()
}

/// Orthonormal basis of `{ x : A x = 0 }` where `A` has rows `rows` of length `ncols`.
pub fn null_space(rows: &[Vec<f64>], ncols: usize) -> Vec<Vec<f64>> {
    // Pad to square so the SVD returns a full right factor.
    let n = ncols.max(rows.len());
    let a = DMatrix::from_fn(n, ncols, |r, c| rows.get(r).map_or(0.0, |row| row[c]));
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let top = svd.singular_values.max();
    (0..svd.singular_values.len())
        .filter(|&k| top == 0.0 || svd.singular_values[k] <= RANK_REL_TOL * top)
        .map(|k| vt.row(k).iter().copied().collect())
        .collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Orthonormalizes `candidates` against `basis` and each other, appending survivors to `basis`.
///
/// A candidate survives if its residual norm exceeds `tol` times its original norm.
/// Two passes of modified Gram-Schmidt are applied to every candidate.
pub fn extend_orthonormal(basis: &mut Vec<Vec<f64>>, candidates: &[Vec<f64>], tol: f64) {
    for c in candidates {
        let scale = norm(c);
        if scale == 0.0 {
            continue;
        }
        let mut v = c.clone();
        for _ in 0..2 {
            for b in basis.iter() {
                let p = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
            }
        }
        let n = norm(&v);
        if n > tol * scale {
            v.iter_mut().for_each(|x| *x /= n);
            basis.push(v);
        }
    }
}

/// Gram matrix `G_ab = <v_a, v_b>` with a caller-supplied inner product.
pub fn gram<T>(vs: &[T], inner: impl Fn(&T, &T) -> f64) -> Vec<Vec<f64>> {
    vs.iter()
        .map(|a| vs.iter().map(|b| inner(a, b)).collect())
        .collect()
}

/// Largest entry of `|G − I|`.
pub fn identity_defect(g: &[Vec<f64>]) -> f64 {
    g.iter()
        .enumerate()
        .flat_map(|(a, row)| {
            row.iter()
                .enumerate()
                .map(move |(b, v)| (v - f64::from(u8::from(a == b))).abs())
        })
        .fold(0.0, f64::max)
}

/// Solves the symmetric positive definite system `G x = rhs`.
pub fn solve_spd(g: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    let m = DMatrix::from_fn(n, n, |r, c| g[r][c]);
    let chol = m.cholesky()?;
    let x = chol.solve(&nalgebra::DVector::from_column_slice(rhs));
    Some(x.iter().copied().collect())
}

/// Frobenius norm of `A − B` for equally-shaped matrices.
pub fn frobenius_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(r, s)| r.iter().zip(s).map(|(x, y)| (x - y) * (x - y)))
        .sum::<f64>()
        .sqrt()
}
