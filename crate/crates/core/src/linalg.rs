//! Dense symmetric helpers: sorted eigendecomposition, the diagonalizing
//! rotation closest to the identity, and the symmetric-definite pencil solve.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative gap below which two eigenvalues are treated as equal when
/// choosing a diagonalizing rotation.
pub const EIGEN_TIE_TOLERANCE: f64 = 1e-9;

/// Eigenvalues in ascending order with matching eigenvector columns.
pub fn sorted_symmetric_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Proper rotation `R` such that `R m Rᵀ` is diagonal, chosen closest to the
/// identity in Frobenius norm.
///
/// Eigenvalues within [`EIGEN_TIE_TOLERANCE`] (relative) form one cluster;
/// inside a cluster any orthonormal basis diagonalizes `m`, and the basis
/// nearest to the assigned coordinate axes is taken (orthogonal Procrustes).
/// Cluster-to-axis assignments are enumerated, so this is meant for the small
/// dimensions used here.
pub fn closest_diagonalizing_rotation(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let (values, vectors) = sorted_symmetric_eigen(m);
    let scale = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(f64::MIN_POSITIVE);

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        match clusters.last_mut() {
            Some(c) if (values[i] - values[*c.last().unwrap()]).abs() <= EIGEN_TIE_TOLERANCE * scale => c.push(i),
            _ => clusters.push(vec![i]),
        }
    }

    let mut best: Option<(f64, DMatrix<f64>)> = None;
    for perm in permutations(n) {
        // perm[slot] = axis; slots are filled cluster by cluster.
        let mut basis = DMatrix::zeros(n, n);
        let mut slot = 0;
        for cluster in &clusters {
            let axes: Vec<usize> = perm[slot..slot + cluster.len()].to_vec();
            slot += cluster.len();
            let u = DMatrix::from_fn(n, cluster.len(), |r, c| vectors[(r, cluster[c])]);
            let mut target = DMatrix::zeros(n, cluster.len());
            for (c, &axis) in axes.iter().enumerate() {
                target[(axis, c)] = 1.0;
            }
            let cross = u.transpose() * &target;
            let svd = cross.svd(true, true);
            let q = svd.u.unwrap() * svd.v_t.unwrap();
            let w = u * q;
            for (c, &axis) in axes.iter().enumerate() {
                basis.set_column(axis, &w.column(c));
            }
        }
        if basis.determinant() < 0.0 {
            // Flip the axis contributing least to the trace.
            let k = (0..n).min_by(|&a, &b| basis[(a, a)].total_cmp(&basis[(b, b)])).unwrap();
            let col = -basis.column(k);
            basis.set_column(k, &col);
        }
        let trace = basis.trace();
        if best.as_ref().map_or(true, |(t, _)| trace > *t + 1e-14) {
            best = Some((trace, basis));
        }
    }
    // Columns of `basis` are the new axes in old coordinates: y = basisᵀ x.
    best.expect("at least one permutation").1.transpose()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

/// Roots of `det(A - p B) = 0` for symmetric `A` and symmetric positive
/// definite `B`, ascending, via `B = L Lᵀ` and the eigenvalues of
/// `L⁻¹ A L⁻ᵀ`.
pub fn generalized_symmetric_eigenvalues(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = a.nrows();
    let chol = b.clone().cholesky().ok_or_else(|| Error::IllConditioned {
        what: "boundary Gram matrix".into(),
        condition: condition_estimate(b),
    })?;
    let l = chol.l();
    // C = L⁻¹ A L⁻ᵀ
    let la = l.solve_lower_triangular(a).expect("Cholesky factor is nonsingular");
    let c = l.solve_lower_triangular(&la.transpose()).expect("Cholesky factor is nonsingular");
    let (values, _) = sorted_symmetric_eigen(&c);
    debug_assert_eq!(values.len(), n);
    Ok(values.iter().copied().collect())
}

/// Ratio of extreme eigenvalue magnitudes of a symmetric matrix.
pub fn condition_estimate(m: &DMatrix<f64>) -> f64 {
    let (values, _) = sorted_symmetric_eigen(m);
    let max = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let min = values.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}
