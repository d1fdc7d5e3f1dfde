//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, Matrix4, SymmetricEigen};

/// Determinant of a square matrix given as rows.
pub fn det(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    match n {
        0 => 1.0,
        1 => rows[0][0],
        2 => rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0],
        3 => det3([
            [rows[0][0], rows[0][1], rows[0][2]],
            [rows[1][0], rows[1][1], rows[1][2]],
            [rows[2][0], rows[2][1], rows[2][2]],
        ]),
        _ => DMatrix::from_fn(n, n, |i, j| rows[i][j]).determinant(),
    }
}

pub fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn det4(m: [[f64; 4]; 4]) -> f64 {
    Matrix4::from_fn(|i, j| m[i][j]).determinant()
}

/// Signed volume of four vectors of ℝ⁴ (the vectors are the columns).
pub fn oriented_volume(v: [[f64; 4]; 4]) -> f64 {
    Matrix4::from_fn(|i, j| v[j][i]).determinant()
}

/// Eigenvalues in descending order together with the matching eigenvectors (columns).
pub fn sym_eigen_desc(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

pub fn sym_eigenvalues_desc(m: DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_determinants_agree_with_lu() {
        let rows = vec![
            vec![2.0, 0.3, -0.1, 0.4],
            vec![0.3, 1.5, 0.2, 0.0],
            vec![-0.1, 0.2, 1.0, 0.7],
            vec![0.4, 0.0, 0.7, 3.0],
        ];
        let lu = DMatrix::from_fn(4, 4, |i, j| rows[i][j]).determinant();
        assert!((det(&rows) - lu).abs() < 1e-12);
        let sub: Vec<Vec<f64>> = rows[..3].iter().map(|r| r[..3].to_vec()).collect();
        let lu3 = DMatrix::from_fn(3, 3, |i, j| sub[i][j]).determinant();
        assert!((det(&sub) - lu3).abs() < 1e-12);
    }

    #[test]
    fn eigen_sorted_descending() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 2.0]);
        let (vals, vecs) = sym_eigen_desc(m);
        assert_eq!(vals, vec![3.0, 2.0, 1.0]);
        assert!((vecs[(1, 0)].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oriented_volume_of_standard_basis() {
        let e = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        assert_eq!(oriented_volume(e), 1.0);
        let swapped = [e[1], e[0], e[2], e[3]];
        assert_eq!(oriented_volume(swapped), -1.0);
    }
}
