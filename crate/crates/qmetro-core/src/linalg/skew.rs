//! Canonical block form of real antisymmetric matrices.
//!
//! A real antisymmetric `M` is orthogonally similar to a direct sum of
//! `[[0, beta], [-beta, 0]]` blocks followed by zeros. The orthogonal `P`
//! with `P M P^T` in that layout is recovered from the eigendecomposition of
//! the Hermitian matrix `i M`: each conjugate eigenvalue pair `+-beta`
//! contributes one real invariant plane.

use alloc::vec::Vec;

#[allow(unused_imports)] // f64 float methods come from the trait in no_std builds
use num_traits::Float as _;

use super::{eigen::hermitian_eigen, CMatrix, RMatrix, C64};
use crate::error::{Error, Result};
use crate::tol;

/// Canonical form `P M P^T = blockdiag([[0, b_1], [-b_1, 0]], ..., 0)`.
#[derive(Debug, Clone)]
pub struct BlockForm {
    /// Real orthogonal transform, applied as `P M P^T`.
    pub p: RMatrix,
    /// Block values, nonnegative, sorted descending.
    pub betas: Vec<f64>,
    /// Number of trailing zero rows (kernel dimension).
    pub zeros: usize,
    /// Matrix dimension; `2 * betas.len() + zeros == n`.
    pub n: usize,
}

impl BlockForm {
    /// The canonical matrix this form describes.
    pub fn canonical_matrix(&self) -> RMatrix {
        let mut m = RMatrix::zeros(self.n, self.n);
        for (j, &beta) in self.betas.iter().enumerate() {
            m[(2 * j, 2 * j + 1)] = beta;
            m[(2 * j + 1, 2 * j)] = -beta;
        }
        m
    }

    /// Eigenvalue magnitudes of the underlying matrix with multiplicity:
    /// each block contributes `beta` twice, the kernel contributes zeros.
    pub fn lambda_magnitudes(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n);
        for &beta in &self.betas {
            out.push(beta);
            out.push(beta);
        }
        out.resize(self.n, 0.0);
        out
    }

    /// Number of blocks with `beta` within `snap` of 1.
    pub fn degenerate_blocks(&self, snap: f64) -> usize {
        self.betas.iter().filter(|&&b| b > 1.0 - snap).count()
    }
}

/// Block-diagonalize a real antisymmetric matrix.
pub fn skew_block_diagonalize(m: &RMatrix) -> Result<BlockForm> {
    if m.rows() != m.cols() {
        return Err(Error::NotSquare(m.rows(), m.cols()));
    }
    let n = m.rows();
    let defect = m.antisymmetry_defect();
    if defect > 1e-10 {
        return Err(Error::NotAntisymmetric(defect));
    }
    // Work with the exactly antisymmetric part.
    let anti = m.sub(&m.transpose()).scale(0.5);
    let scale = anti.max_abs();

    if n == 0 {
        return Ok(BlockForm {
            p: RMatrix::zeros(0, 0),
            betas: Vec::new(),
            zeros: 0,
            n,
        });
    }

    // Hermitian lift: H = i * anti.
    let mut h = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] = C64::new(0.0, anti[(i, j)]);
        }
    }
    let (values, vectors) = hermitian_eigen(&h)?;

    let zero_tol = 1e-11 * (1.0 + scale);
    let cluster_tol = 1e-8 * (1.0 + scale);

    // Positive eigenvalues, descending, grouped into near-degenerate clusters.
    let mut positive: Vec<(f64, usize)> = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > zero_tol)
        .map(|(i, &v)| (v, i))
        .collect();
    positive.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite eigenvalues"));

    let mut pairs: Vec<(f64, Vec<f64>, Vec<f64>)> = Vec::new(); // (beta, row_w, row_u)
    let mut idx = 0;
    while idx < positive.len() {
        let head = positive[idx].0;
        let mut cluster = Vec::new();
        while idx < positive.len() && (head - positive[idx].0).abs() <= cluster_tol {
            cluster.push(positive[idx]);
            idx += 1;
        }
        extract_cluster_pairs(&anti, &vectors, &cluster, &mut pairs)?;
    }

    // Descending beta; ties broken by the index of the largest-magnitude
    // component of the pair's leading row, ascending.
    pairs.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .expect("finite betas")
            .then_with(|| argmax_abs(&a.1).cmp(&argmax_abs(&b.1)))
    });

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut betas = Vec::with_capacity(pairs.len());
    for (beta, w, u) in pairs {
        betas.push(beta);
        rows.push(w);
        rows.push(u);
    }
    complete_real_rows(&mut rows, n)?;
    let zeros = n - 2 * betas.len();

    let mut p = RMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for j in 0..n {
            p[(i, j)] = row[j];
        }
    }

    let form = BlockForm { p, betas, zeros, n };
    let ortho = form.p.orthogonality_defect();
    if ortho > tol::ORTHONORMAL {
        return Err(Error::NumericalInconsistency(alloc::format!(
            "block transform not orthogonal (defect {ortho:.3e})"
        )));
    }
    let residual = form
        .p
        .mul(&anti)
        .mul(&form.p.transpose())
        .max_abs_diff(&form.canonical_matrix());
    if residual > tol::CANONICAL_RESIDUAL * (1.0 + scale) {
        return Err(Error::NumericalInconsistency(alloc::format!(
            "canonical block residual {residual:.3e}"
        )));
    }
    Ok(form)
}

/// Pull one real invariant plane per eigenvalue out of a near-degenerate
/// cluster. For an eigenvector `z = x + i y` of `i M` with eigenvalue `beta`,
/// the plane `span{x, y}` is `M`-invariant; taking a unit `u` in it and
/// `w = M u / beta` gives rows `(w, u)` with `w^T M u = beta`.
fn extract_cluster_pairs(
    m: &RMatrix,
    vectors: &CMatrix,
    cluster: &[(f64, usize)],
    pairs: &mut Vec<(f64, Vec<f64>, Vec<f64>)>,
) -> Result<()> {
    let n = m.rows();
    let beta_ref = cluster[0].0;
    let mut accepted: Vec<Vec<f64>> = Vec::with_capacity(2 * cluster.len());
    let mut found = 0;

    let mut candidates: Vec<Vec<f64>> = Vec::with_capacity(2 * cluster.len());
    for &(_, col) in cluster {
        let z = vectors.column(col);
        candidates.push((0..n).map(|i| z[i].re).collect());
        candidates.push((0..n).map(|i| z[i].im).collect());
    }

    for cand in candidates {
        if found == cluster.len() {
            break;
        }
        let mut u = cand;
        project_out(&mut u, &accepted);
        project_out(&mut u, &accepted);
        let norm = vec_norm(&u);
        if norm < 1e-6 {
            continue;
        }
        for x in &mut u {
            *x /= norm;
        }
        let mut w = m.mul_vec(&u);
        for x in &mut w {
            *x /= beta_ref;
        }
        project_out(&mut w, &accepted);
        let wu: f64 = w.iter().zip(&u).map(|(a, b)| a * b).sum();
        for (x, y) in w.iter_mut().zip(&u) {
            *x -= wu * y;
        }
        let wn = vec_norm(&w);
        if wn < 1e-6 {
            return Err(Error::NumericalInconsistency(
                "degenerate invariant plane collapsed".into(),
            ));
        }
        for x in &mut w {
            *x /= wn;
        }
        let beta = dot(&w, &m.mul_vec(&u));
        accepted.push(w.clone());
        accepted.push(u.clone());
        pairs.push((beta, w, u));
        found += 1;
    }

    if found != cluster.len() {
        return Err(Error::NumericalInconsistency(alloc::format!(
            "cluster of {} eigenvalues yielded {} planes",
            cluster.len(),
            found
        )));
    }
    Ok(())
}

fn project_out(v: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let overlap = dot(b, v);
        for (x, y) in v.iter_mut().zip(b) {
            *x -= overlap * y;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn vec_norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn argmax_abs(v: &[f64]) -> usize {
    let mut best = 0;
    let mut best_val = 0.0;
    for (i, &x) in v.iter().enumerate() {
        if x.abs() > best_val {
            best_val = x.abs();
            best = i;
        }
    }
    best
}

/// Greedy standard-basis completion of a real orthonormal row set.
fn complete_real_rows(rows: &mut Vec<Vec<f64>>, n: usize) -> Result<()> {
    while rows.len() < n {
        let mut best: Option<(f64, usize)> = None;
        for k in 0..n {
            let mut w = alloc::vec![0.0; n];
            w[k] = 1.0;
            project_out(&mut w, rows);
            let r = vec_norm(&w);
            if best.is_none_or(|(br, _)| r > br + 1e-15) {
                best = Some((r, k));
            }
        }
        let (_, k) = best.expect("n > 0");
        let mut w = alloc::vec![0.0; n];
        w[k] = 1.0;
        project_out(&mut w, rows);
        project_out(&mut w, rows);
        let norm = vec_norm(&w);
        if norm < 1e-8 {
            return Err(Error::NumericalInconsistency(
                "kernel completion stalled".into(),
            ));
        }
        for x in &mut w {
            *x /= norm;
        }
        rows.push(w);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn random_antisymmetric(rng: &mut Rng, n: usize) -> RMatrix {
        let mut m = RMatrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let x = rng.standard_normal();
                m[(i, j)] = x;
                m[(j, i)] = -x;
            }
        }
        m
    }

    #[test]
    fn already_canonical_two_by_two() {
        let m = RMatrix::from_rows_slice(2, 2, &[0.0, 0.4, -0.4, 0.0]);
        let form = skew_block_diagonalize(&m).unwrap();
        assert_eq!(form.betas.len(), 1);
        assert!((form.betas[0] - 0.4).abs() < 1e-12);
        assert_eq!(form.zeros, 0);
        // P is +-identity up to a row sign/permutation; the residual check
        // inside skew_block_diagonalize already pins the layout.
        assert!(form.p.orthogonality_defect() < 1e-12);
    }

    #[test]
    fn zero_matrix_is_all_kernel() {
        let form = skew_block_diagonalize(&RMatrix::zeros(3, 3)).unwrap();
        assert!(form.betas.is_empty());
        assert_eq!(form.zeros, 3);
    }

    #[test]
    fn rejects_symmetric_input() {
        let mut m = RMatrix::zeros(2, 2);
        m[(0, 1)] = 1.0;
        m[(1, 0)] = 1.0;
        assert!(matches!(
            skew_block_diagonalize(&m),
            Err(Error::NotAntisymmetric(_))
        ));
    }

    #[test]
    fn random_matrices_match_hermitian_oracle() {
        // Oracle: eigenvalues of i M from the dense Hermitian solve must
        // coincide with {+-beta_j, 0...} of the returned form.
        let mut rng = Rng::new(77);
        for _ in 0..200 {
            let n = 2 + rng.below(7); // dims 2..=8
            let m = random_antisymmetric(&mut rng, n);
            let form = skew_block_diagonalize(&m).unwrap();
            assert_eq!(2 * form.betas.len() + form.zeros, n);

            let mut h = CMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    h[(i, j)] = C64::new(0.0, m[(i, j)]);
                }
            }
            let (mut oracle, _) = hermitian_eigen(&h).unwrap();
            let mut ours: Vec<f64> = form.betas.iter().flat_map(|&b| [b, -b]).collect();
            ours.resize(n, 0.0);
            oracle.sort_by(|a, b| a.partial_cmp(b).unwrap());
            ours.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (a, b) in oracle.iter().zip(&ours) {
                assert!((a - b).abs() < 1e-9, "eigenvalue mismatch {a} vs {b}");
            }

            let residual = form
                .p
                .mul(&m)
                .mul(&form.p.transpose())
                .max_abs_diff(&form.canonical_matrix());
            assert!(residual < 1e-9 * (1.0 + m.max_abs()));
            assert!(form.p.orthogonality_defect() < 1e-10);
            for w in form.betas.windows(2) {
                assert!(w[0] >= w[1] - 1e-12);
            }
        }
    }

    #[test]
    fn exactly_degenerate_blocks() {
        // Two blocks with identical beta plus one kernel direction.
        let mut m = RMatrix::zeros(5, 5);
        m[(0, 1)] = 0.7;
        m[(1, 0)] = -0.7;
        m[(2, 3)] = 0.7;
        m[(3, 2)] = -0.7;
        let form = skew_block_diagonalize(&m).unwrap();
        assert_eq!(form.betas.len(), 2);
        assert_eq!(form.zeros, 1);
        for &b in &form.betas {
            assert!((b - 0.7).abs() < 1e-10);
        }
    }
}
