//! Dense spectral kernels shared by all solvers.
//!
//! Everything here reduces to one primitive, the symmetric eigendecomposition:
//! pseudo-inverses and their square roots, numeric ranks, largest singular
//! triples (via the Gram matrix of the smaller side), and the block
//! positive-semidefiniteness tests. Keeping a single kernel keeps the
//! numerical behaviour of the whole crate consistent at desk-scale
//! dimensions (up to a few hundred).

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, ScaError};

/// Relative threshold below which an eigenvalue counts as zero:
/// `|lambda| <= rank_tol * max(1, |lambda|_max)`.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Relative Frobenius asymmetry above which a matrix is rejected instead of
/// being symmetrized as `(M + M') / 2`.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Default relative tolerance for positive-semidefiniteness margins.
pub const DEFAULT_PSD_TOL: f64 = 1e-7;

/// A real symmetric matrix with finite entries.
///
/// Construction symmetrizes the input as `(M + M') / 2` when the relative
/// asymmetry is within [`SYMMETRY_TOL`] and rejects it otherwise; sample
/// covariances carry rounding asymmetry, grossly asymmetric data is a bug.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    data: DMatrix<f64>,
    asymmetry: f64,
}

impl SymmetricMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(ScaError::InvalidMatrix(format!(
                "expected a square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(ScaError::InvalidMatrix("non-finite entries".into()));
        }
        let norm = m.norm();
        let asym = (&m - m.transpose()).norm();
        let rel = if norm > 0.0 { asym / norm } else { asym };
        if rel > SYMMETRY_TOL {
            return Err(ScaError::InvalidMatrix(format!(
                "asymmetry {rel:.3e} exceeds tolerance {SYMMETRY_TOL:.1e}"
            )));
        }
        let sym = (&m + m.transpose()) * 0.5;
        Ok(Self {
            data: sym,
            asymmetry: rel,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(ScaError::InvalidMatrix(
                "rows do not form a square matrix".into(),
            ));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Self {
        Self {
            data: DMatrix::identity(n, n),
            asymmetry: 0.0,
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            data: DMatrix::zeros(n, n),
            asymmetry: 0.0,
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self {
            data: DMatrix::from_diagonal(&DVector::from_row_slice(diag)),
            asymmetry: 0.0,
        }
    }

    /// Wraps a matrix that is symmetric by construction (Gram products,
    /// spectral reconstructions). Enforces exact symmetry by mirroring the
    /// upper triangle.
    pub(crate) fn from_symmetric_unchecked(mut m: DMatrix<f64>) -> Self {
        let n = m.nrows();
        for i in 0..n {
            for j in (i + 1)..n {
                m[(j, i)] = m[(i, j)];
            }
        }
        Self {
            data: m,
            asymmetry: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    /// Relative Frobenius asymmetry of the original input, kept for
    /// validation reports.
    pub fn asymmetry(&self) -> f64 {
        self.asymmetry
    }

    /// Principal submatrix on the given (sorted, in-range) indices.
    pub fn principal_submatrix(&self, idx: &[usize]) -> SymmetricMatrix {
        let k = idx.len();
        let sub = DMatrix::from_fn(k, k, |i, j| self.data[(idx[i], idx[j])]);
        SymmetricMatrix::from_symmetric_unchecked(sub)
    }
}

/// A rectangular real matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct RectMatrix {
    data: DMatrix<f64>,
}

impl RectMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.iter().any(|x| !x.is_finite()) {
            return Err(ScaError::InvalidMatrix("non-finite entries".into()));
        }
        Ok(Self { data: m })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != m) {
            return Err(ScaError::InvalidMatrix("ragged rows".into()));
        }
        Self::new(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        Self {
            data: DMatrix::zeros(n, m),
        }
    }

    pub fn nrows(&self) -> usize {
        self.data.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.data.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> RectMatrix {
        RectMatrix {
            data: DMatrix::from_fn(rows.len(), cols.len(), |i, j| {
                self.data[(rows[i], cols[j])]
            }),
        }
    }
}

/// Eigendecomposition of a symmetric matrix, eigenvalues descending and
/// eigenvectors as orthonormal columns.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

/// Symmetric eigendecomposition with eigenvalues sorted descending.
///
/// Eigenvector signs are canonicalized (largest-magnitude entry positive) so
/// repeated runs on identical inputs produce identical output.
pub fn sym_eig(m: &SymmetricMatrix) -> EigDecomposition {
    let n = m.dim();
    if n == 0 {
        return EigDecomposition {
            eigenvalues: DVector::zeros(0),
            eigenvectors: DMatrix::zeros(0, 0),
        };
    }
    let se = m.matrix().clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        se.eigenvalues[j]
            .partial_cmp(&se.eigenvalues[i])
            .unwrap()
            .then(i.cmp(&j))
    });
    let eigenvalues = DVector::from_fn(n, |i, _| se.eigenvalues[order[i]]);
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = se.eigenvectors.column(src);
        let pivot = (0..n).fold(0usize, |best, i| {
            if col[i].abs() > col[best].abs() {
                i
            } else {
                best
            }
        });
        let sign = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            eigenvectors[(i, dst)] = sign * col[i];
        }
    }
    EigDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// Scale-aware zero threshold: `rank_tol * max(1, |lambda|_max)`.
fn zero_threshold(eigenvalues: &DVector<f64>, rank_tol: f64) -> f64 {
    let max_abs = eigenvalues.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    rank_tol * max_abs.max(1.0)
}

/// `Q f(Lambda) Q'` with exact symmetry.
fn spectral_map(eig: &EigDecomposition, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let n = eig.eigenvalues.len();
    let mut scaled = eig.eigenvectors.clone();
    for j in 0..n {
        let fj = f(eig.eigenvalues[j]);
        for i in 0..n {
            scaled[(i, j)] *= fj;
        }
    }
    let mut out = &scaled * eig.eigenvectors.transpose();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (out[(i, j)] + out[(j, i)]);
            out[(i, j)] = avg;
            out[(j, i)] = avg;
        }
    }
    out
}

/// Moore-Penrose pseudo-inverse of a symmetric matrix. Eigenvalues below the
/// scale-aware threshold are treated as zero.
pub fn pinv(m: &SymmetricMatrix, rank_tol: f64) -> SymmetricMatrix {
    let eig = sym_eig(m);
    let thr = zero_threshold(&eig.eigenvalues, rank_tol);
    let out = spectral_map(&eig, |l| if l.abs() > thr { 1.0 / l } else { 0.0 });
    SymmetricMatrix::from_symmetric_unchecked(out)
}

/// PSD square root of the pseudo-inverse, `sqrt(M^+)`.
///
/// Errors with [`ScaError::NotPsd`] when an eigenvalue is significantly
/// negative (below `-rank_tol * max(1, |lambda|_max)`).
pub fn pinv_sqrt(m: &SymmetricMatrix, rank_tol: f64) -> Result<SymmetricMatrix> {
    let eig = sym_eig(m);
    let thr = zero_threshold(&eig.eigenvalues, rank_tol);
    if let Some(&min) = eig
        .eigenvalues
        .iter()
        .min_by(|a, b| a.partial_cmp(b).unwrap())
    {
        if min < -thr {
            return Err(ScaError::NotPsd {
                min_eigenvalue: min,
            });
        }
    }
    Ok(pinv_sqrt_from_eig(&eig, thr))
}

/// `sqrt(M^+)` that clamps small negative eigenvalues to zero instead of
/// erroring. Used on submatrices of instances already validated as jointly
/// PSD, where any negative eigenvalue is rounding noise.
pub(crate) fn pinv_sqrt_clamped(m: &SymmetricMatrix, rank_tol: f64) -> SymmetricMatrix {
    let eig = sym_eig(m);
    let thr = zero_threshold(&eig.eigenvalues, rank_tol);
    pinv_sqrt_from_eig(&eig, thr)
}

fn pinv_sqrt_from_eig(eig: &EigDecomposition, thr: f64) -> SymmetricMatrix {
    let out = spectral_map(eig, |l| if l > thr { 1.0 / l.sqrt() } else { 0.0 });
    SymmetricMatrix::from_symmetric_unchecked(out)
}

/// Number of eigenvalues above the scale-aware zero threshold.
pub fn numeric_rank(m: &SymmetricMatrix, rank_tol: f64) -> usize {
    let eig = sym_eig(m);
    let thr = zero_threshold(&eig.eigenvalues, rank_tol);
    eig.eigenvalues.iter().filter(|l| l.abs() > thr).count()
}

/// Largest singular value together with unit left/right singular vectors.
///
/// Computed from the eigendecomposition of the Gram matrix on the smaller
/// side, so the crate keeps a single spectral kernel; `u'Mv = sigma` and
/// `||u|| = ||v|| = 1`. A zero matrix returns sigma 0 with canonical basis
/// vectors.
pub fn sigma_max(m: &RectMatrix) -> (f64, DVector<f64>, DVector<f64>) {
    let (n, mm) = (m.nrows(), m.ncols());
    assert!(n > 0 && mm > 0, "sigma_max needs a nonempty matrix");
    let a = m.matrix();
    if n <= mm {
        let gram = SymmetricMatrix::from_symmetric_unchecked(a * a.transpose());
        let eig = sym_eig(&gram);
        let l1 = eig.eigenvalues[0];
        if l1 <= f64::MIN_POSITIVE {
            return (0.0, canonical_unit(n), canonical_unit(mm));
        }
        let sigma = l1.sqrt();
        let u = eig.eigenvectors.column(0).clone_owned();
        let v = a.transpose() * &u / sigma;
        (sigma, u, v)
    } else {
        let gram = SymmetricMatrix::from_symmetric_unchecked(a.transpose() * a);
        let eig = sym_eig(&gram);
        let l1 = eig.eigenvalues[0];
        if l1 <= f64::MIN_POSITIVE {
            return (0.0, canonical_unit(n), canonical_unit(mm));
        }
        let sigma = l1.sqrt();
        let v = eig.eigenvectors.column(0).clone_owned();
        let u = a * &v / sigma;
        (sigma, u, v)
    }
}

fn canonical_unit(n: usize) -> DVector<f64> {
    let mut e = DVector::zeros(n);
    e[0] = 1.0;
    e
}

/// Outcome of the direct block PSD test, reporting which equivalent
/// condition was evaluated and its margin (the smallest eigenvalue of the
/// assembled matrix, relative to `scale`).
#[derive(Debug, Clone)]
pub struct BlockPsdReport {
    pub psd: bool,
    pub condition: &'static str,
    pub margin: f64,
    pub scale: f64,
}

/// Assembles `[[B, A], [A', C]]`. Dimensions must conform.
pub fn assemble_block(
    b: &SymmetricMatrix,
    a: &RectMatrix,
    c: &SymmetricMatrix,
) -> SymmetricMatrix {
    let (n, m) = (b.dim(), c.dim());
    assert_eq!(a.nrows(), n, "A row count must match B");
    assert_eq!(a.ncols(), m, "A column count must match C");
    let mut k = DMatrix::zeros(n + m, n + m);
    k.view_mut((0, 0), (n, n)).copy_from(b.matrix());
    k.view_mut((0, n), (n, m)).copy_from(a.matrix());
    k.view_mut((n, 0), (m, n)).copy_from(&a.matrix().transpose());
    k.view_mut((n, n), (m, m)).copy_from(c.matrix());
    SymmetricMatrix::from_symmetric_unchecked(k)
}

/// Direct eigenvalue test of `[[B, A], [A', C]]`: PSD iff the smallest
/// eigenvalue is at least `-tol * max(1, |lambda|_max)`.
pub fn block_psd_check(
    b: &SymmetricMatrix,
    a: &RectMatrix,
    c: &SymmetricMatrix,
    tol: f64,
) -> BlockPsdReport {
    let block = assemble_block(b, a, c);
    let eig = sym_eig(&block);
    let k = eig.eigenvalues.len();
    let min = if k == 0 { 0.0 } else { eig.eigenvalues[k - 1] };
    let max_abs = eig.eigenvalues.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));
    let scale = max_abs.max(1.0);
    BlockPsdReport {
        psd: min >= -tol * scale,
        condition: "direct-eigenvalue",
        margin: min,
        scale,
    }
}

/// Equivalent Schur-complement test through `B`:
/// `B` PSD, `(I - B B^+) A = 0`, and `C - A' B^+ A` PSD.
pub fn block_psd_schur_via_b(
    b: &SymmetricMatrix,
    a: &RectMatrix,
    c: &SymmetricMatrix,
    tol: f64,
) -> bool {
    schur_condition(b, a.matrix(), c, tol)
}

/// Equivalent Schur-complement test through `C`:
/// `C` PSD, `(I - C C^+) A' = 0`, and `B - A C^+ A'` PSD.
pub fn block_psd_schur_via_c(
    b: &SymmetricMatrix,
    a: &RectMatrix,
    c: &SymmetricMatrix,
    tol: f64,
) -> bool {
    schur_condition(c, &a.matrix().transpose(), b, tol)
}

fn schur_condition(
    first: &SymmetricMatrix,
    cross: &DMatrix<f64>,
    second: &SymmetricMatrix,
    tol: f64,
) -> bool {
    let eig = sym_eig(first);
    let k = eig.eigenvalues.len();
    let min = if k == 0 { 0.0 } else { eig.eigenvalues[k - 1] };
    let max_abs = eig.eigenvalues.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));
    if min < -tol * max_abs.max(1.0) {
        return false;
    }
    let first_pinv = pinv(first, DEFAULT_RANK_TOL);
    let range_residual = cross - first.matrix() * first_pinv.matrix() * cross;
    let cross_scale = cross.norm().max(1.0);
    if range_residual.norm() > tol * cross_scale {
        return false;
    }
    let schur = second.matrix() - cross.transpose() * first_pinv.matrix() * cross;
    let schur_eig = sym_eig(&SymmetricMatrix::from_symmetric_unchecked(schur));
    let sk = schur_eig.eigenvalues.len();
    let smin = if sk == 0 { 0.0 } else { schur_eig.eigenvalues[sk - 1] };
    let smax = schur_eig
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, &x| acc.max(x.abs()));
    smin >= -tol * smax.max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize, m: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, m, |_, _| rng.sample(StandardNormal))
    }

    fn random_psd(rng: &mut ChaCha8Rng, n: usize) -> SymmetricMatrix {
        let g = random_matrix(rng, n, n);
        SymmetricMatrix::from_symmetric_unchecked(&g * g.transpose())
    }

    #[test]
    fn sym_eig_diagonal() {
        let m = SymmetricMatrix::from_diagonal(&[3.0, 1.0]);
        let eig = sym_eig(&m);
        assert!((eig.eigenvalues[0] - 3.0).abs() < 1e-12);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-12);
        assert!((eig.eigenvectors[(0, 0)].abs() - 1.0).abs() < 1e-12);
        assert!((eig.eigenvectors[(1, 1)].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sym_eig_identity() {
        let eig = sym_eig(&SymmetricMatrix::identity(4));
        for i in 0..4 {
            assert!((eig.eigenvalues[i] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sym_eig_psd_has_nonnegative_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_psd(&mut rng, 5);
        let eig = sym_eig(&m);
        for &l in eig.eigenvalues.iter() {
            assert!(l >= -1e-10);
        }
    }

    #[test]
    fn sym_eig_reconstruction_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2usize, 5, 12, 30] {
            let g = random_matrix(&mut rng, n, n);
            let m = SymmetricMatrix::new(&g + g.transpose()).unwrap();
            let eig = sym_eig(&m);
            let rec = spectral_map(&eig, |l| l);
            let denom = m.matrix().norm().max(1e-30);
            assert!((rec - m.matrix()).norm() / denom < 1e-12);
            let qtq = eig.eigenvectors.transpose() * &eig.eigenvectors;
            assert!((qtq - DMatrix::identity(n, n)).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_finite_and_asymmetric() {
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, f64::NAN, 0.0, 1.0]);
        assert!(matches!(
            SymmetricMatrix::new(bad),
            Err(ScaError::InvalidMatrix(_))
        ));
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(
            SymmetricMatrix::new(asym),
            Err(ScaError::InvalidMatrix(_))
        ));
        assert!(RectMatrix::new(DMatrix::from_element(2, 3, f64::INFINITY)).is_err());
    }

    #[test]
    fn pinv_diagonal_and_identity() {
        let p = pinv(&SymmetricMatrix::from_diagonal(&[2.0, 0.0]), DEFAULT_RANK_TOL);
        assert!((p.matrix()[(0, 0)] - 0.5).abs() < 1e-14);
        assert!(p.matrix()[(1, 1)].abs() < 1e-14);
        let id = pinv(&SymmetricMatrix::identity(3), DEFAULT_RANK_TOL);
        assert!((id.matrix() - DMatrix::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn pinv_rank_one_satisfies_penrose_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q: DVector<f64> = 2.0 * random_matrix(&mut rng, 4, 1).column(0).normalize();
        let m = SymmetricMatrix::from_symmetric_unchecked(&q * q.transpose());
        let p = pinv(&m, DEFAULT_RANK_TOL);
        // rank-1 qq' with ||q|| = 2 has pseudo-inverse qq' / 16
        let expected = &q * q.transpose() / 16.0;
        assert!((p.matrix() - expected).norm() < 1e-10);
        let mpm = m.matrix() * p.matrix() * m.matrix();
        let pmp = p.matrix() * m.matrix() * p.matrix();
        assert!((mpm - m.matrix()).norm() < 1e-10);
        assert!((pmp - p.matrix()).norm() < 1e-10);
    }

    #[test]
    fn penrose_identities_on_random_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for n in [3usize, 6, 10] {
            let g = random_matrix(&mut rng, n, n);
            let m = SymmetricMatrix::new(&g + g.transpose()).unwrap();
            let p = pinv(&m, DEFAULT_RANK_TOL);
            let scale = m.matrix().norm().max(1.0);
            assert!((m.matrix() * p.matrix() * m.matrix() - m.matrix()).norm() < 1e-10 * scale);
            assert!((p.matrix() * m.matrix() * p.matrix() - p.matrix()).norm() < 1e-10 * scale);
        }
    }

    #[test]
    fn pinv_sqrt_diagonal_cases() {
        let r = pinv_sqrt(&SymmetricMatrix::from_diagonal(&[4.0, 0.0]), DEFAULT_RANK_TOL)
            .unwrap();
        assert!((r.matrix()[(0, 0)] - 0.5).abs() < 1e-14);
        assert!(r.matrix()[(1, 1)].abs() < 1e-14);
        let id = pinv_sqrt(&SymmetricMatrix::identity(2), DEFAULT_RANK_TOL).unwrap();
        assert!((id.matrix() - DMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn pinv_sqrt_squares_to_pinv() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [4usize, 10, 25, 50] {
            let m = random_psd(&mut rng, n);
            let r = pinv_sqrt(&m, DEFAULT_RANK_TOL).unwrap();
            let p = pinv(&m, DEFAULT_RANK_TOL);
            let err = (r.matrix() * r.matrix() - p.matrix()).norm();
            assert!(
                err <= 1e-8 * (1.0 + p.matrix().norm()),
                "n={n}: composition error {err:.3e}"
            );
        }
    }

    #[test]
    fn pinv_sqrt_rejects_indefinite() {
        let m = SymmetricMatrix::from_diagonal(&[1.0, -1.0]);
        assert!(matches!(
            pinv_sqrt(&m, DEFAULT_RANK_TOL),
            Err(ScaError::NotPsd { .. })
        ));
    }

    #[test]
    fn sigma_max_trivial_cases() {
        let (s, _, _) = sigma_max(&RectMatrix::zeros(3, 2));
        assert_eq!(s, 0.0);
        let (s, u, v) = sigma_max(&RectMatrix::from_rows(&[vec![-3.0]]).unwrap());
        assert!((s - 3.0).abs() < 1e-14);
        assert!((u[0].abs() - 1.0).abs() < 1e-14);
        assert!((v[0].abs() - 1.0).abs() < 1e-14);
        let d = RectMatrix::from_rows(&[vec![0.3, 0.0], vec![0.0, 0.1]]).unwrap();
        let (s, u, v) = sigma_max(&d);
        assert!((s - 0.3).abs() < 1e-14);
        assert!((u[0].abs() - 1.0).abs() < 1e-10);
        assert!((v[0].abs() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sigma_max_agrees_with_gram_and_is_attained() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for (n, m) in [(3usize, 5usize), (6, 4), (8, 8)] {
            let a = RectMatrix::new(random_matrix(&mut rng, n, m)).unwrap();
            let (s, u, v) = sigma_max(&a);
            let gram = SymmetricMatrix::from_symmetric_unchecked(
                a.matrix().transpose() * a.matrix(),
            );
            let lmax = sym_eig(&gram).eigenvalues[0];
            assert!((s - lmax.sqrt()).abs() <= 1e-10 * s.max(1.0));
            assert!((u.norm() - 1.0).abs() < 1e-10);
            assert!((v.norm() - 1.0).abs() < 1e-10);
            let attained = (u.transpose() * a.matrix() * &v)[(0, 0)];
            assert!((attained - s).abs() < 1e-10 * s.max(1.0));
        }
    }

    #[test]
    fn numeric_rank_cases() {
        assert_eq!(numeric_rank(&SymmetricMatrix::identity(5), DEFAULT_RANK_TOL), 5);
        assert_eq!(numeric_rank(&SymmetricMatrix::zeros(3), DEFAULT_RANK_TOL), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let b = random_matrix(&mut rng, 6, 1);
        let outer = SymmetricMatrix::from_symmetric_unchecked(&b * b.transpose());
        assert_eq!(numeric_rank(&outer, DEFAULT_RANK_TOL), 1);
    }

    #[test]
    fn block_psd_trivial_cases() {
        let b = SymmetricMatrix::identity(2);
        let c = SymmetricMatrix::identity(2);
        let zero = RectMatrix::zeros(2, 2);
        assert!(block_psd_check(&b, &zero, &c, DEFAULT_PSD_TOL).psd);
        let two_i = RectMatrix::new(DMatrix::identity(2, 2) * 2.0).unwrap();
        let report = block_psd_check(&b, &two_i, &c, DEFAULT_PSD_TOL);
        assert!(!report.psd);
        assert!(report.margin < -0.5);
        assert_eq!(report.condition, "direct-eigenvalue");
    }

    #[test]
    fn block_psd_gram_partition() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let g = random_matrix(&mut rng, 7, 7);
        let full = SymmetricMatrix::from_symmetric_unchecked(&g * g.transpose());
        let (n, m) = (4usize, 3usize);
        let b = full.principal_submatrix(&[0, 1, 2, 3]);
        let c = full.principal_submatrix(&[4, 5, 6]);
        let a = RectMatrix::new(DMatrix::from_fn(n, m, |i, j| full.matrix()[(i, n + j)]))
            .unwrap();
        assert!(block_psd_check(&b, &a, &c, DEFAULT_PSD_TOL).psd);
    }

    /// The three equivalent block-PSD conditions agree on 200 random block
    /// matrices: half PSD by construction, half pushed clearly indefinite.
    #[test]
    fn block_psd_conditions_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(57);
        let tol = 1e-7;
        for trial in 0..200 {
            let n = 2 + (trial % 5);
            let m = 2 + (trial % 4);
            let g = random_matrix(&mut rng, n + m, n + m);
            let mut full = &g * g.transpose();
            let psd_by_construction = trial % 2 == 0;
            if !psd_by_construction {
                // push the smallest eigenvalue clearly below zero
                let eig = sym_eig(&SymmetricMatrix::from_symmetric_unchecked(full.clone()));
                let lmin = eig.eigenvalues[eig.eigenvalues.len() - 1];
                let shift = lmin + 0.01 * full.norm().max(1.0);
                for i in 0..(n + m) {
                    full[(i, i)] -= shift;
                }
            }
            let fullm = SymmetricMatrix::from_symmetric_unchecked(full);
            let rows: Vec<usize> = (0..n).collect();
            let cols: Vec<usize> = (n..n + m).collect();
            let b = fullm.principal_submatrix(&rows);
            let c = fullm.principal_submatrix(&cols);
            let a = RectMatrix::new(DMatrix::from_fn(n, m, |i, j| {
                fullm.matrix()[(i, n + j)]
            }))
            .unwrap();
            let direct = block_psd_check(&b, &a, &c, tol).psd;
            let via_b = block_psd_schur_via_b(&b, &a, &c, tol);
            let via_c = block_psd_schur_via_c(&b, &a, &c, tol);
            assert_eq!(direct, via_b, "trial {trial}: direct vs via-B");
            assert_eq!(direct, via_c, "trial {trial}: direct vs via-C");
            assert_eq!(direct, psd_by_construction, "trial {trial}: expected class");
        }
    }
}
