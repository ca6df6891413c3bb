//! Problem data model, validation, JSON persistence, and the synthetic
//! planted-instance generator with sample-covariance estimation.
//!
//! Reproducibility contract: all randomness flows through `ChaCha8Rng`
//! seeded with a user 64-bit seed. Population construction draws on stream
//! [`POPULATION_STREAM`] and data sampling on stream [`SAMPLING_STREAM`], so
//! the two phases are independently reproducible from the same seed.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScaError};
use crate::linalg::{
    self, assemble_block, block_psd_check, sym_eig, RectMatrix, SymmetricMatrix,
    DEFAULT_PSD_TOL,
};

/// RNG stream used for population construction.
pub const POPULATION_STREAM: u64 = 0;
/// RNG stream used for Gaussian data sampling.
pub const SAMPLING_STREAM: u64 = 1;

/// A complete SCCA problem statement: the covariance triple `(B, A, C)`,
/// sparsity budgets, a label, and optionally the planted population truth.
#[derive(Debug, Clone)]
pub struct CovarianceInstance {
    a: RectMatrix,
    b: SymmetricMatrix,
    c: SymmetricMatrix,
    s1: usize,
    s2: usize,
    label: String,
    population: Option<PlantedPopulation>,
}

impl CovarianceInstance {
    pub fn new(
        b: SymmetricMatrix,
        a: RectMatrix,
        c: SymmetricMatrix,
        s1: usize,
        s2: usize,
        label: impl Into<String>,
    ) -> Result<Self> {
        let (n, m) = (b.dim(), c.dim());
        if a.nrows() != n || a.ncols() != m {
            return Err(ScaError::InvalidArgument(format!(
                "A is {}x{} but B is {n}x{n} and C is {m}x{m}",
                a.nrows(),
                a.ncols()
            )));
        }
        if s1 == 0 || s1 > n {
            return Err(ScaError::InvalidArgument(format!(
                "budget s1={s1} outside [1, {n}]"
            )));
        }
        if s2 == 0 || s2 > m {
            return Err(ScaError::InvalidArgument(format!(
                "budget s2={s2} outside [1, {m}]"
            )));
        }
        Ok(Self {
            a,
            b,
            c,
            s1,
            s2,
            label: label.into(),
            population: None,
        })
    }

    pub fn n(&self) -> usize {
        self.b.dim()
    }

    pub fn m(&self) -> usize {
        self.c.dim()
    }

    pub fn s1(&self) -> usize {
        self.s1
    }

    pub fn s2(&self) -> usize {
        self.s2
    }

    pub fn a(&self) -> &RectMatrix {
        &self.a
    }

    pub fn b(&self) -> &SymmetricMatrix {
        &self.b
    }

    pub fn c(&self) -> &SymmetricMatrix {
        &self.c
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn population(&self) -> Option<&PlantedPopulation> {
        self.population.as_ref()
    }

    pub fn with_population(mut self, pop: PlantedPopulation) -> Self {
        self.population = Some(pop);
        self
    }

    pub fn without_population(mut self) -> Self {
        self.population = None;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Same data under different budgets.
    pub fn with_budgets(&self, s1: usize, s2: usize) -> Result<Self> {
        let mut out = Self::new(
            self.b.clone(),
            self.a.clone(),
            self.c.clone(),
            s1,
            s2,
            self.label.clone(),
        )?;
        out.population = self.population.clone();
        Ok(out)
    }
}

/// One named validation check with its outcome.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Structured validation outcome; the instance is accepted iff every check
/// passed. Validation never aborts.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn accepted(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&ValidationCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Checks symmetry residuals, the joint PSD margin of `[[B, A], [A', C]]`,
/// and budget sanity.
pub fn validate(inst: &CovarianceInstance) -> ValidationReport {
    let mut checks = Vec::new();
    checks.push(ValidationCheck {
        name: "symmetry-B".into(),
        passed: inst.b.asymmetry() <= linalg::SYMMETRY_TOL,
        detail: format!("relative asymmetry {:.3e}", inst.b.asymmetry()),
    });
    checks.push(ValidationCheck {
        name: "symmetry-C".into(),
        passed: inst.c.asymmetry() <= linalg::SYMMETRY_TOL,
        detail: format!("relative asymmetry {:.3e}", inst.c.asymmetry()),
    });
    let psd = block_psd_check(&inst.b, &inst.a, &inst.c, DEFAULT_PSD_TOL);
    checks.push(ValidationCheck {
        name: "joint-psd".into(),
        passed: psd.psd,
        detail: format!(
            "{}: margin {:.3e} at scale {:.3e}",
            psd.condition, psd.margin, psd.scale
        ),
    });
    checks.push(ValidationCheck {
        name: "budget-s1".into(),
        passed: inst.s1 >= 1 && inst.s1 <= inst.n(),
        detail: format!("s1={} with n={}", inst.s1, inst.n()),
    });
    checks.push(ValidationCheck {
        name: "budget-s2".into(),
        passed: inst.s2 >= 1 && inst.s2 <= inst.m(),
        detail: format!("s2={} with m={}", inst.s2, inst.m()),
    });
    ValidationReport { checks }
}

/// Configuration for the synthetic generator.
#[derive(Debug, Clone, Copy)]
pub struct GeneratorConfig {
    pub n: usize,
    pub m: usize,
    pub s1: usize,
    pub s2: usize,
    pub seed: u64,
    pub samples: usize,
}

impl GeneratorConfig {
    pub fn new(n: usize, m: usize, s1: usize, s2: usize, seed: u64) -> Self {
        Self {
            n,
            m,
            s1,
            s2,
            seed,
            samples: 5000,
        }
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(ScaError::InvalidArgument("n and m must be positive".into()));
        }
        if self.s1 == 0 || self.s1 > self.n {
            return Err(ScaError::InvalidArgument(format!(
                "s1={} outside [1, {}]",
                self.s1, self.n
            )));
        }
        if self.s2 == 0 || self.s2 > self.m {
            return Err(ScaError::InvalidArgument(format!(
                "s2={} outside [1, {}]",
                self.s2, self.m
            )));
        }
        if self.samples == 0 {
            return Err(ScaError::InvalidArgument("samples must be >= 1".into()));
        }
        Ok(())
    }
}

/// Population covariances with a planted sparse loading pair:
/// `B0 = Bh Bh' + I`, `C0 = Ch Ch' + I`, `A0 = lambda B0 u v' C0` with
/// `u'B0u = v'C0v = 1`, `||u||_0 = s1`, `||v||_0 = s2`, and signal strength
/// `lambda` in (0, 1).
#[derive(Debug, Clone)]
pub struct PlantedPopulation {
    pub a0: RectMatrix,
    pub b0: SymmetricMatrix,
    pub c0: SymmetricMatrix,
    pub u: DVector<f64>,
    pub v: DVector<f64>,
    pub lambda: f64,
}

impl PlantedPopulation {
    pub fn n(&self) -> usize {
        self.b0.dim()
    }

    pub fn m(&self) -> usize {
        self.c0.dim()
    }

    /// Budget implied by the planted support of `u`.
    pub fn s1(&self) -> usize {
        self.u.iter().filter(|x| **x != 0.0).count()
    }

    /// Budget implied by the planted support of `v`.
    pub fn s2(&self) -> usize {
        self.v.iter().filter(|x| **x != 0.0).count()
    }
}

fn standard_normal_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    // row-major fill order, part of the reproducibility contract
    let mut m = DMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = rng.sample(StandardNormal);
        }
    }
    m
}

fn sparse_normal_vector(rng: &mut ChaCha8Rng, dim: usize, support_size: usize) -> DVector<f64> {
    let support = rand::seq::index::sample(rng, dim, support_size);
    let mut idx: Vec<usize> = support.into_iter().collect();
    idx.sort_unstable();
    let mut v = DVector::zeros(dim);
    for &i in &idx {
        v[i] = rng.sample(StandardNormal);
    }
    v
}

/// Generates a planted population, deterministically for a given seed.
///
/// Draw order (fixed): `Bh` entries, `Ch` entries, support of `u`, values of
/// `u`, support of `v`, values of `v`, then `lambda`.
pub fn generate_population(cfg: &GeneratorConfig) -> Result<PlantedPopulation> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(POPULATION_STREAM);

    let b_hat = standard_normal_matrix(&mut rng, cfg.n, cfg.n);
    let b0 = SymmetricMatrix::from_symmetric_unchecked(
        &b_hat * b_hat.transpose() + DMatrix::identity(cfg.n, cfg.n),
    );
    let c_hat = standard_normal_matrix(&mut rng, cfg.m, cfg.m);
    let c0 = SymmetricMatrix::from_symmetric_unchecked(
        &c_hat * c_hat.transpose() + DMatrix::identity(cfg.m, cfg.m),
    );

    let mut u = sparse_normal_vector(&mut rng, cfg.n, cfg.s1);
    let qu = (u.transpose() * b0.matrix() * &u)[(0, 0)];
    u /= qu.sqrt();
    let mut v = sparse_normal_vector(&mut rng, cfg.m, cfg.s2);
    let qv = (v.transpose() * c0.matrix() * &v)[(0, 0)];
    v /= qv.sqrt();

    let mut lambda: f64 = rng.gen();
    while lambda == 0.0 {
        lambda = rng.gen();
    }

    let w1 = b0.matrix() * &u;
    let w2 = c0.matrix() * &v;
    let a0 = RectMatrix::new(lambda * &w1 * w2.transpose())?;

    Ok(PlantedPopulation {
        a0,
        b0,
        c0,
        u,
        v,
        lambda,
    })
}

/// Scaling convention for sample covariances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CovarianceScaling {
    /// Divide accumulated outer products by the sample count (default).
    /// The subset objective is invariant under common positive scaling, so
    /// this choice does not affect any reported value.
    #[default]
    Mean,
    /// Keep raw sums of outer products.
    Sum,
}

/// Draws `n_samples` joint Gaussian vectors with the population covariance
/// and returns the sample-covariance instance. The block structure is an
/// exact Gram sum, so the result always passes [`validate`].
pub fn sample_covariance(
    pop: &PlantedPopulation,
    n_samples: usize,
    seed: u64,
    scaling: CovarianceScaling,
) -> Result<CovarianceInstance> {
    if n_samples == 0 {
        return Err(ScaError::InvalidArgument("n_samples must be >= 1".into()));
    }
    let (n, m) = (pop.n(), pop.m());
    let joint = assemble_block(&pop.b0, &pop.a0, &pop.c0);
    let eig = sym_eig(&joint);
    let k = n + m;
    let max_abs = eig.eigenvalues.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let min = eig.eigenvalues[k - 1];
    if min < -DEFAULT_PSD_TOL * max_abs.max(1.0) {
        return Err(ScaError::InvalidPopulation(format!(
            "population covariance has min eigenvalue {min:.3e}"
        )));
    }
    // symmetric square root, clamping rounding noise at zero
    let mut sqrt_scaled = eig.eigenvectors.clone();
    for j in 0..k {
        let s = eig.eigenvalues[j].max(0.0).sqrt();
        for i in 0..k {
            sqrt_scaled[(i, j)] *= s;
        }
    }
    let sqrt_joint = &sqrt_scaled * eig.eigenvectors.transpose();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SAMPLING_STREAM);

    let mut accum = DMatrix::<f64>::zeros(k, k);
    let mut g = DVector::<f64>::zeros(k);
    for _ in 0..n_samples {
        for i in 0..k {
            g[i] = rng.sample(StandardNormal);
        }
        let w = &sqrt_joint * &g;
        for i in 0..k {
            for j in i..k {
                accum[(i, j)] += w[i] * w[j];
            }
        }
    }
    if scaling == CovarianceScaling::Mean {
        accum /= n_samples as f64;
    }
    for i in 0..k {
        for j in (i + 1)..k {
            accum[(j, i)] = accum[(i, j)];
        }
    }

    let b = SymmetricMatrix::from_symmetric_unchecked(accum.view((0, 0), (n, n)).into_owned());
    let c = SymmetricMatrix::from_symmetric_unchecked(accum.view((n, n), (m, m)).into_owned());
    let a = RectMatrix::new(accum.view((0, n), (n, m)).into_owned())?;

    let inst = CovarianceInstance::new(b, a, c, pop.s1(), pop.s2(), "sampled")?;
    Ok(inst.with_population(pop.clone()))
}

/// Generates a planted population and samples it in one step, using the
/// documented stream-splitting rule on a single seed.
pub fn generate_instance(
    cfg: &GeneratorConfig,
    scaling: CovarianceScaling,
) -> Result<CovarianceInstance> {
    let pop = generate_population(cfg)?;
    let inst = sample_covariance(&pop, cfg.samples, cfg.seed, scaling)?;
    let label = format!(
        "planted n={} m={} s1={} s2={} seed={} N={}",
        cfg.n, cfg.m, cfg.s1, cfg.s2, cfg.seed, cfg.samples
    );
    Ok(inst.with_label(label))
}

#[derive(Serialize, Deserialize)]
struct PopulationFile {
    #[serde(rename = "B0")]
    b0: Vec<Vec<f64>>,
    #[serde(rename = "C0")]
    c0: Vec<Vec<f64>>,
    #[serde(rename = "A0")]
    a0: Vec<Vec<f64>>,
    u: Vec<f64>,
    v: Vec<f64>,
    lambda: f64,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    n: usize,
    m: usize,
    s1: usize,
    s2: usize,
    label: String,
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    b: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    c: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    population: Option<PopulationFile>,
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn rows_to_matrix(rows: &[Vec<f64>], nr: usize, nc: usize, field: &str) -> Result<DMatrix<f64>> {
    if rows.len() != nr || rows.iter().any(|r| r.len() != nc) {
        return Err(ScaError::ParseError(format!(
            "field {field}: expected a {nr}x{nc} matrix, got {} rows of lengths {:?}",
            rows.len(),
            rows.iter().map(|r| r.len()).take(4).collect::<Vec<_>>()
        )));
    }
    Ok(DMatrix::from_fn(nr, nc, |i, j| rows[i][j]))
}

/// Writes an instance as a self-describing JSON document. Numbers use the
/// shortest representation that parses back to the identical double, so a
/// save/load round trip is bit-faithful for finite values.
pub fn save_instance(inst: &CovarianceInstance, path: impl AsRef<Path>) -> Result<()> {
    let file = InstanceFile {
        n: inst.n(),
        m: inst.m(),
        s1: inst.s1,
        s2: inst.s2,
        label: inst.label.clone(),
        a: matrix_rows(inst.a.matrix()),
        b: matrix_rows(inst.b.matrix()),
        c: matrix_rows(inst.c.matrix()),
        population: inst.population.as_ref().map(|p| PopulationFile {
            b0: matrix_rows(p.b0.matrix()),
            c0: matrix_rows(p.c0.matrix()),
            a0: matrix_rows(p.a0.matrix()),
            u: p.u.iter().copied().collect(),
            v: p.v.iter().copied().collect(),
            lambda: p.lambda,
        }),
    };
    let json =
        serde_json::to_string_pretty(&file).map_err(|e| ScaError::ParseError(e.to_string()))?;
    fs::write(path, json)?;
    Ok(())
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<CovarianceInstance> {
    let text = fs::read_to_string(&path)?;
    let file: InstanceFile =
        serde_json::from_str(&text).map_err(|e| ScaError::ParseError(e.to_string()))?;
    let (n, m) = (file.n, file.m);
    let b = SymmetricMatrix::new(rows_to_matrix(&file.b, n, n, "B")?)
        .map_err(|e| ScaError::ParseError(format!("field B: {e}")))?;
    let c = SymmetricMatrix::new(rows_to_matrix(&file.c, m, m, "C")?)
        .map_err(|e| ScaError::ParseError(format!("field C: {e}")))?;
    let a = RectMatrix::new(rows_to_matrix(&file.a, n, m, "A")?)
        .map_err(|e| ScaError::ParseError(format!("field A: {e}")))?;
    let mut inst = CovarianceInstance::new(b, a, c, file.s1, file.s2, file.label)
        .map_err(|e| ScaError::ParseError(e.to_string()))?;
    if let Some(p) = file.population {
        if p.u.len() != n || p.v.len() != m {
            return Err(ScaError::ParseError(format!(
                "field population: u has length {} (expected {n}), v has length {} (expected {m})",
                p.u.len(),
                p.v.len()
            )));
        }
        let b0 = SymmetricMatrix::new(rows_to_matrix(&p.b0, n, n, "population.B0")?)
            .map_err(|e| ScaError::ParseError(format!("field population.B0: {e}")))?;
        let c0 = SymmetricMatrix::new(rows_to_matrix(&p.c0, m, m, "population.C0")?)
            .map_err(|e| ScaError::ParseError(format!("field population.C0: {e}")))?;
        let a0 = RectMatrix::new(rows_to_matrix(&p.a0, n, m, "population.A0")?)
            .map_err(|e| ScaError::ParseError(format!("field population.A0: {e}")))?;
        inst = inst.with_population(PlantedPopulation {
            a0,
            b0,
            c0,
            u: DVector::from_vec(p.u),
            v: DVector::from_vec(p.v),
            lambda: p.lambda,
        });
    }
    Ok(inst)
}
