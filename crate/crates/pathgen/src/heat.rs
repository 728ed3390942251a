//! Heat-conduction transition probability matrices (TPMs) for graph-space
//! diffusion, plus the spectral analysis ops used to study their density,
//! rank, and conditioning.
//!
//! The single-step kernel is `Q_t = exp((A - D) * t)` where `A` is the
//! adjacency matrix and `D` the degree matrix. `A - D` is symmetric negative
//! semidefinite with one zero eigenvalue on a connected graph, so the matrix
//! exponential is computed exactly through an eigendecomposition. Cumulative
//! kernels use the semigroup property `Q_s Q_t = Q_{s+t}` instead of a
//! running product; the product form survives in tests as an oracle.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Heat step size per diffusion step used when a schedule does not specify
/// one. Chosen so that the cumulative kernel on small benchmark graphs is
/// close to uniform after ~100 steps.
pub const DEFAULT_TAU: f64 = 0.1;
/// Singular-value cutoff for [`numerical_rank`].
pub const DEFAULT_RANK_TOL: f64 = 1e-6;
/// Magnitude cutoff for [`density`].
pub const DEFAULT_DENSITY_EPS: f64 = 1e-12;

/// Graph generator `A - D`: symmetric, zero row sums, eigenvalues <= 0 with
/// exactly one zero eigenvalue on a connected graph.
pub fn laplacian(g: &Graph) -> DMatrix<f64> {
    g.adjacency() - g.degree_matrix()
}

/// Eigendecomposition of `A - D`, cached so repeated kernels share one solve.
#[derive(Debug, Clone)]
pub struct HeatKernel {
    vectors: DMatrix<f64>,
    values: DVector<f64>,
}

impl HeatKernel {
    pub fn new(g: &Graph) -> Self {
        let eig = SymmetricEigen::new(laplacian(g));
        HeatKernel {
            vectors: eig.eigenvectors,
            values: eig.eigenvalues,
        }
    }

    /// Eigenvalues of `A - D` (unsorted).
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.values
    }

    /// `exp((A - D) * t)`, symmetrized against reconstruction round-off.
    pub fn matrix(&self, t: f64) -> Result<DMatrix<f64>> {
        if t < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "heat time must be >= 0, got {t}"
            )));
        }
        let scaled = DMatrix::from_diagonal(&self.values.map(|l| (l * t).exp()));
        let q = &self.vectors * scaled * self.vectors.transpose();
        Ok(symmetrize(q))
    }
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    let mt = m.transpose();
    (m + mt) * 0.5
}

/// Single-step transition probability matrix `Q_t = exp((A - D) t)`.
pub fn transition_matrix(g: &Graph, t: f64) -> Result<DMatrix<f64>> {
    HeatKernel::new(g).matrix(t)
}

/// Matrix exponential by scaling-and-squaring with a Taylor series on the
/// scaled matrix. Independent of the spectral route; kept for cross-checks.
pub fn expm_taylor(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let norm = m.amax() * n as f64;
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = m / 2f64.powi(squarings as i32);
    let mut result = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=30 {
        term = (&term * &scaled) / k as f64;
        result += &term;
        if term.amax() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Analytic memory requirement of a T-step schedule of dense V x V matrices.
/// Wide arithmetic; never overflows for realistic inputs.
pub fn tpm_memory_bytes(v: usize, t_steps: usize, bytes_per_entry: usize) -> u128 {
    t_steps as u128 * (v as u128) * (v as u128) * bytes_per_entry as u128
}

/// Fraction of entries of `q` with absolute value above `eps`.
pub fn density(q: &DMatrix<f64>, eps: f64) -> Result<f64> {
    if eps <= 0.0 {
        return Err(Error::InvalidArgument("eps must be > 0".into()));
    }
    let over = q.iter().filter(|x| x.abs() > eps).count();
    Ok(over as f64 / (q.nrows() * q.ncols()) as f64)
}

fn singular_values(q: &DMatrix<f64>) -> Vec<f64> {
    q.clone().singular_values().iter().copied().collect()
}

/// Count of singular values at or above `tol`.
pub fn numerical_rank(q: &DMatrix<f64>, tol: f64) -> Result<usize> {
    if tol <= 0.0 {
        return Err(Error::InvalidArgument("tol must be > 0".into()));
    }
    Ok(singular_values(q).into_iter().filter(|s| *s >= tol).count())
}

/// Smallest singular value of `q`.
pub fn min_singular_value(q: &DMatrix<f64>) -> f64 {
    singular_values(q)
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

/// Per-step and cumulative transition matrices for a T-step diffusion.
///
/// With a uniform step time the per-step kernel is a single shared matrix;
/// the hook for scheduled (non-uniform) step times stores one per step.
/// `qbar(t)` is `exp((A - D) * sum of the first t step times)` by the
/// semigroup property, with `qbar(0)` the identity.
#[derive(Debug, Clone)]
pub struct TransitionSchedule {
    step_times: Vec<f64>,
    q_steps: QSteps,
    qbar: Vec<DMatrix<f64>>,
    kernel: HeatKernel,
}

#[derive(Debug, Clone)]
enum QSteps {
    Uniform(DMatrix<f64>),
    PerStep(Vec<DMatrix<f64>>),
}

impl TransitionSchedule {
    pub fn steps(&self) -> usize {
        self.step_times.len()
    }

    /// Heat time of step `t` (1-based).
    pub fn step_time(&self, t: usize) -> f64 {
        self.step_times[t - 1]
    }

    /// Accumulated heat time after `t` steps.
    pub fn total_time(&self, t: usize) -> f64 {
        self.step_times[..t].iter().sum()
    }

    /// Per-step kernel `Q_t` (1-based `t` in `1..=T`).
    pub fn q(&self, t: usize) -> &DMatrix<f64> {
        assert!((1..=self.steps()).contains(&t), "step {t} out of range");
        match &self.q_steps {
            QSteps::Uniform(m) => m,
            QSteps::PerStep(v) => &v[t - 1],
        }
    }

    /// Cumulative kernel `Qbar_t` for `t` in `0..=T`; `qbar(0)` is identity.
    pub fn qbar(&self, t: usize) -> &DMatrix<f64> {
        &self.qbar[t]
    }

    pub fn kernel(&self) -> &HeatKernel {
        &self.kernel
    }

    pub fn vertex_count(&self) -> usize {
        self.qbar[0].nrows()
    }
}

/// Builds a uniform-step schedule: `Q_t = exp((A-D) tau)` for every step and
/// `Qbar_t = exp((A-D) t tau)`.
///
/// `budget_bytes`, when given, bounds the analytic requirement
/// [`tpm_memory_bytes`]`(V, T, 8)`; exceeding it is an explicit error before
/// any allocation happens.
pub fn build_schedule(
    g: &Graph,
    t_steps: usize,
    tau: f64,
    budget_bytes: Option<u128>,
) -> Result<TransitionSchedule> {
    if tau <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tau must be > 0, got {tau}"
        )));
    }
    build_schedule_with_times(g, &vec![tau; t_steps], budget_bytes)
}

/// Scheduled-step hook: one heat time per diffusion step.
pub fn build_schedule_with_times(
    g: &Graph,
    step_times: &[f64],
    budget_bytes: Option<u128>,
) -> Result<TransitionSchedule> {
    let t_steps = step_times.len();
    if t_steps < 1 {
        return Err(Error::InvalidArgument("schedule needs T >= 1".into()));
    }
    if step_times.iter().any(|&s| s <= 0.0) {
        return Err(Error::InvalidArgument(
            "every step time must be > 0".into(),
        ));
    }
    let v = g.vertex_count();
    if let Some(budget) = budget_bytes {
        let required = tpm_memory_bytes(v, t_steps, std::mem::size_of::<f64>());
        if required > budget {
            return Err(Error::MemoryBudget { required, budget });
        }
    }
    let kernel = HeatKernel::new(g);
    let uniform = step_times.windows(2).all(|w| w[0] == w[1]);
    let q_steps = if uniform {
        QSteps::Uniform(kernel.matrix(step_times[0])?)
    } else {
        QSteps::PerStep(
            step_times
                .iter()
                .map(|&s| kernel.matrix(s))
                .collect::<Result<_>>()?,
        )
    };
    let mut qbar = Vec::with_capacity(t_steps + 1);
    qbar.push(DMatrix::identity(v, v));
    let mut acc = 0.0;
    for &s in step_times {
        acc += s;
        qbar.push(kernel.matrix(acc)?);
    }
    Ok(TransitionSchedule {
        step_times: step_times.to_vec(),
        q_steps,
        qbar,
        kernel,
    })
}

/// One row of a TPM sweep: density, numerical rank, and smallest singular
/// value of `Q_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisRow {
    pub t: f64,
    pub density: f64,
    pub rank: usize,
    pub sigma_min: f64,
}

/// TPM sweep over a list of heat times.
#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub rows: Vec<AnalysisRow>,
    pub density_eps: f64,
    pub rank_tol: f64,
}

impl AnalysisReport {
    /// Body rows in the `t,density,rank,sigma_min` CSV layout.
    pub fn csv_rows(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| {
                format!(
                    "{:.6},{:.9e},{},{:.9e}",
                    r.t, r.density, r.rank, r.sigma_min
                )
            })
            .collect()
    }
}

/// Sweeps `Q_t` over ascending heat times, reporting density, rank, and
/// minimum singular value per time.
pub fn analyze_tpm(g: &Graph, ts: &[f64], density_eps: f64, rank_tol: f64) -> Result<AnalysisReport> {
    if ts.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument(
            "heat times must be sorted ascending".into(),
        ));
    }
    if ts.iter().any(|&t| t < 0.0) {
        return Err(Error::InvalidArgument(
            "heat times must be nonnegative".into(),
        ));
    }
    let kernel = HeatKernel::new(g);
    let mut rows = Vec::with_capacity(ts.len());
    for &t in ts {
        let q = kernel.matrix(t)?;
        rows.push(AnalysisRow {
            t,
            density: density(&q, density_eps)?,
            rank: numerical_rank(&q, rank_tol)?,
            sigma_min: min_singular_value(&q),
        });
    }
    Ok(AnalysisReport {
        rows,
        density_eps,
        rank_tol,
    })
}
