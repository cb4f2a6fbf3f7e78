//! Symmetric eigendecomposition and the spectral functionals built on it:
//! the rooted resolvent `m(z) = <φ, (z - K)^{-1} φ>`, the rooted spectral
//! measure, and Schatten partial sums.

use faer::{Mat, MatRef, Side};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{EigenvalueGroup, Operator, Provenance, SymMatrix};

/// Largest dimension handled by the Jacobi solver.
pub const JACOBI_MAX_DIM: usize = 1 << 8;
/// Largest dimension accepted by [`eigh`] at all.
pub const EIGH_MAX_DIM: usize = 1 << 12;
pub const JACOBI_MAX_SWEEPS: usize = 100;
pub const JACOBI_OFF_TOL: f64 = 1e-13;
/// Rooted weights below this are treated as zero.
pub const ZERO_WEIGHT: f64 = 1e-14;
/// Relative gap under which sorted eigenvalues are reported as one group.
pub const CLUSTER_REL_GAP: f64 = 1e-8;

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Returns eigenvalues ascending and the matching eigenvectors as columns.
/// Sweeps run until the largest off-diagonal magnitude drops below
/// [`JACOBI_OFF_TOL`].
pub fn jacobi_eigh(a: MatRef<'_, f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.ncols(),
        });
    }
    // row-major working copies
    let mut m: Vec<f64> = (0..n * n).map(|k| a[(k / n, k % n)]).collect();
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonConvergence {
            sweeps: 0,
            off: f64::NAN,
        });
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let off_max = |m: &[f64]| {
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max(m[i * n + j].abs());
            }
        }
        worst
    };

    let mut sweeps = 0;
    let mut off = off_max(&m);
    while off >= JACOBI_OFF_TOL {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NonConvergence { sweeps, off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.is_infinite() {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + theta.hypot(1.0))
                };
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                // columns p, q
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                // rows p, q
                let (rp, rq) = (p * n, q * n);
                for k in 0..n {
                    let mpk = m[rp + k];
                    let mqk = m[rq + k];
                    m[rp + k] = c * mpk - s * mqk;
                    m[rq + k] = s * mpk + c * mqk;
                }
                m[rp + p] = app - t * apq;
                m[rq + q] = aqq + t * apq;
                m[rp + q] = 0.0;
                m[rq + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
        off = off_max(&m);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| m[i * n + i]).collect();
    let vectors = Mat::from_fn(n, n, |k, j| v[k * n + order[j]]);
    Ok((values, vectors))
}

/// Eigenvalues with their rooted weights `|<φ, v_j>|²`, plus provenance.
///
/// Dense decompositions hold one entry per eigenvalue and keep the
/// eigenvectors. Closed-form spectra hold one entry per eigenspace with its
/// multiplicity and total rooted weight, and no eigenvectors.
#[derive(Debug, Clone)]
pub struct SpectralData {
    eigenvalues: Vec<f64>,
    multiplicities: Vec<u64>,
    root_weights: Vec<f64>,
    eigenvectors: Option<Mat<f64>>,
    source: Provenance,
    operator: Operator,
    p: f64,
    depth: usize,
    tail_bound: f64,
}

/// Full eigendecomposition of an assembled matrix.
///
/// Cyclic Jacobi up to [`JACOBI_MAX_DIM`]; larger matrices (up to
/// [`EIGH_MAX_DIM`]) go through faer's tridiagonal solver. Matrices without a
/// certified tail bound get `tail_bound = ∞`, so resolvent evaluation on
/// them is refused.
pub fn eigh(mat: &SymMatrix) -> Result<SpectralData> {
    let n = mat.dim();
    let (values, vectors) = if n <= JACOBI_MAX_DIM {
        jacobi_eigh(mat.entries())?
    } else if n <= EIGH_MAX_DIM {
        let evd = mat
            .entries()
            .self_adjoint_eigen(Side::Lower)
            .map_err(|_| Error::NonConvergence {
                sweeps: 0,
                off: f64::NAN,
            })?;
        let values = (0..n).map(|i| evd.S().column_vector()[i]).collect();
        (values, evd.U().to_owned())
    } else {
        return Err(Error::DimensionLimit {
            dim: n,
            max: EIGH_MAX_DIM,
        });
    };
    let root_weights = (0..n).map(|j| vectors[(0, j)] * vectors[(0, j)]).collect();
    Ok(SpectralData {
        eigenvalues: values,
        multiplicities: vec![1; n],
        root_weights,
        eigenvectors: Some(vectors),
        source: mat.provenance(),
        operator: mat.operator(),
        p: mat.p(),
        depth: mat.depth(),
        tail_bound: mat.tail_bound().unwrap_or(f64::INFINITY),
    })
}

impl SpectralData {
    /// Builds grouped spectral data from closed-form eigenspaces.
    fn from_groups(
        mut groups: Vec<(EigenvalueGroup, f64)>,
        operator: Operator,
        p: f64,
        depth: usize,
        tail_bound: f64,
    ) -> Self {
        groups.sort_by(|a, b| a.0.value.total_cmp(&b.0.value));
        SpectralData {
            eigenvalues: groups.iter().map(|g| g.0.value).collect(),
            multiplicities: groups.iter().map(|g| g.0.multiplicity).collect(),
            root_weights: groups.iter().map(|g| g.1).collect(),
            eigenvectors: None,
            source: Provenance::ClosedForm,
            operator,
            p,
            depth,
            tail_bound,
        }
    }

    /// Closed-form spectrum of the depth-`M` compression of `K_∞` at `p = 1/2`.
    ///
    /// The compression is diagonal: `2` on `φ` and `2^{-|w|}` on `e_w`, so the
    /// root vector carries all the weight on the eigenvalue 2.
    pub fn symmetric_limit(depth: usize) -> Result<Self> {
        if !(1..=62).contains(&depth) {
            return Err(Error::DepthLimit {
                what: "closed-form limit spectrum",
                depth,
                max: 62,
            });
        }
        let groups = crate::frame::symmetric_kinf_spectrum(depth)
            .into_iter()
            .map(|g| (g, if g.value == 2.0 { 1.0 } else { 0.0 }))
            .collect();
        Ok(Self::from_groups(
            groups,
            Operator::LimitCompression,
            0.5,
            depth,
            crate::frame::truncation_error_bound(0.5, depth)?,
        ))
    }

    /// Closed-form spectrum of `K_m` at `p = 1/2`; `φ` is the top eigenvector.
    pub fn symmetric_finite(m: usize) -> Result<Self> {
        if m > 62 {
            return Err(Error::DepthLimit {
                what: "closed-form finite spectrum",
                depth: m,
                max: 62,
            });
        }
        let groups = crate::frame::symmetric_closed_spectrum(m)
            .into_iter()
            .enumerate()
            .map(|(i, g)| (g, if i == 0 { 1.0 } else { 0.0 }))
            .collect();
        Ok(Self::from_groups(
            groups,
            Operator::Finite,
            0.5,
            m,
            crate::frame::truncation_error_bound(0.5, m)?,
        ))
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn multiplicities(&self) -> &[u64] {
        &self.multiplicities
    }

    pub fn root_weights(&self) -> &[f64] {
        &self.root_weights
    }

    pub fn eigenvectors(&self) -> Option<MatRef<'_, f64>> {
        self.eigenvectors.as_ref().map(|v| v.as_ref())
    }

    pub fn source(&self) -> Provenance {
        self.source
    }

    pub fn operator(&self) -> Operator {
        self.operator
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Total dimension, counting multiplicities.
    pub fn dim(&self) -> u64 {
        self.multiplicities.iter().sum()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("spectral data is never empty")
    }

    /// Second largest eigenvalue counting multiplicity; `None` in dimension 1.
    pub fn second_eigenvalue(&self) -> Option<f64> {
        let k = self.eigenvalues.len();
        if self.multiplicities[k - 1] > 1 {
            Some(self.eigenvalues[k - 1])
        } else if k >= 2 {
            Some(self.eigenvalues[k - 2])
        } else {
            None
        }
    }

    /// Upper edge of the certified interval containing `σ(K_∞)`.
    pub fn certified_spectral_radius(&self) -> f64 {
        self.max_eigenvalue() + self.tail_bound
    }

    /// Eigenvalue groups after merging values within [`CLUSTER_REL_GAP`].
    pub fn clusters(&self) -> Vec<EigenvalueGroup> {
        cluster(&self.eigenvalues, &self.multiplicities, CLUSTER_REL_GAP)
    }

    /// `‖V diag(λ) Vᵀ - A‖_max`, when eigenvectors are stored.
    pub fn reconstruction_error(&self, a: MatRef<'_, f64>) -> Option<f64> {
        let v = self.eigenvectors.as_ref()?;
        let n = v.nrows();
        let scaled = Mat::from_fn(n, n, |i, j| v[(i, j)] * self.eigenvalues[j]);
        let rec = &scaled * v.transpose();
        Some(crate::linalg::max_abs_diff(rec.as_ref(), a))
    }

    /// `‖VᵀV - I‖_max`, when eigenvectors are stored.
    pub fn orthogonality_error(&self) -> Option<f64> {
        let v = self.eigenvectors.as_ref()?;
        let n = v.ncols();
        let vtv = v.transpose() * v;
        Some(crate::linalg::max_abs_diff(
            vtv.as_ref(),
            Mat::<f64>::identity(n, n).as_ref(),
        ))
    }

    pub fn report(&self) -> SpectralReport {
        SpectralReport {
            p: self.p,
            depth: self.depth,
            eigenvalues: self.eigenvalues.clone(),
            multiplicities: self.multiplicities.clone(),
            rooted_weights: self.root_weights.clone(),
            tail_bound: self.tail_bound,
        }
    }
}

/// Groups sorted values whose consecutive gaps are within `rel_gap` (relative
/// to `max(1, |λ|)`). Stored values are left untouched; each group reports
/// its largest member.
pub fn cluster(values: &[f64], multiplicities: &[u64], rel_gap: f64) -> Vec<EigenvalueGroup> {
    let mut groups: Vec<EigenvalueGroup> = Vec::new();
    for (&value, &mult) in values.iter().zip(multiplicities) {
        match groups.last_mut() {
            Some(g) if (value - g.value).abs() <= rel_gap * value.abs().max(1.0) => {
                g.value = value;
                g.multiplicity += mult;
            }
            _ => groups.push(EigenvalueGroup {
                value,
                multiplicity: mult,
            }),
        }
    }
    groups
}

/// JSON form of [`SpectralData`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub p: f64,
    pub depth: usize,
    pub eigenvalues: Vec<f64>,
    pub multiplicities: Vec<u64>,
    pub rooted_weights: Vec<f64>,
    pub tail_bound: f64,
}

/// `m(z)` from the truncated spectrum, with a certified radius bounding its
/// distance to the rooted resolvent of `K_∞`.
///
/// With `L` the top truncated eigenvalue and `τ` the tail bound, the second
/// resolvent identity gives `|m_∞(z) - m(z)| <= τ / ((z - L)(z - L - τ))`.
pub fn resolvent_value(z: f64, sd: &SpectralData) -> Result<(f64, f64)> {
    let top = sd.max_eigenvalue();
    let tau = sd.tail_bound;
    let limit = top + tau;
    if !(z > limit) || !limit.is_finite() {
        return Err(Error::ResolventDomain { z, limit });
    }
    let value = sd
        .eigenvalues
        .iter()
        .zip(&sd.root_weights)
        .map(|(&lam, &w)| w / (z - lam))
        .sum();
    let radius = tau / ((z - top) * (z - top - tau));
    Ok((value, radius))
}

/// Atoms `(λ, weight)` of the rooted spectral measure.
#[derive(Debug, Clone, PartialEq)]
pub struct RootedMeasure {
    pub atoms: Vec<(f64, f64)>,
}

impl RootedMeasure {
    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    /// `∫ λ^n dν`.
    pub fn moment(&self, n: u32) -> f64 {
        self.atoms.iter().map(|&(l, w)| w * l.powi(n as i32)).sum()
    }
}

pub fn rooted_spectral_measure(sd: &SpectralData) -> RootedMeasure {
    RootedMeasure {
        atoms: sd
            .eigenvalues
            .iter()
            .zip(&sd.root_weights)
            .filter(|(_, &w)| w >= ZERO_WEIGHT)
            .map(|(&l, &w)| (l, w))
            .collect(),
    }
}

/// `Σ λ_j^r` over the nonnegative eigenvalues, counting multiplicity.
pub fn schatten_partial_sum(sd: &SpectralData, r: f64) -> Result<f64> {
    if !(r >= 1.0) {
        return Err(Error::SchattenExponent(r));
    }
    Ok(sd
        .eigenvalues
        .iter()
        .zip(&sd.multiplicities)
        .filter(|(&l, _)| l >= 0.0)
        .map(|(&l, &k)| k as f64 * l.powf(r))
        .sum())
}

/// Spectral data for the depth-`M` compression of `K_∞`: the closed form at
/// `p = 1/2`, a dense decomposition otherwise.
pub fn limit_spectral_data(p: f64, depth: usize) -> Result<SpectralData> {
    if p == 0.5 {
        SpectralData::symmetric_limit(depth)
    } else {
        eigh(&crate::frame::assemble_kinf_truncated(p, depth)?)
    }
}
