//! Finite-dimensional multipartite quantum mechanics.
//!
//! States live on a tensor product of subsystems whose dimensions are listed
//! explicitly (`dims`). Basis indices are row-major: the last subsystem varies
//! fastest, so `|x1 x2⟩` on dims `[2, 2]` has index `2*x1 + x2`.

use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::optimize::NelderMead;

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const NORM_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-10;
/// Default threshold on the minimum partial-transpose eigenvalue.
pub const SEPARABILITY_TOL: f64 = 1e-10;

/// Validation thresholds for density matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub hermitian: f64,
    pub trace: f64,
    pub psd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermitian: HERMITIAN_TOL,
            trace: NORM_TOL,
            psd: PSD_TOL,
        }
    }
}

fn total_dim(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(Error::InvalidDims(dims.to_vec()));
    }
    Ok(dims.iter().product())
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Offsets of every multi-index over `subsystems` within the full index space.
fn offsets(dims: &[usize], subsystems: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut out = vec![0usize];
    for &k in subsystems {
        let mut next = Vec::with_capacity(out.len() * dims[k]);
        for &base in &out {
            for digit in 0..dims[k] {
                next.push(base + digit * st[k]);
            }
        }
        out = next;
    }
    out
}

/// For a subsystem reordering, `map[new_index] = old_index`.
fn permutation_map(dims: &[usize], order: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    check_permutation(order, dims.len())?;
    let new_dims: Vec<usize> = order.iter().map(|&k| dims[k]).collect();
    Ok((new_dims, offsets(dims, order)))
}

fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::InvalidSelection(format!(
            "permutation {order:?} does not cover {n} subsystems"
        )));
    }
    let mut seen = vec![false; n];
    for &k in order {
        if k >= n {
            return Err(Error::SubsystemOutOfRange { index: k, count: n });
        }
        if std::mem::replace(&mut seen[k], true) {
            return Err(Error::InvalidSelection(format!("subsystem {k} repeated")));
        }
    }
    Ok(())
}

pub(crate) fn max_hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), idx.len(), |r, c| eig.eigenvectors[(r, idx[c])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let sym = (m + m.adjoint()).scale(0.5);
    let mut v: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Normalized pure state on a tensor product of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amps: CVector,
}

impl PureState {
    /// Builds a state from raw amplitudes, normalizing them.
    pub fn new(dims: Vec<usize>, amps: Vec<C64>) -> Result<Self> {
        Self::from_vector(dims, CVector::from_vec(amps))
    }

    pub fn from_vector(dims: Vec<usize>, amps: CVector) -> Result<Self> {
        let n = total_dim(&dims)?;
        if amps.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: amps.len(),
            });
        }
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(PureState {
            dims,
            amps: amps.unscale(norm),
        })
    }

    /// Trusted constructor for amplitudes that are normalized by construction.
    pub(crate) fn from_parts(dims: Vec<usize>, amps: CVector) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), amps.len());
        PureState { dims, amps }
    }

    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let n = total_dim(&dims)?;
        if index >= n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: index + 1,
            });
        }
        let mut amps = CVector::zeros(n);
        amps[index] = C64::new(1.0, 0.0);
        Ok(PureState { dims, amps })
    }

    /// Haar-random pure state (normalized complex Gaussian vector).
    pub fn random<R: Rng + ?Sized>(dims: Vec<usize>, rng: &mut R) -> Result<Self> {
        let n = total_dim(&dims)?;
        let amps = CVector::from_fn(n, |_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        Self::from_vector(dims, amps)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amps.dotc(&other.amps)
    }

    pub fn with_global_phase(&self, phi: f64) -> PureState {
        let phase = C64::from_polar(1.0, phi);
        PureState {
            dims: self.dims.clone(),
            amps: self.amps.map(|a| a * phase),
        }
    }

    /// Reorders subsystems so that new subsystem `p` is old subsystem `order[p]`.
    pub fn permute(&self, order: &[usize]) -> Result<PureState> {
        let (dims, map) = permutation_map(&self.dims, order)?;
        let amps = CVector::from_fn(self.len(), |i, _| self.amps[map[i]]);
        Ok(PureState { dims, amps })
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            dims: self.dims.clone(),
            mat: &self.amps * self.amps.adjoint(),
        }
    }
}

/// Density operator on a tensor product of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    mat: CMatrix,
}

impl DensityMatrix {
    pub fn new(dims: Vec<usize>, mat: CMatrix) -> Result<Self> {
        Self::with_tolerances(dims, mat, Tolerances::default())
    }

    pub fn with_tolerances(dims: Vec<usize>, mat: CMatrix, tol: Tolerances) -> Result<Self> {
        let n = total_dim(&dims)?;
        if mat.nrows() != n || mat.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: mat.nrows().max(mat.ncols()),
            });
        }
        let herm = max_hermitian_deviation(&mat);
        if herm > tol.hermitian {
            return Err(Error::NotHermitian(herm));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(Error::InvalidTrace(tr.re));
        }
        let min_ev = hermitian_eigenvalues(&mat)[0];
        if min_ev < -tol.psd {
            return Err(Error::NotPsd(min_ev));
        }
        Ok(DensityMatrix { dims, mat })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        psi.to_density()
    }

    /// Convex combination `Σ p_j ρ_j`; weights must be non-negative and sum to 1.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        let (_, first) = parts
            .first()
            .ok_or_else(|| Error::InvalidSelection("empty mixture".into()))?;
        let total: f64 = parts.iter().map(|(p, _)| p).sum();
        if parts.iter().any(|(p, _)| *p < 0.0) || (total - 1.0).abs() > NORM_TOL {
            return Err(Error::param("weights", "must be non-negative and sum to 1"));
        }
        let mut mat = CMatrix::zeros(first.mat.nrows(), first.mat.ncols());
        for (p, rho) in parts {
            if rho.dims != first.dims {
                return Err(Error::DimensionMismatch {
                    expected: first.mat.nrows(),
                    actual: rho.mat.nrows(),
                });
            }
            mat += rho.mat.scale(*p);
        }
        Ok(DensityMatrix {
            dims: first.dims.clone(),
            mat,
        })
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let n = total_dim(&dims)?;
        Ok(DensityMatrix {
            dims,
            mat: CMatrix::identity(n, n).unscale(n as f64),
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }

    pub fn expectation(&self, op: &CMatrix) -> C64 {
        (&self.mat * op).trace()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.mat)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix {
            dims,
            mat: self.mat.kronecker(&other.mat),
        }
    }

    pub fn permute(&self, order: &[usize]) -> Result<DensityMatrix> {
        let (dims, map) = permutation_map(&self.dims, order)?;
        let n = self.mat.nrows();
        let mat = CMatrix::from_fn(n, n, |r, c| self.mat[(map[r], map[c])]);
        Ok(DensityMatrix { dims, mat })
    }

    /// Applies `U ρ U†`.
    pub fn conjugate_by(&self, u: &CMatrix) -> DensityMatrix {
        DensityMatrix {
            dims: self.dims.clone(),
            mat: u * &self.mat * u.adjoint(),
        }
    }

    /// Removes coherences of one subsystem in its computational basis,
    /// `ρ ↦ Σ_j P_j ρ P_j` with `P_j = I ⊗ |j⟩⟨j| ⊗ I`.
    pub fn dephase(&self, subsystem: usize) -> Result<DensityMatrix> {
        let count = self.dims.len();
        if subsystem >= count {
            return Err(Error::SubsystemOutOfRange {
                index: subsystem,
                count,
            });
        }
        let stride = strides(&self.dims)[subsystem];
        let d = self.dims[subsystem];
        let digit = |i: usize| (i / stride) % d;
        let mut mat = self.mat.clone();
        for r in 0..mat.nrows() {
            for c in 0..mat.ncols() {
                if digit(r) != digit(c) {
                    mat[(r, c)] = C64::new(0.0, 0.0);
                }
            }
        }
        Ok(DensityMatrix {
            dims: self.dims.clone(),
            mat,
        })
    }
}

/// Which subsystems make up side A of a bipartite cut; the rest form side B.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    part_a: Vec<usize>,
}

impl Bipartition {
    pub fn new(mut part_a: Vec<usize>) -> Self {
        part_a.sort_unstable();
        part_a.dedup();
        Bipartition { part_a }
    }

    /// First subsystem versus everything else.
    pub fn first() -> Self {
        Bipartition { part_a: vec![0] }
    }

    pub fn part_a(&self) -> &[usize] {
        &self.part_a
    }

    fn order(&self, n: usize) -> Result<(Vec<usize>, usize)> {
        if let Some(&bad) = self.part_a.iter().find(|&&k| k >= n) {
            return Err(Error::SubsystemOutOfRange { index: bad, count: n });
        }
        if self.part_a.is_empty() || self.part_a.len() == n {
            return Err(Error::InvalidSelection(format!(
                "cut {:?} leaves one side empty",
                self.part_a
            )));
        }
        let mut order = self.part_a.clone();
        order.extend((0..n).filter(|k| !self.part_a.contains(k)));
        Ok((order, self.part_a.len()))
    }

    fn grouped_dims(dims: &[usize], order: &[usize], split: usize) -> Vec<usize> {
        let da: usize = order[..split].iter().map(|&k| dims[k]).product();
        let db: usize = order[split..].iter().map(|&k| dims[k]).product();
        vec![da, db]
    }

    /// Reorders and merges subsystems so the state becomes bipartite `[d_A, d_B]`.
    pub fn regroup(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let (order, split) = self.order(rho.dims.len())?;
        let dims = Self::grouped_dims(&rho.dims, &order, split);
        let permuted = rho.permute(&order)?;
        Ok(DensityMatrix {
            dims,
            mat: permuted.mat,
        })
    }

    pub fn regroup_pure(&self, psi: &PureState) -> Result<PureState> {
        let (order, split) = self.order(psi.dims.len())?;
        let dims = Self::grouped_dims(&psi.dims, &order, split);
        let permuted = psi.permute(&order)?;
        Ok(PureState {
            dims,
            amps: permuted.amps,
        })
    }
}

/// Schmidt form `|ψ⟩ = Σ_k s_k |u_k⟩ ⊗ |v_k⟩`.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    /// Descending, non-negative.
    pub coefficients: Vec<f64>,
    pub left: Vec<CVector>,
    pub right: Vec<CVector>,
}

impl SchmidtDecomposition {
    /// Number of coefficients above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.coefficients.iter().filter(|&&s| s > tol).count()
    }
}

pub fn tensor(a: &PureState, b: &PureState) -> PureState {
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    PureState {
        dims,
        amps: a.amps.kronecker(&b.amps),
    }
}

/// Traces out every subsystem not listed in `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.dims.len();
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&k| k >= n) {
        return Err(Error::SubsystemOutOfRange { index: bad, count: n });
    }
    if keep.is_empty() {
        return Err(Error::InvalidSelection("must keep at least one subsystem".into()));
    }
    let traced: Vec<usize> = (0..n).filter(|k| !keep.contains(k)).collect();
    let kept_off = offsets(&rho.dims, &keep);
    let traced_off = offsets(&rho.dims, &traced);
    let m = kept_off.len();
    let mat = CMatrix::from_fn(m, m, |a, b| {
        traced_off
            .iter()
            .map(|&c| rho.mat[(kept_off[a] + c, kept_off[b] + c)])
            .sum()
    });
    let dims = keep.iter().map(|&k| rho.dims[k]).collect();
    Ok(DensityMatrix { dims, mat })
}

/// Transposes the indices of one factor of a bipartite state.
pub fn partial_transpose(rho: &DensityMatrix, subsystem: usize) -> Result<CMatrix> {
    if rho.dims.len() != 2 {
        return Err(Error::NotBipartite(rho.dims.len()));
    }
    if subsystem > 1 {
        return Err(Error::SubsystemOutOfRange {
            index: subsystem,
            count: 2,
        });
    }
    let (da, db) = (rho.dims[0], rho.dims[1]);
    let n = da * db;
    Ok(CMatrix::from_fn(n, n, |r, c| {
        let (i, j) = (r / db, r % db);
        let (k, l) = (c / db, c % db);
        if subsystem == 0 {
            rho.mat[(k * db + j, i * db + l)]
        } else {
            rho.mat[(i * db + l, k * db + j)]
        }
    }))
}

/// Smallest eigenvalue of the partial transpose across `cut`.
pub fn min_partial_transpose_eigenvalue(rho: &DensityMatrix, cut: &Bipartition) -> Result<f64> {
    let grouped = cut.regroup(rho)?;
    let pt = partial_transpose(&grouped, 1)?;
    Ok(hermitian_eigenvalues(&pt)[0])
}

/// Sum of the magnitudes of the negative partial-transpose eigenvalues.
pub fn negativity(rho: &DensityMatrix, cut: &Bipartition) -> Result<f64> {
    let grouped = cut.regroup(rho)?;
    let pt = partial_transpose(&grouped, 1)?;
    Ok(hermitian_eigenvalues(&pt)
        .into_iter()
        .filter(|&l| l < 0.0)
        .map(f64::abs)
        .sum())
}

pub fn pure_negativity(psi: &PureState, cut: &Bipartition) -> Result<f64> {
    negativity(&psi.to_density(), cut)
}

pub fn schmidt(psi: &PureState, cut: &Bipartition) -> Result<SchmidtDecomposition> {
    let grouped = cut.regroup_pure(psi)?;
    let (da, db) = (grouped.dims[0], grouped.dims[1]);
    let m = CMatrix::from_fn(da, db, |i, j| grouped.amps[i * db + j]);
    let svd = m.svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => unreachable!("SVD requested with both factors"),
    };
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    Ok(SchmidtDecomposition {
        coefficients: idx.iter().map(|&k| svd.singular_values[k]).collect(),
        left: idx.iter().map(|&k| u.column(k).into_owned()).collect(),
        right: idx
            .iter()
            .map(|&k| v_t.row(k).transpose().into_owned())
            .collect(),
    })
}

fn require_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dims != [2, 2] {
        return Err(Error::NotTwoQubit(rho.dims.clone()));
    }
    Ok(())
}

/// PPT test, exact for two qubits.
pub fn is_separable_two_qubit(rho: &DensityMatrix) -> Result<bool> {
    is_separable_two_qubit_with_tol(rho, SEPARABILITY_TOL)
}

pub fn is_separable_two_qubit_with_tol(rho: &DensityMatrix, tol: f64) -> Result<bool> {
    require_two_qubit(rho)?;
    Ok(min_partial_transpose_eigenvalue(rho, &Bipartition::first())? >= -tol)
}

/// `amplitude_k ↦ exp(-i E_k t) amplitude_k`, energies in angular-frequency units.
pub fn diag_phase_evolve(psi: &PureState, energies: &[f64], t: f64) -> Result<PureState> {
    if energies.len() != psi.len() {
        return Err(Error::DimensionMismatch {
            expected: psi.len(),
            actual: energies.len(),
        });
    }
    let amps = CVector::from_fn(psi.len(), |k, _| {
        psi.amps[k] * C64::from_polar(1.0, -energies[k] * t)
    });
    Ok(PureState::from_parts(psi.dims.clone(), amps))
}

/// Cached spectral decomposition of a Hermitian generator, giving `exp(-iHt)`
/// for any `t` without repeating the diagonalisation.
#[derive(Debug, Clone)]
pub struct Propagator {
    energies: Vec<f64>,
    vectors: CMatrix,
}

impl Propagator {
    pub fn new(h: &CMatrix) -> Result<Self> {
        if h.nrows() != h.ncols() {
            return Err(Error::DimensionMismatch {
                expected: h.nrows(),
                actual: h.ncols(),
            });
        }
        let dev = max_hermitian_deviation(h);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let (energies, vectors) = hermitian_eigen(h);
        Ok(Propagator { energies, vectors })
    }

    pub fn unitary(&self, t: f64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (k, e) in self.energies.iter().enumerate() {
            let phase = C64::from_polar(1.0, -e * t);
            for r in 0..scaled.nrows() {
                scaled[(r, k)] *= phase;
            }
        }
        scaled * self.vectors.adjoint()
    }

    pub fn apply(&self, v: &CVector, t: f64) -> CVector {
        let mut coeffs = self.vectors.adjoint() * v;
        for (k, e) in self.energies.iter().enumerate() {
            coeffs[k] *= C64::from_polar(1.0, -e * t);
        }
        &self.vectors * coeffs
    }
}

pub fn unitary(h: &CMatrix, t: f64) -> Result<CMatrix> {
    Ok(Propagator::new(h)?.unitary(t))
}

pub fn hamiltonian_evolve(psi: &PureState, h: &CMatrix, t: f64) -> Result<PureState> {
    if h.nrows() != psi.len() {
        return Err(Error::DimensionMismatch {
            expected: psi.len(),
            actual: h.nrows(),
        });
    }
    let prop = Propagator::new(h)?;
    Ok(PureState::from_parts(
        psi.dims.clone(),
        prop.apply(&psi.amps, t),
    ))
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)])
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Correlation matrix `T_ij = Tr(ρ σ_i ⊗ σ_j)` of a two-qubit state.
pub fn correlation_matrix(rho: &DensityMatrix) -> Result<Matrix3<f64>> {
    require_two_qubit(rho)?;
    let paulis = [pauli_x(), pauli_y(), pauli_z()];
    Ok(Matrix3::from_fn(|i, j| {
        rho.expectation(&paulis[i].kronecker(&paulis[j])).re
    }))
}

/// Closed-form CHSH maximum `2 sqrt(s1² + s2²)` from the two largest singular
/// values of the correlation matrix.
pub fn chsh_horodecki(rho: &DensityMatrix) -> Result<f64> {
    let t = correlation_matrix(rho)?;
    let mut s: Vec<f64> = t.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(2.0 * (s[0] * s[0] + s[1] * s[1]).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshSettings {
    pub restarts: usize,
    pub seed: u64,
}

impl Default for ChshSettings {
    fn default() -> Self {
        ChshSettings {
            restarts: 32,
            seed: 0x00c0_ffee,
        }
    }
}

/// Optimal local measurement directions and the CHSH value they reach.
#[derive(Debug, Clone, PartialEq)]
pub struct ChshOptimum {
    pub value: f64,
    pub alice: [[f64; 3]; 2],
    pub bob: [[f64; 3]; 2],
}

fn unit(theta: f64, phi: f64) -> nalgebra::Vector3<f64> {
    nalgebra::Vector3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos())
}

/// Maximizes `E(a,b) + E(a,b') + E(a',b) - E(a',b')` over unit vectors.
///
/// Bob's optimal directions are closed-form given Alice's pair, so the
/// simplex search runs over Alice's four angles only.
pub fn chsh_optimize(rho: &DensityMatrix, settings: &ChshSettings) -> Result<ChshOptimum> {
    let t = correlation_matrix(rho)?;
    let tt = t.transpose();
    let objective = |x: &[f64]| -> f64 {
        let a = unit(x[0], x[1]);
        let a2 = unit(x[2], x[3]);
        -((tt * (a + a2)).norm() + (tt * (a - a2)).norm())
    };

    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let nm = NelderMead::default();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for _ in 0..settings.restarts.max(1) {
        let start: Vec<f64> = (0..4)
            .map(|k| {
                if k % 2 == 0 {
                    rng.random_range(0.0..std::f64::consts::PI)
                } else {
                    rng.random_range(0.0..std::f64::consts::TAU)
                }
            })
            .collect();
        let m = nm.minimize(objective, &start);
        if best.as_ref().is_none_or(|(v, _)| m.value < *v) {
            best = Some((m.value, m.x));
        }
    }
    let (value, x) = best.expect("at least one restart");

    let a = unit(x[0], x[1]);
    let a2 = unit(x[2], x[3]);
    let direction = |v: nalgebra::Vector3<f64>| {
        let n = v.norm();
        if n > 0.0 {
            v / n
        } else {
            nalgebra::Vector3::z()
        }
    };
    let b = direction(tt * (a + a2));
    let b2 = direction(tt * (a - a2));
    let arr = |v: nalgebra::Vector3<f64>| [v.x, v.y, v.z];
    Ok(ChshOptimum {
        value: -value,
        alice: [arr(a), arr(a2)],
        bob: [arr(b), arr(b2)],
    })
}

/// CHSH value of explicit measurement directions.
pub fn chsh_value(rho: &DensityMatrix, alice: [[f64; 3]; 2], bob: [[f64; 3]; 2]) -> Result<f64> {
    let t = correlation_matrix(rho)?;
    let v = |a: [f64; 3]| nalgebra::Vector3::new(a[0], a[1], a[2]);
    let e = |a: [f64; 3], b: [f64; 3]| v(a).dot(&(t * v(b)));
    Ok(e(alice[0], bob[0]) + e(alice[0], bob[1]) + e(alice[1], bob[0]) - e(alice[1], bob[1]))
}

pub fn chsh_max(rho: &DensityMatrix) -> Result<f64> {
    let opt = chsh_optimize(rho, &ChshSettings::default())?;
    let oracle = chsh_horodecki(rho)?;
    if (opt.value - oracle).abs() > 1e-6 {
        log::warn!(
            "CHSH optimizer ({}) disagrees with correlation-matrix bound ({})",
            opt.value,
            oracle
        );
    }
    Ok(opt.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn bell() -> PureState {
        PureState::new(vec![2, 2], vec![c(1.0), c(0.0), c(0.0), c(1.0)]).unwrap()
    }

    fn assert_close(a: &CMatrix, b: &CMatrix, tol: f64) {
        let d = (a - b).map(|z| z.norm()).max();
        assert!(d <= tol, "matrices differ by {d:e}\n{a}\n{b}");
    }

    #[test]
    fn tensor_of_basis_states() {
        let z = PureState::basis(vec![2], 0).unwrap();
        let zz = tensor(&z, &z);
        assert_eq!(zz.dims(), &[2, 2]);
        assert_eq!(zz.amplitudes()[0], c(1.0));
        assert_eq!(zz.norm_sqr(), 1.0);
    }

    #[test]
    fn tensor_shapes_concatenate() {
        let a = PureState::basis(vec![2], 1).unwrap();
        let b = PureState::basis(vec![3], 2).unwrap();
        let ab = tensor(&a, &b);
        assert_eq!(ab.dims(), &[2, 3]);
        assert_eq!(ab.len(), 6);
        assert_eq!(ab.amplitudes()[5], c(1.0));
    }

    #[test]
    fn tensor_is_linear() {
        let plus = PureState::new(vec![2], vec![c(1.0), c(1.0)]).unwrap();
        let zero = PureState::basis(vec![2], 0).unwrap();
        let s = tensor(&plus, &zero);
        let amps = s.amplitudes();
        assert!((amps[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((amps[2].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(amps[1], c(0.0));
        assert_eq!(amps[3], c(0.0));
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(matches!(PureState::new(vec![1, 2], vec![c(1.0); 2]), Err(Error::InvalidDims(_))));
        assert!(matches!(
            PureState::new(vec![2], vec![c(1.0); 3]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(PureState::new(vec![2], vec![c(0.0); 2]), Err(Error::ZeroNorm)));
    }

    #[test]
    fn density_validation() {
        let bad_trace = CMatrix::identity(2, 2);
        assert!(matches!(DensityMatrix::new(vec![2], bad_trace), Err(Error::InvalidTrace(_))));
        let mut not_herm = CMatrix::identity(2, 2).unscale(2.0);
        not_herm[(0, 1)] = c(0.3);
        assert!(matches!(DensityMatrix::new(vec![2], not_herm), Err(Error::NotHermitian(_))));
        let neg = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.5), c(-0.5)]));
        assert!(matches!(DensityMatrix::new(vec![2], neg), Err(Error::NotPsd(_))));
    }

    #[test]
    fn partial_trace_of_product_recovers_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = PureState::random(vec![2], &mut rng).unwrap().to_density();
        let b = PureState::random(vec![3], &mut rng).unwrap().to_density();
        let ab = a.tensor(&b);
        let ra = partial_trace(&ab, &[0]).unwrap();
        assert_close(ra.matrix(), a.matrix(), 1e-12);
        let rb = partial_trace(&ab, &[1]).unwrap();
        assert_close(rb.matrix(), b.matrix(), 1e-12);
    }

    #[test]
    fn partial_trace_of_bell_is_maximally_mixed() {
        let r = partial_trace(&bell().to_density(), &[0]).unwrap();
        assert_close(r.matrix(), &CMatrix::identity(2, 2).unscale(2.0), 1e-15);
    }

    #[test]
    fn partial_trace_preserves_trace_and_middle_subsystem() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = PureState::random(vec![2, 4, 2], &mut rng).unwrap();
        let rho = psi.to_density();
        for keep in [vec![0], vec![1], vec![2], vec![0, 2], vec![1, 2]] {
            let r = partial_trace(&rho, &keep).unwrap();
            assert!((r.trace().re - 1.0).abs() < 1e-12);
        }
        // tracing in two steps equals tracing at once
        let r02 = partial_trace(&rho, &[0, 2]).unwrap();
        let r0 = partial_trace(&r02, &[0]).unwrap();
        let direct = partial_trace(&rho, &[0]).unwrap();
        assert_close(r0.matrix(), direct.matrix(), 1e-14);
    }

    #[test]
    fn partial_trace_rejects_out_of_range() {
        let rho = bell().to_density();
        assert!(matches!(
            partial_trace(&rho, &[2]),
            Err(Error::SubsystemOutOfRange { index: 2, count: 2 })
        ));
    }

    #[test]
    fn partial_transpose_cases() {
        // Bell state: min eigenvalue -1/2
        let pt = partial_transpose(&bell().to_density(), 1).unwrap();
        let ev = hermitian_eigenvalues(&pt);
        assert!((ev[0] + 0.5).abs() < 1e-14, "{ev:?}");
        assert!(max_hermitian_deviation(&pt) < 1e-15);

        // diagonal ρ is unchanged
        let diag = DensityMatrix::new(
            vec![2, 2],
            CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.1), c(0.2), c(0.3), c(0.4)])),
        )
        .unwrap();
        assert_eq!(&partial_transpose(&diag, 0).unwrap(), diag.matrix());

        // product state: spectrum unchanged
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let prod = tensor(
            &PureState::random(vec![2], &mut rng).unwrap(),
            &PureState::random(vec![2], &mut rng).unwrap(),
        )
        .to_density();
        let before = prod.eigenvalues();
        let after = hermitian_eigenvalues(&partial_transpose(&prod, 0).unwrap());
        for (x, y) in before.iter().zip(&after) {
            assert!((x - y).abs() < 1e-12);
        }

        let tri = PureState::basis(vec![2, 2, 2], 0).unwrap().to_density();
        assert!(matches!(partial_transpose(&tri, 0), Err(Error::NotBipartite(3))));
    }

    #[test]
    fn negativity_examples() {
        let cut = Bipartition::first();
        assert!((negativity(&bell().to_density(), &cut).unwrap() - 0.5).abs() < 1e-14);
        let prod = PureState::basis(vec![2, 2], 1).unwrap().to_density();
        assert!(negativity(&prod, &cut).unwrap() <= 1e-12);
        let classical = DensityMatrix::mixture(&[
            (0.5, PureState::basis(vec![2, 2], 0).unwrap().to_density()),
            (0.5, PureState::basis(vec![2, 2], 3).unwrap().to_density()),
        ])
        .unwrap();
        assert!(negativity(&classical, &cut).unwrap() <= 1e-15);
    }

    #[test]
    fn negativity_across_multipartite_cut() {
        // Bell pair between subsystems 0 and 2 with a spectator in the middle.
        let spectator = PureState::basis(vec![3], 1).unwrap();
        let psi = tensor(&bell(), &spectator).permute(&[0, 2, 1]).unwrap();
        assert_eq!(psi.dims(), &[2, 3, 2]);
        let rho = psi.to_density();
        let n = negativity(&rho, &Bipartition::new(vec![0])).unwrap();
        assert!((n - 0.5).abs() < 1e-12);
        let n_spec = negativity(&rho, &Bipartition::new(vec![1])).unwrap();
        assert!(n_spec < 1e-12);
        assert!(negativity(&rho, &Bipartition::new(vec![])).is_err());
        assert!(negativity(&rho, &Bipartition::new(vec![0, 1, 2])).is_err());
    }

    #[test]
    fn schmidt_examples() {
        let cut = Bipartition::first();
        let s = schmidt(&bell(), &cut).unwrap();
        for k in &s.coefficients {
            assert!((k - FRAC_1_SQRT_2).abs() < 1e-14);
        }
        let prod = PureState::basis(vec![2, 2], 2).unwrap();
        let s = schmidt(&prod, &cut).unwrap();
        assert!((s.coefficients[0] - 1.0).abs() < 1e-15);
        assert_eq!(s.rank(1e-12), 1);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi = PureState::random(vec![3, 4], &mut rng).unwrap();
        let s = schmidt(&psi, &cut).unwrap();
        let total: f64 = s.coefficients.iter().map(|x| x * x).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(s.coefficients.windows(2).all(|w| w[0] >= w[1]));
        // reconstruct
        let mut rebuilt = CVector::zeros(12);
        for k in 0..s.coefficients.len() {
            rebuilt += s.left[k].kronecker(&s.right[k]).scale(s.coefficients[k]);
        }
        assert!((rebuilt - psi.amplitudes()).norm() < 1e-12);
        // orthonormal bases
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((s.left[i].dotc(&s.left[j]) - c(want)).norm() < 1e-10);
                assert!((s.right[i].dotc(&s.right[j]) - c(want)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn separability_examples() {
        let prod = PureState::basis(vec![2, 2], 0).unwrap().to_density();
        assert!(is_separable_two_qubit(&prod).unwrap());
        assert!(!is_separable_two_qubit(&bell().to_density()).unwrap());
        let three = PureState::basis(vec![2, 4], 0).unwrap().to_density();
        assert!(matches!(is_separable_two_qubit(&three), Err(Error::NotTwoQubit(_))));
    }

    #[test]
    fn phase_evolution_examples() {
        let psi = bell();
        let same = diag_phase_evolve(&psi, &[1.0, 2.0, 3.0, 4.0], 0.0).unwrap();
        assert_eq!(same, psi);

        let shifted = diag_phase_evolve(&psi, &[0.7; 4], 1.3).unwrap();
        let cut = Bipartition::first();
        let n0 = pure_negativity(&psi, &cut).unwrap();
        let n1 = pure_negativity(&shifted, &cut).unwrap();
        assert!((n0 - n1).abs() < 1e-14);

        let omega = 2.5;
        let plus = PureState::new(vec![2, 2], vec![c(1.0); 4]).unwrap();
        let back = diag_phase_evolve(&plus, &[omega, 0.0, 0.0, 0.0], std::f64::consts::TAU / omega)
            .unwrap();
        assert!((back.amplitudes() - plus.amplitudes()).norm() < 1e-12);

        assert!(diag_phase_evolve(&plus, &[0.0; 3], 1.0).is_err());
    }

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let x = CMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        (&x + x.adjoint()).scale(0.5)
    }

    #[test]
    fn hamiltonian_evolution_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let psi = PureState::random(vec![2, 3], &mut rng).unwrap();
        let zero = CMatrix::zeros(6, 6);
        let same = hamiltonian_evolve(&psi, &zero, 3.0).unwrap();
        assert!((same.amplitudes() - psi.amplitudes()).norm() < 1e-14);

        let energies = [0.3, -1.0, 2.0, 0.0, 5.5, 1.25];
        let h = CMatrix::from_diagonal(&CVector::from_iterator(6, energies.iter().map(|&e| c(e))));
        let a = hamiltonian_evolve(&psi, &h, 0.8).unwrap();
        let b = diag_phase_evolve(&psi, &energies, 0.8).unwrap();
        assert!((a.amplitudes() - b.amplitudes()).norm() < 1e-12);

        let h = random_hermitian(6, &mut rng);
        let fwd = hamiltonian_evolve(&psi, &h, 1.7).unwrap();
        assert!((fwd.norm_sqr() - 1.0).abs() < 1e-10);
        let back = hamiltonian_evolve(&fwd, &h, -1.7).unwrap();
        assert!((back.amplitudes() - psi.amplitudes()).norm() < 1e-10);

        let mut nh = h.clone();
        nh[(0, 1)] += c(0.1);
        assert!(matches!(hamiltonian_evolve(&psi, &nh, 1.0), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn chsh_examples() {
        let bell_rho = bell().to_density();
        let v = chsh_max(&bell_rho).unwrap();
        assert!((v - 2.0 * SQRT_2).abs() < 1e-6, "{v}");
        assert!((chsh_horodecki(&bell_rho).unwrap() - 2.0 * SQRT_2).abs() < 1e-12);

        let prod = PureState::basis(vec![2, 2], 0).unwrap().to_density();
        assert!(chsh_max(&prod).unwrap() <= 2.0 + 1e-6);

        let mixed = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
        assert!(chsh_max(&mixed).unwrap().abs() < 1e-6);
    }

    #[test]
    fn chsh_optimum_directions_reproduce_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let rho = PureState::random(vec![2, 2], &mut rng).unwrap().to_density();
        let opt = chsh_optimize(&rho, &ChshSettings::default()).unwrap();
        let direct = chsh_value(&rho, opt.alice, opt.bob).unwrap();
        assert!((direct - opt.value).abs() < 1e-9);
    }

    #[test]
    fn dephase_kills_offdiagonal_blocks() {
        let rho = bell().to_density();
        let d = rho.dephase(0).unwrap();
        assert_eq!(d.matrix()[(0, 3)], c(0.0));
        assert_eq!(d.matrix()[(0, 0)], rho.matrix()[(0, 0)]);
        assert!(is_separable_two_qubit(&d).unwrap());
        assert!(rho.dephase(2).is_err());
    }

    #[test]
    fn propagator_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = random_hermitian(4, &mut rng);
        let u = unitary(&h, 0.9).unwrap();
        assert_close(&(&u * u.adjoint()), &CMatrix::identity(4, 4), 1e-12);
    }
}
