//! Linear algebra over complex projective space.
//!
//! A projective subspace of `CP^n` is stored as an orthonormal basis of the
//! underlying linear subspace of `C^{n+1}`. Rank decisions use singular
//! values against [`TAU_RANK`]; equality of subspaces is decided by the
//! largest principal angle against [`TAU_SUB`].

use nalgebra::{DMatrix, SVD};
use rand::Rng;

use crate::rng::{complex_gaussian_vector, item_rng};
use crate::tol::{TAU_RANK, TAU_SUB};
use crate::{Error, Result, CMatrix, CVector, C64};

/// Homogeneous coordinates `[z_0 : … : z_n]` of a point of `CP^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousVector {
    entries: CVector,
}

impl HomogeneousVector {
    pub fn new(entries: CVector) -> Result<Self> {
        let norm = entries.norm();
        if !(norm > TAU_RANK) {
            return Err(Error::ZeroVector { norm });
        }
        Ok(Self { entries })
    }

    pub fn from_slice(entries: &[C64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(entries))
    }

    /// The coordinate point `p_i`.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut entries = CVector::zeros(n + 1);
        entries[i] = C64::new(1.0, 0.0);
        Self { entries }
    }

    pub fn entries(&self) -> &CVector {
        &self.entries
    }

    pub fn into_entries(self) -> CVector {
        self.entries
    }

    /// Dimension `n` of the ambient `CP^n`.
    pub fn ambient_dim(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn normalized(&self) -> CVector {
        self.entries.normalize()
    }

    /// Angle (radians) between the two points of `CP^n`.
    pub fn angle_to(&self, other: &HomogeneousVector) -> f64 {
        let a = self.normalized();
        let b = other.normalized();
        let overlap = a.dotc(&b).norm();
        // sin of the angle from the residual keeps small angles accurate.
        let residual = (&b - &a * a.dotc(&b)).norm();
        residual.atan2(overlap)
    }

    pub fn same_point(&self, other: &HomogeneousVector) -> bool {
        self.angle_to(other) < TAU_SUB
    }
}

/// A projective subspace, represented by an orthonormal column basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveSubspace {
    basis: CMatrix,
}

impl ProjectiveSubspace {
    /// Subspace spanned by the given vectors (rank decided numerically).
    pub fn span(vectors: &[CVector]) -> Result<Self> {
        let first = vectors
            .first()
            .ok_or_else(|| Error::InvalidArgument("span of an empty list".into()))?;
        let rows = first.len();
        for v in vectors {
            if v.len() != rows {
                return Err(Error::DimensionMismatch { expected: rows, actual: v.len() });
            }
        }
        let stacked = CMatrix::from_columns(vectors);
        Self::column_space(stacked)
    }

    /// Column space of an arbitrary matrix.
    pub fn column_space(matrix: CMatrix) -> Result<Self> {
        let svd = SVD::new(matrix, true, false);
        let sigma_max = svd.singular_values.max();
        if !(sigma_max > 0.0) {
            return Err(Error::ZeroVector { norm: 0.0 });
        }
        let u = svd.u.expect("left singular vectors requested");
        let keep: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&i| svd.singular_values[i] > TAU_RANK * sigma_max)
            .collect();
        let columns: Vec<CVector> = keep.iter().map(|&i| u.column(i).into_owned()).collect();
        Ok(Self { basis: CMatrix::from_columns(&columns) })
    }

    /// The point `[x]` as a zero-dimensional subspace.
    pub fn point(x: &HomogeneousVector) -> Self {
        Self { basis: CMatrix::from_columns(&[x.normalized()]) }
    }

    /// Coordinate subspace `⟨p_i : i ∈ indices⟩` of `CP^n`.
    pub fn coordinate(n: usize, indices: &[usize]) -> Result<Self> {
        let vectors: Vec<CVector> = indices
            .iter()
            .map(|&i| {
                if i > n {
                    Err(Error::InvalidArgument(format!("index {i} exceeds n = {n}")))
                } else {
                    Ok(HomogeneousVector::basis(n, i).into_entries())
                }
            })
            .collect::<Result<_>>()?;
        Self::span(&vectors)
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows() - 1
    }

    pub fn proj_dim(&self) -> usize {
        self.basis.ncols() - 1
    }

    /// Orthogonal projector onto the underlying linear subspace.
    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    /// Component of `x` orthogonal to the subspace.
    pub fn reject(&self, x: &CVector) -> CVector {
        x - &self.basis * (self.basis.adjoint() * x)
    }

    /// Angle between the point `[x]` and this subspace.
    pub fn angle_to_point(&self, x: &HomogeneousVector) -> f64 {
        let v = x.normalized();
        let off = self.reject(&v).norm();
        let on = (self.basis.adjoint() * &v).norm();
        off.atan2(on)
    }

    pub fn contains_point(&self, x: &HomogeneousVector) -> bool {
        self.angle_to_point(x) < TAU_SUB
    }

    /// Largest principal angle between `other` and this subspace, measured
    /// from `other`'s side: zero iff `other ⊆ self`.
    pub fn containment_angle(&self, other: &ProjectiveSubspace) -> f64 {
        let residual = &other.basis - &self.basis * (self.basis.adjoint() * &other.basis);
        spectral_norm(&residual).min(1.0).asin()
    }

    pub fn contains(&self, other: &ProjectiveSubspace) -> bool {
        other.proj_dim() <= self.proj_dim() && self.containment_angle(other) < TAU_SUB
    }

    /// Largest principal angle between subspaces of equal dimension.
    pub fn max_principal_angle(&self, other: &ProjectiveSubspace) -> Result<f64> {
        if self.basis.ncols() != other.basis.ncols() || self.basis.nrows() != other.basis.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.basis.ncols(),
                actual: other.basis.ncols(),
            });
        }
        Ok(self.containment_angle(other).max(other.containment_angle(self)))
    }

    pub fn same_subspace(&self, other: &ProjectiveSubspace) -> bool {
        self.max_principal_angle(other).is_ok_and(|angle| angle < TAU_SUB)
    }

    /// Image under a linear map of `C^{n+1}` (e.g. a torus element).
    pub fn transform(&self, map: &CMatrix) -> Result<Self> {
        Self::column_space(map * &self.basis)
    }
}

fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Smallest subspace containing all parts.
pub fn join(parts: &[&ProjectiveSubspace]) -> Result<ProjectiveSubspace> {
    let columns: Vec<CVector> = parts
        .iter()
        .flat_map(|p| p.basis.column_iter().map(|c| c.into_owned()))
        .collect();
    ProjectiveSubspace::span(&columns)
}

/// Intersection of the underlying linear subspaces; `None` when it is `{0}`.
pub fn meet(a: &ProjectiveSubspace, b: &ProjectiveSubspace) -> Result<Option<ProjectiveSubspace>> {
    if a.basis.nrows() != b.basis.nrows() {
        return Err(Error::DimensionMismatch { expected: a.basis.nrows(), actual: b.basis.nrows() });
    }
    // Directions of b orthogonal to the complement of a: singular values of
    // (I - AA*)B are the sines of the principal angles from b to a.
    let residual = &b.basis - &a.basis * (a.basis.adjoint() * &b.basis);
    let svd = SVD::new(residual, false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let null: Vec<CVector> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= TAU_RANK)
        .map(|i| &b.basis * v_t.row(i).adjoint())
        .collect();
    if null.is_empty() {
        return Ok(None);
    }
    ProjectiveSubspace::span(&null).map(Some)
}

/// Projects `x` from `center` onto `target`: the point of `target` on the
/// join of `center` and `x`.
pub fn project_from_center(
    x: &HomogeneousVector,
    center: &ProjectiveSubspace,
    target: &ProjectiveSubspace,
) -> Result<HomogeneousVector> {
    let angle = center.angle_to_point(x);
    if angle < TAU_SUB {
        return Err(Error::IllConditioned { angle });
    }
    let c = center.basis.ncols();
    let t = target.basis.ncols();
    let mut system = CMatrix::zeros(x.entries.len(), c + t);
    system.columns_mut(0, c).copy_from(&center.basis);
    system.columns_mut(c, t).copy_from(&target.basis);

    let rhs = x.normalized();
    let svd = SVD::new(system.clone(), true, true);
    let coeffs = svd
        .solve(&rhs, TAU_RANK * svd.singular_values.max())
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let residual = (&system * &coeffs - &rhs).norm();
    if residual > TAU_SUB {
        return Err(Error::NotInSpan { residual });
    }
    let image = &target.basis * coeffs.rows(c, t);
    HomogeneousVector::new(image).map_err(|_| Error::IllConditioned { angle })
}

/// Entrywise complex conjugation, the standard antiholomorphic involution.
pub trait Conjugate {
    fn conjugate(&self) -> Self;
}

impl Conjugate for HomogeneousVector {
    fn conjugate(&self) -> Self {
        Self { entries: self.entries.map(|z| z.conj()) }
    }
}

impl Conjugate for ProjectiveSubspace {
    fn conjugate(&self) -> Self {
        Self { basis: self.basis.map(|z| z.conj()) }
    }
}

/// Point of `CP^n` drawn from the unitarily invariant distribution.
pub fn random_point_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HomogeneousVector {
    loop {
        let v = complex_gaussian_vector(rng, n + 1);
        if let Ok(p) = HomogeneousVector::new(v) {
            return p;
        }
    }
}

/// Line of `CP^n` drawn from the unitarily invariant distribution.
pub fn random_line_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ProjectiveSubspace {
    loop {
        let u = complex_gaussian_vector(rng, n + 1);
        let v = complex_gaussian_vector(rng, n + 1);
        if let Ok(line) = ProjectiveSubspace::span(&[u, v]) {
            if line.proj_dim() == 1 {
                return line;
            }
        }
    }
}

pub fn random_point(n: usize, seed: u64) -> HomogeneousVector {
    random_point_with(n, &mut item_rng(seed, 0))
}

pub fn random_line(n: usize, seed: u64) -> ProjectiveSubspace {
    random_line_with(n, &mut item_rng(seed, 0))
}

/// Diagonal unitary `diag(e^{iθ_0}, …, e^{iθ_n})`.
pub fn diagonal_phase(angles: &[f64]) -> CMatrix {
    DMatrix::from_diagonal(&CVector::from_iterator(
        angles.len(),
        angles.iter().map(|&t| C64::from_polar(1.0, t)),
    ))
}
