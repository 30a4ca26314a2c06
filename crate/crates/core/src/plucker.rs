//! Plücker coordinates of lines in `CP^n`.
//!
//! A line spanned by `u, v ∈ C^{n+1}` is recorded by its minors
//! `w_ij = u_i v_j − u_j v_i` for `i < j` in lexicographic order, normalized
//! to unit length. The ambient symplectic structure is the Fubini–Study form
//! of the Plücker projective space, evaluated on tangent vectors that are
//! Hermitian-orthogonal to the base point.

use crate::projective::ProjectiveSubspace;
use crate::tol::{TAU_PLUCK, TAU_RANK};
use crate::{CVector, Error, Result, C64};

/// Scale of the Fubini–Study form: `ω(a, b) = −FS_SCALE · Im⟨a, b⟩` at a unit
/// base point. Fixed by `ω(X_μ, ·) = dμ` for the flow `z_i ↦ e^{iθ} z_i`.
pub const FS_SCALE: f64 = 2.0;

/// Number of Plücker coordinates of `Gr(1, n)`.
pub fn pair_count(n: usize) -> usize {
    (n + 1) * n / 2
}

/// Lexicographic position of `(i, j)`, `i < j ≤ n`.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j <= n);
    i * n - i * (i.saturating_sub(1)) / 2 + (j - i - 1)
}

/// All index pairs in lexicographic order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=n).flat_map(move |i| (i + 1..=n).map(move |j| (i, j)))
}

/// Raw (unnormalized) minors of the pair `(u, v)`.
pub fn minors(u: &CVector, v: &CVector) -> CVector {
    let n = u.len() - 1;
    CVector::from_iterator(pair_count(n), pairs(n).map(|(i, j)| u[i] * v[j] - u[j] * v[i]))
}

/// Antisymmetric accessor `w(i, j) = −w(j, i)`, `w(i, i) = 0`.
fn entry(n: usize, w: &CVector, i: usize, j: usize) -> C64 {
    use std::cmp::Ordering::*;
    match i.cmp(&j) {
        Less => w[pair_index(n, i, j)],
        Greater => -w[pair_index(n, j, i)],
        Equal => C64::new(0.0, 0.0),
    }
}

/// Largest absolute value of the three-term Plücker relations
/// `w_ij w_kl − w_ik w_jl + w_il w_jk` (`i<j<k<l`) on the normalized vector.
pub fn plucker_residual(n: usize, w: &CVector) -> f64 {
    let norm = w.norm();
    if norm == 0.0 {
        return 0.0;
    }
    let w = w / C64::new(norm, 0.0);
    let g = |a, b| w[pair_index(n, a, b)];
    let mut worst: f64 = 0.0;
    for i in 0..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                for l in k + 1..=n {
                    let r = g(i, j) * g(k, l) - g(i, k) * g(j, l) + g(i, l) * g(j, k);
                    worst = worst.max(r.norm());
                }
            }
        }
    }
    worst
}

/// A point of `Gr(1, n)` in Plücker coordinates, unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct PluckerLine {
    n: usize,
    w: CVector,
}

impl PluckerLine {
    /// Normalizes `w` and checks the Plücker relations.
    pub fn new(n: usize, w: CVector) -> Result<Self> {
        if w.len() != pair_count(n) {
            return Err(Error::DimensionMismatch { expected: pair_count(n), actual: w.len() });
        }
        let residual = plucker_residual(n, &w);
        if residual >= TAU_PLUCK {
            return Err(Error::NotDecomposable { residual });
        }
        Self::normalized(n, w)
    }

    fn normalized(n: usize, w: CVector) -> Result<Self> {
        let norm = w.norm();
        if !(norm > TAU_RANK) {
            return Err(Error::ZeroVector { norm });
        }
        Ok(Self { n, w: w / C64::new(norm, 0.0) })
    }

    /// The line spanned by two vectors, from their raw minors. Smooth in
    /// `(u, v)`, which the finite-difference machinery relies on.
    pub fn from_spanning(u: &CVector, v: &CVector) -> Result<Self> {
        if u.len() != v.len() || u.len() < 2 {
            return Err(Error::DimensionMismatch { expected: u.len(), actual: v.len() });
        }
        Self::normalized(u.len() - 1, minors(u, v))
    }

    pub fn from_line(line: &ProjectiveSubspace) -> Result<Self> {
        if line.proj_dim() != 1 {
            return Err(Error::InvalidArgument(format!(
                "expected a line, got projective dimension {}",
                line.proj_dim()
            )));
        }
        let b = line.basis();
        Self::from_spanning(&b.column(0).into_owned(), &b.column(1).into_owned())
    }

    /// The line whose minors reproduce `w` up to phase.
    pub fn to_line(&self) -> Result<ProjectiveSubspace> {
        let residual = self.residual();
        if residual >= TAU_PLUCK {
            return Err(Error::NotDecomposable { residual });
        }
        let (i, j) = pairs(self.n)
            .max_by(|a, b| self.get(a.0, a.1).norm().total_cmp(&self.get(b.0, b.1).norm()))
            .expect("at least one pair");
        // For w = u∧v the vector (w(i, m))_m equals u_i v − v_i u ∈ V.
        let row = |a| CVector::from_iterator(self.n + 1, (0..=self.n).map(|m| entry(self.n, &self.w, a, m)));
        ProjectiveSubspace::span(&[row(i), row(j)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coords(&self) -> &CVector {
        &self.w
    }

    /// `w_ij` with antisymmetric extension.
    pub fn get(&self, i: usize, j: usize) -> C64 {
        entry(self.n, &self.w, i, j)
    }

    pub fn residual(&self) -> f64 {
        plucker_residual(self.n, &self.w)
    }

    /// `|⟨self, other⟩|`, equal to 1 iff the lines coincide.
    pub fn overlap(&self, other: &PluckerLine) -> f64 {
        self.w.dotc(&other.w).norm()
    }

    /// Distance between the points of the Plücker projective space
    /// (sine of the Fubini–Study angle).
    pub fn distance(&self, other: &PluckerLine) -> f64 {
        (&other.w - &self.w * self.w.dotc(&other.w)).norm()
    }

    /// `other` multiplied by the unit phase maximizing `Re⟨self, other⟩`.
    pub fn phase_aligned(&self, other: &PluckerLine) -> PluckerLine {
        let overlap = self.w.dotc(&other.w);
        let phase = if overlap.norm() > 0.0 { overlap.conj() / overlap.norm() } else { C64::new(1.0, 0.0) };
        PluckerLine { n: other.n, w: &other.w * phase }
    }

    pub fn conjugate(&self) -> PluckerLine {
        PluckerLine { n: self.n, w: self.w.map(|z| z.conj()) }
    }

    /// Image under the coordinate permutation `z_a ↔ z_b`.
    pub fn swap_coordinates(&self, a: usize, b: usize) -> PluckerLine {
        let sigma = |x: usize| if x == a { b } else if x == b { a } else { x };
        let w = CVector::from_iterator(
            self.w.len(),
            pairs(self.n).map(|(i, j)| entry(self.n, &self.w, sigma(i), sigma(j))),
        );
        PluckerLine { n: self.n, w }
    }

    /// Multiplies every coordinate by a global phase.
    pub fn with_phase(&self, theta: f64) -> PluckerLine {
        PluckerLine { n: self.n, w: &self.w * C64::from_polar(1.0, theta) }
    }

    pub(crate) fn from_parts_unchecked(n: usize, w: CVector) -> PluckerLine {
        PluckerLine { n, w }
    }
}

/// A tangent vector to `Gr(1, n)` at a unit Plücker point, gauge-fixed to be
/// Hermitian-orthogonal to it.
#[derive(Debug, Clone, PartialEq)]
pub struct PluckerTangent {
    xi: CVector,
}

impl PluckerTangent {
    /// Gauge projection of an arbitrary displacement of the coordinates.
    pub fn project(base: &PluckerLine, raw: CVector) -> Self {
        let along = base.w.dotc(&raw);
        Self { xi: raw - &base.w * along }
    }

    /// Tangent of `t ↦ span(u + t du, v + t dv)` at `t = 0`, analytically.
    pub fn from_basis_variation(u: &CVector, v: &CVector, du: &CVector, dv: &CVector) -> Result<(PluckerLine, Self)> {
        let m = minors(u, v);
        let scale = m.norm();
        let base = PluckerLine::from_spanning(u, v)?;
        let dm = (minors(du, v) + minors(u, dv)) / C64::new(scale, 0.0);
        let tangent = Self::project(&base, dm);
        Ok((base, tangent))
    }

    pub fn zero(n: usize) -> Self {
        Self { xi: CVector::zeros(pair_count(n)) }
    }

    pub fn vector(&self) -> &CVector {
        &self.xi
    }

    pub fn norm(&self) -> f64 {
        self.xi.norm()
    }

    /// The complex-structure rotate `J a = i·a`.
    pub fn rotate(&self) -> Self {
        Self { xi: &self.xi * C64::new(0.0, 1.0) }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { xi: &self.xi * C64::new(s, 0.0) }
    }

    /// `|⟨w, ξ⟩|`, zero for a correctly gauge-fixed vector.
    pub fn gauge_residual(&self, base: &PluckerLine) -> f64 {
        base.w.dotc(&self.xi).norm()
    }

    /// Largest value of the differentials of the Plücker relations on `ξ`;
    /// zero iff `ξ` is tangent to the Grassmannian.
    pub fn relation_residual(&self, base: &PluckerLine) -> f64 {
        let n = base.n;
        let w = |a, b| base.w[pair_index(n, a, b)];
        let x = |a, b| self.xi[pair_index(n, a, b)];
        let mut worst: f64 = 0.0;
        for i in 0..=n {
            for j in i + 1..=n {
                for k in j + 1..=n {
                    for l in k + 1..=n {
                        let d = x(i, j) * w(k, l) + w(i, j) * x(k, l)
                            - x(i, k) * w(j, l)
                            - w(i, k) * x(j, l)
                            + x(i, l) * w(j, k)
                            + w(i, l) * x(j, k);
                        worst = worst.max(d.norm());
                    }
                }
            }
        }
        worst
    }
}

/// Fubini–Study form of the Plücker space at the unit point `w`.
pub fn symplectic_form(w: &PluckerLine, a: &PluckerTangent, b: &PluckerTangent) -> f64 {
    debug_assert_eq!(a.xi.len(), w.w.len());
    -FS_SCALE * a.xi.dotc(&b.xi).im
}

/// Smallest step accepted by the central difference: below it the
/// difference of unit vectors loses more than half the significant digits.
pub const MIN_FD_STEP: f64 = 1e-8;

/// Central difference of a family of lines at `t`, phase-aligned to the base
/// point and gauge-projected. Second-order accurate in `h`.
pub fn tangent_from_curve<F>(family: F, t: f64, h: f64) -> Result<PluckerTangent>
where
    F: Fn(f64) -> Result<PluckerLine>,
{
    if !(h.is_finite() && h >= MIN_FD_STEP) {
        return Err(Error::StepTooSmall { h });
    }
    let base = family(t)?;
    let plus = base.phase_aligned(&family(t + h)?);
    let minus = base.phase_aligned(&family(t - h)?);
    let raw = (&plus.w - &minus.w) / C64::new(2.0 * h, 0.0);
    Ok(PluckerTangent::project(&base, raw))
}
