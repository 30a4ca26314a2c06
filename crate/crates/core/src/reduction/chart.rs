//! Fiber charts of the reduction and the level-set solver.
//!
//! Over a base point `(l₀, s_0, …, s_{k-1})` with a frame `(f_k, f_{k+1})` of
//! `l₀`, a line of the fiber is the graph of a map `A: l₀ → ⟨p_0, …, p_{k-1}⟩`
//! whose `j`-th row vanishes on `s_j`. Writing `s_j = α_j f_k + β_j f_{k+1}`,
//! the row is `a_j · φ_j` with `φ_j = (−β_j, α_j)` in the frame, so the chart
//! line is `span(f_k + Σ a_j φ_j(f_k) p_j, f_{k+1} + Σ a_j φ_j(f_{k+1}) p_j)`.
//! The torus acts by phases on the `a_j`, and the moments depend only on the
//! moduli `r_j = |a_j|²`:
//!
//! ```text
//! μ̃_i(r) = r_i · φ_i G(r)⁻¹ φ_i*,    G(r) = Gram(f) + Σ_j r_j φ_j* φ_j.
//! ```

use nalgebra::{DMatrix, DVector, Matrix2};

use super::ReducedPoint;
use crate::moment::MomentVector;
use crate::plucker::PluckerLine;
use crate::projective::{HomogeneousVector, ProjectiveSubspace};
use crate::tol::TAU_SOLVE;
use crate::{CVector, Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { max_iterations: 200, tolerance: TAU_SOLVE }
    }
}

/// Explicit parametrization of the fiber over a base point.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberChart {
    base: ReducedPoint,
    frame: [CVector; 2],
    s_coeffs: Vec<(C64, C64)>,
    functionals: Vec<[C64; 2]>,
    gram: Matrix2<C64>,
}

impl FiberChart {
    /// Chart in the orthonormal frame of `base.l0()`.
    pub fn new(base: &ReducedPoint) -> Result<Self> {
        let b = base.l0().basis();
        let frame = [b.column(0).into_owned(), b.column(1).into_owned()];
        let s_coeffs = base
            .s()
            .iter()
            .map(|p| {
                let s = p.normalized();
                (frame[0].dotc(&s), frame[1].dotc(&s))
            })
            .collect();
        Ok(Self::assemble(base.clone(), frame, s_coeffs))
    }

    /// Chart in an arbitrary frame `(g1, g2)` of `l₀ ⊂ ⟨p_k, …, p_n⟩`, with
    /// marked points `s_j = α_j g1 + β_j g2`. Every output depends smoothly on
    /// the inputs.
    pub fn with_frame(n: usize, k: usize, g1: CVector, g2: CVector, s_coeffs: Vec<(C64, C64)>) -> Result<Self> {
        let l0 = ProjectiveSubspace::span(&[g1.clone(), g2.clone()])?;
        if l0.proj_dim() != 1 {
            return Err(Error::InvalidBase("frame vectors are dependent".into()));
        }
        let s = s_coeffs
            .iter()
            .map(|&(a, b)| HomogeneousVector::new(&g1 * a + &g2 * b))
            .collect::<Result<Vec<_>>>()?;
        let base = ReducedPoint::new(n, k, l0, s)?;
        Ok(Self::assemble(base, [g1, g2], s_coeffs))
    }

    fn assemble(base: ReducedPoint, frame: [CVector; 2], s_coeffs: Vec<(C64, C64)>) -> Self {
        let functionals = s_coeffs.iter().map(|&(a, b)| [-b, a]).collect();
        let gram = Matrix2::new(
            frame[0].dotc(&frame[0]),
            frame[0].dotc(&frame[1]),
            frame[1].dotc(&frame[0]),
            frame[1].dotc(&frame[1]),
        );
        Self { base, frame, s_coeffs, functionals, gram }
    }

    pub fn base(&self) -> &ReducedPoint {
        &self.base
    }

    pub fn frame(&self) -> &[CVector; 2] {
        &self.frame
    }

    /// Coordinates `(α_j, β_j)` of each `s_j` in the frame.
    pub fn s_coeffs(&self) -> &[(C64, C64)] {
        &self.s_coeffs
    }

    pub fn k(&self) -> usize {
        self.base.k()
    }

    /// Spanning vectors of the chart line at coordinates `a`.
    pub fn spanning(&self, a: &[C64]) -> (CVector, CVector) {
        let mut u = self.frame[0].clone();
        let mut v = self.frame[1].clone();
        for (j, (aj, phi)) in a.iter().zip(&self.functionals).enumerate() {
            u[j] += aj * phi[0];
            v[j] += aj * phi[1];
        }
        (u, v)
    }

    pub fn line(&self, a: &[C64]) -> Result<PluckerLine> {
        self.check_len(a.len())?;
        let (u, v) = self.spanning(a);
        PluckerLine::from_spanning(&u, &v)
    }

    pub fn subspace(&self, a: &[C64]) -> Result<ProjectiveSubspace> {
        self.check_len(a.len())?;
        let (u, v) = self.spanning(a);
        ProjectiveSubspace::span(&[u, v])
    }

    /// Chart line with moduli `r_j` and torus angles `θ_j`.
    pub fn point(&self, moduli: &[f64], angles: &[f64]) -> Result<PluckerLine> {
        self.check_len(moduli.len())?;
        self.check_len(angles.len())?;
        let a: Vec<C64> = moduli.iter().zip(angles).map(|(&r, &t)| C64::from_polar(r.sqrt(), t)).collect();
        self.line(&a)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.k() {
            return Err(Error::DimensionMismatch { expected: self.k(), actual: len });
        }
        Ok(())
    }

    fn gram_inverse(&self, moduli: &[f64]) -> Matrix2<C64> {
        let mut g = self.gram;
        for (r, phi) in moduli.iter().zip(&self.functionals) {
            for a in 0..2 {
                for b in 0..2 {
                    g[(a, b)] += phi[a].conj() * phi[b] * *r;
                }
            }
        }
        let det = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)];
        Matrix2::new(g[(1, 1)], -g[(0, 1)], -g[(1, 0)], g[(0, 0)]) / det
    }

    /// `q_ij = φ_i G⁻¹ φ_j*`.
    fn pairing(&self, ginv: &Matrix2<C64>, i: usize, j: usize) -> C64 {
        let (pi, pj) = (&self.functionals[i], &self.functionals[j]);
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..2 {
            for b in 0..2 {
                acc += pi[a] * ginv[(a, b)] * pj[b].conj();
            }
        }
        acc
    }

    /// Closed-form moments of the chart line with moduli `r`.
    pub fn moments_of_moduli(&self, moduli: &[f64]) -> Vec<f64> {
        let ginv = self.gram_inverse(moduli);
        (0..self.k()).map(|i| moduli[i] * self.pairing(&ginv, i, i).re).collect()
    }

    /// `∂μ̃_i / ∂r_j = δ_ij q_ii − r_i |q_ij|²`.
    pub fn moment_jacobian(&self, moduli: &[f64]) -> DMatrix<f64> {
        let k = self.k();
        let ginv = self.gram_inverse(moduli);
        DMatrix::from_fn(k, k, |i, j| {
            let diag = if i == j { self.pairing(&ginv, i, i).re } else { 0.0 };
            diag - moduli[i] * self.pairing(&ginv, i, j).norm_sqr()
        })
    }

    fn residual(&self, log_moduli: &[f64], c: &[f64]) -> (Vec<f64>, f64) {
        let r: Vec<f64> = log_moduli.iter().map(|x| x.exp()).collect();
        let f: Vec<f64> = self.moments_of_moduli(&r).iter().zip(c).map(|(m, c)| m - c).collect();
        let norm = f.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
        (f, if norm.is_finite() { norm } else { f64::INFINITY })
    }

    /// Damped Newton in `log r`; returns the final iterate and residual.
    fn newton(&self, c: &[f64], mut x: Vec<f64>, max_iterations: usize) -> (Vec<f64>, f64, usize) {
        let k = self.k();
        let (mut f, mut norm) = self.residual(&x, c);
        let mut iterations = 0;
        while iterations < max_iterations && norm > 0.0 {
            iterations += 1;
            let r: Vec<f64> = x.iter().map(|v| v.exp()).collect();
            let mut jac = self.moment_jacobian(&r);
            for j in 0..k {
                for i in 0..k {
                    jac[(i, j)] *= r[j];
                }
            }
            let rhs = -DVector::from_column_slice(&f);
            let Some(step) = jac.lu().solve(&rhs) else { break };
            let largest = step.amax();
            let cap = if largest > 4.0 { 4.0 / largest } else { 1.0 };

            let mut lambda = cap;
            let mut accepted = false;
            while lambda > 1e-10 {
                let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, d)| a + lambda * d).collect();
                let (ft, nt) = self.residual(&trial, c);
                if nt < norm {
                    x = trial;
                    f = ft;
                    norm = nt;
                    accepted = true;
                    break;
                }
                lambda *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        (x, norm, iterations)
    }

    /// Nonlinear Gauss–Seidel: each `μ̃_i` is increasing in its own `r_i`,
    /// so every coordinate is solved by bisection in `log r_i`.
    fn coordinate_bisection(&self, c: &[f64], mut x: Vec<f64>, sweeps: usize) -> Vec<f64> {
        const BOUND: f64 = 80.0;
        for _ in 0..sweeps {
            for i in 0..self.k() {
                let (mut lo, mut hi) = (-BOUND, BOUND);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    x[i] = mid;
                    let (f, _) = self.residual(&x, c);
                    if f[i] < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo < 1e-14 {
                        break;
                    }
                }
                x[i] = 0.5 * (lo + hi);
            }
            if self.residual(&x, c).1 < 1e-8 {
                break;
            }
        }
        x
    }

    /// Moduli `r` with `μ̃(r) = c`.
    ///
    /// Starts damped Newton from `r_j = c_j / (1 − Σc)`, exact when all the
    /// marked points coincide, and falls back to coordinate bisection.
    pub fn solve_moduli(&self, c: &MomentVector, options: &SolverOptions) -> Result<Vec<f64>> {
        self.check_len(c.len())?;
        if !c.is_admissible_target() {
            return Err(Error::InvalidArgument(format!("moment targets {:?} are not admissible", c.values())));
        }
        let targets = c.values();
        let slack = 1.0 - c.sum();
        let start: Vec<f64> = targets.iter().map(|&ci| (ci / slack).ln()).collect();

        let (x, norm, used) = self.newton(targets, start, options.max_iterations);
        if norm < options.tolerance {
            return Ok(x.iter().map(|v| v.exp()).collect());
        }
        let budget = options.max_iterations.saturating_sub(used);
        let seeded = self.coordinate_bisection(targets, x, budget.max(1));
        let (x, norm, more) = self.newton(targets, seeded, budget.max(1));
        if norm < options.tolerance {
            return Ok(x.iter().map(|v| v.exp()).collect());
        }
        Err(Error::NoConvergence { iterations: used + more, residual: norm })
    }
}
