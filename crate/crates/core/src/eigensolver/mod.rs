//! Constrained minimisation of the discrete Rayleigh quotient.
//!
//! The first nontrivial Neumann eigenpair minimises
//! `R(f) = ||grad f||_p / ||f||_p` over fields with
//! `sum_i w_i |f_i|^(p-2) f_i = 0`. Iterates stay feasible: every trial point
//! is shifted back onto the constraint set and rescaled to unit p-norm.
//!
//! Search directions are gradient steps in a variable metric. At a feasible
//! `f` the Euclidean gradient of `R` is a positive multiple of
//!
//! ```text
//! r = K_a f - mu D_b f,   a_c = (|g_c| / max|g|)^(p-2),  b_i = w_i (|f_i| / max|f|)^(p-2)
//! ```
//!
//! where `K_a` is the stiffness matrix weighted by `a`, `D_b` is diagonal and
//! `mu` makes `r` orthogonal to `f`. Preconditioning `r` with the frozen
//! coefficient operator `K_a + sigma mu D_b` (a Kacanov linearisation) turns
//! the step into an inexact inverse iteration: it reduces to PINVIT at
//! `p = 2` and keeps its mesh independence for large `p`. Any direction of
//! the form `-M^-1 r` with `M` positive definite is a descent direction, so
//! the backtracking line search on `R` is always well posed.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::discretize::{cell_gradients, max_abs, relative_constraint, shift_root, weighted_norm, ScalarField, CONSTRAINT_TOL};
use crate::geometry::mesh::pairwise_sum;
use crate::geometry::{diameter, Domain, Mesh, Point};
use crate::linalg::GraphMatrix;
use crate::{Error, Result};

mod bounds;
mod sweep;

pub use bounds::{payne_weinberger_bound, upper_bound_certificate};
pub use sweep::{extrapolate_limit, sweep_p, Extrapolation, SweepReport, DEFAULT_SCHEDULE};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SolverOptions {
    pub max_iters: usize,
    /// First trial step of the line search, in units of the preconditioned
    /// direction.
    pub step0: f64,
    /// Step reduction factor while backtracking, in `(0, 1)`.
    pub backtrack: f64,
    /// Stop once an accepted step lowers `R` by less than this fraction.
    pub tol_rel: f64,
    pub seed: u64,
    /// Cold starts per exponent (different seeds); the best is kept.
    pub restarts: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            step0: 0.1,
            backtrack: 0.5,
            tol_rel: 1e-9,
            seed: 0,
            restarts: 3,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::arg("max_iters", "must be positive"));
        }
        if !(self.step0 > 0.0 && self.step0.is_finite()) {
            return Err(Error::arg("step0", "must be positive"));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::arg("backtrack", "must lie in (0, 1)"));
        }
        if !(self.tol_rel > 0.0 && self.tol_rel.is_finite()) {
            return Err(Error::arg("tol_rel", "must be positive"));
        }
        if self.restarts == 0 {
            return Err(Error::arg("restarts", "need at least one start"));
        }
        Ok(())
    }
}

/// One accepted iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceEntry {
    pub iteration: usize,
    pub rayleigh: f64,
    pub step: f64,
    pub constraint: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub p: f64,
    /// `||grad u||_p / ||u||_p`, the estimate of `Lambda_p`.
    pub lambda_p: f64,
    /// Unit p-norm, feasible, sign-normalised when it came from a solve on a
    /// domain.
    pub u: ScalarField,
    pub iterations: usize,
    /// Relative constraint value of `u` (see
    /// [`relative_constraint`](crate::discretize::relative_constraint)).
    pub final_constraint: f64,
    pub euler_residual: f64,
    /// `true` when the relative-decrease test (or a stalled line search)
    /// ended the iteration, `false` when `max_iters` ran out.
    pub converged: bool,
    /// Rayleigh value of the starting point after projection.
    pub initial_rayleigh: f64,
    /// Final Rayleigh values of every start that was tried, in order.
    pub candidates: Vec<f64>,
    pub trace: Vec<TraceEntry>,
}

impl EigenResult {
    /// Wrap an arbitrary field: project it onto the constraint, normalise it
    /// and evaluate its Rayleigh value and Euler residual.
    pub fn from_field(f: &ScalarField, p: f64, mesh: &Mesh) -> Result<Self> {
        f.check(mesh)?;
        check_exponent(p)?;
        let mut x = f.values().to_vec();
        feasible(&mut x, p, mesh)?;
        let u = ScalarField::new(mesh, x)?;
        let lambda_p = rayleigh(u.values(), p, mesh, &mut Vec::new());
        let mut res = Self {
            p,
            lambda_p,
            final_constraint: relative_constraint(&u, p, mesh)?,
            u,
            iterations: 0,
            euler_residual: 0.0,
            converged: false,
            initial_rayleigh: lambda_p,
            candidates: vec![lambda_p],
            trace: Vec::new(),
        };
        res.euler_residual = euler_residual(&res, mesh)?;
        Ok(res)
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::arg("p", alloc::format!("exponent must satisfy 1 < p < inf, got {p}")));
    }
    Ok(())
}

/// Shift onto the constraint set and scale to unit p-norm, in place.
fn feasible(x: &mut [f64], p: f64, mesh: &Mesh) -> Result<()> {
    let c = shift_root(x, mesh.vertex_weights(), p, CONSTRAINT_TOL)?;
    x.iter_mut().for_each(|v| *v -= c);
    let n = weighted_norm(x, mesh.vertex_weights(), p, mesh.volume());
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::ZeroField);
    }
    x.iter_mut().for_each(|v| *v /= n);
    Ok(())
}

/// `R(x)` for a field of unit p-norm (the denominator is taken as 1).
fn rayleigh(x: &[f64], p: f64, mesh: &Mesh, grads: &mut Vec<Point>) -> f64 {
    cell_gradients(x, mesh, grads);
    let mags: Vec<f64> = grads.iter().map(|g| g[0].hypot(g[1])).collect();
    weighted_norm(&mags, mesh.cell_measures(), p, mesh.volume())
}

/// Working storage for the preconditioned gradient iteration.
struct Stepper<'m> {
    mesh: &'m Mesh,
    p: f64,
    grads: Vec<Point>,
    cell_w: Vec<f64>,
    diag_w: Vec<f64>,
    residual: Vec<f64>,
    direction: Vec<f64>,
    precond: GraphMatrix,
}

/// Coefficient floor of the frozen operator: keeps it positive definite
/// where the gradient (or the field) is tiny compared with its maximum.
const WEIGHT_FLOOR: f64 = 1e-8;
/// Relative weight `sigma` of the mass term in the preconditioner.
const MASS_SHIFT: f64 = 1e-2;
/// Unit steps of the preconditioned direction damp high-frequency error by
/// about `sigma / (1 + sigma)` per iteration; longer steps help the smooth
/// error but let rough error survive, so the step never grows past 1.
const MAX_STEP: f64 = 1.0;

impl<'m> Stepper<'m> {
    fn new(mesh: &'m Mesh, p: f64) -> Self {
        let n = mesh.num_vertices();
        Self {
            mesh,
            p,
            grads: Vec::with_capacity(mesh.num_cells()),
            cell_w: vec![0.0; mesh.num_cells()],
            diag_w: vec![0.0; n],
            residual: vec![0.0; n],
            direction: vec![0.0; n],
            precond: GraphMatrix::new(mesh),
        }
    }

    /// Fill `direction` with `-M^-1 r` at the feasible point `f`.
    fn direction(&mut self, f: &[f64]) {
        let (mesh, p) = (self.mesh, self.p);
        cell_gradients(f, mesh, &mut self.grads);
        let gmax = self.grads.iter().fold(0.0f64, |m, g| m.max(g[0].hypot(g[1])));
        let fmax = max_abs(f);
        let mut num = Vec::with_capacity(mesh.num_cells());
        for (c, g) in self.grads.iter().enumerate() {
            let t = g[0].hypot(g[1]) / gmax;
            let a = t.powf(p - 2.0);
            num.push(mesh.cell_measures()[c] * a * t * t);
            self.cell_w[c] = a;
        }
        let mut den = Vec::with_capacity(f.len());
        let mut b = vec![0.0; f.len()];
        for (i, (&v, &w)) in f.iter().zip(mesh.vertex_weights()).enumerate() {
            let t = v.abs() / fmax;
            b[i] = w * t.powf(p - 2.0);
            den.push(b[i] * t * t);
        }
        // `num` and `den` are the energies of `f / fmax` and of its gradient
        // over `gmax`; undoing the scaling gives `mu = (f.K_a f) / (f.D_b f)`.
        let mu = pairwise_sum(&num) / pairwise_sum(&den) * (gmax / fmax) * (gmax / fmax);

        self.residual.iter_mut().for_each(|r| *r = 0.0);
        for c in 0..mesh.num_cells() {
            let s = mesh.cell_measures()[c] * self.cell_w[c];
            let g = self.grads[c];
            for (&v, bg) in mesh.cell(c).iter().zip(mesh.basis_gradients(c)) {
                self.residual[v] += s * (g[0] * bg[0] + g[1] * bg[1]);
            }
        }
        for i in 0..f.len() {
            self.residual[i] -= mu * b[i] * f[i];
        }

        let bmax = b.iter().zip(mesh.vertex_weights()).fold(0.0f64, |m, (b, w)| m.max(b / w));
        for c in 0..mesh.num_cells() {
            self.cell_w[c] = self.cell_w[c].max(WEIGHT_FLOOR);
        }
        for (i, &w) in mesh.vertex_weights().iter().enumerate() {
            self.diag_w[i] = MASS_SHIFT * mu * (b[i]).max(WEIGHT_FLOOR * bmax * w);
        }
        self.precond.assemble(mesh, &self.cell_w, &self.diag_w);
        // the energy is p-homogeneous, so its Hessian is about (p - 1) K_a
        let scale = 1.0 / (p - 1.0);
        let rhs: Vec<f64> = self.residual.iter().map(|r| -scale * r).collect();
        self.precond.solve_cg(&rhs, &mut self.direction, 1e-6, 2000);
    }
}

/// Minimise the Rayleigh quotient from `init` by preconditioned projected
/// gradient steps with a backtracking line search.
///
/// Returns the last accepted iterate, which is also the best one: accepted
/// steps strictly decrease `R`.
pub fn minimize_rayleigh(mesh: &Mesh, p: f64, init: &ScalarField, opts: &SolverOptions) -> Result<EigenResult> {
    init.check(mesh)?;
    check_exponent(p)?;
    opts.validate()?;
    let mut f = init.values().to_vec();
    feasible(&mut f, p, mesh)?;
    let mut grads = Vec::new();
    let mut r = rayleigh(&f, p, mesh, &mut grads);
    let initial_rayleigh = r;
    let mut trace = Vec::new();
    if !r.is_finite() {
        return Err(diverged(p, 0, "initial Rayleigh value is not finite", trace));
    }

    let mut st = Stepper::new(mesh, p);
    let mut step = opts.step0;
    let mut converged = false;
    let mut iterations = 0;
    let mut trial = vec![0.0; f.len()];
    while iterations < opts.max_iters {
        iterations += 1;
        st.direction(&f);
        let mut accepted = None;
        let mut s = step;
        for attempt in 0..60 {
            for i in 0..f.len() {
                trial[i] = f[i] + s * st.direction[i];
            }
            if feasible(&mut trial, p, mesh).is_ok() {
                let rt = rayleigh(&trial, p, mesh, &mut grads);
                if rt.is_nan() || rt == f64::INFINITY {
                    return Err(diverged(p, iterations, "Rayleigh value became non-finite", trace));
                }
                if rt < r {
                    accepted = Some((rt, attempt));
                    break;
                }
            }
            s *= opts.backtrack;
        }
        let Some((rt, attempt)) = accepted else {
            // no decrease at any step length: stationary to rounding
            converged = true;
            break;
        };
        core::mem::swap(&mut f, &mut trial);
        let decrease = (r - rt) / r;
        r = rt;
        let u = ScalarField::new(mesh, f.clone())?;
        trace.push(TraceEntry {
            iteration: iterations,
            rayleigh: r,
            step: s,
            constraint: relative_constraint(&u, p, mesh)?,
        });
        step = if attempt == 0 { (s / opts.backtrack).min(MAX_STEP) } else { s };
        if decrease < opts.tol_rel {
            converged = true;
            break;
        }
    }

    let u = ScalarField::new(mesh, f)?;
    let mut res = EigenResult {
        p,
        lambda_p: r,
        final_constraint: relative_constraint(&u, p, mesh)?,
        u,
        iterations,
        euler_residual: 0.0,
        converged,
        initial_rayleigh,
        candidates: vec![r],
        trace,
    };
    res.euler_residual = euler_residual(&res, mesh)?;
    Ok(res)
}

fn diverged(p: f64, iteration: usize, reason: &str, trace: Vec<TraceEntry>) -> Error {
    Error::Diverged {
        p,
        iteration,
        reason: String::from(reason),
        trace,
    }
}

/// Weak-form stationarity defect of `(lambda_p, u)`.
///
/// For every hat function `phi_i` this evaluates
/// `sum_c m_c |grad u|^(p-2) grad u . grad phi_i - Lambda^p w_i |u_i|^(p-2) u_i`,
/// divides it by `w_i` and by the eigenvalue-term scale
/// `Lambda^p max|u|^(p-1)`, and returns the maximum over `i`. Powers are
/// evaluated in log space. A field with no gradient gives exactly 1.
pub fn euler_residual(res: &EigenResult, mesh: &Mesh) -> Result<f64> {
    res.u.check(mesh)?;
    let p = res.p;
    let u = res.u.values();
    let m = max_abs(u);
    if m == 0.0 || !(res.lambda_p > 0.0) {
        return Ok(f64::INFINITY);
    }
    let log_scale = p * res.lambda_p.ln() + (p - 1.0) * m.ln();
    let mut acc = vec![0.0; u.len()];
    let mut grads = Vec::new();
    cell_gradients(u, mesh, &mut grads);
    for c in 0..mesh.num_cells() {
        let g = grads[c];
        let n = g[0].hypot(g[1]);
        if n == 0.0 {
            continue;
        }
        let s = mesh.cell_measures()[c] * ((p - 2.0) * n.ln() - log_scale).exp();
        for (&v, bg) in mesh.cell(c).iter().zip(mesh.basis_gradients(c)) {
            acc[v] += s * (g[0] * bg[0] + g[1] * bg[1]);
        }
    }
    let mut worst = 0.0f64;
    for (i, &w) in mesh.vertex_weights().iter().enumerate() {
        let t = u[i] / m;
        let eig = t.abs().powf(p - 2.0) * t;
        worst = worst.max((acc[i] / w - eig).abs());
    }
    Ok(worst)
}

/// Starting field: the coordinate along the primary diameter direction with
/// a 1% seeded perturbation to break symmetries.
pub fn initial_guess(domain: &Domain, mesh: &Mesh, seed: u64) -> Result<ScalarField> {
    let (a, b) = diameter(domain, None).primary();
    let e = [b[0] - a[0], b[1] - a[1]];
    let len = e[0].hypot(e[1]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = mesh
        .vertices()
        .iter()
        .map(|x| ((x[0] - a[0]) * e[0] + (x[1] - a[1]) * e[1]) / len)
        .collect();
    let amp = 0.01 * max_abs(&values);
    let values = values
        .into_iter()
        .map(|v| v + amp * rng.random_range(-1.0..1.0))
        .collect();
    ScalarField::new(mesh, values)
}

/// Flip `u` so that it is positive at the mesh vertex nearest to the
/// lexicographically smaller endpoint of the primary diameter pair.
pub fn normalize_sign(res: &mut EigenResult, domain: &Domain, mesh: &Mesh) {
    let (a, _) = diameter(domain, None).primary();
    let v = mesh.nearest_vertex(a);
    if res.u.values()[v] < 0.0 {
        res.u = res.u.scaled(-1.0);
    }
}

/// Best of `opts.restarts` cold starts (seeds `seed, seed + 1, ...`),
/// sign-normalised. `candidates` lists every start's final value.
pub fn solve(domain: &Domain, mesh: &Mesh, p: f64, opts: &SolverOptions) -> Result<EigenResult> {
    opts.validate()?;
    let mut best: Option<EigenResult> = None;
    let mut candidates = Vec::with_capacity(opts.restarts);
    for k in 0..opts.restarts {
        let init = initial_guess(domain, mesh, opts.seed.wrapping_add(k as u64))?;
        let res = minimize_rayleigh(mesh, p, &init, opts)?;
        candidates.push(res.lambda_p);
        if best.as_ref().is_none_or(|b| res.lambda_p < b.lambda_p) {
            best = Some(res);
        }
    }
    let mut best = best.expect("at least one start");
    best.candidates = candidates;
    normalize_sign(&mut best, domain, mesh);
    Ok(best)
}

/// Relative spread `(max - min) / min` of the candidate values.
pub fn restart_spread(res: &EigenResult) -> f64 {
    let lo = res.candidates.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = res.candidates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo > 0.0 {
        (hi - lo) / lo
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::{p_norm, rayleigh_quotient};
    use crate::geometry::build_mesh;
    use core::f64::consts::PI;

    fn interval(h: f64) -> (Domain, Mesh) {
        let d = Domain::interval(0.0, 1.0).unwrap();
        let m = build_mesh(&d, h).unwrap();
        (d, m)
    }

    #[test]
    fn options_validation() {
        assert!(SolverOptions::default().validate().is_ok());
        let bad = SolverOptions {
            backtrack: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn interval_p2() {
        let (d, m) = interval(1.0 / 256.0);
        let res = solve(&d, &m, 2.0, &SolverOptions::default()).unwrap();
        assert!((res.lambda_p - PI).abs() < 0.01 * PI, "{}", res.lambda_p);
        assert!((p_norm(&res.u, 2.0, &m).unwrap() - 1.0).abs() < 1e-9);
        assert!(res.final_constraint.abs() < 1e-9);
        assert!(res.u.values()[0] > 0.0);
        assert!(res.euler_residual < 1e-3, "{}", res.euler_residual);
    }

    #[test]
    fn trace_is_monotone() {
        let (d, m) = interval(1.0 / 64.0);
        let res = solve(&d, &m, 6.0, &SolverOptions::default()).unwrap();
        for w in res.trace.windows(2) {
            assert!(w[1].rayleigh < w[0].rayleigh);
        }
        assert!(res.lambda_p <= res.initial_rayleigh);
    }

    #[test]
    fn euler_residual_of_interpolated_cosine() {
        let (_, m) = interval(1.0 / 256.0);
        let f = ScalarField::from_fn(&m, |x| (PI * x[0]).cos()).unwrap();
        let res = EigenResult::from_field(&f, 2.0, &m).unwrap();
        assert!(res.euler_residual <= 5e-3, "{}", res.euler_residual);
    }

    #[test]
    fn euler_residual_of_constant_is_large() {
        let (_, m) = interval(1.0 / 64.0);
        let mut res = EigenResult::from_field(&ScalarField::from_fn(&m, |x| x[0]).unwrap(), 3.0, &m).unwrap();
        res.u = ScalarField::from_fn(&m, |_| 1.0).unwrap();
        assert!(euler_residual(&res, &m).unwrap() > 0.5);
    }

    #[test]
    fn constant_init_is_rejected() {
        let (_, m) = interval(0.125);
        let k = ScalarField::from_fn(&m, |_| 2.0).unwrap();
        assert_eq!(
            minimize_rayleigh(&m, 4.0, &k, &SolverOptions::default()).unwrap_err(),
            Error::ConstantField
        );
    }

    #[test]
    fn minimizer_beats_random_feasible_fields() {
        let (d, m) = interval(1.0 / 64.0);
        let p = 5.0;
        let res = solve(&d, &m, p, &SolverOptions::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let vals = m.vertices().iter().map(|x| x[0] + 0.3 * rng.random_range(-1.0..1.0)).collect();
            let f = ScalarField::new(&m, vals).unwrap();
            let g = crate::discretize::project_constraint(&f, p, &m).unwrap();
            assert!(res.lambda_p <= rayleigh_quotient(&g, p, &m).unwrap() + 1e-9);
        }
    }
}
