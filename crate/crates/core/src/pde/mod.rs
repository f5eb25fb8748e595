//! Desk-scale parabolic solver: backward-Euler time stepping over a
//! conservative two-point-flux finite-volume discretization of
//! du/dt - div(B grad u) = f, with homogeneous Dirichlet data on the
//! admissible boundary set A and zero conormal flux elsewhere.
//!
//! Only diagonal weight matrices are accepted; the constructions used
//! here are all of the form diag(b, bbar), and a two-point flux cannot
//! represent cross terms consistently.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::aux::{self, SLParams, SlFn};
use crate::grid::{
    check_sandwich, gradient, Grid, GridFunction, ParamChain, Shape, WeightField,
};
use crate::moser::{self, ProblemData};

#[derive(Debug, thiserror::Error)]
pub enum PdeError {
    #[error("weight matrix has off-diagonal entries at cell {0}; only diagonal B is supported")]
    OffDiagonalWeights(usize),
    #[error("weight sandwich failed at cell {0}")]
    SandwichFailed(usize),
    #[error("structure bound violated at cell {cell}: b^-1 a0^2 + a1 + a2 = {lhs} > a = {a}")]
    StructureViolation { cell: usize, lhs: f64, a: f64 },
    #[error("conjugate gradient stalled after {iters} iterations, relative residual {residual}")]
    CgDidNotConverge { iters: usize, residual: f64 },
    #[error("test function must vanish on the initial slice")]
    InadmissibleTest,
    #[error("convergence study needs at least 3 resolutions")]
    TooFewResolutions,
    #[error("errors did not decrease monotonically under refinement: {0:?}")]
    NonMonotoneErrors(Vec<f64>),
    #[error(transparent)]
    Moser(#[from] moser::MoserError),
}

/// Constant structure coefficients of the right-hand-side bound
/// |f| <= a0 |grad u| + a1 |u| + a2, with the aggregate a.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StructureFields {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub a: f64,
}

impl StructureFields {
    /// The simplest structure satisfying the bounds for a bounded source:
    /// a0 = a1 = 0, a2 = sup|f|, a = a2 + eps.
    pub fn for_bounded_source(f_sup: f64) -> Self {
        StructureFields {
            a0: 0.0,
            a1: 0.0,
            a2: f_sup,
            a: f_sup + 1e-9,
        }
    }
}

#[derive(Debug)]
pub struct ParabolicProblem {
    pub grid: Grid,
    pub weights: WeightField,
    pub f: GridFunction,
    pub structure: StructureFields,
}

impl ParabolicProblem {
    pub fn new(
        grid: Grid,
        weights: WeightField,
        f: GridFunction,
        structure: StructureFields,
    ) -> Result<Self, PdeError> {
        if let Err(fail) = check_sandwich(&weights) {
            return Err(PdeError::SandwichFailed(fail.cell));
        }
        for (cell, m) in weights.bmat.iter().enumerate() {
            if m[1] != 0.0 {
                return Err(PdeError::OffDiagonalWeights(cell));
            }
        }
        // per-cell structure bound b^-1 a0^2 + a1 + a2 <= a
        for (cell, &active) in grid.active.iter().enumerate() {
            if !active {
                continue;
            }
            let degenerate = if structure.a0 == 0.0 {
                0.0
            } else {
                structure.a0 * structure.a0 / weights.b[cell]
            };
            let lhs = degenerate + structure.a1 + structure.a2;
            if lhs > structure.a + 1e-12 {
                return Err(PdeError::StructureViolation {
                    cell,
                    lhs,
                    a: structure.a,
                });
            }
        }
        Ok(ParabolicProblem {
            grid,
            weights,
            f,
            structure,
        })
    }
}

/// Sparse symmetric stencil: per active cell the diagonal entry and the
/// (neighbor, coefficient) pairs of the stiffness operator.
struct Stencil {
    cells: Vec<usize>,
    diag: Vec<f64>,
    offdiag: Vec<Vec<(usize, f64)>>,
}

fn face_on_a(grid: &Grid, i: usize, j: usize, di: isize, dj: isize) -> bool {
    match grid.domain.shape {
        Shape::UnitSquare => {
            let m = grid.domain.a_faces;
            (di == -1 && i == 0 && m.left)
                || (di == 1 && i + 1 == grid.n && m.right)
                || (dj == -1 && j == 0 && m.bottom)
                || (dj == 1 && j + 1 == grid.n && m.top)
        }
        // ball and L-shape support only the whole-boundary configuration
        _ => true,
    }
}

fn assemble_stencil(grid: &Grid, w: &WeightField) -> Stencil {
    let n = grid.n;
    let mut sys = vec![usize::MAX; grid.ncells()];
    let mut cells = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if grid.is_active(i, j) {
                sys[grid.idx(i, j)] = cells.len();
                cells.push(grid.idx(i, j));
            }
        }
    }
    let m = cells.len();
    let mut diag = vec![0.0; m];
    let mut offdiag = vec![Vec::with_capacity(4); m];
    // axis component of B governing flux through the face: b11 for x
    // faces, b22 for y faces
    let axis_b = |cell: usize, di: isize| -> f64 {
        if di != 0 {
            w.bmat[cell][0]
        } else {
            w.bmat[cell][2]
        }
    };
    for (row, &cell) in cells.iter().enumerate() {
        let (i, j) = (cell % n, cell / n);
        for (di, dj) in [(-1isize, 0isize), (1, 0), (0, -1), (0, 1)] {
            let (ni, nj) = (i as isize + di, j as isize + dj);
            let neighbor = if ni >= 0 && nj >= 0 && (ni as usize) < n && (nj as usize) < n {
                let ncell = grid.idx(ni as usize, nj as usize);
                if grid.active[ncell] {
                    Some(ncell)
                } else {
                    None
                }
            } else {
                None
            };
            match neighbor {
                Some(ncell) => {
                    // face-averaged coefficient, transmissibility b_face
                    let t = 0.5 * (axis_b(cell, di) + axis_b(ncell, di));
                    diag[row] += t;
                    offdiag[row].push((sys[ncell], -t));
                }
                None => {
                    if face_on_a(grid, i, j, di, dj) {
                        // ghost value -u enforces u = 0 on the face
                        diag[row] += 2.0 * axis_b(cell, di);
                    }
                    // otherwise zero flux: no contribution
                }
            }
        }
    }
    Stencil {
        cells,
        diag,
        offdiag,
    }
}

fn apply(st: &Stencil, shift: f64, x: &[f64], out: &mut [f64]) {
    for row in 0..st.cells.len() {
        let mut acc = (st.diag[row] + shift) * x[row];
        for &(col, v) in &st.offdiag[row] {
            acc += v * x[col];
        }
        out[row] = acc;
    }
}

const CG_TOL: f64 = 1e-10;

fn conjugate_gradient(
    st: &Stencil,
    shift: f64,
    rhs: &[f64],
    x: &mut [f64],
) -> Result<(), PdeError> {
    let m = rhs.len();
    let rhs_norm = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    if rhs_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(());
    }
    let mut r = vec![0.0; m];
    apply(st, shift, x, &mut r);
    for i in 0..m {
        r[i] = rhs[i] - r[i];
    }
    let mut p = r.clone();
    let mut rr: f64 = r.iter().map(|v| v * v).sum();
    let mut ap = vec![0.0; m];
    let cap = 40 * m + 100;
    for _ in 0..cap {
        if rr.sqrt() <= CG_TOL * rhs_norm {
            return Ok(());
        }
        apply(st, shift, &p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        let alpha = rr / pap;
        for i in 0..m {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new: f64 = r.iter().map(|v| v * v).sum();
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..m {
            p[i] = r[i] + beta * p[i];
        }
    }
    Err(PdeError::CgDidNotConverge {
        iters: cap,
        residual: rr.sqrt() / rhs_norm,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveStats {
    pub steps: usize,
    pub unknowns: usize,
}

/// March the implicit scheme over all time steps. The returned field has
/// a zero initial slice and solver values on slices 1..=nt.
pub fn assemble_and_solve(p: &ParabolicProblem) -> Result<(GridFunction, SolveStats), PdeError> {
    let grid = &p.grid;
    let st = assemble_stencil(grid, &p.weights);
    let m = st.cells.len();
    // volume-scaled system: (h^2/dt) u + K u = (h^2/dt) u_prev + h^2 f
    let h2 = grid.h * grid.h;
    let shift = h2 / grid.dt;
    let mut u = GridFunction::zeros(grid);
    let mut prev = vec![0.0; m];
    let mut x = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    for k in 1..=grid.nt {
        for (row, &cell) in st.cells.iter().enumerate() {
            let (i, j) = (cell % grid.n, cell / grid.n);
            rhs[row] = shift * prev[row] + h2 * p.f.at(k, i, j);
        }
        conjugate_gradient(&st, shift, &rhs, &mut x)?;
        for (row, &cell) in st.cells.iter().enumerate() {
            let (i, j) = (cell % grid.n, cell / grid.n);
            *u.at_mut(k, i, j) = x[row];
        }
        prev.copy_from_slice(&x);
    }
    Ok((
        u,
        SolveStats {
            steps: grid.nt,
            unknowns: m,
        },
    ))
}

/// Residual of the discrete weak identity against one admissible test
/// function: the assembled operator row-sums tested with phi. Admissible
/// means the initial slice of phi vanishes; the A-vanishing is built
/// into the discrete bilinear form itself.
pub fn weak_residual(
    u: &GridFunction,
    p: &ParabolicProblem,
    phi: &GridFunction,
) -> Result<f64, PdeError> {
    let grid = &p.grid;
    for j in 0..grid.n {
        for i in 0..grid.n {
            if grid.is_active(i, j) && phi.at(0, i, j) != 0.0 {
                return Err(PdeError::InadmissibleTest);
            }
        }
    }
    let st = assemble_stencil(grid, &p.weights);
    let m = st.cells.len();
    let h2 = grid.h * grid.h;
    let mut total = 0.0;
    let mut uk = vec![0.0; m];
    let mut ku = vec![0.0; m];
    for k in 1..=grid.nt {
        for (row, &cell) in st.cells.iter().enumerate() {
            let (i, j) = (cell % grid.n, cell / grid.n);
            uk[row] = u.at(k, i, j);
        }
        apply(&st, 0.0, &uk, &mut ku);
        for (row, &cell) in st.cells.iter().enumerate() {
            let (i, j) = (cell % grid.n, cell / grid.n);
            let du = (u.at(k, i, j) - u.at(k - 1, i, j)) / grid.dt;
            let res_row = h2 * du + ku[row] - h2 * p.f.at(k, i, j);
            total += grid.dt * phi.at(k, i, j) * res_row;
        }
    }
    Ok(total.abs())
}

/// A random admissible test function: trigonometric modes scaled by the
/// distance-to-A cutoff and a time ramp vanishing at t = 0.
pub fn random_admissible_test(grid: &Grid, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.gen_range(-1.0..1.0),
                rng.gen_range(1.0..4.0f64).round(),
                rng.gen_range(1.0..4.0f64).round(),
            )
        })
        .collect();
    let t_final = grid.domain.t_final;
    GridFunction::from_fn(grid, |x, y, t| {
        let mut v = 0.0;
        for &(c, kx, ky) in &modes {
            v += c * (std::f64::consts::PI * kx * x).sin() * (std::f64::consts::PI * ky * y).cos();
        }
        v * grid.domain.distance_to_a(x, y) * (t / t_final)
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub resolutions: Vec<usize>,
    pub errors: Vec<f64>,
    pub order: f64,
}

/// Manufactured solution u*(x,y,t) = t sin(pi x) sin(pi y) on the unit
/// square with full Dirichlet boundary; measures the final-time L2
/// error under refinement with dt proportional to h^2 and returns the
/// least-squares slope of log error against log h.
pub fn manufactured_convergence(resolutions: &[usize]) -> Result<ConvergenceReport, PdeError> {
    if resolutions.len() < 3 {
        return Err(PdeError::TooFewResolutions);
    }
    let mut errors = Vec::with_capacity(resolutions.len());
    for &n in resolutions {
        errors.push(manufactured_error(n)?);
    }
    for w in errors.windows(2) {
        if w[1] >= w[0] {
            return Err(PdeError::NonMonotoneErrors(errors));
        }
    }
    let order = least_squares_slope(
        &resolutions
            .iter()
            .map(|&n| (1.0 / n as f64).ln())
            .collect::<Vec<_>>(),
        &errors.iter().map(|e| e.ln()).collect::<Vec<_>>(),
    );
    Ok(ConvergenceReport {
        resolutions: resolutions.to_vec(),
        errors,
        order,
    })
}

/// Final-time L2 error of the manufactured case at one resolution.
pub fn manufactured_error(n: usize) -> Result<f64, PdeError> {
    let pi = std::f64::consts::PI;
    let t_final = 0.25;
    let d = crate::grid::Domain::new(Shape::UnitSquare, crate::grid::FaceMask::all(), t_final)
        .unwrap();
    let h = 1.0 / n as f64;
    let nt = (t_final / (h * h)).round() as usize;
    let grid = Grid::new(d, n, nt);
    let exact = |x: f64, y: f64, t: f64| t * (pi * x).sin() * (pi * y).sin();
    let f = GridFunction::from_fn(&grid, |x, y, t| {
        (pi * x).sin() * (pi * y).sin() * (1.0 + 2.0 * pi * pi * t)
    });
    let w = WeightField::identity(&grid);
    let p = ParabolicProblem::new(grid, w, f, StructureFields::for_bounded_source(30.0))?;
    let (u, _) = assemble_and_solve(&p)?;
    let grid = &p.grid;
    let mut err2 = 0.0;
    for j in 0..grid.n {
        for i in 0..grid.n {
            let (x, y) = grid.center(i, j);
            let e = u.at(grid.nt, i, j) - exact(x, y, t_final);
            err2 += e * e * grid.h * grid.h;
        }
    }
    Ok(err2.sqrt())
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyReport {
    pub sup_norm: f64,
    pub u_alpha_norm: f64,
    pub bound: moser::BoundReport,
    pub log10_bound: f64,
    /// log10(bound) - log10(sup); infinite for the zero solution
    pub log10_slack: f64,
    /// pointwise source bound |f| <= a0 |grad u| + a1 |u| + a2; a
    /// violation puts the run outside the hypotheses and is reported,
    /// not asserted
    pub source_bound_ok: bool,
}

/// Solve, compute the alpha-norm, feed the constant pipeline, and check
/// the sup-norm against the certified bound.
pub fn bound_consistency(
    p: &ParabolicProblem,
    chain: &ParamChain,
    c_adm: f64,
    alpha: f64,
) -> Result<ConsistencyReport, PdeError> {
    let (u, _) = assemble_and_solve(p)?;
    let grid = &p.grid;
    // pointwise structure check on the solved field
    let mut source_bound_ok = true;
    'outer: for k in 1..=grid.nt {
        for j in 0..grid.n {
            for i in 0..grid.n {
                if !grid.is_active(i, j) {
                    continue;
                }
                let (gx, gy) = gradient(grid, &u, k, i, j);
                let bound = p.structure.a0 * gx.hypot(gy)
                    + p.structure.a1 * u.at(k, i, j).abs()
                    + p.structure.a2;
                if p.f.at(k, i, j).abs() > bound + 1e-9 {
                    source_bound_ok = false;
                    break 'outer;
                }
            }
        }
    }
    let q = grid.q_measure();
    // constant aggregate a: its norm in L^(rbar/(rbar-2)) is a |Q|^((rbar-2)/rbar)
    let a_norm = p.structure.a * q.powf((chain.rbar - 2.0) / chain.rbar);
    let mut alpha_acc = 0.0;
    let cell_meas = grid.h * grid.h * grid.dt;
    for k in 1..=grid.nt {
        for j in 0..grid.n {
            for i in 0..grid.n {
                if grid.is_active(i, j) {
                    alpha_acc += u.at(k, i, j).abs().powf(alpha) * cell_meas;
                }
            }
        }
    }
    let u_alpha_norm = alpha_acc.powf(1.0 / alpha);
    let data = ProblemData::new(*chain, q, c_adm, a_norm, alpha, u_alpha_norm)?;
    let rep = moser::compute_bound(&data)?;
    let sup = u.sup_norm();
    let log10_slack = if sup > 0.0 {
        rep.log10_bound - sup.log10()
    } else {
        f64::INFINITY
    };
    assert!(
        sup <= 0.0 || sup.log10() <= rep.log10_bound,
        "sup-norm exceeded the certified bound"
    );
    Ok(ConsistencyReport {
        sup_norm: sup,
        u_alpha_norm,
        log10_bound: rep.log10_bound,
        bound: rep,
        log10_slack,
        source_bound_ok,
    })
}

/// Both sides of the energy inequality with the unit cutoff: the L^r
/// norm squared of v = F(u+) against the structure-bound pairing with
/// the companion function G(u+). Each side is computed independently
/// with discrete norms.
pub fn energy_inequality_sides(
    u: &GridFunction,
    p: &ParabolicProblem,
    chain: &ParamChain,
    c_adm: f64,
    s: f64,
    l: f64,
) -> (f64, f64) {
    let grid = &p.grid;
    let params = SLParams::new(s, l).unwrap();
    let c0 = aux::constants().c0;
    let cell_meas = grid.h * grid.h * grid.dt;
    let mut lhs_acc = 0.0;
    let mut rhs_acc = 0.0;
    for k in 1..=grid.nt {
        for j in 0..grid.n {
            for i in 0..grid.n {
                if !grid.is_active(i, j) {
                    continue;
                }
                let w = u.at(k, i, j).max(0.0);
                let v = aux::eval_sl(SlFn::F, &params, w).unwrap();
                let phi = aux::eval_sl(SlFn::G, &params, w).unwrap();
                let (gx, gy) = gradient(grid, u, k, i, j);
                let src = p.structure.a0 * gx.hypot(gy)
                    + p.structure.a1 * u.at(k, i, j).abs()
                    + p.structure.a2;
                lhs_acc += v.powf(chain.r) * cell_meas;
                rhs_acc += src * phi * cell_meas;
            }
        }
    }
    let lhs = lhs_acc.powf(2.0 / chain.r);
    let rhs = c_adm * c_adm * c0 * rhs_acc;
    (lhs, rhs)
}

/// Row-major CSV snapshot of one time slice: header `x,y,value`, one row
/// per cell of the bounding grid (inactive cells carry 0).
pub fn snapshot_csv(u: &GridFunction, grid: &Grid, k: usize) -> String {
    let mut out = String::from("x,y,value\n");
    for j in 0..grid.n {
        for i in 0..grid.n {
            let (x, y) = grid.center(i, j);
            out.push_str(&format!("{x},{y},{}\n", u.at(k, i, j)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forge::{build_distance_weight, DistanceWeightSpec};
    use crate::grid::{derive_params, Domain, FaceMask};

    fn square(t_final: f64) -> Domain {
        Domain::new(Shape::UnitSquare, FaceMask::all(), t_final).unwrap()
    }

    fn heat_problem(n: usize, nt: usize) -> ParabolicProblem {
        let grid = Grid::new(square(1.0), n, nt);
        let f = GridFunction::from_fn(&grid, |_, _, _| 1.0);
        let w = WeightField::identity(&grid);
        ParabolicProblem::new(grid, w, f, StructureFields::for_bounded_source(1.0)).unwrap()
    }

    #[test]
    fn zero_source_zero_solution() {
        let grid = Grid::new(square(1.0), 8, 4);
        let f = GridFunction::zeros(&grid);
        let w = WeightField::identity(&grid);
        let p = ParabolicProblem::new(grid, w, f, StructureFields::for_bounded_source(0.0))
            .unwrap();
        let (u, stats) = assemble_and_solve(&p).unwrap();
        assert_eq!(stats.unknowns, 64);
        assert_eq!(u.sup_norm(), 0.0);
    }

    #[test]
    fn manufactured_error_shrinks_second_order() {
        let e16 = manufactured_error(16).unwrap();
        let e32 = manufactured_error(32).unwrap();
        let ratio = e16 / e32;
        assert!((3.0..6.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn weak_residual_small_for_solver_output() {
        let p = heat_problem(16, 8);
        let (u, _) = assemble_and_solve(&p).unwrap();
        let w = WeightField::identity(&p.grid);
        for seed in 0..10u64 {
            let phi = random_admissible_test(&p.grid, seed);
            let res = weak_residual(&u, &p, &phi).unwrap();
            let scale = crate::grid::weighted_norms(&phi, &w, &p.grid, &[2.0])
                .unwrap()
                .v_b_t
                .max(1.0);
            assert!(res <= 1e-8 * scale, "residual {res} vs scale {scale}");
        }
    }

    #[test]
    fn weak_residual_jumps_under_perturbation() {
        let p = heat_problem(8, 4);
        let (mut u, _) = assemble_and_solve(&p).unwrap();
        let phi = random_admissible_test(&p.grid, 1);
        let base = weak_residual(&u, &p, &phi).unwrap();
        *u.at_mut(2, 4, 4) += 1.0;
        let bumped = weak_residual(&u, &p, &phi).unwrap();
        assert!(bumped > base + 1e-6, "{base} -> {bumped}");
    }

    #[test]
    fn zero_test_function_zero_residual() {
        let p = heat_problem(8, 4);
        let (u, _) = assemble_and_solve(&p).unwrap();
        let phi = GridFunction::zeros(&p.grid);
        assert_eq!(weak_residual(&u, &p, &phi).unwrap(), 0.0);
    }

    #[test]
    fn nonzero_initial_slice_rejected() {
        let p = heat_problem(8, 4);
        let (u, _) = assemble_and_solve(&p).unwrap();
        let mut phi = GridFunction::zeros(&p.grid);
        *phi.at_mut(0, 3, 3) = 1.0;
        assert!(matches!(
            weak_residual(&u, &p, &phi),
            Err(PdeError::InadmissibleTest)
        ));
    }

    #[test]
    fn maximum_principle_nonnegative() {
        let p = heat_problem(16, 8);
        let (u, _) = assemble_and_solve(&p).unwrap();
        let scale = u.sup_norm();
        assert!(u.values.iter().all(|&v| v >= -1e-9 * scale));
    }

    #[test]
    fn degenerate_weight_solves() {
        let grid = Grid::new(square(0.5), 16, 8);
        let w = build_distance_weight(&DistanceWeightSpec::new(0.2, 1.0).unwrap(), &grid);
        let f = GridFunction::from_fn(&grid, |_, _, _| 1.0);
        let p = ParabolicProblem::new(grid, w, f, StructureFields::for_bounded_source(1.0))
            .unwrap();
        let (u, _) = assemble_and_solve(&p).unwrap();
        assert!(u.sup_norm().is_finite());
        assert!(u.sup_norm() > 0.0);
    }

    #[test]
    fn off_diagonal_and_structure_rejections() {
        let grid = Grid::new(square(1.0), 4, 2);
        let f = GridFunction::zeros(&grid);
        let mut w = WeightField::identity(&grid);
        w.bmat[3][1] = 0.1;
        w.b[3] = 0.5;
        w.bbar[3] = 1.5;
        assert!(matches!(
            ParabolicProblem::new(grid.clone(), w, f.clone(), StructureFields::for_bounded_source(0.0)),
            Err(PdeError::OffDiagonalWeights(3))
        ));
        let w = WeightField::identity(&grid);
        let bad = StructureFields {
            a0: 0.0,
            a1: 1.0,
            a2: 1.0,
            a: 0.5,
        };
        assert!(matches!(
            ParabolicProblem::new(grid, w, f, bad),
            Err(PdeError::StructureViolation { .. })
        ));
    }

    #[test]
    fn chain_rule_fidelity() {
        // composing the capped power family with a smooth field commutes
        // with the discrete gradient up to O(h) |grad u|^2 terms
        let grid = Grid::new(square(1.0), 64, 1);
        let u = GridFunction::from_fn(&grid, |x, y, _| 1.0 + 0.5 * (x + 2.0 * y));
        let params = SLParams::new(2.0, 3.0).unwrap();
        let v = GridFunction::from_fn(&grid, |x, y, _| {
            aux::eval_sl(SlFn::F, &params, 1.0 + 0.5 * (x + 2.0 * y)).unwrap()
        });
        for (i, j) in [(10, 10), (32, 20), (50, 55)] {
            let (ux, uy) = gradient(&grid, &u, 1, i, j);
            let (vx, vy) = gradient(&grid, &v, 1, i, j);
            let w = u.at(1, i, j);
            let fp = aux::eval_sl(SlFn::FPrime, &params, w).unwrap();
            let grad_mag2 = ux * ux + uy * uy;
            let tol = 10.0 * grid.h * grad_mag2 + 1e-12;
            assert!((vx - fp * ux).abs() <= tol, "{} vs {}", vx, fp * ux);
            assert!((vy - fp * uy).abs() <= tol);
        }
    }

    #[test]
    fn energy_inequality_unit_cutoff() {
        let p = heat_problem(16, 8);
        let (u, _) = assemble_and_solve(&p).unwrap();
        let chain = derive_params(2, 1.6, 0.5).unwrap();
        let (lhs, rhs) = energy_inequality_sides(&u, &p, &chain, 2.0, 2.0, 3.0);
        assert!(lhs <= rhs, "lhs {lhs} vs rhs {rhs}");
        assert!(rhs.is_finite());
    }

    #[test]
    fn bound_consistency_zero_problem() {
        let grid = Grid::new(square(1.0), 8, 4);
        let f = GridFunction::zeros(&grid);
        let w = WeightField::identity(&grid);
        let p = ParabolicProblem::new(grid, w, f, StructureFields::for_bounded_source(0.0))
            .unwrap();
        let chain = derive_params(2, 1.6, 0.5).unwrap();
        let rep = bound_consistency(&p, &chain, 2.0, 9.0).unwrap();
        assert_eq!(rep.sup_norm, 0.0);
        assert!(rep.log10_bound >= 0.0);
        assert!(rep.log10_slack.is_infinite());
    }

    #[test]
    fn bound_consistency_heat_problem() {
        let p = heat_problem(16, 8);
        let chain = derive_params(2, 1.6, 0.5).unwrap();
        let rep = bound_consistency(&p, &chain, 2.0, 9.0).unwrap();
        assert!(rep.sup_norm > 0.0);
        assert!(rep.log10_slack > 0.0);
        assert!(rep.source_bound_ok);
    }

    #[test]
    fn snapshot_csv_shape() {
        let grid = Grid::new(square(1.0), 4, 2);
        let u = GridFunction::from_fn(&grid, |x, y, _| x + y);
        let csv = snapshot_csv(&u, &grid, 1);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x,y,value");
        assert_eq!(lines.len(), 17);
        assert!(lines[1].starts_with("0.125,0.125,"));
    }

    #[test]
    fn ball_geometry_solves() {
        let d = Domain::new(Shape::UnitBall, FaceMask::all(), 1.0).unwrap();
        let grid = Grid::new(d, 16, 8);
        let f = GridFunction::from_fn(&grid, |_, _, _| 1.0);
        let w = WeightField::identity(&grid);
        let p = ParabolicProblem::new(grid, w, f, StructureFields::for_bounded_source(1.0))
            .unwrap();
        let (u, stats) = assemble_and_solve(&p).unwrap();
        assert!(stats.unknowns < 256);
        assert!(u.sup_norm() > 0.0);
    }
}
