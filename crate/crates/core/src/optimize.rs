//! Maximizing discrimination probabilities: a deterministic lattice scan followed
//! by downhill-simplex refinement.
//!
//! Hamiltonians are parameterized by `(α, ξ, t₁)` with `r = 0` and `t = J = 1`;
//! `r` only contributes a global phase to the propagator.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::hamiltonian::{propagator, PTParams};
use crate::signaling::global_probability;
use crate::states::{make_state, StateSpec};

/// Largest α scanned; keeps clear of the exceptional point at π/2.
pub const ALPHA_MAX: f64 = FRAC_PI_2 - 1e-3;
pub const MAX_LATTICE: u64 = 100_000_000;
pub const MAX_DIM: usize = 5;
pub const MAX_EVALUATIONS: usize = 10_000;
pub const DEFAULT_REFINE_TOL: f64 = 1e-12;

pub type Objective = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coordinate {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
}

impl Coordinate {
    pub fn new(name: &str, lo: f64, hi: f64) -> Self {
        Self {
            name: name.to_string(),
            lo,
            hi,
        }
    }
}

/// A named objective over a full parameter vector, its bounds and any pinned coordinates.
#[derive(Clone)]
pub struct OptProblem {
    pub name: String,
    coords: Vec<Coordinate>,
    pins: BTreeMap<String, f64>,
    objective: Objective,
}

impl fmt::Debug for OptProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OptProblem")
            .field("name", &self.name)
            .field("coords", &self.coords)
            .field("pins", &self.pins)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub params: BTreeMap<String, f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub problem: String,
    pub best_value: f64,
    pub argmax: BTreeMap<String, f64>,
    pub evaluations: usize,
    pub trace: Option<Vec<TracePoint>>,
}

impl OptProblem {
    pub fn new(name: &str, coords: Vec<Coordinate>, objective: Objective) -> Result<Self> {
        for c in &coords {
            if !(c.lo <= c.hi) || !c.lo.is_finite() || !c.hi.is_finite() {
                return Err(invalid(format!("empty bounds for `{}`: [{}, {}]", c.name, c.lo, c.hi)));
            }
        }
        Ok(Self {
            name: name.to_string(),
            coords,
            pins: BTreeMap::new(),
            objective,
        })
    }

    /// Fixes a coordinate; it is removed from the search space.
    pub fn pin(mut self, name: &str, value: f64) -> Result<Self> {
        let c = self
            .coords
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| invalid(format!("problem `{}` has no coordinate `{name}`", self.name)))?;
        if !(c.lo..=c.hi).contains(&value) {
            return Err(invalid(format!(
                "pin {name} = {value} outside [{}, {}]",
                c.lo, c.hi
            )));
        }
        self.pins.insert(name.to_string(), value);
        Ok(self)
    }

    pub fn coordinates(&self) -> &[Coordinate] {
        &self.coords
    }

    pub fn pins(&self) -> &BTreeMap<String, f64> {
        &self.pins
    }

    /// Indices of the unpinned coordinates, in declaration order.
    pub fn free(&self) -> Vec<usize> {
        (0..self.coords.len())
            .filter(|&i| !self.pins.contains_key(&self.coords[i].name))
            .collect()
    }

    fn full(&self, free: &[usize], z: &[f64]) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .coords
            .iter()
            .map(|c| self.pins.get(&c.name).copied().unwrap_or(c.lo))
            .collect();
        for (&i, &x) in free.iter().zip(z) {
            v[i] = x;
        }
        v
    }

    fn named(&self, full: &[f64]) -> BTreeMap<String, f64> {
        self.coords.iter().zip(full).map(|(c, &v)| (c.name.clone(), v)).collect()
    }

    /// Objective at a full parameter vector. NaN counts as −∞.
    pub fn eval(&self, full: &[f64]) -> f64 {
        let v = (self.objective)(full);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    }

    /// Objective at named parameters; pins override, missing names are errors.
    pub fn eval_named(&self, params: &BTreeMap<String, f64>) -> Result<f64> {
        Ok(self.eval(&self.resolve(params)?))
    }

    fn resolve(&self, params: &BTreeMap<String, f64>) -> Result<Vec<f64>> {
        self.coords
            .iter()
            .map(|c| {
                if let Some(&p) = self.pins.get(&c.name) {
                    return Ok(p);
                }
                let v = *params
                    .get(&c.name)
                    .ok_or_else(|| invalid(format!("missing start value for `{}`", c.name)))?;
                if !(c.lo..=c.hi).contains(&v) {
                    return Err(invalid(format!(
                        "start {} = {v} outside [{}, {}]",
                        c.name, c.lo, c.hi
                    )));
                }
                Ok(v)
            })
            .collect()
    }
}

fn ghz_value(theta: f64, xi: f64, alpha: f64, t1: f64) -> f64 {
    family_value(&StateSpec::Ghz { theta }, alpha, xi, t1)
}

fn family_value(spec: &StateSpec, alpha: f64, xi: f64, t1: f64) -> f64 {
    let run = || -> Result<f64> {
        let u = propagator(&PTParams::from_alpha(alpha, xi, t1)?).matrix;
        global_probability(&make_state(spec)?, &u)
    };
    run().unwrap_or(f64::NAN)
}

/// `P_GHZ` over `(theta, xi, alpha, t1)`.
pub fn ghz_problem() -> OptProblem {
    OptProblem::new(
        "p_ghz",
        vec![
            Coordinate::new("theta", 0.0, FRAC_PI_2),
            Coordinate::new("xi", 0.0, PI),
            Coordinate::new("alpha", 0.0, ALPHA_MAX),
            Coordinate::new("t1", 0.0, PI),
        ],
        Arc::new(|v: &[f64]| ghz_value(v[0], v[1], v[2], v[3])),
    )
    .expect("static bounds")
}

/// `P_W` over `(theta, phi, xi, alpha, t1)`.
pub fn w_problem() -> OptProblem {
    OptProblem::new(
        "p_w",
        vec![
            Coordinate::new("theta", 0.0, FRAC_PI_2),
            Coordinate::new("phi", 0.0, FRAC_PI_2),
            Coordinate::new("xi", 0.0, PI),
            Coordinate::new("alpha", 0.0, ALPHA_MAX),
            Coordinate::new("t1", 0.0, PI),
        ],
        Arc::new(|v: &[f64]| family_value(&StateSpec::W { theta: v[0], phi: v[1] }, v[3], v[2], v[4])),
    )
    .expect("static bounds")
}

/// `P_GHZ′` for the rotated-basis state on the surface `y = 0`, `x = ξ`,
/// over `(theta, xi, alpha, t1)`.
pub fn rotated_surface_problem() -> OptProblem {
    OptProblem::new(
        "p_ghz_rotated",
        vec![
            Coordinate::new("theta", 0.0, FRAC_PI_2),
            Coordinate::new("xi", 0.0, PI),
            Coordinate::new("alpha", 0.0, ALPHA_MAX),
            Coordinate::new("t1", 0.0, PI),
        ],
        Arc::new(|v: &[f64]| {
            family_value(&StateSpec::RotatedGhz { theta: v[0], x: v[1], y: 0.0 }, v[2], v[1], v[3])
        }),
    )
    .expect("static bounds")
}

fn lattice(c: &Coordinate, points: usize, k: usize) -> f64 {
    if k + 1 == points {
        c.hi
    } else {
        c.lo + (c.hi - c.lo) * k as f64 / (points - 1) as f64
    }
}

fn lattice_point(problem: &OptProblem, free: &[usize], points: usize, mut idx: u64) -> Vec<f64> {
    let mut z = vec![0.0; free.len()];
    for d in (0..free.len()).rev() {
        let k = (idx % points as u64) as usize;
        idx /= points as u64;
        z[d] = lattice(&problem.coords[free[d]], points, k);
    }
    problem.full(free, &z)
}

/// Lattice size after validating the scan request.
fn lattice_size(dim: usize, points: usize) -> Result<u64> {
    if points < 2 {
        return Err(invalid(format!("points_per_dim must be at least 2, got {points}")));
    }
    if dim > MAX_DIM {
        return Err(invalid(format!("grid scans support at most {MAX_DIM} free coordinates, got {dim}")));
    }
    let mut total: u64 = 1;
    for _ in 0..dim {
        total = total
            .checked_mul(points as u64)
            .filter(|&t| t <= MAX_LATTICE)
            .ok_or_else(|| invalid(format!("lattice of {points}^{dim} points exceeds the budget of {MAX_LATTICE}")))?;
    }
    Ok(total)
}

/// Better of two `(value, index)` pairs; ties go to the lower index.
fn better(a: (f64, u64), b: (f64, u64)) -> (f64, u64) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

/// The `k` best lattice points, best first, found in one deterministic pass.
fn scan_top(problem: &OptProblem, points: usize, k: usize) -> Result<(Vec<(f64, u64)>, u64)> {
    let free = problem.free();
    let total = lattice_size(free.len(), points)?;
    let merge = |mut a: Vec<(f64, u64)>, b: Vec<(f64, u64)>| {
        for item in b {
            insert_top(&mut a, item, k);
        }
        a
    };
    let top = (0..total)
        .into_par_iter()
        .fold(Vec::new, |mut acc, idx| {
            let v = problem.eval(&lattice_point(problem, &free, points, idx));
            insert_top(&mut acc, (v, idx), k);
            acc
        })
        .reduce(Vec::new, merge);
    Ok((top, total))
}

fn insert_top(top: &mut Vec<(f64, u64)>, item: (f64, u64), k: usize) {
    let pos = top
        .iter()
        .position(|&cur| better(cur, item) == item && cur != item)
        .unwrap_or(top.len());
    if pos < k {
        top.insert(pos, item);
        top.truncate(k);
    }
}

/// Evaluates every lattice point; on ties the lowest lattice index (the
/// lexicographically smallest parameter vector) wins.
pub fn grid_scan(problem: &OptProblem, points_per_dim: usize) -> Result<OptResult> {
    let (top, total) = scan_top(problem, points_per_dim, 1)?;
    let (value, idx) = top[0];
    let free = problem.free();
    Ok(OptResult {
        problem: problem.name.clone(),
        best_value: value,
        argmax: problem.named(&lattice_point(problem, &free, points_per_dim, idx)),
        evaluations: total as usize,
        trace: None,
    })
}

struct Simplex<'a> {
    problem: &'a OptProblem,
    free: Vec<usize>,
    evaluations: usize,
}

impl Simplex<'_> {
    fn clamp(&self, z: &mut [f64]) {
        for (x, &i) in z.iter_mut().zip(&self.free) {
            let c = &self.problem.coords[i];
            *x = x.clamp(c.lo, c.hi);
        }
    }

    /// Negated objective, since the simplex minimizes.
    fn cost(&mut self, z: &[f64]) -> f64 {
        self.evaluations += 1;
        -self.problem.eval(&self.problem.full(&self.free, z))
    }

    fn initial(&mut self, center: &[f64]) -> Vec<(Vec<f64>, f64)> {
        let mut pts = vec![(center.to_vec(), self.cost(center))];
        for d in 0..center.len() {
            let c = &self.problem.coords[self.free[d]];
            let step = 0.05 * (c.hi - c.lo);
            let mut z = center.to_vec();
            z[d] = if z[d] + step <= c.hi { z[d] + step } else { z[d] - step };
            let f = self.cost(&z);
            pts.push((z, f));
        }
        pts
    }

    /// One downhill-simplex run; returns when the spread of values is within `tol`,
    /// the simplex has collapsed, or the evaluation budget is exhausted.
    fn run(&mut self, mut pts: Vec<(Vec<f64>, f64)>, tol: f64) -> (Vec<f64>, f64) {
        let n = pts[0].0.len();
        loop {
            pts.sort_by(|a, b| a.1.total_cmp(&b.1));
            let (best, worst) = (pts[0].1, pts[n].1);
            let width = (1..=n)
                .flat_map(|i| (0..n).map(move |d| (i, d)))
                .map(|(i, d)| (pts[i].0[d] - pts[0].0[d]).abs())
                .fold(0.0, f64::max);
            if (worst - best).abs() <= tol || width <= 1e-15 || self.evaluations >= MAX_EVALUATIONS {
                return pts.swap_remove(0);
            }
            let centroid: Vec<f64> = (0..n)
                .map(|d| pts[..n].iter().map(|p| p.0[d]).sum::<f64>() / n as f64)
                .collect();
            let along = |k: f64, from: &[f64]| -> Vec<f64> {
                centroid.iter().zip(from).map(|(c, x)| c + k * (x - c)).collect()
            };
            let mut xr = along(-1.0, &pts[n].0);
            self.clamp(&mut xr);
            let fr = self.cost(&xr);
            if fr < pts[0].1 {
                let mut xe = along(-2.0, &pts[n].0);
                self.clamp(&mut xe);
                let fe = self.cost(&xe);
                pts[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < pts[n - 1].1 {
                pts[n] = (xr, fr);
            } else {
                let (mut xc, inside) = if fr < pts[n].1 {
                    (along(-0.5, &pts[n].0), false)
                } else {
                    (along(0.5, &pts[n].0), true)
                };
                self.clamp(&mut xc);
                let fc = self.cost(&xc);
                if (inside && fc < pts[n].1) || (!inside && fc <= fr) {
                    pts[n] = (xc, fc);
                } else {
                    let x0 = pts[0].0.clone();
                    for p in pts.iter_mut().skip(1) {
                        let mut z: Vec<f64> = x0.iter().zip(&p.0).map(|(a, b)| a + 0.5 * (b - a)).collect();
                        self.clamp(&mut z);
                        p.1 = self.cost(&z);
                        p.0 = z;
                    }
                }
            }
        }
    }
}

/// Downhill simplex from `start`, restarted around the incumbent until a restart
/// stops improving by more than `tol`. Never returns less than the start value.
pub fn refine(problem: &OptProblem, start: &BTreeMap<String, f64>, tol: f64) -> Result<OptResult> {
    if !(tol > 0.0) {
        return Err(invalid(format!("refine tolerance must be positive, got {tol}")));
    }
    let full = problem.resolve(start)?;
    let free = problem.free();
    let mut s = Simplex {
        problem,
        free: free.clone(),
        evaluations: 0,
    };
    let mut best_z: Vec<f64> = free.iter().map(|&i| full[i]).collect();
    let mut best_f = s.cost(&best_z);
    let mut trace = vec![TracePoint {
        params: problem.named(&full),
        value: -best_f,
    }];

    if !free.is_empty() {
        for _ in 0..20 {
            let pts = s.initial(&best_z);
            let (z, f) = s.run(pts, tol);
            let gain = best_f - f;
            if f < best_f {
                best_z = z;
                best_f = f;
                trace.push(TracePoint {
                    params: problem.named(&problem.full(&free, &best_z)),
                    value: -best_f,
                });
            }
            if gain <= tol || s.evaluations >= MAX_EVALUATIONS {
                break;
            }
        }
    }
    Ok(OptResult {
        problem: problem.name.clone(),
        best_value: -best_f,
        argmax: problem.named(&problem.full(&free, &best_z)),
        evaluations: s.evaluations,
        trace: Some(trace),
    })
}

/// Lattice scan, then refinement from the `starts` best lattice points; the best
/// refined result wins (earlier starts win ties).
pub fn maximize(problem: &OptProblem, points_per_dim: usize, starts: usize, tol: f64) -> Result<OptResult> {
    let (top, total) = scan_top(problem, points_per_dim, starts.max(1))?;
    let free = problem.free();
    let mut evaluations = total as usize;
    let mut best: Option<OptResult> = None;
    for &(_, idx) in &top {
        let start = problem.named(&lattice_point(problem, &free, points_per_dim, idx));
        let r = refine(problem, &start, tol)?;
        evaluations += r.evaluations;
        if best.as_ref().is_none_or(|b| r.best_value > b.best_value) {
            best = Some(r);
        }
    }
    let mut best = best.expect("at least one lattice point");
    best.evaluations = evaluations;
    Ok(best)
}

/// Default lattice density per family, sized so a full run stays within seconds.
pub fn default_points(problem: &OptProblem) -> usize {
    match problem.free().len() {
        0..=2 => 101,
        3 => 41,
        4 => 25,
        _ => 15,
    }
}

// ---------------------------------------------------------------------------
// Figure profiles

pub const FIG1_GHZ: (f64, f64, f64) = (FRAC_PI_2, 9.0 * PI / 20.0, PI / 18.0);
pub const FIG1_W: (f64, f64, f64, f64) = (FRAC_PI_4, FRAC_PI_2, 2.0 * PI / 5.0, 0.3479);

fn theta_axis(resolution: usize) -> Result<Vec<f64>> {
    if resolution < 16 {
        return Err(invalid(format!("profile resolution must be at least 16, got {resolution}")));
    }
    Ok((0..resolution)
        .map(|k| if k + 1 == resolution { FRAC_PI_2 } else { FRAC_PI_2 * k as f64 / (resolution - 1) as f64 })
        .collect())
}

/// Rows of `(theta, p_ghz, p_w)` on the two fixed slices.
pub fn profile_fig1(resolution: usize) -> Result<Vec<[f64; 3]>> {
    let (xi_g, a_g, t_g) = FIG1_GHZ;
    let (phi_w, xi_w, a_w, t_w) = FIG1_W;
    Ok(theta_axis(resolution)?
        .into_iter()
        .map(|theta| {
            [
                theta,
                ghz_value(theta, xi_g, a_g, t_g),
                family_value(&StateSpec::W { theta, phi: phi_w }, a_w, xi_w, t_w),
            ]
        })
        .collect())
}

/// Best `P_GHZ` at fixed θ with ξ = 0, maximized over `(alpha, t1)`.
pub fn xi0_max_at(theta: f64) -> Result<OptResult> {
    let problem = ghz_problem().pin("theta", theta.clamp(0.0, FRAC_PI_2))?.pin("xi", 0.0)?;
    maximize(&problem, 41, 3, DEFAULT_REFINE_TOL)
}

/// Rows of `(theta, p_max_xi0)`.
pub fn profile_fig2(resolution: usize) -> Result<Vec<[f64; 2]>> {
    theta_axis(resolution)?
        .into_iter()
        .map(|theta| Ok([theta, xi0_max_at(theta)?.best_value]))
        .collect()
}

/// `%.12g`-style formatting used by every CSV table.
pub fn fmt_sig(v: f64) -> String {
    const DIGITS: i32 = 12;
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".to_string() } else { v.to_string() };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let m = trim_zeros(mantissa);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        trim_zeros(&format!("{:.*}", (DIGITS - 1 - exp) as usize, v)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn csv_table<const N: usize>(header: &str, rows: &[[f64; N]]) -> String {
    let mut out = String::with_capacity(rows.len() * N * 16);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(|&v| fmt_sig(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}
