//! Exact-rational feasibility LP by two-phase simplex with Bland's rule.
//!
//! Variables are free. Infeasible systems come back with Farkas multipliers
//! `μ` such that `Σ μ_r a_r = 0`, `μ_r ≥ 0` on inequality rows and
//! `Σ μ_r b_r > 0`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<BigRational>,
    pub sense: Sense,
    pub rhs: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Feasible(Vec<BigRational>),
    Infeasible(Vec<BigRational>),
}

pub fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

struct Tableau {
    rows: Vec<Vec<BigRational>>,
    rhs: Vec<BigRational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, j: usize) {
        let p = self.rows[r][j].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        self.rhs[r] /= &p;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for k in 0..self.rows.len() {
            if k == r || self.rows[k][j].is_zero() {
                continue;
            }
            let f = self.rows[k][j].clone();
            for (v, pv) in self.rows[k].iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.rhs[k] -= &f * &prhs;
        }
        self.basis[r] = j;
    }

    /// Minimizes `c·w` over columns allowed by `allowed`; Bland's rule.
    fn optimize(&mut self, cost: &[BigRational], allowed: &dyn Fn(usize) -> bool) {
        let ncols = cost.len();
        loop {
            let entering = (0..ncols).filter(|&j| allowed(j)).find(|&j| {
                let mut d = cost[j].clone();
                for (r, row) in self.rows.iter().enumerate() {
                    if !row[j].is_zero() {
                        d -= &cost[self.basis[r]] * &row[j];
                    }
                }
                d.is_negative()
            });
            let Some(j) = entering else { return };
            let mut best: Option<(usize, BigRational)> = None;
            for r in 0..self.rows.len() {
                if !self.rows[r][j].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / &self.rows[r][j];
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            // Non-negative costs keep every objective bounded below.
            let (r, _) = best.expect("bounded objective");
            self.pivot(r, j);
        }
    }
}

/// Finds a point satisfying all constraints. With `minimize_l1` the point
/// also minimizes `Σ |v_i|`.
pub fn solve_feasibility(nvars: usize, constraints: &[Constraint], minimize_l1: bool) -> LpOutcome {
    let m = constraints.len();
    let n_ge = constraints.iter().filter(|c| c.sense == Sense::Ge).count();
    let (n_split, n_real) = (2 * nvars, 2 * nvars + n_ge);
    let ncols = n_real + m;
    let mut signs = Vec::with_capacity(m);
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut next_surplus = n_split;
    for (r, c) in constraints.iter().enumerate() {
        assert_eq!(c.coeffs.len(), nvars);
        let s = if c.rhs.is_negative() { -rat(1) } else { rat(1) };
        let mut row = vec![BigRational::zero(); ncols];
        for (i, a) in c.coeffs.iter().enumerate() {
            row[i] = &s * a;
            row[nvars + i] = -(&s * a);
        }
        if c.sense == Sense::Ge {
            row[next_surplus] = -s.clone();
            next_surplus += 1;
        }
        row[n_real + r] = BigRational::one();
        rhs.push(&s * &c.rhs);
        signs.push(s);
        rows.push(row);
    }
    let mut t = Tableau { rows, rhs, basis: (n_real..ncols).collect() };

    let phase1: Vec<BigRational> = (0..ncols).map(|j| if j >= n_real { rat(1) } else { rat(0) }).collect();
    t.optimize(&phase1, &|_| true);
    let infeas: BigRational = t.basis.iter().zip(&t.rhs).filter(|(&b, _)| b >= n_real).map(|(_, v)| v.clone()).sum();
    if infeas.is_positive() {
        // π = c_B B⁻¹; the artificial block of the tableau holds B⁻¹.
        let mu = (0..m)
            .map(|r| {
                let pi: BigRational = (0..m)
                    .filter(|&k| t.basis[k] >= n_real)
                    .map(|k| t.rows[k][n_real + r].clone())
                    .sum();
                &signs[r] * pi
            })
            .collect();
        return LpOutcome::Infeasible(mu);
    }

    if minimize_l1 {
        for r in 0..m {
            if t.basis[r] >= n_real {
                if let Some(j) = (0..n_real).find(|&j| !t.rows[r][j].is_zero()) {
                    t.pivot(r, j);
                }
            }
        }
        let phase2: Vec<BigRational> = (0..ncols).map(|j| if j < n_split { rat(1) } else { rat(0) }).collect();
        t.optimize(&phase2, &|j| j < n_real);
    }

    let mut w = vec![BigRational::zero(); ncols];
    for (r, &b) in t.basis.iter().enumerate() {
        w[b] = t.rhs[r].clone();
    }
    LpOutcome::Feasible((0..nvars).map(|i| &w[i] - &w[nvars + i]).collect())
}

/// Checks a Farkas certificate against the original constraints.
pub fn check_farkas(nvars: usize, constraints: &[Constraint], mu: &[BigRational]) -> bool {
    if mu.len() != constraints.len() {
        return false;
    }
    for (c, u) in constraints.iter().zip(mu) {
        if c.sense == Sense::Ge && u.is_negative() {
            return false;
        }
    }
    for i in 0..nvars {
        let s: BigRational = constraints.iter().zip(mu).map(|(c, u)| &c.coeffs[i] * u).sum();
        if !s.is_zero() {
            return false;
        }
    }
    let b: BigRational = constraints.iter().zip(mu).map(|(c, u)| &c.rhs * u).sum();
    b.is_positive()
}

pub fn satisfies(constraints: &[Constraint], v: &[BigRational]) -> bool {
    constraints.iter().all(|c| {
        let lhs: BigRational = c.coeffs.iter().zip(v).map(|(a, x)| a * x).sum();
        match c.sense {
            Sense::Eq => lhs == c.rhs,
            Sense::Ge => lhs >= c.rhs,
        }
    })
}
