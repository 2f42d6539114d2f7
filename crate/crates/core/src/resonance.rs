//! Cubic phase, stationary points and the resonant parallelograms.

use core::fmt;

use libm::{exp, fabs, log, pow};

use crate::cutoff::{psi, PSI_OUTER};
use crate::quadrature::{GaussKronrod, QuadratureError};
use crate::special::x_log;
use crate::symbols::t1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResonanceError {
    NonPositiveTime { t: f64 },
    NegativeTime { t: f64 },
    ZeroFrequency,
    Quadrature(QuadratureError),
}

impl fmt::Display for ResonanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResonanceError::NonPositiveTime { t } => write!(f, "time {t} must be positive"),
            ResonanceError::NegativeTime { t } => write!(f, "time {t} must be nonnegative"),
            ResonanceError::ZeroFrequency => write!(f, "carrier frequency must be nonzero"),
            ResonanceError::Quadrature(e) => write!(f, "{e}"),
        }
    }
}

impl From<QuadratureError> for ResonanceError {
    fn from(e: QuadratureError) -> Self {
        ResonanceError::Quadrature(e)
    }
}

/// `Phi(xi, eta1, eta2)` for the output frequency `xi` and inputs
/// `eta1`, `eta2`, `xi - eta1 - eta2`.
pub fn phase_phi(xi: f64, eta1: f64, eta2: f64) -> f64 {
    let eta3 = xi - eta1 - eta2;
    2.0 * (x_log(eta3) + x_log(eta1) + x_log(eta2) - x_log(xi))
}

/// Frequencies `+-exp(-1 - x / (2t))` where the linear phase is stationary.
pub fn stationary_point(x: f64, t: f64) -> Result<(f64, f64), ResonanceError> {
    if !(t > 0.0) {
        return Err(ResonanceError::NonPositiveTime { t });
    }
    let xi = exp(-1.0 - x / (2.0 * t));
    Ok((xi, -xi))
}

/// Cutoff scale `(t + 1)^{-0.49}`.
pub fn rho(t: f64) -> f64 {
    pow(t + 1.0, -0.49)
}

/// Limit of `t1 / phase_phi` at the space resonance `(xi/3, xi/3)`.
pub fn t1_over_phi_limit(xi: f64) -> f64 {
    (0.5 - 2.0 * core::f64::consts::LN_2 / (3.0 * log(3.0))) * xi
}

/// `t1(eta1, eta2, xi - eta1 - eta2) / phase_phi(xi, eta1, eta2)`.
pub fn t1_over_phi(xi: f64, eta1: f64, eta2: f64) -> f64 {
    t1(eta1, eta2, xi - eta1 - eta2) / phase_phi(xi, eta1, eta2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResonanceSet {
    A1,
    A2,
    A3,
    A4,
}

impl ResonanceSet {
    pub const ALL: [ResonanceSet; 4] = [ResonanceSet::A1, ResonanceSet::A2, ResonanceSet::A3, ResonanceSet::A4];

    pub fn label(self) -> &'static str {
        match self {
            ResonanceSet::A1 => "A1",
            ResonanceSet::A2 => "A2",
            ResonanceSet::A3 => "A3",
            ResonanceSet::A4 => "A4",
        }
    }

    fn index(self) -> usize {
        match self {
            ResonanceSet::A1 => 0,
            ResonanceSet::A2 => 1,
            ResonanceSet::A3 => 2,
            ResonanceSet::A4 => 3,
        }
    }
}

/// A parallelogram `{ |r_i . (eta - center)| < bound, i = 0, 1 }`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parallelogram {
    pub tag: ResonanceSet,
    pub center: (f64, f64),
    pub rows: [[f64; 2]; 2],
    pub bound: f64,
}

impl Parallelogram {
    pub fn contains(&self, eta1: f64, eta2: f64) -> bool {
        let (d1, d2) = (eta1 - self.center.0, eta2 - self.center.1);
        self.rows.iter().all(|r| fabs(r[0] * d1 + r[1] * d2) < self.bound)
    }

    fn determinant(&self) -> f64 {
        self.rows[0][0] * self.rows[1][1] - self.rows[0][1] * self.rows[1][0]
    }

    /// Point with row coordinates `(p, q)` relative to the center.
    fn point(&self, p: f64, q: f64) -> (f64, f64) {
        let det = self.determinant();
        let [[a, b], [c, d]] = self.rows;
        let d1 = (d * p - b * q) / det;
        let d2 = (-c * p + a * q) / det;
        (self.center.0 + d1, self.center.1 + d2)
    }
}

/// The four resonant parallelograms at carrier `xi` and time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceSets {
    pub xi: f64,
    pub t: f64,
    pub rho: f64,
    pub sets: [Parallelogram; 4],
}

impl ResonanceSets {
    pub fn new(xi: f64, t: f64) -> Result<Self, ResonanceError> {
        if xi == 0.0 {
            return Err(ResonanceError::ZeroFrequency);
        }
        if !(t >= 0.0) {
            return Err(ResonanceError::NegativeTime { t });
        }
        let r = rho(t);
        let bound = PSI_OUTER * r;
        let third = xi / 3.0;
        let make = |tag, center, rows| Parallelogram { tag, center, rows, bound };
        Ok(Self {
            xi,
            t,
            rho: r,
            sets: [
                make(ResonanceSet::A1, (third, third), [[2.0, 1.0], [1.0, 2.0]]),
                make(ResonanceSet::A2, (xi, xi), [[0.0, 1.0], [1.0, 0.0]]),
                make(ResonanceSet::A3, (xi, -xi), [[2.0, 1.0], [1.0, 0.0]]),
                make(ResonanceSet::A4, (-xi, xi), [[0.0, 1.0], [1.0, 2.0]]),
            ],
        })
    }

    pub fn get(&self, tag: ResonanceSet) -> &Parallelogram {
        &self.sets[tag.index()]
    }

    /// First set containing `(eta1, eta2)`.
    pub fn membership(&self, eta1: f64, eta2: f64) -> Option<ResonanceSet> {
        self.sets.iter().find(|s| s.contains(eta1, eta2)).map(|s| s.tag)
    }

    /// Number of sets containing the point (more than one means overlap).
    pub fn membership_count(&self, eta1: f64, eta2: f64) -> usize {
        self.sets.iter().filter(|s| s.contains(eta1, eta2)).count()
    }

    /// Smooth resonance cutoff `b(xi, eta1, eta2, t)`.
    pub fn cutoff_b(&self, eta1: f64, eta2: f64) -> f64 {
        let eta3 = fabs(self.xi - eta1 - eta2);
        psi((fabs(eta1) - eta3) / self.rho) * psi((fabs(eta2) - eta3) / self.rho)
    }

    /// `(1/6) iint_A b d eta` over one parallelogram.
    ///
    /// Integrated in the row coordinates `(p, q)`, in which every set is the
    /// square `|p|, |q| < 8 rho / 5`; the area element is `dp dq / |det|`.
    pub fn weight(&self, tag: ResonanceSet, tol: f64) -> Result<f64, ResonanceError> {
        let set = *self.get(tag);
        let h = set.bound;
        let inner_gk = GaussKronrod::new(tol, tol * 1e-3 * h);
        let outer_gk = GaussKronrod::new(tol, tol * 1e-3 * h * h);
        let mut failure = None;
        let outer = outer_gk.integrate(
            |p| match inner_gk.integrate(
                |q| {
                    let (e1, e2) = set.point(p, q);
                    self.cutoff_b(e1, e2)
                },
                -h,
                h,
            ) {
                Ok(e) => e.value,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            },
            -h,
            h,
        )?;
        if let Some(e) = failure {
            return Err(e.into());
        }
        Ok(outer.value / (6.0 * fabs(set.determinant())))
    }

    /// `(beta_1, beta_2, beta_3)`, the weights of `A_2`, `A_3`, `A_4`.
    pub fn scattering_weights(&self, tol: f64) -> Result<[f64; 3], ResonanceError> {
        Ok([
            self.weight(ResonanceSet::A2, tol)?,
            self.weight(ResonanceSet::A3, tol)?,
            self.weight(ResonanceSet::A4, tol)?,
        ])
    }
}

/// Logarithmic self-interaction rate `sum_j beta_j T_1(perm_j(xi, xi, -xi))`.
pub fn resonant_symbol(xi: f64, betas: [f64; 3]) -> f64 {
    betas[0] * t1(xi, xi, -xi) + betas[1] * t1(xi, -xi, xi) + betas[2] * t1(-xi, xi, xi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_anchor_values() {
        assert!((phase_phi(1.0, 1.0 / 3.0, 1.0 / 3.0) + 2.0 * 3f64.ln()).abs() < 1e-12);
        for xi in [0.3, 1.0, 7.5, -2.0] {
            assert!(phase_phi(xi, xi, xi).abs() < 1e-12);
            assert!((phase_phi(xi, xi / 3.0, xi / 3.0) + 2.0 * xi * 3f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn stationary_points() {
        let (a, b) = stationary_point(-2.0, 1.0).unwrap();
        assert!((a - 1.0).abs() < 1e-15 && (b + 1.0).abs() < 1e-15);
        let (a, _) = stationary_point(0.0, 3.7).unwrap();
        assert!((a - (-1.0f64).exp()).abs() < 1e-15);
        for (x, t) in [(3.0, 0.5), (-11.0, 2.0), (0.1, 40.0)] {
            let (xi, _) = stationary_point(x, t).unwrap();
            assert!((x + 2.0 * t * (xi.ln() + 1.0)).abs() < 1e-14);
        }
        assert!(stationary_point(1.0, 0.0).is_err());
    }

    #[test]
    fn membership_examples() {
        let xi = 5.0;
        let t = 10.0;
        let sets = ResonanceSets::new(xi, t).unwrap();
        assert_eq!(sets.membership(xi, xi), Some(ResonanceSet::A2));
        assert_eq!(sets.membership(xi, -xi), Some(ResonanceSet::A3));
        assert_eq!(sets.membership(-xi, xi), Some(ResonanceSet::A4));
        assert_eq!(sets.membership(xi / 3.0, xi / 3.0), Some(ResonanceSet::A1));
        let r = sets.rho;
        assert!(!sets.get(ResonanceSet::A1).contains(xi / 3.0 + 2.0 * r, xi / 3.0));
        assert!(ResonanceSets::new(0.0, 1.0).is_err());
    }

    #[test]
    fn rho_decreases() {
        let mut prev = rho(0.0);
        assert_eq!(prev, 1.0);
        for i in 1..100 {
            let r = rho(i as f64 * 0.7);
            assert!(r < prev);
            prev = r;
        }
    }

    #[test]
    fn weights_match_separable_integral() {
        let sets = ResonanceSets::new(6.0, 30.0).unwrap();
        let gk = GaussKronrod::new(1e-12, 0.0);
        let one_d = gk.integrate(psi, -PSI_OUTER, PSI_OUTER).unwrap().value * sets.rho;
        let expected = one_d * one_d / 6.0;
        for tag in [ResonanceSet::A2, ResonanceSet::A3, ResonanceSet::A4] {
            let w = sets.weight(tag, 1e-10).map_err(|e| std::format!("{e}")).unwrap();
            assert!((w - expected).abs() < 1e-8 * expected, "{tag:?}: {w} vs {expected}");
        }
        let w1 = sets.weight(ResonanceSet::A1, 1e-10).unwrap();
        assert!((w1 - expected / 3.0).abs() < 1e-8 * expected);
    }

    #[test]
    fn t1_phi_limit_is_second_order() {
        let xi = 1.3;
        let limit = t1_over_phi_limit(xi);
        let err = |d: f64| (t1_over_phi(xi, xi / 3.0 + d, xi / 3.0 - 0.4 * d) - limit).abs();
        let (e1, e2) = (err(1e-2), err(5e-3));
        let ratio = e1 / e2;
        assert!((3.5..4.5).contains(&ratio), "{ratio}");
    }
}
