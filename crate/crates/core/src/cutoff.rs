//! Smooth cutoff functions.
//!
//! Both bumps are built from the same plateau construction: with
//! `s(t) = exp(-1/t)` for `t > 0` (and `0` otherwise), the smooth step
//! `S(t) = s(t) / (s(t) + s(1 - t))` rises from 0 to 1 on `[0, 1]`. A plateau
//! of inner radius `r` and outer radius `R` is `1` on `|x| <= r`, `0` on
//! `|x| >= R`, and `S((R - |x|) / (R - r))` in between.
//!
//! - `psi`: inner radius 5/4, outer radius 8/5 (Littlewood-Paley profile).
//! - `chi`: inner radius 3/40, outer radius 1/10 (paraproduct cutoff).
//!
//! The transition shape is fixed here and nowhere else.

use libm::{exp, fabs, pow};

pub const PSI_INNER: f64 = 5.0 / 4.0;
pub const PSI_OUTER: f64 = 8.0 / 5.0;
pub const CHI_INNER: f64 = 3.0 / 40.0;
pub const CHI_OUTER: f64 = 1.0 / 10.0;

#[inline]
fn bump_exp(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        exp(-1.0 / t)
    }
}

/// Smooth step: 0 for `t <= 0`, 1 for `t >= 1`.
#[inline]
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = bump_exp(t);
        a / (a + bump_exp(1.0 - t))
    }
}

/// Even plateau function equal to 1 on `|x| <= inner` and 0 on `|x| >= outer`.
#[inline]
pub fn plateau(x: f64, inner: f64, outer: f64) -> f64 {
    let r = fabs(x);
    if r <= inner {
        1.0
    } else if r >= outer {
        0.0
    } else {
        smooth_step((outer - r) / (outer - inner))
    }
}

/// Littlewood-Paley profile, supported in `[-8/5, 8/5]`, equal to 1 on `[-5/4, 5/4]`.
#[inline]
pub fn psi(x: f64) -> f64 {
    plateau(x, PSI_INNER, PSI_OUTER)
}

/// Paraproduct cutoff, supported in `|x| <= 1/10`, equal to 1 on `|x| <= 3/40`.
#[inline]
pub fn chi(x: f64) -> f64 {
    plateau(x, CHI_INNER, CHI_OUTER)
}

#[inline]
fn dyadic(k: i32) -> f64 {
    pow(2.0, k as f64)
}

/// `psi_k(xi) = psi(xi / 2^k) - psi(xi / 2^{k-1})`.
#[inline]
pub fn psi_k(xi: f64, k: i32) -> f64 {
    psi(xi / dyadic(k)) - psi(xi / dyadic(k - 1))
}

/// `psi_{<=k}(xi) = psi(xi / 2^k)`.
#[inline]
pub fn psi_le(xi: f64, k: i32) -> f64 {
    psi(xi / dyadic(k))
}

/// `psi_{>=k}(xi) = 1 - psi(xi / 2^{k-1})`.
#[inline]
pub fn psi_ge(xi: f64, k: i32) -> f64 {
    1.0 - psi(xi / dyadic(k - 1))
}

/// `psi~_k = psi_{k-1} + psi_k + psi_{k+1}`, which is identically 1 on `supp psi_k`.
#[inline]
pub fn psi_tilde(xi: f64, k: i32) -> f64 {
    psi(xi / dyadic(k + 1)) - psi(xi / dyadic(k - 2))
}

/// Dyadic indices `k` for which `psi_k(xi)` can be nonzero.
#[allow(clippy::reversed_empty_ranges)]
pub fn active_blocks(xi: f64) -> core::ops::RangeInclusive<i32> {
    let r = fabs(xi);
    if r == 0.0 {
        return 1..=0;
    }
    // supp psi_k = [5/8, 8/5] * 2^k
    let lo = libm::floor(libm::log2(r / PSI_OUTER)) as i32;
    let hi = libm::ceil(libm::log2(r / (PSI_INNER / 2.0))) as i32;
    lo..=hi
}
