use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqgfront::paraproduct::{build_blog_symbol, energy_report, Paraproduct, SymbolGrid};
use sqgfront::spectral::{FourierGrid, RealField, SpectralField, C64};
use sqgfront_core::cutoff::chi;

const N: usize = 64;

fn dense(op: &Paraproduct) -> DMatrix<Complex<f64>> {
    let grid = *op.symbol().grid();
    let mut m = DMatrix::from_element(N, N, Complex::new(0.0, 0.0));
    for col in 0..N {
        let mut e = SpectralField::zeros(grid);
        e.coeffs_mut()[col] = C64::new(1.0, 0.0);
        let out = op.apply(&e).unwrap();
        for row in 0..N {
            m[(row, col)] = out.coeffs()[row];
        }
    }
    m
}

fn hermitian_defect(m: &DMatrix<Complex<f64>>) -> f64 {
    (m - m.adjoint()).norm() / m.norm()
}

/// Entry from direct DFT sums of the symbol columns.
fn brute_entry(a: &SymbolGrid, k: i64, j: i64) -> C64 {
    let grid = a.grid();
    let diff = (k - j).abs();
    let sum = (k + j).abs();
    let w = if diff == 0 {
        1.0
    } else if sum == 0 {
        0.0
    } else {
        chi(diff as f64 / sum as f64)
    };
    if w == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let q = k - j;
    let column_coeff = |m: usize| -> C64 {
        let xi_q = grid.xi_at_k(q);
        (0..N).map(|i| a.value(i, m) * C64::from_polar(1.0, -xi_q * grid.x(i))).sum::<C64>() / N as f64
    };
    let half = (N / 2) as i64;
    let s = k + j;
    let value = if s % 2 == 0 {
        column_coeff((s / 2 + half) as usize)
    } else {
        let lo = s.div_euclid(2) + half;
        (column_coeff(lo as usize) + column_coeff((lo + 1) as usize)) * 0.5
    };
    value * w
}

fn smooth_real_symbol(grid: FourierGrid) -> SymbolGrid {
    SymbolGrid::from_fn(grid, |x, xi| C64::new((1.0 + 0.3 * (0.4 * x).cos()) * (1.0 + xi * xi).sqrt() + 0.2 * (0.9 * x).sin(), 0.0))
        .unwrap()
}

#[test]
fn entries_match_direct_sums() {
    let grid = FourierGrid::new(N, 25.0).unwrap();
    let a = smooth_real_symbol(grid);
    let op = Paraproduct::new(a.clone()).unwrap();
    let mut worst: f64 = 0.0;
    for k in -32..32 {
        for j in -32..32 {
            let e = op.entry(k, j);
            let b = brute_entry(&a, k, j);
            worst = worst.max((e - b).norm());
        }
    }
    assert!(worst < 1e-12, "{worst}");
}

#[test]
fn real_symbols_give_self_adjoint_operators() {
    let grid = FourierGrid::new(N, 25.0).unwrap();
    let multiplier = SymbolGrid::from_fn(grid, |_, xi| C64::new(xi.abs().ln_1p() + 0.5, 0.0)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let phi = RealField::new(grid, (0..N).map(|j| 0.05 * (-(grid.x(j) / 3.0).powi(2)).exp() + 1e-3 * rng.gen_range(-1.0..1.0)).collect())
        .unwrap();
    for symbol in [multiplier, smooth_real_symbol(grid), build_blog_symbol(&phi, 2).unwrap()] {
        let m = dense(&Paraproduct::new(symbol).unwrap());
        assert!(hermitian_defect(&m) < 1e-10, "{}", hermitian_defect(&m));
    }
}

#[test]
fn power_iteration_matches_singular_values() {
    let grid = FourierGrid::new(N, 25.0).unwrap();
    let op = Paraproduct::new(smooth_real_symbol(grid)).unwrap();
    let exact = dense(&op).singular_values().max();
    let estimate = op.operator_norm().unwrap();
    assert!((estimate / exact - 1.0).abs() < 1e-5, "{estimate} vs {exact}");
}

#[test]
fn upper_energy_bound_holds_on_small_fields() {
    let grid = FourierGrid::new(N, 25.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let centre = rng.gen_range(-2.0..2.0);
        let amp = rng.gen_range(0.01..0.1);
        let width = rng.gen_range(1.0..3.0);
        let phi = RealField::from_fn(grid, |x| amp * (-((x - centre) / width).powi(2)).exp());
        let report = energy_report(&phi, 3).unwrap();
        let hat = phi.forward();
        for s in 1..=3u32 {
            let h = hat.sobolev_norm(s as f64);
            let upper = 2f64.powi(2 * s as i32 + 1) * h * h;
            assert!(report.tilde(s) <= upper);
        }
    }
}
