use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqgfront::nonlinearity::{
    cubic_term_convolution, cubic_term_spectral, full_nonlinearity, zeta_integral_oracle, NonlinearityConfig,
};
use sqgfront::spectral::{FourierGrid, RealField, SpectralField, C64};

fn band_limited(grid: FourierGrid, amplitude: f64, band: i64, rng: &mut ChaCha8Rng) -> RealField {
    let mut hat = SpectralField::zeros(grid);
    for k in 1..=band {
        let c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * amplitude;
        let i = grid.index_of(k).unwrap();
        let j = grid.index_of(-k).unwrap();
        hat.coeffs_mut()[i] = c;
        hat.coeffs_mut()[j] = c.conj();
    }
    hat.inverse()
}

#[test]
fn spectral_and_convolution_cubic_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let grid = FourierGrid::new(64, 20.0).unwrap();
    for _ in 0..5 {
        let phi = band_limited(grid, 1e-2, 31, &mut rng);
        let spec = cubic_term_spectral(&phi).unwrap().forward();
        let conv = cubic_term_convolution(&phi.forward()).unwrap();
        let gap = spec.sub(&conv).unwrap().l2_norm() / conv.l2_norm();
        assert!(gap <= 1e-11, "relative gap {gap}");
        assert!(conv.symmetry_defect() <= 1e-12 * conv.l2_norm());
    }
}

#[test]
fn quintic_gap_scales_with_fifth_power() {
    let grid = FourierGrid::new(128, 40.0).unwrap();
    let shape = |a: f64| RealField::from_fn(grid, move |x| a * (-(x / 2.0).powi(2)).exp());
    let gap = |a: f64| {
        let phi = shape(a);
        let n1 = full_nonlinearity(&phi, &NonlinearityConfig::with_n_max(1)).unwrap();
        let n2 = full_nonlinearity(&phi, &NonlinearityConfig::with_n_max(2)).unwrap();
        n1.forward().sub(&n2.forward()).unwrap().l2_norm()
    };
    let ratio = gap(0.1) / gap(0.05);
    assert!((24.0..=40.0).contains(&ratio), "{ratio}");
}

#[test]
fn oracle_gap_is_seventh_order() {
    let grid = FourierGrid::new(256, 40.0).unwrap();
    let shape = |a: f64| RealField::from_fn(grid, move |x| a * (-(x - 0.3).powi(2)).exp());
    let cfg = NonlinearityConfig::with_n_max(2);
    let idx = 128 + 5;
    let gap = |a: f64| {
        let phi = shape(a);
        let oracle = zeta_integral_oracle(&phi, idx, &cfg).unwrap();
        let series = full_nonlinearity(&phi, &cfg).unwrap().samples()[idx];
        (oracle - series).abs()
    };
    let (g1, g2) = (gap(0.1), gap(0.05));
    let ratio = g1 / g2;
    assert!((64.0..=256.0).contains(&ratio), "{ratio}");
}
