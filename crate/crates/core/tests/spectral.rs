use std::f64::consts::PI;

use mnv_core::sample::random_smooth_field;
use mnv_core::spectral::*;
use mnv_core::weierstrass::{
    clifford_torus, extract_spinors, gaussian_curvature, induced_metric_density, round_torus,
};
use mnv_core::{Complex64, GridField, PeriodicLattice, SpinCharacter};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn skew(n1: usize, n2: usize) -> PeriodicLattice {
    PeriodicLattice::new(Complex64::new(5.0, 0.4), Complex64::new(1.2, 4.5), n1, n2).unwrap()
}

/// Coordinates `(s1, s2)` of `z = s1·g1 + s2·g2`.
fn cell_coords(l: &PeriodicLattice, z: Complex64) -> (f64, f64) {
    let (a, b) = (l.gen1(), l.gen2());
    let det = a.re * b.im - a.im * b.re;
    (
        (z.re * b.im - z.im * b.re) / det,
        (a.re * z.im - a.im * z.re) / det,
    )
}

/// Smooth closed form with the requested character, usable off-grid.
fn smooth(l: PeriodicLattice, ch: SpinCharacter) -> impl Fn(f64, f64) -> Complex64 {
    let (d1, d2) = ch.offsets();
    move |x, y| {
        let (s1, s2) = cell_coords(&l, Complex64::new(x, y));
        let (t1, t2) = (2.0 * PI * s1, 2.0 * PI * s2);
        let amp = (0.6 * t1.sin() + 0.4 * (t1 + t2).cos() - 0.3 * (2.0 * t2).sin()).exp();
        amp * Complex64::from_polar(1.0, d1 * t1 + d2 * t2)
    }
}

/// Tenth-order central difference of `f` along `(ex, ey)`.
fn fd1(f: &impl Fn(f64, f64) -> Complex64, x: f64, y: f64, ex: f64, ey: f64, h: f64) -> Complex64 {
    const W: [f64; 5] = [
        5.0 / 6.0,
        -5.0 / 21.0,
        5.0 / 84.0,
        -5.0 / 504.0,
        1.0 / 1260.0,
    ];
    let mut s = Complex64::default();
    for (k, w) in W.iter().enumerate() {
        let t = (k + 1) as f64 * h;
        s += (f(x + t * ex, y + t * ey) - f(x - t * ex, y - t * ey)) * *w;
    }
    s / h
}

fn fd2(f: &impl Fn(f64, f64) -> Complex64, x: f64, y: f64, ex: f64, ey: f64, h: f64) -> Complex64 {
    const W: [f64; 5] = [
        5.0 / 3.0,
        -5.0 / 21.0,
        5.0 / 126.0,
        -5.0 / 1008.0,
        1.0 / 3150.0,
    ];
    let mut s = f(x, y) * (-5269.0 / 1800.0);
    for (k, w) in W.iter().enumerate() {
        let t = (k + 1) as f64 * h;
        s += (f(x + t * ex, y + t * ey) + f(x - t * ex, y - t * ey)) * *w;
    }
    s / (h * h)
}

#[test]
fn derivatives_match_finite_differences() {
    for ch in SpinCharacter::all() {
        let l = skew(48, 48);
        let f = smooth(l, ch);
        let field = GridField::from_fn(l, ch, |z| f(z.re, z.im));
        let (fx, fy, fz, fzb, lap) = (
            d_x(&field),
            d_y(&field),
            d_z(&field),
            d_zbar(&field),
            laplacian(&field),
        );
        let h = 2e-2;
        let mut err: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for j1 in 0..l.n1() {
            for j2 in 0..l.n2() {
                let z = l.node(j1, j2);
                let dx = fd1(&f, z.re, z.im, 1.0, 0.0, h);
                let dy = fd1(&f, z.re, z.im, 0.0, 1.0, h);
                let dd = fd2(&f, z.re, z.im, 1.0, 0.0, h) + fd2(&f, z.re, z.im, 0.0, 1.0, h);
                let dz = (dx - Complex64::i() * dy) * 0.5;
                let dzb = (dx + Complex64::i() * dy) * 0.5;
                for (spec, fd) in [
                    (fx.at(j1, j2), dx),
                    (fy.at(j1, j2), dy),
                    (fz.at(j1, j2), dz),
                    (fzb.at(j1, j2), dzb),
                    (lap.at(j1, j2), dd),
                ] {
                    err = err.max((spec - fd).norm());
                    scale = scale.max(fd.norm());
                }
            }
        }
        assert!(err < 1e-8 * scale, "{ch}: {err:e} (scale {scale:e})");
    }
}

struct Modes {
    ch: SpinCharacter,
    terms: Vec<(f64, f64, Complex64)>,
}

impl Modes {
    fn random(ch: SpinCharacter, band: i64, rng: &mut impl Rng) -> Self {
        let (d1, d2) = ch.offsets();
        let mut terms = Vec::new();
        for m1 in -band..band {
            for m2 in -band..band {
                let (k1, k2) = (m1 as f64 + d1, m2 as f64 + d2);
                if k1.abs() < band as f64 && k2.abs() < band as f64 {
                    terms.push((
                        k1,
                        k2,
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    ));
                }
            }
        }
        Self { ch, terms }
    }

    fn eval(&self, l: &PeriodicLattice, z: Complex64) -> Complex64 {
        let (s1, s2) = cell_coords(l, z);
        self.terms
            .iter()
            .map(|(k1, k2, c)| c * Complex64::from_polar(1.0, 2.0 * PI * (k1 * s1 + k2 * s2)))
            .sum()
    }

    fn sample(&self, l: PeriodicLattice) -> GridField {
        GridField::from_fn(l, self.ch, |z| self.eval(&l, z))
    }

    /// Exact product by convolution, truncated to `|k| < n/2` on each axis.
    fn product_truncated(&self, other: &Modes, l: &PeriodicLattice) -> Modes {
        let (h1, h2) = (l.n1() as f64 / 2.0, l.n2() as f64 / 2.0);
        let mut terms: Vec<(f64, f64, Complex64)> = Vec::new();
        for (a1, a2, a) in &self.terms {
            for (b1, b2, b) in &other.terms {
                let (k1, k2) = (a1 + b1, a2 + b2);
                if k1.abs() < h1 - 1e-9 && k2.abs() < h2 - 1e-9 {
                    match terms.iter_mut().find(|t| t.0 == k1 && t.1 == k2) {
                        Some(t) => t.2 += a * b,
                        None => terms.push((k1, k2, a * b)),
                    }
                }
            }
        }
        let (x1, x2) = (
            self.ch.half1 ^ other.ch.half1,
            self.ch.half2 ^ other.ch.half2,
        );
        Modes {
            ch: SpinCharacter::new(x1, x2),
            terms,
        }
    }
}

#[test]
fn dealiased_products_match_refined_grid_and_convolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let coarse = skew(16, 20);
    let fine = skew(64, 80);
    for (ca, cb) in [
        (SpinCharacter::TRIVIAL, SpinCharacter::TRIVIAL),
        (
            SpinCharacter::new(true, false),
            SpinCharacter::new(true, true),
        ),
        (
            SpinCharacter::new(false, true),
            SpinCharacter::new(false, true),
        ),
    ] {
        let a = Modes::random(ca, 7, &mut rng);
        let b = Modes::random(cb, 7, &mut rng);
        let got = dealiased_product(&[&a.sample(coarse), &b.sample(coarse)]).unwrap();
        let exact = a.product_truncated(&b, &coarse).sample(coarse);
        let scale = exact.max_abs();
        assert!(
            got.distance(&exact) < 1e-10 * scale,
            "convolution: {:e}",
            got.distance(&exact)
        );

        // Refined grid: exact nodal product, then truncate and read off at coarse nodes.
        let prod = a.sample(fine).try_mul(&b.sample(fine)).unwrap();
        let mut s = prod.spectrum();
        let drop: Vec<usize> = s
            .modes()
            .filter(|m| {
                m.m1.abs() >= coarse.n1() as f64 / 2.0 || m.m2.abs() >= coarse.n2() as f64 / 2.0
            })
            .map(|m| m.index)
            .collect();
        for k in drop {
            s.coeffs_mut()[k] = Complex64::default();
        }
        let refined = s.to_field();
        let mut err: f64 = 0.0;
        for j1 in 0..coarse.n1() {
            for j2 in 0..coarse.n2() {
                err = err.max((refined.at(4 * j1, 4 * j2) - got.at(j1, j2)).norm());
            }
        }
        assert!(err < 1e-10 * scale, "refined: {err:e}");
    }
}

#[test]
fn dealiased_triple_product_matches_convolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let l = skew(16, 16);
    let ch = SpinCharacter::new(true, false);
    let a = Modes::random(ch, 5, &mut rng);
    let b = Modes::random(ch, 5, &mut rng);
    let c = Modes::random(SpinCharacter::TRIVIAL, 5, &mut rng);
    let got = dealiased_product(&[&a.sample(l), &b.sample(l), &c.sample(l)]).unwrap();
    let big = PeriodicLattice::new(l.gen1(), l.gen2(), 1024, 1024).unwrap();
    let exact = a
        .product_truncated(&b, &big)
        .product_truncated(&c, &l)
        .sample(l);
    assert!(got.distance(&exact) < 1e-10 * exact.max_abs());
}

#[test]
fn dbar_inverse_is_a_right_inverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let l = skew(32, 32);
    for ch in SpinCharacter::all() {
        let f = random_smooth_field(l, ch, 10.0, &mut rng);
        let f = f
            .try_sub(&GridField::constant(l, f.mean()))
            .ok()
            .filter(|_| ch.is_trivial())
            .unwrap_or(f);
        let back = d_zbar(&dbar_inverse(&f).unwrap());
        assert!(
            back.distance(&f) < 1e-11 * f.max_abs(),
            "{ch}: {:e}",
            back.distance(&f)
        );
        let back = d_z(&dz_inverse(&f).unwrap());
        assert!(back.distance(&f) < 1e-11 * f.max_abs());
    }
}

#[test]
fn gauss_bonnet_on_every_torus() {
    let mut data = vec![clifford_torus(64, 64).unwrap().0.psis().clone()];
    for c in [1.2, 2.0, 4.0] {
        data.push(extract_spinors(&round_torus(c, 64, 64).unwrap()).unwrap().1);
    }
    for psis in data {
        let k = gaussian_curvature(&psis).unwrap();
        let d = induced_metric_density(&psis);
        let kd2 = k.try_mul(&d).unwrap().try_mul(&d).unwrap();
        let total = integrate(&kd2).value.norm();
        let scale = integrate(&kd2.map(|v| Complex64::new(v.norm(), 0.0)))
            .value
            .re;
        assert!(total < 1e-8 * scale.max(1.0), "{total:e}");
    }
}

fn lattice_strategy() -> impl Strategy<Value = PeriodicLattice> {
    (0.5f64..4.0, -1.0f64..1.0, 0.5f64..4.0).prop_map(|(a, b, c)| {
        PeriodicLattice::new(Complex64::new(a, 0.0), Complex64::new(b, c), 16, 16).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivative_identities(l in lattice_strategy(), seed: u64, h1: bool, h2: bool) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = SpinCharacter::new(h1, h2);
        let f = random_smooth_field(l, ch, 5.0, &mut rng);
        let g = random_smooth_field(l, ch, 5.0, &mut rng);
        let scale = f.max_abs().max(1e-300);
        // ∂∂̄ = Δ/4 and Δ = ∂ₓ² + ∂ᵧ².
        let lap = laplacian(&f);
        prop_assert!(deriv(&f, 1, 1).distance(&lap.scale(0.25)) <= 1e-9 * lap.max_abs().max(scale));
        prop_assert!(d_x(&d_x(&f)).try_add(&d_y(&d_y(&f))).unwrap().distance(&lap) <= 1e-9 * lap.max_abs().max(scale));
        // conj ∂f = ∂̄ conj f.
        prop_assert!(d_z(&f).conj().distance(&d_zbar(&f.conj())) <= 1e-11 * d_z(&f).max_abs().max(scale));
        // Linearity.
        let sum = d_z(&f.try_add(&g.scale(Complex64::new(0.3, -2.0))).unwrap());
        let parts = d_z(&f).try_add(&d_z(&g).scale(Complex64::new(0.3, -2.0))).unwrap();
        prop_assert!(sum.distance(&parts) <= 1e-11 * sum.max_abs().max(1.0));
        // Exact derivatives integrate to zero.
        let p = d_z(&f).try_mul(&g.conj()).unwrap().try_add(&f.try_mul(&d_zbar(&g).conj()).unwrap()).unwrap();
        let total = integrate(&p).value.norm();
        prop_assert!(total <= 1e-9 * l.area() * p.max_abs().max(1.0));
    }

    #[test]
    fn spectrum_roundtrip(l in lattice_strategy(), seed: u64, h1: bool, h2: bool) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = GridField::from_fn(l, SpinCharacter::new(h1, h2), |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        prop_assert!(f.spectrum().to_field().distance(&f) < 1e-13);
    }
}
