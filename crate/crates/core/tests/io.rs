use std::f64::consts::SQRT_2;

use mnv_core::flows::{FlowConfig, Gauge, Scheme};
use mnv_core::io::*;
use mnv_core::weierstrass::clifford_torus;
use mnv_core::willmore::InvariantRow;
use mnv_core::{Complex64, GridField, PeriodicLattice, SpinCharacter, Tolerances};
use proptest::prelude::*;

#[test]
fn state_snapshot_roundtrip_is_bit_identical() {
    let (data, _, _) = clifford_torus(16, 16).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.gwf");
    save_state(&path, &data).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(bytes.len(), 3 * (46 + 16 * 256));
    let back = load_state(&path, &Tolerances::default()).unwrap();
    let mut again = Vec::new();
    write_state(&mut again, &back).unwrap();
    assert_eq!(again, bytes);
    assert_eq!(back.psis().character(), SpinCharacter::new(true, true));
}

#[test]
fn trailing_bytes_and_complex_potential_are_rejected() {
    let (data, _, _) = clifford_torus(16, 16).unwrap();
    let mut bytes = Vec::new();
    write_state(&mut bytes, &data).unwrap();
    bytes.push(0);
    assert!(read_state(&mut bytes.as_slice(), &Tolerances::default()).is_err());

    let l = *data.lattice();
    let mut bytes = Vec::new();
    write_field(
        &mut bytes,
        &GridField::constant(l, Complex64::new(0.0, 1.0)),
    )
    .unwrap();
    write_field(&mut bytes, data.psis().psi1()).unwrap();
    write_field(&mut bytes, data.psis().psi2()).unwrap();
    assert!(matches!(
        read_state(&mut bytes.as_slice(), &Tolerances::default()),
        Err(mnv_core::Error::NotReal { .. })
    ));
}

#[test]
fn mesh_has_one_quad_per_cell() {
    let (_, x, _) = clifford_torus(12, 10).unwrap();
    let mut out = Vec::new();
    write_obj(&mut out, &x).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(obj_counts(&text), (120, 120));
    let max_index = text
        .lines()
        .filter(|l| l.starts_with("f "))
        .flat_map(|l| {
            l.split_whitespace()
                .skip(1)
                .map(|t| t.parse::<usize>().unwrap())
        })
        .max()
        .unwrap();
    assert_eq!(max_index, 120);
    // Each vertex sits on four quads, as it must on a closed grid torus.
    let mut uses = vec![0; 121];
    for l in text.lines().filter(|l| l.starts_with("f ")) {
        for t in l.split_whitespace().skip(1) {
            uses[t.parse::<usize>().unwrap()] += 1;
        }
    }
    assert!(uses[1..].iter().all(|&u| u == 4));
}

#[test]
fn scalar_export_matches_clifford_mean_curvature() {
    let (data, _, _) = clifford_torus(32, 32).unwrap();
    let mut out = Vec::new();
    write_scalars(&mut out, &data, Scalar::H).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# quantity=H gen1="));
    assert_eq!(lines.next().unwrap(), "j1,j2,x,y,H");
    let mut count = 0;
    for line in lines {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!((cols[4] - cols[2].sin() / (2.0 * SQRT_2)).abs() < 1e-10);
        count += 1;
    }
    assert_eq!(count, 1024);
}

#[test]
fn time_series_header_and_roundtrip() {
    let rows = [
        InvariantRow {
            t: 0.0,
            willmore: 19.7,
            mean_u: 0.1,
            constraint_residual: 1e-15,
            dirac_residual: 2e-12,
            period_defect_norm: 0.0,
            imag_u_norm: 0.0,
        },
        InvariantRow {
            t: 1e-4,
            willmore: 19.7,
            mean_u: 0.1,
            constraint_residual: 3e-15,
            dirac_residual: 4e-12,
            period_defect_norm: 1e-17,
            imag_u_norm: 1e-18,
        },
    ];
    let mut out = Vec::new();
    {
        let mut w = TimeSeriesWriter::new(&mut out);
        for r in &rows {
            w.push(r).unwrap();
        }
    }
    let text = String::from_utf8(out).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "t,willmore,mean_U,constraint_residual,dirac_residual,period_defect_norm,imag_U_norm"
    );
    assert_eq!(read_time_series(text.as_bytes()).unwrap(), rows);
}

#[test]
fn manifest_roundtrip() {
    let l =
        PeriodicLattice::new(Complex64::new(6.0, 0.0), Complex64::new(0.5, 4.0), 32, 16).unwrap();
    for gauge in [Gauge::ZeroMean, Gauge::MeanSquare, Gauge::Fixed(0.25)] {
        let m = RunManifest {
            source: "clifford".into(),
            lattice: (&l).into(),
            scheme: Scheme::Rk4,
            gauge,
            dealias: true,
            dt: 1e-4,
            steps: 1000,
            snapshot_every: 100,
            tolerances: Tolerances::default(),
        };
        let text = m.to_toml().unwrap();
        assert!(text.contains("scheme = \"rk4\""));
        let back = RunManifest::from_toml(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.lattice.lattice().unwrap(), l);
        assert_eq!(
            back.flow_config(),
            FlowConfig {
                scheme: Scheme::Rk4,
                gauge,
                dealias: true
            }
        );
    }
}

proptest! {
    #[test]
    fn any_field_roundtrips(
        n1 in 2usize..6, n2 in 2usize..6, h1: bool, h2: bool,
        g in prop::array::uniform4(-5.0f64..5.0), seed: u64,
    ) {
        let g1 = Complex64::new(g[0].abs() + 0.5, g[1]);
        let g2 = g1 * Complex64::new(g[2], g[3].abs() + 0.5);
        let l = PeriodicLattice::new(g1, g2, 2 * n1, 2 * n2).unwrap();
        let mut state = seed;
        let values = (0..l.len()).map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            Complex64::new(f64::from_bits(state >> 2), (state as f64).sin())
        }).collect();
        let f = GridField::new(l, SpinCharacter::new(h1, h2), values).unwrap();
        let mut bytes = Vec::new();
        write_field(&mut bytes, &f).unwrap();
        let back = read_field(&mut bytes.as_slice()).unwrap();
        let mut again = Vec::new();
        write_field(&mut again, &back).unwrap();
        prop_assert_eq!(again, bytes);
    }
}
