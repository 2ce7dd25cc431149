//! From a conformal immersion back to `(U, ψ₁, ψ₂)`.

use num_complex::Complex64;

use super::{Immersion, SpinorPair};
use crate::error::{Error, Result};
use crate::field::GridField;
use crate::lattice::SpinCharacter;
use crate::spectral::{d_x, d_y, laplacian};
use crate::tolerances::Tolerances;

type C2 = [Complex64; 2];

fn dist2(a: C2, b: C2) -> f64 {
    (a[0] - b[0]).norm_sqr() + (a[1] - b[1]).norm_sqr()
}

fn neg(a: C2) -> C2 {
    [-a[0], -a[1]]
}

pub fn extract_spinors(x: &Immersion) -> Result<(GridField, SpinorPair)> {
    extract_spinors_with(x, &Tolerances::default())
}

/// Recovers spinors from `F_z` via `ψ₁² = F̄²_z + iF̄¹_z`, `ψ₂² = −(F²_z + iF¹_z)`
/// and `U = HD/2`. Only the larger component is a square root; the other
/// follows from `F³_z = −ψ̄₁ψ₂`, which keeps accuracy near zeros and fixes
/// the relative sign.
///
/// The global branch follows the grid along the first row and then down
/// every column; the sign picked up across each period fixes the spin
/// character.
pub fn extract_spinors_with(x: &Immersion, tol: &Tolerances) -> Result<(GridField, SpinorPair)> {
    let l = *x.lattice();
    let (n1, n2) = (l.n1(), l.n2());
    let lin = x.linear();
    let mut fx = Vec::with_capacity(3);
    let mut fy = Vec::with_capacity(3);
    let mut lap = Vec::with_capacity(3);
    for (a, c) in x.coords().iter().enumerate() {
        fx.push(
            d_x(c)
                .values()
                .iter()
                .map(|v| v.re + lin[a][0])
                .collect::<Vec<_>>(),
        );
        fy.push(
            d_y(c)
                .values()
                .iter()
                .map(|v| v.re + lin[a][1])
                .collect::<Vec<_>>(),
        );
        lap.push(
            laplacian(c)
                .values()
                .iter()
                .map(|v| v.re)
                .collect::<Vec<_>>(),
        );
    }
    let at = |v: &Vec<Vec<f64>>, k: usize| [v[0][k], v[1][k], v[2][k]];
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];

    let mut scale: f64 = 0.0;
    let mut defect: f64 = 0.0;
    for k in 0..l.len() {
        let (a, b) = (at(&fx, k), at(&fy, k));
        scale = scale.max(dot(a, a)).max(dot(b, b));
        defect = defect
            .max((dot(a, a) - dot(b, b)).abs())
            .max(2.0 * dot(a, b).abs());
    }
    let defect = if scale > 0.0 {
        defect / scale
    } else {
        f64::INFINITY
    };
    if defect > tol.conformality {
        return Err(Error::NonConformal { defect });
    }

    let i = Complex64::i();
    let mut u = Vec::with_capacity(l.len());
    let mut cands: Vec<C2> = Vec::with_capacity(l.len());
    for k in 0..l.len() {
        let (a, b, dd) = (at(&fx, k), at(&fy, k), at(&lap, k));
        let d2 = 0.5 * (dot(a, a) + dot(b, b));
        if !(d2 > 1e-14 * scale) {
            return Err(Error::VanishingDensity {
                j1: k / n2,
                j2: k % n2,
                value: d2.max(0.0).sqrt(),
            });
        }
        let cross = [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ];
        let h = dot(dd, cross) / (2.0 * d2 * d2);
        u.push(Complex64::new(0.5 * h * d2.sqrt(), 0.0));

        // F_z = (F_x − iF_y)/2.
        let fz: Vec<Complex64> = (0..3).map(|c| 0.5 * Complex64::new(a[c], -b[c])).collect();
        let sq1 = fz[1].conj() + i * fz[0].conj();
        let sq2 = -(fz[1] + i * fz[0]);
        let t3 = fz[2];
        cands.push(if sq1.norm() >= sq2.norm() {
            let p1 = sq1.sqrt();
            [p1, -t3 / p1.conj()]
        } else {
            let p2 = sq2.sqrt();
            [-t3.conj() / p2.conj(), p2]
        });
    }

    let pick = |k: usize, prev: C2| -> C2 {
        let v = cands[k];
        if dist2(neg(v), prev) < dist2(v, prev) {
            neg(v)
        } else {
            v
        }
    };

    let mut psi = vec![[Complex64::default(); 2]; l.len()];
    psi[0] = cands[0];
    for j1 in 1..n1 {
        psi[j1 * n2] = pick(j1 * n2, psi[(j1 - 1) * n2]);
    }
    for j1 in 0..n1 {
        for j2 in 1..n2 {
            let k = j1 * n2 + j2;
            psi[k] = pick(k, psi[k - 1]);
        }
    }

    // Every neighbour pair must agree on the branch, and each period must
    // carry one sign.
    let flip = |here: C2, prev: C2| dist2(neg(here), prev) < dist2(here, prev);
    for j1 in 1..n1 {
        for j2 in 1..n2 {
            let k = j1 * n2 + j2;
            if flip(psi[k], psi[k - n2]) {
                return Err(Error::BranchInconsistent { j1, j2 });
            }
        }
    }
    let mut sign = [None::<bool>; 2];
    let mut record = |axis: usize, f: bool, j1: usize, j2: usize| -> Result<()> {
        match sign[axis] {
            Some(s) if s != f => Err(Error::BranchInconsistent { j1, j2 }),
            _ => {
                sign[axis] = Some(f);
                Ok(())
            }
        }
    };
    for j2 in 0..n2 {
        record(0, flip(psi[j2], psi[(n1 - 1) * n2 + j2]), 0, j2)?;
    }
    for j1 in 0..n1 {
        record(1, flip(psi[j1 * n2], psi[j1 * n2 + n2 - 1]), j1, 0)?;
    }
    let ch = SpinCharacter::new(sign[0].unwrap_or(false), sign[1].unwrap_or(false));

    let psi1 = GridField::new(l, ch, psi.iter().map(|v| v[0]).collect())?;
    let psi2 = GridField::new(l, ch, psi.iter().map(|v| v[1]).collect())?;
    Ok((
        GridField::new(l, SpinCharacter::TRIVIAL, u)?,
        SpinorPair::new(psi1, psi2)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::PeriodicLattice;

    fn flat(linear: [[f64; 2]; 3]) -> Immersion {
        let l = PeriodicLattice::square_2pi(8, 8).unwrap();
        let z = GridField::zeros(l, SpinCharacter::TRIVIAL);
        Immersion::new([z.clone(), z.clone(), z], linear).unwrap()
    }

    #[test]
    fn non_conformal_parametrization_is_rejected() {
        let x = flat([[1.0, 0.0], [0.0, 2.0], [0.0, 0.0]]);
        assert!(matches!(
            extract_spinors(&x),
            Err(Error::NonConformal { .. })
        ));
    }

    #[test]
    fn tilted_plane_is_minimal() {
        let (c, s) = (0.6f64, 0.8f64);
        let x = flat([[1.0, 0.0], [0.0, c], [0.0, s]]);
        let (u, psis) = extract_spinors(&x).unwrap();
        assert!(u.max_abs() < 1e-14);
        assert!(psis.character().is_trivial());
        let back = super::super::synthesize_immersion(&psis).unwrap();
        for a in 0..3 {
            for b in 0..2 {
                assert!((back.linear()[a][b] - x.linear()[a][b]).abs() < 1e-14);
            }
        }
    }
}
