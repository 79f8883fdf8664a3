//! Scalar root finding and maximization, plus an eigenvalue wrapper.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

/// Brent's method for a root of `f` in `[a, b]`, where `f(a)` and `f(b)`
/// have opposite signs (or one is zero).
pub fn brent_root<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> f64 {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return b;
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    b
}

/// Golden-section maximization of a unimodal `f` on `[a, b]` until the
/// bracket is narrower than `width`. Returns the best point seen.
pub fn golden_max<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    width: f64,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iterations = 0;
    while b - a > width && iterations < 500 {
        iterations += 1;
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Maximizes `f` over `[lo, hi]` by a uniform grid scan of `points + 1`
/// samples followed by golden-section refinement around the best sample.
/// Ties go to the smallest argument.
pub fn grid_golden_max<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    points: usize,
) -> (f64, f64) {
    let points = points.max(1);
    let step = (hi - lo) / points as f64;
    let mut best = (lo, f(lo));
    let mut best_i = 0;
    for i in 1..=points {
        let x = lo + step * i as f64;
        let v = f(x);
        if v > best.1 {
            best = (x, v);
            best_i = i;
        }
    }
    let a = lo + step * best_i.saturating_sub(1) as f64;
    let b = (lo + step * (best_i + 1) as f64).min(hi);
    let refined = golden_max(&mut f, a, b, 1e-9 * (1.0 + b.abs()));
    if refined.1 > best.1 {
        refined
    } else {
        best
    }
}

/// All eigenvalues of a square real matrix: symmetric eigendecomposition
/// for symmetric input, Hessenberg reduction and shifted QR otherwise.
pub fn eigenvalues(matrix: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    if !matrix.is_square() {
        return Err(Error::Numeric("eigenvalues need a square matrix".into()));
    }
    let dim = matrix.nrows();
    if dim == 0 {
        return Ok(Vec::new());
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("matrix has non-finite entries".into()));
    }
    if matrix == &matrix.transpose() {
        let eig = matrix.clone().symmetric_eigen();
        return Ok(eig
            .eigenvalues
            .iter()
            .map(|&x| Complex::new(x, 0.0))
            .collect());
    }
    let steps = 1000 * dim;
    let schur = matrix
        .clone()
        .try_schur(f64::EPSILON, steps)
        .ok_or_else(|| Error::Numeric(format!("QR iteration did not converge in {steps} steps")))?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Real roots of a polynomial given by coefficients from the highest degree
/// down, found as eigenvalues of the companion matrix. Leading coefficients
/// that are negligible relative to the largest one are dropped first.
pub fn polynomial_roots(coeffs: &[f64]) -> Result<Vec<Complex<f64>>> {
    let scale = coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    if scale == 0.0 {
        return Ok(Vec::new());
    }
    let start = coeffs
        .iter()
        .position(|c| c.abs() > 1e-13 * scale)
        .unwrap_or(coeffs.len());
    let c = &coeffs[start..];
    let degree = c.len().saturating_sub(1);
    if degree == 0 {
        return Ok(Vec::new());
    }
    let mut companion = DMatrix::<f64>::zeros(degree, degree);
    for j in 0..degree {
        companion[(0, j)] = -c[j + 1] / c[0];
    }
    for i in 1..degree {
        companion[(i, i - 1)] = 1.0;
    }
    let mut roots = eigenvalues(&companion)?;
    for z in roots.iter_mut() {
        *z = newton_polish(c, *z);
    }
    Ok(roots)
}

fn horner(c: &[f64], z: Complex<f64>) -> (Complex<f64>, Complex<f64>) {
    let mut p = Complex::new(0.0, 0.0);
    let mut dp = Complex::new(0.0, 0.0);
    for &ci in c {
        dp = dp * z + p;
        p = p * z + ci;
    }
    (p, dp)
}

fn newton_polish(c: &[f64], mut z: Complex<f64>) -> Complex<f64> {
    for _ in 0..8 {
        let (p, dp) = horner(c, z);
        if dp.norm() == 0.0 {
            break;
        }
        let next = z - p / dp;
        if !next.re.is_finite() || !next.im.is_finite() || horner(c, next).0.norm() > p.norm() {
            break;
        }
        z = next;
    }
    z
}

/// Serde support for complex lists as `[re, im]` pairs.
pub(crate) mod complex_serde {
    use nalgebra::Complex;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(values: &[Complex<f64>], s: S) -> Result<S::Ok, S::Error> {
        values
            .iter()
            .map(|z| (z.re, z.im))
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex<f64>>, D::Error> {
        let pairs = Vec::<(f64, f64)>::deserialize(d)?;
        Ok(pairs
            .into_iter()
            .map(|(re, im)| Complex::new(re, im))
            .collect())
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(
            values: &Option<Vec<Complex<f64>>>,
            s: S,
        ) -> Result<S::Ok, S::Error> {
            values
                .as_ref()
                .map(|v| v.iter().map(|z| (z.re, z.im)).collect::<Vec<_>>())
                .serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Option<Vec<Complex<f64>>>, D::Error> {
            let pairs = Option::<Vec<(f64, f64)>>::deserialize(d)?;
            Ok(pairs.map(|p| p.into_iter().map(|(re, im)| Complex::new(re, im)).collect()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_cubic_root() {
        let r = brent_root(|x| x * x * x - 2.0, 0.0, 2.0, 1e-15);
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, _) = golden_max(|x| -(x - 0.3).powi(2), 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8);
    }

    #[test]
    fn grid_ties_pick_smallest() {
        let (x, _) = grid_golden_max(|_| 1.0, 0.0, 5.0, 50);
        assert_eq!(x, 0.0);
    }

    #[test]
    fn identity_and_rotation_spectra() {
        let eig = eigenvalues(&DMatrix::<f64>::identity(3, 3)).unwrap();
        assert!(eig
            .iter()
            .all(|z| (z.re - 1.0).abs() < 1e-12 && z.im.abs() < 1e-12));
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let mut eig = eigenvalues(&rot).unwrap();
        eig.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((eig[0].im + 1.0).abs() < 1e-12 && eig[0].re.abs() < 1e-12);
        assert!((eig[1].im - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_roots_after_trimming() {
        let mut roots = polynomial_roots(&[0.0, 1e-20, 1.0, -3.0, 2.0]).unwrap();
        roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert_eq!(roots.len(), 2);
        assert!((roots[0].re - 1.0).abs() < 1e-12 && (roots[1].re - 2.0).abs() < 1e-12);
    }
}
