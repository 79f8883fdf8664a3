//! Markets of `Q` disjoint paths with `I` identical ISPs each.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters shared by every ISP and path of a homogeneous market.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousParams {
    pub alpha1: f64,
    pub alpha0: f64,
    pub phi1: f64,
    pub phi0: f64,
    pub gamma1: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousSpec {
    /// Number of competing paths.
    #[serde(alias = "Q")]
    pub q: usize,
    /// ISPs per path.
    #[serde(alias = "I")]
    pub i: usize,
    pub alpha1: f64,
    pub alpha0: f64,
    pub phi1: f64,
    pub phi0: f64,
    pub gamma1: f64,
    pub rho: f64,
    pub d: f64,
}

impl HomogeneousSpec {
    pub fn from_params(q: usize, i: usize, d: f64, p: HomogeneousParams) -> Self {
        Self {
            q,
            i,
            alpha1: p.alpha1,
            alpha0: p.alpha0,
            phi1: p.phi1,
            phi0: p.phi0,
            gamma1: p.gamma1,
            rho: p.rho,
            d,
        }
    }

    pub fn params(&self) -> HomogeneousParams {
        HomogeneousParams {
            alpha1: self.alpha1,
            alpha0: self.alpha0,
            phi1: self.phi1,
            phi0: self.phi0,
            gamma1: self.gamma1,
            rho: self.rho,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.q == 0 || self.i == 0 {
            return Err(Error::Parameter("Q and I must be at least 1".into()));
        }
        let reals = [
            self.alpha1,
            self.alpha0,
            self.phi1,
            self.phi0,
            self.gamma1,
            self.rho,
            self.d,
        ];
        if reals.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Parameter(
                "parameters must be finite and non-negative".into(),
            ));
        }
        if self.rho < self.phi0 {
            return Err(Error::Parameter("rho must be at least phi0".into()));
        }
        if self.d * self.phi1 + self.gamma1 <= 0.0 {
            return Err(Error::Parameter("d*phi1 + gamma1 must be positive".into()));
        }
        Ok(())
    }
}

/// Symmetric equilibrium attribute of every ISP and the quadratic behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousEquilibrium {
    pub a_plus: f64,
    pub a_hat: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
}

/// Coefficients `(T1, T2, T3)` of the quadratic `T1 a^2 + T2 a + T3 = 0`
/// satisfied by the symmetric equilibrium attribute.
pub fn homogeneous_coefficients(spec: &HomogeneousSpec) -> (f64, f64, f64) {
    let q = spec.q as f64;
    let i = spec.i as f64;
    let (a1, a0, f1, f0, g1, rho, d) = (
        spec.alpha1,
        spec.alpha0,
        spec.phi1,
        spec.phi0,
        spec.gamma1,
        spec.rho,
        spec.d,
    );
    let c = d / (d * f1 + g1);
    let qi = q * i;
    let margin = rho - f0;
    let t1 = qi * qi * a1 * a1 - c * (qi - 1.0) * (q - 1.0) * i * a1 * a1 * f1;
    let t2 = 2.0 * qi * a1 * (1.0 + q * a0)
        - c * (a1 * f1 * (qi - 1.0) * (1.0 + (q - 1.0) * a0)
            + i * a1 * (q - 1.0) * (f1 * (1.0 + q * a0) + a1 * margin));
    let t3 =
        (1.0 + q * a0).powi(2) - c * (1.0 + (q - 1.0) * a0) * (f1 * (1.0 + q * a0) + a1 * margin);
    (t1, t2, t3)
}

pub fn homogeneous_equilibrium(spec: &HomogeneousSpec) -> Result<HomogeneousEquilibrium> {
    spec.validate()?;
    let (t1, t2, t3) = homogeneous_coefficients(spec);
    let a_hat = if t1 == 0.0 {
        if t2 == 0.0 {
            return Err(Error::DegenerateQuadratic);
        }
        -t3 / t2
    } else {
        let disc = t2 * t2 - 4.0 * t1 * t3;
        if disc < 0.0 {
            return Err(Error::NoRealEquilibrium(disc));
        }
        let root = disc.sqrt();
        if t2 > 0.0 {
            -2.0 * t3 / (root + t2)
        } else {
            (root - t2) / (2.0 * t1)
        }
    };
    Ok(HomogeneousEquilibrium {
        a_plus: a_hat.max(0.0),
        a_hat,
        t1,
        t2,
        t3,
    })
}

/// Attribute that maximizes joint profit of the ISPs on a single path,
/// split evenly between them.
pub fn homogeneous_nbs(spec: &HomogeneousSpec) -> Result<f64> {
    spec.validate()?;
    if spec.q != 1 {
        return Err(Error::UnsupportedScope(format!(
            "bargaining solution is defined for a single path, got Q = {}",
            spec.q
        )));
    }
    let i = spec.i as f64;
    let radicand = spec.d / (spec.d * spec.phi1 + spec.gamma1)
        * (spec.phi1 * (1.0 + spec.alpha0) + i * spec.alpha1 * (spec.rho - spec.phi0));
    let path_total = (radicand.max(0.0).sqrt() - (1.0 + spec.alpha0)) / spec.alpha1;
    Ok((path_total / i).max(0.0))
}

/// Profit of one ISP when all ISPs of a homogeneous market play `a`.
pub fn homogeneous_profit(spec: &HomogeneousSpec, a: f64) -> f64 {
    let q = spec.q as f64;
    let v = spec.i as f64 * spec.alpha1 * a + spec.alpha0;
    spec.d * v / (1.0 + q * v) * (spec.rho - spec.phi1 * a - spec.phi0) - spec.gamma1 * a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(q: usize, i: usize) -> HomogeneousSpec {
        HomogeneousSpec {
            q,
            i,
            alpha1: 1.0,
            alpha0: 0.0,
            phi1: 0.0,
            phi0: 0.0,
            gamma1: 1.0,
            rho: 1.0,
            d: 4.0,
        }
    }

    #[test]
    fn worked_equilibria() {
        let e = homogeneous_equilibrium(&base(1, 1)).unwrap();
        assert_eq!((e.t1, e.t2, e.t3), (1.0, 2.0, -3.0));
        assert!((e.a_plus - 1.0).abs() < 1e-12);
        let e = homogeneous_equilibrium(&base(2, 1)).unwrap();
        assert_eq!((e.t1, e.t2, e.t3), (4.0, 0.0, -3.0));
        assert!((e.a_plus - 48f64.sqrt() / 8.0).abs() < 1e-12);
        let e = homogeneous_equilibrium(&base(1, 2)).unwrap();
        assert_eq!((e.t1, e.t2, e.t3), (4.0, 4.0, -3.0));
        assert!((e.a_plus - 0.5).abs() < 1e-12);
    }

    #[test]
    fn worked_bargaining_solutions() {
        assert!((homogeneous_nbs(&base(1, 1)).unwrap() - 1.0).abs() < 1e-12);
        let two = homogeneous_nbs(&base(1, 2)).unwrap();
        assert!((two - (8f64.sqrt() - 1.0) / 2.0).abs() < 1e-12);
        let mut idle = base(1, 1);
        idle.d = 0.0;
        assert_eq!(homogeneous_nbs(&idle).unwrap(), 0.0);
        assert!(homogeneous_nbs(&base(2, 1)).is_err());
    }

    #[test]
    fn competition_pair_example() {
        let mut s = base(1, 1);
        s.d = 2.0;
        let e = homogeneous_equilibrium(&s).unwrap();
        assert!((e.a_plus - (8f64.sqrt() - 2.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut s = base(1, 1);
        s.phi0 = 2.0;
        assert!(homogeneous_equilibrium(&s).is_err());
        let mut s = base(1, 1);
        s.gamma1 = 0.0;
        assert!(homogeneous_equilibrium(&s).is_err());
    }
}
