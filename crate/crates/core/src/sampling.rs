//! Seeded random instances for parameter sweeps.
//!
//! Positive parameters are log-uniform over `[1e-2, 1e2]` and base
//! valuations uniform over `[0, 5]`. Revenue and fixed per-unit cost are
//! redrawn together until revenue covers the cost.

use rand::Rng;

use crate::equilibrium::{HomogeneousParams, HomogeneousSpec, TwoPathGeneralParams};
use crate::model::{
    AttributeMatrix, CostForm, IspParams, Market, NetworkModel, Path, Tier, ValuationForm,
};
use crate::netgen::TwoPathSide;

pub const PARAM_RANGE: (f64, f64) = (1e-2, 1e2);
pub const BASE_VALUATION_RANGE: (f64, f64) = (0.0, 5.0);

/// Log-uniform draw over `[lo, hi]`; returns `lo` for an empty range.
pub fn log_uniform<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if hi <= lo {
        return lo;
    }
    (lo.ln() + rng.gen::<f64>() * (hi.ln() - lo.ln())).exp()
}

pub fn positive<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    log_uniform(rng, PARAM_RANGE)
}

pub fn base_valuation<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.gen_range(BASE_VALUATION_RANGE.0..=BASE_VALUATION_RANGE.1)
}

/// Revenue `rho` and fixed per-unit cost `phi0` with `rho >= phi0`.
pub fn revenue_and_cost<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    loop {
        let (rho, phi0) = (positive(rng), positive(rng));
        if rho >= phi0 {
            return (rho, phi0);
        }
    }
}

pub fn homogeneous_params<R: Rng + ?Sized>(rng: &mut R) -> HomogeneousParams {
    let (rho, phi0) = revenue_and_cost(rng);
    HomogeneousParams {
        alpha1: positive(rng),
        alpha0: base_valuation(rng),
        phi1: positive(rng),
        phi0,
        gamma1: positive(rng),
        rho,
    }
}

/// Homogeneous spec with `1..=max_q` paths of `1..=max_i` ISPs each.
pub fn homogeneous_spec<R: Rng + ?Sized>(
    rng: &mut R,
    max_q: usize,
    max_i: usize,
) -> HomogeneousSpec {
    let q = rng.gen_range(1..=max_q.max(1));
    let i = rng.gen_range(1..=max_i.max(1));
    HomogeneousSpec::from_params(q, i, positive(rng), homogeneous_params(rng))
}

fn isp<R: Rng + ?Sized>(rng: &mut R, n: usize, attributes: usize, unit_costs: bool) -> IspParams {
    let (rho, phi0) = revenue_and_cost(rng);
    IspParams {
        name: format!("isp{n}"),
        rho,
        phi0,
        phi: (0..attributes)
            .map(|_| if unit_costs { positive(rng) } else { 0.0 })
            .collect(),
        gamma: (0..attributes).map(|_| positive(rng)).collect(),
        gamma0: 0.0,
        tier: Tier::Unclassified,
    }
}

fn path<R: Rng + ?Sized>(rng: &mut R, r: usize, isps: Vec<usize>, attributes: usize) -> Path {
    let coeffs = isps
        .iter()
        .map(|_| (0..attributes).map(|_| positive(rng)).collect())
        .collect();
    Path {
        id: format!("r{r}"),
        isps,
        base_valuation: base_valuation(rng),
        valuation_coeffs: coeffs,
    }
}

fn single_market(
    isps: Vec<IspParams>,
    paths: Vec<Path>,
    attributes: usize,
    d: f64,
) -> NetworkModel {
    let members = (0..paths.len()).collect();
    NetworkModel {
        isps,
        attributes: (0..attributes).map(|k| format!("k{k}")).collect(),
        paths,
        markets: vec![Market {
            source: "s".into(),
            destination: "t".into(),
            demand_limit: d,
            paths: members,
        }],
        valuation_form: ValuationForm::Affine,
        cost_form: CostForm::Affine,
        attribute_lower_bounds: None,
        attribute_upper_bounds: None,
    }
}

/// One market with up to three paths over a shared pool of up to four
/// ISPs, up to two attributes and positive per-unit attribute costs.
pub fn single_market_model<R: Rng + ?Sized>(rng: &mut R) -> NetworkModel {
    let attributes = rng.gen_range(1..=2);
    let pool = rng.gen_range(1..=4);
    let isps = (0..pool).map(|n| isp(rng, n, attributes, true)).collect();
    let path_count = rng.gen_range(1..=3);
    let paths = (0..path_count)
        .map(|r| {
            let mut members: Vec<usize> = (0..pool).filter(|_| rng.gen_bool(0.5)).collect();
            if members.is_empty() {
                members.push(rng.gen_range(0..pool));
            }
            path(rng, r, members, attributes)
        })
        .collect();
    single_market(isps, paths, attributes, positive(rng))
}

/// One path of `1..=max_isps` ISPs with `1..=max_attributes` attributes
/// and no per-unit attribute costs.
pub fn single_path_model<R: Rng + ?Sized>(
    rng: &mut R,
    max_isps: usize,
    max_attributes: usize,
) -> NetworkModel {
    let attributes = rng.gen_range(1..=max_attributes.max(1));
    let count = rng.gen_range(1..=max_isps.max(1));
    let isps = (0..count).map(|n| isp(rng, n, attributes, false)).collect();
    let paths = vec![path(rng, 0, (0..count).collect(), attributes)];
    single_market(isps, paths, attributes, positive(rng))
}

/// One market with two disjoint paths of `1..=max_isps` ISPs each and no
/// per-unit attribute costs.
pub fn two_path_model<R: Rng + ?Sized>(
    rng: &mut R,
    max_isps: usize,
    max_attributes: usize,
) -> NetworkModel {
    let attributes = rng.gen_range(1..=max_attributes.max(1));
    let sizes = [
        rng.gen_range(1..=max_isps.max(1)),
        rng.gen_range(1..=max_isps.max(1)),
    ];
    let isps = (0..sizes[0] + sizes[1])
        .map(|n| isp(rng, n, attributes, false))
        .collect();
    let paths = vec![
        path(rng, 0, (0..sizes[0]).collect(), attributes),
        path(
            rng,
            1,
            (sizes[0]..sizes[0] + sizes[1]).collect(),
            attributes,
        ),
    ];
    single_market(isps, paths, attributes, positive(rng))
}

/// Single-ISP path with characteristic ratio `psi` and base valuation `alpha0`.
pub fn side_with_ratio(psi: f64, alpha0: f64) -> TwoPathSide {
    TwoPathSide {
        alpha: 1.0,
        alpha0,
        rho: 1.0,
        phi0: 0.0,
        gamma: 1.0 / (psi * psi),
    }
}

/// Two single-ISP competitors with general costs; `unit_costs = false`
/// sets the per-unit attribute costs to zero.
pub fn two_path_general<R: Rng + ?Sized>(rng: &mut R, unit_costs: bool) -> TwoPathGeneralParams {
    let (rho0, phi00) = revenue_and_cost(rng);
    let (rho1, phi01) = revenue_and_cost(rng);
    let phi1 = if unit_costs {
        [positive(rng), positive(rng)]
    } else {
        [0.0, 0.0]
    };
    TwoPathGeneralParams {
        d: positive(rng),
        alpha: [positive(rng), positive(rng)],
        alpha0: [base_valuation(rng), base_valuation(rng)],
        phi1,
        phi0: [phi00, phi01],
        gamma1: [positive(rng), positive(rng)],
        rho: [rho0, rho1],
    }
}

/// Attribute matrix with entries uniform over `[0, max]`.
pub fn attributes<R: Rng + ?Sized>(rng: &mut R, model: &NetworkModel, max: f64) -> AttributeMatrix {
    let mut a = model.zero_attributes();
    for v in a.as_mut_slice() {
        *v = rng.gen_range(0.0..=max);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_models_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            single_market_model(&mut rng).validate().unwrap();
            single_path_model(&mut rng, 3, 2).validate().unwrap();
            two_path_model(&mut rng, 2, 2).validate().unwrap();
            two_path_general(&mut rng, true)
                .to_model()
                .validate()
                .unwrap();
            homogeneous_spec(&mut rng, 4, 3).validate().unwrap();
        }
    }

    #[test]
    fn ranges_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let x = positive(&mut rng);
            assert!((PARAM_RANGE.0..=PARAM_RANGE.1).contains(&x));
            let (rho, phi0) = revenue_and_cost(&mut rng);
            assert!(rho >= phi0);
        }
        assert_eq!(log_uniform(&mut rng, (3.0, 3.0)), 3.0);
    }

    #[test]
    fn side_ratio_round_trip() {
        assert!((side_with_ratio(2.5, 0.0).psi() - 2.5).abs() < 1e-12);
    }
}
