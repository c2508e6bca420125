//! Posterior densities from a prior and a likelihood.

use crate::density::{Density, GridDensity};
use crate::error::{Error, Result};

/// Likelihood `p(x | θ)`.
pub trait Likelihood: Sync {
    fn eval(&self, x: &[f64], theta: &[f64]) -> f64;

    /// True when `p(x | θ)` does not depend on `θ`.
    fn theta_independent(&self) -> bool {
        false
    }
}

/// Likelihood that ignores `θ`; the posterior is the prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatLikelihood(pub f64);

impl Likelihood for FlatLikelihood {
    fn eval(&self, _x: &[f64], _theta: &[f64]) -> f64 {
        self.0
    }

    fn theta_independent(&self) -> bool {
        true
    }
}

/// Wraps a closure `(x, θ) ↦ p(x | θ)`.
pub struct FnLikelihood<F>(pub F);

impl<F> Likelihood for FnLikelihood<F>
where
    F: Fn(&[f64], &[f64]) -> f64 + Sync,
{
    fn eval(&self, x: &[f64], theta: &[f64]) -> f64 {
        (self.0)(x, theta)
    }
}

pub struct BayesModel<'a> {
    pub prior: Density,
    pub likelihood: &'a dyn Likelihood,
    pub observation: Vec<f64>,
}

/// Evidence `∫ p(x|z) π(z) dz` by the composite midpoint rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evidence {
    /// Midpoint estimate at the requested resolution.
    pub coarse: f64,
    /// Estimate at twice the resolution.
    pub fine: f64,
    /// Richardson extrapolation `(4·fine − coarse)/3`.
    pub extrapolated: f64,
    /// `|fine − coarse|`, a bound on the coarse error for smooth integrands.
    pub error_estimate: f64,
}

struct Cells {
    origin: Vec<f64>,
    spacing: Vec<f64>,
    shape: Vec<usize>,
    values: Vec<f64>,
}

fn unnormalized(m: &BayesModel<'_>, resolution: usize) -> Result<Cells> {
    let lik = |theta: &[f64]| -> Result<f64> {
        let p = m.likelihood.eval(&m.observation, theta);
        if p < 0.0 || p.is_nan() {
            return Err(Error::InvalidArgument(format!("likelihood {p} at {theta:?} is not a nonnegative number")));
        }
        Ok(p)
    };
    match &m.prior {
        Density::Piecewise(pw) => {
            let (lo, hi) = pw.support();
            let h = (hi - lo) / resolution as f64;
            let values = (0..resolution)
                .map(|i| {
                    let t = lo + (i as f64 + 0.5) * h;
                    Ok(pw.evaluate(t) * lik(&[t])?)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Cells {
                origin: vec![lo],
                spacing: vec![h],
                shape: vec![resolution],
                values,
            })
        }
        Density::Grid(g) => {
            // refine every prior cell into `resolution` sub-cells per axis
            let spacing: Vec<f64> = g.spacing().iter().map(|s| s / resolution as f64).collect();
            let shape: Vec<usize> = g.shape().iter().map(|n| n * resolution).collect();
            let centre = |idx: &[usize]| -> Vec<f64> {
                (0..idx.len())
                    .map(|a| g.origin()[a] + (idx[a] as f64 + 0.5) * spacing[a])
                    .collect()
            };
            let prior_at = |idx: &[usize]| -> f64 {
                let parent: Vec<usize> = idx.iter().map(|i| i / resolution).collect();
                g.value_at_cell(&parent)
            };
            let mut values = Vec::with_capacity(shape.iter().product());
            if shape.len() == 1 {
                for i in 0..shape[0] {
                    values.push(prior_at(&[i]) * lik(&centre(&[i]))?);
                }
            } else {
                for i in 0..shape[0] {
                    for j in 0..shape[1] {
                        values.push(prior_at(&[i, j]) * lik(&centre(&[i, j]))?);
                    }
                }
            }
            Ok(Cells {
                origin: g.origin().to_vec(),
                spacing,
                shape,
                values,
            })
        }
    }
}

fn riemann(c: &Cells) -> f64 {
    c.values.iter().sum::<f64>() * c.spacing.iter().product::<f64>()
}

fn check_evidence(z: f64) -> Result<f64> {
    if !z.is_finite() {
        Err(Error::DivergentEvidence(z))
    } else if z <= 0.0 {
        Err(Error::ZeroEvidence)
    } else {
        Ok(z)
    }
}

/// Evidence at `resolution` and `2·resolution`.
pub fn evidence(m: &BayesModel<'_>, resolution: usize) -> Result<Evidence> {
    if resolution == 0 {
        return Err(Error::InvalidArgument("grid resolution must be positive".into()));
    }
    let coarse = check_evidence(riemann(&unnormalized(m, resolution)?))?;
    let fine = check_evidence(riemann(&unnormalized(m, 2 * resolution)?))?;
    Ok(Evidence {
        coarse,
        fine,
        extrapolated: (4.0 * fine - coarse) / 3.0,
        error_estimate: (fine - coarse).abs(),
    })
}

/// Posterior density on a midpoint grid over the prior's support.
///
/// A θ-independent likelihood returns the prior unchanged. Otherwise the
/// result is a histogram with `grid_resolution` cells (1D pieces) or
/// `grid_resolution` sub-cells per prior cell and axis (grid priors),
/// normalized to unit Riemann mass.
pub fn posterior(m: &BayesModel<'_>, grid_resolution: usize) -> Result<Density> {
    if m.likelihood.theta_independent() {
        let probe = vec![0.0; m.prior.dim()];
        let p = m.likelihood.eval(&m.observation, &probe);
        check_evidence(p)?;
        return Ok(m.prior.clone());
    }
    evidence(m, grid_resolution)?;
    let cells = unnormalized(m, grid_resolution)?;
    Ok(GridDensity::normalized(cells.origin, cells.spacing, cells.shape, cells.values)?.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{Piece, UscDensity1D};

    fn uniform() -> Density {
        UscDensity1D::new(vec![Piece::constant(0.0, 1.0, 1.0).unwrap()]).unwrap().into()
    }

    #[test]
    fn flat_likelihood_returns_prior() {
        let lik = FlatLikelihood(0.3);
        let m = BayesModel {
            prior: uniform(),
            likelihood: &lik,
            observation: vec![1.0],
        };
        assert_eq!(posterior(&m, 10).unwrap(), uniform());
    }

    #[test]
    fn linear_likelihood_gives_ramp() {
        let lik = FnLikelihood(|_x: &[f64], t: &[f64]| 5.0 * t[0]);
        let m = BayesModel {
            prior: uniform(),
            likelihood: &lik,
            observation: vec![0.0],
        };
        let post = posterior(&m, 100).unwrap();
        let Density::Grid(g) = &post else { panic!("expected a grid") };
        for i in [0, 37, 99] {
            let t = (i as f64 + 0.5) / 100.0;
            assert!((g.value_at_cell(&[i]) - 2.0 * t).abs() < 1e-12);
        }
        let ev = evidence(&m, 100).unwrap();
        assert!((ev.extrapolated - 2.5).abs() < 1e-12);
    }

    #[test]
    fn zero_and_divergent_evidence() {
        let zero = FnLikelihood(|_x: &[f64], _t: &[f64]| 0.0);
        let m = BayesModel {
            prior: uniform(),
            likelihood: &zero,
            observation: vec![],
        };
        assert!(matches!(posterior(&m, 10), Err(Error::ZeroEvidence)));
        let inf = FnLikelihood(|_x: &[f64], t: &[f64]| if t[0] < 0.1 { f64::INFINITY } else { 1.0 });
        let m = BayesModel {
            prior: uniform(),
            likelihood: &inf,
            observation: vec![],
        };
        assert!(matches!(posterior(&m, 10), Err(Error::DivergentEvidence(_))));
    }
}
