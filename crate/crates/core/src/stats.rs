//! Bayesian signed test for comparing two methods across datasets.
//!
//! The posterior over the distribution of per-dataset differences is a
//! Dirichlet-process mixture of point masses at the observed differences
//! plus one prior pseudo-observation. Each posterior draw assigns Dirichlet
//! weights to these points and splits the total mass into three regions:
//! left (`d < -rope`, method A better), rope (`|d| <= rope`) and right
//! (`d > rope`, method B better), where `d = B - A`.

use std::io::Write;

use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// How a posterior draw is credited to the three regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attribution {
    /// The region holding the largest mass wins the draw.
    MaxMass,
    /// Every region is credited with its mass.
    ExpectedMass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirichletConfig {
    /// Prior weight `s` of the pseudo-observation.
    pub prior_strength: f64,
    /// Location `z0` of the pseudo-observation.
    pub prior_pseudo_observation: f64,
    /// Half-width of the region of practical equivalence.
    pub rope_width: f64,
    pub posterior_samples: usize,
    pub attribution: Attribution,
    pub seed: u64,
}

impl Default for DirichletConfig {
    fn default() -> Self {
        Self {
            prior_strength: 0.5,
            prior_pseudo_observation: 0.0,
            rope_width: 0.01,
            posterior_samples: 50_000,
            attribution: Attribution::MaxMass,
            seed: 0,
        }
    }
}

impl DirichletConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.prior_strength > 0.0 && self.prior_strength.is_finite()) {
            return Err(Error::InvalidConfig("prior strength must be positive".into()));
        }
        if self.rope_width.is_nan() || self.rope_width < 0.0 {
            return Err(Error::InvalidConfig("rope width must be nonnegative".into()));
        }
        if self.posterior_samples < 1000 {
            return Err(Error::InvalidConfig("at least 1000 posterior samples required".into()));
        }
        Ok(())
    }
}

/// Posterior probabilities of the three regions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedTestResult {
    pub p_left: f64,
    pub p_rope: f64,
    pub p_right: f64,
}

/// Barycentric coordinates of one posterior draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplexPoint {
    pub left: f64,
    pub rope: f64,
    pub right: f64,
}

#[derive(Clone, Copy)]
enum Region {
    Left,
    Rope,
    Right,
}

fn region(d: f64, rope: f64) -> Region {
    if d < -rope {
        Region::Left
    } else if d > rope {
        Region::Right
    } else {
        Region::Rope
    }
}

/// Region masses of every posterior draw.
pub fn simplex_points(differences: &[f64], config: &DirichletConfig) -> Result<Vec<SimplexPoint>> {
    config.validate()?;
    if differences.is_empty() {
        return Err(Error::Empty("no per-dataset differences".into()));
    }
    if differences.len() < 2 {
        return Err(Error::InvalidConfig("the signed test needs at least two datasets".into()));
    }
    if differences.iter().any(|d| !d.is_finite()) {
        return Err(Error::InvalidConfig("non-finite difference".into()));
    }

    let mut regions: Vec<Region> = differences
        .iter()
        .map(|&d| region(d, config.rope_width))
        .collect();
    regions.push(region(config.prior_pseudo_observation, config.rope_width));
    let observation = Gamma::new(1.0, 1.0).expect("unit shape");
    let prior = Gamma::new(config.prior_strength, 1.0)
        .map_err(|e| Error::InvalidConfig(format!("prior strength: {e}")))?;

    let mut rng = rng::seeded(config.seed);
    let mut points = Vec::with_capacity(config.posterior_samples);
    let n_obs = differences.len();
    while points.len() < config.posterior_samples {
        let mut mass = [0.0f64; 3];
        for (i, r) in regions.iter().enumerate() {
            let w: f64 = if i < n_obs {
                observation.sample(&mut rng)
            } else {
                prior.sample(&mut rng)
            };
            mass[*r as usize] += w;
        }
        let total = mass[0] + mass[1] + mass[2];
        if total <= 0.0 {
            continue;
        }
        points.push(SimplexPoint {
            left: mass[Region::Left as usize] / total,
            rope: mass[Region::Rope as usize] / total,
            right: mass[Region::Right as usize] / total,
        });
    }
    Ok(points)
}

/// Posterior probabilities that A is better, the two are practically
/// equivalent, or B is better, for differences `B - A`.
pub fn bayesian_signed_test(differences: &[f64], config: &DirichletConfig) -> Result<SignedTestResult> {
    let points = simplex_points(differences, config)?;
    Ok(attribute(&points, config.attribution))
}

pub fn attribute(points: &[SimplexPoint], attribution: Attribution) -> SignedTestResult {
    let n = points.len() as f64;
    let mut acc = [0.0f64; 3];
    for p in points {
        match attribution {
            Attribution::ExpectedMass => {
                acc[0] += p.left;
                acc[1] += p.rope;
                acc[2] += p.right;
            }
            Attribution::MaxMass => {
                // Ties favour the rope, then the left region.
                let winner = if p.rope >= p.left && p.rope >= p.right {
                    1
                } else if p.left >= p.right {
                    0
                } else {
                    2
                };
                acc[winner] += 1.0;
            }
        }
    }
    let total = acc[0] + acc[1] + acc[2];
    let scale = if total > 0.0 { total } else { n };
    SignedTestResult {
        p_left: acc[0] / scale,
        p_rope: acc[1] / scale,
        p_right: acc[2] / scale,
    }
}

/// Writes `left,rope,right` rows.
pub fn write_simplex_csv<W: Write>(points: &[SimplexPoint], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for p in points {
        writer.serialize(p)?;
    }
    writer.flush().map_err(|e| Error::io("<simplex>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(rope: f64) -> DirichletConfig {
        DirichletConfig {
            rope_width: rope,
            posterior_samples: 20_000,
            seed: 11,
            ..DirichletConfig::default()
        }
    }

    #[test]
    fn zero_differences_sit_in_rope() {
        let r = bayesian_signed_test(&[0.0; 20], &cfg(0.01)).unwrap();
        assert_eq!(r.p_rope, 1.0);
    }

    #[test]
    fn positive_differences_go_right() {
        let r = bayesian_signed_test(&[0.2; 20], &cfg(0.01)).unwrap();
        assert!(r.p_right > 0.99);
        let points = simplex_points(&[0.2; 20], &cfg(0.01)).unwrap();
        let near = points.iter().filter(|p| p.right > 0.9).count();
        assert!(near as f64 >= 0.95 * points.len() as f64);
    }

    #[test]
    fn points_lie_on_simplex() {
        let d = [0.1, -0.05, 0.003, 0.2, -0.3];
        for p in simplex_points(&d, &cfg(0.01)).unwrap() {
            assert!((p.left + p.rope + p.right - 1.0).abs() < 1e-9);
            assert!(p.left >= 0.0 && p.rope >= 0.0 && p.right >= 0.0);
        }
        let r = bayesian_signed_test(&d, &cfg(0.01)).unwrap();
        assert!((r.p_left + r.p_rope + r.p_right - 1.0).abs() < 1e-9);
        let e = bayesian_signed_test(
            &d,
            &DirichletConfig {
                attribution: Attribution::ExpectedMass,
                ..cfg(0.01)
            },
        )
        .unwrap();
        assert!((e.p_left + e.p_rope + e.p_right - 1.0).abs() < 1e-9);
    }

    #[test]
    fn errors() {
        assert!(matches!(simplex_points(&[], &cfg(0.0)), Err(Error::Empty(_))));
        assert!(simplex_points(&[0.1], &cfg(0.0)).is_err());
        let bad = DirichletConfig {
            posterior_samples: 10,
            ..cfg(0.0)
        };
        assert!(simplex_points(&[0.1, 0.2], &bad).is_err());
    }

    #[test]
    fn csv_columns() {
        let mut buf = Vec::new();
        write_simplex_csv(
            &[SimplexPoint {
                left: 0.25,
                rope: 0.5,
                right: 0.25,
            }],
            &mut buf,
        )
        .unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "left,rope,right\n0.25,0.5,0.25\n");
    }
}
