use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fracops::SampledFunction;
use crate::functions::{SpaceFunction, TimeFunction};
use crate::grid::SpaceGrid;
use crate::spectral::{analyze, check_compatibility, coefficient, CompatibilityReport, Profile, ProfileSamples};

/// Time levels at which a time-dependent source is checked for compatibility.
const COMPAT_LEVELS: usize = 8;

/// The source term ḡ(t, x).
#[derive(Clone)]
pub enum Source {
    /// Σ f_i(t) h_i(x) with analytic derivatives.
    Separable(Vec<(TimeFunction, SpaceFunction)>),
    /// A black-box evaluator; x-derivatives come from finite differences.
    Field(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
    /// Sampled sine coefficients ḡ_k(t), k = 1, 2, ...
    Modes(Vec<SampledFunction>),
}

impl fmt::Debug for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Separable(terms) => f.debug_tuple("Separable").field(terms).finish(),
            Source::Field(_) => f.write_str("Field(<fn>)"),
            Source::Modes(m) => write!(f, "Modes({} modes)", m.len()),
        }
    }
}

impl Source {
    pub fn product(time: TimeFunction, space: SpaceFunction) -> Self {
        Source::Separable(vec![(time, space)])
    }

    /// A time-independent source g(x).
    pub fn stationary(space: SpaceFunction) -> Self {
        Self::product(TimeFunction::constant(1.0), space)
    }

    pub fn field(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Source::Field(Arc::new(f))
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        match self {
            Source::Separable(terms) => terms.iter().map(|(f, h)| f.eval(t) * h.eval(x, 0)).sum(),
            Source::Field(f) => f(t, x),
            Source::Modes(m) => {
                if x == 0.0 || x == 1.0 {
                    return 0.0;
                }
                m.iter()
                    .enumerate()
                    .map(|(i, g)| g.interpolate_cubic(t) * ((i + 1) as f64 * PI * x).sin())
                    .sum()
            }
        }
    }

    /// ḡ_k(t) for k = 1..=modes at each of `times`, by sine analysis on `space`.
    pub fn project(&self, space: &SpaceGrid, modes: usize, times: &[f64]) -> Result<Vec<Vec<f64>>> {
        match self {
            Source::Separable(terms) => {
                let spatial = terms
                    .iter()
                    .map(|(_, h)| analyze(&space.sample(|x| h.eval(x, 0)), modes))
                    .collect::<Result<Vec<_>>>()?;
                let levels: Vec<Vec<f64>> = terms.iter().map(|(f, _)| times.iter().map(|&t| f.eval(t)).collect()).collect();
                Ok((1..=modes)
                    .map(|k| {
                        (0..times.len())
                            .map(|i| spatial.iter().zip(&levels).map(|(s, f)| f[i] * s.coeff(k)).sum())
                            .collect()
                    })
                    .collect())
            }
            Source::Field(f) => {
                let rows = times
                    .par_iter()
                    .map(|&t| analyze(&space.sample(|x| f(t, x)), modes))
                    .collect::<Result<Vec<_>>>()?;
                Ok((1..=modes).map(|k| rows.iter().map(|s| s.coeff(k)).collect()).collect())
            }
            Source::Modes(m) => {
                let t_max = times.iter().fold(0.0f64, |a, &b| a.max(b));
                if let Some(g) = m.iter().find(|g| g.t_end() < t_max * (1.0 - 1e-12)) {
                    return Err(Error::InvalidSamples(format!(
                        "mode samples end at t = {} but t = {t_max} is needed",
                        g.t_end()
                    )));
                }
                Ok((0..modes)
                    .map(|i| match m.get(i) {
                        Some(g) => times.iter().map(|&t| g.interpolate_cubic(t)).collect(),
                        None => vec![0.0; times.len()],
                    })
                    .collect())
            }
        }
    }

    /// ḡ_k(t) alone at each of `times`.
    pub fn project_mode(&self, space: &SpaceGrid, k: usize, times: &[f64]) -> Result<Vec<f64>> {
        match self {
            Source::Field(f) => times
                .par_iter()
                .map(|&t| coefficient(&space.sample(|x| f(t, x)), k))
                .collect(),
            Source::Separable(terms) => {
                let spatial = terms
                    .iter()
                    .map(|(_, h)| coefficient(&space.sample(|x| h.eval(x, 0)), k))
                    .collect::<Result<Vec<_>>>()?;
                Ok(times
                    .iter()
                    .map(|&t| terms.iter().zip(&spatial).map(|((f, _), c)| f.eval(t) * c).sum())
                    .collect())
            }
            Source::Modes(_) => Ok(self.project(space, k, times)?.pop().expect("k >= 1")),
        }
    }

    /// ḡ(t, ·) and its x-derivatives at time t.
    fn profile_at(&self, space: &SpaceGrid, t: f64) -> ProfileSamples {
        let m = space.intervals;
        match self {
            Source::Separable(terms) => {
                let mut acc = ProfileSamples::from_fn(m, |_, _| 0.0);
                for (f, h) in terms {
                    let c = f.eval(t);
                    let s = h.profile_samples(m);
                    for (a, b) in [
                        (&mut acc.value, &s.value),
                        (&mut acc.d1, &s.d1),
                        (&mut acc.d2, &s.d2),
                        (&mut acc.d3, &s.d3),
                    ] {
                        a.iter_mut().zip(b).for_each(|(a, b)| *a += c * b);
                    }
                }
                acc
            }
            Source::Field(f) => ProfileSamples::from_values(space.sample(|x| f(t, x))),
            Source::Modes(modes) => {
                let c: Vec<f64> = modes.iter().map(|g| g.interpolate_cubic(t)).collect();
                ProfileSamples::from_fn(m, |x, order| {
                    c.iter()
                        .enumerate()
                        .map(|(i, ck)| {
                            let w = (i + 1) as f64 * PI;
                            let s = if order == 0 {
                                crate::specfun::sin_pi((i + 1) as f64 * x)
                            } else {
                                (w * x + order as f64 * FRAC_PI_2).sin()
                            };
                            ck * w.powi(order as i32) * s
                        })
                        .sum()
                })
            }
        }
    }

    /// Worst case of the profile checks over evenly spaced time levels in [0, T].
    pub fn compatibility(&self, space: &SpaceGrid, t_end: f64, profile: Profile) -> Result<CompatibilityReport> {
        let stationary = match self {
            Source::Separable(terms) => terms.iter().all(|(f, _)| f.is_constant()),
            _ => false,
        };
        let levels: Vec<f64> = if stationary {
            vec![t_end]
        } else {
            (0..=COMPAT_LEVELS).map(|i| t_end * i as f64 / COMPAT_LEVELS as f64).collect()
        };
        let reports: Vec<_> = levels
            .iter()
            .map(|&t| check_compatibility(&self.profile_at(space, t), profile))
            .collect();
        CompatibilityReport::worst_of(&reports).ok_or_else(|| Error::InvalidParams("no time levels".into()))
    }
}
