use std::collections::BTreeMap;
use std::sync::Arc;

use super::{MapModel, OdeModel, OutputMap, SdeModel};
use crate::{Error, Result};

/// A model built from the registry.
#[derive(Debug, Clone)]
pub enum RegisteredModel {
    Ode(OdeModel),
    Sde(SdeModel),
    Map(MapModel),
}

impl RegisteredModel {
    pub fn id(&self) -> &str {
        match self {
            RegisteredModel::Ode(m) => m.id(),
            RegisteredModel::Sde(m) => m.id(),
            RegisteredModel::Map(_) => "map",
        }
    }
}

struct Entry {
    id: &'static str,
    params: &'static [(&'static str, f64)],
    doc: &'static str,
}

const ENTRIES: &[Entry] = &[
    Entry {
        id: "sine_well",
        params: &[("a", 0.1), ("b", 0.5), ("c", 1.0)],
        doc: "x1' = x2, x2' = -a x1 - b sin(2 x1) - c x2",
    },
    Entry {
        id: "sine_well_linear",
        params: &[("a", 0.1), ("b", 0.5), ("c", 1.0)],
        doc: "linearization of sine_well at the origin",
    },
    Entry {
        id: "sine_well_sde",
        params: &[("a", 0.1), ("b", 0.5), ("c", 1.0), ("q", 0.2)],
        doc: "sine_well driven by noise of intensity q on x2",
    },
    Entry {
        id: "sine_well_linear_sde",
        params: &[("a", 0.1), ("b", 0.5), ("c", 1.0), ("q", 0.2)],
        doc: "linearization of sine_well_sde at the origin",
    },
    Entry {
        id: "cubic",
        params: &[],
        doc: "x' = -p x^3 on the extended state (x, p)",
    },
    Entry {
        id: "scalar_linear",
        params: &[("a", -1.0), ("c", 1.0)],
        doc: "x' = a x, y = c x",
    },
    Entry {
        id: "scalar_affine",
        params: &[("a", -1.0), ("b", 0.0), ("c", 1.0), ("d", 0.0)],
        doc: "x' = a x + b, y = c x + d",
    },
    Entry {
        id: "chebyshev",
        params: &[],
        doc: "x -> cos(2 arccos x) on [-1, 1]",
    },
    Entry {
        id: "logistic",
        params: &[],
        doc: "x -> 4 x (1 - x) on [0, 1]",
    },
    Entry {
        id: "logistic_multiplicative",
        params: &[],
        doc: "x -> zeta x (1 - x), zeta with standard normal density on [0, 4]",
    },
    Entry {
        id: "additive_identity",
        params: &[],
        doc: "x -> x + zeta, zeta standard normal",
    },
];

/// Identifiers and one-line descriptions of the built-in models.
pub fn registry() -> Vec<(&'static str, &'static str)> {
    ENTRIES.iter().map(|e| (e.id, e.doc)).collect()
}

/// Build a registered model; unspecified parameters take their defaults.
pub fn build_model(id: &str, params: &BTreeMap<String, f64>) -> Result<RegisteredModel> {
    let entry = ENTRIES
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::config("UNKNOWN_MODEL", format!("no model named {id:?}")))?;
    for key in params.keys() {
        if !entry.params.iter().any(|(k, _)| k == key) {
            return Err(Error::config(
                "UNKNOWN_PARAM",
                format!("model {id:?} has no parameter {key:?}"),
            ));
        }
    }
    let p = |name: &str| -> f64 {
        params.get(name).copied().unwrap_or_else(|| {
            entry.params.iter().find(|(k, _)| *k == name).map(|(_, v)| *v).unwrap_or(f64::NAN)
        })
    };
    if let Some((k, v)) = params.iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::config("BAD_PARAM", format!("parameter {k} = {v}")));
    }
    Ok(match id {
        "sine_well" => RegisteredModel::Ode(sine_well(p("a"), p("b"), p("c"))),
        "sine_well_linear" => RegisteredModel::Ode(sine_well_linear(p("a"), p("b"), p("c"))),
        "sine_well_sde" => {
            let (a, b, c) = (p("a"), p("b"), p("c"));
            RegisteredModel::Sde(SdeModel::additive(
                "sine_well_sde",
                2,
                Arc::new(move |x: &[f64], f: &mut [f64]| {
                    f[0] = x[1];
                    f[1] = -a * x[0] - b * (2.0 * x[0]).sin() - c * x[1];
                }),
                vec![0.0, 1.0],
                vec![p("q")],
            )?)
        }
        "sine_well_linear_sde" => {
            let (k, c) = (p("a") + 2.0 * p("b"), p("c"));
            RegisteredModel::Sde(SdeModel::additive(
                "sine_well_linear_sde",
                2,
                Arc::new(move |x: &[f64], f: &mut [f64]| {
                    f[0] = x[1];
                    f[1] = -k * x[0] - c * x[1];
                }),
                vec![0.0, 1.0],
                vec![p("q")],
            )?)
        }
        "cubic" => RegisteredModel::Ode(cubic()),
        "scalar_linear" => RegisteredModel::Ode(scalar_affine(p("a"), 0.0, p("c"), 0.0)),
        "scalar_affine" => RegisteredModel::Ode(scalar_affine(p("a"), p("b"), p("c"), p("d"))),
        "chebyshev" => RegisteredModel::Map(MapModel::chebyshev()),
        "logistic" => RegisteredModel::Map(MapModel::logistic()),
        "logistic_multiplicative" => RegisteredModel::Map(MapModel::logistic_multiplicative(
            MapModel::truncated_normal(0.0, 4.0),
        )),
        "additive_identity" => RegisteredModel::Map(MapModel::additive_identity(Arc::new(
            crate::special::norm_pdf,
        ))),
        _ => unreachable!("registry entry without constructor"),
    })
}

/// `x1' = x2, x2' = -a x1 - b sin(2 x1) - c x2`.
pub fn sine_well(a: f64, b: f64, c: f64) -> OdeModel {
    OdeModel::new(
        "sine_well",
        2,
        0,
        Arc::new(move |x: &[f64], f: &mut [f64]| {
            f[0] = x[1];
            f[1] = -a * x[0] - b * (2.0 * x[0]).sin() - c * x[1];
        }),
    )
    .with_divergence(Arc::new(move |_| -c))
}

/// Linearization of [`sine_well`] at the origin.
pub fn sine_well_linear(a: f64, b: f64, c: f64) -> OdeModel {
    let k = a + 2.0 * b;
    OdeModel::new(
        "sine_well_linear",
        2,
        0,
        Arc::new(move |x: &[f64], f: &mut [f64]| {
            f[0] = x[1];
            f[1] = -k * x[0] - c * x[1];
        }),
    )
    .with_divergence(Arc::new(move |_| -c))
}

/// Equilibria `x1` of [`sine_well`], sorted, with a stability flag
/// (`true` when `-a - 2b cos(2 x1) < 0`, which for `c > 0` makes a stable
/// focus or node; otherwise a saddle).
pub fn sine_well_equilibria(a: f64, b: f64) -> Vec<(f64, bool)> {
    let g = |x: f64| a * x + b * (2.0 * x).sin();
    let reach = if a != 0.0 { (b / a).abs() + 1.0 } else { 10.0 };
    let n = 200_000;
    let h = 2.0 * reach / n as f64;
    let mut roots: Vec<f64> = Vec::new();
    let mut x0 = -reach;
    let mut g0 = g(x0);
    for k in 1..=n {
        let x1 = -reach + k as f64 * h;
        let g1 = g(x1);
        if g1 == 0.0 {
            roots.push(x1);
        } else if g0 * g1 < 0.0 {
            let (mut lo, mut hi) = (x0, x1);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if g(lo) * g(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        x0 = x1;
        g0 = g1;
    }
    roots.dedup_by(|p, q| (*p - *q).abs() < 1e-9);
    roots
        .into_iter()
        .map(|x| (x, -a - 2.0 * b * (2.0 * x).cos() < 0.0))
        .collect()
}

/// `x' = -p x^3` with the parameter carried as a second state.
pub fn cubic() -> OdeModel {
    OdeModel::new(
        "cubic",
        1,
        1,
        Arc::new(|x: &[f64], f: &mut [f64]| f[0] = -x[1] * x[0].powi(3)),
    )
    .with_divergence(Arc::new(|x: &[f64]| -3.0 * x[1] * x[0] * x[0]))
}

/// `x' = a x + b` observed through `y = c x + d`.
pub fn scalar_affine(a: f64, b: f64, c: f64, d: f64) -> OdeModel {
    let id = if b == 0.0 && d == 0.0 {
        "scalar_linear"
    } else {
        "scalar_affine"
    };
    let out = OutputMap::new(1, 1, Arc::new(move |x: &[f64], y: &mut [f64]| y[0] = c * x[0] + d))
        .with_jacobian_det(Arc::new(move |_| c))
        .with_branch(super::InverseBranch {
            preimage: Arc::new(move |y: &[f64]| Some(vec![(y[0] - d) / c])),
            jacobian_det: Arc::new(move |_| c),
        });
    OdeModel::new(id, 1, 0, Arc::new(move |x: &[f64], f: &mut [f64]| f[0] = a * x[0] + b))
        .with_divergence(Arc::new(move |_| a))
        .with_output(out)
}
