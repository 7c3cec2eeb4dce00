//! Textual specifiers for families, maps, radius grids and centers.
//!
//! ```text
//! family  identity[:n=N] | power:eps=E[,n=N] | iterlog:k=K,alpha=A[,n=N]
//! map     identity:n=N | cone:phi=<family> | glued:phi=<family>
//!         | radial:power:eps=E[,n=N] | radial:logexample:beta=B[,n=N]
//! radii   log:A..B[:N] | R1,R2,...
//! center  0 | c1,c2,...,cn
//! ```

use std::collections::BTreeMap;

use crate::deformations::{ConeMap, Deformation, GluedMap, IdentityMap, RadialMap, Stress};
use crate::error::{Error, Result};
use crate::geometry::ConePoint;
use crate::modulus::ModulusFunction;

pub const DEFAULT_DIMENSION: usize = 2;
pub const DEFAULT_RADII_COUNT: usize = 24;

/// `name` followed by `key=value` pairs after the first `:` or `,`.
struct Fields<'a> {
    name: &'a str,
    values: BTreeMap<&'a str, &'a str>,
    what: &'static str,
    input: &'a str,
}

impl<'a> Fields<'a> {
    fn split(what: &'static str, input: &'a str) -> Result<Self> {
        let input = input.trim();
        let (name, rest) = match input.find([':', ',']) {
            Some(i) => (&input[..i], &input[i + 1..]),
            None => (input, ""),
        };
        let mut values = BTreeMap::new();
        for item in rest.split(',').filter(|s| !s.is_empty()) {
            let (key, value) = item.split_once('=').ok_or_else(|| Error::parse(what, input, format!("expected key=value, got `{item}`")))?;
            if values.insert(key.trim(), value.trim()).is_some() {
                return Err(Error::parse(what, input, format!("duplicate key `{key}`")));
            }
        }
        Ok(Self { name: name.trim(), values, what, input })
    }

    fn number<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.values.remove(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| Error::parse(self.what, self.input, format!("bad value `{v}` for `{key}`"))),
        }
    }

    fn required<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        self.number(key)?.ok_or_else(|| Error::parse(self.what, self.input, format!("missing `{key}`")))
    }

    fn finish(self) -> Result<()> {
        match self.values.keys().next() {
            Some(key) => Err(Error::parse(self.what, self.input, format!("unknown key `{key}`"))),
            None => Ok(()),
        }
    }
}

pub fn parse_family(input: &str) -> Result<ModulusFunction<f64>> {
    let mut f = Fields::split("family", input)?;
    let n = f.number("n")?.unwrap_or(DEFAULT_DIMENSION);
    let phi = match f.name {
        "identity" => ModulusFunction::identity(n),
        "power" => {
            let eps = f.required("eps")?;
            ModulusFunction::power(eps, n)
        }
        "iterlog" => {
            let k = f.required("k")?;
            let alpha = f.required("alpha")?;
            ModulusFunction::iter_log(k, alpha, n)
        }
        other => return Err(Error::parse("family", input, format!("unknown family `{other}`"))),
    };
    f.finish()?;
    phi.map_err(|e| Error::parse("family", input, e.to_string()))
}

/// A parsed map specifier.
#[derive(Clone, Debug)]
pub enum MapSpec {
    Identity { n: usize },
    Cone(ModulusFunction<f64>),
    Glued(ModulusFunction<f64>),
    Radial(RadialMap<f64>),
}

impl MapSpec {
    pub fn parse(input: &str) -> Result<Self> {
        let input = input.trim();
        let (kind, rest) = input.split_once(':').unwrap_or((input, ""));
        match kind {
            "identity" => {
                let mut f = Fields::split("map", input)?;
                let n = f.number("n")?.unwrap_or(DEFAULT_DIMENSION);
                f.finish()?;
                if n < 2 {
                    return Err(Error::parse("map", input, "dimension must be at least 2"));
                }
                Ok(MapSpec::Identity { n })
            }
            "cone" | "glued" => {
                let family = rest
                    .strip_prefix("phi=")
                    .ok_or_else(|| Error::parse("map", input, "expected `phi=<family>`"))?;
                let phi = parse_family(family)?;
                Ok(if kind == "cone" { MapSpec::Cone(phi) } else { MapSpec::Glued(phi) })
            }
            "radial" => {
                let mut f = Fields::split("map", rest)?;
                let n = f.number("n")?.unwrap_or(DEFAULT_DIMENSION);
                let stress = match f.name {
                    "power" => Stress::Power { eps: f.required("eps")? },
                    "logexample" => Stress::LogExample { beta: f.number("beta")?.unwrap_or(1.0), n },
                    other => return Err(Error::parse("map", input, format!("unknown stress `{other}`"))),
                };
                f.finish()?;
                Ok(MapSpec::Radial(RadialMap::new(stress, n).map_err(|e| Error::parse("map", input, e.to_string()))?))
            }
            other => Err(Error::parse("map", input, format!("unknown map kind `{other}`"))),
        }
    }

    pub fn dim(&self) -> usize {
        self.build().dim()
    }

    pub fn build(&self) -> Box<dyn Deformation<f64>> {
        match self {
            MapSpec::Identity { n } => Box::new(IdentityMap { n: *n }),
            MapSpec::Cone(phi) => Box::new(ConeMap::new(phi.clone())),
            MapSpec::Glued(phi) => Box::new(GluedMap::new(phi.clone())),
            MapSpec::Radial(map) => Box::new(*map),
        }
    }
}

/// `log:a..b[:N]` (N log-spaced points, default 24) or an increasing comma list.
pub fn parse_radii(input: &str) -> Result<Vec<f64>> {
    let input = input.trim();
    let radii = if let Some(range) = input.strip_prefix("log:") {
        let (bounds, count) = match range.split_once(':') {
            Some((b, c)) => (b, c.parse().map_err(|_| Error::parse("radii", input, format!("bad point count `{c}`")))?),
            None => (range, DEFAULT_RADII_COUNT),
        };
        let (a, b) = bounds.split_once("..").ok_or_else(|| Error::parse("radii", input, "expected `a..b`"))?;
        let a: f64 = a.parse().map_err(|_| Error::parse("radii", input, format!("bad bound `{a}`")))?;
        let b: f64 = b.parse().map_err(|_| Error::parse("radii", input, format!("bad bound `{b}`")))?;
        if !(a > 0.0 && b > a) || count < 2 {
            return Err(Error::parse("radii", input, "need 0 < a < b and at least 2 points"));
        }
        let span = (b / a).ln();
        (0..count)
            .map(|i| if i + 1 == count { b } else { a * (span * i as f64 / (count - 1) as f64).exp() })
            .collect()
    } else {
        input
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| Error::parse("radii", input, format!("bad radius `{v}`"))))
            .collect::<Result<Vec<_>>>()?
    };
    if radii.iter().any(|r| !(*r > 0.0)) || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::parse("radii", input, "radii must be positive and strictly increasing"));
    }
    Ok(radii)
}

/// `0` for the origin, otherwise `n` comma-separated coordinates with `t` last.
pub fn parse_center(input: &str, n: usize) -> Result<ConePoint<f64>> {
    let input = input.trim();
    if input == "0" {
        return Ok(ConePoint::origin(n));
    }
    let coords = input
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| Error::parse("center", input, format!("bad coordinate `{v}`"))))
        .collect::<Result<Vec<_>>>()?;
    if coords.len() != n {
        return Err(Error::parse("center", input, format!("expected {n} coordinates, got {}", coords.len())));
    }
    ConePoint::from_coords(&coords)
}
