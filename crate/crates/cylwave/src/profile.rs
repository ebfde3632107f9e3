//! JSON description of radial profiles.
//!
//! ```json
//! { "layers": [
//!     { "r_in": 0.5, "r_out": 1.0,
//!       "material": { "type": "isotropic", "rho": 2.7,
//!                     "params": { "E": 32.394, "G": 12.032 } } }
//! ] }
//! ```
//!
//! Material `type` is `isotropic` (params `E`, `G` or `lambda`, `mu`),
//! `ti` (params `c11`, `c12`, `c13`, `c33`, `c44`; `c66 = (c11 - c12)/2`)
//! or `full` (the 21 entries `cIJ` with `I <= J`). Values are normalized by
//! the exterior fluid.

use std::collections::BTreeMap;

use cylwave_core::elastodyn::{Layer, MaterialPoint, RadialProfile, StiffnessVoigt};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum IsotropicParams {
    Lame { lambda: f64, mu: f64 },
    Engineering {
        #[serde(rename = "E")]
        young: f64,
        #[serde(rename = "G")]
        shear: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TiParams {
    pub c11: f64,
    pub c12: f64,
    pub c13: f64,
    pub c33: f64,
    pub c44: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaterialKind {
    Isotropic,
    Ti,
    Full,
}

/// Material entry; `params` is checked against `type` when built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    #[serde(rename = "type")]
    pub kind: MaterialKind,
    pub rho: f64,
    pub params: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerSpec {
    pub r_in: f64,
    pub r_out: f64,
    pub material: MaterialSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub layers: Vec<LayerSpec>,
}

/// Converts a `serde_path_to_error` path into an RFC 6901 pointer.
pub(crate) fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } | Segment::Enum { variant: key } => {
                out.push_str(&key.replace('~', "~0").replace('/', "~1"))
            }
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

pub(crate) fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> CliResult<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = json_pointer(e.path());
        CliError::schema(pointer, e.into_inner().to_string())
    })
}

fn from_value<T: for<'de> Deserialize<'de>>(value: &serde_json::Value, prefix: &str) -> CliResult<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let pointer = json_pointer(e.path());
        let pointer = if pointer == "/" { prefix.to_string() } else { format!("{prefix}{pointer}") };
        CliError::schema(pointer, e.into_inner().to_string())
    })
}

fn full_table(params: &BTreeMap<String, f64>, pointer: &str) -> CliResult<[[f64; 6]; 6]> {
    let mut c = [[0.0; 6]; 6];
    for i in 0..6 {
        for j in i..6 {
            let key = format!("c{}{}", i + 1, j + 1);
            let v = *params
                .get(&key)
                .ok_or_else(|| CliError::schema(format!("{pointer}/{key}"), "missing stiffness entry"))?;
            c[i][j] = v;
            c[j][i] = v;
        }
    }
    let valid = |k: &str| {
        let b = k.as_bytes();
        b.len() == 3 && b[0] == b'c' && (b'1'..=b'6').contains(&b[1]) && (b[1]..=b'6').contains(&b[2])
    };
    if let Some(k) = params.keys().find(|k| !valid(k)) {
        return Err(CliError::schema(format!("{pointer}/{k}"), "unknown stiffness entry; expected cIJ with I <= J"));
    }
    Ok(c)
}

impl MaterialSpec {
    /// Builds the material; `pointer` locates it in the document.
    pub fn build(&self, pointer: &str) -> CliResult<MaterialPoint> {
        let params = format!("{pointer}/params");
        let stiffness = match self.kind {
            MaterialKind::Isotropic => match from_value(&self.params, &params)? {
                IsotropicParams::Lame { lambda, mu } => StiffnessVoigt::isotropic(lambda, mu),
                IsotropicParams::Engineering { young, shear } => StiffnessVoigt::from_young_shear(young, shear),
            },
            MaterialKind::Ti => {
                let p: TiParams = from_value(&self.params, &params)?;
                StiffnessVoigt::transversely_isotropic(p.c11, p.c12, p.c13, p.c33, p.c44)
            }
            MaterialKind::Full => StiffnessVoigt::new(full_table(&from_value(&self.params, &params)?, &params)?),
        }
        .map_err(|e| CliError::schema(params.as_str(), e.to_string()))?;
        MaterialPoint::new(self.rho, stiffness).map_err(|e| CliError::schema(format!("{pointer}/rho"), e.to_string()))
    }
}

impl ProfileSpec {
    /// Parses and validates a profile document.
    pub fn parse(text: &str) -> CliResult<Self> {
        let spec: ProfileSpec = from_json(text)?;
        spec.build()?;
        Ok(spec)
    }

    pub fn build(&self) -> CliResult<RadialProfile> {
        if self.layers.is_empty() {
            return Err(CliError::schema("/layers", "at least one layer is required"));
        }
        let layers = self
            .layers
            .iter()
            .enumerate()
            .map(|(i, l)| {
                if !(l.r_in >= 0.0 && l.r_in < l.r_out && l.r_out.is_finite()) {
                    return Err(CliError::schema(format!("/layers/{i}"), "need 0 <= r_in < r_out"));
                }
                let material = l.material.build(&format!("/layers/{i}/material"))?;
                Ok(Layer { r_inner: l.r_in, r_outer: l.r_out, material })
            })
            .collect::<CliResult<Vec<_>>>()?;
        RadialProfile::layered(layers).map_err(|e| CliError::schema("/layers", e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pointer_of(text: &str) -> String {
        match ProfileSpec::parse(text) {
            Err(CliError::Schema { pointer, .. }) => pointer,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parses_and_builds() {
        let s = r#"{"layers":[
            {"r_in":0.5,"r_out":0.8,"material":{"type":"isotropic","rho":2.7,"params":{"E":32.0,"G":12.0}}},
            {"r_in":0.8,"r_out":0.9,"material":{"type":"isotropic","rho":1.2,"params":{"lambda":2.0,"mu":1.0}}},
            {"r_in":0.9,"r_out":1.0,"material":{"type":"ti","rho":1.5,
                "params":{"c11":5.0,"c12":2.0,"c13":1.5,"c33":7.0,"c44":2.0}}}]}"#;
        let spec = ProfileSpec::parse(s).unwrap();
        assert_eq!(spec.build().unwrap().support(), (0.5, 1.0));
    }

    #[test]
    fn full_table_matches_isotropic() {
        let (l, m) = (2.0, 1.0);
        let mut params = BTreeMap::new();
        let iso = StiffnessVoigt::isotropic(l, m).unwrap();
        for i in 0..6 {
            for j in i..6 {
                params.insert(format!("c{}{}", i + 1, j + 1), iso.table()[i][j]);
            }
        }
        let spec = MaterialSpec { kind: MaterialKind::Full, rho: 1.0, params: serde_json::to_value(params).unwrap() };
        let full = spec.build("/m").unwrap();
        assert_eq!(full.stiffness.table(), iso.table());
    }

    #[test]
    fn pointer_names_the_bad_field() {
        let s = r#"{"layers":[{"r_in":0.5,"r_out":1.0,"material":{"type":"ti","rho":1.0,
            "params":{"c11":"x","c12":2.0,"c13":1.5,"c33":7.0,"c44":2.0}}}]}"#;
        assert_eq!(pointer_of(s), "/layers/0/material/params/c11");
        let s = r#"{"layers":[{"r_in":0.5,"r_out":1.0,"material":{"type":"isotropic","rho":-1.0,
            "params":{"lambda":2.0,"mu":1.0}}}]}"#;
        assert_eq!(pointer_of(s), "/layers/0/material/rho");
        let s = r#"{"layers":[{"r_in":0.5,"r_out":1.0,"material":{"type":"full","rho":1.0,"params":{"c11":1.0}}}]}"#;
        assert_eq!(pointer_of(s), "/layers/0/material/params/c12");
        let s = r#"{"layers":[{"r_in":0.5,"r_out":1.0,"material":{"type":"isotropic","rho":1.0,"params":{"lambda":2.0,"mu":1.0}}},
            {"r_in":1.0,"r_out":0.9,"material":{"type":"isotropic","rho":1.0,"params":{"lambda":2.0,"mu":1.0}}}]}"#;
        assert_eq!(pointer_of(s), "/layers/1");
        let s = r#"{"layers":[{"r_in":0.5,"r_out":1.0,"material":{"type":"isotropic","rho":1.0,
            "params":{"lambda":2.0,"mu":1.0,"E":3.0}}}]}"#;
        assert_eq!(pointer_of(s), "/layers/0/material/params");
    }
}
