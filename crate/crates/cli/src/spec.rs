//! Domain spec files.
//!
//! ```json
//! {"kind": "convex-polygon", "vertices": [[0, 0], [2, 0], [2, 1], [0, 1]]}
//! {"kind": "interval", "interval": [0, 1]}
//! {"kind": "disk", "center": [0, 0], "radius": 1}
//! ```

use std::path::Path;

use neumann_core::{Domain, Point, Shape};
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Point>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

impl DomainSpec {
    pub fn to_domain(&self) -> Result<Domain, String> {
        let used: &[&str] = match self.kind.as_str() {
            "interval" => &["interval"],
            "convex-polygon" | "simple-polygon" => &["vertices"],
            "disk" => &["center", "radius"],
            other => {
                return Err(format!(
                    "field `kind`: unknown kind `{other}` (expected interval, convex-polygon, simple-polygon or disk)"
                ))
            }
        };
        let present = [
            ("vertices", self.vertices.is_some()),
            ("interval", self.interval.is_some()),
            ("center", self.center.is_some()),
            ("radius", self.radius.is_some()),
        ];
        for (name, is_set) in present {
            if is_set != used.contains(&name) {
                let what = if is_set { "not used by" } else { "required for" };
                return Err(format!("field `{name}`: {what} kind {}", self.kind));
            }
        }
        match self.kind.as_str() {
            "interval" => {
                let [a, b] = self.interval.unwrap_or_default();
                Domain::interval(a, b).map_err(|e| format!("field `interval`: {e}"))
            }
            "convex-polygon" => Domain::convex_polygon(self.vertices.clone().unwrap_or_default())
                .map_err(|e| format!("field `vertices`: {e}")),
            "simple-polygon" => Domain::simple_polygon(self.vertices.clone().unwrap_or_default())
                .map_err(|e| format!("field `vertices`: {e}")),
            _ => Domain::disk(self.center.unwrap_or_default(), self.radius.unwrap_or_default())
                .map_err(|e| format!("field `radius`: {e}")),
        }
    }
}

impl From<&Domain> for DomainSpec {
    fn from(d: &Domain) -> Self {
        let mut spec = DomainSpec {
            kind: String::new(),
            vertices: None,
            interval: None,
            center: None,
            radius: None,
        };
        match d.shape() {
            Shape::Interval { a, b } => {
                spec.kind = "interval".into();
                spec.interval = Some([*a, *b]);
            }
            Shape::ConvexPolygon { vertices } => {
                spec.kind = "convex-polygon".into();
                spec.vertices = Some(vertices.clone());
            }
            Shape::SimplePolygon { vertices } => {
                spec.kind = "simple-polygon".into();
                spec.vertices = Some(vertices.clone());
            }
            Shape::Disk { center, radius } => {
                spec.kind = "disk".into();
                spec.center = Some(*center);
                spec.radius = Some(*radius);
            }
        }
        spec
    }
}

/// Parse a spec file. A missing file and a malformed spec are both input
/// errors.
pub fn load_domain(path: &Path) -> Result<Domain, Failure> {
    if !path.is_file() {
        return Err(Failure::input(format!("domain spec not found: {}", path.display())));
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    parse_domain(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

pub fn parse_domain(text: &str) -> Result<Domain, String> {
    let spec: DomainSpec = serde_json::from_str(text).map_err(|e| e.to_string())?;
    spec.to_domain()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_round_trip() {
        for text in [
            r#"{"kind": "interval", "interval": [0, 1]}"#,
            r#"{"kind": "disk", "center": [0, 0], "radius": 1}"#,
            r#"{"kind": "convex-polygon", "vertices": [[0, 0], [1, 0], [0, 1]]}"#,
            r#"{"kind": "simple-polygon", "vertices": [[0,0],[2,0],[2,1],[1,1],[1,2],[0,2]]}"#,
        ] {
            let d = parse_domain(text).unwrap();
            assert_eq!(DomainSpec::from(&d).to_domain().unwrap(), d);
        }
    }

    #[test]
    fn errors_name_the_field() {
        let cases = [
            (r#"{"kind": "disk", "center": [0, 0]}"#, "`radius`"),
            (r#"{"kind": "disk", "center": [0, 0], "radius": -1}"#, "`radius`"),
            (r#"{"kind": "interval", "interval": [0, 1], "radius": 2}"#, "`radius`"),
            (r#"{"kind": "blob"}"#, "`kind`"),
            (r#"{"kind": "interval", "intervall": [0, 1]}"#, "`intervall`"),
            (r#"{"kind": "convex-polygon", "vertices": [[0,0],[2,0],[2,1],[1,1],[1,2],[0,2]]}"#, "`vertices`"),
        ];
        for (text, field) in cases {
            let err = parse_domain(text).unwrap_err();
            assert!(err.contains(field), "{text}: {err}");
        }
    }
}
