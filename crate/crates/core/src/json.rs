//! JSON interchange formats.
//!
//! ```text
//! complex   {"faces": [["v1"], ["v2"], ["v1","v2"]]}  or  {"maximal": [["v1","v2"]]}
//! sheaf     {"complex": …, "stalks": {"v1,v2": 1, …},
//!            "restrictions": [{"from": ["v1"], "to": ["v1","v2"], "matrix": [[1]]}, …]}
//! morphism  {"source": sheaf, "target": sheaf, "components": {"v1": [[…]], …}}
//! network   {"vertices": […], "edges": [{"tail": "a", "head": "b", "rate": "3/2"}],
//!            "sensors": {"b": [[1]]}}
//! ```
//!
//! Atoms are JSON strings or integers. Faces are vertex arrays or their
//! comma-joined key. Rationals are integers, `"p/q"` strings, or decimals
//! (converted exactly); integers are written as numbers and everything else
//! as `"p/q"`. A matrix is a list of rows; an empty list is a zero-row matrix
//! whose column count comes from the stalk it leaves. Omitted morphism
//! components are zero maps. Errors name the offending location as a
//! `$.field[index]` path.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::complex::{Atom, Face, SimplicialComplex};
use crate::error::{Error, Result};
use crate::fir::FilterEncoding;
use crate::flownet::{FlowEdge, FlowNetwork, SensorPlacement};
use crate::morphism::Morphism;
use crate::ratlin::{Rational, RationalMatrix};
use crate::sheaf::{Section, Sheaf};

/// Any of the top-level documents the formats define.
#[derive(Clone, Debug)]
pub enum Document {
    Sheaf(Sheaf),
    Morphism(Morphism),
    Network(FlowNetwork, SensorPlacement),
}

impl Document {
    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        Document::from_value(&v)
    }

    pub fn from_value(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::schema("$", "expected an object"))?;
        if obj.contains_key("source") {
            Ok(Document::Morphism(morphism_from_json(v, "$")?))
        } else if obj.contains_key("edges") {
            let (net, sensors) = network_from_json(v, "$")?;
            Ok(Document::Network(net, sensors))
        } else if obj.contains_key("complex") {
            Ok(Document::Sheaf(sheaf_from_json(v, "$")?))
        } else {
            Err(Error::schema("$", "expected a sheaf, morphism, or flow network document"))
        }
    }

    pub fn to_value(&self) -> Value {
        match self {
            Document::Sheaf(s) => sheaf_to_json(s),
            Document::Morphism(m) => morphism_to_json(m),
            Document::Network(n, p) => network_to_json(n, p),
        }
    }
}

fn field<'a>(v: &'a Value, name: &str, path: &str) -> Result<&'a Value> {
    v.get(name).ok_or_else(|| Error::schema(path, format!("missing field \"{name}\"")))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::schema(path, "expected an array"))
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::schema(path, "expected an object"))
}

pub fn rational_to_json(r: &Rational) -> Value {
    match r.to_i64() {
        Some(n) => json!(n),
        None => json!(r.to_string()),
    }
}

pub fn rational_from_json(v: &Value, path: &str) -> Result<Rational> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) => return Ok(Rational::integer(i)),
            (_, Some(u), _) => u.to_string(),
            // shortest round-trip decimal, then exact conversion
            (_, _, Some(f)) => format!("{f}"),
            _ => return Err(Error::schema(path, "unrepresentable number")),
        },
        _ => return Err(Error::schema(path, "expected a rational (number or \"p/q\" string)")),
    };
    text.parse().map_err(|_| Error::schema(path, format!("invalid rational {text:?}")))
}

pub fn vector_to_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational_to_json).collect())
}

pub fn vector_from_json(v: &Value, path: &str) -> Result<Vec<Rational>> {
    array(v, path)?.iter().enumerate().map(|(i, x)| rational_from_json(x, &format!("{path}[{i}]"))).collect()
}

pub fn matrix_to_json(m: &RationalMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| vector_to_json(m.row(i))).collect())
}

/// `empty_cols` gives the column count of a zero-row matrix.
pub fn matrix_from_json(v: &Value, path: &str, empty_cols: usize) -> Result<RationalMatrix> {
    let rows = array(v, path)?;
    if rows.is_empty() {
        return Ok(RationalMatrix::zeros(0, empty_cols));
    }
    let parsed: Vec<Vec<Rational>> =
        rows.iter().enumerate().map(|(i, r)| vector_from_json(r, &format!("{path}[{i}]"))).collect::<Result<_>>()?;
    let cols = parsed[0].len();
    if let Some(i) = parsed.iter().position(|r| r.len() != cols) {
        return Err(Error::schema(
            format!("{path}[{i}]"),
            format!("row has {} entries, row 0 has {cols}", parsed[i].len()),
        ));
    }
    RationalMatrix::from_rows(cols, parsed)
}

pub fn atom_to_json(a: &Atom) -> Value {
    match a {
        Atom::Int(n) => json!(n),
        Atom::Name(s) => json!(s),
    }
}

pub fn atom_from_json(v: &Value, path: &str) -> Result<Atom> {
    match v {
        Value::String(s) => Ok(Atom::Name(s.clone())),
        Value::Number(n) => n.as_i64().map(Atom::Int).ok_or_else(|| Error::schema(path, "atom must be an integer")),
        _ => Err(Error::schema(path, "atom must be a string or an integer")),
    }
}

pub fn face_to_json(f: &Face) -> Value {
    Value::Array(f.vertices().iter().map(atom_to_json).collect())
}

fn face_from_json(v: &Value, path: &str) -> Result<Face> {
    let atoms = array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, a)| atom_from_json(a, &format!("{path}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    Face::new(atoms).map_err(|e| Error::schema(path, e.to_string()))
}

/// A face given as a vertex array or a key, resolved against `base`.
fn face_in(base: &SimplicialComplex, v: &Value, path: &str) -> Result<Face> {
    let face = match v {
        Value::String(key) => {
            base.face_by_key(key).cloned().ok_or_else(|| Error::schema(path, format!("unknown face \"{key}\"")))?
        }
        _ => face_from_json(v, path)?,
    };
    if !base.contains(&face) {
        return Err(Error::schema(path, format!("face {face} is not in the complex")));
    }
    Ok(face)
}

fn face_by_key(base: &SimplicialComplex, key: &str, path: &str) -> Result<Face> {
    base.face_by_key(key).cloned().ok_or_else(|| Error::schema(path, format!("unknown face \"{key}\"")))
}

pub fn complex_to_json(c: &SimplicialComplex) -> Value {
    json!({ "faces": c.faces().iter().map(face_to_json).collect::<Vec<_>>() })
}

pub fn complex_from_json(v: &Value, path: &str) -> Result<SimplicialComplex> {
    let (key, closed) = if v.get("faces").is_some() {
        ("faces", false)
    } else if v.get("maximal").is_some() {
        ("maximal", true)
    } else {
        return Err(Error::schema(path, "complex needs \"faces\" or \"maximal\""));
    };
    let list_path = format!("{path}.{key}");
    let faces = array(&v[key], &list_path)?
        .iter()
        .enumerate()
        .map(|(i, f)| face_from_json(f, &format!("{list_path}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let built =
        if closed { SimplicialComplex::from_maximal_faces(faces) } else { SimplicialComplex::from_faces(faces) };
    built.map_err(|e| Error::schema(list_path, e.to_string()))
}

pub fn sheaf_to_json(s: &Sheaf) -> Value {
    let stalks: Map<String, Value> =
        s.base().faces().iter().zip(s.stalk_dims()).map(|(f, &d)| (f.key(), json!(d))).collect();
    let restrictions: Vec<Value> = s
        .restrictions()
        .map(|(a, b, m)| json!({ "from": face_to_json(a), "to": face_to_json(b), "matrix": matrix_to_json(m) }))
        .collect();
    json!({ "complex": complex_to_json(s.base()), "stalks": stalks, "restrictions": restrictions })
}

/// Shape and axiom problems are left for [`Sheaf::violations`] to report.
pub fn sheaf_from_json(v: &Value, path: &str) -> Result<Sheaf> {
    let base = complex_from_json(field(v, "complex", path)?, &format!("{path}.complex"))?;
    let stalk_path = format!("{path}.stalks");
    let stalk_obj = object(field(v, "stalks", path)?, &stalk_path)?;
    let mut dims: BTreeMap<Face, usize> = BTreeMap::new();
    for (key, d) in stalk_obj {
        let p = format!("{stalk_path}[\"{key}\"]");
        let face = face_by_key(&base, key, &p)?;
        let d = d.as_u64().ok_or_else(|| Error::schema(&p, "stalk dimension must be a nonnegative integer"))?;
        dims.insert(face, d as usize);
    }
    if let Some(missing) = base.faces().iter().find(|f| !dims.contains_key(f)) {
        return Err(Error::schema(stalk_path, format!("no stalk dimension for face \"{}\"", missing.key())));
    }
    let mut sheaf = Sheaf::new(base.clone(), |f| dims[f]);
    let res_path = format!("{path}.restrictions");
    let restrictions = match v.get("restrictions") {
        Some(r) => array(r, &res_path)?.as_slice(),
        None => &[],
    };
    for (i, r) in restrictions.iter().enumerate() {
        let p = format!("{res_path}[{i}]");
        let from = face_in(&base, field(r, "from", &p)?, &format!("{p}.from"))?;
        let to = face_in(&base, field(r, "to", &p)?, &format!("{p}.to"))?;
        if !from.is_proper_subface_of(&to) {
            return Err(Error::schema(&p, format!("{from} -> {to} is not a face inclusion")));
        }
        if sheaf.restriction(&from, &to).is_some() {
            return Err(Error::schema(&p, format!("duplicate restriction {from} -> {to}")));
        }
        let m = matrix_from_json(field(r, "matrix", &p)?, &format!("{p}.matrix"), dims[&from])?;
        sheaf.set_restriction(&from, &to, m)?;
    }
    Ok(sheaf)
}

pub fn morphism_to_json(m: &Morphism) -> Value {
    let components: Map<String, Value> = m.components().map(|(f, c)| (f.key(), matrix_to_json(c))).collect();
    json!({ "source": sheaf_to_json(m.source()), "target": sheaf_to_json(m.target()), "components": components })
}

pub fn morphism_from_json(v: &Value, path: &str) -> Result<Morphism> {
    let source = sheaf_from_json(field(v, "source", path)?, &format!("{path}.source"))?;
    let target = sheaf_from_json(field(v, "target", path)?, &format!("{path}.target"))?;
    if source.base() != target.base() {
        return Err(Error::schema(path, "source and target sheaves have different complexes"));
    }
    let comp_path = format!("{path}.components");
    let mut components = BTreeMap::new();
    if let Some(c) = v.get("components") {
        for (key, m) in object(c, &comp_path)? {
            let p = format!("{comp_path}[\"{key}\"]");
            let face = face_by_key(source.base(), key, &p)?;
            let cols = source.stalk_dim(&face).expect("face of base");
            components.insert(face, matrix_from_json(m, &p, cols)?);
        }
    }
    Morphism::new(source, target, components)
}

pub fn network_to_json(net: &FlowNetwork, sensors: &SensorPlacement) -> Value {
    let edges: Vec<Value> = net
        .edges()
        .iter()
        .map(|e| {
            json!({
                "tail": atom_to_json(&e.tail),
                "head": atom_to_json(&e.head),
                "rate": rational_to_json(&e.rate),
            })
        })
        .collect();
    let sensors: Map<String, Value> =
        sensors.measured().iter().map(|(v, m)| (v.to_string(), matrix_to_json(m))).collect();
    json!({
        "vertices": net.vertices().iter().map(atom_to_json).collect::<Vec<_>>(),
        "edges": edges,
        "sensors": sensors,
    })
}

pub fn network_from_json(v: &Value, path: &str) -> Result<(FlowNetwork, SensorPlacement)> {
    let vpath = format!("{path}.vertices");
    let vertices = array(field(v, "vertices", path)?, &vpath)?
        .iter()
        .enumerate()
        .map(|(i, a)| atom_from_json(a, &format!("{vpath}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let epath = format!("{path}.edges");
    let mut edges = Vec::new();
    for (i, e) in array(field(v, "edges", path)?, &epath)?.iter().enumerate() {
        let p = format!("{epath}[{i}]");
        edges.push(FlowEdge {
            tail: atom_from_json(field(e, "tail", &p)?, &format!("{p}.tail"))?,
            head: atom_from_json(field(e, "head", &p)?, &format!("{p}.head"))?,
            rate: rational_from_json(field(e, "rate", &p)?, &format!("{p}.rate"))?,
        });
    }
    let net = FlowNetwork::new(vertices, edges).map_err(|e| Error::schema(&epath, e.to_string()))?;
    let mut sensors = SensorPlacement::new();
    if let Some(s) = v.get("sensors") {
        let spath = format!("{path}.sensors");
        for (key, m) in object(s, &spath)? {
            let p = format!("{spath}[\"{key}\"]");
            let atom = net
                .vertices()
                .iter()
                .find(|a| a.to_string() == *key)
                .cloned()
                .ok_or_else(|| Error::schema(&p, format!("unknown vertex \"{key}\"")))?;
            let stalk = net.incoming(&atom).len().max(1);
            let matrix = matrix_from_json(m, &p, stalk)?;
            if matrix.cols() != stalk {
                return Err(Error::schema(
                    &p,
                    format!("sensor reads {} coordinates but the vertex stalk has dimension {stalk}", matrix.cols()),
                ));
            }
            sensors.insert(atom, matrix);
        }
    }
    Ok((net, sensors))
}

pub fn section_to_json(s: &Section) -> Value {
    Value::Object(s.iter().map(|(f, v)| (f.key(), vector_to_json(v))).collect())
}

pub fn encoding_to_json(enc: &FilterEncoding) -> Value {
    json!({
        "taps": vector_to_json(enc.spec.taps()),
        "value_dim": enc.spec.value_dim(),
        "window": { "first": enc.window.first(), "last": enc.window.last() },
        "s1": sheaf_to_json(&enc.s1),
        "s2": sheaf_to_json(&enc.s2),
        "s3": sheaf_to_json(&enc.s3),
        "p": morphism_to_json(&enc.p),
        "lambda": morphism_to_json(&enc.lambda),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Timeline;

    #[test]
    fn rationals_in_and_out() {
        let r = |v: Value| rational_from_json(&v, "$").unwrap();
        assert_eq!(r(json!(3)), Rational::integer(3));
        assert_eq!(r(json!("2.7")), "27/10".parse().unwrap());
        assert_eq!(r(json!(2.7)), "27/10".parse().unwrap());
        assert_eq!(r(json!("-3/6")), "-1/2".parse().unwrap());
        assert!(rational_from_json(&json!(true), "$").is_err());
        assert_eq!(rational_to_json(&"4/2".parse().unwrap()), json!(2));
        assert_eq!(rational_to_json(&"1/3".parse().unwrap()), json!("1/3"));
    }

    #[test]
    fn complex_forms() {
        let a = complex_from_json(&json!({"faces": [["v1"], ["v2"], ["v1", "v2"]]}), "$").unwrap();
        let b = complex_from_json(&json!({"maximal": [["v2", "v1"]]}), "$").unwrap();
        assert_eq!(a, b);
        let err = complex_from_json(&json!({"faces": [["v1", "v2"]]}), "$").unwrap_err();
        assert!(err.to_string().starts_with("$.faces"));
        let err = complex_from_json(&json!({"faces": []}), "$").unwrap_err();
        assert!(err.to_string().contains("no faces"));
    }

    #[test]
    fn sheaf_round_trip() {
        let s = Sheaf::grouping(3, 1, &Timeline::new(0, 2).unwrap()).unwrap();
        let v = sheaf_to_json(&s);
        let back = sheaf_from_json(&v, "$").unwrap();
        assert_eq!(back, s);
        assert_eq!(sheaf_to_json(&back), v);
    }

    #[test]
    fn zero_row_matrices_take_their_width_from_the_stalk() {
        let v = json!({
            "complex": {"maximal": [["a", "b"]]},
            "stalks": {"a": 2, "b": 1, "a,b": 0},
            "restrictions": [
                {"from": ["a"], "to": ["a", "b"], "matrix": []},
                {"from": "b", "to": "a,b", "matrix": []}
            ]
        });
        let s = sheaf_from_json(&v, "$").unwrap();
        assert!(s.validate().is_ok());
        let ab = Face::new(["a", "b"]).unwrap();
        assert_eq!(s.restriction(&Face::vertex("a"), &ab).unwrap().shape(), (0, 2));
    }

    #[test]
    fn errors_carry_locations() {
        let v = json!({
            "complex": {"maximal": [["a", "b"]]},
            "stalks": {"a": 1, "b": 1, "a,b": 1},
            "restrictions": [{"from": ["a"], "to": ["a", "b"], "matrix": [[1], [1, 2]]}]
        });
        let err = sheaf_from_json(&v, "$").unwrap_err();
        assert!(err.to_string().starts_with("$.restrictions[0].matrix[1]"), "{err}");

        let v = json!({"complex": {"maximal": [["a"]]}, "stalks": {}});
        let err = sheaf_from_json(&v, "$").unwrap_err();
        assert!(err.to_string().contains("no stalk dimension"), "{err}");

        let v = json!({"vertices": ["a", "b"], "edges": [{"tail": "a", "head": "b", "rate": "x"}]});
        let err = network_from_json(&v, "$").unwrap_err();
        assert!(err.to_string().starts_with("$.edges[0].rate"), "{err}");
    }

    #[test]
    fn document_detection() {
        assert!(matches!(Document::parse(r#"{"faces": [["a"]]}"#), Err(Error::Schema { .. })));
        assert!(matches!(Document::parse("{"), Err(Error::Json(_))));
        let net =
            r#"{"vertices": ["a", "b"], "edges": [{"tail": "a", "head": "b", "rate": 2}], "sensors": {"b": [[1]]}}"#;
        let Document::Network(n, p) = Document::parse(net).unwrap() else { panic!() };
        assert_eq!(n.edges().len(), 1);
        assert_eq!(p.measured().len(), 1);
    }
}
