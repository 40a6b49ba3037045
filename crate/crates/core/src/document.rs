//! JSON interchange: algebra documents (`cdga/1`) and map documents (`cdga-map/1`).
//!
//! Basis vectors are referenced by label; coefficients are strings (`"-3/2"`), integers are
//! accepted on input. Products with the unit are implied and never listed.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{build_truncated_free, quotient, Cdga, FreeGenerator, FreePresentation, ProductTable};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::graded::{Complex, GradedMap, GradedSpace};
use crate::linalg::Matrix;
use crate::orientation::Orientation;

pub const ALGEBRA_SCHEMA: &str = "cdga/1";
pub const MAP_SCHEMA: &str = "cdga-map/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Int(i64),
    Text(String),
}

impl Coeff {
    fn parse(&self, field: Field) -> Result<Scalar> {
        match self {
            Coeff::Int(v) => Ok(field.from_i64(*v)),
            Coeff::Text(t) => field.parse_scalar(t),
        }
    }

    fn of(s: &Scalar) -> Coeff {
        Coeff::Text(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrientationDoc {
    pub degree: usize,
    pub values: Vec<(String, Coeff)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDoc {
    pub name: String,
    pub degree: usize,
    /// `[coefficient, monomial]` terms, monomials written `a^2*b`.
    #[serde(default)]
    pub differential: Vec<(Coeff, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationDoc {
    pub generators: Vec<GeneratorDoc>,
    pub truncation: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDocument {
    pub schema: String,
    pub name: String,
    pub field: String,
    /// Basis labels per degree; may be omitted when a presentation is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Vec<Vec<String>>>,
    #[serde(default = "default_unit")]
    pub unit: String,
    /// `[source, target, coefficient]`.
    #[serde(default)]
    pub differential: Vec<(String, String, Coeff)>,
    /// `[left, right, target, coefficient]`.
    #[serde(default)]
    pub product: Vec<(String, String, String, Coeff)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<OrientationDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub presentation: Option<PresentationDoc>,
}

fn default_unit() -> String {
    "1".into()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDocument {
    pub schema: String,
    pub source: String,
    pub target: String,
    /// `[source label, target label, coefficient]`.
    pub entries: Vec<(String, String, Coeff)>,
}

/// Overrides applied while reading a document.
#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    pub field: Option<Field>,
    pub truncation: Option<usize>,
}

fn at(path: &str, e: Error) -> Error {
    match e {
        Error::Malformed(m) => Error::Malformed(format!("{path}: {m}")),
        other => other,
    }
}

fn monomial_label(names: &[String], e: &[u32]) -> String {
    let parts: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 0)
        .map(|(i, &x)| if x == 1 { names[i].clone() } else { format!("{}^{x}", names[i]) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

fn parse_monomial(names: &[String], text: &str) -> Result<Vec<u32>> {
    let mut e = vec![0u32; names.len()];
    if text.trim() == "1" {
        return Ok(e);
    }
    for part in text.split('*') {
        let (name, x) = match part.trim().split_once('^') {
            Some((nm, x)) => (nm.trim(), x.trim().parse::<u32>().map_err(|_| Error::Malformed(format!("bad exponent in {text:?}")))?),
            None => (part.trim(), 1),
        };
        let g = names.iter().position(|n| n == name).ok_or_else(|| Error::Malformed(format!("unknown generator {name:?}")))?;
        e[g] += x;
    }
    Ok(e)
}

pub fn presentation_to_doc(p: &FreePresentation) -> PresentationDoc {
    let names: Vec<String> = p.generators.iter().map(|g| g.name.clone()).collect();
    PresentationDoc {
        generators: p
            .generators
            .iter()
            .map(|g| GeneratorDoc {
                name: g.name.clone(),
                degree: g.degree,
                differential: g.differential.iter().map(|(c, e)| (Coeff::of(c), monomial_label(&names, e))).collect(),
            })
            .collect(),
        truncation: p.truncation,
    }
}

fn presentation_from_doc(doc: &PresentationDoc, field: Field) -> Result<FreePresentation> {
    let names: Vec<String> = doc.generators.iter().map(|g| g.name.clone()).collect();
    let generators = doc
        .generators
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let differential = g
                .differential
                .iter()
                .enumerate()
                .map(|(k, (c, m))| {
                    let path = format!("presentation.generators[{i}].differential[{k}]");
                    Ok((c.parse(field).map_err(|e| at(&path, e))?, parse_monomial(&names, m).map_err(|e| at(&path, e))?))
                })
                .collect::<Result<_>>()?;
            Ok(FreeGenerator { name: g.name.clone(), degree: g.degree, differential })
        })
        .collect::<Result<_>>()?;
    Ok(FreePresentation { field, generators, truncation: doc.truncation })
}

/// Canonical document for an algebra with an optional orientation.
pub fn algebra_to_doc(a: &Cdga, or: Option<&Orientation>) -> AlgebraDocument {
    let sp = a.space();
    let top = a.max_degree();
    let unit = a.unit_index();
    let mut differential = Vec::new();
    for d in 0..top {
        let m = a.complex().d_ref(d);
        for x in 0..a.dim(d) {
            for y in 0..a.dim(d + 1) {
                let c = m.get(y, x);
                if !c.is_zero() {
                    differential.push((sp.label(d, x).to_string(), sp.label(d + 1, y).to_string(), Coeff::of(c)));
                }
            }
        }
    }
    let mut product = Vec::new();
    for i in 0..=top {
        for j in 0..=top - i {
            for x in 0..a.dim(i) {
                if i == 0 && x == unit {
                    continue;
                }
                for y in 0..a.dim(j) {
                    if j == 0 && y == unit {
                        continue;
                    }
                    for (k, c) in a.product_table().get(i, x, j, y) {
                        product.push((
                            sp.label(i, x).to_string(),
                            sp.label(j, y).to_string(),
                            sp.label(i + j, *k).to_string(),
                            Coeff::of(c),
                        ));
                    }
                }
            }
        }
    }
    let orientation = or.map(|o| OrientationDoc {
        degree: o.degree(),
        values: o
            .functional()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(x, c)| (sp.label(o.degree(), x).to_string(), Coeff::of(c)))
            .collect(),
    });
    AlgebraDocument {
        schema: ALGEBRA_SCHEMA.into(),
        name: a.name().to_string(),
        field: a.field().spec(),
        degrees: Some(sp.all_labels().to_vec()),
        unit: sp.label(0, unit).to_string(),
        differential,
        product,
        orientation,
        truncation: a.truncation(),
        presentation: a.presentation().map(presentation_to_doc),
    }
}

pub fn emit_algebra(a: &Cdga, or: Option<&Orientation>) -> String {
    let mut s = serde_json::to_string_pretty(&algebra_to_doc(a, or)).expect("documents serialize");
    s.push('\n');
    s
}

fn label_index(sp: &GradedSpace) -> HashMap<String, (usize, usize)> {
    let mut m = HashMap::new();
    for (d, ls) in sp.all_labels().iter().enumerate() {
        for (i, l) in ls.iter().enumerate() {
            m.insert(l.clone(), (d, i));
        }
    }
    m
}

/// Kills every degree above `t`.
pub fn cut_above(a: &Cdga, t: usize) -> Result<Cdga> {
    if t >= a.max_degree() {
        return Ok(a.clone().with_truncation(a.truncation().map(|x| x.min(t)).or(a.truncation())));
    }
    let ideal: Vec<Vec<_>> = (0..=a.max_degree()).map(|d| if d > t { a.space().standard_basis(d) } else { Vec::new() }).collect();
    let (q, _) = quotient(a, &ideal, a.name())?;
    let mut q = q.with_truncation(Some(t));
    q.set_presentation(a.presentation().map(|p| FreePresentation { truncation: t, ..p.clone() }));
    Ok(q)
}

/// Builds the algebra and orientation described by a document.
pub fn algebra_from_doc(doc: &AlgebraDocument, opts: ParseOptions) -> Result<(Cdga, Option<Orientation>)> {
    if doc.schema != ALGEBRA_SCHEMA {
        return Err(Error::Malformed(format!("schema: expected {ALGEBRA_SCHEMA:?}, found {:?}", doc.schema)));
    }
    let field = match opts.field {
        Some(f) => f,
        None => Field::parse(&doc.field).map_err(|e| match e {
            Error::InvalidField(m) => Error::InvalidField(format!("field: {m}")),
            other => other,
        })?,
    };
    let presentation = doc.presentation.as_ref().map(|p| presentation_from_doc(p, field)).transpose()?;
    let rebuild = opts.truncation.is_some() && presentation.is_some();
    let mut a = match (&doc.degrees, &presentation) {
        (Some(_), _) if !rebuild => table_from_doc(doc, field)?,
        (_, Some(p)) => {
            let mut p = p.clone();
            if let Some(t) = opts.truncation {
                p.truncation = t;
            }
            build_truncated_free(&doc.name, &p)?
        }
        (None, None) => return Err(Error::Malformed("degrees: missing, and no presentation given".into())),
        (Some(_), None) => unreachable!("rebuild requires a presentation"),
    };
    if !rebuild {
        if let Some(t) = opts.truncation {
            a = cut_above(&a, t)?;
        }
    }
    let orientation = match &doc.orientation {
        None => None,
        Some(o) => {
            if o.degree > a.max_degree() {
                return Err(Error::Malformed(format!("orientation.degree: {} exceeds the top degree", o.degree)));
            }
            let idx = label_index(a.space());
            let mut values = a.space().zero(o.degree);
            for (k, (l, c)) in o.values.iter().enumerate() {
                let path = format!("orientation.values[{k}]");
                let &(d, i) = idx.get(l).ok_or_else(|| Error::Malformed(format!("{path}: unknown label {l:?}")))?;
                if d != o.degree {
                    return Err(Error::Malformed(format!("{path}: {l:?} has degree {d}, not {}", o.degree)));
                }
                values[i] = &values[i] + &c.parse(field).map_err(|e| at(&path, e))?;
            }
            Some(Orientation::new(o.degree, values).map_err(|_| Error::Malformed("orientation: functional is zero".into()))?)
        }
    };
    Ok((a, orientation))
}

fn table_from_doc(doc: &AlgebraDocument, field: Field) -> Result<Cdga> {
    let labels = doc.degrees.clone().unwrap_or_default();
    let sp = GradedSpace::new(field, labels).map_err(|e| at("degrees", e))?;
    let idx = label_index(&sp);
    let look = |path: &str, l: &str| idx.get(l).copied().ok_or_else(|| Error::Malformed(format!("{path}: unknown label {l:?}")));
    let (ud, ui) = look("unit", &doc.unit)?;
    if ud != 0 {
        return Err(Error::Malformed(format!("unit: {:?} is not in degree 0", doc.unit)));
    }
    let top = sp.max_degree();
    let mut diff: Vec<Matrix> = (0..=top).map(|d| Matrix::zeros(field, sp.dim(d + 1), sp.dim(d))).collect();
    for (k, (s, t, c)) in doc.differential.iter().enumerate() {
        let path = format!("differential[{k}]");
        let (ds, is) = look(&path, s)?;
        let (dt, it) = look(&path, t)?;
        if dt != ds + 1 {
            return Err(Error::Malformed(format!("{path}: {s:?} has degree {ds} but {t:?} has degree {dt}")));
        }
        let v = diff[ds].get(it, is) + &c.parse(field).map_err(|e| at(&path, e))?;
        diff[ds].set(it, is, v);
    }
    let mut dense: HashMap<(usize, usize, usize, usize), Vec<Scalar>> = HashMap::new();
    for (k, (x, y, z, c)) in doc.product.iter().enumerate() {
        let path = format!("product[{k}]");
        let (dx, ix) = look(&path, x)?;
        let (dy, iy) = look(&path, y)?;
        let (dz, iz) = look(&path, z)?;
        if dz != dx + dy {
            return Err(Error::Malformed(format!("{path}: degrees {dx} + {dy} ≠ {dz}")));
        }
        if (dx == 0 && ix == ui) || (dy == 0 && iy == ui) {
            return Err(Error::Malformed(format!("{path}: products with the unit are implied")));
        }
        let entry = dense.entry((dx, ix, dy, iy)).or_insert_with(|| sp.zero(dz));
        entry[iz] = &entry[iz] + &c.parse(field).map_err(|e| at(&path, e))?;
    }
    let mut table = ProductTable::new(&sp.dims());
    for d in 0..=top {
        for x in 0..sp.dim(d) {
            table.set(0, ui, d, x, vec![(x, field.one())]);
            table.set(d, x, 0, ui, vec![(x, field.one())]);
        }
    }
    let mut keys: Vec<_> = dense.keys().copied().collect();
    keys.sort_unstable();
    for key in keys {
        let (dx, ix, dy, iy) = key;
        table.set_vector(dx, ix, dy, iy, &dense[&key]);
    }
    let complex = Complex::new(sp, diff)?;
    let mut a = Cdga::new(&doc.name, complex, table, ui, doc.truncation)?;
    if let Some(p) = &doc.presentation {
        a.set_presentation(Some(presentation_from_doc(p, field)?));
    }
    Ok(a)
}

pub fn parse_algebra(text: &str, opts: ParseOptions) -> Result<(Cdga, Option<Orientation>)> {
    let doc: AlgebraDocument =
        serde_json::from_str(text).map_err(|e| Error::Malformed(format!("line {} column {}: {e}", e.line(), e.column())))?;
    algebra_from_doc(&doc, opts)
}

pub fn map_to_doc(f: &GradedMap, source: &Cdga, target: &Cdga) -> MapDocument {
    let mut entries = Vec::new();
    for d in 0..=source.max_degree() {
        if d > target.max_degree() {
            break;
        }
        let m = f.block(d);
        for x in 0..source.dim(d) {
            for y in 0..target.dim(d) {
                let c = m.get(y, x);
                if !c.is_zero() {
                    entries.push((source.space().label(d, x).to_string(), target.space().label(d, y).to_string(), Coeff::of(c)));
                }
            }
        }
    }
    MapDocument { schema: MAP_SCHEMA.into(), source: source.name().into(), target: target.name().into(), entries }
}

pub fn emit_map(f: &GradedMap, source: &Cdga, target: &Cdga) -> String {
    let mut s = serde_json::to_string_pretty(&map_to_doc(f, source, target)).expect("documents serialize");
    s.push('\n');
    s
}

pub fn map_from_doc(doc: &MapDocument, source: &Cdga, target: &Cdga) -> Result<GradedMap> {
    if doc.schema != MAP_SCHEMA {
        return Err(Error::Malformed(format!("schema: expected {MAP_SCHEMA:?}, found {:?}", doc.schema)));
    }
    let field = source.field();
    let (si, ti) = (label_index(source.space()), label_index(target.space()));
    let mut blocks: Vec<Matrix> =
        (0..=source.max_degree()).map(|d| Matrix::zeros(field, if d <= target.max_degree() { target.dim(d) } else { 0 }, source.dim(d))).collect();
    for (k, (s, t, c)) in doc.entries.iter().enumerate() {
        let path = format!("entries[{k}]");
        let &(ds, is) = si.get(s).ok_or_else(|| Error::Malformed(format!("{path}: unknown source label {s:?}")))?;
        let &(dt, it) = ti.get(t).ok_or_else(|| Error::Malformed(format!("{path}: unknown target label {t:?}")))?;
        if ds != dt {
            return Err(Error::Malformed(format!("{path}: map must preserve degrees ({ds} ≠ {dt})")));
        }
        let v = blocks[ds].get(it, is) + &c.parse(field).map_err(|e| at(&path, e))?;
        blocks[ds].set(it, is, v);
    }
    GradedMap::new(field, 0, source.dims(), target.dims(), blocks)
}

pub fn parse_map(text: &str, source: &Cdga, target: &Cdga) -> Result<GradedMap> {
    let doc: MapDocument =
        serde_json::from_str(text).map_err(|e| Error::Malformed(format!("line {} column {}: {e}", e.line(), e.column())))?;
    map_from_doc(&doc, source, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::check_cdga;
    use crate::corpus;

    #[test]
    fn corpus_round_trips_byte_for_byte() {
        for name in corpus::NAMES {
            let (a, or) = corpus::by_name(name, Field::Rational).unwrap();
            let text = emit_algebra(&a, or.as_ref());
            let (b, or_b) = parse_algebra(&text, ParseOptions::default()).unwrap();
            assert_eq!(emit_algebra(&b, or_b.as_ref()), text, "{name}");
            assert_eq!(b, a, "{name}");
        }
    }

    #[test]
    fn presentation_only_document() {
        let text = r#"{"schema":"cdga/1","name":"L","field":"Q","presentation":{"generators":[
            {"name":"a","degree":2},{"name":"b","degree":3,"differential":[[1,"a^2"]]},{"name":"c","degree":5}],
            "truncation":9},"orientation":{"degree":7,"values":[["a*c",1]]}}"#;
        let (a, or) = parse_algebra(text, ParseOptions::default()).unwrap();
        assert!(check_cdga(&a).is_empty());
        assert_eq!(or.unwrap().degree(), 7);
        let (b, _) = parse_algebra(text, ParseOptions { truncation: Some(11), ..Default::default() }).unwrap();
        assert!(b.max_degree() > a.max_degree());
    }

    #[test]
    fn errors_name_the_location() {
        let (a, or) = corpus::v2(Field::Rational);
        let mut doc = algebra_to_doc(&a, Some(&or));
        doc.differential.push(("k".into(), "nope".into(), Coeff::Int(1)));
        let err = algebra_from_doc(&doc, ParseOptions::default()).unwrap_err();
        assert!(err.to_string().contains("differential[1]"), "{err}");
        let err = parse_algebra("{\"schema\": \"cdga/1\",", ParseOptions::default()).unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn field_override_reduces_coefficients() {
        let (a, or) = corpus::v2(Field::Rational);
        let text = emit_algebra(&a, Some(&or));
        let f = Field::prime(5).unwrap();
        let (b, _) = parse_algebra(&text, ParseOptions { field: Some(f), ..Default::default() }).unwrap();
        assert_eq!(b.field(), f);
        assert!(check_cdga(&b).is_empty());
    }

    #[test]
    fn map_round_trip() {
        let (l, _) = corpus::lambda_abc(Field::Rational, 9);
        let (v2, _) = corpus::v2(Field::Rational);
        let f = corpus::f2(&l, &v2);
        let text = emit_map(&f, &l, &v2);
        assert_eq!(parse_map(&text, &l, &v2).unwrap(), f);
    }
}
