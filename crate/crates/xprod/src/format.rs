//! JSON file formats and the compact command-line specs.
//!
//! Points and group elements are referred to by label everywhere; labels
//! may be written as JSON strings or integers. Scalars are exact literals
//! (see [`crate::literal`]).

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use xprod_core::comparison::{Witness, WitnessPiece};
use xprod_core::witness::CompiledWitness;
use xprod_core::{
    Castle, CastleOzmData, CrossedElement, DiagTuple, DynSystem, FiniteGroup, Func, GroupElem, MatrixElement,
    OrderZeroMap, Point, PointSet, RadScalar, Tower,
};

use crate::error::CliError;
use crate::literal::{format_rational, format_scalar, parse_scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Int(i64),
    Text(String),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(n) => write!(f, "{n}"),
            Label::Text(s) => f.write_str(s),
        }
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::Text(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupJson {
    pub elements: Vec<Label>,
    pub table: Vec<Vec<Label>>,
}

/// `{"group": {"elements": [...], "table": [[...]]}, "points": [...],
/// "action": [[...]]}`; `action[g][x]` is the label of `g·x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemFile {
    pub group: GroupJson,
    pub points: Vec<Label>,
    pub action: Vec<Vec<Label>>,
}

fn index_of(field: &str, labels: &[String], label: &Label) -> Result<usize, CliError> {
    let key = label.to_string();
    labels.iter().position(|l| *l == key).ok_or_else(|| CliError::parse(field, format!("unknown label {key:?}")))
}

impl SystemFile {
    pub fn to_system(&self) -> Result<DynSystem, CliError> {
        let glabels: Vec<String> = self.group.elements.iter().map(Label::to_string).collect();
        let plabels: Vec<String> = self.points.iter().map(Label::to_string).collect();
        let table = self
            .group
            .table
            .iter()
            .enumerate()
            .map(|(r, row)| {
                row.iter()
                    .enumerate()
                    .map(|(c, l)| index_of(&format!("group.table[{r}][{c}]"), &glabels, l))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let action = self
            .action
            .iter()
            .enumerate()
            .map(|(r, row)| {
                row.iter()
                    .enumerate()
                    .map(|(c, l)| index_of(&format!("action[{r}][{c}]"), &plabels, l))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let group = FiniteGroup::new(glabels, table)?;
        Ok(DynSystem::new(group, plabels, action)?)
    }

    pub fn from_system(sys: &DynSystem) -> Self {
        let g = sys.group();
        let text = |s: &str| Label::Text(s.to_string());
        SystemFile {
            group: GroupJson {
                elements: g.labels().iter().map(|s| text(s)).collect(),
                table: g.table().iter().map(|row| row.iter().map(|&h| text(g.label(h))).collect()).collect(),
            },
            points: sys.points().iter().map(|s| text(s)).collect(),
            action: sys
                .action_table()
                .iter()
                .map(|row| row.iter().map(|&y| text(sys.point_label(y))).collect())
                .collect(),
        }
    }
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(path: &str, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::json(path, e))
}

pub fn point(sys: &DynSystem, field: &str, label: &Label) -> Result<Point, CliError> {
    index_of(field, sys.points(), label)
}

pub fn group_elem(sys: &DynSystem, field: &str, label: &Label) -> Result<GroupElem, CliError> {
    index_of(field, sys.group().labels(), label)
}

fn point_set(sys: &DynSystem, field: &str, labels: &[Label]) -> Result<PointSet, CliError> {
    let pts = labels.iter().map(|l| point(sys, field, l)).collect::<Result<Vec<_>, _>>()?;
    Ok(PointSet::from_points(sys.num_points(), pts))
}

pub fn set_labels(sys: &DynSystem, s: &PointSet) -> Vec<Label> {
    s.iter().map(|x| Label::Text(sys.point_label(x).to_string())).collect()
}

fn group_labels(sys: &DynSystem, gs: &[GroupElem]) -> Vec<Label> {
    gs.iter().map(|&g| Label::Text(sys.group().label(g).to_string())).collect()
}

/// `[[point, scalar]]`; points not listed take the default value.
pub type FuncJson = Vec<(Label, String)>;

fn func_from_json(sys: &DynSystem, field: &str, f: &FuncJson, default: RadScalar) -> Result<Func, CliError> {
    let mut out = Func::constant(sys.num_points(), default);
    for (l, v) in f {
        out.set_value(point(sys, field, l)?, parse_scalar(field, v)?);
    }
    Ok(out)
}

/// Nonzero values in point order.
pub fn func_to_json(sys: &DynSystem, f: &Func) -> FuncJson {
    (0..f.len())
        .filter(|&x| !f.value(x).is_zero())
        .map(|x| (Label::Text(sys.point_label(x).to_string()), format_scalar(f.value(x))))
        .collect()
}

/// `[[group label, [[point, scalar]]]]` for `Σ_g a_g u_g`.
pub type ElementJson = Vec<(Label, FuncJson)>;

pub fn element_from_json(sys: &Arc<DynSystem>, field: &str, e: &ElementJson) -> Result<CrossedElement, CliError> {
    let mut out = CrossedElement::zero(sys);
    for (g, f) in e {
        let g = group_elem(sys, field, g)?;
        let f = func_from_json(sys, field, f, RadScalar::zero())?;
        out = out.try_add(&CrossedElement::monomial(sys, f, g))?;
    }
    Ok(out)
}

pub fn element_to_json(a: &CrossedElement) -> ElementJson {
    let sys = a.system();
    a.support_elements()
        .map(|g| (Label::Text(sys.group().label(g).to_string()), func_to_json(sys, a.coeff(g))))
        .collect()
}

/// Square matrix of elements, row by row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub entries: Vec<Vec<ElementJson>>,
}

pub fn matrix_from_json(sys: &Arc<DynSystem>, field: &str, m: &MatrixJson) -> Result<MatrixElement, CliError> {
    if m.entries.len() != m.n || m.entries.iter().any(|r| r.len() != m.n) {
        return Err(CliError::parse(field, format!("expected a {0}x{0} matrix", m.n)));
    }
    let entries = m.entries.iter().flatten().map(|e| element_from_json(sys, field, e)).collect::<Result<Vec<_>, _>>()?;
    if m.n == 0 {
        return Ok(MatrixElement::zero(sys, 0));
    }
    Ok(MatrixElement::from_entries(m.n, entries)?)
}

pub fn matrix_to_json(x: &MatrixElement) -> MatrixJson {
    let n = x.size();
    MatrixJson { n, entries: (0..n).map(|i| (0..n).map(|j| element_to_json(x.entry(i, j))).collect()).collect() }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerJson {
    pub base: Vec<Label>,
    pub shape: Vec<Label>,
    /// `S' ⊆ S` for almost-finiteness certificates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subshape: Option<Vec<Label>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CastleJson {
    pub towers: Vec<TowerJson>,
}

pub fn castle_from_json(sys: &DynSystem, c: &CastleJson) -> Result<(Castle, Vec<Vec<GroupElem>>), CliError> {
    let mut castle = Castle::default();
    let mut primes = Vec::new();
    for (t, tj) in c.towers.iter().enumerate() {
        let field = format!("towers[{t}]");
        let shape = tj.shape.iter().map(|g| group_elem(sys, &field, g)).collect::<Result<Vec<_>, _>>()?;
        let prime = tj.subshape.iter().flatten().map(|g| group_elem(sys, &field, g)).collect::<Result<Vec<_>, _>>()?;
        castle.towers.push(Tower { base: point_set(sys, &field, &tj.base)?, shape });
        primes.push(prime);
    }
    Ok((castle, primes))
}

pub fn castle_to_json(sys: &DynSystem, c: &Castle) -> CastleJson {
    CastleJson {
        towers: c
            .towers
            .iter()
            .map(|t| TowerJson { base: set_labels(sys, &t.base), shape: group_labels(sys, &t.shape), subshape: None })
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhaseJson {
    Constant(String),
    /// Listed points only; the rest are `1`.
    Values(FuncJson),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OzmTowerJson {
    pub base: Vec<Label>,
    pub shape: Vec<Label>,
    pub weight: FuncJson,
    pub phases: Vec<PhaseJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CastleDataJson {
    pub n: usize,
    pub towers: Vec<OzmTowerJson>,
}

pub fn castle_data_from_json(sys: &DynSystem, d: &CastleDataJson) -> Result<CastleOzmData, CliError> {
    let mut data = CastleOzmData::empty(d.n);
    for (t, tj) in d.towers.iter().enumerate() {
        let field = format!("towers[{t}]");
        let shape = tj.shape.iter().map(|g| group_elem(sys, &field, g)).collect::<Result<Vec<_>, _>>()?;
        data.castle.towers.push(Tower { base: point_set(sys, &field, &tj.base)?, shape });
        data.weights.push(func_from_json(sys, &field, &tj.weight, RadScalar::zero())?);
        let phases = tj
            .phases
            .iter()
            .map(|p| match p {
                PhaseJson::Constant(s) => Ok(Func::constant(sys.num_points(), parse_scalar(&field, s)?)),
                PhaseJson::Values(v) => func_from_json(sys, &field, v, RadScalar::one()),
            })
            .collect::<Result<Vec<_>, _>>()?;
        data.phases.push(phases);
    }
    Ok(data)
}

pub fn castle_data_to_json(sys: &DynSystem, d: &CastleOzmData) -> CastleDataJson {
    let phase = |f: &Func| {
        let first = f.value(0);
        if f.values().iter().all(|v| v == first) {
            PhaseJson::Constant(format_scalar(first))
        } else {
            PhaseJson::Values(
                (0..f.len())
                    .filter(|&x| !f.value(x).is_one())
                    .map(|x| (Label::Text(sys.point_label(x).to_string()), format_scalar(f.value(x))))
                    .collect(),
            )
        }
    };
    CastleDataJson {
        n: d.n,
        towers: d
            .castle
            .towers
            .iter()
            .zip(d.weights.iter().zip(&d.phases))
            .map(|(t, (w, ph))| OzmTowerJson {
                base: set_labels(sys, &t.base),
                shape: group_labels(sys, &t.shape),
                weight: func_to_json(sys, w),
                phases: ph.iter().map(phase).collect(),
            })
            .collect(),
    }
}

/// Images of matrix units, `images[i][j] = φ(e_ij)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OzmJson {
    pub n: usize,
    pub images: Vec<Vec<ElementJson>>,
}

pub fn ozm_from_json(sys: &Arc<DynSystem>, o: &OzmJson) -> Result<OrderZeroMap, CliError> {
    if o.images.len() != o.n || o.images.iter().any(|r| r.len() != o.n) {
        return Err(CliError::parse("images", format!("expected a {0}x{0} array", o.n)));
    }
    let images = o
        .images
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, e)| (i, j, e)))
        .map(|(i, j, e)| element_from_json(sys, &format!("images[{i}][{j}]"), e))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(OrderZeroMap::new(sys, o.n, images)?)
}

pub fn ozm_to_json(phi: &OrderZeroMap) -> OzmJson {
    let n = phi.size();
    OzmJson { n, images: (0..n).map(|i| (0..n).map(|j| element_to_json(phi.image(i, j))).collect()).collect() }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PieceJson {
    pub set: Vec<Label>,
    pub shift: Label,
    pub target: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub rows: Vec<Vec<PieceJson>>,
}

pub fn witness_from_json(sys: &DynSystem, w: &WitnessJson) -> Result<Witness, CliError> {
    let rows = w
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .map(|p| {
                    let field = format!("rows[{i}]");
                    Ok(WitnessPiece {
                        set: point_set(sys, &field, &p.set)?,
                        shift: group_elem(sys, &field, &p.shift)?,
                        target: p.target,
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Witness { rows })
}

pub fn witness_to_json(sys: &DynSystem, w: &Witness) -> WitnessJson {
    WitnessJson {
        rows: w
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|p| PieceJson {
                        set: set_labels(sys, &p.set),
                        shift: Label::Text(sys.group().label(p.shift).to_string()),
                        target: p.target,
                    })
                    .collect()
            })
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub h: Vec<Vec<FuncJson>>,
    pub b_hat: Vec<FuncJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompiledJson {
    pub epsilon: String,
    pub delta: String,
    pub t: MatrixJson,
    pub certificate: CertificateJson,
}

pub fn compiled_to_json(sys: &DynSystem, c: &CompiledWitness) -> CompiledJson {
    CompiledJson {
        epsilon: format_rational(&c.epsilon),
        delta: format_rational(&c.delta),
        t: matrix_to_json(&c.t),
        certificate: CertificateJson {
            h: c.certificate.h.iter().map(|row| row.iter().map(|f| func_to_json(sys, f)).collect()).collect(),
            b_hat: c.certificate.b_hat.iter().map(|f| func_to_json(sys, f)).collect(),
        },
    }
}

fn split_points(sys: &DynSystem, field: &str, list: &str) -> Result<Vec<Point>, CliError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| point(sys, field, &Label::Text(s.to_string())))
        .collect()
}

/// `chi:<pts>`, `fn:<pt>=<scalar>,...`, `zero` or `one`.
pub fn parse_func_spec(sys: &DynSystem, field: &str, spec: &str) -> Result<Func, CliError> {
    let spec = spec.trim();
    let m = sys.num_points();
    if spec == "zero" {
        return Ok(Func::zero(m));
    }
    if spec == "one" {
        return Ok(Func::one(m));
    }
    if let Some(list) = spec.strip_prefix("chi:") {
        return Ok(Func::indicator(&PointSet::from_points(m, split_points(sys, field, list)?)));
    }
    if let Some(list) = spec.strip_prefix("fn:") {
        let mut f = Func::zero(m);
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (x, v) = item.split_once('=').ok_or_else(|| CliError::parse(field, format!("expected point=value, got {item:?}")))?;
            f.set_value(point(sys, field, &Label::Text(x.trim().to_string()))?, parse_scalar(field, v)?);
        }
        return Ok(f);
    }
    Err(CliError::parse(field, format!("unrecognized function spec {spec:?}")))
}

/// Entries separated by `|`.
pub fn parse_tuple_spec(sys: &DynSystem, field: &str, spec: &str) -> Result<DiagTuple, CliError> {
    let entries = spec.split('|').map(|s| parse_func_spec(sys, field, s)).collect::<Result<Vec<_>, _>>()?;
    Ok(DiagTuple::new(entries)?)
}

/// `unit`, `u:<g>`, `mono:<g>:<func spec>`, or a function spec.
/// Element files are handled by the caller (`@path`).
pub fn parse_element_spec(sys: &Arc<DynSystem>, field: &str, spec: &str) -> Result<CrossedElement, CliError> {
    let spec = spec.trim();
    if spec == "unit" {
        return Ok(CrossedElement::unit(sys));
    }
    if let Some(g) = spec.strip_prefix("u:") {
        return Ok(CrossedElement::u(sys, group_elem(sys, field, &Label::Text(g.trim().to_string()))?));
    }
    if let Some(rest) = spec.strip_prefix("mono:") {
        let (g, f) = rest.split_once(':').ok_or_else(|| CliError::parse(field, "expected mono:<g>:<function>"))?;
        let g = group_elem(sys, field, &Label::Text(g.trim().to_string()))?;
        return Ok(CrossedElement::monomial(sys, parse_func_spec(sys, field, f)?, g));
    }
    Ok(CrossedElement::from_func(sys, parse_func_spec(sys, field, spec)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use xprod_core::scalar::{int, rat};

    fn z3() -> Arc<DynSystem> {
        Arc::new(DynSystem::translation(FiniteGroup::cyclic(3)))
    }

    #[test]
    fn system_file_round_trip() {
        let s = z3();
        let file = SystemFile::from_system(&s);
        let text = serde_json::to_string(&file).unwrap();
        let back: SystemFile = parse_json("sys", &text).unwrap();
        assert_eq!(back.to_system().unwrap(), *s);
    }

    #[test]
    fn integer_labels_are_accepted() {
        let text = r#"{"group":{"elements":[0,1],"table":[[0,1],[1,0]]},"points":["a","b"],"action":[["a","b"],["b","a"]]}"#;
        let sys = parse_json::<SystemFile>("sys", text).unwrap().to_system().unwrap();
        assert!(sys.is_free() && sys.is_minimal());
    }

    #[test]
    fn malformed_table_is_reported() {
        let text = r#"{"group":{"elements":["e","a"],"table":[["e","a"],["a","a"]]},"points":["x"],"action":[["x"],["x"]]}"#;
        assert!(matches!(parse_json::<SystemFile>("sys", text).unwrap().to_system(), Err(CliError::Structure(_))));
        let text = r#"{"group":{"elements":["e"],"table":[["q"]]},"points":[],"action":[[]]}"#;
        assert!(matches!(parse_json::<SystemFile>("sys", text).unwrap().to_system(), Err(CliError::Parse { .. })));
        assert!(matches!(parse_json::<SystemFile>("sys", "{\"group\": 3}"), Err(CliError::Json { line: 1, .. })));
    }

    #[test]
    fn specs() {
        let s = z3();
        let t = parse_tuple_spec(&s, "a", "chi:0,2|fn:1=1/2|zero").unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.entries()[0], Func::from_rationals([int(1), int(0), int(1)]));
        assert_eq!(t.entries()[1], Func::from_rationals([int(0), rat(1, 2), int(0)]));
        assert!(parse_tuple_spec(&s, "a", "fn:0=-1").is_err());
        assert_eq!(parse_element_spec(&s, "f", "u:1").unwrap(), CrossedElement::u(&s, 1));
        assert!(parse_element_spec(&s, "f", "u:7").is_err());
    }

    #[test]
    fn element_and_ozm_round_trip() {
        let s = z3();
        let a = CrossedElement::monomial(&s, Func::from_rationals([int(1), rat(-1, 2), int(0)]), 2)
            .try_add(&CrossedElement::unit(&s))
            .unwrap();
        let text = serde_json::to_string(&element_to_json(&a)).unwrap();
        assert_eq!(element_from_json(&s, "e", &parse_json("e", &text).unwrap()).unwrap(), a);
        let phi = OrderZeroMap::new(&s, 1, vec![a]).unwrap();
        assert_eq!(ozm_from_json(&s, &ozm_to_json(&phi)).unwrap(), phi);
    }
}
