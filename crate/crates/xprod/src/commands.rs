//! One function per subcommand. Each returns a [`Report`]; a mathematical
//! verdict of `false` is a result, not an error.

use std::sync::Arc;
use std::time::Instant;

use serde_json::{json, Map, Value};
use xprod_core::algebra::{operator_norm, NormMode};
use xprod_core::castles::{
    almost_finiteness_certificate, build_castle_ozm, check_tzs_instance, decompose_ozm, identity_embedding,
    orbit_castle, search_tzs_map, shape_invariance, validate_castle, verify_cpc, verify_normalizer_preserving,
    verify_order_zero, TzsInstance, TzsReport,
};
use xprod_core::comparison::{
    almost_unperforation_check, check_witness, cuntz_oracle, d_tau, diag_subequivalent, dynamical_comparison_check,
    search_subequivalence, type_semigroup,
};
use xprod_core::normalizers::matrix_is_r_normalizer;
use xprod_core::scalar::rat_to_f64;
use xprod_core::witness::{check_identity, compile, extract, prop_equivalence_suite, GRID_SURROGATE_NOTE};
use xprod_core::{DiagTuple, DynSystem, GroupElem, OrderZeroMap, PointSet, Rational};

use crate::error::CliError;
use crate::format::{
    castle_data_from_json, castle_data_to_json, castle_from_json, castle_to_json, compiled_to_json, element_from_json,
    group_elem, matrix_from_json, ozm_from_json, ozm_to_json, parse_element_spec, parse_func_spec, parse_json,
    parse_tuple_spec, set_labels, witness_from_json, witness_to_json, CastleDataJson, CastleJson, ElementJson, Label,
    MatrixJson, OzmJson, SystemFile, WitnessJson,
};
use crate::literal::format_rational;
use crate::report::{InputDigest, Report};

#[derive(Clone, Debug, PartialEq)]
pub struct Options {
    pub mode: NormMode,
    pub tolerance: f64,
    pub budget: usize,
    pub timing: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options { mode: NormMode::ExactFirst, tolerance: 1e-9, budget: 1_000_000, timing: false }
    }
}

/// A loaded system plus the bookkeeping shared by every command.
pub struct Session {
    pub sys: Arc<DynSystem>,
    pub opts: Options,
    digest: InputDigest,
    params: Map<String, Value>,
    started: Instant,
}

fn read(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_string(), source })
}

impl Session {
    pub fn open(system_path: &str, opts: Options) -> Result<Self, CliError> {
        let text = read(system_path)?;
        let sys = parse_json::<SystemFile>(system_path, &text)?.to_system()?;
        let mut s = Session::from_system(sys, opts);
        s.digest.add("system", text.as_bytes());
        s.params.insert("system".into(), json!(system_path));
        Ok(s)
    }

    pub fn from_system(sys: DynSystem, opts: Options) -> Self {
        let mut params = Map::new();
        params.insert("mode".into(), json!(if opts.mode == NormMode::Float { "float" } else { "exact" }));
        params.insert("tolerance".into(), json!(opts.tolerance));
        params.insert("budget".into(), json!(opts.budget));
        Session { sys: Arc::new(sys), opts, digest: InputDigest::default(), params, started: Instant::now() }
    }

    /// Records a verbatim parameter and feeds it to the digest.
    pub fn param(&mut self, name: &str, value: &str) {
        self.digest.add(name, value.as_bytes());
        self.params.insert(name.into(), json!(value));
    }

    fn file(&mut self, name: &str, path: &str) -> Result<String, CliError> {
        let text = read(path)?;
        self.digest.add(name, text.as_bytes());
        self.params.insert(name.into(), json!(path));
        Ok(text)
    }

    fn tuple(&mut self, name: &str, spec: &str) -> Result<DiagTuple, CliError> {
        self.param(name, spec);
        parse_tuple_spec(&self.sys, name, spec)
    }

    fn rational(&mut self, name: &str, text: &str) -> Result<Rational, CliError> {
        self.param(name, text);
        match crate::literal::parse_scalar(name, text)?.as_rational() {
            Some(q) => Ok(q.clone()),
            None => Err(CliError::parse(name, "expected a rational number")),
        }
    }

    fn element(&mut self, name: &str, spec: &str) -> Result<xprod_core::CrossedElement, CliError> {
        match spec.strip_prefix('@') {
            Some(path) => {
                let text = self.file(name, path)?;
                element_from_json(&self.sys, name, &parse_json::<ElementJson>(path, &text)?)
            }
            None => {
                self.param(name, spec);
                parse_element_spec(&self.sys, name, spec)
            }
        }
    }

    fn finish(self, command: &str, result: Value, certificates: Value, margins: Value) -> Report {
        Report {
            command: command.to_string(),
            inputs_sha256: self.digest.hex(),
            params: Value::Object(self.params),
            result,
            certificates,
            margins,
            runtime_ms: self.opts.timing.then(|| self.started.elapsed().as_millis() as u64),
        }
    }
}

fn labels(sys: &DynSystem, s: &PointSet) -> Value {
    json!(set_labels(sys, s))
}

pub fn system_check(s: Session) -> Result<Report, CliError> {
    let sys = &s.sys;
    let measures: Vec<Value> = sys
        .extreme_invariant_measures()
        .iter()
        .map(|mu| {
            let w: Map<String, Value> = (0..sys.num_points())
                .filter(|&x| mu.weights[x] != Rational::from_integer(0.into()))
                .map(|x| (sys.point_label(x).to_string(), json!(format_rational(&mu.weights[x]))))
                .collect();
            Value::Object(w)
        })
        .collect();
    let result = json!({
        "group_order": sys.group().order(),
        "points": sys.num_points(),
        "free": sys.is_free(),
        "minimal": sys.is_minimal(),
        "orbit_count": sys.orbits().len(),
        "orbits": sys.orbits().iter().map(|o| labels(sys, o)).collect::<Vec<_>>(),
        "measures": measures,
    });
    Ok(s.finish("system-check", result, json!({}), json!({})))
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CompareFlags {
    pub witness: bool,
    pub semigroup: bool,
    pub oracle: bool,
}

pub fn compare(mut s: Session, a: &str, b: &str, flags: CompareFlags) -> Result<Report, CliError> {
    let a = s.tuple("a", a)?;
    let b = s.tuple("b", b)?;
    let sys = s.sys.clone();
    let w = diag_subequivalent(&sys, &a, &b)?;
    let mut result = Map::new();
    let mut certs = Map::new();
    result.insert("subequivalent".into(), json!(w.is_some()));
    if flags.witness {
        certs.insert("witness".into(), w.as_ref().map_or(Value::Null, |w| json!(witness_to_json(&sys, w))));
    }
    if flags.oracle {
        result.insert("cuntz".into(), json!(cuntz_oracle(&sys, &a, &b)?));
    }
    if flags.semigroup {
        let mut table = Vec::new();
        for mu in sys.extreme_invariant_measures() {
            let side = |t: &DiagTuple| -> Result<(Vec<Value>, Rational), CliError> {
                let vals = t.entries().iter().map(|f| d_tau(f, &mu)).collect::<Result<Vec<_>, _>>()?;
                let total = vals.iter().fold(Rational::from_integer(0.into()), |acc, v| acc + v);
                Ok((vals.iter().map(|v| json!(format_rational(v))).collect(), total))
            };
            let (av, at) = side(&a)?;
            let (bv, bt) = side(&b)?;
            let support = PointSet::from_points(sys.num_points(), (0..sys.num_points()).filter(|&x| mu.weights[x] != Rational::from_integer(0.into())));
            table.push(json!({
                "orbit": labels(&sys, &support),
                "a": av, "b": bv,
                "a_total": format_rational(&at), "b_total": format_rational(&bt),
            }));
        }
        result.insert("d_tau".into(), json!(table));
    }
    Ok(s.finish("compare", Value::Object(result), Value::Object(certs), json!({})))
}

fn cut_supports(t: &DiagTuple, eps: &Rational) -> Result<Vec<PointSet>, CliError> {
    Ok(t.entries().iter().map(|f| f.pos_cutdown(eps).map(|c| c.open_support())).collect::<Result<_, _>>()?)
}

pub fn witness_compile(mut s: Session, a: &str, b: &str, eps: &str, witness: Option<&str>) -> Result<Report, CliError> {
    let a = s.tuple("a", a)?;
    let b = s.tuple("b", b)?;
    let eps = s.rational("epsilon", eps)?;
    let sys = s.sys.clone();
    let w = match witness {
        Some(path) => {
            let text = s.file("witness", path)?;
            Some(witness_from_json(&sys, &parse_json::<WitnessJson>(path, &text)?)?)
        }
        None => search_subequivalence(&sys, &cut_supports(&a, &eps)?, &b.supports())?,
    };
    let Some(w) = w else {
        return Ok(s.finish("witness compile", json!({"compiled": false, "witness_found": false}), json!({}), json!({})));
    };
    let c = compile(&sys, &a, &b, &eps, &w)?;
    let result = json!({
        "compiled": true,
        "witness_found": true,
        "delta": format_rational(&c.delta),
        "epsilon": format_rational(&c.epsilon),
        "r_normalizer": matrix_is_r_normalizer(&c.t)?,
        "identity": check_identity(&sys, &a, &b, &eps, &c.delta, &c.t)?,
        "zero": c.t.is_zero(),
    });
    let certs = json!({"witness": witness_to_json(&sys, &w), "compiled": compiled_to_json(&sys, &c)});
    Ok(s.finish("witness compile", result, certs, json!({})))
}

pub fn witness_extract(mut s: Session, a: &str, b: &str, eps: &str, delta: &str, t_path: &str) -> Result<Report, CliError> {
    let a = s.tuple("a", a)?;
    let b = s.tuple("b", b)?;
    let eps = s.rational("epsilon", eps)?;
    let delta = s.rational("delta", delta)?;
    let sys = s.sys.clone();
    let text = s.file("t", t_path)?;
    let t = matrix_from_json(&sys, "t", &parse_json::<MatrixJson>(t_path, &text)?)?;
    let w = extract(&sys, &a, &b, &eps, &delta, &t)?;
    let valid = check_witness(&sys, &cut_supports(&a, &eps)?, &b.supports(), &w)?;
    Ok(s.finish("witness extract", json!({"valid": valid}), json!({"witness": witness_to_json(&sys, &w)}), json!({})))
}

pub fn witness_roundtrip(mut s: Session, a: &str, b: &str, eps: &str, suite: bool) -> Result<Report, CliError> {
    let a = s.tuple("a", a)?;
    let b = s.tuple("b", b)?;
    let eps = s.rational("epsilon", eps)?;
    let sys = s.sys.clone();
    let mut result = Map::new();
    let mut certs = Map::new();
    let mut margins = Map::new();
    let found = search_subequivalence(&sys, &cut_supports(&a, &eps)?, &b.supports())?;
    result.insert("witness_found".into(), json!(found.is_some()));
    if let Some(w) = found {
        let c = compile(&sys, &a, &b, &eps, &w)?;
        let identity = check_identity(&sys, &a, &b, &eps, &c.delta, &c.t)?;
        let r_normalizer = matrix_is_r_normalizer(&c.t)?;
        let back = extract(&sys, &a, &b, &eps, &c.delta, &c.t)?;
        let valid = check_witness(&sys, &cut_supports(&a, &eps)?, &b.supports(), &back)?;
        result.insert("delta".into(), json!(format_rational(&c.delta)));
        result.insert("identity".into(), json!(identity));
        result.insert("r_normalizer".into(), json!(r_normalizer));
        result.insert("extracted_valid".into(), json!(valid));
        result.insert("pass".into(), json!(identity && r_normalizer && valid));
        certs.insert("witness".into(), json!(witness_to_json(&sys, &w)));
        certs.insert("compiled".into(), json!(compiled_to_json(&sys, &c)));
        certs.insert("extracted".into(), json!(witness_to_json(&sys, &back)));
    }
    if suite {
        let rep = prop_equivalence_suite(&sys, &a, &b, s.opts.budget)?;
        let grid: Vec<Value> = rep
            .grid
            .iter()
            .map(|g| {
                json!({
                    "epsilon": format_rational(&g.epsilon),
                    "delta": g.delta.as_ref().map(format_rational),
                    "compiled": g.compiled,
                    "norm": g.approx_norm,
                })
            })
            .collect();
        let slack: Vec<Value> = rep
            .grid
            .iter()
            .map(|g| json!(g.approx_norm.map(|n| rat_to_f64(&g.epsilon) - n)))
            .collect();
        margins.insert("grid_epsilon_minus_norm".into(), json!(slack));
        result.insert(
            "suite".into(),
            json!({
                "subequivalent": rep.subequivalent,
                "consistent": rep.consistent(),
                "inconsistencies": rep.inconsistencies,
                "grid": grid,
                "refutation": rep.refutation.map(|r| json!({"candidates": r.candidates, "exhausted": r.exhausted, "found": r.found})),
                "note": GRID_SURROGATE_NOTE,
            }),
        );
    }
    Ok(s.finish("witness roundtrip", Value::Object(result), Value::Object(certs), Value::Object(margins)))
}

fn group_list(s: &Session, field: &str, list: &str) -> Result<Vec<GroupElem>, CliError> {
    list.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| group_elem(&s.sys, field, &Label::Text(t.to_string())))
        .collect()
}

pub struct CastleArgs<'a> {
    /// Castle file; the orbit castle when `None`.
    pub castle: Option<&'a str>,
    pub delta: Option<&'a str>,
    /// Comma-separated group labels; all of `G` when `None`.
    pub k: Option<&'a str>,
    pub strict: bool,
}

pub fn castle_validate(mut s: Session, args: CastleArgs<'_>) -> Result<Report, CliError> {
    let sys = s.sys.clone();
    let (castle, primes) = match args.castle {
        Some(path) => {
            let text = s.file("castle", path)?;
            castle_from_json(&sys, &parse_json::<CastleJson>(path, &text)?)?
        }
        None => {
            s.param("castle", "orbit");
            let c = orbit_castle(&sys);
            let primes = vec![Vec::new(); c.towers.len()];
            (c, primes)
        }
    };
    let k = match args.k {
        Some(list) => {
            s.param("k", list);
            group_list(&s, "k", list)?
        }
        None => sys.group().elements().collect(),
    };
    let valid = validate_castle(&sys, &castle);
    let mut result = Map::new();
    result.insert("valid".into(), json!(valid));
    let invariance: Vec<Value> = castle
        .towers
        .iter()
        .map(|t| shape_invariance(sys.group(), &t.shape, &k).map(|r| json!(format_rational(&r))))
        .collect::<Result<_, _>>()?;
    result.insert("invariance".into(), json!(invariance));
    let mut certs = Map::new();
    certs.insert("castle".into(), json!(castle_to_json(&sys, &castle)));
    if let (Some(delta), true) = (args.delta, valid) {
        let delta = s.rational("delta", delta)?;
        if args.strict {
            s.param("strict", "true");
        }
        let r = almost_finiteness_certificate(&sys, &k, &delta, &castle, &primes, args.strict)?;
        result.insert(
            "almost_finiteness".into(),
            json!({
                "pass": r.passes(),
                "a_invariance": r.invariant,
                "b_small_subshapes": r.small_subshapes,
                "c_remainder_subequivalent": r.remainder_witness.is_some(),
                "strict_diameter": r.strict_diameter,
                "remainder": labels(&sys, &r.remainder),
                "target": labels(&sys, &r.target),
            }),
        );
        certs.insert("remainder_witness".into(), r.remainder_witness.map_or(Value::Null, |w| json!(witness_to_json(&sys, &w))));
    }
    Ok(s.finish("castle validate", Value::Object(result), Value::Object(certs), json!({})))
}

fn verify_all(s: &Session, phi: &OrderZeroMap) -> Result<(Value, Value), CliError> {
    let cpc = verify_cpc(phi)?;
    let unit_norm = operator_norm(&phi.unit_image()?, s.opts.mode);
    let tol = s.opts.tolerance;
    let cp = cpc.min_choi_eigenvalue.is_some_and(|m| m >= -tol);
    let contractive = unit_norm.value <= 1.0 + tol;
    let result = json!({
        "completely_positive": cp,
        "contractive": contractive,
        "order_zero": verify_order_zero(phi)?,
        "normalizer_preserving": verify_normalizer_preserving(phi)?,
        "unit_norm_exact": unit_norm.exact,
    });
    let margins = json!({
        "choi_min_eigenvalue": cpc.min_choi_eigenvalue,
        "unit_norm": unit_norm.value,
        "contractivity_slack": 1.0 - unit_norm.value,
    });
    Ok((result, margins))
}

pub fn castle_build_ozm(mut s: Session, data_path: &str) -> Result<Report, CliError> {
    let sys = s.sys.clone();
    let text = s.file("data", data_path)?;
    let data = castle_data_from_json(&sys, &parse_json::<CastleDataJson>(data_path, &text)?)?;
    let phi = build_castle_ozm(&sys, &data)?;
    let (result, margins) = verify_all(&s, &phi)?;
    Ok(s.finish("castle build-ozm", result, json!({"ozm": ozm_to_json(&phi)}), margins))
}

/// Decomposes a map given either directly or as castle data to build first.
pub fn castle_decompose(mut s: Session, ozm: Option<&str>, data: Option<&str>) -> Result<Report, CliError> {
    let sys = s.sys.clone();
    let phi = load_map(&mut s, ozm, data)?;
    let back = decompose_ozm(&phi)?;
    let rebuilt = build_castle_ozm(&sys, &back)?;
    let result = json!({"decomposed": true, "towers": back.castle.towers.len(), "round_trip": rebuilt == phi});
    Ok(s.finish("castle decompose", result, json!({"data": castle_data_to_json(&sys, &back)}), json!({})))
}

fn load_map(s: &mut Session, ozm: Option<&str>, data: Option<&str>) -> Result<OrderZeroMap, CliError> {
    let sys = s.sys.clone();
    match (ozm, data) {
        (Some(path), _) => {
            let text = s.file("ozm", path)?;
            ozm_from_json(&sys, &parse_json::<OzmJson>(path, &text)?)
        }
        (None, Some(path)) => {
            let text = s.file("data", path)?;
            let data = castle_data_from_json(&sys, &parse_json::<CastleDataJson>(path, &text)?)?;
            Ok(build_castle_ozm(&sys, &data)?)
        }
        (None, None) => Err(CliError::parse("map", "one of --ozm or --data is required")),
    }
}

pub enum TzsMap<'a> {
    Ozm(&'a str),
    Data(&'a str),
    Identity,
    Search,
}

pub struct TzsArgs<'a> {
    pub map: TzsMap<'a>,
    pub n: Option<usize>,
    pub epsilon: &'a str,
    pub family: &'a [String],
    pub h: &'a str,
}

fn tzs_json(s: &Session, r: &TzsReport) -> (Value, Value, Value) {
    let sys = &s.sys;
    let result = json!({
        "pass": r.passes(),
        "i_normalizer_preserving": r.normalizer_preserving,
        "ii_remainder_subequivalent": r.remainder_ok,
        "iii_commutators_small": r.commutators_ok(),
        "iii_matrix_units_small": r.unit_margin() > 0.0,
        "remainder": r.remainder.as_ref().map(|p| labels(sys, p)),
        "bound_factor": r.bound_factor,
    });
    let margins = json!({
        "commutator_norms": r.commutator_norms,
        "max_commutator_norm": r.max_commutator_norm,
        "epsilon": r.epsilon,
        "iii_margin": r.margin(),
        "iii_unit_margin": r.unit_margin(),
        "tolerance": s.opts.tolerance,
    });
    let certs = json!({"remainder_witness": r.remainder_witness.as_ref().map(|w| witness_to_json(sys, w))});
    (result, margins, certs)
}

pub fn castle_tzs(mut s: Session, args: TzsArgs<'_>) -> Result<Report, CliError> {
    let sys = s.sys.clone();
    let epsilon = s.rational("epsilon", args.epsilon)?;
    s.param("h", args.h);
    let h = parse_func_spec(&sys, "h", args.h)?;
    let family = args
        .family
        .iter()
        .enumerate()
        .map(|(k, spec)| s.element(&format!("family[{k}]"), spec))
        .collect::<Result<Vec<_>, _>>()?;
    let (phi, data) = match args.map {
        TzsMap::Ozm(path) => (load_map(&mut s, Some(path), None)?, None),
        TzsMap::Data(path) => (load_map(&mut s, None, Some(path))?, None),
        TzsMap::Identity => {
            s.param("map", "identity");
            let d = identity_embedding(&sys)?;
            (build_castle_ozm(&sys, &d)?, Some(d))
        }
        TzsMap::Search => {
            let n = args.n.ok_or_else(|| CliError::parse("n", "--n is required with --search"))?;
            s.param("map", "search");
            s.param("n", &n.to_string());
            let inst = TzsInstance { n, epsilon: epsilon.clone(), family: family.clone(), h: h.clone() };
            match search_tzs_map(&sys, &inst, s.opts.budget)? {
                Some((d, phi)) => (phi, Some(d)),
                None => {
                    return Ok(s.finish("castle tzs", json!({"pass": false, "found": false}), json!({}), json!({})));
                }
            }
        }
    };
    if let Some(n) = args.n {
        if n != phi.size() {
            return Err(CliError::parse("n", format!("map has size {}, not {n}", phi.size())));
        }
    }
    let inst = TzsInstance { n: phi.size(), epsilon, family, h };
    let r = check_tzs_instance(&inst, &phi)?;
    let (mut result, margins, mut certs) = tzs_json(&s, &r);
    if matches!(args.map, TzsMap::Search) {
        result["found"] = json!(true);
    }
    certs["ozm"] = json!(ozm_to_json(&phi));
    if let Some(d) = data {
        certs["data"] = json!(castle_data_to_json(&sys, &d));
    }
    Ok(s.finish("castle tzs", result, certs, margins))
}

pub fn semigroup(mut s: Session, max_n: usize) -> Result<Report, CliError> {
    s.param("max_n", &max_n.to_string());
    let sys = s.sys.clone();
    let w = type_semigroup(&sys, max_n, s.opts.budget)?;
    let classes: Vec<Value> = w.classes.iter().map(|t| json!(t.iter().map(|p| labels(&sys, p)).collect::<Vec<_>>())).collect();
    let perforation = almost_unperforation_check(&w);
    let mut result = json!({
        "max_n": max_n,
        "class_count": w.len(),
        "classes": classes,
        "order": w.order,
        "add": w.add,
        "almost_unperforated_within_bound": perforation.is_none(),
        "perforation": perforation.map(|p| json!({"x": p.x, "y": p.y, "n": p.n})),
    });
    if 1usize.checked_shl(2 * sys.num_points() as u32).is_some_and(|pairs| pairs <= s.opts.budget) {
        let c = dynamical_comparison_check(&sys, s.opts.budget)?;
        result["dynamical_comparison"] = json!({
            "holds": c.holds,
            "pairs_searched": c.pairs_searched,
            "counterexample": c.counterexample.map(|(o, v)| json!([labels(&sys, &o), labels(&sys, &v)])),
        });
    }
    Ok(s.finish("semigroup", result, json!({}), json!({})))
}
