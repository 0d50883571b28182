//! Job documents: the JSON input schema, validated with JSON-pointer error
//! paths, and the typed structures the runner consumes.

use crate::poly_parse::parse_polynomial;
use serde_json::Value;
use slopecm::poly::Polynomial;
use slopecm::rat::{format_rat, parse_rat, Rat};
use slopecm::ring::{Block, Ring, RingSpec};
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct SchemaError {
    pub pointer: String,
    pub message: String,
}

impl std::fmt::Display for SchemaError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "schema error at {}: {}", self.pointer, self.message)
    }
}

impl std::error::Error for SchemaError {}

fn err(pointer: impl Into<String>, message: impl Into<String>) -> SchemaError {
    SchemaError { pointer: pointer.into(), message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JobKind {
    Slope,
    MuC,
    Df,
    Cm,
    Prop33,
    Tilde,
    Init,
    PowerCompat,
    Lemma41,
    Hilbert,
    Scan,
}

impl JobKind {
    pub fn parse(s: &str) -> Option<JobKind> {
        Some(match s {
            "slope" => JobKind::Slope,
            "mu-c" => JobKind::MuC,
            "df" => JobKind::Df,
            "cm" => JobKind::Cm,
            "prop33" => JobKind::Prop33,
            "tilde" => JobKind::Tilde,
            "init" => JobKind::Init,
            "power-compat" => JobKind::PowerCompat,
            "lemma41" => JobKind::Lemma41,
            "hilbert" => JobKind::Hilbert,
            "scan" => JobKind::Scan,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            JobKind::Slope => "slope",
            JobKind::MuC => "mu-c",
            JobKind::Df => "df",
            JobKind::Cm => "cm",
            JobKind::Prop33 => "prop33",
            JobKind::Tilde => "tilde",
            JobKind::Init => "init",
            JobKind::PowerCompat => "power-compat",
            JobKind::Lemma41 => "lemma41",
            JobKind::Hilbert => "hilbert",
            JobKind::Scan => "scan",
        }
    }
}

/// Reference to a polarized variety inside a job.
#[derive(Debug, Clone)]
pub struct VarietyRef {
    pub ideal: String,
    pub d: i64,
}

#[derive(Debug, Clone)]
pub struct JobParams {
    pub variety: Option<VarietyRef>,
    pub family: Option<VarietyRef>,
    pub subscheme: Option<String>,
    pub subschemes: Vec<String>,
    pub ideal: Option<String>,
    pub center: Option<String>,
    pub modulus: Option<String>,
    pub twist: Option<String>,
    pub h: Option<Polynomial>,
    pub c: Option<Rat>,
    pub c_grid: Vec<Rat>,
    pub m_max: Option<u32>,
    pub j_cap: Option<u32>,
    pub stride: Option<i64>,
    pub saturate: bool,
}

/// A fully validated job: ring, named ideals, kind and parameters.
#[derive(Debug, Clone)]
pub struct JobDocument {
    pub ring: Ring,
    pub ideals: BTreeMap<String, Vec<Polynomial>>,
    pub kind: JobKind,
    pub params: JobParams,
    pub budget_pairs: Option<usize>,
    pub max_degree: Option<u32>,
    /// Normalization notices collected while parsing (echoed in reports).
    pub notices: Vec<String>,
    /// The document as parsed, echoed back in reports.
    pub echo: Value,
}

impl JobDocument {
    pub fn ideal_gens(&self, name: &str) -> Result<Vec<Polynomial>, SchemaError> {
        self.ideals
            .get(name)
            .cloned()
            .ok_or_else(|| err("/ideals", format!("undeclared ideal `{name}`")))
    }
}

fn as_object<'v>(
    v: &'v Value,
    pointer: &str,
) -> Result<&'v serde_json::Map<String, Value>, SchemaError> {
    v.as_object().ok_or_else(|| err(pointer, "expected an object"))
}

fn as_array<'v>(v: &'v Value, pointer: &str) -> Result<&'v Vec<Value>, SchemaError> {
    v.as_array().ok_or_else(|| err(pointer, "expected an array"))
}

fn as_str<'v>(v: &'v Value, pointer: &str) -> Result<&'v str, SchemaError> {
    v.as_str().ok_or_else(|| err(pointer, "expected a string"))
}

fn as_i64(v: &Value, pointer: &str) -> Result<i64, SchemaError> {
    v.as_i64().ok_or_else(|| err(pointer, "expected an integer"))
}

fn reject_unknown(
    obj: &serde_json::Map<String, Value>,
    allowed: &[&str],
    pointer: &str,
) -> Result<(), SchemaError> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(err(format!("{pointer}/{key}"), "unknown field"));
        }
    }
    Ok(())
}

/// Parses and validates one job document.
pub fn parse_job(text: &str) -> Result<JobDocument, SchemaError> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| err("", format!("invalid JSON: {e}")))?;
    let obj = as_object(&root, "")?;
    reject_unknown(obj, &["ring", "ideals", "job"], "")?;

    // ring
    let ring_val = obj.get("ring").ok_or_else(|| err("/ring", "missing"))?;
    let ring_obj = as_object(ring_val, "/ring")?;
    reject_unknown(ring_obj, &["variables", "blocks", "grading"], "/ring")?;
    let vars_val = ring_obj
        .get("variables")
        .ok_or_else(|| err("/ring/variables", "missing"))?;
    let mut variables = Vec::new();
    for (i, v) in as_array(vars_val, "/ring/variables")?.iter().enumerate() {
        variables.push(as_str(v, &format!("/ring/variables/{i}"))?.to_string());
    }
    let grading_val = ring_obj
        .get("grading")
        .ok_or_else(|| err("/ring/grading", "missing"))?;
    let mut grading = Vec::new();
    for (i, row) in as_array(grading_val, "/ring/grading")?.iter().enumerate() {
        let mut r = Vec::new();
        for (j, entry) in as_array(row, &format!("/ring/grading/{i}"))?.iter().enumerate() {
            r.push(as_i64(entry, &format!("/ring/grading/{i}/{j}"))?);
        }
        grading.push(r);
    }
    let mut blocks = Vec::new();
    if let Some(bv) = ring_obj.get("blocks") {
        let bobj = as_object(bv, "/ring/blocks")?;
        for (name, members) in bobj {
            let mut idxs = Vec::new();
            for (i, m) in as_array(members, &format!("/ring/blocks/{name}"))?.iter().enumerate() {
                let vname = as_str(m, &format!("/ring/blocks/{name}/{i}"))?;
                let idx = variables.iter().position(|v| v == vname).ok_or_else(|| {
                    err(
                        format!("/ring/blocks/{name}/{i}"),
                        format!("unknown variable `{vname}`"),
                    )
                })?;
                idxs.push(idx);
            }
            blocks.push(Block { name: name.clone(), vars: idxs });
        }
    } else {
        blocks.push(Block { name: "x".into(), vars: (0..variables.len()).collect() });
    }
    let ring = RingSpec::new(variables, grading, blocks)
        .map_err(|e| err("/ring", e.to_string()))?;

    // ideals
    let mut ideals = BTreeMap::new();
    if let Some(iv) = obj.get("ideals") {
        let iobj = as_object(iv, "/ideals")?;
        for (name, gens) in iobj {
            let arr = as_array(gens, &format!("/ideals/{name}"))?;
            let mut polys = Vec::new();
            for (i, g) in arr.iter().enumerate() {
                let text = as_str(g, &format!("/ideals/{name}/{i}"))?;
                let p = parse_polynomial(text, &ring).map_err(|e| {
                    err(format!("/ideals/{name}/{i}"), e.to_string())
                })?;
                polys.push(p);
            }
            ideals.insert(name.clone(), polys);
        }
    }

    // job
    let job_val = obj.get("job").ok_or_else(|| err("/job", "missing"))?;
    let job_obj = as_object(job_val, "/job")?;
    reject_unknown(job_obj, &["kind", "params"], "/job")?;
    let kind_str = as_str(
        job_obj.get("kind").ok_or_else(|| err("/job/kind", "missing"))?,
        "/job/kind",
    )?;
    let kind = JobKind::parse(kind_str)
        .ok_or_else(|| err("/job/kind", format!("unknown job kind `{kind_str}`")))?;

    let empty = serde_json::Map::new();
    let params_obj = match job_obj.get("params") {
        Some(p) => as_object(p, "/job/params")?,
        None => &empty,
    };

    let allowed: &[&str] = match kind {
        JobKind::Slope => &["variety", "budget_pairs", "max_degree"],
        JobKind::MuC | JobKind::Df => {
            &["variety", "subscheme", "c", "budget_pairs", "max_degree"]
        }
        JobKind::Cm => &["family", "twist", "c", "budget_pairs", "max_degree"],
        JobKind::Prop33 => {
            &["family", "subscheme", "c", "m_max", "budget_pairs", "max_degree"]
        }
        JobKind::Tilde => &["ideal", "center", "j_cap", "budget_pairs", "max_degree"],
        JobKind::Init => &["ideal", "center", "budget_pairs", "max_degree"],
        JobKind::PowerCompat => {
            &["ideal", "center", "m_max", "modulus", "budget_pairs", "max_degree"]
        }
        JobKind::Lemma41 => &["ideal", "h", "m_max", "budget_pairs", "max_degree"],
        JobKind::Hilbert => &["ideal", "stride", "saturate", "budget_pairs", "max_degree"],
        JobKind::Scan => {
            &["variety", "subschemes", "c_grid", "budget_pairs", "max_degree"]
        }
    };
    reject_unknown(params_obj, allowed, "/job/params")?;

    let mut notices = Vec::new();
    let ideal_name = |v: &Value, pointer: &str| -> Result<String, SchemaError> {
        let name = as_str(v, pointer)?;
        if !ideals.contains_key(name) {
            return Err(err(pointer, format!("undeclared ideal `{name}`")));
        }
        Ok(name.to_string())
    };
    let variety_ref = |v: &Value, pointer: &str| -> Result<VarietyRef, SchemaError> {
        let vobj = as_object(v, pointer)?;
        reject_unknown(vobj, &["ideal", "d"], pointer)?;
        let iname = ideal_name(
            vobj.get("ideal").ok_or_else(|| err(format!("{pointer}/ideal"), "missing"))?,
            &format!("{pointer}/ideal"),
        )?;
        let d = match vobj.get("d") {
            Some(dv) => as_i64(dv, &format!("{pointer}/d"))?,
            None => 1,
        };
        if d < 1 {
            return Err(err(format!("{pointer}/d"), "polarization degree must be positive"));
        }
        Ok(VarietyRef { ideal: iname, d })
    };
    let parse_c = |v: &Value, pointer: &str, notices: &mut Vec<String>| -> Result<Rat, SchemaError> {
        let s = as_str(v, pointer)?;
        let r = parse_rat(s).ok_or_else(|| err(pointer, format!("not a rational: `{s}`")))?;
        if format_rat(&r) != s.trim() {
            notices.push(format!("normalized c = {} to {}", s.trim(), format_rat(&r)));
        }
        if slopecm::rat::sign(&r) <= 0 {
            return Err(err(pointer, "c must be positive"));
        }
        Ok(r)
    };

    let mut params = JobParams {
        variety: None,
        family: None,
        subscheme: None,
        subschemes: Vec::new(),
        ideal: None,
        center: None,
        modulus: None,
        twist: None,
        h: None,
        c: None,
        c_grid: Vec::new(),
        m_max: None,
        j_cap: None,
        stride: None,
        saturate: true,
    };

    let need = |field: &str| -> SchemaError {
        err(format!("/job/params/{field}"), "missing")
    };

    match kind {
        JobKind::Slope => {
            params.variety = Some(variety_ref(
                params_obj.get("variety").ok_or_else(|| need("variety"))?,
                "/job/params/variety",
            )?);
        }
        JobKind::MuC | JobKind::Df => {
            params.variety = Some(variety_ref(
                params_obj.get("variety").ok_or_else(|| need("variety"))?,
                "/job/params/variety",
            )?);
            params.subscheme = Some(ideal_name(
                params_obj.get("subscheme").ok_or_else(|| need("subscheme"))?,
                "/job/params/subscheme",
            )?);
            params.c = Some(parse_c(
                params_obj.get("c").ok_or_else(|| need("c"))?,
                "/job/params/c",
                &mut notices,
            )?);
        }
        JobKind::Cm => {
            params.family = Some(variety_ref(
                params_obj.get("family").ok_or_else(|| need("family"))?,
                "/job/params/family",
            )?);
            match params_obj.get("twist") {
                None | Some(Value::Null) => {}
                Some(v) => {
                    params.twist = Some(ideal_name(v, "/job/params/twist")?);
                    params.c = Some(parse_c(
                        params_obj.get("c").ok_or_else(|| need("c"))?,
                        "/job/params/c",
                        &mut notices,
                    )?);
                }
            }
        }
        JobKind::Prop33 => {
            params.family = Some(variety_ref(
                params_obj.get("family").ok_or_else(|| need("family"))?,
                "/job/params/family",
            )?);
            params.subscheme = Some(ideal_name(
                params_obj.get("subscheme").ok_or_else(|| need("subscheme"))?,
                "/job/params/subscheme",
            )?);
            params.c = Some(parse_c(
                params_obj.get("c").ok_or_else(|| need("c"))?,
                "/job/params/c",
                &mut notices,
            )?);
            params.m_max = Some(
                as_i64(
                    params_obj.get("m_max").ok_or_else(|| need("m_max"))?,
                    "/job/params/m_max",
                )? as u32,
            );
        }
        JobKind::Tilde => {
            params.ideal = Some(ideal_name(
                params_obj.get("ideal").ok_or_else(|| need("ideal"))?,
                "/job/params/ideal",
            )?);
            params.center = Some(ideal_name(
                params_obj.get("center").ok_or_else(|| need("center"))?,
                "/job/params/center",
            )?);
            if let Some(j) = params_obj.get("j_cap") {
                params.j_cap = Some(as_i64(j, "/job/params/j_cap")? as u32);
            }
        }
        JobKind::Init => {
            params.ideal = Some(ideal_name(
                params_obj.get("ideal").ok_or_else(|| need("ideal"))?,
                "/job/params/ideal",
            )?);
            params.center = Some(ideal_name(
                params_obj.get("center").ok_or_else(|| need("center"))?,
                "/job/params/center",
            )?);
        }
        JobKind::PowerCompat => {
            params.ideal = Some(ideal_name(
                params_obj.get("ideal").ok_or_else(|| need("ideal"))?,
                "/job/params/ideal",
            )?);
            params.center = Some(ideal_name(
                params_obj.get("center").ok_or_else(|| need("center"))?,
                "/job/params/center",
            )?);
            params.m_max = Some(
                as_i64(
                    params_obj.get("m_max").ok_or_else(|| need("m_max"))?,
                    "/job/params/m_max",
                )? as u32,
            );
            if let Some(m) = params_obj.get("modulus") {
                if !m.is_null() {
                    params.modulus = Some(ideal_name(m, "/job/params/modulus")?);
                }
            }
        }
        JobKind::Lemma41 => {
            params.ideal = Some(ideal_name(
                params_obj.get("ideal").ok_or_else(|| need("ideal"))?,
                "/job/params/ideal",
            )?);
            let htext = as_str(
                params_obj.get("h").ok_or_else(|| need("h"))?,
                "/job/params/h",
            )?;
            let h = parse_polynomial(htext, &ring)
                .map_err(|e| err("/job/params/h", e.to_string()))?;
            params.h = Some(h);
            params.m_max = Some(
                as_i64(
                    params_obj.get("m_max").ok_or_else(|| need("m_max"))?,
                    "/job/params/m_max",
                )? as u32,
            );
        }
        JobKind::Hilbert => {
            params.ideal = Some(ideal_name(
                params_obj.get("ideal").ok_or_else(|| need("ideal"))?,
                "/job/params/ideal",
            )?);
            if let Some(s) = params_obj.get("stride") {
                let stride = as_i64(s, "/job/params/stride")?;
                if stride < 1 {
                    return Err(err("/job/params/stride", "stride must be positive"));
                }
                params.stride = Some(stride);
            }
            if let Some(s) = params_obj.get("saturate") {
                params.saturate = s
                    .as_bool()
                    .ok_or_else(|| err("/job/params/saturate", "expected a boolean"))?;
            }
        }
        JobKind::Scan => {
            params.variety = Some(variety_ref(
                params_obj.get("variety").ok_or_else(|| need("variety"))?,
                "/job/params/variety",
            )?);
            let subs = as_array(
                params_obj.get("subschemes").ok_or_else(|| need("subschemes"))?,
                "/job/params/subschemes",
            )?;
            for (i, s) in subs.iter().enumerate() {
                params
                    .subschemes
                    .push(ideal_name(s, &format!("/job/params/subschemes/{i}"))?);
            }
            let grid = as_array(
                params_obj.get("c_grid").ok_or_else(|| need("c_grid"))?,
                "/job/params/c_grid",
            )?;
            for (i, s) in grid.iter().enumerate() {
                params.c_grid.push(parse_c(
                    s,
                    &format!("/job/params/c_grid/{i}"),
                    &mut notices,
                )?);
            }
        }
    }

    let budget_pairs = match params_obj.get("budget_pairs") {
        Some(v) => Some(as_i64(v, "/job/params/budget_pairs")? as usize),
        None => None,
    };
    let max_degree = match params_obj.get("max_degree") {
        Some(v) => Some(as_i64(v, "/job/params/max_degree")? as u32),
        None => None,
    };

    Ok(JobDocument {
        ring,
        ideals,
        kind,
        params,
        budget_pairs,
        max_degree,
        notices,
        echo: root,
    })
}
