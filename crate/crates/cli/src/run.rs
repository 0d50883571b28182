//! Job dispatch: builds the kernel objects named by a job document, runs
//! the requested computation and assembles the report.

use crate::job::{JobDocument, JobKind};
use serde_json::{json, Map, Value};
use slopecm::groebner::Budget;
use slopecm::hilbert::hilbert_polynomial;
use slopecm::ideal::Ideal;
use slopecm::rat::{format_rat, Rat};
use slopecm::rees::{init_ideal, lemma41_check, power_compat, tilde_components, PowerCompatReport};
use slopecm::stability::{
    cm_degree, default_proxy_grid, df_normal_cone, prop33_check, seshadri_proxy,
    slope_mu, slope_mu_c, slope_semistable_scan, FamilySpec, RationalParam, SubschemeSpec,
    VarietySpec,
};
use slopecm::Error;

/// Outcome of a run: the report plus the process-level verdict.
pub struct RunOutcome {
    pub report: Value,
    /// Check-style jobs set this; `false` maps to the dedicated exit code.
    pub passed: Option<bool>,
}

fn rs(r: &Rat) -> Value {
    Value::String(format_rat(r))
}

fn coeffs(c: &[Rat]) -> Value {
    Value::Array(c.iter().map(rs).collect())
}

fn budget_of(job: &JobDocument) -> Budget {
    let mut b = Budget::default();
    if let Some(p) = job.budget_pairs {
        b.max_pairs = p;
    }
    if let Some(d) = job.max_degree {
        b.max_degree = d;
    }
    b
}

fn variety_of(job: &JobDocument, which: &crate::job::VarietyRef, budget: &Budget) -> Result<VarietySpec, Error> {
    let gens = job
        .ideal_gens(&which.ideal)
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    VarietySpec::new(&job.ring, gens, which.d, budget)
}

fn family_of(job: &JobDocument, which: &crate::job::VarietyRef, budget: &Budget) -> Result<FamilySpec, Error> {
    let gens = job
        .ideal_gens(&which.ideal)
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    FamilySpec::new(&job.ring, gens, which.d, budget)
}

fn named_ideal(job: &JobDocument, name: &str) -> Result<Ideal, Error> {
    let gens = job
        .ideal_gens(name)
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(Ideal::new(&job.ring, gens))
}

fn power_compat_value(rep: &PowerCompatReport) -> (Value, Value) {
    let results = json!({
        "pass": rep.passed(),
        "containment_holds": rep.containment_holds,
        "failing": rep.failing.map(|(m, j)| json!({"m": m, "j": j})),
    });
    let certs = json!({
        "counterexample": rep.certificate.as_ref().map(|p| p.render()),
    });
    (results, certs)
}

/// Runs one validated job.
pub fn run_job(job: &JobDocument) -> Result<RunOutcome, Error> {
    let budget = budget_of(job);
    let mut results = Map::new();
    let mut certificates = Map::new();
    #[allow(unused_assignments)]
    let mut formula = Value::Null;
    let mut passed: Option<bool> = None;

    match job.kind {
        JobKind::Slope => {
            let v = variety_of(job, job.params.variety.as_ref().unwrap(), &budget)?;
            let mu = slope_mu(&v)?;
            let (a0, a1) = v.leading_coefficients();
            results.insert("mu".into(), rs(&mu));
            results.insert("a0".into(), rs(&a0));
            results.insert("a1".into(), rs(&a1));
            results.insert("dimension".into(), json!(v.dimension()));
            certificates.insert(
                "hilbert_polynomial".into(),
                json!({
                    "coefficients": coeffs(&v.hilbert_polynomial().coefficients),
                    "k0": v.hilbert_polynomial().k0,
                    "stride": v.hilbert_polynomial().stride,
                }),
            );
            formula = json!("mu = a1/a0");
        }
        JobKind::MuC => {
            let v = variety_of(job, job.params.variety.as_ref().unwrap(), &budget)?;
            let zgens = job
                .ideal_gens(job.params.subscheme.as_ref().unwrap())
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
            let z = SubschemeSpec::new(&v, zgens, &budget)?;
            let c = RationalParam::new(job.params.c.clone().unwrap())?;
            let mu = slope_mu(&v)?;
            let mu_c = slope_mu_c(&v, &z, &c, &budget)?;
            results.insert("mu".into(), rs(&mu));
            results.insert("mu_c".into(), rs(&mu_c));
            results.insert("gap".into(), rs(&(mu.clone() - mu_c.clone())));
            formula =
                json!("mu_c = int_0^c (a1(x) + a0'(x)/2) dx / int_0^c a0(x) dx");
        }
        JobKind::Df => {
            let v = variety_of(job, job.params.variety.as_ref().unwrap(), &budget)?;
            let zgens = job
                .ideal_gens(job.params.subscheme.as_ref().unwrap())
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
            let z = SubschemeSpec::new(&v, zgens, &budget)?;
            let c = RationalParam::new(job.params.c.clone().unwrap())?;
            let proxy = seshadri_proxy(&v, &z, &default_proxy_grid(), &budget)?;
            let rep = df_normal_cone(&v, &z, &c, proxy.as_ref(), &budget)?;
            results.insert("df".into(), rs(&rep.df));
            results.insert("w0".into(), rs(&rep.w0));
            results.insert("w1".into(), rs(&rep.w1));
            results.insert("b0".into(), rs(&rep.b0));
            results.insert("b1".into(), rs(&rep.b1));
            results.insert("a0".into(), rs(&rep.a0));
            results.insert("a1".into(), rs(&rep.a1));
            results.insert("cm_of_compactification".into(), rs(&rep.cm));
            results.insert(
                "seshadri_proxy".into(),
                proxy.as_ref().map(rs).unwrap_or(Value::Null),
            );
            results.insert("beyond_proxy".into(), json!(rep.beyond_proxy));
            // route equality held, or the computation would have failed
            results.insert("route_equality".into(), json!("w0 = b0, w1 = b1 - a0"));
            passed = Some(true);
            formula = json!("df = a1*w0 - a0*w1");
        }
        JobKind::Cm => {
            let fam = family_of(job, job.params.family.as_ref().unwrap(), &budget)?;
            let twist_data = match (&job.params.twist, &job.params.c) {
                (Some(name), Some(c)) => {
                    Some((named_ideal(job, name)?, RationalParam::new(c.clone())?))
                }
                _ => None,
            };
            let rep = match &twist_data {
                Some((j, c)) => cm_degree(&fam, Some((j, c)), &budget)?,
                None => cm_degree(&fam, None, &budget)?,
            };
            results.insert("cm".into(), rs(&rep.cm));
            results.insert("a0".into(), rs(&rep.a0));
            results.insert("a1".into(), rs(&rep.a1));
            results.insert("b0".into(), rs(&rep.b0));
            results.insert("b1".into(), rs(&rep.b1));
            let rows: Vec<Value> = rep
                .table
                .rows
                .values()
                .map(|r| {
                    json!({
                        "k": r.k,
                        "rank": r.rank,
                        "degree": r.degree,
                        "m_linear": r.m_linear,
                    })
                })
                .collect();
            certificates.insert("section_rows".into(), Value::Array(rows));
            formula = json!("cm = a1*b0 - a0*b1 + (1 - g)*a0^2, g = 0");
        }
        JobKind::Prop33 => {
            let fam = family_of(job, job.params.family.as_ref().unwrap(), &budget)?;
            let zgens = job
                .ideal_gens(job.params.subscheme.as_ref().unwrap())
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
            let c = RationalParam::new(job.params.c.clone().unwrap())?;
            let rep = prop33_check(&fam, &zgens, &c, job.params.m_max.unwrap(), &budget)?;
            let (pc_results, pc_certs) = power_compat_value(&rep.power_compat);
            results.insert("power_compat".into(), pc_results);
            results.insert(
                "cm_configuration".into(),
                rep.cm_configuration.as_ref().map(rs).unwrap_or(Value::Null),
            );
            results.insert(
                "cm_blowup".into(),
                rep.cm_blowup.as_ref().map(rs).unwrap_or(Value::Null),
            );
            results.insert(
                "cm_family".into(),
                rep.cm_family.as_ref().map(rs).unwrap_or(Value::Null),
            );
            results.insert(
                "identity_holds".into(),
                rep.identity_holds.map(|b| json!(b)).unwrap_or(Value::Null),
            );
            certificates.insert("power_compat".into(), pc_certs);
            passed = Some(rep.power_compat.passed() && rep.identity_holds == Some(true));
            formula = json!("cm(T, N) = cm(B, M) - cm(X, L)");
        }
        JobKind::Tilde => {
            let ideal = named_ideal(job, job.params.ideal.as_ref().unwrap())?;
            let center = named_ideal(job, job.params.center.as_ref().unwrap())?;
            let fam = tilde_components(&ideal, &center, job.params.j_cap.unwrap_or(16), &budget)?;
            let comps: Vec<Value> = fam
                .components()
                .iter()
                .map(|c| Value::Array(c.render().into_iter().map(Value::String).collect()))
                .collect();
            results.insert("components".into(), Value::Array(comps));
            results.insert(
                "stabilization_index".into(),
                fam.stabilization_index().map(|j| json!(j)).unwrap_or(Value::Null),
            );
            results.insert("stabilized".into(), json!(fam.is_stabilized()));
            formula = json!("C_j = I meet center^j");
        }
        JobKind::Init => {
            let ideal = named_ideal(job, job.params.ideal.as_ref().unwrap())?;
            let center = named_ideal(job, job.params.center.as_ref().unwrap())?;
            let init = init_ideal(&ideal, &center, &budget)?;
            results.insert(
                "ring_variables".into(),
                Value::Array(
                    init.ring()
                        .var_names()
                        .iter()
                        .map(|s| Value::String(s.clone()))
                        .collect(),
                ),
            );
            results.insert(
                "relations".into(),
                Value::Array(init.relations().render().into_iter().map(Value::String).collect()),
            );
            results.insert(
                "generators".into(),
                Value::Array(
                    init.generators().render().into_iter().map(Value::String).collect(),
                ),
            );
            formula = json!("init(I) in O_center[s]");
        }
        JobKind::PowerCompat => {
            let ideal = named_ideal(job, job.params.ideal.as_ref().unwrap())?;
            let center = named_ideal(job, job.params.center.as_ref().unwrap())?;
            let modulus = match &job.params.modulus {
                Some(name) => Some(named_ideal(job, name)?),
                None => None,
            };
            let rep = power_compat(
                &ideal,
                &center,
                job.params.m_max.unwrap(),
                modulus.as_ref(),
                &budget,
            )?;
            let (pc_results, pc_certs) = power_compat_value(&rep);
            results.insert("power_compat".into(), pc_results);
            certificates.insert("power_compat".into(), pc_certs);
            passed = Some(rep.passed());
            formula = json!("I^m meet center^j = center^j * I^(m-j)");
        }
        JobKind::Lemma41 => {
            let ideal = named_ideal(job, job.params.ideal.as_ref().unwrap())?;
            let h = job.params.h.clone().unwrap();
            let rep = lemma41_check(&h, &ideal, job.params.m_max.unwrap(), &budget)?;
            let (pc_results, pc_certs) = power_compat_value(&rep);
            results.insert("power_compat".into(), pc_results);
            certificates.insert("power_compat".into(), pc_certs);
            passed = Some(rep.passed());
            formula = json!("I^m meet (h^j) = h^j * I^(m-j)");
        }
        JobKind::Hilbert => {
            let ideal = named_ideal(job, job.params.ideal.as_ref().unwrap())?;
            let block = job
                .ring
                .blocks()
                .first()
                .map(|b| b.name.clone())
                .unwrap_or_else(|| "x".into());
            let sat = job.params.saturate.then_some(block.as_str());
            let hp = hilbert_polynomial(&ideal, job.params.stride.unwrap_or(1), None, sat, &budget)?;
            results.insert("polynomial".into(), json!(hp.render()));
            results.insert("coefficients".into(), coeffs(&hp.coefficients));
            results.insert("degree".into(), hp.degree().map(|d| json!(d)).unwrap_or(Value::Null));
            results.insert("k0".into(), json!(hp.k0));
            results.insert("stride".into(), json!(hp.stride));
            formula = json!("dim (S/I)_k for k in k0 + stride*N");
        }
        JobKind::Scan => {
            let v = variety_of(job, job.params.variety.as_ref().unwrap(), &budget)?;
            let mut subs = Vec::new();
            for name in &job.params.subschemes {
                let gens = job
                    .ideal_gens(name)
                    .map_err(|e| Error::InvalidInput(e.to_string()))?;
                subs.push(SubschemeSpec::new(&v, gens, &budget)?);
            }
            let rep = slope_semistable_scan(&v, &subs, &job.params.c_grid, &budget)?;
            results.insert("mu".into(), rs(&rep.mu));
            let cells: Vec<Value> = rep
                .cells
                .iter()
                .map(|cell| {
                    json!({
                        "subscheme": job.params.subschemes[cell.subscheme_index],
                        "c": format_rat(&cell.c),
                        "mu_c": format_rat(&cell.mu_c),
                        "gap": format_rat(&cell.gap),
                        "within_proxy": cell.within_proxy,
                    })
                })
                .collect();
            results.insert("cells".into(), Value::Array(cells));
            results.insert(
                "proxies".into(),
                Value::Array(
                    rep.proxies
                        .iter()
                        .map(|p| p.as_ref().map(rs).unwrap_or(Value::Null))
                        .collect(),
                ),
            );
            let verdict_text = if rep.violation_found {
                "violation found"
            } else {
                "no violation found over the supplied scan"
            };
            results.insert("verdict_text".into(), json!(verdict_text));
            passed = Some(!rep.violation_found);
            formula = json!("slope semistability demands mu >= mu_c");
        }
    }

    let verdict = match passed {
        Some(true) => json!("pass"),
        Some(false) => json!("fail"),
        None => Value::Null,
    };
    let report = json!({
        "job": job.echo,
        "notices": job.notices,
        "kind": job.kind.name(),
        "formula": formula,
        "results": Value::Object(results),
        "certificates": Value::Object(certificates),
        "verdict": verdict,
    });
    Ok(RunOutcome { report, passed })
}
