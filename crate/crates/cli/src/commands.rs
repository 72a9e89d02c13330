use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde_json::json;
use thiserror::Error;

use geoconc::dihomotopy::{self, ContextedSpace, DihomotopyError, EquivalenceSearch, Link, Verdict};
use geoconc::dispace::{atlases_equivalent, canonicalize as canon, check_dimap, common_refinement, compose, global_charts, is_iso};
use geoconc::etale::{self, EtaleError};
use geoconc::io::{self, IoError};
use geoconc::pv::{self, PvError};
use geoconc::sheaf::{self, Presheaf};
use geoconc::simplicial::{self, SimplicialError};
use geoconc::site::{OpenSite, SiteError};
use geoconc::{DispaceError, FinSpace, LocalPoSpace};

use crate::report::Report;
use crate::Kind;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Dispace(#[from] DispaceError),
    #[error(transparent)]
    Site(#[from] SiteError),
    #[error(transparent)]
    Etale(#[from] EtaleError),
    #[error(transparent)]
    Simplicial(#[from] SimplicialError),
    #[error(transparent)]
    Dihomotopy(#[from] DihomotopyError),
    #[error(transparent)]
    Pv(#[from] PvError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// Name of the innermost error variant, read off the debug form.
    pub fn kind(&self) -> String {
        let dbg = format!("{self:?}");
        let mut rest = dbg.as_str();
        let mut last = "Error";
        loop {
            let end = rest.find(|c: char| !(c.is_alphanumeric() || c == '_')).unwrap_or(rest.len());
            let ident = &rest[..end];
            if ident.is_empty() || ident == "Error" || !ident.starts_with(|c: char| c.is_ascii_uppercase()) {
                break;
            }
            last = ident;
            if rest[end..].starts_with('(') {
                rest = &rest[end + 1..];
            } else {
                break;
            }
        }
        last.to_string()
    }
}

/// Opens are counted only up to this many.
const OPENS_REPORT_LIMIT: usize = 4096;

type Result<T> = std::result::Result<T, CliError>;

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.display().to_string(), source })
}

fn read_doc<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(io::from_json(&read_text(path)?)?)
}

fn read_lps(path: &Path) -> Result<LocalPoSpace> {
    Ok(io::lps_from_doc(&read_doc(path)?)?)
}

fn read_presheaf(path: &Path) -> Result<Presheaf> {
    Ok(io::presheaf_from_doc(&read_doc(path)?)?)
}

fn names(s: &FinSpace, f: &[usize]) -> Vec<String> {
    f.iter().map(|&y| s.name(y).to_string()).collect()
}

fn sizes(p: &Presheaf) -> BTreeMap<String, usize> {
    let site = p.site();
    (0..site.len()).map(|u| (site.name(u), p.size(u))).collect()
}

fn strict_germs(m: &LocalPoSpace) -> usize {
    (0..m.len()).filter(|&x| !m.germ(x).strict_pairs().is_empty()).count()
}

fn global_order_count(m: &LocalPoSpace) -> serde_json::Value {
    match global_charts(m) {
        Ok(c) => json!(c.len()),
        Err(_) => json!("not computed (more than 6 points)"),
    }
}

pub fn validate(path: &Path, kind: Kind) -> Result<Report> {
    let mut r = Report::new("validate");
    match kind {
        Kind::Space => {
            let m = read_lps(path)?;
            let opens = match m.space().opens_bounded(OPENS_REPORT_LIMIT) {
                Ok(o) => json!(o.len()),
                Err(_) => json!(format!("more than {OPENS_REPORT_LIMIT}")),
            };
            r.set("kind", "space")
                .set("points", m.len())
                .set("opens", opens)
                .set("ordered_germs", strict_germs(&m))
                .set("global_orders", global_order_count(&m));
        }
        Kind::Presheaf => {
            let p = read_presheaf(path)?;
            r.set("kind", "presheaf").set("points", p.site().base().len()).set("sizes", sizes(&p));
        }
        Kind::Bundle => {
            let b = io::bundle_from_doc(&read_doc(path)?)?;
            let etale = etale::is_etale(&b).err().map(|w| b.total.space().name(w).to_string());
            r.set("kind", "bundle")
                .set("total_points", b.total.len())
                .set("base_points", b.base.len())
                .set("etale", etale.is_none())
                .set("not_locally_iso_at", etale);
        }
        Kind::Dimap => {
            let (m, n, f) = io::dimap_from_doc(&read_doc(path)?)?;
            r.set("kind", "point map").set("source_points", m.len()).set("target_points", n.len()).set("map", names(n.space(), &f));
        }
        Kind::Cover => {
            let (site, target, cover) = io::cover_from_doc(&read_doc(path)?)?;
            let covers = site.is_cover(target, &cover) && cover.iter().all(|&u| site.contains(target, u));
            if !covers {
                return Err(CliError::Usage(format!("family does not cover {}", site.name(target))));
            }
            r.set("kind", "cover").set("target", site.name(target)).set("members", cover.len());
        }
        Kind::Pv => {
            let prog = pv::parse_pv(&read_text(path)?)?;
            let procs: Vec<String> = prog.processes.iter().map(|(n, a)| format!("{n} ({} actions)", a.len())).collect();
            let sems: Vec<String> = prog.semaphores.iter().map(|(n, c)| format!("{n} = {c}")).collect();
            r.set("kind", "pv program").set("semaphores", sems).set("processes", procs);
        }
    }
    Ok(r)
}

pub fn canonicalize(path: &Path, compare: Option<&Path>) -> Result<Report> {
    let mut r = Report::new("canonicalize");
    let a = io::atlas_from_doc(&read_doc(path)?)?;
    let m = canon(&a);
    r.set("charts", a.charts.len()).set("canonical", io::lps_to_doc(&m));
    if let Some(other) = compare {
        let b = io::atlas_from_doc(&read_doc(other)?)?;
        let eq = atlases_equivalent(&a, &b)?;
        r.set("equivalent", eq);
        if let Some(c) = common_refinement(&a, &b).filter(|_| eq) {
            let s = &c.space;
            let charts: Vec<Vec<String>> = c.charts.iter().map(|ch| s.set_names(&ch.carrier)).collect();
            r.set("common_refinement", charts);
        }
        r.fail_unless(eq);
    }
    Ok(r)
}

pub fn dimap_check(path: &Path) -> Result<Report> {
    let mut r = Report::new("dimap-check");
    let (m, n, f) = io::dimap_from_doc(&read_doc(path)?)?;
    let (ms, ns) = (m.space(), n.space());
    match check_dimap(&m, &n, &f) {
        Ok(true) => {
            r.set("continuous", true).set("dimap", true).set("iso", is_iso(&m, &n, &f));
        }
        Ok(false) => {
            let witness = (0..m.len()).find_map(|z| {
                let mo = ms.min_open(z);
                mo.ones().flat_map(|x| mo.ones().map(move |y| (x, y))).find_map(|(x, y)| {
                    (m.le_at(z, x, y) && !n.le_at(f[z], f[x], f[y])).then(|| {
                        format!(
                            "{} <= {} at {} but {} !<= {} at {}",
                            ms.name(x),
                            ms.name(y),
                            ms.name(z),
                            ns.name(f[x]),
                            ns.name(f[y]),
                            ns.name(f[z])
                        )
                    })
                })
            });
            r.set("continuous", true).set("dimap", false).set("witness", witness);
            r.fail_unless(false);
        }
        Err(DispaceError::NotContinuous(x)) => {
            r.set("continuous", false).set("dimap", false).set("witness", format!("not continuous at {x}"));
            r.fail_unless(false);
        }
        Err(e) => return Err(e.into()),
    }
    Ok(r)
}

pub fn sheaf_check(path: &Path) -> Result<Report> {
    let mut r = Report::new("sheaf-check");
    let p = read_presheaf(path)?;
    let rep = p.check_sheaf();
    r.set("sheaf", rep.is_sheaf).set("covers_checked", rep.covers_checked);
    if let Some(c) = &rep.counterexample {
        let site = p.site();
        let family: Vec<String> =
            c.cover.iter().zip(&c.family).map(|(&u, &a)| format!("{}: {}", site.name(u), p.label(u, a))).collect();
        r.set(
            "witness",
            json!({
                "target": site.name(c.target),
                "cover": c.cover.iter().map(|&u| site.name(u)).collect::<Vec<_>>(),
                "family": family,
                "amalgamations": c.amalgamations,
            }),
        );
    }
    r.fail_unless(rep.is_sheaf);
    Ok(r)
}

pub fn sheafify(path: &Path) -> Result<Report> {
    let mut r = Report::new("sheafify");
    let p = read_presheaf(path)?;
    let (s, eta) = sheaf::sheafify(&p);
    let is_sheaf = s.is_sheaf();
    r.set("input_sizes", sizes(&p))
        .set("output_sizes", sizes(&s))
        .set("input_was_sheaf", eta.is_iso(&p, &s))
        .set("output_is_sheaf", is_sheaf)
        .set("sheaf", io::presheaf_to_doc(&s));
    r.fail_unless(is_sheaf);
    Ok(r)
}

pub fn stalk(path: &Path, point: &str) -> Result<Report> {
    let mut r = Report::new("stalk");
    let p = read_presheaf(path)?;
    let site = p.site();
    let x = site.base().space().index_of(point).map_err(IoError::from)?;
    let st = sheaf::stalk(&p, x);
    let colim = sheaf::stalk_colimit(&p, x);
    r.set("point", point)
        .set("minimal_open", site.name(site.min_open(x)))
        .set("size", st.len())
        .set("germs", &st.carrier)
        .set("colimit_classes", colim.classes);
    r.fail_unless(colim.classes == st.len());
    Ok(r)
}

pub fn etale_roundtrip(path: &Path) -> Result<Report> {
    let mut r = Report::new("etale-roundtrip");
    let b = io::bundle_from_doc(&read_doc(path)?)?;
    let site = Arc::new(OpenSite::new(b.base.clone())?);
    if let Err(w) = etale::is_etale(&b) {
        r.set("etale", false).set("not_locally_iso_at", b.total.space().name(w));
        r.fail_unless(false);
        return Ok(r);
    }
    let gamma = etale::sections(site.clone(), &b)?;
    let top = site.top();
    let rt = etale::roundtrip(site.clone(), &b)?;
    r.set("etale", true)
        .set("sections", format!("|Γ({})| = {}", site.name(top), gamma.presheaf.size(top)))
        .set("section_sizes", sizes(&gamma.presheaf))
        .set("sections_form_sheaf", gamma.presheaf.is_sheaf())
        .set("counit_dimap", rt.epsilon_dimap)
        .set("inverse_dimap", rt.theta_dimap)
        .set("mutually_inverse", rt.mutually_inverse)
        .set("unit_iso", rt.eta_iso);
    r.fail_unless(rt.ok());
    Ok(r)
}

pub fn default_truncation() -> Result<usize> {
    match std::env::var("GEOCONC_TRUNCATE") {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("GEOCONC_TRUNCATE must be a level, got `{v}`"))),
        Err(_) => Ok(3),
    }
}

pub fn cech_nerve(path: &Path, truncate: Option<usize>) -> Result<Report> {
    let mut r = Report::new("cech-nerve");
    let d = match truncate {
        Some(d) => d,
        None => default_truncation()?,
    };
    let (site, target, cover) = io::cover_from_doc(&read_doc(path)?)?;
    let nerve = simplicial::cech_nerve(site.clone(), target, &cover, d)?;
    let members: Vec<String> = cover.iter().enumerate().map(|(i, &u)| format!("{i}: {}", site.name(u))).collect();
    r.set("target", site.name(target)).set("cover", members).set("truncation", d);
    let mut identities = true;
    for u in site.subopens(target) {
        identities &= nerve.nerve.at(u).check_identities().is_ok();
    }
    let mut levels = serde_json::Map::new();
    for n in 0..=d {
        let mut table = serde_json::Map::new();
        for v in site.subopens(target) {
            let level = &nerve.nerve.at(v).labels[n];
            table.insert(site.name(v), json!(format!("{} {}", level.len(), level.join(" ")).trim_end()));
        }
        levels.insert(format!("level {n}"), serde_json::Value::Object(table));
    }
    let law = nerve.summand_law_holds();
    r.set("levels", levels).set("simplicial_identities", identities).set("comparison_triangles", law);
    r.fail_unless(identities && law);
    Ok(r)
}

pub fn stalkwise_equiv(path: &Path, ambient: &[std::path::PathBuf]) -> Result<Report> {
    let mut r = Report::new("stalkwise-equiv");
    let (x, y, phi) = io::dimap_from_doc(&read_doc(path)?)?;
    if !check_dimap(&x, &y, &phi)? {
        return Err(CliError::Usage("the map is not a dimap".into()));
    }
    let ambient: Vec<LocalPoSpace> =
        if ambient.is_empty() { vec![x.clone(), y.clone()] } else { ambient.iter().map(|p| read_lps(p)).collect::<Result<_>>()? };
    let rep = simplicial::verify_iso_theorem(&x, &y, &phi, &ambient)?;
    r.set("ambient_spaces", ambient.len()).set("stalkwise_equivalence", rep.stalkwise).set("iso", rep.iso);
    if let Some(psi) = &rep.inverse {
        r.set("glued_inverse", io::point_map_to_doc(y.space(), x.space(), psi));
    }
    if let Some(f) = &rep.failure {
        r.set(
            "witness",
            json!({"ambient": f.ambient, "point": f.point, "source_homs": f.source, "target_homs": f.target}),
        );
    }
    r.fail_unless(rep.stalkwise);
    Ok(r)
}

fn chain_doc(links: &[Link], target: &FinSpace) -> Vec<String> {
    links
        .iter()
        .map(|l| {
            let arrow = if l.forward { "=>" } else { "<=" };
            format!("[{}] {arrow} [{}] (interval length {})", names(target, &l.from).join(","), names(target, &l.to).join(","), l.h.steps())
        })
        .collect()
}

pub fn dihomotopy_equiv(
    source: &Path,
    target: &Path,
    context: Option<&Path>,
    n_max: usize,
    map: Option<&Path>,
    cap: usize,
) -> Result<Report> {
    let mut r = Report::new("dihomotopy-equiv");
    let (m, n) = (read_lps(source)?, read_lps(target)?);
    let (cm, cn) = match context {
        None => (ContextedSpace::bare(m), ContextedSpace::bare(n)),
        Some(p) => {
            let (a, into_m, into_n) = io::context_from_doc(&read_doc(p)?, &m, &n)?;
            (ContextedSpace::new(a.clone(), m, into_m)?, ContextedSpace::new(a, n, into_n)?)
        }
    };
    let (ms, ns) = (cm.space.space().clone(), cn.space.space().clone());
    r.set("context_points", cm.context.len()).set("nmax", n_max);
    let candidates: Vec<Vec<usize>> = match map {
        Some(p) => vec![io::point_map_from_doc(&ms, &ns, &read_doc(p)?)?],
        None => match dihomotopy::anchored_homs(&cm, &cn, cap) {
            Some(h) => h,
            None => return Ok(unknown(r)),
        },
    };
    let search = if n_max == 0 { None } else { EquivalenceSearch::new(&cm, &cn, cap) };
    if n_max > 0 && search.is_none() {
        return Ok(unknown(r));
    }
    let mut found: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for f in &candidates {
        let g = match &search {
            Some(s) if dihomotopy::is_anchored(&cm, &cn, f) => s.inverse_of(f),
            Some(_) => None,
            None => match dihomotopy::is_dihomotopy_equivalence(f, &cm, &cn, 0, cap) {
                Verdict::Yes(g) => Some(g),
                _ => None,
            },
        };
        if let Some(g) = g {
            found.push((f.clone(), g));
        }
    }
    r.set("candidates", candidates.len()).set("equivalences", found.len());
    match found.first() {
        Some((f, g)) => {
            let id_m = cm.identity();
            let id_n = cn.identity();
            let back = dihomotopy::dihomotopic(&compose(f, g), &id_m, &cm, &cm, n_max, cap);
            let forth = dihomotopy::dihomotopic(&compose(g, f), &id_n, &cn, &cn, n_max, cap);
            r.set("verdict", "yes").set("map", io::point_map_to_doc(&ms, &ns, f)).set("inverse", io::point_map_to_doc(&ns, &ms, g));
            if let Verdict::Yes(c) = back {
                r.set("chain_inverse_after_map", chain_doc(&c, &ms));
            }
            if let Verdict::Yes(c) = forth {
                r.set("chain_map_after_inverse", chain_doc(&c, &ns));
            }
        }
        None => {
            r.set("verdict", "no");
            r.fail_unless(false);
        }
    }
    Ok(r)
}

fn unknown(mut r: Report) -> Report {
    r.set("verdict", "unknown").set("reason", "a hom-set exceeds the cap");
    r.fail_unless(false);
    r
}

pub fn pv_build(path: &Path, granularity: usize, length: Option<usize>, cap: usize, emit: Option<&Path>) -> Result<Report> {
    if granularity == 0 {
        return Err(CliError::Usage("granularity must be at least 1".into()));
    }
    let mut r = Report::new("pv-build");
    let prog = pv::parse_pv(&read_text(path)?)?;
    let model = pv::build_model(&prog, granularity)?;
    let s = model.space.space();
    let procs: Vec<&str> = prog.processes.iter().map(|(n, _)| n.as_str()).collect();
    r.set("processes", procs)
        .set("granularity", granularity)
        .set("dims", model.dims())
        .set("product_points", model.dims().iter().product::<usize>())
        .set("allowed_points", model.space.len())
        .set("forbidden_points", model.forbidden.len())
        .set("initial", s.name(model.initial))
        .set("terminal", model.terminal.map(|t| s.name(t).to_string()))
        .set("global_orders", global_order_count(&model.space));
    if let Some(p) = emit {
        std::fs::write(p, io::to_json(&io::lps_to_doc(&model.space)))
            .map_err(|source| CliError::Write { path: p.display().to_string(), source })?;
    }
    if model.terminal.is_none() {
        r.set("dipaths", "terminal state is forbidden");
        return Ok(r);
    }
    let shortest = pv::shortest_dipath(&model, model.space.len());
    r.set("shortest_dipath", shortest);
    let Some(shortest) = shortest else {
        return Ok(r);
    };
    let l = length.unwrap_or(shortest + 1);
    match pv::dipath_classes(&model, l, cap) {
        Some((paths, classes)) => {
            r.set("length", l).set("dipaths", paths).set("dipath_classes", classes);
        }
        None => {
            r.set("length", l).set("dipath_classes", "unknown: dipath count exceeds the cap");
        }
    }
    Ok(r)
}
