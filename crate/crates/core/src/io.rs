//! JSON interchange documents.
//!
//! Opens are written as `{a,b}` using point names. Product points have names
//! like `(a,b)`, so set names are split only at top-level commas.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dispace::{canonicalize, Chart, DispaceError, LocalPoSpace, OrderAtlas};
use crate::etale::{Bundle, EtaleError};
use crate::finspace::{set_from, FinSpace, PointSet, SpaceError};
use crate::order::Relation;
use crate::sheaf::{Presheaf, PresheafMap, SheafError};
use crate::site::{OpenSite, SiteError};

/// Spaces with more opens than this are written with a `basis` instead.
pub const OPENS_WRITE_LIMIT: usize = 256;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Dispace(#[from] DispaceError),
    #[error(transparent)]
    Site(#[from] SiteError),
    #[error(transparent)]
    Sheaf(#[from] SheafError),
    #[error(transparent)]
    Etale(#[from] EtaleError),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("{0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, IoError>;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GermDoc {
    pub point: String,
    pub order: Vec<[String; 2]>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartDoc {
    pub carrier: Vec<String>,
    pub order: Vec<[String; 2]>,
}

/// A space, optionally with germs or an atlas.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceDoc {
    pub points: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opens: Option<Vec<Vec<String>>>,
    /// Minimal open of each point, for spaces with many opens.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub germs: Option<Vec<GermDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charts: Option<Vec<ChartDoc>>,
}

pub type PointMapDoc = BTreeMap<String, String>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictionDoc {
    pub from: String,
    pub to: String,
    pub map: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresheafDoc {
    pub base: SpaceDoc,
    pub values: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub restrictions: Vec<RestrictionDoc>,
}

pub type MorphismDoc = BTreeMap<String, BTreeMap<String, String>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleDoc {
    pub total: SpaceDoc,
    pub base: SpaceDoc,
    pub map: PointMapDoc,
}

/// A point map between two spaces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimapDoc {
    pub source: SpaceDoc,
    pub target: SpaceDoc,
    pub map: PointMapDoc,
}

/// A context space with its maps into a source and a target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextDoc {
    pub space: SpaceDoc,
    pub into_source: PointMapDoc,
    pub into_target: PointMapDoc,
}

/// A family of opens covering `target` (the whole space when omitted).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverDoc {
    pub space: SpaceDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    pub cover: Vec<String>,
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    serde_json::to_string_pretty(doc).expect("documents serialize")
}

/// Splits `{a,(b,c)}` into `a` and `(b,c)`.
pub fn parse_set_name(s: &str) -> Result<Vec<String>> {
    let inner = s
        .trim()
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| IoError::Malformed(format!("expected a set like {{a,b}}, got `{s}`")))?;
    let mut out = Vec::new();
    let (mut depth, mut cur) = (0i32, String::new());
    for c in inner.chars() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            _ => {}
        }
        if c == ',' && depth == 0 {
            out.push(cur.trim().to_string());
            cur.clear();
        } else {
            cur.push(c);
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    Ok(out)
}

fn index(space: &FinSpace, name: &str) -> Result<usize> {
    space.index_of(name).map_err(|_| IoError::UnknownName(name.to_string()))
}

fn relation(space: &FinSpace, carrier: &PointSet, pairs: &[[String; 2]]) -> Result<Relation> {
    let n = space.len();
    let mut r = Relation::empty(n);
    for x in carrier.ones() {
        r.set(x, x);
    }
    for [a, b] in pairs {
        r.set(index(space, a)?, index(space, b)?);
    }
    r.close();
    Ok(r)
}

pub fn space_from_doc(doc: &SpaceDoc) -> Result<FinSpace> {
    match (&doc.opens, &doc.basis) {
        (Some(opens), None) => Ok(FinSpace::validate(&doc.points, opens)?),
        (None, Some(basis)) => {
            let names = doc.points.clone();
            let probe = FinSpace::discrete(&names);
            let mos = names
                .iter()
                .map(|p| {
                    let members = basis.get(p).ok_or_else(|| IoError::Malformed(format!("no basis entry for `{p}`")))?;
                    let idx: Vec<usize> = members.iter().map(|m| index(&probe, m)).collect::<Result<_>>()?;
                    Ok(set_from(names.len(), idx))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(FinSpace::from_min_opens(names, mos)?)
        }
        (Some(_), Some(_)) => Err(IoError::Malformed("give either `opens` or `basis`, not both".into())),
        (None, None) => Err(IoError::Malformed("missing `opens`".into())),
    }
}

/// Reads a local po-space; an atlas given as `charts` is canonicalized and
/// points without a germ entry get the equality order.
pub fn lps_from_doc(doc: &SpaceDoc) -> Result<LocalPoSpace> {
    let space = space_from_doc(doc)?;
    match (&doc.germs, &doc.charts) {
        (Some(_), Some(_)) => Err(IoError::Malformed("give either `germs` or `charts`, not both".into())),
        (_, Some(charts)) => Ok(canonicalize(&charts_to_atlas(space, charts)?)),
        (germs, None) => {
            let mut rels: Vec<Option<Relation>> = vec![None; space.len()];
            for g in germs.iter().flatten() {
                let x = index(&space, &g.point)?;
                rels[x] = Some(relation(&space, space.min_open(x), &g.order)?);
            }
            let rels = rels
                .into_iter()
                .enumerate()
                .map(|(x, r)| r.unwrap_or_else(|| relation(&space, space.min_open(x), &[]).expect("no names")))
                .collect();
            Ok(LocalPoSpace::from_germs(space, rels)?)
        }
    }
}

fn charts_to_atlas(space: FinSpace, charts: &[ChartDoc]) -> Result<OrderAtlas> {
    let charts = charts
        .iter()
        .map(|c| {
            let idx: Vec<usize> = c.carrier.iter().map(|m| index(&space, m)).collect::<Result<_>>()?;
            let carrier = set_from(space.len(), idx);
            let order = relation(&space, &carrier, &c.order)?;
            Ok(Chart::new(carrier, order))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OrderAtlas::new(space, charts)?)
}

/// The atlas as written: the given charts, or the germ charts of the germ form.
pub fn atlas_from_doc(doc: &SpaceDoc) -> Result<OrderAtlas> {
    match (&doc.germs, &doc.charts) {
        (None, Some(charts)) => charts_to_atlas(space_from_doc(doc)?, charts),
        _ => Ok(lps_from_doc(doc)?.atlas()),
    }
}

pub fn space_to_doc(space: &FinSpace) -> SpaceDoc {
    let points = space.names().to_vec();
    match space.opens_bounded(OPENS_WRITE_LIMIT) {
        Ok(opens) => SpaceDoc { points, opens: Some(opens.iter().map(|o| space.set_names(o)).collect()), ..Default::default() },
        Err(_) => SpaceDoc {
            basis: Some(
                (0..space.len()).map(|x| (space.name(x).to_string(), space.set_names(space.min_open(x)))).collect(),
            ),
            points,
            ..Default::default()
        },
    }
}

/// Writes the canonical germ form; equality germs are omitted.
pub fn lps_to_doc(m: &LocalPoSpace) -> SpaceDoc {
    let s = m.space();
    let germs: Vec<GermDoc> = (0..m.len())
        .filter_map(|x| {
            let order: Vec<[String; 2]> =
                m.germ(x).strict_pairs().into_iter().map(|(a, b)| [s.name(a).to_string(), s.name(b).to_string()]).collect();
            (!order.is_empty()).then(|| GermDoc { point: s.name(x).to_string(), order })
        })
        .collect();
    SpaceDoc { germs: (!germs.is_empty()).then_some(germs), ..space_to_doc(s) }
}

pub fn point_map_from_doc(source: &FinSpace, target: &FinSpace, doc: &PointMapDoc) -> Result<Vec<usize>> {
    if let Some(extra) = doc.keys().find(|k| source.index_of(k).is_err()) {
        return Err(IoError::UnknownName(extra.clone()));
    }
    (0..source.len())
        .map(|x| {
            let y = doc.get(source.name(x)).ok_or_else(|| IoError::Malformed(format!("map misses `{}`", source.name(x))))?;
            index(target, y)
        })
        .collect()
}

pub fn point_map_to_doc(source: &FinSpace, target: &FinSpace, f: &[usize]) -> PointMapDoc {
    f.iter().enumerate().map(|(x, &y)| (source.name(x).to_string(), target.name(y).to_string())).collect()
}

pub fn site_index(site: &OpenSite, name: &str) -> Result<usize> {
    let names = parse_set_name(name)?;
    site.index_of_names(&names).map_err(IoError::from)
}

/// Reads a presheaf. Forced restrictions may be omitted.
pub fn presheaf_from_doc(doc: &PresheafDoc) -> Result<Presheaf> {
    let base = lps_from_doc(&doc.base)?;
    let site = Arc::new(OpenSite::new(base)?);
    let mut labels: Vec<Option<Vec<String>>> = vec![None; site.len()];
    for (name, elems) in &doc.values {
        let u = site_index(&site, name)?;
        if labels[u].replace(elems.clone()).is_some() {
            return Err(IoError::Malformed(format!("open {} listed twice", site.name(u))));
        }
    }
    let labels: Vec<Vec<String>> = labels
        .into_iter()
        .enumerate()
        .map(|(u, l)| l.ok_or_else(|| IoError::Malformed(format!("no values for open {}", site.name(u)))))
        .collect::<Result<_>>()?;
    let mut given = HashMap::new();
    for r in &doc.restrictions {
        let (u, l) = (site_index(&site, &r.from)?, site_index(&site, &r.to)?);
        let lookup = |v: usize, e: &str| {
            labels[v].iter().position(|x| x == e).ok_or_else(|| IoError::UnknownName(format!("{e} in {}", site.name(v))))
        };
        let mut map = vec![usize::MAX; labels[u].len()];
        for (a, b) in &r.map {
            map[lookup(u, a)?] = lookup(l, b)?;
        }
        if map.contains(&usize::MAX) {
            return Err(IoError::Malformed(format!("restriction {} → {} is partial", r.from, r.to)));
        }
        given.insert((u, l), map);
    }
    Ok(Presheaf::from_partial(site, labels, given)?)
}

/// Writes values on every open and restrictions to maximal proper subopens;
/// the rest is recovered by composition.
pub fn presheaf_to_doc(p: &Presheaf) -> PresheafDoc {
    let site = p.site();
    let values = (0..site.len()).map(|u| (site.name(u), p.labels(u).to_vec())).collect();
    let mut restrictions = Vec::new();
    for u in 0..site.len() {
        let subs: Vec<usize> = site.subopens(u).filter(|&l| l != u).collect();
        for &l in &subs {
            let maximal = !subs.iter().any(|&m| m != l && site.contains(m, l));
            if maximal && p.size(u) > 0 {
                let map = (0..p.size(u)).map(|a| (p.label(u, a).to_string(), p.label(l, p.restrict(u, l, a)).to_string())).collect();
                restrictions.push(RestrictionDoc { from: site.name(u), to: site.name(l), map });
            }
        }
    }
    PresheafDoc { base: lps_to_doc(site.base()), values, restrictions }
}

pub fn morphism_from_doc(p: &Presheaf, q: &Presheaf, doc: &MorphismDoc) -> Result<PresheafMap> {
    let site = p.site();
    let mut components: Vec<Option<Vec<usize>>> = vec![None; site.len()];
    for (name, table) in doc {
        let u = site_index(site, name)?;
        let comp = (0..p.size(u))
            .map(|a| {
                let img = table.get(p.label(u, a)).ok_or_else(|| IoError::Malformed(format!("{name} misses {}", p.label(u, a))))?;
                q.element(u, img).ok_or_else(|| IoError::UnknownName(img.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        components[u] = Some(comp);
    }
    let components = components
        .into_iter()
        .enumerate()
        .map(|(u, c)| match c {
            Some(c) => Ok(c),
            None if p.size(u) == 0 => Ok(Vec::new()),
            None => Err(IoError::Malformed(format!("no component at {}", site.name(u)))),
        })
        .collect::<Result<Vec<_>>>()?;
    let f = PresheafMap { components };
    if !p.is_natural(q, &f) {
        return Err(IoError::Sheaf(SheafError::NotFunctorial("morphism is not natural".into())));
    }
    Ok(f)
}

pub fn morphism_to_doc(p: &Presheaf, q: &Presheaf, f: &PresheafMap) -> MorphismDoc {
    let site = p.site();
    (0..site.len())
        .map(|u| {
            let table = (0..p.size(u)).map(|a| (p.label(u, a).to_string(), q.label(u, f.components[u][a]).to_string())).collect();
            (site.name(u), table)
        })
        .collect()
}

pub fn bundle_from_doc(doc: &BundleDoc) -> Result<Bundle> {
    let total = lps_from_doc(&doc.total)?;
    let base = lps_from_doc(&doc.base)?;
    let map = point_map_from_doc(total.space(), base.space(), &doc.map)?;
    Ok(Bundle::new(total, base, map)?)
}

pub fn bundle_to_doc(b: &Bundle) -> BundleDoc {
    BundleDoc {
        total: lps_to_doc(&b.total),
        base: lps_to_doc(&b.base),
        map: point_map_to_doc(b.total.space(), b.base.space(), &b.projection),
    }
}

/// Source, target and point map; the map is not checked to be a dimap.
pub fn dimap_from_doc(doc: &DimapDoc) -> Result<(LocalPoSpace, LocalPoSpace, Vec<usize>)> {
    let source = lps_from_doc(&doc.source)?;
    let target = lps_from_doc(&doc.target)?;
    let f = point_map_from_doc(source.space(), target.space(), &doc.map)?;
    Ok((source, target, f))
}

/// The site, target open and cover members of a cover document.
pub fn cover_from_doc(doc: &CoverDoc) -> Result<(Arc<OpenSite>, usize, Vec<usize>)> {
    let site = Arc::new(OpenSite::new(lps_from_doc(&doc.space)?)?);
    let target = match &doc.target {
        Some(t) => site_index(&site, t)?,
        None => site.top(),
    };
    let cover = doc.cover.iter().map(|c| site_index(&site, c)).collect::<Result<Vec<_>>>()?;
    Ok((site, target, cover))
}

/// Anchors `A → M` and `A → N` from a context document.
pub fn context_from_doc(doc: &ContextDoc, m: &LocalPoSpace, n: &LocalPoSpace) -> Result<(LocalPoSpace, Vec<usize>, Vec<usize>)> {
    let a = lps_from_doc(&doc.space)?;
    let into_m = point_map_from_doc(a.space(), m.space(), &doc.into_source)?;
    let into_n = point_map_from_doc(a.space(), n.space(), &doc.into_target)?;
    Ok((a, into_m, into_n))
}
