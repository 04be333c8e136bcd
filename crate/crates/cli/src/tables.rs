//! Table exports shared by the JSON and CSV writers. Each table is built
//! once as a serializable value; the CSV form is a flattening of the same
//! rows, so both carry identical numbers.

use cobord_core::dual::PolyTerm;
use cobord_core::fgl::{log_pair, universal_fgl};
use cobord_core::hopf::{structure_constants, StructureConstantRow};
use cobord_core::lattice::{LambdaLattice, Membership};
use cobord_core::series::vars;
use cobord_core::{DualElement, Result, Series};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct FglExport {
    pub truncation: u32,
    pub entries: Vec<FglEntry>,
}

#[derive(Debug, Serialize)]
pub struct FglEntry {
    pub i: u32,
    pub j: u32,
    pub poly: Vec<PolyTerm>,
    /// Integer coordinates in products of the `α_ij`, when the entry lies in `Λ`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<LambdaCoordinate>>,
}

#[derive(Debug, Serialize)]
pub struct LambdaCoordinate {
    pub alpha: Vec<[u32; 2]>,
    pub coef: String,
}

pub fn fgl(max_weight: u32) -> Result<FglExport> {
    let table = universal_fgl(max_weight)?;
    let lattice = LambdaLattice::from_table(&table, max_weight)?;
    let mut entries = Vec::new();
    for e in table.to_json().entries {
        let d = DualElement::from_poly_terms(&e.poly)?;
        let lambda = match lattice.membership(&d)? {
            Membership::Member { coordinates } => Some(
                coordinates
                    .into_iter()
                    .map(|(g, c)| LambdaCoordinate {
                        alpha: g.into_iter().map(|(a, b)| [a, b]).collect(),
                        coef: c.to_string(),
                    })
                    .collect(),
            ),
            Membership::NotMember { .. } => None,
        };
        entries.push(FglEntry { i: e.i, j: e.j, poly: e.poly, lambda });
    }
    Ok(FglExport { truncation: max_weight, entries })
}

pub fn fgl_csv(t: &FglExport) -> Vec<[String; 5]> {
    let mut rows = Vec::new();
    for e in &t.entries {
        for p in &e.poly {
            rows.push([e.i.to_string(), e.j.to_string(), "poly".into(), p.mono.to_string(), p.coef.clone()]);
        }
        for l in e.lambda.iter().flatten() {
            let key = l.alpha.iter().map(|[a, b]| format!("a{a}{b}")).collect::<Vec<_>>().join("*");
            rows.push([e.i.to_string(), e.j.to_string(), "lambda".into(), key, l.coef.clone()]);
        }
    }
    rows
}

pub const FGL_HEADER: [&str; 5] = ["i", "j", "section", "key", "coef"];

#[derive(Debug, Serialize)]
pub struct LogExport {
    pub truncation: u32,
    /// Row `k` is the coefficient of `t^(k+1)`.
    pub log: Vec<SeriesRow>,
    pub exp: Vec<SeriesRow>,
    /// `exp(log t) = t` through the exported degree.
    pub round_trip: bool,
}

#[derive(Debug, Serialize)]
pub struct SeriesRow {
    pub k: u32,
    pub poly: Vec<PolyTerm>,
}

fn rows(s: &Series<DualElement>, max_weight: u32) -> Vec<SeriesRow> {
    (0..=max_weight).map(|k| SeriesRow { k, poly: s.coeff(&[k + 1]).to_poly_terms() }).collect()
}

pub fn log(max_weight: u32) -> Result<LogExport> {
    let lp = log_pair(max_weight)?;
    let t = max_weight + 1;
    let x = Series::var(&vars(&["x"]), t, 0);
    let exp = lp.exp.renamed(&vars(&["x"]))?;
    let round_trip = exp.compose(&[lp.log.truncate(t)])?.eq_through(&x, t);
    Ok(LogExport { truncation: max_weight, log: rows(&lp.log, max_weight), exp: rows(&exp, max_weight), round_trip })
}

pub const LOG_HEADER: [&str; 4] = ["series", "k", "mono", "coef"];

pub fn log_csv(t: &LogExport) -> Vec<[String; 4]> {
    let mut out = Vec::new();
    for (name, rows) in [("log", &t.log), ("exp", &t.exp)] {
        for r in rows {
            for p in &r.poly {
                out.push([name.to_string(), r.k.to_string(), p.mono.to_string(), p.coef.clone()]);
            }
        }
    }
    out
}

#[derive(Debug, Serialize)]
pub struct StructureExport {
    pub max_weight: u32,
    pub rows: Vec<StructureConstantRow>,
}

pub fn structure(max_weight: u32) -> Result<StructureExport> {
    Ok(StructureExport { max_weight, rows: structure_constants(max_weight)? })
}

pub const STRUCTURE_HEADER: [&str; 4] = ["a", "b", "w", "coef"];

pub fn structure_csv(t: &StructureExport) -> Vec<[String; 4]> {
    let mut out = Vec::new();
    for r in &t.rows {
        for p in &r.product {
            out.push([r.a.to_string(), r.b.to_string(), p.w.to_string(), p.coef.clone()]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use cobord_core::{Coeff, MultiIndex};

    #[test]
    fn fgl_weight_one_has_alpha_11() {
        let t = fgl(1).unwrap();
        assert_eq!(t.entries.len(), 1);
        let e = &t.entries[0];
        assert_eq!((e.i, e.j), (1, 1));
        assert_eq!(e.poly.len(), 1);
        assert_eq!(e.poly[0].mono, MultiIndex::single(1));
        assert_eq!(e.poly[0].coef, "2");
        let coords = e.lambda.as_ref().unwrap();
        assert_eq!(coords.len(), 1);
        assert_eq!(coords[0].alpha, vec![[1, 1]]);
        assert_eq!(coords[0].coef, "1");
    }

    #[test]
    fn log_rows() {
        let t = log(3).unwrap();
        assert!(t.round_trip);
        assert_eq!(t.exp[1].poly, DualElement::generator(1).to_poly_terms());
        let s1 = DualElement::generator(1);
        let expect = &s1.pow(2).scale(&cobord_core::rational::q(2)) - &DualElement::generator(2);
        assert_eq!(t.log[2].poly, expect.to_poly_terms());
    }
}
