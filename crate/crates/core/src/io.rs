//! JSON formats for algebras, bimodules and graded structures.
//!
//! Scalars are written as strings `"p/q"` (or `"p"`); plain JSON integers are
//! accepted on input.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra_core::{
    AlgebraPresentation, Bilinear, BimodulePresentation, LinearOperator, NijenhuisAlgebra, NijenhuisBimodule,
};
use crate::brace_calculus::{suspend_alg, suspend_njo, GradedMap, GradedSpace, Shift};
use crate::exactlin::{format_rational, parse_rational, Rational};
use crate::homotopy_structures::{AInfinityOneAlgebra, AInfinityOneBimodule, HomotopyNijenhuisAlgebra, HomotopyRbOperator};
use crate::linf_deformation::DeformationElement;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("malformed input: {0}")]
    Malformed(String),
}

fn bad(s: impl Into<String>) -> IoError {
    IoError::Malformed(s.into())
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Text(String),
}

impl Scalar {
    pub fn value(&self) -> Result<Rational, IoError> {
        match self {
            Scalar::Int(i) => Ok(Rational::from_integer((*i).into())),
            Scalar::Text(s) => parse_rational(s).map_err(|e| bad(e.to_string())),
        }
    }

    pub fn of(q: &Rational) -> Self {
        Scalar::Text(format_rational(q))
    }
}

pub type Triple = (usize, usize, usize, Scalar);

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ModuleFile {
    pub dim: usize,
    /// `[i, k, l, c]`: `e_i x_k` has coefficient `c` on `x_l`
    pub left: Vec<Triple>,
    /// `[k, i, l, c]`: `x_k e_i` has coefficient `c` on `x_l`
    pub right: Vec<Triple>,
    pub operator: Vec<Vec<Scalar>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AlgebraFile {
    pub basis: Vec<String>,
    pub mult: Vec<Triple>,
    pub operator: Vec<Vec<Scalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module: Option<ModuleFile>,
}

fn triples(t: &[Triple]) -> Result<Vec<(usize, usize, usize, Rational)>, IoError> {
    t.iter().map(|(i, j, k, c)| Ok((*i, *j, *k, c.value()?))).collect()
}

fn matrix(rows: &[Vec<Scalar>], n: usize) -> Result<LinearOperator, IoError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(bad(format!("operator must be {n}x{n}")));
    }
    let rows = rows.iter().map(|r| r.iter().map(Scalar::value).collect()).collect::<Result<Vec<_>, _>>()?;
    LinearOperator::from_rows(rows).map_err(|e| bad(e.to_string()))
}

fn write_matrix(p: &LinearOperator) -> Vec<Vec<Scalar>> {
    (0..p.nrows()).map(|r| (0..p.ncols()).map(|c| Scalar::of(p.entry(r, c))).collect()).collect()
}

fn write_triples(b: &Bilinear) -> Vec<Triple> {
    b.triples().into_iter().map(|(i, j, k, c)| (i, j, k, Scalar::of(&c))).collect()
}

/// A Nijenhuis algebra and bimodule read from a file; neither is checked.
/// Without a module section the regular bimodule with `P_M = P` is used.
#[derive(Clone, Debug)]
pub struct LoadedAlgebra {
    pub algebra: NijenhuisAlgebra,
    pub module: NijenhuisBimodule,
    pub explicit_module: bool,
}

impl AlgebraFile {
    pub fn parse(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(&self) -> Result<LoadedAlgebra, IoError> {
        let d = self.basis.len();
        let mult = Bilinear::from_triples(d, d, d, &triples(&self.mult)?).map_err(|e| bad(e.to_string()))?;
        let a = AlgebraPresentation::new(self.basis.clone(), mult).map_err(|e| bad(e.to_string()))?;
        let p = matrix(&self.operator, d)?;
        let n = NijenhuisAlgebra::new_unchecked(a, p);
        let (module, explicit_module) = match &self.module {
            None => (NijenhuisBimodule::regular(&n), false),
            Some(m) => {
                let left = Bilinear::from_triples(d, m.dim, m.dim, &triples(&m.left)?).map_err(|e| bad(e.to_string()))?;
                let right =
                    Bilinear::from_triples(m.dim, d, m.dim, &triples(&m.right)?).map_err(|e| bad(e.to_string()))?;
                let bm = BimodulePresentation::new(d, left, right).map_err(|e| bad(e.to_string()))?;
                (NijenhuisBimodule { module: bm, operator: matrix(&m.operator, m.dim)? }, true)
            }
        };
        Ok(LoadedAlgebra { algebra: n, module, explicit_module })
    }

    pub fn from_structures(n: &NijenhuisAlgebra, m: Option<&NijenhuisBimodule>) -> Self {
        AlgebraFile {
            basis: n.algebra.basis.clone(),
            mult: write_triples(&n.algebra.mult),
            operator: write_matrix(&n.operator),
            module: m.map(|m| ModuleFile {
                dim: m.dim(),
                left: write_triples(&m.module.left),
                right: write_triples(&m.module.right),
                operator: write_matrix(&m.operator),
            }),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MapEntry {
    pub name: String,
    pub arity: usize,
    pub degree: i64,
    /// `"sV"` or `"V"`
    pub codomain: String,
    /// `"sV"` or `"V"`; defaults to `"sV"`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    /// `[out, in_1, ..., in_n, c]`
    pub entries: Vec<Vec<serde_json::Value>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GradedFile {
    /// degree -> dimension; basis indices run over ascending degrees
    pub degrees: BTreeMap<String, usize>,
    pub maps: Vec<MapEntry>,
}

fn shift(s: &str) -> Result<Shift, IoError> {
    match s {
        "sV" => Ok(Shift::SV),
        "V" => Ok(Shift::V),
        other => Err(bad(format!("unknown space {other:?}, expected \"sV\" or \"V\""))),
    }
}

fn shift_name(s: Shift) -> String {
    match s {
        Shift::SV => "sV".into(),
        Shift::V => "V".into(),
    }
}

impl GradedFile {
    pub fn parse(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn space(&self) -> Result<GradedSpace, IoError> {
        let mut counts = BTreeMap::new();
        for (k, &v) in &self.degrees {
            let d: i64 = k.trim().parse().map_err(|_| bad(format!("degree key {k:?}")))?;
            counts.insert(d, v);
        }
        Ok(GradedSpace::from_counts(&counts))
    }

    pub fn maps(&self) -> Result<Vec<(String, GradedMap)>, IoError> {
        self.maps_on(&self.space()?)
    }

    /// The maps with indices read against `space` instead of `degrees`.
    pub fn maps_on(&self, space: &GradedSpace) -> Result<Vec<(String, GradedMap)>, IoError> {
        let mut out = Vec::new();
        for m in &self.maps {
            let domain = shift(m.domain.as_deref().unwrap_or("sV"))?;
            let mut g = GradedMap::zero(space, m.arity, m.degree, domain, shift(&m.codomain)?);
            for e in &m.entries {
                if e.len() != m.arity + 2 {
                    return Err(bad(format!("{}: entry {e:?} needs {} fields", m.name, m.arity + 2)));
                }
                let idx = |v: &serde_json::Value| {
                    v.as_u64().map(|x| x as usize).ok_or_else(|| bad(format!("{}: index {v}", m.name)))
                };
                let out_i = idx(&e[0])?;
                let inputs = e[1..=m.arity].iter().map(idx).collect::<Result<Vec<_>, _>>()?;
                let c: Scalar = serde_json::from_value(e[m.arity + 1].clone())?;
                if out_i >= space.dim() || inputs.iter().any(|&i| i >= space.dim()) {
                    return Err(bad(format!("{}: index out of range in {e:?}", m.name)));
                }
                g.add_entry(&inputs, out_i, c.value()?).map_err(|x| bad(format!("{}: {x}", m.name)))?;
            }
            out.push((m.name.clone(), g));
        }
        Ok(out)
    }

    /// Writes the maps with the basis reordered by ascending degree, the
    /// order in which files are read back.
    pub fn from_maps(space: &GradedSpace, maps: &[(String, &GradedMap)]) -> Self {
        let mut order: Vec<usize> = (0..space.dim()).collect();
        order.sort_by_key(|&i| space.degree(i));
        let mut new_index = vec![0; space.dim()];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        let mut degrees = BTreeMap::new();
        for &d in space.degrees() {
            *degrees.entry(d.to_string()).or_insert(0) += 1;
        }
        let maps = maps
            .iter()
            .map(|(name, g)| {
                let mut entries: Vec<Vec<serde_json::Value>> = g
                    .entries()
                    .map(|(i, o, c)| {
                        let mut row = vec![serde_json::Value::from(new_index[o])];
                        row.extend(i.iter().map(|&x| serde_json::Value::from(new_index[x])));
                        row.push(serde_json::Value::String(format_rational(c)));
                        row
                    })
                    .collect();
                entries.sort_by_key(|r| r[..r.len() - 1].iter().map(|v| v.as_u64()).collect::<Vec<_>>());
                MapEntry {
                    name: name.clone(),
                    arity: g.arity(),
                    degree: g.degree(),
                    codomain: shift_name(g.codomain()),
                    domain: Some(shift_name(g.domain())),
                    entries,
                }
            })
            .collect();
        GradedFile { degrees, maps }
    }

    /// Reads `b`/`R` maps on `sV` or `m`/`P` maps on `V` (suspended on the way).
    pub fn deformation(&self) -> Result<DeformationElement, IoError> {
        let space = self.space()?;
        let mut e = DeformationElement::new(&space);
        for (name, g) in self.maps()? {
            let n = g.arity();
            match (g.domain(), g.codomain()) {
                (Shift::SV, Shift::SV) => {
                    e.b.insert(n, g);
                }
                (Shift::SV, Shift::V) => {
                    e.r.insert(n, g);
                }
                (Shift::V, Shift::V) if name.starts_with('m') => {
                    e.b.insert(n, suspend_alg(&g).map_err(|x| bad(x.to_string()))?);
                }
                (Shift::V, Shift::V) if name.starts_with('P') => {
                    e.r.insert(n, suspend_njo(&g).map_err(|x| bad(x.to_string()))?);
                }
                _ => return Err(bad(format!("{name}: cannot place a map with this domain and codomain"))),
            }
        }
        Ok(e)
    }

    pub fn homotopy_nijenhuis(&self) -> Result<HomotopyNijenhuisAlgebra, IoError> {
        HomotopyNijenhuisAlgebra::from_deformation(&self.deformation()?).map_err(|x| bad(x.to_string()))
    }

    pub fn from_homotopy_nijenhuis(h: &HomotopyNijenhuisAlgebra) -> Self {
        let mut maps: Vec<(String, &GradedMap)> = Vec::new();
        for (n, m) in &h.m {
            maps.push((format!("m{n}"), m));
        }
        for (n, p) in &h.p {
            maps.push((format!("P{n}"), p));
        }
        Self::from_maps(&h.space, &maps)
    }
}

/// `A`-file: operations `m<k>` of degree -1 on `sA`.
pub fn load_ainf1(f: &GradedFile) -> Result<AInfinityOneAlgebra, IoError> {
    let mut a = AInfinityOneAlgebra::new(&f.space()?);
    for (_, g) in f.maps()? {
        a.set(g).map_err(|x| bad(x.to_string()))?;
    }
    Ok(a)
}

/// `M`-file: `degrees` are those of `M`; the entries of `rho<k>` index
/// `A ⊕ M` with the `A` basis first.
pub fn load_ainf1_bimodule(a: &AInfinityOneAlgebra, f: &GradedFile) -> Result<AInfinityOneBimodule, IoError> {
    let mut m = AInfinityOneBimodule::new(a, &f.space()?);
    let total = m.total.clone();
    for (_, g) in f.maps_on(&total)? {
        m.set(g).map_err(|x| bad(x.to_string()))?;
    }
    Ok(m)
}

/// `B`-file: maps `B<k>` from `sM` to `A`, indices in `A ⊕ M`.
pub fn load_rb_operator(m: &AInfinityOneBimodule, f: &GradedFile) -> Result<HomotopyRbOperator, IoError> {
    let mut b = HomotopyRbOperator::zero();
    for (_, g) in f.maps_on(&m.total)? {
        b.set(m, g).map_err(|x| bad(x.to_string()))?;
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebra_round_trip() {
        let text = r#"{"basis": ["1", "x"], "mult": [[0,0,0,"1"],[0,1,1,"1"],[1,0,1,1]],
                       "operator": [["1","0"],["1/2","1"]]}"#;
        let f = AlgebraFile::parse(text).unwrap();
        let l = f.load().unwrap();
        assert!(!l.explicit_module);
        let back = AlgebraFile::from_structures(&l.algebra, None);
        assert_eq!(back.load().unwrap().algebra, l.algebra);
        assert_eq!(back.operator[1][0], Scalar::Text("1/2".into()));
    }

    #[test]
    fn graded_round_trip() {
        let text = r#"{"degrees": {"0": 2, "1": 1},
            "maps": [{"name": "m1", "arity": 1, "degree": -1, "codomain": "V", "domain": "V", "entries": [[1, 2, "1"]]}]}"#;
        let f = GradedFile::parse(text).unwrap();
        let h = f.homotopy_nijenhuis().unwrap();
        assert_eq!(h.m[&1].nnz(), 1);
        let back = GradedFile::from_homotopy_nijenhuis(&h);
        assert_eq!(back.homotopy_nijenhuis().unwrap(), h);
    }

    #[test]
    fn unsorted_space_is_written_in_degree_order() {
        let sp = GradedSpace::new(vec![0, -1, 0]);
        let mut g = GradedMap::zero(&sp, 1, -1, Shift::V, Shift::V);
        g.add_entry(&[2], 1, Rational::from_integer(3.into())).unwrap();
        let f = GradedFile::from_maps(&sp, &[("m1".into(), &g)]);
        let back = f.maps().unwrap();
        // index 1 (degree -1) becomes 0; index 2 stays 2
        assert_eq!(back[0].1.get(&[2], 0), Rational::from_integer(3.into()));
    }

    #[test]
    fn rejects_bad_degree() {
        let text = r#"{"degrees": {"0": 2}, "maps": [{"name": "b2", "arity": 2, "degree": -1, "codomain": "sV",
            "entries": [[0, 0, 0, "1"]]}]}"#;
        // sV has everything in degree 1: output 1 - inputs 2 = -1, accepted
        assert!(GradedFile::parse(text).unwrap().maps().is_ok());
        let text = text.replace("\"degree\": -1", "\"degree\": 0");
        assert!(GradedFile::parse(&text).unwrap().maps().is_err());
    }
}
