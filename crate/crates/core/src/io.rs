//! File formats and the compact specs accepted on the command line.
//!
//! Groups: `cyclic:N`, `free:K,R`, or a JSON file
//! `{"kind":"table"|"cyclic"|"free-ball", ...}`.
//! Lengths: `word` (generator 1), `word:1,3`, `csv:(0,1,3,1)`, or a CSV file
//! of `element_index,psi_value` rows.

use crate::algebra::AlgebraElement;
use crate::branches::Branch;
use crate::cocycles::LengthFunction;
use crate::euclidean::{Domain, GridFunction, GridSpec};
use crate::groups::{parse_word, word_length, FiniteGroup, FreeGroupBall, Group, GroupRef};
use crate::{Complex64, Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GroupFile {
    Table {
        order: usize,
        table: Vec<Vec<usize>>,
        #[serde(default)]
        labels: Option<Vec<String>>,
    },
    Cyclic {
        n: usize,
    },
    FreeBall {
        k: usize,
        radius: usize,
    },
}

impl GroupFile {
    pub fn build(&self) -> Result<GroupRef> {
        let g = match self {
            GroupFile::Table { order, table, labels } => {
                if table.len() != *order {
                    return Err(Error::InvalidGroup(format!("order {order} but {} table rows", table.len())));
                }
                Group::Finite(FiniteGroup::from_table(table.clone(), labels.clone())?)
            }
            GroupFile::Cyclic { n } => Group::Finite(FiniteGroup::cyclic(*n)?),
            GroupFile::FreeBall { k, radius } => Group::FreeBall(FreeGroupBall::new(*k, *radius)?),
        };
        Ok(g.into_ref())
    }
}

fn parse_usizes(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| Error::Invalid(format!("expected an integer, got {t:?}"))))
        .collect()
}

/// `cyclic:N`, `free:K,R`, or a path to a group JSON file.
pub fn parse_group_spec(spec: &str) -> Result<GroupFile> {
    if let Some(rest) = spec.strip_prefix("cyclic:") {
        let v = parse_usizes(rest)?;
        return match v[..] {
            [n] => Ok(GroupFile::Cyclic { n }),
            _ => Err(Error::Invalid(format!("bad cyclic spec {spec:?}"))),
        };
    }
    if let Some(rest) = spec.strip_prefix("free:") {
        let v = parse_usizes(rest)?;
        return match v[..] {
            [k, radius] => Ok(GroupFile::FreeBall { k, radius }),
            _ => Err(Error::Invalid(format!("bad free-ball spec {spec:?}, expected free:K,R"))),
        };
    }
    let text = std::fs::read_to_string(spec)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn load_group(spec: &str) -> Result<GroupRef> {
    parse_group_spec(spec)?.build()
}

/// Reads `element_index,psi_value` rows; a header line is allowed.
pub fn read_length_csv(path: &Path, group: &GroupRef) -> Result<LengthFunction> {
    let text = std::fs::read_to_string(path)?;
    let mut values = vec![f64::NAN; group.order()];
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != 2 {
            return Err(Error::Invalid(format!("line {}: expected index,value", line + 1)));
        }
        let Ok(idx) = rec[0].parse::<usize>() else {
            if line == 0 {
                continue;
            }
            return Err(Error::Invalid(format!("line {}: bad index {:?}", line + 1, &rec[0])));
        };
        let v: f64 = rec[1].parse().map_err(|_| Error::Invalid(format!("line {}: bad value {:?}", line + 1, &rec[1])))?;
        if idx >= values.len() {
            return Err(Error::Invalid(format!("line {}: index {idx} outside the group", line + 1)));
        }
        values[idx] = v;
    }
    if let Some(g) = values.iter().position(|v| v.is_nan()) {
        return Err(Error::InvalidLength(format!("no value for element {g}")));
    }
    LengthFunction::new(group.clone(), values, &path.display().to_string())
}

/// `word`, `word:1,3`, `csv:(0,1,3,1)` or a CSV path.
pub fn parse_length_spec(spec: &str, group: &GroupRef) -> Result<LengthFunction> {
    if spec == "word" {
        return match group.as_ref() {
            Group::FreeBall(_) => LengthFunction::free_word(group),
            Group::Finite(_) => word_length(group, &[1]),
        };
    }
    if let Some(rest) = spec.strip_prefix("word:") {
        let gens = parse_usizes(rest)?;
        let lf = word_length(group, &gens)?;
        return LengthFunction::new(group.clone(), lf.values().to_vec(), spec);
    }
    if let Some(rest) = spec.strip_prefix("csv:") {
        let inner = rest.trim().trim_start_matches('(').trim_end_matches(')');
        let values = inner
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Invalid(format!("bad length value {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        return LengthFunction::new(group.clone(), values, spec);
    }
    read_length_csv(Path::new(spec), group)
}

/// Reads `element,re,im` rows, where `element` is an index or, on a free
/// ball, a word such as `aB`. Unlisted coefficients are zero.
pub fn read_element_csv(path: &Path, group: &GroupRef) -> Result<AlgebraElement> {
    let text = std::fs::read_to_string(path)?;
    parse_element_csv(&text, group)
}

pub fn parse_element_csv(text: &str, group: &GroupRef) -> Result<AlgebraElement> {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); group.order()];
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != 3 {
            return Err(Error::Invalid(format!("line {}: expected element,re,im", line + 1)));
        }
        let (re, im) = match (rec[1].parse::<f64>(), rec[2].parse::<f64>()) {
            (Ok(a), Ok(b)) => (a, b),
            _ if line == 0 => continue,
            _ => return Err(Error::Invalid(format!("line {}: bad coefficient", line + 1))),
        };
        let idx = element_index(&rec[0], group)?;
        coeffs[idx] += Complex64::new(re, im);
    }
    AlgebraElement::from_coeffs(group, coeffs)
}

fn element_index(token: &str, group: &GroupRef) -> Result<usize> {
    if let Ok(i) = token.parse::<usize>() {
        return if i < group.order() { Ok(i) } else { Err(Error::Invalid(format!("element {i} outside the group"))) };
    }
    let ball = group.as_free()?;
    let w = if token == "e" { Vec::new() } else { parse_word(token)? };
    ball.index_of(&w).ok_or(Error::OutsideBall)
}

pub fn write_element_csv(path: &Path, f: &AlgebraElement) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["element", "re", "im"])?;
    for (g, z) in f.coeffs().iter().enumerate() {
        w.write_record([f.group().element_label(g), format!("{:.17e}", z.re), format!("{:.17e}", z.im)])?;
    }
    w.flush()?;
    Ok(())
}

/// `{"root": "ab", "depth": 3}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchSpec {
    pub root: String,
    pub depth: usize,
}

impl BranchSpec {
    pub fn build(&self, ball: &FreeGroupBall) -> Result<Branch> {
        let w = parse_word(&self.root)?;
        let root = ball.index_of(&w).ok_or(Error::OutsideBall)?;
        Branch::spine(ball, root, self.depth)
    }
}

pub fn read_branch_specs(path: &Path) -> Result<Vec<BranchSpec>> {
    let text = std::fs::read_to_string(path)?;
    let v: serde_json::Value = serde_json::from_str(&text)?;
    Ok(if v.is_array() { serde_json::from_value(v)? } else { vec![serde_json::from_value(v)?] })
}

/// Writes `x_1..x_n,re,im` rows in grid order.
pub fn write_grid_csv(path: &Path, f: &GridFunction) -> Result<()> {
    let spec = f.spec();
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = (1..=spec.n).map(|a| format!("x{a}")).collect();
    header.extend(["re".into(), "im".into()]);
    w.write_record(&header)?;
    for (i, z) in f.data().iter().enumerate() {
        let p = spec.point(i);
        let mut row: Vec<String> = p[..spec.n].iter().map(|x| format!("{x:.17e}")).collect();
        row.push(format!("{:.17e}", z.re));
        row.push(format!("{:.17e}", z.im));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a dump made by [`write_grid_csv`]; points must match `spec`.
pub fn read_grid_csv(path: &Path, spec: GridSpec, domain: Domain) -> Result<GridFunction> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_path(path)?;
    let mut data = Vec::with_capacity(spec.len());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != spec.n + 2 {
            return Err(Error::Grid(format!("row {i}: expected {} columns", spec.n + 2)));
        }
        if i >= spec.len() {
            return Err(Error::Grid("more rows than grid points".into()));
        }
        let nums = rec
            .iter()
            .map(|t| t.parse::<f64>().map_err(|_| Error::Grid(format!("row {i}: bad number {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let p = spec.point(i);
        if (0..spec.n).any(|a| (nums[a] - p[a]).abs() > 1e-9 * spec.half_width) {
            return Err(Error::Grid(format!("row {i}: point does not match the grid")));
        }
        data.push(Complex64::new(nums[spec.n], nums[spec.n + 1]));
    }
    GridFunction::from_samples(spec, domain, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn group_specs() {
        assert_eq!(parse_group_spec("cyclic:4").unwrap(), GroupFile::Cyclic { n: 4 });
        assert_eq!(parse_group_spec("free:2,3").unwrap(), GroupFile::FreeBall { k: 2, radius: 3 });
        let f: GroupFile = serde_json::from_str(r#"{"kind":"table","order":2,"table":[[0,1],[1,0]]}"#).unwrap();
        assert_eq!(f.build().unwrap().order(), 2);
        let f: GroupFile = serde_json::from_str(r#"{"kind":"free-ball","k":2,"radius":2}"#).unwrap();
        assert_eq!(f.build().unwrap().order(), 17);
        assert!(parse_group_spec("cyclic:x").is_err());
    }

    #[test]
    fn length_specs() {
        let g = load_group("cyclic:4").unwrap();
        assert_eq!(parse_length_spec("word:1,3", &g).unwrap().values(), &[0.0, 1.0, 2.0, 1.0]);
        assert_eq!(parse_length_spec("csv:(0,1,3,1)", &g).unwrap().values(), &[0.0, 1.0, 3.0, 1.0]);
        assert!(parse_length_spec("csv:(1,1,3,1)", &g).is_err());
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("psi.csv");
        std::fs::write(&p, "element_index,psi_value\n0,0\n1,2\n2,4\n3,2\n").unwrap();
        assert_eq!(read_length_csv(&p, &g).unwrap().values(), &[0.0, 2.0, 4.0, 2.0]);
        std::fs::write(&p, "0,0\n1,2\n").unwrap();
        assert!(read_length_csv(&p, &g).is_err());
    }

    #[test]
    fn element_csv_round_trip_on_a_ball() {
        let g = load_group("free:2,2").unwrap();
        let f = parse_element_csv("element,re,im\na,1,0\naB,0,2\n3,0.5,0\n", &g).unwrap();
        let b = g.as_free().unwrap();
        assert_eq!(f.coeff(b.index_of(&[1]).unwrap()), Complex64::new(1.0, 0.0));
        assert_eq!(f.coeff(b.index_of(&[1, -2]).unwrap()), Complex64::new(0.0, 2.0));
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.csv");
        write_element_csv(&p, &f).unwrap();
        assert_eq!(read_element_csv(&p, &g).unwrap().coeffs(), f.coeffs());
        assert!(parse_element_csv("aaa,1,0\n", &g).is_err());
    }

    #[test]
    fn branch_spec_builds_spine() {
        let g = load_group("free:2,4").unwrap();
        let b = g.as_free().unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("b.json");
        let mut file = std::fs::File::create(&p).unwrap();
        write!(file, r#"{{"root":"aB","depth":3}}"#).unwrap();
        let specs = read_branch_specs(&p).unwrap();
        let br = specs[0].build(b).unwrap();
        assert_eq!(br.len(), 3);
        assert_eq!(b.word(br.root()), &[1, -2]);
        assert!(BranchSpec { root: "aB".into(), depth: 4 }.build(b).is_err());
    }

    #[test]
    fn grid_csv_round_trip() {
        let spec = GridSpec::new(2, 8, 2.0).unwrap();
        let f = GridFunction::from_fn(spec, Domain::Space, |x| Complex64::new(x[0], x[1] * x[1]));
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.csv");
        write_grid_csv(&p, &f).unwrap();
        let back = read_grid_csv(&p, spec, Domain::Space).unwrap();
        assert_eq!(back.data(), f.data());
        let other = GridSpec::new(2, 8, 3.0).unwrap();
        assert!(read_grid_csv(&p, other, Domain::Space).is_err());
    }
}
