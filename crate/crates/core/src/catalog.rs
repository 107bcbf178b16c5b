//! Matroid families and the `.mtd` text format.
//!
//! ```text
//! matroid <name>
//! kind linear|uniform|minor|direct_sum
//! field <q>            # linear
//! rank <rows>          # linear
//! col <e1> .. <erows>  # linear, one line per element
//! params <r> <n>       # uniform
//! of <name>            # minor
//! contract <i> ..      # minor
//! delete <i> ..        # minor
//! part <name>          # direct_sum, one line per summand
//! end
//! ```
//!
//! A file may hold several blocks; later blocks may refer to earlier names
//! and the last block is the matroid the file describes.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{MdlError, Result};
use crate::gf::{Elem, FiniteField, Matrix};
use crate::matroid::{Kind, Matroid};
use crate::subset::Subset;

/// Identifier written into corpus headers for the seeded generator.
pub const RNG_ALGORITHM: &str = "chacha8";

pub fn field(q: usize) -> Result<Arc<FiniteField>> {
    Ok(Arc::new(FiniteField::new(q)?))
}

/// Nonzero vectors of `GF(q)^n` whose first nonzero coordinate is 1, in
/// lexicographic order (first coordinate most significant).
pub fn projective_points(n: usize, q: usize) -> Vec<Vec<Elem>> {
    let total = q.pow(n as u32);
    let mut out = Vec::new();
    for code in 1..total {
        let mut v = vec![0 as Elem; n];
        let mut c = code;
        for i in (0..n).rev() {
            v[i] = (c % q) as Elem;
            c /= q;
        }
        if v.iter().find(|&&x| x != 0) == Some(&1) {
            out.push(v);
        }
    }
    out
}

/// `PG(n-1, q)`: one column per point.
pub fn pg(n: usize, q: usize) -> Result<Matroid> {
    let f = field(q)?;
    let pts = projective_points(n, q);
    if pts.len() > crate::subset::MAX_ELEMENTS {
        return Err(MdlError::GroundTooLarge(pts.len()));
    }
    let mut m = Matrix::zeros(f, n, 0);
    for p in &pts {
        m.push_column(p);
    }
    Matroid::linear(m)
}

pub fn fano() -> Matroid {
    pg(3, 2).expect("PG(2,2) is in range")
}

pub fn uniform(r: usize, n: usize) -> Result<Matroid> {
    Matroid::uniform(r, n)
}

/// `cols` columns drawn uniformly from the nonzero vectors of `GF(q)^rank`.
pub fn linear_random(rank: usize, cols: usize, q: usize, seed: u64) -> Result<Matroid> {
    let f = field(q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = Matrix::zeros(f, rank, 0);
    for _ in 0..cols {
        m.push_column(&random_nonzero(&mut rng, rank, q));
    }
    Matroid::linear(m)
}

fn random_nonzero(rng: &mut ChaCha8Rng, rows: usize, q: usize) -> Vec<Elem> {
    assert!(rows > 0);
    loop {
        let v: Vec<Elem> = (0..rows).map(|_| rng.gen_range(0..q) as Elem).collect();
        if v.iter().any(|&x| x != 0) {
            return v;
        }
    }
}

/// Direct sum of `h` copies of `U_{2,4}`.
pub fn u24_tower(h: usize) -> Result<Matroid> {
    let u = Matroid::uniform(2, 4)?;
    Matroid::direct_sum(&vec![u; h])
}

/// `h` copies of `U_{2,4}` written over `GF(q)` (`q >= 3`) on coordinate
/// pairs `(2i, 2i+1)`, followed by `extra` random nonzero columns.
pub fn planted_tower(h: usize, extra: usize, q: usize, seed: u64) -> Result<Matroid> {
    if q < 3 {
        return Err(MdlError::Precondition("U(2,4) needs q >= 3".into()));
    }
    if h == 0 || 4 * h + extra > crate::subset::MAX_ELEMENTS {
        return Err(MdlError::GroundTooLarge(4 * h + extra));
    }
    let f = field(q)?;
    let c = f.primitive_element();
    let rows = 2 * h;
    let mut m = Matrix::zeros(f, rows, 0);
    for i in 0..h {
        for v in [[1, 0], [0, 1], [1, 1], [1, c]] {
            let mut col = vec![0; rows];
            col[2 * i] = v[0];
            col[2 * i + 1] = v[1];
            m.push_column(&col);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..extra {
        m.push_column(&random_nonzero(&mut rng, rows, q));
    }
    Matroid::linear(m)
}

/// The points of `PG(n-1, q)` written over `GF(q^2)`, followed by `extra`
/// random nonzero `GF(q^2)` columns at indices `count..count+extra`.
pub fn pg_plus_noise(n: usize, q: usize, extra: usize, seed: u64) -> Result<Matroid> {
    let small = FiniteField::new(q)?;
    let big = field(q * q)?;
    let embed = small
        .embedding_into(&big)
        .ok_or_else(|| MdlError::Precondition(format!("GF({q}) does not embed in GF({})", q * q)))?;
    let pts = projective_points(n, q);
    if pts.len() + extra > crate::subset::MAX_ELEMENTS {
        return Err(MdlError::GroundTooLarge(pts.len() + extra));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = Matrix::zeros(big, n, 0);
    for p in &pts {
        let col: Vec<Elem> = p.iter().map(|&x| embed[x as usize]).collect();
        m.push_column(&col);
    }
    for _ in 0..extra {
        m.push_column(&random_nonzero(&mut rng, n, q * q));
    }
    Matroid::linear(m)
}

/// Indices of the noise columns of [`pg_plus_noise`].
pub fn noise_elements(n: usize, q: usize, extra: usize) -> Subset {
    let base = (q.pow(n as u32) - 1) / (q - 1);
    (base..base + extra).collect()
}

fn parse_usize(s: &str, what: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| MdlError::Precondition(format!("{what}: expected a nonnegative integer, got `{s}`")))
}

/// Builds a family member from its name and parameters. `direct_sum` takes
/// part specs of the form `family:p1:p2:..`.
pub fn gen(family: &str, params: &[String], seed: u64) -> Result<Matroid> {
    let nums = || -> Result<Vec<usize>> { params.iter().map(|p| parse_usize(p, family)).collect() };
    let want = |k: usize| -> Result<Vec<usize>> {
        let v = nums()?;
        if v.len() == k {
            Ok(v)
        } else {
            Err(MdlError::Precondition(format!("{family} takes {k} parameters, got {}", v.len())))
        }
    };
    match family {
        "uniform" => {
            let p = want(2)?;
            uniform(p[0], p[1])
        }
        "pg" => {
            let p = want(2)?;
            pg(p[0], p[1])
        }
        "fano" => {
            want(0)?;
            Ok(fano())
        }
        "linear_random" => {
            let p = want(3)?;
            linear_random(p[0], p[1], p[2], seed)
        }
        "u24_tower" => {
            let p = want(1)?;
            u24_tower(p[0])
        }
        "pg_plus_noise" => {
            let p = want(3)?;
            pg_plus_noise(p[0], p[1], p[2], seed)
        }
        "planted_tower" => {
            let p = want(3)?;
            planted_tower(p[0], p[1], p[2], seed)
        }
        "direct_sum" => {
            let parts = params
                .iter()
                .enumerate()
                .map(|(i, spec)| {
                    let mut it = spec.split(':');
                    let fam = it.next().unwrap_or_default();
                    let ps: Vec<String> = it.map(str::to_string).collect();
                    gen(fam, &ps, seed.wrapping_add(i as u64))
                })
                .collect::<Result<Vec<_>>>()?;
            Matroid::direct_sum(&parts)
        }
        other => Err(MdlError::Precondition(format!("unknown family `{other}`"))),
    }
}

fn fmt_indices(s: Subset) -> String {
    s.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

/// Linear matrix for a linear matroid or a parallel extension of one, with
/// every index-space column present.
fn as_matrix(m: &Matroid) -> Option<Matrix> {
    match m.kind() {
        Kind::Linear(mat) => Some(mat.clone()),
        Kind::Parallel { base, sources } => {
            let mut mat = as_matrix(base)?;
            for &s in sources {
                let col = mat.column(s).to_vec();
                mat.push_column(&col);
            }
            Some(mat)
        }
        _ => None,
    }
}

fn write_block(m: &Matroid, name: &str, out: &mut String) -> Result<()> {
    if let Some(mat) = as_matrix(m) {
        let full = Subset::full(m.size());
        writeln!(out, "matroid {name}\nkind linear\nfield {}\nrank {}", mat.field().order(), mat.rows()).ok();
        for j in 0..mat.cols() {
            let col: Vec<String> = mat.column(j).iter().map(|v| v.to_string()).collect();
            writeln!(out, "col {}", col.join(" ")).ok();
        }
        writeln!(out, "end").ok();
        // parallel extensions whose base dropped elements need a deletion
        let dead = full.difference(m.ground());
        if !dead.is_empty() {
            let inner = format!("{name}_full");
            let body = std::mem::take(out);
            *out = body.replacen(&format!("matroid {name}\n"), &format!("matroid {inner}\n"), 1);
            writeln!(out, "matroid {name}\nkind minor\nof {inner}\ndelete {}\nend", fmt_indices(dead)).ok();
        }
        return Ok(());
    }
    match m.kind() {
        Kind::Uniform { rank, n } => {
            writeln!(out, "matroid {name}\nkind uniform\nparams {rank} {n}\nend").ok();
        }
        Kind::Minor {
            base,
            contract,
            delete,
        } => {
            let base_name = format!("{name}_base");
            write_block(base, &base_name, out)?;
            writeln!(out, "matroid {name}\nkind minor\nof {base_name}").ok();
            if !contract.is_empty() {
                writeln!(out, "contract {}", fmt_indices(*contract)).ok();
            }
            if !delete.is_empty() {
                writeln!(out, "delete {}", fmt_indices(*delete)).ok();
            }
            writeln!(out, "end").ok();
        }
        Kind::DirectSum { parts, .. } => {
            let names: Vec<String> = (0..parts.len()).map(|i| format!("{name}_p{i}")).collect();
            for (p, n) in parts.iter().zip(&names) {
                write_block(p, n, out)?;
            }
            writeln!(out, "matroid {name}\nkind direct_sum").ok();
            for n in &names {
                writeln!(out, "part {n}").ok();
            }
            writeln!(out, "end").ok();
        }
        Kind::Parallel { .. } | Kind::Linear(_) => {
            return Err(MdlError::Precondition(
                "only parallel extensions of linear matroids can be written".into(),
            ))
        }
    }
    Ok(())
}

/// Serialises `m` (and any matroids it is built from) as `.mtd` text.
pub fn to_mtd(m: &Matroid, name: &str, header: &[String]) -> Result<String> {
    let mut out = String::new();
    for h in header {
        writeln!(out, "# {h}").ok();
    }
    let mut body = String::new();
    write_block(m, name, &mut body)?;
    out.push_str(&body);
    Ok(out)
}

pub fn write_matroid(m: &Matroid, path: &Path, name: &str, header: &[String]) -> Result<()> {
    std::fs::write(path, to_mtd(m, name, header)?)?;
    Ok(())
}

#[derive(Default)]
struct Block {
    name: String,
    line: usize,
    kind: Option<String>,
    field: Option<usize>,
    rank: Option<usize>,
    cols: Vec<(usize, Vec<usize>)>,
    params: Option<(usize, usize)>,
    of: Option<String>,
    contract: Vec<usize>,
    delete: Vec<usize>,
    parts: Vec<String>,
}

fn perr(line: usize, msg: impl Into<String>) -> MdlError {
    MdlError::Parse { line, msg: msg.into() }
}

fn finish(b: Block, known: &HashMap<String, Matroid>) -> Result<Matroid> {
    let line = b.line;
    let kind = b.kind.ok_or_else(|| perr(line, format!("block `{}` has no kind", b.name)))?;
    let lookup = |n: &str| {
        known
            .get(n)
            .cloned()
            .ok_or_else(|| perr(line, format!("unknown matroid `{n}`")))
    };
    let at = |e: MdlError| match e {
        MdlError::Parse { .. } => e,
        other => perr(line, other.to_string()),
    };
    match kind.as_str() {
        "linear" => {
            let q = b.field.ok_or_else(|| perr(line, "linear block needs `field`"))?;
            let rows = b.rank.ok_or_else(|| perr(line, "linear block needs `rank`"))?;
            let f = field(q).map_err(at)?;
            let mut cols = Vec::with_capacity(b.cols.len());
            for (l, c) in b.cols {
                if c.len() != rows {
                    return Err(perr(l, format!("column has {} entries, expected {rows}", c.len())));
                }
                if let Some(&v) = c.iter().find(|&&v| v >= q) {
                    return Err(perr(l, format!("field element {v} out of range for GF({q})")));
                }
                cols.push(c);
            }
            let mat = Matrix::from_columns(f, rows, &cols).map_err(at)?;
            Matroid::linear(mat).map_err(at)
        }
        "uniform" => {
            let (r, n) = b.params.ok_or_else(|| perr(line, "uniform block needs `params`"))?;
            Matroid::uniform(r, n).map_err(at)
        }
        "minor" => {
            let base = lookup(b.of.as_deref().ok_or_else(|| perr(line, "minor block needs `of`"))?)?;
            let c: Subset = b.contract.iter().copied().collect();
            let d: Subset = b.delete.iter().copied().collect();
            base.minor(c, d).map_err(at)
        }
        "direct_sum" => {
            let parts = b.parts.iter().map(|n| lookup(n)).collect::<Result<Vec<_>>>()?;
            Matroid::direct_sum(&parts).map_err(at)
        }
        other => Err(perr(line, format!("unknown kind `{other}`"))),
    }
}

/// Parses every block, in order.
pub fn parse_mtd_all(text: &str) -> Result<Vec<(String, Matroid)>> {
    let mut known: HashMap<String, Matroid> = HashMap::new();
    let mut order = Vec::new();
    let mut cur: Option<Block> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        let key = toks.next().expect("nonempty line");
        let rest: Vec<&str> = toks.collect();
        let nums = || -> Result<Vec<usize>> {
            rest.iter()
                .map(|t| t.parse::<usize>().map_err(|_| perr(line, format!("expected an integer, got `{t}`"))))
                .collect()
        };
        if key == "matroid" {
            if cur.is_some() {
                return Err(perr(line, "previous block not closed with `end`"));
            }
            let name = rest.first().ok_or_else(|| perr(line, "matroid needs a name"))?;
            cur = Some(Block {
                name: name.to_string(),
                line,
                ..Block::default()
            });
            continue;
        }
        let b = cur.as_mut().ok_or_else(|| perr(line, format!("`{key}` outside a matroid block")))?;
        match key {
            "kind" => b.kind = Some(rest.first().ok_or_else(|| perr(line, "kind needs a value"))?.to_string()),
            "field" => b.field = Some(*nums()?.first().ok_or_else(|| perr(line, "field needs q"))?),
            "rank" => b.rank = Some(*nums()?.first().ok_or_else(|| perr(line, "rank needs a value"))?),
            "col" => b.cols.push((line, nums()?)),
            "params" => match nums()?.as_slice() {
                [r, n] => b.params = Some((*r, *n)),
                _ => return Err(perr(line, "params needs <r> <n>")),
            },
            "of" => b.of = Some(rest.first().ok_or_else(|| perr(line, "of needs a name"))?.to_string()),
            "contract" => b.contract.extend(nums()?),
            "delete" => b.delete.extend(nums()?),
            "part" => b.parts.push(rest.first().ok_or_else(|| perr(line, "part needs a name"))?.to_string()),
            "end" => {
                let block = cur.take().expect("inside a block");
                let name = block.name.clone();
                let m = finish(block, &known)?;
                known.insert(name.clone(), m.clone());
                order.push((name, m));
            }
            other => return Err(perr(line, format!("unknown keyword `{other}`"))),
        }
    }
    if let Some(b) = cur {
        return Err(perr(b.line, format!("block `{}` not closed with `end`", b.name)));
    }
    Ok(order)
}

/// Parses a file's text and returns its last matroid.
pub fn parse_mtd(text: &str) -> Result<Matroid> {
    parse_mtd_all(text)?
        .pop()
        .map(|(_, m)| m)
        .ok_or_else(|| perr(0, "no matroid blocks"))
}

pub fn read_matroid(path: &Path) -> Result<Matroid> {
    parse_mtd(&std::fs::read_to_string(path)?)
}

/// One line of a corpus manifest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestEntry {
    pub file: String,
    pub family: String,
    pub params: Vec<String>,
    pub seed: u64,
}

/// Writes each entry's matroid into `dir` plus a tab-separated
/// `manifest.tsv` with columns `file family params seed`.
pub fn write_corpus(dir: &Path, entries: &[ManifestEntry]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut manifest = String::from("# file\tfamily\tparams\tseed\n");
    for e in entries {
        let m = gen(&e.family, &e.params, e.seed)?;
        let header = vec![
            format!("family {} params {}", e.family, e.params.join(",")),
            format!("rng {RNG_ALGORITHM} seed={}", e.seed),
        ];
        let stem = e.file.trim_end_matches(".mtd");
        write_matroid(&m, &dir.join(&e.file), stem, &header)?;
        writeln!(manifest, "{}\t{}\t{}\t{}", e.file, e.family, e.params.join(","), e.seed).ok();
    }
    std::fs::write(dir.join("manifest.tsv"), manifest)?;
    Ok(())
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(perr(i + 1, "manifest lines have four tab-separated columns"));
        }
        out.push(ManifestEntry {
            file: cols[0].to_string(),
            family: cols[1].to_string(),
            params: cols[2].split(',').filter(|s| !s.is_empty()).map(str::to_string).collect(),
            seed: cols[3].parse().map_err(|_| perr(i + 1, "bad seed"))?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pg_sizes() {
        let m = pg(3, 2).unwrap();
        assert_eq!(m.ground().len(), 7);
        assert_eq!(m.epsilon(), 7);
        assert_eq!(m.full_rank(), 3);
        assert_eq!(pg(4, 3).unwrap().ground().len(), 40);
        assert_eq!(pg(4, 4).unwrap().ground().len(), 85);
        let u = uniform(2, 4).unwrap();
        for x in u.ground().subsets() {
            assert_eq!(u.rank(x), x.len().min(2));
        }
    }

    #[test]
    fn deterministic_generation() {
        let a = linear_random(3, 8, 3, 7).unwrap();
        let b = linear_random(3, 8, 3, 7).unwrap();
        assert!(a.agrees_on(&b, a.ground()));
        assert_eq!(to_mtd(&a, "a", &[]).unwrap(), to_mtd(&b, "a", &[]).unwrap());
    }

    #[test]
    fn noise_generator_keeps_the_geometry() {
        let m = pg_plus_noise(3, 2, 2, 5).unwrap();
        let x = noise_elements(3, 2, 2);
        assert_eq!(x, Subset::from_indices([7, 8]));
        assert_eq!(m.delete(x).unwrap().epsilon(), 7);
        assert!(pg_plus_noise(3, 4, 1, 0).is_ok());
    }

    #[test]
    fn roundtrip_pg() {
        let m = pg(3, 2).unwrap();
        let text = to_mtd(&m, "pg32", &["test".into()]).unwrap();
        let back = parse_mtd(&text).unwrap();
        assert!(m.agrees_on(&back, m.ground()));
    }

    #[test]
    fn roundtrip_composites() {
        let tower = u24_tower(2).unwrap();
        let minor = tower.minor(Subset::singleton(0), Subset::singleton(5)).unwrap();
        let ds = Matroid::direct_sum(&[minor.clone(), fano()]).unwrap();
        let back = parse_mtd(&to_mtd(&ds, "x", &[]).unwrap()).unwrap();
        assert_eq!(back.ground(), ds.ground());
        assert!(ds.agrees_on(&back, ds.ground()));
        let par = fano().parallel_extension(&[1, 2]).unwrap().delete(Subset::singleton(0)).unwrap();
        let back = parse_mtd(&to_mtd(&par, "p", &[]).unwrap()).unwrap();
        assert!(par.agrees_on(&back, par.ground()));
    }

    #[test]
    fn parse_errors() {
        let bad_q = "matroid a\nkind linear\nfield 6\nrank 1\ncol 1\nend\n";
        assert!(matches!(parse_mtd(bad_q), Err(MdlError::Parse { .. })));
        let missing = "matroid b\nkind minor\nof nowhere\nend\n";
        assert!(matches!(parse_mtd(missing), Err(MdlError::Parse { line: 1, .. })));
        let range = "matroid a\nkind linear\nfield 3\nrank 2\ncol 1 0\ncol 1 3\nend\n";
        assert_eq!(
            parse_mtd(range).err(),
            Some(MdlError::Parse {
                line: 6,
                msg: "field element 3 out of range for GF(3)".into()
            })
        );
        assert!(matches!(parse_mtd("matroid a\nkind blob\nend\n"), Err(MdlError::Parse { .. })));
        assert!(matches!(parse_mtd("matroid a\nkind uniform\nparams 2 4\n"), Err(MdlError::Parse { .. })));
    }

    #[test]
    fn gen_families() {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        assert_eq!(gen("pg", &s(&["3", "2"]), 0).unwrap().epsilon(), 7);
        assert_eq!(gen("u24_tower", &s(&["3"]), 0).unwrap().full_rank(), 6);
        let ds = gen("direct_sum", &s(&["uniform:2:3", "fano"]), 0).unwrap();
        assert_eq!(ds.full_rank(), 5);
        assert!(gen("pg", &s(&["3"]), 0).is_err());
        assert!(gen("nope", &[], 0).is_err());
    }
}
