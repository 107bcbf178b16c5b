mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use mdl_core::catalog::{self, ManifestEntry};
use mdl_core::covers::{kdensity_cover, tau, tau_weighted, Cover, CoverNumber};
use mdl_core::harness::{run_suite, Suite, SuiteParams, Verdict};
use mdl_core::numeric::{binom, parse_rational};
use mdl_core::reduce::weakly_round_restriction;
use mdl_core::rep::{is_pg, is_representable};
use mdl_core::stacks::{find_stack, stack_restriction_violation, StackCert};
use mdl_core::{Matroid, MdlError, Subset};

use output::Output;

#[derive(Parser)]
#[command(name = "mdl", version, about = "Covering numbers, stacks and density reductions on small matroids")]
struct Cli {
    /// print one JSON object instead of key=value lines
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a catalog matroid
    Gen {
        family: String,
        params: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        name: Option<String>,
    },
    /// Covering number by sets of rank at most A
    Tau {
        file: PathBuf,
        #[arg(long)]
        a: usize,
    },
    /// Minimum d-weight of a cover
    Tauw {
        file: PathBuf,
        #[arg(long)]
        d: u64,
    },
    /// Local connectivity of two sets
    Conn {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Weak roundness check, or extraction of a dense weakly round restriction
    Round {
        file: PathBuf,
        #[arg(long)]
        extract: bool,
        #[arg(long)]
        a: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// GF(q)-representability
    Rep {
        file: PathBuf,
        #[arg(long)]
        q: usize,
    },
    /// Whether the simplification is PG(n-1, q)
    Pg {
        file: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: usize,
    },
    /// Stack certificates
    Stack {
        #[command(subcommand)]
        op: StackOp,
    },
    /// Covers with a bound check
    Cover {
        #[command(subcommand)]
        op: CoverOp,
    },
    /// Run a property suite over seeded instances
    Verify {
        /// suite name (see `mdl verify --list`)
        suite: Option<String>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// key=value overrides: q, a, max_rank, max_n
        #[arg(long, num_args = 1..)]
        params: Vec<String>,
        /// where failing instances are written
        #[arg(long, default_value = "counterexamples")]
        dump_dir: PathBuf,
        #[arg(long)]
        list: bool,
    },
    /// Write a seeded corpus with a manifest
    Corpus {
        dir: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 12)]
        random: usize,
    },
}

#[derive(Subcommand)]
enum StackOp {
    Verify {
        file: PathBuf,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        h: Option<usize>,
        #[arg(long)]
        t: usize,
        /// layers as `0,1,2;3,4,5`, or `@path` to a certificate file
        #[arg(long)]
        parts: String,
    },
    Find {
        file: PathBuf,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        t: usize,
    },
}

#[derive(Subcommand)]
enum CoverOp {
    /// Constructive cover against binom(b-1,a)^(r(M)-a)
    Thm4 {
        file: PathBuf,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
    },
}

/// Short suite keys accepted besides the descriptive names.
const SUITE_KEYS: [(&str, Suite); 12] = [
    ("thm4", Suite::CoverBound),
    ("cor5", Suite::ContractionCover),
    ("lem7", Suite::StackProjection),
    ("lem8", Suite::StackSkew),
    ("lem9", Suite::LowConnectivity),
    ("lem10", Suite::ContractionWeighted),
    ("lem11", Suite::ThickMinor),
    ("lem12", Suite::WeightedCover),
    ("lem14", Suite::ProjectionNoStack),
    ("lem16", Suite::RoundRestriction),
    ("lem17", Suite::SpanInto),
    ("hirschfeld", Suite::UniformRepresentability),
];

fn suite_by_name(s: &str) -> Option<Suite> {
    SUITE_KEYS
        .iter()
        .find(|(k, _)| *k == s)
        .map(|&(_, x)| x)
        .or_else(|| Suite::from_name(s))
}

enum Failure {
    Usage(String),
    Core(MdlError),
}

impl From<MdlError> for Failure {
    fn from(e: MdlError) -> Self {
        Failure::Core(e)
    }
}

type CmdResult = Result<(Output, bool), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok((out, holds)) => {
            print!("{}", out.render(cli.json));
            ExitCode::from(if holds { 0 } else { 1 })
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &Path) -> Result<Matroid, Failure> {
    Ok(catalog::read_matroid(path)?)
}

fn parse_list(s: &str) -> Result<Subset, Failure> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>()
                .ok()
                .filter(|&i| i < mdl_core::subset::MAX_ELEMENTS)
                .ok_or_else(|| Failure::Usage(format!("bad element index `{t}`")))
        })
        .collect()
}

fn indices(s: Subset) -> String {
    s.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

fn cover_lines(c: &Cover) -> Vec<String> {
    c.sets.iter().map(|&s| format!("set {}", indices(s))).collect()
}

fn cert_lines(c: &StackCert) -> Vec<String> {
    c.to_text().lines().map(str::to_string).collect()
}

fn run(cmd: Cmd) -> CmdResult {
    match cmd {
        Cmd::Gen {
            family,
            params,
            output,
            seed,
            name,
        } => gen(&family, &params, output, seed, name),
        Cmd::Tau { file, a } => {
            let m = load(&file)?;
            let (t, cover) = tau(&m, a)?;
            let mut o = Output::new();
            o.set("a", a);
            match t {
                CoverNumber::Finite(v) => o.set("tau", v as u64),
                CoverNumber::Infinite => o.set("tau", "inf"),
            };
            o.block("cover", cover_lines(&cover));
            Ok((o, true))
        }
        Cmd::Tauw { file, d } => {
            let m = load(&file)?;
            let (t, cover) = tau_weighted(&m, d)?;
            let mut o = Output::new();
            o.set("d", d).set("tauw", t.to_string()).block("cover", cover_lines(&cover));
            Ok((o, true))
        }
        Cmd::Conn { file, x, y } => {
            let m = load(&file)?;
            let (x, y) = (parse_list(&x)?, parse_list(&y)?);
            m.check_subset(x)?;
            m.check_subset(y)?;
            let c = m.local_conn(x, y);
            let mut o = Output::new();
            o.set("conn", c).set("skew", c == 0);
            Ok((o, true))
        }
        Cmd::Round {
            file,
            extract,
            a,
            q,
            alpha,
            output,
        } => round(&file, extract, a, q, alpha, output),
        Cmd::Rep { file, q } => {
            let m = load(&file)?;
            let mut o = Output::new();
            o.set("q", q);
            match is_representable(&m, q)? {
                Some(mat) => {
                    o.set("representable", true);
                    let rows = (0..mat.rows())
                        .map(|i| {
                            let row: Vec<String> = (0..mat.cols()).map(|j| mat.get(i, j).to_string()).collect();
                            format!("row {}", row.join(" "))
                        })
                        .collect();
                    o.block("matrix", rows);
                    Ok((o, true))
                }
                None => {
                    o.set("representable", false);
                    Ok((o, false))
                }
            }
        }
        Cmd::Pg { file, n, q } => {
            let m = load(&file)?;
            let v = is_pg(&m, n, q)?;
            let mut o = Output::new();
            o.set("n", n).set("q", q).set("pg", v);
            Ok((o, v))
        }
        Cmd::Stack { op } => stack(op),
        Cmd::Cover {
            op: CoverOp::Thm4 { file, a, b },
        } => {
            let m = load(&file)?;
            if a == 0 || a >= b {
                return Err(Failure::Usage("need 1 <= a < b".into()));
            }
            let cover = kdensity_cover(&m, a, b)?;
            let r = m.full_rank();
            let bound = if r >= a {
                binom(b - 1, a).pow((r - a) as u32)
            } else {
                1.into()
            };
            let ok = cover.covers(&m) && cover.max_rank(&m) <= a && num_bigint::BigInt::from(cover.len()) <= bound;
            let mut o = Output::new();
            o.set("a", a)
                .set("b", b)
                .set("rank", r)
                .set("size", cover.len())
                .set("bound", bound.to_string())
                .set("holds", ok)
                .block("cover", cover_lines(&cover));
            Ok((o, ok))
        }
        Cmd::Verify {
            suite,
            trials,
            seed,
            params,
            dump_dir,
            list,
        } => verify(suite, trials, seed, &params, &dump_dir, list),
        Cmd::Corpus { dir, seed, random } => corpus(&dir, seed, random),
    }
}

fn gen(family: &str, params: &[String], output: Option<PathBuf>, seed: u64, name: Option<String>) -> CmdResult {
    let m = catalog::gen(family, params, seed)?;
    let name = name.unwrap_or_else(|| family.to_string());
    let header = vec![
        format!("family {family} params {}", params.join(",")),
        format!("rng {} seed={seed}", catalog::RNG_ALGORITHM),
    ];
    let mut o = Output::new();
    match output {
        Some(path) => {
            catalog::write_matroid(&m, &path, &name, &header)?;
            o.set("written", path.display().to_string());
        }
        None => {
            let text = catalog::to_mtd(&m, &name, &header)?;
            o.block("mtd", text.lines().map(str::to_string).collect());
        }
    }
    o.set("elements", m.ground().len()).set("rank", m.full_rank());
    Ok((o, true))
}

fn round(file: &Path, extract: bool, a: Option<usize>, q: Option<usize>, alpha: Option<String>, output: Option<PathBuf>) -> CmdResult {
    let m = load(file)?;
    let mut o = Output::new();
    if !extract {
        let v = m.weak_roundness_violation();
        o.set("weakly_round", v.is_none());
        if let Some((low, hyper)) = v {
            o.block("violation", vec![format!("low {}", indices(low)), format!("hyperplane {}", indices(hyper))]);
        }
        return Ok((o, v.is_none()));
    }
    let (Some(a), Some(q), Some(alpha)) = (a, q, alpha) else {
        return Err(Failure::Usage("--extract needs --a, --q and --alpha".into()));
    };
    let alpha = parse_rational(&alpha).ok_or_else(|| Failure::Usage(format!("bad rational `{alpha}`")))?;
    let res = weakly_round_restriction(&m, a, q, &alpha)?;
    if let Some(path) = output {
        catalog::write_matroid(&res.n, &path, "round", &[])?;
    }
    o.set("weakly_round", res.n.is_weakly_round())
        .set("rank", res.n.full_rank())
        .set("tau", res.tau.to_string())
        .set("splits", res.path.len() - 1)
        .block("ground", vec![indices(res.ground)]);
    Ok((o, true))
}

fn stack(op: StackOp) -> CmdResult {
    match op {
        StackOp::Verify { file, q, h, t, parts } => {
            let m = load(&file)?;
            let cert = if let Some(path) = parts.strip_prefix('@') {
                let text = std::fs::read_to_string(path).map_err(|e| Failure::Core(MdlError::Io(e.to_string())))?;
                StackCert::parse(&text)?
            } else {
                let layers = parts.split(';').map(parse_list).collect::<Result<Vec<_>, _>>()?;
                StackCert::new(layers, q, t)
            };
            if cert.q != q || cert.t != t {
                return Err(Failure::Usage("certificate q/t differ from the flags".into()));
            }
            let mut violation = stack_restriction_violation(&m, &cert)?;
            if let Some(h) = h {
                if violation.is_none() && cert.height() != h {
                    violation = Some(format!("certificate has {} layers, expected {h}", cert.height()));
                }
            }
            let mut o = Output::new();
            o.set("valid", violation.is_none());
            if let Some(v) = &violation {
                o.set("violation", v.clone());
            }
            Ok((o, violation.is_none()))
        }
        StackOp::Find { file, q, h, t } => {
            let m = load(&file)?;
            let mut o = Output::new();
            match find_stack(&m, q, h, t)? {
                Some(c) => {
                    o.set("found", true).set("height", c.height()).block("certificate", cert_lines(&c));
                    Ok((o, true))
                }
                None => {
                    o.set("found", false);
                    Ok((o, false))
                }
            }
        }
    }
}

fn verify(suite: Option<String>, trials: usize, seed: u64, params: &[String], dump_dir: &Path, list: bool) -> CmdResult {
    if list {
        let mut o = Output::new();
        let lines = SUITE_KEYS.iter().map(|(k, s)| format!("{k} {}", s.name())).collect();
        o.block("suites", lines);
        return Ok((o, true));
    }
    let name = suite.ok_or_else(|| Failure::Usage("missing suite name".into()))?;
    let s = suite_by_name(&name).ok_or_else(|| Failure::Usage(format!("unknown suite `{name}`")))?;
    let params = SuiteParams::parse(params)?;
    let report = run_suite(s, trials, seed, &params);
    let mut rows = Vec::new();
    for t in &report.trials {
        let mut row = Map::new();
        row.insert("index".into(), json!(t.index));
        let verdict = match t.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Error => "error",
        };
        row.insert("verdict".into(), json!(verdict));
        row.insert("instance".into(), json!(t.description));
        row.insert("detail".into(), json!(t.detail));
        if let Some(m) = &t.counterexample {
            std::fs::create_dir_all(dump_dir).map_err(|e| Failure::Core(MdlError::Io(e.to_string())))?;
            let path = dump_dir.join(format!("{}-seed{seed}-trial{}.mtd", s.name(), t.index));
            let header = vec![
                format!("suite {} seed={seed} trial={}", s.name(), t.index),
                format!("instance {}", t.description),
            ];
            catalog::write_matroid(m, &path, "counterexample", &header)?;
            row.insert("dump".into(), Value::String(path.display().to_string()));
        }
        rows.push(row);
    }
    let (pass, fail, err) = (
        report.count(Verdict::Pass),
        report.count(Verdict::Fail),
        report.count(Verdict::Error),
    );
    let mut o = Output::new();
    o.records("trial", rows)
        .set("suite", s.name())
        .set("seed", seed)
        .set("trials", trials)
        .set("passed", pass)
        .set("failed", fail)
        .set("errors", err)
        .set("summary", format!("{pass}/{trials} pass"));
    if fail == 0 && err > 0 {
        print!("{}", o.render(false));
        return Err(Failure::Usage(format!("{err} trials hit caps or errors")));
    }
    Ok((o, fail == 0))
}

fn corpus(dir: &Path, seed: u64, random: usize) -> CmdResult {
    // file names follow PG(n-1, q) while `pg` takes the vector dimension n
    let fixed: [(&str, &str, &[&str]); 10] = [
        ("fano.mtd", "fano", &[]),
        ("u24.mtd", "uniform", &["2", "4"]),
        ("u25.mtd", "uniform", &["2", "5"]),
        ("pg22.mtd", "pg", &["3", "2"]),
        ("pg23.mtd", "pg", &["3", "3"]),
        ("pg32.mtd", "pg", &["4", "2"]),
        ("pg33.mtd", "pg", &["4", "3"]),
        ("pg34.mtd", "pg", &["4", "4"]),
        ("tower3.mtd", "u24_tower", &["3"]),
        ("planted6.mtd", "planted_tower", &["6", "3", "5"]),
    ];
    let mut entries: Vec<ManifestEntry> = fixed
        .iter()
        .map(|(f, fam, ps)| ManifestEntry {
            file: f.to_string(),
            family: fam.to_string(),
            params: ps.iter().map(|s| s.to_string()).collect(),
            seed,
        })
        .collect();
    for i in 0..random {
        let q = [2, 3][i % 2];
        let r = 2 + i % 4;
        let n = r + 2 + i % 6;
        entries.push(ManifestEntry {
            file: format!("random{i:02}.mtd"),
            family: "linear_random".into(),
            params: vec![r.to_string(), n.to_string(), q.to_string()],
            seed: seed.wrapping_add(i as u64),
        });
    }
    catalog::write_corpus(dir, &entries)?;
    let mut o = Output::new();
    o.set("dir", dir.display().to_string()).set("files", entries.len());
    Ok((o, true))
}
