//! Command-line front end: `homology`, `jones` and `verify`.
//!
//! [`run`] takes the argument list and output streams explicitly and returns
//! the process exit code, so the whole front end is testable in-process.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::diagram::{parse_word, torus_word, Word};
use crate::error::{Error, Result};
use crate::homology::{
    homology_unnormalized, normalize, AbGroup, BigradedTable, HomologyOptions, DEFAULT_MAX_CROSSINGS,
};
use crate::invariants::{graded_euler, jones_from_bracket};
use crate::verify::{CheckReport, Verdict, Verifier};
use crate::ENGINE_VERSION;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;

/// Environment variable naming the default cache directory.
pub const CACHE_ENV: &str = "KHOMA_CACHE_DIR";

#[derive(Parser, Debug)]
#[command(name = "khoma", version, about = "Exact Khovanov homology of braid closures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bigraded homology table of a braid closure
    Homology(HomologyArgs),
    /// Jones polynomial, from the bracket or from the homology
    Jones(JonesArgs),
    /// Machine checks of the torus-knot statements
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
struct DiagramArgs {
    /// Standard diagram of the torus link T(P,Q)
    #[arg(long, num_args = 2, value_names = ["P", "Q"], required_unless_present = "braid", conflicts_with = "braid")]
    torus: Option<Vec<usize>>,
    /// Braid word, e.g. "1 2 -1"
    #[arg(long, allow_hyphen_values = true)]
    braid: Option<String>,
    /// Strand count (defaults to one more than the largest generator)
    #[arg(long, requires = "braid")]
    strands: Option<usize>,
}

#[derive(Args, Debug)]
struct EngineArgs {
    /// Refuse diagrams with more crossings than this
    #[arg(long, default_value_t = DEFAULT_MAX_CROSSINGS)]
    max_crossings: usize,
    /// Worker threads for the slice computations
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct HomologyArgs {
    #[command(flatten)]
    diagram: DiagramArgs,
    #[command(flatten)]
    engine: EngineArgs,
    /// Print the table of the diagram before the degree shift
    #[arg(long)]
    unnormalized: bool,
    /// Only compute slices with unnormalized degree i ≤ N
    #[arg(long, value_name = "N")]
    max_i: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Result cache directory (default: $KHOMA_CACHE_DIR)
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Via {
    Bracket,
    Euler,
    Both,
}

#[derive(Args, Debug)]
struct JonesArgs {
    #[command(flatten)]
    diagram: DiagramArgs,
    #[command(flatten)]
    engine: EngineArgs,
    #[arg(long, value_enum, default_value_t = Via::Bracket)]
    via: Via,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    engine: EngineArgs,
    #[command(subcommand)]
    check: Check,
}

#[derive(Args, Debug, Clone, Copy)]
struct Pq {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    q: usize,
}

#[derive(Subcommand, Debug)]
enum Check {
    /// Normalized group in degree (4, (p−1)(q−1)+5) is nonzero
    T1(Pq),
    /// D(p,q) and D(p,q−1) agree below i = p+q−3
    F1(Pq),
    /// D(p,p+1) … D(p,q) agree below i = 2p−1
    F2(Pq),
    /// D(p,p) and D(p−1,p) agree below i = 2p−3 after a q-shift of one
    F3 {
        #[arg(long)]
        p: usize,
    },
    /// The D(p,q) / D(p,q−1) agreement holds up to q−1+⌊(q−1)/p⌋(p−2)
    Rem2(Pq),
    /// Low-degree normalized table of T(p,q) for i ≤ 4
    Table(Pq),
    /// Homology of the partial resolutions E^k(p,q) vanishes in low degrees
    EVanishing {
        #[command(flatten)]
        pq: Pq,
        /// Resolution depth; all of 1..p−1 when omitted
        #[arg(long)]
        k: Option<usize>,
    },
    /// Exactness of the long exact sequence of a crossing resolution
    Les {
        #[command(flatten)]
        diagram: DiagramArgs,
        /// Flat crossing index; every positive crossing when omitted
        #[arg(long)]
        crossing: Option<usize>,
    },
    /// Unnormalized group (2p−2, p) of D(p,p+1) is nonzero
    Conj1 {
        #[arg(long)]
        p: usize,
    },
    /// Stable normalized Poincaré polynomial of T(m,n) as n grows
    StablePoly {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        n_min: Option<usize>,
    },
    /// Width of T(p,q) is at least p whenever group (2p−2, p) survives
    Width(Pq),
}

/// The diagram a table was computed from, as it appears in JSON output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DiagramSpec {
    Torus { p: usize, q: usize },
    Braid { word: Vec<i64>, strands: usize },
}

impl DiagramSpec {
    pub fn word(&self) -> Result<Word> {
        match self {
            DiagramSpec::Torus { p, q } => {
                if *p == 0 {
                    return Err(Error::InvalidWord("torus link needs p ≥ 1".into()));
                }
                Ok(torus_word(*p, *q))
            }
            DiagramSpec::Braid { word, strands } => Word::from_signed(*strands, word),
        }
    }

    fn from_args(a: &DiagramArgs) -> Result<DiagramSpec> {
        if let Some(t) = &a.torus {
            return Ok(DiagramSpec::Torus { p: t[0], q: t[1] });
        }
        let text = a.braid.as_deref().unwrap_or_default();
        let w = parse_word(text, a.strands)?;
        Ok(DiagramSpec::Braid { word: w.signed().unwrap_or_default(), strands: w.strands() })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupRow {
    pub i: i64,
    pub j: i64,
    pub rank: usize,
    pub torsion: Vec<u64>,
}

/// JSON form of a table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDoc {
    pub diagram: DiagramSpec,
    pub normalized: bool,
    pub n_plus: usize,
    pub n_minus: usize,
    pub groups: Vec<GroupRow>,
}

fn rows_of(t: &BigradedTable) -> Vec<GroupRow> {
    t.groups.iter().map(|(&(i, j), g)| GroupRow { i, j, rank: g.free_rank, torsion: g.torsion.clone() }).collect()
}

fn groups_of(rows: &[GroupRow]) -> std::collections::BTreeMap<(i64, i64), AbGroup> {
    rows.iter().map(|r| ((r.i, r.j), AbGroup { free_rank: r.rank, torsion: r.torsion.clone() })).collect()
}

impl TableDoc {
    pub fn new(diagram: DiagramSpec, t: &BigradedTable) -> Self {
        TableDoc { diagram, normalized: t.normalized, n_plus: t.n_plus, n_minus: t.n_minus, groups: rows_of(t) }
    }

    pub fn table(&self) -> BigradedTable {
        BigradedTable {
            groups: groups_of(&self.groups),
            normalized: self.normalized,
            ..BigradedTable::empty(self.n_plus, self.n_minus)
        }
    }
}

pub fn table_to_json(diagram: &DiagramSpec, t: &BigradedTable) -> String {
    serde_json::to_string(&TableDoc::new(diagram.clone(), t)).expect("table serializes")
}

pub fn table_from_json(text: &str) -> Result<(DiagramSpec, BigradedTable)> {
    let doc: TableDoc = serde_json::from_str(text)?;
    let t = doc.table();
    Ok((doc.diagram, t))
}

pub fn table_to_csv(t: &BigradedTable) -> String {
    let mut s = String::from("i,j,rank,torsion\n");
    for r in rows_of(t) {
        let tors: Vec<String> = r.torsion.iter().map(u64::to_string).collect();
        s.push_str(&format!("{},{},{},{}\n", r.i, r.j, r.rank, tors.join(";")));
    }
    s
}

pub fn table_to_text(diagram: &DiagramSpec, t: &BigradedTable) -> String {
    let name = match diagram {
        DiagramSpec::Torus { p, q } => format!("T({p},{q})"),
        DiagramSpec::Braid { word, strands } => {
            let w: Vec<String> = word.iter().map(i64::to_string).collect();
            format!("braid [{}] on {strands} strands", w.join(" "))
        }
    };
    let mut s = format!(
        "# {name}, {}, n+ = {}, n- = {}",
        if t.normalized { "normalized" } else { "unnormalized" },
        t.n_plus,
        t.n_minus
    );
    if let Some(m) = t.max_i {
        s.push_str(&format!(", i <= {m}"));
    }
    s.push('\n');
    s.push_str(&format!("{:>4} {:>5}  group\n", "i", "j"));
    for (&(i, j), g) in &t.groups {
        s.push_str(&format!("{i:>4} {j:>5}  {g}\n"));
    }
    s
}

// ---- cache ------------------------------------------------------------

/// Cached unnormalized result of one query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub key: String,
    pub engine_version: String,
    pub coefficients: String,
    pub strands: usize,
    pub word: Vec<i64>,
    pub max_i: Option<i64>,
    pub n_plus: usize,
    pub n_minus: usize,
    pub groups: Vec<GroupRow>,
    pub compute_ms: u64,
}

impl ResultRecord {
    pub fn new(w: &Word, version: &str, t: &BigradedTable, compute_ms: u64) -> Self {
        let word = w.signed().unwrap_or_default();
        let max_i = t.max_i;
        ResultRecord {
            key: cache_key(w.strands(), &word, version, max_i),
            engine_version: version.to_string(),
            coefficients: "Z".into(),
            strands: w.strands(),
            word,
            max_i,
            n_plus: t.n_plus,
            n_minus: t.n_minus,
            groups: rows_of(t),
            compute_ms,
        }
    }

    pub fn table(&self) -> BigradedTable {
        BigradedTable {
            groups: groups_of(&self.groups),
            max_i: self.max_i,
            ..BigradedTable::empty(self.n_plus, self.n_minus)
        }
    }
}

/// Hex SHA-256 of the canonical encoding of a query.
pub fn cache_key(strands: usize, word: &[i64], version: &str, max_i: Option<i64>) -> String {
    let letters: Vec<String> = word.iter().map(i64::to_string).collect();
    let trunc = max_i.map_or("all".to_string(), |m| m.to_string());
    let canonical = format!("khoma\0{strands}\0{}\0{version}\0Z\0{trunc}", letters.join(","));
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// A corrupt or mismatched entry is reported through `warn` and treated
    /// as a miss.
    pub fn get(&self, key: &str, version: &str, warn: &mut dyn FnMut(String)) -> Option<ResultRecord> {
        let path = self.path(key);
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return None,
            Err(e) => {
                warn(format!("cannot read cache entry {}: {e}", path.display()));
                return None;
            }
        };
        match serde_json::from_str::<ResultRecord>(&text) {
            Ok(r) if r.key == key && r.engine_version == version => Some(r),
            Ok(_) => {
                warn(format!("ignoring mismatched cache entry {}", path.display()));
                None
            }
            Err(e) => {
                warn(format!("ignoring corrupt cache entry {}: {e}", path.display()));
                None
            }
        }
    }

    /// Writes to a temporary file in the cache directory, then renames.
    pub fn put(&self, r: &ResultRecord) -> Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        serde_json::to_writer(&mut tmp, r)?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.path(&r.key)).map_err(|e| Error::Io(e.error))?;
        Ok(())
    }
}

// ---- commands ---------------------------------------------------------

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn warn(&mut self, msg: &str) {
        let _ = writeln!(self.err, "warning: {msg}");
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CrossingLimit { .. } | Error::CircleLimit(_) => EXIT_REFUSED,
        Error::InvalidWord(_)
        | Error::InvalidParameter(_)
        | Error::CrossingIndex { .. }
        | Error::NoSuchCrossing { .. }
        | Error::NotPositive(_)
        | Error::SmoothedDiagram => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidParameter(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Unnormalized table for `w`, through the cache when one is configured.
fn compute_cached(
    w: &Word,
    opts: HomologyOptions,
    jobs: Option<usize>,
    cache: Option<&Cache>,
    io: &mut Io,
) -> Result<BigradedTable> {
    if w.crossing_count() > opts.max_crossings {
        return Err(Error::CrossingLimit { crossings: w.crossing_count(), limit: opts.max_crossings });
    }
    let max_i = opts.max_i.filter(|&k| k < w.crossing_count()).map(|k| k as i64);
    let key = cache_key(w.strands(), &w.signed().unwrap_or_default(), ENGINE_VERSION, max_i);
    if let Some(c) = cache {
        if let Some(r) = c.get(&key, ENGINE_VERSION, &mut |m| io.warn(&m)) {
            return Ok(r.table());
        }
    }
    let start = Instant::now();
    let t = with_jobs(jobs, || homology_unnormalized(w, opts))??;
    if let Some(c) = cache {
        let r = ResultRecord::new(w, ENGINE_VERSION, &t, start.elapsed().as_millis() as u64);
        if let Err(e) = c.put(&r) {
            io.warn(&format!("cache disabled for this run: {e}"));
        }
    }
    Ok(t)
}

fn cmd_homology(a: &HomologyArgs, io: &mut Io) -> Result<()> {
    let spec = DiagramSpec::from_args(&a.diagram)?;
    let w = spec.word()?;
    let opts = HomologyOptions { max_crossings: a.engine.max_crossings, max_i: a.max_i };
    let cache = a.cache_dir.clone().or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from)).map(Cache::new);
    let raw = compute_cached(&w, opts, a.engine.jobs, cache.as_ref(), io)?;
    let t = if a.unnormalized { raw } else { normalize(&raw)? };
    let text = match a.format {
        Format::Text => table_to_text(&spec, &t),
        Format::Json => table_to_json(&spec, &t) + "\n",
        Format::Csv => table_to_csv(&t),
    };
    io.out.write_all(text.as_bytes())?;
    Ok(())
}

fn cmd_jones(a: &JonesArgs, io: &mut Io) -> Result<i32> {
    let w = DiagramSpec::from_args(&a.diagram)?.word()?;
    let limit = a.engine.max_crossings;
    if w.crossing_count() > limit {
        return Err(Error::CrossingLimit { crossings: w.crossing_count(), limit });
    }
    let bracket = || jones_from_bracket(&w, limit);
    let euler = || -> Result<_> {
        let opts = HomologyOptions { max_crossings: limit, max_i: None };
        let t = with_jobs(a.engine.jobs, || homology_unnormalized(&w, opts))??;
        Ok(graded_euler(&normalize(&t)?))
    };
    match a.via {
        Via::Bracket => writeln!(io.out, "{}", bracket()?)?,
        Via::Euler => writeln!(io.out, "{}", euler()?)?,
        Via::Both => {
            let (b, e) = (bracket()?, euler()?);
            writeln!(io.out, "{b}")?;
            writeln!(io.out, "{e}")?;
            if b != e {
                let _ = writeln!(io.err, "error: bracket and Euler characteristic disagree");
                return Ok(EXIT_FAILURE);
            }
        }
    }
    Ok(EXIT_OK)
}

fn run_check(v: &Verifier, c: &Check) -> Result<Vec<CheckReport>> {
    Ok(match c {
        Check::T1(pq) => vec![v.check_t1(pq.p, pq.q)?],
        Check::F1(pq) => vec![v.check_f1(pq.p, pq.q)?],
        Check::F2(pq) => vec![v.check_f2(pq.p, pq.q)?],
        Check::F3 { p } => vec![v.check_f3(*p)?],
        Check::Rem2(pq) => vec![v.check_rem2(pq.p, pq.q)?],
        Check::Table(pq) => vec![v.check_low_degree_table(pq.p, pq.q)?],
        Check::EVanishing { pq, k } => match k {
            Some(k) => vec![v.check_e_vanishing(pq.p, pq.q, *k)?],
            None => (1..pq.p).map(|k| v.check_e_vanishing(pq.p, pq.q, k)).collect::<Result<_>>()?,
        },
        Check::Les { diagram, crossing } => {
            let w = DiagramSpec::from_args(diagram)?.word()?;
            let crossings: Vec<usize> = match crossing {
                Some(c) => vec![*c],
                None => {
                    let letters = w.crossing_letters();
                    (0..letters.len())
                        .filter(|&c| w.letters()[letters[c]].kind == crate::diagram::LetterKind::PosCross)
                        .collect()
                }
            };
            crossings.into_iter().map(|c| v.check_les(&w, c)).collect::<Result<_>>()?
        }
        Check::Conj1 { p } => vec![v.check_conjecture1(*p)?],
        Check::StablePoly { m, n_max, n_min } => {
            vec![v.stable_poly_range(*m, n_min.unwrap_or(m + 1), *n_max)?.1]
        }
        Check::Width(pq) => vec![v.check_width_lower_bound(pq.p, pq.q)?],
    })
}

fn cmd_verify(a: &VerifyArgs, io: &mut Io) -> Result<i32> {
    let v = Verifier::new(a.engine.max_crossings);
    let reports = with_jobs(a.engine.jobs, || run_check(&v, &a.check))??;
    let mut code = EXIT_OK;
    for r in &reports {
        writeln!(io.out, "{}", serde_json::to_string(r)?)?;
        if r.verdict == Verdict::Fail {
            code = EXIT_FAILURE;
        }
    }
    Ok(code)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                EXIT_USAGE
            } else {
                let _ = out.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    let mut io = Io { out, err };
    let result = match &cli.command {
        Command::Homology(a) => cmd_homology(a, &mut io).map(|_| EXIT_OK),
        Command::Jones(a) => cmd_jones(a, &mut io),
        Command::Verify(a) => cmd_verify(a, &mut io),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            exit_code(&e)
        }
    }
}
