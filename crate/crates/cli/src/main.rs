//! `gowers`: batch front end for the block-sequence and variable-word
//! toolkit. Every command reads JSON (inline, `@FILE`, or `-` for standard
//! input) and writes canonical JSON, one value per line.
//!
//! Exit codes: 0 success, 1 domain error or failed verification, 2 usage
//! error, 3 search exhausted.

use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use gowers::encoding::{
    decode_witness, phi_encode, product_to_sigmas, psi_encode, DerivedPair, PerfectSetDescription,
};
use gowers::json::{parse_block_sequence, parse_block_vector, to_canonical_string};
use gowers::search::{
    parametrized_pipeline, search_ghj, search_vectors, verify_ghj_witness, verify_pipeline,
    verify_witness, Arity, Colouring, GhjProblem, GhjWitness, Outcome, PipelineProblem,
    PipelineResult, Rule, SearchProblem, VectorWitness,
};
use gowers::vector::{self, seq_dist, BlockSequence, BlockVector};
use gowers::word::{self, dist_seqs, dist_words, Letter, VarWordSequence, Word};
use gowers::{Error, Mode};

#[derive(Parser)]
#[command(name = "gowers", version, about = "Block sequences, variable words and Ramsey witnesses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
}

#[derive(Args)]
struct Shape {
    /// unsigned (FIN_k) or signed (FIN_±k); defaults to unsigned when the
    /// input does not say.
    #[arg(long)]
    mode: Option<Mode>,
    /// Level bound; defaults to the largest |value| when the input omits it.
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct ColourArgs {
    /// Number of colours r.
    #[arg(long, default_value_t = 2)]
    colours: u32,
    /// Built-in family, e.g. min-position-mod, random, constant, matrix-bit.
    #[arg(long)]
    family: Option<String>,
    /// JSON object mapping canonical element serializations to colours.
    #[arg(long, value_name = "FILE")]
    table: Option<PathBuf>,
    /// A full colouring object; overrides --family and --table.
    #[arg(long, value_name = "JSON")]
    colouring: Option<String>,
    /// Seed for the random family and for sampling (default 0).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Colour of the constant family.
    #[arg(long, default_value_t = 0)]
    colour: u32,
    /// Row and column read by the matrix-bit family.
    #[arg(long, default_value_t = 0)]
    row: usize,
    #[arg(long, default_value_t = 0)]
    col: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Words,
    Negt,
    Letters,
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchKind {
    Vector,
    Word,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate a span as JSON lines.
    Span {
        #[command(flatten)]
        shape: Shape,
        /// Block sequence (array of block vectors).
        #[arg(long, conflicts_with = "sequence", required_unless_present = "sequence")]
        blocks: Option<String>,
        /// Variable-word sequence {"alphabet", "words"}.
        #[arg(long)]
        sequence: Option<String>,
        /// Which word span to enumerate.
        #[arg(long, value_enum, default_value = "words")]
        kind: Kind,
        /// Only use index sets of at most this many generators.
        #[arg(long)]
        bound: Option<usize>,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Distance between two vectors, words, or sequences of either.
    Dist {
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Apply the tetris operation `power` times.
    Tetris {
        #[command(flatten)]
        shape: Shape,
        #[arg(long, conflicts_with = "word", required_unless_present = "word")]
        vector: Option<String>,
        #[arg(long)]
        word: Option<String>,
        #[arg(long, default_value_t = 1)]
        power: u32,
    },
    /// φ and ψ of a word sequence.
    Encode {
        #[arg(long)]
        sequence: String,
    },
    /// Decode a block subsequence A of B back to words, given the σ letters
    /// or one string per perfect set.
    Decode {
        #[command(flatten)]
        shape: Shape,
        /// The even-length sequence Y, or derive-b output.
        #[arg(long)]
        sequence: String,
        #[arg(long)]
        blocks: String,
        #[arg(long, conflicts_with = "deltas", required_unless_present = "deltas")]
        sigmas: Option<String>,
        #[arg(long)]
        deltas: Option<String>,
    },
    /// B and the perfect sets of an even-length sequence.
    DeriveB {
        #[arg(long)]
        sequence: String,
    },
    /// Perfect-set descriptions with their sizes, or with --enumerate the
    /// satisfying strings of one of them.
    PerfectSets {
        #[arg(long)]
        sequence: String,
        #[arg(long, requires = "index")]
        enumerate: bool,
        #[arg(long)]
        index: Option<usize>,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Bounded witness search.
    Search {
        #[arg(long, value_enum, default_value = "vector")]
        kind: SearchKind,
        #[arg(long, default_value = "unsigned")]
        mode: Mode,
        #[arg(long)]
        k: Option<u32>,
        /// Positions are drawn from [0, N).
        #[arg(long = "N")]
        n: Option<usize>,
        /// Number of blocks.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 0)]
        radius: u32,
        /// Word search problem {"alphabet","mode","k","colours","lengths","radius"}.
        #[arg(long)]
        problem: Option<String>,
        #[command(flatten)]
        colouring: ColourArgs,
        #[arg(long)]
        parallel: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Re-check a search or pipeline result.
    Verify {
        #[arg(long)]
        witness: String,
        #[command(flatten)]
        colouring: ColourArgs,
    },
    /// Lift a (vector, matrix) colouring to words, search for Y, and
    /// optionally verify by sampling the product.
    Pipeline {
        #[arg(long)]
        problem: String,
        #[command(flatten)]
        colouring: ColourArgs,
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        parallel: bool,
    },
    /// Run the embedded invariant suite.
    Selftest,
}

enum Failure {
    Usage(String),
    Domain(String),
    Exhausted,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Domain(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Failure {
        Failure::Domain(format!("invalid JSON input: {e}"))
    }
}

type Run = Result<(), Failure>;

struct Out {
    inner: BufWriter<io::StdoutLock<'static>>,
}

impl Out {
    fn line<T: serde::Serialize + ?Sized>(&mut self, value: &T) -> Run {
        let text = to_canonical_string(value)?;
        // A closed pipe (e.g. `| head`) is not an error worth reporting.
        let _ = writeln!(self.inner, "{text}");
        Ok(())
    }
}

/// Inline JSON, `@FILE`, or `-` for standard input.
fn read_input(arg: &str) -> Result<String, Failure> {
    if arg == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Usage(format!("cannot read standard input: {e}")))?;
        Ok(s)
    } else if let Some(path) = arg.strip_prefix('@') {
        std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {path}: {e}")))
    } else {
        Ok(arg.to_string())
    }
}

fn read_json(arg: &str) -> Result<Value, Failure> {
    Ok(serde_json::from_str(&read_input(arg)?)?)
}

fn read_sequence(arg: &str) -> Result<VarWordSequence, Failure> {
    let mut v = read_json(arg)?;
    // derive-b and pipeline outputs carry the sequence in a field.
    for field in ["source", "y"] {
        if let Some(inner) = v.get_mut(field) {
            v = inner.take();
            break;
        }
    }
    Ok(serde_json::from_value(v)?)
}

fn limited<T>(items: Vec<T>, limit: Option<usize>) -> impl Iterator<Item = T> {
    let n = limit.unwrap_or(usize::MAX);
    items.into_iter().take(n)
}

fn build_colouring(args: &ColourArgs, arity: Arity) -> Result<Colouring, Failure> {
    if let Some(text) = &args.colouring {
        let c: Colouring = serde_json::from_value(read_json(text)?)?;
        if c.arity() != arity {
            return Err(Failure::Usage(format!(
                "colouring has arity {:?}, this command needs {arity:?}",
                c.arity()
            )));
        }
        return Ok(c);
    }
    let rule = if let Some(path) = &args.table {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        Rule::Table {
            entries: serde_json::from_str(&text)?,
        }
    } else {
        let Some(family) = &args.family else {
            return Err(Failure::Usage("one of --family, --table or --colouring is required".into()));
        };
        match family.as_str() {
            "random" => Rule::Random { seed: args.seed },
            "constant" => Rule::Constant { colour: args.colour },
            "matrix-bit" => Rule::MatrixBit {
                row: args.row,
                col: args.col,
            },
            name => serde_json::from_value(serde_json::json!({ "family": name }))
                .map_err(|_| Failure::Usage(format!("unknown colouring family {name:?}")))?,
        }
    };
    Ok(Colouring::new(arity, args.colours, rule)?)
}

fn span(shape: &Shape, blocks: Option<&str>, sequence: Option<&str>, kind: Kind, bound: Option<usize>, limit: Option<usize>, out: &mut Out) -> Run {
    if let Some(blocks) = blocks {
        let seq = parse_block_sequence(&read_input(blocks)?, shape.k, shape.mode)?;
        let elements = match bound {
            None => vector::span(&seq)?,
            Some(_) => return Err(Failure::Usage("--bound applies to word spans".into())),
        };
        for p in limited(elements, limit) {
            out.line(&p)?;
        }
        return Ok(());
    }
    let seq = read_sequence(sequence.expect("clap requires one input"))?;
    let words = match kind {
        Kind::Words => word::span_words(&seq, bound),
        Kind::Negt => word::span_negt(&seq, bound)?,
        Kind::Letters => word::span_letters(&seq),
    };
    for w in limited(words, limit) {
        out.line(&w)?;
    }
    Ok(())
}

enum Operand {
    Vector(BlockVector),
    Vectors(BlockSequence),
    Word(Word),
    Words(Vec<Word>),
}

fn operand(shape: &Shape, arg: &str) -> Result<Operand, Failure> {
    let text = read_input(arg)?;
    let v: Value = serde_json::from_str(&text)?;
    let is_word = |v: &Value| v.get("symbols").is_some();
    match &v {
        Value::Object(_) if is_word(&v) => Ok(Operand::Word(serde_json::from_value(v)?)),
        Value::Object(_) => Ok(Operand::Vector(parse_block_vector(&text, shape.k, shape.mode)?)),
        Value::Array(items) if items.first().is_some_and(is_word) => {
            Ok(Operand::Words(serde_json::from_value(v)?))
        }
        Value::Array(_) => Ok(Operand::Vectors(parse_block_sequence(&text, shape.k, shape.mode)?)),
        _ => Err(Failure::Domain("expected a vector, a word, or an array of either".into())),
    }
}

fn dist(shape: &Shape, left: &str, right: &str, out: &mut Out) -> Run {
    let d = match (operand(shape, left)?, operand(shape, right)?) {
        (Operand::Vector(a), Operand::Vector(b)) => {
            if (a.k(), a.mode()) != (b.k(), b.mode()) {
                return Err(Failure::Domain("vectors differ in k or mode".into()));
            }
            gowers::Distance::Finite(a.linf_dist(&b))
        }
        (Operand::Vectors(a), Operand::Vectors(b)) => seq_dist(&a, &b),
        (Operand::Word(a), Operand::Word(b)) => dist_words(&a, &b),
        (Operand::Words(a), Operand::Words(b)) => dist_seqs(&a, &b),
        _ => return Err(Failure::Domain("operands have different kinds".into())),
    };
    out.line(&serde_json::json!({ "distance": d }))
}

fn tetris(shape: &Shape, vector: Option<&str>, word: Option<&str>, power: u32, out: &mut Out) -> Run {
    if let Some(v) = vector {
        let mut p = parse_block_vector(&read_input(v)?, shape.k, shape.mode)?;
        for _ in 0..power {
            p = p.tetris()?;
        }
        return out.line(&p);
    }
    let w: Word = serde_json::from_value(read_json(word.expect("clap requires one input"))?)?;
    out.line(&w.tetris_pow(power))
}

fn decode(shape: &Shape, sequence: &str, blocks: &str, sigmas: Option<&str>, deltas: Option<&str>, out: &mut Out) -> Run {
    let y = read_sequence(sequence)?;
    let k = shape.k.or(Some(y.k()));
    let mode = shape.mode.or(Some(y.mode()));
    let a = parse_block_sequence(&read_input(blocks)?, k, mode)?;
    let sigmas: Vec<Letter> = match (sigmas, deltas) {
        (Some(s), _) => serde_json::from_value(read_json(s)?)?,
        (None, Some(d)) => {
            let deltas: Vec<Vec<u8>> = serde_json::from_value(read_json(d)?)?;
            product_to_sigmas(&y, &deltas)?
        }
        (None, None) => unreachable!("clap requires one of them"),
    };
    out.line(&decode_witness(&y, &a, &sigmas)?)
}

#[derive(serde::Serialize)]
struct SizedSet<'a> {
    count: u128,
    set: &'a PerfectSetDescription,
}

fn perfect_sets(sequence: &str, enumerate: bool, index: Option<usize>, limit: Option<usize>, out: &mut Out) -> Run {
    let y = read_sequence(sequence)?;
    let sets = gowers::encoding::perfect_sets(&y)?;
    if enumerate {
        let i = index.expect("clap requires --index");
        let set = sets
            .get(i)
            .ok_or_else(|| Failure::Domain(format!("no perfect set P_{i}: {} columns", sets.len())))?;
        if set.classes().len() >= 32 {
            return Err(Failure::Domain("too many free classes to enumerate".into()));
        }
        for delta in limited(set.enumerate(), limit) {
            out.line(&delta)?;
        }
        return Ok(());
    }
    for set in sets.iter().filter(|s| index.is_none_or(|i| s.index() == i)) {
        out.line(&SizedSet {
            count: set.count(),
            set,
        })?;
    }
    Ok(())
}

fn report_outcome<W: serde::Serialize>(outcome: &Outcome<W>, out: &mut Out) -> Run {
    out.line(outcome)?;
    if outcome.is_exhausted() {
        return Err(Failure::Exhausted);
    }
    Ok(())
}

fn verify(witness: &str, args: &ColourArgs, out: &mut Out) -> Run {
    let v = read_json(witness)?;
    if v.get("status").and_then(Value::as_str) == Some("exhausted") {
        return Err(Failure::Domain("an exhaustion certificate has no witness to verify".into()));
    }
    if v.get("blocks").is_some() {
        let w: VectorWitness = serde_json::from_value(v)?;
        let report = verify_witness(&w, &build_colouring(args, Arity::Vector)?)?;
        out.line(&report)?;
        return if report.ok { Ok(()) } else { Err(Failure::Domain("verification failed".into())) };
    }
    if v.get("words").is_some() {
        let w: GhjWitness = serde_json::from_value(v)?;
        let report = verify_ghj_witness(&w, &build_colouring(args, Arity::Word)?)?;
        out.line(&report)?;
        return if report.ok { Ok(()) } else { Err(Failure::Domain("verification failed".into())) };
    }
    if v.get("y").is_some() {
        let r: PipelineResult = serde_json::from_value(v)?;
        let report = verify_pipeline(&r, &build_colouring(args, Arity::Pair)?)?;
        out.line(&report)?;
        return if report.ok { Ok(()) } else { Err(Failure::Domain("verification failed".into())) };
    }
    Err(Failure::Domain("not a witness: expected a blocks, words or y field".into()))
}

fn run(cli: Cli, out: &mut Out) -> Run {
    match cli.command {
        Command::Span {
            shape,
            blocks,
            sequence,
            kind,
            bound,
            limit,
        } => span(&shape, blocks.as_deref(), sequence.as_deref(), kind, bound, limit, out),
        Command::Dist { shape, left, right } => dist(&shape, &left, &right, out),
        Command::Tetris {
            shape,
            vector,
            word,
            power,
        } => tetris(&shape, vector.as_deref(), word.as_deref(), power, out),
        Command::Encode { sequence } => {
            let y = read_sequence(&sequence)?;
            out.line(&serde_json::json!({
                "phi": phi_encode(&y)?,
                "psi": psi_encode(&y),
            }))
        }
        Command::Decode {
            shape,
            sequence,
            blocks,
            sigmas,
            deltas,
        } => decode(&shape, &sequence, &blocks, sigmas.as_deref(), deltas.as_deref(), out),
        Command::DeriveB { sequence } => out.line(&DerivedPair::new(&read_sequence(&sequence)?)?),
        Command::PerfectSets {
            sequence,
            enumerate,
            index,
            limit,
        } => perfect_sets(&sequence, enumerate, index, limit, out),
        Command::Search {
            kind,
            mode,
            k,
            n,
            m,
            radius,
            problem,
            colouring,
            parallel,
            format: _,
        } => match kind {
            SearchKind::Vector => {
                let (Some(k), Some(n), Some(m)) = (k, n, m) else {
                    return Err(Failure::Usage("vector search needs --k, --N and --m".into()));
                };
                let problem = SearchProblem {
                    mode,
                    k,
                    colours: colouring.colours,
                    n,
                    m,
                    radius,
                };
                let c = build_colouring(&colouring, Arity::Vector)?;
                report_outcome(&search_vectors(&problem, &c, parallel)?, out)
            }
            SearchKind::Word => {
                let Some(problem) = problem else {
                    return Err(Failure::Usage("word search needs --problem".into()));
                };
                let problem: GhjProblem = serde_json::from_value(read_json(&problem)?)?;
                let c = build_colouring(&colouring, Arity::Word)?;
                report_outcome(&search_ghj(&problem, &c, parallel)?, out)
            }
        },
        Command::Verify { witness, colouring } => verify(&witness, &colouring, out),
        Command::Pipeline {
            problem,
            colouring,
            verify,
            parallel,
        } => {
            let problem: PipelineProblem = serde_json::from_value(read_json(&problem)?)?;
            let c = build_colouring(&colouring, Arity::Pair)?;
            let outcome = parametrized_pipeline(&problem, &c, parallel)?;
            out.line(&outcome)?;
            match outcome {
                Outcome::Exhausted(_) => Err(Failure::Exhausted),
                Outcome::Witness(result) if verify => {
                    let report = verify_pipeline(&result, &c)?;
                    out.line(&report)?;
                    if report.ok {
                        Ok(())
                    } else {
                        Err(Failure::Domain("sampled verification failed".into()))
                    }
                }
                Outcome::Witness(_) => Ok(()),
            }
        }
        Command::Selftest => {
            let checks = gowers::selftest::run();
            for c in &checks {
                out.line(c)?;
            }
            if checks.iter().all(|c| c.ok) {
                Ok(())
            } else {
                Err(Failure::Domain("self-test failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let mut out = Out {
        inner: BufWriter::new(io::stdout().lock()),
    };
    let result = run(cli, &mut out);
    let _ = out.inner.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Exhausted) => ExitCode::from(3),
        Err(Failure::Usage(msg)) => {
            eprintln!("gowers: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("gowers: {msg}");
            ExitCode::from(1)
        }
    }
}
