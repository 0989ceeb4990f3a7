use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use regfn::compo::random::random_machine;
use regfn::compo::{
    decompose_stage, deserialize, equivalent_bruteforce, serialize, serialize_pretty, Equivalence, MooreFn, ReverseFn,
    Stage, Term, WordFunction,
};
use regfn::krohnrhodes::{build_as_n, build_bit};
use regfn::machines::{fixtures, is_functional_bruteforce, FunctionalReport, MachineFile, Mode};
use regfn::perm::Limits;
use regfn::reversal::build_rbit;
use regfn::words::Word;

#[derive(Parser)]
#[command(name = "regfn", version, about = "Decompose, evaluate and verify regular functions")]
struct Cli {
    /// Indent JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a machine on a comma separated word.
    Run {
        machine: PathBuf,
        #[arg(allow_hyphen_values = true)]
        word: String,
        #[arg(long, conflicts_with = "rest")]
        trunc: bool,
        #[arg(long)]
        rest: bool,
    },
    /// Decompose a machine or relation up to the given stage.
    Decompose {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value = "full")]
        stage: Stage,
    },
    /// Evaluate a term, one word per input.
    Eval {
        term: PathBuf,
        #[arg(allow_hyphen_values = true)]
        words: Vec<String>,
    },
    /// Compare a term against a term or machine on all short inputs.
    Verify {
        term: PathBuf,
        target: PathBuf,
        #[arg(long)]
        max_len: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Bounded existence and uniqueness check of a relation's outputs.
    CheckFunctional {
        relation: PathBuf,
        #[arg(long)]
        max_len: usize,
    },
    /// Emit a fixture machine: parity, last, asn:<n>, bit or rbit.
    Fixtures {
        #[arg(long)]
        name: String,
        #[command(flatten)]
        out: Out,
    },
    /// Emit a seeded random transparent Moore machine.
    Random {
        #[arg(long)]
        states: usize,
        #[arg(long)]
        alphabet: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Args)]
struct Out {
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// A failed invocation: exit code 2 with a message on stderr.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

fn limits() -> Result<Limits, Usage> {
    match std::env::var("REGFN_CAP_FACTORIAL") {
        Ok(v) => {
            let max_group = v
                .trim()
                .parse()
                .map_err(|_| Usage(format!("REGFN_CAP_FACTORIAL: bad value `{v}`")))?;
            Ok(Limits { max_group })
        }
        Err(_) => Ok(Limits::default()),
    }
}

fn read(path: &Path) -> Result<String, Usage> {
    fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))
}

fn read_machine(path: &Path) -> Result<MachineFile, Usage> {
    MachineFile::parse(&read(path)?).map_err(|e| Usage(format!("{}: {e}", path.display())))
}

fn read_term(path: &Path) -> Result<Term, Usage> {
    deserialize(&read(path)?).map_err(|e| Usage(format!("{}: {e}", path.display())))
}

fn word(text: &str) -> Result<Word, Usage> {
    Word::parse(text).map_err(|e| Usage(format!("word `{text}`: {e}")))
}

/// Stdout without the panic on a closed pipe.
fn say(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn render(v: &Value, pretty: bool) -> String {
    if pretty {
        serde_json::to_string_pretty(v).expect("json values serialize")
    } else {
        v.to_string()
    }
}

/// Writes `text` to `out` and returns a summary, or returns the document
/// itself when there is no output file.
fn emit(out: Option<&Path>, text: String, summary: Value) -> Result<Option<Value>, Usage> {
    match out {
        Some(p) => {
            fs::write(p, text + "\n").map_err(|e| Usage(format!("{}: {e}", p.display())))?;
            Ok(Some(summary))
        }
        None => {
            say(&text);
            Ok(None)
        }
    }
}

fn outcome(r: &Result<Word, String>) -> Value {
    match r {
        Ok(w) => json!({"output": w.to_string()}),
        Err(e) => json!({"error": e}),
    }
}

fn execute(cli: &Cli) -> Result<(Option<Value>, u8), Usage> {
    let pretty = cli.pretty;
    match &cli.command {
        Command::Run {
            machine,
            word: text,
            trunc,
            rest,
        } => {
            let x = word(text)?;
            let out = match read_machine(machine)? {
                MachineFile::Moore(m) => match (trunc, rest) {
                    (true, _) => m.run_trunc(&x)?,
                    (_, true) => m.run_rest(&x)?,
                    _ => m.run(&x)?,
                },
                MachineFile::ReverseMoore(r) => match (trunc, rest) {
                    (true, _) => r.run_trunc(&x)?,
                    (_, true) => r.run_rest(&x)?,
                    _ => r.run(&x)?,
                },
                MachineFile::Nfa(a) => return Ok((Some(json!({"accepts": a.accepts(&x)?})), 0)),
                MachineFile::Relation(r) => r.unique_output(&[x])?,
            };
            Ok((Some(json!({"output": out.to_string()})), 0))
        }
        Command::Decompose { input, output, stage } => {
            let t = decompose_stage(&read_machine(input)?, *stage, limits()?)?;
            let census: serde_json::Map<String, Value> = t
                .leaf_census()
                .into_iter()
                .map(|(k, n)| (k.to_string(), json!(n)))
                .collect();
            let text = if pretty { serialize_pretty(&t) } else { serialize(&t) };
            let summary = json!({
                "output": output.as_ref().map(|p| p.display().to_string()),
                "nodes": t.nodes().len(),
                "leaves": census,
            });
            Ok((emit(output.as_deref(), text, summary)?, 0))
        }
        Command::Eval { term, words } => {
            let t = read_term(term)?;
            let xs = words.iter().map(|s| word(s)).collect::<Result<Vec<_>, _>>()?;
            Ok((Some(json!({"output": t.eval(&xs)?.to_string()})), 0))
        }
        Command::Verify {
            term,
            target,
            max_len,
            jobs,
        } => {
            let t = read_term(term)?;
            let text = read(target)?;
            let target_machine;
            let other: Box<dyn WordFunction + '_> = if serde_json::from_str::<Value>(&text)
                .ok()
                .is_some_and(|v| v.get("kind").and_then(Value::as_str) == Some("comp"))
            {
                Box::new(deserialize(&text).map_err(|e| Usage(format!("{}: {e}", target.display())))?)
            } else {
                target_machine = MachineFile::parse(&text).map_err(|e| Usage(format!("{}: {e}", target.display())))?;
                match &target_machine {
                    MachineFile::Moore(m) => Box::new(MooreFn(m, Mode::Trunc)),
                    MachineFile::ReverseMoore(r) => Box::new(ReverseFn(r, Mode::Trunc)),
                    MachineFile::Relation(r) => Box::new(r.clone()),
                    MachineFile::Nfa(_) => return Err(Usage("an nfa is not a function; use a relation".into())),
                }
            };
            match equivalent_bruteforce(&t, other.as_ref(), *max_len, (*jobs).max(1))? {
                Equivalence::EqualUpTo { maxlen, checked } => Ok((
                    Some(json!({"result": "equal", "max_len": maxlen, "checked": checked})),
                    0,
                )),
                Equivalence::Counterexample { inputs, left, right } => Ok((
                    Some(json!({
                        "result": "counterexample",
                        "inputs": inputs.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
                        "term": outcome(&left),
                        "target": outcome(&right),
                    })),
                    1,
                )),
            }
        }
        Command::CheckFunctional { relation, max_len } => {
            let MachineFile::Relation(r) = read_machine(relation)? else {
                return Err(Usage("check-functional needs a relation file".into()));
            };
            let strs = |ws: &[Word]| ws.iter().map(|w| w.to_string()).collect::<Vec<_>>();
            let v = match is_functional_bruteforce(&r, *max_len)? {
                FunctionalReport::FunctionalUpTo(n) => json!({"functional": true, "max_len": n}),
                FunctionalReport::NotTotal { input } => {
                    json!({"functional": false, "reason": "no_output", "input": strs(&input)})
                }
                FunctionalReport::NotUnique { input, outputs } => json!({
                    "functional": false,
                    "reason": "two_outputs",
                    "input": strs(&input),
                    "outputs": strs(&outputs),
                }),
            };
            Ok((Some(v), 0))
        }
        Command::Fixtures { name, out } => {
            let m = match name.as_str() {
                "parity" => MachineFile::Moore(fixtures::parity()),
                "last" => MachineFile::Moore(fixtures::last()),
                "bit" => MachineFile::Moore(build_bit()),
                "rbit" => MachineFile::ReverseMoore(build_rbit()),
                other => match other.strip_prefix("asn:").map(str::parse::<usize>) {
                    Some(Ok(n)) if n > 0 => MachineFile::Moore(build_as_n(n, limits()?)?),
                    _ => return Err(Usage(format!("unknown fixture `{other}`"))),
                },
            };
            let text = render(&m.to_json(), pretty);
            let summary = json!({"output": out.output.as_ref().map(|p| p.display().to_string()), "kind": m.kind()});
            Ok((emit(out.output.as_deref(), text, summary)?, 0))
        }
        Command::Random {
            states,
            alphabet,
            seed,
            out,
        } => {
            if *states == 0 || *alphabet == 0 {
                return Err(Usage("--states and --alphabet must be positive".into()));
            }
            let m = MachineFile::Moore(random_machine(*states, *alphabet, *seed));
            let text = render(&m.to_json(), pretty);
            let summary = json!({"output": out.output.as_ref().map(|p| p.display().to_string()), "kind": m.kind()});
            Ok((emit(out.output.as_deref(), text, summary)?, 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok((doc, code)) => {
            if let Some(v) = doc {
                say(&render(&v, cli.pretty));
            }
            ExitCode::from(code)
        }
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
