use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use serde_json::Value;
use tokio::net::TcpListener;

use omt_client::{ClientError, OmtClient};
use omt_core::api::{codes, ErrorBody};
use omt_core::classify::ClassificationResult;
use omt_core::omt::session::{read_script, AnswerSchema};
use omt_core::omt::{Answer, Nav, OmtTree, Question, SessionView};
use omt_core::suite::{SuiteConfig, SuiteReport};
use omt_service::{serve, AppState, Config};

const EXIT_PARSE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_SCRIPT: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_BIND: u8 = 5;

#[derive(Parser)]
#[command(name = "omt", version, about = "MILP modelling toolkit")]
struct Cli {
    /// Service to talk to. Without it an in-process service is started.
    #[arg(long, global = true, env = "OMT_SERVER")]
    server: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tag every constraint of an LP file with its constraint type.
    Classify {
        file: PathBuf,
        /// Print the JSON payload instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Build a model by walking the modelling tree.
    Elicit {
        /// Answers to replay instead of prompting.
        #[arg(long)]
        script: Option<PathBuf>,
        /// Destination of the LP file, `-` for standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check every logic encoding against exhaustive enumeration.
    VerifyEncodings {
        #[arg(long, default_value_t = 10)]
        max_n: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        instances: Option<usize>,
        #[arg(long, hide = true)]
        inject_big_m_one: bool,
    },
    /// Write the ontology as OWL/XML.
    ExportOntology {
        #[arg(long, default_value = "milp.owl")]
        out: PathBuf,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, env = "OMT_PORT")]
        port: Option<u16>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }

    fn io(what: &Path, e: io::Error) -> Self {
        Failure::new(EXIT_IO, format!("{}: {e}", what.display()))
    }
}

impl From<ClientError> for Failure {
    fn from(e: ClientError) -> Self {
        match &e {
            ClientError::Api { body, .. } => Failure::new(exit_for(body), body.to_string()),
            _ => Failure::new(EXIT_IO, e.to_string()),
        }
    }
}

fn exit_for(body: &ErrorBody) -> u8 {
    if body.code == codes::PARSE_ERROR {
        EXIT_PARSE
    } else {
        EXIT_VALIDATION
    }
}

type Outcome = Result<(), Failure>;

#[tokio::main]
async fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Serve { port } => run_serve(port).await,
        command => match connect(cli.server).await {
            Ok(client) => run(&client, command).await,
            Err(f) => Err(f),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

async fn connect(server: Option<String>) -> Result<OmtClient, Failure> {
    if let Some(url) = server {
        return Ok(OmtClient::new(url));
    }
    let listener = TcpListener::bind("127.0.0.1:0").await.map_err(|e| Failure::new(EXIT_BIND, e.to_string()))?;
    let addr = listener.local_addr().map_err(|e| Failure::new(EXIT_BIND, e.to_string()))?;
    let state = AppState::new(OmtTree::embedded(), Duration::from_secs(3600));
    tokio::spawn(serve(listener, state, std::future::pending()));
    Ok(OmtClient::new(format!("http://{addr}")))
}

async fn run(client: &OmtClient, command: Command) -> Outcome {
    match command {
        Command::Classify { file, json } => classify(client, &file, json).await,
        Command::Elicit { script, out } => elicit(client, script.as_deref(), out.as_deref()).await,
        Command::VerifyEncodings { max_n, seed, instances, inject_big_m_one } => {
            let mut cfg = SuiteConfig { max_binaries: max_n, fault_big_m_one: inject_big_m_one, ..SuiteConfig::default() };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(i) = instances {
                cfg.instances = i;
            }
            verify(client, &cfg).await
        }
        Command::ExportOntology { out } => {
            let owl = client.ontology().await?;
            write_output(Some(&out), &owl)
        }
        Command::Serve { .. } => unreachable!("handled before connecting"),
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        None => print_stdout(text),
        Some(p) if p == Path::new("-") => print_stdout(text),
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::io(p, e)),
    }
}

fn print_stdout(text: &str) -> Outcome {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Failure::new(EXIT_IO, e.to_string()))
}

async fn classify(client: &OmtClient, file: &Path, json: bool) -> Outcome {
    let text = std::fs::read_to_string(file).map_err(|e| Failure::io(file, e))?;
    // An empty file is an empty model here; the service rejects empty bodies.
    if text.trim().is_empty() {
        let empty = ClassificationResult::default();
        return print_stdout(&if json { empty.to_json() + "\n" } else { table(&empty) });
    }
    match client.classify_text(&text).await {
        Ok(payload) => {
            if json {
                return print_stdout(&(payload + "\n"));
            }
            let result: ClassificationResult =
                serde_json::from_str(&payload).map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
            print_stdout(&table(&result))
        }
        Err(ClientError::Api { body, .. }) if json => {
            eprintln!("{}", serde_json::to_string(&body).expect("error bodies serialize"));
            Err(Failure::new(exit_for(&body), String::new()))
        }
        Err(e) => Err(e.into()),
    }
}

fn table(r: &ClassificationResult) -> String {
    let rows: Vec<[String; 4]> = r
        .constraints
        .iter()
        .map(|c| {
            let p = c.primary();
            let others: Vec<String> = c.tags[1..].iter().map(|t| t.name.to_string()).collect();
            [c.name.clone(), p.omt_node_id.to_string(), p.name.to_string(), others.join(", ")]
        })
        .collect();
    let header = ["CONSTRAINT", "NODE", "TAG", "ALSO"].map(String::from);
    let width = |i: usize| rows.iter().chain([&header]).map(|r| r[i].len()).max().unwrap_or(0);
    let (w0, w1, w2) = (width(0), width(1), width(2));
    let mut out = String::new();
    for row in std::iter::once(&header).chain(&rows) {
        let line = format!("{:w0$}  {:>w1$}  {:w2$}  {}", row[0], row[1], row[2], row[3]);
        out.push_str(line.trim_end());
        out.push('\n');
    }
    if !r.pattern_groups.is_empty() {
        out.push_str("\npattern groups\n");
        for g in &r.pattern_groups {
            let nodes: Vec<String> = g.node_ids.iter().map(u32::to_string).collect();
            out.push_str(&format!(
                "  {} (nodes {}) on {}: {}\n",
                g.tag,
                nodes.join("+"),
                g.indicator,
                g.constraints.join(", ")
            ));
        }
    }
    out
}

async fn elicit(client: &OmtClient, script: Option<&Path>, out: Option<&Path>) -> Outcome {
    let view = client.create_session().await?;
    let id = view.id.clone();
    let last = match script {
        Some(path) => replay(client, &id, path).await?,
        None => interactive(client, view).await?,
    };
    if !last.complete {
        return Err(Failure::new(
            EXIT_SCRIPT,
            format!("answers ended at step {} before the session was finished", last.steps),
        ));
    }
    let lp = client.model_lp(&id).await?;
    write_output(out, &lp)
}

async fn replay(client: &OmtClient, id: &str, path: &Path) -> Result<SessionView, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let answers = read_script(&text).map_err(|e| Failure::new(EXIT_SCRIPT, format!("{}: {e}", path.display())))?;
    let mut last = client.session(id).await?;
    for (step, answer) in answers.iter().enumerate() {
        last = client.answer(id, answer).await.map_err(|e| match e {
            ClientError::Api { body, .. } => {
                Failure::new(EXIT_SCRIPT, format!("step {step}: {}: {}", body.code, body.message))
            }
            other => other.into(),
        })?;
    }
    Ok(last)
}

fn render(q: &Question) -> String {
    let mut s = format!("[{}] {}\n{}\n", q.node, q.label, q.question);
    if let Some(r) = &q.remark {
        s.push_str(&format!("note: {r}\n"));
    }
    match &q.answer {
        AnswerSchema::Choice { options } => {
            for o in options {
                s.push_str(&format!("  {}) {}\n", o.index, o.label));
            }
        }
        AnswerSchema::Params { builder, params, .. } => {
            s.push_str(&format!("parameters for {builder} as a JSON object:\n"));
            for p in params {
                let opt = if p.optional { ", optional" } else { "" };
                s.push_str(&format!("  {} ({:?}{opt})\n", p.name, p.kind));
            }
            if !q.declared_variables.is_empty() {
                s.push_str(&format!("declared: {}\n", q.declared_variables.join(", ")));
            }
        }
    }
    s.push_str("back, restart, finish > ");
    s
}

fn parse_answer(line: &str) -> Result<Answer, String> {
    match line {
        "back" => return Ok(Answer::Nav(Nav::Back)),
        "restart" => return Ok(Answer::Nav(Nav::RestartBranch)),
        "finish" => return Ok(Answer::Nav(Nav::FinishBranch)),
        _ => {}
    }
    if let Ok(i) = line.parse::<usize>() {
        return Ok(Answer::Choose(i));
    }
    match serde_json::from_str::<Value>(line) {
        Ok(Value::Object(map)) => Ok(serde_json::from_value(Value::Object(map.clone())).unwrap_or(Answer::Params(map))),
        _ => Err(format!("cannot read `{line}`: expected a number, back, restart, finish or a JSON object")),
    }
}

async fn interactive(client: &OmtClient, mut view: SessionView) -> Result<SessionView, Failure> {
    let stdin = io::stdin();
    let mut lines = stdin.lock().lines();
    while !view.complete {
        if let Some(q) = &view.question {
            eprint!("{}", render(q));
        }
        let Some(line) = lines.next() else {
            return Err(Failure::new(EXIT_SCRIPT, format!("input ended at step {} before the session was finished", view.steps)));
        };
        let line = line.map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let answer = match parse_answer(line) {
            Ok(a) => a,
            Err(msg) => {
                eprintln!("{msg}");
                continue;
            }
        };
        match client.answer(&view.id, &answer).await {
            Ok(v) => view = v,
            Err(ClientError::Api { body, .. }) => eprintln!("{}: {}", body.code, body.message),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(view)
}

async fn verify(client: &OmtClient, cfg: &SuiteConfig) -> Outcome {
    let report = client.verify_encodings(cfg).await?;
    print_stdout(&summary(&report))?;
    if report.all_equivalent() {
        Ok(())
    } else {
        Err(Failure::new(EXIT_VALIDATION, format!("{} of {} cases failed", report.cases.len() - report.passed(), report.cases.len())))
    }
}

fn summary(r: &SuiteReport) -> String {
    let mut out = String::new();
    let mut builders: Vec<&str> = Vec::new();
    for c in &r.cases {
        if !builders.contains(&c.builder.as_str()) {
            builders.push(&c.builder);
        }
    }
    for b in builders {
        let cases: Vec<_> = r.cases.iter().filter(|c| c.builder == b).collect();
        let passed = cases.iter().filter(|c| c.passed()).count();
        let verdict = if passed == cases.len() { "PASS" } else { "FAIL" };
        let points: u64 = cases.iter().map(|c| c.points).sum();
        out.push_str(&format!("{verdict} {b}: {passed}/{} cases, {points} points\n", cases.len()));
        for c in cases.iter().filter(|c| !c.passed()) {
            out.push_str(&format!("  n={} #{}: {}\n", c.binaries, c.instance, c.description));
            if let Some(e) = &c.error {
                out.push_str(&format!("    error: {e}\n"));
            }
            if let Some(x) = c.counterexamples.first() {
                out.push_str(&format!(
                    "    counterexample {}: expected {}, encoding allows {}\n",
                    x.assignment, x.expected, x.encoded
                ));
            }
        }
    }
    out.push_str(&format!(
        "{}/{} cases equivalent, seed {}, {} ms\n",
        r.passed(),
        r.cases.len(),
        r.config.seed,
        r.elapsed_ms
    ));
    out
}

async fn run_serve(port: Option<u16>) -> Outcome {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info,tower_http=debug".into()),
        )
        .init();
    let mut config = Config::from_env().map_err(|e| Failure::new(EXIT_BIND, e))?;
    if let Some(p) = port {
        config.port = p;
    }
    let listener = TcpListener::bind(("0.0.0.0", config.port))
        .await
        .map_err(|e| Failure::new(EXIT_BIND, format!("cannot bind port {}: {e}", config.port)))?;
    eprintln!("listening on {}", listener.local_addr().map(|a| a.to_string()).unwrap_or_default());
    let state = AppState::new(OmtTree::embedded(), config.session_ttl);
    let shutdown = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    serve(listener, state, shutdown).await.map_err(|e| Failure::new(EXIT_IO, e.to_string()))
}
