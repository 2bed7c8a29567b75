use std::io::{self, BufRead, Write};
use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use pathmine_cli::{
    build_extractor, cmd_build_index, cmd_explain, cmd_extract, exit_code, load_graph, open_input, open_output, Config,
    ExtractionRequest, UsageError, EXIT_OK, EXIT_USAGE,
};

/// Mine grounded multi-hop commonsense paths from a ConceptNet-style graph.
#[derive(Parser, Debug)]
#[command(name = "pathmine", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ingest an assertion dump and write a binary index.
    BuildIndex {
        /// Tab-separated assertion dump ('-' for standard input).
        #[arg(long)]
        input: PathBuf,
        /// Index file to write.
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Extract paths for JSON-lines requests.
    Extract {
        #[arg(long)]
        graph: PathBuf,
        /// Requests, one JSON object per line ('-' for standard input).
        #[arg(long, default_value = "-")]
        input: PathBuf,
        /// Results, one JSON object per line ('-' for standard output).
        #[arg(long, default_value = "-")]
        output: PathBuf,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long)]
        workers: Option<NonZeroUsize>,
        /// Add per-request wall-clock time to the stats (output is then no
        /// longer reproducible byte for byte).
        #[arg(long)]
        timings: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Print the scored trees and selection for one context/query pair.
    Explain {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, requires = "query", conflicts_with = "input")]
        context: Option<String>,
        #[arg(long, requires = "context")]
        query: Option<String>,
        /// File whose first non-blank line is a JSON request.
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    lang: Option<String>,
}

impl Common {
    fn resolve(&self) -> anyhow::Result<Config> {
        let mut config = match &self.config {
            Some(path) => Config::load(path).map_err(|e| UsageError(format!("{e:#}")))?,
            None => Config::default(),
        };
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(lang) = &self.lang {
            config.lang = lang.clone();
        }
        config.validate().map_err(|e| UsageError(e.to_string()))?;
        Ok(config)
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::BuildIndex { input, output, common } => {
            let config = common.resolve()?;
            cmd_build_index(&input, &output, &config, &mut io::stderr())?;
        }
        Command::Extract {
            graph,
            input,
            output,
            workers,
            timings,
            common,
        } => {
            let config = common.resolve()?;
            let workers = workers
                .or_else(|| std::thread::available_parallelism().ok())
                .map_or(1, NonZeroUsize::get);
            let (g, stats) = load_graph(&graph, &config)?;
            let extractor = build_extractor(&g, stats, &config)?;
            let mut source = open_input(&input)?;
            let mut sink = open_output(&output)?;
            let summary = cmd_extract(&extractor, &mut source, &mut sink, workers, timings)?;
            eprintln!("extract: requests={} failed={}", summary.requests, summary.failed);
        }
        Command::Explain {
            graph,
            context,
            query,
            input,
            common,
        } => {
            let config = common.resolve()?;
            let (context, query) = match (context, query, input) {
                (Some(c), Some(q), _) => (c, q),
                (_, _, Some(path)) => {
                    let line = BufRead::lines(open_input(&path)?)
                        .find(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
                        .context("request file is empty")??;
                    let req = ExtractionRequest::parse(&line).map_err(anyhow::Error::msg)?;
                    (req.context, req.query)
                }
                _ => return Err(UsageError("explain needs --context and --query, or --input".into()).into()),
            };
            let (g, stats) = load_graph(&graph, &config)?;
            let extractor = build_extractor(&g, stats, &config)?;
            let mut out = io::stdout().lock();
            cmd_explain(&extractor, &context, &query, &mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK } as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
