//! Subcommand implementations behind the `pathmine` binary.

use std::cell::RefCell;
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context};
use pathmine::batch::for_each_ordered;
use pathmine::selector::kept_children;
use pathmine::{ingest_csv, load_index, save_index, Extraction, Extractor, KnowledgeGraph, NodeId, PathStats};

mod config;
mod jsonl;

pub use config::Config;
pub use jsonl::{salvage_id, ExtractionRequest, ExtractionResult, RequestStats};

/// Marks an error caused by how the tool was invoked (exit status 1) rather
/// than by the data it was given (exit status 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.chain().any(|e| e.is::<UsageError>()) {
        EXIT_USAGE
    } else {
        EXIT_DATA
    }
}

/// Opens `path`, or standard input for `-`.
pub fn open_input(path: &Path) -> anyhow::Result<Box<dyn BufRead>> {
    if path == Path::new("-") {
        return Ok(Box::new(BufReader::new(io::stdin())));
    }
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(Box::new(BufReader::new(f)))
}

/// Creates `path`, or writes to standard output for `-`.
pub fn open_output(path: &Path) -> anyhow::Result<Box<dyn Write>> {
    if path == Path::new("-") {
        return Ok(Box::new(BufWriter::new(io::stdout())));
    }
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(Box::new(BufWriter::new(f)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexSummary {
    pub concepts: usize,
    pub edges: usize,
    pub relations: usize,
}

/// Ingests a dump, computes walk statistics and writes the index. The
/// ingestion report goes to `log`.
pub fn cmd_build_index(dump: &Path, out: &Path, config: &Config, log: &mut dyn Write) -> anyhow::Result<IndexSummary> {
    let source = open_input(dump)?;
    let (graph, report) = ingest_csv(source, &config.lang).with_context(|| format!("ingesting {}", dump.display()))?;
    writeln!(log, "ingest: {report}")?;
    let stats = PathStats::compute(&graph)?;
    writeln!(
        log,
        "graph: concepts={} edges={} relations={} walks3={} walks4={}",
        graph.node_count(),
        graph.edge_count(),
        graph.relation_count(),
        stats.walks_len3,
        stats.walks_len4
    )?;
    let mut sink = BufWriter::new(File::create(out).with_context(|| format!("creating {}", out.display()))?);
    save_index(&graph, Some(&stats), &mut sink)?;
    sink.flush()?;
    Ok(IndexSummary {
        concepts: graph.node_count(),
        edges: graph.edge_count(),
        relations: graph.relation_count(),
    })
}

/// Loads an index and its walk statistics, computing them if the file has
/// none.
pub fn load_graph(path: &Path, config: &Config) -> anyhow::Result<(KnowledgeGraph, PathStats)> {
    let file = File::open(path).with_context(|| format!("opening index {}", path.display()))?;
    let index = load_index(BufReader::new(file)).with_context(|| format!("loading index {}", path.display()))?;
    if index.graph.language() != config.lang {
        bail!(
            "index {} holds language {:?} but {:?} was requested",
            path.display(),
            index.graph.language(),
            config.lang
        );
    }
    let stats = match index.stats {
        Some(s) => s,
        None => PathStats::compute(&index.graph)?,
    };
    Ok((index.graph, stats))
}

pub fn build_extractor<'g>(
    graph: &'g KnowledgeGraph,
    stats: PathStats,
    config: &Config,
) -> anyhow::Result<Extractor<'g>> {
    Ok(Extractor::new(
        graph,
        stats,
        config.grounder()?,
        config.extractor_config(),
    )?)
}

/// Result line for one input line. `pair_index` is the request's position
/// in the batch and seeds its relation choices.
pub fn process_line(extractor: &Extractor<'_>, line: &str, pair_index: usize, timings: bool) -> ExtractionResult {
    let start = Instant::now();
    let req = match ExtractionRequest::parse(line) {
        Ok(r) => r,
        Err(e) => return ExtractionResult::failed(salvage_id(line), e),
    };
    match extractor.extract(&req.context, &req.query, pair_index as u64) {
        Ok(out) => {
            let mut result = ExtractionResult::ok(req.id, &out);
            if timings {
                if let Some(s) = result.stats.as_mut() {
                    s.elapsed_us = Some(start.elapsed().as_micros() as u64);
                }
            }
            result
        }
        Err(e) => ExtractionResult::failed(req.id, e.to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BatchSummary {
    pub requests: usize,
    pub failed: usize,
}

/// Streams JSON-lines requests from `input` to results on `output`, in
/// input order. Blank lines are skipped.
pub fn cmd_extract(
    extractor: &Extractor<'_>,
    input: &mut dyn BufRead,
    output: &mut dyn Write,
    workers: usize,
    timings: bool,
) -> anyhow::Result<BatchSummary> {
    let read_error = RefCell::new(None);
    let lines = input.lines().map_while(|l| match l {
        Ok(l) => Some(l),
        Err(e) => {
            *read_error.borrow_mut() = Some(e);
            None
        }
    });
    let requests = lines.filter(|l| !l.trim().is_empty());
    let mut summary = BatchSummary::default();
    for_each_ordered(
        requests,
        workers,
        |i, line| process_line(extractor, &line, i, timings),
        |result| {
            summary.requests += 1;
            summary.failed += usize::from(result.error.is_some());
            serde_json::to_writer(&mut *output, &result)?;
            output.write_all(b"\n")?;
            Ok::<_, anyhow::Error>(())
        },
    )?;
    output.flush()?;
    if let Some(e) = read_error.into_inner() {
        return Err(e).context("reading requests");
    }
    Ok(summary)
}

/// Human-readable dump of every scored tree for one pair, followed by the
/// selected paths. Kept subtrees are expanded; dropped children are listed
/// with their scores but not expanded.
pub fn cmd_explain(extractor: &Extractor<'_>, context: &str, query: &str, out: &mut dyn Write) -> anyhow::Result<()> {
    let extraction = extractor.extract(context, query, 0)?;
    write_explanation(extractor.graph(), &extraction, out)
}

pub fn write_explanation(g: &KnowledgeGraph, ex: &Extraction, out: &mut dyn Write) -> anyhow::Result<()> {
    let context_concepts: Vec<&str> = ex
        .pair
        .context_mentions
        .mentions
        .keys()
        .map(|&c| g.surface(c))
        .collect();
    writeln!(
        out,
        "context concepts ({}): {}",
        context_concepts.len(),
        context_concepts.join(", ")
    )?;
    let query_concepts: Vec<&str> = ex.pair.query_concepts.iter().map(|&c| g.surface(c)).collect();
    writeln!(
        out,
        "query concepts ({}): {}",
        query_concepts.len(),
        query_concepts.join(", ")
    )?;
    if ex.trees.is_empty() {
        writeln!(out, "no paths: the query mentions no graph concept")?;
        return Ok(());
    }
    for (i, report) in ex.trees.iter().enumerate() {
        let st = &report.scored;
        writeln!(out)?;
        writeln!(
            out,
            "tree {}/{} root={} nodes={}",
            i + 1,
            ex.trees.len(),
            g.surface(report.root),
            st.tree.len()
        )?;
        let mut stack = vec![(NodeId::ROOT, "")];
        while let Some((id, mark)) = stack.pop() {
            let node = st.tree.node(id);
            let via = node.incoming_relation.map(|r| g.relation_name(r)).unwrap_or("-");
            writeln!(
                out,
                "{:indent$}L{} {} via={} raw={:.6} n={:.6} c={:.6}{}",
                "",
                node.level,
                g.surface(node.concept),
                via,
                st.raw(id),
                st.n_score(id),
                st.c_score(id),
                mark,
                indent = 2 * node.level as usize
            )?;
            if !mark.is_empty() && mark != " kept" {
                continue;
            }
            let kept = kept_children(st, id);
            // push in reverse so children print in stored order
            for child in node.children().rev() {
                if kept.contains(&child) {
                    stack.push((child, " kept"));
                } else {
                    stack.push((child, " dropped"));
                }
            }
        }
        if report.selection.full_paths.is_empty() {
            writeln!(out, "no paths: {} has no grounded neighbor", g.surface(report.root))?;
        }
    }
    writeln!(out)?;
    let paths: Vec<&Vec<String>> = ex.paths().collect();
    writeln!(out, "selected paths ({}):", paths.len())?;
    for p in paths {
        writeln!(out, "  {}", p.join(" "))?;
    }
    Ok(())
}
