use std::fs;
use std::io::{self, BufWriter, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bwtglue::grammar::build_pattern_grammar;
use bwtglue::grammar_search::{level_schedule, search_grammar_parallel_with_stats};
use bwtglue::index::DEFAULT_SAMPLE_RATE;
use bwtglue::io::index_to_bytes;
use bwtglue::wildcard::{match_exact, match_flexible};
use bwtglue::{load_index, lz77, BwtIndex, Grammar, Rule, WildcardPattern};
use bwtglue_dist::{
    loopback_shards, orchestrate, shutdown, Mode, Orchestration, ShardConnection, ShardServer, ShardSpec,
    TcpConnection,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(name = "bwtglue", version, about = "Pattern search over BWT indexes with grammar-compressed queries")]
struct Cli {
    /// Output format for results.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum WildcardMode {
    Exact,
    Flexible,
}

#[derive(Clone, Copy, ValueEnum)]
enum QueryMode {
    Count,
    Locate,
}

impl From<QueryMode> for Mode {
    fn from(m: QueryMode) -> Mode {
        match m {
            QueryMode::Count => Mode::Count,
            QueryMode::Locate => Mode::Locate,
        }
    }
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Patterns {
    /// A pattern; repeat for several.
    #[arg(long = "pattern")]
    inline: Vec<String>,
    /// File with one pattern per line. Empty lines are skipped.
    #[arg(long = "patterns")]
    file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index file from a text file.
    Build {
        #[arg(long)]
        text: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SAMPLE_RATE)]
        sample_rate: usize,
    },
    /// Count occurrences of each pattern by backward search.
    Count {
        #[arg(long)]
        index: PathBuf,
        #[command(flatten)]
        patterns: Patterns,
    },
    /// List occurrence start positions of each pattern.
    Locate {
        #[arg(long)]
        index: PathBuf,
        #[command(flatten)]
        patterns: Patterns,
    },
    /// Search many patterns at once through a shared grammar.
    MultiSearch {
        #[arg(long)]
        index: PathBuf,
        #[command(flatten)]
        patterns: Patterns,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Print preprocessing and search statistics to stderr.
        #[arg(long)]
        stats: bool,
    },
    /// Match a pattern containing '?' wildcards.
    Wildcard {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        pattern: String,
        #[arg(long, value_enum, default_value_t = WildcardMode::Exact)]
        mode: WildcardMode,
    },
    /// Print the LZ77 phrase dump of a file, or decode a dump.
    Lz77 {
        input: PathBuf,
        /// Treat the input as a dump and write the decoded bytes.
        #[arg(long, conflicts_with = "multi")]
        decode: bool,
        /// Treat the input as a patterns file and parse the lines as a sequence.
        #[arg(long)]
        multi: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the pattern grammar, or inspect a saved one.
    Grammar {
        #[arg(long = "pattern")]
        inline: Vec<String>,
        #[arg(long = "patterns", conflicts_with = "inline")]
        file: Option<PathBuf>,
        /// Write the serialized grammar here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the rules and root expansions of a saved grammar.
        #[arg(long, conflicts_with_all = ["inline", "file", "out"])]
        show: Option<PathBuf>,
    },
    /// Serve one shard's index over TCP until a shutdown request.
    ServeShard {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        listen: String,
        /// 1-based global position of the shard's first character.
        #[arg(long, default_value_t = 1)]
        offset: usize,
        /// Characters at the end of the shard that also start the next one.
        #[arg(long, default_value_t = 0)]
        overlap: usize,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Run patterns against several shards and merge the results.
    DistQuery {
        #[command(flatten)]
        patterns: Patterns,
        /// Shard address; repeat in shard order.
        #[arg(long = "shard", required_unless_present = "text", conflicts_with = "text")]
        shards: Vec<String>,
        /// Shard this text in-process instead of contacting servers.
        #[arg(long, requires = "shard_count")]
        text: Option<PathBuf>,
        #[arg(long = "shards")]
        shard_count: Option<usize>,
        #[arg(long, default_value_t = 0)]
        overlap: usize,
        #[arg(long, default_value_t = DEFAULT_SAMPLE_RATE)]
        sample_rate: usize,
        #[arg(long, value_enum, default_value_t = QueryMode::Count)]
        mode: QueryMode,
        /// Ask the shard servers to exit afterwards.
        #[arg(long)]
        shutdown: bool,
    },
}

/// A failure and the exit code it maps to.
enum Failure {
    /// Bad input files or arguments: exit 2.
    Usage(String),
    /// The query itself failed: exit 1.
    Query(String),
}

type Outcome = Result<(), Failure>;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn query(e: impl ToString) -> Failure {
    Failure::Query(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = Output {
        w: BufWriter::new(stdout.lock()),
        format: cli.format,
    };
    let result = run(cli.command, &mut out);
    let flushed = out.w.flush();
    match result {
        Ok(()) if flushed.is_ok() => ExitCode::SUCCESS,
        Ok(()) => ExitCode::from(2),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Query(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

struct Output<W: Write> {
    w: W,
    format: Format,
}

impl<W: Write> Output<W> {
    fn record(&mut self, text: impl FnOnce() -> String, value: serde_json::Value) -> Outcome {
        match self.format {
            Format::Text => writeln!(self.w, "{}", text()),
            Format::Json => writeln!(self.w, "{value}"),
        }
        .map_err(usage)
    }

    fn hit(&mut self, pattern: &[u8], count: u64, positions: Option<&[u64]>) -> Outcome {
        let shown = String::from_utf8_lossy(pattern);
        let mut value = json!({ "pattern": shown, "count": count });
        if let Some(p) = positions {
            value["positions"] = json!(p);
        }
        self.record(
            || match positions {
                Some(p) => {
                    let list: Vec<String> = p.iter().map(u64::to_string).collect();
                    format!("{shown}\t{count}\t{}", list.join(" "))
                }
                None => format!("{shown}\t{count}"),
            },
            value,
        )
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Outcome {
    fs::write(path, bytes).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn open_index(path: &Path) -> Result<BwtIndex, Failure> {
    load_index(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn split_lines(bytes: &[u8]) -> Vec<Vec<u8>> {
    bytes
        .split(|&b| b == b'\n')
        .map(|l| l.strip_suffix(b"\r").unwrap_or(l))
        .filter(|l| !l.is_empty())
        .map(<[u8]>::to_vec)
        .collect()
}

fn load_patterns(p: &Patterns) -> Result<Vec<Vec<u8>>, Failure> {
    let patterns = match &p.file {
        Some(path) => split_lines(&read(path)?),
        None => p.inline.iter().map(|s| s.as_bytes().to_vec()).collect(),
    };
    if patterns.is_empty() {
        return Err(usage("no patterns given"));
    }
    if let Some(i) = patterns.iter().position(Vec::is_empty) {
        return Err(usage(format!("pattern {} is empty", i + 1)));
    }
    Ok(patterns)
}

fn run<W: Write>(command: Command, out: &mut Output<W>) -> Outcome {
    match command {
        Command::Build {
            text,
            out: path,
            sample_rate,
        } => {
            let bytes = read(&text)?;
            if bytes.is_empty() {
                return Err(usage(format!("{}: file is empty", text.display())));
            }
            let index = BwtIndex::build(&bytes, sample_rate).map_err(usage)?;
            let encoded = index_to_bytes(&index);
            write(&path, &encoded)?;
            out.record(
                || {
                    format!(
                        "n={} alphabet={} sample_rate={} locate_samples={} bytes={}",
                        index.len(),
                        index.alphabet().len(),
                        index.sample_rate(),
                        index.locate_samples().len(),
                        encoded.len()
                    )
                },
                json!({
                    "n": index.len(),
                    "alphabet": index.alphabet().len(),
                    "sample_rate": index.sample_rate(),
                    "locate_samples": index.locate_samples().len(),
                    "bytes": encoded.len(),
                }),
            )
        }
        Command::Count { index, patterns } => {
            let index = open_index(&index)?;
            for p in load_patterns(&patterns)? {
                out.hit(&p, index.backward_search(&p).len() as u64, None)?;
            }
            Ok(())
        }
        Command::Locate { index, patterns } => {
            let index = open_index(&index)?;
            for p in load_patterns(&patterns)? {
                let iv = index.backward_search(&p);
                let starts: Vec<u64> = index.locate_all(iv, p.len()).into_iter().map(|s| s as u64).collect();
                out.hit(&p, starts.len() as u64, Some(&starts))?;
            }
            Ok(())
        }
        Command::MultiSearch {
            index,
            patterns,
            workers,
            stats,
        } => multi_search(out, &index, &patterns, workers, stats),
        Command::Wildcard { index, pattern, mode } => {
            let index = open_index(&index)?;
            let wp = WildcardPattern::parse(pattern.as_bytes()).map_err(usage)?;
            let spans: Vec<(usize, usize)> = match mode {
                WildcardMode::Exact => {
                    let len = wp.span_len();
                    match_exact(&index, &wp).into_iter().map(|s| (s, s + len - 1)).collect()
                }
                WildcardMode::Flexible => match_flexible(&index, &wp),
            };
            for (start, end) in spans {
                out.record(|| format!("{start}\t{end}"), json!({ "start": start, "end": end }))?;
            }
            Ok(())
        }
        Command::Lz77 {
            input,
            decode,
            multi,
            out: path,
        } => {
            let bytes = read(&input)?;
            let result = if decode {
                let text = String::from_utf8(bytes).map_err(|_| usage("dump is not UTF-8"))?;
                let parse = lz77::read_dump(&text).map_err(usage)?;
                lz77::decode(&parse.phrases).map_err(query)?
            } else if multi {
                lz77::write_dump(&lz77::parse_multi(&split_lines(&bytes))).into_bytes()
            } else {
                lz77::write_dump(&lz77::parse(&bytes)).into_bytes()
            };
            match path {
                Some(p) => write(&p, &result),
                None => out.w.write_all(&result).map_err(usage),
            }
        }
        Command::Grammar {
            inline,
            file,
            out: path,
            show,
        } => match show {
            Some(saved) => show_grammar(out, &saved),
            None => {
                let patterns = load_patterns(&Patterns { inline, file })?;
                let (g, roots, parse) = build_pattern_grammar(&patterns).map_err(query)?;
                let bytes = g.serialize(&roots).map_err(query)?;
                let rules = g.reachable(&roots).map_err(query)?.len();
                let height = roots.iter().map(|&r| g.height(r)).max().unwrap_or(0);
                if let Some(p) = path {
                    write(&p, &bytes)?;
                }
                out.record(
                    || {
                        format!(
                            "patterns={} total_len={} z={} rules={} height={} bytes={}",
                            patterns.len(),
                            parse.total_len(),
                            parse.phrase_count(),
                            rules,
                            height,
                            bytes.len()
                        )
                    },
                    json!({
                        "patterns": patterns.len(),
                        "total_len": parse.total_len(),
                        "z": parse.phrase_count(),
                        "rules": rules,
                        "height": height,
                        "bytes": bytes.len(),
                    }),
                )
            }
        },
        Command::ServeShard {
            index,
            listen,
            offset,
            overlap,
            workers,
        } => {
            let index = open_index(&index)?;
            if offset == 0 || overlap >= index.len() {
                return Err(usage("offset must be at least 1 and overlap below the shard length"));
            }
            let spec = ShardSpec {
                shard_id: 0,
                global_offset: offset,
                shard_text_len: index.len(),
                overlap,
            };
            let listener = TcpListener::bind(&listen).map_err(|e| usage(format!("{listen}: {e}")))?;
            let addr = listener.local_addr().map_err(usage)?;
            out.record(|| format!("listening {addr}"), json!({ "listening": addr.to_string() }))?;
            out.w.flush().map_err(usage)?;
            ShardServer::new(index, spec)
                .with_workers(workers)
                .serve(&listener)
                .map_err(query)
        }
        Command::DistQuery {
            patterns,
            shards,
            text,
            shard_count,
            overlap,
            sample_rate,
            mode,
            shutdown: stop,
        } => {
            let patterns = load_patterns(&patterns)?;
            let mut conns: Vec<Box<dyn ShardConnection>> = match text {
                Some(path) => {
                    let bytes = read(&path)?;
                    loopback_shards(&bytes, shard_count.unwrap_or(1), overlap, sample_rate).map_err(usage)?
                }
                None => shards
                    .iter()
                    .enumerate()
                    .map(|(i, a)| {
                        TcpConnection::connect(i, a)
                            .map(|c| Box::new(c) as Box<dyn ShardConnection>)
                            .map_err(query)
                    })
                    .collect::<Result<_, _>>()?,
            };
            let result = orchestrate(&patterns, mode.into(), &mut conns).map_err(query);
            if stop {
                for c in &mut conns {
                    shutdown(c.as_mut()).map_err(query)?;
                }
            }
            print_orchestration(out, &patterns, &result?)
        }
    }
}

fn multi_search<W: Write>(
    out: &mut Output<W>,
    index: &Path,
    patterns: &Patterns,
    workers: usize,
    stats: bool,
) -> Outcome {
    let index = open_index(index)?;
    let patterns = load_patterns(patterns)?;
    let (g, roots, parse) = build_pattern_grammar(&patterns).map_err(query)?;
    let (intervals, st) = search_grammar_parallel_with_stats(&index, &g, &roots, workers).map_err(query)?;
    for (p, iv) in patterns.iter().zip(&intervals) {
        let starts: Vec<u64> = index.locate_all(*iv, p.len()).into_iter().map(|s| s as u64).collect();
        out.hit(p, starts.len() as u64, Some(&starts))?;
    }
    if stats {
        let rules = level_schedule(&g, &roots).map_err(query)?.levels.iter().map(Vec::len).sum::<usize>();
        let line = match out.format {
            Format::Json => json!({
                "z": parse.phrase_count(),
                "rules": rules,
                "glue_calls": st.glue_calls,
                "short_circuits": st.short_circuits,
                "terminal_lookups": st.terminal_lookups,
                "antilocate_calls": st.probes.antilocate_calls,
                "level_sizes": st.level_sizes,
            })
            .to_string(),
            Format::Text => format!(
                "z={} rules={} glue_calls={} short_circuits={} terminal_lookups={} antilocate_calls={} level_sizes={:?}",
                parse.phrase_count(),
                rules,
                st.glue_calls,
                st.short_circuits,
                st.terminal_lookups,
                st.probes.antilocate_calls,
                st.level_sizes
            ),
        };
        eprintln!("{line}");
    }
    Ok(())
}

fn print_orchestration<W: Write>(out: &mut Output<W>, patterns: &[Vec<u8>], r: &Orchestration) -> Outcome {
    for (i, p) in patterns.iter().enumerate() {
        let positions = r.positions.as_ref().map(|all| all[i].as_slice());
        out.hit(p, r.counts[i], positions)?;
    }
    Ok(())
}

fn show_grammar<W: Write>(out: &mut Output<W>, path: &Path) -> Outcome {
    let g = Grammar::deserialize(&read(path)?).map_err(usage)?;
    for (id, rule) in g.rules().iter().enumerate() {
        let (text, value) = match *rule {
            Rule::Terminal(c) => (
                format!("X{id} -> {}", lz77::Phrase::Literal(c).to_string().split_at(2).1),
                json!({ "id": id, "terminal": c }),
            ),
            Rule::Pair(l, r) => (format!("X{id} -> X{l} X{r}"), json!({ "id": id, "left": l, "right": r })),
        };
        out.record(|| text, value)?;
    }
    for &root in g.roots() {
        let exp = g.expand(root).map_err(query)?;
        let shown = String::from_utf8_lossy(&exp);
        out.record(
            || format!("root X{root} = {shown}"),
            json!({ "root": root, "expansion": shown }),
        )?;
    }
    Ok(())
}
