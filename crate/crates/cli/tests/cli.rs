use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use bwtglue::BwtIndex;
use bwtglue_testkit::{oracle_occurrences, random_substring, random_text};
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bwtglue"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json_lines(s: &str) -> Vec<Value> {
    s.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        Fixture {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn file(&self, name: &str, bytes: &[u8]) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, bytes).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn index(&self, text: &[u8]) -> String {
        let t = self.file("text", text);
        let idx = self.path("text.idx");
        ok(&["build", "--text", s(&t), "--out", s(&idx), "--sample-rate", "3"]);
        s(&idx).to_string()
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_then_query() {
    let f = Fixture::new();
    let idx = f.index(b"mississippi");
    let loaded = bwtglue::load_index(&idx).unwrap();
    assert_eq!(loaded.backward_search(b"ip"), bwtglue::Interval::singleton(3));

    assert_eq!(ok(&["count", "--index", &idx, "--pattern", "ip", "--pattern", "s"]), "ip\t1\ns\t4\n");
    assert_eq!(ok(&["locate", "--index", &idx, "--pattern", "issi"]), "issi\t2\t2 5\n");
    let j = json_lines(&ok(&["--format", "json", "locate", "--index", &idx, "--pattern", "ss"]));
    assert_eq!(j[0]["pattern"], "ss");
    assert_eq!(j[0]["count"], 2);
    assert_eq!(j[0]["positions"], serde_json::json!([3, 6]));
}

#[test]
fn build_is_deterministic_and_rejects_empty_files() {
    let f = Fixture::new();
    let t = f.file("t", b"abracadabra");
    let (a, b) = (f.path("a"), f.path("b"));
    ok(&["build", "--text", s(&t), "--out", s(&a)]);
    ok(&["build", "--text", s(&t), "--out", s(&b)]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let e = f.file("empty", b"");
    let out = run(&["build", "--text", s(&e), "--out", s(&f.path("x"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty"));

    let out = run(&["build", "--text", s(&f.path("missing")), "--out", s(&f.path("x"))]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["count", "--index", s(&t), "--pattern", "a"]);
    assert_eq!(out.status.code(), Some(2), "a text file is not an index");
}

#[test]
fn multi_search_counts_and_stats() {
    let f = Fixture::new();
    let idx = f.index(b"mississippi");
    let pats = f.file("pats", b"i\r\np\n\nip\nzz\n");
    let out = run(&["--format", "json", "multi-search", "--index", &idx, "--patterns", s(&pats), "--stats", "--workers", "2"]);
    assert!(out.status.success());
    let lines = json_lines(std::str::from_utf8(&out.stdout).unwrap());
    let counts: Vec<u64> = lines.iter().map(|v| v["count"].as_u64().unwrap()).collect();
    assert_eq!(counts, vec![4, 2, 1, 0]);
    assert_eq!(lines[3]["positions"], serde_json::json!([]));
    let stats: Value = serde_json::from_slice(&out.stderr).unwrap();
    for key in ["z", "rules", "glue_calls", "level_sizes"] {
        assert!(stats.get(key).is_some(), "{key} missing from {stats}");
    }
    assert_eq!(stats["z"], 5);

    // Without --stats nothing goes to stderr.
    let out = run(&["multi-search", "--index", &idx, "--pattern", "ss"]);
    assert!(out.stderr.is_empty());

    let empty = f.file("none", b"\n\n");
    assert_eq!(run(&["multi-search", "--index", &idx, "--patterns", s(&empty)]).status.code(), Some(2));
}

#[test]
fn multi_search_random_patterns_match_oracle() {
    let mut rng = StdRng::seed_from_u64(50);
    let f = Fixture::new();
    let text = random_text(&mut rng, 1500, 4);
    let idx = f.index(&text);
    let patterns: Vec<Vec<u8>> = (0..50).map(|_| random_substring(&mut rng, &text, 10)).collect();
    let mut file = patterns.join(&b'\n');
    file.extend_from_slice(b"\ndcbadcbadcba\n");
    let pats = f.file("pats", &file);
    let lines = json_lines(&ok(&["--format", "json", "multi-search", "--index", &idx, "--patterns", s(&pats), "--workers", "4"]));
    assert_eq!(lines.len(), 51);
    for (v, p) in lines.iter().zip(&patterns) {
        let expect = oracle_occurrences(&text, p);
        let got: Vec<usize> = v["positions"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_u64().unwrap() as usize)
            .collect();
        assert_eq!(got, expect);
    }
    assert_eq!(lines[50]["count"].as_u64().unwrap() as usize, oracle_occurrences(&text, b"dcbadcbadcba").len());
}

#[test]
fn wildcard_command() {
    let f = Fixture::new();
    let idx = f.index(b"mississippi");
    assert_eq!(ok(&["wildcard", "--index", &idx, "--pattern", "s??s"]), "3\t6\n4\t7\n");
    assert_eq!(
        ok(&["wildcard", "--index", &idx, "--pattern", "s?s", "--mode", "flexible"]),
        "3\t4\n4\t6\n6\t7\n"
    );
    let out = run(&["wildcard", "--index", &idx, "--pattern", "??"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lz77_round_trip() {
    let f = Fixture::new();
    let mut rng = StdRng::seed_from_u64(77);
    let mut text = random_text(&mut rng, 3000, 3);
    text.extend_from_slice(b"\n\x00\xff tail");
    let input = f.file("in", &text);
    let dump = f.path("dump");
    ok(&["lz77", s(&input), "--out", s(&dump)]);
    let decoded = run(&["lz77", "--decode", s(&dump)]);
    assert!(decoded.status.success());
    assert_eq!(decoded.stdout, text);

    let pats = f.file("pats", b"ab\nab\n");
    assert_eq!(ok(&["lz77", "--multi", s(&pats)]), "L a\nL b\nC 1 2\nB 2 4\n");

    let bad = f.file("bad", b"L a\nC 5 9\n");
    assert_eq!(run(&["lz77", "--decode", s(&bad)]).status.code(), Some(1));
}

#[test]
fn grammar_save_and_show() {
    let f = Fixture::new();
    let g = f.path("g.slpg");
    let line = ok(&["grammar", "--pattern", "abaababaabaab", "--pattern", "aab", "--out", s(&g)]);
    assert!(line.starts_with("patterns=2 total_len=16 z="), "{line}");
    let shown = ok(&["grammar", "--show", s(&g)]);
    let roots: Vec<&str> = shown.lines().filter(|l| l.starts_with("root")).collect();
    assert_eq!(roots.len(), 2);
    assert!(roots[0].ends_with("= abaababaabaab"));
    assert!(roots[1].ends_with("= aab"));
}

#[test]
fn dist_query_loopback() {
    let f = Fixture::new();
    let t = f.file("t", b"mississippi");
    let out = ok(&[
        "dist-query", "--text", s(&t), "--shards", "2", "--overlap", "10", "--pattern", "i", "--pattern", "p",
        "--pattern", "ip",
    ]);
    assert_eq!(out, "i\t4\np\t2\nip\t1\n");
    let out = ok(&[
        "--format", "json", "dist-query", "--text", s(&t), "--shards", "3", "--overlap", "2", "--pattern", "ssi",
        "--mode", "locate",
    ]);
    assert_eq!(json_lines(&out)[0]["positions"], serde_json::json!([3, 6]));
    let out = run(&["dist-query", "--text", s(&t), "--shards", "20", "--pattern", "i"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn serve_shard_and_dist_query_over_tcp() {
    let f = Fixture::new();
    let text = b"abracadabra_abracadabra";
    let pieces = bwtglue_dist::shard_text(text, 2, 4).unwrap();
    let mut children = Vec::new();
    let mut addrs = Vec::new();
    for (spec, piece) in &pieces {
        let idx = f.path(&format!("shard{}", spec.shard_id));
        bwtglue::save_index(&BwtIndex::build(piece, 2).unwrap(), &idx).unwrap();
        let mut child = bin()
            .args([
                "serve-shard", "--index", s(&idx), "--listen", "127.0.0.1:0", "--offset",
                &spec.global_offset.to_string(), "--overlap", &spec.overlap.to_string(),
            ])
            .stdout(Stdio::piped())
            .spawn()
            .unwrap();
        let mut line = String::new();
        BufReader::new(child.stdout.take().unwrap()).read_line(&mut line).unwrap();
        addrs.push(line.trim().strip_prefix("listening ").unwrap().to_string());
        children.push(child);
    }
    let mut args = vec!["dist-query", "--mode", "locate", "--pattern", "abra", "--pattern", "cad", "--shutdown"];
    for a in &addrs {
        args.extend(["--shard", a.as_str()]);
    }
    assert_eq!(ok(&args), "abra\t4\t1 8 13 20\ncad\t2\t5 17\n");
    for mut c in children {
        assert!(c.wait().unwrap().success());
    }

    // The servers are gone, so the query itself fails.
    let out = run(&["dist-query", "--shard", &addrs[0], "--pattern", "a"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("shard 0"));
}
