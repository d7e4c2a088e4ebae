//! Fixtures and brute-force reference implementations shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::Path;

use castmine::corpus::FrameSequence;
use castmine::doclink::{LinkResult, RelevanceJudgments, ScoredDoc, DEFAULT_TAU};
use castmine::vectorspace::{quantize_rgb, TermVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const WIDTH: usize = 32;
pub const HEIGHT: usize = 24;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A frame made of a few solid rectangles on a background, roughly what an
/// editor or a slide looks like after colour quantization.
pub fn block_frame(rng: &mut impl Rng) -> Vec<u8> {
    let mut px = vec![0u8; WIDTH * HEIGHT * 3];
    let bg: [u8; 3] = rng.random();
    for p in px.chunks_mut(3) {
        p.copy_from_slice(&bg);
    }
    for _ in 0..rng.random_range(3..8) {
        let colour: [u8; 3] = rng.random();
        let (x0, y0) = (rng.random_range(0..WIDTH), rng.random_range(0..HEIGHT));
        let (x1, y1) = (
            rng.random_range(x0..WIDTH) + 1,
            rng.random_range(y0..HEIGHT) + 1,
        );
        for y in y0..y1 {
            for x in x0..x1 {
                px[(y * WIDTH + x) * 3..][..3].copy_from_slice(&colour);
            }
        }
    }
    px
}

/// Recolours at most `fraction` of the pixels of `base`.
pub fn perturb(base: &[u8], fraction: f64, rng: &mut impl Rng) -> Vec<u8> {
    let mut px = base.to_vec();
    let n = base.len() / 3;
    let max = (n as f64 * fraction).floor() as usize;
    for _ in 0..rng.random_range(0..=max) {
        let i = rng.random_range(0..n);
        let colour: [u8; 3] = rng.random();
        px[i * 3..][..3].copy_from_slice(&colour);
    }
    px
}

/// Rasters of a mostly static video: one base frame, each sampled frame
/// differing from it in at most 2% of pixels.
pub fn static_rasters(frames: usize, rng: &mut impl Rng) -> Vec<Vec<u8>> {
    let base = block_frame(rng);
    (0..frames).map(|_| perturb(&base, 0.02, rng)).collect()
}

/// Rasters of a video whose sampled frames are unrelated to each other.
pub fn random_rasters(frames: usize, rng: &mut impl Rng) -> Vec<Vec<u8>> {
    (0..frames).map(|_| block_frame(rng)).collect()
}

pub fn sequence(id: &str, rasters: &[Vec<u8>]) -> FrameSequence {
    FrameSequence::from_bags(
        id,
        rasters
            .iter()
            .map(|r| quantize_rgb(r, 4).unwrap())
            .collect(),
    )
}

/// Writes rasters as `<seconds>.png` at the given timestamps.
pub fn write_frames(dir: &Path, rasters: &[Vec<u8>], timestamps: &[u64]) {
    std::fs::create_dir_all(dir).unwrap();
    for (r, t) in rasters.iter().zip(timestamps) {
        image::RgbImage::from_raw(WIDTH as u32, HEIGHT as u32, r.clone())
            .unwrap()
            .save(dir.join(format!("{t}.png")))
            .unwrap();
    }
}

/// Random sparse non-negative vector; some draws are empty.
pub fn random_bag(rng: &mut impl Rng, max_terms: u32, max_len: usize) -> TermVector {
    let len = rng.random_range(0..=max_len);
    let pairs: Vec<(u32, f64)> = (0..len)
        .map(|_| {
            let w = if rng.random_bool(0.5) {
                rng.random_range(1..20) as f64
            } else {
                rng.random::<f64>() * 10.0
            };
            (rng.random_range(0..max_terms), w)
        })
        .collect();
    TermVector::from_pairs(pairs).unwrap()
}

/// Dense copies of two sparse vectors over the union of their terms.
pub fn densify(a: &TermVector, b: &TermVector) -> (Vec<f64>, Vec<f64>) {
    let mut index = BTreeMap::new();
    for t in a.terms().chain(b.terms()) {
        let n = index.len();
        index.entry(t).or_insert(n);
    }
    let mut da = vec![0.0; index.len()];
    let mut db = vec![0.0; index.len()];
    for (t, w) in a.iter() {
        da[index[&t]] = w;
    }
    for (t, w) in b.iter() {
        db[index[&t]] = w;
    }
    (da, db)
}

fn dense_dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// `a·b / (|a|² + |b|² − a·b)` on dense vectors; `None` when both are zero.
pub fn oracle_jaccard(a: &TermVector, b: &TermVector) -> Option<f64> {
    let (da, db) = densify(a, b);
    let (ab, aa, bb) = (
        dense_dot(&da, &db),
        dense_dot(&da, &da),
        dense_dot(&db, &db),
    );
    if aa == 0.0 && bb == 0.0 {
        return None;
    }
    Some(ab / (aa + bb - ab))
}

/// `a·b / (|a| |b|)` on dense vectors; 0 when exactly one is zero, `None`
/// when both are.
pub fn oracle_cosine(a: &TermVector, b: &TermVector) -> Option<f64> {
    let (da, db) = densify(a, b);
    let (ab, aa, bb) = (
        dense_dot(&da, &db),
        dense_dot(&da, &da),
        dense_dot(&db, &db),
    );
    match (aa == 0.0, bb == 0.0) {
        (true, true) => None,
        (true, false) | (false, true) => Some(0.0),
        _ => Some(ab / (aa.sqrt() * bb.sqrt())),
    }
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
/// eigenvalues in descending order and the matching eigenvectors as
/// columns (`vectors[row][col]`).
#[allow(clippy::needless_range_loop)]
pub fn jacobi_eigen(matrix: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = matrix.len();
    let mut a = matrix.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>().max(1e-300);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = (0..n)
        .map(|r| order.iter().map(|&c| v[r][c]).collect())
        .collect();
    (values, vectors)
}

/// Reference LSI: eigendecompose the column Gram matrix `AᵀA` and keep the
/// top `k` eigenpairs. Entry `(i, j)` of the result is the cosine between
/// the rank-`k` latent vectors of columns `i` and `j`, or `None` when one of
/// them vanishes. Also returns the numerical rank.
pub struct LsiOracle {
    pub rank: usize,
    gram: Vec<Vec<f64>>,
}

impl LsiOracle {
    pub fn new(columns: &[TermVector]) -> Self {
        let n = columns.len();
        let gram: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| columns[i].dot(&columns[j])).collect())
            .collect();
        let (values, _) = jacobi_eigen(&gram);
        let max = values[0].max(0.0);
        let rank = values.iter().filter(|&&l| l > 1e-10 * max).count();
        Self { rank, gram }
    }

    pub fn similarities(&self, k: usize) -> Vec<Vec<Option<f64>>> {
        let n = self.gram.len();
        let (values, vectors) = jacobi_eigen(&self.gram);
        let truncated = |i: usize, j: usize| -> f64 {
            (0..k)
                .map(|l| values[l] * vectors[i][l] * vectors[j][l])
                .sum()
        };
        let scale = values[0];
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let (ii, jj) = (truncated(i, i), truncated(j, j));
                        if ii <= 1e-12 * scale || jj <= 1e-12 * scale {
                            None
                        } else {
                            Some(truncated(i, j) / (ii * jj).sqrt())
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// Greedy one-to-one matching maximizing cosine between rows of `found` and
/// `truth`; returns the matched cosine for each row of `truth`.
pub fn aligned_cosines(found: &[Vec<f64>], truth: &[Vec<f64>]) -> Vec<f64> {
    let cos = |a: &[f64], b: &[f64]| {
        let d: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        d / (na * nb)
    };
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, f) in found.iter().enumerate() {
        for (j, t) in truth.iter().enumerate() {
            pairs.push((cos(f, t), i, j));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut used_f = vec![false; found.len()];
    let mut out = vec![f64::NAN; truth.len()];
    for (c, i, j) in pairs {
        if !used_f[i] && out[j].is_nan() {
            used_f[i] = true;
            out[j] = c;
        }
    }
    out
}

/// Corpus drawn from disjoint-vocabulary topics. Each document mixes topics
/// with a dominant one; returns documents and the generating term
/// distributions over the sorted vocabulary.
pub fn topic_corpus(
    topics: usize,
    words_per_topic: usize,
    docs: usize,
    tokens: usize,
    seed: u64,
) -> (Vec<Vec<String>>, Vec<Vec<f64>>, Vec<String>) {
    let mut rng = rng(seed);
    let word = |t: usize, w: usize| format!("t{t}w{w:02}");
    // Zipf-like weights inside each topic
    let weights: Vec<f64> = (0..words_per_topic)
        .map(|w| 1.0 / (w as f64 + 1.0))
        .collect();
    let total: f64 = weights.iter().sum();
    let corpus = (0..docs)
        .map(|d| {
            let main = d % topics;
            (0..tokens)
                .map(|_| {
                    let t = if rng.random_bool(0.8) {
                        main
                    } else {
                        rng.random_range(0..topics)
                    };
                    let mut x = rng.random::<f64>() * total;
                    let mut w = 0;
                    while w + 1 < words_per_topic && x >= weights[w] {
                        x -= weights[w];
                        w += 1;
                    }
                    word(t, w)
                })
                .collect()
        })
        .collect();
    let mut vocab: Vec<String> = (0..topics)
        .flat_map(|t| (0..words_per_topic).map(move |w| word(t, w)))
        .collect();
    vocab.sort();
    let truth = (0..topics)
        .map(|t| {
            vocab
                .iter()
                .map(|v| {
                    (0..words_per_topic)
                        .find(|&w| *v == word(t, w))
                        .map_or(0.0, |w| weights[w] / total)
                })
                .collect()
        })
        .collect();
    (corpus, truth, vocab)
}

/// Documents each drawn uniformly from one of `n_themes` disjoint
/// vocabularies of `words` terms (document `d` uses theme `d % n_themes`).
pub fn themes(
    n_themes: usize,
    words: usize,
    docs: usize,
    tokens: usize,
    seed: u64,
) -> Vec<Vec<String>> {
    let mut rng = rng(seed);
    (0..docs)
        .map(|d| {
            (0..tokens)
                .map(|_| format!("th{}w{}", d % n_themes, rng.random_range(0..words)))
                .collect()
        })
        .collect()
}

/// Input files for driving the command line end to end.
pub struct Workspace {
    pub root: std::path::PathBuf,
    pub manifest: std::path::PathBuf,
    pub docs: std::path::PathBuf,
    pub transcripts: std::path::PathBuf,
    pub transcript: std::path::PathBuf,
    pub judgments: std::path::PathBuf,
    pub corpus: std::path::PathBuf,
}

const DOCS: &[(&str, &str)] = &[
    (
        "java/util/ArrayList.html",
        "<html><head><title>ArrayList</title></head><body><h1>Class ArrayList</h1>\
         <p>Resizable array implementation of the <code>List</code> interface.</p>\
         <pre><code>boolean <a href=\"#contains\">contains</a>(Object o)</code></pre>\
         <p>Returns true if this list contains the specified element.</p></body></html>",
    ),
    (
        "java/util/HashMap.html",
        "<html><body><h1>Class HashMap</h1><p>Hash table based implementation of the Map interface.</p>\
         <pre><code>V get(Object key)</code></pre><p>Returns the value to which the key is mapped.</p></body></html>",
    ),
    (
        "java/io/File.html",
        "<html><body><h1>Class File</h1><p>An abstract representation of file and directory pathnames.</p>\
         <pre><code>boolean exists()</code></pre></body></html>",
    ),
    (
        "javax/swing/JButton.html",
        "<html><body><h1>Class JButton</h1><p>An implementation of a push button.</p>\
         <pre><code>void setText(String text)</code></pre></body></html>",
    ),
    (
        "java/lang/String.html",
        "<html><body><h1>Class String</h1><p>The String class represents character strings.</p>\
         <pre><code>boolean contains(CharSequence s)</code></pre></body></html>",
    ),
];

/// Six videos (three static screencasts, three unrelated-frame videos), five
/// API pages, two transcripts with judgments and a two-theme text corpus.
pub fn workspace(root: &Path) -> Workspace {
    use castmine::corpus::{write_video_manifest, VideoKind, VideoRecord};

    let mut rng = rng(17);
    let timestamps: Vec<u64> = (0..6).map(|i| i * 10).collect();
    let mut records = Vec::new();
    for v in 0..6 {
        let id = format!("v{v}");
        let (rasters, kind) = if v % 2 == 0 {
            (static_rasters(6, &mut rng), VideoKind::DevScreencast)
        } else {
            (random_rasters(6, &mut rng), VideoKind::NonScreencast)
        };
        write_frames(&root.join("frames").join(&id), &rasters, &timestamps);
        records.push(VideoRecord {
            id,
            kind,
            frame_dir: Path::new("frames").join(format!("v{v}")),
            title: format!("video {v}"),
            transcript_path: None,
        });
    }
    let manifest = root.join("manifest.jsonl");
    write_video_manifest(&records, std::fs::File::create(&manifest).unwrap()).unwrap();

    let docs = root.join("docs");
    for (path, html) in DOCS {
        let p = docs.join(path);
        std::fs::create_dir_all(p.parent().unwrap()).unwrap();
        std::fs::write(p, html).unwrap();
    }

    let transcripts = root.join("transcripts");
    std::fs::create_dir_all(&transcripts).unwrap();
    let transcript = transcripts.join("cast1.txt");
    std::fs::write(
        &transcript,
        "So here I create an ArrayList and check whether the list contains the element. \
         contains returns true, so the ArrayList works.",
    )
    .unwrap();
    std::fs::write(
        transcripts.join("cast2.vtt"),
        "WEBVTT\n\n00:00:01.000 --> 00:00:04.000\nnow we add a push button\n\n\
         00:00:04.000 --> 00:00:08.000\nand set the button text with setText\n",
    )
    .unwrap();
    let judgments = root.join("judgments.jsonl");
    std::fs::write(
        &judgments,
        "{\"screencast_id\":\"cast1\",\"relevant_doc_ids\":[\"java/util/ArrayList\"]}\n\
         {\"screencast_id\":\"cast2\",\"relevant_doc_ids\":[\"javax/swing/JButton\",\"java/lang/String\"]}\n",
    )
    .unwrap();

    let corpus = root.join("corpus.jsonl");
    let words = [
        [
            "kernel", "thread", "mutex", "socket", "buffer", "signal", "process", "memory",
        ],
        [
            "button", "panel", "layout", "window", "dialog", "label", "border", "canvas",
        ],
    ];
    let lines: Vec<String> = (0..24)
        .map(|i| {
            let text: Vec<&str> = (0..15)
                .map(|_| words[i % 2][rng.random_range(0..8)])
                .collect();
            serde_json::json!({ "id": format!("d{i}"), "text": text.join(" ") }).to_string()
        })
        .collect();
    std::fs::write(&corpus, lines.join("\n") + "\n").unwrap();

    Workspace {
        root: root.to_path_buf(),
        manifest,
        docs,
        transcripts,
        transcript,
        judgments,
        corpus,
    }
}

/// Runs the command line in process; returns exit code, stdout and stderr.
pub fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("castmine").chain(args.iter().copied());
    let code = castmine::cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

pub fn ranked(id: &str, docs: Vec<String>) -> LinkResult {
    let n = docs.len();
    LinkResult {
        screencast_id: id.into(),
        ranking: docs
            .into_iter()
            .enumerate()
            .map(|(i, doc_id)| ScoredDoc {
                doc_id,
                score: 1.0 - i as f64 / n as f64,
            })
            .collect(),
        top_n: n,
        threshold: DEFAULT_TAU,
        above_threshold: 0,
    }
}

/// 35 screencasts, 65 relevant documents; relevant documents sit in rank
/// bands so that 18, 4, 11 and 5 of them fall in ranks 1-3, 4-5, 6-10 and
/// 11-20, and the remaining 27 further down.
pub fn table_fixture() -> (Vec<LinkResult>, RelevanceJudgments) {
    let bands: [(usize, usize); 5] = [(0, 18), (3, 4), (5, 11), (10, 5), (25, 27)];
    let mut labels: Vec<usize> = bands
        .iter()
        .enumerate()
        .flat_map(|(b, &(_, n))| vec![b; n])
        .collect();
    labels.reverse();
    let mut results = Vec::new();
    let mut judgments = RelevanceJudgments::new();
    for s in 0..35 {
        let n_rel = if s < 30 { 2 } else { 1 };
        let mut ranking: Vec<String> = (0..30).map(|i| format!("s{s}/noise{i}")).collect();
        let mut relevant = Vec::new();
        let mut used = [0usize; 5];
        for r in 0..n_rel {
            let band = labels.pop().unwrap();
            let pos = bands[band].0 + used[band];
            used[band] += 1;
            let doc = format!("s{s}/rel{r}");
            ranking[pos] = doc.clone();
            relevant.push(doc);
        }
        judgments.insert(format!("s{s}"), relevant).unwrap();
        results.push(ranked(&format!("s{s}"), ranking));
    }
    assert!(labels.is_empty());
    (results, judgments)
}

/// One invocation of every command, each writing to its own file in `out`.
pub fn commands(ws: &Workspace, out: &Path) -> Vec<Vec<String>> {
    let (m, docs, tr) = (
        path_str(&ws.manifest),
        path_str(&ws.docs),
        path_str(&ws.transcript),
    );
    let o = out.display();
    [
        format!("detect --manifest {m} --algorithm cosine --interval 10 --out {o}/ranks.csv"),
        format!("detect --manifest {m} --algorithm lsi --format json --out {o}/lsi.json"),
        format!("detect --manifest {m} --algorithm jaccard --binary --out {o}/jac.csv"),
        format!("eval-detect --manifest {m} --ranks {o}/ranks.csv --ks 3,6 --out {o}/eval-detect.json"),
        format!("topics --corpus {} --kmax 4 --seed 7 --iterations 60 --out {o}/topics.json", path_str(&ws.corpus)),
        format!("link --docs {docs} --transcript {tr} --top 20 --out {o}/link.json"),
        format!("link --docs {docs} --transcript {tr} --format csv --raw-counts --out {o}/link.csv"),
        format!(
            "eval-link --docs {docs} --transcripts {} --judgments {} --rankings-out {o}/rankings.csv --out {o}/eval-link.json",
            path_str(&ws.transcripts),
            path_str(&ws.judgments)
        ),
    ]
    .iter()
    .map(|c| c.split_whitespace().map(str::to_owned).collect())
    .collect()
}

pub fn run_all(cmds: &[Vec<String>]) {
    for c in cmds {
        let args: Vec<&str> = c.iter().map(String::as_str).collect();
        let (code, _, err) = run_cli(&args);
        assert_eq!(code, 0, "{args:?}: {err}");
    }
}

pub fn snapshot(out: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(out)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// A topic model with random positive `phi` and term marginals.
pub fn random_model(rng: &mut impl Rng, k: usize, v: usize) -> castmine::topics::TopicModel {
    let dist = |rng: &mut dyn rand::RngCore| {
        let raw: Vec<f64> = (0..v).map(|_| rng.random_range(0.001..1.0)).collect();
        let s: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x / s).collect::<Vec<f64>>()
    };
    castmine::topics::TopicModel {
        k,
        alpha: 0.1,
        beta: 0.01,
        iterations: 0,
        seed: 0,
        vocab: (0..v).map(|i| format!("t{i:03}")).collect(),
        phi: (0..k).map(|_| dist(rng)).collect(),
        theta: vec![vec![1.0 / k as f64; k]],
        term_marginal: dist(rng),
        prevalence: vec![1.0 / k as f64; k],
        doc_index: vec![0],
    }
}
