mod common;

use std::collections::BTreeSet;

use castmine::corpus::{Document, DocumentKind};
use castmine::doclink::*;
use castmine::topics::PreprocessOptions;
use castmine::vectorspace::{TfidfIndex, Weighting};
use castmine::Error;
use common::{ranked, table_fixture};
use proptest::prelude::*;

fn api_doc(id: &str, text: &str) -> Document {
    Document::new(id, DocumentKind::ApiDoc, text).tokenized(&PreprocessOptions::default())
}

fn transcript(id: &str, text: &str) -> Document {
    Document::new(id, DocumentKind::Transcript, text).tokenized(&PreprocessOptions::default())
}

fn five_docs() -> Vec<Document> {
    vec![
        api_doc(
            "java/util/ArrayList",
            "ArrayList boolean contains(Object o) resizable array list",
        ),
        api_doc(
            "java/util/LinkedList",
            "LinkedList doubly linked list add remove",
        ),
        api_doc(
            "java/util/HashSet",
            "HashSet boolean contains(Object o) hash table set",
        ),
        api_doc(
            "java/util/Arrays",
            "Arrays sort search arraylist view of an array",
        ),
        api_doc("javax/swing/JButton", "JButton push button label icon"),
    ]
}

fn ids(r: &LinkResult) -> Vec<&str> {
    r.ranking.iter().map(|d| d.doc_id.as_str()).collect()
}

#[test]
fn doc_with_both_terms_ranks_first() {
    let index = TfidfIndex::build(&five_docs(), Weighting::TfIdf).unwrap();
    let t = transcript(
        "cast",
        "now the arraylist: we ask whether the arraylist contains our value, and contains says yes. arraylist contains",
    );
    let r = link_transcript(&index, &t, 3, DEFAULT_TAU).unwrap();
    assert_eq!(r.ranking[0].doc_id, "java/util/ArrayList");
    assert_eq!(r.top().len(), 3);
    assert!(r.ranking.windows(2).all(|w| w[0].score >= w[1].score));
    assert!(r.ranking[0].score > r.ranking[1].score);
}

#[test]
fn no_shared_vocabulary_scores_zero() {
    let index = TfidfIndex::build(&five_docs(), Weighting::TfIdf).unwrap();
    let r = link_transcript(
        &index,
        &transcript("cast", "guitar chords and a capo"),
        20,
        DEFAULT_TAU,
    )
    .unwrap();
    assert!(r.ranking.iter().all(|d| d.score == 0.0));
    let mut sorted = ids(&r);
    sorted.sort();
    assert_eq!(ids(&r), sorted);
    assert_eq!(r.above_threshold, 0);
    assert_eq!(r.top().len(), 5);
}

#[test]
fn empty_transcript_is_rejected() {
    let index = TfidfIndex::build(&five_docs(), Weighting::TfIdf).unwrap();
    let r = link_transcript(
        &index,
        &transcript("cast", "and so on, to the"),
        3,
        DEFAULT_TAU,
    );
    assert!(matches!(r, Err(Error::EmptyQuery)));
}

#[test]
fn ranking_is_deterministic() {
    let t = transcript(
        "cast",
        "sort the array then search the list and add a button label",
    );
    for weighting in [Weighting::TfIdf, Weighting::RawCount] {
        let a = link_transcript(
            &TfidfIndex::build(&five_docs(), weighting).unwrap(),
            &t,
            5,
            DEFAULT_TAU,
        )
        .unwrap();
        let b = link_transcript(
            &TfidfIndex::build(&five_docs(), weighting).unwrap(),
            &t,
            5,
            DEFAULT_TAU,
        )
        .unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn disjoint_document_keeps_order() {
    let t = transcript(
        "cast",
        "arraylist contains an array list; sort the array and push a button",
    );
    let before = link_transcript(
        &TfidfIndex::build(&five_docs(), Weighting::TfIdf).unwrap(),
        &t,
        5,
        DEFAULT_TAU,
    )
    .unwrap();
    let mut docs = five_docs();
    docs.push(api_doc(
        "org/music/Guitar",
        "guitar chords capo strings fret",
    ));
    let after = link_transcript(
        &TfidfIndex::build(&docs, Weighting::TfIdf).unwrap(),
        &t,
        6,
        DEFAULT_TAU,
    )
    .unwrap();
    let kept: Vec<&str> = ids(&after)
        .into_iter()
        .filter(|id| *id != "org/music/Guitar")
        .collect();
    assert_eq!(kept, ids(&before));
    assert_eq!(
        after
            .ranking
            .iter()
            .find(|d| d.doc_id == "org/music/Guitar")
            .unwrap()
            .score,
        0.0
    );
}

#[test]
fn retrieval_table_arithmetic() {
    let (results, judgments) = table_fixture();
    assert_eq!(judgments.total_relevant(), 65);
    let table = evaluate_links(&results, &judgments, &DEFAULT_KS).unwrap();
    let hits: Vec<usize> = table
        .rows
        .iter()
        .map(|r| r.retrieved_relevant_total)
        .collect();
    assert_eq!(hits, [18, 22, 33, 38]);
    let recalls: Vec<f64> = table.rows.iter().map(|r| r.micro_recall).collect();
    assert_eq!(
        recalls,
        [18.0 / 65.0, 22.0 / 65.0, 33.0 / 65.0, 38.0 / 65.0]
    );
    for (got, printed) in recalls.iter().zip([0.2769, 0.3385, 0.5077, 0.5846]) {
        assert!((got - printed).abs() < 5e-5);
    }
    assert_eq!(table.rows[3].retrieved, "38/65");
    assert_eq!(table.rows[0].micro_precision, 18.0 / 105.0);
    assert_eq!(table.screencasts, 35);
}

#[test]
fn perfect_system_has_full_recall() {
    let (results, judgments) = table_fixture();
    let perfect: Vec<LinkResult> = results
        .iter()
        .map(|r| {
            let rel = judgments.get(&r.screencast_id).unwrap();
            let mut docs: Vec<String> = rel.iter().cloned().collect();
            docs.extend(
                r.ranking
                    .iter()
                    .map(|d| d.doc_id.clone())
                    .filter(|d| !rel.contains(d)),
            );
            ranked(&r.screencast_id, docs)
        })
        .collect();
    let table = evaluate_links(&perfect, &judgments, &[2, 3]).unwrap();
    assert!(table
        .rows
        .iter()
        .all(|r| r.micro_recall == 1.0 && r.macro_recall == 1.0));
}

#[test]
fn hand_evaluation_and_missing_judgment() {
    let mut j = RelevanceJudgments::new();
    j.insert("s", ["d2"]).unwrap();
    let r = ranked("s", vec!["d1".into(), "d2".into(), "d3".into()]);
    let row = &evaluate_links(std::slice::from_ref(&r), &j, &[3])
        .unwrap()
        .rows[0];
    assert_eq!(row.micro_precision, 1.0 / 3.0);
    assert_eq!(row.micro_recall, 1.0);
    let other = ranked("elsewhere", vec!["d1".into()]);
    match evaluate_links(&[r, other], &j, &[3]) {
        Err(Error::MissingJudgment(id)) => assert_eq!(id, "elsewhere"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn threshold_hand_cases() {
    let p = threshold_partition(&[0.05, 0.1, 0.2, 0.3], &[0.2, 0.05], DEFAULT_TAU).unwrap();
    assert_eq!(
        (p.fraction_all_below, p.fraction_relevant_above),
        (0.5, Some(0.5))
    );
    let p = threshold_partition(&[0.0; 7], &[0.0; 3], DEFAULT_TAU).unwrap();
    assert_eq!(
        (p.fraction_all_below, p.fraction_relevant_above),
        (1.0, Some(0.0))
    );
    let p = threshold_partition(&[0.3], &[], DEFAULT_TAU).unwrap();
    assert_eq!(p.fraction_relevant_above, None);
}

#[test]
fn pooled_scores_follow_judgments() {
    let index = TfidfIndex::build(&five_docs(), Weighting::TfIdf).unwrap();
    let r = link_transcript(
        &index,
        &transcript("cast", "arraylist contains"),
        5,
        DEFAULT_TAU,
    )
    .unwrap();
    let mut j = RelevanceJudgments::new();
    j.insert("cast", ["java/util/ArrayList"]).unwrap();
    let (all, rel) = pooled_scores(std::slice::from_ref(&r), &j);
    assert_eq!(all.len(), 5);
    assert_eq!(rel, [r.ranking[0].score]);
    let p = threshold_partition(&all, &rel, DEFAULT_TAU).unwrap();
    assert_eq!(p.relevant_above, 1);
    assert_eq!(p.all_total - p.all_below, r.above_threshold);
}

fn evaluation_input() -> impl Strategy<Value = (Vec<LinkResult>, RelevanceJudgments)> {
    let cast = (
        prop::collection::vec(0usize..15, 1..15),
        prop::collection::btree_set(0usize..20, 1..5),
    );
    prop::collection::vec(cast, 1..6).prop_map(|casts| {
        let mut judgments = RelevanceJudgments::new();
        let results = casts
            .into_iter()
            .enumerate()
            .map(|(s, (order, rel))| {
                let mut seen = BTreeSet::new();
                let docs = order
                    .into_iter()
                    .filter(|d| seen.insert(*d))
                    .map(|d| format!("d{d}"))
                    .collect();
                judgments
                    .insert(format!("s{s}"), rel.into_iter().map(|d| format!("d{d}")))
                    .unwrap();
                ranked(&format!("s{s}"), docs)
            })
            .collect();
        (results, judgments)
    })
}

proptest! {
    #[test]
    fn hits_and_recall_monotone_in_k((results, judgments) in evaluation_input()) {
        let ks: Vec<usize> = (1..=20).collect();
        let rows = evaluate_links(&results, &judgments, &ks).unwrap().rows;
        for w in rows.windows(2) {
            prop_assert!(w[0].retrieved_relevant_total <= w[1].retrieved_relevant_total);
            prop_assert!(w[0].micro_recall <= w[1].micro_recall);
            prop_assert!(w[0].macro_recall <= w[1].macro_recall);
        }
        for r in &rows {
            prop_assert!((0.0..=1.0).contains(&r.micro_precision) && (0.0..=1.0).contains(&r.micro_recall));
        }
    }

    #[test]
    fn threshold_fractions_are_exact_counts(
        all in prop::collection::vec(0.0f64..1.0, 1..50),
        rel in prop::collection::vec(0.0f64..1.0, 0..20),
        tau in 0.0f64..1.0,
    ) {
        let p = threshold_partition(&all, &rel, tau).unwrap();
        let below = all.iter().filter(|&&s| s < tau).count();
        prop_assert_eq!(p.all_below, below);
        prop_assert_eq!(p.fraction_all_below, below as f64 / all.len() as f64);
        prop_assert!((0.0..=1.0).contains(&p.fraction_all_below));
        if rel.is_empty() {
            prop_assert_eq!(p.fraction_relevant_above, None);
        } else {
            let above = rel.iter().filter(|&&s| s >= tau).count();
            prop_assert_eq!(p.fraction_relevant_above, Some(above as f64 / rel.len() as f64));
        }
    }
}
