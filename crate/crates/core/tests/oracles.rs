use bloat_core::metrics::boilerplate_pct;
use bloat_core::text::{plan_chunks, Document, DocumentKind, Segmenter};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sentence(words: usize) -> String {
    let body: Vec<&str> = (0..words).map(|i| if i % 3 == 0 { "market" } else { "sales" }).collect();
    format!("{}.", body.join(" "))
}

/// Every cut set over `n` sentences, as chunk boundaries.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    (0u32..1 << (n - 1))
        .map(|mask| {
            let mut cuts: Vec<usize> = (1..n).filter(|i| mask & (1 << (i - 1)) != 0).collect();
            cuts.insert(0, 0);
            cuts.push(n);
            cuts
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn greedy_plan_matches_exhaustive_search(lens in prop::collection::vec(1usize..12, 1..11), budget in 1usize..30) {
        let text = lens.iter().map(|&w| sentence(w)).collect::<Vec<_>>().join(" ");
        let doc = Document::new("d", "f", "p", DocumentKind::Mdna, text, &Segmenter::default());
        prop_assert_eq!(doc.sentences.len(), lens.len());
        let tokens = doc.sentence_tokens.clone();
        let feasible: Vec<Vec<usize>> = partitions(lens.len())
            .into_iter()
            .filter(|cuts| cuts.windows(2).all(|w| tokens[w[0]..w[1]].iter().sum::<usize>() <= budget))
            .collect();
        match plan_chunks(&doc, budget) {
            Err(_) => prop_assert!(feasible.is_empty()),
            Ok(plan) => {
                let fewest = feasible.iter().map(|c| c.len() - 1).min().unwrap();
                prop_assert_eq!(plan.len(), fewest);
                // Among minimal plans, greedy fills each chunk as far as it can.
                let best = feasible.iter().filter(|c| c.len() - 1 == fewest).max().unwrap();
                let got: Vec<usize> = plan.chunks.iter().map(|r| r.start).chain(Some(lens.len())).collect();
                prop_assert_eq!(&got, best);
            }
        }
    }
}

fn normalized_sentences(text: &str) -> Vec<Vec<String>> {
    text.split('.')
        .map(|s| s.split_whitespace().map(|w| w.to_lowercase()).collect::<Vec<_>>())
        .filter(|s| !s.is_empty())
        .collect()
}

fn has_gram(doc: &[Vec<String>], gram: &[String]) -> bool {
    doc.iter().any(|s| s.windows(4).any(|w| w == gram))
}

#[test]
fn boilerplate_matches_brute_force_census() {
    let vocab = ["we", "expect", "demand", "to", "remain", "strong", "in", "the", "coming", "year"];
    let stock = "we expect demand to remain strong";
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let docs: Vec<String> = (0..10)
            .map(|_| {
                let k = rng.random_range(1..5);
                (0..k)
                    .map(|_| {
                        if rng.random_bool(0.4) {
                            format!("{stock}.")
                        } else {
                            let n = rng.random_range(3..9);
                            let w: Vec<&str> = (0..n).map(|_| vocab[rng.random_range(0..vocab.len())]).collect();
                            format!("{}.", w.join(" "))
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        let corpus: Vec<Document> = docs
            .iter()
            .enumerate()
            .map(|(i, t)| Document::new(format!("d{i}"), "f", "2020", DocumentKind::Mdna, t.as_str(), &Segmenter::default()))
            .collect();
        let got = boilerplate_pct(&corpus).unwrap();
        let parsed: Vec<Vec<Vec<String>>> = docs.iter().map(|t| normalized_sentences(t)).collect();
        for (i, doc) in parsed.iter().enumerate() {
            let total: usize = doc.iter().map(Vec::len).sum();
            let boiler: usize = doc
                .iter()
                .filter(|s| {
                    s.windows(4).any(|g| {
                        let df = parsed.iter().filter(|d| has_gram(d, g)).count();
                        df * 4 > parsed.len() * 3
                    })
                })
                .map(Vec::len)
                .sum();
            let want = boiler as f64 / total as f64;
            let have = got[&format!("d{i}")];
            assert!((want - have).abs() < 1e-12, "doc {i}: {want} vs {have}");
            assert!((0.0..=1.0).contains(&have));
        }
    }
}
