use std::collections::BTreeSet;

use coord_core::backend::FnBackend;
use coord_core::game::option_letter;
use coord_core::game::GameKind;
use coord_core::qa::{
    accuracy_rows, bundled_scenarios, collect_responses, correlations, extract_answer,
    parse_scenarios, read_accuracy_csv, render_all, score_run, write_accuracy_csv, write_scenarios,
    Answer, Category, McqItem,
};
use coord_core::rng::{make_rng, Seed};

/// Pearson from raw sums, a different arithmetic path from the library's centred one.
fn pearson_raw(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    let syy: f64 = y.iter().map(|b| b * b).sum();
    (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt())
}

/// Rank by counting: smaller values plus half the ties, plus one half.
fn ranks_by_counting(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|&v| {
            let less = x.iter().filter(|&&w| w < v).count() as f64;
            let equal = x.iter().filter(|&&w| w == v).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

fn spearman_oracle(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks_by_counting(x), ranks_by_counting(y));
    let distinct =
        |v: &[f64]| v.iter().map(|f| f.to_bits()).collect::<BTreeSet<_>>().len() == v.len();
    if distinct(x) && distinct(y) {
        // No ties: the textbook d-squared form.
        let n = x.len() as f64;
        let d2: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b).powi(2)).sum();
        1.0 - 6.0 * d2 / (n * (n * n - 1.0))
    } else {
        pearson_raw(&rx, &ry)
    }
}

#[test]
fn correlations_agree_with_independent_formulas() {
    let mut rng = make_rng(Seed(99));
    for case in 0..20 {
        let n = 3 + case;
        let (x, y): (Vec<f64>, Vec<f64>) = (0..n)
            .map(|_| {
                // Even cases draw from a coarse grid so ties are common.
                let a = if case % 2 == 0 {
                    rng.index(5) as f64
                } else {
                    (rng.next_u32() as f64 / u32::MAX as f64) * 10.0
                };
                let b = 0.5 * a
                    + if case % 2 == 0 {
                        rng.index(4) as f64
                    } else {
                        (rng.next_u32() as f64 / u32::MAX as f64) * 3.0
                    };
                (a, b)
            })
            .unzip();
        let Ok((p, s)) = correlations(&x, &y) else {
            // A constant vector has no correlation; the oracle agrees by dividing by zero.
            assert!(pearson_raw(&x, &y).is_nan());
            continue;
        };
        assert!(
            (p - pearson_raw(&x, &y)).abs() < 1e-12,
            "case {case}: {p} vs {}",
            pearson_raw(&x, &y)
        );
        assert!(
            (s - spearman_oracle(&x, &y)).abs() < 1e-12,
            "case {case}: {s} vs {}",
            spearman_oracle(&x, &y)
        );
    }
}

#[test]
fn correlation_edge_cases() {
    assert!(correlations(&[1.0, 2.0], &[1.0, 2.0]).is_err());
    assert!(correlations(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
    assert!(correlations(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    let (p, s) = correlations(&[1.0, 2.0, 3.0, 4.0], &[10.0, 20.0, 30.0, 1000.0]).unwrap();
    assert!(p < 1.0 && (s - 1.0).abs() < 1e-12);
}

fn four_option_item(i: usize) -> McqItem {
    McqItem {
        scenario_id: format!("synthetic-{i}"),
        game: GameKind::Kitchen,
        category: Category::ALL[i % 3],
        prompt: "Which?".into(),
        options: vec![
            "wait.".into(),
            "move away.".into(),
            "pick up onion from o0.".into(),
            "deliver soup to d0.".into(),
        ],
        gold: option_letter(i % 4),
    }
}

#[test]
fn uniform_random_answers_score_a_quarter() {
    let items: Vec<McqItem> = (0..30).map(four_option_item).collect();
    let trials = 10_000 / items.len() + 1;
    let mut rng = make_rng(Seed(5));
    let responses: Vec<Vec<String>> = items
        .iter()
        .map(|_| {
            (0..trials)
                .map(|_| format!("Answer: {}", option_letter(rng.index(4))))
                .collect()
        })
        .collect();
    let run = score_run(&items, &responses, trials).unwrap();
    let (mut correct, mut total) = (0, 0);
    for c in &run.categories {
        assert!((c.random_baseline - 0.25).abs() < 1e-12);
        for t in &c.trials {
            correct += t.correct;
            total += t.total;
            assert_eq!(t.unmatched, 0);
        }
    }
    assert!(total >= 10_000);
    let acc = correct as f64 / total as f64;
    assert!((acc - 0.25).abs() <= 0.02, "random accuracy {acc}");
}

#[test]
fn bundled_gold_answers_are_among_the_options() {
    let items = render_all(bundled_scenarios()).unwrap();
    assert!(items.len() >= 12);
    let categories: BTreeSet<Category> = items.iter().map(|i| i.category).collect();
    assert_eq!(categories.len(), 3);
    for item in &items {
        let g = item
            .gold_index()
            .unwrap_or_else(|| panic!("{} {}", item.scenario_id, item.category));
        assert!(item
            .prompt
            .contains(&format!("{}. {}", item.gold, item.options[g])));
        assert_eq!(
            item.options.iter().collect::<BTreeSet<_>>().len(),
            item.options.len(),
            "duplicate options"
        );
    }
}

#[test]
fn oracle_backend_scores_perfectly_and_a_contrarian_scores_zero() {
    let items = render_all(bundled_scenarios()).unwrap();
    let gold_of = |prompt: &str, items: &[McqItem], shift: usize| {
        let item = items.iter().find(|i| i.prompt == prompt).unwrap();
        let g = item.gold_index().unwrap();
        format!(
            "Reasoning...\nAnswer: {}",
            option_letter((g + shift) % item.options.len())
        )
    };
    let for_right = items.clone();
    let right = FnBackend::new("right", move |m| Ok(gold_of(&m[0].content, &for_right, 0)));
    let for_wrong = items.clone();
    let wrong = FnBackend::new("wrong", move |m| Ok(gold_of(&m[0].content, &for_wrong, 1)));

    let r = collect_responses(&items, &right, 2, 4).unwrap();
    let score = score_run(&items, &r, 2).unwrap();
    assert!(score.categories.iter().all(|c| c.mean_accuracy == 1.0));

    let w = collect_responses(&items, &wrong, 2, 4).unwrap();
    let score = score_run(&items, &w, 2).unwrap();
    assert!(score.categories.iter().all(|c| c.mean_accuracy == 0.0));

    let rows = accuracy_rows("right", &score_run(&items, &r, 2).unwrap());
    assert_eq!(rows.len(), 6);
    let mut buf = Vec::new();
    write_accuracy_csv(&mut buf, &rows).unwrap();
    assert_eq!(read_accuracy_csv(buf.as_slice()).unwrap(), rows);
}

#[test]
fn failed_calls_count_as_unmatched() {
    let items: Vec<McqItem> = (0..3).map(four_option_item).collect();
    let down = FnBackend::new("down", |_| {
        Err(coord_core::backend::BackendError::ReplayExhausted)
    });
    let r = collect_responses(&items, &down, 1, 1).unwrap();
    let score = score_run(&items, &r, 1).unwrap();
    assert!(score
        .categories
        .iter()
        .all(|c| c.trials[0].unmatched == 1 && c.mean_accuracy == 0.0));
}

#[test]
fn answer_extraction_examples() {
    let item = four_option_item(0);
    let cases = [
        ("Answer: C", Answer::Option(2)),
        ("The answer is (B).", Answer::Option(1)),
        ("answer - D", Answer::Option(3)),
        ("a plan: wait a bit", Answer::Unmatched),
        ("I think A. wait. is right", Answer::Option(0)),
        ("deliver soup to d0.", Answer::Option(3)),
        ("Answer: A\nOn reflection, Answer: B", Answer::Option(1)),
        ("Answer: Q", Answer::Unmatched),
        ("no idea", Answer::Unmatched),
        ("", Answer::Unmatched),
    ];
    for (text, expect) in cases {
        assert_eq!(extract_answer(text, &item), expect, "{text:?}");
    }
}

#[test]
fn scenario_files_round_trip() {
    let mut buf = Vec::new();
    write_scenarios(&mut buf, bundled_scenarios()).unwrap();
    let back = parse_scenarios(std::str::from_utf8(&buf).unwrap()).unwrap();
    assert_eq!(back, bundled_scenarios());
    assert!(parse_scenarios("{\"id\": 3}").is_err());
}

#[test]
fn mismatched_response_tables_are_rejected() {
    let items: Vec<McqItem> = (0..2).map(four_option_item).collect();
    assert!(score_run(&items, &[vec!["A".into()]], 1).is_err());
    assert!(score_run(&items, &[vec![], vec![]], 1).is_err());
    assert!(score_run(&items, &[vec![], vec![]], 0).is_err());
}
