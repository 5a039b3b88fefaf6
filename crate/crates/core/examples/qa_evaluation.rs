//! Score two toy answerers on the bundled question pack: one that always says
//! "A" and one that reads the gold answer, with the random-guess baseline.
//!
//! cargo run --example qa_evaluation

use std::collections::HashMap;

use coord_core::backend::FnBackend;
use coord_core::qa::{bundled_scenarios, collect_responses, correlations, render_all, score_run};

fn main() -> anyhow::Result<()> {
    let items = render_all(bundled_scenarios())?;
    let gold: HashMap<String, String> = items
        .iter()
        .map(|i| (i.prompt.clone(), i.gold.clone()))
        .collect();
    let always_a = FnBackend::new("always-a", |_| Ok("Answer: A".to_string()));
    let cheat = FnBackend::new("gold", move |msgs| {
        Ok(format!("Answer: {}", gold[&msgs[0].content]))
    });

    let mut means = Vec::new();
    for (name, backend) in [("always-a", &always_a), ("gold", &cheat)] {
        let responses = collect_responses(&items, backend, 2, 4)?;
        let score = score_run(&items, &responses, 2)?;
        println!("{name}:");
        for c in &score.categories {
            println!(
                "  {:<4} accuracy {:.3}  random {:.3}",
                c.category.to_string(),
                c.mean_accuracy,
                c.random_baseline
            );
        }
        means.push(
            score
                .categories
                .iter()
                .map(|c| c.mean_accuracy)
                .collect::<Vec<_>>(),
        );
    }
    if let Ok((r, rho)) = correlations(&means[0], &means[1]) {
        println!("per-category agreement: pearson {r:.3}, spearman {rho:.3}");
    }
    Ok(())
}
