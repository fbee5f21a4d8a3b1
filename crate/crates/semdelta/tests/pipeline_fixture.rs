//! The four-record fixture traced by hand against the test lexicon.
//!
//! h1 "The cat chased the dog, then we went for a run."
//!    cat→animals, dog→animals+pets, run→motion; 3 matched positions
//!    animals 2/3, motion 1/3, pets 1/3 → Δ 1/3 (motion wins the tie by name)
//!    renormalized 1/2, 1/4, 1/4 → H 1.5 bits
//! h2 "Rain and snow ruined our trip to the beach."
//!    weather 2/4, travel 2/4 → Δ 0, H 1 bit
//! a1 "The computer runs software and a robot learns an algorithm from data."
//!    computer, software, robot, algorithm, data→technology; data→science
//!    technology 5/5, science 1/5 → Δ 4/5, H = H(5/6, 1/6)
//! a2 "The guitar and piano played a song at the concert with the band."
//!    music 5/5 only → Δ 1, H 0

use semdelta::fixtures::tiny_corpus;
use semdelta::pipeline::analyze_parallel;
use semdelta_core::{builtin_test_lexicon, AnalysisOptions, Comparison, Label};

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-12
}

#[test]
fn four_record_report() {
    let tiny = tiny_corpus();
    let records: Vec<_> = tiny.human.into_iter().chain(tiny.ai).collect();
    let report = analyze_parallel(&records, &builtin_test_lexicon(), &AnalysisOptions::default(), 2).unwrap();
    assert_eq!(report.records.len(), 4);
    assert!(report.skipped.is_empty());

    let row = |id: &str| report.records.iter().find(|r| r.id == id).unwrap();
    let h1 = row("h1");
    assert_eq!((h1.top1.as_str(), h1.top2.as_deref()), ("animals", Some("motion")));
    assert!(close(h1.delta, 1.0 / 3.0) && h1.entropy_bits == 1.5);
    let h2 = row("h2");
    assert_eq!((h2.top1.as_str(), h2.top2.as_deref()), ("travel", Some("weather")));
    assert!(h2.delta == 0.0 && h2.entropy_bits == 1.0);
    let a1 = row("a1");
    let (p, q) = (5.0f64 / 6.0, 1.0f64 / 6.0);
    assert!(close(a1.delta, 0.8));
    assert!(close(a1.entropy_bits, -(p * p.log2() + q * q.log2())));
    let a2 = row("a2");
    assert_eq!(a2.top2, None);
    assert!(a2.delta == 1.0 && a2.entropy_bits == 0.0);

    let ai = &report.groups[&Label::Ai].delta;
    let human = &report.groups[&Label::Human].delta;
    assert!(close(ai.mean, 0.9));
    assert!(close(human.mean, 1.0 / 6.0));

    // Welch by hand: variances 1/50 and 1/18, n = 2 each
    let (va, vh): (f64, f64) = (0.02 / 2.0, 1.0 / 18.0 / 2.0);
    let t = (0.9 - 1.0 / 6.0) / (va + vh).sqrt();
    let df = (va + vh) * (va + vh) / (va * va + vh * vh);
    let Comparison::Tested(w) = &report.welch_delta else {
        panic!("expected a Welch result")
    };
    assert!((w.t_statistic - t).abs() < 1e-9, "{} vs {t}", w.t_statistic);
    assert!((w.degrees_of_freedom - df).abs() < 1e-9);

    for (label, bins) in &report.histogram {
        assert_eq!(bins.len(), 30);
        assert_eq!(bins.iter().map(|b| b.count).sum::<u64>(), report.groups[label].delta.n);
    }
}

#[test]
fn relabeling_changes_grouping_only() {
    let tiny = tiny_corpus();
    let mut records: Vec<_> = tiny.human.into_iter().chain(tiny.ai).collect();
    let lex = builtin_test_lexicon();
    let before = analyze_parallel(&records, &lex, &AnalysisOptions::default(), 1).unwrap();
    for r in &mut records {
        r.label = match r.label {
            Label::Ai => Label::Human,
            Label::Human => Label::Ai,
        };
    }
    let after = analyze_parallel(&records, &lex, &AnalysisOptions::default(), 1).unwrap();
    for (a, b) in before.records.iter().zip(&after.records) {
        assert_eq!((a.delta, a.entropy_bits, &a.top1), (b.delta, b.entropy_bits, &b.top1));
        assert_ne!(a.label, b.label);
    }
}
