//! End-to-end flows across modules: files, corpora and conventions.

use qstar::bounds::{coeff_bound, fekete_szego_bound, fekete_szego_value};
use qstar::classify::{boundary_sample_test, sufficiency_test, VerdictKind};
use qstar::operators::{apply_l, bernardi_series, BernardiParams};
use qstar::oracle::{generate_corpus, read_jsonl, write_jsonl, CorpusSpec};
use qstar::series::{NormalizedMember, TruncSeries};
use qstar::{Complex64, JanowskiParams, LambdaConvention, QContext};

#[test]
fn series_file_round_trip_then_classify() {
    let dir = tempdir();
    let ctx = QContext::new(1, 0.5, 0.0).unwrap();
    let jp = JanowskiParams::new(1.0, -1.0).unwrap();
    let f = NormalizedMember::from_tail(ctx, &[Complex64::new(0.05, 0.02), Complex64::new(-0.01, 0.0)]);
    let path = dir.join("f.json");
    f.series().save(&path).unwrap();
    let back = NormalizedMember::new(ctx, TruncSeries::load(&path).unwrap()).unwrap();
    assert_eq!(&back, &f);
    assert_eq!(sufficiency_test(&back, &jp).kind, VerdictKind::SufficiencyPass);
    assert_eq!(
        boundary_sample_test(&back, &jp, 0.9, 720).unwrap().verdict.kind,
        VerdictKind::BoundaryPass
    );
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn corpus_dump_is_lossless() {
    let ctx = QContext::new(3, 0.3, 2.5).unwrap();
    let jp = JanowskiParams::new(0.75, -1.0).unwrap();
    let corpus = generate_corpus(&ctx, &jp, &CorpusSpec::default()).unwrap();
    let mut buf = Vec::new();
    write_jsonl(&corpus, &mut buf).unwrap();
    let back = read_jsonl(std::str::from_utf8(&buf).unwrap(), &ctx).unwrap();
    assert_eq!(back, corpus);
}

#[test]
fn literal_convention_corpus_respects_its_bounds() {
    for q in [0.3, 0.7, 0.99] {
        for p in 1..=3 {
            let ctx = QContext::with_convention(p, q, 1.0, LambdaConvention::PaperLiteral).unwrap();
            let jp = JanowskiParams::new(1.0, -1.0).unwrap();
            let corpus = generate_corpus(&ctx, &jp, &CorpusSpec { seeds_per_k: 10, ..CorpusSpec::default() }).unwrap();
            for m in &corpus {
                for n in 1..=6 {
                    assert!(m.member.a(n).norm() <= coeff_bound(n as u32, &ctx, &jp).unwrap() + 1e-9);
                }
                let l = Complex64::new(0.5, 0.0);
                assert!(fekete_szego_value(&m.member, l).unwrap() <= fekete_szego_bound(l, &ctx, &jp) + 1e-9);
            }
        }
    }
}

#[test]
fn bernardi_commutes_with_operator_coefficientwise() {
    // both act diagonally on coefficients, so the order of application is irrelevant
    let ctx = QContext::new(2, 0.6, 1.5).unwrap();
    let jp = JanowskiParams::new(1.0, 0.0).unwrap();
    let bp = BernardiParams::new(2.0, ctx).unwrap();
    let m = &generate_corpus(&ctx, &jp, &CorpusSpec { seeds_per_k: 1, ..CorpusSpec::default() }).unwrap()[3];
    let one = apply_l(&NormalizedMember::new(ctx, bernardi_series(&m.member, &bp)).unwrap());
    let lf = NormalizedMember::new(ctx, apply_l(&m.member)).unwrap();
    let other = bernardi_series(&lf, &bp);
    for (a, b) in one.coeffs().iter().zip(other.coeffs()) {
        assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
    }
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("qstar-pipeline-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn truncated_oracle_members_pass_boundary_where_coefficients_stay_moderate() {
    // the truncated polynomial is only a member up to O(r^{N+1} max|a|);
    // for q >= 0.9 and p <= 2 that error is invisible at r = 0.5
    let spec = CorpusSpec { seeds_per_k: 10, ..CorpusSpec::default() };
    for q in [0.9, 0.99] {
        for p in 1..=2 {
            let ctx = QContext::new(p, q, 1.0).unwrap();
            for (a, b) in qstar::grid::AB_VALUES {
                let jp = JanowskiParams::new(a, b).unwrap();
                for m in generate_corpus(&ctx, &jp, &spec).unwrap() {
                    let report = boundary_sample_test(&m.member, &jp, 0.5, 720).unwrap();
                    assert_eq!(report.verdict.kind, VerdictKind::BoundaryPass, "q={q} p={p} seed={}", m.seed);
                }
            }
        }
    }
}
