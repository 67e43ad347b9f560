use proptest::prelude::*;

use quiver_soliton::dsl::{parse, serialize, DslError};
use quiver_soliton::lie::{check_graded_bracket, is_derivation, is_nice_basis, nilpotency_step};
use quiver_soliton::quiver::{partition, reduced_quiver};
use quiver_soliton::rational::{rat, Rational};
use quiver_soliton::ricci::{ricci_diagonal_nice, ricci_form};
use quiver_soliton::soliton::{construct_soliton_metric, diagonal_soliton_feasibility};
use quiver_soliton::suite::{ricci_agreement, run_suite};
use quiver_soliton::{build_algebra, verify_certificate, DiagonalMetric, Quiver};

/// Acyclic quivers on up to six vertices: arrows go forward along a shuffled
/// vertex order, parallel arrows included.
fn acyclic_quiver(max_arrows: usize) -> impl Strategy<Value = Quiver> {
    (2usize..=6)
        .prop_flat_map(move |n| {
            (
                Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
                prop::collection::vec((0..n, 0..n), 1..=max_arrows),
                prop::collection::vec(any::<bool>(), 0..3),
            )
        })
        .prop_map(|(order, pairs, isolated)| {
            let n = order.len();
            let mut vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
            vertices.extend((0..isolated.len()).map(|i| format!("w{i}")));
            let arrows: Vec<(String, String, String)> = pairs
                .iter()
                .enumerate()
                .map(|(k, &(i, j))| {
                    let j = if i == j { (i + 1) % n } else { j };
                    let (lo, hi) = (i.min(j), i.max(j));
                    (format!("x{k}"), format!("v{}", order[lo]), format!("v{}", order[hi]))
                })
                .collect();
            Quiver::new(vertices, arrows).unwrap()
        })
}

fn metric_values() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((1i64..=12, 1i64..=5), 128).prop_map(|v| v.into_iter().map(|(p, q)| rat(p, q)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_round_trip(q in acyclic_quiver(8)) {
        let text = serialize(&q);
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &q);
        prop_assert_eq!(serialize(&back), text);
    }

    #[test]
    fn parser_errors_point_at_real_lines(text in "[a-z:>\\- \n#]{0,80}") {
        match parse(&text) {
            Ok(_) => {}
            Err(e) => {
                let line = match e {
                    DslError::SyntaxError { line, .. } | DslError::DuplicateArrowName { line } | DslError::DuplicateVertexDeclaration { line } => line,
                };
                prop_assert!(line >= 1 && line <= text.lines().count());
            }
        }
    }

    #[test]
    fn algebra_structure(q in acyclic_quiver(8)) {
        let alg = build_algebra(&q).unwrap();
        let m = q.length().unwrap();
        prop_assert_eq!(nilpotency_step(&alg).unwrap(), m);
        prop_assert!(is_nice_basis(&alg).is_ok());
        prop_assert!(check_graded_bracket(&alg).is_ok());
        prop_assert_eq!(alg.grading_dims().iter().sum::<usize>(), alg.dim());
        prop_assert_eq!(alg.grading_dims()[0], q.arrow_count());
        prop_assert!(is_derivation(&alg, &alg.length_grading()));
    }

    #[test]
    fn reduction_shortens_by_one(q in acyclic_quiver(8)) {
        let m = q.length().unwrap();
        prop_assume!(m >= 2);
        let reduced = reduced_quiver(&q).unwrap();
        prop_assert_eq!(reduced.quiver.length().unwrap(), m - 1);
        let paths = q.enumerate_paths().unwrap();
        let reduced_paths = reduced.quiver.enumerate_paths().unwrap();
        prop_assert_eq!(paths.len(), reduced.starting_set.len() + reduced_paths.len());
        prop_assert!(partition(&q).unwrap().check(&q).is_ok());
    }

    #[test]
    fn ricci_formulas_agree_on_any_metric(q in acyclic_quiver(7), values in metric_values()) {
        let alg = build_algebra(&q).unwrap();
        prop_assume!(alg.dim() <= values.len());
        let g = DiagonalMetric::new(values[..alg.dim()].to_vec()).unwrap();
        prop_assert!(ricci_agreement(&alg, &g).is_ok());
        let full = ricci_form(&alg, &g).unwrap();
        prop_assert_eq!(full.scalar_curvature(), full.scalar_curvature_from_form(&g));
    }

    #[test]
    fn ricci_scales_inversely(q in acyclic_quiver(7), values in metric_values(), p in 1i64..6, d in 1i64..6) {
        let alg = build_algebra(&q).unwrap();
        prop_assume!(alg.dim() <= values.len());
        let g = DiagonalMetric::new(values[..alg.dim()].to_vec()).unwrap();
        let factor = rat(p, d);
        let base = ricci_diagonal_nice(&alg, &g).unwrap();
        let scaled = ricci_diagonal_nice(&alg, &g.scaled(&factor).unwrap()).unwrap();
        for (b, s) in base.iter().zip(&scaled) {
            prop_assert_eq!(b / &factor, s.clone());
        }
    }

    #[test]
    fn constructed_metric_is_a_soliton(q in acyclic_quiver(8)) {
        let alg = build_algebra(&q).unwrap();
        let g = construct_soliton_metric(&q).unwrap();
        let cert = verify_certificate(&alg, &g).unwrap();
        prop_assert!(cert.all_passed(), "{:?}", cert.checks);
        let sol = diagonal_soliton_feasibility(&alg, &g).unwrap().unwrap();
        prop_assert_eq!(sol.c, rat(-1, 1));
        prop_assert_eq!(sol.derivation, cert.derivation);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn full_suite(q in acyclic_quiver(9)) {
        let report = run_suite(&q);
        prop_assert!(report.ok(), "{}\n{:?}", serialize(&q), report.failures);
    }
}
