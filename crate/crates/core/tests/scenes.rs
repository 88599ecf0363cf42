use rectiform::theorems::run_all;
use rectiform::{Scene, TheoremId, Verdict};

fn scene(name: &str) -> Scene {
    Scene::load(format!("{}/../../scenes/{name}.json", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[test]
fn empty_scene_gives_no_reports() {
    let s = Scene::from_json("{}").unwrap();
    assert!(run_all(&s).is_empty());
}

#[test]
fn identity_scene_holds_everywhere() {
    let reports = run_all(&scene("identity"));
    assert!(!reports.is_empty());
    for r in &reports {
        assert_eq!(r.verdict, Verdict::HoldsWithinTol, "{r:?}");
        assert!(r.residual_max < 1e-9);
        assert!(r.residual_max >= r.residual_mean && r.residual_mean >= 0.0);
    }
}

#[test]
fn mercator_scene_skips_ambient_checks() {
    let reports = run_all(&scene("mercator"));
    let t1 = reports.iter().find(|r| r.theorem_id == TheoremId::RectifyingImage).unwrap();
    assert_eq!(t1.verdict, Verdict::Skipped);
    assert_eq!(t1.notices, ["requires AmbientMode"]);
    let law = reports.iter().find(|r| r.theorem_id == TheoremId::ChristoffelConformal).unwrap();
    assert_eq!(law.verdict, Verdict::HoldsWithinTol);
    assert_eq!(law.samples, 400);
}

#[test]
fn reports_are_deterministic() {
    let a = serde_json::to_string(&run_all(&scene("cone"))).unwrap();
    let b = serde_json::to_string(&run_all(&scene("cone"))).unwrap();
    assert_eq!(a, b);
}

#[test]
fn report_order_follows_declarations() {
    let s = scene("cone");
    let ids: Vec<_> = run_all(&s)
        .into_iter()
        .filter(|r| !matches!(
            r.theorem_id,
            TheoremId::NormalComponentHomothetic
                | TheoremId::NormalComponentIsometric
                | TheoremId::GeodesicCurvatureHomothetic
                | TheoremId::GeodesicCurvatureIsometric
        ))
        .map(|r| (r.theorem_id, r.pair))
        .collect();
    let declared: Vec<_> = s.checks().iter().map(|c| (c.theorem, c.pair.clone())).collect();
    assert_eq!(ids, declared);
}
