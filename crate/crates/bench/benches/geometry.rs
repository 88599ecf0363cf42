use std::f64::consts::PI;
use std::hint::black_box;
use std::path::PathBuf;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use rectiform::theorems::run_all;
use rectiform::{CurveOnSurface, CurveOptions, ParamCurve, Scene, SurfacePatch};

fn sphere() -> Arc<SurfacePatch> {
    Arc::new(SurfacePatch::parse("cos(u)*cos(v)", "cos(u)*sin(v)", "sin(u)", [-1.2, 1.2], [-PI, PI]).unwrap())
}

fn jets(c: &mut Criterion) {
    let s = sphere();
    c.bench_function("surface jet", |b| b.iter(|| s.jet(black_box(0.3), black_box(0.7)).unwrap()));
    c.bench_function("christoffel", |b| b.iter(|| s.christoffel(black_box(0.3), black_box(0.7)).unwrap()));
}

fn reparameterize(c: &mut Criterion) {
    let s = sphere();
    let curve = ParamCurve::parse("0.4*sin(t)", "t", [-2.0, 2.0]).unwrap();
    c.bench_function("reparameterize", |b| {
        b.iter(|| CurveOnSurface::reparameterize(s.clone(), curve.clone(), CurveOptions::default()).unwrap())
    });
}

fn scenes(c: &mut Criterion) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenes/cone.json");
    let scene = Scene::load(path).unwrap();
    c.bench_function("run_all cone scene", |b| b.iter(|| run_all(&scene)));
}

criterion_group!(benches, jets, reparameterize, scenes);
criterion_main!(benches);
