use criterion::{criterion_group, criterion_main, Criterion};
use sclifford::basis::BasisDescriptor;
use sclifford::fischer::harmonic_decompose;
use sclifford::mesh::{CapMesh, MeshFunction};
use sclifford::operators::{OperatorEngine, OperatorTag};
use sclifford::poly::CliffordPolynomial;
use sclifford::quadrature::cauchy_transform_quad;
use sclifford::scalar::Q;
use sclifford_bench::sample_degree6;

fn bench_basis_build(c: &mut Criterion) {
    c.bench_function("basis_build_n2_N3", |b| {
        b.iter(|| BasisDescriptor::build(2, 3).unwrap())
    });
}

fn bench_operator_assembly(c: &mut Criterion) {
    c.bench_function("assemble_gamma0_n2_N3", |b| {
        b.iter(|| {
            let eng = OperatorEngine::new(2, 3).unwrap();
            eng.operator(OperatorTag::Gamma0).unwrap()
        })
    });
}

fn bench_fischer(c: &mut Criterion) {
    let p = sample_degree6(2);
    c.bench_function("fischer_decompose_deg6", |b| {
        b.iter(|| harmonic_decompose(&p).unwrap())
    });
}

fn bench_cauchy_quadrature(c: &mut Criterion) {
    let mesh = CapMesh::whole_sphere(0.15).unwrap();
    let poly = (-&CliffordPolynomial::<Q>::paravector_variable(2)).to_f64();
    let f = MeshFunction::sample(mesh.interior.iter().map(|n| n.point.clone()), |p| {
        poly.evaluate(p)
    });
    let targets: Vec<_> = mesh
        .interior
        .iter()
        .step_by(7)
        .map(|n| n.point.clone())
        .collect();
    c.bench_function("cauchy_transform_coarse", |b| {
        b.iter(|| cauchy_transform_quad(&mesh, &f, &targets))
    });
}

criterion_group!(
    benches,
    bench_basis_build,
    bench_operator_assembly,
    bench_fischer,
    bench_cauchy_quadrature
);
criterion_main!(benches);
