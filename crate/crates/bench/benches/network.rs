//! Forward-pass benchmarks: the alias-free variant pays for its exactness
//! with FFT-based resampling in every activation; this quantifies the gap.

use afc_bench::tensor;
use afc_core::network::{build_network, NetworkSpec, Variant};
use afc_core::spectral;
use criterion::{black_box, criterion_group, criterion_main, Criterion};

fn bench_forward(c: &mut Criterion) {
    let x = spectral::nyquist_sanitize_2d(&tensor(7, 3, 32, 32));
    for variant in [Variant::Baseline, Variant::Afc] {
        let net = build_network(&NetworkSpec::desk_default(variant, 1)).unwrap();
        c.bench_function(&format!("forward_{variant}_32x32"), |b| {
            b.iter(|| net.logits(black_box(&x)).unwrap())
        });
    }
}

fn bench_forward_with_taps(c: &mut Criterion) {
    let x = spectral::nyquist_sanitize_2d(&tensor(8, 3, 32, 32));
    let net = build_network(&NetworkSpec::desk_default(Variant::Afc, 1)).unwrap();
    c.bench_function("forward_afc_32x32_with_taps", |b| {
        b.iter(|| net.forward(black_box(&x), true).unwrap())
    });
}

criterion_group!(benches, bench_forward, bench_forward_with_taps);
criterion_main!(benches);
