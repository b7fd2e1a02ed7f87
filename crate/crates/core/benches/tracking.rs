//! Tracker throughput across circuit sizes: the propagation pass alone, on
//! pre-synthesized records.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use pauli_track::circuit::{random_circuit, GateWeights};
use pauli_track::tracker::{synthesize_record, track};

fn bench_tracking(c: &mut Criterion) {
    let mut group = c.benchmark_group("track");
    for (qubits, gates) in [
        (100usize, 1000usize),
        (100, 50_000),
        (1100, 50_000),
        (5100, 50_000),
    ] {
        let circuit = random_circuit(qubits, gates, 7, &GateWeights::uniform()).unwrap();
        let record = synthesize_record(&circuit, 70);
        group.throughput(Throughput::Elements(gates as u64));
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("n{qubits}_m{gates}")),
            &(circuit, record),
            |b, (circuit, record)| {
                b.iter(|| track(black_box(circuit), black_box(record)).unwrap());
            },
        );
    }
    group.finish();
}

criterion_group!(benches, bench_tracking);
criterion_main!(benches);
