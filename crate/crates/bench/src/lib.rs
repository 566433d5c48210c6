//! Criterion benchmarks for the verifiers and the recursive construction.

use criterion::{black_box, BenchmarkId, Criterion};
use shforge_core::algebraic::{construct_recursive, RecursionBudget};
use shforge_core::ff::PrimeField;
use shforge_core::phm::{build_matrix, EvaluationVector};

pub fn benchmarks(c: &mut Criterion) {
    freeness(c);
    strong_hashing(c);
    recursion(c);
}

fn freeness(c: &mut Criterion) {
    let mut group = c.benchmark_group("is_free");
    for n in [75usize, 150] {
        let (h, _) = construct_recursive(3, 2, n, &RecursionBudget::new(3, 1)).unwrap();
        group.bench_with_input(BenchmarkId::new("pruned", h.len()), &h, |b, h| {
            b.iter(|| black_box(h.is_free(5, 3).unwrap()))
        });
        if n == 75 {
            group.bench_with_input(BenchmarkId::new("naive", h.len()), &h, |b, h| {
                b.iter(|| black_box(h.is_free_naive(5, 3).unwrap()))
            });
        }
    }
    group.finish();
}

fn strong_hashing(c: &mut Criterion) {
    let mut group = c.benchmark_group("is_strongly_3ph");
    group.sample_size(10);
    for (q, k, r) in [(11u64, 2usize, 4usize), (7, 3, 5)] {
        let v = EvaluationVector::identity(PrimeField::new(q).unwrap(), r).unwrap();
        let m = build_matrix(q, k, &v).unwrap();
        let id = format!("q{q}_k{k}_r{r}");
        group.bench_with_input(BenchmarkId::new("full", &id), &m, |b, m| {
            b.iter(|| black_box(m.is_strongly_3ph_full(u128::MAX).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("pruned", &id), &m, |b, m| {
            b.iter(|| black_box(m.is_strongly_3ph_pruned()))
        });
    }
    group.finish();
}

fn recursion(c: &mut Criterion) {
    let mut group = c.benchmark_group("construct_recursive");
    group.sample_size(10);
    for (r, k, n) in [(3usize, 2usize, 75usize), (4, 2, 120), (4, 3, 48)] {
        group.bench_function(format!("r{r}_k{k}_n{n}"), |b| {
            b.iter(|| black_box(construct_recursive(r, k, n, &RecursionBudget::new(r, 1)).unwrap()))
        });
    }
    group.finish();
}
