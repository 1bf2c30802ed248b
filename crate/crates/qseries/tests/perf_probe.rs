use std::time::Instant;

#[global_allocator]
static ALLOC: mimalloc::MiMalloc = mimalloc::MiMalloc;

#[test]
#[ignore = "manual timing probe"]
fn dense_qbin_timing() {
    for (top, k) in [(800i64, 400i64), (2000, 1000)] {
        let t0 = Instant::now();
        let v = qseries::qbin(top, k, 1);
        println!("qbin({top},{k}): {:?}, degree {:?}", t0.elapsed(), v.degree());
    }
}
