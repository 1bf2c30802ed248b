//! Exact large Gaussian binomials over limb planes.
//!
//! `[top, k]` is built along the diagonal `[r+j, j]` for `j = 2..=k`
//! (`r = top - k`), starting from the closed form `[r+1, 1] = 1 + ... + q^r`,
//! each step implementing the coefficient recurrence of
//!
//! ```text
//! (1 - q^j) P_j = (1 - q^{r+j}) P_{j-1}
//! P_j[i] = P_{j-1}[i] - P_{j-1}[i-(r+j)] + P_j[i-j]
//! ```
//!
//! Values are stored limb-plane-major: plane `t` holds limb `t` of every
//! coefficient. Blocks of consecutive positions are pushed through a
//! pipeline of fused steps; every (stage, plane, block) update is a
//! branch-free elementwise loop, with carries flowing to the next plane as
//! per-position flag bytes rather than along a serial limb chain. The
//! block width never exceeds the smallest lag `j`, so a block never
//! depends on itself and the loops vectorize; a runtime dispatch picks an
//! AVX-512, AVX2 or scalar instantiation.
//!
//! Each stage keeps its trailing `r+j` inputs and `j` outputs in
//! cache-resident rings, so main memory sees one read and one write of the
//! polynomial per fused group. Coefficient bounds `C(r+j, j)` fix the
//! plane count per step; all `P_j` are palindromic, so only lower halves
//! are materialized and the input's tail is mirrored before each group.

use num_bigint::{BigInt, BigUint};
use num_traits::One;

/// Combined ring budget per pipeline group: large enough that the main
/// buffers stream through memory only every few steps, small enough that
/// the rings stay in fast cache levels.
const RING_BUDGET_BYTES: usize = 12 << 20;
/// Largest block of positions pushed through the pipeline at once.
const BLOCK: usize = 1024;

/// Base-q coefficients of `[top, k]` for `0 <= k <= top - k`.
pub fn qbin_dense(top: i64, k: i64) -> Vec<BigInt> {
    let r = top - k;
    assert!(k >= 0 && k <= r, "caller must pass the smaller side");
    if k == 0 {
        return vec![BigInt::one()];
    }
    let r = r as usize;
    let k = k as usize;

    // Plane counts per step from the exact bound C(r+j, j).
    let mut widths = Vec::with_capacity(k + 1);
    widths.push(1usize);
    let mut bound = BigUint::one();
    for j in 1..=k {
        bound = bound * BigUint::from(r + j) / BigUint::from(j);
        widths.push(((bound.bits() + 2) as usize).div_ceil(64));
    }
    let w_final = widths[k];
    let len = k * r / 2 + 2;

    let mut a: Vec<Vec<u64>> = (0..w_final).map(|_| vec![0u64; len]).collect();
    let mut b: Vec<Vec<u64>> = (0..w_final).map(|_| vec![0u64; len]).collect();
    for slot in a[0].iter_mut().take(r / 2 + 1) {
        *slot = 1; // P_1
    }
    let mut deg_in = r;
    let mut j0 = 2usize;

    while j0 <= k {
        let group = group_size(j0, k, r, &widths);
        sweep_group(&mut a, deg_in, widths[j0 - 1], &mut b, j0, group, r, &widths);
        std::mem::swap(&mut a, &mut b);
        deg_in += group * r;
        j0 += group;
    }

    materialize(&a, k * r, w_final)
}

/// Largest stage count whose rings fit the cache budget.
fn group_size(j0: usize, k: usize, r: usize, widths: &[usize]) -> usize {
    let mut t = 0usize;
    loop {
        if j0 + t > k {
            return t.max(1);
        }
        let w = widths[j0 + t];
        let mut bytes = 0usize;
        for s in 0..=t {
            let j = j0 + s;
            let xr = if s == 0 { 0 } else { r + j };
            let yr = if s == t { 0 } else { j };
            bytes += (xr + yr) * w * 8;
        }
        if t > 0 && bytes > RING_BUDGET_BYTES {
            return t;
        }
        t += 1;
    }
}

/// One pipeline stage `y[i] = x[i] - x[i-(r+j)] + y[i-j]` with plane-major
/// history rings. The first stage reads `x` straight from the input
/// polynomial; the last reads its own lag from the output polynomial.
struct Stage {
    j: usize,
    m: usize,
    ring_x: Vec<u64>, // [plane * m + pos]; empty on the first stage
    ring_y: Vec<u64>, // [plane * j + pos]; empty on the last stage
    pos_x: usize,
    pos_y: usize,
    carry: Vec<u8>,
    borrow: Vec<u8>,
}

impl Stage {
    fn new(j: usize, r: usize, w: usize, first: bool, last: bool) -> Stage {
        let m = r + j;
        Stage {
            j,
            m,
            ring_x: if first { Vec::new() } else { vec![0u64; m * w] },
            ring_y: if last { Vec::new() } else { vec![0u64; j * w] },
            pos_x: 0,
            pos_y: 0,
            carry: vec![0u8; BLOCK],
            borrow: vec![0u8; BLOCK],
        }
    }
}

/// Run stages `j0 .. j0+group` over one ascending sweep of blocks.
#[allow(clippy::too_many_arguments)]
fn sweep_group(
    a: &mut [Vec<u64>],
    deg_in: usize,
    w_in: usize,
    b: &mut [Vec<u64>],
    j0: usize,
    group: usize,
    r: usize,
    widths: &[usize],
) {
    let deg_out = deg_in + group * r;
    let half_in = deg_in / 2;
    let half_out = deg_out / 2;
    let w = widths[j0 + group - 1];
    let tier = kernel_tier();

    // Materialize the input tail: mirrored up to deg_in, zero beyond.
    for plane in a.iter_mut().take(w_in) {
        for i in half_in + 1..=half_out.min(deg_in) {
            plane[i] = plane[deg_in - i];
        }
        if half_out > deg_in {
            plane[deg_in + 1..=half_out].fill(0);
        }
    }

    let mut stages: Vec<Stage> =
        (0..group).map(|s| Stage::new(j0 + s, r, w, s == 0, s == group - 1)).collect();
    let block = BLOCK.min(j0);

    if group < 2 || half_out < 1 << 15 {
        let mut acc = vec![0u64; w * block];
        let mut i0 = 0usize;
        while i0 <= half_out {
            let blen = block.min(half_out + 1 - i0);
            let w_eff = planes_for_position(i0 + blen - 1, w);
            load_block(&mut acc, a, w_in.min(w_eff), w_eff, block, i0, blen);
            for st in stages.iter_mut() {
                run_stage_block(st, &mut acc, a, b, w_in, w_eff, block, i0, blen, tier);
            }
            store_block(&acc, b, w, w_eff, block, i0, blen);
            i0 += blen;
        }
        return;
    }

    // Two threads pipelined over stage halves; blocks are the handoff
    // unit, staged through a fixed arena guarded by a bounded channel.
    let t1 = group / 2;
    let mut iter = stages.into_iter();
    let mut front: Vec<Stage> = iter.by_ref().take(t1).collect();
    let mut back: Vec<Stage> = iter.collect();
    const SLOTS: usize = 4;
    let mut arena = vec![0u64; SLOTS * w * block];
    let arena_ptr = SendPtr(arena.as_mut_ptr());
    let (tx, rx) = std::sync::mpsc::sync_channel::<usize>(SLOTS - 2);
    let n_blocks = (half_out + 1).div_ceil(block);
    let a_ref: &[Vec<u64>] = a;

    std::thread::scope(|scope| {
        scope.spawn(move || {
            let arena_ptr = arena_ptr;
            for c in 0..n_blocks {
                let i0 = c * block;
                let blen = block.min(half_out + 1 - i0);
                let acc = unsafe {
                    std::slice::from_raw_parts_mut(arena_ptr.0.add((c % SLOTS) * w * block), w * block)
                };
                let w_eff = planes_for_position(i0 + blen - 1, w);
                load_block(acc, a_ref, w_in.min(w_eff), w_eff, block, i0, blen);
                for st in front.iter_mut() {
                    run_stage_block(st, acc, a_ref, &[], w_in, w_eff, block, i0, blen, tier);
                }
                tx.send(c).unwrap();
            }
        });
        for c in rx {
            let i0 = c * block;
            let blen = block.min(half_out + 1 - i0);
            let acc = unsafe {
                std::slice::from_raw_parts_mut(arena_ptr.0.add((c % SLOTS) * w * block), w * block)
            };
            let w_eff = planes_for_position(i0 + blen - 1, w);
            for st in back.iter_mut() {
                run_stage_block(st, acc, a_ref, b, w_in, w_eff, block, i0, blen, tier);
            }
            store_block(acc, b, w, w_eff, block, i0, blen);
        }
    });
}

#[derive(Clone, Copy)]
struct SendPtr(*mut u64);
// Arena slots are synchronized by the bounded channel: a slot index is
// received before reading and can only be rewritten SLOTS blocks later,
// which the channel capacity prevents until the reader has moved on.
unsafe impl Send for SendPtr {}
unsafe impl Sync for SendPtr {}

/// Planes needed at positions `<= i`: coefficients are bounded by the
/// unrestricted partition count `p(i) < e^{c sqrt(i)}`, `c = pi*sqrt(2/3)`.
fn planes_for_position(i: usize, w: usize) -> usize {
    let bits = (3.77 * ((i + 1) as f64).sqrt()).ceil() as usize + 8;
    w.min(bits.div_ceil(64))
}

fn load_block(acc: &mut [u64], a: &[Vec<u64>], w_in: usize, w: usize, block: usize, i0: usize, blen: usize) {
    for t in 0..w {
        let dst = &mut acc[t * block..t * block + blen];
        if t < w_in {
            dst.copy_from_slice(&a[t][i0..i0 + blen]);
        } else {
            dst.fill(0);
        }
    }
}

/// Store the block; planes above `w_eff` are known zero and are cleared
/// (the buffer may hold stale data from two steps ago).
fn store_block(acc: &[u64], b: &mut [Vec<u64>], w: usize, w_eff: usize, block: usize, i0: usize, blen: usize) {
    for t in 0..w_eff {
        b[t][i0..i0 + blen].copy_from_slice(&acc[t * block..t * block + blen]);
    }
    for t in w_eff..w {
        b[t][i0..i0 + blen].fill(0);
    }
}

/// All planes of one stage over one block.
#[allow(clippy::too_many_arguments)]
fn run_stage_block(
    st: &mut Stage,
    acc: &mut [u64],
    a: &[Vec<u64>],
    b: &[Vec<u64>],
    w_in: usize,
    w: usize,
    block: usize,
    i0: usize,
    blen: usize,
    tier: Tier,
) {
    let first = st.ring_x.is_empty();
    let last = st.ring_y.is_empty();
    st.carry[..blen].fill(0);
    st.borrow[..blen].fill(0);
    // Segment cut points are identical across planes.
    let mut cuts = [blen, blen, blen, blen];
    if first {
        cuts[0] = st.m.saturating_sub(i0).min(blen);
    } else {
        cuts[1] = (st.m - st.pos_x).min(blen);
    }
    if last {
        cuts[2] = st.j.saturating_sub(i0).min(blen);
    } else {
        cuts[3] = (st.j - st.pos_y).min(blen);
    }
    let mut marks = [0usize; 6];
    let mut nmarks = 1usize;
    for &c in &cuts {
        if c > 0 && c < blen {
            marks[nmarks] = c;
            nmarks += 1;
        }
    }
    marks[nmarks] = blen;
    nmarks += 1;
    marks[..nmarks].sort_unstable();

    for t in 0..w {
        stage_plane(
            st,
            &mut acc[t * block..t * block + blen],
            t,
            i0,
            if first && t < w_in { Some(&a[t]) } else { None },
            if last { Some(&b[t]) } else { None },
            &marks[..nmarks],
            tier,
        );
    }
    debug_assert_eq!(st.carry[..blen], st.borrow[..blen], "width schedule too small");
    if !first {
        st.pos_x += blen;
        if st.pos_x >= st.m {
            st.pos_x -= st.m;
        }
    }
    if !last {
        st.pos_y += blen;
        if st.pos_y >= st.j {
            st.pos_y -= st.j;
        }
    }
}

/// One plane of one stage over one block, split into segments so every
/// kernel call works on contiguous runs of its sources.
#[allow(clippy::too_many_arguments)]
fn stage_plane(
    st: &mut Stage,
    acc: &mut [u64],
    t: usize,
    i0: usize,
    linear_x: Option<&[u64]>,
    linear_y: Option<&[u64]>,
    marks: &[usize],
    tier: Tier,
) {
    let first = st.ring_x.is_empty();
    let last = st.ring_y.is_empty();

    for win in marks.windows(2) {
        let (lo, hi) = (win[0], win[1]);
        if lo == hi {
            continue;
        }
        let n = hi - lo;
        let i = i0 + lo;
        // x source for this segment.
        let (xm, xp): (u8, *mut u64) = if first {
            match linear_x {
                Some(ax) if i >= st.m => (1, ax[i - st.m..].as_ptr() as *mut u64),
                _ => (0, std::ptr::null_mut()),
            }
        } else {
            let p = if st.pos_x + lo >= st.m { st.pos_x + lo - st.m } else { st.pos_x + lo };
            (2, unsafe { st.ring_x.as_mut_ptr().add(t * st.m + p) })
        };
        let (ym, yp): (u8, *mut u64) = if last {
            match linear_y {
                Some(by) if i >= st.j => (1, by[i - st.j..].as_ptr() as *mut u64),
                _ => (0, std::ptr::null_mut()),
            }
        } else {
            let p = if st.pos_y + lo >= st.j { st.pos_y + lo - st.j } else { st.pos_y + lo };
            (2, unsafe { st.ring_y.as_mut_ptr().add(t * st.j + p) })
        };
        unsafe {
            dispatch_segment(
                tier,
                xm,
                ym,
                acc.as_mut_ptr().add(lo),
                xp,
                yp,
                st.carry.as_mut_ptr().add(lo),
                st.borrow.as_mut_ptr().add(lo),
                n,
            );
        }
    }
}

// --- elementwise kernels -------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq)]
enum Tier {
    Scalar,
    Avx2,
    Avx512,
}

fn kernel_tier() -> Tier {
    use std::sync::OnceLock;
    static TIER: OnceLock<Tier> = OnceLock::new();
    *TIER.get_or_init(|| {
        #[cfg(target_arch = "x86_64")]
        {
            if std::arch::is_x86_feature_detected!("avx512f")
                && std::arch::is_x86_feature_detected!("avx512bw")
            {
                return Tier::Avx512;
            }
            if std::arch::is_x86_feature_detected!("avx2") {
                return Tier::Avx2;
            }
        }
        Tier::Scalar
    })
}

/// The elementwise update `acc <- acc + y_old - x_old` at one plane, with
/// per-position carry/borrow flags flowing to the next plane.
///
/// `XM`/`YM`: 0 = stream absent (zero), 1 = linear read-only,
/// 2 = ring (x: swap in the new value; y: store the result).
macro_rules! segment_body {
    ($acc:ident, $xp:ident, $yp:ident, $c:ident, $b:ident, $n:ident, $XM:ident, $YM:ident) => {{
        for e in 0..$n {
            let a_old = *$acc.add(e);
            let x_old = if $XM > 0 { *$xp.add(e) } else { 0 };
            if $XM == 2 {
                *$xp.add(e) = a_old;
            }
            let y_old = if $YM > 0 { *$yp.add(e) } else { 0 };
            let (s, c1) = a_old.overflowing_add(y_old);
            let (s, c2) = s.overflowing_add(*$c.add(e) as u64);
            let (v, b1) = s.overflowing_sub(x_old);
            let (v, b2) = v.overflowing_sub(*$b.add(e) as u64);
            *$c.add(e) = (c1 | c2) as u8;
            *$b.add(e) = (b1 | b2) as u8;
            *$acc.add(e) = v;
            if $YM == 2 {
                *$yp.add(e) = v;
            }
        }
    }};
}

unsafe fn segment_scalar<const XM: u8, const YM: u8>(
    acc: *mut u64,
    xp: *mut u64,
    yp: *mut u64,
    c: *mut u8,
    b: *mut u8,
    n: usize,
) {
    segment_body!(acc, xp, yp, c, b, n, XM, YM)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn segment_avx2<const XM: u8, const YM: u8>(
    acc: *mut u64,
    xp: *mut u64,
    yp: *mut u64,
    c: *mut u8,
    b: *mut u8,
    n: usize,
) {
    segment_body!(acc, xp, yp, c, b, n, XM, YM)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f,avx512bw")]
unsafe fn segment_avx512<const XM: u8, const YM: u8>(
    acc: *mut u64,
    xp: *mut u64,
    yp: *mut u64,
    c: *mut u8,
    b: *mut u8,
    n: usize,
) {
    segment_body!(acc, xp, yp, c, b, n, XM, YM)
}

#[allow(clippy::too_many_arguments)]
unsafe fn dispatch_segment(
    tier: Tier,
    xm: u8,
    ym: u8,
    acc: *mut u64,
    xp: *mut u64,
    yp: *mut u64,
    c: *mut u8,
    b: *mut u8,
    n: usize,
) {
    macro_rules! with_modes {
        ($f:ident) => {
            match (xm, ym) {
                (0, 0) => $f::<0, 0>(acc, xp, yp, c, b, n),
                (0, 1) => $f::<0, 1>(acc, xp, yp, c, b, n),
                (0, 2) => $f::<0, 2>(acc, xp, yp, c, b, n),
                (1, 0) => $f::<1, 0>(acc, xp, yp, c, b, n),
                (1, 1) => $f::<1, 1>(acc, xp, yp, c, b, n),
                (1, 2) => $f::<1, 2>(acc, xp, yp, c, b, n),
                (2, 0) => $f::<2, 0>(acc, xp, yp, c, b, n),
                (2, 1) => $f::<2, 1>(acc, xp, yp, c, b, n),
                (2, 2) => $f::<2, 2>(acc, xp, yp, c, b, n),
                _ => unreachable!(),
            }
        };
    }
    #[cfg(target_arch = "x86_64")]
    match tier {
        Tier::Avx512 => return with_modes!(segment_avx512),
        Tier::Avx2 => return with_modes!(segment_avx2),
        Tier::Scalar => {}
    }
    let _ = tier;
    with_modes!(segment_scalar)
}

/// Expand the stored lower-half planes into the full coefficient list.
///
/// Positions are transposed tile by tile into a reused byte staging
/// buffer, then built with the single-allocation `from_bytes_le`
/// constructor; the split is two halves so both hardware threads convert.
fn materialize(planes: &[Vec<u64>], deg: usize, w: usize) -> Vec<BigInt> {
    const TILE: usize = 1 << 12;
    let mut out = vec![BigInt::from(0u32); deg + 1];
    let mid = (deg + 1) / 2;
    let (lo_half, hi_half) = out.split_at_mut(mid);
    std::thread::scope(|scope| {
        scope.spawn(|| materialize_range(planes, deg, w, 0, lo_half, TILE));
        materialize_range(planes, deg, w, mid, hi_half, TILE);
    });
    out
}

fn materialize_range(
    planes: &[Vec<u64>],
    deg: usize,
    w: usize,
    base: usize,
    out: &mut [BigInt],
    tile: usize,
) {
    let mut staging = vec![0u8; tile * w * 8];
    for (c, chunk) in out.chunks_mut(tile).enumerate() {
        let lo = base + c * tile;
        let n = chunk.len();
        // Sub-tiled transpose keeps the strided writes cache-resident.
        let mut sub = 0usize;
        while sub < n {
            let sn = 64.min(n - sub);
            for (t, plane) in planes.iter().enumerate() {
                for x in sub..sub + sn {
                    let i = lo + x;
                    let src = i.min(deg - i);
                    staging[(x * w + t) * 8..(x * w + t + 1) * 8]
                        .copy_from_slice(&plane[src].to_le_bytes());
                }
            }
            sub += sn;
        }
        for (x, slot) in chunk.iter_mut().enumerate() {
            // Full-width input keeps every allocation the same size (the
            // constructor trims the length, not the capacity), which the
            // allocator repays severalfold over varying sizes.
            let bytes = &staging[x * w * 8..(x + 1) * w * 8];
            *slot = BigInt::from(BigUint::from_bytes_le(bytes));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    /// Box-partition oracle: coefficient of q^n in [r+k, k] counts
    /// partitions of n into at most k parts, each at most r.
    fn box_partitions(k: usize, r: usize) -> Vec<BigInt> {
        let deg = k * r;
        let mut dp = vec![vec![BigInt::zero(); deg + 1]; k + 1];
        dp[0][0] = BigInt::one();
        for size in 1..=r {
            for parts in 1..=k {
                for n in size..=deg {
                    let add = dp[parts - 1][n - size].clone();
                    dp[parts][n] += add;
                }
            }
        }
        let mut out = vec![BigInt::zero(); deg + 1];
        for n in 0..=deg {
            for row in dp.iter() {
                out[n] += &row[n];
            }
        }
        out
    }

    #[test]
    fn matches_box_partition_oracle() {
        for (top, k) in [(8i64, 3i64), (10, 5), (13, 4), (9, 4), (40, 17)] {
            let got = qbin_dense(top, k);
            let want = box_partitions(k as usize, (top - k) as usize);
            assert_eq!(got, want, "({top},{k})");
        }
    }

    #[test]
    fn single_column() {
        assert_eq!(qbin_dense(5, 1), vec![BigInt::one(); 5]);
        assert_eq!(qbin_dense(7, 0), vec![BigInt::one()]);
    }

    #[test]
    #[ignore = "manual timing probe"]
    fn timing_probe() {
        for (top, k) in [(400i64, 200i64), (800, 400), (2000, 1000)] {
            let t0 = std::time::Instant::now();
            let v = qbin_dense(top, k);
            println!("qbin_dense({top},{k}): {:?}, {} coeffs", t0.elapsed(), v.len());
        }
    }

    #[test]
    fn medium_sizes_are_palindromic_and_sum_to_binomial() {
        for (top, k) in [(120i64, 40i64), (300, 130), (321, 123)] {
            let v = qbin_dense(top, k);
            assert_eq!(v.len() as i64, k * (top - k) + 1);
            for i in 0..v.len() {
                assert_eq!(v[i], v[v.len() - 1 - i], "palindrome at {i}");
            }
            let total: BigInt = v.iter().sum();
            let mut binom = BigInt::one();
            for t in 0..k {
                binom = binom * BigInt::from(top - t) / BigInt::from(t + 1);
            }
            assert_eq!(total, binom, "({top},{k})");
        }
    }
}
