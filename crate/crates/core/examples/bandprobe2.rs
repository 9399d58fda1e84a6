// Scratch probe 2: energy localization of Walsh-conjugated cyclic shifts
// under different orderings and distance metrics.
use num_complex::Complex64;
use whtdm::mat::CMat;
use whtdm::transform::{dense_walsh_matrix, WalshOrdering};

fn capture(g: &CMat, keep: impl Fn(usize, usize) -> bool) -> f64 {
    let n = g.n();
    let mut kept = 0.0;
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let e = g[(i, j)].norm_sqr();
            total += e;
            if keep(i, j) {
                kept += e;
            }
        }
    }
    (kept / total).sqrt()
}

fn reverse_bits(x: usize, bits: u32) -> usize {
    let mut out = 0;
    for b in 0..bits {
        out |= ((x >> b) & 1) << (bits - 1 - b);
    }
    out
}

fn main() {
    let n = 64usize;
    let bits = 6u32;
    let w = dense_walsh_matrix(n, WalshOrdering::Natural).unwrap();
    let wc = CMat::from_fn(n, |i, j| Complex64::new(w.get(i, j), 0.0));
    // orderings as permutations sigma: domain index -> sylvester row
    let natural: Vec<usize> = (0..n).collect();
    let paley: Vec<usize> = (0..n).map(|s| reverse_bits(s, bits)).collect();
    let sequency: Vec<usize> = (0..n).map(|s| reverse_bits(s ^ (s >> 1), bits)).collect();
    let gray: Vec<usize> = (0..n).map(|s| s ^ (s >> 1)).collect();

    for l in [1usize, 2, 3, 5, 7] {
        let mut h = CMat::zeros(n);
        for r in 0..n {
            h[(r, (r + n - l) % n)] = Complex64::new(1.0, 0.0);
        }
        let g_nat = wc.transpose().matmul(&h).matmul(&wc);
        println!("shift {l}:");
        // dyadic distance in natural ordering
        for b in [4usize, 8, 16] {
            let c = capture(&g_nat, |i, j| (i ^ j) <= b);
            print!("  dyadic<= {b}: {c:.4}");
        }
        println!();
        for (name, sigma) in [
            ("natural ", &natural),
            ("paley   ", &paley),
            ("sequency", &sequency),
            ("gray    ", &gray),
        ] {
            // band in the permuted index space: G'[i,j] = G[sigma,sigma]
            let gp = CMat::from_fn(n, |i, j| g_nat[(sigma[i], sigma[j])]);
            let lin8 = capture(&gp, |i, j| i.abs_diff(j) <= 8);
            let cyc8 = capture(&gp, |i, j| {
                let d = i.abs_diff(j);
                d.min(n - d) <= 8
            });
            println!("  {name}: |i-j|<=8 {lin8:.4}  cyclic8 {cyc8:.4}");
        }
    }
}
