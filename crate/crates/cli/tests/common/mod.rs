#![allow(dead_code)]

use std::process::{Command, Output};

pub fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_d2d-hop"))
        .args(args)
        .output()
        .expect("spawn d2d-hop")
}

pub const SMALL_NEW: &str = "kind = new\nm = 6\nn = 3\nk = 3\nf = x^2-x-1\nb = 1,0\n";

/// Rows for the 6x3 primitive pattern, computed with a hand-rolled LFSR for
/// f = x^2 - x - 1 over GF(3): b(1) = (1, 0), b(t+1) = (b1, b0 + b1).
pub fn small_new_oracle(frames: u64) -> String {
    let mut b = [(0u64, 0u64); 9];
    let mut cur = (1u64, 0u64);
    for v in b.iter_mut().skip(1) {
        *v = cur;
        cur = (cur.1, (cur.0 + cur.1) % 3);
    }
    let mut text = String::from("s,t,i,j\n");
    for s in 0..18u64 {
        let (i0, j0) = (s / 3, s % 3);
        let (d0, d1) = (i0 % 3, i0 / 3);
        for t in 0..frames {
            let bt = b[(t % 9) as usize];
            let i = (i0 + 3 * t) % 6;
            let j = (j0 + d0 * bt.0 + d1 * bt.1) % 3;
            text.push_str(&format!("{s},{t},{i},{j}\n"));
        }
    }
    text
}

/// The `j` column of resource `s` from an `s,t,i,j` CSV.
pub fn j_sequence(csv: &str, s: usize) -> Vec<u32> {
    csv.lines()
        .skip(1)
        .map(|l| {
            l.split(',')
                .map(|v| v.parse::<u32>().unwrap())
                .collect::<Vec<_>>()
        })
        .filter(|row| row[0] as usize == s)
        .map(|row| row[3])
        .collect()
}
