//! Rank oracle independent of the SVD path: Gaussian elimination with
//! complete pivoting on row-major data.

#![allow(dead_code)]

use nilpr::numerics::{RMat, C64};
use nilpr::CMat;

/// Rank by complete pivoting, with pivots below `rel · max|a_ij|` treated as zero.
pub fn elimination_rank_real(m: &RMat, rel: f64) -> usize {
    let (r, c) = m.shape();
    let mut a: Vec<Vec<f64>> = (0..r).map(|i| (0..c).map(|j| m[(i, j)]).collect()).collect();
    let scale = a.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
    if scale == 0.0 {
        return 0;
    }
    let cut = rel * scale;
    let mut rank = 0;
    let mut cols: Vec<usize> = (0..c).collect();
    while rank < r.min(c) {
        let mut best = (rank, rank, 0.0f64);
        for (i, row) in a.iter().enumerate().skip(rank) {
            for (jj, &j) in cols.iter().enumerate().skip(rank) {
                if row[j].abs() > best.2 {
                    best = (i, jj, row[j].abs());
                }
            }
        }
        if best.2 <= cut {
            break;
        }
        a.swap(rank, best.0);
        cols.swap(rank, best.1);
        let pc = cols[rank];
        let pivot = a[rank][pc];
        let prow = a[rank].clone();
        for row in a.iter_mut().skip(rank + 1) {
            let f = row[pc] / pivot;
            if f != 0.0 {
                for &j in &cols[rank..] {
                    row[j] -= f * prow[j];
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn elimination_rank_complex(m: &CMat, rel: f64) -> usize {
    let (r, c) = m.shape();
    let mut a: Vec<Vec<C64>> = (0..r).map(|i| (0..c).map(|j| m[(i, j)]).collect()).collect();
    let scale = a.iter().flatten().fold(0.0f64, |s, v| s.max(v.norm()));
    if scale == 0.0 {
        return 0;
    }
    let cut = rel * scale;
    let mut rank = 0;
    let mut cols: Vec<usize> = (0..c).collect();
    while rank < r.min(c) {
        let mut best = (rank, rank, 0.0f64);
        for (i, row) in a.iter().enumerate().skip(rank) {
            for (jj, &j) in cols.iter().enumerate().skip(rank) {
                if row[j].norm() > best.2 {
                    best = (i, jj, row[j].norm());
                }
            }
        }
        if best.2 <= cut {
            break;
        }
        a.swap(rank, best.0);
        cols.swap(rank, best.1);
        let pc = cols[rank];
        let pivot = a[rank][pc];
        let prow = a[rank].clone();
        for row in a.iter_mut().skip(rank + 1) {
            let f = row[pc] / pivot;
            for &j in &cols[rank..] {
                row[j] -= f * prow[j];
            }
        }
        rank += 1;
    }
    rank
}
