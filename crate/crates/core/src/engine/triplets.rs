//! Enumeration of the four-wave-mixing frequency triplets that drive
//! distortion on a channel of interest.
//!
//! A triplet of channels (j, k, m) contributes at channel i when
//! f_j + f_k − f_m = f_i. Combinations with f_j = f_i (and hence f_k =
//! f_m) or f_k = f_i (f_j = f_m) are the SPM/XPM interactions handled
//! elsewhere; the remainder form the FWM set Ω, split into Ω₁ (f_m = f_i)
//! and Ω₂ (f_m ≠ f_i). Since the contribution is symmetric under j ↔ k,
//! only ordered pairs j ≤ k are emitted, with a degeneracy factor τ = 2
//! for j < k.

use crate::phase::TRIPLET_TOL_HZ;
use crate::system::WdmGrid;

/// Which subset of Ω a triplet belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmegaSet {
    /// f_m = f_i: the pump pair is symmetric about the channel of interest.
    One,
    /// f_m ≠ f_i.
    Two,
}

/// One folded FWM triplet (j, k, m) → i.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triplet {
    pub j: usize,
    pub k: usize,
    pub m: usize,
    pub i: usize,
    /// 2 when the mirrored counterpart (k, j, m) is distinct and folded in.
    pub tau: u8,
    pub set: OmegaSet,
}

/// Enumerate Ω for channel `i`, folded over the j ↔ k symmetry, in
/// lexicographic (j, k) order. Works on uniform and non-uniform grids;
/// membership uses the [`TRIPLET_TOL_HZ`] centre-frequency tolerance.
pub fn enumerate_triplets(grid: &WdmGrid, i: usize) -> Vec<Triplet> {
    let f_i = grid.channels[i].f_offset;
    let n = grid.n_channels();
    let mut out = Vec::new();
    for j in 0..n {
        if j == i {
            continue;
        }
        let f_j = grid.channels[j].f_offset;
        for k in j..n {
            if k == i {
                continue;
            }
            let f_k = grid.channels[k].f_offset;
            let f_m = f_j + f_k - f_i;
            let Some(m) = grid.channel_with_centre(f_m, TRIPLET_TOL_HZ) else {
                continue;
            };
            let set = if m == i { OmegaSet::One } else { OmegaSet::Two };
            out.push(Triplet {
                j,
                k,
                m,
                i,
                tau: if j == k { 1 } else { 2 },
                set,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    /// Brute-force ordered enumeration straight from the set definition:
    /// all (j, k, m) with f_j + f_k − f_m = f_i, excluding the SPM/XPM
    /// classes (f_j = f_i & f_k = f_m) and (f_k = f_i & f_j = f_m).
    fn brute_force(grid: &WdmGrid, i: usize) -> Vec<(usize, usize, usize)> {
        let f = |n: usize| grid.channels[n].f_offset;
        let n_ch = grid.n_channels();
        let mut out = Vec::new();
        for j in 0..n_ch {
            for k in 0..n_ch {
                for m in 0..n_ch {
                    if (f(j) + f(k) - f(m) - f(i)).abs() > TRIPLET_TOL_HZ {
                        continue;
                    }
                    let spm_xpm_1 = j == i && k == m;
                    let spm_xpm_2 = k == i && j == m;
                    if spm_xpm_1 || spm_xpm_2 {
                        continue;
                    }
                    out.push((j, k, m));
                }
            }
        }
        out
    }

    fn check_against_brute_force(grid: &WdmGrid, i: usize) {
        let folded = enumerate_triplets(grid, i);
        let ordered = brute_force(grid, i);
        let tau_total: usize = folded.iter().map(|t| t.tau as usize).sum();
        assert_eq!(tau_total, ordered.len(), "τ-weighted count for channel {i}");
        // Every folded triplet (and its mirror when τ = 2) is in the
        // ordered set.
        for t in &folded {
            assert!(ordered.contains(&(t.j, t.k, t.m)), "missing {t:?}");
            if t.tau == 2 {
                assert!(ordered.contains(&(t.k, t.j, t.m)), "missing mirror of {t:?}");
            }
            assert_eq!(t.set == OmegaSet::One, t.m == i);
            assert_eq!(t.tau == 1, t.j == t.k);
        }
    }

    #[test]
    fn three_channels_centre() {
        let grid = presets::demo_grid(3, -2.0, 1);
        check_against_brute_force(&grid, 1);
        // Only the symmetric pump pair (0, 2, 1) remains, folded with τ=2.
        let t = enumerate_triplets(&grid, 1);
        assert_eq!(t.len(), 1);
        assert_eq!((t[0].j, t[0].k, t[0].m, t[0].tau), (0, 2, 1, 2));
        assert_eq!(t[0].set, OmegaSet::One);
    }

    #[test]
    fn three_channels_edge_has_degenerate_pump() {
        let grid = presets::demo_grid(3, -2.0, 1);
        check_against_brute_force(&grid, 0);
        let t = enumerate_triplets(&grid, 0);
        assert_eq!(t.len(), 1);
        assert_eq!((t[0].j, t[0].k, t[0].m, t[0].tau), (1, 1, 2, 1));
        assert_eq!(t[0].set, OmegaSet::Two);
    }

    #[test]
    fn two_channels_have_no_fwm() {
        let grid = presets::demo_grid(2, -2.0, 1);
        for i in 0..2 {
            assert!(enumerate_triplets(&grid, i).is_empty(), "channel {i}");
            assert!(brute_force(&grid, i).is_empty());
        }
    }

    #[test]
    fn nine_channels_counts_match_brute_force() {
        let grid = presets::demo_grid(9, -2.0, 1);
        for i in 0..9 {
            check_against_brute_force(&grid, i);
        }
        // Centre channel of a 9-channel grid: 44 ordered combinations.
        let tau_total: usize = enumerate_triplets(&grid, 4).iter().map(|t| t.tau as usize).sum();
        assert_eq!(tau_total, 44);
    }

    #[test]
    fn non_uniform_grid_membership() {
        // 4 channels at -300, -100, 0, +200 GHz: (f_j,f_k) = (-100,+200)
        // gives f_m = 0 + 100... only combinations landing on a channel
        // centre count.
        let ch = |f: f64| crate::system::Channel {
            f_offset: f,
            bandwidth: 50e9,
            power: 1e-3,
        };
        let grid =
            crate::system::WdmGrid::new(vec![ch(-300e9), ch(-100e9), ch(0.0), ch(200e9)], 1)
                .unwrap();
        for i in 0..4 {
            check_against_brute_force(&grid, i);
        }
    }
}
