//! The signed eta-word cochain `Y` on oriented cells: peel innermost
//! brackets, each peel contributing a slot factor `1^a (x) eta_{p'} (x) 1^b`
//! on the left with sign `(-1)^{a + (p'+1)b + deg w'}`.

use super::cell::AssocCell;

/// One slot factor: `1^{(x)a} (x) eta_{p'} (x) 1^{(x)b}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct EtaFactor {
    pub a: usize,
    pub p_prime: usize,
    pub b: usize,
}

/// A signed product of slot factors, composed right to left; the rightmost
/// factor always has `a = b = 0` and is the bare `eta_p` applied first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaTerm {
    pub sign: i64,
    pub factors: Vec<EtaFactor>,
}

impl EtaTerm {
    /// Form degree: number of eta factors.
    pub fn form_degree(&self) -> usize {
        self.factors.len()
    }

    /// Checks the arity chain: factor `j` consumes `a_j + 1 + b_j` slots,
    /// which must equal the slots produced so far, starting from 1.
    pub fn arity_consistent(&self) -> bool {
        let mut slots = 1usize;
        for f in self.factors.iter().rev() {
            if f.a + 1 + f.b != slots {
                return false;
            }
            slots = f.a + f.p_prime + 1 + f.b;
        }
        true
    }

    /// Output tensor degree `p + 1` of the represented map `H -> H^{(x)(p+1)}`.
    pub fn output_degree(&self) -> usize {
        let mut slots = 1usize;
        for f in self.factors.iter().rev() {
            slots = f.a + f.p_prime + 1 + f.b;
        }
        slots
    }
}

/// Koszul sign for moving a factor of dimension `dims[idx]` from position
/// `idx` to the end of the list (jumping everything after it).
fn move_to_end_sign(dims: &[usize], idx: usize) -> i64 {
    let d = dims[idx];
    if d % 2 == 0 {
        return 1;
    }
    let crossed: usize = dims[idx + 1..].iter().sum();
    if crossed % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `Y` on an oriented cell, peeling a chosen innermost bracket at each step.
/// `pick` selects which innermost (non-outer) bracket to peel, by index into
/// the list of candidates; the canonical cochain uses `pick = 0`.
fn y_with_choices(sign: i64, cell: &AssocCell, picks: &mut dyn FnMut(usize) -> usize) -> EtaTerm {
    if cell.is_top() {
        return EtaTerm {
            sign,
            factors: vec![EtaFactor { a: 0, p_prime: cell.p(), b: 0 }],
        };
    }
    // candidates: innermost brackets other than the outer one
    let outer = (1u8, (cell.p() + 1) as u8);
    let candidates: Vec<usize> = cell
        .innermost()
        .into_iter()
        .filter(|&f| cell.brackets()[f] != outer)
        .collect();
    let f = candidates[picks(candidates.len()) % candidates.len()];

    // orientation: canonical product order vs (w' canonical, new factor last)
    let dims: Vec<usize> = (0..cell.brackets().len())
        .map(|g| {
            // factor dimension = arity - 2, computed via peel-free inspection
            cell_factor_dim(cell, g)
        })
        .collect();
    let sigma_peel = move_to_end_sign(&dims, f);

    let (a, p_prime, b, smaller) = cell.peel(f);
    let peel_sign = pow_sign(a + (p_prime + 1) * b + smaller.deg());
    let mut term = y_with_choices(sign * sigma_peel * peel_sign, &smaller, picks);
    term.factors.insert(0, EtaFactor { a, p_prime, b });
    term
}

fn cell_factor_dim(cell: &AssocCell, f: usize) -> usize {
    // arity of bracket f: number of direct children
    let (l, r) = cell.brackets()[f];
    let mut pos = l;
    let mut arity = 0usize;
    while pos <= r {
        let sub = cell
            .brackets()
            .iter()
            .enumerate()
            .filter(|&(i, &(l2, r2))| i != f && l2 == pos && r2 <= r && l <= l2)
            .map(|(_, &(_, r2))| r2)
            .max();
        match sub {
            Some(r2) => pos = r2 + 1,
            None => pos += 1,
        }
        arity += 1;
    }
    arity - 2
}

fn pow_sign(e: usize) -> i64 {
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The cochain value `Y(sign * cell)` with the canonical peeling order.
pub fn y_cochain(sign: i64, cell: &AssocCell) -> EtaTerm {
    let mut first = |_: usize| 0usize;
    let term = y_with_choices(sign, cell, &mut first);
    debug_assert!(term.arity_consistent());
    debug_assert_eq!(term.output_degree(), cell.p() + 1);
    term
}

/// All terms obtainable by varying the innermost-peeling choices; their
/// evaluations must agree (well-definedness of `Y`).
pub fn all_peeling_terms(cell: &AssocCell) -> Vec<EtaTerm> {
    fn rec(sign: i64, cell: &AssocCell, out: &mut Vec<EtaTerm>) {
        if cell.is_top() {
            out.push(EtaTerm {
                sign,
                factors: vec![EtaFactor { a: 0, p_prime: cell.p(), b: 0 }],
            });
            return;
        }
        let outer = (1u8, (cell.p() + 1) as u8);
        let candidates: Vec<usize> = cell
            .innermost()
            .into_iter()
            .filter(|&f| cell.brackets()[f] != outer)
            .collect();
        for f in candidates {
            let dims: Vec<usize> = (0..cell.brackets().len())
                .map(|g| cell_factor_dim(cell, g))
                .collect();
            let sigma_peel = move_to_end_sign(&dims, f);
            let (a, p_prime, b, smaller) = cell.peel(f);
            let peel_sign = pow_sign(a + (p_prime + 1) * b + smaller.deg());
            let mut subs = Vec::new();
            rec(sign * sigma_peel * peel_sign, &smaller, &mut subs);
            for mut t in subs {
                t.factors.insert(0, EtaFactor { a, p_prime, b });
                out.push(t);
            }
        }
    }
    let mut out = Vec::new();
    rec(1, cell, &mut out);
    out.sort_by(|x, y| (x.sign, &x.factors).cmp(&(y.sign, &y.factors)));
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::super::cell::{cells, AssocCell};
    use super::*;

    #[test]
    fn top_cell_is_bare_eta() {
        let t = y_cochain(1, &AssocCell::top(3));
        assert_eq!(t.sign, 1);
        assert_eq!(t.factors, vec![EtaFactor { a: 0, p_prime: 3, b: 0 }]);
    }

    #[test]
    fn left_comb_matches_closed_form() {
        // Y(w0_p) = (-1)^{p(p-1)/2} (eta_1 (x) 1^{p-1}) ... (eta_1 (x) 1) eta_1
        for p in 2..=5usize {
            let mut brackets = Vec::new();
            for r in 2..=(p + 1) as u8 {
                brackets.push((1u8, r));
            }
            let w0p = AssocCell::new(p, brackets).unwrap();
            let t = y_cochain(1, &w0p);
            let expect_sign = if (p * (p - 1) / 2) % 2 == 0 { 1 } else { -1 };
            assert_eq!(t.sign, expect_sign, "p={p}");
            let expect: Vec<EtaFactor> = (0..p)
                .map(|j| EtaFactor { a: 0, p_prime: 1, b: p - 1 - j })
                .collect();
            assert_eq!(t.factors, expect, "p={p}");
        }
    }

    #[test]
    fn arity_chains_always_consistent() {
        for p in 2..=5 {
            for c in cells(p) {
                let t = y_cochain(1, &c);
                assert!(t.arity_consistent());
                assert_eq!(t.form_degree(), c.deg());
                assert_eq!(t.output_degree(), p + 1);
                for alt in all_peeling_terms(&c) {
                    assert!(alt.arity_consistent());
                }
            }
        }
    }
}
