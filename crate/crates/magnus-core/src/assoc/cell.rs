//! Bracketing cells of `K_{p+1}` and their signed boundary.
//!
//! A cell is a non-crossing set of intervals over the word `1..p+1`, always
//! containing the outer interval, every bracket enclosing at least two
//! direct children. `deg` = number of brackets, `dim = p - deg`. A cell is
//! oriented as the ordered product of its bracket factors (canonical order:
//! by `(l, -r)`), each factor a copy of `K_{arity}`; boundary signs come from
//! the top-cell formula applied factorwise with graded (Koszul) reordering.

use std::cmp::Reverse;

use crate::{AlgebraError, Result};

/// A bracket `[l, r]`, 1-based, `l < r`.
pub type Bracket = (u8, u8);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AssocCell {
    p: usize,
    brackets: Vec<Bracket>,
}

/// An integer-signed cell, the unit of chains and boundaries.
pub type SignedCell = (i64, AssocCell);

/// A direct child of a bracket: a free letter or a nested bracket.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Child {
    Letter(u8),
    Nested(usize),
}

impl AssocCell {
    pub fn new(p: usize, mut brackets: Vec<Bracket>) -> Result<Self> {
        if p < 1 {
            return Err(AlgebraError::pre("need p >= 1"));
        }
        let top = (1u8, (p + 1) as u8);
        if !brackets.contains(&top) {
            return Err(AlgebraError::pre("outer bracket missing"));
        }
        brackets.sort_by_key(|&(l, r)| (l, Reverse(r)));
        brackets.dedup();
        let cell = AssocCell { p, brackets };
        cell.validate()?;
        Ok(cell)
    }

    /// The top cell of `K_{p+1}`.
    pub fn top(p: usize) -> Self {
        AssocCell {
            p,
            brackets: vec![(1, (p + 1) as u8)],
        }
    }

    fn validate(&self) -> Result<()> {
        for &(l, r) in &self.brackets {
            if l < 1 || r as usize > self.p + 1 || l >= r {
                return Err(AlgebraError::pre(format!("bad bracket ({l},{r})")));
            }
        }
        for (i, &(l1, r1)) in self.brackets.iter().enumerate() {
            for &(l2, r2) in &self.brackets[i + 1..] {
                let nested = (l1 <= l2 && r2 <= r1) || (l2 <= l1 && r1 <= r2);
                let disjoint = r1 < l2 || r2 < l1;
                if !nested && !disjoint {
                    return Err(AlgebraError::pre(format!(
                        "crossing brackets ({l1},{r1}) ({l2},{r2})"
                    )));
                }
            }
        }
        for f in 0..self.brackets.len() {
            if self.children(f).len() < 2 {
                return Err(AlgebraError::pre(format!(
                    "bracket {:?} has fewer than two children",
                    self.brackets[f]
                )));
            }
        }
        Ok(())
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn letters(&self) -> usize {
        self.p + 1
    }

    pub fn brackets(&self) -> &[Bracket] {
        &self.brackets
    }

    pub fn deg(&self) -> usize {
        self.brackets.len()
    }

    pub fn dim(&self) -> usize {
        self.p - self.deg()
    }

    pub fn is_top(&self) -> bool {
        self.brackets.len() == 1
    }

    /// Direct children of bracket `f`, left to right.
    fn children(&self, f: usize) -> Vec<Child> {
        let (l, r) = self.brackets[f];
        let mut out = Vec::new();
        let mut pos = l;
        while pos <= r {
            // the widest bracket starting at pos, strictly inside (l, r)
            let sub = self
                .brackets
                .iter()
                .enumerate()
                .filter(|&(i, &(l2, r2))| i != f && l2 == pos && l <= l2 && r2 <= r)
                .max_by_key(|&(_, &(_, r2))| r2);
            match sub {
                Some((i, &(_, r2))) => {
                    out.push(Child::Nested(i));
                    pos = r2 + 1;
                }
                None => {
                    out.push(Child::Letter(pos));
                    pos += 1;
                }
            }
        }
        out
    }

    /// Arity (number of direct children) of bracket `f`.
    fn arity(&self, f: usize) -> usize {
        self.children(f).len()
    }

    fn factor_dim(&self, f: usize) -> usize {
        self.arity(f) - 2
    }

    /// Letter span of the `j`-th direct child of bracket `f`.
    fn child_span(&self, f: usize, j: usize) -> (u8, u8) {
        match self.children(f)[j] {
            Child::Letter(pos) => (pos, pos),
            Child::Nested(i) => self.brackets[i],
        }
    }

    /// Innermost brackets: those whose children are all letters.
    pub fn innermost(&self) -> Vec<usize> {
        (0..self.brackets.len())
            .filter(|&f| {
                self.children(f)
                    .iter()
                    .all(|c| matches!(c, Child::Letter(_)))
            })
            .collect()
    }

    /// Removes bracket `f` (letters `l..=r` collapse to one letter); returns
    /// `(a, p', b, smaller cell)` such that the face map with those
    /// parameters rebuilds `self`.
    pub fn peel(&self, f: usize) -> (usize, usize, usize, AssocCell) {
        let (l, r) = self.brackets[f];
        let shift = (r - l) as usize;
        let a = (l - 1) as usize;
        let b = self.p + 1 - r as usize;
        let brackets = self
            .brackets
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != f)
            .map(|(_, &(l2, r2))| {
                if r2 < l {
                    (l2, r2)
                } else if l2 > r {
                    (l2 - shift as u8, r2 - shift as u8)
                } else {
                    // containing bracket
                    (l2, r2 - shift as u8)
                }
            })
            .collect();
        let cell = AssocCell::new(self.p - shift, brackets).expect("peel of innermost bracket");
        (a, shift, b, cell)
    }

    /// Signed boundary chain.
    pub fn boundary(&self) -> Vec<SignedCell> {
        let mut out: Vec<SignedCell> = Vec::new();
        let nfac = self.brackets.len();
        let mut koszul = 1i64;
        for f in 0..nfac {
            let r = self.arity(f);
            let p_loc = r - 1;
            for s in 1..p_loc {
                for k in 0..=(p_loc - s) {
                    // group children k+1 ..= k+s+1 of factor f
                    let (nl, _) = self.child_span(f, k);
                    let (_, nr) = self.child_span(f, k + s);
                    let newb = (nl, nr);
                    let sign31 = pow_sign((s + 1) * (p_loc + k) + k + 1);
                    let mut brackets = self.brackets.clone();
                    brackets.push(newb);
                    let cell = AssocCell::new(self.p, brackets).expect("valid face");
                    let resort = self.resort_sign(f, newb, s.saturating_sub(1), &cell);
                    push_signed(&mut out, koszul * sign31 * resort, cell);
                }
            }
            koszul *= pow_sign(self.factor_dim(f));
        }
        out
    }

    /// Koszul sign for moving the new factor (dimension `new_dim`) from the
    /// slot right after its parent `f` to its canonical sorted position.
    fn resort_sign(&self, f: usize, newb: Bracket, new_dim: usize, result: &AssocCell) -> i64 {
        if new_dim % 2 == 0 {
            return 1;
        }
        let key = (newb.0, Reverse(newb.1));
        let mut crossed = 0usize;
        for (g, &(l2, r2)) in self.brackets.iter().enumerate() {
            if g <= f {
                continue;
            }
            if (l2, Reverse(r2)) < key {
                // new factor passes this one on its way to sorted position;
                // its dimension must be measured in the RESULT cell (arities
                // of brackets other than the parent are unchanged).
                let rf = result
                    .brackets
                    .iter()
                    .position(|&bb| bb == (l2, r2))
                    .expect("factor persists");
                crossed += result.factor_dim(rf);
            }
        }
        pow_sign(crossed)
    }
}

fn pow_sign(e: usize) -> i64 {
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

fn push_signed(chain: &mut Vec<SignedCell>, sign: i64, cell: AssocCell) {
    if sign == 0 {
        return;
    }
    if let Some(entry) = chain.iter_mut().find(|(_, c)| *c == cell) {
        entry.0 += sign;
        if entry.0 == 0 {
            chain.retain(|(s, _)| *s != 0);
        }
        return;
    }
    chain.push((sign, cell));
}

/// Boundary of a signed chain.
pub fn boundary_chain(chain: &[SignedCell]) -> Vec<SignedCell> {
    let mut out = Vec::new();
    for (s, c) in chain {
        for (s2, c2) in c.boundary() {
            push_signed(&mut out, s * s2, c2);
        }
    }
    out
}

/// All cells of `K_{p+1}`, outer-bracketed trees over `p+1` letters.
pub fn cells(p: usize) -> Vec<AssocCell> {
    fn trees(m: usize, offset: u8) -> Vec<Vec<Bracket>> {
        // all bracket sets on letters offset+1 ..= offset+m, outer included
        debug_assert!(m >= 2);
        let mut out = Vec::new();
        let outer = (offset + 1, offset + m as u8);
        // compositions of m into c >= 2 parts
        fn compositions(m: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            let used: usize = acc.iter().sum();
            if used == m {
                if acc.len() >= 2 {
                    out.push(acc.clone());
                }
                return;
            }
            for part in 1..=(m - used) {
                acc.push(part);
                compositions(m, acc, out);
                acc.pop();
            }
        }
        let mut comps = Vec::new();
        compositions(m, &mut Vec::new(), &mut comps);
        for comp in comps {
            // per part: size 1 -> letter; size >= 2 -> any subtree
            let mut options: Vec<Vec<Vec<Bracket>>> = Vec::new();
            let mut pos = offset;
            for &part in &comp {
                if part == 1 {
                    options.push(vec![Vec::new()]);
                } else {
                    options.push(trees(part, pos));
                }
                pos += part as u8;
            }
            // cartesian product of options
            let mut acc: Vec<Vec<Bracket>> = vec![vec![outer]];
            for opt in options {
                let mut next = Vec::with_capacity(acc.len() * opt.len());
                for base in &acc {
                    for choice in &opt {
                        let mut v = base.clone();
                        v.extend_from_slice(choice);
                        next.push(v);
                    }
                }
                acc = next;
            }
            out.extend(acc);
        }
        out
    }
    let mut out: Vec<AssocCell> = trees(p + 1, 0)
        .into_iter()
        .map(|b| AssocCell::new(p, b).expect("enumerated cells are valid"))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Substitutes the bracketed cell `u` for letter `a+1` of `w`
/// (`w` over `a+b+1` letters, `u` over `p'+1` letters); the unsigned cell of
/// the face map. The face sign is reported by [`face_sign`].
pub fn face_map(a: usize, p_prime: usize, b: usize, w: &AssocCell, u: &AssocCell) -> Result<AssocCell> {
    if w.letters() != a + b + 1 {
        return Err(AlgebraError::pre(format!(
            "w has {} letters, expected {}",
            w.letters(),
            a + b + 1
        )));
    }
    if u.letters() != p_prime + 1 {
        return Err(AlgebraError::pre(format!(
            "u has {} letters, expected {}",
            u.letters(),
            p_prime + 1
        )));
    }
    let cut = (a + 1) as u8;
    let shift = p_prime as u8;
    let mut brackets: Vec<Bracket> = w
        .brackets()
        .iter()
        .map(|&(l, r)| {
            let nl = if l > cut { l + shift } else { l };
            let nr = if r >= cut { r + shift } else { r };
            (nl, nr)
        })
        .collect();
    for &(l, r) in u.brackets() {
        brackets.push((l + a as u8, r + a as u8));
    }
    AssocCell::new(a + b + p_prime + 1 - 1, brackets)
}

/// The sign `(-1)^{(p'+1)b + a + 1}` attached to the face map.
pub fn face_sign(a: usize, p_prime: usize, b: usize) -> i64 {
    pow_sign((p_prime + 1) * b + a + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k3_cells() {
        let cs = cells(2);
        // one edge (the top cell) and two vertices
        assert_eq!(cs.len(), 3);
        let degs: Vec<usize> = cs.iter().map(|c| c.deg()).collect();
        assert_eq!(degs.iter().filter(|&&d| d == 1).count(), 1);
        assert_eq!(degs.iter().filter(|&&d| d == 2).count(), 2);
    }

    #[test]
    fn pentagon_counts() {
        let cs = cells(3);
        assert_eq!(cs.iter().filter(|c| c.dim() == 0).count(), 5);
        assert_eq!(cs.iter().filter(|c| c.dim() == 1).count(), 5);
        assert_eq!(cs.iter().filter(|c| c.dim() == 2).count(), 1);
    }

    #[test]
    fn boundary_squares_to_zero() {
        for p in 2..=6 {
            for cell in cells(p) {
                let b = cell.boundary();
                let bb = boundary_chain(&b);
                assert!(bb.is_empty(), "dd != 0 at p={p} cell={cell:?}");
            }
        }
    }

    #[test]
    fn boundary_of_k3_is_vertex_difference() {
        let top = AssocCell::top(2);
        let b = top.boundary();
        assert_eq!(b.len(), 2);
        // -((12)3) + (1(23)) per the top-cell formula
        let left = AssocCell::new(2, vec![(1, 3), (1, 2)]).unwrap();
        let right = AssocCell::new(2, vec![(1, 3), (2, 3)]).unwrap();
        let sl = b.iter().find(|(_, c)| *c == left).unwrap().0;
        let sr = b.iter().find(|(_, c)| *c == right).unwrap().0;
        assert_eq!(sl, -1);
        assert_eq!(sr, 1);
    }

    #[test]
    fn peel_inverts_face_map() {
        for p in 2..=5 {
            for cell in cells(p) {
                for f in cell.innermost() {
                    if cell.brackets()[f] == (1, (p + 1) as u8) {
                        continue;
                    }
                    let (a, pp, b, small) = cell.peel(f);
                    let back = face_map(a, pp, b, &small, &AssocCell::top(pp)).unwrap();
                    assert_eq!(back, cell);
                }
            }
        }
    }

    #[test]
    fn face_relation_32() {
        // d_{a+k,s,p'-s-k+b} (d_{a,p'-s,b} x 1) = d_{a,p',b} (1 x d_{k,s,p'-k-s})
        for (a, b, k, s, pp) in [
            (0usize, 1usize, 0usize, 1usize, 2usize),
            (1, 0, 1, 1, 3),
            (1, 1, 0, 2, 3),
            (0, 1, 1, 1, 3),
        ] {
            // w ranges over K_{a+b+1}, i.e. a+b+1 letters
            let w = AssocCell::top(a + b);
            let upper = AssocCell::top(pp - s);
            let inner = AssocCell::top(s);
            let lhs_in = face_map(a, pp - s, b, &w, &upper).unwrap();
            let lhs = face_map(a + k, s, pp - s - k + b, &lhs_in, &inner).unwrap();
            let rhs_in = face_map(k, s, pp - k - s, &upper, &inner).unwrap();
            let rhs = face_map(a, pp, b, &w, &rhs_in).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn face_relation_33() {
        // d_{a,p',b+c+p''+1} (d_{a+b+1,p'',c} x 1)(1 x T)
        //   = d_{a+b+p'+1,p'',c} (d_{a,p',b+c+1} x 1)
        for (a, b, c, pp, ppp) in [
            (0usize, 0usize, 0usize, 1usize, 1usize),
            (1, 0, 1, 1, 2),
            (0, 1, 0, 2, 1),
        ] {
            // the two inner face maps both consume a cell with a+b+c+2 letters
            let w = AssocCell::top(a + b + c + 1);
            let u1 = AssocCell::top(pp);
            let u2 = AssocCell::top(ppp);
            let lhs_in = face_map(a + b + 1, ppp, c, &w, &u2).unwrap();
            let lhs = face_map(a, pp, b + c + ppp + 1, &lhs_in, &u1).unwrap();
            let rhs_in = face_map(a, pp, b + c + 1, &w, &u1).unwrap();
            let rhs = face_map(a + b + pp + 1, ppp, c, &rhs_in, &u2).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}
