//! Intersection pairing of a genus-`g` surface, the interior derivation
//! `interior: T_1 -> Der(T)`, and the exterior-power calculus on `H`
//! (antisymmetric embedding, contraction, and the `L^3 H = H + U` projectors).

use crate::scalar::{Mode, Scalar};
use crate::tensor::{GradedDerivation, TensorSeries, Word};
use crate::{AlgebraError, Result};

/// Symplectic basis data: `dim H = 2g` with `X_i . X_{g+j} = delta_{ij}` and
/// all other pairings among basis vectors zero (up to antisymmetry).
#[derive(Clone, Copy, Debug)]
pub struct SymplecticStructure {
    genus: usize,
}

impl SymplecticStructure {
    pub fn new(genus: usize) -> Result<Self> {
        if genus == 0 {
            return Err(AlgebraError::pre("genus must be >= 1"));
        }
        Ok(SymplecticStructure { genus })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn dim_h(&self) -> usize {
        2 * self.genus
    }

    /// `X_a . X_b` for 1-based basis indices.
    pub fn pairing(&self, a: u8, b: u8) -> i64 {
        let g = self.genus as u8;
        if a <= g && b == a + g {
            1
        } else if b <= g && a == b + g {
            -1
        } else {
            0
        }
    }

    /// The intersection form `I = sum_i (X_i X_{g+i} - X_{g+i} X_i)`.
    pub fn intersection_tensor(&self, trunc: usize, mode: Mode) -> TensorSeries {
        let n = self.dim_h();
        let g = self.genus as u8;
        let mut t = TensorSeries::zero(n, trunc, mode);
        for i in 1..=g {
            t.insert(vec![i, g + i], Scalar::one(mode));
            t.insert(vec![g + i, i], Scalar::from_int(mode, -1));
        }
        t
    }

    /// The derivation `interior(u)` applied to `a`: split each word of `u`
    /// off its last letter, contract that letter against the argument letters
    /// through the pairing, and extend by Leibniz.
    pub fn interior_apply(&self, u: &TensorSeries, a: &TensorSeries) -> Result<TensorSeries> {
        if u.dim_h() != self.dim_h() || a.dim_h() != self.dim_h() {
            return Err(AlgebraError::DimMismatch(u.dim_h(), self.dim_h()));
        }
        if u.mode() != a.mode() {
            return Err(AlgebraError::ModeMismatch);
        }
        if !u.coeff(&[]).is_zero() {
            return Err(AlgebraError::pre("interior needs u in T_1"));
        }
        let trunc = a.trunc();
        let mut out = TensorSeries::zero(a.dim_h(), trunc, a.mode());
        // interior(u)(X_j) has degree (deg u - 1); Leibniz over argument words.
        for m in 1..=a.trunc() {
            for (w, c) in a.component(m) {
                for j in 0..m {
                    for d in 1..=u.trunc() {
                        if m - 1 + (d - 1) > trunc {
                            break;
                        }
                        for (uw, uc) in u.component(d) {
                            let last = uw[d - 1];
                            let pair = self.pairing(last, w[j]);
                            if pair == 0 {
                                continue;
                            }
                            let mut nw = Vec::with_capacity(m - 1 + d - 1);
                            nw.extend_from_slice(&w[..j]);
                            nw.extend_from_slice(&uw[..d - 1]);
                            nw.extend_from_slice(&w[j + 1..]);
                            out.insert(nw, c.mul(uc)?.scale_int(pair));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// `interior(u)` packaged as a graded derivation; requires every
    /// component of `u` to sit in degree >= 3, otherwise the generator
    /// images would not satisfy the IA grading.
    pub fn interior_derivation(&self, u: &TensorSeries) -> Result<GradedDerivation> {
        match u.min_degree() {
            None => Ok(GradedDerivation::zero(u.dim_h(), u.trunc(), u.mode())),
            Some(d) if d >= 3 => {
                let n = self.dim_h();
                let mut images = Vec::with_capacity(n);
                for j in 1..=n {
                    let xj = TensorSeries::generator(n, u.trunc(), u.mode(), j as u8);
                    images.push(self.interior_apply(u, &xj)?);
                }
                GradedDerivation::new(images)
            }
            Some(d) => Err(AlgebraError::pre(format!(
                "interior of a degree-{d} tensor is not an IA derivation"
            ))),
        }
    }

    /// The tensor corresponding to a derivation under the composite
    /// `Hom(H, T_2) -> H (x) T_2 -> T_3 -> Der(T)`: concretely
    /// `t(u) = sum_i u(X_i) . theta(xi^i)` with the dual vector moved to the
    /// last slot, so that `interior_apply(t(u), -) = u`.
    pub fn derivation_to_tensor(&self, u: &GradedDerivation) -> Result<TensorSeries> {
        let g = self.genus as u8;
        let n = self.dim_h();
        let mut t = TensorSeries::zero(n, u.trunc() + 1, u.mode());
        for i in 1..=n as u8 {
            // theta(xi^i) = -X_{g+i} for i <= g, +X_{i-g} otherwise.
            let (letter, sign) = if i <= g { (g + i, -1) } else { (i - g, 1) };
            for m in 2..=u.trunc() {
                for (w, c) in u.image(i).component(m) {
                    let mut nw: Word = Vec::with_capacity(m + 1);
                    nw.extend_from_slice(w);
                    nw.push(letter);
                    t.insert(nw, c.scale_int(sign));
                }
            }
        }
        Ok(t)
    }

    /// Antisymmetric embedding `L^p H -> H^{(x)p}` of a wedge of degree-1
    /// vectors: the signed sum over all slot permutations.
    pub fn lambda_embed(&self, vectors: &[TensorSeries]) -> Result<TensorSeries> {
        let p = vectors.len();
        if p == 0 {
            return Err(AlgebraError::pre("empty wedge"));
        }
        let trunc = vectors[0].trunc();
        let mode = vectors[0].mode();
        for v in vectors {
            vectors[0].compat(v)?;
            if v.min_degree() != Some(1) || !v.degree_part(1).eq(v) {
                return Err(AlgebraError::pre("wedge factors must be degree-1"));
            }
        }
        let mut out = TensorSeries::zero(self.dim_h(), trunc, mode);
        let mut perm: Vec<usize> = (0..p).collect();
        permute(&mut perm, 0, &mut |perm, sign| {
            let mut prod = TensorSeries::one(self.dim_h(), trunc, mode);
            for &idx in perm.iter() {
                prod = prod.mul(&vectors[idx]).expect("compat");
            }
            out = out.add(&prod.scale_int(sign)).expect("compat");
        });
        Ok(out)
    }

    /// Wedge of basis vectors given by indices.
    pub fn lambda_embed_basis(
        &self,
        indices: &[u8],
        trunc: usize,
        mode: Mode,
    ) -> Result<TensorSeries> {
        let vs: Vec<TensorSeries> = indices
            .iter()
            .map(|&i| TensorSeries::generator(self.dim_h(), trunc, mode, i))
            .collect();
        self.lambda_embed(&vs)
    }

    /// Embedded intersection form `I` seen as the wedge `sum X_i ^ X_{g+i}`.
    pub fn intersection_wedge(&self, trunc: usize, mode: Mode) -> TensorSeries {
        self.intersection_tensor(trunc, mode)
    }

    /// Contraction `c: H^{(x)p} -> H^{(x)(p-2)}` pairing the first two slots;
    /// restricted to embedded wedges it is the wedge contraction with
    /// `c(I) = 2g`.
    pub fn contraction(&self, a: &TensorSeries) -> Result<TensorSeries> {
        if a.dim_h() != self.dim_h() {
            return Err(AlgebraError::DimMismatch(a.dim_h(), self.dim_h()));
        }
        let mut out = TensorSeries::zero(a.dim_h(), a.trunc(), a.mode());
        for m in 2..=a.trunc() {
            for (w, c) in a.component(m) {
                let pair = self.pairing(w[0], w[1]);
                if pair == 0 {
                    continue;
                }
                out.insert(w[2..].to_vec(), c.scale_int(pair));
            }
        }
        Ok(out)
    }

    /// `q^H: H -> L^3 H`, `Z -> Z ^ I` (embedded).
    pub fn q_h(&self, z: &TensorSeries) -> Result<TensorSeries> {
        let g = self.genus as u8;
        let n = self.dim_h();
        if z.dim_h() != n {
            return Err(AlgebraError::DimMismatch(z.dim_h(), n));
        }
        let mut out = TensorSeries::zero(n, z.trunc(), z.mode());
        for (w, c) in z.component(1) {
            for i in 1..=g {
                let wedge = self.lambda_embed_basis(&[w[0], i, g + i], z.trunc(), z.mode())?;
                out = out.add(&wedge.scale(c))?;
            }
        }
        Ok(out)
    }

    /// `p^H = c / (2g - 2): L^3 H -> H`; rejects genus 1.
    pub fn p_h(&self, a: &TensorSeries) -> Result<TensorSeries> {
        if self.genus < 2 {
            return Err(AlgebraError::pre("p^H divides by 2g-2, needs g >= 2"));
        }
        Ok(self.contraction(a)?.div_by_int(2 * self.genus as i64 - 2))
    }

    /// Idempotent `q^H p^H` onto the `H`-summand of `L^3 H`.
    pub fn proj_h_summand(&self, a: &TensorSeries) -> Result<TensorSeries> {
        self.q_h(&self.p_h(a)?)
    }

    /// Idempotent `q^U p^U = 1 - q^H p^H` onto the complement `U`.
    pub fn proj_u_summand(&self, a: &TensorSeries) -> Result<TensorSeries> {
        a.sub(&self.proj_h_summand(a)?)
    }
}

impl TensorSeries {
    fn div_by_int(&self, k: i64) -> TensorSeries {
        let mut out = TensorSeries::zero(self.dim_h(), self.trunc(), self.mode());
        for m in 0..=self.trunc() {
            for (w, c) in self.component(m) {
                out.insert(w.clone(), c.div_int(k));
            }
        }
        out
    }
}

/// Heap-style permutation visitor carrying the permutation sign.
fn permute<F: FnMut(&[usize], i64)>(perm: &mut Vec<usize>, k: usize, f: &mut F) {
    let n = perm.len();
    if k == n {
        let mut sign = 1i64;
        let mut seen = vec![false; n];
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = perm[j];
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        f(perm, sign);
        return;
    }
    for i in k..n {
        perm.swap(k, i);
        permute(perm, k + 1, f);
        perm.swap(k, i);
    }
}
