//! Truncated elements of the completed tensor algebra `T(H) = prod H^{(x)m}`
//! over a rank-`n` space `H`, together with the graded derivations and
//! filtered automorphisms acting on them.
//!
//! Words over `{1..n}` index the sparse basis of `H^{(x)m}`; canonical order
//! is lexicographic and explicit zeros are never stored.

use std::collections::BTreeMap;

use crate::scalar::{Mode, Scalar};
use crate::{AlgebraError, Result};

/// A basis word of `H^{(x)m}`: `m` generator indices in `1..=dim_h`.
pub type Word = Vec<u8>;

/// Truncated element of `T(H)`: one sparse map per retained degree.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorSeries {
    dim_h: usize,
    trunc: usize,
    mode: Mode,
    comps: Vec<BTreeMap<Word, Scalar>>,
}

impl TensorSeries {
    pub fn zero(dim_h: usize, trunc: usize, mode: Mode) -> Self {
        assert!(dim_h >= 1 && trunc >= 1);
        TensorSeries {
            dim_h,
            trunc,
            mode,
            comps: vec![BTreeMap::new(); trunc + 1],
        }
    }

    pub fn one(dim_h: usize, trunc: usize, mode: Mode) -> Self {
        let mut s = Self::zero(dim_h, trunc, mode);
        s.comps[0].insert(Vec::new(), Scalar::one(mode));
        s
    }

    /// The generator `X_i`, `i` in `1..=dim_h`.
    pub fn generator(dim_h: usize, trunc: usize, mode: Mode, i: u8) -> Self {
        let mut s = Self::zero(dim_h, trunc, mode);
        assert!(i >= 1 && (i as usize) <= dim_h);
        s.comps[1].insert(vec![i], Scalar::one(mode));
        s
    }

    pub fn from_word(dim_h: usize, trunc: usize, mode: Mode, word: &[u8], c: Scalar) -> Self {
        let mut s = Self::zero(dim_h, trunc, mode);
        s.insert(word.to_vec(), c);
        s
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Adds `c` to the coefficient of `word`, pruning exact zeros.
    pub fn insert(&mut self, word: Word, c: Scalar) {
        let m = word.len();
        if m > self.trunc || c.is_zero() {
            return;
        }
        debug_assert!(word.iter().all(|&l| l >= 1 && (l as usize) <= self.dim_h));
        debug_assert_eq!(c.mode(), self.mode);
        let entry = self.comps[m].entry(word);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c).expect("mode checked");
                if s.is_zero() {
                    o.remove();
                } else {
                    o.insert(s);
                }
            }
        }
    }

    pub fn coeff(&self, word: &[u8]) -> Scalar {
        if word.len() > self.trunc {
            return Scalar::zero(self.mode);
        }
        self.comps[word.len()]
            .get(word)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.mode))
    }

    /// Iterates `(word, coeff)` pairs of the degree-`m` component.
    pub fn component(&self, m: usize) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.comps[m].iter()
    }

    pub fn component_map(&self, m: usize) -> &BTreeMap<Word, Scalar> {
        &self.comps[m]
    }

    /// The series with only the degree-`m` part retained.
    pub fn degree_part(&self, m: usize) -> TensorSeries {
        let mut s = Self::zero(self.dim_h, self.trunc, self.mode);
        if m <= self.trunc {
            s.comps[m] = self.comps[m].clone();
        }
        s
    }

    /// Lowest degree with a nonzero component, if any.
    pub fn min_degree(&self) -> Option<usize> {
        self.comps.iter().position(|c| !c.is_empty())
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_empty())
    }

    pub fn compat(&self, rhs: &TensorSeries) -> Result<()> {
        if self.dim_h != rhs.dim_h {
            return Err(AlgebraError::DimMismatch(self.dim_h, rhs.dim_h));
        }
        if self.trunc != rhs.trunc {
            return Err(AlgebraError::TruncMismatch(self.trunc, rhs.trunc));
        }
        if self.mode != rhs.mode {
            return Err(AlgebraError::ModeMismatch);
        }
        Ok(())
    }

    pub fn add(&self, rhs: &TensorSeries) -> Result<TensorSeries> {
        self.compat(rhs)?;
        let mut out = self.clone();
        for m in 0..=rhs.trunc {
            for (w, c) in &rhs.comps[m] {
                out.insert(w.clone(), c.clone());
            }
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &TensorSeries) -> Result<TensorSeries> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> TensorSeries {
        let mut out = self.clone();
        for comp in &mut out.comps {
            for c in comp.values_mut() {
                *c = c.neg();
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> TensorSeries {
        let mut out = Self::zero(self.dim_h, self.trunc, self.mode);
        if c.is_zero() {
            return out;
        }
        for m in 0..=self.trunc {
            for (w, a) in &self.comps[m] {
                out.insert(w.clone(), a.mul(c).expect("mode"));
            }
        }
        out
    }

    pub fn scale_int(&self, k: i64) -> TensorSeries {
        let mut out = Self::zero(self.dim_h, self.trunc, self.mode);
        if k == 0 {
            return out;
        }
        for m in 0..=self.trunc {
            for (w, a) in &self.comps[m] {
                out.insert(w.clone(), a.scale_int(k));
            }
        }
        out
    }

    /// Degreewise convolution product, truncated at `trunc`.
    pub fn mul(&self, rhs: &TensorSeries) -> Result<TensorSeries> {
        self.compat(rhs)?;
        let mut out = Self::zero(self.dim_h, self.trunc, self.mode);
        for p in 0..=self.trunc {
            if self.comps[p].is_empty() {
                continue;
            }
            for q in 0..=(self.trunc - p) {
                if rhs.comps[q].is_empty() {
                    continue;
                }
                for (w1, c1) in &self.comps[p] {
                    for (w2, c2) in &rhs.comps[q] {
                        let mut w = w1.clone();
                        w.extend_from_slice(w2);
                        out.insert(w, c1.mul(c2)?);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Inverse of `a = 1 + t`, `t` of positive degree, via the Neumann series.
    pub fn group_inverse(&self) -> Result<TensorSeries> {
        let one = Scalar::one(self.mode);
        if self.coeff(&[]) != one {
            return Err(AlgebraError::pre("group inverse needs degree-0 part 1"));
        }
        let t = {
            let mut t = self.clone();
            t.comps[0].clear();
            t
        };
        // 1 - t + t^2 - ...
        let mut out = Self::one(self.dim_h, self.trunc, self.mode);
        let mut pow = Self::one(self.dim_h, self.trunc, self.mode);
        for k in 1..=self.trunc {
            pow = pow.mul(&t)?;
            if pow.is_zero() {
                break;
            }
            out = if k % 2 == 1 { out.sub(&pow)? } else { out.add(&pow)? };
        }
        Ok(out)
    }

    /// `exp(u)` for `u` with zero degree-0 part.
    pub fn exp(&self) -> Result<TensorSeries> {
        if !self.comps[0].is_empty() {
            return Err(AlgebraError::pre("exp needs zero degree-0 part"));
        }
        let mut out = Self::one(self.dim_h, self.trunc, self.mode);
        let mut pow = Self::one(self.dim_h, self.trunc, self.mode);
        let mut kfact = 1i64;
        for k in 1..=self.trunc {
            pow = pow.mul(self)?;
            if pow.is_zero() {
                break;
            }
            kfact = kfact.checked_mul(k as i64).expect("factorial fits i64");
            out = out.add(&pow.div_int(kfact))?;
        }
        Ok(out)
    }

    /// `log(a)` for `a` with degree-0 part 1; inverse of `exp` to truncation.
    pub fn log(&self) -> Result<TensorSeries> {
        let one = Scalar::one(self.mode);
        if self.coeff(&[]) != one {
            return Err(AlgebraError::pre("log needs degree-0 part 1"));
        }
        let t = {
            let mut t = self.clone();
            t.comps[0].clear();
            t
        };
        let mut out = Self::zero(self.dim_h, self.trunc, self.mode);
        let mut pow = Self::one(self.dim_h, self.trunc, self.mode);
        for k in 1..=self.trunc {
            pow = pow.mul(&t)?;
            if pow.is_zero() {
                break;
            }
            let term = pow.div_int(k as i64);
            out = if k % 2 == 1 { out.add(&term)? } else { out.sub(&term)? };
        }
        Ok(out)
    }

    fn div_int(&self, k: i64) -> TensorSeries {
        let mut out = Self::zero(self.dim_h, self.trunc, self.mode);
        for m in 0..=self.trunc {
            for (w, a) in &self.comps[m] {
                out.insert(w.clone(), a.div_int(k));
            }
        }
        out
    }

    /// Cyclic slot shift on each `H^{(x)m}`: `Z_1...Z_m -> Z_m Z_1...Z_{m-1}`.
    ///
    /// Degree 0 and 1 are fixed. The last-to-front convention is pinned by
    /// the identity `interior(u)(I) = epsilon(u) - u`.
    pub fn epsilon(&self) -> TensorSeries {
        self.epsilon_pow(1)
    }

    /// `epsilon^k` (k may be negative for the inverse front-to-last shift).
    pub fn epsilon_pow(&self, k: i64) -> TensorSeries {
        let mut out = Self::zero(self.dim_h, self.trunc, self.mode);
        for m in 0..=self.trunc {
            for (w, c) in &self.comps[m] {
                out.insert(rotate_word(w, k), c.clone());
            }
        }
        out
    }

    /// Cyclic symmetrizer `N = 1 + epsilon + ... + epsilon^{m-1}` on each
    /// `H^{(x)m}`, zero on degree 0.
    pub fn n_operator(&self) -> TensorSeries {
        let mut out = Self::zero(self.dim_h, self.trunc, self.mode);
        for m in 1..=self.trunc {
            for (w, c) in &self.comps[m] {
                for k in 0..m as i64 {
                    out.insert(rotate_word(w, k), c.clone());
                }
            }
        }
        out
    }

    /// Averaged symmetrizer `N / m` per degree.
    pub fn ncheck_operator(&self) -> TensorSeries {
        let mut out = Self::zero(self.dim_h, self.trunc, self.mode);
        for m in 1..=self.trunc {
            for (w, c) in &self.comps[m] {
                let cm = c.div_int(m as i64);
                for k in 0..m as i64 {
                    out.insert(rotate_word(w, k), cm.clone());
                }
            }
        }
        out
    }

    /// Re-truncates to `new_trunc`, dropping or zero-padding degrees.
    pub fn with_trunc(&self, new_trunc: usize) -> TensorSeries {
        let mut out = Self::zero(self.dim_h, new_trunc, self.mode);
        for m in 0..=self.trunc.min(new_trunc) {
            out.comps[m] = self.comps[m].clone();
        }
        out
    }

    /// Largest coefficient magnitude (as f64), over degrees `lo..=hi`.
    pub fn max_coeff(&self, lo: usize, hi: usize) -> f64 {
        let mut m = 0.0f64;
        for d in lo..=hi.min(self.trunc) {
            for c in self.comps[d].values() {
                m = m.max(c.abs_f64());
            }
        }
        m
    }

    /// Max-coefficient distance to `rhs`, over all degrees.
    pub fn dist_max(&self, rhs: &TensorSeries) -> f64 {
        let diff = self.sub(rhs).expect("compat");
        diff.max_coeff(0, diff.trunc)
    }
}

/// Rotates a word by `k` last-to-front steps (negative k rotates front-to-last).
fn rotate_word(w: &[u8], k: i64) -> Word {
    let m = w.len();
    if m <= 1 {
        return w.to_vec();
    }
    let k = k.rem_euclid(m as i64) as usize;
    // epsilon moves the last slot to the front, so epsilon^k moves the last k.
    let cut = m - k;
    let mut out = Vec::with_capacity(m);
    out.extend_from_slice(&w[cut..]);
    out.extend_from_slice(&w[..cut]);
    out
}

/// Element of `Lie IA(T)` in truncation: generator images with components in
/// degrees >= 2, extended to all of `T` by the Leibniz rule.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedDerivation {
    dim_h: usize,
    trunc: usize,
    mode: Mode,
    images: Vec<TensorSeries>,
}

impl GradedDerivation {
    pub fn new(images: Vec<TensorSeries>) -> Result<Self> {
        let dim_h = images.len();
        if dim_h == 0 {
            return Err(AlgebraError::pre("derivation needs at least one generator"));
        }
        let trunc = images[0].trunc();
        let mode = images[0].mode();
        for im in &images {
            images[0].compat(im)?;
            if im.dim_h() != dim_h {
                return Err(AlgebraError::DimMismatch(im.dim_h(), dim_h));
            }
            if !im.comps[0].is_empty() || !im.comps[1].is_empty() {
                return Err(AlgebraError::pre(
                    "derivation images must vanish in degrees 0 and 1",
                ));
            }
        }
        Ok(GradedDerivation { dim_h, trunc, mode, images })
    }

    pub fn zero(dim_h: usize, trunc: usize, mode: Mode) -> Self {
        GradedDerivation {
            dim_h,
            trunc,
            mode,
            images: vec![TensorSeries::zero(dim_h, trunc, mode); dim_h],
        }
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn image(&self, i: u8) -> &TensorSeries {
        &self.images[(i - 1) as usize]
    }

    pub fn images(&self) -> &[TensorSeries] {
        &self.images
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(|s| s.is_zero())
    }

    /// Degree-`p` graded piece `u_p`: generator images restricted to their
    /// degree-`(p+1)` components.
    pub fn graded_piece(&self, p: usize) -> GradedDerivation {
        let images = self.images.iter().map(|s| s.degree_part(p + 1)).collect();
        GradedDerivation { dim_h: self.dim_h, trunc: self.trunc, mode: self.mode, images }
    }

    pub fn add(&self, rhs: &GradedDerivation) -> Result<GradedDerivation> {
        let images = self
            .images
            .iter()
            .zip(&rhs.images)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        GradedDerivation::new(images)
    }

    pub fn sub(&self, rhs: &GradedDerivation) -> Result<GradedDerivation> {
        let images = self
            .images
            .iter()
            .zip(&rhs.images)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        GradedDerivation::new(images)
    }

    pub fn neg(&self) -> GradedDerivation {
        GradedDerivation {
            dim_h: self.dim_h,
            trunc: self.trunc,
            mode: self.mode,
            images: self.images.iter().map(|s| s.neg()).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> GradedDerivation {
        GradedDerivation {
            dim_h: self.dim_h,
            trunc: self.trunc,
            mode: self.mode,
            images: self.images.iter().map(|s| s.scale(c)).collect(),
        }
    }

    /// Leibniz extension `u(a)` for a full series `a`.
    pub fn derive(&self, a: &TensorSeries) -> Result<TensorSeries> {
        if a.dim_h() != self.dim_h {
            return Err(AlgebraError::DimMismatch(a.dim_h(), self.dim_h));
        }
        if a.mode() != self.mode {
            return Err(AlgebraError::ModeMismatch);
        }
        let trunc = a.trunc();
        let mut out = TensorSeries::zero(self.dim_h, trunc, self.mode);
        for m in 1..=trunc {
            for (w, c) in a.component(m) {
                for j in 0..m {
                    let img = &self.images[(w[j] - 1) as usize];
                    for d in 2..=self.trunc.min(trunc) {
                        if m - 1 + d > trunc {
                            break;
                        }
                        for (iw, ic) in img.component(d) {
                            let mut nw = Vec::with_capacity(m - 1 + d);
                            nw.extend_from_slice(&w[..j]);
                            nw.extend_from_slice(iw);
                            nw.extend_from_slice(&w[j + 1..]);
                            out.insert(nw, c.mul(ic)?);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Composite `(u o v)|_H` assembled degreewise from the closed formula
    /// `w_p = sum_s (sum of slot insertions of u_s) o v_{p-s}`.
    pub fn compose(&self, v: &GradedDerivation) -> Result<GradedDerivation> {
        if self.dim_h != v.dim_h {
            return Err(AlgebraError::DimMismatch(self.dim_h, v.dim_h));
        }
        if self.trunc != v.trunc {
            return Err(AlgebraError::TruncMismatch(self.trunc, v.trunc));
        }
        if self.mode != v.mode {
            return Err(AlgebraError::ModeMismatch);
        }
        let mut images = Vec::with_capacity(self.dim_h);
        for i in 0..self.dim_h {
            let mut img = TensorSeries::zero(self.dim_h, self.trunc, self.mode);
            // p ranges over output grades; v_{p-s} contributes words of
            // length p-s+1, u_s replaces one slot by a length-(s+1) word.
            for p in 2..self.trunc {
                for s in 1..p {
                    let vlen = p - s + 1;
                    if p + 1 > self.trunc {
                        continue;
                    }
                    for (w, c) in v.images[i].component(vlen) {
                        for j in 0..vlen {
                            let u_img = &self.images[(w[j] - 1) as usize];
                            for (iw, ic) in u_img.component(s + 1) {
                                let mut nw = Vec::with_capacity(p + 1);
                                nw.extend_from_slice(&w[..j]);
                                nw.extend_from_slice(iw);
                                nw.extend_from_slice(&w[j + 1..]);
                                img.insert(nw, c.mul(ic)?);
                            }
                        }
                    }
                }
            }
            images.push(img);
        }
        GradedDerivation::new(images)
    }

    /// `[u, v] = uv - vu`.
    pub fn bracket(&self, v: &GradedDerivation) -> Result<GradedDerivation> {
        self.compose(v)?.sub(&v.compose(self)?)
    }

    /// `exp(u)` as a filtered automorphism, via the finite sum of iterated
    /// Leibniz applications (u raises degree, so the sum terminates).
    pub fn exp(&self) -> Result<FilteredAutomorphism> {
        let mut images = Vec::with_capacity(self.dim_h);
        for i in 1..=self.dim_h {
            let xi = TensorSeries::generator(self.dim_h, self.trunc, self.mode, i as u8);
            let mut acc = xi.clone();
            let mut pow = xi;
            let mut kfact = 1i64;
            for k in 1..=self.trunc {
                pow = self.derive(&pow)?;
                if pow.is_zero() {
                    break;
                }
                kfact *= k as i64;
                acc = acc.add(&pow.div_int(kfact))?;
            }
            images.push(acc);
        }
        FilteredAutomorphism::new(images)
    }
}

/// Filtration-preserving algebra automorphism acting trivially on `H`
/// (an `IA(T)` element in truncation): generator images `X_i + (deg >= 2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FilteredAutomorphism {
    dim_h: usize,
    trunc: usize,
    mode: Mode,
    images: Vec<TensorSeries>,
}

impl FilteredAutomorphism {
    pub fn new(images: Vec<TensorSeries>) -> Result<Self> {
        let dim_h = images.len();
        if dim_h == 0 {
            return Err(AlgebraError::pre("automorphism needs generators"));
        }
        let trunc = images[0].trunc();
        let mode = images[0].mode();
        for (i, im) in images.iter().enumerate() {
            images[0].compat(im)?;
            let xi = TensorSeries::generator(dim_h, trunc, mode, (i + 1) as u8);
            if im.degree_part(1) != xi.degree_part(1) || !im.comps[0].is_empty() {
                return Err(AlgebraError::pre(
                    "IA condition: image of X_i must be X_i + higher degree",
                ));
            }
        }
        Ok(FilteredAutomorphism { dim_h, trunc, mode, images })
    }

    pub fn identity(dim_h: usize, trunc: usize, mode: Mode) -> Self {
        let images = (1..=dim_h)
            .map(|i| TensorSeries::generator(dim_h, trunc, mode, i as u8))
            .collect();
        FilteredAutomorphism { dim_h, trunc, mode, images }
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn image(&self, i: u8) -> &TensorSeries {
        &self.images[(i - 1) as usize]
    }

    pub fn is_identity(&self) -> bool {
        self == &Self::identity(self.dim_h, self.trunc, self.mode)
    }

    /// Applies the automorphism to a series: substitute `X_i -> U(X_i)`
    /// multiplicatively in every word.
    pub fn apply(&self, a: &TensorSeries) -> Result<TensorSeries> {
        if a.dim_h() != self.dim_h || a.mode() != self.mode {
            return Err(AlgebraError::DimMismatch(a.dim_h(), self.dim_h));
        }
        let trunc = a.trunc();
        let mut out = TensorSeries::zero(self.dim_h, trunc, self.mode);
        for (w, c) in a.component(0) {
            out.insert(w.clone(), c.clone());
        }
        for m in 1..=trunc {
            for (w, c) in a.component(m) {
                let mut prod = TensorSeries::one(self.dim_h, trunc, self.mode);
                for &l in w {
                    prod = prod.mul(&self.images[(l - 1) as usize].with_trunc(trunc))?;
                }
                out = out.add(&prod.scale(c))?;
            }
        }
        Ok(out)
    }

    /// Composite `x -> self(other(x))`.
    pub fn compose(&self, other: &FilteredAutomorphism) -> Result<FilteredAutomorphism> {
        let images = other
            .images
            .iter()
            .map(|im| self.apply(im))
            .collect::<Result<Vec<_>>>()?;
        FilteredAutomorphism::new(images)
    }

    /// Inverse automorphism as `exp(-log U)`; exact by construction, since
    /// the log extraction reproduces `U` degreewise and `exp(-u) exp(u) = id`
    /// is a filtered polynomial identity.
    pub fn inverse(&self) -> Result<FilteredAutomorphism> {
        self.log()?.neg().exp()
    }

    /// `log(U)` as a graded derivation, extracted degree by degree from
    /// `U(X_i) = X_i + u(X_i) + u^2(X_i)/2! + ...`: the degree-`d` piece of
    /// `u` is the degree-`d` defect after subtracting the higher exponential
    /// terms built from the pieces of degree `< d` (each application of `u`
    /// raises degree, so those terms are already determined).
    pub fn log(&self) -> Result<GradedDerivation> {
        let mut u = GradedDerivation::zero(self.dim_h, self.trunc, self.mode);
        for d in 2..=self.trunc {
            let mut images = Vec::with_capacity(self.dim_h);
            for i in 1..=self.dim_h {
                let xi = TensorSeries::generator(self.dim_h, self.trunc, self.mode, i as u8);
                // exponential tail from strictly lower pieces
                let mut tail = TensorSeries::zero(self.dim_h, self.trunc, self.mode);
                let mut pow = u.derive(&u.derive(&xi)?)?;
                let mut kfact = 2i64;
                let mut k = 2usize;
                while !pow.is_zero() {
                    tail = tail.add(&pow.div_int(kfact))?;
                    k += 1;
                    if k > self.trunc {
                        break;
                    }
                    pow = u.derive(&pow)?;
                    kfact *= k as i64;
                }
                let defect = self.image(i as u8).degree_part(d).sub(
                    &u.image(i as u8)
                        .degree_part(d)
                        .add(&tail.degree_part(d))?,
                )?;
                images.push(u.image(i as u8).add(&defect)?);
            }
            u = GradedDerivation::new(images)?;
        }
        Ok(u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(dim: usize, trunc: usize) -> TensorSeries {
        TensorSeries::zero(dim, trunc, Mode::Exact)
    }

    fn gen(i: u8) -> TensorSeries {
        TensorSeries::generator(2, 4, Mode::Exact, i)
    }

    #[test]
    fn geometric_series_inverse() {
        // (1+X1)(1 - X1 + X1^2 - X1^3) = 1 at trunc 3
        let a = TensorSeries::one(2, 3, Mode::Exact)
            .add(&TensorSeries::generator(2, 3, Mode::Exact, 1))
            .unwrap();
        let b = a.group_inverse().unwrap();
        assert_eq!(a.mul(&b).unwrap(), TensorSeries::one(2, 3, Mode::Exact));
        assert_eq!(b.mul(&a).unwrap(), TensorSeries::one(2, 3, Mode::Exact));
        assert_eq!(
            b.coeff(&[1, 1, 1]),
            Scalar::from_int(Mode::Exact, -1)
        );
    }

    #[test]
    fn basis_product() {
        let p = gen(1).mul(&gen(2)).unwrap();
        assert_eq!(p.coeff(&[1, 2]), Scalar::one(Mode::Exact));
        assert!(p.coeff(&[2, 1]).is_zero());
    }

    #[test]
    fn unit_law() {
        let one = TensorSeries::one(2, 4, Mode::Exact);
        let mut z = ts(2, 4);
        z.insert(vec![1, 2], Scalar::ratio(Mode::Exact, 3, 7));
        z.insert(vec![2], Scalar::from_int(Mode::Exact, -2));
        assert_eq!(one.mul(&z).unwrap(), z);
        assert_eq!(z.mul(&one).unwrap(), z);
    }

    #[test]
    fn exp_log_round_trip() {
        let mut u = ts(2, 5);
        u.insert(vec![1], Scalar::one(Mode::Exact));
        u.insert(vec![1, 2], Scalar::one(Mode::Exact));
        let e = u.exp().unwrap();
        assert_eq!(e.log().unwrap(), u);
    }

    #[test]
    fn exp_zero_is_one() {
        let z = ts(2, 4);
        assert_eq!(z.exp().unwrap(), TensorSeries::one(2, 4, Mode::Exact));
    }

    #[test]
    fn epsilon_convention_last_to_front() {
        let mut a = ts(3, 4);
        a.insert(vec![1, 2, 3], Scalar::one(Mode::Exact));
        let e = a.epsilon();
        assert_eq!(e.coeff(&[3, 1, 2]), Scalar::one(Mode::Exact));
        // degree-1 fixed
        assert_eq!(gen(1).epsilon(), gen(1));
        // epsilon^m = id on degree m
        assert_eq!(a.epsilon().epsilon().epsilon(), a);
    }

    #[test]
    fn n_operator_examples() {
        let mut xx = ts(2, 4);
        xx.insert(vec![1, 1], Scalar::one(Mode::Exact));
        assert_eq!(xx.n_operator(), xx.scale_int(2));
        // N(I) = 0 since epsilon(X1X2 - X2X1) = X2X1 - X1X2
        let mut i_t = ts(2, 4);
        i_t.insert(vec![1, 2], Scalar::one(Mode::Exact));
        i_t.insert(vec![2, 1], Scalar::from_int(Mode::Exact, -1));
        assert!(i_t.n_operator().is_zero());
    }

    #[test]
    fn derive_leibniz_example() {
        // u(X1) = X2X2, u(X2) = 0  =>  u(X1X2) = X2X2X2
        let mut im1 = ts(2, 4);
        im1.insert(vec![2, 2], Scalar::one(Mode::Exact));
        let u = GradedDerivation::new(vec![im1, ts(2, 4)]).unwrap();
        let a = gen(1).mul(&gen(2)).unwrap();
        let d = u.derive(&a).unwrap();
        assert_eq!(d.coeff(&[2, 2, 2]), Scalar::one(Mode::Exact));
        assert_eq!(d.component_map(3).len(), 1);
        assert!(u.derive(&TensorSeries::one(2, 4, Mode::Exact)).unwrap().is_zero());
    }

    #[test]
    fn exp_derivation_identity_and_roundtrip() {
        let z = GradedDerivation::zero(2, 4, Mode::Exact);
        assert!(z.exp().unwrap().is_identity());

        let mut im1 = ts(2, 5);
        im1.insert(vec![1, 2], Scalar::from_int(Mode::Exact, 2));
        im1.insert(vec![2, 2, 1], Scalar::ratio(Mode::Exact, -1, 3));
        let mut im2 = ts(2, 5);
        im2.insert(vec![1, 1], Scalar::one(Mode::Exact));
        let u = GradedDerivation::new(vec![im1, im2]).unwrap();
        let big = u.exp().unwrap();
        assert_eq!(big.log().unwrap(), u);
    }

    #[test]
    fn automorphism_inverse_and_multiplicativity() {
        let mut im1 = ts(2, 5);
        im1.insert(vec![2, 1], Scalar::one(Mode::Exact));
        let mut im2 = ts(2, 5);
        im2.insert(vec![1, 1, 2], Scalar::from_int(Mode::Exact, -3));
        let u = GradedDerivation::new(vec![im1, im2]).unwrap();
        let big_u = u.exp().unwrap();
        let inv = big_u.inverse().unwrap();
        assert!(big_u.compose(&inv).unwrap().is_identity());

        // exp(u)(ab) = exp(u)(a) exp(u)(b)
        let a = gen(1).with_trunc(5).add(&TensorSeries::one(2, 5, Mode::Exact)).unwrap();
        let b = gen(2).with_trunc(5);
        let lhs = big_u.apply(&a.mul(&b).unwrap()).unwrap();
        let rhs = big_u.apply(&a).unwrap().mul(&big_u.apply(&b).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_antisymmetry() {
        let mut im1 = ts(2, 5);
        im1.insert(vec![1, 2], Scalar::one(Mode::Exact));
        let mut im2 = ts(2, 5);
        im2.insert(vec![2, 2], Scalar::from_int(Mode::Exact, 5));
        let u = GradedDerivation::new(vec![im1, im2]).unwrap();
        assert!(u.bracket(&u).unwrap().is_zero());
        let z = GradedDerivation::zero(2, 5, Mode::Exact);
        assert!(u.compose(&z).unwrap().is_zero());
    }

    #[test]
    fn mismatched_truncation_is_error() {
        let a = TensorSeries::one(2, 3, Mode::Exact);
        let b = TensorSeries::one(2, 4, Mode::Exact);
        assert!(a.mul(&b).is_err());
    }

    #[test]
    fn ring_laws_on_random_triples() {
        use crate::rng_util::{random_series, seeded};
        let mut rng = seeded(21);
        for _ in 0..25 {
            let a = random_series(&mut rng, 3, 5, Mode::Exact, 0, 4, 2);
            let b = random_series(&mut rng, 3, 5, Mode::Exact, 0, 4, 2);
            let c = random_series(&mut rng, 3, 5, Mode::Exact, 0, 4, 2);
            let assoc_l = a.mul(&b).unwrap().mul(&c).unwrap();
            let assoc_r = a.mul(&b.mul(&c).unwrap()).unwrap();
            assert_eq!(assoc_l, assoc_r);
            let dist_l = a.mul(&b.add(&c).unwrap()).unwrap();
            let dist_r = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
            assert_eq!(dist_l, dist_r);
        }
        // float: same laws to 1e-12 relative
        for _ in 0..10 {
            let a = random_series(&mut rng, 2, 5, Mode::Float, 0, 4, 2);
            let b = random_series(&mut rng, 2, 5, Mode::Float, 0, 4, 2);
            let c = random_series(&mut rng, 2, 5, Mode::Float, 0, 4, 2);
            let l = a.mul(&b).unwrap().mul(&c).unwrap();
            let r = a.mul(&b.mul(&c).unwrap()).unwrap();
            let scale = l.max_coeff(0, 5).max(1e-300);
            assert!(l.dist_max(&r) / scale < 1e-12);
        }
    }

    #[test]
    fn multiplication_respects_filtration() {
        use crate::rng_util::{random_series, seeded};
        let mut rng = seeded(22);
        let a = random_series(&mut rng, 2, 6, Mode::Exact, 2, 3, 2);
        let b = random_series(&mut rng, 2, 6, Mode::Exact, 3, 4, 2);
        let p = a.mul(&b).unwrap();
        assert!(p.min_degree().map(|d| d >= 5).unwrap_or(true));
    }

    #[test]
    fn cyclic_operator_algebra() {
        use crate::rng_util::{random_series, seeded};
        let mut rng = seeded(23);
        for _ in 0..20 {
            let a = random_series(&mut rng, 3, 5, Mode::Exact, 1, 5, 2);
            let lhs = a.n_operator().ncheck_operator();
            let rhs = a.ncheck_operator().n_operator();
            assert_eq!(lhs, rhs);
            assert_eq!(a.n_operator().epsilon(), a.n_operator());
            assert_eq!(a.epsilon().n_operator(), a.n_operator());
        }
    }

    #[test]
    fn exp_of_commuting_element_inverts_by_sign() {
        // exp(I) * exp(-I) = 1 for the degree-2 intersection tensor
        let mut i_t = ts(2, 6);
        i_t.insert(vec![1, 2], Scalar::one(Mode::Exact));
        i_t.insert(vec![2, 1], Scalar::from_int(Mode::Exact, -1));
        let e = i_t.exp().unwrap();
        let einv = i_t.neg().exp().unwrap();
        assert_eq!(e.mul(&einv).unwrap(), TensorSeries::one(2, 6, Mode::Exact));
        assert_eq!(e.group_inverse().unwrap(), einv);
        // degree-2k component of exp(-I) is (-1)^k I^{(x)k} / k!
        let em = i_t.neg().exp().unwrap();
        let i2 = i_t.mul(&i_t).unwrap();
        assert_eq!(em.degree_part(4), i2.scale(&Scalar::ratio(Mode::Exact, 1, 2)));
        let i3 = i2.mul(&i_t).unwrap();
        assert_eq!(em.degree_part(6), i3.scale(&Scalar::ratio(Mode::Exact, -1, 6)));
    }
}
