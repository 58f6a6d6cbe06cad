//! Reduced words in a free group of rank `n`, endomorphisms given by
//! generator images, and automorphisms carrying an explicit inverse
//! certificate (free-group invertibility is not decided here; the Nielsen
//! library below supplies certified generators for test material).

use rand::Rng;

use crate::{AlgebraError, Result};

/// A freely reduced word: nonzero signed generator indices, `+i` for `x_i`
/// and `-i` for `x_i^{-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FreeWord {
    letters: Vec<i32>,
}

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord { letters: Vec::new() }
    }

    /// Builds a word, freely reducing; rejects zero letters.
    pub fn new(letters: &[i32]) -> Result<Self> {
        if letters.iter().any(|&l| l == 0) {
            return Err(AlgebraError::BadGenerator(0));
        }
        let mut red: Vec<i32> = Vec::with_capacity(letters.len());
        for &l in letters {
            if red.last() == Some(&-l) {
                red.pop();
            } else {
                red.push(l);
            }
        }
        Ok(FreeWord { letters: red })
    }

    pub fn generator(i: i32) -> Self {
        assert!(i != 0);
        FreeWord { letters: vec![i] }
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, rhs: &FreeWord) -> FreeWord {
        let mut v = self.letters.clone();
        for &l in &rhs.letters {
            if v.last() == Some(&-l) {
                v.pop();
            } else {
                v.push(l);
            }
        }
        FreeWord { letters: v }
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord {
            letters: self.letters.iter().rev().map(|&l| -l).collect(),
        }
    }

    /// Signed letter counts `[gamma] in H_1`.
    pub fn abelianize(&self, n: usize) -> Vec<i64> {
        let mut v = vec![0i64; n];
        for &l in &self.letters {
            let idx = (l.unsigned_abs() as usize) - 1;
            v[idx] += l.signum() as i64;
        }
        v
    }

    pub fn max_generator(&self) -> usize {
        self.letters.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0)
    }
}

/// The word `w_0 = prod_i x_i x_{g+i} x_i^{-1} x_{g+i}^{-1}` in `F_{2g}`.
pub fn w0(genus: usize) -> FreeWord {
    let g = genus as i32;
    let mut letters = Vec::with_capacity(4 * genus);
    for i in 1..=g {
        letters.extend_from_slice(&[i, g + i, -i, -(g + i)]);
    }
    FreeWord::new(&letters).expect("commutator word is reduced")
}

/// Endomorphism of `F_n` by generator images.
#[derive(Clone, Debug, PartialEq)]
pub struct FreeEndo {
    n: usize,
    images: Vec<FreeWord>,
}

impl FreeEndo {
    pub fn new(n: usize, images: Vec<FreeWord>) -> Result<Self> {
        if images.len() != n {
            return Err(AlgebraError::DimMismatch(images.len(), n));
        }
        for im in &images {
            if im.max_generator() > n {
                return Err(AlgebraError::BadGenerator(im.max_generator() as i64));
            }
        }
        Ok(FreeEndo { n, images })
    }

    pub fn identity(n: usize) -> Self {
        FreeEndo {
            n,
            images: (1..=n as i32).map(FreeWord::generator).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn image(&self, i: usize) -> &FreeWord {
        &self.images[i - 1]
    }

    /// Applies the endomorphism letterwise and reduces.
    pub fn substitute(&self, w: &FreeWord) -> FreeWord {
        let mut out = FreeWord::identity();
        for &l in w.letters() {
            let img = &self.images[(l.unsigned_abs() as usize) - 1];
            let piece = if l > 0 { img.clone() } else { img.inverse() };
            out = out.concat(&piece);
        }
        out
    }

    /// `self . rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &FreeEndo) -> Result<FreeEndo> {
        if self.n != rhs.n {
            return Err(AlgebraError::DimMismatch(self.n, rhs.n));
        }
        let images = rhs.images.iter().map(|w| self.substitute(w)).collect();
        FreeEndo::new(self.n, images)
    }

    /// Abelianized matrix: column `i` is `[phi(x_i)]`.
    pub fn induced_matrix(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.n]; self.n];
        for i in 0..self.n {
            let col = self.images[i].abelianize(self.n);
            for (r, &v) in col.iter().enumerate() {
                m[r][i] = v;
            }
        }
        m
    }
}

/// Automorphism with a certified inverse; the certificate is checked at
/// construction by composing both ways on every generator.
#[derive(Clone, Debug, PartialEq)]
pub struct FreeAut {
    forward: FreeEndo,
    backward: FreeEndo,
}

impl FreeAut {
    pub fn new(forward: FreeEndo, backward: FreeEndo) -> Result<Self> {
        if forward.n != backward.n {
            return Err(AlgebraError::DimMismatch(forward.n, backward.n));
        }
        let n = forward.n;
        for i in 1..=n as i32 {
            let x = FreeWord::generator(i);
            if backward.substitute(forward.image(i as usize)) != x
                || forward.substitute(backward.image(i as usize)) != x
            {
                return Err(AlgebraError::BadCertificate(format!(
                    "images do not invert on x_{i}"
                )));
            }
        }
        let m = forward.induced_matrix();
        if det_i64(&m).map(|d| d.abs()) != Some(1) {
            return Err(AlgebraError::BadCertificate(
                "abelianized matrix not in GL_n(Z)".into(),
            ));
        }
        Ok(FreeAut { forward, backward })
    }

    pub fn identity(n: usize) -> Self {
        FreeAut {
            forward: FreeEndo::identity(n),
            backward: FreeEndo::identity(n),
        }
    }

    pub fn n(&self) -> usize {
        self.forward.n
    }

    pub fn forward(&self) -> &FreeEndo {
        &self.forward
    }

    pub fn backward(&self) -> &FreeEndo {
        &self.backward
    }

    pub fn image(&self, i: usize) -> &FreeWord {
        self.forward.image(i)
    }

    pub fn apply(&self, w: &FreeWord) -> FreeWord {
        self.forward.substitute(w)
    }

    pub fn apply_inverse(&self, w: &FreeWord) -> FreeWord {
        self.backward.substitute(w)
    }

    pub fn inverse(&self) -> FreeAut {
        FreeAut {
            forward: self.backward.clone(),
            backward: self.forward.clone(),
        }
    }

    pub fn compose(&self, rhs: &FreeAut) -> Result<FreeAut> {
        let forward = self.forward.compose(&rhs.forward)?;
        let backward = rhs.backward.compose(&self.backward)?;
        FreeAut::new(forward, backward)
    }

    pub fn induced_matrix(&self) -> Vec<Vec<i64>> {
        self.forward.induced_matrix()
    }
}

/// Integer determinant by fraction-free elimination; `None` on overflow.
fn det_i64(m: &[Vec<i64>]) -> Option<i64> {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|row| row.iter().map(|&v| v as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let swap = (k + 1..n).find(|&r| a[r][k] != 0)?;
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[k][k].checked_mul(a[i][j])? - a[i][k].checked_mul(a[k][j])?) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    i64::try_from(sign * a[n - 1][n - 1]).ok()
}

/// The Nielsen generators of `Aut(F_n)` with their certified inverses:
/// generator swaps, inversions, and left/right transvections.
pub fn nielsen_generators(n: usize) -> Vec<FreeAut> {
    let mut out = Vec::new();
    let gen = |i: i32| FreeWord::generator(i);
    let ident = FreeEndo::identity(n);

    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                continue;
            }
            // swap x_i <-> x_j (self-inverse)
            let mut sw = ident.clone();
            sw.images[i - 1] = gen(j as i32);
            sw.images[j - 1] = gen(i as i32);
            out.push(FreeAut::new(sw.clone(), sw).expect("swap certified"));

            // left transvection x_i -> x_j x_i
            let mut fw = ident.clone();
            fw.images[i - 1] = gen(j as i32).concat(&gen(i as i32));
            let mut bw = ident.clone();
            bw.images[i - 1] = gen(-(j as i32)).concat(&gen(i as i32));
            out.push(FreeAut::new(fw, bw).expect("transvection certified"));

            // right transvection x_i -> x_i x_j
            let mut fw = ident.clone();
            fw.images[i - 1] = gen(i as i32).concat(&gen(j as i32));
            let mut bw = ident.clone();
            bw.images[i - 1] = gen(i as i32).concat(&gen(-(j as i32)));
            out.push(FreeAut::new(fw, bw).expect("transvection certified"));
        }
    }
    for i in 1..=n {
        // inversion x_i -> x_i^{-1} (self-inverse)
        let mut inv = ident.clone();
        inv.images[i - 1] = gen(-(i as i32));
        out.push(FreeAut::new(inv.clone(), inv).expect("inversion certified"));
    }
    out
}

/// Random composition of `k` Nielsen generators, skipping steps that would
/// push any generator image (either direction) past `max_len` letters.
pub fn random_nielsen_aut_bounded<R: Rng>(
    rng: &mut R,
    n: usize,
    k: usize,
    max_len: usize,
) -> FreeAut {
    let gens = nielsen_generators(n);
    let mut aut = FreeAut::identity(n);
    for _ in 0..k {
        for _try in 0..8 {
            let g = &gens[rng.gen_range(0..gens.len())];
            let cand = aut.compose(g).expect("same rank");
            let longest = (1..=n)
                .map(|i| cand.forward.image(i).len().max(cand.backward.image(i).len()))
                .max()
                .unwrap_or(0);
            if longest <= max_len {
                aut = cand;
                break;
            }
        }
    }
    aut
}

/// Random composition of `k` Nielsen generators with a mild growth bound.
pub fn random_nielsen_aut<R: Rng>(rng: &mut R, n: usize, k: usize) -> FreeAut {
    random_nielsen_aut_bounded(rng, n, k, 10)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn reduction_examples() {
        assert_eq!(FreeWord::new(&[1, -1, 2]).unwrap().letters(), &[2]);
        assert_eq!(FreeWord::new(&[1, 2]).unwrap().inverse().letters(), &[-2, -1]);
        assert!(FreeWord::new(&[0]).is_err());
    }

    #[test]
    fn substitution_example() {
        // x1 -> x1 x2, x2 -> x2 applied to x1 x2^{-1} gives x1
        let phi = FreeEndo::new(
            2,
            vec![FreeWord::new(&[1, 2]).unwrap(), FreeWord::generator(2)],
        )
        .unwrap();
        let w = FreeWord::new(&[1, -2]).unwrap();
        assert_eq!(phi.substitute(&w).letters(), &[1]);
    }

    #[test]
    fn w0_examples() {
        assert_eq!(w0(1).letters(), &[1, 2, -1, -2]);
        assert_eq!(w0(2).letters(), &[1, 3, -1, -3, 2, 4, -2, -4]);
        assert_eq!(w0(2).abelianize(4), vec![0, 0, 0, 0]);
    }

    #[test]
    fn abelianize_and_matrix() {
        let w = FreeWord::new(&[1, 2, -1]).unwrap();
        assert_eq!(w.abelianize(2), vec![0, 1]);
        let phi = FreeEndo::new(
            2,
            vec![FreeWord::new(&[1, 2]).unwrap(), FreeWord::generator(2)],
        )
        .unwrap();
        assert_eq!(phi.induced_matrix(), vec![vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn matrix_functoriality_on_random_nielsen_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = random_nielsen_aut(&mut rng, 3, 6);
            let b = random_nielsen_aut(&mut rng, 3, 6);
            let ab = a.compose(&b).unwrap();
            let ma = a.induced_matrix();
            let mb = b.induced_matrix();
            let mut prod = vec![vec![0i64; 3]; 3];
            for r in 0..3 {
                for c in 0..3 {
                    for k in 0..3 {
                        prod[r][c] += ma[r][k] * mb[k][c];
                    }
                }
            }
            assert_eq!(ab.induced_matrix(), prod);
        }
    }

    #[test]
    fn bad_certificate_rejected() {
        let fwd = FreeEndo::new(
            2,
            vec![FreeWord::new(&[1, 2]).unwrap(), FreeWord::generator(2)],
        )
        .unwrap();
        let bad_bwd = FreeEndo::identity(2);
        assert!(FreeAut::new(fwd, bad_bwd).is_err());
    }

    #[test]
    fn reduction_idempotent_and_concat_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..30 {
            let a = crate::rng_util::random_word(&mut rng, 3, 8);
            let b = crate::rng_util::random_word(&mut rng, 3, 8);
            let c = crate::rng_util::random_word(&mut rng, 3, 8);
            assert_eq!(FreeWord::new(a.letters()).unwrap(), a);
            assert_eq!(a.concat(&b).concat(&c), a.concat(&b.concat(&c)));
            assert!(a.concat(&a.inverse()).is_empty());
        }
    }

    #[test]
    fn substitute_respects_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = random_nielsen_aut(&mut rng, 3, 5);
            let b = random_nielsen_aut(&mut rng, 3, 5);
            let w = FreeWord::new(&[1, -2, 3, 3, -1]).unwrap();
            let lhs = a.compose(&b).unwrap().apply(&w);
            let rhs = a.apply(&b.apply(&w));
            assert_eq!(lhs, rhs);
        }
    }
}
