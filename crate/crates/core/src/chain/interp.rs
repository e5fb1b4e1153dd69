use super::{f_ext, support, ChainElement, ChainError, ChainFamily, ChainIndex, FElement, IndexSet};
use crate::free::{FreeElement, FreeExtension};

/// Outcome of [`interpolate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Interpolation {
    /// `z ∈ F(X ∩ Y)` with `x ≤ z ≤ y`.
    Interpolant(FElement),
    /// `c_ξ ≤ y` for `ξ = min(Y \ X)`.
    Certificate { xi: ChainIndex },
}

/// For `x ∈ F(X)`, `y ∈ F(Y)` with `x ≤ y`, finds an element of `F(X ∩ Y)`
/// between them or shows `c_ξ ≤ y` where `ξ` is the least index of `Y \ X`.
///
/// The search follows the structure of `x` and `y`; every intermediate answer
/// is re-verified against the order, and a failed check is reported as
/// [`ChainError::Internal`].
pub fn interpolate(x: &FElement, xs: &IndexSet, y: &FElement, ys: &IndexSet) -> Result<Interpolation, ChainError> {
    if !support(x).is_subset(xs) {
        return Err(ChainError::SupportViolation { which: "x" });
    }
    if !support(y).is_subset(ys) {
        return Err(ChainError::SupportViolation { which: "y" });
    }
    let ctx = Ctx {
        ext: f_ext(),
        common: xs.intersection(ys).copied().collect(),
        xs,
        ys,
        xi: ys.difference(xs).next().copied(),
    };
    if !ctx.ext.leq(x, y) {
        return Err(ChainError::NotLeq);
    }
    ctx.run(x, y)
}

struct Ctx<'a> {
    ext: FreeExtension<ChainFamily>,
    common: IndexSet,
    xs: &'a IndexSet,
    ys: &'a IndexSet,
    xi: Option<ChainIndex>,
}

impl Ctx<'_> {
    fn run(&self, x: &FElement, y: &FElement) -> Result<Interpolation, ChainError> {
        let out = self.step(x, y)?;
        self.verify(x, y, &out)?;
        Ok(out)
    }

    fn verify(&self, x: &FElement, y: &FElement, out: &Interpolation) -> Result<(), ChainError> {
        match out {
            Interpolation::Interpolant(z) => {
                if !support(z).is_subset(&self.common) {
                    return Err(ChainError::Internal(format!("interpolant {z:?} leaves X ∩ Y")));
                }
                if !self.ext.leq(x, z) || !self.ext.leq(z, y) {
                    return Err(ChainError::Internal(format!("{z:?} is not between x and y")));
                }
            }
            Interpolation::Certificate { xi } => {
                if Some(*xi) != self.xi || !self.ys.contains(xi) || self.xs.contains(xi) {
                    return Err(ChainError::Internal(format!("certificate index {xi} is not min(Y \\ X)")));
                }
                if !self.ext.leq(&FreeElement::Base(ChainElement::C(*xi)), y) {
                    return Err(ChainError::Internal(format!("c({xi}) is not below y")));
                }
            }
        }
        Ok(())
    }

    fn step(&self, x: &FElement, y: &FElement) -> Result<Interpolation, ChainError> {
        if support(x).is_subset(self.ys) {
            return Ok(Interpolation::Interpolant(x.clone()));
        }
        if support(y).is_subset(self.xs) {
            return Ok(Interpolation::Interpolant(y.clone()));
        }
        let xi = self
            .xi
            .ok_or_else(|| ChainError::Internal("Y \\ X is empty but supp(y) ⊄ X".into()))?;
        let (m, n) = (x.rank(), y.rank());
        if m == 0 && n == 0 {
            return Ok(Interpolation::Certificate { xi });
        }
        if m < n {
            return self.run(x, &y.pi_down(m)?);
        }
        let r = x.as_reduced().expect("m ≥ n and m > 0");
        let diag = r.diagonal();
        if !self.ext.is_zero(diag) || r.rest().len() >= 2 {
            let mut parts = Vec::with_capacity(r.rest().len() + 1);
            if !self.ext.is_zero(diag) {
                parts.push(diag.clone());
            }
            for t in r.rest() {
                parts.push(self.ext.bowtie_at(m, t.u.clone(), t.v.clone(), t.w.clone())?);
            }
            let mut zs = Vec::with_capacity(parts.len());
            for part in &parts {
                match self.run(part, y)? {
                    Interpolation::Interpolant(z) => zs.push(z),
                    cert => return Ok(cert),
                }
            }
            return Ok(Interpolation::Interpolant(self.ext.join_all(zs.iter())));
        }
        let t = &r.rest()[0];
        let (py, y_triples) = if m == n { (y.pi(), y.triples()) } else { (y.clone(), &[][..]) };
        if y_triples.contains(t) {
            return Err(ChainError::Internal("generator triple of x occurs in y".into()));
        }
        if self.ext.leq(&t.u, &py) {
            self.run(&t.u, &py)
        } else if self.ext.leq(&t.w, &py) {
            self.run(&t.w, &py)
        } else {
            Err(ChainError::Internal("neither u nor w lies below π(y)".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::parse_f;

    fn set(xs: &[u64]) -> IndexSet {
        xs.iter().copied().collect()
    }

    fn t(s: &str) -> FElement {
        parse_f(s).unwrap()
    }

    #[test]
    fn certificate_on_chain_generators() {
        assert_eq!(
            interpolate(&t("c(0)"), &set(&[0]), &t("c(1)"), &set(&[1])).unwrap(),
            Interpolation::Certificate { xi: 1 }
        );
    }

    #[test]
    fn interpolant_through_common_part() {
        let x = t("c(0)");
        let y = t("join(a,c(1))");
        assert_eq!(
            interpolate(&x, &set(&[0, 2]), &y, &set(&[0, 1])).unwrap(),
            Interpolation::Interpolant(x.clone())
        );
        let x = t("join(a, c(2))");
        let y = t("join(a, b)");
        assert_eq!(
            interpolate(&x, &set(&[2]), &y, &set(&[5])).unwrap(),
            Interpolation::Interpolant(y)
        );
    }

    #[test]
    fn generator_case_recurses_into_components() {
        let y = t("join(a, c(4))");
        let xs = set(&[3]);
        let ys = set(&[4]);
        let x = t("bowtie(a, join(b,c(3)), c(3))");
        assert_eq!(interpolate(&x, &xs, &y, &ys).unwrap(), Interpolation::Interpolant(t("a")));
        let x = t("bowtie(join(a,c(3)), b, c(3))");
        assert_eq!(interpolate(&x, &xs, &y, &ys).unwrap(), Interpolation::Certificate { xi: 4 });
    }

    #[test]
    fn preconditions() {
        assert_eq!(
            interpolate(&t("a"), &set(&[]), &t("b"), &set(&[])),
            Err(ChainError::NotLeq)
        );
        assert_eq!(
            interpolate(&t("c(1)"), &set(&[0]), &t("c(1)"), &set(&[1])),
            Err(ChainError::SupportViolation { which: "x" })
        );
    }
}
