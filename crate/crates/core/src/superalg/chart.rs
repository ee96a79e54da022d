use std::collections::HashMap;
use std::sync::Arc;

use super::Parity;
use crate::error::{Error, Result};

/// What a coordinate stands for in the cotangent/tangent family built over a base.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Base,
    /// `x*_a` on the fibers of the odd cotangent bundle.
    Antifiber,
    /// `dx^a` on the fibers of the odd tangent bundle.
    TangentFiber,
    BaseMomentum,
    AntifiberMomentum,
    TangentFiberMomentum,
    Auxiliary,
}

impl Role {
    pub fn is_momentum(self) -> bool {
        matches!(
            self,
            Role::BaseMomentum | Role::AntifiberMomentum | Role::TangentFiberMomentum
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub parity: Parity,
    pub role: Role,
    pub index: usize,
}

/// An ordered universe of graded generators. The insertion order is the canonical
/// monomial order.
#[derive(Debug, PartialEq, Eq)]
pub struct Chart {
    gens: Vec<Generator>,
    by_name: HashMap<String, usize>,
    antifiber: Vec<Option<usize>>,
    tangent: Vec<Option<usize>>,
    momentum: Vec<Option<usize>>,
    position: Vec<Option<usize>>,
}

pub fn antifiber_name(base: &str) -> String {
    format!("{base}_star")
}

pub fn tangent_name(base: &str) -> String {
    format!("d{base}")
}

pub fn momentum_name(position: &str, role: Role) -> String {
    match role {
        Role::Base => format!("p_{position}"),
        _ => format!("pi_{position}"),
    }
}

/// Which coordinate families to lay out over a base in [`Chart::standard`].
#[derive(Clone, Copy, Debug, Default)]
pub struct Families {
    pub antifiber: bool,
    pub tangent: bool,
    pub base_momenta: bool,
    pub antifiber_momenta: bool,
    pub tangent_momenta: bool,
}

impl Families {
    pub fn multivectors() -> Families {
        Families {
            antifiber: true,
            ..Default::default()
        }
    }

    pub fn forms() -> Families {
        Families {
            tangent: true,
            ..Default::default()
        }
    }

    pub fn cotangent() -> Families {
        Families {
            base_momenta: true,
            ..Default::default()
        }
    }

    /// Positions and momenta for both the odd tangent and odd cotangent bundles.
    pub fn all() -> Families {
        Families {
            antifiber: true,
            tangent: true,
            base_momenta: true,
            antifiber_momenta: true,
            tangent_momenta: true,
        }
    }
}

impl Chart {
    pub fn builder() -> ChartBuilder {
        ChartBuilder::default()
    }

    /// Base coordinates followed by the requested fiber and momentum families, in
    /// the fixed order base, antifiber, tangent, base momenta, antifiber momenta,
    /// tangent momenta.
    pub fn standard(base: &[(&str, Parity)], families: Families) -> Result<Arc<Chart>> {
        let mut b = ChartBuilder::default();
        for (name, parity) in base {
            b = b.generator(name, *parity, Role::Base);
        }
        if families.antifiber {
            for (name, parity) in base {
                let anti = antifiber_name(name);
                b = b
                    .generator(&anti, parity.flip(), Role::Antifiber)
                    .link_antifiber(name, &anti);
            }
        }
        if families.tangent {
            for (name, parity) in base {
                let dx = tangent_name(name);
                b = b
                    .generator(&dx, parity.flip(), Role::TangentFiber)
                    .link_tangent(name, &dx);
            }
        }
        if families.base_momenta {
            for (name, parity) in base {
                let p = momentum_name(name, Role::Base);
                b = b.generator(&p, *parity, Role::BaseMomentum).link_momentum(name, &p);
            }
        }
        if families.antifiber_momenta && families.antifiber {
            for (name, parity) in base {
                let anti = antifiber_name(name);
                let p = momentum_name(&anti, Role::Antifiber);
                b = b
                    .generator(&p, parity.flip(), Role::AntifiberMomentum)
                    .link_momentum(&anti, &p);
            }
        }
        if families.tangent_momenta && families.tangent {
            for (name, parity) in base {
                let dx = tangent_name(name);
                let p = momentum_name(&dx, Role::TangentFiber);
                b = b
                    .generator(&p, parity.flip(), Role::TangentFiberMomentum)
                    .link_momentum(&dx, &p);
            }
        }
        b.build()
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn generator(&self, index: usize) -> &Generator {
        &self.gens[index]
    }

    pub fn parity(&self, index: usize) -> Parity {
        self.gens[index].parity
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn find(&self, name: &str) -> Option<&Generator> {
        self.by_name.get(name).map(|&i| &self.gens[i])
    }

    pub fn with_role(&self, role: Role) -> impl Iterator<Item = &Generator> + '_ {
        self.gens.iter().filter(move |g| g.role == role)
    }

    pub fn base(&self) -> Vec<usize> {
        self.with_role(Role::Base).map(|g| g.index).collect()
    }

    pub fn antifiber_of(&self, base: usize) -> Option<usize> {
        self.antifiber[base]
    }

    pub fn tangent_of(&self, base: usize) -> Option<usize> {
        self.tangent[base]
    }

    pub fn momentum_of(&self, position: usize) -> Option<usize> {
        self.momentum[position]
    }

    pub fn position_of(&self, momentum: usize) -> Option<usize> {
        self.position[momentum]
    }

    /// `(x^a, x*_a)` pairs for every base coordinate with an antifiber.
    pub fn antifiber_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .filter_map(|i| self.antifiber[i].map(|a| (i, a)))
            .collect()
    }

    /// `(x^a, dx^a)` pairs.
    pub fn tangent_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .filter_map(|i| self.tangent[i].map(|a| (i, a)))
            .collect()
    }

    /// `(position, momentum)` pairs in chart order of the positions.
    pub fn momentum_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .filter_map(|i| self.momentum[i].map(|m| (i, m)))
            .collect()
    }

    pub fn odd_count(&self) -> usize {
        self.gens.iter().filter(|g| g.parity.is_odd()).count()
    }
}

#[derive(Default)]
pub struct ChartBuilder {
    gens: Vec<(String, Parity, Role)>,
    antifiber: Vec<(String, String)>,
    tangent: Vec<(String, String)>,
    momentum: Vec<(String, String)>,
}

impl ChartBuilder {
    pub fn generator(mut self, name: &str, parity: Parity, role: Role) -> Self {
        self.gens.push((name.to_string(), parity, role));
        self
    }

    pub fn link_antifiber(mut self, base: &str, antifiber: &str) -> Self {
        self.antifiber.push((base.to_string(), antifiber.to_string()));
        self
    }

    pub fn link_tangent(mut self, base: &str, tangent: &str) -> Self {
        self.tangent.push((base.to_string(), tangent.to_string()));
        self
    }

    pub fn link_momentum(mut self, position: &str, momentum: &str) -> Self {
        self.momentum.push((position.to_string(), momentum.to_string()));
        self
    }

    pub fn build(self) -> Result<Arc<Chart>> {
        let mut by_name = HashMap::new();
        let mut gens = Vec::with_capacity(self.gens.len());
        for (index, (name, parity, role)) in self.gens.into_iter().enumerate() {
            if by_name.insert(name.clone(), index).is_some() {
                return Err(Error::DuplicateGenerator(name));
            }
            gens.push(Generator {
                name,
                parity,
                role,
                index,
            });
        }
        let n = gens.len();
        let lookup = |name: &str| {
            by_name
                .get(name)
                .copied()
                .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
        };
        let mut antifiber = vec![None; n];
        for (b, a) in &self.antifiber {
            let (bi, ai) = (lookup(b)?, lookup(a)?);
            expect_parity(&gens[ai], gens[bi].parity.flip())?;
            antifiber[bi] = Some(ai);
        }
        let mut tangent = vec![None; n];
        for (b, t) in &self.tangent {
            let (bi, ti) = (lookup(b)?, lookup(t)?);
            expect_parity(&gens[ti], gens[bi].parity.flip())?;
            tangent[bi] = Some(ti);
        }
        let mut momentum = vec![None; n];
        let mut position = vec![None; n];
        for (q, p) in &self.momentum {
            let (qi, pi) = (lookup(q)?, lookup(p)?);
            expect_parity(&gens[pi], gens[qi].parity)?;
            if momentum[qi].is_some() || position[pi].is_some() {
                return Err(Error::Precondition(format!("momentum pairing for `{q}` is not unique")));
            }
            momentum[qi] = Some(pi);
            position[pi] = Some(qi);
        }
        Ok(Arc::new(Chart {
            gens,
            by_name,
            antifiber,
            tangent,
            momentum,
            position,
        }))
    }
}

fn expect_parity(g: &Generator, expected: Parity) -> Result<()> {
    if g.parity != expected {
        return Err(Error::ParityMismatch {
            name: g.name.clone(),
            expected,
            found: g.parity,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_chart_assigns_shifted_parities() {
        let c = Chart::standard(&[("x", Parity::Even), ("th", Parity::Odd)], Families::all()).unwrap();
        let xs = c.index_of("x_star").unwrap();
        assert_eq!(c.parity(xs), Parity::Odd);
        assert_eq!(c.parity(c.index_of("th_star").unwrap()), Parity::Even);
        assert_eq!(c.parity(c.index_of("dth").unwrap()), Parity::Even);
        assert_eq!(c.parity(c.index_of("p_th").unwrap()), Parity::Odd);
        assert_eq!(c.parity(c.index_of("pi_x_star").unwrap()), Parity::Odd);
        let x = c.index_of("x").unwrap();
        assert_eq!(c.antifiber_of(x), Some(xs));
        assert_eq!(c.position_of(c.momentum_of(xs).unwrap()), Some(xs));
        assert_eq!(c.len(), 12);
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let r = Chart::builder()
            .generator("x", Parity::Even, Role::Base)
            .generator("x", Parity::Odd, Role::Base)
            .build();
        assert_eq!(r.unwrap_err(), Error::DuplicateGenerator("x".into()));
    }

    #[test]
    fn momentum_parity_must_match() {
        let r = Chart::builder()
            .generator("x", Parity::Even, Role::Base)
            .generator("p", Parity::Odd, Role::BaseMomentum)
            .link_momentum("x", "p")
            .build();
        assert!(matches!(r, Err(Error::ParityMismatch { .. })));
    }
}
