use super::{checked_cells, Alphabet, Channel, JointPmf, Prob};
use crate::error::{Error, Result};

/// Axis positions in the joint returned by [`induced_joint`].
pub mod axis {
    pub const U0: usize = 0;
    pub const U1: usize = 1;
    pub const U2: usize = 2;
    pub const X: usize = 3;
    pub const Y1: usize = 4;
    pub const Y2: usize = 5;
}

/// Axis names of the induced joint, in order.
pub const INDUCED_AXES: [&str; 6] = ["U0", "U1", "U2", "X", "Y1", "Y2"];

/// Auxiliary distribution `p(u0, u1, u2)` with the map `x = gamma(u0, u1, u2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxScheme<P = f64> {
    aux_joint: JointPmf<P>,
    gamma: Vec<usize>,
    x_size: usize,
}

impl<P: Prob> AuxScheme<P> {
    /// `gamma` is flat in `(u0, u1, u2)` row-major order and must be total.
    pub fn new(aux_joint: JointPmf<P>, gamma: Vec<usize>, x_size: usize) -> Result<Self> {
        if aux_joint.rank() != 3 {
            return Err(Error::malformed(format!("aux joint has {} axes, expected 3", aux_joint.rank())));
        }
        if gamma.len() != aux_joint.len() {
            return Err(Error::malformed(format!(
                "gamma has {} entries, aux joint has {} cells",
                gamma.len(),
                aux_joint.len()
            )));
        }
        if let Some((i, &x)) = gamma.iter().enumerate().find(|(_, &x)| x >= x_size) {
            return Err(Error::AlphabetMismatch(format!("gamma[{i}] = {x} outside input alphabet of size {x_size}")));
        }
        Ok(Self { aux_joint, gamma, x_size })
    }

    pub fn aux_joint(&self) -> &JointPmf<P> {
        &self.aux_joint
    }

    pub fn gamma(&self) -> &[usize] {
        &self.gamma
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn u_sizes(&self) -> [usize; 3] {
        let s = self.aux_joint.shape();
        [s[0], s[1], s[2]]
    }

    pub fn gamma_at(&self, u0: usize, u1: usize, u2: usize) -> usize {
        self.gamma[self.aux_joint.flat_index(&[u0, u1, u2])]
    }

    pub fn to_f64(&self) -> AuxScheme<f64> {
        AuxScheme { aux_joint: self.aux_joint.to_f64(), gamma: self.gamma.clone(), x_size: self.x_size }
    }

    /// Exchanges the roles of `U1` and `U2`; pairs with [`Channel::swapped`].
    pub fn swapped(&self) -> Self {
        let aux_joint = self.aux_joint.marginalize(&[0, 2, 1]).expect("rank-3 joint");
        let [a, b, c] = self.u_sizes();
        let mut gamma = vec![0; self.gamma.len()];
        for u0 in 0..a {
            for u1 in 0..b {
                for u2 in 0..c {
                    gamma[(u0 * c + u2) * b + u1] = self.gamma_at(u0, u1, u2);
                }
            }
        }
        Self { aux_joint, gamma, x_size: self.x_size }
    }
}

/// Joint law of `(U0, U1, U2, X, Y1, Y2)`:
/// `p(u0,u1,u2) * [x = gamma(u0,u1,u2)] * p(y1,y2|x)`.
pub fn induced_joint<P: Prob>(scheme: &AuxScheme<P>, ch: &Channel<P>) -> Result<JointPmf<P>> {
    if scheme.x_size() != ch.x_size() {
        return Err(Error::AlphabetMismatch(format!(
            "scheme maps into {} input symbols, channel has {}",
            scheme.x_size(),
            ch.x_size()
        )));
    }
    let aux = scheme.aux_joint();
    let mut axes: Vec<Alphabet> = aux.axes().iter().zip(&INDUCED_AXES[..3]).map(|(a, n)| a.renamed(*n)).collect();
    axes.push(ch.input().renamed("X"));
    axes.push(ch.y1().renamed("Y1"));
    axes.push(ch.y2().renamed("Y2"));
    let shape: Vec<usize> = axes.iter().map(Alphabet::size).collect();
    let cells = checked_cells(&shape)?;

    let (nx, m1, m2) = (ch.x_size(), ch.y1_size(), ch.y2_size());
    let block = nx * m1 * m2;
    let mut mass = vec![P::zero(); cells];
    for (cell, p) in aux.mass().iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let x = scheme.gamma()[cell];
        let base = cell * block + x * m1 * m2;
        for (k, q) in ch.row(x).mass().iter().enumerate() {
            mass[base + k] = p.clone() * q.clone();
        }
    }
    Ok(JointPmf::from_parts(axes, mass))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probability::Alphabet;

    fn aux(sizes: [usize; 3], mass: Vec<f64>) -> JointPmf {
        let axes = ["U0", "U1", "U2"].iter().zip(sizes).map(|(n, s)| Alphabet::indexed(*n, s)).collect();
        JointPmf::new(axes, mass).unwrap()
    }

    #[test]
    fn point_mass_scheme_on_noiseless_channel() {
        let scheme = AuxScheme::new(aux([1, 1, 1], vec![1.0]), vec![1], 2).unwrap();
        let j = induced_joint(&scheme, &Channel::noiseless(2)).unwrap();
        assert_eq!(*j.get(&[0, 0, 0, 1, 1, 1]), 1.0);
        assert!((j.total() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn uniform_u0_identity_map() {
        let scheme = AuxScheme::new(aux([2, 1, 1], vec![0.5, 0.5]), vec![0, 1], 2).unwrap();
        let j = induced_joint(&scheme, &Channel::noiseless(2)).unwrap();
        let support: Vec<Vec<usize>> = (0..j.len()).filter(|&i| j.mass()[i] > 0.0).map(|i| j.unravel(i)).collect();
        assert_eq!(support, vec![vec![0, 0, 0, 0, 0, 0], vec![1, 0, 0, 1, 1, 1]]);
        assert_eq!(j.mass().iter().filter(|&&m| m > 0.0).count(), 2);
    }

    #[test]
    fn gamma_out_of_range_rejected() {
        assert!(AuxScheme::new(aux([1, 1, 1], vec![1.0]), vec![2], 2).is_err());
        let s = AuxScheme::new(aux([1, 1, 1], vec![1.0]), vec![2], 3).unwrap();
        assert!(matches!(induced_joint(&s, &Channel::noiseless(2)), Err(Error::AlphabetMismatch(_))));
    }

    #[test]
    fn swap_round_trips() {
        let s =
            AuxScheme::new(aux([1, 2, 3], vec![0.1, 0.2, 0.05, 0.15, 0.3, 0.2]), vec![0, 1, 2, 0, 1, 2], 3).unwrap();
        let w = s.swapped();
        assert_eq!(w.u_sizes(), [1, 3, 2]);
        assert_eq!(w.gamma_at(0, 2, 1), s.gamma_at(0, 1, 2));
        assert_eq!(w.swapped(), s);
    }
}
