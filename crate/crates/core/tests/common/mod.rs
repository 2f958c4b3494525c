//! Test structures and an oracle that recomputes the geometry from raw
//! coefficient arrays, without going through the library's tensor code.
#![allow(dead_code)]

use g2star_core::g2::standard_phi;
use g2star_core::presets;
use g2star_core::{Apcms, Connection, G2Bundle, KForm, LieAlgebra, Metric, QuadExt, Ring, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Q = QuadExt;

pub fn q(s: &str) -> Q {
    s.parse().unwrap()
}

/// A Lie algebra with a bundle and a known unit timelike vector.
pub struct Setting {
    pub name: &'static str,
    pub algebra: LieAlgebra<Q>,
    pub bundle: G2Bundle<Q>,
    pub unit: Vector<Q>,
}

pub struct Case {
    pub name: String,
    pub algebra: LieAlgebra<Q>,
    pub bundle: G2Bundle<Q>,
    pub xi: Vector<Q>,
}

impl std::fmt::Debug for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} with xi = {}", self.name, self.xi)
    }
}

impl Case {
    pub fn structure(&self) -> (Apcms<Q>, Connection<Q>) {
        let conn = Connection::levi_civita(&self.algebra, self.bundle.metric()).unwrap();
        (Apcms::induce(&self.bundle, self.xi.clone()).unwrap(), conn)
    }
}

fn standard_bundle() -> G2Bundle<Q> {
    G2Bundle::normalized(standard_phi(), 1).unwrap()
}

pub fn settings() -> Vec<Setting> {
    let bracket = |i, j, v: Vector<Q>| (i, j, v);
    vec![
        Setting {
            name: "nilpotent example",
            algebra: presets::example_algebra(),
            bundle: presets::example_bundle(g2star_core::Mode::Normalized).unwrap(),
            unit: Vector::f(2),
        },
        Setting {
            name: "abelian",
            algebra: LieAlgebra::abelian(),
            bundle: standard_bundle(),
            unit: Vector::f(1),
        },
        Setting {
            name: "heisenberg-type",
            algebra: LieAlgebra::from_brackets([bracket(1, 2, Vector::f(7)), bracket(3, 4, Vector::f(7))]).unwrap(),
            bundle: standard_bundle(),
            unit: Vector::f(1),
        },
        Setting {
            name: "book",
            algebra: LieAlgebra::from_brackets((1..=6).map(|i| bracket(i, 7, -Vector::f(i)))).unwrap(),
            bundle: standard_bundle(),
            unit: Vector::f(1),
        },
        Setting {
            name: "solvable",
            algebra: LieAlgebra::from_brackets([
                bracket(1, 7, Vector::f(1)),
                bracket(2, 7, -Vector::f(2)),
                bracket(3, 7, Vector::f(4)),
            ])
            .unwrap(),
            bundle: standard_bundle(),
            unit: Vector::f(1),
        },
    ]
}

/// Second intersection of the line `e + t u` with `g(x, x) = -1`, where
/// `g(e, e) = -1`. `None` when the line is tangent or null.
pub fn through_quadric(g: &Metric<Q>, e: &Vector<Q>, u: &Vector<Q>) -> Option<Vector<Q>> {
    let guu = g.apply(u, u);
    let geu = g.apply(e, u);
    if guu.is_zero() || geu.is_zero() {
        return None;
    }
    let t = (Q::int(-2) * geu) / guu;
    Some(e.clone() + u.scale(&t))
}

pub fn small_rational(rng: &mut ChaCha8Rng) -> Q {
    Q::ratio(rng.random_range(-4..=4), rng.random_range(1..=3))
}

/// `count` exact structures cycling through [`settings`], with `ξ` from
/// random rational directions.
pub fn generated_cases(count: usize, seed: u64) -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let settings = settings();
    let mut out = Vec::new();
    let mut n = 0;
    while out.len() < count {
        let s = &settings[n % settings.len()];
        n += 1;
        let u = Vector::from_fn(|_| small_rational(&mut rng));
        if let Some(xi) = through_quadric(s.bundle.metric(), &s.unit, &u) {
            out.push(Case {
                name: format!("{} #{n}", s.name),
                algebra: s.algebra.clone(),
                bundle: s.bundle.clone(),
                xi,
            });
        }
    }
    out
}

/// The fixed structures: each setting with its unit vector.
pub fn basic_cases() -> Vec<Case> {
    settings()
        .into_iter()
        .map(|s| Case {
            name: s.name.to_string(),
            xi: s.unit.clone(),
            algebra: s.algebra,
            bundle: s.bundle,
        })
        .collect()
}

pub mod oracle {
    use super::*;

    pub type Arr2 = [[Q; 7]; 7];
    pub type Arr3 = Vec<Vec<Vec<Q>>>;

    fn zero2() -> Arr2 {
        std::array::from_fn(|_| std::array::from_fn(|_| Q::int(0)))
    }

    fn zero3() -> Arr3 {
        vec![vec![vec![Q::int(0); 7]; 7]; 7]
    }

    /// Sign of the permutation sorting `idx`, 0 on a repeat.
    pub fn perm_sign(idx: &[usize]) -> i64 {
        let mut sign = 1;
        for a in 0..idx.len() {
            for b in a + 1..idx.len() {
                if idx[a] == idx[b] {
                    return 0;
                }
                if idx[a] > idx[b] {
                    sign = -sign;
                }
            }
        }
        sign
    }

    /// `φ(f_i, f_j, f_k)` as a dense antisymmetric array, 0-based.
    pub fn phi_array(phi: &KForm<Q>) -> Arr3 {
        let mut out = zero3();
        for i in 0..7 {
            for j in 0..7 {
                for k in 0..7 {
                    let s = perm_sign(&[i, j, k]);
                    if s != 0 {
                        let mut l = [i + 1, j + 1, k + 1];
                        l.sort();
                        out[i][j][k] = Q::int(s) * phi.coeff(&l);
                    }
                }
            }
        }
        out
    }

    /// `c[i][j][k] = f^k([f_i, f_j])`, read off the public bracket.
    pub fn structure_constants(l: &LieAlgebra<Q>) -> Arr3 {
        let mut out = zero3();
        for i in 0..7 {
            for j in 0..7 {
                let v = l.bracket(&Vector::f(i + 1), &Vector::f(j + 1));
                for k in 0..7 {
                    out[i][j][k] = v.0[k].clone();
                }
            }
        }
        out
    }

    pub fn metric_array(g: &Metric<Q>) -> Arr2 {
        std::array::from_fn(|i| std::array::from_fn(|j| g.entry(i + 1, j + 1)))
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(m: &Arr2) -> Arr2 {
        let mut a = m.clone();
        let mut inv = zero2();
        for (i, row) in inv.iter_mut().enumerate() {
            row[i] = Q::int(1);
        }
        for col in 0..7 {
            let p = (col..7).find(|&r| !a[r][col].is_zero()).expect("invertible");
            a.swap(col, p);
            inv.swap(col, p);
            let piv = Q::int(1) / a[col][col].clone();
            for c in 0..7 {
                a[col][c] = a[col][c].clone() * piv.clone();
                inv[col][c] = inv[col][c].clone() * piv.clone();
            }
            for r in 0..7 {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for c in 0..7 {
                        a[r][c] = a[r][c].clone() - f.clone() * a[col][c].clone();
                        inv[r][c] = inv[r][c].clone() - f.clone() * inv[col][c].clone();
                    }
                }
            }
        }
        inv
    }

    fn lower(g: &Arr2, c: &Arr3, i: usize, j: usize, k: usize) -> Q {
        // g([f_i, f_j], f_k)
        (0..7).fold(Q::int(0), |acc, l| acc + c[i][j][l].clone() * g[l][k].clone())
    }

    /// `Γ[i][j][l] = f^l(∇_{f_i} f_j)` from the Koszul formula.
    pub fn koszul(l: &LieAlgebra<Q>, g: &Metric<Q>) -> Arr3 {
        let c = structure_constants(l);
        let g = metric_array(g);
        let ginv = inverse(&g);
        let half = Q::ratio(1, 2);
        let mut out = zero3();
        for i in 0..7 {
            for j in 0..7 {
                let low: Vec<Q> = (0..7)
                    .map(|k| {
                        half.clone()
                            * (lower(&g, &c, i, j, k) - lower(&g, &c, j, k, i) + lower(&g, &c, k, i, j))
                    })
                    .collect();
                for m in 0..7 {
                    out[i][j][m] = (0..7).fold(Q::int(0), |acc, k| acc + ginv[m][k].clone() * low[k].clone());
                }
            }
        }
        out
    }

    /// `P(f_i, f_j)` components from `g(P(X, Y), Z) = φ(X, Y, Z)`.
    pub fn cross(phi: &KForm<Q>, g: &Metric<Q>) -> Arr3 {
        let p = phi_array(phi);
        let ginv = inverse(&metric_array(g));
        let mut out = zero3();
        for i in 0..7 {
            for j in 0..7 {
                for m in 0..7 {
                    out[i][j][m] = (0..7).fold(Q::int(0), |acc, k| acc + ginv[m][k].clone() * p[i][j][k].clone());
                }
            }
        }
        out
    }

    /// `Φ[j][k] = g(φ f_j, f_k) = -φ(ξ, f_j, f_k)` for `g = -g_{4,3}`.
    pub fn fundamental(phi: &KForm<Q>, xi: &Vector<Q>) -> Arr2 {
        let p = phi_array(phi);
        let mut out = zero2();
        for j in 0..7 {
            for k in 0..7 {
                out[j][k] = (0..7).fold(Q::int(0), |acc, a| acc - xi.0[a].clone() * p[a][j][k].clone());
            }
        }
        out
    }

    /// `F(f_i, f_j, f_k) = -Φ(∇_{f_i} f_j, f_k) - Φ(f_j, ∇_{f_i} f_k)`.
    pub fn f_tensor(l: &LieAlgebra<Q>, bundle: &G2Bundle<Q>, xi: &Vector<Q>) -> Arr3 {
        let gamma = koszul(l, bundle.metric());
        let phi = fundamental(bundle.phi(), xi);
        let mut out = zero3();
        for i in 0..7 {
            for j in 0..7 {
                for k in 0..7 {
                    let mut v = Q::int(0);
                    for a in 0..7 {
                        v = v - gamma[i][j][a].clone() * phi[a][k].clone() - gamma[i][k][a].clone() * phi[j][a].clone();
                    }
                    out[i][j][k] = v;
                }
            }
        }
        out
    }

    /// `∇_ξ ξ` components.
    pub fn nabla_xi_xi(l: &LieAlgebra<Q>, g: &Metric<Q>, xi: &Vector<Q>) -> [Q; 7] {
        let gamma = koszul(l, g);
        std::array::from_fn(|m| {
            let mut v = Q::int(0);
            for i in 0..7 {
                for j in 0..7 {
                    v = v + xi.0[i].clone() * xi.0[j].clone() * gamma[i][j][m].clone();
                }
            }
            v
        })
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    /// `B[i][j]` with `(f_i ⌟ φ) ∧ (f_j ⌟ φ) ∧ φ = B[i][j] f^{1..7}`, by
    /// summing over all 5040 permutations.
    pub fn gram(phi: &KForm<Q>) -> Arr2 {
        let p = phi_array(phi);
        let perms = permutations(7);
        let mut out = zero2();
        // alternation of a (2,2,3) product: 1/(2! 2! 3!)
        let norm = Q::ratio(1, 24);
        for i in 0..7 {
            for j in i..7 {
                let mut acc = Q::int(0);
                for s in &perms {
                    let term = p[i][s[0]][s[1]].clone() * p[j][s[2]][s[3]].clone() * p[s[4]][s[5]][s[6]].clone();
                    if !term.is_zero() {
                        acc = acc + Q::int(perm_sign(s)) * term;
                    }
                }
                out[i][j] = acc.clone() * norm.clone();
                out[j][i] = out[i][j].clone();
            }
        }
        out
    }
}
