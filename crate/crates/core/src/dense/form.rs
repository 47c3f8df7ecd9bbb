use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{fmt_rational, parse_rational, qi, to_f64, Q};

/// Largest number of variables the dense machinery is meant for.
pub const MAX_VARS: usize = 6;

/// Homogeneous form stored as exponent vector → coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseForm {
    n: usize,
    degree: u32,
    coeffs: BTreeMap<Vec<u32>, Q>,
}

impl DenseForm {
    pub fn new(n: usize, degree: u32, coeffs: BTreeMap<Vec<u32>, Q>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("a form needs at least one variable".into()));
        }
        if !degree.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!("degree {degree} is odd")));
        }
        for e in coeffs.keys() {
            if e.len() != n || e.iter().sum::<u32>() != degree {
                return Err(Error::InvalidArgument(format!(
                    "exponent {e:?} does not fit {n} variables of degree {degree}"
                )));
            }
        }
        let coeffs = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(Self { n, degree, coeffs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Half the degree.
    pub fn d(&self) -> u32 {
        self.degree / 2
    }

    pub fn coeffs(&self) -> &BTreeMap<Vec<u32>, Q> {
        &self.coeffs
    }

    pub fn coeff(&self, e: &[u32]) -> Q {
        self.coeffs.get(e).cloned().unwrap_or_else(Q::zero)
    }

    pub fn eval(&self, x: &[Q]) -> Q {
        assert_eq!(x.len(), self.n);
        self.coeffs
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(x)
                    .fold(c.clone(), |acc, (&p, xi)| acc * num_traits::pow(xi.clone(), p as usize))
            })
            .sum()
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(x)
                    .fold(to_f64(c), |acc, (&p, xi)| acc * xi.powi(p as i32))
            })
            .sum()
    }

    pub fn gradient_f64(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.n];
        for (e, c) in &self.coeffs {
            let c = to_f64(c);
            for i in 0..self.n {
                if e[i] == 0 {
                    continue;
                }
                let mut term = c * e[i] as f64;
                for (j, (&p, xj)) in e.iter().zip(x).enumerate() {
                    let p = if i == j { p - 1 } else { p };
                    term *= xj.powi(p as i32);
                }
                g[i] += term;
            }
        }
        g
    }

    /// `self − γ other`.
    pub fn sub_scaled(&self, gamma: &Q, other: &Self) -> Result<Self> {
        if (self.n, self.degree) != (other.n, other.degree) {
            return Err(Error::Dimension("forms differ in variables or degree".into()));
        }
        let mut coeffs = self.coeffs.clone();
        for (e, c) in &other.coeffs {
            let slot = coeffs.entry(e.clone()).or_insert_with(Q::zero);
            *slot -= gamma * c;
        }
        Self::new(self.n, self.degree, coeffs)
    }
}

impl fmt::Display for DenseForm {
    /// One `coefficient e1 e2 …` line per term, the same format the parser reads.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (e, c) in &self.coeffs {
            let exps: Vec<String> = e.iter().map(u32::to_string).collect();
            writeln!(f, "{} {}", fmt_rational(c), exps.join(" "))?;
        }
        Ok(())
    }
}

/// All exponent vectors of `n` variables summing to `d`, graded-lex order
/// (`x_1^d` first).
pub fn monomials(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == n {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=d).rev() {
            prefix.push(first);
            rec(n, d - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, d, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// `d! / β!` for `|β| = d`.
pub fn multinomial(beta: &[u32]) -> Q {
    let d: u32 = beta.iter().sum();
    let denom = beta.iter().fold(BigInt::one(), |acc, &b| acc * factorial(b));
    Q::new(factorial(d), denom)
}

/// `‖x‖^{2d} = Σ_{|β|=d} (d!/β!) x^{2β}`.
pub fn norm_power(n: usize, d: u32) -> DenseForm {
    let coeffs = monomials(n, d)
        .into_iter()
        .map(|b| {
            let c = multinomial(&b);
            (b.iter().map(|v| 2 * v).collect(), c)
        })
        .collect();
    DenseForm::new(n, 2 * d, coeffs).expect("valid by construction")
}

/// `x²y⁴ + x⁴y² − 3x²y²z² + z⁶`.
pub fn motzkin_form() -> DenseForm {
    let coeffs = [
        (vec![2, 4, 0], qi(1)),
        (vec![4, 2, 0], qi(1)),
        (vec![2, 2, 2], qi(-3)),
        (vec![0, 0, 6], qi(1)),
    ]
    .into_iter()
    .collect();
    DenseForm::new(3, 6, coeffs).expect("valid by construction")
}

/// Simple undirected graph on vertices `0..n`; edges are stored as sorted
/// `(low, high)` pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n == 0 || n > MAX_VARS {
            return Err(Error::InvalidArgument(format!(
                "graphs need 1..={MAX_VARS} vertices, got {n}"
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(a, b) in &edges {
            if a >= n || b >= n {
                return Err(Error::InvalidArgument(format!("edge ({a}, {b}) leaves 0..{n}")));
            }
            if a == b {
                return Err(Error::InvalidArgument(format!("self-loop at {a}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidArgument(format!("duplicate edge ({a}, {b})")));
            }
        }
        Ok(Self {
            n,
            edges: seen.into_iter().collect(),
        })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Self::new(n, edges).expect("valid by construction")
    }

    pub fn cycle(n: usize) -> Self {
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect()).expect("valid by construction")
    }

    pub fn empty(n: usize) -> Self {
        Self::new(n, Vec::new()).expect("valid by construction")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        self.edges.iter().any(|&(u, v)| (u, v) == (a, b) || (u, v) == (b, a))
    }

    /// Size of the largest independent set, by trying every vertex subset.
    pub fn independence_number(&self) -> usize {
        (0u32..1 << self.n)
            .filter(|&mask| {
                (0..self.n).all(|a| {
                    mask & (1 << a) == 0
                        || (a + 1..self.n).all(|b| mask & (1 << b) == 0 || !self.adjacent(a, b))
                })
            })
            .map(|mask| mask.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }
}

/// `Σ_i x_i⁴ + 2 Σ_{ij ∈ E} x_i² x_j²`.
pub fn stable_set_form(g: &Graph) -> DenseForm {
    let mut coeffs = BTreeMap::new();
    for i in 0..g.n {
        let mut e = vec![0; g.n];
        e[i] = 4;
        coeffs.insert(e, qi(1));
    }
    for &(a, b) in &g.edges {
        let mut e = vec![0; g.n];
        e[a] = 2;
        e[b] = 2;
        coeffs.insert(e, qi(2));
    }
    DenseForm::new(g.n, 4, coeffs).expect("valid by construction")
}

/// Non-empty lines with `#` comments stripped, paired with 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn line_err(line: usize, message: impl Into<String>) -> Error {
    Error::ParseLine {
        line,
        message: message.into(),
    }
}

/// Parses lines `coefficient e_1 … e_n`; repeated exponents accumulate.
pub fn parse_form(text: &str) -> Result<DenseForm> {
    let mut n = None;
    let mut degree = None;
    let mut coeffs: BTreeMap<Vec<u32>, Q> = BTreeMap::new();
    for (line, l) in content_lines(text) {
        let mut parts = l.split_whitespace();
        let c = parts.next().expect("non-empty line");
        let c = parse_rational(c).map_err(|e| match e {
            Error::Parse(m) => line_err(line, m),
            other => line_err(line, other.to_string()),
        })?;
        let e = parts
            .map(|t| t.parse::<u32>().map_err(|_| line_err(line, format!("bad exponent {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if e.is_empty() {
            return Err(line_err(line, "missing exponent vector"));
        }
        let deg: u32 = e.iter().sum();
        if *n.get_or_insert(e.len()) != e.len() {
            return Err(line_err(line, format!("expected {} exponents, got {}", n.unwrap(), e.len())));
        }
        if *degree.get_or_insert(deg) != deg {
            return Err(line_err(line, format!("degree {deg} differs from {}", degree.unwrap())));
        }
        if !deg.is_multiple_of(2) {
            return Err(line_err(line, format!("odd degree {deg}")));
        }
        if e.len() > MAX_VARS {
            return Err(line_err(line, format!("at most {MAX_VARS} variables supported")));
        }
        *coeffs.entry(e).or_insert_with(Q::zero) += c;
    }
    let (Some(n), Some(degree)) = (n, degree) else {
        return Err(Error::Parse("form file has no terms".into()));
    };
    DenseForm::new(n, degree, coeffs)
}

/// Parses `n m` followed by `m` lines `i j` (0-based vertices).
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| Error::Parse("graph file is empty".into()))?;
    let nums = |line: usize, l: &str| -> Result<(usize, usize)> {
        let v: Vec<&str> = l.split_whitespace().collect();
        if v.len() != 2 {
            return Err(line_err(line, format!("expected two integers, got {l:?}")));
        }
        let p = |t: &str| t.parse::<usize>().map_err(|_| line_err(line, format!("bad integer {t:?}")));
        Ok((p(v[0])?, p(v[1])?))
    };
    let (n, m) = nums(line, header)?;
    let mut edges = Vec::with_capacity(m);
    let mut last = line;
    for (line, l) in lines {
        if edges.len() == m {
            return Err(line_err(line, format!("more than the declared {m} edges")));
        }
        let e = nums(line, l)?;
        if e.0 >= n || e.1 >= n || e.0 == e.1 {
            return Err(line_err(line, format!("invalid edge {} {} for {n} vertices", e.0, e.1)));
        }
        edges.push(e);
        last = line;
    }
    if edges.len() != m {
        return Err(line_err(last, format!("declared {m} edges, found {}", edges.len())));
    }
    Graph::new(n, edges).map_err(|e| line_err(last, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;

    #[test]
    fn motzkin_values() {
        let p = motzkin_form();
        assert_eq!(p.coeff(&[2, 4, 0]), qi(1));
        assert_eq!(p.eval(&[qi(1), qi(1), qi(1)]), qi(0));
        let x = [q(1, 2), qi(-3), q(2, 5)];
        let t = q(3, 7);
        let tx: Vec<Q> = x.iter().map(|v| v * &t).collect();
        assert_eq!(p.eval(&tx), p.eval(&x) * num_traits::pow(t, 6));
    }

    #[test]
    fn grlex_monomials() {
        assert_eq!(monomials(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(monomials(3, 3).len(), 10);
        assert_eq!(monomials(6, 2).len(), 21);
    }

    #[test]
    fn norm_power_matches_direct_expansion() {
        let w = norm_power(3, 2);
        let x = [qi(1), qi(2), q(-1, 3)];
        let s: Q = x.iter().map(|v| v * v).sum();
        assert_eq!(w.eval(&x), &s * &s);
        assert_eq!(stable_set_form(&Graph::complete(3)), w);
    }

    #[test]
    fn independence_numbers() {
        assert_eq!(Graph::complete(3).independence_number(), 1);
        assert_eq!(Graph::cycle(5).independence_number(), 2);
        assert_eq!(Graph::empty(4).independence_number(), 4);
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let p = motzkin_form();
        let x = [0.3, -0.7, 0.5];
        let g = p.gradient_f64(&x);
        for i in 0..3 {
            let (mut a, mut b) = (x, x);
            a[i] += 1e-6;
            b[i] -= 1e-6;
            let fd = (p.eval_f64(&a) - p.eval_f64(&b)) / 2e-6;
            assert!((fd - g[i]).abs() < 1e-6, "{fd} vs {}", g[i]);
        }
    }

    #[test]
    fn form_text_round_trip() {
        let p = motzkin_form();
        assert_eq!(parse_form(&p.to_string()).unwrap(), p);
        let err = parse_form("1 2 0\n# c\n0.5 1 1 1\n").unwrap_err();
        assert!(matches!(err, Error::ParseLine { line: 3, .. }), "{err}");
        assert!(matches!(parse_form("x 2 0"), Err(Error::ParseLine { line: 1, .. })));
        assert!(parse_form("1 3 0").is_err());
    }

    #[test]
    fn graph_parsing() {
        let g = parse_graph("3 3\n0 1\n1 2\n0 2\n").unwrap();
        assert_eq!(g, Graph::complete(3));
        assert!(matches!(parse_graph("3 2\n0 1\n"), Err(Error::ParseLine { line: 2, .. })));
        assert!(matches!(parse_graph("3 1\n0 7\n"), Err(Error::ParseLine { line: 2, .. })));
        assert!(matches!(parse_graph("3 1\n0 1\n1 2\n"), Err(Error::ParseLine { line: 3, .. })));
        assert!(parse_graph("3 2\n0 1\n1 0\n").is_err());
        assert!(parse_graph("").is_err());
    }
}
