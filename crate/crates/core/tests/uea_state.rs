use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use plancherel_core::plancherel::{enumerate_support, exact_moment, GrowthBound, PlancherelParams};
use plancherel_core::uea::{
    casimir_eigenvalue, gelfand_invariant, ordered_centered_polynomial, shifted_power_element,
    state_eval, Generator, NcPolynomial, PowerSumFactor, StateEvaluator, TPoly,
};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn gen(i: u32, j: u32) -> Generator {
    Generator::new(i, j).unwrap()
}

/// `⟨E_{a1 b1} ⋯ E_{am bm}⟩ = Σ_π t^{|π|} Π_B [block B closes up]`, where a
/// block closes up when its matrix units, in word order, multiply to a
/// diagonal unit with trace one.
fn set_partition_oracle(word: &[Generator]) -> Vec<i64> {
    fn closes(word: &[Generator], block: &[usize]) -> bool {
        block.windows(2).all(|w| word[w[0]].col() == word[w[1]].row())
            && word[*block.last().unwrap()].col() == word[block[0]].row()
    }
    fn rec(word: &[Generator], pos: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<i64>) {
        if pos == word.len() {
            if blocks.iter().all(|b| closes(word, b)) {
                if out.len() <= blocks.len() {
                    out.resize(blocks.len() + 1, 0);
                }
                out[blocks.len()] += 1;
            }
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(pos);
            rec(word, pos + 1, blocks, out);
            blocks[b].pop();
        }
        blocks.push(vec![pos]);
        rec(word, pos + 1, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    rec(word, 0, &mut Vec::new(), &mut out);
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

fn as_ints(p: &TPoly) -> Vec<i64> {
    p.coeffs().iter().map(|c| c.to_integer().to_i64().unwrap()).collect()
}

fn word_strategy(max_len: usize, max_index: u32) -> impl Strategy<Value = Vec<Generator>> {
    proptest::collection::vec((1..=max_index, 1..=max_index), 0..=max_len)
        .prop_map(|v| v.into_iter().map(|(i, j)| gen(i, j)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn state_matches_set_partition_oracle(word in word_strategy(7, 3)) {
        let v = state_eval(&NcPolynomial::word(word.clone())).unwrap();
        prop_assert_eq!(as_ints(&v.poly_in_t), set_partition_oracle(&word));
    }

    #[test]
    fn state_is_tracial(u in word_strategy(4, 3), v in word_strategy(4, 3)) {
        let uv = &NcPolynomial::word(u.clone()) * &NcPolynomial::word(v.clone());
        let vu = &NcPolynomial::word(v) * &NcPolynomial::word(u);
        prop_assert_eq!(state_eval(&uv).unwrap(), state_eval(&vu).unwrap());
    }

    #[test]
    fn state_is_linear(
        u in word_strategy(4, 3),
        v in word_strategy(4, 3),
        a in -20i64..=20, b in 1i64..=7, c in -20i64..=20,
    ) {
        let x = NcPolynomial::word(u);
        let y = NcPolynomial::word(v);
        let ca = TPoly::constant(q(a, b));
        let cc = TPoly::from_coeffs(vec![q(c, 1), q(1, b)]);
        let combo = &x.scale(&ca) + &y.scale(&cc);
        let lhs = state_eval(&combo).unwrap().poly_in_t;
        let rhs = &(&state_eval(&x).unwrap().poly_in_t * &ca) + &(&state_eval(&y).unwrap().poly_in_t * &cc);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn state_is_invariant_under_index_permutations(
        word in word_strategy(6, 4),
        perm in Just(vec![1u32, 2, 3, 4]).prop_shuffle(),
    ) {
        let x = NcPolynomial::word(word);
        let y = x.relabel(|i| perm[i as usize - 1]).unwrap();
        prop_assert_eq!(state_eval(&x).unwrap(), state_eval(&y).unwrap());
    }

    #[test]
    fn commutation_relations_hold_inside_words(
        w in word_strategy(4, 3),
        w2 in word_strategy(4, 3),
        (i, j, k, l) in (1u32..=3, 1u32..=3, 1u32..=3, 1u32..=3),
    ) {
        let ev = StateEvaluator::new(10);
        let e = |a, b| NcPolynomial::generator(a, b).unwrap();
        let mut rel = &(&e(i, j) * &e(k, l)) - &(&e(k, l) * &e(i, j));
        if j == k {
            rel = &rel - &e(i, l);
        }
        if l == i {
            rel = &rel + &e(k, j);
        }
        let x = &(&NcPolynomial::word(w) * &rel) * &NcPolynomial::word(w2);
        prop_assert!(ev.eval(&x).unwrap().poly_in_t.is_zero());
    }
}

#[test]
fn spec_examples() {
    let e = |a, b| NcPolynomial::generator(a, b).unwrap();
    assert_eq!(as_ints(&state_eval(&e(2, 2)).unwrap().poly_in_t), vec![0, 1]);
    assert!(state_eval(&e(2, 3)).unwrap().poly_in_t.is_zero());
    assert_eq!(as_ints(&state_eval(&(&e(1, 1) * &e(1, 1))).unwrap().poly_in_t), vec![0, 1, 1]);
    assert_eq!(as_ints(&state_eval(&(&e(1, 2) * &e(2, 1))).unwrap().poly_in_t), vec![0, 1]);
    assert_eq!(as_ints(&state_eval(&(&e(2, 1) * &e(1, 2))).unwrap().poly_in_t), vec![0, 1]);
    let comm = &(&e(1, 2) * &e(2, 1)) - &(&e(2, 1) * &e(1, 2));
    assert!(state_eval(&comm).unwrap().poly_in_t.is_zero());
}

fn casimir_growth(k: u32, n: usize) -> GrowthBound {
    // |l_i| ≤ |λ| + N and each product factor is at most 2 in absolute value.
    GrowthBound::new((n as f64) * 2f64.powi(n as i32) * (n as f64 + 1.0).powi(k as i32), k)
}

#[test]
fn casimir_states_match_measure_expectations() {
    for k in 1..=3u32 {
        for n in 1..=3usize {
            let idx: Vec<u32> = (1..=n as u32).collect();
            let state = state_eval(&gelfand_invariant(k, &idx).unwrap()).unwrap();
            for t in [q(1, 4), q(1, 2), q(1, 1)] {
                let params = PlancherelParams::new(t.clone(), n, 1e-14).unwrap();
                let growth = casimir_growth(k, n);
                let table = enumerate_support(&params).unwrap();
                for entry in table.entries() {
                    let v = casimir_eigenvalue(k, &entry.signature).to_f64().unwrap();
                    assert!(growth.holds_for(v, entry.signature.size()));
                }
                let m = exact_moment(|lam| casimir_eigenvalue(k, lam), &params, Some(&growth)).unwrap();
                let want = state.at(&t).to_f64().unwrap();
                let diff = (m.to_f64() - want).abs();
                assert!(
                    diff <= 1e-10 + m.tail_bound,
                    "k={k} N={n} t={t}: state {want}, measure {} (tail {:e})",
                    m.to_f64(),
                    m.tail_bound
                );
            }
        }
    }
}

#[test]
fn power_sum_elements_have_the_right_state() {
    // ⟨P_{k,I}⟩ = E p_k under the level-|I| measure
    for k in 1..=3u32 {
        for n in 1..=3usize {
            let idx: Vec<u32> = (1..=n as u32).collect();
            let state = state_eval(&shifted_power_element(k, &idx).unwrap()).unwrap();
            let t = q(1, 2);
            let params = PlancherelParams::new(t.clone(), n, 1e-14).unwrap();
            let growth = GrowthBound::new(4f64.powi(k as i32) * n as f64 * 2f64.powi(n as i32), k);
            let m = exact_moment(
                |lam| plancherel_core::plancherel::shifted_power_sum(k, lam),
                &params,
                Some(&growth),
            )
            .unwrap();
            let want = state.at(&t).to_f64().unwrap();
            assert!((m.to_f64() - want).abs() <= 1e-10 + m.tail_bound, "k={k} N={n}");
        }
    }
}

#[test]
fn nested_products_commute() {
    let ev = StateEvaluator::default();
    let chains = [
        (PowerSumFactor::new(2, vec![1]), PowerSumFactor::new(2, vec![1, 2])),
        (PowerSumFactor::new(1, vec![2]), PowerSumFactor::new(3, vec![1, 2, 3])),
        (PowerSumFactor::new(2, vec![1, 3]), PowerSumFactor::new(2, vec![1, 2, 3])),
    ];
    for (a, b) in chains {
        let ab = ordered_centered_polynomial(&[a.clone(), b.clone()], &ev).unwrap();
        let ba = ordered_centered_polynomial(&[b, a], &ev).unwrap();
        assert_eq!(ab, ba);
    }
}

#[test]
fn variance_of_the_first_power_sum() {
    // L^{-2} Var p_{1,I} = γ|I|/L
    let ev = StateEvaluator::default();
    for n in 1..=3u32 {
        let idx: Vec<u32> = (1..=n).collect();
        let f = PowerSumFactor::new(1, idx);
        let st = ordered_centered_polynomial(&[f.clone(), f], &ev).unwrap();
        let got = st.exact_at(8, &q(3, 4)).unwrap();
        assert_eq!(got, q(3 * n as i64, 32));
    }
}

#[test]
fn cached_and_uncached_evaluators_agree() {
    let idx = [1u32, 2, 3];
    let x = gelfand_invariant(3, &idx).unwrap();
    let fresh = StateEvaluator::default();
    let a = fresh.eval(&x).unwrap();
    let b = fresh.eval(&x).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, state_eval(&x).unwrap());
    assert!(!a.poly_in_t.is_zero());
    assert!(a.poly_in_t.coeff(0).is_zero());
}
