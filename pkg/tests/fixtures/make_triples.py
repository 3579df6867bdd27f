"""Generator for the bundled triple corpus (triples.jsonl).

Each entry pairs a hand-written Lean fragment with a hand-built operator
tree; the script refuses to write anything unless every tree assembles to
its fragment byte-for-byte, so the JSONL stays double-checked. Run from the
repository root:

    python3 tests/fixtures/make_triples.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from dsr.opt_tree import OptNode, assemble, node_to_payload


def n(content: str, *children) -> OptNode:
    return OptNode(content, tuple(n(c) if isinstance(c, str) else c for c in children))


# (nl, expected fl, tree)
TRIPLES: list[tuple[str, str, OptNode]] = [
    # -- fragments from the two bundled repair trajectories ------------------
    (
        "$m, n \\in \\mathbb{N}$",
        "(m n : ℕ)",
        n("(<SLOT> : ℕ)", "m n"),
    ),
    (
        "$m$ and $n$ are relatively prime",
        "(h3 : Nat.Coprime m n)",
        n("(h3 : Nat.Coprime <SLOT>)", "m n"),
    ),
    (
        "$\\frac{m}{n} = \\prod_{k=4}^{63} \\frac{\\log_k (5^{k^2-1})}{\\log_{k+1} (5^{k^2-4})}$ "
        "(raw draft with an unqualified logb and an untyped lower bound)",
        "m / n = ∏ k ∈ Finset.Icc 4 63, logb k (5^(k^2 - 1)) / Real.logb (k + 1) (5^(k^2 - 4))",
        n(
            "<SLOT> = <SLOT>",
            "m / n",
            n(
                "∏ k <SLOT>, <SLOT>",
                n("∈ Finset.Icc <SLOT> 63", "4"),
                n(
                    "<SLOT> / <SLOT>",
                    n("<SLOT> k (<SLOT>)", "logb", "5^(k^2 - 1)"),
                    "Real.logb (k + 1) (5^(k^2 - 4))",
                ),
            ),
        ),
    ),
    (
        "$\\frac{m}{n} = \\prod_{k=4}^{63} \\frac{\\log_k (5^{k^2-1})}{\\log_{k+1} (5^{k^2-4})}$ "
        "(repaired draft)",
        "m / n = ∏ k ∈ Finset.Icc (4:ℕ) 63, Real.logb k (5^(k^2 - 1)) / Real.logb (k + 1) (5^(k^2 - 4))",
        n(
            "<SLOT> = <SLOT>",
            "m / n",
            n(
                "∏ k <SLOT>, <SLOT>",
                "∈ Finset.Icc (4:ℕ) 63",
                n(
                    "<SLOT> / <SLOT>",
                    "Real.logb k (5^(k^2 - 1))",
                    "Real.logb (k + 1) (5^(k^2 - 4))",
                ),
            ),
        ),
    ),
    (
        "$m + n = 106$",
        "m + n = 106",
        n("<SLOT> = 106", "m + n"),
    ),
    (
        "$\\forall z \\in \\mathbb{C},\\ (|z| = 1 \\land z \\neq 1) \\implies "
        "\\sum_{n=1}^{\\infty} \\frac{z^n}{n}$ converges (raw draft with unqualified abs)",
        "∀ z : ℂ, (abs z = 1 ∧ z ≠ 1) → Summable fun n : ℕ => z^n / n",
        n(
            "∀ z : ℂ, <SLOT> → <SLOT>",
            n("(<SLOT> ∧ <SLOT>)", "abs z = 1", "z ≠ 1"),
            n("Summable fun n : ℕ => <SLOT>", "z^n / n"),
        ),
    ),
    (
        "$\\forall z \\in \\mathbb{C},\\ (|z| = 1 \\land z \\neq 1) \\implies "
        "\\sum_{n=1}^{\\infty} \\frac{z^{n+1}}{n+1}$ converges (repaired draft)",
        "∀ z : ℂ, (Complex.abs z = 1 ∧ z ≠ 1) → Summable fun n : ℕ => z^(n + 1) / (n + 1)",
        n(
            "∀ z : ℂ, <SLOT> → <SLOT>",
            "(Complex.abs z = 1 ∧ z ≠ 1)",
            n("Summable fun n : ℕ => <SLOT>", "z^(n + 1) / (n + 1)"),
        ),
    ),
    # -- binder fragments -----------------------------------------------------
    ("$u$, $v$, $a$ are natural numbers", "(u v a : ℕ)", n("(<SLOT> : ℕ)", "u v a")),
    (
        "$u$ and $v$ are coprime",
        "(h1 : Nat.Coprime u v)",
        n("(h1 : <SLOT>)", n("Nat.Coprime <SLOT>", "u v")),
    ),
    (
        "$uv$ is a perfect square $a^2$",
        "(h2 : u * v = a^2)",
        n("(h2 : <SLOT>)", n("<SLOT> = <SLOT>", "u * v", "a^2")),
    ),
    ("$G$ is a group", "[Group G]", n("[Group <SLOT>]", "G")),
    ("$g, h \\in G$", "(g h : G)", n("(<SLOT> : G)", "g h")),
    ("Let $G$ be a type", "{G : Type*}", n("{<SLOT> : Type*}", "G")),
    (
        "$f$ maps reals to reals",
        "(f : ℝ → ℝ)",
        n("(f : <SLOT>)", n("<SLOT> → <SLOT>", "ℝ", "ℝ")),
    ),
    ("$f$ is continuous", "(hf : Continuous f)", n("(hf : Continuous <SLOT>)", "f")),
    (
        "$V$ is a complex inner-product space",
        "[NormedAddCommGroup V] [InnerProductSpace ℂ V]",
        n("[NormedAddCommGroup <SLOT>] [InnerProductSpace ℂ <SLOT>]", "V", "V"),
    ),
    (
        "$T$ is a linear operator on $V$",
        "(T : Module.End ℂ V)",
        n("(T : Module.End ℂ <SLOT>)", "V"),
    ),
    ("$a$, $b$, $c$ are real numbers", "{a b c : ℝ}", n("{<SLOT> : ℝ}", "a b c")),
    (
        "the product of $a$, $b$, and $c$ is 1",
        "(h : a * b * c = 1)",
        n("(h : <SLOT> = 1)", n("<SLOT> * c", n("<SLOT> * <SLOT>", "a", "b"))),
    ),
    (
        "$1 + a + ab$ is nonzero",
        "(haux : 1 + a + a * b ≠ 0)",
        n("(haux : <SLOT> ≠ 0)", n("<SLOT> + <SLOT>", "1 + a", "a * b")),
    ),
    (
        "$n$ is a natural number at least 2",
        "(n : ℕ) (hn : 2 ≤ n)",
        n("(<SLOT> : ℕ) (hn : <SLOT>)", "n", n("2 ≤ <SLOT>", "n")),
    ),
    ("$p$ is prime", "(p : ℕ) (hp : p.Prime)", n("(<SLOT> : ℕ) (hp : <SLOT>.Prime)", "p", "p")),
    ("$s$ is a finite set of naturals", "(s : Finset ℕ)", n("(s : Finset <SLOT>)", "ℕ")),
    (
        "$x$ is a positive real",
        "(x : ℝ) (hx : 0 < x)",
        n("(x : ℝ) (hx : <SLOT>)", n("0 < <SLOT>", "x")),
    ),
    ("$\\alpha$ is a finite type", "[Fintype α]", n("[Fintype <SLOT>]", "α")),
    (
        "$\\varepsilon$ is a positive real",
        "(ε : ℝ) (hε : 0 < ε)",
        n("(ε : ℝ) (hε : 0 < <SLOT>)", "ε"),
    ),
    (
        "$A$ is a subset of the reals",
        "(A : Set ℝ)",
        n("(A : Set <SLOT>)", "ℝ"),
    ),
    (
        "$m$ divides $n$",
        "(hmn : m ∣ n)",
        n("(hmn : <SLOT> ∣ <SLOT>)", "m", "n"),
    ),
    (
        "the sequence $u$ is bounded",
        "(hu : ∃ C, ∀ i, |u i| ≤ C)",
        n("(hu : ∃ C, ∀ i, <SLOT> ≤ C)", n("|<SLOT>|", "u i")),
    ),
    # -- propositions and goals ----------------------------------------------
    (
        "both $u$ and $v$ are perfect squares",
        "∃ u1 v1 : ℕ, u = u1^2 ∧ v = v1^2",
        n(
            "∃ u1 v1 : ℕ, <SLOT> ∧ <SLOT>",
            n("u = <SLOT>", "u1^2"),
            n("v = <SLOT>", "v1^2"),
        ),
    ),
    ("the order of $g$ is $m$", "orderOf g = m", n("<SLOT> = m", n("orderOf <SLOT>", "g"))),
    (
        "the order of $g^n h^m$ equals $[m,n]/(m,n)$",
        "orderOf (g ^ n * h ^ m) = Nat.lcm m n / Nat.gcd m n",
        n(
            "<SLOT> = <SLOT>",
            n("orderOf (<SLOT>)", n("<SLOT> * <SLOT>", "g ^ n", "h ^ m")),
            n("<SLOT> / <SLOT>", "Nat.lcm m n", "Nat.gcd m n"),
        ),
    ),
    ("$g$ and $h$ commute", "g * h = h * g", n("<SLOT> = <SLOT>", "g * h", "h * g")),
    (
        "the cyclic fraction sum equals 1",
        "a / (a * b + a + 1) + b / (b * c + b + 1) + c / (c * a + c + 1) = 1",
        n(
            "<SLOT> + <SLOT> + <SLOT> = 1",
            n("a / (<SLOT>)", "a * b + a + 1"),
            n("b / (<SLOT>)", "b * c + b + 1"),
            n("c / (<SLOT>)", "c * a + c + 1"),
        ),
    ),
    (
        "$T$ is self-adjoint",
        "T = LinearMap.adjoint T",
        n("T = <SLOT>", n("LinearMap.adjoint <SLOT>", "T")),
    ),
    (
        "the eigenvalue is real",
        "eigenvalue ∈ Set.range (algebraMap ℝ ℂ)",
        n("eigenvalue ∈ <SLOT>", n("Set.range (<SLOT>)", n("algebraMap <SLOT> <SLOT>", "ℝ", "ℂ"))),
    ),
    (
        "$f$ is continuous at $x$",
        "∀ ε > 0, ∃ δ > 0, ∀ y, |y - x| < δ → |f y - f x| < ε",
        n(
            "∀ ε > 0, ∃ δ > 0, ∀ y, <SLOT> → <SLOT>",
            n("<SLOT> < δ", n("|<SLOT>|", "y - x")),
            n("<SLOT> < ε", n("|<SLOT>|", "f y - f x")),
        ),
    ),
    (
        "the series $\\sum 1/(n+1)^2$ converges",
        "Summable fun n : ℕ => 1 / (n + 1)^2",
        n("Summable fun n : ℕ => <SLOT>", n("1 / <SLOT>", "(n + 1)^2")),
    ),
    (
        "the sum of the first $n$ odd numbers is $n^2$",
        "∑ i ∈ Finset.range n, (2 * i + 1) = n^2",
        n(
            "∑ i ∈ <SLOT>, <SLOT> = <SLOT>",
            n("Finset.range <SLOT>", "n"),
            n("(<SLOT> + 1)", "2 * i"),
            "n^2",
        ),
    ),
    ("$\\log_2 8 = 3$", "Real.logb 2 8 = 3", n("<SLOT> = 3", n("Real.logb <SLOT> <SLOT>", "2", "8"))),
    (
        "the derivative of $x^2$ at 1 is 2",
        "deriv (fun x => x^2) 1 = 2",
        n("deriv (<SLOT>) 1 = <SLOT>", n("fun x => <SLOT>", "x^2"), "2"),
    ),
    (
        "$1/n \\to 0$",
        "Filter.Tendsto (fun n : ℕ => (1 : ℝ) / (n + 1)) Filter.atTop (nhds 0)",
        n(
            "Filter.Tendsto (<SLOT>) Filter.atTop (<SLOT>)",
            n("fun n : ℕ => <SLOT>", n("(1 : ℝ) / <SLOT>", "(n + 1)")),
            n("nhds <SLOT>", "0"),
        ),
    ),
    (
        "the unit interval is compact",
        "IsCompact (Set.Icc (0 : ℝ) 1)",
        n("IsCompact (<SLOT>)", n("Set.Icc <SLOT> <SLOT>", "(0 : ℝ)", "1")),
    ),
    (
        "$x^2 - 2x + 1$ factors as $(x-1)^2$",
        "x ^ 2 - 2 * x + 1 = (x - 1) ^ 2",
        n("<SLOT> = <SLOT>", n("<SLOT> - <SLOT> + 1", "x ^ 2", "2 * x"), n("(<SLOT>) ^ 2", "x - 1")),
    ),
    ("$\\gcd(12, 18) = 6$", "Nat.gcd 12 18 = 6", n("Nat.gcd <SLOT> <SLOT> = 6", "12", "18")),
    ("2 divides 4", "(2 : ℤ) ∣ 4", n("<SLOT> ∣ <SLOT>", "(2 : ℤ)", "4")),
    (
        "$z$ lies on the unit circle and is not 1",
        "(Complex.abs z = 1 ∧ z ≠ 1)",
        n("(<SLOT> ∧ <SLOT>)", n("Complex.abs <SLOT> = 1", "z"), "z ≠ 1"),
    ),
    ("squares are nonnegative", "∀ x : ℝ, 0 ≤ x^2", n("∀ x : ℝ, 0 ≤ <SLOT>", "x^2")),
    ("$a^2 \\ge 0$", "a^2 ≥ 0", n("<SLOT> ≥ <SLOT>", "a^2", "0")),
    ("$1 + 1 = 2$", "1 + 1 = 2", n("<SLOT> + <SLOT> = 2", "1", "1")),
    ("adding zero changes nothing", "n + 0 = n", n("<SLOT> + 0 = <SLOT>", "n", "n")),
    ("the absolute value is positive", "|x| > 0", n("<SLOT> > 0", n("|<SLOT>|", "x"))),
    (
        "images distribute over unions",
        "f '' (s ∪ t) = f '' s ∪ f '' t",
        n(
            "f '' (<SLOT>) = <SLOT>",
            n("<SLOT> ∪ <SLOT>", "s", "t"),
            n("<SLOT> ∪ <SLOT>", "f '' s", "f '' t"),
        ),
    ),
    (
        "$x \\mapsto 2x + 1$ is injective",
        "Function.Injective fun x : ℝ => 2 * x + 1",
        n("Function.Injective fun x : ℝ => <SLOT>", n("<SLOT> + 1", "2 * x")),
    ),
    (
        "$\\int_0^1 x^2\\,dx = 1/3$",
        "∫ x in (0:ℝ)..1, x^2 = 1/3",
        n("∫ x in <SLOT>..1, <SLOT> = <SLOT>", "(0:ℝ)", "x^2", "1/3"),
    ),
    (
        "the identity matrix has determinant 1",
        "Matrix.det (1 : Matrix (Fin 2) (Fin 2) ℝ) = 1",
        n("Matrix.det (<SLOT>) = 1", n("1 : Matrix <SLOT> <SLOT> ℝ", "(Fin 2)", "(Fin 2)")),
    ),
    ("the floor of 3.7 is 3", "⌊(3.7 : ℝ)⌋ = 3", n("⌊<SLOT>⌋ = <SLOT>", "(3.7 : ℝ)", "3")),
    (
        "$X^2 + 1$ has degree 2 over $\\mathbb{Q}$",
        "Polynomial.degree (Polynomial.X ^ 2 + 1 : Polynomial ℚ) = 2",
        n(
            "Polynomial.degree (<SLOT> : Polynomial ℚ) = 2",
            n("<SLOT> + 1", n("Polynomial.X ^ <SLOT>", "2")),
        ),
    ),
    (
        "complex absolute values are nonnegative",
        "∀ z : ℂ, Complex.abs z ≥ 0",
        n("∀ z : ℂ, <SLOT> ≥ 0", n("Complex.abs <SLOT>", "z")),
    ),
]


def main() -> int:
    out_path = Path(__file__).parent / "triples.jsonl"
    lines = []
    for nl, fl, tree in TRIPLES:
        assembled, _ = assemble(tree)
        if assembled != fl:
            print(f"MISMATCH for {nl!r}:\n  expected: {fl}\n  assembled: {assembled}")
            return 1
        lines.append(json.dumps({"nl": nl, "fl": fl, "opt": node_to_payload(tree)}, ensure_ascii=False))
    out_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(lines)} triples to {out_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
