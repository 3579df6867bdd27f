"""Prompt construction for every model-facing stage.

Each template is reproduced exactly, including spacing, and placeholders are
substituted with plain string replacement; str.format would choke on the
LaTeX braces that the templates and the inputs both carry.
"""

from __future__ import annotations

import json

DECOMPOSE_TEMPLATE = """\
# Role
You are an expert mathematician and logic formalizer.

# Input Data
**Problem Statement:** The problem statement in natural language.

# Task
Extract the Conditions (premises/givens) and Conclusions (goals/to-prove) from the mathematical problem statement.

IMPORTANT CONSTRAINTS:
1. Pure Formalization (No Solving): Express conditions and conclusions using concise LaTeX. Do not attempt to solve. Strip all redundant prose (e.g., "i.e.", "that is"). Prefer the shortest mathematically complete formulation.
2. Atomic Conditions: Each condition must contain exactly ONE atomic fact. Split compound statements into separate numbered lines for Lean compatibility.
3. Explicit Free Variables: Every free variable must be explicitly declared with its domain/type as a condition before it is used. If omitted in the text, infer the standard domain.
4. Implicit Structural Types: Expand structural relations into a type declaration plus a property condition. For example, "$A \\subsetneq X$" MUST become two conditions: 1. "$A \\subset X$" and 2. "$A \\subsetneq X$".
5. Quantifier Strictness: 
   - NEVER separate quantifiers from their predicates.
   - If the problem asks to "Find..." (existential) or asserts something for "any/every..." (universal), the entire statement MUST be a single quantified formula in the Conclusion.
   - DO NOT declare bound variables in the Conditions.
6. Empty Conditions: If the problem contains no independent premises, state: "No conditions."

# Output Format
**Conditions:**
1. ...
2. ...

**Conclusion:**
- ...

**Important Note:** The **Conclusion** must be a **single line**. Do NOT split the conclusion into multiple statements. All predicates and quantifiers must be combined into one formula.

---

Now, perform the task for the following Input Data.

**Problem Statement:** {problem_statement}"""

STRUCTURE_TEMPLATE = """\
Please translate the natural language component into Lean4 code, and then parse it into a structured operator tree in JSON format. Use 'formal_content' for the operator logic (with '<SLOT>' as placeholders) and 'children' for the nested arguments.

Component: {text}
Tag: {tag}"""

SUBCOMPONENT_REPAIR_TEMPLATE = """\
# Role
You are an expert in mathematics and Lean 4. You act as a "Micro-Surgeon" for Lean expressions, capable of fixing small fragments of code based purely on type constraints and compiler feedback.

# Input Data
**Broken Code:** A specific Lean 4 expression, term, or function call (a sub-segment of a line) containing errors.
**Error Message:** The raw error message (JSON-formatted) returned by the Lean 4 compiler.
**Previously Declared Variables:** A list of variables available in the local context (names and types).

# Note
Crucially, NO Informal Description is provided. You must infer the intended logic solely from the identifiers used in the `Broken Code`, the types of the available variables, and the specific error message.

# Task
Your goal is to fix the `Broken Code` so that it passes type-checking when pasted back into its original position.
1. Scope Consistency (CRITICAL): The `Broken Code` is a strict substring (an expression). Your output will be programmatically used to strictly replace it.
    - Output ONLY the expression. Do NOT add `def`, `let`, `have`, `theorem`, or assignment symbols (`:=`).
    - Do NOT output the surrounding code. If the input is `MulAction.orbitRel G H`, do not return `(h1 : Fintype (MulAction.orbitRel G H))`.
2. Type-Driven Repair: Since there is no informal text, rely on Mathlib signatures and Type Theory:
    - Argument Order: Check if the function expects arguments in a different order.
    - Explicit/Implicit Arguments: Check if you need to make an argument explicit (using `@`) or if you provided an explicit argument where an implicit one was expected.
    - Coercions: Check if a variable needs a conversion (e.g., `s` to `s.toFinset` or `n` to `↑n`).
    - Identifier Correction: If the error is "unknown identifier", find the correct existing Mathlib function name that closely matches the `Broken Code`.
3. Analyze the Current Error: Examine the `message` and `position` to identify if the issue is a Type Mismatch, Unknown Identifier, or Synthesis Failure.
4. Check Context: Verify if the variables used are consistent with the `Previously Declared Variables` (If any).
5. Apply Minimal Fixes: Correct the code only at the source of the error. Do not add any `import` statements (assume Mathlib is present).
6. Summarize: Write only a single sentence describing why the code failed (useful for classification).

# Output Format
Please present your response in the following structured format and do not include conversational filler.
**Error Reason:** <One-sentence summary, keep it as simple as possible>
**Corrected Code Snippet:** <The fixed expression ONLY.>

---

Now, perform the task for the following Input Data.

**Broken Code:** {broken_code}
**Error Message:** {error_message}
**Previously Declared Variables:** {previously_declared_variables}"""

COMPONENT_REPAIR_TEMPLATE = """\
# Role
You are an expert in mathematics and Lean 4. You act as a "Code Surgeon" capable of fixing precise segments of code without disrupting the surrounding context.

# Input Data
**Informal Component:** The natural language or LaTeX description of the intended mathematics.
**Broken Code:** A snippet of Lean 4 code containing syntax or logical errors. 
**Error Message:** The raw error message (JSON-formatted) returned by the Lean 4 compiler.
**Previously Declared Variables:** A list of variables available in the local context (If any).

# Task
Your goal is to fix the `Broken Code` so that it compiles successfully when pasted back into the original context.
1. **Scope Consistency (CRITICAL):** The `Broken Code` is a strictly defined substring of a larger file. Your output will be programmatically used to strictly replace the `Broken Code` string.
    - Do NOT output the full theorem if the input was only a signature or a hypothesis.
    - Do NOT include surrounding keywords (like `theorem`, `example`, `:=`, or `by`) unless they were strictly part of the `Broken Code` string.
    - If you add context that wasn't in the input, the final concatenated code will fail (e.g., `theorem theorem ...`).
2. Semantic Alignment: Compare the `Broken Code` against the `Informal Component`. Ensure the fix preserves the intended logic for that specific context.
3. Analyze the Current Error: Examine the `message` and `position` in the Error Message to pinpoint the exact failure (e.g., incorrect syntax, type mismatch, unknown identifier).
    - If there is a type mismatch, check the `Informal Component` to decide whether to cast/coerce variables or change the type definition.
4. Check Context: Verify if the variables used are consistent with the `Previously Declared Variables` (If any).
5. Apply Minimal Fixes: Correct the code only at the source of the error. Do not add any `import` statements (assume Mathlib is present).
6. Summarize: Write only a single sentence describing why the code failed (useful for classification).

# Output Format
Please present your response in the following structured format and do not include conversational filler.
**Error Reason:** <One-sentence summary, keep it as simple as possible>
**Corrected Code Snippet:** <The fixed code snippet ONLY.>

---

Now, perform the task for the following Input Data.

**Informal Component:** {informal_component}
**Broken Code:** {broken_code}
**Error Message:** {error_message}
**Previously Declared Variables:** {previously_declared_variables}"""

STATEMENT_REPAIR_TEMPLATE = """\
# Role
You are an expert in mathematics and Lean 4. You act as both a SyntaxDebugger (fixing compilation errors) and a Semantic Auditor (ensuring faithfulness to the math).

# Input Data
**Informal Statement:** The natural language or LaTeX description of the mathematical proposition.
**Broken Statement:** The incorrect Lean 4 statement (theorem signature) containing syntax or logical errors.
**Error Message:** The raw error message (JSON-formatted) returned by the Lean 4 compiler.

# Task
Your goal is to ensure the `Broken Statement` is both syntactically valid and semantically accurate.
1. **Analyze the Error Signal (CRITICAL BRANCHING):**
    **CASE A: `Error Message` is PRESENT:**
        - Focus primarily on fixing the reported syntax or type error (e.g., "unknown identifier", "type mismatch").
        - Ensure the fix results in valid Lean 4 syntax.
    **CASE B: `Error Message` is EMPTY/NULL:**
        - STOP DEBUGGING SYNTAX. The code already compiles.
        - Focus ONLY on Semantic Alignment. Compare the `Broken Statement` strictly against the `Informal Statement`.
        - Does it capture the correct mathematical meaning? Are there missing hypotheses? Is the formula correct?
        - If the statement is semantically correct, output it exactly as is.
        - Only modify the code if there is a clear logical deviation from the `Informal Statement`.
2. Semantic Alignment: Compare the `Broken Statement` against the `Informal Statement`. Ensure the fixed code preserves the intended logic (quantifiers, implications, types) rather than just satisfying the compiler by changing the meaning.
3. Apply Minimal Fixes: Correct the code only at the source of the error. Do not add any `import` statements (assume Mathlib is present).
4. Summarize: Write only a single sentence describing why the code failed (useful for classification).

# Output Format
Please present your response in the following structured format and do not include conversational filler.
**Error Reason:** <One-sentence summary, keep it as simple as possible>
**Corrected Formal Statement:** <The fixed formal statement (theorem signature) only>

---

Now, perform the task for the following Input Data.

**Informal Statement:** {informal_statement}
**Broken Statement:** {broken_statement}
**Error Message:** {error_message}"""

BACKTRANSLATION_TEMPLATE = """\
# Role
You are a world-class expert in formal mathematics and the Lean 4 theorem prover.

# Input Data
**Formal Conditions:** The (implicit/explicit) binders of the theorem in Lean 4.
**Formal Conclusion:** The theorem statement in Lean 4.

# Task
Your goal is to translate the Formal Conditions one-by-one and Formal Conclusion back into natural language individually. Note that
1. Compared to written expressions, give priority to mathematical expressions (LaTeX format).
2. Translate each line as a whole, with each translation on a separate line ( --> format). Do not add extra information or interpret beyond the given content.
3. Always translate the binders one-by-one, even if some of the binders can be merged in natural language. If the binder declares a variable (for example, `a`) to be a type, simply write 'Let a be a type'.
4. If the formal conclusion is a sequence of curried chain, you can start with 'If', and then stating the binders one-by-one in the curried chain, finally give the theorem statement.
5. If the input formal conditions are NULL, simply state the informal conditions as 'No conditions'.

# Output Format
Please present your response in the following structured format:
**Informal Conditions:**
**Informal Conclusion:**

# Example
# Input Data
**Formal Conditions:**
{a b c : ℝ}
(h : a * b * c = 1)
(haux : 1 + a + a * b ≠ 0)

**Formal Conclusion:**
a / (a * b + a + 1) + b / (b * c + b + 1) + c / (c * a + c + 1) = 1

# Expected Output
**Informal Conditions:**
{a b c : ℝ} --> $a$, $b$, and $c$ are real numbers
(h : a * b * c = 1) --> The product of $a$, $b$, and $c$ is equal to 1
(haux : 1 + a + a * b ≠ 0) --> The value $1 + a + ab$ is not equal to 0

**Informal Conclusion:**
a / (a * b + a + 1) + b / (b * c + b + 1) + c / (c * a + c + 1) = 1 --> The sum of the fractions $\\frac{a}{ab + a + 1} + \\frac{b}{bc + b + 1} + \\frac{c}{ca + c + 1}$ is equal to 1

---

Now, perform the task for the following Input Data.

**Formal Conditions:**
{formal_conditions}

**Formal Conclusion:**
{formal_conclusion}"""

DIRECT_TRANSLATION_TEMPLATE = """\
You are an expert in mathematics and Lean 4.

Please autoformalize the following problem in Lean 4 with a header. Use the following theorem names: my_favorite_theorem.
{informal_statement}

Your code should start with 
```Lean4
import Mathlib
```

You should only output the theorem statement in Lean 4 format, ending with `by sorry`. You should NOT output the proof."""


def _fill(template: str, values: dict[str, str]) -> str:
    out = template
    for key, value in values.items():
        out = out.replace("{" + key + "}", value)
    return out


def build_decompose_prompt(nl_statement: str) -> str:
    """Prompt that splits a statement into conditions and one conclusion."""
    return _fill(DECOMPOSE_TEMPLATE, {"problem_statement": nl_statement})


def build_structure_prompt(text: str, tag: str) -> str:
    """Prompt that asks for a Lean fragment plus its operator tree."""
    return _fill(STRUCTURE_TEMPLATE, {"text": text, "tag": tag})


def serialize_error(severity: str, line: int, column: int, message: str) -> str:
    return json.dumps(
        {"severity": severity, "line": line, "column": column, "message": message},
        ensure_ascii=False,
    )


NO_ERROR = "NULL"


def build_subcomponent_repair_prompt(
    broken_code: str, error_message: str, declared_variables: str
) -> str:
    return _fill(
        SUBCOMPONENT_REPAIR_TEMPLATE,
        {
            "broken_code": broken_code,
            "error_message": error_message,
            "previously_declared_variables": declared_variables,
        },
    )


def build_component_repair_prompt(
    informal_component: str, broken_code: str, error_message: str, declared_variables: str
) -> str:
    return _fill(
        COMPONENT_REPAIR_TEMPLATE,
        {
            "informal_component": informal_component,
            "broken_code": broken_code,
            "error_message": error_message,
            "previously_declared_variables": declared_variables,
        },
    )


def build_statement_repair_prompt(
    informal_statement: str, broken_statement: str, error_message: str | None
) -> str:
    """Statement-level prompt; a missing error message triggers the semantic-audit branch."""
    return _fill(
        STATEMENT_REPAIR_TEMPLATE,
        {
            "informal_statement": informal_statement,
            "broken_statement": broken_statement,
            "error_message": error_message if error_message is not None else NO_ERROR,
        },
    )


def build_backtranslation_prompt(formal_conditions: list[str], formal_conclusion: str) -> str:
    conditions = "\n".join(formal_conditions) if formal_conditions else "NULL"
    return _fill(
        BACKTRANSLATION_TEMPLATE,
        {"formal_conditions": conditions, "formal_conclusion": formal_conclusion},
    )


def build_direct_translation_prompt(informal_statement: str) -> str:
    """One-shot whole-statement translation prompt (no decomposition)."""
    return _fill(DIRECT_TRANSLATION_TEMPLATE, {"informal_statement": informal_statement})
