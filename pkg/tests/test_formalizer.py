"""Formalizer output parsing, the structure-first rule, and the tree failsafe."""

import pytest

from dsr.clients import ScriptedLlmClient
from dsr.decomposer import LogicalComponent, Role
from dsr.errors import NoCodeBlock
from dsr.formalizer import FormalizedComponent, formalize_component, parse_formalizer_output
from dsr.opt_tree import assemble, leaf, serialize_opt, OptNode
from dsr.prompts import build_structure_prompt


def condition(text="$a$ is a real number"):
    return LogicalComponent(text, Role.CONDITION, 1)


def lean_json_response(code, opt_json):
    return f"Here you go.\n```lean\n{code}\n```\n\n```json\n{opt_json}\n```\n"


def test_structure_prompt_shape():
    prompt = build_structure_prompt("a : ℝ", "Condition")
    assert prompt.endswith("Tag: Condition")
    assert "Component: a : ℝ" in prompt
    assert "'<SLOT>' as placeholders" in prompt
    assert "parse it into a structured operator tree" in prompt


def test_parse_extracts_both_blocks():
    code, opt_json = parse_formalizer_output(lean_json_response("(a : ℝ)", '{"formal_content":"(a : ℝ)"}'))
    assert code == "(a : ℝ)"
    assert opt_json == '{"formal_content":"(a : ℝ)"}'


def test_parse_code_only():
    code, opt_json = parse_formalizer_output("```lean\n(a : ℝ)\n```")
    assert code == "(a : ℝ)" and opt_json is None


def test_parse_untagged_fence_counts_as_code():
    code, opt_json = parse_formalizer_output("```\nx = 1\n```")
    assert code == "x = 1" and opt_json is None


def test_parse_json_only_is_no_code_block():
    with pytest.raises(NoCodeBlock):
        parse_formalizer_output('```json\n{"formal_content":"x"}\n```')


def test_parse_no_fences_is_no_code_block():
    with pytest.raises(NoCodeBlock):
        parse_formalizer_output("no fences here")


def test_formalize_keeps_valid_tree():
    tree = OptNode("<SLOT> + <SLOT> = 2", (leaf("1"), leaf("1")))
    llm = ScriptedLlmClient(
        lambda request: lean_json_response("1 + 1 = 2", serialize_opt(tree))
    )
    result = formalize_component(llm, condition())
    assert result.used_fallback is False
    assert result.opt == tree
    assert result.fl_code == "1 + 1 = 2"
    assert llm.requests[0].purpose_tag.value == "formalize"


def test_formalize_discards_arity_broken_tree():
    broken = '{"formal_content": "<SLOT> + <SLOT>", "children": [{"formal_content": "a"}]}'
    llm = ScriptedLlmClient(lambda request: lean_json_response("a + b", broken))
    result = formalize_component(llm, condition())
    assert result.used_fallback is True
    assert result.opt is None
    assert result.fl_code == "a + b"


def test_formalize_discards_malformed_json_tree():
    llm = ScriptedLlmClient(lambda request: lean_json_response("a + b", "{broken json"))
    result = formalize_component(llm, condition())
    assert result.used_fallback is True and result.fl_code == "a + b"


def test_formalize_tree_assembly_overrides_linear_code():
    tree = OptNode("(<SLOT> : ℝ)", (leaf("a"),))
    llm = ScriptedLlmClient(
        lambda request: lean_json_response("something else entirely", serialize_opt(tree))
    )
    result = formalize_component(llm, condition())
    assert result.fl_code == assemble(tree)[0] == "(a : ℝ)"


def test_formalize_missing_code_block_propagates():
    llm = ScriptedLlmClient(lambda request: "chatter without fences")
    with pytest.raises(NoCodeBlock):
        formalize_component(llm, condition())


def test_formalized_component_invariant():
    with pytest.raises(ValueError):
        FormalizedComponent(nl=condition(), fl_code="x", opt=None, used_fallback=False)
    with pytest.raises(ValueError):
        FormalizedComponent(nl=condition(), fl_code="x", opt=leaf("x"), used_fallback=True)
