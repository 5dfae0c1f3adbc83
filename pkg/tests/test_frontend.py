import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyclone.errors import (
    AdapterUnavailable,
    EmptyAfterFiltering,
    EmptyExtensionList,
    LexFailure,
    MalformedConfig,
    MissingField,
)
from polyclone.frontend import (
    PACKAGE_LANGUAGE_DIR,
    ErrorKind,
    Token,
    TokenCategory,
    degraded_outcome,
    file_level_bag,
    flatten_leaves,
    load_language_config,
    parse_file,
    preprocess,
    read_source,
)
from polyclone.frontend.config import LanguageConfig
from polyclone.frontend.tokens import ParseOutcome


# ---------------------------------------------------------------------------
# Language config loading
# ---------------------------------------------------------------------------


def write_cfg(tmp_path, **overrides):
    raw = {
        "languageId": "java",
        "grammarRef": "java.peg",
        "keywords": ["if", "while"],
        "fileExtensions": [".java"],
        "commentStripping": {
            "lineComment": ["//"],
            "blockComment": [{"open": "/*", "close": "*/"}],
            "stringDelimiters": ["\""],
        },
    }
    raw.update(overrides)
    for key in [k for k, v in overrides.items() if v is None]:
        del raw[key]
    path = tmp_path / "lang.json"
    path.write_text(json.dumps(raw))
    return path


def test_shipped_java_config_round_trip(java_cfg):
    assert java_cfg.language_id == "java"
    assert len(java_cfg.keywords) == 50
    assert java_cfg.file_extensions == (".java",)


def test_missing_file_extensions_field(tmp_path):
    with pytest.raises(MissingField):
        load_language_config(write_cfg(tmp_path, fileExtensions=None))


def test_empty_extension_list(tmp_path):
    with pytest.raises(EmptyExtensionList):
        load_language_config(write_cfg(tmp_path, fileExtensions=[]))


def test_duplicate_keywords_get_set_semantics(tmp_path):
    cfg = load_language_config(write_cfg(tmp_path, keywords=["if", "if", "while"]))
    assert cfg.keywords == frozenset({"if", "while"})


def test_unknown_key_rejected(tmp_path):
    path = write_cfg(tmp_path)
    raw = json.loads(path.read_text())
    raw["surprise"] = 1
    path.write_text(json.dumps(raw))
    with pytest.raises(MalformedConfig):
        load_language_config(path)


def test_malformed_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(MalformedConfig):
        load_language_config(path)


def test_keyword_file_alternative(tmp_path):
    (tmp_path / "kw.txt").write_text("if\nwhile\n\nfor\n")
    cfg = load_language_config(write_cfg(tmp_path, keywords="kw.txt"))
    assert cfg.keywords == frozenset({"if", "while", "for"})


# ---------------------------------------------------------------------------
# Preprocessing
# ---------------------------------------------------------------------------


def test_preprocess_line_comment_and_blank_collapse(java_cfg):
    assert preprocess("int a; // note\n\n\n\nint b;", java_cfg) == "int a;\n\nint b;"


def test_preprocess_protected_string(java_cfg):
    src = 's = "// not a comment";'
    assert preprocess(src, java_cfg) == src


def test_preprocess_block_comment(java_cfg):
    assert preprocess("/* a */ x = 1;", java_cfg) == " x = 1;"


def test_preprocess_multiline_block_comment(java_cfg):
    src = "x = 1; /* c\nc2\nc3 */ y = 2;"
    assert preprocess(src, java_cfg) == "x = 1;\n y = 2;"


def test_preprocess_comment_only_lines_vanish(java_cfg):
    assert preprocess("a();\n// one\n// two\nb();", java_cfg) == "a();\nb();"


def test_preprocess_unterminated_block_comment_reported(java_cfg):
    warnings: list[str] = []
    out = preprocess("x = 1;\n/* open\nmore", java_cfg, warnings)
    assert out == "x = 1;"
    assert len(warnings) == 1 and "unterminated" in warnings[0]


def test_preprocess_python_hash_inside_string(python_cfg):
    src = 'x = "#nope"  # real comment'
    assert preprocess(src, python_cfg) == 'x = "#nope"'


def test_preprocess_triple_quote_protects_lines(python_cfg):
    src = 's = """a\n\n\n\n# not comment\nb"""\ny = 1'
    assert preprocess(src, python_cfg) == src


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="abc/*\"'\n #;=", max_size=60))
def test_preprocess_idempotent_java(s):
    cfg = load_language_config(PACKAGE_LANGUAGE_DIR / "java.json")
    once = preprocess(s, cfg)
    assert preprocess(once, cfg) == once


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="xy#'\"\n \t:()", max_size=60))
def test_preprocess_idempotent_python(s):
    cfg = load_language_config(PACKAGE_LANGUAGE_DIR / "python.json")
    once = preprocess(s, cfg)
    assert preprocess(once, cfg) == once


# ---------------------------------------------------------------------------
# read_source
# ---------------------------------------------------------------------------


def test_read_source_strips_bom(tmp_path):
    path = tmp_path / "a.java"
    path.write_bytes("\ufeffclass A {}".encode("utf-8"))
    assert read_source(path) == "class A {}"


def test_read_source_rejects_binary(tmp_path):
    path = tmp_path / "bin.java"
    path.write_bytes(b"\x00\x01\x02MZ")
    with pytest.raises(LexFailure):
        read_source(path)


def test_read_source_rejects_bad_utf8(tmp_path):
    path = tmp_path / "bad.java"
    path.write_bytes(b"\xff\xfe\xfaabc")
    with pytest.raises(LexFailure):
        read_source(path)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

VALID_JAVA = """public class A {
    public int f(int x) {
        int y = x + 1;
        while (y > 0) {
            y = y - 2;
        }
        return y;
    }
}
"""


def test_parse_valid_file_no_errors(java_cfg):
    out = parse_file(preprocess(VALID_JAVA, java_cfg), java_cfg)
    assert not out.degraded
    assert out.error_report == []


def test_parse_recovers_from_missing_semicolon(java_cfg):
    # One field declaration missing its ';' — recoverable, tree still present.
    src = "public class A {\n    int a = 1\n}\n"
    out = parse_file(preprocess(src, java_cfg), java_cfg)
    assert not out.degraded
    assert out.tree is not None
    syntactic = [e for e in out.error_report if e.kind is ErrorKind.SYNTACTIC]
    assert len(syntactic) == 1
    assert syntactic[0].recovered


def test_parse_garbage_is_degraded_java(java_cfg):
    out = parse_file("}}}} ));; xyz", java_cfg)
    assert out.degraded
    assert out.tree is None
    assert out.tokens, "lexing must not require a successful parse"
    assert any(not e.recovered for e in out.error_report)


def test_leaf_flatten_invariant(java_cfg, python_cfg):
    samples = [
        (java_cfg, VALID_JAVA),
        (java_cfg, "public class B { int x; void g() { for (int i=0;i<3;i++) x += i; } }"),
        (python_cfg, "def f(x):\n    y = x + 1\n    return y\n"),
        (python_cfg, "class C:\n    def m(self):\n        if self.x:\n            return 1\n        return 2\n"),
    ]
    for cfg, src in samples:
        out = parse_file(preprocess(src, cfg), cfg)
        assert not out.degraded
        leaves = flatten_leaves(out.tree)
        assert [(l.start, l.end) for l in leaves] == [(i, i + 1) for i in range(len(out.tokens))]


def test_keyword_categorization_is_membership(java_cfg):
    out = parse_file(preprocess(VALID_JAVA, java_cfg), java_cfg)
    for token in out.tokens:
        assert (token.category is TokenCategory.KEYWORD) == (token.text in java_cfg.keywords)


def test_python_structure_rules(python_cfg):
    src = "def f(a):\n    while a > 0:\n        a -= 1\n    return a\n"
    out = parse_file(preprocess(src, python_cfg), python_cfg)
    rules = {n.rule for n in out.tree.walk() if not n.is_leaf}
    assert "funcdef" in rules and "while_stmt" in rules


def test_adapter_unavailable_for_unknown_grammar(java_cfg):
    cfg = LanguageConfig(
        language_id="mystery",
        grammar_ref="mystery.peg",
        keywords=frozenset(),
        file_extensions=(".mx",),
        comment_stripping=java_cfg.comment_stripping,
    )
    with pytest.raises(AdapterUnavailable):
        parse_file("anything", cfg)


def test_degraded_outcome_lexes_any_extension(java_cfg):
    out = degraded_outcome('hello "world" 42 ???', java_cfg)
    assert out.degraded
    assert [t.text for t in out.tokens] == ["hello", '"world"', "42", "?", "?", "?"]
    cats = [t.category for t in out.tokens]
    assert cats[0] is TokenCategory.IDENTIFIER
    assert cats[1] is TokenCategory.LITERAL
    assert cats[2] is TokenCategory.LITERAL


def test_error_positions_are_one_based(java_cfg):
    src = "public class A {\n    int a = 1\n}\n"
    out = parse_file(src, java_cfg)
    err = [e for e in out.error_report if e.kind is ErrorKind.SYNTACTIC][0]
    assert err.line == 2 and err.col >= 1


# ---------------------------------------------------------------------------
# File-level bag
# ---------------------------------------------------------------------------


def _outcome(tokens):
    return ParseOutcome(tokens=tokens, tree=None)


def test_file_level_bag_filters_other(java_cfg):
    tokens = [
        Token(TokenCategory.KEYWORD, "if", 1, 1),
        Token(TokenCategory.IDENTIFIER, "x", 1, 4),
        Token(TokenCategory.OTHER, ">", 1, 6),
        Token(TokenCategory.LITERAL, "0", 1, 8),
    ]
    bag = file_level_bag(_outcome(tokens), "f.java")
    assert bag.counts == {"if": 1, "x": 1, "0": 1}
    assert bag.size == 3
    assert bag.segment.granularity == 0


def test_file_level_bag_empty_after_filtering():
    tokens = [Token(TokenCategory.OTHER, ";", 1, 1), Token(TokenCategory.OTHER, "{", 1, 2)]
    with pytest.raises(EmptyAfterFiltering):
        file_level_bag(_outcome(tokens), "f.java")


def test_file_level_bag_multiset():
    tokens = [
        Token(TokenCategory.IDENTIFIER, "x", 1, 1),
        Token(TokenCategory.IDENTIFIER, "x", 1, 3),
        Token(TokenCategory.IDENTIFIER, "y", 2, 1),
    ]
    bag = file_level_bag(_outcome(tokens), "f.java")
    assert bag.counts == {"x": 2, "y": 1}
