from openrel.textutil import word_token_spans, word_tokens


def test_basic_split():
    assert word_tokens("France is a country") == ["France", "is", "a", "country"]


def test_edge_punctuation_stripped():
    assert word_tokens("Hello, world!") == ["Hello", "world"]
    assert word_tokens('"quoted" (parenthesized).') == ["quoted", "parenthesized"]


def test_interior_punctuation_kept():
    assert word_tokens("rock'n'roll co-op 3.14") == ["rock'n'roll", "co-op", "3.14"]


def test_punctuation_only_tokens_dropped():
    assert word_tokens("yes -- no ... !!") == ["yes", "no"]


def test_unicode_quotes_and_dashes_stripped():
    assert word_tokens("“Romeries” – a commune…") == ["Romeries", "a", "commune"]


def test_empty_and_whitespace():
    assert word_tokens("") == []
    assert word_tokens("   \t\n ") == []


def test_spans_index_original_text():
    text = "A small, walled town."
    spans = word_token_spans(text)
    assert [form for form, _, _ in spans] == ["A", "small", "walled", "town"]
    for form, start, end in spans:
        assert text[start:end] == form


def test_twenty_token_sentence():
    text = (
        "Walton East is a small rural village and parish established around "
        "a church at least as early as Norman times."
    )
    tokens = word_tokens(text)
    assert len(tokens) == 20
    assert tokens[0] == "Walton"
    assert tokens[-1] == "times"
