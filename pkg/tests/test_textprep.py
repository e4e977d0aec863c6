import string

from hypothesis import given, strategies as st

from misinfo_triage.textprep import PrepOptions, TokenizedText, ngrams, tokenize


def test_hand_traced_example():
    t = tokenize("Get your #Pfizer shot! https://t.co/x")
    assert t.tokens == ("get", "your", "#pfizer", "shot")
    assert t.exclamations == 1
    assert t.hashtags == ("#pfizer",)


def test_empty_input():
    assert tokenize("").tokens == ()


def test_mention_removed_and_caps_recorded():
    t = tokenize("@user HELLO")
    assert t.tokens == ("hello",)
    assert t.caps == frozenset({0})


def test_url_and_mention_options():
    t = tokenize("@user see www.example.com/x now", PrepOptions(url_strip=False, mention_strip=False))
    assert "user" in t.tokens  # '@' stripped as punctuation once mention_strip is off
    assert any("example" in tok for tok in t.tokens)


def test_keep_hashtags_off():
    t = tokenize("#Pfizer rocks", PrepOptions(keep_hashtags=False))
    assert t.tokens == ("pfizer", "rocks")


def test_intra_word_apostrophe_kept():
    t = tokenize("Don't PANIC!!")
    assert t.tokens == ("don't", "panic")
    assert t.exclamations == 2
    assert 1 in t.caps


def test_question_marks_counted():
    assert tokenize("really? are you sure??").questions == 3


def test_punctuation_stripped():
    assert tokenize("covid-19, (really)...").tokens == ("covid19", "really")


def test_ngrams_basic():
    t = tokenize("a b c")
    assert ngrams(t, 2) == ["a b", "b c"]
    assert ngrams(tokenize("a"), 2) == []
    assert ngrams(tokenize("johnson and johnson"), 3) == ["johnson and johnson"]


def test_ngrams_validates_n():
    import pytest

    with pytest.raises(ValueError):
        ngrams(tokenize("a b"), 0)


words = st.text(alphabet=string.ascii_letters + string.digits, min_size=1, max_size=8)


@given(st.lists(words, max_size=12))
def test_deterministic(tokens):
    raw = " ".join(tokens)
    assert tokenize(raw) == tokenize(raw)


@given(st.lists(words, min_size=0, max_size=12), st.lists(words, min_size=0, max_size=4))
def test_hashtag_preservation(plain, tagged):
    raw = " ".join(plain + ["#" + w for w in tagged])
    got = tokenize(raw)
    for w in tagged:
        assert "#" + w.lower() in got.hashtags


@given(st.text(max_size=80))
def test_idempotent_on_rejoined_tokens(raw):
    first = tokenize(raw)
    again = tokenize(" ".join(first.tokens))
    assert again.tokens == first.tokens


def test_tokens_never_contain_urls_or_mentions():
    t = tokenize("go to https://example.com or www.example.org cc @someone")
    assert all("http" not in tok and "www" not in tok for tok in t.tokens)
    assert "someone" not in t.tokens


def test_tokenized_len():
    assert len(tokenize("one two three")) == 3
    assert isinstance(tokenize("x"), TokenizedText)
