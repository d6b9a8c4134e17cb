import pytest
from hypothesis import given
from hypothesis import strategies as st

from asrnoise import (
    DictionaryError,
    FrequencyTable,
    PinyinDictionary,
    Vocabulary,
    build_homophone_table,
    homophones_of,
    load_pinyin_dictionary,
    to_pinyin,
    tokenize,
)
from asrnoise.pinyin import strip_tone


def _load(tmp_path, text):
    p = tmp_path / "d.tsv"
    p.write_text(text, encoding="utf-8")
    return load_pinyin_dictionary(p)


def test_load_basic_and_polyphone(tmp_path):
    d = _load(tmp_path, "音\tyin\n数\tshu,shuo\n")
    assert d["音"] == "yin"
    assert d["数"] == "shu"


def test_load_empty(tmp_path):
    assert len(_load(tmp_path, "")) == 0


def test_tones_stripped(tmp_path):
    d = _load(tmp_path, "数\tshù,shuò\n书\tshu1\n女\tnǚ\n绿\tlü4\n")
    assert d["数"] == d["书"] == "shu"
    assert d["女"] == "nv" and d["绿"] == "lv"


def test_duplicate_last_wins(tmp_path):
    d = _load(tmp_path, "音\tyin\n音\tyun\n")
    assert d["音"] == "yun" and d.duplicates == 1


@pytest.mark.parametrize("row, line", [("音yin", 2), ("\tyin", 2), ("音\t", 2), ("音\t,,", 2)])
def test_malformed_rows(tmp_path, row, line):
    with pytest.raises(DictionaryError, match=f"line {line}"):
        _load(tmp_path, "因\tyin\n" + row + "\n")


def test_strip_tone_doctest_values():
    assert strip_tone("Fān") == "fan"


def test_to_pinyin(demo_dict):
    assert to_pinyin(tokenize("语音翻译"), demo_dict) == ["yu", "yin", "fan", "yi"]
    assert to_pinyin(tokenize("90%"), demo_dict) == ["<na>"]
    assert to_pinyin(tokenize(""), demo_dict) == []
    assert to_pinyin(tokenize("猫"), demo_dict) == ["<unk>"]


def test_homophone_table_grouping():
    d = PinyinDictionary({"音": "yin", "因": "yin", "翻": "fan"})
    freq = FrequencyTable({"音": 5, "因": 3, "翻": 2})
    table = build_homophone_table(Vocabulary("音因翻"), freq, d)
    assert table.groups == {"yin": [("音", 5), ("因", 3)], "fan": [("翻", 2)]}
    assert homophones_of("音", table) == [("因", 3)]
    assert homophones_of("翻", table) == []
    assert homophones_of("猫", table) == []


def test_homophone_table_reports_missing():
    d = PinyinDictionary({"音": "yin"})
    freq = FrequencyTable({"音": 5, "猫": 4})
    table = build_homophone_table(Vocabulary("音猫"), freq, d)
    assert table.missing == {"猫": 4}
    assert table.coverage() == pytest.approx(5 / 9)


def test_singletons_and_empty():
    d = PinyinDictionary({"音": "yin", "翻": "fan"})
    table = build_homophone_table(Vocabulary("音翻"), FrequencyTable({"音": 1, "翻": 1}), d)
    assert all(homophones_of(c, table) == [] for c in "音翻")
    assert len(build_homophone_table(Vocabulary(), FrequencyTable(), d)) == 0


chars = [chr(0x4E00 + i) for i in range(12)]


@given(st.dictionaries(st.sampled_from(chars), st.sampled_from(["a", "b", "c", "d"]), min_size=1),
       st.lists(st.integers(1, 9), min_size=12, max_size=12))
def test_homophone_properties(mapping, counts):
    d = PinyinDictionary(mapping)
    freq = FrequencyTable(dict(zip(chars, counts)))
    table = build_homophone_table(Vocabulary(chars), freq, d)
    def hs(x):
        return [c for c, _ in homophones_of(x, table)]

    for a in mapping:
        assert a not in hs(a)
        for b in mapping:
            assert (b in hs(a)) == (a in hs(b))
    for syl, members in table.groups.items():
        assert all(d[c] == syl for c, _ in members)
        assert all(n == freq[c] for c, n in members)
    grouped = [c for g in table.groups.values() for c, _ in g]
    assert sorted(grouped) == sorted(mapping)
