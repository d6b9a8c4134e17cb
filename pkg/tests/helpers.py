"""Synthetic corpora and dictionaries shared by the test modules."""

import itertools
import random
import string

# common characters with their toneless readings
DEMO_DICT = {
    "语": "yu", "音": "yin", "因": "yin", "翻": "fan", "译": "yi", "一": "yi",
    "数": "shu", "书": "shu", "舒": "shu", "该": "gai", "字": "zi", "已": "yi",
    "经": "jing", "大": "da", "幅": "fu", "下": "xia", "滑": "hua", "近": "jin",
    "好": "hao", "饕": "tao", "了": "le",
}


def write_dict(path, mapping, extra_rows=()):
    with open(path, "w", encoding="utf-8") as f:
        for ch, syl in mapping.items():
            f.write(f"{ch}\t{syl}\n")
        for row in extra_rows:
            f.write(row + "\n")
    return path


def syllable_names(n):
    letters = string.ascii_lowercase
    names = ("".join(t) for t in itertools.product(letters, repeat=3))
    return list(itertools.islice(names, n))


def synthetic_inventory(n_syllables=20, per_syllable=3, start=0x4E00):
    """``n_syllables * per_syllable`` distinct CJK characters and their readings."""
    syls = syllable_names(n_syllables)
    chars = [chr(start + i) for i in range(n_syllables * per_syllable)]
    mapping = {ch: syls[i // per_syllable] for i, ch in enumerate(chars)}
    return chars, mapping


def synthetic_lines(chars, n_lines, length, seed=0, other_every=0):
    rng = random.Random(seed)
    weights = [1.0 / (i + 1) for i in range(len(chars))]  # Zipf-like
    lines = []
    for i in range(n_lines):
        toks = rng.choices(chars, weights, k=length)
        line = "".join(toks)
        if other_every and i % other_every == 0:
            line = line[: length // 2] + " 90% " + line[length // 2:]
        lines.append(line)
    return lines


def write_lines(path, lines):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for line in lines:
            f.write(line + "\n")
    return path
