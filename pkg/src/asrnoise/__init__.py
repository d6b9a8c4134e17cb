"""Simulate ASR substitution errors in Chinese-sourced parallel corpora."""

from asrnoise.corpus import (
    FrequencyTable,
    ParallelCorpus,
    SentencePair,
    SentenceTokens,
    Token,
    TokenKind,
    Vocabulary,
    build_statistics,
    load_parallel_corpus,
    tokenize,
)
from asrnoise.erranalyzer import (
    AlignmentOp,
    ErrorReport,
    OpKind,
    error_rates,
    levenshtein_align,
    noise_audit,
)
from asrnoise.errors import (
    AlignmentError,
    ConfigError,
    CorpusError,
    DictionaryError,
    NoiseError,
)
from asrnoise.factored import (
    EmbeddingSpec,
    EmbeddingTables,
    FactoredToken,
    concat_embedding,
    emit_factored_corpus,
    factorize_sentence,
    read_factored_corpus,
)
from asrnoise.noiser import (
    NoiseConfig,
    NoiseContext,
    NoisySentence,
    Strategy,
    eligible_positions,
    perturb_corpus,
    perturb_sentence,
    sample_mask,
    sample_noise,
)
from asrnoise.pinyin import (
    HomophoneTable,
    PinyinDictionary,
    build_homophone_table,
    homophones_of,
    load_pinyin_dictionary,
    to_pinyin,
)
from asrnoise.testset import NoisyTestSpec, craft_noisy_testset, verify_testset

__version__ = "0.1.0"
