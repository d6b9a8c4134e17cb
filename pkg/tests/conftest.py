import pytest

from asrnoise import NoiseContext, Vocabulary, build_statistics, build_homophone_table
from asrnoise.pinyin import PinyinDictionary

from helpers import DEMO_DICT, write_dict


@pytest.fixture(scope="session")
def demo_dict():
    return PinyinDictionary(DEMO_DICT)


@pytest.fixture
def demo_dict_path(tmp_path):
    return write_dict(tmp_path / "pinyin.tsv", DEMO_DICT)


@pytest.fixture(scope="session")
def yin_context(demo_dict):
    """Vocabulary {语, 音, 因, 翻, 译} where only 音/因 are homophones."""
    vocab, freq = build_statistics(["语音翻译", "因因因音音"])
    return NoiseContext(vocab, freq, build_homophone_table(vocab, freq, demo_dict))


_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion a test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (report.when != "call" and report.passed):
        return
    number, title = marker.args
    entry = _criteria.setdefault(number, {"title": title, "passed": 0, "failed": 0})
    entry["passed" if report.passed else "failed"] += 1


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        e = _criteria[number]
        status = "PASS" if not e["failed"] else "FAIL"
        terminalreporter.write_line(
            f"criterion {number} ({e['title']}): {status} "
            f"[{e['passed']} passed, {e['failed']} failed]"
        )
