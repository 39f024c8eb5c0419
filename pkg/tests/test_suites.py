import pytest

from hopfpath.suites import SUITES, SuiteConfig, run_suite, thread_count


@pytest.mark.parametrize("name", SUITES)
def test_suite_passes_small(name):
    cfg = SuiteConfig(max_nodes=3, d=1, n_translations=2)
    results = run_suite(name, cfg, threads=2)
    assert results
    failed = [r for r in results if not r.ok]
    assert not failed, failed[:3]


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("HOPFPATH_THREADS", "3")
    assert thread_count() == 3
